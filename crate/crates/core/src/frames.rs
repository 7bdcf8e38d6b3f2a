//! Eigenfunction frames assembled from the localization operators of a cover,
//! their frame bounds, canonical dual reconstruction and norm-equivalence
//! diagnostics.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::covers::{sum_symbols, Cover, Symbol};
use crate::error::{Error, Result};
use crate::grid::GridPoint;
use crate::linalg::{spectral_function, CMatrix, CVector};
use crate::locop::{assemble_locop, threshold, LocOperator, Spectrum, NUMERICAL_ZERO};
use crate::signal::{Signal, Window};

/// How many eigenfunctions each region contributes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase", deny_unknown_fields)]
pub enum SelectionPolicy {
    /// `N_gamma = min(n_max, ceil(alpha * trace(H_gamma)))`.
    Alpha { alpha: f64, n_max: usize },
    /// `N_gamma = min(n_max, #{k : lambda_k > epsilon})`.
    Epsilon { epsilon: f64, n_max: usize },
}

impl SelectionPolicy {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SelectionPolicy::Alpha { alpha, n_max } => {
                if !(alpha > 0.0 && alpha.is_finite()) {
                    return Err(Error::invalid(format!(
                        "alpha must be positive, got {alpha}"
                    )));
                }
                if n_max == 0 {
                    return Err(Error::invalid("n_max must be at least 1"));
                }
            }
            SelectionPolicy::Epsilon { epsilon, n_max } => {
                if !(epsilon >= 0.0 && epsilon.is_finite()) {
                    return Err(Error::invalid(format!(
                        "epsilon must be nonnegative, got {epsilon}"
                    )));
                }
                if n_max == 0 {
                    return Err(Error::invalid("n_max must be at least 1"));
                }
            }
        }
        Ok(())
    }

    /// `alpha` itself, or `1/epsilon` for the threshold policy.
    pub fn implied_alpha(&self) -> Option<f64> {
        match *self {
            SelectionPolicy::Alpha { alpha, .. } => Some(alpha),
            SelectionPolicy::Epsilon { epsilon, .. } if epsilon > 0.0 => Some(1.0 / epsilon),
            SelectionPolicy::Epsilon { .. } => None,
        }
    }

    pub fn epsilon(&self) -> Option<f64> {
        match *self {
            SelectionPolicy::Epsilon { epsilon, .. } => Some(epsilon),
            SelectionPolicy::Alpha { .. } => None,
        }
    }
}

/// Per-region counts `N_gamma`. Each entry pairs a spectrum with the region's
/// trace `||eta_gamma||_1 / L` (or `A ||m||_1` for Gabor multipliers).
pub fn select_eigenfunctions(
    regions: &[(&Spectrum, f64)],
    policy: &SelectionPolicy,
) -> Result<Vec<usize>> {
    policy.validate()?;
    if regions.is_empty() || regions.iter().any(|(s, _)| s.is_empty()) {
        return Err(Error::invalid(
            "selection needs at least one nonempty spectrum",
        ));
    }
    Ok(regions
        .iter()
        .map(|&(s, trace)| {
            if s.numerical_rank() == 0 {
                return 0;
            }
            match *policy {
                SelectionPolicy::Alpha { alpha, n_max } => {
                    let wanted = (alpha * trace).ceil().max(0.0) as usize;
                    wanted.min(n_max).min(s.len())
                }
                SelectionPolicy::Epsilon { epsilon, n_max } => s
                    .count_above(epsilon.max(NUMERICAL_ZERO * s.top()))
                    .min(n_max),
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    /// Unit-norm eigenvector.
    pub vector: CVector,
    pub weight: f64,
    /// Region index.
    pub gamma: usize,
    /// One-based eigen-index within the region.
    pub k: usize,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenFrame {
    pub len: usize,
    pub atoms: Vec<Atom>,
    pub weighted: bool,
    /// `N_gamma` per region, in region order.
    pub counts: Vec<usize>,
    pub warnings: Vec<String>,
}

impl EigenFrame {
    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Union of two frames on the same space (regions of `other` renumbered after ours).
    pub fn union(&self, other: &EigenFrame) -> Result<EigenFrame> {
        crate::error::check_len(self.len, other.len)?;
        let offset = self.counts.len();
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().map(|a| Atom {
            gamma: a.gamma + offset,
            ..a.clone()
        }));
        let mut counts = self.counts.clone();
        counts.extend(&other.counts);
        Ok(EigenFrame {
            len: self.len,
            atoms,
            weighted: self.weighted && other.weighted,
            counts,
            warnings: [self.warnings.clone(), other.warnings.clone()].concat(),
        })
    }

    /// Analysis coefficients `w_i <f, phi_i>`.
    pub fn analysis(&self, f: &CVector) -> Vec<Complex64> {
        self.atoms
            .iter()
            .map(|a| a.vector.dotc(f) * a.weight)
            .collect()
    }

    /// `sum_i c_i w_i phi_i`.
    pub fn synthesis(&self, coeffs: &[Complex64]) -> CVector {
        let mut out = CVector::zeros(self.len);
        for (a, &c) in self.atoms.iter().zip(coeffs) {
            out.axpy(c * a.weight, &a.vector, Complex64::new(1.0, 0.0));
        }
        out
    }

    /// `S = sum_i w_i^2 |phi_i><phi_i|`.
    pub fn frame_operator(&self) -> CMatrix {
        let cols: Vec<CVector> = self
            .atoms
            .iter()
            .map(|a| &a.vector * Complex64::new(a.weight, 0.0))
            .collect();
        if cols.is_empty() {
            return CMatrix::zeros(self.len, self.len);
        }
        let phi = CMatrix::from_columns(&cols);
        &phi * phi.adjoint()
    }
}

/// Operators `H_{eta_gamma}` for every region, each with its spectrum computed.
/// Regions are processed in parallel; the output keeps region order.
pub fn cover_operators(cover: &Cover, phi: &Window) -> Result<Vec<LocOperator>> {
    crate::error::check_len(phi.len(), cover.len())?;
    cover
        .regions()
        .par_iter()
        .map(|eta| {
            let op = assemble_locop(eta, phi)?;
            op.spectrum()?;
            Ok(op)
        })
        .collect()
}

/// Trace `scale * ||eta||_1` from the symbol, free of matrix round-off.
pub(crate) fn nominal_trace(op: &LocOperator) -> f64 {
    op.symbol().mass() * op.scale()
}

/// Selects eigenvectors of already assembled operators and packs them into a frame.
pub fn frame_from_operators(
    ops: &[LocOperator],
    policy: &SelectionPolicy,
    weighted: bool,
) -> Result<EigenFrame> {
    let spectra: Vec<&Spectrum> = ops.iter().map(|op| op.spectrum()).collect::<Result<_>>()?;
    let regions: Vec<(&Spectrum, f64)> = spectra
        .iter()
        .zip(ops)
        .map(|(&s, op)| (s, nominal_trace(op)))
        .collect();
    let counts = select_eigenfunctions(&regions, policy)?;
    let mut atoms = Vec::with_capacity(counts.iter().sum());
    let mut warnings = Vec::new();
    for (gamma, (s, &n)) in spectra.iter().zip(&counts).enumerate() {
        if s.numerical_rank() == 0 {
            warnings.push(format!(
                "region {gamma}: operator is numerically zero, contributes no atoms"
            ));
        }
        for k in 0..n {
            let lambda = s.eigenvalues[k];
            atoms.push(Atom {
                vector: s.vector(k),
                weight: if weighted { lambda } else { 1.0 },
                gamma,
                k: k + 1,
                lambda,
            });
        }
    }
    if atoms.is_empty() {
        return Err(Error::EmptyFrame);
    }
    Ok(EigenFrame {
        len: ops[0].len(),
        atoms,
        weighted,
        counts,
        warnings,
    })
}

/// Checks the cover hypotheses needed for a frame: the symbols must cover the
/// grid, and unweighted frames additionally need every region to contain the
/// ball of radius 1 around its center.
pub fn check_frame_preconditions(cover: &Cover, weighted: bool) -> Result<()> {
    let sum = sum_symbols(cover);
    if !(sum.min > 0.0) {
        return Err(Error::PreconditionViolation(format!(
            "symbols do not cover the grid (min of sum = {})",
            sum.min
        )));
    }
    if !weighted {
        let worst = cover
            .regions()
            .iter()
            .enumerate()
            .find(|(_, s)| s.inner_radius().is_none_or(|r| r < 1));
        if let Some((i, s)) = worst {
            return Err(Error::PreconditionViolation(format!(
                "unweighted frames need inner regularity eta_gamma(z) >= c 1_(B_r)(z - gamma) \
                 with r >= 1; region {i} centered at {} fails it",
                s.center()
            )));
        }
    }
    Ok(())
}

/// Eigenfunction frame of a cover: the first `N_gamma` eigenvectors of each
/// `H_{eta_gamma}`, weighted by their eigenvalues when `weighted`.
pub fn assemble_frame(
    cover: &Cover,
    phi: &Window,
    policy: &SelectionPolicy,
    weighted: bool,
) -> Result<EigenFrame> {
    policy.validate()?;
    check_frame_preconditions(cover, weighted)?;
    let ops = cover_operators(cover, phi)?;
    frame_from_operators(&ops, policy, weighted)
}

#[derive(Debug, Clone)]
pub struct FrameCertificate {
    pub a: f64,
    pub b: f64,
    pub condition: f64,
    pub frame_operator: CMatrix,
    pub is_frame: bool,
    pub a_tol: f64,
    spectrum: Spectrum,
}

impl FrameCertificate {
    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }
}

/// Frame bounds with the default tolerance `a_tol = 1e-9 * B`.
pub fn frame_certificate(frame: &EigenFrame) -> Result<FrameCertificate> {
    frame_certificate_with_tol(frame, None)
}

pub fn frame_certificate_with_tol(
    frame: &EigenFrame,
    a_tol: Option<f64>,
) -> Result<FrameCertificate> {
    if frame.is_empty() {
        return Err(Error::EmptyFrame);
    }
    let frame_operator = frame.frame_operator();
    let spectrum = Spectrum::of(&frame_operator)?;
    // S is PSD; clamp round-off below zero
    let a = spectrum.bottom().max(0.0);
    let b = spectrum.top().max(0.0);
    let a_tol = a_tol.unwrap_or(1e-9 * b);
    Ok(FrameCertificate {
        a,
        b,
        condition: if a > 0.0 { b / a } else { f64::INFINITY },
        frame_operator,
        is_frame: a > a_tol,
        a_tol,
        spectrum,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub signal: Signal,
    /// `||f_rec - f|| / ||f||`, zero for the zero signal.
    pub rel_error: f64,
}

/// Canonical dual reconstruction `f_rec = S^{-1} sum_i w_i <f, phi_i> w_i phi_i`.
pub fn reconstruct(frame: &EigenFrame, f: &Signal) -> Result<Reconstruction> {
    let cert = frame_certificate(frame)?;
    reconstruct_with(frame, &cert, f)
}

/// As [`reconstruct`], reusing a certificate computed for `frame`.
pub fn reconstruct_with(
    frame: &EigenFrame,
    cert: &FrameCertificate,
    f: &Signal,
) -> Result<Reconstruction> {
    crate::error::check_len(frame.len, f.len())?;
    if !cert.is_frame {
        return Err(Error::NotAFrame {
            lower_bound: cert.a,
            tolerance: cert.a_tol,
        });
    }
    let y = frame.synthesis(&frame.analysis(f.samples()));
    let s = &cert.spectrum;
    let mut rec = CVector::zeros(frame.len);
    for (k, &lam) in s.eigenvalues.iter().enumerate() {
        let v = s.eigenvectors.column(k);
        rec.axpy(v.dotc(&y) / lam, &v, Complex64::new(1.0, 0.0));
    }
    let norm = f.norm();
    let rel_error = if norm == 0.0 {
        0.0
    } else {
        (&rec - f.samples()).norm() / norm
    };
    Ok(Reconstruction {
        signal: Signal::from_vector(rec)?,
        rel_error,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NormVariant {
    /// `K_gamma = H_gamma`.
    Plain,
    /// `K_gamma = H_gamma^2`.
    Squared,
    /// `K_gamma = H^eps_gamma`.
    Thresholded(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormConstants {
    /// `lambda_min(G)`.
    pub c: f64,
    /// `lambda_max(G)`.
    pub upper: f64,
}

/// `G = sum_gamma K_gamma^* K_gamma` for the chosen variant.
pub fn norm_gram(ops: &[LocOperator], variant: NormVariant) -> Result<CMatrix> {
    let len = ops.first().map_or(0, LocOperator::len);
    let mut g = CMatrix::zeros(len, len);
    for op in ops {
        let h = op.matrix();
        let k2 = match variant {
            NormVariant::Plain => h * h,
            NormVariant::Squared => {
                let h2 = h * h;
                &h2 * &h2
            }
            NormVariant::Thresholded(eps) => threshold(op, eps)?.matrix_power(2),
        };
        g += k2;
    }
    Ok(g)
}

/// Extreme eigenvalues `(c, C)` of `sum_gamma K_gamma^* K_gamma`; the norm
/// equivalence constants are their square roots.
pub fn norm_equivalence(ops: &[LocOperator], variant: NormVariant) -> Result<NormConstants> {
    if let NormVariant::Thresholded(eps) = variant {
        if !(eps >= 0.0) {
            return Err(Error::invalid(format!("threshold must be >= 0, got {eps}")));
        }
    }
    let s = Spectrum::of(&norm_gram(ops, variant)?)?;
    Ok(NormConstants {
        c: s.bottom(),
        upper: s.top(),
    })
}

pub fn norm_equivalence_constants(
    cover: &Cover,
    phi: &Window,
    variant: NormVariant,
) -> Result<NormConstants> {
    norm_equivalence(&cover_operators(cover, phi)?, variant)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub c: f64,
    #[serde(rename = "C")]
    pub upper: f64,
}

/// Slack allowed when checking that `c(eps)` does not increase.
pub const SWEEP_MONOTONE_SLACK: f64 = 1e-12;

/// Thresholded constants over increasing `epsilons`. Fails with a numeric
/// error if `c(eps)` increases by more than [`SWEEP_MONOTONE_SLACK`].
pub fn epsilon_sweep(ops: &[LocOperator], epsilons: &[f64]) -> Result<Vec<SweepRow>> {
    if epsilons.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::invalid(
            "sweep thresholds must be strictly increasing",
        ));
    }
    let rows: Vec<SweepRow> = epsilons
        .iter()
        .map(|&eps| {
            let nc = norm_equivalence(ops, NormVariant::Thresholded(eps))?;
            Ok(SweepRow {
                epsilon: eps,
                c: nc.c,
                upper: nc.upper,
            })
        })
        .collect::<Result<_>>()?;
    if let Some(w) = rows
        .windows(2)
        .find(|w| w[1].c > w[0].c + SWEEP_MONOTONE_SLACK)
    {
        return Err(Error::Numeric {
            message: format!(
                "c(eps) increased from {} at eps={} to {} at eps={}",
                w[0].c, w[0].epsilon, w[1].c, w[1].epsilon
            ),
            residual: w[1].c - w[0].c,
        });
    }
    Ok(rows)
}

/// Largest swept threshold whose lower constant still exceeds `a_tol`.
pub fn largest_certified_epsilon(rows: &[SweepRow], a_tol: f64) -> Option<f64> {
    rows.iter()
        .filter(|r| r.c > a_tol)
        .map(|r| r.epsilon)
        .fold(None, |acc: Option<f64>, e| {
            Some(acc.map_or(e, |a| a.max(e)))
        })
}

/// Lower bound on the selected eigenvalues of an inner-regular cover:
/// `lambda_k^gamma >= c * lambda_k(H_{B_r}) >= c * lambda_N(H_{B_r})`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InnerRegularityBound {
    pub radius: usize,
    /// `min_gamma min_{B_r(gamma)} eta_gamma`.
    pub c: f64,
    /// `N = max_gamma N_gamma`.
    pub n: usize,
    pub ball_spectrum: Vec<f64>,
    /// `c * lambda_N(H_{B_r})`.
    pub bound: f64,
    /// Smallest eigenvalue among the selected atoms.
    pub min_selected: f64,
    pub holds: bool,
}

pub fn inner_regularity_bound(
    cover: &Cover,
    phi: &Window,
    radius: usize,
    frame: &EigenFrame,
) -> Result<InnerRegularityBound> {
    if frame.is_empty() {
        return Err(Error::EmptyFrame);
    }
    let len = cover.len();
    let c = cover
        .regions()
        .iter()
        .map(|s| s.min_on_ball(radius))
        .fold(f64::INFINITY, f64::min);
    let ball = Symbol::indicator(
        len,
        GridPoint::ORIGIN,
        cover.grid().ball(GridPoint::ORIGIN, radius),
    )?;
    let ball_spectrum = assemble_locop(&ball, phi)?.spectrum()?.eigenvalues.clone();
    let n = frame.counts.iter().copied().max().unwrap_or(0);
    let bound = c * ball_spectrum[n.max(1) - 1];
    let min_selected = frame
        .atoms
        .iter()
        .map(|a| a.lambda)
        .fold(f64::INFINITY, f64::min);
    Ok(InnerRegularityBound {
        radius,
        c,
        n,
        ball_spectrum,
        bound,
        min_selected,
        holds: min_selected >= bound - 1e-9 && min_selected > 0.0,
    })
}

/// Dense `sum_gamma (H^eps_gamma)^2`, the frame operator a weighted threshold
/// frame must reproduce.
pub fn thresholded_square_sum(ops: &[LocOperator], epsilon: f64) -> Result<CMatrix> {
    norm_gram(ops, NormVariant::Thresholded(epsilon))
}

/// `S^{-1/2}` from an eigendecomposition of `S`.
pub(crate) fn inverse_sqrt(s: &Spectrum) -> CMatrix {
    spectral_function(&s.eigenvalues, &s.eigenvectors, |l| 1.0 / l.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covers::gen_regular_boxes;
    use crate::linalg::max_entry_deviation;
    use crate::signal::gauss_window;
    use crate::testutil::random_signal;
    use nalgebra::DVector;

    fn whole_grid(len: usize) -> Cover {
        Cover::new(len, vec![Symbol::full(len, GridPoint::ORIGIN).unwrap()]).unwrap()
    }

    #[test]
    fn policy_validation() {
        assert!(SelectionPolicy::Alpha {
            alpha: 0.0,
            n_max: 1
        }
        .validate()
        .is_err());
        assert!(SelectionPolicy::Epsilon {
            epsilon: -1.0,
            n_max: 1
        }
        .validate()
        .is_err());
        assert!(SelectionPolicy::Epsilon {
            epsilon: 0.1,
            n_max: 0
        }
        .validate()
        .is_err());
        assert_eq!(
            SelectionPolicy::Epsilon {
                epsilon: 0.25,
                n_max: 1
            }
            .implied_alpha(),
            Some(4.0)
        );
    }

    #[test]
    fn orthonormal_basis_frame() {
        let phi = gauss_window(8).unwrap();
        let policy = SelectionPolicy::Alpha {
            alpha: 1.0,
            n_max: 8,
        };
        let frame = assemble_frame(&whole_grid(8), &phi, &policy, true).unwrap();
        assert_eq!(frame.atoms.len(), 8);
        assert!(frame.atoms.iter().all(|a| (a.weight - 1.0).abs() < 1e-10));
        let cert = frame_certificate(&frame).unwrap();
        assert!((cert.a - 1.0).abs() < 1e-10 && (cert.b - 1.0).abs() < 1e-10);

        let f = random_signal(8, 4, false);
        let rec = reconstruct(&frame, &f).unwrap();
        assert!(rec.rel_error <= 1e-12, "{}", rec.rel_error);
        let zero = reconstruct(&frame, &Signal::zeros(8)).unwrap();
        assert_eq!(zero.rel_error, 0.0);
        assert_eq!(zero.signal.norm(), 0.0);

        let doubled = frame.union(&frame).unwrap();
        let c2 = frame_certificate(&doubled).unwrap();
        assert!((c2.a - 2.0 * cert.a).abs() < 1e-10 && (c2.b - 2.0 * cert.b).abs() < 1e-10);
    }

    #[test]
    fn missing_direction_is_not_a_frame() {
        let phi = gauss_window(8).unwrap();
        // trace is 8, so alpha = 7/8 asks for L - 1 vectors
        let policy = SelectionPolicy::Alpha {
            alpha: 0.875,
            n_max: 8,
        };
        let frame = assemble_frame(&whole_grid(8), &phi, &policy, true).unwrap();
        assert_eq!(frame.atoms.len(), 7);
        let cert = frame_certificate(&frame).unwrap();
        assert!(cert.a < 1e-9);
        assert!(!cert.is_frame);
        let err = reconstruct_with(&frame, &cert, &random_signal(8, 1, false)).unwrap_err();
        assert!(matches!(err, Error::NotAFrame { .. }));
    }

    #[test]
    fn epsilon_above_spectrum_gives_empty_frame() {
        let phi = gauss_window(16).unwrap();
        let cover = gen_regular_boxes(16, 4, 4).unwrap();
        let policy = SelectionPolicy::Epsilon {
            epsilon: 1.5,
            n_max: 16,
        };
        let ops = cover_operators(&cover, &phi).unwrap();
        let spectra: Vec<_> = ops
            .iter()
            .map(|o| (o.spectrum().unwrap(), nominal_trace(o)))
            .collect();
        assert!(select_eigenfunctions(&spectra, &policy)
            .unwrap()
            .iter()
            .all(|&n| n == 0));
        assert!(matches!(
            assemble_frame(&cover, &phi, &policy, true),
            Err(Error::EmptyFrame)
        ));
        assert!(select_eigenfunctions(&[], &policy).is_err());
    }

    #[test]
    fn epsilon_zero_selects_numerical_rank() {
        let phi = gauss_window(16).unwrap();
        let ops = cover_operators(&gen_regular_boxes(16, 8, 8).unwrap(), &phi).unwrap();
        let spectra: Vec<_> = ops
            .iter()
            .map(|o| (o.spectrum().unwrap(), nominal_trace(o)))
            .collect();
        let policy = SelectionPolicy::Epsilon {
            epsilon: 0.0,
            n_max: 16,
        };
        let counts = select_eigenfunctions(&spectra, &policy).unwrap();
        for ((s, _), n) in spectra.iter().zip(counts) {
            assert_eq!(n, s.numerical_rank());
        }
    }

    #[test]
    fn regular_boxes_share_counts_and_match_oracle() {
        // numpy oracle (tests/oracle/golden.py): 2 eigenvalues above 0.2 per
        // region, 32 atoms, A = 0.33261114623113086, B = 0.589387799109406
        let phi = gauss_window(16).unwrap();
        let cover = gen_regular_boxes(16, 4, 4).unwrap();
        let policy = SelectionPolicy::Epsilon {
            epsilon: 0.2,
            n_max: 16,
        };
        let frame = assemble_frame(&cover, &phi, &policy, true).unwrap();
        assert!(frame.counts.iter().all(|&n| n == 2));
        assert_eq!(frame.atoms.len(), 32);
        let cert = frame_certificate(&frame).unwrap();
        assert!((cert.a - 0.332_611_146_231_130_86).abs() < 1e-9);
        assert!((cert.b - 0.589_387_799_109_406).abs() < 1e-9);

        let ops = cover_operators(&cover, &phi).unwrap();
        let direct = thresholded_square_sum(&ops, 0.2).unwrap();
        assert!(max_entry_deviation(&direct, &cert.frame_operator) <= 1e-9);
    }

    #[test]
    fn plain_and_squared_constants_match_oracle() {
        let phi = gauss_window(16).unwrap();
        let ops = cover_operators(&gen_regular_boxes(16, 4, 4).unwrap(), &phi).unwrap();
        let plain = norm_equivalence(&ops, NormVariant::Plain).unwrap();
        assert!((plain.c - 0.335_970_024_708_624_1).abs() < 1e-9);
        assert!((plain.upper - 0.590_563_468_144_774).abs() < 1e-9);
        let sq = norm_equivalence(&ops, NormVariant::Squared).unwrap();
        assert!((sq.c - 0.069_937_089_708_668_47).abs() < 1e-9);
        assert!((sq.upper - 0.234_553_613_756_590_7).abs() < 1e-9);
        let t0 = norm_equivalence(&ops, NormVariant::Thresholded(0.0)).unwrap();
        assert!((t0.c - plain.c).abs() < 1e-12);
    }

    #[test]
    fn whole_grid_constants_are_one() {
        let phi = gauss_window(8).unwrap();
        for v in [
            NormVariant::Plain,
            NormVariant::Squared,
            NormVariant::Thresholded(0.5),
        ] {
            let nc = norm_equivalence_constants(&whole_grid(8), &phi, v).unwrap();
            assert!(
                (nc.c - 1.0).abs() < 1e-10 && (nc.upper - 1.0).abs() < 1e-10,
                "{v:?}"
            );
        }
    }

    #[test]
    fn sweep_rejects_unsorted() {
        let phi = gauss_window(8).unwrap();
        let ops = cover_operators(&whole_grid(8), &phi).unwrap();
        assert!(epsilon_sweep(&ops, &[0.2, 0.1]).is_err());
        let rows = epsilon_sweep(&ops, &[0.0, 0.5, 1.0]).unwrap();
        assert_eq!(largest_certified_epsilon(&rows, 1e-9), Some(0.5));
    }

    #[test]
    fn unweighted_needs_inner_regularity() {
        let phi = gauss_window(16).unwrap();
        let policy = SelectionPolicy::Epsilon {
            epsilon: 0.1,
            n_max: 16,
        };
        let thin = gen_regular_boxes(16, 2, 16).unwrap();
        let err = assemble_frame(&thin, &phi, &policy, false).unwrap_err();
        assert!(matches!(err, Error::PreconditionViolation(_)), "{err}");
        assert!(err.to_string().contains("inner regularity"));
        assert!(assemble_frame(&thin, &phi, &policy, true).is_ok());
    }

    #[test]
    fn uncovered_grid_is_rejected() {
        let phi = gauss_window(8).unwrap();
        let s = Symbol::indicator(8, GridPoint::ORIGIN, [GridPoint::ORIGIN]).unwrap();
        let cover = Cover::new(8, vec![s]).unwrap();
        let policy = SelectionPolicy::Epsilon {
            epsilon: 0.0,
            n_max: 8,
        };
        assert!(matches!(
            assemble_frame(&cover, &phi, &policy, true),
            Err(Error::PreconditionViolation(_))
        ));
    }

    #[test]
    fn inverse_sqrt_helper() {
        let m = CMatrix::from_diagonal(&DVector::from_vec(vec![
            Complex64::new(4.0, 0.0),
            Complex64::new(1.0, 0.0),
        ]));
        let r = inverse_sqrt(&Spectrum::of(&m).unwrap());
        assert!((r[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((r[(1, 1)].re - 1.0).abs() < 1e-15);
    }
}

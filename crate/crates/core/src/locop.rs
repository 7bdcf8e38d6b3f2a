//! Time-frequency localization operators
//! `H_eta = (1/L) sum_z eta(z) |pi(z) phi><pi(z) phi|`, their spectra and
//! spectral truncations.

use std::ops::Range;
use std::sync::{Arc, OnceLock};

use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::covers::Symbol;
use crate::error::{check_len, Error, Result};
use crate::grid::{GridPoint, PhaseSpaceGrid};
use crate::linalg::{eigh_desc, max_entry_deviation, spectral_function, CMatrix, CVector};
use crate::signal::{Signal, Twiddles, Window};
use crate::stft::stft;

/// Eigenvalues below `NUMERICAL_ZERO * lambda_1` count as zero in rank reports.
pub const NUMERICAL_ZERO: f64 = 1e-12;

/// `scale * sum_cells v |g_z><g_z|` with `g_z = pi(z) window`.
///
/// Rows of the upper triangle are built in parallel; within a row the cells are
/// accumulated in their stored order, so the result does not depend on the
/// number of threads. The lower triangle is the conjugate mirror.
pub(crate) fn rank_one_sum(
    window: &DVector<Complex64>,
    cells: &[(GridPoint, f64)],
    scale: f64,
) -> CMatrix {
    let len = window.len();
    let tw = Twiddles::new(len);
    let conj_tw: Vec<Complex64> = (0..len).map(|k| tw.get(k).conj()).collect();
    let conj_win: Vec<Complex64> = window.iter().map(|z| z.conj()).collect();
    let rows: Vec<Vec<Complex64>> = (0..len)
        .into_par_iter()
        .map(|t| {
            let mut row = vec![Complex64::new(0.0, 0.0); len];
            for &(p, v) in cells {
                let (x, xi) = (p.x, p.xi);
                let a = tw.get(xi * t) * window[(t + len - x) % len] * v;
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for (s, out) in row.iter_mut().enumerate().skip(t) {
                    *out += a * conj_tw[(xi * s) % len] * conj_win[(s + len - x) % len];
                }
            }
            row
        })
        .collect();
    let mut m = CMatrix::zeros(len, len);
    for (t, row) in rows.iter().enumerate() {
        for s in t..len {
            let v = row[s] * scale;
            m[(t, s)] = v;
            m[(s, t)] = v.conj();
        }
        m[(t, t)].im = 0.0;
    }
    m
}

/// Descending eigenpairs; column `k` of `eigenvectors` belongs to `eigenvalues[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl Spectrum {
    pub fn of(matrix: &CMatrix) -> Result<Self> {
        let (eigenvalues, eigenvectors) = eigh_desc(matrix)?;
        Ok(Spectrum {
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn top(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn bottom(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// `#{k : lambda_k > eps}`; a prefix length since eigenvalues descend.
    pub fn count_above(&self, eps: f64) -> usize {
        self.eigenvalues.iter().take_while(|&&l| l > eps).count()
    }

    /// `#{k : lambda_k > NUMERICAL_ZERO * lambda_1}`.
    pub fn numerical_rank(&self) -> usize {
        let top = self.top();
        if top <= 0.0 {
            return 0;
        }
        self.count_above(NUMERICAL_ZERO * top)
    }

    pub fn vector(&self, k: usize) -> CVector {
        self.eigenvectors.column(k).into_owned()
    }

    /// Orthogonal projector onto the span of the first `n` eigenvectors.
    pub fn projector(&self, n: usize) -> CMatrix {
        let q = self.eigenvectors.columns(0, n);
        q * q.adjoint()
    }
}

/// A dense Hermitian localization operator with its provenance.
///
/// The spectrum is computed on first use and cached.
#[derive(Debug, Clone)]
pub struct LocOperator {
    matrix: CMatrix,
    symbol: Arc<Symbol>,
    window: Arc<Window>,
    scale: f64,
    spectrum: OnceLock<Spectrum>,
}

/// Builds `H_eta` with the `1/L` normalization, so `H_1 = I`.
pub fn assemble_locop(eta: &Symbol, phi: &Window) -> Result<LocOperator> {
    let scale = 1.0 / phi.len() as f64;
    LocOperator::assemble(Arc::new(eta.clone()), Arc::new(phi.clone()), scale)
}

impl LocOperator {
    pub(crate) fn assemble(symbol: Arc<Symbol>, window: Arc<Window>, scale: f64) -> Result<Self> {
        check_len(window.len(), symbol.len())?;
        window.require_normalized()?;
        let matrix = rank_one_sum(window.samples(), symbol.cells(), scale);
        Ok(LocOperator {
            matrix,
            symbol,
            window,
            scale,
            spectrum: OnceLock::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.is_empty()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn symbol(&self) -> &Symbol {
        &self.symbol
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    /// Coefficient in front of the rank-one sum (`1/L`, or the tight-frame constant).
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn apply(&self, f: &CVector) -> CVector {
        &self.matrix * f
    }

    /// `<H f, f>`.
    pub fn quadratic_form(&self, f: &CVector) -> f64 {
        f.dotc(&(&self.matrix * f)).re
    }

    pub fn spectrum(&self) -> Result<&Spectrum> {
        if let Some(s) = self.spectrum.get() {
            return Ok(s);
        }
        let s = Spectrum::of(&self.matrix)?;
        Ok(self.spectrum.get_or_init(|| s))
    }

    /// Operator with the same window and scale for a different symbol.
    pub fn with_symbol(&self, symbol: Symbol) -> Result<LocOperator> {
        Self::assemble(Arc::new(symbol), self.window.clone(), self.scale)
    }
}

/// Alias of [`LocOperator::spectrum`].
pub fn eigendecomp(op: &LocOperator) -> Result<&Spectrum> {
    op.spectrum()
}

/// `H^eps f = sum_{k : lambda_k > eps} lambda_k <f, phi_k> phi_k`.
#[derive(Debug, Clone)]
pub struct ThresholdedOp<'a> {
    source: &'a LocOperator,
    epsilon: f64,
    rank: usize,
}

pub fn threshold(op: &LocOperator, epsilon: f64) -> Result<ThresholdedOp<'_>> {
    if !(epsilon >= 0.0) {
        return Err(Error::invalid(format!(
            "threshold must be >= 0, got {epsilon}"
        )));
    }
    let rank = op.spectrum()?.count_above(epsilon);
    Ok(ThresholdedOp {
        source: op,
        epsilon,
        rank,
    })
}

impl<'a> ThresholdedOp<'a> {
    pub fn source(&self) -> &'a LocOperator {
        self.source
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Zero-based indices of the kept eigenpairs.
    pub fn kept_indices(&self) -> Range<usize> {
        0..self.rank
    }

    fn spectrum(&self) -> &'a Spectrum {
        self.source
            .spectrum
            .get()
            .expect("spectrum computed when thresholding")
    }

    pub fn apply(&self, f: &CVector) -> CVector {
        let s = self.spectrum();
        let mut out = CVector::zeros(f.len());
        for k in self.kept_indices() {
            let v = s.eigenvectors.column(k);
            let c = v.dotc(f) * s.eigenvalues[k];
            out.axpy(c, &v, Complex64::new(1.0, 0.0));
        }
        out
    }

    /// `(H^eps)^power` as a dense matrix.
    pub fn matrix_power(&self, power: i32) -> CMatrix {
        let s = self.spectrum();
        let rank = self.rank;
        spectral_function(
            &s.eigenvalues[..rank],
            &s.eigenvectors.columns(0, rank).into_owned(),
            |l| l.powi(power),
        )
    }

    pub fn matrix(&self) -> CMatrix {
        self.matrix_power(1)
    }
}

/// `<H_eta f, f> = (1/L) sum_z eta(z) |V f(z)|^2`, evaluated through the STFT.
pub fn concentration(f: &Signal, eta: &Symbol, phi: &Window) -> Result<f64> {
    check_len(phi.len(), eta.len())?;
    if f.norm() == 0.0 {
        return Err(Error::invalid(
            "concentration of the zero signal is undefined",
        ));
    }
    let v = stft(f, phi)?;
    let total: f64 = eta
        .cells()
        .iter()
        .map(|&(p, w)| w * v.get(p).norm_sqr())
        .sum();
    Ok(total / phi.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjugationReport {
    pub shift: GridPoint,
    /// `max |pi(z) H_m pi(z)^* - H_{m(. - z)}|`.
    pub max_deviation: f64,
    /// Largest eigenvalue difference between `H_m` and `H_{m(. - z)}`.
    pub spectrum_deviation: f64,
    pub passed: bool,
}

/// Compares `pi(z) H pi(z)^*` against the operator of the shifted symbol.
pub fn shift_symbol_conjugation_check(op: &LocOperator, z: GridPoint) -> Result<ConjugationReport> {
    let len = op.len();
    let shifted = op.with_symbol(op.symbol().shifted(z))?;
    // pi(z) as a matrix: column s is pi(z) delta_s
    let tw = Twiddles::new(len);
    let z = GridPoint::new(z.x % len, z.xi % len);
    let mut pi = CMatrix::zeros(len, len);
    for s in 0..len {
        let t = (s + z.x) % len;
        pi[(t, s)] = tw.get(z.xi * t);
    }
    let conj = &pi * op.matrix() * pi.adjoint();
    let max_deviation = max_entry_deviation(&conj, shifted.matrix());
    let spectrum_deviation = op
        .spectrum()?
        .eigenvalues
        .iter()
        .zip(&shifted.spectrum()?.eigenvalues)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(ConjugationReport {
        shift: z,
        max_deviation,
        spectrum_deviation,
        passed: max_deviation <= 1e-9 && spectrum_deviation <= 1e-9,
    })
}

/// Checks that `op` has the same grid as `grid`.
pub fn check_grid(op: &LocOperator, grid: PhaseSpaceGrid) -> Result<()> {
    check_len(grid.len(), op.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermitian_deviation;
    use crate::signal::{gauss_window, window_atom};
    use crate::testutil::{max_abs, random_signal};

    fn box8() -> (Symbol, Window) {
        let cells = (4..12).flat_map(|x| (4..12).map(move |xi| GridPoint::new(x, xi)));
        (
            Symbol::indicator(16, GridPoint::new(8, 8), cells).unwrap(),
            gauss_window(16).unwrap(),
        )
    }

    // numpy eigh of the brute-force rank-one sum (tests/oracle/golden.py)
    const BOX8_GOLDEN: [f64; 8] = [
        0.9801699244776376,
        0.9028786882737693,
        0.7536392648151393,
        0.5615391365128074,
        0.37262770536979706,
        0.22046792828062872,
        0.11654554565823874,
        0.055201332246750626,
    ];

    #[test]
    fn full_symbol_gives_identity() {
        for len in [8, 16] {
            let phi = gauss_window(len).unwrap();
            let op = assemble_locop(&Symbol::full(len, GridPoint::ORIGIN).unwrap(), &phi).unwrap();
            let dev = max_abs(&(op.matrix() - CMatrix::identity(len, len)));
            assert!(dev <= 1e-10, "L={len}: {dev:e}");
        }
    }

    #[test]
    fn point_symbol_is_rank_one() {
        let phi = gauss_window(8).unwrap();
        let z0 = GridPoint::new(3, 5);
        let op = assemble_locop(&Symbol::indicator(8, z0, [z0]).unwrap(), &phi).unwrap();
        let g = window_atom(z0, &phi);
        let expected = &g * g.adjoint() / Complex64::new(8.0, 0.0);
        assert!(max_entry_deviation(op.matrix(), &expected) < 1e-15);
        let s = op.spectrum().unwrap();
        assert!((s.eigenvalues[0] - 0.125).abs() < 1e-10);
        assert!(s.eigenvalues[1..].iter().all(|l| l.abs() < 1e-10));
        assert_eq!(s.numerical_rank(), 1);
    }

    #[test]
    fn box8_trace_and_golden_spectrum() {
        let (eta, phi) = box8();
        let op = assemble_locop(&eta, &phi).unwrap();
        assert!((op.trace() - 4.0).abs() <= 4.0 * 1e-10);
        assert!(hermitian_deviation(op.matrix()) <= 1e-10);
        let s = op.spectrum().unwrap();
        for (k, (got, want)) in s.eigenvalues.iter().zip(BOX8_GOLDEN).enumerate() {
            assert!(
                (got - want).abs() <= 1e-8,
                "lambda_{}: {got} vs {want}",
                k + 1
            );
        }
        assert_eq!(threshold(&op, 0.5).unwrap().rank(), 4);
    }

    #[test]
    fn thresholding_edges() {
        let (eta, phi) = box8();
        let op = assemble_locop(&eta, &phi).unwrap();
        let top = op.spectrum().unwrap().top();
        let t = threshold(&op, top).unwrap();
        assert_eq!(t.rank(), 0);
        assert_eq!(max_abs(&t.matrix()), 0.0);
        assert!(threshold(&op, -0.1).is_err());
        assert!(threshold(&op, f64::NAN).is_err());

        let t0 = threshold(&op, 0.0).unwrap();
        for seed in 0..5 {
            let f = random_signal(16, seed, false);
            let a = t0.apply(f.samples()).norm();
            let b = op.apply(f.samples()).norm();
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn concentration_examples() {
        let (eta, phi) = box8();
        let full = Symbol::full(16, GridPoint::ORIGIN).unwrap();
        let f = random_signal(16, 2, true);
        assert!((concentration(&f, &full, &phi).unwrap() - 1.0).abs() < 1e-10);

        let op = assemble_locop(&eta, &phi).unwrap();
        let s = op.spectrum().unwrap();
        let top = Signal::from_vector(s.vector(0)).unwrap();
        assert!((concentration(&top, &eta, &phi).unwrap() - s.top()).abs() < 1e-9);
        assert!(
            (concentration(&f, &eta, &phi).unwrap() - op.quadratic_form(f.samples())).abs() < 1e-10
        );
        assert!(concentration(&Signal::zeros(16), &eta, &phi).is_err());
    }

    #[test]
    fn conjugation_identity() {
        let (eta, phi) = box8();
        let op = assemble_locop(&eta, &phi).unwrap();
        let r = shift_symbol_conjugation_check(&op, GridPoint::ORIGIN).unwrap();
        assert!(r.max_deviation < 1e-13);
        let r = shift_symbol_conjugation_check(&op, GridPoint::new(3, 5)).unwrap();
        assert!(r.passed, "{r:?}");

        let z0 = GridPoint::new(1, 2);
        let z = GridPoint::new(6, 7);
        let point = assemble_locop(&Symbol::indicator(16, z0, [z0]).unwrap(), &phi).unwrap();
        let moved = GridPoint::new(7, 9);
        let target = assemble_locop(&Symbol::indicator(16, moved, [moved]).unwrap(), &phi).unwrap();
        let shifted = point.with_symbol(point.symbol().shifted(z)).unwrap();
        assert!(max_entry_deviation(shifted.matrix(), target.matrix()) < 1e-15);
        assert!(shift_symbol_conjugation_check(&point, z).unwrap().passed);
    }

    #[test]
    fn rejects_mismatched_lengths() {
        let phi = gauss_window(8).unwrap();
        let eta = Symbol::full(16, GridPoint::ORIGIN).unwrap();
        assert!(matches!(
            assemble_locop(&eta, &phi),
            Err(Error::Dimension { .. })
        ));
    }
}

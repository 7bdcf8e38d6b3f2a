//! Separable lattices `aZ x bZ` in `Z_L x Z_L`, Gabor frame operators,
//! canonical tight windows and Gabor multipliers.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::covers::{spreadness, sum_symbols, validate_cover, AdmissibilityReport, Cover, Symbol};
use crate::error::{check_len, Error, Result};
use crate::frames::{
    frame_certificate, frame_from_operators, inverse_sqrt, EigenFrame, FrameCertificate,
    SelectionPolicy,
};
use crate::grid::{GridPoint, PhaseSpaceGrid};
use crate::linalg::CMatrix;
use crate::locop::{rank_one_sum, LocOperator, Spectrum};
use crate::signal::Window;

/// Ratio `lambda_max / lambda_min` up to which a Gabor system counts as tight.
pub const TIGHT_TOLERANCE: f64 = 1e-8;

/// `S^{-1/2}` is refused when `lambda_min(S) <= FRAME_FLOOR * lambda_max(S)`.
pub const FRAME_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub a: usize,
    pub b: usize,
}

/// `{(ja, kb) : 0 <= j < L/a, 0 <= k < L/b}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lattice {
    len: usize,
    a: usize,
    b: usize,
}

impl Lattice {
    pub fn new(len: usize, a: usize, b: usize) -> Result<Self> {
        if len == 0 || a == 0 || b == 0 || !len.is_multiple_of(a) || !len.is_multiple_of(b) {
            return Err(Error::invalid(format!(
                "lattice steps a = {a}, b = {b} must divide L = {len}"
            )));
        }
        Ok(Lattice { len, a, b })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn steps(&self) -> (usize, usize) {
        (self.a, self.b)
    }

    /// `|Lambda| = L^2 / (ab)`.
    pub fn size(&self) -> usize {
        (self.len / self.a) * (self.len / self.b)
    }

    pub fn contains(&self, p: GridPoint) -> bool {
        p.x < self.len
            && p.xi < self.len
            && p.x.is_multiple_of(self.a)
            && p.xi.is_multiple_of(self.b)
    }

    pub fn points(&self) -> Vec<GridPoint> {
        (0..self.len)
            .step_by(self.a)
            .flat_map(|x| {
                (0..self.len)
                    .step_by(self.b)
                    .map(move |xi| GridPoint::new(x, xi))
            })
            .collect()
    }

    /// Rounds each coordinate down to the lattice.
    pub fn snap(&self, p: GridPoint) -> GridPoint {
        GridPoint::new(p.x - p.x % self.a, p.xi - p.xi % self.b)
    }

    /// `eta` restricted to the lattice, center snapped onto it; `None` when no
    /// support point is a lattice point.
    pub fn restrict(&self, eta: &Symbol) -> Option<Symbol> {
        let cells: Vec<_> = eta
            .cells()
            .iter()
            .copied()
            .filter(|&(p, _)| self.contains(p))
            .collect();
        if cells.is_empty() {
            return None;
        }
        Symbol::new(self.len, self.snap(eta.center()), cells).ok()
    }

    /// Restricts every region; returns the surviving cover and the indices of
    /// regions that vanished.
    pub fn restrict_cover(&self, cover: &Cover) -> Result<(Cover, Vec<usize>)> {
        check_len(self.len, cover.len())?;
        let mut kept = Vec::new();
        let mut dropped = Vec::new();
        for (i, s) in cover.regions().iter().enumerate() {
            match self.restrict(s) {
                Some(r) => kept.push(r),
                None => dropped.push(i),
            }
        }
        if kept.is_empty() {
            return Err(Error::invalid("no region meets the lattice"));
        }
        Ok((Cover::new(self.len, kept)?, dropped))
    }

    /// `||eta||_{l^1(Lambda)}`.
    pub fn mass(&self, eta: &Symbol) -> f64 {
        eta.cells()
            .iter()
            .filter(|&&(p, _)| self.contains(p))
            .map(|&(_, v)| v)
            .sum()
    }

    fn indicator_cells(&self) -> Vec<(GridPoint, f64)> {
        self.points().into_iter().map(|p| (p, 1.0)).collect()
    }
}

#[derive(Debug, Clone)]
pub struct GaborFrameOperator {
    /// `S = sum_{lambda in Lambda} |pi(lambda) phi><pi(lambda) phi|`.
    pub matrix: CMatrix,
    pub lower: f64,
    pub upper: f64,
    /// `lambda_min > FRAME_FLOOR * lambda_max`; always false when `|Lambda| < L`.
    pub is_frame: bool,
    spectrum: Spectrum,
}

pub fn gabor_frame_operator(phi: &Window, lattice: &Lattice) -> Result<GaborFrameOperator> {
    check_len(lattice.len(), phi.len())?;
    let matrix = rank_one_sum(phi.samples(), &lattice.indicator_cells(), 1.0);
    let spectrum = Spectrum::of(&matrix)?;
    let lower = spectrum.bottom().max(0.0);
    let upper = spectrum.top();
    Ok(GaborFrameOperator {
        matrix,
        lower,
        upper,
        is_frame: lattice.size() >= lattice.len() && lower > FRAME_FLOOR * upper,
        spectrum,
    })
}

/// `S^{-1/2} phi`, renormalized to unit norm.
pub fn canonical_tight(phi: &Window, lattice: &Lattice) -> Result<Window> {
    let s = gabor_frame_operator(phi, lattice)?;
    if !s.is_frame {
        return Err(Error::NotAFrame {
            lower_bound: s.lower,
            tolerance: FRAME_FLOOR * s.upper,
        });
    }
    let tight = inverse_sqrt(&s.spectrum) * phi.samples();
    Window::new(tight.iter().copied().collect())
}

/// A window together with a lattice and the data of its Gabor frame operator.
#[derive(Debug, Clone)]
pub struct LatticeGaborSystem {
    pub window: Arc<Window>,
    pub lattice: Lattice,
    pub frame_operator: GaborFrameOperator,
    /// `A` in `f = A sum_lambda <f, pi(lambda) phi> pi(lambda) phi`; meaningful when `tight`.
    pub tight_constant: f64,
    pub tight: bool,
}

impl LatticeGaborSystem {
    pub fn new(phi: &Window, lattice: Lattice) -> Result<Self> {
        let frame_operator = gabor_frame_operator(phi, &lattice)?;
        let (lo, hi) = (frame_operator.lower, frame_operator.upper);
        let tight = frame_operator.is_frame && hi / lo <= 1.0 + TIGHT_TOLERANCE;
        Ok(LatticeGaborSystem {
            window: Arc::new(phi.clone()),
            lattice,
            tight_constant: 2.0 / (lo + hi),
            tight,
            frame_operator,
        })
    }

    /// The system generated by the canonical tight window of `phi`.
    pub fn tight(phi: &Window, lattice: Lattice) -> Result<Self> {
        Self::new(&canonical_tight(phi, &lattice)?, lattice)
    }

    pub fn condition(&self) -> f64 {
        self.frame_operator.upper / self.frame_operator.lower
    }
}

/// `GM_m f = A sum_lambda m(lambda) <f, pi(lambda) phi> pi(lambda) phi`.
pub fn gabor_multiplier(m: &Symbol, sys: &LatticeGaborSystem) -> Result<LocOperator> {
    if !sys.tight {
        return Err(Error::PreconditionViolation(
            "Gabor multipliers need a tight Gabor system".into(),
        ));
    }
    check_len(sys.lattice.len(), m.len())?;
    if let Some(p) = m.support().find(|&p| !sys.lattice.contains(p)) {
        return Err(Error::invalid(format!(
            "multiplier symbol has support at {p}, off the lattice"
        )));
    }
    LocOperator::assemble(Arc::new(m.clone()), sys.window.clone(), sys.tight_constant)
}

#[derive(Debug, Clone)]
pub struct GaborEigenframe {
    pub frame: EigenFrame,
    pub certificate: FrameCertificate,
    pub operators: Vec<LocOperator>,
    /// `||eta_gamma||_{l^1(Lambda)}` per region.
    pub lattice_masses: Vec<f64>,
    /// Center spreadness measured with a window of one lattice cell.
    pub spreadness: usize,
}

/// Eigenfunction frame built from the Gabor multipliers `GM_{eta_gamma}` of a
/// cover living on the lattice.
pub fn gabor_eigenframe(
    cover: &Cover,
    sys: &LatticeGaborSystem,
    policy: &SelectionPolicy,
    weighted: bool,
) -> Result<GaborEigenframe> {
    policy.validate()?;
    let lattice = &sys.lattice;
    check_len(lattice.len(), cover.len())?;
    for (i, s) in cover.regions().iter().enumerate() {
        if !lattice.contains(s.center()) {
            return Err(Error::PreconditionViolation(format!(
                "region {i}: center {} is not a lattice point",
                s.center()
            )));
        }
        if let Some(p) = s.support().find(|&p| !lattice.contains(p)) {
            return Err(Error::PreconditionViolation(format!(
                "region {i}: support point {p} is not a lattice point"
            )));
        }
    }
    let sum = sum_symbols(cover);
    let grid = PhaseSpaceGrid::new(lattice.len());
    let min_on_lattice = lattice
        .points()
        .into_iter()
        .map(|p| sum.values[grid.index(p)])
        .fold(f64::INFINITY, f64::min);
    if !(min_on_lattice > 0.0) {
        return Err(Error::PreconditionViolation(format!(
            "symbols do not cover the lattice (min of sum = {min_on_lattice})"
        )));
    }
    let operators: Vec<LocOperator> = cover
        .regions()
        .par_iter()
        .map(|m| {
            let op = gabor_multiplier(m, sys)?;
            op.spectrum()?;
            Ok(op)
        })
        .collect::<Result<_>>()?;
    let frame = frame_from_operators(&operators, policy, weighted)?;
    let certificate = frame_certificate(&frame)?;
    let (a, b) = lattice.steps();
    Ok(GaborEigenframe {
        lattice_masses: cover.regions().iter().map(|s| lattice.mass(s)).collect(),
        spreadness: spreadness(lattice.len(), &cover.centers(), a.max(b)),
        frame,
        certificate,
        operators,
    })
}

/// [`validate_cover`] with the lattice as ground set: coverage and the
/// symbol-sum range are taken over lattice points only.
pub fn validate_lattice_cover(
    lattice: &Lattice,
    cover: &Cover,
    outer_radius: usize,
    inner_radius: Option<usize>,
    spreadness_window: usize,
) -> AdmissibilityReport {
    let mut report = validate_cover(cover, outer_radius, inner_radius, spreadness_window);
    let sum = sum_symbols(cover);
    let grid = PhaseSpaceGrid::new(lattice.len());
    let on_lattice = lattice
        .points()
        .into_iter()
        .map(|p| sum.values[grid.index(p)]);
    let (lo, hi) = on_lattice.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    report.sum_min = lo;
    report.sum_max = hi;
    report.covers_grid = lo > 0.0;
    report
}

/// `[S, pi(lambda)]` entrywise maximum, for checking lattice covariance.
pub fn commutator_with_shift(s: &CMatrix, z: GridPoint) -> f64 {
    let len = s.nrows();
    let tw = crate::signal::Twiddles::new(len);
    let mut pi = CMatrix::zeros(len, len);
    for col in 0..len {
        let t = (col + z.x) % len;
        pi[(t, col)] = tw.get(z.xi * t);
    }
    let c = s * &pi - &pi * s;
    c.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

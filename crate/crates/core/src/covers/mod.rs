//! Symbols, covers of the phase-space grid and their admissibility checks.

mod generate;
mod json;

pub use generate::{gen_random_irregular, gen_regular_boxes, gen_wedge_cover, Band};
pub use json::{cover_from_json, cover_from_json_on_lattice, cover_to_json};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{GridPoint, PhaseSpaceGrid};

/// A nonnegative mask on the grid with a designated center, stored sparse.
///
/// Cells are kept sorted in row-major order with no repeats; zero-valued
/// cells are dropped on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Symbol {
    len: usize,
    center: GridPoint,
    cells: Vec<(GridPoint, f64)>,
    mass: f64,
}

impl Symbol {
    pub fn new(len: usize, center: GridPoint, cells: Vec<(GridPoint, f64)>) -> Result<Self> {
        if len == 0 {
            return Err(Error::invalid("grid length must be positive"));
        }
        let grid = PhaseSpaceGrid::new(len);
        if !grid.contains(center) {
            return Err(Error::invalid(format!("center {center} outside Z_{len}^2")));
        }
        for (i, &(p, v)) in cells.iter().enumerate() {
            if !grid.contains(p) {
                return Err(Error::invalid(format!("cell {i} at {p} outside Z_{len}^2")));
            }
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid(format!(
                    "cell {i} at {p} has value {v}; symbols must be finite and nonnegative"
                )));
            }
        }
        let mut cells: Vec<_> = cells.into_iter().filter(|&(_, v)| v > 0.0).collect();
        cells.sort_by_key(|&(p, _)| p);
        if let Some(w) = cells.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::invalid(format!("cell {} listed twice", w[0].0)));
        }
        if cells.is_empty() {
            return Err(Error::invalid("symbol support is empty"));
        }
        let mass = cells.iter().map(|&(_, v)| v).sum();
        Ok(Symbol {
            len,
            center,
            cells,
            mass,
        })
    }

    /// Indicator `1_Omega` of a set of cells.
    pub fn indicator(
        len: usize,
        center: GridPoint,
        cells: impl IntoIterator<Item = GridPoint>,
    ) -> Result<Self> {
        Self::new(len, center, cells.into_iter().map(|p| (p, 1.0)).collect())
    }

    /// From a dense row-major array of `L^2` values.
    pub fn from_dense(len: usize, center: GridPoint, values: &[f64]) -> Result<Self> {
        crate::error::check_len(len * len, values.len())?;
        let grid = PhaseSpaceGrid::new(len);
        let cells = values
            .iter()
            .enumerate()
            .map(|(i, &v)| (grid.point(i), v))
            .collect();
        Self::new(len, center, cells)
    }

    /// `eta == 1` on the whole grid.
    pub fn full(len: usize, center: GridPoint) -> Result<Self> {
        Self::indicator(len, center, PhaseSpaceGrid::new(len).points())
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn center(&self) -> GridPoint {
        self.center
    }

    pub fn cells(&self) -> &[(GridPoint, f64)] {
        &self.cells
    }

    pub fn support(&self) -> impl Iterator<Item = GridPoint> + '_ {
        self.cells.iter().map(|&(p, _)| p)
    }

    /// `||eta||_1`.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn sup_norm(&self) -> f64 {
        self.cells.iter().map(|&(_, v)| v).fold(0.0, f64::max)
    }

    pub fn is_indicator(&self) -> bool {
        self.cells.iter().all(|&(_, v)| v == 1.0)
    }

    pub fn value(&self, p: GridPoint) -> f64 {
        self.cells
            .binary_search_by_key(&p, |&(q, _)| q)
            .map_or(0.0, |i| self.cells[i].1)
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let grid = PhaseSpaceGrid::new(self.len);
        let mut out = vec![0.0; grid.point_count()];
        for &(p, v) in &self.cells {
            out[grid.index(p)] = v;
        }
        out
    }

    /// `eta(. - z)`: support and center moved by `+z`.
    pub fn shifted(&self, z: GridPoint) -> Symbol {
        let grid = PhaseSpaceGrid::new(self.len);
        let mut cells: Vec<_> = self
            .cells
            .iter()
            .map(|&(p, v)| (grid.translate(p, z), v))
            .collect();
        cells.sort_by_key(|&(p, _)| p);
        Symbol {
            len: self.len,
            center: grid.translate(self.center, z),
            cells,
            mass: self.mass,
        }
    }

    /// Pointwise sum with another symbol on the same grid; keeps `self`'s center.
    pub fn add(&self, other: &Symbol) -> Result<Symbol> {
        crate::error::check_len(self.len, other.len)?;
        let dense: Vec<f64> = self
            .to_dense()
            .iter()
            .zip(other.to_dense())
            .map(|(a, b)| a + b)
            .collect();
        Symbol::from_dense(self.len, self.center, &dense)
    }

    /// Largest `r` with `B_r(center)` inside the support, capped at the grid
    /// diameter. `None` when the center itself is outside the support.
    pub fn inner_radius(&self) -> Option<usize> {
        let grid = PhaseSpaceGrid::new(self.len);
        let mut best = None;
        for r in 0..=grid.diameter() {
            if grid
                .ball(self.center, r)
                .into_iter()
                .all(|p| self.value(p) > 0.0)
            {
                best = Some(r);
            } else {
                break;
            }
        }
        best
    }

    /// `max_{z in supp} d(z, center)`.
    pub fn outer_radius(&self) -> usize {
        let grid = PhaseSpaceGrid::new(self.len);
        self.support()
            .map(|p| grid.distance(p, self.center))
            .max()
            .unwrap_or(0)
    }

    /// `min_{z in B_r(center)} eta(z)`, the constant `c` of `eta >= c 1_{B_r}`.
    pub fn min_on_ball(&self, r: usize) -> f64 {
        let grid = PhaseSpaceGrid::new(self.len);
        grid.ball(self.center, r)
            .into_iter()
            .map(|p| self.value(p))
            .fold(f64::INFINITY, f64::min)
    }
}

/// An indexed family of symbols on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Cover {
    len: usize,
    regions: Vec<Symbol>,
}

impl Cover {
    pub fn new(len: usize, regions: Vec<Symbol>) -> Result<Self> {
        if regions.is_empty() {
            return Err(Error::invalid("cover needs at least one region"));
        }
        if let Some((i, s)) = regions.iter().enumerate().find(|(_, s)| s.len() != len) {
            return Err(Error::invalid(format!(
                "region {i} lives on Z_{}^2, cover on Z_{len}^2",
                s.len()
            )));
        }
        Ok(Cover { len, regions })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    pub fn grid(&self) -> PhaseSpaceGrid {
        PhaseSpaceGrid::new(self.len)
    }

    pub fn regions(&self) -> &[Symbol] {
        &self.regions
    }

    pub fn centers(&self) -> Vec<GridPoint> {
        self.regions.iter().map(Symbol::center).collect()
    }

    /// Indices of regions whose center repeats an earlier region's center.
    pub fn duplicate_centers(&self) -> Vec<usize> {
        let mut seen = std::collections::HashSet::new();
        self.regions
            .iter()
            .enumerate()
            .filter(|(_, s)| !seen.insert(s.center()))
            .map(|(i, _)| i)
            .collect()
    }

    /// Every region repeated twice.
    pub fn doubled(&self) -> Cover {
        let mut regions = self.regions.clone();
        regions.extend(self.regions.iter().cloned());
        Cover {
            len: self.len,
            regions,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolSum {
    /// Row-major `sum_gamma eta_gamma(z)`.
    pub values: Vec<f64>,
    pub min: f64,
    pub max: f64,
}

/// Pointwise sum of all symbols of the cover, accumulated in region order.
pub fn sum_symbols(cover: &Cover) -> SymbolSum {
    let grid = cover.grid();
    let mut values = vec![0.0; grid.point_count()];
    for s in cover.regions() {
        for &(p, v) in s.cells() {
            values[grid.index(p)] += v;
        }
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    SymbolSum { values, min, max }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub covers_grid: bool,
    pub outer_radius: usize,
    pub max_outer_radius: usize,
    pub outer_radius_ok: bool,
    pub inner_radius: Option<usize>,
    /// Minimum over regions of the largest ball around the center contained in
    /// the support; `None` if some center lies outside its own support.
    pub measured_inner_radius: Option<usize>,
    pub inner_radius_ok: Option<bool>,
    pub spreadness_window: usize,
    pub spreadness: usize,
    pub sum_min: f64,
    pub sum_max: f64,
    pub region_count: usize,
    pub duplicate_centers: Vec<usize>,
}

impl AdmissibilityReport {
    pub fn passes(&self) -> bool {
        self.covers_grid && self.outer_radius_ok && self.inner_radius_ok.unwrap_or(true)
    }
}

/// `max_z #{gamma : gamma in z + [0, w)^2}` with wrap-around. For `w >= L`
/// the window is the whole grid.
pub fn spreadness(len: usize, centers: &[GridPoint], w: usize) -> usize {
    let w = w.clamp(1, len);
    let grid = PhaseSpaceGrid::new(len);
    let mut counts = vec![0usize; grid.point_count()];
    for c in centers {
        // windows anchored at c - (0..w) on each axis contain c
        for dx in 0..w {
            for dxi in 0..w {
                let z = GridPoint::new((c.x + len - dx) % len, (c.xi + len - dxi) % len);
                counts[grid.index(z)] += 1;
            }
        }
    }
    counts.into_iter().max().unwrap_or(0)
}

/// Admissibility of a cover: coverage, outer radius `R`, optional inner
/// radius `r` and spreadness at window side `w`.
pub fn validate_cover(
    cover: &Cover,
    outer_radius: usize,
    inner_radius: Option<usize>,
    spreadness_window: usize,
) -> AdmissibilityReport {
    let sum = sum_symbols(cover);
    let max_outer = cover
        .regions()
        .iter()
        .map(Symbol::outer_radius)
        .max()
        .unwrap_or(0);
    let measured_inner = cover
        .regions()
        .iter()
        .map(Symbol::inner_radius)
        .try_fold(usize::MAX, |acc, r| r.map(|r| acc.min(r)));
    AdmissibilityReport {
        covers_grid: sum.min > 0.0,
        outer_radius,
        max_outer_radius: max_outer,
        outer_radius_ok: max_outer <= outer_radius,
        inner_radius,
        measured_inner_radius: measured_inner,
        inner_radius_ok: inner_radius.map(|r| measured_inner.is_some_and(|m| m >= r)),
        spreadness_window,
        spreadness: spreadness(cover.len(), &cover.centers(), spreadness_window),
        sum_min: sum.min,
        sum_max: sum.max,
        region_count: cover.regions().len(),
        duplicate_centers: cover.duplicate_centers(),
    }
}

//! The finite time-frequency plane `Z_L x Z_L` and its wrapped max-metric.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A point `(x, xi)` of the phase-space grid; `x` is time, `xi` is frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "[usize; 2]", into = "[usize; 2]")]
pub struct GridPoint {
    pub x: usize,
    pub xi: usize,
}

impl GridPoint {
    pub const ORIGIN: GridPoint = GridPoint { x: 0, xi: 0 };

    pub const fn new(x: usize, xi: usize) -> Self {
        GridPoint { x, xi }
    }
}

impl From<[usize; 2]> for GridPoint {
    fn from([x, xi]: [usize; 2]) -> Self {
        GridPoint { x, xi }
    }
}

impl From<GridPoint> for [usize; 2] {
    fn from(p: GridPoint) -> Self {
        [p.x, p.xi]
    }
}

impl fmt::Display for GridPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.xi)
    }
}

/// Circular distance between two residues modulo `len`.
pub fn circdist(a: usize, b: usize, len: usize) -> usize {
    let d = a.abs_diff(b) % len;
    d.min(len - d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhaseSpaceGrid {
    len: usize,
}

#[allow(clippy::len_without_is_empty)]
impl PhaseSpaceGrid {
    /// # Panics
    /// If `len == 0`.
    pub fn new(len: usize) -> Self {
        assert!(len > 0, "grid length must be positive");
        PhaseSpaceGrid { len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn point_count(&self) -> usize {
        self.len * self.len
    }

    pub fn contains(&self, p: GridPoint) -> bool {
        p.x < self.len && p.xi < self.len
    }

    /// Wrapped l-infinity distance.
    pub fn distance(&self, a: GridPoint, b: GridPoint) -> usize {
        circdist(a.x, b.x, self.len).max(circdist(a.xi, b.xi, self.len))
    }

    /// `a + b` with both coordinates reduced modulo `L`.
    pub fn translate(&self, a: GridPoint, b: GridPoint) -> GridPoint {
        GridPoint::new((a.x + b.x) % self.len, (a.xi + b.xi) % self.len)
    }

    /// Row-major linear index `x * L + xi`.
    pub fn index(&self, p: GridPoint) -> usize {
        p.x * self.len + p.xi
    }

    pub fn point(&self, index: usize) -> GridPoint {
        GridPoint::new(index / self.len, index % self.len)
    }

    pub fn points(&self) -> impl Iterator<Item = GridPoint> + '_ {
        (0..self.point_count()).map(|i| self.point(i))
    }

    /// Largest distance any two grid points can have.
    pub fn diameter(&self) -> usize {
        self.len / 2
    }

    /// Points of the closed ball `B_r(center)`, each listed once, in row-major order.
    pub fn ball(&self, center: GridPoint, radius: usize) -> Vec<GridPoint> {
        let axis = |c: usize| -> Vec<usize> {
            if 2 * radius + 1 >= self.len {
                return (0..self.len).collect();
            }
            let mut v: Vec<usize> = (0..=2 * radius)
                .map(|o| (c + self.len - radius % self.len + o) % self.len)
                .collect();
            v.sort_unstable();
            v
        };
        let xs = axis(center.x);
        let xis = axis(center.xi);
        xs.iter()
            .flat_map(|&x| xis.iter().map(move |&xi| GridPoint::new(x, xi)))
            .collect()
    }
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Cover, Symbol};
use crate::error::{Error, Result};
use crate::grid::{GridPoint, PhaseSpaceGrid};

/// One frequency band `[lo, hi)` tiled in time by rectangles of width `step`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(from = "[usize; 3]", into = "[usize; 3]")]
pub struct Band {
    pub lo: usize,
    pub hi: usize,
    pub step: usize,
}

impl From<[usize; 3]> for Band {
    fn from([lo, hi, step]: [usize; 3]) -> Self {
        Band { lo, hi, step }
    }
}

impl From<Band> for [usize; 3] {
    fn from(b: Band) -> Self {
        [b.lo, b.hi, b.step]
    }
}

fn rectangle(len: usize, x0: usize, w: usize, xi0: usize, h: usize) -> Result<Symbol> {
    let center = GridPoint::new(x0 + w / 2, xi0 + h / 2);
    let cells = (x0..x0 + w).flat_map(|x| (xi0..xi0 + h).map(move |xi| GridPoint::new(x, xi)));
    Symbol::indicator(len, center, cells)
}

/// Uniform tiling by `bx x by` boxes, centers at integer box centers.
pub fn gen_regular_boxes(len: usize, bx: usize, by: usize) -> Result<Cover> {
    if len == 0 || bx == 0 || by == 0 || !len.is_multiple_of(bx) || !len.is_multiple_of(by) {
        return Err(Error::invalid(format!(
            "box sides {bx} x {by} must divide L = {len}"
        )));
    }
    let mut regions = Vec::with_capacity((len / bx) * (len / by));
    for x0 in (0..len).step_by(bx) {
        for xi0 in (0..len).step_by(by) {
            regions.push(rectangle(len, x0, bx, xi0, by)?);
        }
    }
    Cover::new(len, regions)
}

/// Frequency bands with band-dependent time resolution.
///
/// Bands may be given in any order but must partition `[0, L)`.
pub fn gen_wedge_cover(len: usize, bands: &[Band]) -> Result<Cover> {
    if len == 0 || bands.is_empty() {
        return Err(Error::invalid(
            "wedge cover needs L > 0 and at least one band",
        ));
    }
    let mut sorted = bands.to_vec();
    sorted.sort_by_key(|b| (b.lo, b.hi));
    let mut next = 0;
    for b in &sorted {
        if b.lo != next || b.hi <= b.lo || b.hi > len {
            return Err(Error::invalid(format!(
                "bands must partition [0, {len}): band [{}, {}) leaves a gap or overlaps at {next}",
                b.lo, b.hi
            )));
        }
        if b.step == 0 || !len.is_multiple_of(b.step) {
            return Err(Error::invalid(format!(
                "time step {} of band [{}, {}) must divide L = {len}",
                b.step, b.lo, b.hi
            )));
        }
        next = b.hi;
    }
    if next != len {
        return Err(Error::invalid(format!(
            "bands must partition [0, {len}): nothing covers [{next}, {len})"
        )));
    }
    let mut regions = Vec::new();
    for b in &sorted {
        for x0 in (0..len).step_by(b.step) {
            regions.push(rectangle(len, x0, b.step, b.lo, b.hi - b.lo)?);
        }
    }
    Cover::new(len, regions)
}

/// Coordinates of a wrapped interval `[start, start + side)`, the whole axis
/// when `side >= len`.
fn wrapped_axis(len: usize, start: usize, side: usize) -> Vec<usize> {
    if side >= len {
        return (0..len).collect();
    }
    (0..side).map(|k| (start + k) % len).collect()
}

/// Randomized axis-aligned boxes placed until every grid point is covered.
///
/// Each box is anchored on the first uncovered point in row-major order, with
/// sides drawn from `[t, 3t/2]` and a random backward offset. With
/// `overlap == 0` a region keeps only the still-uncovered cells of its box, so
/// the result is a partition; otherwise the box is padded by
/// `floor(overlap * side / 2)` on every side and kept whole.
pub fn gen_random_irregular(
    len: usize,
    seed: u64,
    target_size: usize,
    overlap: f64,
) -> Result<Cover> {
    if target_size < 2 || target_size > len {
        return Err(Error::invalid(format!(
            "target size {target_size} must lie in [2, {len}]"
        )));
    }
    if !(0.0..=1.0).contains(&overlap) {
        return Err(Error::invalid(format!(
            "overlap {overlap} must lie in [0, 1]"
        )));
    }
    let grid = PhaseSpaceGrid::new(len);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut covered = vec![false; grid.point_count()];
    let mut cursor = 0;
    let mut regions = Vec::new();
    let side = |rng: &mut ChaCha8Rng| (target_size + rng.gen_range(0..=target_size / 2)).min(len);

    while let Some(offset) = covered[cursor..].iter().position(|&c| !c) {
        cursor += offset;
        let anchor = grid.point(cursor);
        let (w, h) = (side(&mut rng), side(&mut rng));
        let ox = rng.gen_range(0..=(w - 1) / 2);
        let oxi = rng.gen_range(0..=(h - 1) / 2);
        let sx = (anchor.x + len - ox) % len;
        let sxi = (anchor.xi + len - oxi) % len;
        let center = GridPoint::new((sx + w / 2) % len, (sxi + h / 2) % len);

        let (pad_x, pad_xi) = if overlap > 0.0 {
            (
                (overlap * w as f64 / 2.0).floor() as usize,
                (overlap * h as f64 / 2.0).floor() as usize,
            )
        } else {
            (0, 0)
        };
        let xs = wrapped_axis(len, (sx + len * 2 - pad_x) % len, w + 2 * pad_x);
        let xis = wrapped_axis(len, (sxi + len * 2 - pad_xi) % len, h + 2 * pad_xi);
        let mut cells = Vec::with_capacity(xs.len() * xis.len());
        for &x in &xs {
            for &xi in &xis {
                let p = GridPoint::new(x, xi);
                let idx = grid.index(p);
                if overlap > 0.0 || !covered[idx] {
                    cells.push(p);
                }
                covered[idx] = true;
            }
        }
        regions.push(Symbol::indicator(len, center, cells)?);
    }
    Cover::new(len, regions)
}

//! Full-grid short-time Fourier transform on `Z_L` and its adjoint.
//!
//! `V f(x, xi) = sum_t f(t) conj(phi(t - x)) exp(-2 pi i xi t / L) = <f, pi(x, xi) phi>`
//!
//! The inverse is `(1/L) sum_{x, xi} F(x, xi) (pi(x, xi) phi)(t)`, which makes
//! `istft(stft(f)) = f` for every unit-norm window.

use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{check_len, Result};
use crate::grid::{GridPoint, PhaseSpaceGrid};
use crate::signal::{Signal, Twiddles, Window};

/// Complex values over the whole grid, stored row-major in `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePlaneArray {
    len: usize,
    values: Vec<Complex64>,
}

impl PhasePlaneArray {
    pub fn zeros(len: usize) -> Self {
        PhasePlaneArray {
            len,
            values: vec![Complex64::new(0.0, 0.0); len * len],
        }
    }

    pub fn from_values(len: usize, values: Vec<Complex64>) -> Result<Self> {
        check_len(len * len, values.len())?;
        Ok(PhasePlaneArray { len, values })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn grid(&self) -> PhaseSpaceGrid {
        PhaseSpaceGrid::new(self.len)
    }

    pub fn get(&self, p: GridPoint) -> Complex64 {
        self.values[p.x * self.len + p.xi]
    }

    pub fn set(&mut self, p: GridPoint, v: Complex64) {
        self.values[p.x * self.len + p.xi] = v;
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    /// `|V|^2`, the spectrogram.
    pub fn power(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }
}

/// Direct evaluation of all `L^2` coefficients, parallel over `x`.
pub fn stft(f: &Signal, phi: &Window) -> Result<PhasePlaneArray> {
    let len = phi.len();
    check_len(len, f.len())?;
    phi.require_normalized()?;
    let tw = Twiddles::new(len);
    let fs = f.samples();
    let ws = phi.samples();
    let mut values = vec![Complex64::new(0.0, 0.0); len * len];
    values.par_chunks_mut(len).enumerate().for_each(|(x, row)| {
        // f(t) conj(phi(t - x))
        let windowed: Vec<Complex64> = (0..len)
            .map(|t| fs[t] * ws[(t + len - x) % len].conj())
            .collect();
        for (xi, out) in row.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (t, &w) in windowed.iter().enumerate() {
                // exp(-2 pi i xi t / L)
                acc += w * tw.get(len - (xi * t) % len);
            }
            *out = acc;
        }
    });
    Ok(PhasePlaneArray { len, values })
}

/// Adjoint synthesis scaled by `1/L`; left inverse of [`stft`].
pub fn istft(coeffs: &PhasePlaneArray, phi: &Window) -> Result<Signal> {
    let len = phi.len();
    check_len(len, coeffs.len())?;
    phi.require_normalized()?;
    let tw = Twiddles::new(len);
    let ws = phi.samples();
    let scale = 1.0 / len as f64;
    let samples: Vec<Complex64> = (0..len)
        .into_par_iter()
        .map(|t| {
            let mut acc = Complex64::new(0.0, 0.0);
            for x in 0..len {
                let row = &coeffs.values[x * len..(x + 1) * len];
                let mut inner = Complex64::new(0.0, 0.0);
                for (xi, &v) in row.iter().enumerate() {
                    inner += v * tw.get(xi * t);
                }
                acc += inner * ws[(t + len - x) % len];
            }
            acc * scale
        })
        .collect();
    Signal::from_vector(DVector::from_vec(samples))
}

//! Signals on `Z_L`, analysis windows and time-frequency shifts.

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{check_len, Error, Result};
use crate::grid::GridPoint;

/// A finite-energy complex signal on `Z_L`.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: DVector<Complex64>,
}

impl Signal {
    pub fn new(samples: Vec<Complex64>) -> Result<Self> {
        Self::from_vector(DVector::from_vec(samples))
    }

    pub fn from_vector(samples: DVector<Complex64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("signal must have at least one sample"));
        }
        if let Some(t) = samples
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::invalid(format!("sample {t} is not finite")));
        }
        Ok(Signal { samples })
    }

    pub fn zeros(len: usize) -> Self {
        Signal {
            samples: DVector::zeros(len),
        }
    }

    /// Point mass at `t`.
    pub fn delta(len: usize, t: usize) -> Self {
        let mut s = Self::zeros(len);
        s.samples[t % len] = Complex64::new(1.0, 0.0);
        s
    }

    /// Pure tone `exp(2 pi i xi t / L)`.
    pub fn tone(len: usize, xi: usize) -> Self {
        let tw = Twiddles::new(len);
        Signal {
            samples: DVector::from_fn(len, |t, _| tw.get(xi * t)),
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &DVector<Complex64> {
        &self.samples
    }

    pub fn into_vector(self) -> DVector<Complex64> {
        self.samples
    }

    pub fn norm(&self) -> f64 {
        self.samples.norm()
    }

    pub fn norm_squared(&self) -> f64 {
        self.samples.norm_squared()
    }
}

/// Analysis window. Windows built through [`Window::new`] or [`gauss_window`]
/// carry unit l2 norm.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    samples: DVector<Complex64>,
    normalized: bool,
}

impl Window {
    /// Normalizes `samples` to unit norm.
    pub fn new(samples: Vec<Complex64>) -> Result<Self> {
        let signal = Signal::new(samples)?;
        let norm = signal.norm();
        if norm == 0.0 {
            return Err(Error::invalid("window must be nonzero"));
        }
        Ok(Window {
            samples: signal.into_vector() / Complex64::new(norm, 0.0),
            normalized: true,
        })
    }

    /// Keeps `samples` as given. The `normalized` flag is set only when the
    /// norm is within `1e-12` of one.
    pub fn unnormalized(samples: Vec<Complex64>) -> Result<Self> {
        let signal = Signal::new(samples)?;
        let normalized = (signal.norm() - 1.0).abs() <= 1e-12;
        Ok(Window {
            samples: signal.into_vector(),
            normalized,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn samples(&self) -> &DVector<Complex64> {
        &self.samples
    }

    pub(crate) fn require_normalized(&self) -> Result<()> {
        if !self.normalized {
            return Err(Error::PreconditionViolation(
                "window must have unit l2 norm".into(),
            ));
        }
        Ok(())
    }
}

/// Periodized Gaussian `sum_n exp(-pi (t + nL)^2 / L)`, `|n| <= 6`, normalized.
pub fn gauss_window(len: usize) -> Result<Window> {
    if len < 2 {
        return Err(Error::invalid(format!(
            "window length must be >= 2, got {len}"
        )));
    }
    let l = len as f64;
    let samples: Vec<Complex64> = (0..len)
        .map(|t| {
            // sum the smallest terms first
            let mut terms: Vec<f64> = (-6i64..=6)
                .map(|n| {
                    let u = t as f64 + n as f64 * l;
                    (-PI * u * u / l).exp()
                })
                .collect();
            terms.sort_by(f64::total_cmp);
            Complex64::new(terms.iter().sum(), 0.0)
        })
        .collect();
    Window::new(samples)
}

/// Table of `exp(2 pi i k / L)` for `k in 0..L`.
#[derive(Debug, Clone)]
pub struct Twiddles {
    table: Vec<Complex64>,
}

impl Twiddles {
    pub fn new(len: usize) -> Self {
        let l = len as f64;
        let table = (0..len)
            .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / l))
            .collect();
        Twiddles { table }
    }

    /// `exp(2 pi i k / L)` for any `k`, reduced modulo `L`.
    #[inline]
    pub fn get(&self, k: usize) -> Complex64 {
        self.table[k % self.table.len()]
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

/// `(pi(z) g)(t) = exp(2 pi i xi t / L) g((t - x) mod L)`.
pub(crate) fn shifted_atom(
    g: &DVector<Complex64>,
    z: GridPoint,
    tw: &Twiddles,
) -> DVector<Complex64> {
    let len = g.len();
    let (x, xi) = (z.x % len, z.xi % len);
    DVector::from_fn(len, |t, _| tw.get(xi * t) * g[(t + len - x) % len])
}

/// Applies the time-frequency shift `pi(z)` to `f`. `len` is the grid size.
pub fn tf_shift(len: usize, z: GridPoint, f: &Signal) -> Result<Signal> {
    check_len(len, f.len())?;
    let tw = Twiddles::new(len);
    Ok(Signal {
        samples: shifted_atom(&f.samples, z, &tw),
    })
}

/// The window atom `pi(z) phi`.
pub fn window_atom(z: GridPoint, phi: &Window) -> DVector<Complex64> {
    shifted_atom(&phi.samples, z, &Twiddles::new(phi.len()))
}

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::signal::Signal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vector(len: usize, rng: &mut ChaCha8Rng) -> DVector<Complex64> {
    DVector::from_fn(len, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

pub fn random_signal(len: usize, seed: u64, unit: bool) -> Signal {
    let mut v = random_vector(len, &mut rng(seed));
    if unit {
        v /= Complex64::new(v.norm(), 0.0);
    }
    Signal::from_vector(v).unwrap()
}

pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

//! Dense Hermitian helpers on top of nalgebra's real symmetric eigensolver.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

const MAX_SWEEPS: usize = 100_000;
/// Relative gap below which neighbouring embedded eigenvalues share an eigenspace.
const CLUSTER_GAP: f64 = 1e-9;
const RECOVERY_FLOOR: f64 = 1e-2;

/// `max_{ij} |M - M^H|`.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `max_{ij} |A - B|`.
pub fn max_entry_deviation(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Eigenpairs of a Hermitian matrix, eigenvalues descending.
///
/// Solved through the real symmetric embedding `[[A, -B], [B, A]]` of
/// `H = A + iB`, whose spectrum is that of `H` with every eigenvalue doubled.
/// Each eigenvector is scaled so that its largest-magnitude entry (lowest
/// index on ties) is real and positive.
pub fn eigh_desc(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::invalid(format!(
            "matrix is {}x{}, not square",
            n,
            m.ncols()
        )));
    }
    let mut real = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            // symmetrize so the solver sees an exactly Hermitian input
            let z = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            real[(i, j)] = z.re;
            real[(i + n, j + n)] = z.re;
            real[(i + n, j)] = z.im;
            real[(i, j + n)] = -z.im;
        }
    }
    let eig =
        SymmetricEigen::try_new(real, f64::EPSILON, MAX_SWEEPS).ok_or_else(|| Error::Numeric {
            message: "Hermitian eigensolver did not converge".into(),
            residual: f64::NAN,
        })?;
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let scale = 1.0 + order.first().map_or(0.0, |&k| eig.eigenvalues[k].abs());
    let complex_of = |k: usize| {
        CVector::from_iterator(
            n,
            (0..n).map(|i| Complex64::new(eig.eigenvectors[(i, k)], eig.eigenvectors[(i + n, k)])),
        )
    };

    let mut pairs: Vec<(f64, CVector)> = Vec::with_capacity(n);
    let mut start = 0;
    while start < order.len() {
        // a cluster holds whole pairs and every near-equal neighbour
        let mut end = start + 1;
        while end < order.len() {
            let odd = (end - start) % 2 == 1;
            let gap = eig.eigenvalues[order[end - 1]] - eig.eigenvalues[order[end]];
            if !odd && gap > CLUSTER_GAP * scale {
                break;
            }
            end += 1;
        }
        let mut cands: Vec<CVector> = order[start..end]
            .iter()
            .map(|&k| {
                let mut c = complex_of(k);
                orthogonalize(&mut c, pairs.iter().map(|p| &p.1));
                c
            })
            .collect();
        for _ in 0..(end - start) / 2 {
            let best = (0..cands.len())
                .max_by(|&a, &b| cands[a].norm().total_cmp(&cands[b].norm()))
                .expect("cluster is nonempty");
            let mut v = cands.swap_remove(best);
            // a second pass against everything kept so far restores orthogonality
            orthogonalize(&mut v, pairs.iter().map(|p| &p.1));
            let norm = v.norm();
            // at least sqrt(2 / (k + 1)) survives in a cluster of k complex directions
            if norm < RECOVERY_FLOOR {
                return Err(Error::Numeric {
                    message: "eigenvector recovery lost orthogonality".into(),
                    residual: norm,
                });
            }
            v /= Complex64::new(norm, 0.0);
            for c in cands.iter_mut() {
                orthogonalize(c, std::iter::once(&v));
            }
            let h = m * &v;
            pairs.push((v.dotc(&h).re, v));
        }
        start = end;
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));

    let values: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (col, (_, v)) in pairs.iter_mut().enumerate() {
        fix_phase(v);
        vectors.set_column(col, v);
    }

    let recon = spectral_function(&values, &vectors, |v| v);
    let residual = max_entry_deviation(&recon, m);
    if !residual.is_finite() || residual > 1e-8 * scale {
        return Err(Error::Numeric {
            message: "eigendecomposition does not reconstruct the operator".into(),
            residual,
        });
    }
    Ok((values, vectors))
}

fn orthogonalize<'a>(v: &mut CVector, basis: impl Iterator<Item = &'a CVector>) {
    for q in basis {
        let proj = q.dotc(v);
        v.axpy(-proj, q, Complex64::new(1.0, 0.0));
    }
}

/// Eigenvalues only, descending.
pub fn eigvalsh_desc(m: &CMatrix) -> Result<Vec<f64>> {
    Ok(eigh_desc(m)?.0)
}

pub(crate) fn fix_phase(v: &mut CVector) {
    let mut best = 0;
    let mut best_mag = -1.0;
    for (i, z) in v.iter().enumerate() {
        let mag = z.norm();
        if mag > best_mag {
            best = i;
            best_mag = mag;
        }
    }
    if best_mag > 0.0 {
        let phase = v[best] / Complex64::new(best_mag, 0.0);
        *v *= phase.conj();
        v[best] = Complex64::new(best_mag, 0.0);
    }
}

/// `Q diag(f(lambda)) Q^H` for eigenpairs `(values, vectors)`.
pub fn spectral_function(values: &[f64], vectors: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let n = vectors.nrows();
    let mut scaled = vectors.clone();
    for (k, &lam) in values.iter().enumerate() {
        let w = Complex64::new(f(lam), 0.0);
        for i in 0..n {
            scaled[(i, k)] *= w;
        }
    }
    scaled * vectors.adjoint()
}

//! Random matrices and states for sampling-based checks.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::matrix::{ComplexMatrix, DensityMatrix};

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// Ginibre matrix: i.i.d. standard complex Gaussian entries.
pub fn ginibre(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// `(G + G^dagger) / 2` for a Ginibre `G`.
pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let g = ginibre(rng, n, n);
    let ga = g.adjoint();
    (&g + &ga).scale_real(0.5)
}

/// Haar-distributed unitary via Gram-Schmidt on a Ginibre matrix.
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    loop {
        let g = ginibre(rng, n, n);
        if let Some(q) = orthonormalize_columns(&g) {
            return q;
        }
    }
}

/// Modified Gram-Schmidt on the columns; `None` if they are numerically dependent.
fn orthonormalize_columns(m: &ComplexMatrix) -> Option<ComplexMatrix> {
    let n = m.rows();
    let mut cols: Vec<Vec<Complex64>> = (0..m.cols())
        .map(|c| (0..n).map(|r| m[(r, c)]).collect())
        .collect();
    for j in 0..cols.len() {
        for i in 0..j {
            let proj: Complex64 = (0..n).map(|r| cols[i][r].conj() * cols[j][r]).sum();
            let (done, rest) = cols.split_at_mut(j);
            for (t, v) in rest[0].iter_mut().zip(&done[i]) {
                *t -= proj * v;
            }
        }
        let norm = cols[j].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-10 {
            return None;
        }
        cols[j].iter_mut().for_each(|v| *v /= norm);
    }
    Some(ComplexMatrix::from_fn(n, m.cols(), |r, c| cols[c][r]))
}

/// Uniform point on the probability simplex (flat Dirichlet).
pub fn random_simplex_point(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / total).collect()
}

/// `U diag(p) U^dagger` for a Haar unitary `U`.
pub fn random_density_with_spectrum(rng: &mut impl Rng, p: &[f64]) -> DensityMatrix {
    let u = random_unitary(rng, p.len());
    let m = u
        .conjugate(&ComplexMatrix::from_diagonal(p))
        .expect("square shapes");
    DensityMatrix::new_unchecked(hermitize(&m))
}

/// Hilbert-Schmidt random density matrix `G G^dagger / tr(G G^dagger)`.
pub fn random_density_matrix(rng: &mut impl Rng, n: usize) -> DensityMatrix {
    let g = ginibre(rng, n, n);
    let w = &g * &g.adjoint();
    let tr = w.trace().re;
    DensityMatrix::new_unchecked(hermitize(&w.scale_real(1.0 / tr)))
}

/// Exact Hermitian part, removing round-off asymmetry.
pub fn hermitize(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.rows();
    ComplexMatrix::from_fn(n, n, |r, c| (m[(r, c)] + m[(c, r)].conj()) * 0.5)
}

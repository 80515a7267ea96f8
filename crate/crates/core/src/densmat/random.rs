//! Seeded random matrices and states for restarts, sweeps and tests.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::density::DensityMatrix;
use super::matrix::ComplexMatrix;

pub fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Ginibre matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian_complex(rng))
}

/// Hermitian matrix from the GUE-like ensemble `(G + G†)/2`.
pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    ginibre(rng, dim, dim).hermitian_part()
}

/// Haar-distributed unitary via Gram–Schmidt on a Ginibre matrix.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    isometry(rng, dim, dim)
}

/// `rows × cols` isometry (`V†V = I`, needs `rows >= cols`).
pub fn isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    assert!(rows >= cols);
    let g = ginibre(rng, rows, cols);
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(cols);
    for c in 0..cols {
        let mut v = g.column(c);
        // two passes of modified Gram–Schmidt
        for _ in 0..2 {
            for b in &basis {
                let proj: Complex64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= proj * bi;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for vi in &mut v {
            *vi /= norm;
        }
        basis.push(v);
    }
    ComplexMatrix::from_fn(rows, cols, |r, c| basis[c][r])
}

pub fn ket<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..dim).map(|_| gaussian_complex(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut v {
        *z /= norm;
    }
    v
}

pub fn pure_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix {
    DensityMatrix::pure(&ket(rng, dim)).expect("normalized ket")
}

/// Full-rank mixed state `G G† / Tr(G G†)` (Hilbert–Schmidt measure).
pub fn density<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix {
    let g = ginibre(rng, dim, dim);
    let m = g.matmul(&g.dagger());
    let tr = m.trace().re;
    DensityMatrix::new(m.scale(1.0 / tr)).expect("Ginibre state is valid")
}

/// Random state `U diag(spectrum) U†` with Haar `U`.
pub fn density_with_spectrum<R: Rng + ?Sized>(rng: &mut R, spectrum: &[f64]) -> DensityMatrix {
    let u = unitary(rng, spectrum.len());
    DensityMatrix::new(u.sandwich(&ComplexMatrix::from_diag(spectrum))).expect("valid spectrum")
}

/// Random probability vector (flat Dirichlet).
pub fn probabilities<R: Rng + ?Sized>(rng: &mut R, count: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..count)
        .map(|_| -rng.random_range(f64::EPSILON..1.0f64).ln())
        .collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / s).collect()
}

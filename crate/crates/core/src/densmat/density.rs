use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::eigen::{eig_hermitian, HermitianEigen};
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Tolerance used by every density-matrix validity check.
pub const VALIDITY_TOL: f64 = 1e-10;

/// Eigenvalues at or below this floor count as zero for logs and pseudo-inverses.
pub const EIGEN_FLOOR: f64 = 1e-12;

/// A Hermitian, positive-semidefinite, unit-trace matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates and wraps `m`. The stored matrix is the exact Hermitian part.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::invalid(format!(
                "density matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let herm = m.hermiticity_error();
        if herm > VALIDITY_TOL {
            return Err(Error::invalid(format!("state is not Hermitian (error {herm:.3e})")));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > VALIDITY_TOL || tr.im.abs() > VALIDITY_TOL {
            return Err(Error::invalid(format!("state trace is {tr}, expected 1")));
        }
        let m = m.hermitian_part();
        let min = eig_hermitian(&m)?.min_value();
        if min < -VALIDITY_TOL {
            return Err(Error::invalid(format!(
                "state is not positive semidefinite (min eigenvalue {min:.3e})"
            )));
        }
        Ok(Self { matrix: m })
    }

    /// Skips validation. For matrices that are valid by construction.
    pub(crate) fn from_trusted(m: ComplexMatrix) -> Self {
        debug_assert!(m.is_square());
        Self {
            matrix: m.hermitian_part(),
        }
    }

    /// `|ψ⟩⟨ψ|` for a normalized ket.
    pub fn pure(ket: &[Complex64]) -> Result<Self> {
        let norm: f64 = ket.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > VALIDITY_TOL {
            return Err(Error::invalid(format!("ket has squared norm {norm}, expected 1")));
        }
        Ok(Self::from_trusted(ComplexMatrix::outer(ket)))
    }

    /// Computational basis projector `|k⟩⟨k|`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut diag = vec![0.0; dim];
        diag[k] = 1.0;
        Self::from_trusted(ComplexMatrix::from_diag(&diag))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_trusted(ComplexMatrix::identity(dim).scale(1.0 / dim as f64))
    }

    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_diag(probs))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn eigen(&self) -> Result<HermitianEigen> {
        eig_hermitian(&self.matrix)
    }

    /// True when the largest eigenvalue is within `1e-8` of one.
    pub fn is_pure(&self) -> Result<bool> {
        Ok(self.eigen()?.max_value() >= 1.0 - 1e-8)
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self::from_trusted(self.matrix.kron(&other.matrix))
    }

    /// Convex combination `Σ w_i ρ_i` (weights must form a distribution).
    pub fn mixture(weights: &[f64], states: &[&DensityMatrix]) -> Result<Self> {
        if weights.len() != states.len() || states.is_empty() {
            return Err(Error::invalid("mixture needs one weight per state"));
        }
        let dim = states[0].dim();
        if states.iter().any(|s| s.dim() != dim) {
            return Err(Error::invalid("mixture states have different dimensions"));
        }
        let mut acc = ComplexMatrix::zeros(dim, dim);
        for (&w, s) in weights.iter().zip(states) {
            acc.add_scaled(w, s.matrix());
        }
        Ok(Self::from_trusted(acc))
    }
}

impl Serialize for DensityMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.matrix.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = ComplexMatrix::deserialize(d)?;
        DensityMatrix::new(m).map_err(serde::de::Error::custom)
    }
}

/// Scalar functions that [`matrix_function`] can lift to Hermitian matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixFn {
    /// `log₂`, with eigenvalues at or below the floor mapped to `log₂(floor)`.
    Log2,
    Sqrt,
    /// Moore–Penrose `m^{-1/2}` on the support (floor `1e-12`).
    InvSqrtOnSupport,
}

/// Applies `f` to the spectrum of the Hermitian matrix `m`.
pub fn matrix_function(m: &ComplexMatrix, f: MatrixFn) -> Result<ComplexMatrix> {
    let e = eig_hermitian(m)?;
    matrix_function_from_eigen(&e, f)
}

pub(crate) fn matrix_function_from_eigen(e: &HermitianEigen, f: MatrixFn) -> Result<ComplexMatrix> {
    match f {
        MatrixFn::Log2 => Ok(e.reconstruct_with(|l| l.max(EIGEN_FLOOR).log2())),
        MatrixFn::Sqrt => {
            let min = e.min_value();
            if min < -VALIDITY_TOL {
                return Err(Error::invalid(format!(
                    "square root of a matrix with negative eigenvalue {min:.3e}"
                )));
            }
            Ok(e.reconstruct_with(|l| l.max(0.0).sqrt()))
        }
        MatrixFn::InvSqrtOnSupport => {
            let min = e.min_value();
            if min < -VALIDITY_TOL {
                return Err(Error::invalid(format!(
                    "inverse square root of a matrix with negative eigenvalue {min:.3e}"
                )));
            }
            Ok(e.reconstruct_with(|l| if l > EIGEN_FLOOR { 1.0 / l.sqrt() } else { 0.0 }))
        }
    }
}

/// `-Σ λ log₂ λ` over eigenvalues above the floor.
pub(crate) fn entropy_of_spectrum(values: &[f64]) -> f64 {
    values
        .iter()
        .filter(|&&l| l > EIGEN_FLOOR)
        .map(|&l| -l * l.log2())
        .sum()
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    Ok(entropy_of_spectrum(&rho.eigen()?.values))
}

/// Entropy of a Hermitian PSD matrix that is not necessarily normalized.
pub(crate) fn entropy_of_matrix(m: &ComplexMatrix) -> Result<f64> {
    Ok(entropy_of_spectrum(&eig_hermitian(m)?.values))
}

/// Quantum relative entropy `Tr ρ (log₂ρ − log₂σ)` in bits, `+∞` when
/// `supp ρ ⊄ supp σ`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::invalid(format!(
            "relative entropy of states with dimensions {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    relative_entropy_of_matrices(rho.matrix(), sigma.matrix())
}

pub(crate) fn relative_entropy_of_matrices(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    let es = eig_hermitian(sigma)?;
    let mut cross = 0.0;
    for k in 0..es.dim() {
        let v = es.vector(k);
        let weight = rho
            .mat_vec(&v)
            .iter()
            .zip(&v)
            .map(|(a, b)| b.conj() * a)
            .sum::<Complex64>()
            .re;
        let lambda = es.values[k];
        if lambda <= EIGEN_FLOOR {
            if weight > EIGEN_FLOOR {
                return Ok(f64::INFINITY);
            }
        } else {
            cross += weight * lambda.log2();
        }
    }
    Ok(-entropy_of_matrix(rho)? - cross)
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(eig_hermitian(m)?.values.iter().map(|l| l.abs()).sum())
}

/// Which fidelity is reported.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FidelityConvention {
    /// `Tr √(√ρ σ √ρ)`
    Root,
    /// `(Tr √(√ρ σ √ρ))²`
    #[default]
    Squared,
}

impl FidelityConvention {
    /// Converts a root fidelity into this convention.
    pub fn from_root(self, root: f64) -> f64 {
        match self {
            FidelityConvention::Root => root,
            FidelityConvention::Squared => root * root,
        }
    }
}

/// Root fidelity `Tr √(√ρ σ √ρ)`, clamped to `[0, 1]`.
pub(crate) fn root_fidelity_of_matrices(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    let sqrt_rho = matrix_function(rho, MatrixFn::Sqrt)?;
    let inner = sqrt_rho.matmul(sigma).matmul(&sqrt_rho).hermitian_part();
    let root: f64 = eig_hermitian(&inner)?.values.iter().map(|l| l.max(0.0).sqrt()).sum();
    Ok(root.clamp(0.0, 1.0))
}

/// Uhlmann fidelity in the squared convention.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    fidelity_with(rho, sigma, FidelityConvention::Squared)
}

pub fn fidelity_with(rho: &DensityMatrix, sigma: &DensityMatrix, convention: FidelityConvention) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::invalid(format!(
            "fidelity of states with dimensions {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    Ok(convention.from_root(root_fidelity_of_matrices(rho.matrix(), sigma.matrix())?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densmat::{partial_trace, random, DimensionProfile};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn plus() -> DensityMatrix {
        let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
        DensityMatrix::pure(&[s, s]).unwrap()
    }

    // independent scalar oracle
    fn h2(p: f64) -> f64 {
        if p <= 0.0 || p >= 1.0 {
            0.0
        } else {
            -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
        }
    }

    #[test]
    fn validation_rejects_bad_states() {
        assert!(DensityMatrix::new(ComplexMatrix::from_diag(&[0.6, 0.6])).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::from_diag(&[1.5, -0.5])).is_err());
        let non_herm = ComplexMatrix::from_real_rows(&[&[0.5, 0.1], &[0.0, 0.5]]);
        assert!(DensityMatrix::new(non_herm).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn entropy_examples() {
        assert!(von_neumann_entropy(&DensityMatrix::basis(2, 0)).unwrap().abs() < 1e-15);
        assert!((von_neumann_entropy(&DensityMatrix::maximally_mixed(2)).unwrap() - 1.0).abs() < 1e-14);
        let rho = DensityMatrix::diagonal(&[0.75, 0.25]).unwrap();
        let s = von_neumann_entropy(&rho).unwrap();
        assert!((s - h2(0.25)).abs() < 1e-12);
        assert!((s - 0.8113).abs() < 1e-3);
    }

    #[test]
    fn relative_entropy_examples() {
        let rho = plus();
        assert!(relative_entropy(&rho, &rho).unwrap().abs() < 1e-10);
        let inf = relative_entropy(&DensityMatrix::basis(2, 0), &DensityMatrix::basis(2, 1)).unwrap();
        assert_eq!(inf, f64::INFINITY);
        let one = relative_entropy(&DensityMatrix::basis(2, 0), &DensityMatrix::maximally_mixed(2)).unwrap();
        assert!((one - 1.0).abs() < 1e-12);
        assert!(relative_entropy(&rho, &DensityMatrix::maximally_mixed(3)).is_err());
    }

    #[test]
    fn trace_norm_examples() {
        assert_eq!(trace_norm(&ComplexMatrix::zeros(2, 2)).unwrap(), 0.0);
        let diff = DensityMatrix::basis(2, 0).matrix() - DensityMatrix::basis(2, 1).matrix();
        assert!((trace_norm(&diff).unwrap() - 2.0).abs() < 1e-14);
        // eigenvalues ±sin(π/4) from the 2×2 characteristic polynomial
        let diff = DensityMatrix::basis(2, 0).matrix() - plus().matrix();
        let expected = 2.0 * (std::f64::consts::PI / 4.0).sin();
        assert!((trace_norm(&diff).unwrap() - expected).abs() < 1e-6);
        let non_herm = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(trace_norm(&non_herm).is_err());
    }

    #[test]
    fn fidelity_examples() {
        let rho = plus();
        assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-10);
        assert!(fidelity(&DensityMatrix::basis(2, 0), &DensityMatrix::basis(2, 1)).unwrap() < 1e-12);
        let f = fidelity(&DensityMatrix::basis(2, 0), &rho).unwrap();
        assert!((f - 0.5).abs() < 1e-8);
        let root = fidelity_with(&DensityMatrix::basis(2, 0), &rho, FidelityConvention::Root).unwrap();
        assert!((root - FRAC_1_SQRT_2).abs() < 1e-8);
    }

    #[test]
    fn fidelity_is_symmetric_on_mixed_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..10 {
            let a = random::density(&mut rng, 3);
            let b = random::density(&mut rng, 3);
            let ab = fidelity(&a, &b).unwrap();
            let ba = fidelity(&b, &a).unwrap();
            assert!((ab - ba).abs() < 1e-8);
        }
    }

    #[test]
    fn matrix_function_examples() {
        let m = ComplexMatrix::from_diag(&[4.0, 9.0]);
        let r = matrix_function(&m, MatrixFn::Sqrt).unwrap();
        assert!(r.max_abs_diff(&ComplexMatrix::from_diag(&[2.0, 3.0])) < 1e-14);
        let p0 = ComplexMatrix::from_diag(&[1.0, 0.0]);
        let r = matrix_function(&p0, MatrixFn::InvSqrtOnSupport).unwrap();
        assert!(r.max_abs_diff(&p0) < 1e-14);
        let neg = ComplexMatrix::from_diag(&[1.0, -0.1]);
        assert!(matrix_function(&neg, MatrixFn::Sqrt).is_err());
        let log = matrix_function(&ComplexMatrix::from_diag(&[0.5, 0.0]), MatrixFn::Log2).unwrap();
        assert!((log[(0, 0)].re + 1.0).abs() < 1e-14);
        assert!((log[(1, 1)].re - EIGEN_FLOOR.log2()).abs() < 1e-10);
    }

    #[test]
    fn sqrt_squares_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random::density(&mut rng, 4).into_matrix();
        let r = matrix_function(&m, MatrixFn::Sqrt).unwrap();
        assert!(r.matmul(&r).max_abs_diff(&m) <= 1e-9);
    }

    #[test]
    fn entropy_is_additive_on_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let rho = random::density(&mut rng, 2);
        let sigma = random::density(&mut rng, 3);
        let joint = von_neumann_entropy(&rho.tensor(&sigma)).unwrap();
        let sum = von_neumann_entropy(&rho).unwrap() + von_neumann_entropy(&sigma).unwrap();
        assert!((joint - sum).abs() <= 1e-8);
    }

    #[test]
    fn partial_trace_of_product_entropy_bound() {
        // S(AB) >= |S(A) - S(B)| (Araki–Lieb) on a random pure state: S(A) = S(B)
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let psi = random::pure_state(&mut rng, 6);
        let p = DimensionProfile::new(vec![2, 3]).unwrap();
        let a = DensityMatrix::new(partial_trace(psi.matrix(), &p, &[0]).unwrap()).unwrap();
        let b = DensityMatrix::new(partial_trace(psi.matrix(), &p, &[1]).unwrap()).unwrap();
        let sa = von_neumann_entropy(&a).unwrap();
        let sb = von_neumann_entropy(&b).unwrap();
        assert!((sa - sb).abs() < 1e-9);
    }
}

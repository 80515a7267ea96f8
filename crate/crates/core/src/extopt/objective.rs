//! Objectives over tuples of extension matrices and their Euclidean
//! gradients (with respect to `Re Tr(G† dX)`).

use crate::densmat::{
    eig_hermitian, entropy_of_spectrum, matrix_function_from_eigen, ComplexMatrix, FidelityConvention, HermitianEigen,
    MatrixFn, EIGEN_FLOOR,
};
use crate::error::Result;

pub(crate) trait Objective: Sync {
    fn value(&self, xs: &[ComplexMatrix]) -> Result<f64>;
    fn gradient(&self, xs: &[ComplexMatrix]) -> Result<Vec<ComplexMatrix>>;

    /// Hessian in the coordinates `Σ_j c_{ij} basis[j]` of the movable
    /// entries (row-major, movable entries in order), if available.
    fn hessian(&self, _xs: &[ComplexMatrix], _basis: &[ComplexMatrix], _movable: &[bool]) -> Result<Option<Vec<f64>>> {
        Ok(None)
    }
}

/// `G[j][k] = Re Tr(B_k · U (K ∘ U†B_jU) U†)` for the eigendecomposition
/// `U` of some matrix and a divided-difference kernel `K`.
pub(crate) fn kernel_gram(e: &HermitianEigen, basis: &[ComplexMatrix], kernel: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    let dim = e.values.len();
    let k: Vec<f64> = (0..dim * dim)
        .map(|ab| kernel(e.values[ab / dim], e.values[ab % dim]))
        .collect();
    let u = &e.vectors;
    let rotated: Vec<ComplexMatrix> = basis.iter().map(|b| u.dagger().matmul(b).matmul(u)).collect();
    let n = basis.len();
    let mut out = vec![0.0; n * n];
    for j in 0..n {
        let weighted: Vec<_> = rotated[j].data().iter().zip(&k).map(|(z, w)| z * w).collect();
        for l in j..n {
            let v: f64 = rotated[l]
                .data()
                .iter()
                .zip(&weighted)
                .map(|(a, b)| (a.conj() * b).re)
                .sum();
            out[j * n + l] = v;
            out[l * n + j] = v;
        }
    }
    out
}

/// First divided difference of `ln`, the Daleckii–Krein kernel of `D log`.
pub(crate) fn log_divided_difference(a: f64, b: f64) -> f64 {
    let a = a.max(EIGEN_FLOOR);
    let b = b.max(EIGEN_FLOOR);
    if (a - b).abs() <= 1e-9 * a.max(b) {
        2.0 / (a + b)
    } else {
        (a.ln() - b.ln()) / (a - b)
    }
}

/// `χ({p_i, X_i}) = S(Σ p_i X_i) − Σ p_i S(X_i)`.
pub(crate) struct HolevoObjective {
    pub probs: Vec<f64>,
}

fn weighted_sum(probs: &[f64], xs: &[ComplexMatrix]) -> ComplexMatrix {
    let mut avg = ComplexMatrix::zeros(xs[0].rows(), xs[0].cols());
    for (p, x) in probs.iter().zip(xs) {
        avg.add_scaled(*p, x);
    }
    avg
}

impl Objective for HolevoObjective {
    fn value(&self, xs: &[ComplexMatrix]) -> Result<f64> {
        let avg = weighted_sum(&self.probs, xs);
        let mut chi = entropy_of_spectrum(&eig_hermitian(&avg)?.values);
        for (p, x) in self.probs.iter().zip(xs) {
            if *p > 0.0 {
                chi -= p * entropy_of_spectrum(&eig_hermitian(x)?.values);
            }
        }
        Ok(chi)
    }

    /// `∂χ/∂X_i = p_i (log₂ X_i − log₂ X̄)`; the `−1/ln 2` terms from
    /// `∇S(X) = −log₂ X − I/ln 2` cancel between the two entropies.
    fn gradient(&self, xs: &[ComplexMatrix]) -> Result<Vec<ComplexMatrix>> {
        let avg = weighted_sum(&self.probs, xs);
        let log_avg = matrix_function_from_eigen(&eig_hermitian(&avg)?, MatrixFn::Log2)?;
        self.probs
            .iter()
            .zip(xs)
            .map(|(p, x)| {
                if *p == 0.0 {
                    return Ok(ComplexMatrix::zeros(x.rows(), x.cols()));
                }
                let log_x = matrix_function_from_eigen(&eig_hermitian(x)?, MatrixFn::Log2)?;
                Ok((&log_x - &log_avg).scale(*p))
            })
            .collect()
    }

    /// Block `(i, i')` is `δ_{ii'} p_i D log₂ X_i − p_i p_{i'} D log₂ X̄`.
    fn hessian(&self, xs: &[ComplexMatrix], basis: &[ComplexMatrix], movable: &[bool]) -> Result<Option<Vec<f64>>> {
        let nb = basis.len();
        let idx: Vec<usize> = (0..xs.len()).filter(|&i| movable[i]).collect();
        let total = idx.len() * nb;
        let avg = weighted_sum(&self.probs, xs);
        let shared = kernel_gram(&eig_hermitian(&avg)?, basis, log_divided_difference);
        let mut out = vec![0.0; total * total];
        for (bi, &i) in idx.iter().enumerate() {
            let own = kernel_gram(&eig_hermitian(&xs[i])?, basis, log_divided_difference);
            for (bk, &k) in idx.iter().enumerate() {
                let cross = self.probs[i] * self.probs[k];
                for j in 0..nb {
                    for l in 0..nb {
                        let mut v = -cross * shared[j * nb + l];
                        if bi == bk {
                            v += self.probs[i] * own[j * nb + l];
                        }
                        out[(bi * nb + j) * total + bk * nb + l] = v / std::f64::consts::LN_2;
                    }
                }
            }
        }
        Ok(Some(out))
    }
}

/// Negated fidelity `−F(X₀, X₁)` of a pair, so that minimizing maximizes F.
pub(crate) struct NegFidelityObjective {
    pub convention: FidelityConvention,
}

struct RootFidelityParts {
    root: f64,
    /// `∂R/∂X₁ = ½ √X₀ (√X₀ X₁ √X₀)^{−1/2} √X₀`
    grad_second: ComplexMatrix,
}

fn root_fidelity_parts(x0: &ComplexMatrix, x1: &ComplexMatrix) -> Result<RootFidelityParts> {
    let sqrt0 = matrix_function_from_eigen(&eig_hermitian(x0)?, MatrixFn::Sqrt)?;
    let inner = sqrt0.matmul(x1).matmul(&sqrt0).hermitian_part();
    let e = eig_hermitian(&inner)?;
    let root = e.values.iter().map(|l| l.max(0.0).sqrt()).sum();
    let inv_sqrt = e.reconstruct_with(|l| if l > EIGEN_FLOOR { 1.0 / l.sqrt() } else { 0.0 });
    let grad_second = sqrt0.matmul(&inv_sqrt).matmul(&sqrt0).scale(0.5).hermitian_part();
    Ok(RootFidelityParts { root, grad_second })
}

impl Objective for NegFidelityObjective {
    fn value(&self, xs: &[ComplexMatrix]) -> Result<f64> {
        let root = root_fidelity_parts(&xs[0], &xs[1])?.root;
        Ok(-self.convention.from_root(root))
    }

    fn gradient(&self, xs: &[ComplexMatrix]) -> Result<Vec<ComplexMatrix>> {
        let fwd = root_fidelity_parts(&xs[0], &xs[1])?;
        let bwd = root_fidelity_parts(&xs[1], &xs[0])?;
        let factor = match self.convention {
            FidelityConvention::Root => 1.0,
            FidelityConvention::Squared => 2.0 * fwd.root,
        };
        Ok(vec![bwd.grad_second.scale(-factor), fwd.grad_second.scale(-factor)])
    }
}

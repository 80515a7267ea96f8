//! Fidelity between extensions as a semidefinite program.
//!
//! `√F(X, Y) = max Re Tr Z` over `[[X, Z], [Z†, Y]] ⪰ 0`, so the best pair
//! of extensions solves a linear objective over one LMI plus the marginal
//! constraints. Both targets are first compressed to their local supports,
//! since every extension of `ρ` lives on `supp(ρ)^{⊗n}`; pure targets then
//! leave a single fixed point.
//!
//! The program is solved along a log-det barrier path with Newton steps.
//! At a barrier point with residual `r`, `μ M^{-1}` is dual feasible and
//! the optimum exceeds the current objective by at most
//! `μ · dim M + √8 ‖r‖` (the variable set has diameter at most `√8`).

use crate::densmat::{eig_hermitian, root_fidelity_of_matrices, tensor_power, ComplexMatrix, DensityMatrix};
use crate::error::{Error, Result};

use super::descent::{solve_spd, GAP_TOL};
use super::objective::kernel_gram;
use super::project::MarginalConstraint;

/// Eigenvalues at or below this are outside a target's support.
const SUPPORT_TOL: f64 = 1e-10;
/// Largest coordinate count handled with dense Newton steps.
pub(crate) const SDP_MAX_VARS: usize = 1200;
const MU_START: f64 = 0.1;
const MU_SHRINK: f64 = 0.1;
const ARMIJO: f64 = 1e-4;
const BACKTRACKS: usize = 60;
const STAGE_STEPS: usize = 60;
const VALUE_RESOLUTION: f64 = 1e-13;
const DIAMETER: f64 = 2.828_427_124_746_190_1;

pub(crate) struct SdpOutcome {
    /// Optimal extensions in the original space.
    pub x: ComplexMatrix,
    pub y: ComplexMatrix,
    /// Root fidelity of `(x, y)`.
    pub root: f64,
    /// Certified bound on `sup √F − root`.
    pub root_gap: f64,
    /// Final barrier residual norm.
    pub residual: f64,
    pub iterations: usize,
}

struct Support {
    /// `d × r` isometry onto the support.
    iso: ComplexMatrix,
    compressed: DensityMatrix,
}

fn support(rho: &DensityMatrix) -> Result<Support> {
    let e = rho.eigen()?;
    let keep: Vec<usize> = (0..e.values.len()).filter(|&k| e.values[k] > SUPPORT_TOL).collect();
    let iso = ComplexMatrix::from_fn(rho.dim(), keep.len(), |i, j| e.vectors[(i, keep[j])]);
    let weights: Vec<f64> = keep.iter().map(|&k| e.values[k]).collect();
    let total: f64 = weights.iter().sum();
    let weights: Vec<f64> = weights.iter().map(|w| w / total).collect();
    Ok(Support {
        iso,
        compressed: DensityMatrix::diagonal(&weights)?,
    })
}

struct Program {
    dx: usize,
    dy: usize,
    /// Objective coefficients of `c·v` (to be minimized).
    cost: Vec<f64>,
    /// Directions `∂M/∂v_j`.
    dirs: Vec<ComplexMatrix>,
    m0: ComplexMatrix,
}

impl Program {
    fn size(&self) -> usize {
        self.dx + self.dy
    }

    fn matrix(&self, v: &[f64]) -> ComplexMatrix {
        let mut m = self.m0.clone();
        for (a, &c) in self.dirs.iter().zip(v) {
            if c != 0.0 {
                m.add_scaled(c, a);
            }
        }
        m.hermitian_part()
    }

    fn cost(&self, v: &[f64]) -> f64 {
        self.cost.iter().zip(v).map(|(c, x)| c * x).sum()
    }

    /// `φ = c·v − μ ln det M`, or `None` outside the cone.
    fn barrier(&self, v: &[f64], mu: f64) -> Result<Option<f64>> {
        let e = eig_hermitian(&self.matrix(v))?;
        if e.min_value() <= 0.0 {
            return Ok(None);
        }
        Ok(Some(self.cost(v) - mu * e.values.iter().map(|l| l.ln()).sum::<f64>()))
    }

    fn gradient_and_hessian(&self, v: &[f64], mu: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let e = eig_hermitian(&self.matrix(v))?;
        let inv = e.reconstruct_with(|l| 1.0 / l);
        let grad = self
            .cost
            .iter()
            .zip(&self.dirs)
            .map(|(c, a)| c - mu * inv.re_inner(a))
            .collect();
        let hess = kernel_gram(&e, &self.dirs, |a, b| mu / (a * b));
        Ok((grad, hess))
    }

    fn gradient(&self, v: &[f64], mu: f64) -> Result<Vec<f64>> {
        let inv = eig_hermitian(&self.matrix(v))?.reconstruct_with(|l| 1.0 / l);
        Ok(self
            .cost
            .iter()
            .zip(&self.dirs)
            .map(|(c, a)| c - mu * inv.re_inner(a))
            .collect())
    }
}

fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn embed_block(b: &ComplexMatrix, offset: usize, size: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(size, size);
    for i in 0..b.rows() {
        for j in 0..b.cols() {
            m[(offset + i, offset + j)] = b[(i, j)];
        }
    }
    m
}

/// Coordinate count of the program for `(ρ, σ)` at `n` copies.
pub(crate) fn variable_count(rho: &DensityMatrix, sigma: &DensityMatrix, n: usize) -> Result<usize> {
    let rank =
        |s: &DensityMatrix| -> Result<usize> { Ok(s.eigen()?.values.iter().filter(|&&l| l > SUPPORT_TOL).count()) };
    let tangent = |r: usize| {
        let big = r.pow(n as u32);
        big * big - 1 - n * (r * r - 1)
    };
    let (rx, ry) = (rank(rho)?, rank(sigma)?);
    Ok(tangent(rx) + tangent(ry) + 2 * rx.pow(n as u32) * ry.pow(n as u32))
}

pub(crate) fn max_root_fidelity(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    n: usize,
    max_iters: usize,
) -> Result<SdpOutcome> {
    let (sx, sy) = (support(rho)?, support(sigma)?);
    let cx = MarginalConstraint::new(&sx.compressed, n)?;
    let cy = MarginalConstraint::new(&sy.compressed, n)?;
    let (bx, by) = (cx.tangent_basis(), cy.tangent_basis());
    let (dx, dy) = (cx.total_dim(), cy.total_dim());
    let size = dx + dy;

    let mut dirs = Vec::with_capacity(bx.len() + by.len() + 2 * dx * dy);
    dirs.extend(bx.iter().map(|b| embed_block(b, 0, size)));
    dirs.extend(by.iter().map(|b| embed_block(b, dx, size)));
    // Tr Z = Tr(C Z') with Z = V Z' W† and C = W†V on the n-fold supports
    let big_v = tensor_power(&sx.iso, n);
    let big_w = tensor_power(&sy.iso, n);
    let overlap = big_w.dagger().matmul(&big_v);
    let mut cost = vec![0.0; bx.len() + by.len()];
    for a in 0..dx {
        for b in 0..dy {
            let mut re = ComplexMatrix::zeros(size, size);
            re[(a, dx + b)].re = 1.0;
            re[(dx + b, a)].re = 1.0;
            let mut im = ComplexMatrix::zeros(size, size);
            im[(a, dx + b)].im = 1.0;
            im[(dx + b, a)].im = -1.0;
            dirs.push(re);
            dirs.push(im);
            let c = overlap[(b, a)];
            cost.push(-c.re);
            cost.push(c.im);
        }
    }
    let mut m0 = embed_block(cx.interior_point(), 0, size);
    m0.add_scaled(1.0, &embed_block(cy.interior_point(), dx, size));
    let program = Program { dx, dy, cost, dirs, m0 };

    let vars = program.dirs.len();
    let nu = program.size() as f64;
    let mu_final = GAP_TOL / (8.0 * nu);
    let mut v = vec![0.0; vars];
    let mut mu = MU_START;
    let mut iterations = 0;
    let mut residual;
    loop {
        let final_stage = mu <= mu_final;
        let tol = if final_stage {
            GAP_TOL / (8.0 * DIAMETER)
        } else {
            mu * nu / DIAMETER
        };
        let mut phi = program
            .barrier(&v, mu)?
            .ok_or_else(|| Error::numerical("fidelity program left the PSD interior", 0.0))?;
        let mut steps = 0;
        loop {
            let (g, h) = program.gradient_and_hessian(&v, mu)?;
            residual = norm(&g);
            if residual <= tol || iterations >= max_iters || steps >= STAGE_STEPS {
                break;
            }
            let neg: Vec<f64> = g.iter().map(|x| -x).collect();
            let Some(dir) = solve_spd(&h, vars, &neg) else {
                break;
            };
            let slope: f64 = g.iter().zip(&dir).map(|(a, b)| a * b).sum();
            if slope >= 0.0 {
                break;
            }
            let resolved = -slope > VALUE_RESOLUTION * phi.abs().max(1.0);
            let mut alpha = 1.0;
            let mut accepted = None;
            for _ in 0..BACKTRACKS {
                let trial: Vec<f64> = v.iter().zip(&dir).map(|(x, d)| x + alpha * d).collect();
                if let Some(val) = program.barrier(&trial, mu)? {
                    let ok = if resolved {
                        val <= phi + ARMIJO * alpha * slope
                    } else {
                        norm(&program.gradient(&trial, mu)?) < residual
                    };
                    if ok {
                        accepted = Some((trial, val));
                        break;
                    }
                }
                alpha *= 0.5;
            }
            let Some((trial, val)) = accepted else {
                break;
            };
            v = trial;
            phi = val;
            iterations += 1;
            steps += 1;
        }
        if final_stage || residual > tol || iterations >= max_iters {
            break;
        }
        mu = (mu * MU_SHRINK).max(mu_final);
    }

    let m = program.matrix(&v);
    let x_small = ComplexMatrix::from_fn(dx, dx, |i, j| m[(i, j)]);
    let y_small = ComplexMatrix::from_fn(dy, dy, |i, j| m[(dx + i, dx + j)]);
    let x = big_v.matmul(&x_small).matmul(&big_v.dagger()).hermitian_part();
    let y = big_w.matmul(&y_small).matmul(&big_w.dagger()).hermitian_part();
    let root = root_fidelity_of_matrices(&x, &y)?;
    // the Z block certifies Re Tr(C Z') ≤ √F(x, y)
    let lower = -program.cost(&v);
    let root_gap = (lower + mu * nu + DIAMETER * residual - root).max(0.0);
    Ok(SdpOutcome {
        x,
        y,
        root,
        root_gap,
        residual,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densmat::{fidelity_with, FidelityConvention};

    fn plus() -> DensityMatrix {
        DensityMatrix::new(ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]])).unwrap()
    }

    #[test]
    fn pure_pair_gives_product_overlap() {
        let zero = DensityMatrix::basis(2, 0);
        let out = max_root_fidelity(&zero, &plus(), 2, 500).unwrap();
        assert!((out.root - 0.5).abs() < 1e-9, "{}", out.root);
        assert!(out.root_gap < 1e-6);
    }

    #[test]
    fn commuting_pair_keeps_one_copy_fidelity() {
        let a = DensityMatrix::diagonal(&[0.3, 0.7]).unwrap();
        let b = DensityMatrix::diagonal(&[0.6, 0.4]).unwrap();
        let out = max_root_fidelity(&a, &b, 2, 500).unwrap();
        let one = fidelity_with(&a, &b, FidelityConvention::Root).unwrap();
        assert!((out.root - one).abs() < 1e-6, "{} vs {one}", out.root);
        assert!(out.root <= one + 1e-9);
    }
}

//! Projections onto the extension feasible set
//! `{X ⪰ 0 : Tr X = 1, Tr_{¬k} X = ρ for every site k}`.
//!
//! The affine part has a closed-form orthogonal projection: the traceless
//! part of each marginal deviation is removed by `embed_k(D_k⁰) / d^{n−1}`
//! and the trace deviation by a multiple of the identity. Those corrections
//! are mutually orthogonal because tracing any other site annihilates a
//! traceless local operator. The intersection with the PSD cone is handled by
//! Dykstra's alternating projections.

use crate::densmat::{
    eig_hermitian, embed_site, partial_trace, tensor_power, ComplexMatrix, DensityMatrix, DimensionProfile, EIGEN_FLOOR,
};
use crate::error::{Error, Result};

use super::extension::FEASIBILITY_TOL;

/// The marginal constraint for one ensemble member.
#[derive(Clone, Debug)]
pub(crate) struct MarginalConstraint {
    n: usize,
    d: usize,
    target: ComplexMatrix,
    profile: DimensionProfile,
    /// `ρ^{⊗n}`, feasible and full rank whenever `ρ` is.
    interior: ComplexMatrix,
    interior_min_eig: f64,
}

impl MarginalConstraint {
    pub fn new(target: &DensityMatrix, n: usize) -> Result<Self> {
        let d = target.dim();
        let interior = tensor_power(target.matrix(), n);
        let interior_min_eig = target.eigen()?.min_value().max(0.0).powi(n as i32);
        Ok(Self {
            n,
            d,
            target: target.matrix().clone(),
            profile: DimensionProfile::uniform(d, n)?,
            interior,
            interior_min_eig,
        })
    }

    pub fn total_dim(&self) -> usize {
        self.d.pow(self.n as u32)
    }

    pub fn interior_point(&self) -> &ComplexMatrix {
        &self.interior
    }

    /// Whether the feasible set has full-rank points.
    pub fn has_full_rank_interior(&self) -> bool {
        self.interior_min_eig > EIGEN_FLOOR
    }

    pub fn marginal(&self, x: &ComplexMatrix, site: usize) -> ComplexMatrix {
        partial_trace(x, &self.profile, &[site]).expect("dimension checked at construction")
    }

    /// Largest entrywise marginal deviation, also covering the trace.
    pub fn residual(&self, x: &ComplexMatrix) -> f64 {
        (0..self.n)
            .map(|k| self.marginal(x, k).max_abs_diff(&self.target))
            .fold((x.trace().re - 1.0).abs(), f64::max)
    }

    fn correct(&self, x: &ComplexMatrix, target: Option<&ComplexMatrix>, trace_target: f64) -> ComplexMatrix {
        let d = self.d as f64;
        let big = self.total_dim();
        let tau = x.trace().re - trace_target;
        let local_norm = d.powi(self.n as i32 - 1);
        let mut out = x.clone();
        for k in 0..self.n {
            let mut dev = self.marginal(x, k);
            if let Some(t) = target {
                dev = &dev - t;
            }
            for i in 0..self.d {
                dev[(i, i)].re -= tau / d;
            }
            out.add_scaled(-1.0 / local_norm, &embed_site(&dev, k, self.n));
        }
        for i in 0..big {
            out[(i, i)].re -= tau / big as f64;
        }
        out.hermitian_part()
    }

    /// Orthogonal projection onto the affine set (marginals and trace).
    pub fn project_affine(&self, x: &ComplexMatrix) -> ComplexMatrix {
        self.correct(x, Some(&self.target), 1.0)
    }

    /// Orthogonal projection onto the tangent space of the affine set.
    pub fn project_tangent(&self, g: &ComplexMatrix) -> ComplexMatrix {
        self.correct(g, None, 0.0)
    }

    /// Orthonormal basis of the tangent space: products of local Hermitian
    /// basis elements with at least two non-identity factors.
    pub fn tangent_basis(&self) -> Vec<ComplexMatrix> {
        let local = local_hermitian_basis(self.d);
        let count = local.len();
        let mut out = Vec::new();
        let total = count.pow(self.n as u32);
        for code in 0..total {
            let mut digits = Vec::with_capacity(self.n);
            let mut c = code;
            for _ in 0..self.n {
                digits.push(c % count);
                c /= count;
            }
            if digits.iter().filter(|&&k| k != 0).count() < 2 {
                continue;
            }
            let mut m = local[digits[self.n - 1]].clone();
            for &k in digits[..self.n - 1].iter().rev() {
                m = m.kron(&local[k]);
            }
            out.push(m);
        }
        out
    }

    /// Projection onto the feasible set. Returns the point and its marginal
    /// residual.
    pub fn project(&self, x: &ComplexMatrix, max_iters: usize) -> Result<(ComplexMatrix, f64)> {
        let affine = self.project_affine(x);
        let e = eig_hermitian(&affine)?;
        if e.min_value() >= -EIGEN_FLOOR {
            // already PSD, hence the nearest feasible point
            let r = self.residual(&affine);
            return Ok((affine, r));
        }

        let mut y = x.hermitian_part();
        let mut q = ComplexMatrix::zeros(y.rows(), y.cols());
        let mut last_residual = f64::INFINITY;
        let mut done = false;
        for _ in 0..max_iters {
            let z = self.project_affine(&y);
            let w = &z + &q;
            y = project_psd(&w)?;
            q = &w - &y;
            last_residual = self.residual(&y);
            if last_residual <= FEASIBILITY_TOL * 1e-2 {
                done = true;
                break;
            }
        }
        if !done && last_residual > FEASIBILITY_TOL {
            return Err(Error::numerical(
                "Dykstra projection did not reach the feasible set",
                last_residual,
            ));
        }
        let out = self.finish(&y)?;
        let r = self.residual(&out);
        if r > FEASIBILITY_TOL {
            return Err(Error::numerical("projected point violates the marginal constraint", r));
        }
        Ok((out, r))
    }

    /// Turns a nearly feasible PSD point into an exactly affine-feasible PSD
    /// one, mixing in `ρ^{⊗n}` just enough to cancel negative eigenvalues.
    fn finish(&self, y: &ComplexMatrix) -> Result<ComplexMatrix> {
        let z = self.project_affine(y);
        let min = eig_hermitian(&z)?.min_value();
        if min >= 0.0 {
            return Ok(z);
        }
        if self.interior_min_eig > EIGEN_FLOOR {
            let theta = -min / (self.interior_min_eig - min);
            let mut out = z.scale(1.0 - theta);
            out.add_scaled(theta, &self.interior);
            return Ok(out.hermitian_part());
        }
        // rank-deficient target: keep the PSD iterate, renormalized
        let tr = y.trace().re;
        Ok(y.scale(1.0 / tr))
    }
}

/// Orthonormal Hermitian basis of `d × d` matrices, identity first.
fn local_hermitian_basis(d: usize) -> Vec<ComplexMatrix> {
    let mut out = vec![ComplexMatrix::identity(d).scale(1.0 / (d as f64).sqrt())];
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for a in 0..d {
        for b in a + 1..d {
            let mut sym = ComplexMatrix::zeros(d, d);
            sym[(a, b)].re = h;
            sym[(b, a)].re = h;
            out.push(sym);
            let mut anti = ComplexMatrix::zeros(d, d);
            anti[(a, b)].im = -h;
            anti[(b, a)].im = h;
            out.push(anti);
        }
    }
    for k in 1..d {
        let norm = 1.0 / ((k * (k + 1)) as f64).sqrt();
        let mut diag = vec![0.0; d];
        for x in diag.iter_mut().take(k) {
            *x = norm;
        }
        diag[k] = -(k as f64) * norm;
        out.push(ComplexMatrix::from_diag(&diag));
    }
    out
}

/// Nearest PSD matrix in Frobenius norm (eigenvalue clipping).
pub(crate) fn project_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let e = eig_hermitian(&m.hermitian_part())?;
    if e.min_value() >= 0.0 {
        return Ok(m.hermitian_part());
    }
    Ok(e.reconstruct_with(|l| l.max(0.0)))
}

//! Descent over tuples of extensions, one marginal constraint per entry.
//!
//! Small problems with full-rank targets first run BFGS in tangent
//! coordinates, which copes with the stiff entropy curvature near the PSD
//! boundary; projected gradient with Armijo backtracking finishes whatever
//! quasi-Newton leaves unconverged and handles everything else.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::densmat::{eig_hermitian, random, ComplexMatrix, DensityMatrix};
use crate::error::{Error, Result};
use crate::par::map_indexed;

use super::objective::{kernel_gram, Objective};
use super::project::MarginalConstraint;
use super::OptimizerConfig;

const ARMIJO: f64 = 1e-4;
const PG_TOL: f64 = 1e-6;
const STALL_WINDOW: usize = 10;
const MIN_STEP: f64 = 1e-18;
/// Size limits for the dense quasi-Newton phase.
const QN_MAX_DIM: usize = 32;
const QN_MAX_COORDS: usize = 2048;
const QN_BACKTRACKS: usize = 60;
/// Weight of `ρ^{⊗n}` mixed into boundary starts before quasi-Newton.
const INTERIOR_NUDGE: f64 = 1e-3;
const BARRIER_START: f64 = 1e-3;
const BARRIER_SHRINK: f64 = 0.1;
const NEWTON_STAGE_STEPS: usize = 60;
/// Relative size below which objective differences are rounding noise.
const VALUE_RESOLUTION: f64 = 1e-13;
/// Certified optimality gap that counts as converged.
pub(crate) const GAP_TOL: f64 = 1e-6;

struct Progress {
    f: f64,
    iterations: usize,
    pg_norm: f64,
    converged: bool,
    stall: usize,
    /// Certified lower bound on the optimum, if any.
    lower_bound: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solves `A x = b` for symmetric positive definite `A` by Cholesky,
/// adding a growing diagonal shift if `A` is numerically indefinite.
pub(crate) fn solve_spd(a: &[f64], n: usize, b: &[f64]) -> Option<Vec<f64>> {
    let scale = (0..n)
        .map(|i| a[i * n + i].abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut shift = 0.0;
    for _ in 0..12 {
        if let Some(x) = cholesky_solve(a, n, b, shift) {
            return Some(x);
        }
        shift = if shift == 0.0 { 1e-12 * scale } else { shift * 100.0 };
    }
    None
}

fn cholesky_solve(a: &[f64], n: usize, b: &[f64], shift: f64) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[i * n + j] - dot(&l[i * n..i * n + j], &l[j * n..j * n + j]);
            if i == j {
                sum += shift;
                if sum <= 0.0 || !sum.is_finite() {
                    return None;
                }
                l[i * n + i] = sum.sqrt();
            } else {
                l[i * n + j] = sum / l[j * n + j];
            }
        }
    }
    let mut y = vec![0.0; n];
    for i in 0..n {
        y[i] = (b[i] - dot(&l[i * n..i * n + i], &y[..i])) / l[i * n + i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let tail: f64 = (i + 1..n).map(|k| l[k * n + i] * x[k]).sum();
        x[i] = (y[i] - tail) / l[i * n + i];
    }
    Some(x)
}

/// `H ← (I − ρ s yᵀ) H (I − ρ y sᵀ) + ρ s sᵀ` with `ρ = 1 / sᵀy`.
fn bfgs_update(h: &mut [f64], dim: usize, s: &[f64], y: &[f64], sy: f64) {
    let rho = 1.0 / sy;
    let hy: Vec<f64> = (0..dim).map(|i| dot(&h[i * dim..(i + 1) * dim], y)).collect();
    let yhy = dot(y, &hy);
    let coef = rho * rho * yhy + rho;
    for i in 0..dim {
        for j in 0..dim {
            h[i * dim + j] += coef * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
        }
    }
}

pub(crate) struct Problem<'a> {
    pub objective: &'a dyn Objective,
    pub constraints: Vec<MarginalConstraint>,
    /// Entries that never move (pure targets have a single feasible point).
    pub frozen: Vec<bool>,
}

#[derive(Clone, Debug)]
pub(crate) struct RestartOutcome {
    pub objective: f64,
    pub xs: Vec<ComplexMatrix>,
    pub iterations: usize,
    pub converged: bool,
    pub pg_norm: f64,
    /// Certified `objective − optimum` bound; infinite when unavailable.
    pub gap: f64,
    pub residual: f64,
}

/// `Σ_k λ_k (|v_k⟩⟨v_k|)^{⊗n}` in the eigenbasis of `rho` alone.
pub(crate) fn classical_copy(rho: &DensityMatrix, n: usize) -> Result<ComplexMatrix> {
    let e = rho.eigen()?;
    let d = rho.dim();
    let big = d.pow(n as u32);
    let mut out = ComplexMatrix::zeros(big, big);
    for k in 0..d {
        let w = e.values[k].max(0.0);
        if w == 0.0 {
            continue;
        }
        let v = e.vector(k);
        let mut ket = v.clone();
        for _ in 1..n {
            ket = ket.iter().flat_map(|a| v.iter().map(move |b| a * b)).collect();
        }
        out.add_scaled(w, &ComplexMatrix::outer(&ket));
    }
    let tr = out.trace().re;
    Ok(out.scale(1.0 / tr).hermitian_part())
}

impl Problem<'_> {
    fn sq_dist(a: &[ComplexMatrix], b: &[ComplexMatrix]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| {
                let d = x - y;
                d.re_inner(&d)
            })
            .sum()
    }

    /// Feasible start for restart `r`: the classical copies for `r = 0`,
    /// seeded feasible perturbations of them otherwise.
    fn start(&self, base: &[ComplexMatrix], r: usize, cfg: &OptimizerConfig) -> Vec<ComplexMatrix> {
        if r == 0 {
            return base.to_vec();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(r as u64));
        base.iter()
            .zip(&self.constraints)
            .zip(&self.frozen)
            .map(|((x, c), &frozen)| {
                if frozen {
                    return x.clone();
                }
                let t: f64 = rng.random_range(0.1..0.6);
                let mut mix = x.scale(1.0 - t);
                mix.add_scaled(t, c.interior_point());
                let noise = random::hermitian(&mut rng, x.rows());
                let eps = 0.1 / noise.frobenius_norm();
                let mut trial = mix.clone();
                trial.add_scaled(eps, &noise);
                match c.project(&trial, cfg.dykstra_iters) {
                    Ok((p, _)) => p,
                    Err(_) => mix,
                }
            })
            .collect()
    }

    fn run(&self, base: &[ComplexMatrix], r: usize, cfg: &OptimizerConfig) -> Result<RestartOutcome> {
        let mut xs = self.start(base, r, cfg);
        let mut st = Progress {
            f: self.objective.value(&xs)?,
            iterations: 0,
            pg_norm: f64::INFINITY,
            converged: false,
            stall: 0,
            lower_bound: f64::NEG_INFINITY,
        };
        if self.frozen.iter().all(|&z| z) {
            st.pg_norm = 0.0;
            st.converged = true;
        }
        if !st.converged && self.quasi_newton_fits() {
            self.barrier_path(&mut xs, &mut st, cfg)?;
            st.stall = 0;
        }
        if !st.converged {
            self.projected_gradient(&mut xs, &mut st, cfg)?;
        }

        let residual = xs
            .iter()
            .zip(&self.constraints)
            .map(|(x, c)| c.residual(x))
            .fold(0.0, f64::max);
        Ok(RestartOutcome {
            objective: st.f,
            xs,
            iterations: st.iterations,
            converged: st.converged,
            pg_norm: st.pg_norm,
            gap: st.f - st.lower_bound,
            residual,
        })
    }

    fn quasi_newton_fits(&self) -> bool {
        let mut coords = 0;
        for (c, &frozen) in self.constraints.iter().zip(&self.frozen) {
            if frozen {
                continue;
            }
            let big = c.total_dim();
            if big > QN_MAX_DIM || !c.has_full_rank_interior() {
                return false;
            }
            coords += big * big;
        }
        coords <= QN_MAX_COORDS
    }

    fn tangent_coords(&self, bases: &[Vec<ComplexMatrix>], grad: &[ComplexMatrix]) -> Vec<f64> {
        bases
            .iter()
            .zip(grad)
            .flat_map(|(basis, g)| basis.iter().map(move |b| b.re_inner(g)))
            .collect()
    }

    fn displace(
        &self,
        xs: &[ComplexMatrix],
        bases: &[Vec<ComplexMatrix>],
        dir: &[f64],
        alpha: f64,
    ) -> Vec<ComplexMatrix> {
        let mut offset = 0;
        xs.iter()
            .zip(bases)
            .map(|(x, basis)| {
                let mut y = x.clone();
                for (b, d) in basis.iter().zip(&dir[offset..offset + basis.len()]) {
                    y.add_scaled(alpha * d, b);
                }
                offset += basis.len();
                y.hermitian_part()
            })
            .collect()
    }

    /// Total `ln det` of the movable entries, or `None` if one of them is
    /// not strictly positive.
    fn log_dets(&self, xs: &[ComplexMatrix]) -> Result<Option<f64>> {
        let mut total = 0.0;
        for (x, &frozen) in xs.iter().zip(&self.frozen) {
            if frozen {
                continue;
            }
            let e = eig_hermitian(x)?;
            if e.min_value() <= 0.0 {
                return Ok(None);
            }
            total += e.values.iter().map(|l| l.ln()).sum::<f64>();
        }
        Ok(Some(total))
    }

    fn barrier_value(&self, xs: &[ComplexMatrix], mu: f64) -> Result<Option<f64>> {
        match self.log_dets(xs)? {
            Some(ld) => Ok(Some(self.objective.value(xs)? - mu * ld)),
            None => Ok(None),
        }
    }

    fn barrier_gradient(&self, xs: &[ComplexMatrix], bases: &[Vec<ComplexMatrix>], mu: f64) -> Result<Vec<f64>> {
        let mut grad = self.objective.gradient(xs)?;
        for ((g, x), &frozen) in grad.iter_mut().zip(xs).zip(&self.frozen) {
            if !frozen {
                let inv = eig_hermitian(x)?.reconstruct_with(|l| 1.0 / l);
                g.add_scaled(-mu, &inv);
            }
        }
        Ok(self.tangent_coords(bases, &grad))
    }

    /// Follows the log-det barrier path `f − μ Σ ln det X_i` for shrinking
    /// `μ` with BFGS in tangent coordinates. Near-stationary barrier points
    /// make `μ X_i^{-1}` dual feasible, which bounds the optimum from below
    /// by `f − μ Σ dim X_i − √(2m) ‖r‖` for barrier residual `r`; that bound
    /// certifies points on faces of the cone where the gradient mapping of
    /// `f` itself cannot vanish.
    fn barrier_path(&self, xs: &mut Vec<ComplexMatrix>, st: &mut Progress, cfg: &OptimizerConfig) -> Result<()> {
        let bases: Vec<Vec<ComplexMatrix>> = self
            .constraints
            .iter()
            .zip(&self.frozen)
            .map(|(c, &frozen)| if frozen { Vec::new() } else { c.tangent_basis() })
            .collect();
        let start = xs.clone();
        let f_start = st.f;

        for ((x, c), &frozen) in xs.iter_mut().zip(&self.constraints).zip(&self.frozen) {
            if !frozen && eig_hermitian(x)?.min_value() <= INTERIOR_NUDGE * 1e-3 {
                let mut mixed = x.scale(1.0 - INTERIOR_NUDGE);
                mixed.add_scaled(INTERIOR_NUDGE, c.interior_point());
                *x = mixed.hermitian_part();
            }
        }

        let movable: Vec<&MarginalConstraint> = self
            .constraints
            .iter()
            .zip(&self.frozen)
            .filter(|(_, &z)| !z)
            .map(|(c, _)| c)
            .collect();
        let dim_sum: f64 = movable.iter().map(|c| c.total_dim() as f64).sum();
        let spread = (2.0 * movable.len() as f64).sqrt();
        let mu_final = GAP_TOL / (8.0 * dim_sum);

        let mut mu = BARRIER_START;
        loop {
            let final_stage = mu <= mu_final;
            let tol = if final_stage {
                GAP_TOL / (4.0 * spread)
            } else {
                mu * dim_sum / spread
            };
            let residual = match self.newton_stage(xs, &bases, mu, tol, st, cfg)? {
                Some(r) => r,
                None => self.bfgs_stage(xs, &bases, mu, tol, st, cfg)?,
            };
            st.f = self.objective.value(xs)?;
            let bound = st.f - mu * dim_sum - spread * residual;
            st.lower_bound = st.lower_bound.max(bound);
            if final_stage || residual > tol || st.iterations >= cfg.max_iters {
                break;
            }
            mu = (mu * BARRIER_SHRINK).max(mu_final);
        }

        if f_start < st.f {
            *xs = start;
            st.f = f_start;
        }
        st.pg_norm = norm(&self.tangent_coords(&bases, &self.objective.gradient(xs)?));
        if st.f - st.lower_bound <= GAP_TOL {
            st.converged = true;
        }
        Ok(())
    }

    /// Damped Newton on one barrier subproblem, for objectives with an
    /// analytic Hessian. Returns `None` when the objective has none.
    fn newton_stage(
        &self,
        xs: &mut Vec<ComplexMatrix>,
        bases: &[Vec<ComplexMatrix>],
        mu: f64,
        tol: f64,
        st: &mut Progress,
        cfg: &OptimizerConfig,
    ) -> Result<Option<f64>> {
        let Some(basis) = bases.iter().find(|b| !b.is_empty()) else {
            return Ok(Some(0.0));
        };
        let movable: Vec<bool> = self.frozen.iter().map(|z| !z).collect();
        let nb = basis.len();
        let mut phi = self
            .barrier_value(xs, mu)?
            .ok_or_else(|| Error::numerical("barrier start left the PSD interior", 0.0))?;
        let mut g = self.barrier_gradient(xs, bases, mu)?;
        let mut steps = 0;
        while norm(&g) > tol && st.iterations < cfg.max_iters {
            let Some(mut hess) = self.objective.hessian(xs, basis, &movable)? else {
                return Ok(None);
            };
            let total = g.len();
            for (bi, x) in xs
                .iter()
                .zip(&self.frozen)
                .filter(|(_, z)| !**z)
                .map(|(x, _)| x)
                .enumerate()
            {
                let barrier = kernel_gram(&eig_hermitian(x)?, basis, |a, b| mu / (a * b));
                for j in 0..nb {
                    for l in 0..nb {
                        hess[(bi * nb + j) * total + bi * nb + l] += barrier[j * nb + l];
                    }
                }
            }
            let neg: Vec<f64> = g.iter().map(|v| -v).collect();
            let Some(dir) = solve_spd(&hess, total, &neg) else {
                break;
            };
            let slope = dot(&g, &dir);
            if slope >= 0.0 {
                break;
            }
            // below value resolution Armijo is noise; demand a smaller
            // residual instead
            let resolved = -slope > VALUE_RESOLUTION * phi.abs().max(1.0);
            let mut alpha = 1.0;
            let mut accepted = None;
            for _ in 0..QN_BACKTRACKS {
                let trial = self.displace(xs, bases, &dir, alpha);
                if let Some(v) = self.barrier_value(&trial, mu)? {
                    if resolved {
                        if v <= phi + ARMIJO * alpha * slope {
                            accepted = Some((trial, v, None));
                            break;
                        }
                    } else {
                        let g_trial = self.barrier_gradient(&trial, bases, mu)?;
                        if norm(&g_trial) < norm(&g) {
                            accepted = Some((trial, v, Some(g_trial)));
                            break;
                        }
                    }
                }
                alpha *= 0.5;
            }
            let Some((trial, v, g_trial)) = accepted else {
                break;
            };
            st.iterations += 1;
            steps += 1;
            *xs = trial;
            phi = v;
            g = match g_trial {
                Some(g) => g,
                None => self.barrier_gradient(xs, bases, mu)?,
            };
            if steps >= NEWTON_STAGE_STEPS {
                break;
            }
        }
        Ok(Some(norm(&g)))
    }

    /// BFGS on one barrier subproblem; returns the final residual norm.
    fn bfgs_stage(
        &self,
        xs: &mut Vec<ComplexMatrix>,
        bases: &[Vec<ComplexMatrix>],
        mu: f64,
        tol: f64,
        st: &mut Progress,
        cfg: &OptimizerConfig,
    ) -> Result<f64> {
        let dim: usize = bases.iter().map(Vec::len).sum();
        let mut inv_hess: Option<Vec<f64>> = None;
        let mut phi = self
            .barrier_value(xs, mu)?
            .ok_or_else(|| Error::numerical("barrier start left the PSD interior", 0.0))?;
        let mut g = self.barrier_gradient(xs, bases, mu)?;

        while norm(&g) > tol && st.iterations < cfg.max_iters {
            let mut dir: Vec<f64> = match &inv_hess {
                Some(h) => (0..dim).map(|i| -dot(&h[i * dim..(i + 1) * dim], &g)).collect(),
                None => g.iter().map(|v| -v).collect(),
            };
            let mut slope = dot(&g, &dir);
            if slope >= 0.0 {
                inv_hess = None;
                dir = g.iter().map(|v| -v).collect();
                slope = -dot(&g, &g);
            }
            let mut alpha = if inv_hess.is_some() {
                1.0
            } else {
                (cfg.step_init / norm(&dir)).min(1.0)
            };

            let mut accepted = None;
            for _ in 0..QN_BACKTRACKS {
                let trial = self.displace(xs, bases, &dir, alpha);
                if let Some(v) = self.barrier_value(&trial, mu)? {
                    if v <= phi + ARMIJO * alpha * slope {
                        accepted = Some((trial, v));
                        break;
                    }
                }
                alpha *= 0.5;
            }
            let Some((trial, v)) = accepted else {
                break;
            };
            st.iterations += 1;

            let g_new = self.barrier_gradient(&trial, bases, mu)?;
            let step: Vec<f64> = dir.iter().map(|d| alpha * d).collect();
            let diff: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
            let sy = dot(&step, &diff);
            if sy > 1e-14 * norm(&step) * norm(&diff) {
                let h = inv_hess.get_or_insert_with(|| {
                    let gamma = sy / dot(&diff, &diff);
                    let mut id = vec![0.0; dim * dim];
                    for i in 0..dim {
                        id[i * dim + i] = gamma;
                    }
                    id
                });
                bfgs_update(h, dim, &step, &diff, sy);
            }
            *xs = trial;
            phi = v;
            g = g_new;
        }
        Ok(norm(&g))
    }

    /// Spectral projected gradient with a nonmonotone Armijo search.
    fn projected_gradient(&self, xs: &mut Vec<ComplexMatrix>, st: &mut Progress, cfg: &OptimizerConfig) -> Result<()> {
        let mut history: Vec<f64> = vec![st.f];
        let mut prev: Option<(Vec<ComplexMatrix>, Vec<ComplexMatrix>)> = None;
        while !st.converged && st.iterations < cfg.max_iters {
            st.iterations += 1;
            let grad = self.objective.gradient(xs)?;
            let tangent: Vec<ComplexMatrix> = grad
                .iter()
                .zip(&self.constraints)
                .zip(&self.frozen)
                .map(|((g, c), &frozen)| {
                    if frozen {
                        ComplexMatrix::zeros(g.rows(), g.cols())
                    } else {
                        c.project_tangent(g)
                    }
                })
                .collect();

            // Barzilai–Borwein trial step from the last displacement
            let mut s = match &prev {
                Some((px, pg)) => {
                    let sy: f64 = xs
                        .iter()
                        .zip(px)
                        .zip(tangent.iter().zip(pg))
                        .map(|((x, a), (g, b))| (x - a).re_inner(&(g - b)))
                        .sum();
                    let ss = Self::sq_dist(xs, px);
                    if sy > 0.0 {
                        (ss / sy).clamp(1e-10, 1e6)
                    } else {
                        cfg.step_init
                    }
                }
                None => cfg.step_init,
            };
            let reference = history
                .iter()
                .rev()
                .take(STALL_WINDOW)
                .cloned()
                .fold(f64::NEG_INFINITY, f64::max);
            let accepted = loop {
                if s < MIN_STEP {
                    break None;
                }
                match self.trial_point(xs, &tangent, s, cfg) {
                    Ok(trial) => {
                        let f_trial = self.objective.value(&trial)?;
                        let decrease: f64 = grad
                            .iter()
                            .zip(xs.iter().zip(&trial))
                            .map(|(g, (x, t))| g.re_inner(&(x - t)))
                            .sum();
                        if f_trial <= reference - ARMIJO * decrease {
                            break Some((trial, f_trial));
                        }
                    }
                    Err(Error::NumericalFailure { .. }) => {}
                    Err(e) => return Err(e),
                }
                s *= cfg.step_shrink;
            };

            let Some((trial, f_trial)) = accepted else {
                // no descent step exists at floating-point resolution
                let probe = cfg.step_init * 1e-6;
                if let Ok(t) = self.trial_point(xs, &tangent, probe, cfg) {
                    st.pg_norm = Self::sq_dist(xs, &t).sqrt() / probe;
                }
                st.converged = st.pg_norm <= PG_TOL;
                break;
            };
            st.pg_norm = Self::sq_dist(xs, &trial).sqrt() / s;
            let change = st.f - f_trial;
            prev = Some((std::mem::replace(xs, trial), tangent));
            st.f = f_trial;
            history.push(st.f);

            if st.pg_norm <= PG_TOL {
                st.converged = true;
                break;
            }
            if change.abs() < cfg.convergence_tol {
                st.stall += 1;
                if st.stall >= STALL_WINDOW {
                    break;
                }
            } else {
                st.stall = 0;
            }
        }
        Ok(())
    }

    fn trial_point(
        &self,
        xs: &[ComplexMatrix],
        tangent: &[ComplexMatrix],
        s: f64,
        cfg: &OptimizerConfig,
    ) -> Result<Vec<ComplexMatrix>> {
        xs.iter()
            .zip(tangent)
            .zip(&self.constraints)
            .zip(&self.frozen)
            .map(|(((x, g), c), &frozen)| {
                if frozen {
                    return Ok(x.clone());
                }
                let mut y = x.clone();
                y.add_scaled(-s, g);
                // g is tangent, so only PSD can be violated; re-projecting
                // onto the affine set just removes rounding drift
                let y = c.project_affine(&y);
                if eig_hermitian(&y)?.min_value() >= 0.0 {
                    Ok(y)
                } else {
                    Ok(c.project(&y, cfg.dykstra_iters)?.0)
                }
            })
            .collect()
    }

    /// Runs every restart and returns all outcomes in restart order.
    pub fn solve(&self, base: &[ComplexMatrix], cfg: &OptimizerConfig) -> Result<Vec<RestartOutcome>> {
        map_indexed(cfg.restarts, cfg.execution, |r| self.run(base, r, cfg))
            .into_iter()
            .collect()
    }
}

/// Index of the lowest objective; ties go to the earlier restart.
pub(crate) fn best_index(outcomes: &[RestartOutcome]) -> usize {
    let mut best = 0;
    for (i, o) in outcomes.iter().enumerate().skip(1) {
        if o.objective < outcomes[best].objective {
            best = i;
        }
    }
    best
}

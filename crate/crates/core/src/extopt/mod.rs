//! The extension-gap quantumness measures.
//!
//! For an ensemble `{p_i, ρ_i}` and `n ≥ 2`, [`chi_q`] minimizes the Holevo
//! quantity of `{p_i, X_i}` over n-party states `X_i` whose every single-site
//! marginal is `ρ_i`, and reports the minimum minus the one-copy Holevo
//! quantity. The objective is jointly convex in the tuple `(X_i)` and the
//! feasible set is an affine slice of the PSD cone.
//!
//! Optimal extensions typically lie on a face of the cone (for qubit pairs,
//! they avoid the antisymmetric subspace), where the entropy is not
//! differentiable. Small problems therefore follow a log-det barrier path
//! whose dual yields a certified bound on `objective − optimum`; projected
//! gradient descent covers the rest. A run is `converged` when either the
//! certified gap or the gradient-mapping norm falls below `1e-6`. Values are
//! upper bounds on the infimum either way.

mod descent;
mod extension;
mod fidelity_sdp;
mod objective;
mod project;

use serde::{Deserialize, Serialize};

use crate::densmat::{
    entropy_of_matrix, fidelity_with, tensor_power, von_neumann_entropy, ComplexMatrix, DensityMatrix,
    FidelityConvention,
};
use crate::ensemble::{holevo, shannon_entropy, Ensemble};
use crate::error::{Error, Result};
use crate::par::Execution;

use descent::{best_index, classical_copy, Problem};
use objective::{HolevoObjective, NegFidelityObjective, Objective};
use project::MarginalConstraint;

pub use extension::{ExtensionSet, FEASIBILITY_TOL};

/// Largest extension dimension `d^n` accepted by the optimizers.
pub const MAX_EXTENSION_DIM: usize = 64;

/// Agreement required between the pure-state closed form and the numeric path.
pub const PURE_CROSS_CHECK_TOL: f64 = 5e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    pub max_iters: usize,
    pub step_init: f64,
    pub step_shrink: f64,
    /// Objective change (bits) below which an iteration counts as stalled.
    pub convergence_tol: f64,
    pub dykstra_iters: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Multi-start count for the POVM search in [`crate::accinfo`].
    pub povm_restarts: usize,
    pub execution: Execution,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            max_iters: 2000,
            step_init: 0.5,
            step_shrink: 0.5,
            convergence_tol: 1e-9,
            dykstra_iters: 500,
            restarts: 8,
            seed: 42,
            povm_restarts: 32,
            execution: Execution::default(),
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = self.max_iters > 0
            && self.step_init > 0.0
            && self.step_shrink > 0.0
            && self.step_shrink < 1.0
            && self.convergence_tol > 0.0
            && self.dykstra_iters > 0
            && self.restarts > 0
            && self.povm_restarts > 0;
        if positive {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "optimizer settings must be positive (step_shrink in (0, 1)): {self:?}"
            )))
        }
    }
}

/// Outcome of an extension optimization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantumnessReport {
    /// `objective − baseline`, reported raw (never clamped).
    pub value: f64,
    /// Best objective over restarts.
    #[serde(rename = "objective")]
    pub objective_at_optimum: f64,
    /// The same monotone on the one-copy ensemble.
    pub baseline: f64,
    pub feasibility_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Gradient-mapping norm of the best restart at termination.
    pub projected_gradient_norm: f64,
    /// Certified bound on `objective − optimum` from the barrier dual, when
    /// one was computed.
    pub optimality_gap: Option<f64>,
    /// `objective − baseline` per restart, in restart order.
    pub restarts: Vec<f64>,
}

fn check_size(d: usize, n: usize) -> Result<usize> {
    if n < 2 {
        return Err(Error::invalid(format!("copy count must be at least 2, got {n}")));
    }
    let big = (d as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if big > MAX_EXTENSION_DIM as u128 {
        return Err(Error::ResourceLimit(format!(
            "extension dimension {d}^{n} exceeds {MAX_EXTENSION_DIM}"
        )));
    }
    Ok(big as usize)
}

fn build_problem<'a>(
    objective: &'a dyn Objective,
    targets: &[&DensityMatrix],
    n: usize,
    movable: &[bool],
) -> Result<(Problem<'a>, Vec<ComplexMatrix>)> {
    let mut constraints = Vec::with_capacity(targets.len());
    let mut frozen = Vec::with_capacity(targets.len());
    let mut base = Vec::with_capacity(targets.len());
    for (t, &can_move) in targets.iter().zip(movable) {
        constraints.push(MarginalConstraint::new(t, n)?);
        frozen.push(!can_move || t.is_pure()?);
        base.push(classical_copy(t, n)?);
    }
    Ok((
        Problem {
            objective,
            constraints,
            frozen,
        },
        base,
    ))
}

fn assemble(outcomes: Vec<descent::RestartOutcome>, baseline: f64) -> QuantumnessReport {
    let best = best_index(&outcomes);
    let b = &outcomes[best];
    // every restart's dual bound is valid for the shared optimum
    let lower = outcomes
        .iter()
        .map(|o| o.objective - o.gap)
        .fold(f64::NEG_INFINITY, f64::max);
    let gap = (lower > f64::NEG_INFINITY).then(|| (b.objective - lower).max(0.0));
    QuantumnessReport {
        value: b.objective - baseline,
        objective_at_optimum: b.objective,
        baseline,
        feasibility_residual: b.residual,
        iterations: b.iterations,
        converged: b.converged || gap.is_some_and(|g| g <= descent::GAP_TOL),
        projected_gradient_norm: b.pg_norm,
        optimality_gap: gap,
        restarts: outcomes.iter().map(|o| o.objective - baseline).collect(),
    }
}

/// Optimized extensions alongside the report.
#[derive(Clone, Debug)]
pub struct ChiQSolution {
    pub report: QuantumnessReport,
    pub extensions: ExtensionSet,
}

/// n-copy Holevo gap `χ_q^{(n)}`.
pub fn chi_q(e: &Ensemble, n: usize, cfg: &OptimizerConfig) -> Result<QuantumnessReport> {
    Ok(chi_q_solution(e, n, cfg)?.report)
}

/// [`chi_q`] that also returns the optimal extensions.
pub fn chi_q_solution(e: &Ensemble, n: usize, cfg: &OptimizerConfig) -> Result<ChiQSolution> {
    cfg.validate()?;
    check_size(e.dim(), n)?;
    let probs = e.probabilities();
    let objective = HolevoObjective { probs: probs.clone() };
    let targets = e.states();
    // zero-weight members never influence χ
    let movable: Vec<bool> = probs.iter().map(|&p| p > 0.0).collect();
    let (problem, base) = build_problem(&objective, &targets, n, &movable)?;
    let baseline = holevo(e)?;
    let outcomes = problem.solve(&base, cfg)?;
    let best = best_index(&outcomes);
    let extensions = ExtensionSet::new(
        n,
        outcomes[best]
            .xs
            .iter()
            .cloned()
            .map(DensityMatrix::from_trusted)
            .collect(),
        targets.into_iter().cloned().collect(),
    )
    .map_err(|err| {
        Error::numerical(
            format!("optimizer left the feasible set: {err}"),
            outcomes[best].residual,
        )
    })?;
    let mut report = assemble(outcomes, baseline);

    if e.is_pure()? {
        let closed = pure_closed_form(e, n)?;
        let gap = (closed - report.value).abs();
        if gap > PURE_CROSS_CHECK_TOL {
            return Err(Error::numerical(
                format!(
                    "pure-state closed form {closed} disagrees with optimizer {}",
                    report.value
                ),
                gap,
            ));
        }
        report.value = closed;
        report.objective_at_optimum = closed + baseline;
    }
    Ok(ChiQSolution { report, extensions })
}

/// `S(Σ p_i ρ_i^{⊗n}) − S(ρ̄)`: for pure members the only extension is the
/// product state.
pub fn pure_closed_form(e: &Ensemble, n: usize) -> Result<f64> {
    check_size(e.dim(), n)?;
    let big = e.dim().pow(n as u32);
    let mut avg = ComplexMatrix::zeros(big, big);
    for m in e.members() {
        avg.add_scaled(m.p, &tensor_power(m.state.matrix(), n));
    }
    Ok(entropy_of_matrix(&avg)? - von_neumann_entropy(&e.average())?)
}

/// Fidelity gap `F(ρ,σ) − sup F(ρ_ext, σ_ext)` in the squared convention.
pub fn fidelity_q(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    n: usize,
    cfg: &OptimizerConfig,
) -> Result<QuantumnessReport> {
    fidelity_q_with(rho, sigma, n, cfg, FidelityConvention::Squared)
}

/// [`fidelity_q`] for either fidelity convention. The report's objective and
/// baseline are `1 − F` of the extensions and of the pair.
pub fn fidelity_q_with(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    n: usize,
    cfg: &OptimizerConfig,
    convention: FidelityConvention,
) -> Result<QuantumnessReport> {
    cfg.validate()?;
    if rho.dim() != sigma.dim() {
        return Err(Error::invalid("fidelity gap of states with different dimensions"));
    }
    check_size(rho.dim(), n)?;
    let baseline = 1.0 - fidelity_with(rho, sigma, convention)?;
    if fidelity_sdp::variable_count(rho, sigma, n)? <= fidelity_sdp::SDP_MAX_VARS {
        // a certified solve has nothing to gain from restarts
        let sdp = fidelity_sdp::max_root_fidelity(rho, sigma, n, cfg.max_iters)?;
        let objective = 1.0 - convention.from_root(sdp.root);
        let gap = convention.from_root((sdp.root + sdp.root_gap).min(1.0)) - convention.from_root(sdp.root);
        let residual = MarginalConstraint::new(rho, n)?
            .residual(&sdp.x)
            .max(MarginalConstraint::new(sigma, n)?.residual(&sdp.y));
        let outcome = descent::RestartOutcome {
            objective,
            xs: vec![sdp.x, sdp.y],
            iterations: sdp.iterations,
            converged: false,
            pg_norm: sdp.residual,
            gap,
            residual,
        };
        return Ok(assemble(vec![outcome], baseline));
    }
    let objective = NegFidelityObjective { convention };
    let (problem, base) = build_problem(&objective, &[rho, sigma], n, &[true, true])?;
    let outcomes = problem.solve(&base, cfg)?;
    // minimizing −F; shift to 1 − F
    let shifted = outcomes
        .into_iter()
        .map(|mut o| {
            o.objective += 1.0;
            o
        })
        .collect();
    Ok(assemble(shifted, baseline))
}

/// `H({p_i}) − S(ρ̄)`, the infinite-copy Holevo gap of a pure ensemble.
pub fn chi_q_infinite_pure(e: &Ensemble) -> Result<f64> {
    if !e.is_pure()? {
        return Err(Error::precondition("infinite-copy closed form needs pure members"));
    }
    Ok(shannon_entropy(&e.probabilities())? - von_neumann_entropy(&e.average())?)
}

/// Projects a Hermitian matrix on `d^n` onto
/// `{X ⪰ 0 : Tr X = 1, every single-site marginal = target}`.
pub fn project_feasible(
    x: &ComplexMatrix,
    target: &DensityMatrix,
    n: usize,
    cfg: &OptimizerConfig,
) -> Result<DensityMatrix> {
    let big = check_size(target.dim(), n)?;
    if !x.is_square() || x.rows() != big {
        return Err(Error::invalid(format!(
            "expected a {big}x{big} matrix, got {}x{}",
            x.rows(),
            x.cols()
        )));
    }
    if !x.is_hermitian(crate::densmat::HERMITIAN_TOL) {
        return Err(Error::invalid("projection input must be Hermitian"));
    }
    let c = MarginalConstraint::new(target, n)?;
    let (p, _) = c.project(x, cfg.dykstra_iters)?;
    Ok(DensityMatrix::from_trusted(p))
}

/// Holevo quantity of a tuple of extension matrices with priors `probs`.
pub fn extension_holevo(probs: &[f64], xs: &[ComplexMatrix]) -> Result<f64> {
    HolevoObjective { probs: probs.to_vec() }.value(xs)
}

/// Gradient of [`extension_holevo`] restricted to the tangent space of the
/// marginal constraints `targets`.
pub fn extension_holevo_gradient(
    probs: &[f64],
    xs: &[ComplexMatrix],
    targets: &[DensityMatrix],
    n: usize,
) -> Result<Vec<ComplexMatrix>> {
    let raw = HolevoObjective { probs: probs.to_vec() }.gradient(xs)?;
    raw.iter()
        .zip(targets)
        .map(|(g, t)| Ok(MarginalConstraint::new(t, n)?.project_tangent(g)))
        .collect()
}

/// Orthogonal projection of `h` onto the directions that keep every
/// single-site marginal and the trace fixed.
pub fn tangent_projection(h: &ComplexMatrix, local_dim: usize, n: usize) -> Result<ComplexMatrix> {
    let c = MarginalConstraint::new(&DensityMatrix::maximally_mixed(local_dim), n)?;
    if h.rows() != c.total_dim() || !h.is_square() {
        return Err(Error::invalid("tangent projection dimension mismatch"));
    }
    Ok(c.project_tangent(h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densmat::{random, Complex64};
    use crate::ensemble::classical_broadcast;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn plus() -> DensityMatrix {
        let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
        DensityMatrix::pure(&[s, s]).unwrap()
    }

    fn h2(p: f64) -> f64 {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }

    fn quick() -> OptimizerConfig {
        OptimizerConfig {
            restarts: 2,
            ..OptimizerConfig::default()
        }
    }

    #[test]
    fn config_validation() {
        assert!(OptimizerConfig::default().validate().is_ok());
        let bad = OptimizerConfig {
            step_shrink: 1.5,
            ..OptimizerConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = OptimizerConfig {
            restarts: 0,
            ..OptimizerConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn commuting_pair_has_zero_gap() {
        let e = Ensemble::uniform(vec![
            DensityMatrix::diagonal(&[0.3, 0.7]).unwrap(),
            DensityMatrix::diagonal(&[0.6, 0.4]).unwrap(),
        ])
        .unwrap();
        let r = chi_q(&e, 2, &quick()).unwrap();
        assert!(r.value <= 1e-6 && r.value >= -1e-6, "{r:?}");
    }

    #[test]
    fn zero_plus_matches_gram_spectrum() {
        let e = Ensemble::uniform(vec![DensityMatrix::basis(2, 0), plus()]).unwrap();
        // product-state Gram overlap c = |⟨00|++⟩| = 1/2: eigenvalues (1 ± c)/2
        let expected = h2(0.25) - h2((1.0 + FRAC_1_SQRT_2) / 2.0);
        let r = chi_q(&e, 2, &quick()).unwrap();
        assert!((r.value - expected).abs() < 1e-9);
        assert!((r.value - 0.2104).abs() < 5e-3);
    }

    #[test]
    fn single_member_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let e = Ensemble::uniform(vec![random::density(&mut rng, 2)]).unwrap();
        for n in [2, 3] {
            let r = chi_q(&e, n, &quick()).unwrap();
            assert!(r.value.abs() <= 1e-9, "n={n} {r:?}");
        }
    }

    #[test]
    fn size_limits() {
        let e = Ensemble::uniform(vec![DensityMatrix::basis(2, 0)]).unwrap();
        assert!(matches!(chi_q(&e, 7, &quick()), Err(Error::ResourceLimit(_))));
        assert!(matches!(chi_q(&e, 1, &quick()), Err(Error::InvalidInput(_))));
        let q = Ensemble::uniform(vec![DensityMatrix::basis(3, 0)]).unwrap();
        assert!(matches!(chi_q(&q, 4, &quick()), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn infinite_copy_pure_limit() {
        let orth = Ensemble::uniform(vec![DensityMatrix::basis(2, 0), DensityMatrix::basis(2, 1)]).unwrap();
        assert!(chi_q_infinite_pure(&orth).unwrap().abs() < 1e-12);
        let e = Ensemble::uniform(vec![DensityMatrix::basis(2, 0), plus()]).unwrap();
        let v = chi_q_infinite_pure(&e).unwrap();
        assert!((v - (1.0 - h2((1.0 + FRAC_1_SQRT_2) / 2.0))).abs() < 1e-12);
        assert!((v - 0.3991).abs() < 1e-3);
        let one = Ensemble::uniform(vec![plus()]).unwrap();
        assert!(chi_q_infinite_pure(&one).unwrap().abs() < 1e-12);
        let mixed = Ensemble::uniform(vec![DensityMatrix::maximally_mixed(2)]).unwrap();
        assert!(matches!(
            chi_q_infinite_pure(&mixed),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn projection_examples() {
        let cfg = OptimizerConfig::default();
        let target = DensityMatrix::diagonal(&[0.3, 0.7]).unwrap();
        let e = Ensemble::uniform(vec![target.clone()]).unwrap();
        let copy = classical_broadcast(&e, 2).unwrap().extensions()[0].clone();
        let p = project_feasible(copy.matrix(), &target, 2, &cfg).unwrap();
        assert!(p.matrix().max_abs_diff(copy.matrix()) <= 1e-9);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = random::hermitian(&mut rng, 4);
        let half = DensityMatrix::maximally_mixed(2);
        let p = project_feasible(&x, &half, 2, &cfg).unwrap();
        let set = ExtensionSet::new(2, vec![p.clone()], vec![half.clone()]).unwrap();
        assert!(set.marginal_residual().unwrap() <= 1e-7);
        assert!(p.eigen().unwrap().min_value() >= -1e-10);
        // idempotence on the projected point
        let again = project_feasible(p.matrix(), &half, 2, &cfg).unwrap();
        assert!(again.matrix().max_abs_diff(p.matrix()) <= 1e-9);
    }

    #[test]
    fn fidelity_gap_examples() {
        let cfg = quick();
        let rho = DensityMatrix::diagonal(&[0.3, 0.7]).unwrap();
        let r = fidelity_q(&rho, &rho, 2, &cfg).unwrap();
        assert!(r.value.abs() <= 1e-6, "{r:?}");
        let sigma = DensityMatrix::diagonal(&[0.6, 0.4]).unwrap();
        let r = fidelity_q(&rho, &sigma, 2, &cfg).unwrap();
        assert!(r.value.abs() <= 1e-6, "{r:?}");
        let r = fidelity_q(&DensityMatrix::basis(2, 0), &plus(), 2, &cfg).unwrap();
        assert!((r.value - 0.25).abs() <= 5e-3, "{r:?}");
        let r = fidelity_q_with(&DensityMatrix::basis(2, 0), &plus(), 2, &cfg, FidelityConvention::Root).unwrap();
        assert!((r.value - (FRAC_1_SQRT_2 - 0.5)).abs() <= 5e-3, "{r:?}");
    }

    #[test]
    fn report_json_field_names() {
        let e = Ensemble::uniform(vec![DensityMatrix::basis(2, 0), plus()]).unwrap();
        let r = chi_q(&e, 2, &quick()).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        for key in [
            "value",
            "baseline",
            "objective",
            "feasibility_residual",
            "converged",
            "restarts",
        ] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        let back: QuantumnessReport = serde_json::from_value(v).unwrap();
        assert_eq!(back, r);
    }
}

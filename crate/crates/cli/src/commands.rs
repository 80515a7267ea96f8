//! One handler per subcommand; each returns the JSON value to emit.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use ensembleq_core::accinfo::{accessible_information, pure_limit_identities};
use ensembleq_core::densmat::{DensityMatrix, FidelityConvention};
use ensembleq_core::ensemble::{holevo, Ensemble};
use ensembleq_core::extopt::{chi_q, fidelity_q_with, OptimizerConfig};
use ensembleq_core::recovery::{au_feasible, entangled_example, petz_map, Channel};

use crate::failure::Failure;
use crate::output::to_value;

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

pub fn load_ensemble(path: &Path) -> Result<Ensemble, Failure> {
    read_json(path)
}

pub fn holevo_cmd(e: &Ensemble) -> Result<Value, Failure> {
    Ok(json!({ "value": to_value(&holevo(e)?)? }))
}

pub fn chi_q_cmd(e: &Ensemble, n: usize, cfg: &OptimizerConfig) -> Result<Value, Failure> {
    to_value(&chi_q(e, n, cfg)?)
}

fn pair(e: &Ensemble) -> Result<(&DensityMatrix, &DensityMatrix), Failure> {
    match e.members() {
        [a, b] => Ok((&a.state, &b.state)),
        m => Err(Failure::Input(format!("expected exactly two states, got {}", m.len()))),
    }
}

pub fn fidelity_q_cmd(
    e: &Ensemble,
    n: usize,
    cfg: &OptimizerConfig,
    conv: FidelityConvention,
) -> Result<Value, Failure> {
    let (a, b) = pair(e)?;
    to_value(&fidelity_q_with(a, b, n, cfg, conv)?)
}

pub fn acc_info_cmd(e: &Ensemble, cfg: &OptimizerConfig) -> Result<Value, Failure> {
    to_value(&accessible_information(e, cfg)?)
}

pub fn fuchs_cmd(e: &Ensemble, cfg: &OptimizerConfig) -> Result<Value, Failure> {
    let rep = accessible_information(e, cfg)?;
    to_value(&json!({
        "value": rep.holevo_gap,
        "holevo": rep.holevo_gap + rep.value,
        "accessible_information": rep.value,
    }))
}

pub fn pure_limits_cmd(e: &Ensemble, cfg: &OptimizerConfig) -> Result<Value, Failure> {
    to_value(&pure_limit_identities(e, cfg)?)
}

#[derive(Serialize)]
struct PetzCheck {
    input_dim: usize,
    output_dim: usize,
    /// Largest entry of `Γ(Λ(ρ_ref)) − ρ_ref`.
    recovery_error: f64,
    /// The same error for each member of an optional ensemble.
    member_errors: Vec<f64>,
    petz_map: Channel,
}

pub fn petz_check_cmd(reference: &Path, channel: &Path, members: Option<&Path>) -> Result<Value, Failure> {
    let reference: DensityMatrix = read_json(reference)?;
    let ch: Channel = read_json(channel)?;
    let petz = petz_map(&reference, &ch)?;
    let error_of = |s: &DensityMatrix| -> Result<f64, Failure> {
        Ok(petz.apply(&ch.apply(s)?)?.matrix().max_abs_diff(s.matrix()))
    };
    let member_errors = match members {
        Some(p) => load_ensemble(p)?
            .members()
            .iter()
            .map(|m| error_of(&m.state))
            .collect::<Result<_, _>>()?,
        None => Vec::new(),
    };
    to_value(&PetzCheck {
        input_dim: ch.input_dim(),
        output_dim: ch.output_dim(),
        recovery_error: error_of(&reference)?,
        member_errors,
        petz_map: petz,
    })
}

#[derive(Deserialize)]
struct AuStates {
    rho1: DensityMatrix,
    rho2: DensityMatrix,
    sigma1: DensityMatrix,
    sigma2: DensityMatrix,
}

pub fn au_check_cmd(example: Option<f64>, states: Option<&Path>, grid: usize) -> Result<Value, Failure> {
    let s = match (example, states) {
        (Some(a), None) => {
            let ex = entangled_example(a)?;
            AuStates {
                rho1: ex.rho1_b,
                rho2: ex.rho2_b,
                sigma1: ex.rho1_a,
                sigma2: ex.rho2_a,
            }
        }
        (None, Some(p)) => read_json(p)?,
        _ => return Err(Failure::Input("give exactly one of --example or --states".into())),
    };
    to_value(&au_feasible(&s.rho1, &s.rho2, &s.sigma1, &s.sigma2, grid)?)
}

pub struct SweepGrid {
    pub a_min: f64,
    pub a_max: f64,
    pub steps: usize,
    pub au_grid: usize,
}

impl SweepGrid {
    fn points(&self) -> Result<Vec<f64>, Failure> {
        let ok = (0.0..=0.5).contains(&self.a_min) && (0.0..=0.5).contains(&self.a_max) && self.a_min <= self.a_max;
        if !ok {
            return Err(Failure::Input(format!(
                "sweep bounds [{}, {}] must be ordered and lie in [0, 0.5]",
                self.a_min, self.a_max
            )));
        }
        if self.steps == 0 || (self.steps == 1 && self.a_min != self.a_max) {
            return Err(Failure::Input(
                "a sweep over an interval needs at least two points".into(),
            ));
        }
        if self.steps == 1 {
            return Ok(vec![self.a_min]);
        }
        let width = self.a_max - self.a_min;
        Ok((0..self.steps)
            .map(|k| {
                if k + 1 == self.steps {
                    self.a_max
                } else {
                    self.a_min + width * k as f64 / (self.steps - 1) as f64
                }
            })
            .collect())
    }
}

#[derive(Serialize)]
struct SweepRow {
    a: f64,
    commutator_norm: f64,
    au_min_margin: f64,
    au_feasible: bool,
    chi_q_n2: f64,
    fidelity_q_n2: f64,
}

pub fn sweep_cmd(grid: &SweepGrid, cfg: &OptimizerConfig, conv: FidelityConvention) -> Result<Value, Failure> {
    let rows = grid
        .points()?
        .into_iter()
        .map(|a| {
            let ex = entangled_example(a)?;
            let au = au_feasible(&ex.rho1_b, &ex.rho2_b, &ex.rho1_a, &ex.rho2_a, grid.au_grid)?;
            let e = Ensemble::uniform(vec![ex.rho1_a.clone(), ex.rho2_a.clone()])?;
            Ok(SweepRow {
                a,
                commutator_norm: ex.rho1_a.matrix().commutator(ex.rho2_a.matrix()).frobenius_norm(),
                au_min_margin: au.min_margin,
                au_feasible: au.feasible,
                chi_q_n2: chi_q(&e, 2, cfg)?.value,
                fidelity_q_n2: fidelity_q_with(&ex.rho1_a, &ex.rho2_a, 2, cfg, conv)?.value,
            })
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    to_value(&rows)
}

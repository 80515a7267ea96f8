//! Pairwise qubit transformation feasibility via trace-norm margins, and
//! the two-state example whose reduced states fail it.

use serde::{Deserialize, Serialize};

use crate::densmat::{trace_norm, Complex64, ComplexMatrix, DensityMatrix};
use crate::error::{Error, Result};

pub const DEFAULT_AU_GRID: usize = 1001;
pub const MIN_AU_GRID: usize = 101;
/// Margins at or above this count as satisfied.
pub const AU_TOL: f64 = -1e-8;
/// Large finite ratio probing the `t → ∞` end of the grid.
pub const AU_FAR_PROBE: f64 = 1e6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuReport {
    pub feasible: bool,
    /// Minimum over probed `t ≥ 0` of `‖ρ₁ − tρ₂‖₁ − ‖σ₁ − tσ₂‖₁`.
    pub min_margin: f64,
    pub argmin_t: f64,
    pub grid_size: usize,
}

fn margin(
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    sigma1: &DensityMatrix,
    sigma2: &DensityMatrix,
    t: f64,
) -> Result<f64> {
    let mut left = rho1.matrix().clone();
    left.add_scaled(-t, rho2.matrix());
    let mut right = sigma1.matrix().clone();
    right.add_scaled(-t, sigma2.matrix());
    Ok(trace_norm(&left)? - trace_norm(&right)?)
}

/// Whether some channel maps `ρ₁ ↦ σ₁` and `ρ₂ ↦ σ₂` (qubits only): every
/// margin `‖ρ₁ − tρ₂‖₁ − ‖σ₁ − tσ₂‖₁` over `t ≥ 0` must be nonnegative.
///
/// `t = s/(1 − s)` for `s = k/grid`, `k = 0..grid`, plus a far probe at
/// `t = 10⁶`. At that point the leading terms `t‖ρ₂‖₁` and `t‖σ₂‖₁` cancel
/// for states, so the probe's margin is the next-order comparison.
pub fn au_feasible(
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    sigma1: &DensityMatrix,
    sigma2: &DensityMatrix,
    grid: usize,
) -> Result<AuReport> {
    for (name, s) in [("rho1", rho1), ("rho2", rho2), ("sigma1", sigma1), ("sigma2", sigma2)] {
        if s.dim() != 2 {
            return Err(Error::invalid(format!(
                "the trace-norm criterion is only valid for qubits; {name} has dimension {}",
                s.dim()
            )));
        }
    }
    if grid < MIN_AU_GRID {
        return Err(Error::invalid(format!(
            "grid size {grid} below the minimum {MIN_AU_GRID}"
        )));
    }
    let ts = (0..grid)
        .map(|k| {
            let s = k as f64 / grid as f64;
            s / (1.0 - s)
        })
        .chain(std::iter::once(AU_FAR_PROBE));
    let mut min_margin = f64::INFINITY;
    let mut argmin_t = 0.0;
    for t in ts {
        let m = margin(rho1, rho2, sigma1, sigma2, t)?;
        if m < min_margin {
            min_margin = m;
            argmin_t = t;
        }
    }
    Ok(AuReport {
        feasible: min_margin >= AU_TOL,
        min_margin,
        argmin_t,
        grid_size: grid,
    })
}

/// A product state and a one-parameter entangled state together with their
/// reduced states.
#[derive(Clone, Debug)]
pub struct EntangledExample {
    /// `|00⟩`.
    pub psi1: DensityMatrix,
    /// `√a|11⟩ + √a|10⟩ + √(1−2a)|01⟩`.
    pub psi2: DensityMatrix,
    pub rho1_a: DensityMatrix,
    pub rho1_b: DensityMatrix,
    /// `[[1−2a, √(a(1−2a))], [√(a(1−2a)), 2a]]`.
    pub rho2_a: DensityMatrix,
    /// `[[1−a, a], [a, a]]`, the published closed form.
    pub rho2_b: DensityMatrix,
    /// The B marginal actually obtained from `psi2`, `[[a, a], [a, 1−a]]`;
    /// it equals `rho2_b` conjugated by Pauli X.
    pub rho2_b_traced: DensityMatrix,
}

pub fn entangled_example(a: f64) -> Result<EntangledExample> {
    if !(0.0..=0.5).contains(&a) {
        return Err(Error::invalid(format!("parameter a = {a} outside [0, 1/2]")));
    }
    let r = |x: f64| Complex64::new(x, 0.0);
    let ket1 = [r(1.0), r(0.0), r(0.0), r(0.0)];
    // basis order |00⟩, |01⟩, |10⟩, |11⟩ with A first
    let ket2 = [r(0.0), r((1.0 - 2.0 * a).sqrt()), r(a.sqrt()), r(a.sqrt())];
    let psi1 = DensityMatrix::pure(&ket1)?;
    let psi2 = DensityMatrix::pure(&ket2)?;
    let c = (a * (1.0 - 2.0 * a)).sqrt();
    let qubit = |rows: [[f64; 2]; 2]| DensityMatrix::new(ComplexMatrix::from_real_rows(&[&rows[0], &rows[1]]));
    Ok(EntangledExample {
        psi1,
        psi2,
        rho1_a: DensityMatrix::basis(2, 0),
        rho1_b: DensityMatrix::basis(2, 0),
        rho2_a: qubit([[1.0 - 2.0 * a, c], [c, 2.0 * a]])?,
        rho2_b: qubit([[1.0 - a, a], [a, a]])?,
        rho2_b_traced: qubit([[a, a], [a, 1.0 - a]])?,
    })
}

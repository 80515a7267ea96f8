//! Accessible information, Fuchs quantumness, and the pure-state
//! infinite-copy identities.
//!
//! The accessible information is the largest classical mutual information
//! between the ensemble label and a measurement outcome. It is computed by
//! multi-start Nelder–Mead over rank-one POVMs with `d²` outcomes, plus an
//! exhaustive projective scan over the Bloch sphere for qubits. Reported
//! values are lower bounds on the true optimum.

mod nelder_mead;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::densmat::{eig_hermitian, random, von_neumann_entropy, Complex64, ComplexMatrix, DensityMatrix};
use crate::ensemble::{holevo, shannon_entropy, Ensemble};
use crate::error::{Error, Result};
use crate::extopt::OptimizerConfig;
use crate::par::map_indexed;

/// Largest Hilbert-space dimension accepted by [`accessible_information`].
pub const MAX_ACCINFO_DIM: usize = 4;
/// Tolerance for POVM positivity and completeness.
pub const POVM_TOL: f64 = 1e-9;
/// Bloch polar-angle step of the qubit projective scan is `π / BLOCH_POLAR_STEPS`.
pub const BLOCH_POLAR_STEPS: usize = 5000;
/// Azimuthal samples of the qubit projective scan.
pub const BLOCH_AZIMUTH_STEPS: usize = 256;

const T_FLOOR: f64 = 1e-12;
const NM_STEP: f64 = 0.3;
const NM_FTOL: f64 = 1e-13;
const NM_EVALS_PER_PARAM: usize = 400;
const NM_MAX_EVALS: usize = 40_000;

/// A positive operator-valued measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PovmJson", into = "PovmJson")]
pub struct Povm {
    elements: Vec<ComplexMatrix>,
}

#[derive(Serialize, Deserialize)]
struct PovmJson {
    elements: Vec<ComplexMatrix>,
}

impl TryFrom<PovmJson> for Povm {
    type Error = Error;

    fn try_from(j: PovmJson) -> Result<Self> {
        Povm::new(j.elements)
    }
}

impl From<Povm> for PovmJson {
    fn from(p: Povm) -> Self {
        PovmJson { elements: p.elements }
    }
}

impl Povm {
    /// Validates positivity of every element and `Σ M_j = I`.
    pub fn new(elements: Vec<ComplexMatrix>) -> Result<Self> {
        let Some(first) = elements.first() else {
            return Err(Error::invalid("a POVM needs at least one element"));
        };
        let d = first.rows();
        let mut sum = ComplexMatrix::zeros(d, d);
        for (j, m) in elements.iter().enumerate() {
            if m.rows() != d || m.cols() != d {
                return Err(Error::invalid(format!("POVM element {j} has the wrong shape")));
            }
            if !m.is_hermitian(POVM_TOL) {
                return Err(Error::invalid(format!("POVM element {j} is not Hermitian")));
            }
            let min = eig_hermitian(&m.hermitian_part())?.min_value();
            if min < -POVM_TOL {
                return Err(Error::invalid(format!("POVM element {j} has eigenvalue {min:.3e}")));
            }
            sum.add_scaled(1.0, m);
        }
        let err = sum.max_abs_diff(&ComplexMatrix::identity(d));
        if err > POVM_TOL {
            return Err(Error::invalid(format!("POVM elements sum to I only within {err:.3e}")));
        }
        Ok(Self {
            elements: elements.iter().map(ComplexMatrix::hermitian_part).collect(),
        })
    }

    /// Projective measurement in the computational basis.
    pub fn computational(dim: usize) -> Self {
        Self {
            elements: (0..dim).map(|k| DensityMatrix::basis(dim, k).into_matrix()).collect(),
        }
    }

    /// The single-outcome measurement `{I}`.
    pub fn trivial(dim: usize) -> Self {
        Self {
            elements: vec![ComplexMatrix::identity(dim)],
        }
    }

    /// Projective measurement onto the columns of a unitary.
    pub fn from_basis(unitary: &ComplexMatrix) -> Result<Self> {
        Self::new(
            (0..unitary.cols())
                .map(|k| ComplexMatrix::outer(&unitary.column(k)))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.elements[0].rows()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    /// `{M_j ⊗ I}` acting on a system extended by `extra_dim` trailing dimensions.
    pub fn lift(&self, extra_dim: usize) -> Self {
        let id = ComplexMatrix::identity(extra_dim);
        Self {
            elements: self.elements.iter().map(|m| m.kron(&id)).collect(),
        }
    }
}

/// Mutual information (bits) of `P(i, j) = p_i Tr(ρ_i M_j)`.
pub fn mutual_information(e: &Ensemble, m: &Povm) -> Result<f64> {
    if e.dim() != m.dim() {
        return Err(Error::invalid(format!(
            "POVM acts on dimension {} but the ensemble has dimension {}",
            m.dim(),
            e.dim()
        )));
    }
    let table: Vec<Vec<f64>> = e
        .members()
        .iter()
        .map(|mem| {
            m.elements()
                .iter()
                .map(|el| (mem.p * el.re_inner(mem.state.matrix())).max(0.0))
                .collect()
        })
        .collect();
    Ok(information_of_table(&table))
}

fn information_of_table(table: &[Vec<f64>]) -> f64 {
    let outcomes = table[0].len();
    let q: Vec<f64> = (0..outcomes).map(|j| table.iter().map(|row| row[j]).sum()).collect();
    let mut info = 0.0;
    for row in table {
        let p: f64 = row.iter().sum();
        for (j, &pij) in row.iter().enumerate() {
            if pij > 0.0 && q[j] > 0.0 {
                info += pij * (pij / (p * q[j])).log2();
            }
        }
    }
    info.max(0.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccInfoReport {
    /// Best mutual information found (bits); a lower bound on the optimum.
    pub value: f64,
    pub best_povm: Povm,
    pub restarts_used: usize,
    /// Best value of each simplex restart, in restart order.
    pub mutual_info_per_restart: Vec<f64>,
    /// Best value of the qubit projective scan, when it ran.
    pub projective_scan: Option<f64>,
    /// `χ − value`, nonnegative by the Holevo bound.
    pub holevo_gap: f64,
}

/// Rank-one POVM from `d²` unnormalized vectors packed as real and imaginary
/// parts: `M_k = T^{-1/2} |v_k⟩⟨v_k| T^{-1/2}` with `T = Σ |v_k⟩⟨v_k|`.
fn povm_elements(params: &[f64], d: usize) -> Result<Vec<ComplexMatrix>> {
    let vectors: Vec<Vec<Complex64>> = params
        .chunks(2 * d)
        .map(|c| (0..d).map(|i| Complex64::new(c[2 * i], c[2 * i + 1])).collect())
        .collect();
    let mut t = ComplexMatrix::zeros(d, d);
    for v in &vectors {
        t.add_scaled(1.0, &ComplexMatrix::outer(v));
    }
    let inv_sqrt = eig_hermitian(&t.hermitian_part())?.reconstruct_with(|l| 1.0 / l.max(T_FLOOR).sqrt());
    Ok(vectors
        .iter()
        .map(|v| ComplexMatrix::outer(&inv_sqrt.mat_vec(v)))
        .collect())
}

fn information_of_params(e: &Ensemble, params: &[f64], d: usize) -> f64 {
    match povm_elements(params, d) {
        Ok(elements) => {
            let table: Vec<Vec<f64>> = e
                .members()
                .iter()
                .map(|mem| {
                    elements
                        .iter()
                        .map(|el| (mem.p * el.re_inner(mem.state.matrix())).max(0.0))
                        .collect()
                })
                .collect();
            information_of_table(&table)
        }
        Err(_) => 0.0,
    }
}

/// Restart 0 starts from the eigenbasis of the average state, which is
/// optimal for commuting ensembles; the rest start from Gaussian vectors.
fn initial_params(e: &Ensemble, restart: usize, seed: u64) -> Result<Vec<f64>> {
    let d = e.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(restart as u64));
    let mut params = Vec::with_capacity(2 * d * d * d);
    let basis = if restart == 0 { Some(e.average().eigen()?) } else { None };
    for k in 0..d * d {
        for i in 0..d {
            let z = match &basis {
                Some(b) if k < d => b.vectors[(i, k)],
                Some(_) => random::gaussian_complex(&mut rng) * 1e-3,
                None => random::gaussian_complex(&mut rng),
            };
            params.push(z.re);
            params.push(z.im);
        }
    }
    Ok(params)
}

fn bloch_vector(rho: &DensityMatrix) -> [f64; 3] {
    let m = rho.matrix();
    [2.0 * m[(0, 1)].re, -2.0 * m[(0, 1)].im, m[(0, 0)].re - m[(1, 1)].re]
}

fn projective_information(bloch: &[(f64, [f64; 3])], theta: f64, phi: f64) -> f64 {
    let n = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
    let table: Vec<Vec<f64>> = bloch
        .iter()
        .map(|(p, r)| {
            let up = 0.5 * (1.0 + r[0] * n[0] + r[1] * n[1] + r[2] * n[2]);
            vec![p * up.clamp(0.0, 1.0), p * (1.0 - up).clamp(0.0, 1.0)]
        })
        .collect();
    information_of_table(&table)
}

/// Best two-outcome projective qubit measurement: a full `(θ, φ)` grid
/// followed by a local simplex polish. Returns the value and Bloch angles.
fn bloch_scan(e: &Ensemble) -> (f64, f64, f64) {
    let bloch: Vec<(f64, [f64; 3])> = e.members().iter().map(|m| (m.p, bloch_vector(&m.state))).collect();
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..=BLOCH_POLAR_STEPS {
        let theta = std::f64::consts::PI * i as f64 / BLOCH_POLAR_STEPS as f64;
        for j in 0..BLOCH_AZIMUTH_STEPS {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / BLOCH_AZIMUTH_STEPS as f64;
            let v = projective_information(&bloch, theta, phi);
            if v > best.0 {
                best = (v, theta, phi);
            }
        }
    }
    let polished = nelder_mead::minimize(
        |x| -projective_information(&bloch, x[0], x[1]),
        vec![best.1, best.2],
        std::f64::consts::PI / BLOCH_POLAR_STEPS as f64,
        2000,
        1e-16,
    );
    if -polished.value > best.0 {
        (-polished.value, polished.x[0], polished.x[1])
    } else {
        best
    }
}

fn bloch_projector_povm(theta: f64, phi: f64) -> Result<Povm> {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let up = [Complex64::new(c, 0.0), Complex64::from_polar(s, phi)];
    let down = [Complex64::new(-s, 0.0), Complex64::from_polar(c, phi)];
    Povm::new(vec![ComplexMatrix::outer(&up), ComplexMatrix::outer(&down)])
}

/// Accessible information by multi-start POVM search (`cfg.povm_restarts`
/// seeded restarts, seeds `cfg.seed + r`).
pub fn accessible_information(e: &Ensemble, cfg: &OptimizerConfig) -> Result<AccInfoReport> {
    cfg.validate()?;
    let d = e.dim();
    if d > MAX_ACCINFO_DIM {
        return Err(Error::ResourceLimit(format!(
            "accessible information is limited to dimension {MAX_ACCINFO_DIM}, got {d}"
        )));
    }
    let chi = holevo(e)?;
    let params = 2 * d * d * d;
    let max_evals = (NM_EVALS_PER_PARAM * params).min(NM_MAX_EVALS);

    let runs: Vec<Result<(f64, Vec<f64>)>> = map_indexed(cfg.povm_restarts, cfg.execution, |r| {
        let x0 = initial_params(e, r, cfg.seed)?;
        let f = |x: &[f64]| -information_of_params(e, x, d);
        let first = nelder_mead::minimize(f, x0, NM_STEP, max_evals, NM_FTOL);
        // a second simplex around the first optimum escapes premature collapse
        let second = nelder_mead::minimize(f, first.x, NM_STEP * 0.1, max_evals, NM_FTOL);
        Ok((-second.value, second.x))
    });
    let runs: Vec<(f64, Vec<f64>)> = runs.into_iter().collect::<Result<_>>()?;

    let mut best = 0;
    for (i, run) in runs.iter().enumerate().skip(1) {
        if run.0 > runs[best].0 {
            best = i;
        }
    }
    let mut value = runs[best].0;
    let mut best_povm = Povm::new(povm_elements(&runs[best].1, d)?)?;

    let mut projective_scan = None;
    if d == 2 {
        let (scan, theta, phi) = bloch_scan(e);
        projective_scan = Some(scan);
        if scan > value {
            value = scan;
            best_povm = bloch_projector_povm(theta, phi)?;
        }
    }
    Ok(AccInfoReport {
        value,
        best_povm,
        restarts_used: cfg.povm_restarts,
        mutual_info_per_restart: runs.iter().map(|r| r.0).collect(),
        projective_scan,
        holevo_gap: chi - value,
    })
}

/// `χ − I_acc`, the gap between the Holevo bound and what measurement extracts.
pub fn fuchs_quantumness(e: &Ensemble, cfg: &OptimizerConfig) -> Result<f64> {
    Ok(accessible_information(e, cfg)?.holevo_gap)
}

/// Infinite-copy quantities of a pure-state ensemble.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PureLimitIdentities {
    /// `H(p) − S(ρ̄)`.
    pub chi_q_inf: f64,
    /// `H(p) − I_acc`.
    pub iacc_q_inf: f64,
    /// `S(ρ̄) − I_acc`.
    pub q_fuchs: f64,
    pub accessible_information: f64,
    /// `|Q_F − ((I_acc)_q^∞ − χ_q^∞)|`.
    pub identity_residual: f64,
}

pub fn pure_limit_identities(e: &Ensemble, cfg: &OptimizerConfig) -> Result<PureLimitIdentities> {
    if !e.is_pure()? {
        return Err(Error::PreconditionViolated(
            "infinite-copy identities need every member to be pure".into(),
        ));
    }
    let shannon = shannon_entropy(&e.probabilities())?;
    let avg_entropy = von_neumann_entropy(&e.average())?;
    let iacc = accessible_information(e, cfg)?.value;
    let chi_q_inf = shannon - avg_entropy;
    let iacc_q_inf = shannon - iacc;
    let q_fuchs = avg_entropy - iacc;
    Ok(PureLimitIdentities {
        chi_q_inf,
        iacc_q_inf,
        q_fuchs,
        accessible_information: iacc,
        identity_residual: (q_fuchs - (iacc_q_inf - chi_q_inf)).abs(),
    })
}

//! Ensembles `{p_i, ρ_i}`, the Holevo quantity, broadcastability and the
//! classical broadcast of commuting families.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::densmat::{
    eig_hermitian, partial_trace, relative_entropy, relative_entropy_of_matrices, tensor_power, von_neumann_entropy,
    ComplexMatrix, DensityMatrix, DimensionProfile, MatrixJson, EIGEN_FLOOR,
};
use crate::error::{Error, Result};
use crate::extopt::ExtensionSet;

/// Probability-sum tolerance for ensembles and distributions.
pub const PROB_TOL: f64 = 1e-10;

/// Default threshold on the commutator norm for [`is_broadcastable`].
pub const DEFAULT_COMMUTATOR_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Member {
    pub p: f64,
    pub state: DensityMatrix,
}

/// A finite list of states with prior probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    members: Vec<Member>,
}

impl Ensemble {
    pub fn new(members: Vec<(f64, DensityMatrix)>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::invalid("ensemble needs at least one member"));
        }
        let dim = members[0].1.dim();
        if let Some((i, _)) = members.iter().enumerate().find(|(_, (_, s))| s.dim() != dim) {
            return Err(Error::invalid(format!(
                "member {i} has dimension {}, expected {dim}",
                members[i].1.dim()
            )));
        }
        let probs: Vec<f64> = members.iter().map(|(p, _)| *p).collect();
        check_distribution(&probs)?;
        Ok(Self {
            members: members.into_iter().map(|(p, state)| Member { p, state }).collect(),
        })
    }

    /// Equal priors.
    pub fn uniform(states: Vec<DensityMatrix>) -> Result<Self> {
        let p = 1.0 / states.len().max(1) as f64;
        Self::new(states.into_iter().map(|s| (p, s)).collect())
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.members[0].state.dim()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.members.iter().map(|m| m.p).collect()
    }

    pub fn states(&self) -> Vec<&DensityMatrix> {
        self.members.iter().map(|m| &m.state).collect()
    }

    /// `ρ̄ = Σ p_i ρ_i`
    pub fn average(&self) -> DensityMatrix {
        DensityMatrix::mixture(&self.probabilities(), &self.states()).expect("validated ensemble")
    }

    /// Applies `f` to every state, keeping the priors.
    pub fn map_states(&self, mut f: impl FnMut(&DensityMatrix) -> Result<DensityMatrix>) -> Result<Self> {
        let members = self
            .members
            .iter()
            .map(|m| Ok((m.p, f(&m.state)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(members)
    }

    pub fn is_pure(&self) -> Result<bool> {
        for m in &self.members {
            if !m.state.is_pure()? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// One ensemble member on the wire; a missing `p` means uniform priors.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MemberJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    pub state: MatrixJson,
}

/// `{"dim": d, "members": [{"p": 0.5, "state": <matrix>}, ...]}`
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnsembleJson {
    pub dim: usize,
    pub members: Vec<MemberJson>,
}

impl From<&Ensemble> for EnsembleJson {
    fn from(e: &Ensemble) -> Self {
        EnsembleJson {
            dim: e.dim(),
            members: e
                .members
                .iter()
                .map(|m| MemberJson {
                    p: Some(m.p),
                    state: MatrixJson::from(m.state.matrix()),
                })
                .collect(),
        }
    }
}

impl TryFrom<&EnsembleJson> for Ensemble {
    type Error = Error;

    fn try_from(j: &EnsembleJson) -> Result<Self> {
        if j.members.is_empty() {
            return Err(Error::invalid("ensemble needs at least one member"));
        }
        let given = j.members.iter().filter(|m| m.p.is_some()).count();
        if given != 0 && given != j.members.len() {
            return Err(Error::invalid(
                "either every member or no member may carry a probability",
            ));
        }
        let uniform = 1.0 / j.members.len() as f64;
        let members = j
            .members
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let state = DensityMatrix::new(ComplexMatrix::try_from(&m.state)?)
                    .map_err(|e| Error::invalid(format!("member {i}: {e}")))?;
                if state.dim() != j.dim {
                    return Err(Error::invalid(format!(
                        "member {i} has dimension {}, header says {}",
                        state.dim(),
                        j.dim
                    )));
                }
                Ok((m.p.unwrap_or(uniform), state))
            })
            .collect::<Result<Vec<_>>>()?;
        Ensemble::new(members)
    }
}

impl Serialize for Ensemble {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        EnsembleJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Ensemble {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = EnsembleJson::deserialize(d)?;
        Ensemble::try_from(&j).map_err(serde::de::Error::custom)
    }
}

pub(crate) fn check_distribution(probs: &[f64]) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::invalid("empty probability distribution"));
    }
    if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(Error::invalid(format!("probability {p} is not a nonnegative number")));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > PROB_TOL {
        return Err(Error::invalid(format!("probabilities sum to {total}, expected 1")));
    }
    Ok(())
}

/// Shannon entropy in bits, with `0 log 0 = 0`.
pub fn shannon_entropy(probs: &[f64]) -> Result<f64> {
    check_distribution(probs)?;
    Ok(probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum())
}

/// Holevo quantity `χ = S(Σ p_i ρ_i) − Σ p_i S(ρ_i)` in bits.
pub fn holevo(e: &Ensemble) -> Result<f64> {
    let mut chi = von_neumann_entropy(&e.average())?;
    for m in e.members() {
        if m.p > 0.0 {
            chi -= m.p * von_neumann_entropy(&m.state)?;
        }
    }
    Ok(chi)
}

/// `Σ p_i S(ρ_i ‖ ρ̄)`, an independent route to the Holevo quantity.
pub fn holevo_via_relative_entropy(e: &Ensemble) -> Result<f64> {
    let avg = e.average();
    let mut total = 0.0;
    for m in e.members() {
        if m.p > 0.0 {
            total += m.p * relative_entropy(&m.state, &avg)?;
        }
    }
    Ok(total)
}

/// Result of [`is_broadcastable`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BroadcastReport {
    pub broadcastable: bool,
    /// Largest Frobenius norm `‖[ρ_i, ρ_j]‖_F` over pairs.
    pub max_commutator_norm: f64,
    /// The pair attaining it (`None` for single-member ensembles).
    pub pair: Option<(usize, usize)>,
}

/// An ensemble can be broadcast iff its states commute pairwise.
pub fn is_broadcastable(e: &Ensemble, tol: f64) -> BroadcastReport {
    let states = e.states();
    let mut best = 0.0;
    let mut pair = None;
    for i in 0..states.len() {
        for j in (i + 1)..states.len() {
            let norm = states[i].matrix().commutator(states[j].matrix()).frobenius_norm();
            if pair.is_none() || norm > best {
                best = norm;
                pair = Some((i, j));
            }
        }
    }
    BroadcastReport {
        broadcastable: best <= tol,
        max_commutator_norm: best,
        pair,
    }
}

const SIMULTANEOUS_DIAG_SEED: u64 = 0x5eed_b0ad;
const DIAGONALITY_TOL: f64 = 1e-8;

/// A common eigenbasis (columns) of a commuting family.
///
/// Diagonalizes `ρ̄ + Σ c_i ρ_i` with small seeded coefficients `c_i`, which
/// splits degeneracies of `ρ̄` that the members resolve, then checks that every
/// member is diagonal in the result.
pub fn simultaneous_eigenbasis(e: &Ensemble) -> Result<ComplexMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(SIMULTANEOUS_DIAG_SEED);
    let mut mix = e.average().into_matrix();
    for m in e.members() {
        let c: f64 = rng.random_range(0.05..0.15);
        mix.add_scaled(c, m.state.matrix());
    }
    let basis = eig_hermitian(&mix)?.vectors;
    for (i, m) in e.members().iter().enumerate() {
        let rotated = basis.dagger().matmul(m.state.matrix()).matmul(&basis);
        let n = rotated.rows();
        let off = (0..n)
            .flat_map(|r| (0..n).map(move |c| (r, c)))
            .filter(|(r, c)| r != c)
            .map(|(r, c)| rotated[(r, c)].norm())
            .fold(0.0, f64::max);
        if off > DIAGONALITY_TOL {
            return Err(Error::precondition(format!(
                "member {i} is not diagonal in the common basis (off-diagonal {off:.3e})"
            )));
        }
    }
    Ok(basis)
}

/// Broadcasts a commuting ensemble: `ρ_i ↦ Σ_k ⟨k|ρ_i|k⟩ (|k⟩⟨k|)^{⊗n}` in a
/// common eigenbasis `{|k⟩}`.
pub fn classical_broadcast(e: &Ensemble, n: usize) -> Result<ExtensionSet> {
    if n < 2 {
        return Err(Error::invalid("broadcast needs at least two copies"));
    }
    let report = is_broadcastable(e, DEFAULT_COMMUTATOR_TOL);
    if !report.broadcastable {
        return Err(Error::precondition(format!(
            "ensemble members {:?} do not commute (norm {:.3e})",
            report.pair, report.max_commutator_norm
        )));
    }
    let basis = simultaneous_eigenbasis(e)?;
    let d = e.dim();
    let projectors: Vec<ComplexMatrix> = (0..d)
        .map(|k| tensor_power(&ComplexMatrix::outer(&basis.column(k)), n))
        .collect();
    let mut extensions = Vec::with_capacity(e.len());
    for m in e.members() {
        let weights = basis.dagger().matmul(m.state.matrix()).matmul(&basis);
        let mut ext = ComplexMatrix::zeros(d.pow(n as u32), d.pow(n as u32));
        for (k, proj) in projectors.iter().enumerate() {
            ext.add_scaled(weights[(k, k)].re.max(0.0), proj);
        }
        let tr = ext.trace().re;
        extensions.push(DensityMatrix::from_trusted(ext.scale(1.0 / tr)));
    }
    ExtensionSet::new(n, extensions, e.states().into_iter().cloned().collect())
}

/// `Σ_i p_i |i⟩⟨i|_C ⊗ ρ_i^{A₁…A_n}` with the flag register first.
pub fn build_flagged_state(exts: &ExtensionSet, probs: &[f64]) -> Result<(DensityMatrix, DimensionProfile)> {
    if exts.len() != probs.len() {
        return Err(Error::invalid(format!(
            "{} extensions but {} probabilities",
            exts.len(),
            probs.len()
        )));
    }
    check_distribution(probs)?;
    let m = probs.len();
    let big = exts.total_dim();
    let mut out = ComplexMatrix::zeros(m * big, m * big);
    for (i, (x, &p)) in exts.extensions().iter().zip(probs).enumerate() {
        for r in 0..big {
            for c in 0..big {
                out[(i * big + r, i * big + c)] = x.matrix()[(r, c)] * p;
            }
        }
    }
    let mut dims = vec![m];
    dims.extend(std::iter::repeat_n(exts.local_dim(), exts.n()));
    Ok((DensityMatrix::from_trusted(out), DimensionProfile::new(dims)?))
}

/// Both sides of the Holevo-gap / relative-entropy identity for one
/// extension set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapDecomposition {
    /// χ of the extension ensemble.
    pub chi_extension: f64,
    /// χ of the first-site marginal ensemble.
    pub chi_marginal: f64,
    /// `S(ρ_{C A₁…A_n} ‖ ρ_C ⊗ ρ_{A₁…A_n})`
    pub rel_extension: f64,
    /// `S(ρ_{C A₁} ‖ ρ_C ⊗ ρ_{A₁})`
    pub rel_marginal: f64,
}

impl GapDecomposition {
    pub fn holevo_gap(&self) -> f64 {
        self.chi_extension - self.chi_marginal
    }

    pub fn relative_entropy_gap(&self) -> f64 {
        self.rel_extension - self.rel_marginal
    }

    pub fn residual(&self) -> f64 {
        (self.holevo_gap() - self.relative_entropy_gap()).abs()
    }
}

/// Evaluates the χ gap directly and through the flagged state's relative
/// entropies, which are computed purely from partial traces of that state.
pub fn gap_decomposition(exts: &ExtensionSet, probs: &[f64]) -> Result<GapDecomposition> {
    let ext_ens = exts.ensemble(probs)?;
    let base_ens = Ensemble::new(
        probs
            .iter()
            .copied()
            .zip(exts.target_marginals().iter().cloned())
            .collect(),
    )?;
    let chi_extension = holevo(&ext_ens)?;
    let chi_marginal = holevo(&base_ens)?;

    let (flagged, profile) = build_flagged_state(exts, probs)?;
    let all_a: Vec<usize> = (1..profile.sites()).collect();
    let rho_c = partial_trace(flagged.matrix(), &profile, &[0])?;
    let rho_a = partial_trace(flagged.matrix(), &profile, &all_a)?;
    let rel_extension = relative_entropy_of_matrices(flagged.matrix(), &rho_c.kron(&rho_a))?;

    let rho_ca1 = partial_trace(flagged.matrix(), &profile, &[0, 1])?;
    let rho_a1 = partial_trace(flagged.matrix(), &profile, &[1])?;
    let rel_marginal = relative_entropy_of_matrices(&rho_ca1, &rho_c.kron(&rho_a1))?;

    Ok(GapDecomposition {
        chi_extension,
        chi_marginal,
        rel_extension,
        rel_marginal,
    })
}

/// True when every member with weight above the floor equals every other
/// such member within `tol` entrywise.
pub fn members_identical(e: &Ensemble, tol: f64) -> bool {
    let live: Vec<&DensityMatrix> = e
        .members()
        .iter()
        .filter(|m| m.p > EIGEN_FLOOR)
        .map(|m| &m.state)
        .collect();
    live.windows(2)
        .all(|w| w[0].matrix().max_abs_diff(w[1].matrix()) <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densmat::{random, Complex64};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn h2(p: f64) -> f64 {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }

    fn plus() -> DensityMatrix {
        let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
        DensityMatrix::pure(&[s, s]).unwrap()
    }

    fn zero_plus() -> Ensemble {
        Ensemble::uniform(vec![DensityMatrix::basis(2, 0), plus()]).unwrap()
    }

    fn diag_pair() -> Ensemble {
        Ensemble::uniform(vec![
            DensityMatrix::diagonal(&[0.3, 0.7]).unwrap(),
            DensityMatrix::diagonal(&[0.6, 0.4]).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn shannon_examples() {
        assert_eq!(shannon_entropy(&[1.0]).unwrap(), 0.0);
        assert!((shannon_entropy(&[0.5, 0.5]).unwrap() - 1.0).abs() < 1e-15);
        assert!((shannon_entropy(&[0.25, 0.75]).unwrap() - 0.8113).abs() < 1e-3);
        assert!((shannon_entropy(&[0.25, 0.75]).unwrap() - h2(0.25)).abs() < 1e-14);
        assert!(shannon_entropy(&[0.5, 0.6]).is_err());
        assert!(shannon_entropy(&[1.5, -0.5]).is_err());
    }

    #[test]
    fn ensemble_validation() {
        assert!(Ensemble::new(vec![]).is_err());
        let a = DensityMatrix::basis(2, 0);
        let b = DensityMatrix::basis(3, 0);
        assert!(Ensemble::new(vec![(0.5, a.clone()), (0.5, b)]).is_err());
        assert!(Ensemble::new(vec![(0.4, a.clone()), (0.4, a.clone())]).is_err());
        assert!(Ensemble::new(vec![(1.0, a)]).is_ok());
    }

    #[test]
    fn holevo_examples() {
        let orth = Ensemble::uniform(vec![DensityMatrix::basis(2, 0), DensityMatrix::basis(2, 1)]).unwrap();
        assert!((holevo(&orth).unwrap() - 1.0).abs() < 1e-14);
        let same = Ensemble::uniform(vec![plus(), plus()]).unwrap();
        assert!(holevo(&same).unwrap().abs() < 1e-14);
        // average state has eigenvalues (1 ± 1/√2)/2
        let expected = h2((1.0 + FRAC_1_SQRT_2) / 2.0);
        let chi = holevo(&zero_plus()).unwrap();
        assert!((chi - expected).abs() < 1e-12);
        assert!((chi - 0.6009).abs() < 1e-3);
        assert!((holevo_via_relative_entropy(&zero_plus()).unwrap() - chi).abs() < 1e-7);
    }

    #[test]
    fn zero_probability_member_is_inert() {
        let e = Ensemble::new(vec![
            (0.5, DensityMatrix::basis(2, 0)),
            (0.5, plus()),
            (0.0, DensityMatrix::basis(2, 1)),
        ])
        .unwrap();
        assert!((holevo(&e).unwrap() - holevo(&zero_plus()).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn broadcastability_examples() {
        let r = is_broadcastable(&diag_pair(), DEFAULT_COMMUTATOR_TOL);
        assert!(r.broadcastable);
        assert_eq!(r.max_commutator_norm, 0.0);
        assert!(!is_broadcastable(&zero_plus(), DEFAULT_COMMUTATOR_TOL).broadcastable);
        let single = Ensemble::uniform(vec![plus()]).unwrap();
        let r = is_broadcastable(&single, DEFAULT_COMMUTATOR_TOL);
        assert!(r.broadcastable && r.pair.is_none());
    }

    #[test]
    fn broadcast_of_orthogonal_pure_pair() {
        let orth = Ensemble::uniform(vec![DensityMatrix::basis(2, 0), DensityMatrix::basis(2, 1)]).unwrap();
        let ext = classical_broadcast(&orth, 2).unwrap();
        let e00 = ComplexMatrix::from_diag(&[1.0, 0.0, 0.0, 0.0]);
        let e11 = ComplexMatrix::from_diag(&[0.0, 0.0, 0.0, 1.0]);
        assert!(ext.extensions()[0].matrix().max_abs_diff(&e00) < 1e-12);
        assert!(ext.extensions()[1].matrix().max_abs_diff(&e11) < 1e-12);
    }

    #[test]
    fn broadcast_preserves_marginals_and_holevo() {
        for n in [2, 3] {
            let e = diag_pair();
            let ext = classical_broadcast(&e, n).unwrap();
            assert!(ext.marginal_residual().unwrap() <= 1e-8);
            let chi = holevo(&ext.ensemble(&e.probabilities()).unwrap()).unwrap();
            assert!((chi - holevo(&e).unwrap()).abs() <= 1e-7);
        }
    }

    #[test]
    fn broadcast_of_rotated_commuting_family() {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let u = random::unitary(&mut rng, 3);
        let states = [[0.5, 0.3, 0.2], [0.1, 0.1, 0.8], [0.25, 0.25, 0.5]]
            .iter()
            .map(|d| DensityMatrix::new(u.sandwich(&ComplexMatrix::from_diag(d))).unwrap())
            .collect::<Vec<_>>();
        let e = Ensemble::new(vec![0.2, 0.5, 0.3].into_iter().zip(states).collect()).unwrap();
        let ext = classical_broadcast(&e, 2).unwrap();
        assert!(ext.marginal_residual().unwrap() <= 1e-8);
        let chi = holevo(&ext.ensemble(&e.probabilities()).unwrap()).unwrap();
        assert!((chi - holevo(&e).unwrap()).abs() <= 1e-7);
    }

    #[test]
    fn broadcast_single_member_and_errors() {
        let rho = DensityMatrix::diagonal(&[0.2, 0.8]).unwrap();
        let e = Ensemble::uniform(vec![rho.clone()]).unwrap();
        let ext = classical_broadcast(&e, 2).unwrap();
        assert!(ext.site_marginal(0, 1).unwrap().max_abs_diff(rho.matrix()) < 1e-10);
        assert!(matches!(
            classical_broadcast(&zero_plus(), 2),
            Err(Error::PreconditionViolated(_))
        ));
        assert!(classical_broadcast(&e, 1).is_err());
    }

    #[test]
    fn flagged_state_blocks_and_marginals() {
        let e = diag_pair();
        let ext = classical_broadcast(&e, 2).unwrap();
        let (flag, profile) = build_flagged_state(&ext, &[0.5, 0.5]).unwrap();
        assert_eq!(profile.local_dims(), &[2, 2, 2]);
        let c = partial_trace(flag.matrix(), &profile, &[0]).unwrap();
        assert!(c.max_abs_diff(&ComplexMatrix::from_diag(&[0.5, 0.5])) < 1e-12);
        let ab = partial_trace(flag.matrix(), &profile, &[1, 2]).unwrap();
        let avg = &ext.extensions()[0].matrix().scale(0.5) + &ext.extensions()[1].matrix().scale(0.5);
        assert!(ab.max_abs_diff(&avg) < 1e-12);

        let (flag, _) = build_flagged_state(&ext, &[1.0, 0.0]).unwrap();
        let block = flag.matrix()[(4, 4)].norm() + flag.matrix()[(7, 7)].norm();
        assert_eq!(block, 0.0);
        assert!(build_flagged_state(&ext, &[1.0]).is_err());
    }

    #[test]
    fn gap_identity_on_commuting_example() {
        let e = diag_pair();
        let ext = classical_broadcast(&e, 2).unwrap();
        let g = gap_decomposition(&ext, &e.probabilities()).unwrap();
        assert!(g.residual() <= 1e-6);
        assert!(g.holevo_gap().abs() <= 1e-7);
    }

    #[test]
    fn ensemble_json_defaults_to_uniform() {
        let text = r#"{"dim": 2, "members": [
            {"state": {"rows": 2, "cols": 2, "re": [[1,0],[0,0]], "im": [[0,0],[0,0]]}},
            {"state": {"rows": 2, "cols": 2, "re": [[0,0],[0,1]]}}]}"#;
        let e: Ensemble = serde_json::from_str(text).unwrap();
        assert_eq!(e.probabilities(), vec![0.5, 0.5]);
        let back: Ensemble = serde_json::from_str(&serde_json::to_string(&e).unwrap()).unwrap();
        assert_eq!(back, e);

        let mixed = r#"{"dim": 2, "members": [
            {"p": 1.0, "state": {"rows": 2, "cols": 2, "re": [[1,0],[0,0]]}},
            {"state": {"rows": 2, "cols": 2, "re": [[0,0],[0,1]]}}]}"#;
        assert!(serde_json::from_str::<Ensemble>(mixed).is_err());
        let wrong_dim = r#"{"dim": 3, "members": [{"state": {"rows": 2, "cols": 2, "re": [[1,0],[0,0]]}}]}"#;
        assert!(serde_json::from_str::<Ensemble>(wrong_dim).is_err());
    }

    #[test]
    fn identical_members_detection() {
        assert!(members_identical(
            &Ensemble::uniform(vec![plus(), plus()]).unwrap(),
            1e-8
        ));
        assert!(!members_identical(&zero_plus(), 1e-8));
    }
}

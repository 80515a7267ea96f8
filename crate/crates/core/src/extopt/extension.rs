use crate::densmat::{partial_trace, ComplexMatrix, DensityMatrix, DimensionProfile};
use crate::ensemble::Ensemble;
use crate::error::{Error, Result};

/// Largest tolerated deviation of any single-site marginal from its target.
pub const FEASIBILITY_TOL: f64 = 1e-7;

/// n-party states, one per ensemble member, whose every single-site marginal
/// equals that member's state.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtensionSet {
    n: usize,
    local_dim: usize,
    extensions: Vec<DensityMatrix>,
    target_marginals: Vec<DensityMatrix>,
}

impl ExtensionSet {
    pub fn new(n: usize, extensions: Vec<DensityMatrix>, target_marginals: Vec<DensityMatrix>) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("an extension set needs at least two sites"));
        }
        if extensions.is_empty() || extensions.len() != target_marginals.len() {
            return Err(Error::invalid(format!(
                "{} extensions for {} targets",
                extensions.len(),
                target_marginals.len()
            )));
        }
        let d = target_marginals[0].dim();
        if target_marginals.iter().any(|t| t.dim() != d) {
            return Err(Error::invalid("target marginals have different dimensions"));
        }
        let big = d.pow(n as u32);
        if let Some(bad) = extensions.iter().find(|x| x.dim() != big) {
            return Err(Error::invalid(format!(
                "extension has dimension {}, expected {d}^{n} = {big}",
                bad.dim()
            )));
        }
        let set = Self {
            n,
            local_dim: d,
            extensions,
            target_marginals,
        };
        let residual = set.marginal_residual()?;
        if residual > FEASIBILITY_TOL {
            return Err(Error::invalid(format!(
                "extension marginals deviate from targets by {residual:.3e}"
            )));
        }
        Ok(set)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn total_dim(&self) -> usize {
        self.local_dim.pow(self.n as u32)
    }

    pub fn len(&self) -> usize {
        self.extensions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.extensions.is_empty()
    }

    pub fn extensions(&self) -> &[DensityMatrix] {
        &self.extensions
    }

    pub fn target_marginals(&self) -> &[DensityMatrix] {
        &self.target_marginals
    }

    pub fn profile(&self) -> DimensionProfile {
        DimensionProfile::uniform(self.local_dim, self.n).expect("positive dims")
    }

    /// Marginal of extension `member` on `site`.
    pub fn site_marginal(&self, member: usize, site: usize) -> Result<ComplexMatrix> {
        partial_trace(self.extensions[member].matrix(), &self.profile(), &[site])
    }

    /// `max_{i,k} max|Tr_{¬k} X_i − ρ_i|` entrywise.
    pub fn marginal_residual(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (i, target) in self.target_marginals.iter().enumerate() {
            for k in 0..self.n {
                worst = worst.max(self.site_marginal(i, k)?.max_abs_diff(target.matrix()));
            }
        }
        Ok(worst)
    }

    /// The ensemble `{p_i, X_i}` of extensions.
    pub fn ensemble(&self, probs: &[f64]) -> Result<Ensemble> {
        if probs.len() != self.len() {
            return Err(Error::invalid(format!(
                "{} probabilities for {} extensions",
                probs.len(),
                self.len()
            )));
        }
        Ensemble::new(probs.iter().copied().zip(self.extensions.iter().cloned()).collect())
    }
}

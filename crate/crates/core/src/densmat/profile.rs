use serde::{Deserialize, Serialize};

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Local dimensions of an ordered tensor product `H_0 ⊗ H_1 ⊗ …`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionProfile {
    local_dims: Vec<usize>,
}

impl DimensionProfile {
    pub fn new(local_dims: Vec<usize>) -> Result<Self> {
        if local_dims.is_empty() || local_dims.contains(&0) {
            return Err(Error::invalid(
                "dimension profile needs at least one positive local dimension",
            ));
        }
        Ok(Self { local_dims })
    }

    /// `n` copies of a `d`-dimensional site.
    pub fn uniform(local_dim: usize, sites: usize) -> Result<Self> {
        Self::new(vec![local_dim; sites])
    }

    pub fn local_dims(&self) -> &[usize] {
        &self.local_dims
    }

    pub fn sites(&self) -> usize {
        self.local_dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.local_dims.iter().product()
    }

    /// Profile of the kept subsystems, in tensor order.
    pub fn restrict(&self, keep: &[usize]) -> Result<Self> {
        let keep = self.normalize_keep(keep)?;
        Self::new(keep.iter().map(|&k| self.local_dims[k]).collect())
    }

    fn normalize_keep(&self, keep: &[usize]) -> Result<Vec<usize>> {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if keep.is_empty() {
            return Err(Error::invalid("partial trace must keep at least one subsystem"));
        }
        if let Some(&bad) = keep.iter().find(|&&k| k >= self.sites()) {
            return Err(Error::invalid(format!(
                "subsystem index {bad} out of range for {} sites",
                self.sites()
            )));
        }
        Ok(keep)
    }

    /// For every global basis index, its (kept, traced) sub-indices.
    pub(crate) fn split_indices(&self, keep: &[usize]) -> Result<(Vec<usize>, Vec<usize>, usize, usize)> {
        let keep = self.normalize_keep(keep)?;
        let total = self.total_dim();
        let mut kept_idx = vec![0; total];
        let mut traced_idx = vec![0; total];
        let kept_dim: usize = keep.iter().map(|&k| self.local_dims[k]).product();
        let traced_dim = total / kept_dim;
        for (g, (ki, ti)) in kept_idx.iter_mut().zip(traced_idx.iter_mut()).enumerate() {
            let mut rem = g;
            let mut kstride = 1;
            let mut tstride = 1;
            // walk sites from the last (fastest-varying) to the first
            for site in (0..self.sites()).rev() {
                let d = self.local_dims[site];
                let digit = rem % d;
                rem /= d;
                if keep.binary_search(&site).is_ok() {
                    *ki += digit * kstride;
                    kstride *= d;
                } else {
                    *ti += digit * tstride;
                    tstride *= d;
                }
            }
        }
        Ok((kept_idx, traced_idx, kept_dim, traced_dim))
    }

    fn check(&self, m: &ComplexMatrix) -> Result<()> {
        if !m.is_square() || m.rows() != self.total_dim() {
            return Err(Error::invalid(format!(
                "profile {:?} (total {}) does not describe a {}x{} matrix",
                self.local_dims,
                self.total_dim(),
                m.rows(),
                m.cols()
            )));
        }
        Ok(())
    }
}

/// Traces out every subsystem not listed in `keep`.
pub fn partial_trace(m: &ComplexMatrix, profile: &DimensionProfile, keep: &[usize]) -> Result<ComplexMatrix> {
    profile.check(m)?;
    let (kept, traced, kept_dim, _) = profile.split_indices(keep)?;
    let total = profile.total_dim();
    let mut out = ComplexMatrix::zeros(kept_dim, kept_dim);
    for r in 0..total {
        for c in 0..total {
            if traced[r] == traced[c] {
                out[(kept[r], kept[c])] += m[(r, c)];
            }
        }
    }
    Ok(out)
}

/// Kronecker product `m1 ⊗ m2`.
pub fn tensor(m1: &ComplexMatrix, m2: &ComplexMatrix) -> ComplexMatrix {
    m1.kron(m2)
}

/// `m^{⊗n}`
pub fn tensor_power(m: &ComplexMatrix, n: usize) -> ComplexMatrix {
    assert!(n >= 1);
    let mut out = m.clone();
    for _ in 1..n {
        out = out.kron(m);
    }
    out
}

/// `I ⊗ … ⊗ op ⊗ … ⊗ I` with `op` on `site` of `sites` equal `d`-dimensional sites.
pub fn embed_site(op: &ComplexMatrix, site: usize, sites: usize) -> ComplexMatrix {
    let d = op.rows();
    let left = ComplexMatrix::identity(d.pow(site as u32));
    let right = ComplexMatrix::identity(d.pow((sites - site - 1) as u32));
    left.kron(op).kron(&right)
}

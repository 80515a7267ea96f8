//! Quantum channels in Kraus form with a cached Choi matrix.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::densmat::{eig_hermitian, random, ComplexMatrix, DensityMatrix, DimensionProfile};
use crate::error::{Error, Result};

/// Tolerance for trace preservation and Choi positivity.
pub const CPTP_TOL: f64 = 1e-9;
/// Choi eigenvalues at or below this are dropped when extracting Kraus operators.
pub const CHOI_FLOOR: f64 = 1e-12;

/// A CPTP map from `input_dim` to `output_dim` dimensional operators.
///
/// The Choi matrix is `Σ_{ij} |i⟩⟨j| ⊗ Λ(|i⟩⟨j|)` (input factor first).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChannelJson", into = "ChannelJson")]
pub struct Channel {
    input_dim: usize,
    output_dim: usize,
    kraus: Vec<ComplexMatrix>,
    choi: ComplexMatrix,
}

#[derive(Serialize, Deserialize)]
struct ChannelJson {
    in_dim: usize,
    out_dim: usize,
    kraus: Vec<ComplexMatrix>,
}

impl TryFrom<ChannelJson> for Channel {
    type Error = Error;

    fn try_from(j: ChannelJson) -> Result<Self> {
        Channel::new(j.in_dim, j.out_dim, j.kraus)
    }
}

impl From<Channel> for ChannelJson {
    fn from(c: Channel) -> Self {
        ChannelJson {
            in_dim: c.input_dim,
            out_dim: c.output_dim,
            kraus: c.kraus,
        }
    }
}

fn choi_of(input_dim: usize, output_dim: usize, kraus: &[ComplexMatrix]) -> ComplexMatrix {
    let big = input_dim * output_dim;
    let mut choi = ComplexMatrix::zeros(big, big);
    for k in kraus {
        // vec(K) indexed by (input i, output o) ↦ i·out + o
        let v: Vec<_> = (0..big).map(|g| k[(g % output_dim, g / output_dim)]).collect();
        choi.add_scaled(1.0, &ComplexMatrix::outer(&v));
    }
    choi
}

impl Channel {
    /// Validates shapes, trace preservation and complete positivity.
    pub fn new(input_dim: usize, output_dim: usize, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        if input_dim == 0 || output_dim == 0 {
            return Err(Error::invalid("channel dimensions must be positive"));
        }
        if kraus.is_empty() {
            return Err(Error::invalid("a channel needs at least one Kraus operator"));
        }
        for (i, k) in kraus.iter().enumerate() {
            if k.rows() != output_dim || k.cols() != input_dim {
                return Err(Error::invalid(format!(
                    "Kraus operator {i} is {}x{}, expected {output_dim}x{input_dim}",
                    k.rows(),
                    k.cols()
                )));
            }
        }
        let mut sum = ComplexMatrix::zeros(input_dim, input_dim);
        for k in &kraus {
            sum.add_scaled(1.0, &k.dagger().matmul(k));
        }
        let tp_err = sum.max_abs_diff(&ComplexMatrix::identity(input_dim));
        if tp_err > CPTP_TOL {
            return Err(Error::invalid(format!(
                "Kraus operators are not trace preserving (max |ΣK†K − I| = {tp_err:.3e})"
            )));
        }
        let choi = choi_of(input_dim, output_dim, &kraus);
        let min = eig_hermitian(&choi)?.min_value();
        if min < -CPTP_TOL {
            return Err(Error::invalid(format!(
                "Choi matrix is not PSD (min eigenvalue {min:.3e})"
            )));
        }
        Ok(Self {
            input_dim,
            output_dim,
            kraus,
            choi,
        })
    }

    /// Builds a channel from its Choi matrix, dropping eigenvalues ≤ [`CHOI_FLOOR`].
    pub fn from_choi(input_dim: usize, output_dim: usize, choi: &ComplexMatrix) -> Result<Self> {
        let big = input_dim * output_dim;
        if choi.rows() != big || choi.cols() != big {
            return Err(Error::invalid(format!(
                "Choi matrix must be {big}x{big}, got {}x{}",
                choi.rows(),
                choi.cols()
            )));
        }
        let e = eig_hermitian(choi)?;
        let kraus: Vec<ComplexMatrix> = (0..big)
            .filter(|&k| e.values[k] > CHOI_FLOOR)
            .map(|k| {
                let w = e.values[k].sqrt();
                ComplexMatrix::from_fn(output_dim, input_dim, |o, i| e.vectors[(i * output_dim + o, k)] * w)
            })
            .collect();
        Self::new(input_dim, output_dim, kraus)
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(dim, dim, vec![ComplexMatrix::identity(dim)]).expect("identity is CPTP")
    }

    /// `ρ ↦ (1 − p) ρ + p Tr(ρ) I/d`; `p = 1` is the fully depolarizing map.
    pub fn depolarizing(dim: usize, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid(format!("depolarizing strength {p} outside [0, 1]")));
        }
        let mut kraus = Vec::new();
        if p < 1.0 {
            kraus.push(ComplexMatrix::identity(dim).scale((1.0 - p).sqrt()));
        }
        if p > 0.0 {
            let w = (p / dim as f64).sqrt();
            for i in 0..dim {
                for j in 0..dim {
                    let mut e = ComplexMatrix::zeros(dim, dim);
                    e[(i, j)].re = w;
                    kraus.push(e);
                }
            }
        }
        Self::new(dim, dim, kraus)
    }

    /// Random channel with `kraus_count` operators from a Haar-like isometry.
    pub fn random<R: Rng + ?Sized>(
        rng: &mut R,
        input_dim: usize,
        output_dim: usize,
        kraus_count: usize,
    ) -> Result<Self> {
        if kraus_count == 0 || output_dim * kraus_count < input_dim {
            return Err(Error::invalid(format!(
                "{kraus_count} Kraus operators of size {output_dim}x{input_dim} cannot be trace preserving"
            )));
        }
        let v = random::isometry(rng, output_dim * kraus_count, input_dim);
        let kraus = (0..kraus_count)
            .map(|j| ComplexMatrix::from_fn(output_dim, input_dim, |o, i| v[(j * output_dim + o, i)]))
            .collect();
        Self::new(input_dim, output_dim, kraus)
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn choi(&self) -> &ComplexMatrix {
        &self.choi
    }

    /// `Σ K X K†` on an arbitrary input-space operator.
    pub fn apply_matrix(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != self.input_dim || x.cols() != self.input_dim {
            return Err(Error::invalid(format!(
                "channel expects {0}x{0} input, got {1}x{2}",
                self.input_dim,
                x.rows(),
                x.cols()
            )));
        }
        let mut out = ComplexMatrix::zeros(self.output_dim, self.output_dim);
        for k in &self.kraus {
            out.add_scaled(1.0, &k.sandwich(x));
        }
        Ok(out)
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        Ok(DensityMatrix::from_trusted(
            self.apply_matrix(rho.matrix())?.hermitian_part(),
        ))
    }

    /// The Hilbert–Schmidt adjoint `Y ↦ Σ K† Y K`.
    pub fn adjoint(&self, y: &ComplexMatrix) -> Result<ComplexMatrix> {
        if y.rows() != self.output_dim || y.cols() != self.output_dim {
            return Err(Error::invalid(format!(
                "adjoint expects {0}x{0} input, got {1}x{2}",
                self.output_dim,
                y.rows(),
                y.cols()
            )));
        }
        let mut out = ComplexMatrix::zeros(self.input_dim, self.input_dim);
        for k in &self.kraus {
            out.add_scaled(1.0, &k.dagger().sandwich(y));
        }
        Ok(out)
    }
}

/// Tracing out every site of `profile` not listed in `keep`, as a channel.
pub fn partial_trace_channel(profile: &DimensionProfile, keep: &[usize]) -> Result<Channel> {
    let (kept, traced, kept_dim, traced_dim) = profile.split_indices(keep)?;
    let total = profile.total_dim();
    let kraus = (0..traced_dim)
        .map(|t| {
            let mut k = ComplexMatrix::zeros(kept_dim, total);
            for g in (0..total).filter(|&g| traced[g] == t) {
                k[(kept[g], g)].re = 1.0;
            }
            k
        })
        .collect();
    Channel::new(total, kept_dim, kraus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densmat::{partial_trace, trace_norm};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_leaves_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho = random::density(&mut rng, 3);
        let out = Channel::identity(3).apply(&rho).unwrap();
        assert!(out.matrix().max_abs_diff(rho.matrix()) < 1e-14);
    }

    #[test]
    fn full_depolarizing_gives_maximally_mixed() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ch = Channel::depolarizing(2, 1.0).unwrap();
        for _ in 0..5 {
            let out = ch.apply(&random::density(&mut rng, 2)).unwrap();
            assert!(out.matrix().max_abs_diff(DensityMatrix::maximally_mixed(2).matrix()) < 1e-14);
        }
    }

    #[test]
    fn partial_trace_channel_matches_partial_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let profile = DimensionProfile::new(vec![2, 3, 2]).unwrap();
        let rho = random::density(&mut rng, 12);
        for keep in [vec![0], vec![1], vec![0, 2], vec![1, 2]] {
            let ch = partial_trace_channel(&profile, &keep).unwrap();
            let direct = partial_trace(rho.matrix(), &profile, &keep).unwrap();
            let via = ch.apply(&rho).unwrap();
            assert!(via.matrix().max_abs_diff(&direct) < 1e-10);
            assert!((via.matrix().trace().re - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn product_state_keeps_factor() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random::density(&mut rng, 2);
        let b = random::density(&mut rng, 2);
        let ch = partial_trace_channel(&DimensionProfile::uniform(2, 2).unwrap(), &[0]).unwrap();
        let out = ch.apply(&a.tensor(&b)).unwrap();
        assert!(out.matrix().max_abs_diff(a.matrix()) < 1e-12);
    }

    #[test]
    fn choi_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let ch = Channel::random(&mut rng, 2, 3, 2).unwrap();
        let back = Channel::from_choi(2, 3, ch.choi()).unwrap();
        let rho = random::density(&mut rng, 2);
        let a = ch.apply(&rho).unwrap();
        let b = back.apply(&rho).unwrap();
        assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-10);
    }

    #[test]
    fn adjoint_is_dual() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let ch = Channel::random(&mut rng, 3, 2, 3).unwrap();
        let x = random::hermitian(&mut rng, 3);
        let y = random::hermitian(&mut rng, 2);
        let lhs = ch.apply_matrix(&x).unwrap().re_inner(&y);
        let rhs = x.re_inner(&ch.adjoint(&y).unwrap());
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_trace_preserving() {
        let k = ComplexMatrix::identity(2).scale(0.9);
        assert!(matches!(Channel::new(2, 2, vec![k]), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn contracts_trace_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let ch = Channel::random(&mut rng, 2, 2, 3).unwrap();
        let a = random::density(&mut rng, 2);
        let b = random::density(&mut rng, 2);
        let before = trace_norm(&(a.matrix() - b.matrix())).unwrap();
        let after = trace_norm(&(ch.apply(&a).unwrap().matrix() - ch.apply(&b).unwrap().matrix())).unwrap();
        assert!(after <= before + 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let ch = Channel::depolarizing(2, 0.3).unwrap();
        let text = serde_json::to_string(&ch).unwrap();
        assert!(text.contains("\"in_dim\":2") && text.contains("\"kraus\""));
        let back: Channel = serde_json::from_str(&text).unwrap();
        assert_eq!(back, ch);
    }
}

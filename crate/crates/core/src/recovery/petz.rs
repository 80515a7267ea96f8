//! The Petz recovery map.

use crate::densmat::{matrix_function, ComplexMatrix, DensityMatrix, MatrixFn, EIGEN_FLOOR};
use crate::error::{Error, Result};

use super::channel::Channel;

/// Eigenvalues of `Λ(ref)` at or below this count as its kernel.
const SUPPORT_TOL: f64 = 1e-12;

/// Petz map of `ch` with respect to `reference`:
/// `Γ(X) = √R Λ†(N X N) √R` with `N = Λ(R)^{-1/2}` on the support of `Λ(R)`.
///
/// Operators supported on the kernel of `Λ(R)` are sent to `R` itself, which
/// makes `Γ` trace preserving everywhere while leaving it unchanged on the
/// support. `Γ(Λ(R)) = R` holds exactly.
pub fn petz_map(reference: &DensityMatrix, ch: &Channel) -> Result<Channel> {
    if reference.dim() != ch.input_dim() {
        return Err(Error::invalid(format!(
            "reference is {}-dimensional but the channel acts on dimension {}",
            reference.dim(),
            ch.input_dim()
        )));
    }
    let (din, dout) = (ch.input_dim(), ch.output_dim());
    let image = ch.apply_matrix(reference.matrix())?.hermitian_part();
    let e = crate::densmat::eig_hermitian(&image)?;
    let inv_sqrt = e.reconstruct_with(|l| if l > SUPPORT_TOL { 1.0 / l.sqrt() } else { 0.0 });
    let sqrt_ref = matrix_function(reference.matrix(), MatrixFn::Sqrt)?;

    let mut kraus: Vec<ComplexMatrix> = ch
        .kraus_ops()
        .iter()
        .map(|k| sqrt_ref.matmul(&k.dagger()).matmul(&inv_sqrt))
        .collect();

    // X ↦ Tr(P_ker X) · R, written as Kraus operators √r_a |a⟩⟨u_b|
    let kernel: Vec<usize> = (0..dout).filter(|&k| e.values[k] <= SUPPORT_TOL).collect();
    if !kernel.is_empty() {
        let re = reference.eigen()?;
        for a in (0..din).filter(|&a| re.values[a] > EIGEN_FLOOR) {
            let w = re.values[a].sqrt();
            for &b in &kernel {
                let k = ComplexMatrix::from_fn(din, dout, |i, j| re.vectors[(i, a)] * e.vectors[(j, b)].conj() * w);
                kraus.push(k);
            }
        }
    }
    Channel::new(dout, din, kraus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densmat::{random, DimensionProfile};
    use crate::recovery::partial_trace_channel;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn recovers_reference() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let reference = random::density(&mut rng, 3);
        let ch = Channel::random(&mut rng, 3, 2, 2).unwrap();
        let gamma = petz_map(&reference, &ch).unwrap();
        let back = gamma.apply(&ch.apply(&reference).unwrap()).unwrap();
        assert!(back.matrix().max_abs_diff(reference.matrix()) <= 1e-7);
    }

    #[test]
    fn identity_channel_gives_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let reference = random::density(&mut rng, 2);
        let gamma = petz_map(&reference, &Channel::identity(2)).unwrap();
        let x = random::density(&mut rng, 2);
        assert!(gamma.apply(&x).unwrap().matrix().max_abs_diff(x.matrix()) < 1e-10);
    }

    #[test]
    fn kernel_completion_keeps_trace() {
        // tracing out a product with a pure factor leaves a rank-deficient image
        let reference = DensityMatrix::basis(2, 0).tensor(&DensityMatrix::maximally_mixed(2));
        let ch = partial_trace_channel(&DimensionProfile::uniform(2, 2).unwrap(), &[0]).unwrap();
        let gamma = petz_map(&reference, &ch).unwrap();
        let out = gamma.apply(&DensityMatrix::basis(2, 1)).unwrap();
        assert!((out.matrix().trace().re - 1.0).abs() < 1e-12);
        assert!(out.matrix().max_abs_diff(reference.matrix()) < 1e-12);
    }

    #[test]
    fn rejects_wrong_dimension() {
        let ch = Channel::identity(3);
        assert!(matches!(
            petz_map(&DensityMatrix::maximally_mixed(2), &ch),
            Err(Error::InvalidInput(_))
        ));
    }
}

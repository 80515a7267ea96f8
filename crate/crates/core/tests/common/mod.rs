//! Seeded instance generators shared by the integration suites.
#![allow(dead_code)]

use ensembleq_core::densmat::{random, Complex64, ComplexMatrix, DensityMatrix};
use ensembleq_core::ensemble::Ensemble;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn plus() -> DensityMatrix {
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    DensityMatrix::pure(&[s, s]).unwrap()
}

pub fn zero_plus() -> Ensemble {
    Ensemble::uniform(vec![DensityMatrix::basis(2, 0), plus()]).unwrap()
}

pub fn h2(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

/// Members diagonal in one shared random basis, with random priors.
pub fn commuting_ensemble<R: Rng>(rng: &mut R, dim: usize, members: usize) -> Ensemble {
    let u = random::unitary(rng, dim);
    let probs = random::probabilities(rng, members);
    let states = (0..members)
        .map(|_| {
            let spectrum = random::probabilities(rng, dim);
            let m = u.matmul(&ComplexMatrix::from_diag(&spectrum)).matmul(&u.dagger());
            DensityMatrix::new(m.hermitian_part()).unwrap()
        })
        .collect::<Vec<_>>();
    Ensemble::new(probs.into_iter().zip(states).collect()).unwrap()
}

/// Two random mixed qubit states whose commutator has Frobenius norm at
/// least `min_commutator`.
pub fn noncommuting_pair<R: Rng>(rng: &mut R, min_commutator: f64) -> (DensityMatrix, DensityMatrix) {
    loop {
        let a = random::density(rng, 2);
        let b = random::density(rng, 2);
        if a.matrix().commutator(b.matrix()).frobenius_norm() >= min_commutator {
            return (a, b);
        }
    }
}

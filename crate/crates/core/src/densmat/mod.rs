//! Dense complex Hermitian matrix kernel: construction, tensor and
//! partial-trace algebra, spectral functions and distances.
//!
//! All information quantities are in bits. Eigenvalues at or below
//! [`EIGEN_FLOOR`] are treated as zero by logarithms and pseudo-inverses.

mod density;
mod eigen;
mod matrix;
mod profile;
pub mod random;

pub(crate) use density::{
    entropy_of_matrix, entropy_of_spectrum, matrix_function_from_eigen, relative_entropy_of_matrices,
    root_fidelity_of_matrices,
};
pub use density::{
    fidelity, fidelity_with, matrix_function, relative_entropy, trace_norm, von_neumann_entropy, DensityMatrix,
    FidelityConvention, MatrixFn, EIGEN_FLOOR, VALIDITY_TOL,
};
pub use eigen::{eig_hermitian, HermitianEigen, HERMITIAN_TOL};
pub use matrix::{ComplexMatrix, MatrixJson};
pub use profile::{embed_site, partial_trace, tensor, tensor_power, DimensionProfile};

pub use num_complex::Complex64;

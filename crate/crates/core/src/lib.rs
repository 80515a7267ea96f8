//! Quantumness of quantum-state ensembles measured through broadcast
//! extensions.
//!
//! The central quantity is the n-copy Holevo gap: the smallest Holevo
//! quantity reachable by any family of n-party states whose single-site
//! marginals reproduce the ensemble, minus the one-copy Holevo quantity. It
//! vanishes exactly for commuting (classical) ensembles. Around it sit the
//! supporting pieces: a dense Hermitian kernel ([`densmat`]), ensembles and
//! classical broadcasting ([`ensemble`]), the extension optimizer
//! ([`extopt`]), channels, the Petz map and the qubit Alberti–Uhlmann test
//! ([`recovery`]), and accessible information ([`accinfo`]).

pub mod densmat;
mod error;
pub mod par;

pub use error::{Error, Result};
pub mod accinfo;
pub mod ensemble;
pub mod extopt;
pub mod recovery;

//! Prime-order group abstraction with two interchangeable backends: a
//! production Ristretto255 backend and a tiny Schnorr subgroup whose
//! discrete logs can be solved by brute force in tests.

mod backend;
mod shuffle;
mod tracker;

pub use backend::{tiny_discrete_log, GroupBackend, RistrettoBackend, TinyBackend, TINY_ORDER};
pub use shuffle::{shuffle, verify_shuffle, ShuffleTranscript};
pub use tracker::{
    make_tracker, prove_ownership, rerandomize, verify_ownership, verify_ownership_bytes,
    OwnershipProof, Tracker,
};

/// Errors from group element handling and tracker construction.
#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("scalar must be nonzero")]
    ZeroScalar,
    #[error("byte string does not encode a group element")]
    MalformedElement,
    #[error("byte string does not encode a scalar")]
    MalformedScalar,
    #[error("expected {expected} bytes, got {got}")]
    WrongLength { expected: usize, got: usize },
}

/// Draws a uniformly random nonzero scalar.
pub fn random_nonzero_scalar<B: GroupBackend, R: rand::RngCore>(rng: &mut R) -> B::Scalar {
    loop {
        let s = B::random_scalar(rng);
        if !B::scalar_is_zero(&s) {
            return s;
        }
    }
}

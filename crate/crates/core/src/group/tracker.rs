//! Proposer trackers: blinded commitments to a long-term secret that third
//! parties can re-randomize without changing the secret, plus a sigma-protocol
//! proof of ownership bound to a context string.

use rand::RngCore;

use crate::digest::{hash_tagged_parts, Digest};

use super::{random_nonzero_scalar, GroupBackend, GroupError};

/// A pair (base, secret * base). Re-randomizing multiplies both halves by
/// the same blinding factor, which preserves the secret while changing the
/// encoding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tracker<B: GroupBackend> {
    pub base: B::Element,
    pub keyed: B::Element,
}

impl<B: GroupBackend> Tracker<B> {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = B::element_to_bytes(&self.base);
        out.extend(B::element_to_bytes(&self.keyed));
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, GroupError> {
        if bytes.len() != 2 * B::ELEMENT_LEN {
            return Err(GroupError::WrongLength {
                expected: 2 * B::ELEMENT_LEN,
                got: bytes.len(),
            });
        }
        Ok(Tracker {
            base: B::element_from_bytes(&bytes[..B::ELEMENT_LEN])?,
            keyed: B::element_from_bytes(&bytes[B::ELEMENT_LEN..])?,
        })
    }

    /// True iff `secret` is the discrete log of `keyed` with respect to
    /// `base`.
    pub fn is_owned_by(&self, secret: &B::Scalar) -> bool {
        B::mul(&self.base, secret) == self.keyed
    }
}

/// Builds a fresh tracker for `secret` under blinding factor `blind`; both
/// must be nonzero.
pub fn make_tracker<B: GroupBackend>(
    secret: &B::Scalar,
    blind: &B::Scalar,
) -> Result<Tracker<B>, GroupError> {
    if B::scalar_is_zero(secret) || B::scalar_is_zero(blind) {
        return Err(GroupError::ZeroScalar);
    }
    let base = B::mul(&B::generator(), blind);
    let keyed = B::mul(&base, secret);
    Ok(Tracker { base, keyed })
}

/// Multiplies both tracker halves by nonzero `factor`. The owner's secret is
/// unchanged; the encoding is unlinkable to the input without the factor.
pub fn rerandomize<B: GroupBackend>(
    tracker: &Tracker<B>,
    factor: &B::Scalar,
) -> Result<Tracker<B>, GroupError> {
    if B::scalar_is_zero(factor) {
        return Err(GroupError::ZeroScalar);
    }
    Ok(Tracker {
        base: B::mul(&tracker.base, factor),
        keyed: B::mul(&tracker.keyed, factor),
    })
}

/// Non-interactive proof of knowledge of a tracker's secret, bound to the
/// exact tracker encoding and a caller-supplied context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OwnershipProof<B: GroupBackend> {
    pub commitment: B::Element,
    pub response: B::Scalar,
    pub challenge: Digest,
}

impl<B: GroupBackend> OwnershipProof<B> {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = B::element_to_bytes(&self.commitment);
        out.extend(B::scalar_to_bytes(&self.response));
        out.extend(self.challenge.as_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, GroupError> {
        let expected = B::ELEMENT_LEN + B::SCALAR_LEN + crate::digest::DIGEST_LEN;
        if bytes.len() != expected {
            return Err(GroupError::WrongLength {
                expected,
                got: bytes.len(),
            });
        }
        let commitment = B::element_from_bytes(&bytes[..B::ELEMENT_LEN])?;
        let response = B::scalar_from_bytes(&bytes[B::ELEMENT_LEN..B::ELEMENT_LEN + B::SCALAR_LEN])?;
        let challenge = Digest(
            bytes[B::ELEMENT_LEN + B::SCALAR_LEN..]
                .try_into()
                .expect("length checked above"),
        );
        Ok(OwnershipProof {
            commitment,
            response,
            challenge,
        })
    }
}

fn challenge_digest<B: GroupBackend>(
    tracker: &Tracker<B>,
    commitment: &B::Element,
    context: &[u8],
) -> Digest {
    hash_tagged_parts(
        "tracker-ownership",
        &[
            &B::element_to_bytes(&tracker.base),
            &B::element_to_bytes(&tracker.keyed),
            &B::element_to_bytes(commitment),
            context,
        ],
    )
}

/// Produces an ownership proof using `secret` as the witness. The proof only
/// verifies if `secret` actually owns the tracker; proving never checks.
///
/// A zero challenge would verify under any witness, so the prover redraws
/// its nonce until the derived challenge is nonzero (only ever observable on
/// the tiny backend).
pub fn prove_ownership<B: GroupBackend, R: RngCore>(
    tracker: &Tracker<B>,
    secret: &B::Scalar,
    context: &[u8],
    rng: &mut R,
) -> OwnershipProof<B> {
    loop {
        let nonce = random_nonzero_scalar::<B, _>(rng);
        let commitment = B::mul(&tracker.base, &nonce);
        let challenge = challenge_digest::<B>(tracker, &commitment, context);
        let c = B::scalar_from_digest(&challenge);
        if B::scalar_is_zero(&c) {
            continue;
        }
        let response = B::scalar_sub(&nonce, &B::scalar_mul(&c, secret));
        return OwnershipProof {
            commitment,
            response,
            challenge,
        };
    }
}

/// Checks an ownership proof against the exact tracker it was made for and
/// the same context. Never panics; any mismatch returns false.
pub fn verify_ownership<B: GroupBackend>(
    tracker: &Tracker<B>,
    proof: &OwnershipProof<B>,
    context: &[u8],
) -> bool {
    let expected = challenge_digest::<B>(tracker, &proof.commitment, context);
    if expected != proof.challenge {
        return false;
    }
    let c = B::scalar_from_digest(&expected);
    if B::scalar_is_zero(&c) {
        return false;
    }
    // commitment = response * base + challenge * keyed  <=>  nonce = response + c * secret
    let lhs = B::add(
        &B::mul(&tracker.base, &proof.response),
        &B::mul(&tracker.keyed, &c),
    );
    lhs == proof.commitment
}

/// Byte-level verification entry point: malformed encodings simply fail.
pub fn verify_ownership_bytes<B: GroupBackend>(
    tracker_bytes: &[u8],
    proof_bytes: &[u8],
    context: &[u8],
) -> bool {
    let (Ok(tracker), Ok(proof)) = (
        Tracker::<B>::from_bytes(tracker_bytes),
        OwnershipProof::<B>::from_bytes(proof_bytes),
    ) else {
        return false;
    };
    verify_ownership::<B>(&tracker, &proof, context)
}

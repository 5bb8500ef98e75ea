use curve25519_dalek::ristretto::{CompressedRistretto, RistrettoPoint};
use curve25519_dalek::scalar::Scalar as DalekScalar;
use curve25519_dalek::traits::Identity;
use rand::RngCore;

use crate::digest::Digest;

use super::GroupError;

/// A prime-order group written additively: elements, scalars modulo the
/// group order, and canonical fixed-length encodings for both.
pub trait GroupBackend: Clone + std::fmt::Debug + PartialEq + Eq + 'static {
    type Scalar: Clone + std::fmt::Debug + PartialEq + Eq;
    type Element: Clone + std::fmt::Debug + PartialEq + Eq;

    const ELEMENT_LEN: usize;
    const SCALAR_LEN: usize;

    fn generator() -> Self::Element;
    fn identity() -> Self::Element;
    fn add(a: &Self::Element, b: &Self::Element) -> Self::Element;
    fn mul(e: &Self::Element, s: &Self::Scalar) -> Self::Element;

    fn scalar_from_u64(x: u64) -> Self::Scalar;
    /// Reduces a digest modulo the group order; used for Fiat-Shamir
    /// challenges.
    fn scalar_from_digest(d: &Digest) -> Self::Scalar;
    fn scalar_add(a: &Self::Scalar, b: &Self::Scalar) -> Self::Scalar;
    fn scalar_sub(a: &Self::Scalar, b: &Self::Scalar) -> Self::Scalar;
    fn scalar_mul(a: &Self::Scalar, b: &Self::Scalar) -> Self::Scalar;
    fn scalar_is_zero(s: &Self::Scalar) -> bool;
    fn random_scalar<R: RngCore>(rng: &mut R) -> Self::Scalar;

    fn element_to_bytes(e: &Self::Element) -> Vec<u8>;
    fn element_from_bytes(bytes: &[u8]) -> Result<Self::Element, GroupError>;
    fn scalar_to_bytes(s: &Self::Scalar) -> Vec<u8>;
    fn scalar_from_bytes(bytes: &[u8]) -> Result<Self::Scalar, GroupError>;
}

/// Production backend: the Ristretto255 prime-order group (order ~2^252).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RistrettoBackend;

impl GroupBackend for RistrettoBackend {
    type Scalar = DalekScalar;
    type Element = RistrettoPoint;

    const ELEMENT_LEN: usize = 32;
    const SCALAR_LEN: usize = 32;

    fn generator() -> RistrettoPoint {
        curve25519_dalek::constants::RISTRETTO_BASEPOINT_POINT
    }

    fn identity() -> RistrettoPoint {
        RistrettoPoint::identity()
    }

    fn add(a: &RistrettoPoint, b: &RistrettoPoint) -> RistrettoPoint {
        a + b
    }

    fn mul(e: &RistrettoPoint, s: &DalekScalar) -> RistrettoPoint {
        e * s
    }

    fn scalar_from_u64(x: u64) -> DalekScalar {
        DalekScalar::from(x)
    }

    fn scalar_from_digest(d: &Digest) -> DalekScalar {
        DalekScalar::from_bytes_mod_order(*d.as_bytes())
    }

    fn scalar_add(a: &DalekScalar, b: &DalekScalar) -> DalekScalar {
        a + b
    }

    fn scalar_sub(a: &DalekScalar, b: &DalekScalar) -> DalekScalar {
        a - b
    }

    fn scalar_mul(a: &DalekScalar, b: &DalekScalar) -> DalekScalar {
        a * b
    }

    fn scalar_is_zero(s: &DalekScalar) -> bool {
        *s == DalekScalar::ZERO
    }

    fn random_scalar<R: RngCore>(rng: &mut R) -> DalekScalar {
        let mut wide = [0u8; 64];
        rng.fill_bytes(&mut wide);
        DalekScalar::from_bytes_mod_order_wide(&wide)
    }

    fn element_to_bytes(e: &RistrettoPoint) -> Vec<u8> {
        e.compress().as_bytes().to_vec()
    }

    fn element_from_bytes(bytes: &[u8]) -> Result<RistrettoPoint, GroupError> {
        if bytes.len() != Self::ELEMENT_LEN {
            return Err(GroupError::WrongLength {
                expected: Self::ELEMENT_LEN,
                got: bytes.len(),
            });
        }
        CompressedRistretto::from_slice(bytes)
            .map_err(|_| GroupError::MalformedElement)?
            .decompress()
            .ok_or(GroupError::MalformedElement)
    }

    fn scalar_to_bytes(s: &DalekScalar) -> Vec<u8> {
        s.to_bytes().to_vec()
    }

    fn scalar_from_bytes(bytes: &[u8]) -> Result<DalekScalar, GroupError> {
        if bytes.len() != Self::SCALAR_LEN {
            return Err(GroupError::WrongLength {
                expected: Self::SCALAR_LEN,
                got: bytes.len(),
            });
        }
        let arr: [u8; 32] = bytes.try_into().unwrap();
        Option::from(DalekScalar::from_canonical_bytes(arr)).ok_or(GroupError::MalformedScalar)
    }
}

/// Order of the tiny test subgroup.
pub const TINY_ORDER: u64 = 3863;
/// Field modulus for the tiny backend; 7727 = 2 * 3863 + 1 is a safe prime.
const TINY_MODULUS: u64 = 7727;
/// 4 = 2^2 is a quadratic residue, so it generates the order-3863 subgroup.
const TINY_GENERATOR: u64 = 4;

/// Test backend: the order-3863 subgroup of Z_7727^*. Discrete logs are
/// solvable by exhaustive search, which the oracle tests rely on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TinyBackend;

fn tiny_pow(base: u64, exp: u64) -> u64 {
    let mut acc: u128 = 1;
    let mut base = base as u128;
    let mut exp = exp;
    let m = TINY_MODULUS as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc as u64
}

impl GroupBackend for TinyBackend {
    type Scalar = u64;
    type Element = u64;

    const ELEMENT_LEN: usize = 8;
    const SCALAR_LEN: usize = 8;

    fn generator() -> u64 {
        TINY_GENERATOR
    }

    fn identity() -> u64 {
        1
    }

    fn add(a: &u64, b: &u64) -> u64 {
        (*a as u128 * *b as u128 % TINY_MODULUS as u128) as u64
    }

    fn mul(e: &u64, s: &u64) -> u64 {
        tiny_pow(*e, *s % TINY_ORDER)
    }

    fn scalar_from_u64(x: u64) -> u64 {
        x % TINY_ORDER
    }

    fn scalar_from_digest(d: &Digest) -> u64 {
        d.to_u64() % TINY_ORDER
    }

    fn scalar_add(a: &u64, b: &u64) -> u64 {
        (a + b) % TINY_ORDER
    }

    fn scalar_sub(a: &u64, b: &u64) -> u64 {
        (a + TINY_ORDER - b % TINY_ORDER) % TINY_ORDER
    }

    fn scalar_mul(a: &u64, b: &u64) -> u64 {
        a * b % TINY_ORDER
    }

    fn scalar_is_zero(s: &u64) -> bool {
        *s == 0
    }

    fn random_scalar<R: RngCore>(rng: &mut R) -> u64 {
        // rejection sampling over the next power of two keeps the draw
        // unbiased
        loop {
            let x = rng.next_u64() & 0xfff;
            if x < TINY_ORDER {
                return x;
            }
        }
    }

    fn element_to_bytes(e: &u64) -> Vec<u8> {
        e.to_be_bytes().to_vec()
    }

    fn element_from_bytes(bytes: &[u8]) -> Result<u64, GroupError> {
        if bytes.len() != Self::ELEMENT_LEN {
            return Err(GroupError::WrongLength {
                expected: Self::ELEMENT_LEN,
                got: bytes.len(),
            });
        }
        let x = u64::from_be_bytes(bytes.try_into().unwrap());
        // subgroup membership: x in [1, p) and x^q = 1
        if x == 0 || x >= TINY_MODULUS || tiny_pow(x, TINY_ORDER) != 1 {
            return Err(GroupError::MalformedElement);
        }
        Ok(x)
    }

    fn scalar_to_bytes(s: &u64) -> Vec<u8> {
        s.to_be_bytes().to_vec()
    }

    fn scalar_from_bytes(bytes: &[u8]) -> Result<u64, GroupError> {
        if bytes.len() != Self::SCALAR_LEN {
            return Err(GroupError::WrongLength {
                expected: Self::SCALAR_LEN,
                got: bytes.len(),
            });
        }
        let x = u64::from_be_bytes(bytes.try_into().unwrap());
        if x >= TINY_ORDER {
            return Err(GroupError::MalformedScalar);
        }
        Ok(x)
    }
}

/// Solves `target = s * base` for `s` by exhaustive search; test oracle for
/// the tiny backend only.
pub fn tiny_discrete_log(base: u64, target: u64) -> Option<u64> {
    let mut acc = 1u64;
    for s in 0..TINY_ORDER {
        if acc == target {
            return Some(s);
        }
        acc = TinyBackend::add(&acc, &base);
    }
    None
}

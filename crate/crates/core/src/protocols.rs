//! Diffie-Hellman, ElGamal and an ECDSA-style signature over the group of
//! roots of unity.
//!
//! Everything runs on exact exponents. The one exception is the signature
//! commitment, whose exponent is read back through the continuous logarithm
//! (`to_numeric` followed by [`recover_exponent`]); parameters are checked
//! against [`exponent_recovery_bound`] so that step cannot fail.
//!
//! None of this is secure: exact elements store their own discrete log.

use rand::RngCore;
use ruint::aliases::U256;
use sha2::{Digest, Sha256};

use crate::contlog::{ceil_log2, exponent_recovery_bound, recover_exponent, Tolerance};
use crate::error::{Error, Result};
use crate::group::{ExactElement, GroupParams};

/// Uniform exponent in `[lo, n)` by rejection from `ceil(log2 n)`-bit strings.
pub fn sample_exponent<R: RngCore + ?Sized>(n: u64, lo: u64, rng: &mut R) -> u64 {
    debug_assert!(lo < n);
    let bits = ceil_log2(n);
    let mask = if bits == 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    };
    loop {
        let candidate = rng.next_u64() & mask;
        if candidate >= lo && candidate < n {
            return candidate;
        }
    }
}

/// The public half of a key: `h = g^x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PublicKey {
    h: ExactElement,
}

impl PublicKey {
    pub fn new(h: ExactElement) -> Self {
        PublicKey { h }
    }

    pub fn params(&self) -> &GroupParams {
        self.h.params()
    }

    pub fn element(&self) -> &ExactElement {
        &self.h
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KeyPair {
    x: u64,
    h: ExactElement,
}

impl KeyPair {
    /// Builds a key pair from a known private exponent.
    pub fn from_private(params: &GroupParams, x: u64) -> Result<Self> {
        if params.order() < 2 {
            return Err(Error::InvalidOrder {
                n: params.order(),
                min: 2,
            });
        }
        if x == 0 || x >= params.order() {
            return Err(Error::Consistency(format!(
                "private exponent {x} outside [1, {})",
                params.order()
            )));
        }
        Ok(KeyPair {
            x,
            h: params.generator().pow(x as i128),
        })
    }

    pub fn params(&self) -> &GroupParams {
        self.h.params()
    }

    pub fn private_exponent(&self) -> u64 {
        self.x
    }

    pub fn public(&self) -> PublicKey {
        PublicKey { h: self.h }
    }
}

pub fn keygen<R: RngCore + ?Sized>(params: &GroupParams, rng: &mut R) -> Result<KeyPair> {
    if params.order() < 2 {
        return Err(Error::InvalidOrder {
            n: params.order(),
            min: 2,
        });
    }
    let x = sample_exponent(params.order(), 1, rng);
    KeyPair::from_private(params, x)
}

pub fn dh_public(own: &KeyPair) -> ExactElement {
    own.h
}

/// `S = (their public)^x`. Both sides arrive at `g^{ab}`.
pub fn dh_shared(own: &KeyPair, their_public: &ExactElement) -> Result<ExactElement> {
    if own.params() != their_public.params() {
        return Err(Error::ParamsMismatch);
    }
    Ok(their_public.pow(own.x as i128))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ciphertext {
    pub c1: ExactElement,
    pub c2: ExactElement,
}

/// Encrypts with a caller-chosen ephemeral exponent `y`.
pub fn elgamal_encrypt_with(pk: &PublicKey, m: &ExactElement, y: u64) -> Result<Ciphertext> {
    if pk.params() != m.params() {
        return Err(Error::ParamsMismatch);
    }
    let params = pk.params();
    Ok(Ciphertext {
        c1: params.generator().pow(y as i128),
        c2: m.mul(&pk.h.pow(y as i128))?,
    })
}

pub fn elgamal_encrypt<R: RngCore + ?Sized>(
    pk: &PublicKey,
    m: &ExactElement,
    rng: &mut R,
) -> Result<Ciphertext> {
    let n = pk.params().order();
    if n < 2 {
        return Err(Error::InvalidOrder { n, min: 2 });
    }
    let y = sample_exponent(n, 1, rng);
    elgamal_encrypt_with(pk, m, y)
}

pub fn elgamal_decrypt(sk: &KeyPair, ct: &Ciphertext) -> Result<ExactElement> {
    if ct.c1.params() != sk.params() || ct.c2.params() != sk.params() {
        return Err(Error::ParamsMismatch);
    }
    ct.c2.mul(&ct.c1.pow(sk.x as i128).inv())
}

/// Big-endian bytes as an element of `Z_n`.
pub fn encode_message(bytes: &[u8], params: &GroupParams) -> Result<ExactElement> {
    let n = params.order();
    let too_large = Error::MessageTooLarge { n };
    let significant = match bytes.iter().position(|&b| b != 0) {
        Some(i) => &bytes[i..],
        None => &[][..],
    };
    if significant.len() > 8 {
        return Err(too_large);
    }
    let value = significant
        .iter()
        .fold(0u64, |acc, &b| (acc << 8) | b as u64);
    if value >= n {
        return Err(too_large);
    }
    Ok(params.element(value as i128))
}

/// Minimal big-endian bytes of the exponent; the identity decodes to no bytes.
pub fn decode_message(m: &ExactElement) -> Vec<u8> {
    let bytes = m.exponent().to_be_bytes();
    let first = bytes.iter().position(|&b| b != 0).unwrap_or(bytes.len());
    bytes[first..].to_vec()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Signature {
    pub r: u64,
    pub s: u64,
}

/// SHA-256 of the message as a big-endian integer, reduced mod `n`.
pub fn hash_to_scalar(message: &[u8], n: u64) -> u64 {
    let digest = Sha256::digest(message);
    let value = U256::from_be_slice(&digest);
    (value % U256::from(n)).to::<u64>()
}

fn check_signature_params(params: &GroupParams) -> Result<()> {
    let n = params.order();
    if n < 5 || !primal::is_prime(n) {
        return Err(Error::CompositeOrder { n });
    }
    if !exponent_recovery_bound(n, params.precision()) {
        return Err(Error::InsufficientPrecision {
            n,
            p: params.precision(),
        });
    }
    Ok(())
}

fn inverse_mod_prime(params: &GroupParams, a: u64) -> u64 {
    let n = params.order();
    let mut base = a % n;
    let mut exp = n - 2;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = params.mul_mod(acc, base);
        }
        base = params.mul_mod(base, base);
        exp >>= 1;
    }
    acc
}

/// Exponent of a commitment element, read through its fixed-point angle.
fn commitment_exponent(c: &ExactElement) -> Result<u64> {
    recover_exponent(&c.to_numeric(), Tolerance::DEFAULT)
}

pub fn sign<R: RngCore + ?Sized>(sk: &KeyPair, message: &[u8], rng: &mut R) -> Result<Signature> {
    let params = sk.params();
    check_signature_params(params)?;
    let n = params.order();
    let e = hash_to_scalar(message, n);
    loop {
        let w = sample_exponent(n, 1, rng);
        let r = commitment_exponent(&params.generator().pow(w as i128))?;
        if r == 0 {
            continue;
        }
        let xr = params.mul_mod(sk.x, r);
        let sum = ((e as u128 + xr as u128) % n as u128) as u64;
        let s = params.mul_mod(inverse_mod_prime(params, w), sum);
        if s != 0 {
            return Ok(Signature { r, s });
        }
    }
}

pub fn verify(pk: &PublicKey, message: &[u8], sig: &Signature) -> Result<bool> {
    let params = pk.params();
    check_signature_params(params)?;
    let n = params.order();
    if sig.r == 0 || sig.r >= n || sig.s == 0 || sig.s >= n {
        return Ok(false);
    }
    let e = hash_to_scalar(message, n);
    let s_inv = inverse_mod_prime(params, sig.s);
    let u1 = params.mul_mod(e, s_inv);
    let u2 = params.mul_mod(sig.r, s_inv);
    let v = params
        .generator()
        .pow(u1 as i128)
        .mul(&pk.h.pow(u2 as i128))?;
    Ok(commitment_exponent(&v)? == sig.r)
}

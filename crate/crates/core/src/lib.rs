//! Roots of unity, the continuous logarithm on the unit circle, and toy
//! Diffie-Hellman / ElGamal / ECDSA-style protocols built on them, with a
//! harness that measures how easily the logarithm is inverted.
//!
//! The group `{e^{2πik/n}}` is carried either exactly (the exponent `k`) or
//! as a fixed-point angle. The protocols are correct but not secure; see
//! [`cryptanalysis`] for the measurements.

pub mod contlog;
pub mod cryptanalysis;
mod error;
pub mod formats;
pub mod group;
pub mod protocols;
pub mod spectral;
pub mod wire;

pub use contlog::{
    exponent_recovery_bound, log_branches, principal_log, recover_exponent, ContinuousLogValue,
    Tolerance,
};
pub use error::{Error, Result};
pub use group::{ExactElement, GroupParams, NumericElement, MAX_PRECISION};
pub use protocols::{
    decode_message, dh_public, dh_shared, elgamal_decrypt, elgamal_encrypt, encode_message, keygen,
    sign, verify, Ciphertext, KeyPair, PublicKey, Signature,
};

/// 2^61 - 1, a Mersenne prime.
pub const DEFAULT_N: u64 = (1 << 61) - 1;
pub const DEFAULT_G: u64 = 3;
pub const DEFAULT_P: u32 = 128;

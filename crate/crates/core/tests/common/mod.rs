//! Independent reference computations in arbitrary-precision rationals.
//! Nothing here calls into the crate's arithmetic.

#![allow(dead_code)]

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

fn two_pow(p: u32) -> BigInt {
    BigInt::one() << p
}

/// Round half to even of a rational.
fn round_half_even(x: &BigRational) -> BigInt {
    let floor = x.floor();
    let frac = x - &floor;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let f = floor.to_integer();
    if frac > half || (frac == half && (&f % 2) != BigInt::zero()) {
        f + 1
    } else {
        f
    }
}

/// round(2^p · k / n) mod 2^p.
pub fn to_numeric(n: u64, k: u64, p: u32) -> u128 {
    let x = BigRational::new(BigInt::from(k) * two_pow(p), BigInt::from(n));
    let t = round_half_even(&x) % two_pow(p);
    t.to_u128().unwrap()
}

/// Recovery by rational arithmetic: `None` when x is farther than 1/2 - δ
/// from the nearest integer.
pub fn recover(n: u64, p: u32, t: u128, delta: (u64, u64)) -> Option<u64> {
    let x = BigRational::new(BigInt::from(t) * BigInt::from(n), two_pow(p));
    let nearest = round_half_even(&x);
    let distance = (x - BigRational::from_integer(nearest.clone())).abs();
    let limit = BigRational::new(BigInt::one(), BigInt::from(2))
        - BigRational::new(BigInt::from(delta.0), BigInt::from(delta.1));
    if distance > limit {
        return None;
    }
    (nearest % BigInt::from(n)).to_u64()
}

/// Euclid's algorithm.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `a · b mod n` through big integers.
pub fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((BigUint::from(a) * BigUint::from(b)) % BigUint::from(n))
        .to_u64()
        .unwrap()
}

/// `base^e mod n` by repeated multiplication (small e only).
pub fn repeated_pow_exponent(base_k: u64, e: u64, n: u64) -> u64 {
    let mut acc = 0u64;
    for _ in 0..e {
        acc = (acc + base_k) % n;
    }
    acc
}

pub const M61: u64 = (1 << 61) - 1;

//! The cyclic group of n-th roots of unity.
//!
//! Elements exist in two forms. [`ExactElement`] stores the exponent `k` of
//! `e^{2πik/n}` and is what the protocols compute with. [`NumericElement`]
//! stores the angle as a `p`-bit fixed-point fraction of a full turn; it is
//! produced from an exact element by a single rounding step in
//! [`ExactElement::to_numeric`], and that rounding is the only source of
//! angular error anywhere in the crate.

use std::f64::consts::TAU;
use std::fmt;

use num_integer::Integer;
use ruint::aliases::U256;

use crate::error::{Error, Result};

/// Widest supported angle: a `u128` holds a full `p = 128` turn fraction and
/// wraps at exactly one turn.
pub const MAX_PRECISION: u32 = 128;

/// Group order `n`, generator exponent `g` and angular precision `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroupParams {
    n: u64,
    g: u64,
    p: u32,
}

impl GroupParams {
    /// Validates `(n, g, p)`. The generator `e^{2πig/n}` must be primitive.
    pub fn new(n: u64, g: u64, p: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidOrder { n, min: 1 });
        }
        if p == 0 || p > MAX_PRECISION {
            return Err(Error::InvalidPrecision {
                p,
                max: MAX_PRECISION,
            });
        }
        if g >= n {
            return Err(Error::InvalidGenerator { n, g });
        }
        // gcd(0, 1) = 1, so the trivial group's g = 0 passes here.
        let gcd = g.gcd(&n);
        if gcd != 1 {
            return Err(Error::NotPrimitive { n, g, gcd });
        }
        Ok(GroupParams { n, g, p })
    }

    /// Same precision, but with the generator `r_1 = e^{2πi/n}` (or the
    /// identity when `n = 1`).
    pub fn with_unit_generator(n: u64, p: u32) -> Result<Self> {
        Self::new(n, if n == 1 { 0 } else { 1 }, p)
    }

    pub fn order(&self) -> u64 {
        self.n
    }

    pub fn generator_exponent(&self) -> u64 {
        self.g
    }

    pub fn precision(&self) -> u32 {
        self.p
    }

    /// The element `e^{2πik/n}` with `k` reduced to its canonical residue.
    pub fn element(&self, k: i128) -> ExactElement {
        ExactElement {
            params: *self,
            k: k.rem_euclid(self.n as i128) as u64,
        }
    }

    pub fn identity(&self) -> ExactElement {
        ExactElement {
            params: *self,
            k: 0,
        }
    }

    pub fn generator(&self) -> ExactElement {
        ExactElement {
            params: *self,
            k: self.g,
        }
    }

    /// A numeric element at raw angle `t`, reduced modulo one turn.
    pub fn numeric(&self, t: u128) -> NumericElement {
        NumericElement {
            params: *self,
            t: t & self.turn_mask(),
        }
    }

    /// `Q = r^k · P` for a base point `P`. The protocols use `P = identity`.
    pub fn offset_point(&self, k: i128, base: &ExactElement) -> Result<ExactElement> {
        self.element(k).mul(base)
    }

    /// `2^p - 1`, the mask that reduces a raw angle modulo one turn.
    pub(crate) fn turn_mask(&self) -> u128 {
        if self.p == 128 {
            u128::MAX
        } else {
            (1u128 << self.p) - 1
        }
    }

    pub(crate) fn mul_mod(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.n as u128) as u64
    }
}

impl fmt::Display for GroupParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} g={} p={}", self.n, self.g, self.p)
    }
}

/// A root of unity held as its exponent `k ∈ [0, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExactElement {
    params: GroupParams,
    k: u64,
}

impl ExactElement {
    pub fn params(&self) -> &GroupParams {
        &self.params
    }

    pub fn exponent(&self) -> u64 {
        self.k
    }

    pub fn is_identity(&self) -> bool {
        self.k == 0
    }

    pub fn mul(&self, other: &ExactElement) -> Result<ExactElement> {
        if self.params != other.params {
            return Err(Error::ParamsMismatch);
        }
        // Both exponents are below n, so one conditional subtraction reduces
        // the sum; wrapping covers n close to u64::MAX.
        let (sum, overflow) = self.k.overflowing_add(other.k);
        let k = if overflow || sum >= self.params.n {
            sum.wrapping_sub(self.params.n)
        } else {
            sum
        };
        Ok(ExactElement {
            params: self.params,
            k,
        })
    }

    pub fn inv(&self) -> ExactElement {
        ExactElement {
            params: self.params,
            k: (self.params.n - self.k) % self.params.n,
        }
    }

    /// `self^e` for any integer `e`, negative exponents included.
    pub fn pow(&self, e: i128) -> ExactElement {
        let e = e.rem_euclid(self.params.n as i128) as u64;
        ExactElement {
            params: self.params,
            k: self.params.mul_mod(self.k, e),
        }
    }

    /// Rounds `2^p · k / n` half-to-even onto the fixed-point circle.
    /// The angular error is at most `π / 2^p`.
    pub fn to_numeric(&self) -> NumericElement {
        let p = self.params.p as usize;
        let n = U256::from(self.params.n);
        let scaled = U256::from(self.k) << p;
        let mut q = scaled / n;
        let r = scaled % n;
        let twice = r << 1;
        if twice > n || (twice == n && q.bit(0)) {
            q += U256::from(1u8);
        }
        let t = q & U256::from(self.params.turn_mask());
        NumericElement {
            params: self.params,
            t: t.to::<u128>(),
        }
    }
}

impl fmt::Display for ExactElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r^{} (mod {})", self.k, self.params.n)
    }
}

/// A point of the unit circle at angle `2π · t / 2^p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NumericElement {
    params: GroupParams,
    t: u128,
}

impl NumericElement {
    pub fn params(&self) -> &GroupParams {
        &self.params
    }

    /// Angle in turn units, `0 <= t < 2^p`.
    pub fn turns(&self) -> u128 {
        self.t
    }

    /// Exact modular addition of angles. No rounding happens here; any
    /// error in the product is the sum of the operands' own errors.
    pub fn mul(&self, other: &NumericElement) -> Result<NumericElement> {
        if self.params != other.params {
            return Err(Error::ParamsMismatch);
        }
        Ok(NumericElement {
            params: self.params,
            t: self.t.wrapping_add(other.t) & self.params.turn_mask(),
        })
    }

    /// Angle in radians, `[0, 2π)`.
    pub fn angle(&self) -> f64 {
        TAU * (self.t as f64 / (self.params.p as f64).exp2())
    }

    /// `(cos θ, sin θ)`.
    pub fn complex_value(&self) -> (f64, f64) {
        let (s, c) = self.angle().sin_cos();
        (c, s)
    }
}

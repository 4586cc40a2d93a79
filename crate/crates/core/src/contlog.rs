//! The continuous logarithm on the fixed-point circle.
//!
//! `L(Q) = i(θ + 2πb)` for every integer branch `b`. Values are kept in turn
//! units: `principal_t / 2^p` turns plus `branch` whole turns. Exponent
//! recovery inverts `L(r^k) = i·2πk/n` with exact integer arithmetic.

use std::fmt;
use std::str::FromStr;

use ruint::aliases::U256;

use crate::error::{Error, Result};
use crate::group::{GroupParams, NumericElement};

/// A rational tolerance `δ = num/den` in `[0, 1/2)`.
///
/// Recovery accepts an angle only when it sits within `1/2 - δ` of a root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Tolerance {
    num: u64,
    den: u64,
}

impl Tolerance {
    pub const DEFAULT: Tolerance = Tolerance { num: 1, den: 5 };
    pub const ZERO: Tolerance = Tolerance { num: 0, den: 1 };

    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 || 2 * (num as u128) >= den as u128 {
            return Err(Error::InvalidTolerance { num, den });
        }
        Ok(Tolerance { num, den })
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::DEFAULT
    }
}

impl fmt::Display for Tolerance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Tolerance {
    type Err = Error;

    /// Parses `a/b` (or a bare integer, which can only be `0`).
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            line: 1,
            reason: format!("tolerance `{s}` is not a rational `a/b`"),
        };
        let (num, den) = match s.split_once('/') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (s.trim(), "1"),
        };
        let num = num.parse::<u64>().map_err(|_| bad())?;
        let den = den.parse::<u64>().map_err(|_| bad())?;
        Tolerance::new(num, den)
    }
}

/// One value of the multi-valued logarithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ContinuousLogValue {
    params: GroupParams,
    principal_t: u128,
    branch: i64,
}

impl ContinuousLogValue {
    pub fn params(&self) -> &GroupParams {
        &self.params
    }

    /// Principal angle `θ` in turn units, `0 <= principal_t < 2^p`.
    pub fn principal_turns(&self) -> u128 {
        self.principal_t
    }

    pub fn branch(&self) -> i64 {
        self.branch
    }

    /// The imaginary part `θ + 2πb` in turn units, i.e.
    /// `principal_t + branch · 2^p`. Exact for every supported precision.
    pub fn total_turns(&self) -> i128 {
        // p = 128 does not fit; callers at that width use the two fields.
        assert!(
            self.params.precision() < 127,
            "total_turns needs p < 127 to fit an i128"
        );
        self.principal_t as i128 + ((self.branch as i128) << self.params.precision())
    }

    /// The imaginary part `θ + 2πb` in radians.
    pub fn imaginary_part(&self) -> f64 {
        let p = self.params.precision() as f64;
        std::f64::consts::TAU * (self.principal_t as f64 / p.exp2() + self.branch as f64)
    }

    /// Same principal angle on another branch.
    pub fn on_branch(&self, branch: i64) -> ContinuousLogValue {
        ContinuousLogValue { branch, ..*self }
    }
}

/// `L(Q)` on the principal branch: a relabeling of the stored angle.
pub fn principal_log(q: &NumericElement) -> ContinuousLogValue {
    ContinuousLogValue {
        params: *q.params(),
        principal_t: q.turns(),
        branch: 0,
    }
}

/// The `2B + 1` values on branches `-B..=B`, in branch order.
pub fn log_branches(q: &NumericElement, window: u32) -> Vec<ContinuousLogValue> {
    let principal = principal_log(q);
    let b = window as i64;
    (-b..=b).map(|branch| principal.on_branch(branch)).collect()
}

/// Recovers `k` from a numeric element by rounding `x = t·n / 2^p` to the
/// nearest integer (ties to even). Fails with [`Error::AmbiguousAngle`] when
/// `x` lies farther than `1/2 - δ` from every integer.
pub fn recover_exponent(q: &NumericElement, tolerance: Tolerance) -> Result<u64> {
    let params = q.params();
    let p = params.precision() as usize;
    let n = params.order();

    let product = U256::from(q.turns()) * U256::from(n);
    let one_turn = U256::from(1u8) << p;
    let floor = product >> p;
    let frac = product & (one_turn - U256::from(1u8));
    let half = one_turn >> 1;

    let rounded = if frac > half || (frac == half && floor.bit(0)) {
        floor + U256::from(1u8)
    } else {
        floor
    };
    let distance = frac.min(one_turn - frac);

    // distance / 2^p <= 1/2 - num/den  <=>  2·den·distance <= (den - 2·num)·2^p
    let lhs = U256::from(2u8) * U256::from(tolerance.den) * distance;
    let rhs = U256::from(tolerance.den - 2 * tolerance.num) * one_turn;
    if lhs > rhs {
        return Err(Error::AmbiguousAngle { t: q.turns() });
    }
    Ok((rounded % U256::from(n)).to::<u64>())
}

/// Smallest `b` with `2^b >= n`.
pub fn ceil_log2(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

/// Whether `p >= ceil(log2 n) + 2`, the precision at which a single rounding
/// by `to_numeric` can never defeat recovery with `δ <= 1/5`.
pub fn exponent_recovery_bound(n: u64, p: u32) -> bool {
    p >= ceil_log2(n) + 2
}

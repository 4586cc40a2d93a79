//! Attack experiments against exponent recovery.
//!
//! Randomized experiments are reproducible from a single `u64` seed. Trial
//! `i` of any experiment draws from `ChaCha20Rng::seed_from_u64(seed)` with
//! its stream set to `i`, so rows of a sweep share the same random draws and
//! results do not depend on how rows are scheduled across threads.

use std::fmt;
use std::io::{self, Write};
use std::ops::RangeInclusive;

use num_integer::Integer;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::contlog::{recover_exponent, Tolerance};
use crate::error::{Error, Result};
use crate::group::{ExactElement, GroupParams, NumericElement};
use crate::protocols::sample_exponent;

/// Largest order [`exhaustive_search`] will scan.
pub const EXHAUSTIVE_LIMIT: u64 = 1 << 24;

/// Seed used by the command-line experiments when none is given.
pub const DEFAULT_SEED: u64 = 7;
pub const DEFAULT_TRIALS: u64 = 10_000;

/// The hypothesis the reports are measured against.
pub const HARDNESS_CLAIM: &str =
    "hypothesis: recovering k from Q = r^k on the circle is hard (multi-valued log, angular ambiguity, error accumulation)";

/// The random stream for trial `index` under `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttackReport {
    pub attack_name: String,
    pub n: u64,
    pub g: u64,
    pub p: u32,
    pub delta: Tolerance,
    pub trials: u64,
    pub successes: u64,
    /// Total operations across all trials; see [`AttackReport::mean_ops`].
    pub total_ops: u64,
    pub notes: String,
}

impl AttackReport {
    fn empty(name: &str, params: &GroupParams, delta: Tolerance) -> Self {
        AttackReport {
            attack_name: name.to_string(),
            n: params.order(),
            g: params.generator_exponent(),
            p: params.precision(),
            delta,
            trials: 0,
            successes: 0,
            total_ops: 0,
            notes: String::new(),
        }
    }

    fn record(&mut self, success: bool, ops: u64) {
        self.trials += 1;
        self.successes += success as u64;
        self.total_ops += ops;
    }

    pub fn mean_ops(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.total_ops as f64 / self.trials as f64
        }
    }

    pub fn success_rate(&self) -> Rate {
        Rate::new(self.successes, self.trials)
    }
}

impl fmt::Display for AttackReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "attack: {}", self.attack_name)?;
        writeln!(
            f,
            "params: n={} g={} p={} delta={}",
            self.n, self.g, self.p, self.delta
        )?;
        writeln!(f, "trials: {}", self.trials)?;
        writeln!(f, "successes: {}", self.successes)?;
        writeln!(f, "success_rate: {}", self.success_rate())?;
        writeln!(f, "total_ops: {}", self.total_ops)?;
        writeln!(f, "mean_ops: {}", self.mean_ops())?;
        write!(f, "notes: {}", self.notes)
    }
}

/// An exact success fraction, printed as `a/b` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rate {
    successes: u64,
    trials: u64,
}

impl Rate {
    pub fn new(successes: u64, trials: u64) -> Self {
        Rate { successes, trials }
    }

    /// Reduced `(numerator, denominator)`; an empty rate is `0/1`.
    pub fn reduced(&self) -> (u64, u64) {
        if self.trials == 0 {
            return (0, 1);
        }
        let d = self.successes.gcd(&self.trials);
        (self.successes / d, self.trials / d)
    }

    pub fn is_one(&self) -> bool {
        self.trials > 0 && self.successes == self.trials
    }

    pub fn as_f64(&self) -> f64 {
        let (a, b) = self.reduced();
        a as f64 / b as f64
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.reduced();
        write!(f, "{a}/{b}")
    }
}

/// One row of a sweep: the swept value (precision or chain length) and its
/// outcome counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepRow {
    pub variable: u64,
    pub successes: u64,
    pub trials: u64,
}

impl SweepRow {
    pub fn success_rate(&self) -> Rate {
        Rate::new(self.successes, self.trials)
    }
}

pub const CSV_HEADER: &str = "variable,successes,trials,success_rate";

pub fn write_csv<W: Write>(rows: &[SweepRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(
            out,
            "{},{},{},{}",
            row.variable,
            row.successes,
            row.trials,
            row.success_rate()
        )?;
    }
    Ok(())
}

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("csv is ascii")
}

/// What the attacker observes of a public element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PublicView {
    /// The stored exponent itself.
    Exact,
    /// The fixed-point angle from `to_numeric`.
    Numeric,
}

/// A single inversion attempt: direct inversion of the angle.
///
/// `target` is the ground truth; the attacker sees it through `view`. Success
/// means the recovered exponent names the same group element.
pub fn attack_direct(target: &ExactElement, view: PublicView, delta: Tolerance) -> AttackReport {
    let params = target.params();
    let mut report = AttackReport::empty("direct", params, delta);
    match view {
        PublicView::Exact => {
            report.record(true, 0);
            report.notes =
                "exact representation stores the exponent; recovered with 0 group operations"
                    .to_string();
        }
        PublicView::Numeric => {
            let recovered = recover_exponent(&target.to_numeric(), delta);
            report.record(recovered == Ok(target.exponent()), 1);
            report.notes = "one exponent-recovery operation per trial".to_string();
        }
    }
    report
}

/// The outcome of a search: the exponent found and the operations spent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Recovery {
    pub k: u64,
    pub ops: u64,
}

/// Wrap-around distance between two angles in turn units.
pub fn angular_distance(a: &NumericElement, b: &NumericElement) -> u128 {
    let mask = a.params().turn_mask();
    let d = a.turns().wrapping_sub(b.turns()) & mask;
    let back = b.turns().wrapping_sub(a.turns()) & mask;
    d.min(back)
}

/// Scans every `k ∈ [0, n)` for the root nearest to `public`. Ties go to
/// the smallest `k`.
pub fn exhaustive_search(public: &NumericElement) -> Result<Recovery> {
    let params = public.params();
    let n = params.order();
    if n > EXHAUSTIVE_LIMIT {
        return Err(Error::OrderTooLarge {
            n,
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    let mut best = (u128::MAX, 0u64);
    for k in 0..n {
        let candidate = params.element(k as i128).to_numeric();
        let d = angular_distance(&candidate, public);
        if d < best.0 {
            best = (d, k);
        }
    }
    Ok(Recovery { k: best.1, ops: n })
}

/// Exhaustive search against the numeric view of `target`.
pub fn attack_exhaustive(target: &ExactElement) -> Result<AttackReport> {
    let params = target.params();
    let found = exhaustive_search(&target.to_numeric())?;
    let mut report = AttackReport::empty("exhaustive", params, Tolerance::ZERO);
    report.record(found.k == target.exponent(), found.ops);
    report.notes = "scans all n roots for the nearest angle".to_string();
    Ok(report)
}

fn merge(into: &mut AttackReport, trial: &AttackReport) {
    into.trials += trial.trials;
    into.successes += trial.successes;
    into.total_ops += trial.total_ops;
}

/// Direct attack against `trials` uniformly random secret exponents.
pub fn direct_attack_campaign(
    params: &GroupParams,
    view: PublicView,
    trials: u64,
    delta: Tolerance,
    seed: u64,
) -> AttackReport {
    let mut report = AttackReport::empty("direct", params, delta);
    for i in 0..trials {
        let k = sample_exponent(params.order(), 0, &mut trial_rng(seed, i));
        let single = attack_direct(&params.element(k as i128), view, delta);
        merge(&mut report, &single);
        report.notes = single.notes;
    }
    report.notes = format!(
        "{}; measured: {}/{} secrets recovered, mean {} operations per trial; {}",
        report.notes,
        report.successes,
        report.trials,
        report.mean_ops(),
        HARDNESS_CLAIM
    );
    report
}

/// Exhaustive search against `trials` uniformly random secret exponents.
pub fn exhaustive_attack_campaign(
    params: &GroupParams,
    trials: u64,
    seed: u64,
) -> Result<AttackReport> {
    let mut report = AttackReport::empty("exhaustive", params, Tolerance::ZERO);
    for i in 0..trials {
        let k = sample_exponent(params.order(), 0, &mut trial_rng(seed, i));
        merge(&mut report, &attack_exhaustive(&params.element(k as i128))?);
    }
    report.notes = format!(
        "scans all n roots for the nearest angle; measured: {}/{} secrets recovered, mean {} operations per trial; {}",
        report.successes,
        report.trials,
        report.mean_ops(),
        HARDNESS_CLAIM
    );
    Ok(report)
}

/// Draws `chain` uniform elements, multiplies them both exactly and through
/// their numeric images, and checks that recovery on the numeric product
/// lands on the exact product.
fn chain_trial(params: &GroupParams, chain: u64, delta: Tolerance, rng: &mut ChaCha20Rng) -> bool {
    let n = params.order();
    let mut exact = params.identity();
    let mut numeric = params.numeric(0);
    for _ in 0..chain {
        let e = params.element(sample_exponent(n, 0, rng) as i128);
        exact = exact.mul(&e).expect("same params");
        numeric = numeric.mul(&e.to_numeric()).expect("same params");
    }
    recover_exponent(&numeric, delta) == Ok(exact.exponent())
}

fn run_row(
    params: &GroupParams,
    variable: u64,
    chain: u64,
    trials: u64,
    delta: Tolerance,
    seed: u64,
) -> SweepRow {
    let successes = (0..trials)
        .filter(|&i| chain_trial(params, chain, delta, &mut trial_rng(seed, i)))
        .count() as u64;
    SweepRow {
        variable,
        successes,
        trials,
    }
}

/// Success rate of a single round trip `k -> to_numeric -> recover` as the
/// precision varies. Rows come back in increasing `p`.
pub fn precision_sweep(
    n: u64,
    p_range: RangeInclusive<u32>,
    trials_per_p: u64,
    delta: Tolerance,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    if p_range.is_empty() {
        return Err(Error::Parse {
            line: 1,
            reason: "precision range is empty".to_string(),
        });
    }
    let params = p_range
        .map(|p| GroupParams::with_unit_generator(n, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(params
        .par_iter()
        .map(|gp| run_row(gp, gp.precision() as u64, 1, trials_per_p, delta, seed))
        .collect())
}

/// Success rate of recovery on a product of `m` numeric elements, for each
/// `m` in `chain_lengths`. Uses the default tolerance; `m = 1` is the same
/// computation as a [`precision_sweep`] row at this `p`.
pub fn accumulation_experiment(
    n: u64,
    p: u32,
    chain_lengths: &[u64],
    trials: u64,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    let params = GroupParams::with_unit_generator(n, p)?;
    Ok(chain_lengths
        .par_iter()
        .map(|&m| run_row(&params, m, m, trials, Tolerance::DEFAULT, seed))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: u64, p: u32) -> GroupParams {
        GroupParams::with_unit_generator(n, p).unwrap()
    }

    #[test]
    fn rate_formatting() {
        assert_eq!(Rate::new(0, 0).to_string(), "0/1");
        assert_eq!(Rate::new(10, 10).to_string(), "1/1");
        assert_eq!(Rate::new(250, 1000).to_string(), "1/4");
        assert_eq!(Rate::new(0, 7).to_string(), "0/1");
    }

    #[test]
    fn csv_layout() {
        let rows = [
            SweepRow {
                variable: 4,
                successes: 3,
                trials: 12,
            },
            SweepRow {
                variable: 5,
                successes: 12,
                trials: 12,
            },
        ];
        assert_eq!(
            to_csv(&rows),
            "variable,successes,trials,success_rate\n4,3,12,1/4\n5,12,12,1/1\n"
        );
    }

    #[test]
    fn direct_attack_on_exact_view_is_free() {
        let g = params(1 << 20, 22);
        let r = attack_direct(&g.element(777), PublicView::Exact, Tolerance::DEFAULT);
        assert_eq!((r.trials, r.successes, r.total_ops), (1, 1, 0));
    }

    #[test]
    fn direct_attack_below_bound_collides() {
        let g = params(16, 3);
        let successes: u64 = (0..16)
            .map(|k| {
                attack_direct(&g.element(k), PublicView::Numeric, Tolerance::DEFAULT).successes
            })
            .sum();
        assert!(successes < 16);
        // x = 2t is always an integer here, so only even k come back.
        assert_eq!(successes, 8);
    }

    #[test]
    fn exhaustive_examples() {
        let g = params(1, 4);
        let r = attack_exhaustive(&g.identity()).unwrap();
        assert_eq!((r.successes, r.total_ops), (1, 1));

        let big = params(1 << 25, 30);
        assert_eq!(
            exhaustive_search(&big.numeric(5)),
            Err(Error::OrderTooLarge {
                n: 1 << 25,
                limit: 1 << 24
            })
        );
    }

    #[test]
    fn exhaustive_matches_direct_recovery_n4096() {
        let g = params(4096, 12);
        for k in (0..4096).step_by(97) {
            let q = g.element(k).to_numeric();
            let found = exhaustive_search(&q).unwrap();
            assert_eq!(found.ops, 4096);
            assert_eq!(Ok(found.k), recover_exponent(&q, Tolerance::DEFAULT));
        }
    }

    #[test]
    fn exhaustive_campaign_costs_n_per_trial() {
        let g = params(300, 11);
        let r = exhaustive_attack_campaign(&g, 50, 1).unwrap();
        assert_eq!((r.trials, r.successes, r.total_ops), (50, 50, 50 * 300));
    }

    #[test]
    fn angular_distance_wraps() {
        let g = params(4, 8);
        assert_eq!(angular_distance(&g.numeric(1), &g.numeric(255)), 2);
        assert_eq!(angular_distance(&g.numeric(0), &g.numeric(128)), 128);
        let w = params(4, 128);
        assert_eq!(angular_distance(&w.numeric(u128::MAX), &w.numeric(1)), 2);
    }

    #[test]
    fn precision_sweep_examples() {
        let rows = precision_sweep(256, 4..=10, 300, Tolerance::DEFAULT, 5).unwrap();
        assert_eq!(
            rows.iter().map(|r| r.variable).collect::<Vec<_>>(),
            (4..=10).collect::<Vec<_>>()
        );
        assert!(rows.last().unwrap().success_rate().is_one());
        assert!(!rows[0].success_rate().is_one());

        let rows = precision_sweep(2, 1..=6, 100, Tolerance::DEFAULT, 5).unwrap();
        assert!(rows.iter().all(|r| r.success_rate().is_one()));

        #[allow(clippy::reversed_empty_ranges)]
        let empty = precision_sweep(2, 5..=4, 1, Tolerance::DEFAULT, 0);
        assert!(empty.is_err());
    }

    #[test]
    fn accumulation_m1_equals_sweep_row() {
        let sweep = precision_sweep(1000, 7..=12, 500, Tolerance::DEFAULT, 99).unwrap();
        for row in sweep {
            let acc = accumulation_experiment(1000, row.variable as u32, &[1], 500, 99).unwrap();
            assert_eq!(acc[0].successes, row.successes, "p = {}", row.variable);
        }
    }

    #[test]
    fn three_cubed_roots_still_recover() {
        // t = 3·85 = 255, x = 255·3/256 = 2.988 -> 3 ≡ 0, within 0.3.
        let g = params(3, 8);
        let one = g.element(1).to_numeric();
        let cube = one.mul(&one).unwrap().mul(&one).unwrap();
        assert_eq!(recover_exponent(&cube, Tolerance::DEFAULT), Ok(0));
    }

    #[test]
    fn accumulation_is_exact_when_n_divides_the_turn() {
        // n = 2^10, p = 12: every root is exactly representable, so chains of
        // any length recover.
        let rows = accumulation_experiment(1 << 10, 12, &[1, 4, 16, 64], 200, 1).unwrap();
        assert!(rows.iter().all(|r| r.success_rate().is_one()));
    }

    #[test]
    fn accumulation_fails_once_errors_pile_up() {
        // n = 1021 (prime near 2^10), p = 12: each rounding error is up to half
        // a turn unit, the tolerance admits 1.2 units of total drift.
        let rows = accumulation_experiment(1021, 12, &[1, 2, 16, 64], 2000, 1).unwrap();
        assert!(rows[0].success_rate().is_one());
        // Two half-unit errors sum to at most one unit.
        assert!(rows[1].success_rate().is_one());
        assert!(rows[2].successes < rows[2].trials);
        assert!(rows[3].successes < rows[2].successes);
    }
}

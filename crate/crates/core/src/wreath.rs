//! Fixed-point proportions `fix_n` for the n-th iterated wreath product of
//! `Z/dZ` acting on the leaves of the depth-`n` `d`-ary rooted tree.
//!
//! An element is a labeling of internal tree nodes by `Z/dZ`, each label
//! cyclically shifting the children below it. A leaf is fixed exactly when
//! some root-to-leaf path carries only zero labels, which gives the
//! recursion `fix_0 = 1`, `fix_k = (1 - (1 - fix_{k-1})^d) / d`. The
//! recursion is validated against [`fix_enumerate_oracle`], which tests
//! leaf-fixing directly on every group element.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, ToPrimitive};

use crate::precise::{self, Interval};
use crate::rng::SplitMix64;
use crate::{Error, Rat, Result};

/// Largest `n` for which exact rational mode is offered; denominators grow
/// doubly exponentially past this.
pub const EXACT_HORIZON: u32 = 16;

/// Budget, in bits, for the denominator of an exact `fix_n` value.
pub const EXACT_BITS_LIMIT: u64 = 1 << 26;

/// How a fixed-point proportion is represented.
#[derive(Debug, Clone, PartialEq)]
pub enum FixValue {
    Exact(Rat),
    /// Midpoint of a certified enclosure plus its half-width.
    Approx { value: f64, abs_err: f64 },
}

impl FixValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            FixValue::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            FixValue::Approx { value, .. } => *value,
        }
    }
}

/// One entry of a [`FixSequence`].
#[derive(Debug, Clone, PartialEq)]
pub struct FixEntry {
    pub d: u64,
    pub n: u32,
    pub value: FixValue,
}

/// `fix_n` for `n = 0..=max_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct FixSequence {
    pub d: u64,
    pub entries: Vec<FixEntry>,
}

/// Evaluation mode for [`fix_sequence`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixMode {
    Rational,
    Float,
}

fn check_d(d: u64) -> Result<()> {
    if d < 2 {
        Err(Error::BadRange("wreath base requires d >= 2"))
    } else {
        Ok(())
    }
}

/// Exact `fix_n` values for `n = 0..=max_n` by the recursion.
pub fn fix_rationals(d: u64, max_n: u32) -> Result<Vec<Rat>> {
    check_d(d)?;
    if max_n > EXACT_HORIZON {
        return Err(Error::ExactnessHorizon { n: max_n, max: EXACT_HORIZON });
    }
    // denominator bits grow like log2(d) * (d^n - 1)/(d - 1)
    let projected = libm::log2(d as f64) * (libm::pow(d as f64, max_n as f64) - 1.0)
        / (d as f64 - 1.0);
    if projected > EXACT_BITS_LIMIT as f64 {
        return Err(Error::ExactSizeExceeded {
            bits: projected as u64,
            limit: EXACT_BITS_LIMIT,
        });
    }
    let dr = Rat::from_integer(d.into());
    let mut out = vec![Rat::one()];
    for _ in 0..max_n {
        let prev = out.last().unwrap();
        let miss = Rat::one() - prev;
        let mut pow = Rat::one();
        for _ in 0..d {
            pow *= &miss;
        }
        out.push((Rat::one() - pow) / &dr);
    }
    debug_assert!(out.windows(2).all(|w| w[1] < w[0]));
    Ok(out)
}

/// Certified enclosures of `fix_n` for `n = 0..=max_n`, usable for any `n`.
///
/// Each recursion step is evaluated in interval arithmetic and rounded
/// outward at `prec` bits, so widths stay near `2^-prec` regardless of depth
/// (the step map is a contraction on `[0, 1]`).
pub fn fix_intervals(d: u64, max_n: u32, prec: u32) -> Result<Vec<Interval>> {
    check_d(d)?;
    let one = Interval::point(Rat::one());
    let dr = Rat::from_integer(d.into());
    let mut out = vec![one.clone()];
    for _ in 0..max_n {
        let prev = out.last().unwrap();
        let miss = one.sub(prev);
        let pow = miss.powi(d as u32);
        let next = one.sub(&pow).scale(&dr.recip()).round_out(prec);
        out.push(next);
    }
    Ok(out)
}

/// `fix_n` in the requested mode.
pub fn fix_exact(d: u64, n: u32, mode: FixMode) -> Result<FixEntry> {
    check_d(d)?;
    match mode {
        FixMode::Rational => {
            let vals = fix_rationals(d, n)?;
            Ok(FixEntry { d, n, value: FixValue::Exact(vals[n as usize].clone()) })
        }
        FixMode::Float => {
            let iv = fix_intervals(d, n, precise::DEFAULT_PREC)?;
            let last = &iv[n as usize];
            let value = last.mid_f64();
            let half_width = (last.width() / Rat::from_integer(2.into()))
                .to_f64()
                .unwrap_or(f64::INFINITY);
            // conversion to f64 adds at most one ulp on top of the enclosure
            let abs_err = half_width + value.abs() * f64::EPSILON;
            Ok(FixEntry { d, n, value: FixValue::Approx { value, abs_err } })
        }
    }
}

/// Whole sequence `0..=max_n` in one mode.
pub fn fix_sequence(d: u64, max_n: u32, mode: FixMode) -> Result<FixSequence> {
    check_d(d)?;
    let entries = match mode {
        FixMode::Rational => fix_rationals(d, max_n)?
            .into_iter()
            .enumerate()
            .map(|(n, v)| FixEntry { d, n: n as u32, value: FixValue::Exact(v) })
            .collect(),
        FixMode::Float => {
            let mut out = Vec::with_capacity(max_n as usize + 1);
            for n in 0..=max_n {
                out.push(fix_exact(d, n, FixMode::Float)?);
            }
            out
        }
    };
    Ok(FixSequence { d, entries })
}

/// Brute-force proportion of wreath-product elements fixing a leaf, by
/// enumerating every labeling of the internal tree nodes and testing
/// leaf-fixing directly.
pub fn fix_enumerate_oracle(d: u64, n: u32) -> Result<Rat> {
    check_d(d)?;
    if n == 0 {
        return Ok(Rat::one());
    }
    // internal node count (d^n - 1)/(d - 1), level order
    let mut internal: u64 = 0;
    let mut level: u64 = 1;
    for _ in 0..n {
        internal += level;
        level = level.checked_mul(d).ok_or(Error::TableLimitExceeded {
            q: u64::MAX,
            limit: 1 << 20,
        })?;
    }
    let order = checked_pow_u64(d, internal).ok_or(Error::TableLimitExceeded {
        q: u64::MAX,
        limit: 1 << 20,
    })?;
    if order > 1 << 20 {
        return Err(Error::TableLimitExceeded { q: order, limit: 1 << 20 });
    }
    let mut labels = vec![0u8; internal as usize];
    let mut fixing: u64 = 0;
    for code in 0..order {
        let mut c = code;
        for l in labels.iter_mut() {
            *l = (c % d) as u8;
            c /= d;
        }
        if has_zero_path(&labels, d, n, 0, 0) {
            fixing += 1;
        }
    }
    Ok(Rat::new(fixing.into(), order.into()))
}

fn checked_pow_u64(base: u64, exp: u64) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

fn has_zero_path(labels: &[u8], d: u64, n: u32, node: u64, depth: u32) -> bool {
    if labels[node as usize] != 0 {
        return false;
    }
    if depth == n - 1 {
        return true;
    }
    (0..d).any(|i| has_zero_path(labels, d, n, node * d + 1 + i, depth + 1))
}

/// Monte-Carlo estimate of `fix_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub successes: u64,
    pub samples: u64,
    pub estimate: f64,
    pub std_err: f64,
}

/// Leaf-fixing successes over the half-open global sample range
/// `[start, end)`. Each sample owns its RNG stream derived from
/// `(seed, index)`, so partitioning the range across workers cannot change
/// the outcome.
pub fn mc_successes(d: u64, n: u32, start: u64, end: u64, seed: u64) -> u64 {
    let mut successes = 0;
    for index in start..end {
        let mut rng = SplitMix64::for_index(seed, index);
        if sample_has_fixed_leaf(&mut rng, d, n) {
            successes += 1;
        }
    }
    successes
}

/// One lazy sample: draw labels depth-first only along the explored
/// frontier; every drawn label is an independent uniform draw, so the
/// short-circuiting does not bias the estimate.
fn sample_has_fixed_leaf(rng: &mut SplitMix64, d: u64, n: u32) -> bool {
    if n == 0 {
        return true;
    }
    if rng.below(d) != 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    (0..d).any(|_| sample_has_fixed_leaf(rng, d, n - 1))
}

/// Seeded Monte-Carlo estimate with binomial standard error.
pub fn fix_mc(d: u64, n: u32, samples: u64, seed: u64) -> Result<McEstimate> {
    check_d(d)?;
    if samples == 0 {
        return Err(Error::BadRange("samples must be >= 1"));
    }
    let successes = mc_successes(d, n, 0, samples, seed);
    Ok(assemble_mc(successes, samples))
}

/// Combine success counts (e.g., from parallel workers) into an estimate.
pub fn assemble_mc(successes: u64, samples: u64) -> McEstimate {
    let estimate = successes as f64 / samples as f64;
    let std_err = libm::sqrt(estimate * (1.0 - estimate) / samples as f64);
    McEstimate { successes, samples, estimate, std_err }
}

/// The two-sided fixed-point band: `2/((d-1)(n+4+ln n))` below,
/// `2/((d-1)(n+1))` above.
#[derive(Debug, Clone, PartialEq)]
pub struct JuulBand {
    pub d: u64,
    pub n: u32,
    pub lower: Interval,
    pub upper: Interval,
}

/// Evaluate the band at certified precision. Natural logarithm; `n >= 1`.
pub fn juul_band(d: u64, n: u32, prec: u32) -> Result<JuulBand> {
    check_d(d)?;
    if n == 0 {
        return Err(Error::BadRange("band requires n >= 1"));
    }
    let dm1 = Rat::from_integer((d - 1).into());
    let ln_n = precise::ln_u64(n as u64, prec);
    let shifted = ln_n.add(&Interval::from_u64(n as u64 + 4));
    let lower = Interval::point(Rat::from_integer(2.into()))
        .div(&shifted.scale(&dm1))
        .round_out(prec);
    let upper = Interval::point(Rat::new(2.into(), (dm1 * Rat::from_integer((n as u64 + 1).into())).to_integer()));
    debug_assert_eq!(lower.certainly_lt(&upper), Some(true));
    Ok(JuulBand { d, n, lower, upper })
}

impl JuulBand {
    /// Strict containment of an enclosed `fix_n` value, or `None` when the
    /// enclosures overlap and a higher precision is needed.
    pub fn contains(&self, fix: &Interval) -> Option<bool> {
        let above = self.lower.certainly_lt(fix)?;
        let below = fix.certainly_lt(&self.upper)?;
        Some(above && below)
    }
}

/// Decide `lower < fix_n < upper`, escalating precision until the
/// enclosures separate. The band edges are transcendental while `fix_n` is
/// rational, so exact ties are impossible and the escalation terminates.
pub fn band_verdict(d: u64, n: u32) -> Result<bool> {
    for prec in [precise::DEFAULT_PREC, 256, 512, 1024] {
        let band = juul_band(d, n, prec)?;
        let fix = fix_intervals(d, n, prec)?;
        if let Some(v) = band.contains(&fix[n as usize]) {
            return Ok(v);
        }
    }
    unreachable!("band comparison undecided at 1024 bits")
}

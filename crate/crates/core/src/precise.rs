//! Certified high-precision evaluation of the transcendental expressions in
//! the bound formulas.
//!
//! Every quantity is an [`Interval`] with exact rational endpoints that is
//! guaranteed to contain the true real value. Elementary functions (`ln`,
//! `2^x`, roots) are evaluated by series or integer root extraction with an
//! explicit truncation-error term folded into the upper endpoint, then both
//! endpoints are rounded outward to a bounded number of bits. Comparisons
//! between enclosed values are therefore decisions, not approximations: an
//! inequality is reported only when the enclosures separate.

use core::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::Rat;

/// Working precision, in fractional bits, used by default throughout the
/// crate. 128 bits comfortably exceeds the 80-bit evaluation target.
pub const DEFAULT_PREC: u32 = 128;

/// Which logarithm a formula should be evaluated with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogBase {
    Natural,
    Ten,
}

impl LogBase {
    pub fn as_str(&self) -> &'static str {
        match self {
            LogBase::Natural => "natural",
            LogBase::Ten => "ten",
        }
    }
}

/// A closed interval `[lo, hi]` with exact rational endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct Interval {
    lo: Rat,
    hi: Rat,
}

impl Interval {
    pub fn new(lo: Rat, hi: Rat) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn point(x: Rat) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn zero() -> Self {
        Interval::point(Rat::zero())
    }

    pub fn from_u64(x: u64) -> Self {
        Interval::point(Rat::from_integer(x.into()))
    }

    pub fn lo(&self) -> &Rat {
        &self.lo
    }

    pub fn hi(&self) -> &Rat {
        &self.hi
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Rat {
        (&self.lo + &self.hi) / Rat::from_integer(2.into())
    }

    pub fn mid_f64(&self) -> f64 {
        self.mid().to_f64().unwrap_or(f64::NAN)
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval::new(&self.lo + &other.lo, &self.hi + &other.hi)
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        Interval::new(&self.lo - &other.hi, &self.hi - &other.lo)
    }

    pub fn neg(&self) -> Interval {
        Interval::new(-self.hi.clone(), -self.lo.clone())
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        let cands = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let mut lo = cands[0].clone();
        let mut hi = cands[0].clone();
        for c in &cands[1..] {
            if *c < lo {
                lo = c.clone();
            }
            if *c > hi {
                hi = c.clone();
            }
        }
        Interval::new(lo, hi)
    }

    /// Reciprocal; the interval must not contain zero.
    pub fn recip(&self) -> Interval {
        assert!(
            self.lo.is_positive() || self.hi.is_negative(),
            "recip of an interval containing zero"
        );
        Interval::new(self.hi.recip(), self.lo.recip())
    }

    pub fn div(&self, other: &Interval) -> Interval {
        self.mul(&other.recip())
    }

    pub fn scale(&self, k: &Rat) -> Interval {
        if k.is_negative() {
            Interval::new(&self.hi * k, &self.lo * k)
        } else {
            Interval::new(&self.lo * k, &self.hi * k)
        }
    }

    /// `self^e` for an interval known to be nonnegative.
    pub fn powi(&self, e: u32) -> Interval {
        debug_assert!(!self.lo.is_negative());
        let mut lo = Rat::one();
        let mut hi = Rat::one();
        for _ in 0..e {
            lo *= &self.lo;
            hi *= &self.hi;
        }
        Interval::new(lo, hi)
    }

    /// Round both endpoints outward to dyadics with about `prec` significant
    /// bits, bounding representation growth without losing containment.
    pub fn round_out(&self, prec: u32) -> Interval {
        Interval::new(dyadic_floor(&self.lo, prec), dyadic_ceil(&self.hi, prec))
    }

    /// Is the enclosed value of `self` certainly strictly less than the
    /// enclosed value of `other`? `None` when the enclosures overlap.
    pub fn certainly_lt(&self, other: &Interval) -> Option<bool> {
        if self.hi < other.lo {
            Some(true)
        } else if self.lo >= other.hi {
            Some(false)
        } else {
            None
        }
    }

    /// Is the exact rational `x` certainly strictly less than the enclosed
    /// value?
    pub fn certainly_gt_rat(&self, x: &Rat) -> Option<bool> {
        if *x < self.lo {
            Some(true)
        } else if *x >= self.hi {
            Some(false)
        } else {
            None
        }
    }

    /// Is the exact rational `x` certainly strictly greater than the
    /// enclosed value?
    pub fn certainly_lt_rat(&self, x: &Rat) -> Option<bool> {
        if *x > self.hi {
            Some(true)
        } else if *x <= self.lo {
            Some(false)
        } else {
            None
        }
    }
}

fn big(u: u64) -> BigInt {
    BigInt::from(u)
}

fn pow2(e: u64) -> BigInt {
    BigInt::one() << e
}

/// Largest dyadic `m / 2^k` with about `prec` significant bits that is `<= x`.
pub fn dyadic_floor(x: &Rat, prec: u32) -> Rat {
    if x.is_zero() {
        return Rat::zero();
    }
    if x.is_negative() {
        return -dyadic_ceil(&-x.clone(), prec);
    }
    let n = x.numer();
    let d = x.denom();
    let shift = prec as i64 + d.bits() as i64 - n.bits() as i64;
    if shift >= 0 {
        let m = (n << shift as u64).div_floor(d);
        Rat::new(m, pow2(shift as u64))
    } else {
        let m = n.div_floor(&(d << (-shift) as u64));
        Rat::new(m * pow2((-shift) as u64), BigInt::one())
    }
}

/// Smallest dyadic `m / 2^k` with about `prec` significant bits that is `>= x`.
pub fn dyadic_ceil(x: &Rat, prec: u32) -> Rat {
    if x.is_zero() {
        return Rat::zero();
    }
    if x.is_negative() {
        return -dyadic_floor(&-x.clone(), prec);
    }
    let n = x.numer();
    let d = x.denom();
    let shift = prec as i64 + d.bits() as i64 - n.bits() as i64;
    if shift >= 0 {
        let m = (n << shift as u64).div_ceil(d);
        Rat::new(m, pow2(shift as u64))
    } else {
        let m = n.div_ceil(&(d << (-shift) as u64));
        Rat::new(m * pow2((-shift) as u64), BigInt::one())
    }
}

/// `floor(log2 x)` for a positive rational.
pub fn ilog2_floor(x: &Rat) -> i64 {
    assert!(x.is_positive());
    let n = x.numer();
    let d = x.denom();
    let mut e = n.bits() as i64 - d.bits() as i64;
    // bits() only brackets the ratio within a factor of two; fix up.
    while cmp_pow2(x, e) == Ordering::Less {
        e -= 1;
    }
    while cmp_pow2(x, e + 1) != Ordering::Less {
        e += 1;
    }
    e
}

/// Compare `x` with `2^e`.
fn cmp_pow2(x: &Rat, e: i64) -> Ordering {
    let n = x.numer();
    let d = x.denom();
    if e >= 0 {
        n.cmp(&(d << e as u64))
    } else {
        (n << (-e) as u64).cmp(d)
    }
}

fn tiny(prec: u32) -> Rat {
    Rat::new(BigInt::one(), pow2(prec as u64 + 2))
}

/// `2 * atanh(y)` for exact rational `y` in `(0, 1/2]`, as a certified
/// enclosure. This is `ln((1+y)/(1-y))`.
fn atanh_twice(y: &Rat, prec: u32) -> Interval {
    debug_assert!(y.is_positive() && *y <= Rat::new(big(1), big(2)));
    let y2 = y * y;
    let eps = tiny(prec);
    let one_minus_y2 = Rat::one() - &y2;
    let mut sum = Rat::zero();
    let mut ypow = y.clone(); // y^(2j+1)
    let mut j: u64 = 0;
    loop {
        sum += &ypow / Rat::from_integer(big(2 * j + 1));
        ypow *= &y2;
        j += 1;
        // tail after including terms 0..j-1 is < y^(2j+1) / ((2j+1)(1-y^2))
        let tail = &ypow / (Rat::from_integer(big(2 * j + 1)) * &one_minus_y2);
        if tail < eps {
            let two = Rat::from_integer(big(2));
            return Interval::new(&two * &sum, two * (sum + tail));
        }
    }
}

/// Certified enclosure of `ln 2`.
pub fn ln2(prec: u32) -> Interval {
    atanh_twice(&Rat::new(big(1), big(3)), prec)
}

/// Certified enclosure of `ln x` for a positive rational `x`.
pub fn ln(x: &Rat, prec: u32) -> Interval {
    assert!(x.is_positive(), "ln of a nonpositive value");
    let work = prec + 8;
    let e = ilog2_floor(x);
    // x = m * 2^e with m in [1, 2)
    let m = if e >= 0 {
        x / Rat::from_integer(pow2(e as u64))
    } else {
        x * Rat::from_integer(pow2((-e) as u64))
    };
    let ln_m = if m.is_one() {
        Interval::zero()
    } else {
        let y = (&m - Rat::one()) / (&m + Rat::one());
        atanh_twice(&y, work)
    };
    if e == 0 {
        return ln_m.round_out(prec);
    }
    let scaled = ln2(work).scale(&Rat::from_integer(BigInt::from(e)));
    ln_m.add(&scaled).round_out(prec)
}

pub fn ln_u64(x: u64, prec: u32) -> Interval {
    ln(&Rat::from_integer(big(x)), prec)
}

/// Certified enclosure of `log x` in the requested base.
pub fn log(x: &Rat, base: LogBase, prec: u32) -> Interval {
    match base {
        LogBase::Natural => ln(x, prec),
        LogBase::Ten => {
            let work = prec + 8;
            ln(x, work)
                .div(&ln(&Rat::from_integer(big(10)), work))
                .round_out(prec)
        }
    }
}

/// Certified enclosure of `log2 x` for a positive rational `x`.
pub fn log2(x: &Rat, prec: u32) -> Interval {
    let work = prec + 8;
    ln(x, work).div(&ln2(work)).round_out(prec)
}

/// Exponent floor below which `exp2` saturates to `[0, 2^-CLAMP]` instead of
/// materializing an astronomically small dyadic.
pub const EXP2_CLAMP: i64 = 1 << 14;

/// Certified enclosure of `2^x` for rational `x`.
///
/// Hugely negative exponents (beyond [`EXP2_CLAMP`]) return the saturated
/// enclosure `[0, 2^-CLAMP]`; this is how error terms like `c / p^{r/2}`
/// with astronomically large `r` are represented.
pub fn exp2(x: &Rat, prec: u32) -> Interval {
    let work = prec + 8;
    let i_floor = x.floor().to_integer();
    if i_floor <= BigInt::from(-EXP2_CLAMP) {
        return Interval::new(Rat::zero(), Rat::new(BigInt::one(), pow2(EXP2_CLAMP as u64)));
    }
    assert!(
        i_floor < BigInt::from(EXP2_CLAMP),
        "exp2 exponent too large: {i_floor}"
    );
    let i = i_floor.to_i64().expect("clamped exponent fits i64");
    let f = x - Rat::from_integer(i_floor); // in [0, 1)
    let t = Interval::point(f).mul(&ln2(work)); // in [0, ln 2)
    let lo = exp_series_lower(&t.lo, work);
    let hi = exp_series_upper(&t.hi, work);
    let frac = Interval::new(lo, hi);
    let scaled = if i >= 0 {
        frac.scale(&Rat::from_integer(pow2(i as u64)))
    } else {
        frac.scale(&Rat::new(BigInt::one(), pow2((-i) as u64)))
    };
    scaled.round_out(prec)
}

/// `2^x` over an interval exponent; monotone, so the endpoint enclosures
/// combine directly.
pub fn exp2_iv(x: &Interval, prec: u32) -> Interval {
    let lo = exp2(x.lo(), prec);
    let hi = exp2(x.hi(), prec);
    Interval::new(lo.lo().clone(), hi.hi().clone())
}

/// Lower bound for `exp t`, `0 <= t < 1`: a truncated Taylor sum.
fn exp_series_lower(t: &Rat, prec: u32) -> Rat {
    exp_series(t, prec).0
}

/// Upper bound for `exp t`: truncated sum plus its tail bound.
fn exp_series_upper(t: &Rat, prec: u32) -> Rat {
    let (sum, tail) = exp_series(t, prec);
    sum + tail
}

fn exp_series(t: &Rat, prec: u32) -> (Rat, Rat) {
    debug_assert!(!t.is_negative() && *t < Rat::one());
    let eps = tiny(prec);
    let mut sum = Rat::one();
    let mut term = Rat::one();
    let mut k: u64 = 0;
    loop {
        k += 1;
        term = term * t / Rat::from_integer(big(k));
        sum += &term;
        // tail after term k is < term * t/(k+1) * 1/(1 - t/(k+2)) <= 2*term*t
        let tail = Rat::from_integer(big(2)) * &term * t;
        if tail < eps {
            return (sum, tail);
        }
    }
}

/// Certified enclosure of `sqrt x` for nonnegative rational `x`.
pub fn sqrt(x: &Rat, prec: u32) -> Interval {
    nth_root(x, 2, prec)
}

/// Certified enclosure of `x^(1/k)` for nonnegative rational `x`.
pub fn nth_root(x: &Rat, k: u32, prec: u32) -> Interval {
    assert!(k >= 1);
    assert!(!x.is_negative());
    if x.is_zero() {
        return Interval::zero();
    }
    let a = x.numer().magnitude();
    let b = x.denom().magnitude();
    // x^(1/k) = (a * b^(k-1))^(1/k) / b
    let scaled = a * b.pow(k - 1) << (k as u64 * prec as u64);
    let root = scaled.nth_root(k);
    let den = Rat::from_integer(BigInt::from(b << (prec as u64)));
    let lo = Rat::from_integer(BigInt::from(root.clone())) / &den;
    let hi = Rat::from_integer(BigInt::from(root + BigUint::one())) / den;
    Interval::new(lo, hi)
}

/// Certified enclosure of `x^(num/den)` for positive rational `x` and a
/// positive fractional exponent.
pub fn pow_frac(x: &Rat, num: u32, den: u32, prec: u32) -> Interval {
    assert!(x.is_positive() && num >= 1 && den >= 1);
    let mut p = Rat::one();
    for _ in 0..num {
        p *= x;
    }
    nth_root(&p, den, prec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn assert_encloses(iv: &Interval, truth: f64, max_width: f64) {
        let w = iv.width().to_f64().unwrap();
        assert!(w <= max_width, "width {w} too large");
        let lo = iv.lo().to_f64().unwrap();
        let hi = iv.hi().to_f64().unwrap();
        assert!(lo <= truth + 1e-13 && truth - 1e-13 <= hi, "{lo} !<= {truth} !<= {hi}");
    }

    #[test]
    fn ln2_matches_reference() {
        let iv = ln2(DEFAULT_PREC);
        assert_encloses(&iv, 0.693_147_180_559_945_3, 1e-30);
    }

    #[test]
    fn ln_spot_values() {
        assert_encloses(&ln_u64(10, 128), 2.302_585_092_994_046, 1e-30);
        assert_encloses(&ln_u64(1_000_000, 128), 13.815_510_557_964_274, 1e-30);
        let half = Rat::new(1.into(), 2.into());
        assert_encloses(&ln(&half, 128), -0.693_147_180_559_945_3, 1e-30);
        assert_encloses(&ln(&Rat::one(), 128), 0.0, 0.0);
    }

    #[test]
    fn log10_spot_values() {
        let iv = log(&Rat::from_integer(1000.into()), LogBase::Ten, 128);
        assert_encloses(&iv, 3.0, 1e-30);
        let iv = log(&Rat::from_integer(135.into()), LogBase::Ten, 128);
        assert_encloses(&iv, 2.130_333_768_495_006, 1e-30);
    }

    #[test]
    fn exp2_spot_values() {
        assert_encloses(&exp2(&Rat::new(1.into(), 2.into()), 128), core::f64::consts::SQRT_2, 1e-30);
        assert_encloses(&exp2(&Rat::from_integer(10.into()), 128), 1024.0, 1e-25);
        let neg = exp2(&Rat::new((-10).into(), 3.into()), 128);
        assert_encloses(&neg, 0.099_212_565_748_012_47, 1e-30);
    }

    #[test]
    fn exp2_saturates_far_below() {
        let x = Rat::from_integer(BigInt::from(-(1_i64 << 40)));
        let iv = exp2(&x, 128);
        assert!(iv.lo().is_zero());
        assert!(iv.hi().is_positive());
        assert!(*iv.hi() <= Rat::new(BigInt::one(), BigInt::one() << 14));
    }

    #[test]
    fn roots_spot_values() {
        assert_encloses(&sqrt(&Rat::from_integer(2.into()), 128), core::f64::consts::SQRT_2, 1e-30);
        assert_encloses(&nth_root(&Rat::from_integer(27.into()), 3, 128), 3.0, 1e-30);
        // 134^(3/2)
        assert_encloses(&pow_frac(&Rat::from_integer(134.into()), 3, 2, 128), 1551.162_144_973_890_2, 1e-25);
    }

    #[test]
    fn interval_comparisons_decide() {
        let a = ln_u64(2, 128);
        let b = ln_u64(3, 128);
        assert_eq!(a.certainly_lt(&b), Some(true));
        assert_eq!(b.certainly_lt(&a), Some(false));
        let third = Rat::new(1.into(), 3.into());
        assert_eq!(a.certainly_gt_rat(&third), Some(true));
    }

    #[test]
    fn dyadic_rounding_brackets() {
        let x = Rat::new(1.into(), 3.into());
        let lo = dyadic_floor(&x, 64);
        let hi = dyadic_ceil(&x, 64);
        assert!(lo < x && x < hi);
        assert!((&hi - &lo) < Rat::new(1.into(), BigInt::one() << 62));
        let y = -x;
        assert!(dyadic_floor(&y, 64) < y && y < dyadic_ceil(&y, 64));
    }

    #[test]
    fn ilog2_floor_spot() {
        assert_eq!(ilog2_floor(&Rat::from_integer(1.into())), 0);
        assert_eq!(ilog2_floor(&Rat::from_integer(1023.into())), 9);
        assert_eq!(ilog2_floor(&Rat::from_integer(1024.into())), 10);
        assert_eq!(ilog2_floor(&Rat::new(1.into(), 5.into())), -3);
        assert_eq!(ilog2_floor(&Rat::new(3.into(), 2.into())), 0);
    }

    #[test]
    fn error_display_is_stable() {
        let s = crate::Error::DivisionByZero.to_string();
        assert!(s.contains("zero"));
    }
}

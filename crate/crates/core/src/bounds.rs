//! Evaluators for the inequality battery: every bound statement, its
//! hypothesis flags (is the statement in force for the given parameters?),
//! and threshold scans for the stated cutoffs.
//!
//! Bound sides are certified [`Interval`]s at 128-bit-or-better precision.
//! Error terms `c / p^{r/2}` are evaluated in log space, so `r` may be an
//! arbitrarily large integer; once the term drops below `2^-16384` it
//! saturates to a `[0, 2^-16384]` enclosure and the report notes the
//! underflow.

use num_bigint::BigUint;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::field::is_prime;
use crate::precise::{self, Interval, LogBase};
use crate::{Error, Rat, Result};

/// Identifiers for every bound statement the crate evaluates. The string
/// forms (see [`TheoremId::as_str`]) are the stable external names used in
/// CSV output and on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoremId {
    /// Two-sided band for the image proportion `|f^n(F)|/p^r` ("technical").
    ImageBand,
    /// Upper bound for `w_n` in the quadratic family ("quadcor").
    WnQuadUpper,
    /// Upper bound for `w_n`, general degree ("upperboundforw").
    WnUpper,
    /// Upper bound for `w_{m,n}` ("upperboundforW").
    WmnUpper,
    /// Lower bound for `w_{m,n}` ("lowerboundforW").
    WmnLower,
    /// Two-sided `w_{m,n}` band ("aaroncorollary").
    WmnBand,
    /// Simplified `1/n^{3/2}` upper bound for `w_n` ("orderofgrowth").
    WnSimplifiedUpper,
    /// Upper bound for the all-quadratics average of `w_n`
    /// ("averageupperbound").
    AvgWnUpper,
    /// Average bound with exponent `2 - eps` ("strongest").
    AvgWnStrongest,
    /// Upper bound for the all-quadratics average of `w_{m,n}` ("genhead").
    AvgWmnUpper,
    /// Lower bound for the all-quadratics average of `w_{m,n}`
    /// ("averagelowerboundmn").
    AvgWmnLower,
}

pub const ALL_THEOREMS: [TheoremId; 11] = [
    TheoremId::ImageBand,
    TheoremId::WnQuadUpper,
    TheoremId::WnUpper,
    TheoremId::WmnUpper,
    TheoremId::WmnLower,
    TheoremId::WmnBand,
    TheoremId::WnSimplifiedUpper,
    TheoremId::AvgWnUpper,
    TheoremId::AvgWnStrongest,
    TheoremId::AvgWmnUpper,
    TheoremId::AvgWmnLower,
];

impl TheoremId {
    pub fn as_str(&self) -> &'static str {
        match self {
            TheoremId::ImageBand => "technical",
            TheoremId::WnQuadUpper => "quadcor",
            TheoremId::WnUpper => "upperboundforw",
            TheoremId::WmnUpper => "upperboundforW",
            TheoremId::WmnLower => "lowerboundforW",
            TheoremId::WmnBand => "aaroncorollary",
            TheoremId::WnSimplifiedUpper => "orderofgrowth",
            TheoremId::AvgWnUpper => "averageupperbound",
            TheoremId::AvgWnStrongest => "strongest",
            TheoremId::AvgWmnUpper => "genhead",
            TheoremId::AvgWmnLower => "averagelowerboundmn",
        }
    }

    /// Case-sensitive: `upperboundforw` bounds `w_n` while `upperboundforW`
    /// bounds `w_{m,n}`.
    pub fn parse(s: &str) -> Option<TheoremId> {
        ALL_THEOREMS.iter().copied().find(|t| t.as_str() == s)
    }

    /// Does the statement need the generalized index `m`?
    pub fn needs_m(&self) -> bool {
        matches!(
            self,
            TheoremId::WmnUpper
                | TheoremId::WmnLower
                | TheoremId::WmnBand
                | TheoremId::AvgWmnUpper
                | TheoremId::AvgWmnLower
        )
    }

    /// Statements specific to the quadratic family pin `d = 2`.
    pub fn requires_d2(&self) -> bool {
        matches!(
            self,
            TheoremId::WnQuadUpper
                | TheoremId::AvgWnUpper
                | TheoremId::AvgWnStrongest
                | TheoremId::AvgWmnUpper
                | TheoremId::AvgWmnLower
        )
    }

    /// What empirical quantity the statement's left-hand side is.
    pub fn shape(&self) -> EmpiricalShape {
        match self {
            TheoremId::ImageBand => EmpiricalShape::ImageProportion,
            TheoremId::WnQuadUpper | TheoremId::WnUpper | TheoremId::WnSimplifiedUpper => {
                EmpiricalShape::Wn
            }
            TheoremId::WmnUpper | TheoremId::WmnLower | TheoremId::WmnBand => EmpiricalShape::Wmn,
            TheoremId::AvgWnUpper | TheoremId::AvgWnStrongest => EmpiricalShape::AvgWn,
            TheoremId::AvgWmnUpper | TheoremId::AvgWmnLower => EmpiricalShape::AvgWmn,
        }
    }
}

/// Shape of an empirical left-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmpiricalShape {
    ImageProportion,
    Wn,
    Wmn,
    AvgWn,
    AvgWmn,
}

impl EmpiricalShape {
    pub fn as_str(&self) -> &'static str {
        match self {
            EmpiricalShape::ImageProportion => "image proportion |f^n|/q",
            EmpiricalShape::Wn => "w_n",
            EmpiricalShape::Wmn => "w_{m,n}",
            EmpiricalShape::AvgWn => "quadratic average of w_n",
            EmpiricalShape::AvgWmn => "quadratic average of w_{m,n}",
        }
    }
}

/// Parameters a bound statement is evaluated at. `r` is a big integer: the
/// hypotheses demand `r` beyond `2d^{2n}`, far past any machine word.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundParams {
    pub p: u64,
    pub r: BigUint,
    pub d: u64,
    pub n: u64,
    pub m: Option<u64>,
    pub epsilon: Option<Rat>,
    pub log_base: LogBase,
}

impl BoundParams {
    pub fn new(p: u64, r: u64, d: u64, n: u64) -> Self {
        BoundParams {
            p,
            r: BigUint::from(r),
            d,
            n,
            m: None,
            epsilon: None,
            log_base: LogBase::Natural,
        }
    }

    pub fn with_m(mut self, m: u64) -> Self {
        self.m = Some(m);
        self
    }

    pub fn with_r(mut self, r: BigUint) -> Self {
        self.r = r;
        self
    }

    pub fn with_epsilon(mut self, eps: Rat) -> Self {
        self.epsilon = Some(eps);
        self
    }

    pub fn with_log_base(mut self, base: LogBase) -> Self {
        self.log_base = base;
        self
    }
}

/// Hypothesis flags for one statement at one parameter set. `in_force` is
/// the conjunction of every flag.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypotheses {
    pub p: u64,
    pub r: BigUint,
    pub d: u64,
    pub n: u64,
    pub m: Option<u64>,
    pub p_prime: bool,
    /// `p > (d!)^2`, computed with big integers.
    pub p_gt_dfact_sq: bool,
    pub p_cong_1_mod_d: bool,
    pub r_threshold_ok: bool,
    /// The threshold this statement imposes, e.g. `r > 2*d^(2n)`.
    pub r_threshold_rule: &'static str,
    pub range_ok: bool,
    /// The index range this statement imposes, e.g. `5 < m < n`.
    pub range_rule: &'static str,
    pub in_force: bool,
}

/// One evaluated statement: whichever sides it has, the hypothesis verdict,
/// and optionally an empirical value with its comparison outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub theorem: TheoremId,
    pub log_base: LogBase,
    pub lower: Option<Interval>,
    pub upper: Option<Interval>,
    pub hypotheses: Hypotheses,
    pub in_force: bool,
    pub empirical: Option<Rat>,
    /// Strict satisfaction of every side the statement has; `None` when no
    /// empirical value is attached.
    pub satisfied: Option<bool>,
    /// An error term saturated below `2^-16384`; its printed value is 0.
    pub underflow_note: bool,
}

impl BoundReport {
    /// `EXTRAPOLATED` whenever the hypotheses fail; desk-scale parameters
    /// always extrapolate.
    pub fn label(&self) -> &'static str {
        if self.in_force {
            "IN_FORCE"
        } else {
            "EXTRAPOLATED"
        }
    }

    pub fn lower_f64(&self) -> Option<f64> {
        self.lower.as_ref().map(Interval::mid_f64)
    }

    pub fn upper_f64(&self) -> Option<f64> {
        self.upper.as_ref().map(Interval::mid_f64)
    }
}

fn validate(theorem: TheoremId, params: &BoundParams) -> Result<()> {
    if params.d < 2 {
        return Err(Error::BadRange("bound statements require d >= 2"));
    }
    if theorem.requires_d2() && params.d != 2 {
        return Err(Error::BadRange("this statement is specific to d = 2"));
    }
    if theorem.needs_m() && params.m.is_none() {
        return Err(Error::MissingParam("m"));
    }
    if let Some(m) = params.m {
        if m >= params.n {
            return Err(Error::BadRange("w_{m,n} requires m < n"));
        }
    }
    if theorem == TheoremId::AvgWnStrongest {
        match &params.epsilon {
            None => return Err(Error::MissingParam("epsilon")),
            Some(e) => {
                if !e.is_positive() || *e >= Rat::from_integer(2.into()) {
                    return Err(Error::BadRange("epsilon must lie in (0, 2)"));
                }
            }
        }
    }
    Ok(())
}

/// `r > 2 * base^exp`, exact, without materializing the threshold unless the
/// bit lengths are too close to call.
fn r_exceeds_threshold(r: &BigUint, base: u64, exp: u64) -> bool {
    if r.is_zero() {
        return false;
    }
    let threshold_bits = exp as f64 * libm::log2(base as f64) + 1.0;
    let r_bits = r.bits() as f64;
    if r_bits > threshold_bits + 2.0 {
        return true;
    }
    if r_bits < threshold_bits - 1.0 {
        return false;
    }
    // close call: exp is small enough here that the threshold fits in
    // memory of the same order as r itself
    let threshold = BigUint::from(2u32) * BigUint::from(base).pow(exp as u32);
    *r > threshold
}

fn factorial_sq(d: u64) -> BigUint {
    let mut f = BigUint::one();
    for k in 2..=d {
        f *= BigUint::from(k);
    }
    &f * &f
}

/// Scan window for threshold searches.
pub const SCAN_WINDOW: (u64, u64) = (2, 1_000_000);

/// Evaluate the hypothesis flags of one statement.
///
/// The `r` thresholds, statement by statement: the image band and the
/// `w_{m,n}` bounds need `r > 2d^{2n}`; the single-stratum `w_n` bounds need
/// `r > 2d^{2n+2}`; the quadratic corollary and the `w_n` averages need
/// `r > 2^{2n+3}`; the `w_{m,n}` averages need `r > 2^{2n+1}`.
pub fn hypothesis_check(theorem: TheoremId, params: &BoundParams) -> Result<Hypotheses> {
    validate(theorem, params)?;
    let d = params.d;
    let n = params.n;
    let p_prime = is_prime(params.p);
    let p_gt_dfact_sq = BigUint::from(params.p) > factorial_sq(d);
    let p_cong_1_mod_d = params.p % d == 1;
    let (rule, base, exp): (&'static str, u64, u64) = match theorem {
        TheoremId::ImageBand | TheoremId::WmnUpper | TheoremId::WmnLower | TheoremId::WmnBand => {
            ("r > 2*d^(2n)", d, 2 * n)
        }
        TheoremId::WnUpper | TheoremId::WnSimplifiedUpper => ("r > 2*d^(2n+2)", d, 2 * n + 2),
        TheoremId::WnQuadUpper | TheoremId::AvgWnUpper | TheoremId::AvgWnStrongest => {
            ("r > 2^(2n+3)", 2, 2 * n + 3)
        }
        TheoremId::AvgWmnUpper | TheoremId::AvgWmnLower => ("r > 2^(2n+1)", 2, 2 * n + 1),
    };
    let r_threshold_ok = r_exceeds_threshold(&params.r, base, exp);
    let (range_rule, range_ok): (&'static str, bool) = match theorem {
        TheoremId::ImageBand | TheoremId::WnUpper => ("n >= 1", n >= 1),
        TheoremId::WnQuadUpper => ("n > 2", n > 2),
        TheoremId::WmnUpper | TheoremId::AvgWmnUpper => {
            ("1 < m < n", params.m.is_some_and(|m| 1 < m))
        }
        TheoremId::WmnLower | TheoremId::WmnBand | TheoremId::AvgWmnLower => {
            ("5 < m < n", params.m.is_some_and(|m| 5 < m))
        }
        TheoremId::WnSimplifiedUpper | TheoremId::AvgWnUpper => ("n > 133", n > 133),
        TheoremId::AvgWnStrongest => {
            // N_eps comes from the same proof inequality the scan checks
            let eps = params.epsilon.clone().expect("validated");
            match threshold_scan(
                &ScanInequality::Strongest { epsilon: eps },
                params.log_base,
                SCAN_WINDOW,
            ) {
                Ok(scan) => ("n > N_eps (scanned)", n > scan.stable),
                Err(Error::NoThresholdInWindow) => ("n > N_eps (not in scan window)", false),
                Err(e) => return Err(e),
            }
        }
    };
    let in_force =
        p_prime && p_gt_dfact_sq && p_cong_1_mod_d && r_threshold_ok && range_ok;
    Ok(Hypotheses {
        p: params.p,
        r: params.r.clone(),
        d,
        n,
        m: params.m,
        p_prime,
        p_gt_dfact_sq,
        p_cong_1_mod_d,
        r_threshold_ok,
        r_threshold_rule: rule,
        range_ok,
        range_rule,
        in_force,
    })
}

/// Error term `c / p^{r/2}`, evaluated as `2^(log2 c - (r/2) log2 p)` so
/// that astronomically large `r` cannot overflow. Returns the enclosure and
/// whether it saturated.
fn error_term(c: u64, p: u64, r: &BigUint, prec: u32) -> (Interval, bool) {
    let log2_c = precise::log2(&Rat::from_integer(c.into()), prec);
    let log2_p = precise::log2(&Rat::from_integer(p.into()), prec);
    let half_r = Rat::new(
        num_bigint::BigInt::from(r.clone()),
        num_bigint::BigInt::from(2),
    );
    let exponent = log2_c.sub(&log2_p.scale(&half_r));
    let iv = precise::exp2_iv(&exponent, prec);
    let saturated = iv.lo().is_zero();
    (iv, saturated)
}

fn inv_u64(x: u64) -> Rat {
    Rat::new(1.into(), x.into())
}

struct SideBuilder {
    prec: u32,
    log_base: LogBase,
    underflow: bool,
}

impl SideBuilder {
    fn log_of(&self, x: u64) -> Interval {
        precise::log(&Rat::from_integer(x.into()), self.log_base, self.prec)
    }

    fn err(&mut self, c: u64, p: u64, r: &BigUint) -> Interval {
        let (iv, saturated) = error_term(c, p, r, self.prec);
        self.underflow |= saturated;
        iv
    }
}

/// Evaluate whichever sides a statement has at certified precision, along
/// with its hypothesis verdict. Sides whose formula is undefined at the
/// given indices (a logarithm of zero, a division by `n = 0`) are omitted.
pub fn eval_bound(theorem: TheoremId, params: &BoundParams) -> Result<BoundReport> {
    eval_bound_at(theorem, params, precise::DEFAULT_PREC)
}

pub fn eval_bound_at(theorem: TheoremId, params: &BoundParams, prec: u32) -> Result<BoundReport> {
    validate(theorem, params)?;
    let hypotheses = hypothesis_check(theorem, params)?;
    let mut b = SideBuilder { prec, log_base: params.log_base, underflow: false };
    let d = params.d;
    let n = params.n;
    let p = params.p;
    let r = &params.r;
    let dm1 = Rat::from_integer((d - 1).into());
    let two = Rat::from_integer(2.into());

    let mut lower: Option<Interval> = None;
    let mut upper: Option<Interval> = None;

    // image-proportion band pieces, reused by several statements
    let image_lower = |b: &mut SideBuilder, k: u64| -> Option<Interval> {
        // 2 / ((d-1)(k+4+log k)) - 8d/p^{r/2}
        if k == 0 {
            return None;
        }
        let den = b.log_of(k).add(&Interval::from_u64(k + 4)).scale(&dm1);
        let head = Interval::point(two.clone()).div(&den);
        Some(head.sub(&b.err(8 * d, p, r)))
    };
    let image_upper = |b: &mut SideBuilder, k: u64| -> Interval {
        // 2 / ((d-1)(k+1)) + 8d/p^{r/2}
        let head = Interval::point(&two / (&dm1 * Rat::from_integer((k + 1).into())));
        head.add(&b.err(8 * d, p, r))
    };

    match theorem {
        TheoremId::ImageBand => {
            lower = image_lower(&mut b, n);
            upper = Some(image_upper(&mut b, n));
        }
        TheoremId::WnQuadUpper => {
            // 15 log n / n^2 + 32/p^{r/2}
            if n >= 1 {
                let head = b
                    .log_of(n)
                    .scale(&Rat::from_integer(15.into()))
                    .scale(&inv_u64(n * n));
                upper = Some(head.add(&b.err(32, p, r)));
            }
        }
        TheoremId::WnUpper => {
            // (2 log(n+1) + 8) / ((d-1)(n+1)(n+5+log(n+1))) + 16d/p^{r/2}
            let l = b.log_of(n + 1);
            let num = l.scale(&two).add(&Interval::from_u64(8));
            let den = l
                .add(&Interval::from_u64(n + 5))
                .scale(&(&dm1 * Rat::from_integer((n + 1).into())));
            upper = Some(num.div(&den).add(&b.err(16 * d, p, r)));
        }
        TheoremId::WmnUpper | TheoremId::WmnLower | TheoremId::WmnBand => {
            let m = params.m.expect("validated");
            if m >= 1 && n >= 1 {
                let gap = Rat::new(1.into(), m.into()) - Rat::new(1.into(), n.into());
                let mn = inv_u64(m * n);
                if theorem != TheoremId::WmnLower {
                    // (2/(d-1)) (1/m - 1/n + 4 log n / (mn)) + 16d/p^{r/2}
                    let inner = b
                        .log_of(n)
                        .scale(&(Rat::from_integer(4.into()) * &mn))
                        .add(&Interval::point(gap.clone()));
                    let head = inner.scale(&(&two / &dm1));
                    upper = Some(head.add(&b.err(16 * d, p, r)));
                }
                if theorem != TheoremId::WmnUpper && m >= 1 {
                    // (7/(8(d-1))) (1/m - 1/n - 4 log m / (mn)) - 16d/p^{r/2}
                    let inner = Interval::point(gap).sub(
                        &b.log_of(m).scale(&(Rat::from_integer(4.into()) * &mn)),
                    );
                    let head = inner.scale(&(Rat::new(7.into(), 8.into()) / &dm1));
                    lower = Some(head.sub(&b.err(16 * d, p, r)));
                }
            }
        }
        TheoremId::WnSimplifiedUpper => {
            // 1/n^{3/2} + 16d/p^{r/2}
            if n >= 1 {
                let head = precise::pow_frac(&Rat::from_integer(n.into()), 3, 2, prec).recip();
                upper = Some(head.add(&b.err(16 * d, p, r)));
            }
        }
        TheoremId::AvgWnUpper => {
            // 1/n^{3/2} + 34/p^{r/2}
            if n >= 1 {
                let head = precise::pow_frac(&Rat::from_integer(n.into()), 3, 2, prec).recip();
                upper = Some(head.add(&b.err(34, p, r)));
            }
        }
        TheoremId::AvgWnStrongest => {
            // 1/n^{2-eps} + 34/p^{r/2}
            if n >= 1 {
                let eps = params.epsilon.clone().expect("validated");
                let (num, den) = frac_exponent(&eps)?;
                let head =
                    precise::pow_frac(&Rat::from_integer(n.into()), num, den, prec).recip();
                upper = Some(head.add(&b.err(34, p, r)));
            }
        }
        TheoremId::AvgWmnUpper => {
            // 2 (1/m - 1/n) + 9 log n / (mn)
            let m = params.m.expect("validated");
            if m >= 1 && n >= 1 {
                let gap = Rat::new(1.into(), m.into()) - Rat::new(1.into(), n.into());
                let head = b
                    .log_of(n)
                    .scale(&(Rat::from_integer(9.into()) * inv_u64(m * n)))
                    .add(&Interval::point(&two * gap));
                upper = Some(head);
            }
        }
        TheoremId::AvgWmnLower => {
            // (7/8)(1/m - 1/n) - 4 log m / (mn)
            let m = params.m.expect("validated");
            if m >= 1 && n >= 1 {
                let gap = Rat::new(1.into(), m.into()) - Rat::new(1.into(), n.into());
                let head = Interval::point(Rat::new(7.into(), 8.into()) * gap).sub(
                    &b.log_of(m).scale(&(Rat::from_integer(4.into()) * inv_u64(m * n))),
                );
                lower = Some(head);
            }
        }
    }

    let in_force = hypotheses.in_force;
    Ok(BoundReport {
        theorem,
        log_base: params.log_base,
        lower,
        upper,
        hypotheses,
        in_force,
        empirical: None,
        satisfied: None,
        underflow_note: b.underflow,
    })
}

/// `2 - eps` as a reduced positive fraction with `u32` parts.
fn frac_exponent(eps: &Rat) -> Result<(u32, u32)> {
    let e = Rat::from_integer(2.into()) - eps;
    let num = e.numer().to_u32().ok_or(Error::BadRange("epsilon numerator too large"))?;
    let den = e.denom().to_u32().ok_or(Error::BadRange("epsilon denominator too large"))?;
    Ok((num, den))
}

/// The empirical quantity handed to [`compare_empirical`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmpiricalKind {
    ImageProportion { n: u64 },
    Wn { n: u64 },
    Wmn { m: u64, n: u64 },
    AvgWn { n: u64 },
    AvgWmn { m: u64, n: u64 },
}

impl EmpiricalKind {
    fn shape(&self) -> EmpiricalShape {
        match self {
            EmpiricalKind::ImageProportion { .. } => EmpiricalShape::ImageProportion,
            EmpiricalKind::Wn { .. } => EmpiricalShape::Wn,
            EmpiricalKind::Wmn { .. } => EmpiricalShape::Wmn,
            EmpiricalKind::AvgWn { .. } => EmpiricalShape::AvgWn,
            EmpiricalKind::AvgWmn { .. } => EmpiricalShape::AvgWmn,
        }
    }

    fn indices(&self) -> (Option<u64>, u64) {
        match *self {
            EmpiricalKind::ImageProportion { n }
            | EmpiricalKind::Wn { n }
            | EmpiricalKind::AvgWn { n } => (None, n),
            EmpiricalKind::Wmn { m, n } | EmpiricalKind::AvgWmn { m, n } => (Some(m), n),
        }
    }
}

/// Join an exact empirical value to a statement's bound sides. Rows whose
/// hypotheses fail are labeled `EXTRAPOLATED` and must never be counted as a
/// theorem test.
pub fn compare_empirical(
    empirical: &Rat,
    kind: EmpiricalKind,
    theorem: TheoremId,
    params: &BoundParams,
) -> Result<BoundReport> {
    let expected = theorem.shape();
    let got = kind.shape();
    if expected != got {
        return Err(Error::ShapeMismatch { expected: expected.as_str(), got: got.as_str() });
    }
    let (km, kn) = kind.indices();
    if kn != params.n || (theorem.needs_m() && km != params.m) {
        return Err(Error::ShapeMismatch { expected: "matching (m, n) indices", got: "different indices" });
    }
    // escalate precision until strictness is decided; theorems with no
    // evaluable side at these indices keep satisfied = None
    let mut report = eval_bound_at(theorem, params, precise::DEFAULT_PREC)?;
    for prec in [precise::DEFAULT_PREC, 256, 512] {
        if prec != precise::DEFAULT_PREC {
            report = eval_bound_at(theorem, params, prec)?;
        }
        let below = report.upper.as_ref().map(|u| u.certainly_gt_rat(empirical));
        let above = report.lower.as_ref().map(|l| l.certainly_lt_rat(empirical));
        let verdict = match (below, above) {
            (Some(None), _) | (_, Some(None)) => None, // undecided, escalate
            (Some(Some(b)), Some(Some(a))) => Some(b && a),
            (Some(Some(b)), None) => Some(b),
            (None, Some(Some(a))) => Some(a),
            (None, None) => None,
        };
        report.empirical = Some(empirical.clone());
        report.satisfied = verdict;
        if verdict.is_some() || (report.upper.is_none() && report.lower.is_none()) {
            break;
        }
    }
    Ok(report)
}

/// Which inequality a threshold scan walks.
#[derive(Debug, Clone, PartialEq)]
pub enum ScanInequality {
    /// `(2 log(n+1) + 8) / ((n+1)(n+5+log(n+1))) < 1/n^{3/2}` (the `d = 2`
    /// case of the simplification proof).
    OrderOfGrowth,
    /// The same left side against `1/n^{2-eps}`.
    Strongest { epsilon: Rat },
}

impl ScanInequality {
    fn rhs_exponent(&self) -> Result<(u32, u32)> {
        match self {
            ScanInequality::OrderOfGrowth => Ok((3, 2)),
            ScanInequality::Strongest { epsilon } => {
                if !epsilon.is_positive() || *epsilon >= Rat::from_integer(2.into()) {
                    return Err(Error::BadRange("epsilon must lie in (0, 2)"));
                }
                frac_exponent(epsilon)
            }
        }
    }
}

/// Scan outcome: the first index where the inequality holds, and the least
/// index past which it holds for every tested `n` up to the window end.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdScan {
    pub first_success: u64,
    pub stable: u64,
    pub window: (u64, u64),
    pub log_base: LogBase,
    /// How many near-ties needed exact interval arithmetic to decide.
    pub escalations: u64,
}

/// Decide the inequality at one `n` with certified interval arithmetic.
fn holds_exact(n: u64, exp: (u32, u32), base: LogBase) -> bool {
    // lhs < rhs  <=>  n^exp * (2L + 8) < (n+1)(n+5+L),  L = log(n+1)
    for prec in [precise::DEFAULT_PREC, 256, 512, 1024] {
        let l = precise::log(&Rat::from_integer((n + 1).into()), base, prec);
        let pow = precise::pow_frac(&Rat::from_integer(n.into()), exp.0, exp.1, prec);
        let lhs = pow.mul(&l.scale(&Rat::from_integer(2.into())).add(&Interval::from_u64(8)));
        let rhs = l
            .add(&Interval::from_u64(n + 5))
            .scale(&Rat::from_integer((n + 1).into()));
        if let Some(v) = lhs.certainly_lt(&rhs) {
            return v;
        }
    }
    unreachable!("threshold comparison undecided at 1024 bits")
}

/// Walk the window, deciding each `n` with a fast float filter and falling
/// back to exact interval arithmetic for near-ties. Monotonicity is not
/// assumed: `stable` is one past the last failure actually observed.
pub fn threshold_scan(
    ineq: &ScanInequality,
    log_base: LogBase,
    window: (u64, u64),
) -> Result<ThresholdScan> {
    let (lo, hi) = window;
    if lo < 2 || lo > hi {
        return Err(Error::BadRange("scan window must satisfy 2 <= lo <= hi"));
    }
    let exp = ineq.rhs_exponent()?;
    let exp_f = exp.0 as f64 / exp.1 as f64;
    let mut first_success: Option<u64> = None;
    let mut last_fail: Option<u64> = None;
    let mut escalations = 0u64;
    for n in lo..=hi {
        let nf = n as f64;
        let l = match log_base {
            LogBase::Natural => libm::log(nf + 1.0),
            LogBase::Ten => libm::log10(nf + 1.0),
        };
        let lhs = (2.0 * l + 8.0) / ((nf + 1.0) * (nf + 5.0 + l));
        let rhs = libm::pow(nf, -exp_f);
        // float rounding across these few operations stays far below this
        // margin; anything closer is decided exactly
        let holds = if (lhs - rhs).abs() > 1e-11 * (lhs + rhs) {
            lhs < rhs
        } else {
            escalations += 1;
            holds_exact(n, exp, log_base)
        };
        if holds {
            first_success.get_or_insert(n);
        } else {
            last_fail = Some(n);
        }
    }
    let first_success = first_success.ok_or(Error::NoThresholdInWindow)?;
    let stable = match last_fail {
        None => lo,
        Some(f) if f == hi => return Err(Error::NoThresholdInWindow),
        Some(f) => f + 1,
    };
    Ok(ThresholdScan { first_success, stable, window, log_base, escalations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    #[test]
    fn theorem_id_round_trips() {
        for t in ALL_THEOREMS {
            assert_eq!(TheoremId::parse(t.as_str()), Some(t));
        }
        assert_eq!(TheoremId::parse("upperboundforw"), Some(TheoremId::WnUpper));
        assert_eq!(TheoremId::parse("upperboundforW"), Some(TheoremId::WmnUpper));
        assert_eq!(TheoremId::parse("nope"), None);
    }

    #[test]
    fn hypothesis_examples() {
        // needs r > 2*2^6 = 128
        let h = hypothesis_check(TheoremId::ImageBand, &BoundParams::new(5, 100, 2, 3)).unwrap();
        assert!(!h.r_threshold_ok);

        let h = hypothesis_check(TheoremId::ImageBand, &BoundParams::new(5, 129, 2, 3)).unwrap();
        assert!(h.r_threshold_ok);
        assert!(h.p_gt_dfact_sq); // 5 > 4
        assert!(h.p_cong_1_mod_d); // 5 = 1 mod 2
        assert!(h.in_force);

        // desk scale with n >= 5 never reaches the threshold
        let h = hypothesis_check(TheoremId::ImageBand, &BoundParams::new(5, 64, 2, 5)).unwrap();
        assert!(!h.r_threshold_ok && !h.in_force);
    }

    #[test]
    fn hypothesis_thresholds_use_big_integers() {
        // r = 2^2001 exceeds 2*2^2000 = 2^2001? No: need strict >.
        let r = BigUint::from(2u32).pow(2001);
        let params = BoundParams {
            p: 5,
            r: r.clone(),
            d: 2,
            n: 1000,
            m: None,
            epsilon: None,
            log_base: LogBase::Natural,
        };
        let h = hypothesis_check(TheoremId::ImageBand, &params).unwrap();
        assert!(!h.r_threshold_ok, "2^2001 is exactly the threshold, not above it");

        let params = BoundParams { r: r + BigUint::one(), ..params };
        let h = hypothesis_check(TheoremId::ImageBand, &params).unwrap();
        assert!(h.r_threshold_ok);
    }

    #[test]
    fn eval_quadcor_example() {
        // upper ~ 15 ln(100)/100^2 + 32/p^{r/2} with p^{r/2} ~ 1e40
        let params = BoundParams::new(100_000_007, 10, 2, 100);
        let report = eval_bound(TheoremId::WnQuadUpper, &params).unwrap();
        let u = report.upper_f64().unwrap();
        assert!((u - 6.907_755_278_982_137e-3).abs() < 1e-12, "{u}");
        assert!(report.lower.is_none());
        assert_eq!(report.label(), "EXTRAPOLATED");
    }

    #[test]
    fn eval_technical_vacuous_upper() {
        // d=2, n=1, error term -> 0: upper = 2/((1)(2)) = 1
        let params = BoundParams::new(5, 1 << 20, 2, 1);
        let report = eval_bound(TheoremId::ImageBand, &params).unwrap();
        let u = report.upper.unwrap();
        // the head is exactly 1 and the saturated error term is below 2^-16384
        assert_eq!(u.certainly_gt_rat(&(Rat::one() - rat(1, 1_000_000))), Some(true));
        assert_eq!(u.certainly_lt_rat(&(Rat::one() + rat(1, 1_000_000))), Some(true));
        assert!(report.underflow_note);
    }

    #[test]
    fn eval_genhead_example() {
        let params = BoundParams::new(7, 1, 2, 20).with_m(10);
        let report = eval_bound(TheoremId::AvgWmnUpper, &params).unwrap();
        let u = report.upper_f64().unwrap();
        assert!((u - 0.234_807_952_291_2).abs() < 1e-10, "{u}");
    }

    #[test]
    fn eval_image_band_at_n0_has_no_lower_side() {
        let params = BoundParams::new(101, 1, 2, 0);
        let report = eval_bound(TheoremId::ImageBand, &params).unwrap();
        assert!(report.lower.is_none());
        let u = report.upper_f64().unwrap();
        assert!(u > 2.0); // 2/(d-1) + err with d = 2
        assert!(!report.in_force);
    }

    #[test]
    fn compare_empirical_examples() {
        // image proportion at n=0 is exactly 1; trivially below the upper side
        let params = BoundParams::new(101, 1, 2, 0);
        let report = compare_empirical(
            &Rat::one(),
            EmpiricalKind::ImageProportion { n: 0 },
            TheoremId::ImageBand,
            &params,
        )
        .unwrap();
        assert_eq!(report.label(), "EXTRAPOLATED");
        assert_eq!(report.satisfied, Some(true));

        // w_0 = 2/5 against quadcor at n = 0: no evaluable side, still a row
        let params = BoundParams::new(5, 1, 2, 0);
        let report = compare_empirical(
            &rat(2, 5),
            EmpiricalKind::Wn { n: 0 },
            TheoremId::WnQuadUpper,
            &params,
        )
        .unwrap();
        assert_eq!(report.label(), "EXTRAPOLATED");
        assert_eq!(report.satisfied, None);
        assert!(!report.hypotheses.range_ok);

        let err = compare_empirical(
            &rat(2, 5),
            EmpiricalKind::AvgWn { n: 3 },
            TheoremId::ImageBand,
            &BoundParams::new(5, 1, 2, 3),
        )
        .unwrap_err();
        assert!(matches!(err, Error::ShapeMismatch { .. }));
    }

    #[test]
    fn scan_matches_paper_cutoff_in_base_ten() {
        let scan = threshold_scan(&ScanInequality::OrderOfGrowth, LogBase::Ten, (2, 2000)).unwrap();
        assert_eq!(scan.stable, 134);
        assert_eq!(scan.first_success, 134);
    }

    #[test]
    fn scan_natural_log_threshold() {
        let scan =
            threshold_scan(&ScanInequality::OrderOfGrowth, LogBase::Natural, (2, 2000)).unwrap();
        assert_eq!(scan.stable, 369);
    }

    #[test]
    fn scan_strongest_half_matches_orderofgrowth() {
        let eps = rat(1, 2);
        let scan = threshold_scan(
            &ScanInequality::Strongest { epsilon: eps },
            LogBase::Natural,
            (2, 2000),
        )
        .unwrap();
        assert_eq!(scan.stable, 369);
    }

    #[test]
    fn scan_first_success_vs_stable_can_differ() {
        // frozen from an independent high-precision scan: eps = 0.8 holds at
        // n = 2, fails later, and stabilizes at 13
        let scan = threshold_scan(
            &ScanInequality::Strongest { epsilon: rat(4, 5) },
            LogBase::Natural,
            (2, 2000),
        )
        .unwrap();
        assert_eq!(scan.first_success, 2);
        assert_eq!(scan.stable, 13);
    }

    #[test]
    fn exact_decisions_match_float_filter_away_from_ties() {
        for base in [LogBase::Natural, LogBase::Ten] {
            for n in [2u64, 13, 133, 134, 368, 369, 1000] {
                let nf = n as f64;
                let l = match base {
                    LogBase::Natural => libm::log(nf + 1.0),
                    LogBase::Ten => libm::log10(nf + 1.0),
                };
                let lhs = (2.0 * l + 8.0) / ((nf + 1.0) * (nf + 5.0 + l));
                let rhs = libm::pow(nf, -1.5);
                assert_eq!(holds_exact(n, (3, 2), base), lhs < rhs, "n={n} {base:?}");
            }
        }
    }

    #[test]
    fn scan_reports_missing_threshold() {
        let err = threshold_scan(
            &ScanInequality::Strongest { epsilon: rat(1, 10) },
            LogBase::Natural,
            (2, 50_000),
        )
        .unwrap_err();
        assert_eq!(err, Error::NoThresholdInWindow);
    }

    #[test]
    fn band_consistency_with_wreath() {
        // the image-band heads at error term -> 0 are the same expressions
        // the wreath band evaluates
        for (d, n) in [(2u64, 1u64), (2, 7), (3, 2), (6, 30)] {
            let params = BoundParams::new(5, 1 << 20, d, n);
            let report = eval_bound(TheoremId::ImageBand, &params).unwrap();
            let band = crate::wreath::juul_band(d, n as u32, 160).unwrap();
            let lo_gap = (report.lower.unwrap().mid() - band.lower.mid()).to_f64().unwrap();
            let hi_gap = (report.upper.unwrap().mid() - band.upper.mid()).to_f64().unwrap();
            assert!(lo_gap.abs() < 1e-30, "{lo_gap}");
            assert!(hi_gap.abs() < 1e-30, "{hi_gap}");
        }
    }

    #[test]
    fn lower_below_upper_when_error_terms_small() {
        for (d, n, m) in [(2u64, 10u64, 7u64), (3, 20, 6), (6, 30, 8)] {
            let params = BoundParams::new(1_000_003, 40, d, n).with_m(m);
            let report = eval_bound(TheoremId::WmnBand, &params).unwrap();
            let lo = report.lower.unwrap();
            let hi = report.upper.unwrap();
            assert_eq!(lo.certainly_lt(&hi), Some(true));
        }
    }

    #[test]
    fn missing_params_are_rejected() {
        assert!(matches!(
            eval_bound(TheoremId::WmnUpper, &BoundParams::new(5, 1, 2, 3)),
            Err(Error::MissingParam("m"))
        ));
        assert!(matches!(
            eval_bound(TheoremId::AvgWnStrongest, &BoundParams::new(5, 1, 2, 3)),
            Err(Error::MissingParam("epsilon"))
        ));
        assert!(matches!(
            eval_bound(TheoremId::WmnUpper, &BoundParams::new(5, 1, 2, 3).with_m(4)),
            Err(Error::BadRange(_))
        ));
        assert!(matches!(
            eval_bound(TheoremId::WnQuadUpper, &BoundParams::new(5, 1, 3, 5)),
            Err(Error::BadRange(_))
        ));
    }
}

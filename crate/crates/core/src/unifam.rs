//! The unicritical family `f_{d,alpha}(x) = x^d + alpha`: tables, the exact
//! closed form for `w_0`, sweeps over `alpha` with the primitive-element
//! filter, quadratic conjugacy normalization, and exact averages over all
//! quadratic polynomials.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_integer::Integer;
use num_traits::Zero;

use crate::dynamo::{CodeSet, FunctionTable, StrataReport};
use crate::field::{FieldElement, FieldParams};
use crate::{rat, Error, Rat, Result, TableLimit};

/// Parameters of one family member.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnicriticalParams {
    pub d: u64,
    pub alpha: FieldElement,
}

/// `a x^2 + b x + c` with `a != 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadraticPoly {
    pub a: FieldElement,
    pub b: FieldElement,
    pub c: FieldElement,
}

impl QuadraticPoly {
    pub fn new(a: FieldElement, b: FieldElement, c: FieldElement) -> Result<Self> {
        if a.code() == 0 {
            return Err(Error::BadRange("quadratic leading coefficient must be nonzero"));
        }
        Ok(QuadraticPoly { a, b, c })
    }
}

/// Precomputed `x -> x^d` as codes; shared across every `alpha` in a sweep.
pub fn power_table(fp: &FieldParams, d: u64, limit: TableLimit) -> Result<Vec<u32>> {
    if d == 0 {
        return Err(Error::BadRange("exponent d must be >= 1"));
    }
    limit.check(fp.q())?;
    Ok((0..fp.q()).map(|x| fp.pow_code(x, d) as u32).collect())
}

/// Table of `x^d + alpha` by exact field arithmetic.
pub fn unicritical_table(
    fp: &FieldParams,
    d: u64,
    alpha: FieldElement,
    limit: TableLimit,
) -> Result<FunctionTable> {
    let pow = power_table(fp, d, limit)?;
    table_from_power(fp, &pow, alpha.code(), limit)
}

/// Table of `x^d + alpha` reusing a precomputed power table.
pub fn table_from_power(
    fp: &FieldParams,
    pow: &[u32],
    alpha_code: u64,
    limit: TableLimit,
) -> Result<FunctionTable> {
    let next: Vec<u32> = pow
        .iter()
        .map(|&y| fp.add_codes(y as u64, alpha_code) as u32)
        .collect();
    FunctionTable::from_next(next, limit)
}

/// Closed form for `w_0(F_q, x^d + alpha)`, independent of `alpha`:
/// `(1 - 1/gcd(q-1, d)) (1 - 1/q)`.
pub fn w0_exact(q: u64, d: u64) -> Rat {
    let g = (q - 1).gcd(&d);
    rat(g - 1, g) * rat(q - 1, q)
}

/// `|f^k(F_q)|` for `k = 0..=n_max` without materializing a table; sizes
/// repeat once the chain stabilizes.
pub fn image_size_profile(
    fp: &FieldParams,
    pow: &[u32],
    alpha_code: u64,
    n_max: u32,
) -> Vec<u64> {
    let q = fp.q();
    let mut sizes = Vec::with_capacity(n_max as usize + 1);
    sizes.push(q);
    let mut cur = CodeSet::full(q);
    let mut nxt = CodeSet::empty(q);
    for _ in 1..=n_max {
        nxt.clear();
        for y in cur.iter() {
            nxt.insert(fp.add_codes(pow[y as usize] as u64, alpha_code));
        }
        let n = nxt.count();
        if n == *sizes.last().unwrap() {
            let last = *sizes.last().unwrap();
            while sizes.len() <= n_max as usize {
                sizes.push(last);
            }
            break;
        }
        sizes.push(n);
        core::mem::swap(&mut cur, &mut nxt);
    }
    sizes
}

/// Normalization target: `mu(f) = X^2 + delta` with
/// `delta = -(b^2 - 4ac - 2b) / 4`. Odd characteristic only.
pub fn mu_normalize(fp: &FieldParams, f: &QuadraticPoly) -> Result<FieldElement> {
    if fp.p() == 2 {
        return Err(Error::CharacteristicTwo { p: 2 });
    }
    let two = fp.add(fp.one(), fp.one())?;
    let four = fp.add(two, two)?;
    let b2 = fp.mul(f.b, f.b)?;
    let four_ac = fp.mul(four, fp.mul(f.a, f.c)?)?;
    let two_b = fp.mul(two, f.b)?;
    let num = fp.sub(fp.sub(b2, four_ac)?, two_b)?;
    fp.neg(fp.mul(num, fp.inv(four)?)?)
}

/// Outcome of the pointwise conjugacy verification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConjugacyCheck {
    /// Conjugation by `aX + b/2` carries `f` to `X^2 + delta` everywhere.
    Ok { delta: FieldElement },
    /// First code at which the conjugated table disagrees (must never fire).
    Counterexample { code: u64 },
}

/// Check pointwise over `F_q` that `mu_{a,b} ∘ f ∘ mu_{a,b}^{-1} = X^2 + delta`,
/// in the equivalent form `mu(f(y)) = (mu(y))^2 + delta` for every `y`.
pub fn verify_conjugacy(
    fp: &FieldParams,
    f: &QuadraticPoly,
    limit: TableLimit,
) -> Result<ConjugacyCheck> {
    limit.check(fp.q())?;
    let delta = mu_normalize(fp, f)?;
    let two = fp.add(fp.one(), fp.one())?;
    let half_b = fp.mul(f.b, fp.inv(two)?)?;
    let mu = |y: FieldElement| -> Result<FieldElement> {
        fp.add(fp.mul(f.a, y)?, half_b)
    };
    for code in 0..fp.q() {
        let y = fp.decode(code)?;
        let fy = eval_quadratic(fp, f, y)?;
        let lhs = mu(fy)?;
        let my = mu(y)?;
        let rhs = fp.add(fp.mul(my, my)?, delta)?;
        if lhs != rhs {
            return Ok(ConjugacyCheck::Counterexample { code });
        }
    }
    Ok(ConjugacyCheck::Ok { delta })
}

fn eval_quadratic(fp: &FieldParams, f: &QuadraticPoly, x: FieldElement) -> Result<FieldElement> {
    let x2 = fp.mul(x, x)?;
    fp.add(fp.add(fp.mul(f.a, x2)?, fp.mul(f.b, x)?)?, f.c)
}

/// Table of a general quadratic.
pub fn quadratic_table(
    fp: &FieldParams,
    f: &QuadraticPoly,
    limit: TableLimit,
) -> Result<FunctionTable> {
    limit.check(fp.q())?;
    FunctionTable::build(fp.q(), limit, |code| {
        let x = fp.decode(code).expect("code in range");
        eval_quadratic(fp, f, x).expect("same field").code()
    })
}

/// Group every quadratic by its normalization target; fiber sizes must all
/// equal `q(q-1)`.
pub fn mu_fibers(fp: &FieldParams) -> Result<BTreeMap<u64, u64>> {
    let q = fp.q();
    let mut fibers = BTreeMap::new();
    for a in 1..q {
        for b in 0..q {
            for c in 0..q {
                let f = QuadraticPoly::new(fp.decode(a)?, fp.decode(b)?, fp.decode(c)?)?;
                let delta = mu_normalize(fp, &f)?;
                *fibers.entry(delta.code()).or_insert(0) += 1;
            }
        }
    }
    Ok(fibers)
}

/// Which `alpha` a sweep visits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepFilter {
    All,
    PrimitiveOnly,
}

impl SweepFilter {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepFilter::All => "all",
            SweepFilter::PrimitiveOnly => "primitive_only",
        }
    }
}

/// Codes passing the filter, in canonical order.
pub fn sweep_alpha_codes(fp: &FieldParams, filter: SweepFilter) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for code in 0..fp.q() {
        let keep = match filter {
            SweepFilter::All => true,
            SweepFilter::PrimitiveOnly => fp.is_primitive(fp.decode(code)?)?,
        };
        if keep {
            out.push(code);
        }
    }
    Ok(out)
}

/// Strata report of `x^d + alpha` for one `alpha`, reusing a power table.
pub fn report_for_alpha(
    fp: &FieldParams,
    pow: &[u32],
    alpha_code: u64,
    limit: TableLimit,
) -> Result<StrataReport> {
    Ok(table_from_power(fp, pow, alpha_code, limit)?.strata_report())
}

/// Per-alpha reports plus exact aggregate means.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub p: u64,
    pub r: u32,
    pub q: u64,
    pub d: u64,
    pub n_max: u32,
    pub filter: SweepFilter,
    /// `(alpha_code, report)` sorted by code.
    pub entries: Vec<(u64, StrataReport)>,
    /// Exact mean of `w_n` over the swept `alpha`, for `n = 0..=n_max`.
    pub mean_w: Vec<Rat>,
}

impl SweepResult {
    /// Aggregate a finished entry list (already sorted by code). The mean is
    /// a sum of exact rationals in canonical order, so the result does not
    /// depend on how the per-alpha work was scheduled.
    pub fn assemble(
        fp: &FieldParams,
        d: u64,
        n_max: u32,
        filter: SweepFilter,
        entries: Vec<(u64, StrataReport)>,
    ) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        let mut mean_w = vec![Rat::zero(); n_max as usize + 1];
        if !entries.is_empty() {
            let count = Rat::from_integer((entries.len() as u64).into());
            for (n, slot) in mean_w.iter_mut().enumerate() {
                let mut sum = Rat::zero();
                for (_, report) in &entries {
                    sum += report.w(n as u32);
                }
                *slot = sum / &count;
            }
        }
        SweepResult {
            p: fp.p(),
            r: fp.r(),
            q: fp.q(),
            d,
            n_max,
            filter,
            entries,
            mean_w,
        }
    }

    /// Exact mean of `w_{m,n}` over the swept alphas, recomputed on demand.
    pub fn mean_wmn(&self, m: u32, n: u32) -> Result<Rat> {
        if self.entries.is_empty() {
            return Ok(Rat::zero());
        }
        let mut sum = Rat::zero();
        for (_, report) in &self.entries {
            sum += report.w_mn(m, n)?;
        }
        Ok(sum / Rat::from_integer((self.entries.len() as u64).into()))
    }
}

/// Full sweep over the filtered `alpha`, serially in code order.
pub fn sweep_family(
    fp: &FieldParams,
    d: u64,
    n_max: u32,
    filter: SweepFilter,
    limit: TableLimit,
) -> Result<SweepResult> {
    let pow = power_table(fp, d, limit)?;
    let codes = sweep_alpha_codes(fp, filter)?;
    let mut entries = Vec::with_capacity(codes.len());
    for code in codes {
        entries.push((code, report_for_alpha(fp, &pow, code, limit)?));
    }
    Ok(SweepResult::assemble(fp, d, n_max, filter, entries))
}

/// How to average `w_{m,n}` over all quadratics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AverageMode {
    /// `(1/q) * sum over delta of w_{m,n}(X^2 + delta)`; exact because the
    /// normalization is `q(q-1)`-to-one and strata sizes are conjugacy
    /// invariants.
    ViaMu,
    /// Direct average over all `q^2 (q-1)` quadratics.
    BruteForce,
}

/// Cap above which the cubic-cost brute-force average is refused.
pub const BRUTE_FORCE_Q_LIMIT: u64 = 64;

/// Exact average of `w_{m,n}` over all degree-2 polynomials.
pub fn average_quadratics(
    fp: &FieldParams,
    m: u32,
    n: u32,
    mode: AverageMode,
    limit: TableLimit,
) -> Result<Rat> {
    if fp.p() == 2 {
        return Err(Error::CharacteristicTwo { p: 2 });
    }
    if m >= n {
        return Err(Error::BadRange("average requires m < n"));
    }
    let q = fp.q();
    match mode {
        AverageMode::ViaMu => {
            let pow = power_table(fp, 2, limit)?;
            let mut sum = Rat::zero();
            for delta in 0..q {
                let t = table_from_power(fp, &pow, delta, limit)?;
                sum += t.w_fraction(m, n)?;
            }
            Ok(sum / Rat::from_integer(q.into()))
        }
        AverageMode::BruteForce => {
            if q > BRUTE_FORCE_Q_LIMIT {
                return Err(Error::TableLimitExceeded { q, limit: BRUTE_FORCE_Q_LIMIT });
            }
            let mut sum = Rat::zero();
            let mut count: u64 = 0;
            for a in 1..q {
                for b in 0..q {
                    for c in 0..q {
                        let f = QuadraticPoly::new(
                            fp.decode(a)?,
                            fp.decode(b)?,
                            fp.decode(c)?,
                        )?;
                        let t = quadratic_table(fp, &f, limit)?;
                        sum += t.w_fraction(m, n)?;
                        count += 1;
                    }
                }
            }
            debug_assert_eq!(count, q * q * (q - 1));
            Ok(sum / Rat::from_integer(count.into()))
        }
    }
}

//! Fast invariant suites behind `check --suite <name>`. Each check prints
//! one PASS/FAIL line; a suite fails if any check does.

use std::collections::BTreeMap;

use strata_core::bounds::{self, BoundParams, ScanInequality, TheoremId};
use strata_core::field::FieldParams;
use strata_core::precise::LogBase;
use strata_core::rng::SplitMix64;
use strata_core::unifam::{self, AverageMode, QuadraticPoly, SweepFilter};
use strata_core::wreath;
use strata_core::{Rat, TableLimit};

use crate::args::SuiteArg;
use crate::AppError;

type Check = (&'static str, fn() -> Result<(), String>);

fn limit() -> TableLimit {
    TableLimit::default()
}

fn prime_powers_up_to(max: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    for p in 2..=max {
        if !strata_core::field::is_prime(p) {
            continue;
        }
        let mut q = p;
        let mut r = 1u32;
        while q <= max {
            out.push((p, r));
            q = match q.checked_mul(p) {
                Some(next) => next,
                None => break,
            };
            r += 1;
        }
    }
    out
}

fn check_partition() -> Result<(), String> {
    let mut rng = SplitMix64::new(0xC0FFEE);
    for i in 0..30 {
        let q = 2 + rng.below(4095);
        let next: Vec<u32> = (0..q).map(|_| rng.below(q) as u32).collect();
        let t = strata_core::dynamo::FunctionTable::from_next(next, limit())
            .map_err(|e| e.to_string())?;
        let report = t.strata_report();
        let total: u64 = report.strata().values().sum();
        if report.periodic_count() + total != q {
            return Err(format!("random table {i}: partition sum mismatch"));
        }
        if t.tail_depths() != t.chain_classification() {
            return Err(format!("random table {i}: stratum algorithms disagree"));
        }
        if report.periodic_count() != t.periodic_set().len() as u64 {
            return Err(format!("random table {i}: peeling vs image count"));
        }
    }
    for (p, r) in prime_powers_up_to(121) {
        let fp = FieldParams::new(p, r).map_err(|e| e.to_string())?;
        for d in 1..=3u64 {
            let pow = unifam::power_table(&fp, d, limit()).map_err(|e| e.to_string())?;
            for alpha in 0..fp.q() {
                let t = unifam::table_from_power(&fp, &pow, alpha, limit())
                    .map_err(|e| e.to_string())?;
                let report = t.strata_report();
                let total: u64 = report.strata().values().sum();
                if report.periodic_count() + total != fp.q() {
                    return Err(format!("q={} d={d} alpha={alpha}: partition", fp.q()));
                }
                if t.tail_depths() != t.chain_classification() {
                    return Err(format!("q={} d={d} alpha={alpha}: algorithms", fp.q()));
                }
            }
        }
    }
    Ok(())
}

fn check_field() -> Result<(), String> {
    for (p, r) in [(2u64, 9u32), (3, 5), (5, 3), (7, 3), (11, 2), (509, 1)] {
        let fp = FieldParams::new(p, r).map_err(|e| e.to_string())?;
        let again = FieldParams::new(p, r).map_err(|e| e.to_string())?;
        if fp != again {
            return Err(format!("field construction not deterministic for p={p} r={r}"));
        }
        for code in 1..fp.q() {
            let a = fp.decode(code).unwrap();
            if fp.pow(a, fp.q() - 1).unwrap() != fp.one() {
                return Err(format!("Lagrange fails at code {code} in {}", fp.descriptor()));
            }
            if fp.mul(fp.inv(a).unwrap(), a).unwrap() != fp.one() {
                return Err(format!("inverse fails at code {code} in {}", fp.descriptor()));
            }
        }
        let counts = fp.count_by_degree();
        let mut brute: BTreeMap<u32, u64> = BTreeMap::new();
        for code in 0..fp.q() {
            *brute.entry(fp.degree_over_prime(fp.decode(code).unwrap()).unwrap()).or_insert(0) +=
                1;
        }
        if counts != brute {
            return Err(format!("degree counts mismatch in {}", fp.descriptor()));
        }
    }
    Ok(())
}

fn check_w0() -> Result<(), String> {
    for (p, r) in prime_powers_up_to(121) {
        let fp = FieldParams::new(p, r).map_err(|e| e.to_string())?;
        for d in 1..=6u64 {
            let expected = unifam::w0_exact(fp.q(), d);
            let pow = unifam::power_table(&fp, d, limit()).map_err(|e| e.to_string())?;
            for alpha in 0..fp.q() {
                let report = unifam::report_for_alpha(&fp, &pow, alpha, limit())
                    .map_err(|e| e.to_string())?;
                if report.w(0) != expected {
                    return Err(format!("w0 formula fails at q={} d={d} alpha={alpha}", fp.q()));
                }
            }
        }
    }
    Ok(())
}

fn check_mu() -> Result<(), String> {
    for (p, r) in [(5u64, 1u32), (7, 1), (3, 2)] {
        let fp = FieldParams::new(p, r).map_err(|e| e.to_string())?;
        let q = fp.q();
        let fibers = unifam::mu_fibers(&fp).map_err(|e| e.to_string())?;
        if fibers.len() as u64 != q || fibers.values().any(|&s| s != q * (q - 1)) {
            return Err(format!("fiber sizes wrong over q={q}"));
        }
        let pow = unifam::power_table(&fp, 2, limit()).map_err(|e| e.to_string())?;
        for a in 1..q {
            for b in 0..q {
                for c in 0..q {
                    let f = QuadraticPoly::new(
                        fp.decode(a).unwrap(),
                        fp.decode(b).unwrap(),
                        fp.decode(c).unwrap(),
                    )
                    .unwrap();
                    let delta = unifam::mu_normalize(&fp, &f).map_err(|e| e.to_string())?;
                    let direct = unifam::quadratic_table(&fp, &f, limit())
                        .map_err(|e| e.to_string())?
                        .strata_report();
                    let norm = unifam::table_from_power(&fp, &pow, delta.code(), limit())
                        .map_err(|e| e.to_string())?
                        .strata_report();
                    if direct != norm {
                        return Err(format!("conjugacy invariance fails q={q} f={a},{b},{c}"));
                    }
                }
            }
        }
        let via = average_pair(&fp, 0, 1, AverageMode::ViaMu)?;
        let brute = average_pair(&fp, 0, 1, AverageMode::BruteForce)?;
        if via != brute {
            return Err(format!("average modes disagree over q={q}"));
        }
    }
    Ok(())
}

fn average_pair(fp: &FieldParams, m: u32, n: u32, mode: AverageMode) -> Result<Rat, String> {
    unifam::average_quadratics(fp, m, n, mode, limit()).map_err(|e| e.to_string())
}

fn check_wreath() -> Result<(), String> {
    for (d, n) in [(2u64, 1u32), (2, 2), (2, 3), (2, 4), (3, 2)] {
        let rec = wreath::fix_rationals(d, n).map_err(|e| e.to_string())?[n as usize].clone();
        let oracle = wreath::fix_enumerate_oracle(d, n).map_err(|e| e.to_string())?;
        if rec != oracle {
            return Err(format!("recursion vs enumeration at d={d} n={n}"));
        }
    }
    for d in 2..=6u64 {
        for n in 1..=10u32 {
            if !wreath::band_verdict(d, n).map_err(|e| e.to_string())? {
                return Err(format!("band violated at d={d} n={n}"));
            }
        }
        let ivs = wreath::fix_intervals(d, 12, 160).map_err(|e| e.to_string())?;
        for k in 1..12usize {
            if ivs[k + 1].certainly_lt(&ivs[k]) != Some(true) {
                return Err(format!("monotone decrease fails at d={d} n={k}"));
            }
        }
    }
    Ok(())
}

fn check_bounds() -> Result<(), String> {
    let scan = bounds::threshold_scan(&ScanInequality::OrderOfGrowth, LogBase::Ten, (2, 10_000))
        .map_err(|e| e.to_string())?;
    if scan.stable != 134 {
        return Err(format!("base-10 stable threshold is {}, expected 134", scan.stable));
    }
    for d in [2u64, 3] {
        let params = BoundParams::new(1_000_003, 40, d, 20).with_m(7);
        let band = bounds::eval_bound(TheoremId::WmnBand, &params).map_err(|e| e.to_string())?;
        let (lo, hi) = (band.lower.unwrap(), band.upper.unwrap());
        if lo.certainly_lt(&hi) != Some(true) {
            return Err(format!("band sides out of order at d={d}"));
        }
    }
    for n in [5u64, 12, 30] {
        let h = bounds::hypothesis_check(TheoremId::ImageBand, &BoundParams::new(5, 27, 2, n))
            .map_err(|e| e.to_string())?;
        if h.r_threshold_ok {
            return Err(format!("desk-scale r threshold claimed in reach at n={n}"));
        }
    }
    Ok(())
}

/// Sweep determinism across worker counts, exercising the whole CSV path.
fn check_determinism() -> Result<(), String> {
    let fp = FieldParams::new(101, 1).map_err(|e| e.to_string())?;
    let one = crate::parallel::sweep(&fp, 2, 4, SweepFilter::All, limit(), 1)
        .and_then(|s| crate::csvio::sweep_to_csv(&s))
        .map_err(|e| e.to_string())?;
    let eight = crate::parallel::sweep(&fp, 2, 4, SweepFilter::All, limit(), 8)
        .and_then(|s| crate::csvio::sweep_to_csv(&s))
        .map_err(|e| e.to_string())?;
    if one != eight {
        return Err("sweep CSV differs between 1 and 8 workers".into());
    }
    Ok(())
}

pub fn run_suite(suite: SuiteArg) -> Result<(), AppError> {
    let checks: Vec<Check> = match suite {
        SuiteArg::Partition => vec![("partition", check_partition)],
        SuiteArg::Field => vec![("field", check_field)],
        SuiteArg::W0 => vec![("w0", check_w0)],
        SuiteArg::Mu => vec![("mu", check_mu)],
        SuiteArg::Wreath => vec![("wreath", check_wreath)],
        SuiteArg::Bounds => vec![("bounds", check_bounds)],
        SuiteArg::All => vec![
            ("field", check_field),
            ("partition", check_partition),
            ("w0", check_w0),
            ("mu", check_mu),
            ("wreath", check_wreath),
            ("bounds", check_bounds),
            ("determinism", check_determinism),
        ],
    };
    let mut failures = 0;
    for (name, check) in checks {
        match check() {
            Ok(()) => println!("check {name}: PASS"),
            Err(msg) => {
                println!("check {name}: FAIL ({msg})");
                failures += 1;
            }
        }
    }
    if failures > 0 {
        Err(AppError::Domain(format!("{failures} check(s) failed")))
    } else {
        Ok(())
    }
}

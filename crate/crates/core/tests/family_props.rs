//! Family-level invariants: the alpha-independent `w_0` formula, Frobenius
//! invariance of whole reports, independence from the field model, and the
//! conjugacy-invariance machinery behind the quadratic averages.

use strata_core::dynamo::StrataReport;
use strata_core::field::FieldParams;
use strata_core::unifam::{
    average_quadratics, mu_fibers, mu_normalize, power_table, report_for_alpha, sweep_family,
    table_from_power, unicritical_table, AverageMode, QuadraticPoly, SweepFilter,
};
use strata_core::TableLimit;

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
            match q.checked_mul(p) {
                Some(next) => {
                    q = next;
                    r += 1;
                }
                None => break,
            }
        }
    }
    out
}

#[test]
fn w0_formula_matches_brute_force_on_small_fields() {
    for (p, r) in prime_powers_up_to(121) {
        let fp = FieldParams::new(p, r).unwrap();
        for d in 1..=6u64 {
            let expected = strata_core::unifam::w0_exact(fp.q(), d);
            let pow = power_table(&fp, d, limit()).unwrap();
            for alpha in 0..fp.q() {
                let report = report_for_alpha(&fp, &pow, alpha, limit()).unwrap();
                assert_eq!(report.w(0), expected, "q={} d={d} alpha={alpha}", fp.q());
            }
        }
    }
}

#[test]
fn frobenius_conjugate_alphas_have_identical_reports() {
    let fields = [
        (2u64, 2u32),
        (2, 4),
        (2, 8),
        (3, 2),
        (3, 4),
        (5, 2),
        (7, 2),
        (11, 2),
        (13, 2),
    ];
    for (p, r) in fields {
        let fp = FieldParams::new(p, r).unwrap();
        for d in [2u64, 3] {
            let pow = power_table(&fp, d, limit()).unwrap();
            for alpha in 0..fp.q() {
                let a = fp.decode(alpha).unwrap();
                let conj = fp.frobenius(a).unwrap();
                if conj.code() == alpha {
                    continue;
                }
                let ra = report_for_alpha(&fp, &pow, alpha, limit()).unwrap();
                let rb = report_for_alpha(&fp, &pow, conj.code(), limit()).unwrap();
                assert_eq!(ra, rb, "q={} d={d} alpha={alpha}", fp.q());
            }
        }
    }
}

/// Multiset of whole-report shapes over a sweep; any two models of the same
/// field must produce the same multiset.
fn report_multiset(fp: &FieldParams, d: u64) -> Vec<(u64, usize, Vec<(u32, u64)>)> {
    let pow = power_table(fp, d, limit()).unwrap();
    let mut out: Vec<_> = (0..fp.q())
        .map(|alpha| {
            let r = report_for_alpha(fp, &pow, alpha, limit()).unwrap();
            (
                r.periodic_count(),
                r.tail_length(),
                r.strata().iter().map(|(&n, &w)| (n, w)).collect::<Vec<_>>(),
            )
        })
        .collect();
    out.sort();
    out
}

#[test]
fn strata_statistics_do_not_depend_on_the_field_model() {
    // F_9 under s^2 + 1 (canonical) and s^2 + s + 2
    let canonical = FieldParams::new(3, 2).unwrap();
    let alt = FieldParams::with_modulus(3, 2, vec![2, 1, 1]).unwrap();
    // F_8 under s^3 + s + 1 (canonical) and s^3 + s^2 + 1
    let can8 = FieldParams::new(2, 3).unwrap();
    assert_eq!(can8.modulus(), &[1, 1, 0, 1]);
    let alt8 = FieldParams::with_modulus(2, 3, vec![1, 0, 1, 1]).unwrap();
    for d in [2u64, 3, 4] {
        assert_eq!(report_multiset(&canonical, d), report_multiset(&alt, d), "q=9 d={d}");
        assert_eq!(report_multiset(&can8, d), report_multiset(&alt8, d), "q=8 d={d}");
    }
}

#[test]
fn with_modulus_rejects_reducible_polynomials() {
    // s^2 + 2 has the root 1 over F_3
    assert!(FieldParams::with_modulus(3, 2, vec![2, 0, 1]).is_err());
    // not monic
    assert!(FieldParams::with_modulus(3, 2, vec![1, 0, 2]).is_err());
}

fn report_of_quadratic(fp: &FieldParams, a: u64, b: u64, c: u64) -> StrataReport {
    let f = QuadraticPoly::new(
        fp.decode(a).unwrap(),
        fp.decode(b).unwrap(),
        fp.decode(c).unwrap(),
    )
    .unwrap();
    strata_core::unifam::quadratic_table(fp, &f, limit()).unwrap().strata_report()
}

#[test]
fn strata_are_conjugacy_invariant_for_all_quadratics() {
    for (p, r) in [(5u64, 1u32), (7, 1), (3, 2), (11, 1), (13, 1)] {
        let fp = FieldParams::new(p, r).unwrap();
        let pow = power_table(&fp, 2, limit()).unwrap();
        for a in 1..fp.q() {
            for b in 0..fp.q() {
                for c in 0..fp.q() {
                    let f = QuadraticPoly::new(
                        fp.decode(a).unwrap(),
                        fp.decode(b).unwrap(),
                        fp.decode(c).unwrap(),
                    )
                    .unwrap();
                    let delta = mu_normalize(&fp, &f).unwrap();
                    let direct = report_of_quadratic(&fp, a, b, c);
                    let normalized = table_from_power(&fp, &pow, delta.code(), limit())
                        .unwrap()
                        .strata_report();
                    assert_eq!(direct, normalized, "q={} f={a},{b},{c}", fp.q());
                }
            }
        }
    }
}

#[test]
fn mu_fibers_have_size_q_times_q_minus_one() {
    for (p, r) in [(5u64, 1u32), (7, 1), (3, 2)] {
        let fp = FieldParams::new(p, r).unwrap();
        let fibers = mu_fibers(&fp).unwrap();
        let q = fp.q();
        assert_eq!(fibers.len() as u64, q);
        assert!(fibers.values().all(|&size| size == q * (q - 1)));
    }
}

#[test]
fn averages_agree_across_modes_on_odd_small_fields() {
    for (p, r) in [(5u64, 1u32), (7, 1), (3, 2)] {
        let fp = FieldParams::new(p, r).unwrap();
        for (m, n) in [(0u32, 1u32), (0, 2), (1, 3)] {
            let via = average_quadratics(&fp, m, n, AverageMode::ViaMu, limit()).unwrap();
            let brute = average_quadratics(&fp, m, n, AverageMode::BruteForce, limit()).unwrap();
            assert_eq!(via, brute, "q={} ({m},{n})", fp.q());
        }
    }
}

#[test]
fn sweep_aggregate_is_recomputable_from_entries() {
    let fp = FieldParams::new(13, 1).unwrap();
    let sweep = sweep_family(&fp, 2, 5, SweepFilter::All, limit()).unwrap();
    for n in 0..=5u32 {
        let mut sum = strata_core::Rat::from_integer(0.into());
        for (_, report) in &sweep.entries {
            sum += report.w(n);
        }
        let mean = sum / strata_core::Rat::from_integer((sweep.entries.len() as u64).into());
        assert_eq!(sweep.mean_w[n as usize], mean);
    }
    // generalized means telescope over the singles
    let w01 = sweep.mean_wmn(0, 1).unwrap();
    let w13 = sweep.mean_wmn(1, 3).unwrap();
    let w03 = sweep.mean_wmn(0, 3).unwrap();
    assert_eq!(w01 + w13, w03);
}

#[test]
fn primitive_filter_matches_degree_counts() {
    for (p, r) in [(2u64, 4u32), (3, 3), (5, 2)] {
        let fp = FieldParams::new(p, r).unwrap();
        let sweep = sweep_family(&fp, 2, 2, SweepFilter::PrimitiveOnly, limit()).unwrap();
        let counts = fp.count_by_degree();
        assert_eq!(sweep.entries.len() as u64, counts[&r]);
    }
}

#[test]
fn unicritical_degree_one_is_a_bijection_everywhere() {
    let fp = FieldParams::new(17, 1).unwrap();
    for alpha in 0..17 {
        let t = unicritical_table(&fp, 1, fp.decode(alpha).unwrap(), limit()).unwrap();
        let r = t.strata_report();
        assert!(r.strata().is_empty());
        assert_eq!(r.periodic_count(), 17);
    }
}

//! Field-level invariants: Lagrange, inverses, Frobenius structure, subfield
//! counts, and independence of dynamical statistics from the field model.

use proptest::prelude::*;
use std::collections::BTreeMap;

use strata_core::field::FieldParams;
use strata_core::rng::SplitMix64;

/// Fields with q up to 2^12, covering several characteristics and degrees.
fn test_fields() -> Vec<FieldParams> {
    [
        (2u64, 12u32),
        (2, 8),
        (3, 7),
        (3, 4),
        (5, 5),
        (7, 4),
        (11, 3),
        (13, 3),
        (61, 2),
        (4093, 1),
    ]
    .into_iter()
    .map(|(p, r)| FieldParams::new(p, r).unwrap())
    .collect()
}

#[test]
fn lagrange_and_inverse_hold_everywhere() {
    for fp in test_fields() {
        let q = fp.q();
        assert!(q <= 1 << 12);
        for code in 1..q {
            let a = fp.decode(code).unwrap();
            assert_eq!(fp.pow(a, q - 1).unwrap(), fp.one(), "a^(q-1) in {}", fp.descriptor());
            let inv = fp.inv(a).unwrap();
            assert_eq!(fp.mul(inv, a).unwrap(), fp.one(), "inv in {}", fp.descriptor());
        }
    }
}

#[test]
fn frobenius_is_additive_and_multiplicative() {
    for fp in test_fields() {
        let mut rng = SplitMix64::new(0xF0B0 ^ fp.q());
        for _ in 0..1000 {
            let a = fp.decode(rng.below(fp.q())).unwrap();
            let b = fp.decode(rng.below(fp.q())).unwrap();
            let fa = fp.frobenius(a).unwrap();
            let fb = fp.frobenius(b).unwrap();
            assert_eq!(
                fp.frobenius(fp.add(a, b).unwrap()).unwrap(),
                fp.add(fa, fb).unwrap()
            );
            assert_eq!(
                fp.frobenius(fp.mul(a, b).unwrap()).unwrap(),
                fp.mul(fa, fb).unwrap()
            );
        }
    }
}

#[test]
fn degree_counts_match_brute_force_and_subfield_bound() {
    for fp in test_fields() {
        let counts = fp.count_by_degree();
        let mut brute: BTreeMap<u32, u64> = BTreeMap::new();
        for code in 0..fp.q() {
            let d = fp.degree_over_prime(fp.decode(code).unwrap()).unwrap();
            *brute.entry(d).or_insert(0) += 1;
        }
        assert_eq!(counts, brute, "{}", fp.descriptor());
        let total: u64 = counts.values().sum();
        assert_eq!(total, fp.q());
        if fp.r() > 1 {
            let non_primitive = fp.q() - counts[&fp.r()];
            // non_primitive < 2 p^{r/2}
            assert!((non_primitive as u128).pow(2) < 4 * fp.q() as u128);
        }
    }
}

proptest! {
    #[test]
    fn codec_round_trips(p_idx in 0usize..4, code_seed in any::<u64>()) {
        let (p, r) = [(2u64, 5u32), (3, 3), (7, 2), (101, 1)][p_idx];
        let fp = FieldParams::new(p, r).unwrap();
        let code = code_seed % fp.q();
        let a = fp.decode(code).unwrap();
        let coeffs = fp.coeffs(a).unwrap();
        prop_assert_eq!(coeffs.len(), r as usize);
        prop_assert!(coeffs.iter().all(|&c| c < p));
        prop_assert_eq!(fp.encode(&coeffs).unwrap(), a);
        prop_assert_eq!(a.code(), code);
    }

    #[test]
    fn pow_agrees_with_repeated_multiplication(code_seed in any::<u64>(), e in 0u64..48) {
        let fp = FieldParams::new(3, 4).unwrap();
        let a = fp.decode(code_seed % fp.q()).unwrap();
        let mut acc = fp.one();
        for _ in 0..e {
            acc = fp.mul(acc, a).unwrap();
        }
        prop_assert_eq!(fp.pow(a, e).unwrap(), acc);
    }
}

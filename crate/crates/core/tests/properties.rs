use frobkern::characters;
use frobkern::counting::{self, Counter, SharedMemo};
use frobkern::oracle::{self, Oracle};
use frobkern::{BigUint, CountParams};
use proptest::prelude::*;

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5, 7])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn fast_matches_oracle(p in prime(), r in 1u32..=3, m in 0u64..30, n in 0u64..8) {
        let params = CountParams::new(p, r, m, n).unwrap();
        prop_assume!(oracle::estimate_tuples(&params) < 2e5);
        prop_assert_eq!(counting::multiplicity(&params).unwrap(), oracle::brute_count(&params).unwrap());
    }

    #[test]
    fn every_enumerated_tuple_satisfies(p in prime(), r in 1u32..=3, m in 0u64..12, n in 0u64..6) {
        let params = CountParams::new(p, r, m, n).unwrap();
        let sols = Oracle::default().enumerate_solutions(&params).unwrap();
        prop_assert!(sols.iter().all(|s| s.satisfies(&params)));
        prop_assert!(sols.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn shared_memo_is_transparent(p in prime(), r in 1u32..=4, m in 0u64..40, n in 0u64..20) {
        let params = CountParams::new(p, r, m, n).unwrap();
        let memo = SharedMemo::new();
        let a = Counter::with_shared(memo.clone()).multiplicity(&params).unwrap();
        let b = Counter::with_shared(memo).multiplicity(&params).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a, Counter::new().multiplicity(&params).unwrap());
    }

    #[test]
    fn quantum_character_is_sum_of_classical(p in prop::sample::select(vec![3u64, 5]), r in 1u32..=2, n_max in 0u64..6) {
        let q = characters::char_quantum_br(p, r, n_max).unwrap();
        let mut counter = Counter::new();
        for n in 0..=n_max {
            let expected: BigUint = (0..=n * p.pow(r))
                .map(|m| counter.n_classical(&CountParams::new(p, r, m, n).unwrap()).unwrap())
                .sum();
            let expected = if n % 2 == 0 { expected } else { BigUint::default() };
            prop_assert_eq!(q.coeff(2 * n as i64), expected);
        }
    }
}

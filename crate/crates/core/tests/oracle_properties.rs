use lowdigit::construct::{ch18_degree, Constructor, Reducer};
use lowdigit::oracle::{represent_function, OracleVerdict, TargetFunction};
use lowdigit::poly::forward_differences;
use lowdigit::{Modulus, Poly};
use proptest::prelude::*;

/// Every coefficient vector of length `deg + 1` over `Z/m`; true if one of
/// them induces `values`.
fn some_polynomial_matches(ctx: &Modulus, values: &[u64], deg: usize) -> bool {
    let m = *ctx.modulus();
    let mut coeffs = vec![0u64; deg + 1];
    loop {
        let hit = values.iter().enumerate().all(|(x, v)| {
            let x = x as u64;
            coeffs
                .iter()
                .rev()
                .fold(0, |acc, c| ctx.add(&ctx.mul(&acc, &x), c))
                == *v
        });
        if hit {
            return true;
        }
        let mut i = 0;
        loop {
            if i == coeffs.len() {
                return false;
            }
            coeffs[i] += 1;
            if coeffs[i] < m {
                break;
            }
            coeffs[i] = 0;
            i += 1;
        }
    }
}

/// Largest degree whose full enumeration stays around a million candidates.
fn enumerable_degree(m: u64) -> usize {
    let mut deg = 0;
    while (m as u128).pow(deg as u32 + 2) <= 1 << 20 && deg < 6 {
        deg += 1;
    }
    deg
}

#[test]
fn negative_verdicts_survive_brute_force() {
    for (p, e) in [(2u64, 2u32), (2, 3), (3, 2), (2, 4), (3, 3), (2, 6)] {
        let ctx = Modulus::new(p, e).unwrap();
        let deg = enumerable_degree(*ctx.modulus());
        for r in 2..e {
            for target in [
                TargetFunction::remove_low_digits(&ctx, r).unwrap(),
                TargetFunction::keep_low_digits(&ctx, r).unwrap(),
            ] {
                assert!(!represent_function(&target, None)
                    .unwrap()
                    .is_representable());
                assert!(
                    !some_polynomial_matches(&ctx, target.values(), deg),
                    "{} at ({p},{e}) matched by degree ≤ {deg}",
                    target.label()
                );
            }
        }
    }
}

#[test]
fn minimal_degree_is_tight_against_enumeration() {
    for (p, e) in [(2u64, 2u32), (2, 3), (3, 2)] {
        let ctx = Modulus::new(p, e).unwrap();
        let target = TargetFunction::lowest_digit(&ctx).unwrap();
        let d = represent_function(&target, None)
            .unwrap()
            .minimal_degree()
            .unwrap();
        assert!(some_polynomial_matches(&ctx, target.values(), d));
        assert!(!some_polynomial_matches(&ctx, target.values(), d - 1));
    }
}

#[test]
fn oracle_sits_below_constructions_and_ch18() {
    let constructor = Constructor::default();
    for p in [2u64, 3, 5, 7] {
        for e in 1..=4u32 {
            if p.pow(e) > 5000 {
                continue;
            }
            let ctx = Modulus::new(p, e).unwrap();
            let target = TargetFunction::lowest_digit(&ctx).unwrap();
            let oracle = represent_function(&target, None)
                .unwrap()
                .minimal_degree()
                .unwrap();
            let minimal = constructor
                .lowest_digit_poly::<u64>(p, e, Reducer::Minimal)
                .unwrap();
            let fermat = constructor
                .lowest_digit_poly::<u64>(p, e, Reducer::Fermat)
                .unwrap();
            let (dm, df) = (minimal.degree().unwrap(), fermat.degree().unwrap());
            assert!(
                oracle <= dm,
                "({p},{e}) oracle {oracle} > minimal-reduced {dm}"
            );
            assert!(
                dm <= df,
                "({p},{e}) minimal-reduced {dm} > fermat-reduced {df}"
            );
            assert!((df as u64) < e as u64 * p);
            assert!(oracle as u64 <= ch18_degree(p, e));
        }
    }
}

fn ring() -> impl Strategy<Value = Modulus> {
    prop::sample::select(vec![(2u64, 3u32), (2, 5), (3, 2), (3, 3), (5, 2), (7, 2)])
        .prop_map(|(p, e)| Modulus::new(p, e).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Tables induced by polynomials are always representable, at no more
    /// than the generating degree, with a vanishing difference tail.
    #[test]
    fn polynomial_tables_are_representable(
        (ctx, coeffs) in ring().prop_flat_map(|ctx| {
            let m = *ctx.modulus();
            (Just(ctx), prop::collection::vec(0..m, 1..10))
        })
    ) {
        let f = Poly::new(&ctx, coeffs);
        let n = *ctx.modulus();
        let values: Vec<u64> = (0..n).map(|x| f.eval_u64(x)).collect();
        let target = TargetFunction::custom(&ctx, values.clone()).unwrap();
        let verdict = represent_function(&target, None).unwrap();
        let OracleVerdict::Representable { minimal_degree, witness } = verdict else {
            return Err(TestCaseError::fail("polynomial table rejected"));
        };
        prop_assert!(minimal_degree <= f.degree().unwrap_or(0));
        for x in 0..n {
            prop_assert_eq!(witness.eval_u64(x), values[x as usize]);
        }
        let b = forward_differences(&ctx, &values);
        prop_assert!(b[minimal_degree + 1..].iter().all(|v| *v == 0));
    }

    /// Random tables: a positive verdict re-verifies, a negative one points
    /// at a difference that really fails its divisibility condition.
    #[test]
    fn random_tables_get_sound_verdicts(
        (ctx, values) in ring().prop_flat_map(|ctx| {
            let m = *ctx.modulus();
            (Just(ctx), prop::collection::vec(0..m, m as usize))
        })
    ) {
        let target = TargetFunction::custom(&ctx, values.clone()).unwrap();
        match represent_function(&target, None).unwrap() {
            OracleVerdict::Representable { witness, .. } => {
                for (x, v) in values.iter().enumerate() {
                    prop_assert_eq!(witness.eval_u64(x as u64), *v);
                }
            }
            OracleVerdict::NotRepresentable { failing_index, required_divisor, actual_difference } => {
                let b = forward_differences(&ctx, &values);
                prop_assert_eq!(*actual_difference.value(), b[failing_index]);
                prop_assert!(b[failing_index] % required_divisor != 0);
            }
        }
    }
}

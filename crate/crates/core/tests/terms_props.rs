mod common;

use casealt::terms::{beta_normalize, normalize_with, parse_term, print_term, SemSyntax, Strategy, Term};
use common::{ln_subst, to_ln, typed_term as typed, untyped};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FUEL: usize = 200_000;

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(1000)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn reduction_orders_agree(seed in any::<u64>()) {
        let t = typed(seed);
        let (lo, _) = normalize_with(&t, FUEL, Strategy::LeftmostOutermost).unwrap();
        let (ri, _) = normalize_with(&t, FUEL, Strategy::RightmostInnermost).unwrap();
        prop_assert!(lo.alpha_equal(&ri), "{t}\n  lo: {lo}\n  ri: {ri}");
    }

    #[test]
    fn normalization_is_idempotent(seed in any::<u64>()) {
        let t = typed(seed);
        let n = beta_normalize(&t, FUEL).unwrap();
        let (again, steps) = normalize_with(&n, FUEL, Strategy::LeftmostOutermost).unwrap();
        prop_assert_eq!(steps, 0);
        prop_assert_eq!(again, n);
    }

    #[test]
    fn normal_forms_print_and_reparse(seed in any::<u64>()) {
        let n = beta_normalize(&typed(seed), FUEL).unwrap();
        for syntax in [SemSyntax::Dts, SemSyntax::Fol] {
            let text = print_term(&n, syntax);
            let back = parse_term(&text, syntax).unwrap();
            prop_assert!(back.alpha_equal(&n), "{:?}: {} reparsed as {}", syntax, text, back);
        }
    }

    #[test]
    fn arbitrary_terms_print_and_reparse(seed in any::<u64>()) {
        let t = typed(seed);
        for syntax in [SemSyntax::Dts, SemSyntax::Fol] {
            let text = print_term(&t, syntax);
            let back = parse_term(&text, syntax).unwrap();
            prop_assert!(back.alpha_equal(&t), "{:?}: {} reparsed as {}", syntax, text, back);
        }
    }

    #[test]
    fn substitution_free_variables(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = untyped(&mut rng, 5);
        let v = untyped(&mut rng, 3);
        let out = t.substitute("x", &v);
        let mut allowed = t.free_vars();
        allowed.remove("x");
        allowed.extend(v.free_vars());
        prop_assert!(out.free_vars().is_subset(&allowed));
        if t.has_free("x") {
            prop_assert!(v.free_vars().is_subset(&out.free_vars()));
        } else {
            prop_assert!(out.alpha_equal(&t));
        }
    }

    #[test]
    fn substitution_matches_nameless_oracle(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = untyped(&mut rng, 5);
        let v = untyped(&mut rng, 3);
        let got = to_ln(&t.substitute("x", &v));
        prop_assert_eq!(got, ln_subst(&to_ln(&t), "x", &to_ln(&v)));
    }

    #[test]
    fn alpha_equality_matches_nameless_oracle(a in any::<u64>(), b in 0u64..64) {
        let mut ra = ChaCha8Rng::seed_from_u64(a);
        let mut rb = ChaCha8Rng::seed_from_u64(b);
        let s = untyped(&mut ra, 3);
        let t = untyped(&mut rb, 3);
        prop_assert_eq!(s.alpha_equal(&t), to_ln(&s) == to_ln(&t));
        prop_assert!(s.alpha_equal(&s));
    }

    #[test]
    fn fuel_bound_is_respected(seed in any::<u64>()) {
        let t = typed(seed);
        let (_, steps) = normalize_with(&t, FUEL, Strategy::LeftmostOutermost).unwrap();
        let tight = normalize_with(&t, steps, Strategy::LeftmostOutermost);
        prop_assert!(tight.is_ok());
        if steps > 0 {
            prop_assert!(normalize_with(&t, steps - 1, Strategy::LeftmostOutermost).is_err());
        }
    }
}

#[test]
fn omega_exhausts_fuel() {
    let w = parse_term(r"\x. x x", SemSyntax::Dts).unwrap();
    let omega = Term::app(w.clone(), w);
    assert!(beta_normalize(&omega, 50).is_err());
}

#[test]
fn generator_produces_redexes() {
    let with_steps = (0..1000u64)
        .filter(|s| normalize_with(&typed(*s), FUEL, Strategy::LeftmostOutermost).unwrap().1 > 0)
        .count();
    assert!(with_steps > 200, "{with_steps}");
}

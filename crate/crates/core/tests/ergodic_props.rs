//! Invariant states, vacuum certificates and Cesàro averages on generated elements.

mod common;

use common::{element_strategy, word};
use proptest::prelude::*;
use wmono::ergodic::{check_cesaro_bound, omega_t, vacuum_certificate, StateParam};
use wmono::rewrite::{classify_word, WordClass};
use wmono::{Case, Coeff, Element, Rational};

fn param() -> impl Strategy<Value = StateParam> {
    prop_oneof![
        Just((0, 1)),
        Just((1, 3)),
        Just((1, 1)),
        (0i64..=6).prop_map(|p| (p, 6))
    ]
    .prop_map(|(p, q)| StateParam::new(Rational::new(p, q)).unwrap())
}

fn non_unital(case: Case, lo: i32, hi: i32) -> impl Strategy<Value = Element> {
    element_strategy(case, lo, hi, 5).prop_map(|mut x| {
        x.set_unit(Coeff::zero());
        x
    })
}

fn at_least_half(x: &Element) -> bool {
    let c = vacuum_certificate(x).unwrap();
    match c.value_sq.exact_real() {
        Some(v) => v >= Rational::new(1, 4),
        None => c.value >= 0.5 - 1e-12,
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 600, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn certificate_is_at_least_half(x in non_unital(Case::Z, -4, 4)) {
        prop_assert!(at_least_half(&x), "{x}");
    }

    #[test]
    fn mirrored_certificate_is_at_least_half(x in non_unital(Case::Anti, 1, 4)) {
        prop_assert!(at_least_half(&x), "{x}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn state_axioms(
        x in element_strategy(Case::Z, -3, 3, 4),
        y in element_strategy(Case::Z, -3, 3, 4),
        t in param(),
        a in -3i64..=3,
        b in 1i64..=4,
    ) {
        prop_assert!(omega_t(&Element::identity(Case::Z), &t).unwrap().is_one());
        let s = Coeff::ratio(a, b);
        let lin = omega_t(&(&x.scale(&s) + &y), &t).unwrap();
        prop_assert_eq!(lin, &(&s * &omega_t(&x, &t).unwrap()) + &omega_t(&y, &t).unwrap());
        let pos = omega_t(&(&x.adjoint() * &x), &t).unwrap();
        prop_assert!(pos.to_c64().re >= -1e-12 && pos.to_c64().im.abs() <= 1e-12, "{x}: {pos}");
    }

    #[test]
    fn states_are_shift_invariant(x in element_strategy(Case::Z, -3, 3, 5), t in param(), m in -6i32..=6) {
        prop_assert_eq!(omega_t(&x.shift(m).unwrap(), &t).unwrap(), omega_t(&x, &t).unwrap());
    }

    #[test]
    fn state_at_infinity_reads_the_unit(x in element_strategy(Case::Z, -3, 3, 5)) {
        let t0 = StateParam::new(Rational::from_int(0)).unwrap();
        prop_assert_eq!(&omega_t(&x, &t0).unwrap(), x.unit_coeff());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 40, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn cesaro_bound_on_basis_words(w in word(-2, 2, 3), n in prop::sample::select(vec![4usize, 16])) {
        prop_assume!(classify_word(&w) == WordClass::Lambda);
        let r = check_cesaro_bound(&w, n, None).unwrap();
        prop_assert!(r.pass, "{w}, n={n}: {}", r.norm);
    }
}

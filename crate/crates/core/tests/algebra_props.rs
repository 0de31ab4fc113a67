//! Element algebra and truncated operator properties.

mod common;

use common::{element_strategy, word};
use proptest::prelude::*;
use wmono::fock::{build_generator, operator_norm};
use wmono::{evaluate, parse, Case, Coeff, Element, TruncSpace};

fn entries_are_01(m: &wmono::SparseMat<Coeff>) -> bool {
    m.entries().all(|(_, _, x)| x.is_one())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn involution(x in element_strategy(Case::Z, -3, 3, 5)) {
        prop_assert_eq!(x.adjoint().adjoint(), x);
    }

    #[test]
    fn shift_and_adjoint_respect_products(
        x in element_strategy(Case::Z, -3, 3, 3),
        y in element_strategy(Case::Z, -3, 3, 3),
        m in -5i32..=5,
    ) {
        let xy = &x * &y;
        prop_assert_eq!(xy.shift(m).unwrap(), &x.shift(m).unwrap() * &y.shift(m).unwrap());
        prop_assert_eq!(xy.adjoint(), &y.adjoint() * &x.adjoint());
    }

    #[test]
    fn distributivity(
        x in element_strategy(Case::N, 0, 3, 3),
        y in element_strategy(Case::N, 0, 3, 3),
        z in element_strategy(Case::N, 0, 3, 3),
    ) {
        prop_assert_eq!(&(&x + &y) * &z, &(&x * &z) + &(&y * &z));
    }

    #[test]
    fn printing_round_trips(x in element_strategy(Case::Z, -3, 3, 5)) {
        prop_assert_eq!(parse(&x.to_string(), Case::Z).unwrap(), x);
    }

    #[test]
    fn words_are_partial_permutations(w in word(-2, 2, 6)) {
        let space = TruncSpace::z(-2, 2, 4).unwrap();
        let m = evaluate(&space, &Element::word(Case::Z, w, Coeff::one())).unwrap();
        prop_assert!(entries_are_01(&m));
        // at most one entry per row and per column
        let mut rows: Vec<usize> = m.entries().map(|(r, _, _)| r).collect();
        let n = rows.len();
        rows.sort_unstable();
        rows.dedup();
        prop_assert_eq!(rows.len(), n);
        prop_assert!(m.columns().all(|c| c.len() <= 1));
        prop_assert!(operator_norm(&m, 1e-9).unwrap().value <= 1.0 + 1e-9);
    }

    #[test]
    fn truncated_products_match_evaluation(w in word(-2, 2, 6)) {
        // the word's matrix is the product of the truncated generator matrices
        let space = TruncSpace::z(-2, 2, 3).unwrap();
        let mut prod = wmono::SparseMat::<Coeff>::identity(space.dim());
        for g in w.letters() {
            prod = prod.mul(&build_generator(&space, g.index, g.dagger).unwrap());
        }
        prop_assert_eq!(evaluate(&space, &Element::word(Case::Z, w, Coeff::one())).unwrap(), prod);
    }
}

#[test]
fn generator_invariants() {
    for space in [
        TruncSpace::z(-2, 2, 3).unwrap(),
        TruncSpace::n(3, 3).unwrap(),
        TruncSpace::anti(3, 3).unwrap(),
    ] {
        let (lo, hi) = space.window();
        let interior = space.interior_columns(1, 0);
        for i in lo..=hi {
            let c = build_generator(&space, i, true).unwrap();
            let a = build_generator(&space, i, false).unwrap();
            assert!(entries_are_01(&c));
            // grading
            for (r, col, _) in c.entries() {
                assert_eq!(space.level_of(r), space.level_of(col) + 1);
            }
            for (r, col, _) in a.entries() {
                assert_eq!(space.level_of(r) + 1, space.level_of(col));
            }
            // partial isometry on the interior
            let cac = c.mul(&c.transpose()).mul(&c);
            assert_eq!(cac.select_columns(&interior), c.select_columns(&interior));
            // orthogonal ranges on the full space
            for j in lo..=hi {
                if i != j {
                    assert!(a.mul(&build_generator(&space, j, true).unwrap()).is_zero());
                }
            }
        }
    }
}

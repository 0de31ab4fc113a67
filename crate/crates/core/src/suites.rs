//! Relation suites for the truncated creation operators.

use rayon::prelude::*;
use serde_json::json;

use crate::expr::{Case, Element};
use crate::fock::{verify_identity, FockError, TruncSpace};
use crate::report::{Instance, Report};

fn run(
    space: &TruncSpace,
    suite: &str,
    jobs: Vec<(String, Element, Element)>,
) -> Result<Report, FockError> {
    let instances = jobs
        .par_iter()
        .map(|(id, l, r)| {
            verify_identity(space, l, r, None).map(|rep| Instance::from_identity(id.clone(), &rep))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Report::new(
        suite,
        json!({ "space": space.describe() }),
        instances,
    ))
}

/// Defining relations of the `Z` operators on every index pair of the window:
/// orthogonal ranges, creator ordering, the support rule
/// `A_i A_i† A_j† = [i ≥ j] A_j†`, the telescoping
/// `A_i† A_i + A_{i−1} A_{i−1}† = A_i A_i†` and partial isometries.
pub fn relations_z(space: &TruncSpace) -> Result<Report, FockError> {
    if space.case() != Case::Z {
        return Err(FockError::CaseMismatch {
            space: space.case(),
            element: Case::Z,
        });
    }
    let (lo, hi) = space.window();
    let c = |i| Element::c(Case::Z, i);
    let a = |i| Element::a(Case::Z, i);
    let zero = Element::zero(Case::Z);
    let mut jobs = Vec::new();
    for i in lo..=hi {
        for j in lo..=hi {
            if i != j {
                jobs.push((
                    format!("orthogonal-ranges({i},{j})"),
                    &a(i) * &c(j),
                    zero.clone(),
                ));
            }
            if i < j {
                jobs.push((
                    format!("creator-order({i},{j})"),
                    &c(i) * &c(j),
                    zero.clone(),
                ));
            }
            let rhs = if i >= j { c(j) } else { zero.clone() };
            jobs.push((
                format!("support-creator({i},{j})"),
                &(&a(i) * &c(i)) * &c(j),
                rhs,
            ));
        }
        if i > lo {
            let lhs = &(&c(i) * &a(i)) + &(&a(i - 1) * &c(i - 1));
            jobs.push((format!("telescoping({i})"), lhs, &a(i) * &c(i)));
        }
        jobs.push((
            format!("partial-isometry({i})"),
            &(&c(i) * &a(i)) * &c(i),
            c(i),
        ));
    }
    run(space, "relations-z", jobs)
}

/// Anti-monotone relations: `A_1 A_1† = I`, orthogonal ranges, the reversed
/// creator ordering and support rule, and partial isometries.
pub fn relations_anti(space: &TruncSpace) -> Result<Report, FockError> {
    if space.case() != Case::Anti {
        return Err(FockError::CaseMismatch {
            space: space.case(),
            element: Case::Anti,
        });
    }
    let (lo, hi) = space.window();
    let c = |i| Element::c(Case::Anti, i);
    let a = |i| Element::a(Case::Anti, i);
    let zero = Element::zero(Case::Anti);
    let mut jobs = vec![(
        "first-pair-identity".to_string(),
        &a(lo) * &c(lo),
        Element::identity(Case::Anti),
    )];
    for i in lo..=hi {
        for j in lo..=hi {
            if i != j {
                jobs.push((
                    format!("orthogonal-ranges({i},{j})"),
                    &a(i) * &c(j),
                    zero.clone(),
                ));
            }
            if i > j {
                jobs.push((
                    format!("creator-order({i},{j})"),
                    &c(i) * &c(j),
                    zero.clone(),
                ));
            }
            let rhs = if i <= j { c(j) } else { zero.clone() };
            jobs.push((
                format!("support-creator({i},{j})"),
                &(&a(i) * &c(i)) * &c(j),
                rhs,
            ));
        }
        jobs.push((
            format!("partial-isometry({i})"),
            &(&c(i) * &a(i)) * &c(i),
            c(i),
        ));
    }
    run(space, "anti", jobs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass() {
        assert!(relations_z(&TruncSpace::z(-2, 2, 3).unwrap())
            .unwrap()
            .all_pass());
        assert!(relations_anti(&TruncSpace::anti(3, 3).unwrap())
            .unwrap()
            .all_pass());
    }

    #[test]
    fn anti_identity_fails_in_z() {
        // in the Z case A_i A_i† is a proper projection
        let s = TruncSpace::z(0, 2, 2).unwrap();
        let x = &Element::a(Case::Z, 0) * &Element::c(Case::Z, 0);
        assert!(
            !verify_identity(&s, &x, &Element::identity(Case::Z), None)
                .unwrap()
                .pass
        );
    }
}

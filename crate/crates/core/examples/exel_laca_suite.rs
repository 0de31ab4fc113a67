//! Exel-Laca relations of the range projections against the weakly monotone
//! matrix `a_ij = [i ≥ j]`.
//!
//! `cargo run --example exel_laca_suite`

use std::collections::BTreeSet;

use wmono::exel_laca::{
    a_coeff, support_set, verify_el_suite, verify_step_identity, ElMatrix, FamilySpec,
};
use wmono::TruncSpace;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m = ElMatrix::WmZ;
    let x: BTreeSet<i32> = [2].into();
    let y: BTreeSet<i32> = [-1].into();
    println!(
        "support of X={x:?}, Y={y:?}: {:?}",
        support_set(&m, &x, &y)?
    );
    println!(
        "a(X, Y, 0) = {}, a(X, Y, 3) = {}",
        a_coeff(&m, &x, &y, 0)?,
        a_coeff(&m, &x, &y, 3)?
    );
    // an empty Y leaves the support unbounded below
    println!(
        "support of X={x:?}, Y={{}}: {:?}",
        support_set(&m, &x, &BTreeSet::new()).err()
    );

    let space = TruncSpace::z(-6, 6, 4)?;
    let family = FamilySpec::Subsets {
        lo: -4,
        hi: 4,
        max_size: 2,
    };
    let report = verify_el_suite(&space, &m, &family)?;
    println!(
        "\n{}: {} of {} instances pass",
        space.describe(),
        report.summary.passed,
        report.summary.total
    );
    for inst in report
        .instances
        .iter()
        .filter(|i| i.id.starts_with("relation(X={2}"))
        .take(3)
    {
        println!("  {} pass {}", inst.id, inst.pass);
    }

    for j in -3..=3 {
        let inst = verify_step_identity(&space, j)?;
        println!("{}: {}", inst.id, inst.pass);
    }

    // an explicit finite table
    let table = ElMatrix::table(vec![vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]])?;
    let x: BTreeSet<i32> = [0].into();
    let y: BTreeSet<i32> = [1].into();
    println!(
        "\ntable support of X={x:?}, Y={y:?}: {:?}",
        support_set(&table, &x, &y)?
    );
    Ok(())
}

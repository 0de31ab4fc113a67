//! The anti-monotone case: reversed ordering, `A_1 A_1† = I` and the
//! mirrored vacuum certificate.
//!
//! `cargo run --example anti_monotone`

use wmono::ergodic::vacuum_certificate;
use wmono::fock::verify_identity;
use wmono::suites::relations_anti;
use wmono::{parse, Case, Element, TruncSpace};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let space = TruncSpace::anti(4, 4)?;
    println!(
        "{}: dimension {}, basis starts {:?}",
        space.describe(),
        space.dim(),
        &space.basis()[..7]
    );

    let x = parse("a(1)c(1)", Case::Anti)?;
    let r = verify_identity(&space, &x, &Element::identity(Case::Anti), None)?;
    println!("A_1 A_1† = I on {} interior columns: {}", r.columns, r.pass);

    let report = relations_anti(&space)?;
    println!(
        "relation suite: {} of {} pass",
        report.summary.passed, report.summary.total
    );

    for e in ["a(1)c(1)", "1/2*a(2)c(2)", "c(3)a(1) - 2*a(4)c(4)"] {
        let c = vacuum_certificate(&parse(e, Case::Anti)?)?;
        println!("‖P_Ω − ({e})‖ >= {:.6}  (probe e_{})", c.value, c.probe);
    }
    Ok(())
}

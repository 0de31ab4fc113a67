//! Normal forms in the `Z` and `N` cases, with the rewrite trace.
//!
//! `cargo run --example normal_forms`

use wmono::rewrite::{default_fuel, equal_z, normalize_n, normalize_z, normalize_z_traced};
use wmono::{parse, Case};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // a support projection rewrites into a difference of range projections
    let x = parse("c(1)a(1)", Case::Z)?;
    let nf = normalize_z(&x)?;
    println!("{x}  =  {}", nf.to_element());
    let pairs: Vec<String> = nf.pairs.iter().map(|(i, c)| format!("{i}: {c}")).collect();
    println!(
        "  unit {}, basis words {}, pairs {{{}}}",
        nf.unit,
        nf.lambda.len(),
        pairs.join(", ")
    );

    let y = parse("a(2)c(2)c(1)a(0) + 2*q(3)p(1) - x(0)x(0)", Case::Z)?;
    let (nf, steps) = normalize_z_traced(&y, default_fuel(&y), true)?;
    println!("\n{y}\n  -> {}", nf.to_element());
    for s in steps.iter().take(8) {
        println!("  {s}");
    }
    if steps.len() > 8 {
        println!("  ... {} steps in total", steps.len());
    }

    // equality is decided on normal forms
    let lhs = parse("c(2)a(2) + a(1)c(1)", Case::Z)?;
    let rhs = parse("a(2)c(2)", Case::Z)?;
    println!("\n{lhs} == {rhs}: {}", equal_z(&lhs, &rhs)?);

    // N case: s_0 is the bottom index and the normal form is a sum of paths
    let n = parse("a(1)c(1) + a(0)c(0) - c(2)a(1)c(1)a(2)", Case::N)?;
    let nf = normalize_n(&n)?;
    println!("\n{n}\n  -> {}", nf.to_element());
    for ((mu, nu), c) in &nf.paths {
        println!("  s{mu:?} s{nu:?}*  coefficient {c}");
    }
    Ok(())
}

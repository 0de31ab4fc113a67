//! Truncated Fock spaces: basis, generator matrices, identities on the
//! interior and operator norms.
//!
//! `cargo run --example fock_evaluation`

use wmono::fock::{apply_to_tuple, build_generator, operator_norm, verify_identity};
use wmono::rewrite::normalize_z;
use wmono::{evaluate, parse, Case, TruncSpace};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let space = TruncSpace::z(-2, 2, 3)?;
    println!("{}: dimension {}", space.describe(), space.dim());
    println!("first basis vectors: {:?}", &space.basis()[..8]);

    let c0 = build_generator(&space, 0, true)?;
    println!("\nA_0† has {} nonzero entries", c0.nnz());
    for (r, c, _) in c0.entries().take(4) {
        println!("  {:?} -> {:?}", space.tuple(c), space.tuple(r));
    }

    // creators vanish on the top level, so identities hold on the interior only
    let x = parse("c(1)a(1) + a(0)c(0)", Case::Z)?;
    let rhs = parse("a(1)c(1)", Case::Z)?;
    let inner = verify_identity(&space, &x, &rhs, None)?;
    let full = verify_identity(&space, &x, &rhs, Some(0))?;
    println!("\n{x} = {rhs}");
    println!(
        "  interior ({} columns, margin {}): pass {}",
        inner.columns, inner.margin, inner.pass
    );
    println!(
        "  all levels: pass {} (discrepancy {})",
        full.pass, full.max_discrepancy
    );

    // a normal form evaluates like its input
    let y = parse("a(2)c(2)c(1)a(0) - 1/2*x(1)x(1)", Case::Z)?;
    let nf = normalize_z(&y)?.to_element();
    println!(
        "\n{y}  ->  {nf}: {:?}",
        verify_identity(&space, &y, &nf, None)?.pass
    );

    // untruncated action on a single tuple
    println!("\n{y} applied to e_(1,0):");
    for (t, c) in apply_to_tuple(&space, &y, &[1, 0])? {
        println!("  {c} e{t:?}");
    }

    let m = evaluate(&space, &parse("c(1) + c(0)", Case::Z)?)?;
    let est = operator_norm(&m, 1e-9)?;
    println!("\n‖A_1† + A_0†‖ in [{:.6}, {:.6}]", est.lower, est.value);
    Ok(())
}

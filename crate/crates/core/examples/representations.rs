//! Level representations of the `N` algebra with a formal gauge phase,
//! commutants, and recovery of a finite direct sum.
//!
//! `cargo run --example representations`

use wmono::fock::build_generator;
use wmono::spectral::{
    commutant_dim, decompose, position_element, rep_matrix, verify_rep, Phase, RepSpec,
    SyntheticSum,
};
use wmono::{evaluate, Case, TruncSpace};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let space = TruncSpace::n(3, 3)?;
    let spec = RepSpec::new(1, Phase::Formal, space.clone())?;
    for i in 0..=3 {
        let m = rep_matrix(&spec, i)?;
        let sample = m
            .entries()
            .next()
            .map(|(r, c, v)| format!("({r}, {c}) = {v}"))
            .unwrap_or_default();
        println!("level 1, s_{i}: {} entries {sample}", m.nnz());
    }
    for level in 0..=2 {
        let r = verify_rep(
            &RepSpec::new(level, Phase::Formal, TruncSpace::n(5, 4)?)?,
            5,
        )?;
        println!(
            "level {level}: {} of {} relation checks pass",
            r.summary.passed, r.summary.total
        );
    }

    let s1 = TruncSpace::n(1, 1)?;
    let s2 = TruncSpace::n(2, 2)?;
    println!(
        "\ncommutant of A_1 on d=1, L=1: {}",
        commutant_dim(&[build_generator(&s1, 1, true)?])?.0
    );
    println!(
        "commutant of X_1 on d=1, L=1: {}",
        commutant_dim(&[evaluate(&s1, &position_element(Case::N, 1))?])?.0
    );
    let gens = vec![
        build_generator(&s2, 1, true)?,
        build_generator(&s2, 2, true)?,
    ];
    println!(
        "commutant of A_1, A_2 on d=2, L=2: {}",
        commutant_dim(&gens)?.0
    );

    let sum: SyntheticSum = serde_json::from_str(
        r#"{"generators": 3, "particles": 3, "zero_block": 2,
            "blocks": [{"level": 0, "phase": {"re": 0.0, "im": 1.0}},
                       {"level": 1, "phase": -1.0, "multiplicity": 2}]}"#,
    )?;
    let gens = sum.build()?;
    let d = decompose(&gens)?;
    println!("\ndirect sum of dimension {}:", gens[0].rows());
    for c in &d.components {
        println!(
            "  level {}, phase {}, multiplicity {} on {} dimensions",
            c.level, c.phase, c.multiplicity, c.dim
        );
    }
    println!("  residual dimension {}", d.residual_dim);
    Ok(())
}

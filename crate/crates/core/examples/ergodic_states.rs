//! Shift dynamics: Cesàro averages, invariant states, fixed points and the
//! vacuum-distance certificate.
//!
//! `cargo run --example ergodic_states`

use wmono::ergodic::{
    cesaro_average, check_cesaro_bound, check_nonconvergence, fixed_point_check, omega_t,
    vacuum_certificate, FixedPoint, StateParam,
};
use wmono::{parse, Case, Rational};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let x = parse("c(0)", Case::Z)?;
    println!("average of {x} over 3 shifts: {}", cesaro_average(&x, 3)?);

    for y in ["c(0)", "c(0)c(-1)", "a(2)"] {
        let w = parse(y, Case::Z)?
            .terms()
            .next()
            .map(|(w, _)| w.clone())
            .unwrap();
        for n in [4, 16, 64] {
            let r = check_cesaro_bound(&w, n, None)?;
            println!(
                "{y:>10}, n = {n:>2}: norm {:.6} <= {:.6}  {}",
                r.norm, r.bound, r.pass
            );
        }
    }

    // the averaged pairs converge strongly to P_Ω but not in norm
    for n in [4, 8, 16] {
        let r = check_nonconvergence(None, n)?;
        println!(
            "n = {n:>2}: ‖D e_-n‖ = {}, ‖D‖ = {:.6}",
            r.lower_bound, r.norm
        );
    }

    let z = parse("3*I + 2*a(5)c(5) + c(1)a(0)", Case::Z)?;
    for (p, q) in [(0, 1), (1, 3), (1, 1)] {
        let t = StateParam::new(Rational::new(p, q))?;
        let shifted = omega_t(&z.shift(7)?, &t)?;
        println!(
            "ω_{}({z}) = {}  (after shifting by 7: {shifted})",
            t.value(),
            omega_t(&z, &t)?
        );
    }

    for e in ["5*I", "a(3)c(3)"] {
        match fixed_point_check(&parse(e, Case::Z)?)? {
            FixedPoint::FixedScalar(c) => println!("{e}: fixed, equal to {c}·I"),
            FixedPoint::NotFixed { shift, discrepancy } => {
                println!("{e}: moved by the shift {shift} (discrepancy {discrepancy})")
            }
        }
    }

    for e in ["a(0)c(0)", "1/2*a(0)c(0)", "c(1)a(1) + 1/3*a(-2)c(-2)"] {
        let c = vacuum_certificate(&parse(e, Case::Z)?)?;
        println!("‖P_Ω − ({e})‖ >= {:.6}  (probe e_{})", c.value, c.probe);
    }
    Ok(())
}

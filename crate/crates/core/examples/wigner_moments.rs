//! Position operators: semicircle moments, the cyclic polynomials `q_n` and
//! the averaged limit of `X_i²`.
//!
//! `cargo run --example wigner_moments`

use wmono::spectral::{
    cyclic_polynomials, limit_residual, position_element, vacuum_moment, verify_qn,
    verify_qn_product,
};
use wmono::{Case, TruncSpace};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let x = position_element(Case::N, 1);
    let moments: Vec<String> = (0..=10)
        .map(|k| vacuum_moment(&x, k).map(|m| m.to_string()))
        .collect::<Result<_, _>>()?;
    println!("⟨Ω, X_1^k Ω⟩, k = 0..10: {}", moments.join(", "));

    for (n, q) in cyclic_polynomials(5).iter().enumerate() {
        println!("q_{n} coefficients {:?}", q.coeffs());
    }
    let space = TruncSpace::n(3, 6)?;
    let r = verify_qn(&space, 2, 6)?;
    println!("q_n(X_2)Ω = e_2^⊗n for n <= 6: {}", r.all_pass());
    let p = verify_qn_product(&space, &[(2, 2), (1, 1)])?;
    println!("{} = e_2⊗e_2⊗e_1: {}", p.id, p.pass);

    println!("\nresidual of (1/(2N+1)) Σ X_i² against P_Ω + (I − P_Ω)/2:");
    for n in [10, 20, 40] {
        let vac = limit_residual(n, &[])?;
        let r = limit_residual(n, &[2, 1])?;
        println!(
            "N = {n:>2}: at Ω {:.6} (1/√(2N+1) = {:.6}), at e_2⊗e_1 {:.6} <= {:.6}",
            vac.residual,
            1.0 / ((2 * n + 1) as f64).sqrt(),
            r.residual,
            r.bound
        );
    }
    Ok(())
}

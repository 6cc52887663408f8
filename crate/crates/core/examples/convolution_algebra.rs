//! The convolution algebra: products, the involution, the modular operator
//! and conjugation, norms, and a JSON round trip.

use qubit_groupoid::algebra::{
    convolve, hahn_norm, involution, l2_norm, modular_conjugation, modular_operator_pow, pukanszky_l, pukanszky_v,
};
use qubit_groupoid::sampling::{random_element, trial_rng};
use qubit_groupoid::{psi, AlgebraElement, Complex64, FlipWord, MeasureSpec};

fn main() -> qubit_groupoid::Result<()> {
    let spec = MeasureSpec::bernoulli(0.3)?;

    // V_{e1} L_{ψ1} = -L_{ψ1} V_{e1}
    let v = pukanszky_v(FlipWord::site(1), &spec)?;
    let l = pukanszky_l(&psi(1).to_complex());
    let anti = convolve(&v, &l)?.add(&convolve(&l, &v)?)?;
    println!("|V L + L V| = {:.1e}", anti.max_abs());
    println!("|V† V - E|  = {:.1e}", convolve(&involution(&v, &spec)?, &v)?.max_abs_diff(&AlgebraElement::unit())?);

    let mut rng = trial_rng(42, 0);
    let f = random_element(&mut rng, 3, 4, 0.5);
    let g = random_element(&mut rng, 3, 4, 0.5);
    let lhs = involution(&convolve(&f, &g)?, &spec)?;
    let rhs = convolve(&involution(&g, &spec)?, &involution(&f, &spec)?)?;
    println!("(FG)† vs G†F†: {:.1e}", lhs.rel_diff(&rhs)?);

    let polar = modular_conjugation(&modular_operator_pow(&f, Complex64::new(0.5, 0.0), &spec)?, &spec)?;
    println!("JΔ^(1/2) F vs F†: {:.1e}", polar.rel_diff(&involution(&f, &spec)?)?);

    let fg = convolve(&f, &g)?;
    println!("‖FG‖₂ = {:.4} ≤ ‖F‖_H ‖G‖₂ = {:.4}", l2_norm(&fg, &spec)?, hahn_norm(&f, &spec)? * l2_norm(&g, &spec)?);

    let json = serde_json::to_string(&f).expect("serializable");
    let back: AlgebraElement = serde_json::from_str(&json).expect("round trip");
    println!("JSON round trip exact: {} ({} bytes)", back == f, json.len());
    Ok(())
}

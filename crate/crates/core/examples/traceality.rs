//! The canonical weight `τ(F) = ∫ F(x, 0) dν` is a trace only at `λ = 1/2`.
//! This is the finite stand-in for the II₁ / III_λ dichotomy.

use qubit_groupoid::algebra::{canonical_weight, convolve, trace_witness};
use qubit_groupoid::sampling::{random_element, trial_rng};
use qubit_groupoid::MeasureSpec;

fn main() -> qubit_groupoid::Result<()> {
    for lambda in [0.5, 0.4, 0.3, 0.2, 0.1] {
        let spec = MeasureSpec::bernoulli(lambda)?;
        let mut worst = 0.0f64;
        for t in 0..200 {
            let mut rng = trial_rng(1, t);
            let f = random_element(&mut rng, 3, 4, 0.5);
            let g = random_element(&mut rng, 3, 4, 0.5);
            let d = canonical_weight(&convolve(&f, &g)?, &spec)? - canonical_weight(&convolve(&g, &f)?, &spec)?;
            worst = worst.max(d.norm());
        }
        let w = trace_witness(&spec)?;
        println!(
            "λ = {lambda:.1}: random pairs max |τ(FG) - τ(GF)| = {worst:.3e}, witness {:.6} (integral margin {:.6})",
            w.violation, w.margin
        );
    }
    Ok(())
}

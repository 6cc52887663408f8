//! Bernoulli and Ising cylinder measures: weights, Kolmogorov consistency and
//! the Radon-Nikodym covariance `ν(p ⊕ w) = Δ⁻¹((p, w)) ν(p)`, in floating
//! point and in exact rationals.

use qubit_groupoid::exact::ExactBernoulli;
use qubit_groupoid::groupoid::enumerate_gamma;
use qubit_groupoid::measures::{
    cylinder_weight, integrate_real, pushforward_projection_check, translation_covariance_check,
};
use qubit_groupoid::{psi, FlipWord, MeasureSpec, Prefix};

fn main() -> qubit_groupoid::Result<()> {
    let bern: MeasureSpec = serde_json::from_str(r#"{"kind":"bernoulli","lambda":0.3}"#).expect("valid spec");
    let ising: MeasureSpec = serde_json::from_str(r#"{"kind":"ising","J":1.0}"#).expect("valid spec");

    for p in [[0u8], [1]] {
        println!("Bernoulli λ=0.3, ν({p:?}) = {}", cylinder_weight(&bern, Prefix::from_bits(&p)?)?);
    }
    println!("∫ψ₁ dν = {} (2λ-1 = {})", integrate_real(&bern, &psi(1))?, 2.0 * 0.3 - 1.0);

    for spec in [&bern, &ising] {
        let proj = (1..6).map(|k| pushforward_projection_check(spec, 6, k)).collect::<Result<Vec<_>, _>>()?;
        let cov = enumerate_gamma(3)
            .into_iter()
            .map(|w| translation_covariance_check(spec, w, 5))
            .collect::<Result<Vec<_>, _>>()?;
        println!(
            "{:?}: projection deviation {:.1e}, covariance deviation {:.1e}",
            spec,
            proj.iter().cloned().fold(0.0, f64::max),
            cov.iter().cloned().fold(0.0, f64::max)
        );
    }

    let exact = ExactBernoulli::from_ratio(3, 10)?;
    let w = FlipWord::from_sites([1, 3])?;
    println!("exact: Δ((101, {{1,3}})) = {}", exact.delta(0b101, w));
    println!("exact: covariance deviation at depth 5 = {}", exact.covariance_deviation(w, 5)?);
    println!("exact: total mass at depth 8 = {}", exact.total_mass(8)?);
    Ok(())
}

//! Modular time evolution `U_t = e^{iSt}` with the Ising transition energy,
//! the Heisenberg identity it satisfies, and a perturbed energy that breaks it.

use std::f64::consts::PI;

use qubit_groupoid::ising::{
    heisenberg_check_with, heisenberg_equivalence_check, ising_transition_energy, PerturbedEnergy, TransitionEnergy,
};
use qubit_groupoid::sampling::{random_element, trial_rng};
use qubit_groupoid::{FlipWord, GroupoidElement, MeasureSpec, Prefix};

fn main() -> qubit_groupoid::Result<()> {
    let j = 1.0;
    let zeros = Prefix::zeros(4);
    println!("S(0000, {{1}}) = {}", ising_transition_energy(j, GroupoidElement::new(zeros, FlipWord::site(1))?)?);
    println!("S(0000, {{2}}) = {}", ising_transition_energy(j, GroupoidElement::new(zeros, FlipWord::site(2))?)?);

    let mut rng = trial_rng(11, 0);
    let f = random_element(&mut rng, 4, 5, 0.6);
    let psi = random_element(&mut rng, 4, 5, 0.6);
    for t in [0.37, 1.0, PI] {
        let r = heisenberg_equivalence_check(&f, &psi, t, j)?;
        println!(
            "t = {t:.2}: deviation {:.1e}, ‖F‖₂ {:.6} → {:.6}, ‖F‖_H {:.6} → {:.6}",
            r.max_deviation, r.norms_before.l2, r.norms_after.l2, r.norms_before.hahn, r.norms_after.hahn
        );
    }

    let control = PerturbedEnergy { base: TransitionEnergy { j }, eps: 0.5 };
    let r = heisenberg_check_with(&control, &MeasureSpec::ising(j)?, &f, &psi, 1.0)?;
    println!("perturbed (non-additive) energy: deviation {:.3}", r.max_deviation);
    Ok(())
}

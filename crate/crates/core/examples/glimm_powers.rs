//! Pauli words in `M_{2^n}`, the Powers state, and the same expectations
//! computed in the groupoid algebra through the Glimm map.

use qubit_groupoid::matrix_bridge::{
    gns_compare_random, gns_expectation, pauli_operator, powers_state, Letter, PauliWord,
};
use qubit_groupoid::MeasureSpec;

fn main() -> qubit_groupoid::Result<()> {
    let lambda = 0.3;
    let spec = MeasureSpec::bernoulli(lambda)?;
    let words = [
        PauliWord::identity(),
        PauliWord::single(1, Letter::Z)?,
        PauliWord::single(2, Letter::X)?,
        PauliWord::from_letters([(1, Letter::Z), (3, Letter::Z)])?,
        PauliWord::from_letters([(2, Letter::X), (2, Letter::Z), (2, Letter::X)])?,
    ];
    for w in &words {
        let matrix = powers_state(&pauli_operator(w, 3)?, lambda)?;
        let groupoid = gns_expectation(w, &spec)?;
        println!(
            "{:<40} Tr(ρA) = {:>8.5}   ⟨Ψ, π(A)Ψ⟩ = {:>8.5}",
            format!("{:?}", w.factors().collect::<Vec<_>>()),
            matrix.re,
            groupoid.re
        );
    }
    for n in [3, 5] {
        let r = gns_compare_random(n, 100, lambda, 7)?;
        println!("{}", serde_json::to_string(&r).expect("serializable"));
    }
    Ok(())
}

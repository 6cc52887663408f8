//! The modular Hamiltonian of the Bernoulli measure takes values on the
//! lattice `log((1-λ)/λ) · ℤ`, and every lattice point is attained.

use qubit_groupoid::exact::ExactBernoulli;
use qubit_groupoid::ising::modular_spectrum_points;

fn main() -> qubit_groupoid::Result<()> {
    let lambda = 0.3;
    for h in 1..=6 {
        let s = modular_spectrum_points(lambda, h)?;
        println!("horizon {h}: attained k = {:?}, full lattice: {}", s.attained, s.attained_equals_lattice());
    }
    let s = modular_spectrum_points(lambda, 2)?;
    println!("points at horizon 2: {:?}", s.points());
    let exact = ExactBernoulli::from_ratio(3, 10)?.spectrum_indices(6)?;
    println!("exact rational check at horizon 6: {exact:?}");
    match modular_spectrum_points(0.5, 3) {
        Ok(_) => println!("unexpected spectrum at λ = 1/2"),
        Err(e) => println!("λ = 1/2: {e}"),
    }
    Ok(())
}

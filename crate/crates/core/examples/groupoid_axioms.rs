//! Composition in `Ω × Γ` and an exhaustive sweep of the groupoid axioms.

use qubit_groupoid::groupoid::check_axioms;
use qubit_groupoid::{FlipWord, GroupoidElement, Prefix};

fn main() -> qubit_groupoid::Result<()> {
    let x = Prefix::from_bits(&[0, 1, 1])?;
    let a = GroupoidElement::new(x, FlipWord::from_sites([1, 3])?)?;
    let b = GroupoidElement::new(a.source(), FlipWord::site(2))?;
    let ab = a.compose(b)?;
    println!("a      = {a:?}");
    println!("b      = {b:?}");
    println!("a ∘ b  = {ab:?}");
    println!("a⁻¹    = {:?}", a.inverse());

    // composing in the wrong order fails unless the endpoints match
    match b.compose(a) {
        Ok(_) => println!("b ∘ a happens to be composable"),
        Err(e) => println!("b ∘ a: {e}"),
    }

    for n in 1..=4 {
        let r = check_axioms(n);
        println!("horizon {n}: {} pairs, {} triples, {} violations", r.pairs_checked, r.triples_checked, r.violations);
    }
    Ok(())
}

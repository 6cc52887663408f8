//! Builds a DFS function inductively from free seeds, checks it, breaks it,
//! and recovers a potential for an exact cochain.

use qubit_groupoid::dfs::{coboundary, dfs_build, dfs_check, is_exact, Cochain};
use qubit_groupoid::sampling::{random_real_cylinder, trial_rng};
use qubit_groupoid::FlipWord;

fn main() -> qubit_groupoid::Result<()> {
    let (n, depth) = (3, 5);
    let mut rng = trial_rng(3, 0);
    let seeds: Vec<_> = (0..n).map(|_| random_real_cylinder(&mut rng, depth)).collect();
    let mut table = dfs_build(n, &seeds, depth)?;
    println!("built S on Γ_{n} at depth {depth}: violation {:.1e}", dfs_check(&table).max_violation);
    println!("S(00000, {{1,2}}) = {:.6}", table.value(0, FlipWord::from_sites([1, 2])?)?);

    let w = FlipWord::from_sites([2, 3])?;
    table.set(0b10110, w, table.value(0b10110, w)? + 0.25)?;
    let r = dfs_check(&table);
    println!("after corrupting one entry: violation {:.3} at {:?}", r.max_violation, r.witness);

    let h = random_real_cylinder(&mut rng, n);
    let s = coboundary(&h, n)?;
    println!("δ⁰H passes the DFS check: {:.1e}", dfs_check(&s).max_violation);
    let back = is_exact(&s).expect("coboundaries are exact");
    println!(
        "recovered H - H(0) matches: {}",
        (0..8).all(|x| ((back.at(x) - h.at(x)) - (back.at(0) - h.at(0))).abs() < 1e-12)
    );

    let dd = Cochain::from_function(&h, n, depth)?.delta()?.delta()?;
    println!("|δ¹δ⁰H| = {:.1e}", dd.max_abs());
    Ok(())
}

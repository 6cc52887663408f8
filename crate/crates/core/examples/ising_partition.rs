//! Free-boundary Ising partition functions: brute force, transfer recursion,
//! and the closed form `(2 cosh J)^n` that does not match them.

use qubit_groupoid::measures::partition_report;

fn main() {
    println!("{:>3} {:>14} {:>14} {:>14} {:>9}", "n", "brute force", "recursion", "(2cosh J)^n", "mismatch");
    for n in 1..=10 {
        let r = partition_report(1.0, n);
        println!(
            "{n:>3} {:>14.6} {:>14.6} {:>14.6} {:>9}",
            r.brute_force, r.recursion, r.cosh_power, r.cosh_power_mismatch
        );
    }
    let r = partition_report(0.7, 10);
    println!("J = 0.7: Z_n / Z_k = (2 cosh J)^(n-k) holds to {:.1e}", r.ratio_identity_rel_dev);
    println!("{}", serde_json::to_string_pretty(&partition_report(1.0, 2)).expect("serializable"));
}

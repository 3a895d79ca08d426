//! Zero coupling: the spectrum collapses to the isotropic oscillator
//! with its binomial degeneracies.
//!
//! Usage: cargo run --example harmonic_limit [N l_max]

use dsosc::levels::oscillator_count_check;
use dsosc::qalg::harmonic_limit_check;
use num_rational::BigRational;

fn main() {
    let args: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let total = *args.first().unwrap_or(&4) as usize;
    let l_max = *args.get(1).unwrap_or(&4);
    let one = BigRational::from_integer(1.into());

    let energies = harmonic_limit_check(total, l_max, &one, &one).unwrap();
    println!("algebraic energies equal l + N/2 on {} rows: {}", energies.rows.len(), energies.all_ok);
    let counts = oscillator_count_check(total, l_max).unwrap();
    for row in &counts.rows {
        println!("  n = {}  l = {}  count {:>5}  expected {:>5}  {}", row.first, row.l, row.count, row.expected, if row.ok { "ok" } else { "MISMATCH" });
    }
}

//! Energy levels of the coupled system, with degeneracies.
//!
//! Usage: cargo run --release --example level_table [N n c1 c2 cutoff]

use dsosc::levels::enumerate_levels;
use dsosc::cli::parse_rational;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let total: usize = args.first().and_then(|a| a.parse().ok()).unwrap_or(4);
    let first: usize = args.get(1).and_then(|a| a.parse().ok()).unwrap_or(2);
    let c1 = parse_rational(args.get(2).map_or("1/2", String::as_str)).unwrap();
    let c2 = parse_rational(args.get(3).map_or("0", String::as_str)).unwrap();
    let cutoff: f64 = args.get(4).and_then(|a| a.parse().ok()).unwrap_or(7.0);
    let one = parse_rational("1").unwrap();

    let table = enumerate_levels(total, first, &c1, &c2, &one, &one, cutoff).unwrap();
    for level in &table.levels {
        let pairs: Vec<String> = level.contributors.iter().map(|c| format!("[Nr {}+{}, l {}+{}]", c.n1, c.n2, c.l_n, c.l_nn)).collect();
        println!(
            "E/hw = {:>10.6}  g = {:>4}{}  {}",
            level.energy_over_hbar_omega,
            level.degeneracy,
            if level.accidental { " *" } else { "  " },
            pairs.join(" ")
        );
    }
}

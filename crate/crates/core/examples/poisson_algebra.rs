//! Classical limit: Poisson brackets of the integrals close on QP(3).
//!
//! Usage: cargo run --example poisson_algebra [N n]

use dsosc::opalg::{build_classical, poisson_bracket, verify_qp3, CheckMode};

fn main() {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let (total, first) = match args[..] {
        [t, f, ..] => (t, f),
        _ => (4, 2),
    };
    let g = build_classical(total, first).expect("valid partition");
    let c = poisson_bracket(&g.a, &g.b).unwrap();
    println!("{{A, B}} has {} terms, momentum degree {}", c.num_terms(), c.momentum_degree());
    println!("{{H, A}} = 0: {}", poisson_bracket(&g.h, &g.a).unwrap().is_zero());
    println!("{{H, B}} = 0: {}", poisson_bracket(&g.h, &g.b).unwrap().is_zero());

    let report = verify_qp3(total, first, CheckMode::Symbolic).unwrap();
    for e in &report.entries {
        println!("  {}  {}", if e.passed { "pass" } else { "FAIL" }, e.name);
    }
}

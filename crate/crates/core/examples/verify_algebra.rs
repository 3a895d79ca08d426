//! Verifies the quadratic algebra Q(3) exactly for a few partitions.
//!
//! Usage: cargo run --release --example verify_algebra [N n]...

use dsosc::opalg::{verify_q3, CheckMode};
use std::time::Instant;

fn main() {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let pairs: Vec<(usize, usize)> = if args.len() >= 2 {
        args.chunks_exact(2).map(|c| (c[0], c[1])).collect()
    } else {
        vec![(2, 1), (4, 2)]
    };
    for (total, first) in pairs {
        let start = Instant::now();
        let report = verify_q3(total, first, CheckMode::Symbolic).expect("valid partition");
        println!("(N, n) = ({total}, {first})  [{:.2?}]", start.elapsed());
        for e in &report.entries {
            let status = if e.passed { "pass" } else { "FAIL" };
            let detail = e.detail.as_deref().unwrap_or("");
            println!("  {status}  {:<45} residual terms {:>6}  {:>9.2?}  {detail}", e.name, e.residual_terms, e.wall_time);
        }
        for note in &report.notes {
            println!("  note: {note}");
        }
    }
}

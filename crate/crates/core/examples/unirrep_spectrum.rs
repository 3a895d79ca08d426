//! All candidate finite representations for one set of central values,
//! with their admissibility.
//!
//! Usage: cargo run --example unirrep_spectrum [p_max]

use dsosc::opalg::ParamValues;
use dsosc::qalg::{solve_unirreps, CentralEigs};
use num_rational::BigRational;

fn main() {
    let p_max: u32 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(2);
    let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
    let ce = CentralEigs::new(4, 2, 0, 1, ParamValues::new(q(1, 1), q(1, 1), q(1, 1), q(2, 1))).unwrap();
    for p in 0..=p_max {
        for s in solve_unirreps(p, &ce).unwrap() {
            let verdict = match (s.admissible, s.failing_x) {
                (true, _) => "admissible".to_string(),
                (false, Some(x)) => format!("rejected at x = {x}"),
                (false, None) => "rejected, E <= 0".to_string(),
            };
            println!(
                "p = {p}  set {}  eps = {:?}  E = {:<28} ~ {:>10.6}  {verdict}",
                s.set.number(),
                s.eps,
                s.energy.to_string(),
                s.energy.to_f64()
            );
        }
    }
}

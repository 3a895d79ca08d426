//! Finite-difference radial eigenvalues against the closed form.
//!
//! Usage: cargo run --release --example radial_solver [m c l]

use dsosc::radial::{closed_form, fd_eigenvalues, ComponentSpec};
use num_rational::BigRational;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let m: usize = args.first().and_then(|a| a.parse().ok()).unwrap_or(3);
    let c: i64 = args.get(1).and_then(|a| a.parse().ok()).unwrap_or(1);
    let l: u32 = args.get(2).and_then(|a| a.parse().ok()).unwrap_or(1);
    let one = BigRational::from_integer(1.into());
    let spec = ComponentSpec::new(m, BigRational::from_integer(c.into()), l, one.clone(), one).unwrap();

    let fd = fd_eigenvalues(&spec, 5).unwrap();
    println!("m = {m}, c = {c}, l = {l}, r_max = {:.3}, Frobenius exponent {:.4}", fd.r_max, fd.frobenius_exponent);
    for (nr, e) in fd.eigenvalues.iter().enumerate() {
        let exact = closed_form(&spec, nr as u32).energy;
        println!("  Nr = {nr}  FD {e:.12}  exact {exact:.12}  diff {:.1e}  nodes {}", e - exact, fd.sign_changes[nr]);
    }
    for level in &fd.levels {
        println!("  grid {:>5} cells: E0 = {:.12}", level.grid.nodes, level.eigenvalues[0]);
    }
}

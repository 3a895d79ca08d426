//! Normalized radial wavefunctions, their nodes and norms.
//!
//! Usage: cargo run --example wavefunction

use dsosc::radial::{closed_form, norm_quadrature, wavefunction, wavefunction_sign_changes, ComponentSpec};
use num_rational::BigRational;

fn main() {
    let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
    let spec = ComponentSpec::new(3, q(1, 2), 1, q(1, 1), q(2, 1)).unwrap();
    for nr in 0..4 {
        let mode = closed_form(&spec, nr);
        let norm = norm_quadrature(&mode, |r| wavefunction(&mode, r).unwrap(), 1e-12);
        let nodes = wavefunction_sign_changes(&mode, norm.r_max, 4000).unwrap();
        println!("Nr = {nr}  E = {:.6}  norm = {:.12}  nodes = {nodes}", mode.energy, norm.value);
    }
    let mode = closed_form(&spec, 2);
    for i in 1..=8 {
        let r = 0.25 * i as f64;
        println!("  R({r:.2}) = {:+.8}", wavefunction(&mode, r).unwrap());
    }
}

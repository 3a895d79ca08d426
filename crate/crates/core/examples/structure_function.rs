//! Structure function of the deformed oscillator: raw and factored forms
//! agree exactly and vanish at the representation boundaries.
//!
//! Usage: cargo run --example structure_function

use dsosc::opalg::ParamValues;
use dsosc::qalg::{
    m_values, solve_unirreps, structure_fn_factored, structure_fn_raw, CentralEigs, Reading, SetId,
};
use num_rational::BigRational;

fn main() {
    let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
    let params = ParamValues::new(q(1, 1), q(1, 1), q(3, 2), q(1, 3));
    let ce = CentralEigs::new(5, 2, 1, 2, params).unwrap();
    let m = m_values(&ce).unwrap();
    println!("m1 = {}, m2 = {}", m.m1, m.m2);

    let p = 3;
    let sols = solve_unirreps(p, &ce).unwrap();
    let s = sols.iter().find(|s| s.set == SetId::One && s.eps == (1, 1)).unwrap();
    println!("set 1, p = {p}: u = {}, E = {}", s.u, s.energy);

    let raw = structure_fn_raw(&s.u, &s.energy, &ce);
    let fac = structure_fn_factored(&s.u, &s.energy, &ce, Reading::WithU).unwrap();
    println!("degree {:?}, raw == factored: {}", raw.degree(), raw.same_polynomial(&fac));
    for x in 0..=p as i64 + 1 {
        println!("  Phi({x}) = {}", raw.eval_int(x));
    }
}

//! The structure function `Phi(x; u, E)` in expanded and factorized form.

use super::poly::Poly;
use super::{m_values, CentralEigs, MQuantum, QalgError};
use crate::surd::Surd;
use num_rational::BigRational;

type Q = BigRational;

fn qi(v: i64) -> Q {
    Q::from_integer(v.into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureForm {
    Raw,
    Factored,
}

/// How the last factor of the factorized form is read: `(x + u - r)` or the
/// literal `(x - r)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Reading {
    WithU,
    AsPrinted,
}

/// `Phi` as a polynomial in `x` for fixed `u` and energy.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureFn {
    pub form: StructureForm,
    pub reading: Option<Reading>,
    pub u: Surd,
    pub energy: Surd,
    poly: Poly,
}

impl StructureFn {
    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn degree(&self) -> Option<usize> {
        self.poly.degree()
    }

    pub fn eval(&self, x: &Surd) -> Surd {
        self.poly.eval(x)
    }

    pub fn eval_int(&self, x: i64) -> Surd {
        self.poly.eval(&Surd::int(self.u.field(), x))
    }

    /// Exact coefficient-wise equality with another structure function.
    pub fn same_polynomial(&self, other: &StructureFn) -> bool {
        self.poly.sub(&other.poly).is_zero()
    }
}

/// `-12582912 hbar^18 omega^2`.
pub fn leading_constant(ce: &CentralEigs) -> Q {
    let h = &ce.params.hbar;
    let w = &ce.params.omega;
    let mut c = qi(-12_582_912) * w * w;
    for _ in 0..18 {
        c *= h;
    }
    c
}

/// Expanded form with `J2 -> j2`, `K2 -> k2` and `H -> E`.
pub fn structure_fn_raw(u: &Surd, energy: &Surd, ce: &CentralEigs) -> StructureFn {
    let f = u.field().clone();
    let p = &ce.params;
    let (h2, c1, c2) = (&p.hbar * &p.hbar, p.c1.clone(), p.c2.clone());
    let h4 = &h2 * &h2;
    let (j, k) = (ce.j2(), ce.k2());
    let big_n = qi(ce.total as i64);
    let n = qi(ce.first as i64);
    let nn = &big_n * &big_n;

    let constant: Q = qi(64) * &c1 * &c1 + qi(64) * &c2 * &c2 - qi(48) * &h4 - qi(32) * &h2 * &j
        + qi(16) * &j * &j
        - qi(32) * &h2 * &k
        - qi(32) * &j * &k
        + qi(16) * &k * &k
        - qi(64) * &h2 * &j * &n
        + qi(64) * &h2 * &k * &n
        + qi(48) * &h4 * &n * &n
        + qi(32) * &h4 * &big_n
        + qi(32) * &h2 * &j * &big_n
        - qi(32) * &h2 * &k * &big_n
        - qi(48) * &h4 * &n * &big_n
        + qi(16) * &h2 * &j * &n * &big_n
        - qi(16) * &h2 * &k * &n * &big_n
        - qi(32) * &h4 * &n * &n * &big_n
        + qi(8) * &h4 * &nn
        - qi(8) * &h2 * &j * &nn
        + qi(8) * &h2 * &k * &nn
        + qi(32) * &h4 * &n * &nn
        + qi(4) * &h4 * &n * &n * &nn
        - qi(8) * &h4 * &nn * &big_n
        - qi(4) * &h4 * &n * &nn * &big_n
        + &h4 * &nn * &nn;

    let y = Poly::x(&f).add(&Poly::constant(u.clone()));
    let one_minus_2y_sq = Poly::int(&f, 1).sub(&y.scale_rational(&qi(2))).pow(2);
    let rat = |q: Q| Poly::rational(&f, q);

    let c2_term = rat(qi(4) * (&j - &k) + &h2 * (&big_n - qi(4)) * (qi(2) * &n - &big_n))
        .add(&one_minus_2y_sq.scale_rational(&(qi(4) * &h2)))
        .scale_rational(&(qi(-16) * &c2));
    let c1_term = rat(qi(8) * &c2 - qi(4) * &j + qi(4) * &k + &h2 * (&big_n - qi(4)) * (&big_n - qi(2) * &n))
        .add(&one_minus_2y_sq.scale_rational(&(qi(4) * &h2)))
        .scale_rational(&(qi(-16) * &c1));
    let lin = qi(32) * &h2 * (qi(4) * (&j + &k) + &h2 * (qi(2) * &n * &n + (&big_n - qi(2)) * (&big_n - qi(2)) - qi(2) * &n * &big_n));
    let quad = qi(-32)
        * &h2
        * (qi(4) * (&j + &k) + &h2 * (qi(2) * (&n * &n - qi(2)) - qi(2) * (&n + qi(2)) * &big_n + &nn));

    let bracket = rat(constant)
        .add(&c2_term)
        .add(&c1_term)
        .add(&y.scale_rational(&lin))
        .add(&y.pow(2).scale_rational(&quad))
        .add(&y.pow(3).scale_rational(&(qi(-512) * &h4)))
        .add(&y.pow(4).scale_rational(&(qi(256) * &h4)));

    let w2 = &p.omega * &p.omega;
    let energy_factor = Poly::constant(energy * energy).sub(&one_minus_2y_sq.scale_rational(&(&h2 * &w2)));
    let mut lead = qi(12_288);
    for _ in 0..6 {
        lead *= &h2;
    }
    StructureFn {
        form: StructureForm::Raw,
        reading: None,
        u: u.clone(),
        energy: energy.clone(),
        poly: bracket.mul(&energy_factor).scale_rational(&lead),
    }
}

/// The six roots of the factorized form: four in `x + u`, then the two
/// energy roots `(hbar omega - E) / (2 hbar omega)` and
/// `(E + hbar omega) / (2 hbar omega)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorRoots {
    pub roots: [Surd; 6],
}

impl FactorRoots {
    pub fn new(m: &MQuantum, energy: &Surd, ce: &CentralEigs) -> FactorRoots {
        let f = m.field();
        let quarter = Q::new(1.into(), 4.into());
        let two = Surd::int(f, 2);
        let combo = |s1: i64, s2: i64| {
            (&(&two + &m.m1.scale(&qi(s1))) + &m.m2.scale(&qi(s2))).scale(&quarter)
        };
        let hw = &ce.params.hbar * &ce.params.omega;
        let denom = (qi(2) * &hw).recip();
        let lower = (-energy).add_rational(&hw).scale(&denom);
        let upper = energy.add_rational(&hw).scale(&denom);
        FactorRoots { roots: [combo(1, 1), combo(-1, 1), combo(1, -1), combo(-1, -1), lower, upper] }
    }

    /// A copy with root `index` shifted by `delta`.
    pub fn perturbed(&self, index: usize, delta: &Q) -> FactorRoots {
        let mut out = self.clone();
        out.roots[index] = out.roots[index].add_rational(delta);
        out
    }
}

/// `lead * prod_{i<5} (x + u - r_i) * (x [+ u] - r_5)`.
pub fn structure_fn_from_roots(
    u: &Surd,
    energy: &Surd,
    roots: &FactorRoots,
    lead: &Q,
    reading: Reading,
) -> StructureFn {
    let f = u.field().clone();
    let mut poly = Poly::rational(&f, lead.clone());
    for r in &roots.roots[..5] {
        poly = poly.mul(&Poly::linear(&(r - u)));
    }
    let last = match reading {
        Reading::WithU => &roots.roots[5] - u,
        Reading::AsPrinted => roots.roots[5].clone(),
    };
    poly = poly.mul(&Poly::linear(&last));
    StructureFn { form: StructureForm::Factored, reading: Some(reading), u: u.clone(), energy: energy.clone(), poly }
}

pub fn structure_fn_factored(
    u: &Surd,
    energy: &Surd,
    ce: &CentralEigs,
    reading: Reading,
) -> Result<StructureFn, QalgError> {
    let m = m_values(ce)?;
    let roots = FactorRoots::new(&m, energy, ce);
    Ok(structure_fn_from_roots(u, energy, &roots, &leading_constant(ce), reading))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opalg::ParamValues;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    fn sample_ce() -> CentralEigs {
        CentralEigs::new(6, 2, 1, 2, ParamValues::new(q(3, 2), q(2, 3), q(5, 7), q(1, 3))).unwrap()
    }

    #[test]
    fn raw_equals_factored_with_u() {
        let ce = sample_ce();
        let m = m_values(&ce).unwrap();
        let f = m.field();
        let u = &Surd::rational(f, q(2, 9)) + &m.m1.scale(&q(1, 3));
        let e = &Surd::rational(f, q(7, 5)) + &m.m2;
        let raw = structure_fn_raw(&u, &e, &ce);
        assert_eq!(raw.degree(), Some(6));
        let fac = structure_fn_factored(&u, &e, &ce, Reading::WithU).unwrap();
        assert!(raw.same_polynomial(&fac));
        let printed = structure_fn_factored(&u, &e, &ce, Reading::AsPrinted).unwrap();
        assert!(!raw.same_polynomial(&printed));
    }

    #[test]
    fn factored_vanishes_at_roots() {
        let ce = sample_ce();
        let m = m_values(&ce).unwrap();
        let f = m.field();
        let u = Surd::rational(f, q(1, 5));
        let e = Surd::rational(f, q(9, 2));
        let fac = structure_fn_factored(&u, &e, &ce, Reading::WithU).unwrap();
        let roots = FactorRoots::new(&m, &e, &ce);
        for r in &roots.roots {
            assert!(fac.eval(&(r - &u)).is_zero());
        }
    }
}

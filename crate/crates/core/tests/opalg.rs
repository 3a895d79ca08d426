use dsosc::opalg::{
    build_classical, build_quantum, commutator, op_mul, poisson_bracket, verify_q3, CheckMode, DiffOp, Dims,
    LaurentCoeff, PhaseFn,
};
use num_rational::BigRational;
use proptest::prelude::*;

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn dims() -> Dims {
    Dims::new(3, 1).unwrap()
}

/// Sum of `c x_a d_b` and `c x_a` terms.
fn op_from(terms: &[(i64, usize, Option<usize>)]) -> DiffOp {
    let d = dims();
    let mut acc = DiffOp::zero(d);
    for &(c, a, b) in terms {
        let coeff = DiffOp::multiplication(LaurentCoeff::x(d, a).scale(&q(c)));
        let t = match b {
            Some(b) => op_mul(&coeff, &DiffOp::partial(d, b)).unwrap(),
            None => coeff,
        };
        acc = acc.try_add(&t).unwrap();
    }
    acc
}

fn phase_from(terms: &[(i64, usize, usize, u32)]) -> PhaseFn {
    let d = dims();
    let mut acc = PhaseFn::zero(d);
    for &(c, a, b, k) in terms {
        let t = PhaseFn::x(d, a).try_mul(&PhaseFn::p(d, b).pow(k)).unwrap().scale(&q(c));
        acc = acc.try_add(&t).unwrap();
    }
    acc
}

fn op_terms() -> impl Strategy<Value = Vec<(i64, usize, Option<usize>)>> {
    prop::collection::vec((-3i64..=3, 0usize..3, prop::option::of(0usize..3)), 1..4)
}

fn phase_terms() -> impl Strategy<Value = Vec<(i64, usize, usize, u32)>> {
    prop::collection::vec((-3i64..=3, 0usize..3, 0usize..3, 0u32..3), 1..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn commutator_is_antisymmetric(a in op_terms(), b in op_terms()) {
        let (a, b) = (op_from(&a), op_from(&b));
        let ab = commutator(&a, &b).unwrap();
        let ba = commutator(&b, &a).unwrap();
        prop_assert!(ab.try_add(&ba).unwrap().is_zero());
    }

    #[test]
    fn commutator_satisfies_jacobi(a in op_terms(), b in op_terms(), c in op_terms()) {
        let (a, b, c) = (op_from(&a), op_from(&b), op_from(&c));
        let t1 = commutator(&a, &commutator(&b, &c).unwrap()).unwrap();
        let t2 = commutator(&b, &commutator(&c, &a).unwrap()).unwrap();
        let t3 = commutator(&c, &commutator(&a, &b).unwrap()).unwrap();
        prop_assert!(t1.try_add(&t2).unwrap().try_add(&t3).unwrap().is_zero());
    }

    #[test]
    fn poisson_bracket_is_a_derivation(f in phase_terms(), g in phase_terms(), h in phase_terms()) {
        let (f, g, h) = (phase_from(&f), phase_from(&g), phase_from(&h));
        let lhs = poisson_bracket(&f, &g.try_mul(&h).unwrap()).unwrap();
        let rhs = poisson_bracket(&f, &g)
            .unwrap()
            .try_mul(&h)
            .unwrap()
            .try_add(&g.try_mul(&poisson_bracket(&f, &h).unwrap()).unwrap())
            .unwrap();
        prop_assert!(lhs.try_sub(&rhs).unwrap().is_zero());
        let fg = poisson_bracket(&f, &g).unwrap();
        let gf = poisson_bracket(&g, &f).unwrap();
        prop_assert!(fg.try_add(&gf).unwrap().is_zero());
    }
}

#[test]
fn integrals_commute_with_the_hamiltonian() {
    let g = build_quantum(3, 1).unwrap();
    for (name, op) in [("A", &g.a), ("B", &g.b), ("J2", &g.j2), ("K2", &g.k2)] {
        assert!(commutator(&g.h, op).unwrap().is_zero(), "[H,{name}] != 0");
    }
    assert!(commutator(&g.a, &g.b).unwrap().order() > 0);
}

#[test]
fn plus_sign_coupling_breaks_the_second_integral() {
    let g = build_quantum(3, 1).unwrap();
    assert!(!commutator(&g.h, &g.b_as_printed).unwrap().is_zero());
    let c = build_classical(3, 1).unwrap();
    assert!(!poisson_bracket(&c.h, &c.b_as_printed).unwrap().is_zero());
    assert!(poisson_bracket(&c.h, &c.b).unwrap().is_zero());
}

#[test]
fn sampled_and_symbolic_checks_agree() {
    let sym = verify_q3(4, 2, CheckMode::Symbolic).unwrap();
    let smp = verify_q3(4, 2, CheckMode::Sampled { seed: 11, points: 3 }).unwrap();
    assert!(sym.all_passed() && smp.all_passed());
    for e in &smp.entries {
        assert!(sym.entry(&e.anchor).is_some(), "{} only in sampled mode", e.anchor);
    }
    // the classical limit needs hbar as an indeterminate
    assert!(smp.entry("q3.classical_limit").is_none());
}

#[test]
fn invalid_partitions_are_rejected() {
    assert!(build_quantum(3, 0).is_err());
    assert!(build_quantum(3, 3).is_err());
    assert!(verify_q3(1, 1, CheckMode::Symbolic).is_err());
}

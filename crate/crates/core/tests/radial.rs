use dsosc::radial::{
    closed_form, fd_eigenvalues, fd_eigenvalues_with, norm_quadrature, wavefunction, ComponentSpec, FdOptions,
    RadialError,
};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use proptest::prelude::*;

type Q = BigRational;

fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

prop_compose! {
    fn specs()(m in 1usize..=7, l in 0u32..4, c in 0i64..=16, hbar in 2i64..=8, omega in 2i64..=8) -> ComponentSpec {
        let l = if m == 1 { l.min(1) } else { l };
        ComponentSpec::new(m, q(c, 4), l, q(hbar, 4), q(omega, 4)).unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn finite_volume_matches_closed_form(spec in specs()) {
        let fd = fd_eigenvalues(&spec, 3).unwrap();
        for (nr, e) in fd.eigenvalues.iter().enumerate() {
            let exact = closed_form(&spec, nr as u32).energy;
            prop_assert!(((e - exact) / exact).abs() < 1e-6, "nr {}: {} vs {}", nr, e, exact);
            prop_assert_eq!(fd.sign_changes[nr], nr);
        }
    }

    #[test]
    fn closed_form_is_equally_spaced(spec in specs(), nr in 0u32..20) {
        let gap = closed_form(&spec, nr + 1).energy - closed_form(&spec, nr).energy;
        let hw = 2.0 * (&spec.hbar * &spec.omega).to_f64().unwrap();
        prop_assert!((gap - hw).abs() < 1e-12 * hw.max(1.0));
    }

    #[test]
    fn modes_are_orthonormal(spec in specs(), nr in 0u32..3) {
        let a = closed_form(&spec, nr);
        let b = closed_form(&spec, nr + 1);
        let na = norm_quadrature(&a, |r| wavefunction(&a, r).unwrap(), 1e-11).value;
        // |a + b|^2 = 2 when <a, b> = 0; the cutoff of the wider mode covers both
        let sum = norm_quadrature(&b, |r| wavefunction(&a, r).unwrap() + wavefunction(&b, r).unwrap(), 1e-11).value;
        prop_assert!((na - 1.0).abs() < 1e-8);
        prop_assert!((sum - 2.0).abs() < 1e-8);
    }
}

#[test]
fn alpha_is_negative_only_for_the_free_even_line_sector() {
    let free_even = ComponentSpec::new(1, q(0, 1), 0, q(1, 1), q(1, 1)).unwrap();
    assert_eq!(free_even.alpha(), -0.5);
    let coupled = ComponentSpec::new(1, q(1, 8), 0, q(1, 1), q(1, 1)).unwrap();
    assert!(coupled.alpha() > 0.0);
    let plane = ComponentSpec::new(2, q(0, 1), 0, q(1, 1), q(1, 1)).unwrap();
    assert_eq!(plane.alpha(), 0.0);
}

#[test]
fn bad_specs_and_grids_are_rejected() {
    assert!(matches!(ComponentSpec::new(0, q(0, 1), 0, q(1, 1), q(1, 1)), Err(RadialError::ZeroDimension)));
    assert!(matches!(ComponentSpec::new(1, q(0, 1), 2, q(1, 1), q(1, 1)), Err(RadialError::AngularOutOfRange { .. })));
    assert!(matches!(ComponentSpec::new(3, q(-1, 1), 0, q(1, 1), q(1, 1)), Err(RadialError::NegativeCoupling(_))));
    let spec = ComponentSpec::new(3, q(1, 1), 0, q(1, 1), q(1, 1)).unwrap();
    let coarse = FdOptions { base_nodes: 16, ..FdOptions::default() };
    assert!(matches!(fd_eigenvalues_with(&spec, 2, &coarse), Err(RadialError::GridTooCoarse(_))));
    let short = FdOptions { r_max: Some(1.0), ..FdOptions::default() };
    assert!(matches!(fd_eigenvalues_with(&spec, 2, &short), Err(RadialError::CutoffBelowTurningPoint { .. })));
    assert!(matches!(fd_eigenvalues(&spec, 0), Err(RadialError::EmptyRequest)));
}

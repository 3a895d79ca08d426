use dsosc::levels::{binomial, dim_harm, enumerate_levels, LevelsError};
use dsosc::radial::{closed_form, ComponentSpec};
use num_rational::BigRational;
use proptest::prelude::*;

type Q = BigRational;

fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

fn energies(table: &dsosc::levels::LevelTable) -> Vec<(f64, u64)> {
    table.levels.iter().map(|l| (l.energy_over_hbar_omega, l.degeneracy)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn harmonic_dimension_branches_to_one_dimension_lower(m in 2usize..10, l in 0u32..10) {
        let below: u64 = (0..=l).map(|k| dim_harm(m - 1, k)).sum();
        prop_assert_eq!(dim_harm(m, l), below);
    }

    #[test]
    fn swapping_the_components_keeps_the_spectrum(
        total in 3usize..=7, first in 1usize..6, c1 in 0i64..12, c2 in 0i64..12,
    ) {
        prop_assume!(first < total);
        let (a, b) = (q(c1, 4), q(c2, 4));
        let one = q(1, 1);
        let cut = total as f64 / 2.0 + 10.0;
        let lhs = enumerate_levels(total, first, &a, &b, &one, &one, cut).unwrap();
        let rhs = enumerate_levels(total, total - first, &b, &a, &one, &one, cut).unwrap();
        prop_assert_eq!(energies(&lhs), energies(&rhs));
    }

    #[test]
    fn degeneracies_sum_to_the_state_count(total in 2usize..=6, first in 1usize..5, c1 in 1i64..9, c2 in 1i64..9) {
        prop_assume!(first < total);
        let (a, b, one) = (q(c1, 3), q(c2, 5), q(1, 1));
        let cut = total as f64 / 2.0 + 10.0;
        let table = enumerate_levels(total, first, &a, &b, &one, &one, cut).unwrap();
        let l_top = |m: usize| if m == 1 { 1 } else { 12 };
        let mut brute = 0u64;
        for l_n in 0..=l_top(first) {
            for l_nn in 0..=l_top(total - first) {
                let s1 = ComponentSpec::new(first, a.clone(), l_n, one.clone(), one.clone()).unwrap();
                let s2 = ComponentSpec::new(total - first, b.clone(), l_nn, one.clone(), one.clone()).unwrap();
                for n1 in 0..8 {
                    for n2 in 0..8 {
                        let e = closed_form(&s1, n1).energy + closed_form(&s2, n2).energy;
                        if e <= cut * (1.0 + 1e-12) {
                            brute += dim_harm(first, l_n) * dim_harm(total - first, l_nn);
                        }
                    }
                }
            }
        }
        prop_assert_eq!(table.levels.iter().map(|l| l.degeneracy).sum::<u64>(), brute);
    }
}

#[test]
fn harmonic_dimensions_match_the_binomial_formula() {
    for m in 2..9u64 {
        for l in 0..9u64 {
            let want = binomial(l + m - 1, m - 1) - if l >= 2 { binomial(l + m - 3, m - 1) } else { 0 };
            assert_eq!(dim_harm(m as usize, l as u32), want, "m = {m}, l = {l}");
        }
    }
    assert_eq!((dim_harm(1, 0), dim_harm(1, 1), dim_harm(1, 2)), (1, 1, 0));
}

#[test]
fn energies_depend_on_the_reduced_coupling_only() {
    let a = enumerate_levels(5, 2, &q(1, 1), &q(3, 2), &q(1, 1), &q(1, 1), 7.0).unwrap();
    let b = enumerate_levels(5, 2, &q(4, 1), &q(6, 1), &q(2, 1), &q(3, 1), 42.0).unwrap();
    assert_eq!(a.levels.len(), b.levels.len());
    for (x, y) in a.levels.iter().zip(&b.levels) {
        assert!((x.energy_over_hbar_omega - y.energy_over_hbar_omega).abs() < 1e-12);
        assert_eq!(x.degeneracy, y.degeneracy);
    }
}

#[test]
fn rows_flatten_the_contributors() {
    let t = enumerate_levels(4, 2, &q(0, 1), &q(0, 1), &q(1, 1), &q(1, 1), 4.0).unwrap();
    let rows = t.rows();
    let mut keys: Vec<_> = t
        .levels
        .iter()
        .enumerate()
        .flat_map(|(i, l)| l.contributors.iter().map(move |c| (i, c.p(), c.l_n, c.l_nn)))
        .collect();
    keys.dedup();
    assert_eq!(rows.len(), keys.len());
    assert!(t.levels[1].accidental);
}

#[test]
fn bad_requests_are_errors() {
    let one = q(1, 1);
    assert!(matches!(
        enumerate_levels(4, 4, &one, &one, &one, &one, 9.0),
        Err(LevelsError::InvalidPartition { .. })
    ));
    assert!(matches!(
        enumerate_levels(4, 2, &one, &one, &one, &one, 0.5),
        Err(LevelsError::CutoffBelowGround { .. })
    ));
    assert!(matches!(
        enumerate_levels(4, 2, &q(-1, 1), &one, &one, &one, 9.0),
        Err(LevelsError::Radial(_))
    ));
}

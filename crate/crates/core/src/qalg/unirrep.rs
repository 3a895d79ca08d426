//! Finite-dimensional unitary representations and their energies.

use super::structure::{structure_fn_factored, Reading};
use super::{m_values, CentralEigs, MQuantum, QalgError};
use crate::opalg::ParamValues;
use crate::surd::Surd;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

type Q = BigRational;

fn qi(v: i64) -> Q {
    Q::from_integer(v.into())
}

/// The three solution families of the boundary conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum SetId {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "3")]
    Three,
}

impl SetId {
    pub const ALL: [SetId; 3] = [SetId::One, SetId::Two, SetId::Three];

    pub fn number(self) -> u8 {
        match self {
            SetId::One => 1,
            SetId::Two => 2,
            SetId::Three => 3,
        }
    }
}

/// One candidate `(p + 1)`-dimensional representation.
#[derive(Clone, Debug, PartialEq)]
pub struct UnirrepSolution {
    pub set: SetId,
    pub eps: (i8, i8),
    pub p: u32,
    pub u: Surd,
    pub energy: Surd,
    /// `Phi(x)` for `x = 0..=p+1`.
    pub phi: Vec<Surd>,
    /// `Phi(0) = Phi(p+1) = 0`.
    pub boundary_ok: bool,
    /// `Phi(x) > 0` for `x = 1..=p`.
    pub positive_ok: bool,
    pub energy_positive: bool,
    pub admissible: bool,
    /// First `x` at which a condition fails.
    pub failing_x: Option<u32>,
}

/// `E = 2 hbar omega (p + 1 + (eps1 m1 + eps2 m2) / 4)`.
pub fn unirrep_energy(p: u32, eps: (i8, i8), m: &MQuantum, params: &ParamValues) -> Surd {
    let inner = (&m.m1.scale(&qi(eps.0 as i64)) + &m.m2.scale(&qi(eps.1 as i64)))
        .scale(&Q::new(1.into(), 4.into()))
        .add_rational(&qi(p as i64 + 1));
    inner.scale(&(qi(2) * &params.hbar * &params.omega))
}

fn set_u(set: SetId, eps: (i8, i8), energy: &Surd, m: &MQuantum, params: &ParamValues) -> Surd {
    let hw = &params.hbar * &params.omega;
    let denom = (qi(2) * &hw).recip();
    match set {
        SetId::One => (-energy).add_rational(&hw).scale(&denom),
        SetId::Two => energy.add_rational(&hw).scale(&denom),
        SetId::Three => (&m.m1.scale(&qi(eps.0 as i64)) + &m.m2.scale(&qi(eps.1 as i64)))
            .add_rational(&qi(2))
            .scale(&Q::new(1.into(), 4.into())),
    }
}

/// Evaluates every set and sign choice for a given `p`.
pub fn solve_unirreps(p: u32, ce: &CentralEigs) -> Result<Vec<UnirrepSolution>, QalgError> {
    let m = m_values(ce)?;
    let mut out = Vec::new();
    for set in SetId::ALL {
        for eps in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
            let energy = unirrep_energy(p, eps, &m, &ce.params);
            let u = set_u(set, eps, &energy, &m, &ce.params);
            let phi_fn = structure_fn_factored(&u, &energy, ce, Reading::WithU)?;
            let phi: Vec<Surd> = (0..=p as i64 + 1).map(|x| phi_fn.eval_int(x)).collect();
            let mut failing_x = None;
            let boundary_ok = phi[0].is_zero() && phi[p as usize + 1].is_zero();
            if !phi[0].is_zero() {
                failing_x = Some(0);
            }
            let mut positive_ok = true;
            for x in 1..=p as usize {
                if !phi[x].is_positive() {
                    positive_ok = false;
                    failing_x.get_or_insert(x as u32);
                }
            }
            if !phi[p as usize + 1].is_zero() {
                failing_x.get_or_insert(p + 1);
            }
            let energy_positive = energy.is_positive();
            out.push(UnirrepSolution {
                set,
                eps,
                p,
                u,
                energy,
                phi,
                boundary_ok,
                positive_ok,
                energy_positive,
                admissible: boundary_ok && positive_ok && energy_positive,
                failing_x,
            });
        }
    }
    Ok(out)
}

/// The set-specific closed forms of `Phi`, without the positive constant
/// `eta = 24576 hbar^18 omega^2`.
pub fn printed_set_structure_fn(set: SetId, eps: (i8, i8), p: u32, m: &MQuantum, x: &Surd) -> Surd {
    let f = m.field();
    let (e1, e2) = (eps.0 as i64, eps.1 as i64);
    let lin = |c0: Surd, a1: i64, a2: i64| &(&c0 + &m.m1.scale(&qi(a1))) + &m.m2.scale(&qi(a2));
    let p4 = qi(4 + 4 * p as i64);
    let (x4, x2) = (x.scale(&qi(4)), x.scale(&qi(2)));
    let signed = |base: Surd| {
        [
            lin(base.clone(), -(1 - e1), 1 + e2),
            lin(base.clone(), 1 + e1, -(1 - e2)),
            lin(base.clone(), -(1 - e1), -(1 - e2)),
            lin(base, 1 + e1, 1 + e2),
        ]
    };
    let product = |fs: [Surd; 4]| fs.into_iter().fold(Surd::one(f), |acc, v| &acc * &v);
    match set {
        SetId::One => {
            let base = (-&x4).add_rational(&p4);
            let last = lin((-&x2).add_rational(&p4), e1, e2);
            &(x * &product(signed(base))) * &last
        }
        SetId::Two => {
            let base = x4.add_rational(&p4);
            let last = lin(x2.add_rational(&p4), e1, e2);
            -(&(x * &product(signed(base))) * &last)
        }
        SetId::Three => {
            let factors = [
                lin(x4.clone(), -(1 - e1), -(1 - e2)),
                lin(x4.clone(), 1 + e1, -(1 - e2)),
                lin(x4.clone(), -(1 - e1), 1 + e2),
                lin(x4, 1 + e1, 1 + e2),
            ];
            let last = lin(x2.add_rational(&qi(2 + 2 * p as i64)), e1, e2);
            let head = (-x).add_rational(&qi(p as i64 + 1));
            &(&head * &product(factors)) * &last
        }
    }
}

/// Sign choice that continues to the oscillator branch when a coupling
/// vanishes: `eps_i = sign(2 l_i + dim_i - 2)`, which is `-1` only for a
/// one-dimensional even component.
pub fn branch_signs(ce: &CentralEigs) -> (i8, i8) {
    let pick = |c: &Q, l: u32, dim: usize| {
        if !c.is_zero() || 2 * l as i64 + dim as i64 - 2 >= 0 {
            1
        } else {
            -1
        }
    };
    (pick(&ce.params.c1, ce.l_n, ce.first), pick(&ce.params.c2, ce.l_nn, ce.second()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HarmonicRow {
    pub first: usize,
    pub l: u32,
    pub p: u32,
    pub l_n: u32,
    pub l_nn: u32,
    pub energy_over_hbar_omega: String,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HarmonicReport {
    pub total: usize,
    pub l_max: u32,
    pub rows: Vec<HarmonicRow>,
    pub all_ok: bool,
}

/// Compares the Set-1 energies at zero coupling with `hbar omega (l + N/2)`
/// for every partition and every `(p, l_n, l_Nn)` with `2p + l_n + l_Nn = l`.
pub fn harmonic_limit_check(total: usize, l_max: u32, hbar: &Q, omega: &Q) -> Result<HarmonicReport, QalgError> {
    let mut rows = Vec::new();
    let hw = hbar * omega;
    for first in 1..total {
        for l in 0..=l_max {
            for p in 0..=l / 2 {
                for l_n in 0..=(l - 2 * p) {
                    let l_nn = l - 2 * p - l_n;
                    if (first == 1 && l_n > 1) || (total - first == 1 && l_nn > 1) {
                        continue;
                    }
                    let params = ParamValues::new(hbar.clone(), omega.clone(), Q::zero(), Q::zero());
                    let ce = CentralEigs::new(total, first, l_n, l_nn, params)?;
                    let m = m_values(&ce)?;
                    let e = unirrep_energy(p, branch_signs(&ce), &m, &ce.params);
                    let expected = &hw * (qi(l as i64) + Q::new((total as i64).into(), 2.into()));
                    let ok = e.as_rational().as_ref() == Some(&expected);
                    let ratio = e.scale(&hw.recip());
                    rows.push(HarmonicRow {
                        first,
                        l,
                        p,
                        l_n,
                        l_nn,
                        energy_over_hbar_omega: ratio.to_string(),
                        ok,
                    });
                }
            }
        }
    }
    let all_ok = rows.iter().all(|r| r.ok);
    Ok(HarmonicReport { total, l_max, rows, all_ok })
}

/// Consistency of the realization `A = A(aleph)`, `B = b(aleph) + ...` with
/// the `[A,C]` relation, evaluated at integer points.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RealizationCheck {
    /// `(A(x+1) - A(x))^2 = 2 hbar^2 (A(x+1) + A(x)) + hbar^4 N (N-4) / 4`.
    pub a_relation_ok: bool,
    /// The diagonal part vanishes with `b(x)` proportional to `E`.
    pub derived_b_ok: bool,
    /// The diagonal part vanishes with the printed `b(x)`, which lacks `E`.
    pub printed_b_ok: bool,
    pub points: Vec<i64>,
}

pub fn realization_check(ce: &CentralEigs, u: &Surd, energy: &Surd, xs: &[i64]) -> RealizationCheck {
    let f = u.field();
    let pr = &ce.params;
    let h2 = &pr.hbar * &pr.hbar;
    let h4 = &h2 * &h2;
    let big_n = ce.total as i64;
    let n = ce.first as i64;
    let a_of = |x: i64| {
        let y = u.add_rational(&qi(x));
        (&y * &y).add_rational(&-Q::new(((big_n - 2) * (big_n - 2)).into(), 16.into())).scale(&h2)
    };
    let tail = &h4 * Q::new((big_n * (big_n - 4)).into(), 4.into());
    let numerator = qi(8) * &pr.c1 - qi(8) * &pr.c2 + qi(4) * ce.j2() - qi(4) * ce.k2()
        + qi(4 * big_n - 8 * n + 2 * n * big_n - big_n * big_n) * &h2;
    // E-coefficient of the diagonal part of the [A,C] right side
    let h_coeff = &h2 * (ce.k2() - ce.j2())
        - &h2 * Q::new(1.into(), 4.into()) * (qi(8) * &pr.c1 - qi(8) * &pr.c2 - qi((big_n - 4) * (big_n - 2 * n)) * &h2);

    let mut a_ok = true;
    let mut derived_ok = true;
    let mut printed_ok = true;
    let mut points = Vec::new();
    for &x in xs {
        let (a0, a1) = (a_of(x), a_of(x + 1));
        let d = &a1 - &a0;
        let lhs = &d * &d;
        let rhs = (&a1 + &a0).scale(&(qi(2) * &h2)).add_rational(&tail);
        a_ok &= lhs == rhs;

        let y = u.add_rational(&qi(x));
        let denom = (&y * &y).add_rational(&Q::new((-1).into(), 4.into())).scale(&(qi(16) * &h2));
        if denom.is_zero() {
            continue;
        }
        points.push(x);
        let printed_b = &Surd::rational(f, numerator.clone()) / &denom;
        let derived_b = energy * &printed_b;
        let diagonal = |b: &Surd| &(&(b * &a0).scale(&(qi(4) * &h2)) + &b.scale(&tail)) + &energy.scale(&h_coeff);
        derived_ok &= diagonal(&derived_b).is_zero();
        printed_ok &= diagonal(&printed_b).is_zero();
    }
    RealizationCheck { a_relation_ok: a_ok, derived_b_ok: derived_ok, printed_b_ok: printed_ok, points }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    fn ce(total: usize, first: usize, l_n: u32, l_nn: u32, c1: Q, c2: Q) -> CentralEigs {
        CentralEigs::new(total, first, l_n, l_nn, ParamValues::new(q(1, 1), q(1, 1), c1, c2)).unwrap()
    }

    #[test]
    fn ground_energy_of_free_four_dimensional_oscillator() {
        let c = ce(4, 2, 0, 0, q(0, 1), q(0, 1));
        let sols = solve_unirreps(0, &c).unwrap();
        let s = sols.iter().find(|s| s.set == SetId::One && s.eps == (1, 1)).unwrap();
        assert_eq!(s.energy.as_rational(), Some(q(2, 1)));
    }

    #[test]
    fn positive_branch_is_admissible_for_sets_one_and_three() {
        let c = ce(6, 3, 1, 2, q(3, 2), q(5, 7));
        let sols = solve_unirreps(3, &c).unwrap();
        for set in [SetId::One, SetId::Three] {
            let s = sols.iter().find(|s| s.set == set && s.eps == (1, 1)).unwrap();
            assert!(s.boundary_ok && s.positive_ok && s.admissible, "{set:?}");
        }
        let two = sols.iter().find(|s| s.set == SetId::Two && s.eps == (1, 1)).unwrap();
        assert!(!two.boundary_ok && !two.admissible);
    }

    #[test]
    fn large_negative_branch_is_rejected() {
        let c = ce(4, 2, 3, 0, q(40, 1), q(0, 1));
        let sols = solve_unirreps(2, &c).unwrap();
        let s = sols.iter().find(|s| s.set == SetId::One && s.eps == (-1, -1)).unwrap();
        assert!(!s.admissible);
        assert!(!s.energy_positive || !s.positive_ok);
    }

    #[test]
    fn printed_set_forms_match_up_to_eta() {
        let c = ce(5, 2, 1, 1, q(2, 3), q(1, 4));
        let m = m_values(&c).unwrap();
        let f = m.field().clone();
        let eta = Surd::int(&f, 24_576);
        for set in SetId::ALL {
            for eps in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                let p = 2;
                let e = unirrep_energy(p, eps, &m, &c.params);
                let u = set_u(set, eps, &e, &m, &c.params);
                let phi = structure_fn_factored(&u, &e, &c, Reading::WithU).unwrap();
                for x in 0..6 {
                    let xs = Surd::int(&f, x);
                    let printed = printed_set_structure_fn(set, eps, p, &m, &xs);
                    assert_eq!(phi.eval(&xs), &eta * &printed, "{set:?} {eps:?} x={x}");
                }
            }
        }
    }

    #[test]
    fn harmonic_examples() {
        let r = harmonic_limit_check(4, 2, &q(1, 1), &q(1, 1)).unwrap();
        assert!(r.all_ok);
        let l2: Vec<_> = r.rows.iter().filter(|row| row.first == 2 && row.l == 2).collect();
        assert_eq!(l2.len(), 4);
        assert!(l2.iter().all(|row| row.energy_over_hbar_omega == "4"));
        let r8 = harmonic_limit_check(8, 1, &q(1, 1), &q(1, 1)).unwrap();
        assert!(r8.rows.iter().filter(|row| row.first == 4 && row.l == 1).all(|row| row.energy_over_hbar_omega == "5"));
    }

    #[test]
    fn realization_needs_the_energy_factor() {
        let c = ce(6, 2, 1, 0, q(1, 3), q(2, 5));
        let m = m_values(&c).unwrap();
        let e = unirrep_energy(2, (1, 1), &m, &c.params);
        let u = set_u(SetId::One, (1, 1), &e, &m, &c.params);
        let r = realization_check(&c, &u, &e, &[0, 1, 2, 3]);
        assert!(r.a_relation_ok && r.derived_b_ok);
        assert!(!r.printed_b_ok);
    }
}

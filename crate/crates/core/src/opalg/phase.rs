//! Classical phase-space functions and the Poisson bracket.

use super::diffop::DiffOp;
use super::laurent::{deriv_terms, push_normalized, LaurentCoeff};
use super::mono::{Mono, MultiIndex, SLOT_HBAR};
use super::scalar::{fmt_coeff_mono, mono_factors, ParamScalar, ParamValues};
use super::terms::{int, Terms, Q};
use super::{AlgebraError, Dims};
use num_rational::BigRational;
use num_traits::One;
use rustc_hash::FxHashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// A polynomial in `x` and `p` whose coefficients may carry inverse radii,
/// in the same normal form as [`LaurentCoeff`]. Keys are
/// `(momentum exponents, coordinate monomial)`.
#[derive(Clone, PartialEq, Eq)]
pub struct PhaseFn {
    dims: Dims,
    terms: Terms<(MultiIndex, Mono)>,
}

type Buckets = FxHashMap<MultiIndex, FxHashMap<Mono, Q>>;

fn from_buckets(dims: Dims, buckets: Buckets) -> PhaseFn {
    let terms = Terms::from_iter_unsorted(
        buckets
            .into_iter()
            .flat_map(|(p, map)| map.into_iter().map(move |(m, q)| ((p, m), q))),
    );
    PhaseFn { dims, terms }
}

impl PhaseFn {
    pub fn zero(dims: Dims) -> Self {
        PhaseFn { dims, terms: Terms::zero() }
    }

    pub fn one(dims: Dims) -> Self {
        Self::scalar(dims, &ParamScalar::one())
    }

    pub fn scalar(dims: Dims, p: &ParamScalar) -> Self {
        Self::from_coeff(&LaurentCoeff::scalar(dims, p))
    }

    /// A function of position only.
    pub fn from_coeff(c: &LaurentCoeff) -> Self {
        PhaseFn {
            dims: c.dims(),
            terms: Terms::from_iter_unsorted(c.terms().map(|(m, q)| ((MultiIndex::ZERO, *m), q.clone()))),
        }
    }

    pub fn x(dims: Dims, i: usize) -> Self {
        Self::from_coeff(&LaurentCoeff::x(dims, i))
    }

    pub fn p(dims: Dims, i: usize) -> Self {
        assert!(i < dims.total(), "momentum index out of range");
        PhaseFn { dims, terms: Terms::single((MultiIndex::unit(i), Mono::ONE), Q::one()) }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_zero()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Highest total degree in the momenta.
    pub fn momentum_degree(&self) -> u32 {
        self.terms.iter().map(|((p, _), _)| p.order()).max().unwrap_or(0)
    }

    fn check(&self, other: &PhaseFn) -> Result<(), AlgebraError> {
        if self.dims == other.dims {
            Ok(())
        } else {
            Err(AlgebraError::DimensionMismatch { left: self.dims, right: other.dims })
        }
    }

    pub fn try_add(&self, other: &PhaseFn) -> Result<PhaseFn, AlgebraError> {
        self.check(other)?;
        Ok(PhaseFn { dims: self.dims, terms: self.terms.add(&other.terms) })
    }

    pub fn try_sub(&self, other: &PhaseFn) -> Result<PhaseFn, AlgebraError> {
        self.check(other)?;
        Ok(PhaseFn { dims: self.dims, terms: self.terms.sub(&other.terms) })
    }

    pub fn try_mul(&self, other: &PhaseFn) -> Result<PhaseFn, AlgebraError> {
        self.check(other)?;
        let mut buckets: Buckets = FxHashMap::default();
        for ((p1, m1), q1) in self.terms.iter() {
            for ((p2, m2), q2) in other.terms.iter() {
                let slot = buckets.entry(p1.add(*p2)).or_default();
                push_normalized(self.dims, slot, m1.mul(*m2), q1 * q2);
            }
        }
        Ok(from_buckets(self.dims, buckets))
    }

    pub fn scale(&self, q: &BigRational) -> PhaseFn {
        PhaseFn { dims: self.dims, terms: self.terms.scale(q) }
    }

    pub fn mul_scalar(&self, p: &ParamScalar) -> PhaseFn {
        self * &PhaseFn::scalar(self.dims, p)
    }

    pub fn pow(&self, k: u32) -> PhaseFn {
        (0..k).fold(PhaseFn::one(self.dims), |acc, _| &acc * self)
    }

    /// `df/dx_{k+1}`.
    pub fn d_x(&self, k: usize) -> PhaseFn {
        let mut groups: FxHashMap<MultiIndex, Vec<(Mono, Q)>> = FxHashMap::default();
        for ((p, m), q) in self.terms.iter() {
            groups.entry(*p).or_default().push((*m, q.clone()));
        }
        let terms = Terms::from_iter_unsorted(groups.into_iter().flat_map(|(p, ts)| {
            let d = deriv_terms(self.dims, &Terms::from_iter_unsorted(ts), k);
            d.iter().map(|(m, q)| ((p, *m), q.clone())).collect::<Vec<_>>()
        }));
        PhaseFn { dims: self.dims, terms }
    }

    /// `df/dp_{k+1}`.
    pub fn d_p(&self, k: usize) -> PhaseFn {
        let unit = MultiIndex::unit(k);
        let terms = Terms::from_iter_unsorted(self.terms.iter().filter_map(|((p, m), q)| {
            let e = p.get(k);
            (e > 0).then(|| ((p.checked_sub(unit).unwrap(), *m), q * int(e as i64)))
        }));
        PhaseFn { dims: self.dims, terms }
    }

    pub fn substitute(&self, values: &ParamValues) -> PhaseFn {
        let terms = Terms::from_iter_unsorted(self.terms.iter().map(|((p, m), q)| {
            let v = ParamScalar::monomial(m.param_exps(), q.clone()).eval(values);
            ((*p, m.spatial()), v)
        }));
        PhaseFn { dims: self.dims, terms }
    }

    /// Terms as `(momentum exponents, coordinate monomial, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (MultiIndex, Mono, &BigRational)> {
        self.terms.iter().map(|((p, m), q)| (*p, *m, q))
    }
}

/// `{f, g} = sum_i (df/dx_i dg/dp_i - df/dp_i dg/dx_i)`.
pub fn poisson_bracket(f: &PhaseFn, g: &PhaseFn) -> Result<PhaseFn, AlgebraError> {
    f.check(g)?;
    let mut out = PhaseFn::zero(f.dims);
    for i in 0..f.dims.total() {
        let a = f.d_x(i).try_mul(&g.d_p(i))?;
        let b = f.d_p(i).try_mul(&g.d_x(i))?;
        out = out.try_add(&a)?.try_sub(&b)?;
    }
    Ok(out)
}

/// The classical function `f` with `op = (i hbar)^shift f(x, -i hbar d) + ...`,
/// read off from the terms of `op` whose hbar power minus derivative order
/// equals `shift`.
///
/// A term `c hbar^e d^beta` with `e - |beta| = shift` contributes
/// `c i^(|beta| - shift) p^beta`; an odd `|beta| - shift` would make the
/// function imaginary and is reported as an error.
pub fn classical_limit(op: &DiffOp, shift: u32) -> Result<PhaseFn, AlgebraError> {
    let mut collected = Vec::new();
    for (beta, c) in op.iter() {
        let order = beta.order();
        for (m, q) in c.terms() {
            let e = m.exp(SLOT_HBAR);
            if e as i64 - order as i64 != shift as i64 {
                continue;
            }
            if (order + shift) % 2 == 1 {
                return Err(AlgebraError::NotReal { order, shift });
            }
            let half = (order as i64 - shift as i64) / 2;
            let sign = if half.rem_euclid(2) == 0 { q.clone() } else { -q };
            collected.push(((*beta, m.with_exp(SLOT_HBAR, 0)), sign));
        }
    }
    Ok(PhaseFn { dims: op.dims(), terms: Terms::from_iter_unsorted(collected) })
}

impl Add for &PhaseFn {
    type Output = PhaseFn;
    fn add(self, rhs: &PhaseFn) -> PhaseFn {
        self.try_add(rhs).expect("dimension mismatch")
    }
}

impl Sub for &PhaseFn {
    type Output = PhaseFn;
    fn sub(self, rhs: &PhaseFn) -> PhaseFn {
        self.try_sub(rhs).expect("dimension mismatch")
    }
}

impl Mul for &PhaseFn {
    type Output = PhaseFn;
    fn mul(self, rhs: &PhaseFn) -> PhaseFn {
        self.try_mul(rhs).expect("dimension mismatch")
    }
}

impl Neg for &PhaseFn {
    type Output = PhaseFn;
    fn neg(self) -> PhaseFn {
        PhaseFn { dims: self.dims, terms: self.terms.neg() }
    }
}

impl fmt::Display for PhaseFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, ((p, m), q)) in self.terms.iter().enumerate() {
            let mut factors: Vec<String> = p
                .entries()
                .map(|(k, e)| if e == 1 { format!("p{}", k + 1) } else { format!("p{}^{}", k + 1, e) })
                .collect();
            factors.extend(mono_factors(*m));
            fmt_coeff_mono(f, q, &factors, i == 0)?;
        }
        Ok(())
    }
}

impl fmt::Debug for PhaseFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PhaseFn({})", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d() -> Dims {
        Dims::new(3, 2).unwrap()
    }

    #[test]
    fn canonical_pair() {
        let d = d();
        let b = poisson_bracket(&PhaseFn::x(d, 0), &PhaseFn::p(d, 0)).unwrap();
        assert_eq!(b, PhaseFn::one(d));
        assert!(poisson_bracket(&PhaseFn::x(d, 0), &PhaseFn::p(d, 1)).unwrap().is_zero());
    }

    #[test]
    fn bracket_with_inverse_radius() {
        let d = d();
        // {p1, 1/r1^2} = -d/dx1 (1/r1^2) = 2 x1 / r1^4
        let s = LaurentCoeff::inv_r1_sq(d);
        let got = poisson_bracket(&PhaseFn::p(d, 0), &PhaseFn::from_coeff(&s)).unwrap();
        let want = PhaseFn::from_coeff(&LaurentCoeff::x(d, 0).mul(&s).mul(&s).scale(&int(2)));
        assert_eq!(got, want);
    }

    fn pick(d: Dims, idx: usize) -> PhaseFn {
        let s = PhaseFn::from_coeff(&LaurentCoeff::inv_r1_sq(d));
        let t = PhaseFn::from_coeff(&LaurentCoeff::inv_r2_sq(d));
        let pool = [
            PhaseFn::x(d, 0),
            PhaseFn::x(d, 1),
            PhaseFn::x(d, 2),
            PhaseFn::p(d, 0),
            PhaseFn::p(d, 1),
            PhaseFn::p(d, 2),
            s,
            t,
        ];
        pool[idx % pool.len()].clone()
    }

    fn arb_fn() -> impl Strategy<Value = PhaseFn> {
        prop::collection::vec((0usize..8, 0usize..8, -3i64..4), 1..4).prop_map(|ts| {
            let d = d();
            ts.into_iter().fold(PhaseFn::zero(d), |acc, (a, b, c)| {
                &acc + &(&pick(d, a) * &pick(d, b)).scale(&int(c))
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn bracket_laws(f in arb_fn(), g in arb_fn(), h in arb_fn()) {
            let fg = poisson_bracket(&f, &g).unwrap();
            let gf = poisson_bracket(&g, &f).unwrap();
            prop_assert!((&fg + &gf).is_zero());
            // Leibniz
            let lhs = poisson_bracket(&f, &(&g * &h)).unwrap();
            let rhs = &(&fg * &h) + &(&g * &poisson_bracket(&f, &h).unwrap());
            prop_assert_eq!(lhs, rhs);
            // Jacobi
            let j = &(&poisson_bracket(&fg, &h).unwrap()
                + &poisson_bracket(&poisson_bracket(&g, &h).unwrap(), &f).unwrap())
                + &poisson_bracket(&poisson_bracket(&h, &f).unwrap(), &g).unwrap();
            prop_assert!(j.is_zero());
        }
    }
}

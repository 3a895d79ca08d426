//! Normal-ordered differential operators.

use super::laurent::{deriv_terms, mul_accumulate, LaurentCoeff};
use super::mono::{Mono, MultiIndex};
use super::scalar::{ParamScalar, ParamValues};
use super::terms::{Terms, Q};
use super::{AlgebraError, Dims};
use num_rational::BigRational;
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// `sum_beta a_beta(x) d^beta`, every derivative to the right of its
/// coefficient. Zero coefficients are never stored, so two operators are
/// equal exactly when their maps are equal.
#[derive(Clone, PartialEq, Eq)]
pub struct DiffOp {
    dims: Dims,
    terms: BTreeMap<MultiIndex, LaurentCoeff>,
}

impl DiffOp {
    pub fn zero(dims: Dims) -> Self {
        DiffOp { dims, terms: BTreeMap::new() }
    }

    pub fn identity(dims: Dims) -> Self {
        Self::multiplication(LaurentCoeff::one(dims))
    }

    /// Multiplication by a coefficient function.
    pub fn multiplication(c: LaurentCoeff) -> Self {
        Self::term(c, MultiIndex::ZERO)
    }

    pub fn scalar(dims: Dims, p: &ParamScalar) -> Self {
        Self::multiplication(LaurentCoeff::scalar(dims, p))
    }

    /// `c(x) d^beta`.
    pub fn term(c: LaurentCoeff, beta: MultiIndex) -> Self {
        let dims = c.dims();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(beta, c);
        }
        DiffOp { dims, terms }
    }

    /// `d/dx_{i+1}`.
    pub fn partial(dims: Dims, i: usize) -> Self {
        Self::term(LaurentCoeff::one(dims), MultiIndex::unit(i))
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest derivative order present (0 for the zero operator).
    pub fn order(&self) -> u32 {
        self.terms.keys().map(|b| b.order()).max().unwrap_or(0)
    }

    /// Total number of monomial terms across all coefficients.
    pub fn num_terms(&self) -> usize {
        self.terms.values().map(|c| c.num_terms()).sum()
    }

    pub fn coefficient(&self, beta: MultiIndex) -> LaurentCoeff {
        self.terms
            .get(&beta)
            .cloned()
            .unwrap_or_else(|| LaurentCoeff::zero(self.dims))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &LaurentCoeff)> {
        self.terms.iter()
    }

    fn check_dims(&self, other: &DiffOp) -> Result<(), AlgebraError> {
        if self.dims == other.dims {
            Ok(())
        } else {
            Err(AlgebraError::DimensionMismatch { left: self.dims, right: other.dims })
        }
    }

    pub fn try_add(&self, other: &DiffOp) -> Result<DiffOp, AlgebraError> {
        self.check_dims(other)?;
        Ok(self.combine(other, false))
    }

    pub fn try_sub(&self, other: &DiffOp) -> Result<DiffOp, AlgebraError> {
        self.check_dims(other)?;
        Ok(self.combine(other, true))
    }

    fn combine(&self, other: &DiffOp, negate: bool) -> DiffOp {
        let mut terms = self.terms.clone();
        for (beta, c) in &other.terms {
            let updated = match terms.get(beta) {
                Some(a) if negate => a.sub(c),
                Some(a) => a.add(c),
                None if negate => c.neg(),
                None => c.clone(),
            };
            if updated.is_zero() {
                terms.remove(beta);
            } else {
                terms.insert(*beta, updated);
            }
        }
        DiffOp { dims: self.dims, terms }
    }

    pub fn scale(&self, q: &BigRational) -> DiffOp {
        self.map_coeffs(|c| c.scale(q))
    }

    pub fn mul_scalar(&self, p: &ParamScalar) -> DiffOp {
        let lc = LaurentCoeff::scalar(self.dims, p);
        self.map_coeffs(|c| c.mul(&lc))
    }

    fn map_coeffs(&self, f: impl Fn(&LaurentCoeff) -> LaurentCoeff) -> DiffOp {
        let terms = self
            .terms
            .iter()
            .map(|(b, c)| (*b, f(c)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        DiffOp { dims: self.dims, terms }
    }

    /// Replaces the symbolic parameters by exact values.
    pub fn substitute(&self, values: &ParamValues) -> DiffOp {
        self.map_coeffs(|c| c.substitute(values))
    }

    /// Terms whose coefficient carries exactly `hbar^k` (that power removed).
    pub fn hbar_part(&self, k: u32) -> DiffOp {
        self.map_coeffs(|c| c.hbar_part(k))
    }

    pub fn pow(&self, k: u32) -> DiffOp {
        (0..k).fold(DiffOp::identity(self.dims), |acc, _| &acc * self)
    }
}

/// Normal-ordered composition `P o Q`.
///
/// Uses `(a d^alpha)(b d^beta) = sum_{gamma <= alpha} C(alpha, gamma)
/// a (d^gamma b) d^(alpha - gamma + beta)`.
pub fn op_mul(p: &DiffOp, q: &DiffOp) -> Result<DiffOp, AlgebraError> {
    p.check_dims(q)?;
    let dims = p.dims;
    // Distinct derivative patterns needed from Q's coefficients.
    let mut gammas: Vec<MultiIndex> = p.terms.keys().flat_map(|a| a.sub_indices()).collect();
    gammas.sort_unstable();
    gammas.dedup();
    let q_terms: Vec<(&MultiIndex, &LaurentCoeff)> = q.terms.iter().collect();
    let derivs: FxHashMap<(MultiIndex, MultiIndex), Terms<Mono>> = q_terms
        .par_iter()
        .flat_map_iter(|(beta, c)| {
            let mut local: FxHashMap<MultiIndex, Terms<Mono>> = FxHashMap::default();
            local.insert(MultiIndex::ZERO, c.terms.clone());
            for &g in &gammas {
                derivative_memo(dims, &mut local, g);
            }
            gammas
                .iter()
                .map(|g| ((**beta, *g), local[g].clone()))
                .filter(|(_, t)| !t.is_zero())
                .collect::<Vec<_>>()
        })
        .collect();

    let p_terms: Vec<(&MultiIndex, &LaurentCoeff)> = p.terms.iter().collect();
    let partials: Vec<FxHashMap<MultiIndex, FxHashMap<Mono, Q>>> = p_terms
        .par_iter()
        .map(|(alpha, pa)| {
            let mut acc: FxHashMap<MultiIndex, FxHashMap<Mono, Q>> = FxHashMap::default();
            for gamma in alpha.sub_indices() {
                let binom = Q::from_integer(alpha.binomial(gamma).into());
                let rest = alpha.checked_sub(gamma).expect("gamma <= alpha");
                for (beta, _) in &q_terms {
                    let Some(d) = derivs.get(&(**beta, gamma)) else { continue };
                    let slot = acc.entry(rest.add(**beta)).or_default();
                    mul_accumulate(dims, slot, &pa.terms, d, &binom);
                }
            }
            acc
        })
        .collect();

    let mut merged: FxHashMap<MultiIndex, FxHashMap<Mono, Q>> = FxHashMap::default();
    for part in partials {
        for (beta, map) in part {
            let slot = merged.entry(beta).or_default();
            for (m, v) in map {
                super::terms::accumulate(slot, m, v);
            }
        }
    }
    let terms = merged
        .into_iter()
        .filter_map(|(beta, map)| {
            let t = Terms::from_map(map);
            (!t.is_zero()).then_some((beta, LaurentCoeff { dims, terms: t }))
        })
        .collect();
    Ok(DiffOp { dims, terms })
}

fn derivative_memo(
    dims: Dims,
    memo: &mut FxHashMap<MultiIndex, Terms<Mono>>,
    gamma: MultiIndex,
) -> Terms<Mono> {
    if let Some(t) = memo.get(&gamma) {
        return t.clone();
    }
    let (k, _) = gamma.entries().next().expect("nonzero multi-index");
    let prev = gamma.checked_sub(MultiIndex::unit(k)).unwrap();
    let base = derivative_memo(dims, memo, prev);
    let result = deriv_terms(dims, &base, k);
    memo.insert(gamma, result.clone());
    result
}

/// `[P, Q] = PQ - QP`.
pub fn commutator(p: &DiffOp, q: &DiffOp) -> Result<DiffOp, AlgebraError> {
    let (pq, qp) = rayon::join(|| op_mul(p, q), || op_mul(q, p));
    pq?.try_sub(&qp?)
}

/// `{P, Q} = PQ + QP`.
pub fn anticommutator(p: &DiffOp, q: &DiffOp) -> Result<DiffOp, AlgebraError> {
    let (pq, qp) = rayon::join(|| op_mul(p, q), || op_mul(q, p));
    pq?.try_add(&qp?)
}

// Operator sugar for operands known to share dimensions; panics otherwise.
impl Add for &DiffOp {
    type Output = DiffOp;
    fn add(self, rhs: &DiffOp) -> DiffOp {
        self.try_add(rhs).expect("dimension mismatch")
    }
}

impl Sub for &DiffOp {
    type Output = DiffOp;
    fn sub(self, rhs: &DiffOp) -> DiffOp {
        self.try_sub(rhs).expect("dimension mismatch")
    }
}

impl Mul for &DiffOp {
    type Output = DiffOp;
    fn mul(self, rhs: &DiffOp) -> DiffOp {
        op_mul(self, rhs).expect("dimension mismatch")
    }
}

impl Neg for &DiffOp {
    type Output = DiffOp;
    fn neg(self) -> DiffOp {
        self.map_coeffs(|c| c.neg())
    }
}

impl Mul<&DiffOp> for &ParamScalar {
    type Output = DiffOp;
    fn mul(self, rhs: &DiffOp) -> DiffOp {
        rhs.mul_scalar(self)
    }
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (beta, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let d: Vec<String> = beta
                .entries()
                .map(|(k, e)| if e == 1 { format!("d{}", k + 1) } else { format!("d{}^{}", k + 1, e) })
                .collect();
            if d.is_empty() {
                write!(f, "({})", c)?;
            } else {
                write!(f, "({})*{}", c, d.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiffOp{{{}}}", self)
    }
}

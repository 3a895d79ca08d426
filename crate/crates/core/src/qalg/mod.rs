//! Deformed-oscillator realization of the quadratic algebra: structure
//! function, finite unitary representations and the algebraic spectrum.
//!
//! All quantities are exact elements of `Q(m1, m2)`, so boundary conditions
//! and positivity are decided without rounding.

mod poly;
mod structure;
mod unirrep;

pub use poly::Poly;
pub use structure::{
    leading_constant, structure_fn_factored, structure_fn_from_roots, structure_fn_raw,
    FactorRoots, Reading, StructureFn, StructureForm,
};
pub use unirrep::{
    branch_signs, harmonic_limit_check, printed_set_structure_fn, realization_check,
    solve_unirreps, unirrep_energy, HarmonicReport, HarmonicRow, RealizationCheck, SetId,
    UnirrepSolution,
};

use crate::opalg::ParamValues;
use crate::surd::{Surd, SurdError, SurdField};
use num_rational::BigRational;
use num_traits::Signed;
use std::sync::Arc;
use thiserror::Error;

type Q = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QalgError {
    #[error("invalid partition (N, n) = ({total}, {first}): need N >= 2 and 1 <= n <= N - 1")]
    InvalidPartition { total: usize, first: usize },
    #[error("coupling {name} = {value} is negative")]
    NegativeCoupling { name: &'static str, value: String },
    #[error("{name} = {value} must be positive")]
    NonPositiveScale { name: &'static str, value: String },
    #[error("angular number l = {l} has no states in dimension {m}")]
    AngularOutOfRange { m: usize, l: u32 },
    #[error(transparent)]
    Surd(#[from] SurdError),
}

/// Eigenvalues of the central elements on one representation, together with
/// the model parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct CentralEigs {
    pub total: usize,
    pub first: usize,
    pub l_n: u32,
    pub l_nn: u32,
    pub params: ParamValues,
}

fn check_params(p: &ParamValues) -> Result<(), QalgError> {
    for (name, v) in [("hbar", &p.hbar), ("omega", &p.omega)] {
        if !v.is_positive() {
            return Err(QalgError::NonPositiveScale { name, value: v.to_string() });
        }
    }
    for (name, v) in [("c1", &p.c1), ("c2", &p.c2)] {
        if v.is_negative() {
            return Err(QalgError::NegativeCoupling { name, value: v.to_string() });
        }
    }
    Ok(())
}

/// Eigenvalue `l (l + m - 2)` of the grand angular momentum on `S^(m-1)`.
///
/// For `m = 1` the "sphere" is two points and `l in {0, 1}` labels even and
/// odd parity, both with eigenvalue 0.
pub fn angular_eigenvalue(m: usize, l: u32) -> Result<i64, QalgError> {
    if m == 1 && l > 1 {
        return Err(QalgError::AngularOutOfRange { m, l });
    }
    Ok(l as i64 * (l as i64 + m as i64 - 2))
}

impl CentralEigs {
    pub fn new(total: usize, first: usize, l_n: u32, l_nn: u32, params: ParamValues) -> Result<Self, QalgError> {
        if total < 2 || first < 1 || first >= total {
            return Err(QalgError::InvalidPartition { total, first });
        }
        check_params(&params)?;
        angular_eigenvalue(first, l_n)?;
        angular_eigenvalue(total - first, l_nn)?;
        Ok(CentralEigs { total, first, l_n, l_nn, params })
    }

    /// `N - n`.
    pub fn second(&self) -> usize {
        self.total - self.first
    }

    fn hbar_sq(&self) -> Q {
        &self.params.hbar * &self.params.hbar
    }

    /// Eigenvalue of `J2`.
    pub fn j2(&self) -> Q {
        self.hbar_sq() * Q::from_integer(angular_eigenvalue(self.first, self.l_n).unwrap().into())
    }

    /// Eigenvalue of `K2`.
    pub fn k2(&self) -> Q {
        self.hbar_sq() * Q::from_integer(angular_eigenvalue(self.second(), self.l_nn).unwrap().into())
    }

    /// `m1^2 = (8 c1 + 4 j2) / hbar^2 + (n - 2)^2`.
    pub fn m1_sq(&self) -> Q {
        radicand(&self.params.c1, &self.j2(), &self.hbar_sq(), self.first)
    }

    /// `m2^2 = (8 c2 + 4 k2) / hbar^2 + (N - n - 2)^2`.
    pub fn m2_sq(&self) -> Q {
        radicand(&self.params.c2, &self.k2(), &self.hbar_sq(), self.second())
    }
}

fn radicand(c: &Q, casimir: &Q, hbar_sq: &Q, m: usize) -> Q {
    let shift = Q::from_integer((m as i64 - 2).into());
    (c * Q::from_integer(8.into()) + casimir * Q::from_integer(4.into())) / hbar_sq + &shift * &shift
}

/// The non-negative roots `m1, m2` in the field they generate.
#[derive(Clone, Debug, PartialEq)]
pub struct MQuantum {
    pub m1: Surd,
    pub m2: Surd,
}

impl MQuantum {
    pub fn field(&self) -> &Arc<SurdField> {
        self.m1.field()
    }
}

pub fn m_values(ce: &CentralEigs) -> Result<MQuantum, QalgError> {
    let (a, b) = (ce.m1_sq(), ce.m2_sq());
    if a.is_negative() || b.is_negative() {
        return Err(SurdError::NegativeRadicand(format!("{a}, {b}")).into());
    }
    let (_, m1, m2) = SurdField::adjoin(&a, &b)?;
    debug_assert!(!m1.is_negative() && !m2.is_negative());
    Ok(MQuantum { m1, m2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    fn params(c1: Q, c2: Q) -> ParamValues {
        ParamValues::new(q(1, 1), q(1, 1), c1, c2)
    }

    #[test]
    fn m_values_examples() {
        let ce = CentralEigs::new(4, 2, 0, 0, params(q(0, 1), q(0, 1))).unwrap();
        assert!(m_values(&ce).unwrap().m1.is_zero());
        let ce = CentralEigs::new(5, 3, 0, 0, params(q(1, 1), q(0, 1))).unwrap();
        assert_eq!(ce.m1_sq(), q(9, 1));
        assert_eq!(m_values(&ce).unwrap().m1.as_rational(), Some(q(3, 1)));
    }

    #[test]
    fn free_radicands_are_perfect_squares() {
        // With c = 0, m = |2l + dim - 2| exactly.
        for dim in 1..=6usize {
            for l in 0..=10u32 {
                if dim == 1 && l > 1 {
                    continue;
                }
                let total = dim + 2;
                let ce = CentralEigs::new(total, dim, l, 0, params(q(0, 1), q(0, 1))).unwrap();
                let want = (2 * l as i64 + dim as i64 - 2).abs();
                assert_eq!(m_values(&ce).unwrap().m1.as_rational(), Some(q(want, 1)), "dim {dim} l {l}");
            }
        }
    }

    #[test]
    fn trivial_sectors_have_zero_casimir() {
        let ce = CentralEigs::new(3, 1, 1, 2, params(q(1, 2), q(0, 1))).unwrap();
        assert!(ce.j2().is_zero());
        let ce = CentralEigs::new(3, 2, 4, 1, params(q(1, 2), q(0, 1))).unwrap();
        assert!(ce.k2().is_zero());
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert!(CentralEigs::new(4, 0, 0, 0, params(q(0, 1), q(0, 1))).is_err());
        assert!(CentralEigs::new(4, 2, 0, 0, params(q(-1, 1), q(0, 1))).is_err());
        assert!(CentralEigs::new(3, 1, 2, 0, params(q(0, 1), q(0, 1))).is_err());
    }
}

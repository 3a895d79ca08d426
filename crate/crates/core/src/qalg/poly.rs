//! Univariate polynomials with coefficients in a surd field.

use crate::surd::{Surd, SurdField};
use num_rational::BigRational;
use std::sync::Arc;

/// `sum_k coeffs[k] x^k`, trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    field: Arc<SurdField>,
    coeffs: Vec<Surd>,
}

impl Poly {
    pub fn new(field: &Arc<SurdField>, mut coeffs: Vec<Surd>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { field: field.clone(), coeffs }
    }

    pub fn constant(c: Surd) -> Poly {
        let field = c.field().clone();
        Poly::new(&field, vec![c])
    }

    pub fn rational(field: &Arc<SurdField>, q: BigRational) -> Poly {
        Poly::constant(Surd::rational(field, q))
    }

    pub fn int(field: &Arc<SurdField>, v: i64) -> Poly {
        Poly::constant(Surd::int(field, v))
    }

    /// `x - root`.
    pub fn linear(root: &Surd) -> Poly {
        let f = root.field().clone();
        Poly::new(&f, vec![-root, Surd::one(&f)])
    }

    pub fn x(field: &Arc<SurdField>) -> Poly {
        Poly::new(field, vec![Surd::zero(field), Surd::one(field)])
    }

    pub fn coefficients(&self) -> &[Surd] {
        &self.coeffs
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = Surd::zero(&self.field);
        let c = (0..n)
            .map(|i| self.coeffs.get(i).unwrap_or(&zero) + other.coeffs.get(i).unwrap_or(&zero))
            .collect();
        Poly::new(&self.field, c)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly::new(&self.field, self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::new(&self.field, vec![]);
        }
        let mut c = vec![Surd::zero(&self.field); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j] = &c[i + j] + &(a * b);
            }
        }
        Poly::new(&self.field, c)
    }

    pub fn scale(&self, s: &Surd) -> Poly {
        Poly::new(&self.field, self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn scale_rational(&self, q: &BigRational) -> Poly {
        Poly::new(&self.field, self.coeffs.iter().map(|c| c.scale(q)).collect())
    }

    pub fn pow(&self, k: u32) -> Poly {
        (0..k).fold(Poly::int(&self.field, 1), |acc, _| acc.mul(self))
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &Surd) -> Surd {
        self.coeffs.iter().rev().fold(Surd::zero(&self.field), |acc, c| &(&acc * x) + c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn product_of_linear_factors() {
        let f = SurdField::rationals();
        let one = Surd::one(&f);
        let two = Surd::int(&f, 2);
        let p = Poly::linear(&one).mul(&Poly::linear(&two));
        assert_eq!(p.degree(), Some(2));
        assert!(p.eval(&one).is_zero() && p.eval(&two).is_zero());
        assert_eq!(p.eval(&Surd::int(&f, 3)), Surd::int(&f, 2));
        assert!(p.sub(&p).is_zero());
        assert_eq!(Poly::x(&f).pow(3).scale_rational(&BigRational::one()).degree(), Some(3));
    }
}

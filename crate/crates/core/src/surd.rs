//! Exact arithmetic in biquadratic fields `Q(sqrt a, sqrt b)` with an exact sign test.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;
use thiserror::Error;

type Q = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurdError {
    #[error("negative radicand {0}")]
    NegativeRadicand(String),
    #[error("division by zero")]
    DivisionByZero,
}

/// The exact square root of a non-negative rational, if it is rational.
pub fn rational_sqrt(q: &Q) -> Option<Q> {
    if q.is_negative() {
        return None;
    }
    let isqrt = |n: &BigInt| {
        let r = n.sqrt();
        (&r * &r == *n).then_some(r)
    };
    Some(Q::new(isqrt(q.numer())?, isqrt(q.denom())?))
}

/// A field `Q(e1, e2)` with `e1^2 = g1`, `e2^2 = g2`, where the generators are
/// independent over `Q`; an absent generator has `g = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurdField {
    g: [Q; 2],
}

impl SurdField {
    pub fn rationals() -> Arc<SurdField> {
        Arc::new(SurdField { g: [Q::zero(), Q::zero()] })
    }

    /// Builds the smallest field containing `sqrt a` and `sqrt b` and returns
    /// it with those two elements.
    pub fn adjoin(a: &Q, b: &Q) -> Result<(Arc<SurdField>, Surd, Surd), SurdError> {
        for r in [a, b] {
            if r.is_negative() {
                return Err(SurdError::NegativeRadicand(r.to_string()));
            }
        }
        let e = |f: &Arc<SurdField>, i: usize, scale: Q| {
            let mut c = zeros();
            c[i] = scale;
            Surd { field: f.clone(), c }
        };
        let out = match (rational_sqrt(a), rational_sqrt(b)) {
            (Some(ra), Some(rb)) => {
                let f = Self::rationals();
                (f.clone(), Surd::rational(&f, ra), Surd::rational(&f, rb))
            }
            (None, Some(rb)) => {
                let f = Arc::new(SurdField { g: [a.clone(), Q::zero()] });
                (f.clone(), e(&f, 1, Q::one()), Surd::rational(&f, rb))
            }
            (Some(ra), None) => {
                let f = Arc::new(SurdField { g: [b.clone(), Q::zero()] });
                (f.clone(), Surd::rational(&f, ra), e(&f, 1, Q::one()))
            }
            (None, None) => match rational_sqrt(&(a * b)) {
                // sqrt b = (s / a) sqrt a
                Some(s) => {
                    let f = Arc::new(SurdField { g: [a.clone(), Q::zero()] });
                    (f.clone(), e(&f, 1, Q::one()), e(&f, 1, s / a))
                }
                None => {
                    let f = Arc::new(SurdField { g: [a.clone(), b.clone()] });
                    (f.clone(), e(&f, 1, Q::one()), e(&f, 2, Q::one()))
                }
            },
        };
        Ok(out)
    }

    pub fn generators(&self) -> &[Q; 2] {
        &self.g
    }
}

fn zeros() -> [Q; 4] {
    [Q::zero(), Q::zero(), Q::zero(), Q::zero()]
}

/// `c0 + c1 e1 + c2 e2 + c3 e1 e2` in a [`SurdField`].
#[derive(Clone)]
pub struct Surd {
    field: Arc<SurdField>,
    c: [Q; 4],
}

fn sign_of(q: &Q) -> i8 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

/// Sign of `x + y sqrt(g)` for `g >= 0`.
fn sign_quadratic(x: &Q, y: &Q, g: &Q) -> i8 {
    let sx = sign_of(x);
    let sy = if g.is_zero() { 0 } else { sign_of(y) };
    if sy == 0 {
        return sx;
    }
    if sx == 0 || sx == sy {
        return sy;
    }
    sx * sign_of(&(x * x - y * y * g))
}

impl Surd {
    pub fn rational(field: &Arc<SurdField>, q: Q) -> Surd {
        let mut c = zeros();
        c[0] = q;
        Surd { field: field.clone(), c }
    }

    pub fn int(field: &Arc<SurdField>, v: i64) -> Surd {
        Self::rational(field, Q::from_integer(v.into()))
    }

    pub fn zero(field: &Arc<SurdField>) -> Surd {
        Self::rational(field, Q::zero())
    }

    pub fn one(field: &Arc<SurdField>) -> Surd {
        Self::rational(field, Q::one())
    }

    pub fn field(&self) -> &Arc<SurdField> {
        &self.field
    }

    pub fn coefficients(&self) -> &[Q; 4] {
        &self.c
    }

    fn same_field(&self, other: &Surd) {
        assert!(
            Arc::ptr_eq(&self.field, &other.field) || self.field == other.field,
            "surds from different fields"
        );
    }

    pub fn signum(&self) -> i8 {
        let [g1, g2] = &self.field.g;
        let c = &self.c;
        let sp = sign_quadratic(&c[0], &c[1], g1);
        let sq = if g2.is_zero() { 0 } else { sign_quadratic(&c[2], &c[3], g1) };
        if sq == 0 {
            return sp;
        }
        if sp == 0 || sp == sq {
            return sq;
        }
        // sign(P^2 - Q^2 g2) with P = c0 + c1 e1, Q = c2 + c3 e1
        let x = &c[0] * &c[0] + &c[1] * &c[1] * g1 - g2 * (&c[2] * &c[2] + &c[3] * &c[3] * g1);
        let y = Q::from_integer(2.into()) * (&c[0] * &c[1] - g2 * &c[2] * &c[3]);
        sp * sign_quadratic(&x, &y, g1)
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|q| q.is_zero())
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    /// Value equality, or `None` when the operands live in different fields.
    pub fn try_eq(&self, other: &Surd) -> Option<bool> {
        (Arc::ptr_eq(&self.field, &other.field) || self.field == other.field).then(|| self.c == other.c)
    }

    pub fn cmp_value(&self, other: &Surd) -> Ordering {
        (self - other).signum().cmp(&0)
    }

    /// The rational value, if the irrational parts vanish.
    pub fn as_rational(&self) -> Option<Q> {
        self.c[1..].iter().all(|q| q.is_zero()).then(|| self.c[0].clone())
    }

    pub fn scale(&self, q: &Q) -> Surd {
        Surd { field: self.field.clone(), c: self.c.clone().map(|x| x * q) }
    }

    pub fn add_rational(&self, q: &Q) -> Surd {
        let mut out = self.clone();
        out.c[0] = &out.c[0] + q;
        out
    }

    pub fn pow(&self, k: u32) -> Surd {
        (0..k).fold(Surd::one(&self.field), |acc, _| &acc * self)
    }

    pub fn recip(&self) -> Result<Surd, SurdError> {
        if self.is_zero() {
            return Err(SurdError::DivisionByZero);
        }
        let c = &self.c;
        let conj2 = Surd { field: self.field.clone(), c: [c[0].clone(), c[1].clone(), -&c[2], -&c[3]] };
        let n = self * &conj2;
        let conj1 = Surd { field: self.field.clone(), c: [n.c[0].clone(), -&n.c[1], Q::zero(), Q::zero()] };
        let d = (&n * &conj1).c[0].clone();
        Ok((&conj2 * &conj1).scale(&d.recip()))
    }

    pub fn to_f64(&self) -> f64 {
        let [g1, g2] = &self.field.g;
        let f = |q: &Q| q.to_f64().unwrap_or(f64::NAN);
        let s1 = f(g1).sqrt();
        let s2 = f(g2).sqrt();
        f(&self.c[0]) + f(&self.c[1]) * s1 + f(&self.c[2]) * s2 + f(&self.c[3]) * s1 * s2
    }
}

impl PartialEq for Surd {
    fn eq(&self, other: &Surd) -> bool {
        self.same_field(other);
        self.c == other.c
    }
}

impl Add for &Surd {
    type Output = Surd;
    fn add(self, rhs: &Surd) -> Surd {
        self.same_field(rhs);
        let c = [0, 1, 2, 3].map(|i| &self.c[i] + &rhs.c[i]);
        Surd { field: self.field.clone(), c }
    }
}

impl Sub for &Surd {
    type Output = Surd;
    fn sub(self, rhs: &Surd) -> Surd {
        self.same_field(rhs);
        let c = [0, 1, 2, 3].map(|i| &self.c[i] - &rhs.c[i]);
        Surd { field: self.field.clone(), c }
    }
}

impl Mul for &Surd {
    type Output = Surd;
    fn mul(self, rhs: &Surd) -> Surd {
        self.same_field(rhs);
        let [g1, g2] = &self.field.g;
        let (c, d) = (&self.c, &rhs.c);
        let r0 = &c[0] * &d[0] + g1 * &c[1] * &d[1] + g2 * &c[2] * &d[2] + g1 * g2 * &c[3] * &d[3];
        let r1 = &c[0] * &d[1] + &c[1] * &d[0] + g2 * (&c[2] * &d[3] + &c[3] * &d[2]);
        let r2 = &c[0] * &d[2] + &c[2] * &d[0] + g1 * (&c[1] * &d[3] + &c[3] * &d[1]);
        let r3 = &c[0] * &d[3] + &c[3] * &d[0] + &c[1] * &d[2] + &c[2] * &d[1];
        Surd { field: self.field.clone(), c: [r0, r1, r2, r3] }
    }
}

impl Div for &Surd {
    type Output = Surd;
    fn div(self, rhs: &Surd) -> Surd {
        self * &rhs.recip().expect("division by zero")
    }
}

impl Neg for &Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd { field: self.field.clone(), c: self.c.clone().map(|x| -x) }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Surd {
            type Output = Surd;
            fn $m(self, rhs: Surd) -> Surd {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Surd> for Surd {
            type Output = Surd;
            fn $m(self, rhs: &Surd) -> Surd {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        -&self
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [g1, g2] = &self.field.g;
        let radicals = ["".to_string(), format!("sqrt({g1})"), format!("sqrt({g2})"), format!("sqrt({})", g1 * g2)];
        let mut first = true;
        for (q, r) in self.c.iter().zip(&radicals) {
            if q.is_zero() {
                continue;
            }
            let sign = if q.is_negative() { "-" } else { "+" };
            if first {
                if q.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = q.abs();
            match (r.is_empty(), a.is_one()) {
                (true, _) => write!(f, "{a}")?,
                (false, true) => write!(f, "{r}")?,
                (false, false) => write!(f, "{a}*{r}")?,
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Surd({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    #[test]
    fn square_radicands_collapse() {
        let (f, a, b) = SurdField::adjoin(&q(9, 4), &q(16, 1)).unwrap();
        assert_eq!(f.generators(), &[Q::zero(), Q::zero()]);
        assert_eq!(a.as_rational(), Some(q(3, 2)));
        assert_eq!(b.as_rational(), Some(q(4, 1)));
    }

    #[test]
    fn dependent_radicands_share_a_generator() {
        // sqrt 8 = 2 sqrt 2
        let (_, a, b) = SurdField::adjoin(&q(2, 1), &q(8, 1)).unwrap();
        assert_eq!(&b - &(&a + &a), Surd::zero(a.field()));
    }

    #[test]
    fn sign_of_nearly_cancelling_sum() {
        let (f, a, b) = SurdField::adjoin(&q(2, 1), &q(3, 1)).unwrap();
        let s = &a + &b;
        let sq = &s * &s; // 5 + 2 sqrt 6
        let near = sq.add_rational(&q(-9_898_979, 1_000_000));
        assert_eq!(near.signum(), 1);
        let below = sq.add_rational(&q(-9_898_980, 1_000_000));
        assert_eq!(below.signum(), -1);
        assert!(Surd::zero(&f).signum() == 0);
    }

    #[test]
    fn negative_radicand_is_rejected() {
        assert!(SurdField::adjoin(&q(-1, 1), &q(1, 1)).is_err());
    }

    fn arb_surd() -> impl Strategy<Value = [i64; 4]> {
        [-20i64..20, -20i64..20, -20i64..20, -20i64..20]
    }

    proptest! {
        #[test]
        fn sign_and_inverse_match_floats(c in arb_surd(), d in arb_surd()) {
            let (f, a, b) = SurdField::adjoin(&q(2, 1), &q(5, 1)).unwrap();
            let build = |c: [i64; 4]| {
                let ab = &a * &b;
                &(&Surd::int(&f, c[0]) + &a.scale(&q(c[1], 1)))
                    + &(&b.scale(&q(c[2], 1)) + &ab.scale(&q(c[3], 1)))
            };
            let x = build(c);
            let y = build(d);
            let fx = x.to_f64();
            if fx.abs() > 1e-9 {
                prop_assert_eq!(x.signum() as f64, fx.signum());
                let inv = x.recip().unwrap();
                prop_assert_eq!(&x * &inv, Surd::one(&f));
            } else {
                prop_assert!(x.is_zero());
            }
            prop_assert!(((&x * &y).to_f64() - fx * y.to_f64()).abs() < 1e-6 * (1.0 + (fx * y.to_f64()).abs()));
        }
    }
}

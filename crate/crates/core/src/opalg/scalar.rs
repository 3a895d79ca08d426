//! Exact polynomials in the model parameters `hbar, omega, c1, c2`.

use super::mono::{Mono, PARAM_SLOTS, SLOT_C1, SLOT_C2, SLOT_HBAR, SLOT_OMEGA};
use super::terms::{accumulate, Terms, Q};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rustc_hash::FxHashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// A polynomial in `(hbar, omega, c1, c2)` with rational coefficients.
///
/// This is the coefficient field of every symbolic check: identities proved
/// over `ParamScalar` hold for all parameter values at once.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ParamScalar(pub(crate) Terms<Mono>);

/// Concrete parameter values used when a symbolic object is evaluated.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamValues {
    pub hbar: BigRational,
    pub omega: BigRational,
    pub c1: BigRational,
    pub c2: BigRational,
}

impl ParamValues {
    pub fn new(hbar: BigRational, omega: BigRational, c1: BigRational, c2: BigRational) -> Self {
        ParamValues { hbar, omega, c1, c2 }
    }

    /// `hbar = omega = 1`, `c1 = c2 = 0`.
    pub fn unit() -> Self {
        Self::new(Q::one(), Q::one(), Q::zero(), Q::zero())
    }

    pub fn as_array(&self) -> [&BigRational; 4] {
        [&self.hbar, &self.omega, &self.c1, &self.c2]
    }
}

impl ParamScalar {
    pub fn zero() -> Self {
        ParamScalar(Terms::zero())
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn constant(q: BigRational) -> Self {
        ParamScalar(Terms::single(Mono::ONE, q))
    }

    pub fn int(v: i64) -> Self {
        Self::constant(Q::from_integer(v.into()))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Self::constant(Q::new(n.into(), d.into()))
    }

    /// `coeff * hbar^a omega^b c1^c c2^d`.
    pub fn monomial(exps: [u32; 4], coeff: BigRational) -> Self {
        ParamScalar(Terms::single(Mono::from_param_exps(exps), coeff))
    }

    pub fn hbar() -> Self {
        Self::var(SLOT_HBAR)
    }

    pub fn omega() -> Self {
        Self::var(SLOT_OMEGA)
    }

    pub fn c1() -> Self {
        Self::var(SLOT_C1)
    }

    pub fn c2() -> Self {
        Self::var(SLOT_C2)
    }

    fn var(slot: usize) -> Self {
        ParamScalar(Terms::single(Mono::var(slot, 1), Q::one()))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn num_terms(&self) -> usize {
        self.0.len()
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| &acc * self)
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        ParamScalar(self.0.scale(q))
    }

    /// Terms as `(exponents of hbar, omega, c1, c2; coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = ([u32; 4], &BigRational)> {
        self.0.iter().map(|(m, q)| (m.param_exps(), q))
    }

    /// The coefficient of `hbar^k`, as a polynomial in the other parameters.
    pub fn hbar_coefficient(&self, k: u32) -> Self {
        ParamScalar(
            self.0
                .filter(|m| m.exp(SLOT_HBAR) == k)
                .map_keys(|m| m.with_exp(SLOT_HBAR, 0)),
        )
    }

    pub fn eval(&self, values: &ParamValues) -> BigRational {
        let vals = values.as_array();
        let mut total = Q::zero();
        for (m, q) in self.0.iter() {
            let mut term = q.clone();
            for (slot, v) in PARAM_SLOTS.iter().zip(vals) {
                for _ in 0..m.exp(*slot) {
                    term *= v;
                }
            }
            total += term;
        }
        total
    }

    /// The constant value, if the polynomial has no parameter dependence.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.0.len() {
            0 => Some(Q::zero()),
            1 if self.0.iter().next().unwrap().0.is_one() => {
                Some(self.0.iter().next().unwrap().1.clone())
            }
            _ => None,
        }
    }

}

impl Add for &ParamScalar {
    type Output = ParamScalar;
    fn add(self, rhs: &ParamScalar) -> ParamScalar {
        ParamScalar(self.0.add(&rhs.0))
    }
}

impl Sub for &ParamScalar {
    type Output = ParamScalar;
    fn sub(self, rhs: &ParamScalar) -> ParamScalar {
        ParamScalar(self.0.sub(&rhs.0))
    }
}

impl Mul for &ParamScalar {
    type Output = ParamScalar;
    fn mul(self, rhs: &ParamScalar) -> ParamScalar {
        let mut acc: FxHashMap<Mono, Q> = FxHashMap::default();
        for (m1, q1) in self.0.iter() {
            for (m2, q2) in rhs.0.iter() {
                accumulate(&mut acc, m1.mul(*m2), q1 * q2);
            }
        }
        ParamScalar(Terms::from_map(acc))
    }
}

impl Neg for &ParamScalar {
    type Output = ParamScalar;
    fn neg(self) -> ParamScalar {
        ParamScalar(self.0.neg())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for ParamScalar {
            type Output = ParamScalar;
            fn $m(self, rhs: ParamScalar) -> ParamScalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&ParamScalar> for ParamScalar {
            type Output = ParamScalar;
            fn $m(self, rhs: &ParamScalar) -> ParamScalar {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for ParamScalar {
    type Output = ParamScalar;
    fn neg(self) -> ParamScalar {
        -&self
    }
}

pub(crate) fn fmt_coeff_mono(
    f: &mut fmt::Formatter<'_>,
    q: &BigRational,
    factors: &[String],
    first: bool,
) -> fmt::Result {
    let neg = q.is_negative();
    if first {
        if neg {
            write!(f, "-")?;
        }
    } else {
        write!(f, " {} ", if neg { "-" } else { "+" })?;
    }
    let a = q.abs();
    if factors.is_empty() {
        write!(f, "{}", a)
    } else if a.is_one() {
        write!(f, "{}", factors.join("*"))
    } else {
        write!(f, "{}*{}", a, factors.join("*"))
    }
}

pub(crate) fn mono_factors(m: Mono) -> Vec<String> {
    (0..16)
        .filter_map(|slot| {
            let e = m.exp(slot);
            let name = match slot {
                super::mono::SLOT_S => "r1^-2".to_string(),
                super::mono::SLOT_T => "r2^-2".to_string(),
                _ => super::mono::slot_name(slot),
            };
            match e {
                0 => None,
                1 => Some(name),
                _ if slot == super::mono::SLOT_S || slot == super::mono::SLOT_T => {
                    Some(format!("r{}^-{}", if slot == super::mono::SLOT_S { 1 } else { 2 }, 2 * e))
                }
                _ => Some(format!("{}^{}", name, e)),
            }
        })
        .collect()
}

impl fmt::Display for ParamScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, q)) in self.0.iter().enumerate() {
            fmt_coeff_mono(f, q, &mono_factors(*m), i == 0)?;
        }
        Ok(())
    }
}

impl fmt::Debug for ParamScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ParamScalar({})", self)
    }
}

//! Packed exponent vectors.
//!
//! Both coefficient monomials and derivative multi-indices are stored as
//! sixteen 8-bit exponent slots in a single `u128`. Multiplying monomials is
//! then a single integer addition, and the natural integer order gives a
//! canonical term order for free.
//!
//! Coefficient slot layout:
//!
//! | slots   | variable                      |
//! |---------|-------------------------------|
//! | 0..10   | `x_1 .. x_N` (unused above N) |
//! | 10      | `s = 1/r1^2`                  |
//! | 11      | `t = 1/r2^2`                  |
//! | 12..16  | `hbar, omega, c1, c2`         |

use std::fmt;

/// Largest supported number of coordinates.
pub const MAX_DIM: usize = 10;

pub const SLOT_S: usize = 10;
pub const SLOT_T: usize = 11;
pub const SLOT_HBAR: usize = 12;
pub const SLOT_OMEGA: usize = 13;
pub const SLOT_C1: usize = 14;
pub const SLOT_C2: usize = 15;

/// Parameter slots in their canonical order `(hbar, omega, c1, c2)`.
pub const PARAM_SLOTS: [usize; 4] = [SLOT_HBAR, SLOT_OMEGA, SLOT_C1, SLOT_C2];

const HIGH_BITS: u128 = 0x8080_8080_8080_8080_8080_8080_8080_8080;
const PARAM_MASK: u128 = !0u128 << 96;

#[inline]
fn slot_exp(bits: u128, slot: usize) -> u32 {
    ((bits >> (8 * slot)) & 0xff) as u32
}

#[inline]
fn add_packed(a: u128, b: u128) -> u128 {
    let sum = a + b;
    // Every exponent stays below 128, so a set high bit means overflow.
    assert!(sum & HIGH_BITS == 0, "exponent overflow in packed monomial");
    sum
}

/// A monomial in the coordinates, the two inverse radii and the parameters.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Mono(u128);

impl Mono {
    pub const ONE: Mono = Mono(0);

    pub fn var(slot: usize, exp: u32) -> Mono {
        assert!(slot < 16 && exp < 128);
        Mono((exp as u128) << (8 * slot))
    }

    #[inline]
    pub fn exp(self, slot: usize) -> u32 {
        slot_exp(self.0, slot)
    }

    #[inline]
    pub fn mul(self, other: Mono) -> Mono {
        Mono(add_packed(self.0, other.0))
    }

    /// Divides by `var(slot, 1)`; the caller guarantees the exponent is positive.
    #[inline]
    pub fn div_var(self, slot: usize) -> Mono {
        debug_assert!(self.exp(slot) > 0);
        Mono(self.0 - (1u128 << (8 * slot)))
    }

    #[inline]
    pub fn with_exp(self, slot: usize, exp: u32) -> Mono {
        assert!(exp < 128);
        let cleared = self.0 & !(0xffu128 << (8 * slot));
        Mono(cleared | ((exp as u128) << (8 * slot)))
    }

    /// The part of the monomial in `x`, `s` and `t`.
    #[inline]
    pub fn spatial(self) -> Mono {
        Mono(self.0 & !PARAM_MASK)
    }

    /// The part of the monomial in the parameters.
    #[inline]
    pub fn params(self) -> Mono {
        Mono(self.0 & PARAM_MASK)
    }

    pub fn is_one(self) -> bool {
        self.0 == 0
    }

    pub fn param_exps(self) -> [u32; 4] {
        PARAM_SLOTS.map(|s| self.exp(s))
    }

    pub fn from_param_exps(exps: [u32; 4]) -> Mono {
        PARAM_SLOTS
            .iter()
            .zip(exps)
            .fold(Mono::ONE, |m, (&s, e)| m.mul(Mono::var(s, e)))
    }

}

impl fmt::Debug for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mono[")?;
        let mut first = true;
        for slot in 0..16 {
            let e = self.exp(slot);
            if e > 0 {
                if !first {
                    write!(f, " ")?;
                }
                first = false;
                write!(f, "{}^{}", slot_name(slot), e)?;
            }
        }
        write!(f, "]")
    }
}

pub(crate) fn slot_name(slot: usize) -> String {
    match slot {
        SLOT_S => "s".into(),
        SLOT_T => "t".into(),
        SLOT_HBAR => "hbar".into(),
        SLOT_OMEGA => "omega".into(),
        SLOT_C1 => "c1".into(),
        SLOT_C2 => "c2".into(),
        i => format!("x{}", i + 1),
    }
}

/// A derivative multi-index `beta`, standing for `d^beta`, or a momentum
/// monomial `p^beta` in the classical engine.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MultiIndex(u128);

impl MultiIndex {
    pub const ZERO: MultiIndex = MultiIndex(0);

    pub fn unit(i: usize) -> MultiIndex {
        Self::from_exps(&[(i, 1)])
    }

    pub fn from_exps(entries: &[(usize, u32)]) -> MultiIndex {
        entries.iter().fold(MultiIndex::ZERO, |acc, &(i, e)| {
            assert!(i < MAX_DIM && e < 128);
            acc.add(MultiIndex((e as u128) << (8 * i)))
        })
    }

    #[inline]
    pub fn get(self, i: usize) -> u32 {
        slot_exp(self.0, i)
    }

    #[inline]
    pub fn add(self, other: MultiIndex) -> MultiIndex {
        MultiIndex(add_packed(self.0, other.0))
    }

    /// Componentwise difference; `None` unless `other <= self` everywhere.
    pub fn checked_sub(self, other: MultiIndex) -> Option<MultiIndex> {
        (0..MAX_DIM)
            .all(|i| other.get(i) <= self.get(i))
            .then(|| MultiIndex(self.0 - other.0))
    }

    pub fn order(self) -> u32 {
        (0..MAX_DIM).map(|i| self.get(i)).sum()
    }

    /// All `gamma` with `gamma <= self` componentwise, in increasing order.
    pub fn sub_indices(self) -> Vec<MultiIndex> {
        let mut out = vec![MultiIndex::ZERO];
        for i in 0..MAX_DIM {
            let e = self.get(i);
            if e == 0 {
                continue;
            }
            let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
            for &g in &out {
                for k in 0..=e {
                    next.push(MultiIndex(g.0 + ((k as u128) << (8 * i))));
                }
            }
            out = next;
        }
        out
    }

    /// `prod_i binom(self_i, gamma_i)`.
    pub fn binomial(self, gamma: MultiIndex) -> u64 {
        (0..MAX_DIM)
            .map(|i| binomial(self.get(i) as u64, gamma.get(i) as u64))
            .product()
    }

    /// Nonzero entries as `(index, exponent)` pairs.
    pub fn entries(self) -> impl Iterator<Item = (usize, u32)> {
        (0..MAX_DIM).filter_map(move |i| {
            let e = self.get(i);
            (e > 0).then_some((i, e))
        })
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d[")?;
        let parts: Vec<String> = self
            .entries()
            .map(|(i, e)| format!("{}^{}", i + 1, e))
            .collect();
        write!(f, "{}]", parts.join(" "))
    }
}

pub(crate) fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mul_adds_exponents() {
        let a = Mono::var(0, 2).mul(Mono::var(SLOT_S, 1));
        let b = Mono::var(0, 1).mul(Mono::var(SLOT_HBAR, 3));
        let c = a.mul(b);
        assert_eq!(c.exp(0), 3);
        assert_eq!(c.exp(SLOT_S), 1);
        assert_eq!(c.exp(SLOT_HBAR), 3);
        assert_eq!(c.params(), Mono::var(SLOT_HBAR, 3));
        assert_eq!(c.spatial().exp(SLOT_HBAR), 0);
    }

    #[test]
    #[should_panic(expected = "exponent overflow")]
    fn overflow_is_detected() {
        let a = Mono::var(3, 100);
        let _ = a.mul(a);
    }

    #[test]
    fn sub_indices_and_binomials() {
        let a = MultiIndex::from_exps(&[(0, 2), (2, 1)]);
        let subs = a.sub_indices();
        assert_eq!(subs.len(), 6);
        let total: u64 = subs.iter().map(|&g| a.binomial(g)).sum();
        // sum of binomials over the box is 2^order
        assert_eq!(total, 8);
        assert_eq!(a.checked_sub(MultiIndex::unit(1)), None);
        assert_eq!(
            a.checked_sub(MultiIndex::unit(0)),
            Some(MultiIndex::from_exps(&[(0, 1), (2, 1)]))
        );
    }
}

//! Sorted sparse term vectors with exact rational coefficients.

use num_rational::BigRational;
use num_traits::{One, Zero};
use rustc_hash::FxHashMap;
use std::hash::Hash;

pub(crate) type Q = BigRational;

/// Terms sorted by key with no zero coefficients: the canonical form shared
/// by every polynomial-like type in the engine.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub(crate) struct Terms<K>(Vec<(K, Q)>);

impl<K> Default for Terms<K> {
    fn default() -> Self {
        Terms(Vec::new())
    }
}

impl<K: Copy + Ord + Hash> Terms<K> {
    pub fn zero() -> Self {
        Terms(Vec::new())
    }

    pub fn single(key: K, coeff: Q) -> Self {
        if coeff.is_zero() {
            Terms(Vec::new())
        } else {
            Terms(vec![(key, coeff)])
        }
    }

    pub fn from_map(map: FxHashMap<K, Q>) -> Self {
        let mut v: Vec<(K, Q)> = map.into_iter().filter(|(_, q)| !q.is_zero()).collect();
        v.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        Terms(v)
    }

    pub fn from_iter_unsorted(iter: impl IntoIterator<Item = (K, Q)>) -> Self {
        let mut map: FxHashMap<K, Q> = FxHashMap::default();
        for (k, q) in iter {
            accumulate(&mut map, k, q);
        }
        Self::from_map(map)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, (K, Q)> {
        self.0.iter()
    }

    pub fn add(&self, other: &Self) -> Self {
        self.merge(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.merge(other, true)
    }

    fn merge(&self, other: &Self, negate: bool) -> Self {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    let q = if negate { -&b[j].1 } else { b[j].1.clone() };
                    out.push((b[j].0, q));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let q = if negate {
                        &a[i].1 - &b[j].1
                    } else {
                        &a[i].1 + &b[j].1
                    };
                    if !q.is_zero() {
                        out.push((a[i].0, q));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(
            b[j..]
                .iter()
                .map(|(k, q)| (*k, if negate { -q } else { q.clone() })),
        );
        Terms(out)
    }

    pub fn neg(&self) -> Self {
        Terms(self.0.iter().map(|(k, q)| (*k, -q)).collect())
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Terms::zero();
        }
        if c.is_one() {
            return self.clone();
        }
        Terms(self.0.iter().map(|(k, q)| (*k, q * c)).collect())
    }

    pub fn map_keys<K2: Copy + Ord + Hash>(&self, f: impl Fn(K) -> K2) -> Terms<K2> {
        Terms::from_iter_unsorted(self.0.iter().map(|(k, q)| (f(*k), q.clone())))
    }

    pub fn filter(&self, keep: impl Fn(&K) -> bool) -> Self {
        Terms(self.0.iter().filter(|(k, _)| keep(k)).cloned().collect())
    }
}

#[inline]
pub(crate) fn accumulate<K: Hash + Eq>(map: &mut FxHashMap<K, Q>, key: K, q: Q) {
    match map.entry(key) {
        std::collections::hash_map::Entry::Occupied(mut e) => {
            *e.get_mut() += q;
        }
        std::collections::hash_map::Entry::Vacant(e) => {
            e.insert(q);
        }
    }
}

pub(crate) fn int(v: i64) -> Q {
    Q::from_integer(v.into())
}

pub(crate) fn ratio(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

//! Total spectrum with degeneracies, assembled from the two radial components
//! and the hyperspherical multiplicities.

use crate::radial::{closed_form, ComponentSpec, RadialError};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

type Q = BigRational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LevelsError {
    #[error("invalid partition (N, n) = ({total}, {first})")]
    InvalidPartition { total: usize, first: usize },
    #[error("cutoff {cutoff} is below the ground energy {ground}")]
    CutoffBelowGround { cutoff: f64, ground: f64 },
    #[error(transparent)]
    Radial(#[from] RadialError),
}

/// Number of independent degree-`l` harmonic polynomials in `m` variables.
///
/// For `m = 1` these are `1` and `x`, one each for `l = 0, 1`.
pub fn dim_harm(m: usize, l: u32) -> u64 {
    match m {
        0 => 0,
        1 => u64::from(l <= 1),
        2 => {
            if l == 0 {
                1
            } else {
                2
            }
        }
        _ => {
            // (2l + m - 2) (l + m - 3)! / (l! (m - 2)!)
            let binom = binomial(l as u64 + m as u64 - 3, m as u64 - 3);
            (2 * l as u64 + m as u64 - 2) * binom / (m as u64 - 2)
        }
    }
}

/// `C(n, k)`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// One way of reaching a level: radial numbers and angular numbers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Contributor {
    pub n1: u32,
    pub n2: u32,
    pub l_n: u32,
    pub l_nn: u32,
}

impl Contributor {
    pub fn p(&self) -> u32 {
        self.n1 + self.n2
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Level {
    pub energy: f64,
    pub energy_over_hbar_omega: f64,
    pub contributors: Vec<Contributor>,
    pub degeneracy: u64,
    /// More than one `(l_n, l_Nn)` pair merged into this level.
    pub accidental: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelTable {
    pub total: usize,
    pub first: usize,
    pub c1: String,
    pub c2: String,
    pub hbar: String,
    pub omega: String,
    pub cutoff: f64,
    pub levels: Vec<Level>,
}

/// CSV row: one per `(level, p, l_n, l_Nn)`, carrying the level degeneracy.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelRow {
    #[serde(rename = "E_over_hbar_omega")]
    pub energy_over_hbar_omega: f64,
    pub p: u32,
    pub l_n: u32,
    #[serde(rename = "l_Nn")]
    pub l_nn: u32,
    pub degeneracy: u64,
}

impl LevelTable {
    pub fn rows(&self) -> Vec<LevelRow> {
        let mut rows = Vec::new();
        for level in &self.levels {
            let mut keys: Vec<(u32, u32, u32)> = level.contributors.iter().map(|c| (c.p(), c.l_n, c.l_nn)).collect();
            keys.dedup();
            for (p, l_n, l_nn) in keys {
                rows.push(LevelRow {
                    energy_over_hbar_omega: level.energy_over_hbar_omega,
                    p,
                    l_n,
                    l_nn,
                    degeneracy: level.degeneracy,
                });
            }
        }
        rows
    }
}

const MERGE_TOL: f64 = 1e-9;

fn max_angular(m: usize, bound: u32) -> u32 {
    if m == 1 {
        bound.min(1)
    } else {
        bound
    }
}

/// All `(N1, N2, l_n, l_Nn)` with `E <= cutoff`, grouped into levels whose
/// energies agree within `1e-9` relative. `cutoff` is an energy, not a
/// multiple of `hbar omega`.
pub fn enumerate_levels(
    total: usize,
    first: usize,
    c1: &Q,
    c2: &Q,
    hbar: &Q,
    omega: &Q,
    cutoff: f64,
) -> Result<LevelTable, LevelsError> {
    if total < 2 || first < 1 || first >= total {
        return Err(LevelsError::InvalidPartition { total, first });
    }
    let second = total - first;
    let hw = crate::radial::to_f64(&(hbar * omega));
    let ground = {
        let a = closed_form(&ComponentSpec::new(first, c1.clone(), 0, hbar.clone(), omega.clone())?, 0);
        let b = closed_form(&ComponentSpec::new(second, c2.clone(), 0, hbar.clone(), omega.clone())?, 0);
        a.energy + b.energy
    };
    if cutoff < ground * (1.0 - MERGE_TOL) {
        return Err(LevelsError::CutoffBelowGround { cutoff, ground });
    }
    // alpha >= l + (m - 2)/2, so E >= hbar omega (2p + l_n + l_Nn + N/2)
    let budget = ((cutoff / hw - total as f64 / 2.0).floor().max(0.0) as u32) + 1;

    let entries: Vec<(f64, Contributor)> = (0..=max_angular(first, budget))
        .into_par_iter()
        .map(|l_n| -> Result<Vec<(f64, Contributor)>, LevelsError> {
            let mut out = Vec::new();
            let s1 = ComponentSpec::new(first, c1.clone(), l_n, hbar.clone(), omega.clone())?;
            for l_nn in 0..=max_angular(second, budget) {
                let s2 = ComponentSpec::new(second, c2.clone(), l_nn, hbar.clone(), omega.clone())?;
                for n1 in 0..=budget {
                    let e1 = closed_form(&s1, n1).energy;
                    for n2 in 0..=budget {
                        let e = e1 + closed_form(&s2, n2).energy;
                        if e > cutoff * (1.0 + MERGE_TOL) {
                            break;
                        }
                        out.push((e, Contributor { n1, n2, l_n, l_nn }));
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();

    let mut entries = entries;
    entries.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut levels: Vec<Level> = Vec::new();
    for (e, c) in entries {
        let dim = dim_harm(first, c.l_n) * dim_harm(second, c.l_nn);
        if dim == 0 {
            continue;
        }
        match levels.last_mut() {
            Some(level) if (e - level.energy).abs() <= MERGE_TOL * level.energy.abs().max(hw) => {
                level.contributors.push(c);
                level.degeneracy += dim;
            }
            _ => levels.push(Level {
                energy: e,
                energy_over_hbar_omega: e / hw,
                contributors: vec![c],
                degeneracy: dim,
                accidental: false,
            }),
        }
    }
    for level in &mut levels {
        level.contributors.sort_by_key(|c| (c.p(), c.l_n, c.l_nn, c.n1));
        let mut pairs: Vec<(u32, u32)> = level.contributors.iter().map(|c| (c.l_n, c.l_nn)).collect();
        pairs.sort();
        pairs.dedup();
        level.accidental = pairs.len() > 1;
    }
    Ok(LevelTable {
        total,
        first,
        c1: c1.to_string(),
        c2: c2.to_string(),
        hbar: hbar.to_string(),
        omega: omega.to_string(),
        cutoff,
        levels,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountRow {
    pub first: usize,
    pub l: u32,
    /// `hbar omega (l + N/2)` reproduced exactly by every contributor.
    pub energy_ok: bool,
    pub count: u64,
    pub expected: u64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountReport {
    pub total: usize,
    pub l_max: u32,
    pub rows: Vec<CountRow>,
    pub all_ok: bool,
}

/// At zero coupling, for each partition and each `l <= l_max`:
/// `sum_{2p + l_n + l_Nn = l} (p + 1) dim(n, l_n) dim(N - n, l_Nn) = C(l + N - 1, N - 1)`,
/// with every contributing energy exactly `hbar omega (l + N/2)` for `hbar = omega = 1`.
pub fn oscillator_count_check(total: usize, l_max: u32) -> Result<CountReport, LevelsError> {
    if total < 2 {
        return Err(LevelsError::InvalidPartition { total, first: 0 });
    }
    let one = Q::one();
    let zero = Q::zero();
    let mut rows = Vec::new();
    for first in 1..total {
        let second = total - first;
        for l in 0..=l_max {
            let mut count = 0u64;
            let mut energy_ok = true;
            for p in 0..=l / 2 {
                for l_n in 0..=(l - 2 * p) {
                    let l_nn = l - 2 * p - l_n;
                    let dim = dim_harm(first, l_n) * dim_harm(second, l_nn);
                    if dim == 0 {
                        continue;
                    }
                    count += (p as u64 + 1) * dim;
                    let want = Q::from_integer((2 * l as i64 + total as i64).into()) / Q::from_integer(2.into());
                    for n1 in 0..=p {
                        let s1 = ComponentSpec::new(first, zero.clone(), l_n, one.clone(), one.clone())?;
                        let s2 = ComponentSpec::new(second, zero.clone(), l_nn, one.clone(), one.clone())?;
                        let e = closed_form(&s1, n1).energy_exact().zip(closed_form(&s2, p - n1).energy_exact());
                        energy_ok &= e.map(|(a, b)| a + b) == Some(want.clone());
                    }
                }
            }
            let expected = binomial(l as u64 + total as u64 - 1, total as u64 - 1);
            rows.push(CountRow { first, l, energy_ok, count, expected, ok: energy_ok && count == expected });
        }
    }
    let all_ok = rows.iter().all(|r| r.ok);
    Ok(CountReport { total, l_max, rows, all_ok })
}

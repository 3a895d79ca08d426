//! Exact symbolic operator algebra for the double singular oscillator.
//!
//! Quantum integrals live in [`DiffOp`] (normal-ordered differential
//! operators whose coefficients are [`LaurentCoeff`] values over the
//! symbolic parameters); classical integrals live in [`PhaseFn`]. The
//! verification suites in [`verify`] build the generators for a concrete
//! `(N, n)` and check each algebra relation as an exact zero.

mod diffop;
mod generators;
mod laurent;
pub mod mono;
mod phase;
mod scalar;
mod terms;
pub mod verify;

pub use diffop::{anticommutator, commutator, op_mul, DiffOp};
pub use generators::{build_classical, build_quantum, ClassicalGenerators, QuantumGenerators};
pub use laurent::{clear_caches, LaurentCoeff, LaurentFraction};
pub use mono::{Mono, MultiIndex};
pub use phase::{classical_limit, poisson_bracket, PhaseFn};
pub use scalar::{ParamScalar, ParamValues};
pub use verify::{
    verify_q3, verify_q3_with, verify_qp3, verify_qp3_with, CheckMode, ClassicalWorkspace,
    Constants, Q3Constants, Q3Workspace, QP3Constants,
};

use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("operands built for different dimensions: {left} vs {right}")]
    DimensionMismatch { left: Dims, right: Dims },
    #[error("invalid partition (N, n) = ({total}, {first}): need 2 <= N <= {max} and 1 <= n <= N - 1")]
    InvalidPartition { total: usize, first: usize, max: usize },
    #[error("classical limit of order {order} at hbar shift {shift} is not real")]
    NotReal { order: u32, shift: u32 },
}

/// The partition `(N, n)`: coordinates `x_1..x_n` form the first block and
/// `x_{n+1}..x_N` the second.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Dims {
    total: u8,
    first: u8,
}

impl Dims {
    pub fn new(total: usize, first: usize) -> Result<Dims, AlgebraError> {
        if total < 2 || total > mono::MAX_DIM || first < 1 || first >= total {
            return Err(AlgebraError::InvalidPartition {
                total,
                first,
                max: mono::MAX_DIM,
            });
        }
        Ok(Dims { total: total as u8, first: first as u8 })
    }

    /// `N`.
    pub fn total(self) -> usize {
        self.total as usize
    }

    /// `n`.
    pub fn first(self) -> usize {
        self.first as usize
    }

    /// `N - n`.
    pub fn second(self) -> usize {
        (self.total - self.first) as usize
    }

    /// Index pairs `i < j` inside the first block (the `J_ij`).
    pub fn first_pairs(self) -> Vec<(usize, usize)> {
        pairs(0, self.first())
    }

    /// Index pairs `i < j` inside the second block (the `K_ij`).
    pub fn second_pairs(self) -> Vec<(usize, usize)> {
        pairs(self.first(), self.total())
    }
}

fn pairs(lo: usize, hi: usize) -> Vec<(usize, usize)> {
    (lo..hi)
        .flat_map(|i| (i + 1..hi).map(move |j| (i, j)))
        .collect()
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.total, self.first)
    }
}

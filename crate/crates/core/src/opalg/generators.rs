//! The Hamiltonian and its integrals, as operators and as phase-space functions.

use super::diffop::DiffOp;
use super::laurent::LaurentCoeff;
use super::mono::MultiIndex;
use super::phase::PhaseFn;
use super::scalar::ParamScalar;
use super::terms::{int, ratio};
use super::{AlgebraError, Dims};
use std::ops::Range;

/// Quantum generators for one partition `(N, n)`.
///
/// `j` and `k` hold the real operators `hbar (x_i d_j - x_j d_i)`, so the
/// Hermitian angular momentum is `-i` times the stored operator and
/// `J2 = -sum j_ij^2`.
#[derive(Clone, Debug)]
pub struct QuantumGenerators {
    pub dims: Dims,
    pub h: DiffOp,
    pub a: DiffOp,
    pub b: DiffOp,
    /// `B` with the `c2/r2^2` term entering with a plus sign.
    pub b_as_printed: DiffOp,
    pub j: Vec<((usize, usize), DiffOp)>,
    pub k: Vec<((usize, usize), DiffOp)>,
    pub j2: DiffOp,
    pub k2: DiffOp,
}

#[derive(Clone, Debug)]
pub struct ClassicalGenerators {
    pub dims: Dims,
    pub h: PhaseFn,
    pub a: PhaseFn,
    pub b: PhaseFn,
    pub b_as_printed: PhaseFn,
    pub j: Vec<((usize, usize), PhaseFn)>,
    pub k: Vec<((usize, usize), PhaseFn)>,
    pub j2: PhaseFn,
    pub k2: PhaseFn,
}

fn hbar_sq() -> ParamScalar {
    ParamScalar::hbar().pow(2)
}

fn omega_sq() -> ParamScalar {
    ParamScalar::omega().pow(2)
}

fn second_partial(i: usize, j: usize) -> MultiIndex {
    MultiIndex::unit(i).add(MultiIndex::unit(j))
}

fn laplacian(dims: Dims, range: Range<usize>) -> DiffOp {
    range.fold(DiffOp::zero(dims), |acc, i| {
        &acc + &DiffOp::term(LaurentCoeff::one(dims), second_partial(i, i))
    })
}

/// `-(hbar^2/2) sum_{i in range} d_i^2 + (omega^2/2) sum x_i^2 + c/(sum x_i^2)`.
fn block_hamiltonian(dims: Dims, range: Range<usize>, first: bool, coupling: ParamScalar) -> DiffOp {
    let kinetic = laplacian(dims, range).mul_scalar(&hbar_sq().scale(&ratio(-1, 2)));
    let (radius, inv) = if first {
        (LaurentCoeff::r1_sq(dims), LaurentCoeff::inv_r1_sq(dims))
    } else {
        (LaurentCoeff::r2_sq(dims), LaurentCoeff::inv_r2_sq(dims))
    };
    let potential = radius
        .mul_scalar(&omega_sq().scale(&ratio(1, 2)))
        .add(&inv.mul_scalar(&coupling));
    &kinetic + &DiffOp::multiplication(potential)
}

fn angular(dims: Dims, i: usize, j: usize) -> DiffOp {
    let hbar = LaurentCoeff::scalar(dims, &ParamScalar::hbar());
    let xi = LaurentCoeff::x(dims, i).mul(&hbar);
    let xj = LaurentCoeff::x(dims, j).mul(&hbar);
    &DiffOp::term(xi, MultiIndex::unit(j)) - &DiffOp::term(xj, MultiIndex::unit(i))
}

fn minus_sum_of_squares(dims: Dims, ops: &[((usize, usize), DiffOp)]) -> DiffOp {
    ops.iter().fold(DiffOp::zero(dims), |acc, (_, op)| &acc - &(op * op))
}

/// Builds `H`, `A`, `B` and the angular generators as differential operators.
pub fn build_quantum(total: usize, first: usize) -> Result<QuantumGenerators, AlgebraError> {
    let dims = Dims::new(total, first)?;
    let n = dims.first();
    let big_n = dims.total();
    let h1 = block_hamiltonian(dims, 0..n, true, ParamScalar::c1());
    let h2 = block_hamiltonian(dims, n..big_n, false, ParamScalar::c2());
    let h2_flipped = block_hamiltonian(dims, n..big_n, false, -ParamScalar::c2());
    let h = &h1 + &h2;
    let b = &h1 - &h2;
    let b_as_printed = &h1 - &h2_flipped;

    let mut kinetic = DiffOp::zero(dims);
    for i in 0..big_n {
        for j in 0..big_n {
            let xi2 = LaurentCoeff::x(dims, i).mul(&LaurentCoeff::x(dims, i));
            kinetic = &kinetic + &DiffOp::term(xi2, second_partial(j, j));
            let xixj = LaurentCoeff::x(dims, i).mul(&LaurentCoeff::x(dims, j));
            kinetic = &kinetic - &DiffOp::term(xixj, second_partial(i, j));
        }
        let xi = LaurentCoeff::x(dims, i).scale(&int(-(big_n as i64 - 1)));
        kinetic = &kinetic + &DiffOp::term(xi, MultiIndex::unit(i));
    }
    let potential = LaurentCoeff::r_sq(dims)
        .mul(
            &LaurentCoeff::inv_r1_sq(dims)
                .mul_scalar(&ParamScalar::c1())
                .add(&LaurentCoeff::inv_r2_sq(dims).mul_scalar(&ParamScalar::c2())),
        )
        .scale(&ratio(1, 2));
    let a = &kinetic.mul_scalar(&hbar_sq().scale(&ratio(-1, 4))) + &DiffOp::multiplication(potential);

    let j: Vec<_> = dims.first_pairs().into_iter().map(|(p, q)| ((p, q), angular(dims, p, q))).collect();
    let k: Vec<_> = dims.second_pairs().into_iter().map(|(p, q)| ((p, q), angular(dims, p, q))).collect();
    let j2 = minus_sum_of_squares(dims, &j);
    let k2 = minus_sum_of_squares(dims, &k);
    Ok(QuantumGenerators { dims, h, a, b, b_as_printed, j, k, j2, k2 })
}

fn sum_sq(dims: Dims, range: Range<usize>, f: impl Fn(Dims, usize) -> PhaseFn) -> PhaseFn {
    range.fold(PhaseFn::zero(dims), |acc, i| {
        let v = f(dims, i);
        &acc + &(&v * &v)
    })
}

fn classical_block(dims: Dims, range: Range<usize>, first: bool, coupling: ParamScalar) -> PhaseFn {
    let half = ratio(1, 2);
    let kinetic = sum_sq(dims, range.clone(), PhaseFn::p).scale(&half);
    let radius = sum_sq(dims, range, PhaseFn::x).mul_scalar(&omega_sq().scale(&half));
    let inv = if first { LaurentCoeff::inv_r1_sq(dims) } else { LaurentCoeff::inv_r2_sq(dims) };
    &(&kinetic + &radius) + &PhaseFn::from_coeff(&inv.mul_scalar(&coupling))
}

fn classical_angular(dims: Dims, i: usize, j: usize) -> PhaseFn {
    &(&PhaseFn::x(dims, i) * &PhaseFn::p(dims, j)) - &(&PhaseFn::x(dims, j) * &PhaseFn::p(dims, i))
}

/// Builds the classical generators as functions on phase space.
pub fn build_classical(total: usize, first: usize) -> Result<ClassicalGenerators, AlgebraError> {
    let dims = Dims::new(total, first)?;
    let n = dims.first();
    let big_n = dims.total();
    let h1 = classical_block(dims, 0..n, true, ParamScalar::c1());
    let h2 = classical_block(dims, n..big_n, false, ParamScalar::c2());
    let h2_flipped = classical_block(dims, n..big_n, false, -ParamScalar::c2());
    let h = &h1 + &h2;
    let b = &h1 - &h2;
    let b_as_printed = &h1 - &h2_flipped;

    let x2 = sum_sq(dims, 0..big_n, PhaseFn::x);
    let p2 = sum_sq(dims, 0..big_n, PhaseFn::p);
    let xp = (0..big_n).fold(PhaseFn::zero(dims), |acc, i| {
        &acc + &(&PhaseFn::x(dims, i) * &PhaseFn::p(dims, i))
    });
    let potential = LaurentCoeff::r_sq(dims)
        .mul(
            &LaurentCoeff::inv_r1_sq(dims)
                .mul_scalar(&ParamScalar::c1())
                .add(&LaurentCoeff::inv_r2_sq(dims).mul_scalar(&ParamScalar::c2())),
        )
        .scale(&ratio(1, 2));
    let a = &(&(&x2 * &p2) - &(&xp * &xp)).scale(&ratio(1, 4)) + &PhaseFn::from_coeff(&potential);

    let j: Vec<_> = dims
        .first_pairs()
        .into_iter()
        .map(|(p, q)| ((p, q), classical_angular(dims, p, q)))
        .collect();
    let k: Vec<_> = dims
        .second_pairs()
        .into_iter()
        .map(|(p, q)| ((p, q), classical_angular(dims, p, q)))
        .collect();
    let square_sum = |ops: &[((usize, usize), PhaseFn)]| {
        ops.iter().fold(PhaseFn::zero(dims), |acc, (_, f)| &acc + &(f * f))
    };
    let j2 = square_sum(&j);
    let k2 = square_sum(&k);
    Ok(ClassicalGenerators { dims, h, a, b, b_as_printed, j, k, j2, k2 })
}

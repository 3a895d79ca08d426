//! Finite-volume radial eigensolver.
//!
//! The unknown is `g` in `R = r^s g`, with `s` the regular root of the
//! indicial equation `s^2 + (m-2) s = 2c' + l(l+m-2)`. The radial operator
//! then becomes `-(1/2) r^-beta (r^beta g')' + omega'^2 r^2 / 2 g` with
//! `beta = 2s + m - 1`, discretized on `M` cells of width `h = r_max / M`
//! with exact cell integrals of the weights. The generalized problem is
//! symmetrized and solved by Sturm bisection; eigenvectors come from inverse
//! iteration. Three grid levels are combined by Richardson extrapolation.

use super::{closed_form, to_f64, ComponentSpec, RadialError};
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

/// One grid: `nodes` cells on `(0, r_max)`, second order, at `level`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub nodes: usize,
    pub r_max: f64,
    pub order: u32,
    pub level: u32,
}

impl GridSpec {
    pub fn new(nodes: usize, r_max: f64, level: u32) -> Self {
        GridSpec { nodes, r_max, order: 2, level }
    }

    pub fn h(&self) -> f64 {
        self.r_max / self.nodes as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FdOptions {
    pub base_nodes: usize,
    pub levels: u32,
    /// Overrides the automatic cutoff.
    pub r_max: Option<f64>,
}

impl Default for FdOptions {
    fn default() -> Self {
        FdOptions { base_nodes: 512, levels: 3, r_max: None }
    }
}

/// Eigenvalues on one grid level.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FdLevel {
    pub grid: GridSpec,
    pub h: f64,
    pub eigenvalues: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FdResult {
    pub m: usize,
    pub l: u32,
    pub half_line: bool,
    pub frobenius_exponent: f64,
    pub r_max: f64,
    /// Extrapolated energies `E = hbar^2 E'`.
    pub eigenvalues: Vec<f64>,
    /// `|extrapolated - finest|` per eigenvalue.
    pub extrapolation_shift: Vec<f64>,
    pub levels: Vec<FdLevel>,
    /// Sign changes of each eigenvector on the finest grid.
    pub sign_changes: Vec<usize>,
}

/// The larger root of `s^2 + (m-2) s - q = 0`, `q = 2c' + l(l+m-2)`; without
/// coupling the parity-consistent root `s = l`.
pub fn frobenius_exponent(spec: &ComponentSpec) -> f64 {
    if spec.c.is_zero() {
        return spec.l as f64;
    }
    let m = spec.m as f64;
    let q = 2.0 * to_f64(&spec.c_reduced()) + spec.angular_eigenvalue() as f64;
    (-(m - 2.0) + ((m - 2.0).powi(2) + 4.0 * q).sqrt()) / 2.0
}

/// Symmetric tridiagonal `(diag, off)` and the cell masses.
struct Discretization {
    diag: Vec<f64>,
    off: Vec<f64>,
    mass: Vec<f64>,
}

fn discretize(spec: &ComponentSpec, grid: &GridSpec) -> Discretization {
    let n = grid.nodes;
    let h = grid.h();
    let w = to_f64(&spec.omega_reduced());
    let beta = 2.0 * frobenius_exponent(spec) + spec.m as f64 - 1.0;
    let edge = |i: usize| i as f64 * h;
    let weight = |i: usize| if i == 0 { 0.0 } else { edge(i).powf(beta) };
    let cell = |i: usize, p: f64| (edge(i + 1).powf(p) - edge(i).powf(p)) / p;
    let mut mass = Vec::with_capacity(n);
    let mut diag = Vec::with_capacity(n);
    for i in 0..n {
        let m = cell(i, beta + 1.0);
        let pot = w * w / 2.0 * cell(i, beta + 3.0);
        let mut d = (weight(i) + weight(i + 1)) / (2.0 * h) + pot;
        if i == n - 1 {
            // Dirichlet ghost beyond r_max
            d += weight(n) / (2.0 * h);
        }
        mass.push(m);
        diag.push(d);
    }
    let off = (0..n - 1).map(|i| -weight(i + 1) / (2.0 * h) / (mass[i] * mass[i + 1]).sqrt()).collect();
    let diag = diag.iter().zip(&mass).map(|(d, m)| d / m).collect();
    Discretization { diag, off, mass }
}

/// Number of eigenvalues below `x`.
fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..diag.len() {
        let coupling = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] / q };
        q = diag[i] - x - coupling;
        if q == 0.0 {
            q = -f64::EPSILON * (diag[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn bisect(diag: &[f64], off: &[f64], k: usize, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Solves `T x = b` for tridiagonal `T` with partial pivoting.
fn tridiagonal_solve(sub: &[f64], diag: &[f64], sup: &[f64], b: &mut [f64]) {
    let n = diag.len();
    let (mut dl, mut d, mut du) = (sub.to_vec(), diag.to_vec(), sup.to_vec());
    let tiny = f64::EPSILON * d.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(f64::MIN_POSITIVE);
    for i in 0..n - 1 {
        if d[i].abs() >= dl[i].abs() {
            if d[i] == 0.0 {
                d[i] = tiny;
            }
            let fact = dl[i] / d[i];
            d[i + 1] -= fact * du[i];
            b[i + 1] -= fact * b[i];
            dl[i] = 0.0;
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            let temp = d[i + 1];
            d[i + 1] = du[i] - fact * temp;
            if i + 2 < n {
                dl[i] = du[i + 1];
                du[i + 1] = -fact * dl[i];
            } else {
                dl[i] = 0.0;
            }
            du[i] = temp;
            let tb = b[i];
            b[i] = b[i + 1];
            b[i + 1] = tb - fact * b[i + 1];
        }
    }
    if d[n - 1] == 0.0 {
        d[n - 1] = tiny;
    }
    b[n - 1] /= d[n - 1];
    if n > 1 {
        b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        b[i] = (b[i] - du[i] * b[i + 1] - dl[i] * b[i + 2]) / d[i];
    }
}

fn inverse_iteration(diag: &[f64], off: &[f64], lambda: f64) -> Vec<f64> {
    let n = diag.len();
    let shifted: Vec<f64> = diag.iter().map(|d| d - lambda).collect();
    // deterministic, non-degenerate start
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i as f64) * 0.618).sin()).collect();
    for _ in 0..4 {
        tridiagonal_solve(off, &shifted, off, &mut v);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
    }
    v
}

/// Sign changes in a sampled function, ignoring entries below `1e-9` of the
/// maximum modulus.
pub fn sign_changes(values: &[f64]) -> usize {
    let max = values.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let mut last = 0.0f64;
    let mut count = 0;
    for &v in values {
        if v.abs() <= 1e-9 * max {
            continue;
        }
        if last != 0.0 && v.signum() != last.signum() {
            count += 1;
        }
        last = v;
    }
    count
}

/// Lowest `count` energies on one grid, with the corresponding `g` vectors.
pub fn fd_solve(spec: &ComponentSpec, grid: &GridSpec, count: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>), RadialError> {
    check_grid(spec, grid, count)?;
    let disc = discretize(spec, grid);
    let (d, e) = (&disc.diag, &disc.off);
    let n = d.len();
    let radius = |i: usize| {
        let left = if i == 0 { 0.0 } else { e[i - 1].abs() };
        let right = if i + 1 < n { e[i].abs() } else { 0.0 };
        (d[i] - left - right, d[i] + left + right)
    };
    let (lo, hi) = (0..n).map(radius).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (l, h)| (a.min(l), b.max(h)));
    let hbar_sq = to_f64(&(&spec.hbar * &spec.hbar));
    let mut energies = Vec::with_capacity(count);
    let mut vectors = Vec::with_capacity(count);
    for k in 0..count {
        let lambda = bisect(d, e, k, lo, hi);
        let y = inverse_iteration(d, e, lambda);
        let g: Vec<f64> = y.iter().zip(&disc.mass).map(|(y, m)| y / m.sqrt()).collect();
        energies.push(lambda * hbar_sq);
        vectors.push(g);
    }
    Ok((energies, vectors))
}

fn top_energy_reduced(spec: &ComponentSpec, count: usize) -> f64 {
    let hbar_sq = to_f64(&(&spec.hbar * &spec.hbar));
    closed_form(spec, count as u32 - 1).energy / hbar_sq
}

fn check_grid(spec: &ComponentSpec, grid: &GridSpec, count: usize) -> Result<(), RadialError> {
    if count == 0 {
        return Err(RadialError::EmptyRequest);
    }
    if grid.nodes < 64 {
        return Err(RadialError::GridTooCoarse(format!("{} cells, need at least 64", grid.nodes)));
    }
    let e_top = top_energy_reduced(spec, count).max(0.0);
    let w = to_f64(&spec.omega_reduced());
    let turning = (2.0 * e_top).sqrt() / w;
    if grid.r_max <= turning {
        return Err(RadialError::CutoffBelowTurningPoint { r_max: grid.r_max, turning });
    }
    // at least 16 cells per local wavelength at the highest requested level
    let k = (2.0 * e_top).sqrt();
    if k > 0.0 && 2.0 * std::f64::consts::PI / (grid.h() * k) < 16.0 {
        return Err(RadialError::GridTooCoarse(format!(
            "h = {:.3e} does not resolve wavelength {:.3e}",
            grid.h(),
            2.0 * std::f64::consts::PI / k
        )));
    }
    Ok(())
}

/// `max(2 sqrt(2E') / omega', sqrt(2E' + 80 omega') / omega')` for the
/// highest requested level.
pub fn default_r_max(spec: &ComponentSpec, count: usize) -> f64 {
    let e = top_energy_reduced(spec, count).max(0.0);
    let w = to_f64(&spec.omega_reduced());
    (2.0 * (2.0 * e).sqrt() / w).max((2.0 * e + 80.0 * w).sqrt() / w)
}

/// Richardson table for errors in `h^2, h^4, ...` with `h` halving per level.
fn richardson(values: &[f64]) -> f64 {
    let mut table = values.to_vec();
    let mut factor = 4.0;
    for k in 1..table.len() {
        for i in (k..table.len()).rev() {
            table[i] = table[i] + (table[i] - table[i - 1]) / (factor - 1.0);
        }
        factor *= 4.0;
    }
    *table.last().expect("at least one level")
}

pub fn fd_eigenvalues(spec: &ComponentSpec, count: usize) -> Result<FdResult, RadialError> {
    fd_eigenvalues_with(spec, count, &FdOptions::default())
}

pub fn fd_eigenvalues_with(spec: &ComponentSpec, count: usize, opts: &FdOptions) -> Result<FdResult, RadialError> {
    if count == 0 {
        return Err(RadialError::EmptyRequest);
    }
    let r_max = opts.r_max.unwrap_or_else(|| default_r_max(spec, count));
    let grids: Vec<GridSpec> =
        (0..opts.levels.max(1)).map(|lv| GridSpec::new(opts.base_nodes << lv, r_max, lv)).collect();
    let solved = grids
        .par_iter()
        .map(|g| fd_solve(spec, g, count).map(|(e, v)| (g.clone(), e, v)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut levels = Vec::with_capacity(solved.len());
    let mut finest_vectors = Vec::new();
    for (grid, energies, vectors) in solved {
        levels.push(FdLevel { h: grid.h(), grid, eigenvalues: energies });
        finest_vectors = vectors;
    }
    let eigenvalues: Vec<f64> = (0..count)
        .map(|k| richardson(&levels.iter().map(|lv| lv.eigenvalues[k]).collect::<Vec<_>>()))
        .collect();
    let finest = &levels.last().expect("at least one level").eigenvalues;
    let extrapolation_shift = eigenvalues.iter().zip(finest).map(|(a, b)| (a - b).abs()).collect();
    Ok(FdResult {
        m: spec.m,
        l: spec.l,
        half_line: spec.half_line(),
        frobenius_exponent: frobenius_exponent(spec),
        r_max,
        eigenvalues,
        extrapolation_shift,
        levels,
        sign_changes: finest_vectors.iter().map(|v| sign_changes(v)).collect(),
    })
}

//! Exact checks of the quadratic algebra, its Casimir and the rotation algebras.

use super::diffop::{anticommutator, commutator, op_mul, DiffOp};
use super::generators::{build_classical, build_quantum, ClassicalGenerators, QuantumGenerators};
use super::laurent::LaurentCoeff;
use super::mono::Mono;
use super::phase::{classical_limit, poisson_bracket, PhaseFn};
use super::scalar::{ParamScalar, ParamValues};
use super::terms::{ratio, Q};
use super::{AlgebraError, Dims};
use crate::report::{CheckEntry, VerificationReport};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::sync::OnceLock;
use std::time::Instant;

/// How the symbolic parameters are treated during a check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckMode {
    /// `hbar, omega, c1, c2` stay indeterminates; a pass proves the identity.
    Symbolic,
    /// The parameters are replaced by random positive rationals at `points`
    /// independent draws. A nonzero polynomial of degree `d` vanishes at a
    /// random point of a set of size `S` with probability at most `d / S`.
    Sampled { seed: u64, points: usize },
}

impl CheckMode {
    pub fn label(&self) -> String {
        match self {
            CheckMode::Symbolic => "symbolic".into(),
            CheckMode::Sampled { seed, points } => format!("sampled(seed={seed},points={points})"),
        }
    }
}

/// Named structure constants of the right-hand sides.
///
/// Each relation is a linear combination of fixed products of generators;
/// the constants are exposed so that tests can perturb them and confirm the
/// checker notices.
#[derive(Clone, Debug, PartialEq)]
pub struct Constants {
    entries: BTreeMap<&'static str, ParamScalar>,
}

pub type Q3Constants = Constants;
pub type QP3Constants = Constants;

fn h2() -> ParamScalar {
    ParamScalar::hbar().pow(2)
}

fn h4() -> ParamScalar {
    ParamScalar::hbar().pow(4)
}

fn w2() -> ParamScalar {
    ParamScalar::omega().pow(2)
}

fn c1() -> ParamScalar {
    ParamScalar::c1()
}

fn c2() -> ParamScalar {
    ParamScalar::c2()
}

fn int(v: i64) -> ParamScalar {
    ParamScalar::int(v)
}

fn rat(n: i64, d: i64) -> ParamScalar {
    ParamScalar::ratio(n, d)
}

impl Constants {
    /// Constants of the quantum relations for `[A,C]` and `[B,C]`.
    pub fn q3(dims: Dims) -> Self {
        let big_n = dims.total() as i64;
        let n = dims.first() as i64;
        let mut e = BTreeMap::new();
        e.insert("ac.anti_ab", h2() * int(2));
        e.insert("ac.j2h", -h2());
        e.insert("ac.k2h", h2());
        let bracket = &(&(c1() * int(8)) - &(c2() * int(8))) - &(h2() * int((big_n - 4) * (big_n - 2 * n)));
        e.insert("ac.h", -(h2() * rat(1, 4) * bracket));
        e.insert("ac.b", h4() * rat(big_n * (big_n - 4), 4));
        e.insert("bc.b2", h2() * int(-2));
        e.insert("bc.h2", h2() * int(2));
        e.insert("bc.a", h2() * w2() * int(-16));
        e.insert("bc.j2", h2() * w2() * int(4));
        e.insert("bc.k2", h2() * w2() * int(4));
        let inner = &(&c1() + &c2()) - &(h2() * rat(n * (big_n - n), 4));
        e.insert("bc.const", h2() * w2() * int(8) * inner);
        Constants { entries: e }
    }

    /// Constants of the classical relations for `{A,C}` and `{B,C}`.
    pub fn qp3() -> Self {
        let mut e = BTreeMap::new();
        e.insert("ac.ab", int(-4));
        e.insert("ac.j2h", int(1));
        e.insert("ac.k2h", int(-1));
        e.insert("ac.h", (&c1() - &c2()) * int(2));
        e.insert("bc.b2", int(2));
        e.insert("bc.h2", int(-2));
        e.insert("bc.a", w2() * int(16));
        e.insert("bc.j2", w2() * int(-4));
        e.insert("bc.k2", w2() * int(-4));
        e.insert("bc.const", w2() * (&c1() + &c2()) * int(-8));
        Constants { entries: e }
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.keys().copied()
    }

    pub fn get(&self, name: &str) -> &ParamScalar {
        self.entries.get(name).unwrap_or_else(|| panic!("unknown structure constant {name}"))
    }

    /// A copy with `name` shifted by `delta`.
    pub fn perturbed(&self, name: &str, delta: &ParamScalar) -> Self {
        let mut out = self.clone();
        let slot = out
            .entries
            .iter_mut()
            .find(|(k, _)| **k == name)
            .unwrap_or_else(|| panic!("unknown structure constant {name}"))
            .1;
        *slot = &*slot + delta;
        out
    }

    fn at(&self, name: &str, values: Option<&ParamValues>) -> ParamScalar {
        specialize(self.get(name), values)
    }
}

fn specialize(p: &ParamScalar, values: Option<&ParamValues>) -> ParamScalar {
    match values {
        Some(v) => ParamScalar::constant(p.eval(v)),
        None => p.clone(),
    }
}

fn random_values(rng: &mut ChaCha8Rng) -> ParamValues {
    let mut draw = || {
        let n: i64 = rng.gen_range(1..=1_000_003);
        let d: i64 = rng.gen_range(1..=9_973);
        Q::new(BigInt::from(n), BigInt::from(d))
    };
    ParamValues { hbar: draw(), omega: draw(), c1: draw(), c2: draw() }
}

/// Structure constant `[S_ij, S_kl]` of the stored real rotation generators:
/// `-hbar (d_ik S_jl + d_jl S_ik - d_il S_jk - d_jk S_il)`.
fn rotation_rhs<T: Clone>(
    get: &dyn Fn(usize, usize) -> Option<(T, bool)>,
    (i, j): (usize, usize),
    (k, l): (usize, usize),
) -> Vec<(T, i64)> {
    let mut out = Vec::new();
    let mut push = |a: usize, b: usize, s: i64| {
        if let Some((op, neg)) = get(a, b) {
            out.push((op, if neg { -s } else { s }));
        }
    };
    if i == k {
        push(j, l, 1);
    }
    if j == l {
        push(i, k, 1);
    }
    if i == l {
        push(j, k, -1);
    }
    if j == k {
        push(i, l, -1);
    }
    out
}

fn pair_lookup<T: Clone>(list: &[((usize, usize), T)]) -> impl Fn(usize, usize) -> Option<(T, bool)> + '_ {
    move |a, b| {
        if a == b {
            return None;
        }
        let (lo, hi, neg) = if a < b { (a, b, false) } else { (b, a, true) };
        list.iter().find(|(ij, _)| *ij == (lo, hi)).map(|(_, op)| (op.clone(), neg))
    }
}

fn timed(f: impl FnOnce() -> CheckEntry) -> CheckEntry {
    let start = Instant::now();
    let mut e = f();
    e.wall_time = start.elapsed();
    e
}

fn combine(
    dims: Dims,
    terms: &[(ParamScalar, &DiffOp)],
) -> DiffOp {
    terms.iter().fold(DiffOp::zero(dims), |acc, (c, op)| &acc + &op.mul_scalar(c))
}

fn mul(a: &DiffOp, b: &DiffOp) -> DiffOp {
    op_mul(a, b).expect("generators share dimensions")
}

/// Cached products of the quantum generators, built on demand.
pub struct Q3Workspace {
    pub gens: QuantumGenerators,
    values: Option<ParamValues>,
    c: OnceLock<DiffOp>,
    ac: OnceLock<DiffOp>,
    bc: OnceLock<DiffOp>,
    anti_ab: OnceLock<DiffOp>,
    j2h: OnceLock<DiffOp>,
    k2h: OnceLock<DiffOp>,
    b2: OnceLock<DiffOp>,
    h2: OnceLock<DiffOp>,
}

impl Q3Workspace {
    pub fn new(total: usize, first: usize) -> Result<Self, AlgebraError> {
        Ok(Self::from_generators(build_quantum(total, first)?, None))
    }

    fn from_generators(gens: QuantumGenerators, values: Option<ParamValues>) -> Self {
        let gens = match &values {
            None => gens,
            Some(v) => {
                let s = |op: &DiffOp| op.substitute(v);
                let sub_list = |l: &[((usize, usize), DiffOp)]| l.iter().map(|(ij, op)| (*ij, s(op))).collect();
                QuantumGenerators {
                    dims: gens.dims,
                    h: s(&gens.h),
                    a: s(&gens.a),
                    b: s(&gens.b),
                    b_as_printed: s(&gens.b_as_printed),
                    j: sub_list(&gens.j),
                    k: sub_list(&gens.k),
                    j2: s(&gens.j2),
                    k2: s(&gens.k2),
                }
            }
        };
        Q3Workspace {
            gens,
            values,
            c: OnceLock::new(),
            ac: OnceLock::new(),
            bc: OnceLock::new(),
            anti_ab: OnceLock::new(),
            j2h: OnceLock::new(),
            k2h: OnceLock::new(),
            b2: OnceLock::new(),
            h2: OnceLock::new(),
        }
    }

    pub fn dims(&self) -> Dims {
        self.gens.dims
    }

    fn scalar(&self, p: ParamScalar) -> ParamScalar {
        specialize(&p, self.values.as_ref())
    }

    /// `C = [A, B]`.
    pub fn c(&self) -> &DiffOp {
        self.c.get_or_init(|| commutator(&self.gens.a, &self.gens.b).unwrap())
    }

    pub fn ac(&self) -> &DiffOp {
        self.ac.get_or_init(|| commutator(&self.gens.a, self.c()).unwrap())
    }

    pub fn bc(&self) -> &DiffOp {
        self.bc.get_or_init(|| commutator(&self.gens.b, self.c()).unwrap())
    }

    fn anti_ab(&self) -> &DiffOp {
        self.anti_ab.get_or_init(|| anticommutator(&self.gens.a, &self.gens.b).unwrap())
    }

    fn j2h(&self) -> &DiffOp {
        self.j2h.get_or_init(|| mul(&self.gens.j2, &self.gens.h))
    }

    fn k2h(&self) -> &DiffOp {
        self.k2h.get_or_init(|| mul(&self.gens.k2, &self.gens.h))
    }

    fn b2(&self) -> &DiffOp {
        self.b2.get_or_init(|| mul(&self.gens.b, &self.gens.b))
    }

    fn h2(&self) -> &DiffOp {
        self.h2.get_or_init(|| mul(&self.gens.h, &self.gens.h))
    }

    /// Right-hand side of the `[A,C]` relation.
    pub fn ac_rhs(&self, k: &Constants) -> DiffOp {
        let v = self.values.as_ref();
        let g = &self.gens;
        combine(
            self.dims(),
            &[
                (k.at("ac.anti_ab", v), self.anti_ab()),
                (k.at("ac.j2h", v), self.j2h()),
                (k.at("ac.k2h", v), self.k2h()),
                (k.at("ac.h", v), &g.h),
                (k.at("ac.b", v), &g.b),
            ],
        )
    }

    /// Right-hand side of the `[B,C]` relation.
    pub fn bc_rhs(&self, k: &Constants) -> DiffOp {
        let v = self.values.as_ref();
        let g = &self.gens;
        let one = DiffOp::identity(self.dims());
        combine(
            self.dims(),
            &[
                (k.at("bc.b2", v), self.b2()),
                (k.at("bc.h2", v), self.h2()),
                (k.at("bc.a", v), &g.a),
                (k.at("bc.j2", v), &g.j2),
                (k.at("bc.k2", v), &g.k2),
                (k.at("bc.const", v), &one),
            ],
        )
    }

    pub fn check_ac(&self, k: &Constants) -> CheckEntry {
        timed(|| {
            let r = self.ac().try_sub(&self.ac_rhs(k)).unwrap();
            CheckEntry::new("[A,C] relation", "q3.ac_relation", r.num_terms())
        })
    }

    pub fn check_bc(&self, k: &Constants) -> CheckEntry {
        timed(|| {
            let r = self.bc().try_sub(&self.bc_rhs(k)).unwrap();
            CheckEntry::new("[B,C] relation", "q3.bc_relation", r.num_terms())
        })
    }

    /// Terms of the cubic Casimir written in the generators, each a
    /// coefficient and an operator.
    pub fn casimir_terms(&self) -> Vec<(&'static str, ParamScalar, DiffOp)> {
        let d = self.dims();
        let big_n = d.total() as i64;
        let n = d.first() as i64;
        let g = &self.gens;
        let c = self.c();
        let b2 = self.b2();
        let hsq = self.h2();
        let products: Vec<(&'static str, Box<dyn Fn() -> DiffOp + Send + Sync + '_>)> = vec![
            ("C^2", Box::new(|| mul(c, c))),
            ("{A,B^2}", Box::new(|| anticommutator(&g.a, b2).unwrap())),
            ("B^2", Box::new(|| b2.clone())),
            ("J2 H B", Box::new(|| mul(self.j2h(), &g.b))),
            ("K2 H B", Box::new(|| mul(self.k2h(), &g.b))),
            ("H B", Box::new(|| mul(&g.h, &g.b))),
            ("A^2", Box::new(|| mul(&g.a, &g.a))),
            ("A", Box::new(|| g.a.clone())),
            ("J2 A", Box::new(|| mul(&g.j2, &g.a))),
            ("K2 A", Box::new(|| mul(&g.k2, &g.a))),
            ("H^2 A", Box::new(|| mul(hsq, &g.a))),
        ];
        let ops: Vec<(&'static str, DiffOp)> = products.par_iter().map(|(name, f)| (*name, f())).collect();
        let hb_const = &(&(c1() * int(8)) - &(c2() * int(8))) - &(h2() * int((big_n - 4) * (big_n - 2 * n)));
        let a_const = &(&c1() + &c2()) - &(h2() * rat(n * (big_n - n), 4));
        let coeffs = [
            int(1),
            h2() * int(-2),
            h4() * rat(16 - big_n * (big_n - 4), 4),
            h2() * int(2),
            h2() * int(-2),
            h2() * rat(1, 2) * hb_const,
            h2() * w2() * int(-16),
            h2() * w2() * int(16) * a_const,
            h2() * w2() * int(8),
            h2() * w2() * int(8),
            h2() * int(4),
        ];
        ops.into_iter().zip(coeffs).map(|((name, op), c)| (name, self.scalar(c), op)).collect()
    }

    /// Terms of the Casimir written in the central elements only.
    pub fn central_casimir_terms(&self) -> Vec<(&'static str, ParamScalar, DiffOp)> {
        let d = self.dims();
        let big_n = d.total() as i64;
        let n = d.first() as i64;
        let g = &self.gens;
        let hsq = self.h2();
        let products: Vec<(&'static str, Box<dyn Fn() -> DiffOp + Send + Sync + '_>)> = vec![
            ("J2 H^2", Box::new(|| mul(&g.j2, hsq))),
            ("K2 H^2", Box::new(|| mul(&g.k2, hsq))),
            ("H^2", Box::new(|| hsq.clone())),
            ("J2^2", Box::new(|| mul(&g.j2, &g.j2))),
            ("K2^2", Box::new(|| mul(&g.k2, &g.k2))),
            ("J2 K2", Box::new(|| mul(&g.j2, &g.k2))),
            ("J2", Box::new(|| g.j2.clone())),
            ("K2", Box::new(|| g.k2.clone())),
            ("1", Box::new(|| DiffOp::identity(d))),
        ];
        let ops: Vec<(&'static str, DiffOp)> = products.par_iter().map(|(name, f)| (*name, f())).collect();
        let cm = &c1() - &c2();
        let hw = h2() * w2();
        let h2_coeff = &(&(c1() * int(16)) + &(c2() * int(16)))
            - &(h2() * int(4 * (big_n - 4) - (big_n - 2 * n) * (big_n - 2 * n)));
        let j_coeff = &cm - &(h2() * rat((big_n - 4) * (big_n - n), 4));
        let k_coeff = &cm + &(h2() * rat(n * (big_n - 4), 4));
        let constant = &(&(&(&cm * &cm) - &(h2() * c1() * rat((big_n - n) * (big_n - 4), 2)))
            - &(h2() * c2() * rat(n * (big_n - 4), 2)))
            + &(h4() * rat(n * (big_n - n) * (big_n - 4), 4));
        let coeffs = [
            h2() * int(2),
            h2() * int(2),
            h2() * rat(1, 4) * h2_coeff,
            hw.clone(),
            hw.clone(),
            &hw * &int(-2),
            &hw * &int(4) * j_coeff,
            &hw * &int(-4) * k_coeff,
            &hw * &int(4) * constant,
        ];
        ops.into_iter().zip(coeffs).map(|((name, op), c)| (name, self.scalar(c), op)).collect()
    }

    fn casimir_entry(&self, report: &mut VerificationReport) -> CheckEntry {
        let (entry, note) = self.check_casimir(None);
        report.notes.extend(note);
        entry
    }

    /// Compares the generator and central-element forms of the Casimir.
    /// `perturb` shifts the coefficient of one named term of `K`. When the
    /// residual is a multiple of a single term, the entry passes with that
    /// term corrected and the correction is returned as a note.
    pub fn check_casimir(&self, perturb: Option<(&str, &ParamScalar)>) -> (CheckEntry, Option<String>) {
        let start = Instant::now();
        let (mut k_terms, k1_terms) = rayon::join(|| self.casimir_terms(), || self.central_casimir_terms());
        if let Some((name, delta)) = perturb {
            let slot = k_terms
                .iter_mut()
                .find(|t| t.0 == name)
                .unwrap_or_else(|| panic!("unknown Casimir term {name}"));
            slot.1 = &slot.1 + &self.scalar(delta.clone());
        }
        let d = self.dims();
        let sum = |ts: &[(&'static str, ParamScalar, DiffOp)]| {
            ts.iter().fold(DiffOp::zero(d), |acc, (_, c, op)| &acc + &op.mul_scalar(c))
        };
        let residual = &sum(&k_terms) - &sum(&k1_terms);
        let mut entry = CheckEntry::new("Casimir K = K1", "q3.casimir", residual.num_terms());
        let mut note = None;
        if !residual.is_zero() {
            let candidates = k_terms
                .iter()
                .map(|t| ("K", t))
                .chain(k1_terms.iter().map(|t| ("K1", t)));
            for (side, (name, coeff, op)) in candidates {
                if let Some(mu) = proportionality(&residual, op) {
                    let corrected = if side == "K" { coeff - &mu } else { coeff + &mu };
                    let msg = format!(
                        "Casimir: coefficient of {name} in {side} is {coeff}; the identity holds exactly with {corrected}"
                    );
                    entry.passed = true;
                    entry.detail = Some(format!("single-term correction: {msg}"));
                    note = Some(msg);
                    break;
                }
            }
        }
        entry.wall_time = start.elapsed();
        (entry, note)
    }
}

/// Finds `mu` with `residual = mu * op`, if it exists.
fn proportionality(residual: &DiffOp, op: &DiffOp) -> Option<ParamScalar> {
    let split = |c: &LaurentCoeff| {
        let mut by_spatial: BTreeMap<Mono, Vec<(Mono, Q)>> = BTreeMap::new();
        for (m, q) in c.terms() {
            by_spatial.entry(m.spatial()).or_default().push((m.params(), q.clone()));
        }
        by_spatial
    };
    let (beta, coeff) = op.iter().next()?;
    let groups = split(coeff);
    let target = split(&residual.coefficient(*beta));
    let (spatial, pivot) = groups.iter().find(|(_, ts)| ts.len() == 1)?;
    let (pm, pq) = &pivot[0];
    let mut mu = ParamScalar::zero();
    for (m, q) in target.get(spatial)? {
        let exps = m.param_exps();
        let pe = pm.param_exps();
        if exps.iter().zip(pe.iter()).any(|(a, b)| a < b) {
            return None;
        }
        let diff = [exps[0] - pe[0], exps[1] - pe[1], exps[2] - pe[2], exps[3] - pe[3]];
        mu = &mu + &ParamScalar::monomial(diff, q / pq);
    }
    (residual == &op.mul_scalar(&mu)).then_some(mu)
}

fn so_entries_quantum(g: &QuantumGenerators, hbar: &ParamScalar) -> Vec<CheckEntry> {
    let d = g.dims;
    let mut out = Vec::new();
    for (label, list, anchor) in [("so(n)", &g.j, "so_first"), ("so(N-n)", &g.k, "so_second")] {
        let get = pair_lookup(list);
        let brackets = timed(|| {
            let mut residual_terms = 0;
            for (a, sa) in list.iter() {
                for (b, sb) in list.iter() {
                    let lhs = commutator(sa, sb).unwrap();
                    let rhs = rotation_rhs(&get, *a, *b)
                        .into_iter()
                        .fold(DiffOp::zero(d), |acc, (op, s)| &acc + &op.mul_scalar(&(hbar * &int(-s))));
                    residual_terms += (&lhs - &rhs).num_terms();
                }
            }
            CheckEntry::new(&format!("{label} commutators"), &format!("{anchor}.brackets"), residual_terms)
        });
        let central = timed(|| {
            let mut residual_terms = 0;
            for (_, s) in list.iter() {
                residual_terms += commutator(&g.h, s).unwrap().num_terms();
                residual_terms += commutator(&g.j2, s).unwrap().num_terms();
                residual_terms += commutator(&g.k2, s).unwrap().num_terms();
            }
            CheckEntry::new(
                &format!("{label} generators commute with H, J2, K2"),
                &format!("{anchor}.central"),
                residual_terms,
            )
        });
        out.push(brackets);
        out.push(central);
    }
    out.push(timed(|| {
        let mut residual_terms = 0;
        for (_, a) in g.j.iter() {
            for (_, b) in g.k.iter() {
                residual_terms += commutator(a, b).unwrap().num_terms();
            }
        }
        CheckEntry::new("[J_ij, K_kl] = 0", "so_sectors.commute", residual_terms)
    }));
    out
}

fn quantum_entries(ws: &Q3Workspace, k: &Constants, report: &mut VerificationReport) -> Vec<CheckEntry> {
    let g = &ws.gens;
    let pairs: Vec<(&str, &str, &DiffOp, &DiffOp)> = vec![
        ("[H,A] = 0", "q3.h_a", &g.h, &g.a),
        ("[H,B] = 0", "q3.h_b", &g.h, &g.b),
        ("[H,J2] = 0", "q3.h_j2", &g.h, &g.j2),
        ("[H,K2] = 0", "q3.h_k2", &g.h, &g.k2),
        ("[A,J2] = 0", "q3.a_j2", &g.a, &g.j2),
        ("[A,K2] = 0", "q3.a_k2", &g.a, &g.k2),
        ("[B,J2] = 0", "q3.b_j2", &g.b, &g.j2),
        ("[B,K2] = 0", "q3.b_k2", &g.b, &g.k2),
        ("[J2,K2] = 0", "q3.j2_k2", &g.j2, &g.k2),
    ];
    let mut entries: Vec<CheckEntry> = pairs
        .par_iter()
        .map(|(name, anchor, p, q)| timed(|| CheckEntry::new(name, anchor, commutator(p, q).unwrap().num_terms())))
        .collect();
    let hbar = ws.scalar(ParamScalar::hbar());
    let (so, (c_entries, (ac, bc))) = rayon::join(
        || so_entries_quantum(g, &hbar),
        || {
            rayon::join(
                || {
                    timed(|| {
                        let c = ws.c();
                        let hc = commutator(&g.h, c).unwrap();
                        let order = c.order();
                        let mut e = CheckEntry::new("C = [A,B] is a cubic integral", "q3.c_integral", hc.num_terms());
                        if order != 3 || c.is_zero() {
                            e.passed = false;
                        }
                        e.with_detail(format!("order {order}, {} terms", c.num_terms()))
                    })
                },
                || rayon::join(|| ws.check_ac(k), || ws.check_bc(k)),
            )
        },
    );
    entries.extend(so);
    entries.push(c_entries);
    entries.push(ac);
    entries.push(bc);
    entries.push(ws.casimir_entry(report));
    entries
}

/// Runs the quantum suite with the printed structure constants.
pub fn verify_q3(total: usize, first: usize, mode: CheckMode) -> Result<VerificationReport, AlgebraError> {
    let dims = Dims::new(total, first)?;
    verify_q3_with(total, first, &Constants::q3(dims), mode)
}

/// Runs the quantum suite with caller-supplied structure constants.
pub fn verify_q3_with(
    total: usize,
    first: usize,
    constants: &Constants,
    mode: CheckMode,
) -> Result<VerificationReport, AlgebraError> {
    let gens = build_quantum(total, first)?;
    let mut report = VerificationReport::new("Q(3)", total, first, &mode.label());
    match mode {
        CheckMode::Symbolic => {
            let ws = Q3Workspace::from_generators(gens, None);
            let entries = quantum_entries(&ws, constants, &mut report);
            report.entries = entries;
            let hb = commutator(&ws.gens.h, &ws.gens.b_as_printed)?;
            if !hb.is_zero() {
                report.notes.push(format!(
                    "B with +c2/r2^2 does not commute with H ({} residual terms); B = H1 - H2 is used",
                    hb.num_terms()
                ));
            }
            report.entries.extend(limit_entries(&ws, constants)?);
        }
        CheckMode::Sampled { seed, points } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let draws: Vec<ParamValues> = (0..points.max(1)).map(|_| random_values(&mut rng)).collect();
            let mut merged: BTreeMap<String, CheckEntry> = BTreeMap::new();
            for values in draws {
                let ws = Q3Workspace::from_generators(gens.clone(), Some(values));
                let mut scratch = VerificationReport::new("Q(3)", total, first, "");
                for e in quantum_entries(&ws, constants, &mut scratch) {
                    merge_entry(&mut merged, e);
                }
                report.notes.extend(scratch.notes);
                super::laurent::clear_caches();
            }
            report.entries = merged.into_values().collect();
        }
    }
    Ok(report.finish())
}

fn merge_entry(merged: &mut BTreeMap<String, CheckEntry>, e: CheckEntry) {
    match merged.get_mut(&e.anchor) {
        None => {
            merged.insert(e.anchor.clone(), e);
        }
        Some(prev) => {
            prev.passed &= e.passed;
            prev.residual_terms = prev.residual_terms.max(e.residual_terms);
            prev.wall_time += e.wall_time;
        }
    }
}

/// Lowest-order hbar terms of the quantum relations against the Poisson ones.
fn limit_entries(ws: &Q3Workspace, k: &Constants) -> Result<Vec<CheckEntry>, AlgebraError> {
    let d = ws.dims();
    let cl = ClassicalWorkspace::new(build_classical(d.total(), d.first())?);
    let kp = Constants::qp3();
    let start = Instant::now();
    let mut mismatches = Vec::new();
    let mut residual_terms = 0;
    let mut compare = |name: &str, q: Result<PhaseFn, AlgebraError>, c: &PhaseFn| -> Result<(), AlgebraError> {
        let diff = q?.try_sub(c)?;
        if !diff.is_zero() {
            residual_terms += diff.num_terms();
            mismatches.push(name.to_string());
        }
        Ok(())
    };
    compare("H", classical_limit(&ws.gens.h, 0), &cl.gens.h)?;
    compare("A", classical_limit(&ws.gens.a, 0), &cl.gens.a)?;
    compare("B", classical_limit(&ws.gens.b, 0), &cl.gens.b)?;
    compare("J2", classical_limit(&ws.gens.j2, 0), &cl.gens.j2)?;
    compare("K2", classical_limit(&ws.gens.k2, 0), &cl.gens.k2)?;
    compare("C", classical_limit(ws.c(), 1), cl.c())?;
    compare("[A,C] right side", classical_limit(&ws.ac_rhs(k), 2), &cl.ac_rhs(&kp))?;
    compare("[B,C] right side", classical_limit(&ws.bc_rhs(k), 2), &cl.bc_rhs(&kp))?;
    let mut entry = CheckEntry::new(
        "lowest hbar order matches the Poisson algebra",
        "q3.classical_limit",
        residual_terms,
    );
    if !mismatches.is_empty() {
        entry = entry.with_detail(format!("mismatch in {}", mismatches.join(", ")));
    }
    entry.wall_time = start.elapsed();
    Ok(vec![entry])
}

/// Cached products of the classical generators.
pub struct ClassicalWorkspace {
    pub gens: ClassicalGenerators,
    c: OnceLock<PhaseFn>,
}

impl ClassicalWorkspace {
    pub fn new(gens: ClassicalGenerators) -> Self {
        ClassicalWorkspace { gens, c: OnceLock::new() }
    }

    /// `C = {A, B}`.
    pub fn c(&self) -> &PhaseFn {
        self.c.get_or_init(|| poisson_bracket(&self.gens.a, &self.gens.b).unwrap())
    }

    pub fn ac_rhs(&self, k: &Constants) -> PhaseFn {
        let g = &self.gens;
        let terms = [
            (k.get("ac.ab"), &g.a * &g.b),
            (k.get("ac.j2h"), &g.j2 * &g.h),
            (k.get("ac.k2h"), &g.k2 * &g.h),
            (k.get("ac.h"), g.h.clone()),
        ];
        terms.iter().fold(PhaseFn::zero(g.dims), |acc, (c, f)| &acc + &f.mul_scalar(c))
    }

    pub fn bc_rhs(&self, k: &Constants) -> PhaseFn {
        let g = &self.gens;
        let terms = [
            (k.get("bc.b2"), &g.b * &g.b),
            (k.get("bc.h2"), &g.h * &g.h),
            (k.get("bc.a"), g.a.clone()),
            (k.get("bc.j2"), g.j2.clone()),
            (k.get("bc.k2"), g.k2.clone()),
            (k.get("bc.const"), PhaseFn::one(g.dims)),
        ];
        terms.iter().fold(PhaseFn::zero(g.dims), |acc, (c, f)| &acc + &f.mul_scalar(c))
    }

    /// The cubic Casimir in the generators.
    pub fn casimir(&self) -> PhaseFn {
        let g = &self.gens;
        let c = self.c();
        let jk_h = &(&(&g.j2 * &g.h) - &(&g.k2 * &g.h)) + &g.h.mul_scalar(&((&c1() - &c2()) * int(2)));
        let a_bracket = &(&(&PhaseFn::scalar(g.dims, &(w2() * (&c1() + &c2()) * int(8)))
            + &g.j2.mul_scalar(&(w2() * int(4))))
            + &g.k2.mul_scalar(&(w2() * int(4))))
            + &(&g.h * &g.h).scale(&ratio(2, 1));
        let parts = [
            c * c,
            (&g.a * &(&g.b * &g.b)).scale(&ratio(4, 1)),
            (&jk_h * &g.b).scale(&ratio(-2, 1)),
            (&g.a * &g.a).mul_scalar(&(w2() * int(16))),
            (&a_bracket * &g.a).scale(&ratio(-2, 1)),
        ];
        parts.iter().fold(PhaseFn::zero(g.dims), |acc, f| &acc + f)
    }

    /// The Casimir in the central elements.
    pub fn central_casimir(&self) -> PhaseFn {
        let g = &self.gens;
        let h2 = &g.h * &g.h;
        let cm = &c1() - &c2();
        let parts = [
            (&g.j2 * &h2).scale(&ratio(-2, 1)),
            (&g.k2 * &h2).scale(&ratio(-2, 1)),
            h2.mul_scalar(&((&c1() + &c2()) * int(-4))),
            (&g.j2 * &g.j2).mul_scalar(&-w2()),
            (&g.k2 * &g.k2).mul_scalar(&-w2()),
            (&g.j2 * &g.k2).mul_scalar(&(w2() * int(2))),
            g.j2.mul_scalar(&(w2() * cm.clone() * int(-4))),
            g.k2.mul_scalar(&(w2() * cm.clone() * int(4))),
            PhaseFn::scalar(g.dims, &(w2() * &cm * &cm * int(-4))),
        ];
        parts.iter().fold(PhaseFn::zero(g.dims), |acc, f| &acc + f)
    }
}

fn bracket_entry(name: &str, anchor: &str, f: &PhaseFn, g: &PhaseFn) -> CheckEntry {
    timed(|| CheckEntry::new(name, anchor, poisson_bracket(f, g).unwrap().num_terms()))
}

/// Runs the classical suite with the printed structure constants.
pub fn verify_qp3(total: usize, first: usize, mode: CheckMode) -> Result<VerificationReport, AlgebraError> {
    verify_qp3_with(total, first, &Constants::qp3(), mode)
}

/// Runs the classical suite with caller-supplied structure constants.
pub fn verify_qp3_with(
    total: usize,
    first: usize,
    constants: &Constants,
    mode: CheckMode,
) -> Result<VerificationReport, AlgebraError> {
    let gens = build_classical(total, first)?;
    let mut report = VerificationReport::new("QP(3)", total, first, &mode.label());
    let draws: Vec<Option<ParamValues>> = match mode {
        CheckMode::Symbolic => vec![None],
        CheckMode::Sampled { seed, points } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..points.max(1)).map(|_| Some(random_values(&mut rng))).collect()
        }
    };
    let mut merged: BTreeMap<String, CheckEntry> = BTreeMap::new();
    for values in draws {
        let g = match &values {
            None => gens.clone(),
            Some(v) => substitute_classical(&gens, v),
        };
        let k = match &values {
            None => constants.clone(),
            Some(v) => Constants {
                entries: constants.entries.iter().map(|(n, p)| (*n, specialize(p, Some(v)))).collect(),
            },
        };
        for e in classical_entries(ClassicalWorkspace::new(g), &k, values.as_ref()) {
            merge_entry(&mut merged, e);
        }
    }
    report.entries = merged.into_values().collect();
    if mode == CheckMode::Symbolic {
        let hb = poisson_bracket(&gens.h, &gens.b_as_printed)?;
        if !hb.is_zero() {
            report.notes.push(format!(
                "B with +c2/r2^2 does not Poisson-commute with H ({} residual terms); B = H1 - H2 is used",
                hb.num_terms()
            ));
        }
    }
    Ok(report.finish())
}

fn substitute_classical(g: &ClassicalGenerators, v: &ParamValues) -> ClassicalGenerators {
    let s = |f: &PhaseFn| f.substitute(v);
    let list = |l: &[((usize, usize), PhaseFn)]| l.iter().map(|(ij, f)| (*ij, s(f))).collect();
    ClassicalGenerators {
        dims: g.dims,
        h: s(&g.h),
        a: s(&g.a),
        b: s(&g.b),
        b_as_printed: s(&g.b_as_printed),
        j: list(&g.j),
        k: list(&g.k),
        j2: s(&g.j2),
        k2: s(&g.k2),
    }
}

fn classical_entries(ws: ClassicalWorkspace, k: &Constants, values: Option<&ParamValues>) -> Vec<CheckEntry> {
    let g = &ws.gens;
    let mut out = vec![
        bracket_entry("{H,A} = 0", "qp3.h_a", &g.h, &g.a),
        bracket_entry("{H,B} = 0", "qp3.h_b", &g.h, &g.b),
        bracket_entry("{H,J2} = 0", "qp3.h_j2", &g.h, &g.j2),
        bracket_entry("{H,K2} = 0", "qp3.h_k2", &g.h, &g.k2),
        bracket_entry("{A,J2} = 0", "qp3.a_j2", &g.a, &g.j2),
        bracket_entry("{A,K2} = 0", "qp3.a_k2", &g.a, &g.k2),
        bracket_entry("{B,J2} = 0", "qp3.b_j2", &g.b, &g.j2),
        bracket_entry("{B,K2} = 0", "qp3.b_k2", &g.b, &g.k2),
        bracket_entry("{J2,K2} = 0", "qp3.j2_k2", &g.j2, &g.k2),
    ];
    out.push(timed(|| {
        let c = ws.c();
        let hc = poisson_bracket(&g.h, c).unwrap();
        let degree = c.momentum_degree();
        let mut e = CheckEntry::new("C = {A,B} is a cubic integral", "qp3.c_integral", hc.num_terms());
        if degree != 3 {
            e.passed = false;
        }
        e.with_detail(format!("momentum degree {degree}, {} terms", c.num_terms()))
    }));
    out.push(timed(|| {
        let lhs = poisson_bracket(&g.a, ws.c()).unwrap();
        CheckEntry::new("{A,C} relation", "qp3.ac_relation", (&lhs - &ws.ac_rhs(k)).num_terms())
    }));
    out.push(timed(|| {
        let lhs = poisson_bracket(&g.b, ws.c()).unwrap();
        CheckEntry::new("{B,C} relation", "qp3.bc_relation", (&lhs - &ws.bc_rhs(k)).num_terms())
    }));
    out.push(timed(|| {
        let (kc, k1) = match values {
            None => (ws.casimir(), ws.central_casimir()),
            Some(v) => {
                // The Casimir expressions carry their own symbolic constants.
                let sym = ClassicalWorkspace::new(g.clone());
                (sym.casimir().substitute(v), sym.central_casimir().substitute(v))
            }
        };
        CheckEntry::new("Casimir K = K1", "qp3.casimir", (&kc - &k1).num_terms())
    }));
    for (label, list, anchor) in [("so(n)", &g.j, "so_first"), ("so(N-n)", &g.k, "so_second")] {
        let get = pair_lookup(list);
        out.push(timed(|| {
            let mut residual_terms = 0;
            for (a, fa) in list.iter() {
                for (b, fb) in list.iter() {
                    let lhs = poisson_bracket(fa, fb).unwrap();
                    // {J_ij, J_kl} = d_ik J_jl + d_jl J_ik - d_il J_jk - d_jk J_il
                    let rhs = rotation_rhs(&get, *a, *b)
                        .into_iter()
                        .fold(PhaseFn::zero(g.dims), |acc, (f, s)| &acc + &f.scale(&ratio(s, 1)));
                    residual_terms += (&lhs - &rhs).num_terms();
                }
            }
            CheckEntry::new(&format!("{label} Poisson brackets"), &format!("{anchor}.brackets"), residual_terms)
        }));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_partition_passes() {
        let r = verify_q3(3, 1, CheckMode::Symbolic).unwrap();
        for e in &r.entries {
            assert!(e.passed, "{} failed with {} terms", e.anchor, e.residual_terms);
        }
    }

    #[test]
    fn perturbed_constant_is_detected() {
        let d = Dims::new(3, 1).unwrap();
        let ws = Q3Workspace::new(3, 1).unwrap();
        let k = Constants::q3(d);
        assert!(ws.check_ac(&k).passed);
        assert!(!ws.check_ac(&k.perturbed("ac.b", &ParamScalar::one())).passed);
        assert!(!ws.check_bc(&k.perturbed("bc.a", &ParamScalar::one())).passed);
    }

    #[test]
    fn classical_small_partition_passes() {
        let r = verify_qp3(3, 2, CheckMode::Symbolic).unwrap();
        assert!(r.all_passed(), "{:?}", r.failures().collect::<Vec<_>>());
    }
}

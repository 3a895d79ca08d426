//! Command-line front end.
//!
//! Settings come from flags, then from a `key = value` config file, then
//! from defaults. Every record carries an `anchor` naming the relation or
//! quantity it reports.

use crate::levels::{enumerate_levels, oscillator_count_check};
use crate::opalg::{verify_q3, verify_qp3, CheckMode};
use crate::qalg::{solve_unirreps, CentralEigs};
use crate::radial::{
    closed_form, default_r_max, fd_eigenvalues_with, norm_quadrature, printed_wavefunction, wavefunction,
    wavefunction_sign_changes, ComponentSpec, FdOptions,
};
use crate::report::VerificationReport;
use crate::opalg::ParamValues;
use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;
use thiserror::Error;

type Q = BigRational;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("verification failed: {}", .0.join(", "))]
    Verification(Vec<String>),
    #[error("computation failed: {0}")]
    Compute(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    JsonLines,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Symbolic,
    Sampled,
}

#[derive(Debug, Parser)]
#[command(name = "dsosc", version, about = "Exact algebra and spectra of the N-dimensional double singular oscillator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
enum Command {
    /// Exact check of the quantum quadratic algebra and rotation sectors
    VerifyAlgebra,
    /// Exact check of the classical Poisson algebra
    VerifyPoisson,
    /// Finite unitary representations and their energies
    Spectrum,
    /// Closed-form and finite-volume radial energies of one component
    Radial,
    /// Level table with degeneracies
    Levels,
    /// Sampled radial wavefunction with its norm
    Wavefunction,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::VerifyAlgebra => "verify-algebra",
            Command::VerifyPoisson => "verify-poisson",
            Command::Spectrum => "spectrum",
            Command::Radial => "radial",
            Command::Levels => "levels",
            Command::Wavefunction => "wavefunction",
        }
    }
}

#[derive(Debug, Default, clap::Args)]
struct Flags {
    /// Total dimension N
    #[arg(long = "N", global = true)]
    total: Option<usize>,
    /// Dimension n of the first component
    #[arg(long = "n", global = true)]
    first: Option<usize>,
    /// Coupling c1 as an exact rational, e.g. 3/2
    #[arg(long, global = true)]
    c1: Option<String>,
    /// Coupling c2 as an exact rational
    #[arg(long, global = true)]
    c2: Option<String>,
    #[arg(long, global = true)]
    hbar: Option<String>,
    #[arg(long, global = true)]
    omega: Option<String>,
    /// Seed for sampled checks
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    /// Write records here instead of standard output
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Flat key = value file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long = "p-max", global = true)]
    p_max: Option<u32>,
    #[arg(long = "l-max", global = true)]
    l_max: Option<u32>,
    /// Energy cutoff for the level table, in units of hbar omega
    #[arg(long = "e-cut", global = true)]
    e_cut: Option<f64>,
    #[arg(long, value_enum, global = true)]
    mode: Option<Mode>,
    /// Random points for sampled checks
    #[arg(long, global = true)]
    points: Option<usize>,
    /// Component 1 (dimension n) or 2 (dimension N - n)
    #[arg(long, global = true)]
    component: Option<u8>,
    /// Angular number of the component
    #[arg(long, global = true)]
    l: Option<u32>,
    /// Radial number
    #[arg(long, global = true)]
    nr: Option<u32>,
    /// Number of radial levels
    #[arg(long, global = true)]
    count: Option<usize>,
    /// Cells on the coarsest grid
    #[arg(long = "base-nodes", global = true)]
    base_nodes: Option<usize>,
    /// Grid levels for extrapolation
    #[arg(long = "grid-levels", global = true)]
    grid_levels: Option<u32>,
    /// Radial cutoff
    #[arg(long = "r-max", global = true)]
    r_max: Option<f64>,
    /// Wavefunction sample count
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Also run the oscillator counting check (levels)
    #[arg(long = "count-check", global = true)]
    count_check: bool,
    /// Include wall times in the records
    #[arg(long, global = true)]
    timings: bool,
}

/// Fully resolved settings.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub total: usize,
    pub first: usize,
    pub c1: Q,
    pub c2: Q,
    pub hbar: Q,
    pub omega: Q,
    pub seed: u64,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub p_max: u32,
    pub l_max: u32,
    pub e_cut: Option<f64>,
    pub mode: Mode,
    pub points: usize,
    pub component: u8,
    pub l: u32,
    pub nr: u32,
    pub count: usize,
    pub base_nodes: usize,
    pub grid_levels: u32,
    pub r_max: Option<f64>,
    pub samples: usize,
    pub count_check: bool,
    pub timings: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            total: 4,
            first: 2,
            c1: Q::zero(),
            c2: Q::zero(),
            hbar: Q::from_integer(1.into()),
            omega: Q::from_integer(1.into()),
            seed: 0,
            format: Format::JsonLines,
            output: None,
            p_max: 3,
            l_max: 0,
            e_cut: None,
            mode: Mode::Symbolic,
            points: 3,
            component: 1,
            l: 0,
            nr: 0,
            count: 3,
            base_nodes: 512,
            grid_levels: 3,
            r_max: None,
            samples: 200,
            count_check: false,
            timings: false,
        }
    }
}

/// Parses `p/q`, an integer or a terminating decimal exactly.
pub fn parse_rational(s: &str) -> Result<Q, CliError> {
    let s = s.trim();
    let bad = || CliError::Config(format!("cannot parse {s:?} as an exact rational"));
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| bad())?;
        let d: BigInt = den.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Q::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let whole: BigInt = if int.is_empty() || int == "-" || int == "+" { BigInt::zero() } else { int.parse().map_err(|_| bad())? };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let f: BigInt = frac.parse().map_err(|_| bad())?;
        let magnitude = whole.abs() * &scale + f;
        let signed = if negative { -magnitude } else { magnitude };
        return Ok(Q::new(signed, scale));
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Q::from_integer(n))
}

fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("config line {}: expected key = value", i + 1)))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn parse_value<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.parse().map_err(|_| CliError::Config(format!("config key {key}: cannot parse {v:?}")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool, CliError> {
    match v {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(CliError::Config(format!("config key {key}: expected a boolean, got {v:?}"))),
    }
}

fn apply_config(cfg: &mut RunConfig, entries: &BTreeMap<String, String>) -> Result<(), CliError> {
    for (k, v) in entries {
        match k.as_str() {
            "N" => cfg.total = parse_value(k, v)?,
            "n" => cfg.first = parse_value(k, v)?,
            "c1" => cfg.c1 = parse_rational(v)?,
            "c2" => cfg.c2 = parse_rational(v)?,
            "hbar" => cfg.hbar = parse_rational(v)?,
            "omega" => cfg.omega = parse_rational(v)?,
            "seed" => cfg.seed = parse_value(k, v)?,
            "format" => {
                cfg.format = Format::from_str(v, false).map_err(|_| CliError::Config(format!("unknown format {v:?}")))?
            }
            "output" => cfg.output = Some(PathBuf::from(v)),
            "p_max" => cfg.p_max = parse_value(k, v)?,
            "l_max" => cfg.l_max = parse_value(k, v)?,
            "e_cut" => cfg.e_cut = Some(parse_value(k, v)?),
            "mode" => cfg.mode = Mode::from_str(v, false).map_err(|_| CliError::Config(format!("unknown mode {v:?}")))?,
            "points" => cfg.points = parse_value(k, v)?,
            "component" => cfg.component = parse_value(k, v)?,
            "l" => cfg.l = parse_value(k, v)?,
            "nr" => cfg.nr = parse_value(k, v)?,
            "count" => cfg.count = parse_value(k, v)?,
            "base_nodes" => cfg.base_nodes = parse_value(k, v)?,
            "grid_levels" => cfg.grid_levels = parse_value(k, v)?,
            "r_max" => cfg.r_max = Some(parse_value(k, v)?),
            "samples" => cfg.samples = parse_value(k, v)?,
            "count_check" => cfg.count_check = parse_bool(k, v)?,
            "timings" => cfg.timings = parse_bool(k, v)?,
            other => return Err(CliError::Config(format!("unknown config key {other:?}"))),
        }
    }
    Ok(())
}

fn resolve(flags: &Flags) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &flags.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        apply_config(&mut cfg, &parse_config_file(&text)?)?;
    }
    macro_rules! set {
        ($field:ident) => {
            if let Some(v) = &flags.$field {
                cfg.$field = v.clone();
            }
        };
        ($field:ident, some) => {
            if let Some(v) = &flags.$field {
                cfg.$field = Some(v.clone());
            }
        };
        ($field:ident, rational) => {
            if let Some(v) = &flags.$field {
                cfg.$field = parse_rational(v)?;
            }
        };
    }
    set!(total);
    set!(first);
    set!(c1, rational);
    set!(c2, rational);
    set!(hbar, rational);
    set!(omega, rational);
    set!(seed);
    set!(format);
    set!(output, some);
    set!(p_max);
    set!(l_max);
    set!(e_cut, some);
    set!(mode);
    set!(points);
    set!(component);
    set!(l);
    set!(nr);
    set!(count);
    set!(base_nodes);
    set!(grid_levels);
    set!(r_max, some);
    set!(samples);
    cfg.count_check |= flags.count_check;
    cfg.timings |= flags.timings;
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.total < 2 || cfg.first < 1 || cfg.first >= cfg.total {
        return Err(CliError::Config(format!(
            "invalid partition (N, n) = ({}, {}): need N >= 2 and 1 <= n <= N - 1",
            cfg.total, cfg.first
        )));
    }
    for (name, v) in [("c1", &cfg.c1), ("c2", &cfg.c2)] {
        if v.is_negative() {
            return Err(CliError::Config(format!("{name} = {v} must be non-negative")));
        }
    }
    for (name, v) in [("hbar", &cfg.hbar), ("omega", &cfg.omega)] {
        if !v.is_positive() {
            return Err(CliError::Config(format!("{name} = {v} must be positive")));
        }
    }
    if !(cfg.component == 1 || cfg.component == 2) {
        return Err(CliError::Config(format!("component must be 1 or 2, got {}", cfg.component)));
    }
    if cfg.count == 0 || cfg.samples == 0 || cfg.points == 0 {
        return Err(CliError::Config("count, samples and points must be positive".into()));
    }
    Ok(())
}

/// Records for one run. All go to json-lines; the CSV view keeps records of
/// kind `csv_record` and the columns `csv_columns`.
struct Emit {
    records: Vec<Value>,
    csv_record: &'static str,
    csv_columns: Vec<&'static str>,
    failures: Vec<String>,
}

impl Emit {
    fn new(csv_record: &'static str, csv_columns: Vec<&'static str>) -> Self {
        Emit { records: Vec::new(), csv_record, csv_columns, failures: Vec::new() }
    }
}

fn params(cfg: &RunConfig) -> ParamValues {
    ParamValues::new(cfg.hbar.clone(), cfg.omega.clone(), cfg.c1.clone(), cfg.c2.clone())
}

fn report_records(report: &VerificationReport, cfg: &RunConfig, emit: &mut Emit) {
    for e in &report.entries {
        let mut v = json!({
            "record": "check",
            "suite": report.suite,
            "N": report.total,
            "n": report.first,
            "mode": report.mode,
            "anchor": e.anchor,
            "name": e.name,
            "passed": e.passed,
            "residual_terms": e.residual_terms,
            "detail": e.detail,
        });
        if cfg.timings {
            v["wall_time_ms"] = json!(e.wall_time.as_secs_f64() * 1e3);
        }
        if !e.passed {
            emit.failures.push(format!("{} ({})", e.anchor, e.name));
        }
        emit.records.push(v);
    }
    let notes_anchor = format!("{}.notes", report.entries.first().map(|e| e.anchor.split('.').next().unwrap_or("")).unwrap_or(""));
    for note in &report.notes {
        emit.records.push(json!({ "record": "note", "anchor": notes_anchor, "text": note }));
    }
}

fn check_mode(cfg: &RunConfig) -> CheckMode {
    match cfg.mode {
        Mode::Symbolic => CheckMode::Symbolic,
        Mode::Sampled => CheckMode::Sampled { seed: cfg.seed, points: cfg.points },
    }
}

const CHECK_COLUMNS: [&str; 6] = ["anchor", "name", "passed", "residual_terms", "N", "n"];

fn cmd_verify(cfg: &RunConfig, classical: bool) -> Result<Emit, CliError> {
    let mut emit = Emit::new("check", CHECK_COLUMNS.to_vec());
    let report = if classical {
        verify_qp3(cfg.total, cfg.first, check_mode(cfg))
    } else {
        verify_q3(cfg.total, cfg.first, check_mode(cfg))
    }
    .map_err(|e| CliError::Config(e.to_string()))?;
    report_records(&report, cfg, &mut emit);
    Ok(emit)
}

fn angular_range(m: usize, l_max: u32) -> std::ops::RangeInclusive<u32> {
    0..=if m == 1 { l_max.min(1) } else { l_max }
}

fn cmd_spectrum(cfg: &RunConfig) -> Result<Emit, CliError> {
    let mut emit = Emit::new("unirrep", vec![
        "N", "n", "c1", "c2", "p", "l_n", "l_Nn", "set", "eps1", "eps2", "u", "E", "E_value", "admissible",
    ]);
    let second = cfg.total - cfg.first;
    for l_n in angular_range(cfg.first, cfg.l_max) {
        for l_nn in angular_range(second, cfg.l_max) {
            let ce = CentralEigs::new(cfg.total, cfg.first, l_n, l_nn, params(cfg))
                .map_err(|e| CliError::Config(e.to_string()))?;
            for p in 0..=cfg.p_max {
                let start = Instant::now();
                let sols = solve_unirreps(p, &ce).map_err(|e| CliError::Compute(e.to_string()))?;
                let elapsed = start.elapsed();
                for s in sols {
                    let mut v = json!({
                        "record": "unirrep",
                        "anchor": "qalg.unirrep",
                        "N": cfg.total,
                        "n": cfg.first,
                        "c1": cfg.c1.to_string(),
                        "c2": cfg.c2.to_string(),
                        "p": p,
                        "l_n": l_n,
                        "l_Nn": l_nn,
                        "set": s.set.number(),
                        "eps1": s.eps.0,
                        "eps2": s.eps.1,
                        "u": s.u.to_string(),
                        "E": s.energy.to_string(),
                        "E_value": s.energy.to_f64(),
                        "boundary_ok": s.boundary_ok,
                        "positive_ok": s.positive_ok,
                        "energy_positive": s.energy_positive,
                        "admissible": s.admissible,
                        "failing_x": s.failing_x,
                    });
                    if cfg.timings {
                        v["wall_time_ms"] = json!(elapsed.as_secs_f64() * 1e3);
                    }
                    emit.records.push(v);
                }
            }
        }
    }
    Ok(emit)
}

fn component_spec(cfg: &RunConfig) -> Result<ComponentSpec, CliError> {
    let (m, c) = match cfg.component {
        1 => (cfg.first, cfg.c1.clone()),
        _ => (cfg.total - cfg.first, cfg.c2.clone()),
    };
    ComponentSpec::new(m, c, cfg.l, cfg.hbar.clone(), cfg.omega.clone()).map_err(|e| CliError::Config(e.to_string()))
}

const FD_TOLERANCE: f64 = 1e-6;

fn cmd_radial(cfg: &RunConfig) -> Result<Emit, CliError> {
    let mut emit = Emit::new("radial_mode", vec!["m", "l", "c", "nr", "alpha", "delta", "E_closed", "E_fd", "rel_diff", "sign_changes"]);
    let spec = component_spec(cfg)?;
    let opts = FdOptions { base_nodes: cfg.base_nodes, levels: cfg.grid_levels, r_max: cfg.r_max };
    let start = Instant::now();
    let fd = fd_eigenvalues_with(&spec, cfg.count, &opts).map_err(|e| CliError::Compute(e.to_string()))?;
    let elapsed = start.elapsed();
    let finest_h = fd.levels.last().map(|lv| lv.h).unwrap_or(f64::NAN);
    for nr in 0..cfg.count {
        let mode = closed_form(&spec, nr as u32);
        let e_fd = fd.eigenvalues[nr];
        let rel = ((e_fd - mode.energy) / mode.energy).abs();
        let ok = rel < FD_TOLERANCE && fd.sign_changes[nr] == nr;
        if !ok {
            emit.failures.push(format!("radial.fd_agreement (nr = {nr}, relative difference {rel:.3e})"));
        }
        let mut v = json!({
            "record": "radial_mode",
            "anchor": "radial.fd_agreement",
            "m": spec.m,
            "l": spec.l,
            "c": spec.c.to_string(),
            "nr": nr,
            "alpha": mode.alpha,
            "delta": mode.delta,
            "E_closed": mode.energy,
            "E_exact": mode.energy_exact().map(|q| q.to_string()),
            "E_fd": e_fd,
            "rel_diff": rel,
            "extrapolation_shift": fd.extrapolation_shift[nr],
            "sign_changes": fd.sign_changes[nr],
            "r_max": fd.r_max,
            "h_finest": finest_h,
            "grid_levels": fd.levels.iter().map(|lv| lv.grid.nodes).collect::<Vec<_>>(),
            "level_estimates": fd.levels.iter().map(|lv| lv.eigenvalues[nr]).collect::<Vec<_>>(),
            "half_line": fd.half_line,
            "passed": ok,
        });
        if cfg.timings {
            v["wall_time_ms"] = json!(elapsed.as_secs_f64() * 1e3);
        }
        emit.records.push(v);
    }
    Ok(emit)
}

fn cmd_levels(cfg: &RunConfig) -> Result<Emit, CliError> {
    let mut emit = Emit::new("level_row", vec!["E_over_hbar_omega", "p", "l_n", "l_Nn", "degeneracy"]);
    let hw = crate::radial::to_f64(&(&cfg.hbar * &cfg.omega));
    let cutoff = match cfg.e_cut {
        Some(e) => e * hw,
        None => {
            // six quanta above the ground level
            let s1 = ComponentSpec::new(cfg.first, cfg.c1.clone(), 0, cfg.hbar.clone(), cfg.omega.clone());
            let s2 = ComponentSpec::new(cfg.total - cfg.first, cfg.c2.clone(), 0, cfg.hbar.clone(), cfg.omega.clone());
            let (s1, s2) = (s1.map_err(|e| CliError::Config(e.to_string()))?, s2.map_err(|e| CliError::Config(e.to_string()))?);
            closed_form(&s1, 0).energy + closed_form(&s2, 0).energy + 6.0 * hw
        }
    };
    let start = Instant::now();
    let table = enumerate_levels(cfg.total, cfg.first, &cfg.c1, &cfg.c2, &cfg.hbar, &cfg.omega, cutoff)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let elapsed = start.elapsed();
    for level in &table.levels {
        let mut keys: Vec<(u32, u32, u32)> = level.contributors.iter().map(|c| (c.p(), c.l_n, c.l_nn)).collect();
        keys.sort();
        keys.dedup();
        for (p, l_n, l_nn) in keys {
            emit.records.push(json!({
                "record": "level_row",
                "anchor": "levels.table",
                "E_over_hbar_omega": level.energy_over_hbar_omega,
                "p": p,
                "l_n": l_n,
                "l_Nn": l_nn,
                "degeneracy": level.degeneracy,
                "accidental": level.accidental,
            }));
        }
    }
    if cfg.timings {
        emit.records.push(json!({ "record": "timing", "anchor": "levels.table", "wall_time_ms": elapsed.as_secs_f64() * 1e3 }));
    }
    if cfg.count_check {
        let report = oscillator_count_check(cfg.total, cfg.l_max).map_err(|e| CliError::Config(e.to_string()))?;
        for row in report.rows {
            if !row.ok {
                emit.failures.push(format!("levels.oscillator_count (n = {}, l = {})", row.first, row.l));
            }
            emit.records.push(json!({
                "record": "count_check",
                "anchor": "levels.oscillator_count",
                "n": row.first,
                "l": row.l,
                "count": row.count,
                "expected": row.expected,
                "energy_ok": row.energy_ok,
                "passed": row.ok,
            }));
        }
    }
    Ok(emit)
}

const NORM_TOLERANCE: f64 = 1e-6;

fn cmd_wavefunction(cfg: &RunConfig) -> Result<Emit, CliError> {
    let mut emit = Emit::new("sample", vec!["r", "psi", "psi_printed"]);
    let spec = component_spec(cfg)?;
    let mode = closed_form(&spec, cfg.nr);
    let r_max = cfg.r_max.unwrap_or_else(|| default_r_max(&spec, cfg.nr as usize + 1));
    if r_max <= 0.0 {
        return Err(CliError::Config(format!("r_max = {r_max} must be positive")));
    }
    let h = r_max / cfg.samples as f64;
    for i in 1..=cfg.samples {
        let r = i as f64 * h;
        let psi = wavefunction(&mode, r).map_err(|e| CliError::Compute(e.to_string()))?;
        let printed = printed_wavefunction(&mode, r).map_err(|e| CliError::Compute(e.to_string()))?;
        emit.records.push(json!({
            "record": "sample",
            "anchor": "radial.wavefunction",
            "r": r,
            "psi": psi,
            "psi_printed": printed,
        }));
    }
    let start = Instant::now();
    let norm = norm_quadrature(&mode, |r| wavefunction(&mode, r).unwrap_or(0.0), 1e-12);
    let printed_norm = norm_quadrature(&mode, |r| printed_wavefunction(&mode, r).unwrap_or(0.0), 1e-12);
    let nodes = wavefunction_sign_changes(&mode, r_max, 20_000).map_err(|e| CliError::Compute(e.to_string()))?;
    let elapsed = start.elapsed();
    let norm_ok = (norm.value - 1.0).abs() < NORM_TOLERANCE;
    if !norm_ok {
        emit.failures.push(format!("radial.normalization (norm {})", norm.value));
    }
    if nodes != cfg.nr as usize {
        emit.failures.push(format!("radial.nodes ({nodes} sign changes for nr = {})", cfg.nr));
    }
    let mut v = json!({
        "record": "summary",
        "anchor": "radial.normalization",
        "m": spec.m,
        "l": spec.l,
        "c": spec.c.to_string(),
        "nr": cfg.nr,
        "alpha": mode.alpha,
        "energy": mode.energy,
        "norm": norm.value,
        "norm_error_estimate": norm.error_estimate,
        "quadrature_r_max": norm.r_max,
        "printed_norm": printed_norm.value,
        "sign_changes": nodes,
        "half_line": spec.half_line(),
        "passed": norm_ok && nodes == cfg.nr as usize,
    });
    if cfg.timings {
        v["wall_time_ms"] = json!(elapsed.as_secs_f64() * 1e3);
    }
    emit.records.push(v);
    Ok(emit)
}

fn csv_cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(other) => other.to_string(),
    }
}

fn write_output(emit: &Emit, cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    match cfg.format {
        Format::JsonLines => {
            for r in &emit.records {
                writeln!(out, "{r}")?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            let io = |e: csv::Error| CliError::Io(std::io::Error::other(e));
            w.write_record(&emit.csv_columns).map_err(io)?;
            let rows = emit.records.iter().filter_map(Value::as_object);
            for r in rows.filter(|o: &&Map<String, Value>| o.get("record").and_then(Value::as_str) == Some(emit.csv_record)) {
                w.write_record(emit.csv_columns.iter().map(|c| csv_cell(r.get(*c)))).map_err(io)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn execute(command: Command, cfg: &RunConfig) -> Result<Emit, CliError> {
    match command {
        Command::VerifyAlgebra => cmd_verify(cfg, false),
        Command::VerifyPoisson => cmd_verify(cfg, true),
        Command::Spectrum => cmd_spectrum(cfg),
        Command::Radial => cmd_radial(cfg),
        Command::Levels => cmd_levels(cfg),
        Command::Wavefunction => cmd_wavefunction(cfg),
    }
}

/// Runs one invocation and returns the process exit code: 0 on success,
/// 1 when a verification fails, 2 on configuration errors.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run_parsed(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("dsosc {}: {e}", cli.command.name());
            e.exit_code()
        }
    }
}

fn run_parsed(cli: &Cli) -> Result<(), CliError> {
    let cfg = resolve(&cli.flags)?;
    let emit = execute(cli.command, &cfg)?;
    match &cfg.output {
        Some(path) => {
            let file = std::fs::File::create(path)?;
            let mut buf = std::io::BufWriter::new(file);
            write_output(&emit, &cfg, &mut buf)?;
            buf.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_output(&emit, &cfg, &mut lock)?;
            lock.flush()?;
        }
    }
    if emit.failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(emit.failures))
    }
}

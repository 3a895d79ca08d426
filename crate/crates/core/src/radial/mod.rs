//! Separation of variables for one singular-oscillator component
//! `-hbar^2/2 Delta_m + omega^2 r^2 / 2 + c / r^2`: closed-form radial modes,
//! wavefunctions and an independent finite-volume eigensolver.
//!
//! In reduced units `c' = c / hbar^2`, `omega' = omega / hbar` and
//! `E' = E / hbar^2` the radial equation reads
//! `R'' + (m-1)/r R' + (2E' - omega'^2 r^2 - (2c' + l(l+m-2)) / r^2) R = 0`.

mod fd;
mod wave;

pub use fd::{
    default_r_max, fd_eigenvalues, fd_eigenvalues_with, fd_solve, frobenius_exponent, sign_changes, FdLevel,
    FdOptions, FdResult, GridSpec,
};
pub use wave::{
    kummer, norm_quadrature, printed_prefactor, printed_wavefunction, wavefunction, wavefunction_prefactor,
    wavefunction_sign_changes, QuadratureResult,
};

use crate::surd::{Surd, SurdField};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

type Q = BigRational;

fn qi(v: i64) -> Q {
    Q::from_integer(v.into())
}

pub(crate) fn to_f64(q: &Q) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RadialError {
    #[error("component dimension must be at least 1")]
    ZeroDimension,
    #[error("angular number l = {l} has no states in dimension {m}")]
    AngularOutOfRange { m: usize, l: u32 },
    #[error("coupling c = {0} is negative")]
    NegativeCoupling(String),
    #[error("{name} = {value} must be positive")]
    NonPositiveScale { name: &'static str, value: String },
    #[error("radius r = {0} must be positive")]
    NonPositiveRadius(f64),
    #[error("Kummer parameter b = {0} must be positive")]
    KummerParameter(f64),
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("r_max = {r_max} is below the turning point {turning}")]
    CutoffBelowTurningPoint { r_max: f64, turning: f64 },
    #[error("modes do not share hbar and omega")]
    ParameterMismatch,
    #[error("at least one eigenvalue must be requested")]
    EmptyRequest,
}

/// One component: dimension `m`, coupling `c`, angular number `l`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentSpec {
    pub m: usize,
    pub c: Q,
    pub l: u32,
    pub hbar: Q,
    pub omega: Q,
}

impl ComponentSpec {
    /// For `m = 1`, `l = 0` and `l = 1` select the even and odd sectors on
    /// the half-line `r = |x|`.
    pub fn new(m: usize, c: Q, l: u32, hbar: Q, omega: Q) -> Result<Self, RadialError> {
        if m == 0 {
            return Err(RadialError::ZeroDimension);
        }
        if m == 1 && l > 1 {
            return Err(RadialError::AngularOutOfRange { m, l });
        }
        if c.is_negative() {
            return Err(RadialError::NegativeCoupling(c.to_string()));
        }
        for (name, v) in [("hbar", &hbar), ("omega", &omega)] {
            if !v.is_positive() {
                return Err(RadialError::NonPositiveScale { name, value: v.to_string() });
            }
        }
        Ok(ComponentSpec { m, c, l, hbar, omega })
    }

    /// `c' = c / hbar^2`.
    pub fn c_reduced(&self) -> Q {
        &self.c / (&self.hbar * &self.hbar)
    }

    /// `omega' = omega / hbar`.
    pub fn omega_reduced(&self) -> Q {
        &self.omega / &self.hbar
    }

    /// `l (l + m - 2)`.
    pub fn angular_eigenvalue(&self) -> i64 {
        let l = self.l as i64;
        l * (l + self.m as i64 - 2)
    }

    /// True for one-dimensional components, solved on `r = |x|`.
    pub fn half_line(&self) -> bool {
        self.m == 1
    }

    /// `alpha^2 = (l + (m-2)/2)^2 + 2 c'`.
    pub fn alpha_sq(&self) -> Q {
        let shift = Q::new((2 * self.l as i64 + self.m as i64 - 2).into(), 2.into());
        &shift * &shift + qi(2) * self.c_reduced()
    }

    /// Sign of `alpha`. Without coupling `alpha = l + (m-2)/2`, which is
    /// `-1/2` for the even one-dimensional sector.
    pub fn alpha_sign(&self) -> i8 {
        if !self.c.is_zero() {
            return 1;
        }
        match (2 * self.l as i64 + self.m as i64 - 2).signum() {
            1 => 1,
            -1 => -1,
            _ => 0,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha_sign() as f64 * to_f64(&self.alpha_sq()).sqrt()
    }
}

/// Closed-form solution with radial number `nr`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialMode {
    pub spec: ComponentSpec,
    pub nr: u32,
    pub delta: f64,
    pub alpha: f64,
    pub energy: f64,
}

impl RadialMode {
    /// `alpha + 1`, the second Kummer parameter.
    pub fn kummer_b(&self) -> f64 {
        self.alpha + 1.0
    }

    /// Exponent `s = alpha - (m-2)/2` of `R ~ r^s` at the origin.
    pub fn origin_exponent(&self) -> f64 {
        self.alpha - (self.spec.m as f64 - 2.0) / 2.0
    }

    /// The energy as an exact rational, when `alpha` is rational.
    pub fn energy_exact(&self) -> Option<Q> {
        let a = crate::surd::rational_sqrt(&self.spec.alpha_sq())? * qi(self.spec.alpha_sign() as i64);
        let hw = &self.spec.hbar * &self.spec.omega;
        Some(hw * (qi(2 * self.nr as i64 + 1) + a))
    }
}

/// `alpha = sqrt((l + (m-2)/2)^2 + 2c')`, `delta = alpha/2 - (m-2)/4 - l/2`
/// and `E = 2 hbar omega (Nr + alpha/2 + 1/2)`.
pub fn closed_form(spec: &ComponentSpec, nr: u32) -> RadialMode {
    let alpha = spec.alpha();
    let delta = alpha / 2.0 - (spec.m as f64 - 2.0) / 4.0 - spec.l as f64 / 2.0;
    let hw = to_f64(&(&spec.hbar * &spec.omega));
    let energy = 2.0 * hw * (nr as f64 + alpha / 2.0 + 0.5);
    RadialMode { spec: spec.clone(), nr, delta, alpha, energy }
}

/// `delta` exactly as printed:
/// `sqrt((l/2 + (m-2)/4)^2 + c'/2) - (m-2)/4 - l/2`.
pub fn printed_delta(spec: &ComponentSpec) -> f64 {
    let (m, l) = (spec.m as f64, spec.l as f64);
    let c = to_f64(&spec.c_reduced());
    ((l / 2.0 + (m - 2.0) / 4.0).powi(2) + c / 2.0).sqrt() - (m - 2.0) / 4.0 - l / 2.0
}

/// Sum of two component energies, exact in `Q(|2 alpha_1|, |2 alpha_2|)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TotalEnergy {
    pub p: u32,
    pub value: f64,
    pub exact: Surd,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TotalEnergyRecord {
    pub p: u32,
    pub energy: f64,
    pub exact: String,
}

impl TotalEnergy {
    pub fn record(&self) -> TotalEnergyRecord {
        TotalEnergyRecord { p: self.p, energy: self.value, exact: self.exact.to_string() }
    }
}

/// `E = E_1 + E_2 = 2 hbar omega (p + 1 + (alpha_1 + alpha_2) / 2)`.
///
/// The exact value lives in the field generated by `sqrt(4 alpha_i^2)`.
pub fn total_energy(mode1: &RadialMode, mode2: &RadialMode) -> Result<TotalEnergy, RadialError> {
    let (s1, s2) = (&mode1.spec, &mode2.spec);
    if s1.hbar != s2.hbar || s1.omega != s2.omega {
        return Err(RadialError::ParameterMismatch);
    }
    let four = qi(4);
    let (_, g1, g2) = SurdField::adjoin(&(&four * s1.alpha_sq()), &(&four * s2.alpha_sq()))
        .expect("alpha^2 is non-negative");
    let half_q = Q::new(1.into(), 2.into());
    let a1 = g1.scale(&(&half_q * qi(s1.alpha_sign() as i64)));
    let a2 = g2.scale(&(&half_q * qi(s2.alpha_sign() as i64)));
    let hw = &s1.hbar * &s1.omega;
    let p = mode1.nr + mode2.nr;
    let component = |nr: u32, a: &Surd| a.scale(&half_q).add_rational(&(qi(nr as i64) + &half_q)).scale(&(qi(2) * &hw));
    let sum_form = &component(mode1.nr, &a1) + &component(mode2.nr, &a2);
    let p_form = (&a1 + &a2).scale(&half_q).add_rational(&qi(p as i64 + 1)).scale(&(qi(2) * &hw));
    assert_eq!(sum_form, p_form, "sum and p forms of the total energy disagree");
    let value = mode1.energy + mode2.energy;
    Ok(TotalEnergy { p, value, exact: p_form })
}

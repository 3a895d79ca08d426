//! Kummer polynomials, normalized radial wavefunctions and norm quadrature.

use super::{sign_changes, to_f64, RadialError, RadialMode};
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

/// `1F1(-nr; b; z)` by its terminating ascending series.
pub fn kummer(nr: u32, b: f64, z: f64) -> Result<f64, RadialError> {
    if b <= 0.0 || b.is_nan() {
        return Err(RadialError::KummerParameter(b));
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..nr {
        let k = k as f64;
        term *= (k - nr as f64) / ((b + k) * (k + 1.0)) * z;
        sum += term;
    }
    Ok(sum)
}

fn ln_factorial(n: u32) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// `C` such that `C r^s exp(-a r^2 / 2) 1F1(-Nr; alpha + 1; a r^2)` has
/// unit norm with measure `r^(m-1) dr`, where `a = omega'`:
/// `C = sqrt(2 Gamma(Nr + alpha + 1) / Nr!) a^((s + m/2)/2) / Gamma(alpha + 1)`.
pub fn wavefunction_prefactor(mode: &RadialMode) -> f64 {
    let a = to_f64(&mode.spec.omega_reduced());
    let s = mode.origin_exponent();
    let m = mode.spec.m as f64;
    let b = mode.kummer_b();
    let ln_c = 0.5 * (2f64.ln() + ln_gamma(mode.nr as f64 + b) - ln_factorial(mode.nr)) + 0.5 * (s + m / 2.0) * a.ln()
        - ln_gamma(b);
    ln_c.exp()
}

/// Radial wavefunction `R(r)`, normalized on `(0, inf)` with weight `r^(m-1)`.
pub fn wavefunction(mode: &RadialMode, r: f64) -> Result<f64, RadialError> {
    if r <= 0.0 || r.is_nan() {
        return Err(RadialError::NonPositiveRadius(r));
    }
    let a = to_f64(&mode.spec.omega_reduced());
    let u = a * r * r;
    let f = kummer(mode.nr, mode.kummer_b(), u)?;
    Ok(wavefunction_prefactor(mode) * r.powf(mode.origin_exponent()) * (-u / 2.0).exp() * f)
}

/// The prefactor in the form usually quoted for this solution,
/// `sqrt(2 Gamma(Nr + b) / Nr!) a / sqrt(b)` with `b = 2 (delta + l/2 + m/4)`.
pub fn printed_prefactor(mode: &RadialMode) -> f64 {
    let a = to_f64(&mode.spec.omega_reduced());
    let b = 2.0 * (mode.delta + mode.spec.l as f64 / 2.0 + mode.spec.m as f64 / 4.0);
    (0.5 * (2f64.ln() + ln_gamma(mode.nr as f64 + b) - ln_factorial(mode.nr))).exp() * a / b.sqrt()
}

/// The quoted closed form
/// `printed_prefactor * exp(-u/2) u^((delta + l/2)/2) 1F1(-Nr; b; u)`, `u = a r^2`.
pub fn printed_wavefunction(mode: &RadialMode, r: f64) -> Result<f64, RadialError> {
    if r <= 0.0 || r.is_nan() {
        return Err(RadialError::NonPositiveRadius(r));
    }
    let a = to_f64(&mode.spec.omega_reduced());
    let u = a * r * r;
    let b = 2.0 * (mode.delta + mode.spec.l as f64 / 2.0 + mode.spec.m as f64 / 4.0);
    let f = kummer(mode.nr, b, u)?;
    Ok(printed_prefactor(mode) * (-u / 2.0).exp() * u.powf((mode.delta + mode.spec.l as f64 / 2.0) / 2.0) * f)
}

/// Sign changes of the wavefunction sampled at `samples` interior points of
/// `(0, r_max)`.
pub fn wavefunction_sign_changes(mode: &RadialMode, r_max: f64, samples: usize) -> Result<usize, RadialError> {
    let h = r_max / (samples + 1) as f64;
    let values = (1..=samples).map(|i| wavefunction(mode, i as f64 * h)).collect::<Result<Vec<_>, _>>()?;
    Ok(sign_changes(&values))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub r_max: f64,
    pub intervals: usize,
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Kronrod-15 estimate and `|K15 - G7|` on `[lo, hi]`.
fn gk15(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

fn adaptive(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> (f64, f64, usize) {
    let mut stack = vec![(lo, hi, 0u32)];
    let (mut total, mut err, mut count) = (0.0, 0.0, 0);
    let width = hi - lo;
    while let Some((a, b, depth)) = stack.pop() {
        let (v, e) = gk15(f, a, b);
        if e <= tol * (b - a) / width || depth >= 40 {
            total += v;
            err += e;
            count += 1;
        } else {
            let mid = 0.5 * (a + b);
            stack.push((mid, b, depth + 1));
            stack.push((a, mid, depth + 1));
        }
    }
    (total, err, count)
}

/// `int_0^R psi(r)^2 r^(m-1) dr` with `R = max(8, sqrt(2 E') + 6) / sqrt(omega')`,
/// which reaches well past the classical turning point.
pub fn norm_quadrature(
    mode: &RadialMode,
    psi: impl Fn(f64) -> f64,
    tol: f64,
) -> QuadratureResult {
    let w = to_f64(&mode.spec.omega_reduced());
    let scaled = (2.0 * (2.0 * mode.nr as f64 + mode.alpha + 1.0)).sqrt() + 6.0;
    let r_max = scaled.max(8.0) / w.sqrt();
    let m = mode.spec.m as i32;
    let integrand = |r: f64| {
        if r <= 0.0 {
            return 0.0;
        }
        let v = psi(r);
        v * v * r.powi(m - 1)
    };
    let (value, error_estimate, intervals) = adaptive(&integrand, 0.0, r_max, tol);
    QuadratureResult { value, error_estimate, r_max, intervals }
}

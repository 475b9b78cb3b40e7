//! Closed-form continuum Berry phases.
//!
//! The general expression takes `−κy²` in the first term of the second
//! logarithm; with that reading it reduces exactly to the `m = 0` two-arctan
//! form. The `δ = 0` piecewise form is evaluated with the `1/(2π)` prefactor,
//! the `κy² − m(κx + m)` denominator, and the halved logarithm plus quadrant
//! arctangent inside the disc, which make it agree with the general expression
//! up to an integer.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{BerryPhase, Method};
use crate::linalg::{principal_ln, principal_sqrt, I};
use crate::model::ModelParams;
use crate::{Error, Result};

fn precondition(msg: &str) -> Error {
    Error::PreconditionViolation(msg.into())
}

/// `(m + iδ)/√((m + iδ)²)`, equal to `±1`.
pub fn mass_sign(m: f64, delta: f64) -> Result<Complex64> {
    let mm = Complex64::new(m, delta);
    if mm.norm() == 0.0 {
        return Err(precondition("m + iδ must be nonzero"));
    }
    Ok(mm / principal_sqrt(mm * mm))
}

fn checked_ln(num: Complex64, den: Complex64, what: &str) -> Result<Complex64> {
    if num.norm() == 0.0 || den.norm() == 0.0 {
        return Err(precondition(&format!("{what}: logarithm argument is 0 or ∞")));
    }
    Ok(principal_ln(num / den))
}

/// General continuum Berry phase with the inner square root taken as `root_sign·√(…)`.
pub fn general_with_root(p: &ModelParams, root_sign: f64) -> Result<Complex64> {
    let (kx, ky) = (p.kappa_x, p.kappa_y);
    let mm = p.mass();
    let pre = mass_sign(p.m, p.delta)?;
    let l1 = checked_ln(kx + mm, kx - mm, "first logarithm")?;
    let s = root_sign * principal_sqrt(mm * mm - kx * kx - ky * ky);
    let num = -ky * ky - mm * (kx - mm) + I * ky * s;
    let den = -ky * ky + mm * (kx + mm) + I * ky * s;
    let l2 = checked_ln(num, den, "second logarithm")?;
    Ok(-I / (2.0 * PI) * pre * (l1 + l2))
}

pub fn berry_phase_analytic_general(p: &ModelParams) -> Result<BerryPhase> {
    Ok(BerryPhase::exact(general_with_root(p, 1.0)?, Method::AnalyticGeneral))
}

/// `½(m + iδ)/√((m + iδ)²)` when one in-plane component of κ vanishes.
pub fn berry_phase_axis_case(p: &ModelParams) -> Result<BerryPhase> {
    if p.kappa_x != 0.0 && p.kappa_y != 0.0 {
        return Err(precondition("axis case needs κx = 0 or κy = 0"));
    }
    Ok(BerryPhase::exact(0.5 * mass_sign(p.m, p.delta)?, Method::AnalyticAxis))
}

/// Two-arctangent form for `m = 0`.
pub fn berry_phase_m0(p: &ModelParams) -> Result<BerryPhase> {
    if p.m != 0.0 || p.delta == 0.0 {
        return Err(precondition("needs m = 0 and δ ≠ 0"));
    }
    let (d, kx, ky) = (p.delta, p.kappa_x, p.kappa_y);
    let r = (kx * kx + ky * ky + d * d).sqrt();
    let den = ky * ky + d * d + ky * r;
    if den == 0.0 {
        return Err(precondition("second arctangent undefined"));
    }
    let g = d.signum() / PI * ((d / kx).atan() + (d * kx / den).atan());
    Ok(BerryPhase::exact(Complex64::new(g, 0.0), Method::AnalyticM0))
}

/// `δ = 0` form on the branch `κx² + κy² ≥ m²`.
pub fn delta0_outer(m: f64, kx: f64, ky: f64) -> Result<Complex64> {
    let s = m.signum();
    let k2 = kx * kx + ky * ky;
    let q = (k2 - m * m).max(0.0).sqrt();
    let c = |x: f64| Complex64::new(x, 0.0);
    let l1 = checked_ln(c(kx + m), c(kx - m), "first logarithm")?;
    let l2 = checked_ln(c(ky * ky + m * (kx - m) + ky * q), c(ky * ky - m * (kx + m) + ky * q), "second logarithm")?;
    Ok(-I * s / (2.0 * PI) * (l1 + l2))
}

/// `δ = 0` form on the branch `κx² + κy² < m²`.
pub fn delta0_inner(m: f64, kx: f64, ky: f64) -> Result<Complex64> {
    let s = m.signum();
    let w = (m * m - kx * kx - ky * ky).max(0.0);
    let c = |x: f64| Complex64::new(x, 0.0);
    let l1 = checked_ln(c(kx + m), c(kx - m), "first logarithm")?;
    let a = m * m * w - kx * kx * ky * ky;
    let num = a * a + 4.0 * m * m * kx * kx * ky * ky * w;
    let den = (ky * ky - m * (kx + m)).powi(2) + ky * ky * w;
    let l2 = 0.5 * checked_ln(c(num), c(den * den), "second logarithm")?;
    let y = 2.0 * m * kx * ky * w.sqrt() + 0.0;
    let theta = y.atan2(a);
    Ok(-I * s / (2.0 * PI) * (l1 + l2) + s / (2.0 * PI) * theta)
}

pub fn berry_phase_delta0(p: &ModelParams) -> Result<BerryPhase> {
    if p.delta != 0.0 || p.m == 0.0 {
        return Err(precondition("needs δ = 0 and m ≠ 0"));
    }
    let (m, kx, ky) = (p.m, p.kappa_x, p.kappa_y);
    let g = if kx * kx + ky * ky >= m * m { delta0_outer(m, kx, ky)? } else { delta0_inner(m, kx, ky)? };
    Ok(BerryPhase::exact(g, Method::AnalyticDelta0))
}

/// Every closed form whose precondition holds at `p`.
pub fn applicable_analytic(p: &ModelParams) -> Vec<(Method, Result<BerryPhase>)> {
    let mut out = vec![(Method::AnalyticGeneral, berry_phase_analytic_general(p))];
    if p.kappa_x == 0.0 || p.kappa_y == 0.0 {
        out.push((Method::AnalyticAxis, berry_phase_axis_case(p)));
    }
    if p.m == 0.0 && p.delta != 0.0 {
        out.push((Method::AnalyticM0, berry_phase_m0(p)));
    }
    if p.delta == 0.0 && p.m != 0.0 {
        out.push((Method::AnalyticDelta0, berry_phase_delta0(p)));
    }
    out
}

//! Complex Berry connection and curvature of the occupied band.
//!
//! Three curvature routes are provided: the closed form `h_z/(2E³)`, the
//! projector trace `i·Tr(P[∂ₓP, ∂ᵧP])` with central differences, and a
//! biorthogonal Wilson loop around a small plaquette.

use num_complex::Complex64;
use serde::Serialize;

use crate::eigensystem::{eigensystem_following, Band, BiorthogonalSystem};
use crate::linalg::{principal_ln, principal_sqrt, I};
use crate::model::{build_field, ModelParams, Momentum};
use crate::{Error, Result};

pub const DEFAULT_TRACE_STEP: f64 = 1e-4;
pub const DEFAULT_PLAQUETTE_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConnectionSample {
    pub a_x: Complex64,
    pub a_y: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    ClosedForm,
    ProjectorTrace,
    Plaquette,
}

impl Route {
    pub fn name(self) -> &'static str {
        match self {
            Route::ClosedForm => "closed_form",
            Route::ProjectorTrace => "projector_trace",
            Route::Plaquette => "plaquette",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureSample {
    pub omega: Complex64,
    pub omega_r: f64,
    pub omega_i: f64,
    pub route: Route,
    pub singular: bool,
}

impl CurvatureSample {
    fn new(omega: Complex64, route: Route, singular: bool) -> Self {
        let (omega_r, omega_i) = split(omega);
        CurvatureSample { omega, omega_r, omega_i, route, singular }
    }
}

fn split(omega: Complex64) -> (f64, f64) {
    (2.0 * omega.re, 2.0 * omega.im)
}

fn singular(k: &Momentum, reason: &str) -> Error {
    Error::SingularPoint { kx: k.kx, ky: k.ky, reason: reason.into() }
}

/// Momentum scale over which `h·h` changes by its own size. Finite-difference
/// steps well below this keep the truncation error small near exceptional points.
pub fn local_scale(p: &ModelParams, k: &Momentum) -> f64 {
    let f = build_field(p, k);
    let g = f.hx.norm().max(f.hy.norm());
    if g == 0.0 {
        f64::INFINITY
    } else {
        f.norm_sq.norm() / g
    }
}

/// `A_x = −h_y/(2E_−(E_− − h_z))`, `A_y = h_x/(2E_−(E_− − h_z))` with `E_− = −√(h·h)`.
pub fn connection_closed_form(p: &ModelParams, k: &Momentum) -> Result<ConnectionSample> {
    let f = build_field(p, k);
    let e_minus = -principal_sqrt(f.norm_sq);
    let den = 2.0 * e_minus * (e_minus - f.hz);
    if den.norm() < p.eps_sing() {
        return Err(singular(k, "E(E - h_z) vanishes"));
    }
    Ok(ConnectionSample { a_x: -f.hy / den, a_y: f.hx / den })
}

/// `Ω_− = h_z/(2E³)` on the principal branch.
pub fn curvature_closed_form(p: &ModelParams, k: &Momentum) -> Result<CurvatureSample> {
    let f = build_field(p, k);
    let e = principal_sqrt(f.norm_sq);
    if e.norm() == 0.0 {
        return Err(singular(k, "exceptional point"));
    }
    let omega = f.hz / (2.0 * e * e * e);
    Ok(CurvatureSample::new(omega, Route::ClosedForm, e.norm() < p.eps_sing()))
}

/// `Ω_−† = h_z*/(2E*³)`.
pub fn curvature_dagger(p: &ModelParams, k: &Momentum) -> Result<Complex64> {
    let f = build_field(p, k);
    let e = principal_sqrt(f.norm_sq).conj();
    if e.norm() == 0.0 {
        return Err(singular(k, "exceptional point"));
    }
    Ok(f.hz.conj() / (2.0 * e * e * e))
}

/// `(Ω^r, Ω^i) = (2 Re Ω, 2 Im Ω)`, so that `Ω = (Ω^r + iΩ^i)/2`.
pub fn curvature_split(c: &CurvatureSample) -> (f64, f64) {
    split(c.omega)
}

/// Real and imaginary curvature expanded in `E^r`, `E^i`:
/// numerators cubic in the split energies over `2^{3/2}|E|⁶`.
pub fn curvature_split_expanded(p: &ModelParams, k: &Momentum) -> Result<(f64, f64)> {
    let b = crate::model::bands_at(p, k);
    if b.modulus == 0.0 {
        return Err(singular(k, "exceptional point"));
    }
    let (m, d) = (p.m, p.delta);
    let er = b.e_r;
    let ei = b.mu_effective() * b.e_i;
    let den = 2.0_f64.powf(1.5) * b.modulus.powi(6);
    let r = m * er.powi(3) - d * ei.powi(3) - 3.0 * m * er * ei * ei + 3.0 * d * er * er * ei;
    let i = m * ei.powi(3) + d * er.powi(3) - 3.0 * m * er * er * ei - 3.0 * d * er * ei * ei;
    Ok((r / den, i / den))
}

fn stencil(p: &ModelParams, k: &Momentum, reference: Complex64, dx: f64, dy: f64) -> Result<BiorthogonalSystem> {
    let q = Momentum::new(k.kx + dx, k.ky + dy);
    let s = eigensystem_following(p, &q, reference);
    s.check_nondegenerate().map_err(|_| singular(&q, "degenerate stencil point"))?;
    Ok(s)
}

/// `Ω_− = i·Tr(P_−[∂ₓP_−, ∂ᵧP_−])` by central differences.
pub fn curvature_projector_trace(p: &ModelParams, k: &Momentum, step: f64) -> Result<CurvatureSample> {
    curvature_projector_trace_band(p, k, step, Band::Minus)
}

/// Projector-trace curvature of either band; `Ω_+ = −Ω_−`.
pub fn curvature_projector_trace_band(
    p: &ModelParams,
    k: &Momentum,
    step: f64,
    band: Band,
) -> Result<CurvatureSample> {
    if !(step > 0.0) {
        return Err(Error::InvalidParams("finite-difference step must be positive".into()));
    }
    let f = build_field(p, k);
    let reference = principal_sqrt(f.norm_sq);
    let c = stencil(p, k, reference, 0.0, 0.0)?;
    let pm = |dx, dy| -> Result<_> { Ok(stencil(p, k, reference, dx, dy)?.projector_matrix(band)) };
    let inv = Complex64::new(0.5 / step, 0.0);
    let dpx = (pm(step, 0.0)? - pm(-step, 0.0)?).scale(inv);
    let dpy = (pm(0.0, step)? - pm(0.0, -step)?).scale(inv);
    let pc = c.projector_matrix(band);
    let omega = I * c.trace(&(pc * dpx.commutator(&dpy)));
    Ok(CurvatureSample::new(omega, Route::ProjectorTrace, false))
}

/// Wilson-loop curvature from four corner systems ordered counter-clockwise.
///
/// Each link `F = ⟨φ_i|ψ_{i+1}⟩` is divided by `√(F·⟨φ_{i+1}|ψ_i⟩)`. The bare
/// product carries a second-order term from the (complex) quantum metric that
/// survives the `1/step²` scaling; the normalised link's logarithm is the
/// integral of the connection along the edge to second order. With Hermitian
/// eigenvectors this is the usual unit-modulus link.
///
/// Corners 2–4 are re-gauged so that their overlap with corner 1 is real
/// positive; a link phase beyond `π/2` then means the plaquette is too coarse.
pub fn plaquette_from_corners(corners: &[BiorthogonalSystem; 4], band: Band, step: f64) -> Result<CurvatureSample> {
    let mut c = *corners;
    let phi0 = c[0].left(band);
    for s in c.iter_mut().skip(1) {
        let ov = phi0.inner(&s.right(band));
        if ov.norm() == 0.0 {
            return Err(Error::BranchJump { phase: std::f64::consts::PI });
        }
        *s = s.regauge(band, ov.conj() / ov.norm());
    }
    let mut w = Complex64::new(1.0, 0.0);
    for i in 0..4 {
        let j = (i + 1) % 4;
        let fwd = c[i].left(band).inner(&c[j].right(band));
        let bwd = c[j].left(band).inner(&c[i].right(band));
        let link = fwd / principal_sqrt(fwd * bwd);
        let phase = link.arg();
        if phase.abs() > std::f64::consts::FRAC_PI_2 {
            return Err(Error::BranchJump { phase });
        }
        w *= link;
    }
    let omega = I * principal_ln(w) / (step * step);
    Ok(CurvatureSample::new(omega, Route::Plaquette, false))
}

pub fn curvature_plaquette(p: &ModelParams, k: &Momentum, step: f64) -> Result<CurvatureSample> {
    if !(step > 0.0) {
        return Err(Error::InvalidParams("plaquette side must be positive".into()));
    }
    let reference = principal_sqrt(build_field(p, k).norm_sq);
    let h = 0.5 * step;
    let corners = [
        stencil(p, k, reference, -h, -h)?,
        stencil(p, k, reference, h, -h)?,
        stencil(p, k, reference, h, h)?,
        stencil(p, k, reference, -h, h)?,
    ];
    plaquette_from_corners(&corners, Band::Minus, step)
}

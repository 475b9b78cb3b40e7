//! Berry phase `γ_− = (1/4π)∫ h_z/E³ d²k` by quadrature, and the closed-form
//! continuum expressions.
//!
//! The integrand uses the principal root `E`, which changes sign across the
//! segment of the line `k·κ = 0` inside the circle `k² = κ²` (the branch cut,
//! ending at the exceptional points). Domains are therefore split along that
//! line and the exceptional points are made triangle vertices.

pub mod analytic;
pub mod extrapolate;
pub mod geometry;
pub mod quadrature;
pub mod sum;

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::linalg::principal_sqrt;
use crate::model::{build_field, ModelParams, Momentum};
use crate::spectral::exceptional_points_unbounded;
use crate::{Error, Result};
use geometry::{clip, fan, insert_on_boundary, square, Line, Point, Triangle};
use quadrature::{AdaptiveConfig, AdaptiveResult, Integrator};
use sum::pairwise_sum;

pub use analytic::{
    applicable_analytic, berry_phase_analytic_general, berry_phase_axis_case, berry_phase_delta0, berry_phase_m0,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Grid,
    Adaptive,
    AnalyticGeneral,
    AnalyticAxis,
    AnalyticM0,
    AnalyticDelta0,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Grid => "grid",
            Method::Adaptive => "adaptive",
            Method::AnalyticGeneral => "analytic_general",
            Method::AnalyticAxis => "analytic_axis",
            Method::AnalyticM0 => "analytic_m0",
            Method::AnalyticDelta0 => "analytic_delta0",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BerryPhase {
    pub gamma: Complex64,
    pub gamma_r: f64,
    pub gamma_i: f64,
    pub method: Method,
    pub est_error: f64,
}

impl BerryPhase {
    pub fn new(gamma: Complex64, method: Method, est_error: f64) -> Self {
        BerryPhase { gamma, gamma_r: gamma.re, gamma_i: gamma.im, method, est_error }
    }

    pub(crate) fn exact(gamma: Complex64, method: Method) -> Self {
        Self::new(gamma, method, 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureConfig {
    pub grid_n: usize,
    pub adaptive_tol: f64,
    pub singular_exclusion_radius: f64,
    /// Square half-widths for the continuum limit, in units of the parameter norm.
    pub continuum_radii: Vec<f64>,
    pub max_depth: u32,
    pub max_cells: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            grid_n: 256,
            adaptive_tol: 1e-8,
            singular_exclusion_radius: 1e-4,
            continuum_radii: vec![10.0, 20.0, 40.0, 80.0],
            max_depth: 30,
            max_cells: 2_000_000,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |s: &str| Err(Error::InvalidParams(s.into()));
        if self.grid_n < 16 {
            return bad("grid_n must be at least 16");
        }
        if !(self.adaptive_tol > 0.0) || !(self.singular_exclusion_radius > 0.0) {
            return bad("tolerances must be positive");
        }
        if self.continuum_radii.is_empty() || self.continuum_radii.iter().any(|r| !(*r > 0.0) || !r.is_finite()) {
            return bad("continuum_radii must be a non-empty list of positive radii");
        }
        if self.max_depth == 0 || self.max_cells == 0 {
            return bad("max_depth and max_cells must be positive");
        }
        Ok(())
    }

    fn adaptive(&self) -> AdaptiveConfig {
        AdaptiveConfig {
            tol: self.adaptive_tol,
            exclusion_radius: self.singular_exclusion_radius,
            max_depth: self.max_depth,
            max_cells: self.max_cells,
        }
    }
}

/// `h_z/(4πE³)` on the principal branch; zero exactly at exceptional points.
pub fn integrand(p: &ModelParams, k: Point) -> Complex64 {
    let f = build_field(p, &Momentum::new(k[0], k[1]));
    let e = principal_sqrt(f.norm_sq);
    if e.norm() == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    f.hz / (4.0 * PI * e * e * e)
}

/// Triangulation of `[c − h, c + h]²` split along the branch line, with
/// in-domain exceptional points as singular vertices.
pub fn triangulate(p: &ModelParams, center: Point, half_width: f64) -> Vec<Triangle> {
    let sq = square(center, half_width);
    let tol = 1e-9 * half_width.max(1.0);
    if p.kappa_x == 0.0 && p.kappa_y == 0.0 {
        return fan(&sq, &[], tol);
    }
    let line = Line { n: [p.kappa_x, p.kappa_y], c: -p.m * p.delta };
    let inside = |q: &Momentum| {
        (q.kx - center[0]).abs() < half_width - tol && (q.ky - center[1]).abs() < half_width - tol
    };
    let eps: Vec<Point> = exceptional_points_unbounded(p).iter().filter(|q| inside(q)).map(|q| [q.kx, q.ky]).collect();
    let mut tris = Vec::new();
    for side in [1.0, -1.0] {
        let mut poly = clip(&sq, &line, side);
        if poly.len() < 3 {
            continue;
        }
        for e in &eps {
            insert_on_boundary(&mut poly, *e, tol);
        }
        tris.extend(fan(&poly, &eps, tol));
    }
    tris
}

fn reject_exceptional_circle(p: &ModelParams) -> Result<()> {
    if p.kappa_x == 0.0 && p.kappa_y == 0.0 && p.m == 0.0 && p.delta != 0.0 {
        return Err(Error::NonConvergent(format!(
            "ring of exceptional points of radius {} makes the curvature non-integrable",
            p.delta.abs()
        )));
    }
    Ok(())
}

fn adaptive_square(p: &ModelParams, half_width: f64, cfg: &QuadratureConfig) -> Result<AdaptiveResult> {
    let tris = triangulate(p, [0.0, 0.0], half_width);
    let f = |k: Point| integrand(p, k);
    Integrator::default().integrate(&tris, &f, &cfg.adaptive())
}

/// Continuum Berry phase: adaptive quadrature over centred squares of growing
/// half-width, extrapolated in the inverse cutoff.
///
/// `γ` is invariant under a common rescaling of momenta and parameters, so the
/// parameters are first normalised to unit norm.
pub fn berry_phase_numeric(p: &ModelParams, cfg: &QuadratureConfig) -> Result<BerryPhase> {
    p.validate()?;
    cfg.validate()?;
    if p.mass().norm() == 0.0 {
        return Ok(BerryPhase::exact(Complex64::new(0.0, 0.0), Method::Adaptive));
    }
    reject_exceptional_circle(p)?;
    let s = p.norm();
    let q = ModelParams { m: p.m / s, delta: p.delta / s, kappa_x: p.kappa_x / s, kappa_y: p.kappa_y / s, ..*p };
    let per_radius: Vec<Result<AdaptiveResult>> =
        cfg.continuum_radii.par_iter().map(|&l| adaptive_square(&q, l, cfg)).collect();
    let mut vals = Vec::with_capacity(per_radius.len());
    let mut errs = Vec::with_capacity(per_radius.len());
    for r in per_radius {
        let r = r?;
        vals.push(r.value);
        errs.push(r.est_error);
    }
    let ex = extrapolate::extrapolate(&cfg.continuum_radii, &vals);
    let quad_err = errs.iter().cloned().fold(0.0, f64::max) * ex.noise_gain;
    Ok(BerryPhase::new(ex.value, Method::Adaptive, ex.fit_error + quad_err))
}

/// Adaptive quadrature over the Brillouin zone `[−w, w]²`.
pub fn berry_phase_bz(p: &ModelParams, cfg: &QuadratureConfig) -> Result<BerryPhase> {
    p.validate()?;
    cfg.validate()?;
    reject_exceptional_circle(p)?;
    let r = adaptive_square(p, p.bz_half_width, cfg)?;
    Ok(BerryPhase::new(r.value, Method::Adaptive, r.est_error))
}

fn midpoint_grid(p: &ModelParams, n: usize) -> Complex64 {
    let w = p.bz_half_width;
    let h = 2.0 * w / n as f64;
    let rows: Vec<Complex64> = (0..n)
        .into_par_iter()
        .map(|j| {
            let ky = -w + (j as f64 + 0.5) * h;
            let row: Vec<Complex64> = (0..n).map(|i| integrand(p, [-w + (i as f64 + 0.5) * h, ky])).collect();
            pairwise_sum(&row)
        })
        .collect();
    pairwise_sum(&rows) * (h * h)
}

/// Midpoint rule on a `grid_n × grid_n` grid over the Brillouin zone. The
/// error estimate is the change from the half-resolution grid.
pub fn berry_phase_grid(p: &ModelParams, cfg: &QuadratureConfig) -> Result<BerryPhase> {
    p.validate()?;
    cfg.validate()?;
    let fine = midpoint_grid(p, cfg.grid_n);
    let coarse = midpoint_grid(p, cfg.grid_n / 2);
    Ok(BerryPhase::new(fine, Method::Grid, (fine - coarse).norm()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchResolution {
    /// `principal` or `flipped_root` (inner square root negated).
    pub candidate: &'static str,
    /// Integer added to the closed form.
    pub shift: i64,
    pub resolved: Complex64,
    pub discrepancy: f64,
    /// Neither branch candidate reaches the numeric value within tolerance.
    pub ambiguous: bool,
}

/// Chooses the branch of the general closed form closest to a numeric value.
///
/// Changing the branch of either logarithm moves `γ` by an integer; changing
/// the sign of the inner square root gives the second candidate.
pub fn resolve_general_branch(p: &ModelParams, numeric: Complex64, tol: f64) -> Result<BranchResolution> {
    let mut best: Option<BranchResolution> = None;
    for (name, sign) in [("principal", 1.0), ("flipped_root", -1.0)] {
        let g = analytic::general_with_root(p, sign)?;
        let shift = (numeric.re - g.re).round();
        let resolved = g + shift;
        let discrepancy = (resolved - numeric).norm();
        if best.as_ref().is_none_or(|b| discrepancy < b.discrepancy) {
            best = Some(BranchResolution {
                candidate: name,
                shift: shift as i64,
                resolved,
                discrepancy,
                ambiguous: discrepancy > tol,
            });
        }
    }
    Ok(best.expect("two candidates"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangulation_covers_square() {
        let p = ModelParams::new(0.5, 0.4, 0.8, 0.3).unwrap();
        let tris = triangulate(&p, [0.0, 0.0], 1.0);
        let area: f64 = tris.iter().map(|t| t.area()).sum();
        assert!((area - 4.0).abs() < 1e-12);
        assert_eq!(tris.iter().filter(|t| t.singular_a).count(), 8);
    }

    #[test]
    fn zero_mass_gives_zero() {
        let p = ModelParams::new(0.0, 0.0, 0.3, 0.2).unwrap();
        assert_eq!(berry_phase_numeric(&p, &QuadratureConfig::default()).unwrap().gamma, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn config_validation() {
        let mut c = QuadratureConfig::default();
        c.grid_n = 8;
        assert!(c.validate().is_err());
    }
}

//! Subcommand implementations. Each returns a [`Report`]; rows are always in
//! grid or sweep order so the output does not depend on the worker count.

use rayon::prelude::*;
use serde_json::{json, Value};

use super::output::{Cell, Report};
use super::{CliError, Command, DomainArg, GammaSource, MethodArg, RouteArg, Settings, Sweep};
use crate::berry::{curvature_closed_form, curvature_plaquette, curvature_projector_trace, CurvatureSample};
use crate::integration::{
    applicable_analytic, berry_phase_analytic_general, berry_phase_axis_case, berry_phase_bz, berry_phase_delta0,
    berry_phase_grid, berry_phase_m0, berry_phase_numeric, resolve_general_branch, BerryPhase, QuadratureConfig,
};
use crate::model::{bands_at, ModelParams, Momentum};
use crate::response::admittance_in;
use crate::spectral::{band_grid_scan, classify_gap, gap_closing_solutions, linspace, ExceptionalKind};
use crate::Result;

pub fn run(s: &Settings, command: &Command) -> std::result::Result<Report, CliError> {
    let p = &s.params;
    let report = match command {
        Command::Bands { nx, ny } => bands(p, *nx, *ny)?,
        Command::Curvature { nx, ny, route, trace_step, plaquette_step } => {
            curvature(p, *nx, *ny, *route, *trace_step, *plaquette_step)?
        }
        Command::BerryPhase { fig4_table: true, .. } => fig4_table(),
        Command::BerryPhase { method, domain, tol, .. } => berry_phase(p, &s.quadrature, *method, *domain, *tol)?,
        Command::GapScan { nx, ny, threshold } => gap_scan(p, *nx, *ny, *threshold)?,
        Command::PhaseDiagram { sweep_x, sweep_y, scan_n, threshold, gamma_source } => {
            phase_diagram(p, &s.quadrature, sweep_x, sweep_y, *scan_n, *threshold, *gamma_source)?
        }
        Command::Admittance { units, gamma_source, .. } => {
            let omega = s.omega.ok_or_else(|| CliError::Config("admittance needs --omega".into()))?;
            let g = gamma_for(p, &s.quadrature, *gamma_source)?;
            let a = admittance_in(&g, omega, (*units).into())?;
            let opt = |x: Option<f64>| Cell::F(x.unwrap_or(f64::NAN));
            let row = vec![
                a.gamma_r.into(),
                a.gamma_i.into(),
                a.sigma_h.into(),
                a.susceptance_b.into(),
                Cell::S(serde_json::to_value(a.character).unwrap().as_str().unwrap_or("").to_string()),
                opt(a.capacitance),
                opt(a.inductance),
                a.omega.into(),
            ];
            let cols = vec![
                "gamma_r",
                "gamma_i",
                "sigma_h",
                "susceptance_b",
                "character",
                "capacitance",
                "inductance",
                "omega",
            ];
            let mut r = Report::table(cols, vec![row]);
            r.results = json!({ "admittance": a, "gamma": g });
            r
        }
    };
    Ok(report)
}

/// `+0.0` for a zero, so negated zeros print without a sign.
fn neg(x: f64) -> f64 {
    -x + 0.0
}

fn bands(p: &ModelParams, nx: usize, ny: usize) -> Result<Report> {
    let g = band_grid_scan(p, nx, ny)?;
    let mut rows = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let n = g.index(i, j);
            let (re, im) = (g.e_plus_re[n], g.e_plus_im[n]);
            rows.push(vec![g.kxs[i].into(), g.kys[j].into(), re.into(), im.into(), neg(re).into(), neg(im).into()]);
        }
    }
    let cols = vec!["kx", "ky", "re_E_plus", "im_E_plus", "re_E_minus", "im_E_minus"];
    let c = classify_gap(&g, crate::spectral::DEFAULT_GAP_THRESHOLD);
    let (ai, aj) = g.argmin_abs_e();
    let summary = json!({
        "min_abs_e": g.min_abs_e,
        "min_re_gap": g.min_re_gap,
        "min_im_gap": g.min_im_gap,
        "argmin_abs_e": [g.kxs[ai], g.kys[aj]],
        "classification": c,
    });
    let mut r = Report::table(cols, rows);
    r.diagnostics = json!({ "summary": summary });
    r.summary = Some(summary);
    Ok(r)
}

fn curvature(p: &ModelParams, nx: usize, ny: usize, route: RouteArg, trace: f64, plaq: f64) -> Result<Report> {
    p.validate()?;
    if nx < 2 || ny < 2 {
        return Err(crate::Error::InvalidParams("grid dimensions must be at least 2".into()));
    }
    type Eval<'a> = Box<dyn Fn(&Momentum) -> Result<CurvatureSample> + Sync + 'a>;
    let mut routes: Vec<(&'static str, &'static str, Eval)> = Vec::new();
    let all = route == RouteArg::All;
    if all || route == RouteArg::ClosedForm {
        routes.push(("re_omega_closed_form", "im_omega_closed_form", Box::new(|k| curvature_closed_form(p, k))));
    }
    if all || route == RouteArg::ProjectorTrace {
        routes.push(("re_omega_trace", "im_omega_trace", Box::new(move |k| curvature_projector_trace(p, k, trace))));
    }
    if all || route == RouteArg::Plaquette {
        routes.push(("re_omega_plaquette", "im_omega_plaquette", Box::new(move |k| curvature_plaquette(p, k, plaq))));
    }
    let w = p.bz_half_width;
    let (kxs, kys) = (linspace(-w, w, nx), linspace(-w, w, ny));
    let rows: Vec<(Vec<Cell>, Vec<Value>)> = kys
        .par_iter()
        .flat_map_iter(|&ky| {
            let routes = &routes;
            kxs.iter().map(move |&kx| {
                let k = Momentum::new(kx, ky);
                let mut row = vec![kx.into(), ky.into()];
                let mut fails = Vec::new();
                for (name, _, f) in routes {
                    match f(&k) {
                        Ok(c) => row.extend([c.omega.re.into(), c.omega.im.into()]),
                        Err(e) => {
                            row.extend([f64::NAN.into(), f64::NAN.into()]);
                            fails.push(json!({ "kx": kx, "ky": ky, "column": name, "error": e.to_string() }));
                        }
                    }
                }
                (row, fails)
            })
        })
        .collect();
    let mut cols = vec!["kx", "ky"];
    for (a, b, _) in &routes {
        cols.extend([*a, *b]);
    }
    let (rows, fails): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    let fails: Vec<Value> = fails.into_iter().flatten().collect();
    let mut r = Report::table(cols, rows);
    r.diagnostics = json!({ "failed_evaluations": fails });
    Ok(r)
}

fn numeric(p: &ModelParams, q: &QuadratureConfig, method: MethodArg, domain: DomainArg) -> Result<BerryPhase> {
    match (method, domain) {
        (MethodArg::Adaptive, DomainArg::Continuum) => berry_phase_numeric(p, q),
        (MethodArg::Adaptive, DomainArg::Bz) => berry_phase_bz(p, q),
        (MethodArg::Grid, DomainArg::Bz) => berry_phase_grid(p, q),
        (MethodArg::Grid, DomainArg::Continuum) => {
            Err(crate::Error::InvalidParams("the grid method integrates over the Brillouin zone only".into()))
        }
    }
}

fn berry_phase(p: &ModelParams, q: &QuadratureConfig, method: MethodArg, domain: DomainArg, tol: f64) -> Result<Report> {
    let num = numeric(p, q, method, domain)?;
    let mut rows = vec![vec![
        num.method.name().into(),
        num.gamma_r.into(),
        num.gamma_i.into(),
        num.est_error.into(),
        0.0.into(),
    ]];
    let mut analytic = Vec::new();
    let mut analytic_errors = Vec::new();
    for (m, res) in applicable_analytic(p) {
        match res {
            Ok(g) => {
                let d = (g.gamma - num.gamma).norm();
                rows.push(vec![m.name().into(), g.gamma_r.into(), g.gamma_i.into(), 0.0.into(), d.into()]);
                analytic.push(json!({ "method": m.name(), "gamma": g, "abs_discrepancy": d }));
            }
            Err(e) => analytic_errors.push(json!({ "method": m.name(), "error": e.to_string() })),
        }
    }
    let mut ambiguity = Vec::new();
    let branch = if domain == DomainArg::Continuum {
        match resolve_general_branch(p, num.gamma, tol) {
            Ok(b) => {
                if b.ambiguous {
                    ambiguity.push(json!({
                        "kind": "branch_ambiguity",
                        "discrepancy": b.discrepancy,
                        "tolerance": tol,
                    }));
                }
                json!(b)
            }
            Err(e) => json!({ "error": e.to_string() }),
        }
    } else {
        Value::Null
    };
    let eps = gap_closing_solutions(p);
    let cols = vec!["source", "re_gamma", "im_gamma", "est_error", "abs_discrepancy"];
    let mut r = Report::table(cols, rows);
    r.results = json!({ "numeric": num, "analytic": analytic, "branch_resolution": branch });
    r.diagnostics = json!({
        "branch_ambiguity": ambiguity,
        "analytic_errors": analytic_errors,
        "exceptional_points_in_bz": eps.points,
        "exceptional_kind": eps.kind,
    });
    Ok(r)
}

fn sign(x: f64) -> i64 {
    if x.abs() < 1e-12 {
        0
    } else {
        x.signum() as i64
    }
}

/// 21 × 21 table of the general closed form with `κx = κy = κ ∈ [−1, 1]`
/// and `m = δ ∈ [0.05, 1]`, against the expected pattern
/// `sign Re γ = sign κ`, `sign Im γ = −sign κ`. Cells with `κ = 0` carry no
/// expectation.
pub fn fig4_table() -> Report {
    let kappas = linspace(-1.0, 1.0, 21);
    let masses = linspace(0.05, 1.0, 21);
    let mut rows = Vec::new();
    let mut flagged = Vec::new();
    for &m in &masses {
        for &k in &kappas {
            let k = if k.abs() < 1e-12 { 0.0 } else { k };
            let p = ModelParams { m, delta: m, kappa_x: k, kappa_y: k, bz_half_width: 1.0 };
            let (g, err) = match berry_phase_analytic_general(&p) {
                Ok(b) => (b.gamma, None),
                Err(e) => (crate::Complex64::new(f64::NAN, f64::NAN), Some(e.to_string())),
            };
            let (sr, si) = (sign(g.re), sign(g.im));
            let claim = k != 0.0 && err.is_none();
            let re_ok = !claim || sr == sign(k);
            let im_ok = !claim || si == -sign(k);
            if !(re_ok && im_ok) {
                flagged.push(json!({ "kappa": k, "m": m, "re_agrees": re_ok, "im_agrees": im_ok }));
            }
            if let Some(e) = err {
                flagged.push(json!({ "kappa": k, "m": m, "error": e }));
            }
            rows.push(vec![
                k.into(),
                m.into(),
                g.re.into(),
                g.im.into(),
                sr.into(),
                si.into(),
                claim.into(),
                re_ok.into(),
                im_ok.into(),
            ]);
        }
    }
    let cols = vec![
        "kappa",
        "m",
        "re_gamma",
        "im_gamma",
        "sign_re",
        "sign_im",
        "has_expectation",
        "re_agrees",
        "im_agrees",
    ];
    let n = flagged.len();
    let mut r = Report::table(cols, rows);
    r.diagnostics = json!({ "disagreements": flagged, "n_disagreements": n, "n_cells": 441 });
    r
}

fn gap_scan(p: &ModelParams, nx: usize, ny: usize, threshold: f64) -> Result<Report> {
    let g = band_grid_scan(p, nx, ny)?;
    let c = classify_gap(&g, threshold);
    let eps = gap_closing_solutions(p);
    let at_eps: Vec<Value> = eps
        .points
        .iter()
        .map(|k| json!({ "kx": k.kx, "ky": k.ky, "abs_e": bands_at(p, k).modulus }))
        .collect();
    let (ai, aj) = g.argmin_abs_e();
    let row = vec![
        c.point_gap.into(),
        c.real_line_gap.into(),
        c.imag_line_gap.into(),
        g.min_abs_e.into(),
        g.min_re_gap.into(),
        g.min_im_gap.into(),
        g.kxs[ai].into(),
        g.kys[aj].into(),
        eps.points.len().into(),
    ];
    let cols = vec![
        "point_gap",
        "real_line_gap",
        "imag_line_gap",
        "min_abs_e",
        "min_re_gap",
        "min_im_gap",
        "argmin_kx",
        "argmin_ky",
        "n_exceptional",
    ];
    let mut r = Report::table(cols, vec![row]);
    r.results = json!({
        "classification": c,
        "min_abs_e": g.min_abs_e,
        "min_re_gap": g.min_re_gap,
        "min_im_gap": g.min_im_gap,
        "argmin_abs_e": [g.kxs[ai], g.kys[aj]],
        "exceptional_kind": eps.kind,
        "exceptional_points": at_eps,
    });
    Ok(r)
}

/// Closed form for the Berry phase at `p`, preferring the special-case forms
/// over the general one when their preconditions hold.
pub fn best_analytic(p: &ModelParams) -> Result<BerryPhase> {
    if p.m == 0.0 && p.delta != 0.0 && p.kappa_x != 0.0 {
        return berry_phase_m0(p);
    }
    if p.delta == 0.0 && p.m != 0.0 {
        return berry_phase_delta0(p);
    }
    if p.kappa_x == 0.0 || p.kappa_y == 0.0 {
        return berry_phase_axis_case(p);
    }
    berry_phase_analytic_general(p)
}

fn gamma_for(p: &ModelParams, q: &QuadratureConfig, source: GammaSource) -> Result<BerryPhase> {
    match source {
        GammaSource::Analytic => best_analytic(p),
        GammaSource::Numeric => berry_phase_numeric(p, q),
    }
}

fn phase_diagram(
    base: &ModelParams,
    q: &QuadratureConfig,
    sx: &Sweep,
    sy: &Sweep,
    scan_n: usize,
    threshold: f64,
    source: GammaSource,
) -> Result<Report> {
    if sx.axis == sy.axis {
        return Err(crate::Error::InvalidParams("the two sweep axes must differ".into()));
    }
    let xs = linspace(sx.start, sx.stop, sx.steps);
    let ys = linspace(sy.start, sy.stop, sy.steps);
    let points: Vec<(f64, f64)> = ys.iter().flat_map(|&y| xs.iter().map(move |&x| (x, y))).collect();
    let out: Vec<Result<(Vec<Cell>, Option<Value>)>> = points
        .par_iter()
        .map(|&(x, y)| {
            let mut p = *base;
            sx.axis.set(&mut p, x);
            sy.axis.set(&mut p, y);
            let g = band_grid_scan(&p, scan_n, scan_n)?;
            let c = classify_gap(&g, threshold);
            let eps = gap_closing_solutions(&p);
            let n_ep = match eps.kind {
                ExceptionalKind::Circle { .. } => -1,
                _ => eps.points.len() as i64,
            };
            let (gamma, diag) = match gamma_for(&p, q, source) {
                Ok(b) => (b.gamma, None),
                Err(e @ crate::Error::NonConvergent(_)) if source == GammaSource::Numeric => return Err(e),
                Err(e) => (
                    crate::Complex64::new(f64::NAN, f64::NAN),
                    Some(json!({ "x": x, "y": y, "error": e.to_string() })),
                ),
            };
            let row = vec![
                x.into(),
                y.into(),
                c.point_gap.into(),
                c.real_line_gap.into(),
                c.imag_line_gap.into(),
                g.min_abs_e.into(),
                n_ep.into(),
                gamma.re.into(),
                gamma.im.into(),
            ];
            Ok((row, diag))
        })
        .collect();
    let mut rows = Vec::with_capacity(out.len());
    let mut diags = Vec::new();
    for o in out {
        let (row, d) = o?;
        rows.push(row);
        diags.extend(d);
    }
    let cols = vec![
        "x",
        "y",
        "point_gap",
        "real_line_gap",
        "imag_line_gap",
        "min_abs_e",
        "n_exceptional",
        "gamma_r",
        "gamma_i",
    ];
    let mut r = Report::table(cols, rows);
    r.diagnostics = json!({
        "x_axis": sx.axis,
        "y_axis": sy.axis,
        "gamma_failures": diags,
        "n_exceptional_note": "-1 marks a circle of exceptional points",
    });
    Ok(r)
}

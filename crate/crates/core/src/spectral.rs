//! Band scans over the Brillouin zone, point/line gap classification and the
//! exceptional points where both bands coalesce.

use rayon::prelude::*;
use serde::Serialize;

use crate::model::{bands_at, build_field, ModelParams, Momentum};
use crate::{Error, Result};

pub const DEFAULT_GAP_THRESHOLD: f64 = 1e-6;
const POLISH_ULPS: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandGrid {
    pub nx: usize,
    pub ny: usize,
    pub kxs: Vec<f64>,
    pub kys: Vec<f64>,
    /// Row-major, index `j·nx + i` for `(kxs[i], kys[j])`.
    pub e_plus_re: Vec<f64>,
    pub e_plus_im: Vec<f64>,
    pub min_abs_e: f64,
    /// `2·min|Re E_+|`
    pub min_re_gap: f64,
    /// `2·min|Im E_+|`
    pub min_im_gap: f64,
}

impl BandGrid {
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    /// Node with the smallest `|E_+|`, first in row-major order on ties.
    pub fn argmin_abs_e(&self) -> (usize, usize) {
        let mut best = (0, f64::INFINITY);
        for (n, (re, im)) in self.e_plus_re.iter().zip(&self.e_plus_im).enumerate() {
            let a = re.hypot(*im);
            if a < best.1 {
                best = (n, a);
            }
        }
        (best.0 % self.nx, best.0 / self.nx)
    }
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// `E_+` on an `nx × ny` grid spanning the Brillouin zone, edges included.
pub fn band_grid_scan(p: &ModelParams, nx: usize, ny: usize) -> Result<BandGrid> {
    p.validate()?;
    if nx < 2 || ny < 2 {
        return Err(Error::InvalidParams("grid dimensions must be at least 2".into()));
    }
    let w = p.bz_half_width;
    let kxs = linspace(-w, w, nx);
    let kys = linspace(-w, w, ny);
    let rows: Vec<Vec<(f64, f64)>> = kys
        .par_iter()
        .map(|&ky| {
            kxs.iter()
                .map(|&kx| {
                    let e = bands_at(p, &Momentum::new(kx, ky)).e_plus;
                    (e.re, e.im)
                })
                .collect()
        })
        .collect();
    let (e_plus_re, e_plus_im): (Vec<f64>, Vec<f64>) = rows.into_iter().flatten().unzip();
    let min_abs_e = e_plus_re.iter().zip(&e_plus_im).map(|(r, i)| r.hypot(*i)).fold(f64::INFINITY, f64::min);
    let min_re = e_plus_re.iter().map(|r| r.abs()).fold(f64::INFINITY, f64::min);
    let min_im = e_plus_im.iter().map(|r| r.abs()).fold(f64::INFINITY, f64::min);
    Ok(BandGrid {
        nx,
        ny,
        kxs,
        kys,
        e_plus_re,
        e_plus_im,
        min_abs_e,
        min_re_gap: 2.0 * min_re,
        min_im_gap: 2.0 * min_im,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapClassification {
    pub point_gap: bool,
    pub real_line_gap: bool,
    pub imag_line_gap: bool,
    pub threshold: f64,
}

/// A spectrum with `Im E ≡ 0` has no gap in the imaginary part, so a Hermitian
/// band structure is real-line gapped but not imaginary-line gapped.
pub fn classify_gap(grid: &BandGrid, threshold: f64) -> GapClassification {
    GapClassification {
        point_gap: grid.min_abs_e > threshold,
        real_line_gap: 0.5 * grid.min_re_gap > threshold,
        imag_line_gap: 0.5 * grid.min_im_gap > threshold,
        threshold,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExceptionalKind {
    Empty,
    /// A single tangency point or the origin.
    IsolatedPoints,
    CircleLineIntersections,
    /// `κx = κy = 0` with `mδ = 0`: the whole circle `k² = δ² − m²` is exceptional.
    Circle { radius: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExceptionalSet {
    pub points: Vec<Momentum>,
    pub kind: ExceptionalKind,
}

/// Squared radius of the circle `kx² + ky² = κx² + κy² + δ² − m²`.
pub fn circle_radius_sq(p: &ModelParams) -> f64 {
    p.kappa_x * p.kappa_x + p.kappa_y * p.kappa_y + p.delta * p.delta - p.m * p.m
}

/// Moves `k` by at most `POLISH_ULPS` ulps per coordinate to the representable
/// point with the smallest `|h·h|`.
fn polish(p: &ModelParams, k: Momentum) -> Momentum {
    let steps = |x: f64| {
        let mut v = vec![x];
        let (mut up, mut down) = (x, x);
        for _ in 0..POLISH_ULPS {
            up = up.next_up();
            down = down.next_down();
            v.push(up);
            v.push(down);
        }
        v
    };
    let mut best = (k, build_field(p, &k).norm_sq.norm());
    for x in steps(k.kx) {
        for y in steps(k.ky) {
            let q = Momentum::new(x, y);
            let r = build_field(p, &q).norm_sq.norm();
            if r < best.1 {
                best = (q, r);
            }
        }
    }
    best.0
}

/// All real solutions of `k² − κ² = 0`, `k·κ = 0` in the plane, ignoring the
/// Brillouin zone. Empty for the exceptional circle, which has no isolated points.
pub fn exceptional_points_unbounded(p: &ModelParams) -> Vec<Momentum> {
    let (a, b) = (p.kappa_x, p.kappa_y);
    let c = -p.m * p.delta;
    let r2 = circle_radius_sq(p);
    let n2 = a * a + b * b;
    if n2 == 0.0 {
        return if c == 0.0 && r2 == 0.0 { vec![Momentum::new(0.0, 0.0)] } else { Vec::new() };
    }
    let foot = [a * c / n2, b * c / n2];
    let d2 = r2 - c * c / n2;
    if d2 < 0.0 {
        return Vec::new();
    }
    if d2 == 0.0 {
        return vec![polish(p, Momentum::new(foot[0], foot[1]))];
    }
    let d = (d2 / n2).sqrt();
    [1.0, -1.0]
        .iter()
        .map(|s| polish(p, Momentum::new(foot[0] - s * b * d, foot[1] + s * a * d)))
        .collect()
}

/// Exceptional points inside the Brillouin zone.
pub fn gap_closing_solutions(p: &ModelParams) -> ExceptionalSet {
    let w = p.bz_half_width;
    let r2 = circle_radius_sq(p);
    if p.kappa_x == 0.0 && p.kappa_y == 0.0 && p.m * p.delta == 0.0 && r2 > 0.0 {
        return ExceptionalSet { points: Vec::new(), kind: ExceptionalKind::Circle { radius: r2.sqrt() } };
    }
    let all = exceptional_points_unbounded(p);
    let tangent = all.len() == 1;
    let points: Vec<Momentum> = all.into_iter().filter(|k| k.kx.abs() <= w && k.ky.abs() <= w).collect();
    let kind = match (points.is_empty(), tangent) {
        (true, _) => ExceptionalKind::Empty,
        (false, true) => ExceptionalKind::IsolatedPoints,
        (false, false) => ExceptionalKind::CircleLineIntersections,
    };
    ExceptionalSet { points, kind }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermitian_gap_convention() {
        let g = band_grid_scan(&ModelParams::hermitian(1.0), 16, 16).unwrap();
        let c = classify_gap(&g, DEFAULT_GAP_THRESHOLD);
        assert!(c.point_gap && c.real_line_gap && !c.imag_line_gap);
    }

    #[test]
    fn vertical_line_case() {
        let p = ModelParams::new(0.5, 0.4, 0.8, 0.0).unwrap();
        let s = gap_closing_solutions(&p);
        assert_eq!(s.kind, ExceptionalKind::CircleLineIntersections);
        assert_eq!(s.points.len(), 2);
        for k in &s.points {
            assert!((k.kx + 0.5 * 0.4 / 0.8).abs() < 1e-15);
            assert!(bands_at(&p, k).modulus < 1e-8);
        }
    }

    #[test]
    fn exceptional_circle() {
        let p = ModelParams::new(0.0, 0.5, 0.0, 0.0).unwrap();
        assert_eq!(gap_closing_solutions(&p).kind, ExceptionalKind::Circle { radius: 0.5 });
    }

    #[test]
    fn missing_line_is_empty() {
        let p = ModelParams::new(1.0, 1.0, 0.1, 0.1).unwrap();
        assert_eq!(gap_closing_solutions(&p).kind, ExceptionalKind::Empty);
    }
}

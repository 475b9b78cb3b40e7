//! Adaptive triangle quadrature with a singular-vertex rule.
//!
//! Each triangle is mapped from the unit square by the collapsed map
//! `P = a + s((b − a) + t(c − b))` with Jacobian `2A·s`. When vertex `a` is an
//! exceptional point the integrand behaves like `ρ^{-3/2}` there, so `s = u²`
//! is substituted, giving Jacobian `4A·u³` and a smooth pulled-back integrand.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;

use super::geometry::{Point, Triangle};
use super::sum::pairwise_sum;
use crate::{Error, Result};

const HIGH_ORDER: usize = 6;
const LOW_ORDER: usize = 4;

/// Tensor Gauss–Legendre rule on `[0, 1]²`.
#[derive(Debug, Clone)]
pub struct SquareRule {
    nodes: Vec<(f64, f64, f64)>,
}

impl SquareRule {
    pub fn gauss(n: usize) -> Self {
        let gl = GaussLegendre::new(NonZeroUsize::new(n).expect("order ≥ 1"));
        let pts: Vec<(f64, f64)> = gl
            .as_node_weight_pairs()
            .iter()
            .map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w))
            .collect();
        let mut nodes = Vec::with_capacity(n * n);
        for &(s, ws) in &pts {
            for &(t, wt) in &pts {
                nodes.push((s, t, ws * wt));
            }
        }
        SquareRule { nodes }
    }

    pub fn integrate<F: Fn(Point) -> Complex64>(&self, tri: &Triangle, f: &F) -> Complex64 {
        let area2 = 2.0 * tri.area();
        let e1 = [tri.b[0] - tri.a[0], tri.b[1] - tri.a[1]];
        let e2 = [tri.c[0] - tri.b[0], tri.c[1] - tri.b[1]];
        let mut acc = Complex64::new(0.0, 0.0);
        for &(u, t, w) in &self.nodes {
            let (s, jac) = if tri.singular_a { (u * u, 2.0 * area2 * u * u * u) } else { (u, area2 * u) };
            let p = [tri.a[0] + s * (e1[0] + t * e2[0]), tri.a[1] + s * (e1[1] + t * e2[1])];
            acc += f(p) * (w * jac);
        }
        acc
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveConfig {
    pub tol: f64,
    pub exclusion_radius: f64,
    pub max_depth: u32,
    pub max_cells: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveResult {
    pub value: Complex64,
    /// Remaining error estimate of active cells plus that of frozen cells.
    pub est_error: f64,
    /// Total area of cells frozen below the exclusion radius.
    pub excluded_area: f64,
    pub cells: usize,
}

#[derive(Debug, Clone)]
struct Cell {
    tri: Triangle,
    value: Complex64,
    err: f64,
    depth: u32,
    seq: u64,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Cell {}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err).then_with(|| other.seq.cmp(&self.seq))
    }
}

pub struct Integrator {
    high: SquareRule,
    low: SquareRule,
}

impl Default for Integrator {
    fn default() -> Self {
        Integrator { high: SquareRule::gauss(HIGH_ORDER), low: SquareRule::gauss(LOW_ORDER) }
    }
}

impl Integrator {
    fn cell<F: Fn(Point) -> Complex64>(&self, tri: Triangle, depth: u32, seq: u64, f: &F) -> Cell {
        let hi = self.high.integrate(&tri, f);
        let lo = self.low.integrate(&tri, f);
        let mut err = (hi - lo).norm();
        if !err.is_finite() {
            err = f64::INFINITY;
        }
        Cell { tri, value: hi, err, depth, seq }
    }

    /// Refines the worst cell until the summed error of unfrozen cells is
    /// below `cfg.tol`. Serial, so the result does not depend on scheduling.
    pub fn integrate<F: Fn(Point) -> Complex64>(
        &self,
        tris: &[Triangle],
        f: &F,
        cfg: &AdaptiveConfig,
    ) -> Result<AdaptiveResult> {
        let mut seq = 0_u64;
        let mut heap = BinaryHeap::new();
        let mut frozen: Vec<Cell> = Vec::new();
        let mut active_err = 0.0;
        for &t in tris {
            let c = self.cell(t, 0, seq, f);
            seq += 1;
            active_err += c.err;
            heap.push(c);
        }
        let mut cells = heap.len();
        while active_err > cfg.tol {
            let Some(worst) = heap.pop() else { break };
            active_err -= worst.err;
            if worst.tri.diameter() < cfg.exclusion_radius {
                frozen.push(worst);
                continue;
            }
            if worst.depth >= cfg.max_depth {
                return Err(Error::NonConvergent(format!(
                    "depth limit {} reached near ({:.6}, {:.6}) with error {:e}",
                    cfg.max_depth, worst.tri.a[0], worst.tri.a[1], worst.err
                )));
            }
            for child in worst.tri.split() {
                let c = self.cell(child, worst.depth + 1, seq, f);
                seq += 1;
                active_err += c.err;
                heap.push(c);
            }
            cells += 3;
            if cells > cfg.max_cells {
                return Err(Error::NonConvergent(format!("cell budget {} exhausted", cfg.max_cells)));
            }
            if !active_err.is_finite() {
                // recompute to shed the running-sum round-off of an infinite entry
                active_err = heap.iter().map(|c| c.err).sum();
            }
        }
        let mut leaves: Vec<Cell> = heap.into_vec();
        leaves.extend(frozen.iter().cloned());
        leaves.sort_by_key(|c| c.seq);
        let values: Vec<Complex64> = leaves.iter().map(|c| c.value).collect();
        let errs: Vec<f64> = leaves.iter().map(|c| c.err).collect();
        let est = pairwise_sum(&errs);
        let value = pairwise_sum(&values);
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::NonConvergent("non-finite integral".into()));
        }
        Ok(AdaptiveResult {
            value,
            est_error: est,
            excluded_area: frozen.iter().map(|c| c.tri.area()).sum(),
            cells,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integration::geometry::{fan, square};

    fn cfg() -> AdaptiveConfig {
        AdaptiveConfig { tol: 1e-10, exclusion_radius: 1e-12, max_depth: 40, max_cells: 1_000_000 }
    }

    #[test]
    fn polynomial_exact() {
        let tris = fan(&square([0.0, 0.0], 1.0), &[], 0.0);
        let f = |p: Point| Complex64::new(p[0] * p[0] * p[1] * p[1], p[0]);
        let r = Integrator::default().integrate(&tris, &f, &cfg()).unwrap();
        assert!((r.value.re - 4.0 / 9.0).abs() < 1e-14);
        assert!(r.value.im.abs() < 1e-14);
    }

    #[test]
    fn corner_singularity() {
        // ∫ over the unit right triangle of r^{-3/2}, vertex singular
        let tri = Triangle { a: [0.0, 0.0], b: [1.0, 0.0], c: [1.0, 1.0], singular_a: true };
        let f = |p: Point| Complex64::new(p[0].hypot(p[1]).powf(-1.5), 0.0);
        let r = Integrator::default().integrate(&[tri], &f, &cfg()).unwrap();
        // ∫_0^{π/4} ∫_0^{sec θ} r^{-1/2} dr dθ = 2∫ sec^{1/2}θ dθ
        let gl = GaussLegendre::new(NonZeroUsize::new(40).unwrap());
        let exact = 2.0 * gl.integrate(0.0, std::f64::consts::FRAC_PI_4, |t| t.cos().powf(-0.5));
        assert!((r.value.re - exact).abs() < 1e-9, "{} vs {exact}", r.value.re);
    }
}

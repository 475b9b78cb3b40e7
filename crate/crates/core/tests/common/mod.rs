#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, PI};
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use nhadm::model::ModelParams;
use nhadm::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn params(m: f64, d: f64, kx: f64, ky: f64) -> ModelParams {
    ModelParams::new(m, d, kx, ky).unwrap()
}

pub fn random_params(r: &mut ChaCha8Rng) -> ModelParams {
    params(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
}

fn gl_on<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, n: usize, panels: usize) -> Complex64 {
    let gl = GaussLegendre::new(NonZeroUsize::new(n).unwrap());
    let h = (b - a) / panels as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let lo = a + h * p as f64;
        for &(x, w) in gl.as_node_weight_pairs().iter() {
            acc += f(lo + 0.5 * h * (x + 1.0)) * (0.5 * h * w);
        }
    }
    acc
}

/// Continuum Berry phase `(1/4π)∫ M/E³` on the principal branch, reduced to
/// one dimension.
///
/// Rotate so that `κ` points along `u`, with `x` across it. The `u` integral
/// has the antiderivative `M·z/(A·√(A + z²))`, `z = u + iK`, `A = x² + M²`.
/// Where the branch cut crosses the line of integration (at `u = −mδ/K`, for
/// `x² < R²`) the principal root flips sign, which adds a jump term. The
/// remaining `x` integral is done by Gauss–Legendre, with `x = R sin θ` on
/// the cut interval to absorb its inverse-square-root endpoints.
pub fn semi_analytic_phase(m: f64, d: f64, kx: f64, ky: f64) -> Complex64 {
    let mm = Complex64::new(m, d);
    let k = kx.hypot(ky);
    if k == 0.0 {
        return mm / (2.0 * (mm * mm).sqrt());
    }
    let r2 = k * k + d * d - m * m - (m * d / k).powi(2);
    let ustar = Complex64::new(-m * d / k, k);
    let a = |x: f64| x * x + mm * mm;
    let mut total = Complex64::new(0.0, 0.0);
    let r = if r2 > 0.0 { r2.sqrt() } else { 0.0 };
    if r > 0.0 {
        let inside = |t: f64| {
            let x = r * t.sin();
            let c = r * t.cos();
            (2.0 / a(x)) * c + 2.0 * Complex64::i() * ustar / a(x)
        };
        total += gl_on(&inside, -FRAC_PI_2, FRAC_PI_2, 64, 16);
    }
    // x = r + t/(1 − t) on each side
    let outside = |t: f64| {
        let s = 1.0 - t;
        let x = r + t / s;
        2.0 / a(x) / (s * s)
    };
    total += 2.0 * gl_on(&outside, 0.0, 1.0, 64, 64);
    mm * total / (4.0 * PI)
}


//! Cutoff extrapolation `I(L) = I∞ + a₁/L + a₃/L³ + a₅/L⁵`.
//!
//! The curvature decays as `1/k³`; the `1/k⁴` term is odd in `k` and cancels
//! on a centred square, so only odd powers of `1/L` appear.

use nalgebra::DMatrix;
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolation {
    pub value: Complex64,
    /// Difference to the fit with one fewer term on the largest cutoffs.
    pub fit_error: f64,
    /// `Σ|wᵢ|`, the amplification of per-cutoff errors into `value`.
    pub noise_gain: f64,
}

/// Least-squares weights `w` with `I∞ = Σ wᵢ I(Lᵢ)` for `terms` odd powers.
fn weights(radii: &[f64], terms: usize) -> Option<Vec<f64>> {
    let a = DMatrix::from_fn(radii.len(), terms, |i, j| {
        if j == 0 {
            1.0
        } else {
            radii[i].powi(-(2 * j as i32 - 1))
        }
    });
    let pinv = a.pseudo_inverse(1e-14).ok()?;
    Some(pinv.row(0).iter().copied().collect())
}

fn apply(w: &[f64], vals: &[Complex64]) -> Complex64 {
    w.iter().zip(vals).map(|(w, v)| v * *w).sum()
}

pub fn extrapolate(radii: &[f64], vals: &[Complex64]) -> Extrapolation {
    assert_eq!(radii.len(), vals.len());
    let n = radii.len();
    if n == 1 {
        return Extrapolation { value: vals[0], fit_error: f64::INFINITY, noise_gain: 1.0 };
    }
    let terms = n.min(4);
    let w = weights(radii, terms).unwrap_or_else(|| {
        let mut w = vec![0.0; n];
        w[n - 1] = 1.0;
        w
    });
    let value = apply(&w, vals);
    // Largest n−1 cutoffs with one term fewer.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| radii[i].total_cmp(&radii[j]));
    let keep: Vec<usize> = order[1..].to_vec();
    let r2: Vec<f64> = keep.iter().map(|&i| radii[i]).collect();
    let v2: Vec<Complex64> = keep.iter().map(|&i| vals[i]).collect();
    let coarse = weights(&r2, (terms - 1).min(r2.len()).max(1)).map(|w| apply(&w, &v2)).unwrap_or(value);
    Extrapolation {
        value,
        fit_error: (value - coarse).norm(),
        noise_gain: w.iter().map(|x| x.abs()).sum(),
    }
}

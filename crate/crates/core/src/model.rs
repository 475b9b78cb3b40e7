//! Parameters, the complex Zeeman field `h(k) = k + iκ` and the complex bands.

use num_complex::Complex64;
use serde::Serialize;

use crate::linalg::{principal_sqrt, CVec3, Mat2};
use crate::{Error, Result};

/// Default relative tolerance below which `|E|` counts as an exceptional point.
pub const EPS_SING: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    pub m: f64,
    pub delta: f64,
    pub kappa_x: f64,
    pub kappa_y: f64,
    pub bz_half_width: f64,
}

impl ModelParams {
    /// Parameters on the default Brillouin zone `[-1, 1]²`.
    pub fn new(m: f64, delta: f64, kappa_x: f64, kappa_y: f64) -> Result<Self> {
        Self::with_bz(m, delta, kappa_x, kappa_y, 1.0)
    }

    pub fn with_bz(m: f64, delta: f64, kappa_x: f64, kappa_y: f64, bz_half_width: f64) -> Result<Self> {
        let p = ModelParams { m, delta, kappa_x, kappa_y, bz_half_width };
        p.validate()?;
        Ok(p)
    }

    pub fn hermitian(m: f64) -> Self {
        ModelParams { m, delta: 0.0, kappa_x: 0.0, kappa_y: 0.0, bz_half_width: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.m, self.delta, self.kappa_x, self.kappa_y, self.bz_half_width];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParams("all parameters must be finite".into()));
        }
        if self.bz_half_width <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "bz_half_width must be positive, got {}",
                self.bz_half_width
            )));
        }
        Ok(())
    }

    /// Euclidean norm of `(m, δ, κx, κy)`.
    pub fn norm(&self) -> f64 {
        (self.m * self.m + self.delta * self.delta + self.kappa_x * self.kappa_x + self.kappa_y * self.kappa_y)
            .sqrt()
    }

    /// Absolute degeneracy threshold for `|E|`.
    pub fn eps_sing(&self) -> f64 {
        EPS_SING * self.norm().max(1.0)
    }

    pub fn is_hermitian(&self) -> bool {
        self.delta == 0.0 && self.kappa_x == 0.0 && self.kappa_y == 0.0
    }

    /// Complex mass `m + iδ`.
    pub fn mass(&self) -> Complex64 {
        Complex64::new(self.m, self.delta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Momentum {
    pub kx: f64,
    pub ky: f64,
}

impl Momentum {
    pub fn new(kx: f64, ky: f64) -> Self {
        Momentum { kx, ky }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexField3 {
    pub hx: Complex64,
    pub hy: Complex64,
    pub hz: Complex64,
    /// Bilinear square `h·h`.
    pub norm_sq: Complex64,
}

impl ComplexField3 {
    pub fn as_vec(&self) -> CVec3 {
        CVec3::new(self.hx, self.hy, self.hz)
    }

    /// `H = h·σ`
    pub fn hamiltonian(&self) -> Mat2 {
        self.as_vec().dot_sigma()
    }

    /// `ĥ = h/√(h·h)`, undefined at exceptional points.
    pub fn unit(&self) -> Option<CVec3> {
        if self.norm_sq == Complex64::new(0.0, 0.0) {
            return None;
        }
        Some(self.as_vec().scale(principal_sqrt(self.norm_sq).inv()))
    }
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Sum of `sign·a·b` terms with error-free products and Neumaier summation.
///
/// Near exceptional points `h·h` is a difference of nearly equal squares, so
/// naive evaluation loses the digits that decide the branch.
fn compensated_dot(terms: &[(f64, f64, f64)]) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    let mut add = |x: f64| {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    };
    for &(s, a, b) in terms {
        let (p, e) = two_prod(a, b);
        add(s * p);
        add(s * e);
    }
    sum + comp
}

/// `k² − κ²` with `k = (kx, ky, m)` and `κ = (κx, κy, δ)`.
pub fn k2_minus_kappa2(p: &ModelParams, k: &Momentum) -> f64 {
    compensated_dot(&[
        (1.0, k.kx, k.kx),
        (1.0, k.ky, k.ky),
        (1.0, p.m, p.m),
        (-1.0, p.kappa_x, p.kappa_x),
        (-1.0, p.kappa_y, p.kappa_y),
        (-1.0, p.delta, p.delta),
    ])
}

/// `k·κ = kxκx + kyκy + mδ`.
pub fn k_dot_kappa(p: &ModelParams, k: &Momentum) -> f64 {
    compensated_dot(&[(1.0, k.kx, p.kappa_x), (1.0, k.ky, p.kappa_y), (1.0, p.m, p.delta)])
}

pub fn build_field(p: &ModelParams, k: &Momentum) -> ComplexField3 {
    ComplexField3 {
        hx: Complex64::new(k.kx, p.kappa_x),
        hy: Complex64::new(k.ky, p.kappa_y),
        hz: Complex64::new(p.m, p.delta),
        norm_sq: Complex64::new(k2_minus_kappa2(p, k), 2.0 * k_dot_kappa(p, k)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandEnergies {
    pub e_plus: Complex64,
    pub e_minus: Complex64,
    /// `E^r = √2·Re E_+`
    pub e_r: f64,
    /// `E^i = √2·|Im E_+|`
    pub e_i: f64,
    /// Sign of `k·κ`; zero on the inversion line.
    pub mu: i8,
    pub modulus: f64,
    /// `|arg E_+|`, in `[0, π/2]`.
    pub phase: f64,
    /// `2k·κ/(k²−κ²)`, infinite when the denominator vanishes.
    pub eta: f64,
    pub degenerate: bool,
}

impl BandEnergies {
    /// Sign used in the polar and Cartesian forms. On `k·κ = 0` the principal
    /// root lies on the non-negative real or imaginary axis, which `+1` covers.
    pub fn mu_effective(&self) -> f64 {
        if self.mu == 0 {
            1.0
        } else {
            f64::from(self.mu)
        }
    }
}

pub fn energy_bands(f: &ComplexField3, p: &ModelParams, _k: &Momentum) -> BandEnergies {
    let e_plus = principal_sqrt(f.norm_sq);
    let a = f.norm_sq.re;
    let kk = 0.5 * f.norm_sq.im;
    let mu = if kk > 0.0 {
        1
    } else if kk < 0.0 {
        -1
    } else {
        0
    };
    let eta = if a != 0.0 {
        2.0 * kk / a
    } else if kk > 0.0 {
        f64::INFINITY
    } else if kk < 0.0 {
        f64::NEG_INFINITY
    } else {
        0.0
    };
    let modulus = e_plus.norm();
    BandEnergies {
        e_plus,
        e_minus: -e_plus,
        e_r: std::f64::consts::SQRT_2 * e_plus.re,
        e_i: std::f64::consts::SQRT_2 * e_plus.im.abs(),
        mu,
        modulus,
        phase: e_plus.im.atan2(e_plus.re).abs(),
        eta,
        degenerate: modulus < p.eps_sing(),
    }
}

/// Bands at a momentum, building the field on the way.
pub fn bands_at(p: &ModelParams, k: &Momentum) -> BandEnergies {
    energy_bands(&build_field(p, k), p, k)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarForm {
    pub modulus: f64,
    pub phase: f64,
    pub eta: f64,
}

/// Polar decomposition `E_+ = E·e^{iμφ}`.
///
/// Where `k² ≥ κ²` the phase equals the closed-form arctangent of `η`; where
/// `k² < κ²` the band sits closer to the imaginary axis and the phase is its
/// complement `π/2 − arctan(…)`.
pub fn energy_polar(b: &BandEnergies) -> Result<PolarForm> {
    if b.modulus == 0.0 {
        return Err(Error::DegenerateEigensystem { kx: f64::NAN, ky: f64::NAN, abs_e: 0.0 });
    }
    Ok(PolarForm { modulus: b.modulus, phase: b.phase, eta: b.eta })
}

/// Closed-form phase `arctan(√(√(1+η²)−1)/√(√(1+η²)+1))` in `[0, π/4]`.
pub fn phase_from_eta(eta: f64) -> f64 {
    if eta.is_infinite() {
        return std::f64::consts::FRAC_PI_4;
    }
    let r = (1.0 + eta * eta).sqrt();
    ((r - 1.0).sqrt() / (r + 1.0).sqrt()).atan()
}

/// `E^r` and `E^i` from `k² − κ²` and `k·κ` by the nested-root formulas.
pub fn cartesian_split(k2mk2: f64, kdk: f64) -> (f64, f64) {
    let r = (k2mk2 * k2mk2 + 4.0 * kdk * kdk).sqrt();
    ((k2mk2 + r).max(0.0).sqrt(), (r - k2mk2).max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn field_trivial_cases() {
        let p = ModelParams::hermitian(1.0);
        let f = build_field(&p, &Momentum::new(0.0, 0.0));
        assert_eq!(f.hz, c(1.0, 0.0));
        assert_eq!(f.norm_sq, c(1.0, 0.0));

        let p = ModelParams::new(0.0, 1.0, 0.0, 0.0).unwrap();
        let f = build_field(&p, &Momentum::new(0.0, 0.0));
        assert_eq!(f.norm_sq, c(-1.0, 0.0));
        let b = energy_bands(&f, &p, &Momentum::new(0.0, 0.0));
        assert_eq!(b.e_plus, c(0.0, 1.0));
        assert_eq!(b.e_minus, c(-0.0, -1.0));
    }

    #[test]
    fn norm_sq_matches_component_sum() {
        let p = ModelParams::new(1.0, 0.2, 0.03, 0.03).unwrap();
        let k = Momentum::new(0.5, 0.5);
        let f = build_field(&p, &k);
        let direct = f.hx * f.hx + f.hy * f.hy + f.hz * f.hz;
        assert!((f.norm_sq - direct).norm() < 1e-14);
    }

    #[test]
    fn real_spectrum_on_inversion_line() {
        // k·κ = 0 with k² > κ²
        let p = ModelParams::new(1.0, 0.0, 0.3, 0.0).unwrap();
        let k = Momentum::new(0.0, 0.7);
        let b = bands_at(&p, &k);
        assert_eq!(b.mu, 0);
        assert_eq!(b.e_plus.im, 0.0);
        assert!((b.e_plus.re - (1.49_f64 - 0.09).sqrt()).abs() < 1e-15);
        assert_eq!(b.eta, 0.0);
        assert_eq!(b.phase, 0.0);
    }

    #[test]
    fn quarter_phase_when_k2_equals_kappa2() {
        let p = ModelParams::new(0.0, 0.0, 0.6, 0.8).unwrap();
        let k = Momentum::new(0.6, 0.8);
        let b = bands_at(&p, &k);
        assert!(b.eta.is_infinite());
        assert!((b.phase - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert!((phase_from_eta(b.eta) - b.phase).abs() < 1e-15);
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(ModelParams::new(f64::NAN, 0.0, 0.0, 0.0).is_err());
        assert!(ModelParams::with_bz(1.0, 0.0, 0.0, 0.0, 0.0).is_err());
    }
}

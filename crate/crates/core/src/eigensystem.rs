//! Biorthonormal right/left eigenvectors of `H = h·σ` and the band projectors.

use num_complex::Complex64;
use serde::Serialize;

use crate::linalg::{principal_sqrt, Mat2, Spinor, ONE};
use crate::model::{build_field, energy_bands, BandEnergies, ComplexField3, ModelParams, Momentum};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Band {
    Plus,
    Minus,
}

impl Band {
    pub fn sign(self) -> f64 {
        match self {
            Band::Plus => 1.0,
            Band::Minus => -1.0,
        }
    }

    pub fn other(self) -> Band {
        match self {
            Band::Plus => Band::Minus,
            Band::Minus => Band::Plus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiorthogonalSystem {
    pub psi_plus_r: Spinor,
    pub psi_minus_r: Spinor,
    pub phi_plus_l: Spinor,
    pub phi_minus_l: Spinor,
    pub energies: BandEnergies,
    pub degenerate: bool,
    pub momentum: Momentum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projector {
    pub matrix: Mat2,
    pub band: Band,
}

/// Right eigenvector of `h·σ` for eigenvalue `e`, choosing the better
/// conditioned of the two row-null-space formulas.
fn raw_eigvec(h: [Complex64; 3], e: Complex64) -> Spinor {
    let [hx, hy, hz] = h;
    let i = Complex64::new(0.0, 1.0);
    let a = Spinor::new(hx - i * hy, e - hz);
    let b = Spinor::new(e + hz, hx + i * hy);
    if a.norm() >= b.norm() {
        a
    } else {
        b
    }
}

/// Unit norm with the largest component real-positive.
fn gauge_fix(v: Spinor) -> Spinor {
    let n = v.norm();
    if n == 0.0 {
        return v;
    }
    let big = if v.0[0].norm() >= v.0[1].norm() { v.0[0] } else { v.0[1] };
    let phase = big.conj() / big.norm();
    v.scale(phase / n)
}

/// Rescales `phi` so that `⟨phi|psi⟩ = 1`.
fn biorthonormalize(phi: Spinor, psi: &Spinor) -> Spinor {
    let ov = phi.inner(psi);
    if ov == Complex64::new(0.0, 0.0) {
        return phi;
    }
    phi.scale(ov.conj().inv())
}

fn pair(f: &ComplexField3, e: Complex64) -> (Spinor, Spinor) {
    let h = [f.hx, f.hy, f.hz];
    let hc = [f.hx.conj(), f.hy.conj(), f.hz.conj()];
    let psi = gauge_fix(raw_eigvec(h, e));
    let phi = biorthonormalize(raw_eigvec(hc, e.conj()), &psi);
    (psi, phi)
}

/// Builds the system with `e_plus` as the `+` eigenvalue. `e_plus` must be
/// one of the two roots of `h·h`.
pub fn system_with_root(
    p: &ModelParams,
    k: &Momentum,
    f: &ComplexField3,
    e_plus: Complex64,
) -> BiorthogonalSystem {
    let mut energies = energy_bands(f, p, k);
    energies.e_plus = e_plus;
    energies.e_minus = -e_plus;
    let (psi_plus_r, phi_plus_l) = pair(f, e_plus);
    let (psi_minus_r, phi_minus_l) = pair(f, -e_plus);
    BiorthogonalSystem {
        psi_plus_r,
        psi_minus_r,
        phi_plus_l,
        phi_minus_l,
        degenerate: energies.degenerate,
        energies,
        momentum: *k,
    }
}

pub fn eigensystem_at(p: &ModelParams, k: &Momentum) -> BiorthogonalSystem {
    let f = build_field(p, k);
    system_with_root(p, k, &f, principal_sqrt(f.norm_sq))
}

/// Eigensystem whose `+` band is the root of `h·h` nearest `reference`, so
/// that finite-difference stencils follow a band continuously across the
/// branch cut of the principal square root.
pub fn eigensystem_following(p: &ModelParams, k: &Momentum, reference: Complex64) -> BiorthogonalSystem {
    let f = build_field(p, k);
    let r = principal_sqrt(f.norm_sq);
    let e = if (r - reference).norm() <= (-r - reference).norm() { r } else { -r };
    system_with_root(p, k, &f, e)
}

impl BiorthogonalSystem {
    pub fn right(&self, band: Band) -> Spinor {
        match band {
            Band::Plus => self.psi_plus_r,
            Band::Minus => self.psi_minus_r,
        }
    }

    pub fn left(&self, band: Band) -> Spinor {
        match band {
            Band::Plus => self.phi_plus_l,
            Band::Minus => self.phi_minus_l,
        }
    }

    pub fn energy(&self, band: Band) -> Complex64 {
        match band {
            Band::Plus => self.energies.e_plus,
            Band::Minus => self.energies.e_minus,
        }
    }

    pub fn check_nondegenerate(&self) -> Result<()> {
        if self.degenerate {
            Err(Error::DegenerateEigensystem {
                kx: self.momentum.kx,
                ky: self.momentum.ky,
                abs_e: self.energies.modulus,
            })
        } else {
            Ok(())
        }
    }

    /// `⟨φ_α|ψ_β⟩` with rows and columns ordered `(+, −)`.
    pub fn gram(&self) -> Mat2 {
        let l = [self.phi_plus_l, self.phi_minus_l];
        let r = [self.psi_plus_r, self.psi_minus_r];
        let mut g = Mat2::zero();
        for a in 0..2 {
            for b in 0..2 {
                g.0[a][b] = l[a].inner(&r[b]);
            }
        }
        g
    }

    /// Rescales `ψ_band → c·ψ_band` and `φ_band → φ_band/c*`, preserving
    /// biorthonormality.
    pub fn regauge(&self, band: Band, c: Complex64) -> BiorthogonalSystem {
        let mut s = *self;
        let inv = c.conj().inv();
        match band {
            Band::Plus => {
                s.psi_plus_r = s.psi_plus_r.scale(c);
                s.phi_plus_l = s.phi_plus_l.scale(inv);
            }
            Band::Minus => {
                s.psi_minus_r = s.psi_minus_r.scale(c);
                s.phi_minus_l = s.phi_minus_l.scale(inv);
            }
        }
        s
    }

    /// Biorthonormal trace `Σ_α ⟨φ_α|X|ψ_α⟩`.
    pub fn trace(&self, x: &Mat2) -> Complex64 {
        self.phi_plus_l.inner(&x.apply(&self.psi_plus_r)) + self.phi_minus_l.inner(&x.apply(&self.psi_minus_r))
    }

    /// Adjoint trace `Σ_α ⟨ψ_α|X|φ_α⟩`.
    pub fn trace_adjoint(&self, x: &Mat2) -> Complex64 {
        self.psi_plus_r.inner(&x.apply(&self.phi_plus_l)) + self.psi_minus_r.inner(&x.apply(&self.phi_minus_l))
    }

    /// `|ψ_band⟩⟨φ_band|` without the degeneracy check.
    pub fn projector_matrix(&self, band: Band) -> Mat2 {
        self.right(band).outer(&self.left(band))
    }
}

/// Outer-product projectors `P_± = |ψ_±⟩⟨φ_±|`.
pub fn projectors(sys: &BiorthogonalSystem) -> Result<(Projector, Projector)> {
    sys.check_nondegenerate()?;
    Ok((
        Projector { matrix: sys.projector_matrix(Band::Plus), band: Band::Plus },
        Projector { matrix: sys.projector_matrix(Band::Minus), band: Band::Minus },
    ))
}

/// `P_± = (I ± ĥ·σ)/2` from the field directly.
pub fn projector_closed_form(f: &ComplexField3, band: Band) -> Result<Projector> {
    let unit = f.unit().ok_or(Error::SingularPoint {
        kx: f.hx.re,
        ky: f.hy.re,
        reason: "h·h = 0".into(),
    })?;
    let hs = unit.dot_sigma().scale(Complex64::new(band.sign(), 0.0));
    Ok(Projector { matrix: (Mat2::identity() + hs).scale(ONE * 0.5), band })
}

//! Small fixed-size complex linear algebra: spinors, 2×2 matrices, Pauli
//! matrices, complex 3-vectors and the branch conventions used everywhere.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
fn positive_zero_imag(z: Complex64) -> Complex64 {
    // -0.0 + 0.0 == +0.0; other values unchanged.
    Complex64::new(z.re, z.im + 0.0)
}

/// Principal square root with the tie-break `Re ≥ 0`, and `Im ≥ 0` when `Re = 0`.
///
/// `num_complex` honours the sign of a zero imaginary part, so `sqrt(-1 - 0i)`
/// would return `-i`; the sign of zero is normalised first.
#[inline]
pub fn principal_sqrt(z: Complex64) -> Complex64 {
    positive_zero_imag(z).sqrt()
}

/// Principal logarithm with `Im ∈ (-π, π]`.
#[inline]
pub fn principal_ln(z: Complex64) -> Complex64 {
    positive_zero_imag(z).ln()
}

/// Complex 2-component spinor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinor(pub [Complex64; 2]);

impl Spinor {
    pub fn new(a: Complex64, b: Complex64) -> Self {
        Spinor([a, b])
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Spinor) -> Complex64 {
        self.0[0].conj() * other.0[0] + self.0[1].conj() * other.0[1]
    }

    pub fn norm(&self) -> f64 {
        (self.0[0].norm_sqr() + self.0[1].norm_sqr()).sqrt()
    }

    pub fn scale(&self, c: Complex64) -> Spinor {
        Spinor([self.0[0] * c, self.0[1] * c])
    }

    /// `|self⟩⟨other|`
    pub fn outer(&self, other: &Spinor) -> Mat2 {
        let mut m = Mat2::zero();
        for r in 0..2 {
            for c in 0..2 {
                m.0[r][c] = self.0[r] * other.0[c].conj();
            }
        }
        m
    }
}

impl Sub for Spinor {
    type Output = Spinor;
    fn sub(self, rhs: Spinor) -> Spinor {
        Spinor([self.0[0] - rhs.0[0], self.0[1] - rhs.0[1]])
    }
}

/// Dense complex 2×2 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub fn zero() -> Self {
        Mat2([[ZERO; 2]; 2])
    }

    pub fn identity() -> Self {
        Mat2([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn from_rows(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> Complex64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn adjoint(&self) -> Mat2 {
        Mat2([
            [self.0[0][0].conj(), self.0[1][0].conj()],
            [self.0[0][1].conj(), self.0[1][1].conj()],
        ])
    }

    pub fn scale(&self, c: Complex64) -> Mat2 {
        let mut m = *self;
        for row in m.0.iter_mut() {
            for x in row.iter_mut() {
                *x *= c;
            }
        }
        m
    }

    pub fn apply(&self, v: &Spinor) -> Spinor {
        Spinor([
            self.0[0][0] * v.0[0] + self.0[0][1] * v.0[1],
            self.0[1][0] * v.0[0] + self.0[1][1] * v.0[1],
        ])
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .fold(0.0_f64, |acc, x| acc.max(x.norm()))
    }

    pub fn commutator(&self, other: &Mat2) -> Mat2 {
        *self * *other - *other * *self
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let mut m = self;
        for r in 0..2 {
            for c in 0..2 {
                m.0[r][c] += rhs.0[r][c];
            }
        }
        m
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        self + (-rhs)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(-ONE)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let mut m = Mat2::zero();
        for r in 0..2 {
            for c in 0..2 {
                m.0[r][c] = self.0[r][0] * rhs.0[0][c] + self.0[r][1] * rhs.0[1][c];
            }
        }
        m
    }
}

/// Complex 3-vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CVec3(pub [Complex64; 3]);

impl CVec3 {
    pub fn new(x: Complex64, y: Complex64, z: Complex64) -> Self {
        CVec3([x, y, z])
    }

    /// Bilinear dot product `a·b` (no conjugation).
    pub fn dot(&self, other: &CVec3) -> Complex64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    pub fn cross(&self, o: &CVec3) -> CVec3 {
        let a = &self.0;
        let b = &o.0;
        CVec3([
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ])
    }

    pub fn scale(&self, c: Complex64) -> CVec3 {
        CVec3([self.0[0] * c, self.0[1] * c, self.0[2] * c])
    }

    pub fn conj(&self) -> CVec3 {
        CVec3([self.0[0].conj(), self.0[1].conj(), self.0[2].conj()])
    }

    /// `a·σ = ax σx + ay σy + az σz`
    pub fn dot_sigma(&self) -> Mat2 {
        let [x, y, z] = self.0;
        Mat2::from_rows(z, x - I * y, x + I * y, -z)
    }
}

pub fn sigma_x() -> Mat2 {
    Mat2::from_rows(ZERO, ONE, ONE, ZERO)
}

pub fn sigma_y() -> Mat2 {
    Mat2::from_rows(ZERO, -I, I, ZERO)
}

pub fn sigma_z() -> Mat2 {
    Mat2::from_rows(ONE, ZERO, ZERO, -ONE)
}

//! Two-component complex fields and the 2x2 elements acting on them.
//!
//! A [`FieldVec2`] is either a Jones vector (x/y polarization) or a
//! long/short path pair for interferometric setups. The common carrier
//! phase is factored out everywhere, so every quantity here is
//! dimensionless and only relative phases survive.

use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

/// Complex amplitude.
pub type Cplx = Complex64;

const ZERO: Cplx = Cplx::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldVec2 {
    pub c0: Cplx,
    pub c1: Cplx,
}

impl FieldVec2 {
    pub const ZERO: FieldVec2 = FieldVec2 { c0: ZERO, c1: ZERO };

    pub const fn new(c0: Cplx, c1: Cplx) -> Self {
        FieldVec2 { c0, c1 }
    }

    pub const fn real(x: f64, y: f64) -> Self {
        FieldVec2 { c0: Cplx::new(x, 0.0), c1: Cplx::new(y, 0.0) }
    }

    /// |c0|² + |c1|².
    pub fn norm_sqr(&self) -> f64 {
        self.c0.norm_sqr() + self.c1.norm_sqr()
    }

    pub fn scale(&self, k: Cplx) -> Self {
        FieldVec2 { c0: self.c0 * k, c1: self.c1 * k }
    }

    pub fn is_finite(&self) -> bool {
        self.c0.is_finite() && self.c1.is_finite()
    }
}

impl Add for FieldVec2 {
    type Output = FieldVec2;
    fn add(self, rhs: FieldVec2) -> FieldVec2 {
        FieldVec2 { c0: self.c0 + rhs.c0, c1: self.c1 + rhs.c1 }
    }
}

impl Sub for FieldVec2 {
    type Output = FieldVec2;
    fn sub(self, rhs: FieldVec2) -> FieldVec2 {
        FieldVec2 { c0: self.c0 - rhs.c0, c1: self.c1 - rhs.c1 }
    }
}

impl Neg for FieldVec2 {
    type Output = FieldVec2;
    fn neg(self) -> FieldVec2 {
        FieldVec2 { c0: -self.c0, c1: -self.c1 }
    }
}

/// Row-major 2x2 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub m00: Cplx,
    pub m01: Cplx,
    pub m10: Cplx,
    pub m11: Cplx,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2::real(1.0, 0.0, 0.0, 1.0);

    pub const fn real(m00: f64, m01: f64, m10: f64, m11: f64) -> Self {
        Mat2 { m00: Cplx::new(m00, 0.0), m01: Cplx::new(m01, 0.0), m10: Cplx::new(m10, 0.0), m11: Cplx::new(m11, 0.0) }
    }

    pub fn scale(&self, k: Cplx) -> Self {
        Mat2 { m00: self.m00 * k, m01: self.m01 * k, m10: self.m10 * k, m11: self.m11 * k }
    }

    /// Largest absolute entry difference; handy for approximate comparisons.
    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        [
            (self.m00 - other.m00).norm(),
            (self.m01 - other.m01).norm(),
            (self.m10 - other.m10).norm(),
            (self.m11 - other.m11).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, b: Mat2) -> Mat2 {
        Mat2 {
            m00: self.m00 * b.m00 + self.m01 * b.m10,
            m01: self.m00 * b.m01 + self.m01 * b.m11,
            m10: self.m10 * b.m00 + self.m11 * b.m10,
            m11: self.m10 * b.m01 + self.m11 * b.m11,
        }
    }
}

impl Mul<FieldVec2> for Mat2 {
    type Output = FieldVec2;
    fn mul(self, e: FieldVec2) -> FieldVec2 {
        FieldVec2 { c0: self.m00 * e.c0 + self.m01 * e.c1, c1: self.m10 * e.c0 + self.m11 * e.c1 }
    }
}

/// Linear polarizer with transmission axis at `theta` from x.
pub fn polarizer(theta: f64) -> Mat2 {
    let (s, c) = libm::sincos(theta);
    Mat2::real(c * c, c * s, s * c, s * s)
}

pub fn apply(m: &Mat2, e: &FieldVec2) -> FieldVec2 {
    *m * *e
}

/// Scalar amplitude transmitted by an analyzer at `theta`: the component of
/// `e` along `(cos θ, sin θ)`. Its modulus squared is the transmitted intensity.
pub fn project(e: &FieldVec2, theta: f64) -> Cplx {
    let (s, c) = libm::sincos(theta);
    e.c0 * c + e.c1 * s
}

/// `conj(a) · b`.
pub fn inner_conj(a: &FieldVec2, b: &FieldVec2) -> Cplx {
    a.c0.conj() * b.c0 + a.c1.conj() * b.c1
}

/// Unit-norm long/short path pair `(e^{iφ}, 1)/√2`; the long path carries
/// the adjustable phase.
pub fn phase_arm(phi: f64) -> FieldVec2 {
    let (s, c) = libm::sincos(phi);
    let k = core::f64::consts::FRAC_1_SQRT_2;
    FieldVec2::new(Cplx::new(c * k, s * k), Cplx::new(k, 0.0))
}

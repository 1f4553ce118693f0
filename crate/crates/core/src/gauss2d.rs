//! Bivariate Gaussian primitives.
//!
//! The positioning error `p̂ − p` is a zero-mean Gaussian with covariance
//! `R = G·diag(σ1², σ2²)·Gᵀ`, where `G` rotates by the orientation `φ` of the
//! error ellipse's major axis. Everything downstream works with the
//! quadratic form `v·R·vᵀ`; the symmetric square root is only needed for
//! sampling.

use core::f64::consts::{FRAC_1_SQRT_2, PI};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// A point (or vector) in the plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }
}

/// Principal standard deviations and orientation of the error ellipse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositioningErrorModel {
    sigma1: f64,
    sigma2: f64,
    phi: f64,
}

impl PositioningErrorModel {
    /// `sigma1 >= sigma2 > 0`; `phi` is reduced to `[0, π)`.
    pub fn new(sigma1: f64, sigma2: f64, phi: f64) -> Result<Self> {
        if !(sigma1.is_finite() && sigma2.is_finite() && phi.is_finite()) {
            return Err(Error::InvalidModel("parameters must be finite"));
        }
        if sigma2 <= 0.0 {
            return Err(Error::InvalidModel("sigma2 must be > 0"));
        }
        if sigma1 < sigma2 {
            return Err(Error::InvalidModel("sigma1 must be >= sigma2"));
        }
        let mut phi = libm::fmod(phi, PI);
        if phi < 0.0 {
            phi += PI;
        }
        // fmod of a value just below a multiple of π can round up to π
        if phi >= PI {
            phi = 0.0;
        }
        Ok(Self {
            sigma1,
            sigma2,
            phi,
        })
    }

    pub fn sigma1(&self) -> f64 {
        self.sigma1
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn covariance(&self) -> Covariance2x2 {
        covariance_from_model(self)
    }
}

/// Builds `G·diag(σ1², σ2²)·Gᵀ`.
pub fn covariance_from_model(m: &PositioningErrorModel) -> Covariance2x2 {
    let (s, c) = libm::sincos(m.phi);
    let v1 = m.sigma1 * m.sigma1;
    let v2 = m.sigma2 * m.sigma2;
    Covariance2x2 {
        r11: v1 * c * c + v2 * s * s,
        r12: (v1 - v2) * s * c,
        r22: v1 * s * s + v2 * c * c,
    }
}

/// Symmetric positive-definite 2×2 covariance matrix `[[r11, r12], [r12, r22]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Covariance2x2 {
    r11: f64,
    r12: f64,
    r22: f64,
}

impl Covariance2x2 {
    pub fn new(r11: f64, r12: f64, r22: f64) -> Result<Self> {
        let det = r11 * r22 - r12 * r12;
        if r11.is_finite()
            && r12.is_finite()
            && r22.is_finite()
            && r11 > 0.0
            && r22 > 0.0
            && det > 0.0
        {
            Ok(Self { r11, r12, r22 })
        } else {
            Err(Error::NotPositiveDefinite)
        }
    }

    /// `σ²·I`.
    pub fn isotropic(sigma: f64) -> Result<Self> {
        Self::new(sigma * sigma, 0.0, sigma * sigma)
    }

    pub fn r11(&self) -> f64 {
        self.r11
    }

    pub fn r12(&self) -> f64 {
        self.r12
    }

    pub fn r22(&self) -> f64 {
        self.r22
    }

    pub fn trace(&self) -> f64 {
        self.r11 + self.r22
    }

    pub fn det(&self) -> f64 {
        self.r11 * self.r22 - self.r12 * self.r12
    }

    /// `v·R·vᵀ`.
    pub fn quad_form(&self, v: Point) -> f64 {
        self.r11 * v.x * v.x + 2.0 * self.r12 * v.x * v.y + self.r22 * v.y * v.y
    }

    /// `c·R` for `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(c * self.r11, c * self.r12, c * self.r22)
    }

    /// Eigenvalues, largest first.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * (self.r11 + self.r22);
        let rad = libm::hypot(0.5 * (self.r11 - self.r22), self.r12);
        let big = mean + rad;
        // det / big avoids cancellation in mean − rad
        (big, self.det() / big)
    }

    /// The symmetric positive-definite `S` with `S·S = R`.
    pub fn spectral_sqrt(&self) -> SymMatrix2 {
        spectral_sqrt(self)
    }
}

/// Symmetric 2×2 matrix `[[a11, a12], [a12, a22]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymMatrix2 {
    pub a11: f64,
    pub a12: f64,
    pub a22: f64,
}

impl SymMatrix2 {
    pub fn apply(&self, v: Point) -> Point {
        Point::new(
            self.a11 * v.x + self.a12 * v.y,
            self.a12 * v.x + self.a22 * v.y,
        )
    }

    /// Rows of the matrix (equal to its columns).
    pub fn rows(&self) -> (Point, Point) {
        (
            Point::new(self.a11, self.a12),
            Point::new(self.a12, self.a22),
        )
    }

    /// `S·S` (the product of two symmetric copies).
    pub fn square(&self) -> [[f64; 2]; 2] {
        let (a, b, d) = (self.a11, self.a12, self.a22);
        [
            [a * a + b * b, a * b + b * d],
            [b * a + d * b, b * b + d * d],
        ]
    }
}

/// Closed-form symmetric root of a 2×2 SPD matrix:
/// `S = (R + √det·I) / √(tr + 2√det)`.
pub fn spectral_sqrt(r: &Covariance2x2) -> SymMatrix2 {
    let s = libm::sqrt(r.det());
    let t = libm::sqrt(r.trace() + 2.0 * s);
    SymMatrix2 {
        a11: (r.r11 + s) / t,
        a12: r.r12 / t,
        a22: (r.r22 + s) / t,
    }
}

/// Gaussian tail probability `Q(x) = Pr(Z > x)`, `Z ~ N(0, 1)`.
///
/// Evaluated as `erfc(x/√2)/2` with the FreeBSD/musl rational `erfc`
/// kernel, which is accurate to about one ulp. Scaling by `1/√2` adds a
/// relative error of roughly `x²·ε`, so the result stays within 1e-12
/// relative for `|x| <= 8` and underflows gracefully past `x ≈ 38`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// Standard normal CDF, `Φ(x) = Q(−x)`.
pub fn normal_cdf(x: f64) -> f64 {
    q_function(-x)
}

/// The region `{p : a1·x + a2·y >= b}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlane {
    a1: f64,
    a2: f64,
    b: f64,
}

impl HalfPlane {
    pub fn new(a1: f64, a2: f64, b: f64) -> Result<Self> {
        if !(a1.is_finite() && a2.is_finite() && b.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "half-plane",
                reason: "coefficients must be finite",
            });
        }
        if a1 == 0.0 && a2 == 0.0 {
            return Err(Error::DegenerateNormal);
        }
        Ok(Self { a1, a2, b })
    }

    pub fn normal(&self) -> Point {
        Point::new(self.a1, self.a2)
    }

    pub fn offset(&self) -> f64 {
        self.b
    }

    /// The closure of the complementary half-plane.
    pub fn complement(&self) -> Self {
        Self {
            a1: -self.a1,
            a2: -self.a2,
            b: -self.b,
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        self.a1 * p.x + self.a2 * p.y >= self.b
    }
}

/// Gaussian measure of `h` under `N(mean, R)`:
/// `Q((b − a·mean) / √(a·R·aᵀ))`.
pub fn halfplane_prob(h: &HalfPlane, mean: Point, r: &Covariance2x2) -> f64 {
    let a = h.normal();
    let spread = libm::sqrt(r.quad_form(a));
    q_function((h.b - a.dot(mean)) / spread)
}

/// Draws from `N(mean, R)` as `mean + S·z` with `S` the spectral root.
#[derive(Debug, Clone, Copy)]
pub struct GaussianSampler {
    mean: Point,
    root: SymMatrix2,
}

impl GaussianSampler {
    pub fn new(mean: Point, r: &Covariance2x2) -> Self {
        Self {
            mean,
            root: r.spectral_sqrt(),
        }
    }

    pub fn sample<G: Rng + ?Sized>(&self, rng: &mut G) -> Point {
        let z1: f64 = StandardNormal.sample(rng);
        let z2: f64 = StandardNormal.sample(rng);
        let e = self.root.apply(Point::new(z1, z2));
        Point::new(self.mean.x + e.x, self.mean.y + e.y)
    }
}

/// One draw from `N(mean, R)`. Build a [`GaussianSampler`] for repeated draws.
pub fn sample_gaussian<G: Rng + ?Sized>(mean: Point, r: &Covariance2x2, rng: &mut G) -> Point {
    GaussianSampler::new(mean, r).sample(rng)
}

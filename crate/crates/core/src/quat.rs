//! Quaternion arithmetic and the two polar forms used for coefficient analysis.
//!
//! Components are stored as `(r, i, j, k)` with `ij = k`, `jk = i`, `ki = j`.
//! Phases are kept in cycles, orientations in radians.

use num_complex::Complex64;
use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct Quaternion {
    pub r: f64,
    pub i: f64,
    pub j: f64,
    pub k: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(r: f64, i: f64, j: f64, k: f64) -> Self {
        Self { r, i, j, k }
    }

    pub const fn real(r: f64) -> Self {
        Self::new(r, 0.0, 0.0, 0.0)
    }

    /// Basis unit by index: 0 → 1, 1 → i, 2 → j, 3 → k.
    pub fn basis(u: usize) -> Self {
        match u {
            0 => Self::ONE,
            1 => Self::I,
            2 => Self::J,
            3 => Self::K,
            _ => panic!("quaternion basis index {u} out of range"),
        }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.r, self.i, self.j, self.k]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn conj(self) -> Self {
        Self::new(self.r, -self.i, -self.j, -self.k)
    }

    pub fn norm_sqr(self) -> f64 {
        self.r * self.r + self.i * self.i + self.j * self.j + self.k * self.k
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Scalar part, `(q + q*)/2`.
    pub fn re(self) -> f64 {
        self.r
    }

    /// Pure part, `(q - q*)/2`.
    pub fn pu(self) -> Self {
        Self::new(0.0, self.i, self.j, self.k)
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.r * s, self.i * s, self.j * s, self.k * s)
    }

    pub fn inverse(self) -> Self {
        self.conj().scale(1.0 / self.norm_sqr())
    }

    /// Embeds a complex number as `re + e·im` for a unit pure quaternion `e`.
    pub fn from_complex_along(z: Complex64, e: UnitPure) -> Self {
        let (s, c) = e.nu.sin_cos();
        Self::new(z.re, z.im * c, z.im * s, 0.0)
    }

    pub fn is_finite(self) -> bool {
        self.r.is_finite() && self.i.is_finite() && self.j.is_finite() && self.k.is_finite()
    }
}

/// Hamilton product.
pub fn qmul(a: Quaternion, b: Quaternion) -> Quaternion {
    Quaternion::new(
        a.r * b.r - a.i * b.i - a.j * b.j - a.k * b.k,
        a.r * b.i + a.i * b.r + a.j * b.k - a.k * b.j,
        a.r * b.j - a.i * b.k + a.j * b.r + a.k * b.i,
        a.r * b.k + a.i * b.j - a.j * b.i + a.k * b.r,
    )
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, rhs: Quaternion) -> Quaternion {
        qmul(self, rhs)
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    fn mul(self, rhs: f64) -> Quaternion {
        self.scale(rhs)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    fn mul(self, rhs: Quaternion) -> Quaternion {
        rhs.scale(self)
    }
}

impl Div<f64> for Quaternion {
    type Output = Quaternion;
    fn div(self, rhs: f64) -> Quaternion {
        self.scale(1.0 / rhs)
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.r + o.r, self.i + o.i, self.j + o.j, self.k + o.k)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, o: Quaternion) {
        *self = *self + o;
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.r - o.r, self.i - o.i, self.j - o.j, self.k - o.k)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.r, -self.i, -self.j, -self.k)
    }
}

/// Unit pure quaternion `e_ν = i·cos ν + j·sin ν`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitPure {
    pub nu: f64,
}

impl UnitPure {
    pub fn new(nu: f64) -> Self {
        Self { nu }
    }

    pub fn quaternion(self) -> Quaternion {
        let (s, c) = self.nu.sin_cos();
        Quaternion::new(0.0, c, s, 0.0)
    }

    /// `e^{t·e} = cos t + e·sin t`.
    pub fn exp(self, t: f64) -> Quaternion {
        let (s, c) = t.sin_cos();
        Quaternion::real(c) + self.quaternion().scale(s)
    }
}

/// `e^{t·u}` for an arbitrary unit pure quaternion `u` (not checked).
pub fn exp_pure(u: Quaternion, t: f64) -> Quaternion {
    let (s, c) = t.sin_cos();
    Quaternion::real(c) + u.pu().scale(s)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PolarHypercomplex {
    pub magnitude: f64,
    /// Cycles, in (-1/2, 1/2].
    pub alpha: f64,
    /// Cycles, in (-1/4, 1/4].
    pub beta: f64,
    /// Cycles, in [-1/8, 1/8].
    pub gamma: f64,
}

impl PolarHypercomplex {
    /// `|q| e^{2πiα} e^{2πkγ} e^{2πjβ}`.
    pub fn to_quaternion(self) -> Quaternion {
        let tau = 2.0 * PI;
        let a = exp_pure(Quaternion::I, tau * self.alpha);
        let g = exp_pure(Quaternion::K, tau * self.gamma);
        let b = exp_pure(Quaternion::J, tau * self.beta);
        (a * g * b).scale(self.magnitude)
    }
}

/// Gimbal-lock guard on `|sin(4πγ)|`.
const GAMMA_LOCK: f64 = 1.0 - 1e-12;

/// Polar angles of `q`. The half-angle formulas determine `q` up to sign; the
/// sign is fixed afterwards by moving `α` half a cycle.
pub fn polar_hypercomplex(q: Quaternion) -> Result<PolarHypercomplex> {
    let mag = q.norm();
    if !(mag > 0.0) || !mag.is_finite() {
        return Err(Error::ZeroQuaternion);
    }
    let u = q.scale(1.0 / mag);
    let (q1, q2, q3, q4) = (u.r, u.i, u.j, u.k);
    let four_pi = 4.0 * PI;
    let s = (2.0 * (q2 * q3 - q1 * q4)).clamp(-1.0, 1.0);
    let gamma = -s.asin() / four_pi;
    let (alpha, beta) = if s.abs() >= GAMMA_LOCK {
        // only α ± β is defined; put everything into α
        (q2.atan2(q1) / (2.0 * PI), 0.0)
    } else {
        let alpha = (2.0 * (q3 * q4 + q1 * q2)).atan2(q1 * q1 + q3 * q3 - q2 * q2 - q4 * q4) / four_pi;
        let beta = (2.0 * (q2 * q4 + q1 * q3)).atan2(q1 * q1 + q2 * q2 - q3 * q3 - q4 * q4) / four_pi;
        (alpha, beta)
    };
    let mut p = PolarHypercomplex { magnitude: mag, alpha, beta, gamma };
    let back = p.to_quaternion();
    if (back - q).norm_sqr() > (back + q).norm_sqr() {
        p.alpha += if p.alpha > 0.0 { -0.5 } else { 0.5 };
    }
    Ok(p)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PolarMonogenic {
    pub amplitude: f64,
    /// Radians in [0, π); `None` when the pure part vanishes.
    pub orientation: Option<f64>,
    /// Cycles, in (-1/2, 1/2].
    pub phase: f64,
}

impl PolarMonogenic {
    pub fn is_degenerate(&self) -> bool {
        self.orientation.is_none()
    }

    /// `|g| e^{2π e_ν φ}`; a degenerate orientation is read as ν = 0.
    pub fn to_quaternion(self) -> Quaternion {
        let nu = self.orientation.unwrap_or(0.0);
        UnitPure::new(nu).exp(2.0 * PI * self.phase).scale(self.amplitude)
    }
}

/// Amplitude, orientation and phase of `r + i·x + j·y`. The k-component must be
/// zero (relative to the magnitude).
///
/// The orientation is folded into [0, π); the sign of the pure part moves into
/// the phase, which is what the `sgn(j)` factor of the arctangent form does.
pub fn polar_monogenic(q: Quaternion) -> Result<PolarMonogenic> {
    let amp = (q.r * q.r + q.i * q.i + q.j * q.j).sqrt();
    if q.k.abs() > 1e-12 * amp.max(f64::MIN_POSITIVE) {
        return Err(Error::NotMonogenic(q.k));
    }
    let pure = q.i.hypot(q.j);
    if pure == 0.0 {
        let phase = if q.r < 0.0 { 0.5 } else { 0.0 };
        return Ok(PolarMonogenic { amplitude: amp, orientation: None, phase });
    }
    let mut nu = q.j.atan2(q.i);
    let mut sign = 1.0;
    if nu < 0.0 {
        nu += PI;
        sign = -1.0;
    }
    if nu >= PI {
        nu -= PI;
        sign = -sign;
    }
    let phase = (sign * pure).atan2(q.r) / (2.0 * PI);
    Ok(PolarMonogenic { amplitude: amp, orientation: Some(nu), phase })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    I,
    J,
}

/// Cayley-Dickson pair. Axis `i`: `q = (r + j·j_c) + i·(i_c + j·k_c)`.
/// Axis `j`: `q = (r + i·i_c) + j·(j_c - i·k_c)`.
/// The complex numbers are returned as (real, imaginary) coefficient pairs.
pub fn cayley_dickson_split(q: Quaternion, axis: Axis) -> (Complex64, Complex64) {
    match axis {
        Axis::I => (Complex64::new(q.r, q.j), Complex64::new(q.i, q.k)),
        Axis::J => (Complex64::new(q.r, q.i), Complex64::new(q.j, -q.k)),
    }
}

pub fn cayley_dickson_join(simplex: Complex64, perplex: Complex64, axis: Axis) -> Quaternion {
    match axis {
        Axis::I => {
            // (a + j b) + i (c + j d) = a + i c + j b + k d
            Quaternion::new(simplex.re, perplex.re, simplex.im, perplex.im)
        }
        Axis::J => {
            // (a + i b) + j (c + i d) = a + i b + j c - k d
            Quaternion::new(simplex.re, simplex.im, perplex.re, -perplex.im)
        }
    }
}

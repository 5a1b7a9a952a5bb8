//! Quaternionic Morse wavelets evaluated analytically in the frequency domain.
//!
//! Each wavelet has four real spatial components `ψ_r, ψ_i, ψ_j, ψ_k`. They
//! are carried here through their ordinary (complex) Fourier transforms
//! `C_u(f)`; the quaternion-valued transform with right kernel
//! `e^{-2πj f·x}` is `Σ e_u·(Re C_u + j·Im C_u)`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::field::{ComplexField, FreqGrid, QuaternionField};
use crate::quat::Quaternion;
use crate::spectral::{rotate_back, sgn, Fft2};

pub const MAX_LAGUERRE_ORDER: usize = 12;

/// Generalised Laguerre polynomial `L_n^c(x)` by its finite series.
pub fn laguerre(n: usize, c: f64, x: f64) -> Result<f64> {
    if n > MAX_LAGUERRE_ORDER {
        return Err(Error::OrderTooLarge(n));
    }
    let mut sum = 0.0;
    let mut xr = 1.0;
    let mut rfact = 1.0;
    for r in 0..=n {
        // binomial(n + c, n - r) as a product, exact for small n
        let mut binom = 1.0;
        for k in 1..=(n - r) {
            binom *= (c + r as f64 + k as f64) / k as f64;
        }
        let term = binom * xr / rfact;
        sum += if r % 2 == 0 { term } else { -term };
        xr *= x;
        rfact *= (r + 1) as f64;
    }
    Ok(sum)
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// One-dimensional Morse parameters `[β, γ, n]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MorseParams1D {
    pub n: usize,
    pub beta: f64,
    pub gamma: f64,
}

impl Default for MorseParams1D {
    fn default() -> Self {
        Self { n: 0, beta: 9.0, gamma: 4.0 }
    }
}

impl MorseParams1D {
    pub fn c(&self) -> f64 {
        (2.0 * self.beta + 1.0) / self.gamma - 1.0
    }

    pub fn validate(&self) -> Result<()> {
        if self.n > MAX_LAGUERRE_ORDER {
            return Err(Error::OrderTooLarge(self.n));
        }
        if !(self.beta > 0.0 && self.gamma > 0.0 && self.beta.is_finite() && self.gamma.is_finite()) {
            return Err(Error::InvalidParams(format!("need β > 0 and γ > 0, got β={}, γ={}", self.beta, self.gamma)));
        }
        Ok(())
    }

    /// `ln A` with `A² = πγ·2^{c+1}·n!/Γ(n+c+1)`, giving unit energy to the
    /// analytic wavelet.
    pub fn ln_norm(&self) -> f64 {
        let c = self.c();
        0.5 * (PI.ln() + self.gamma.ln() + (c + 1.0) * 2f64.ln() + ln_factorial(self.n) - ln_gamma(self.n as f64 + c + 1.0))
    }
}

/// Which part of the 1-D Morse wavelet to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MorsePart {
    Analytic,
    Even,
    Odd,
}

/// Precomputed 1-D Morse evaluator.
#[derive(Debug, Clone, Copy)]
pub struct Morse1D {
    pub params: MorseParams1D,
    ln_a: f64,
    c: f64,
}

impl Morse1D {
    pub fn new(params: MorseParams1D) -> Result<Self> {
        params.validate()?;
        Ok(Self { params, ln_a: params.ln_norm(), c: params.c() })
    }

    /// `√2·A·u^β·e^{-u^γ}·L_n^c(2u^γ)` with `u = 2πf`, zero for `f ≤ 0`.
    pub fn analytic(&self, f: f64) -> f64 {
        if f <= 0.0 {
            return 0.0;
        }
        let p = &self.params;
        let u = 2.0 * PI * f;
        let ug = u.powf(p.gamma);
        let lnv = 0.5 * 2f64.ln() + self.ln_a + p.beta * u.ln() - ug;
        let lag = if p.n == 0 { 1.0 } else { laguerre(p.n, self.c, 2.0 * ug).unwrap() };
        lnv.exp() * lag
    }

    /// FT of the even part: `Ψ⁺(|f|)/2`.
    pub fn even(&self, f: f64) -> f64 {
        0.5 * self.analytic(f.abs())
    }

    /// FT of the odd part: `-i·sgn(f)·Ψ^{(e)}(f)`.
    pub fn odd(&self, f: f64) -> Complex64 {
        Complex64::new(0.0, -sgn(f) * self.even(f))
    }

    pub fn eval(&self, part: MorsePart, f: f64) -> Complex64 {
        match part {
            MorsePart::Analytic => Complex64::new(self.analytic(f), 0.0),
            MorsePart::Even => Complex64::new(self.even(f), 0.0),
            MorsePart::Odd => self.odd(f),
        }
    }

    /// Frequency (cycles/sample at unit scale) maximising `f^p·|Ψ⁺(f)|`.
    pub fn peak(&self, weight_power: f64) -> f64 {
        peak_search(|f| f.powf(weight_power) * self.analytic(f).abs())
    }
}

pub fn morse1d_ft(p: MorseParams1D, part: MorsePart, f: f64) -> Result<Complex64> {
    Ok(Morse1D::new(p)?.eval(part, f))
}

/// Isotropic Morse parameters `[l, m, n]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MorseParamsIso {
    pub n: usize,
    pub l: f64,
    pub m: f64,
}

impl Default for MorseParamsIso {
    fn default() -> Self {
        Self { n: 0, l: 9.0, m: 4.0 }
    }
}

impl MorseParamsIso {
    pub fn c(&self) -> f64 {
        (2.0 * self.l + 2.0) / self.m - 1.0
    }

    pub fn validate(&self) -> Result<()> {
        if self.n > MAX_LAGUERRE_ORDER {
            return Err(Error::OrderTooLarge(self.n));
        }
        if !(self.m >= 1.0 && self.l > 0.0 && self.l >= self.m / 2.0 - 1.0 && self.l.is_finite() && self.m.is_finite()) {
            return Err(Error::InvalidParams(format!("need m ≥ 1, l > 0, l ≥ m/2 - 1; got l={}, m={}", self.l, self.m)));
        }
        Ok(())
    }

    /// `ln Ã` with `Ã² = 2π·m·2^{c'+1}·n!/Γ(n+c'+1)`, which gives unit energy
    /// over the plane.
    pub fn ln_norm(&self) -> f64 {
        let c = self.c();
        0.5 * ((2.0 * PI).ln() + self.m.ln() + (c + 1.0) * 2f64.ln() + ln_factorial(self.n) - ln_gamma(self.n as f64 + c + 1.0))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MorseIso {
    pub params: MorseParamsIso,
    ln_a: f64,
    c: f64,
}

impl MorseIso {
    pub fn new(params: MorseParamsIso) -> Result<Self> {
        params.validate()?;
        Ok(Self { params, ln_a: params.ln_norm(), c: params.c() })
    }

    /// Radial profile at `|f|`.
    pub fn radial(&self, f: f64) -> f64 {
        if f <= 0.0 {
            return 0.0;
        }
        let p = &self.params;
        let u = 2.0 * PI * f;
        let um = u.powf(p.m);
        let lag = if p.n == 0 { 1.0 } else { laguerre(p.n, self.c, 2.0 * um).unwrap() };
        (self.ln_a + p.l * u.ln() - um).exp() * lag
    }

    pub fn peak(&self, weight_power: f64) -> f64 {
        peak_search(|f| f.powf(weight_power) * self.radial(f).abs())
    }
}

pub fn morse_iso_ft(p: MorseParamsIso, f: f64) -> Result<f64> {
    Ok(MorseIso::new(p)?.radial(f))
}

/// Maximiser of a unimodal-ish positive profile on `(0, ∞)`: coarse log scan,
/// then golden-section refinement.
fn peak_search(g: impl Fn(f64) -> f64) -> f64 {
    let (lo, hi, steps) = (-12.0f64, 3.0f64, 3000);
    let mut best = (lo, f64::MIN);
    for s in 0..=steps {
        let t = lo + (hi - lo) * s as f64 / steps as f64;
        let v = g(t.exp());
        if v > best.1 {
            best = (t, v);
        }
    }
    let d = (hi - lo) / steps as f64;
    let (mut a, mut b) = (best.0 - d, best.0 + d);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let x1 = b - r * (b - a);
        let x2 = a + r * (b - a);
        if g(x1.exp()) > g(x2.exp()) {
            b = x2;
        } else {
            a = x1;
        }
    }
    (0.5 * (a + b)).exp()
}

// ---------------------------------------------------------------------------
// Wavelet kinds

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum WaveletKind {
    /// Product of two 1-D even Morse wavelets of orders `n1`, `n2`, completed
    /// with the odd-even, even-odd and odd-odd partners.
    SeparableHypercomplexing { n1: usize, n2: usize, beta: f64, gamma: f64 },
    IsotropicHypercomplexing(MorseParamsIso),
    IsotropicMonogenic(MorseParamsIso),
    DirectionalMonogenic(MorseParams1D),
    HypercomplexDirectional(MorseParams1D),
}

impl Default for WaveletKind {
    fn default() -> Self {
        WaveletKind::IsotropicMonogenic(MorseParamsIso::default())
    }
}

impl WaveletKind {
    pub fn name(&self) -> &'static str {
        match self {
            WaveletKind::SeparableHypercomplexing { .. } => "separable-hypercomplexing",
            WaveletKind::IsotropicHypercomplexing(_) => "isotropic-hypercomplexing",
            WaveletKind::IsotropicMonogenic(_) => "isotropic-monogenic",
            WaveletKind::DirectionalMonogenic(_) => "directional-monogenic",
            WaveletKind::HypercomplexDirectional(_) => "hypercomplex-directional",
        }
    }

    pub fn is_isotropic(&self) -> bool {
        matches!(self, WaveletKind::IsotropicHypercomplexing(_) | WaveletKind::IsotropicMonogenic(_))
    }

    /// Coefficients are monogenic in θ (`k` part zero) rather than hypercomplex.
    pub fn is_monogenic(&self) -> bool {
        matches!(self, WaveletKind::IsotropicMonogenic(_) | WaveletKind::DirectionalMonogenic(_))
    }

    /// The separable construction with `n1 ≠ n2` is not symmetric under
    /// exchange of axes, which the hypercomplexing admissibility argument
    /// assumes. Such wavelets still evaluate, but callers may warn.
    pub fn is_symmetric(&self) -> bool {
        match self {
            WaveletKind::SeparableHypercomplexing { n1, n2, .. } => n1 == n2,
            _ => true,
        }
    }
}

/// Continuous locality index `ξ = [a, θ, b]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalityIndex {
    pub a: f64,
    pub theta: f64,
    pub b1: f64,
    pub b2: f64,
}

impl LocalityIndex {
    pub fn new(a: f64, theta: f64) -> Self {
        Self { a, theta, b1: 0.0, b2: 0.0 }
    }
}

/// Fourier transforms of the four real component functions at one frequency.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WaveletFt {
    pub r: Complex64,
    pub i: Complex64,
    pub j: Complex64,
    pub k: Complex64,
}

impl WaveletFt {
    pub fn components(&self) -> [Complex64; 4] {
        [self.r, self.i, self.j, self.k]
    }

    pub fn from_components(c: [Complex64; 4]) -> Self {
        Self { r: c[0], i: c[1], j: c[2], k: c[3] }
    }

    pub fn energy(&self) -> f64 {
        self.components().iter().map(|z| z.norm_sqr()).sum()
    }

    /// Quaternion transform with right kernel `e^{-2πj f·x}`.
    pub fn to_quaternion(&self) -> Quaternion {
        self.components()
            .iter()
            .enumerate()
            .fold(Quaternion::ZERO, |acc, (u, z)| acc + Quaternion::basis(u) * Quaternion::new(z.re, 0.0, z.im, 0.0))
    }
}

#[derive(Debug, Clone, Copy)]
enum Eval {
    Separable(Morse1D, Morse1D),
    Iso(MorseIso),
    Directional(Morse1D),
}

/// A wavelet kind with its normalisations precomputed.
#[derive(Debug, Clone, Copy)]
pub struct Wavelet {
    pub kind: WaveletKind,
    eval: Eval,
}

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

impl Wavelet {
    pub fn new(kind: WaveletKind) -> Result<Self> {
        let eval = match kind {
            WaveletKind::SeparableHypercomplexing { n1, n2, beta, gamma } => Eval::Separable(
                Morse1D::new(MorseParams1D { n: n1, beta, gamma })?,
                Morse1D::new(MorseParams1D { n: n2, beta, gamma })?,
            ),
            WaveletKind::IsotropicHypercomplexing(p) | WaveletKind::IsotropicMonogenic(p) => Eval::Iso(MorseIso::new(p)?),
            WaveletKind::DirectionalMonogenic(p) | WaveletKind::HypercomplexDirectional(p) => {
                Eval::Directional(Morse1D::new(p)?)
            }
        };
        Ok(Self { kind, eval })
    }

    /// Mother-wavelet component transforms at (already rotated and scaled)
    /// frequency `ρ`.
    pub fn mother(&self, rho1: f64, rho2: f64) -> [Complex64; 4] {
        self.mother_with_radius(rho1, rho2, rho1.hypot(rho2))
    }

    /// As [`Wavelet::mother`] with `|ρ|` supplied, so isotropic profiles do
    /// not pick up rounding from the rotation.
    fn mother_with_radius(&self, rho1: f64, rho2: f64, r: f64) -> [Complex64; 4] {
        let minus_i = Complex64::new(0.0, -1.0);
        let hyper = |ee: f64, s1: f64, s2: f64| {
            [
                Complex64::new(ee, 0.0),
                minus_i * (s1 * ee),
                minus_i * (s2 * ee),
                Complex64::new(s1 * s2 * ee, 0.0),
            ]
        };
        match (&self.kind, &self.eval) {
            (WaveletKind::SeparableHypercomplexing { .. }, Eval::Separable(m1, m2)) => {
                hyper(m1.even(rho1) * m2.even(rho2), sgn(rho1), sgn(rho2))
            }
            (WaveletKind::IsotropicHypercomplexing(_), Eval::Iso(m)) => {
                hyper(m.radial(r), sgn(rho1), sgn(rho2))
            }
            (WaveletKind::IsotropicMonogenic(_), Eval::Iso(m)) => {
                if r == 0.0 {
                    return [ZERO; 4];
                }
                let v = m.radial(r);
                [Complex64::new(v, 0.0), minus_i * (v * rho1 / r), minus_i * (v * rho2 / r), ZERO]
            }
            (WaveletKind::DirectionalMonogenic(_), Eval::Directional(m)) => {
                let r = rho1.hypot(rho2);
                if r == 0.0 {
                    return [ZERO; 4];
                }
                let (u1, u2) = diagonal(rho1, rho2);
                let d = m.even(u1) * m.even(u2) * (1.0 + sgn(u1) * sgn(u2));
                [Complex64::new(d, 0.0), minus_i * (d * rho1 / r), ZERO, ZERO]
            }
            (WaveletKind::HypercomplexDirectional(_), Eval::Directional(m)) => {
                let (u1, u2) = diagonal(rho1, rho2);
                let p = m.even(u1) * m.even(u2);
                let d = p * (1.0 + sgn(u1) * sgn(u2));
                [Complex64::new(d, 0.0), minus_i * ((sgn(u1) + sgn(u2)) * p), ZERO, ZERO]
            }
            _ => unreachable!("evaluator built from kind"),
        }
    }

    /// Transform of the family member `ξ` at frequency `f`:
    /// `a·C(a·r_{-θ}f)·e^{-2πi f·b}`.
    pub fn member(&self, xi: &LocalityIndex, f1: f64, f2: f64) -> WaveletFt {
        let (p1, p2) = rotate_back(f1, f2, xi.theta);
        let c = self.mother_with_radius(xi.a * p1, xi.a * p2, xi.a * f1.hypot(f2));
        let shift = if xi.b1 == 0.0 && xi.b2 == 0.0 {
            Complex64::new(xi.a, 0.0)
        } else {
            Complex64::from_polar(xi.a, -2.0 * PI * (f1 * xi.b1 + f2 * xi.b2))
        };
        WaveletFt::from_components(c.map(|z| z * shift))
    }

    /// Transform of the anti-monogenic partner (Riesz parts negated). Only
    /// meaningful for `IsotropicMonogenic`.
    pub fn anti_monogenic_member(&self, xi: &LocalityIndex, f1: f64, f2: f64) -> WaveletFt {
        let mut w = self.member(xi, f1, f2);
        w.i = -w.i;
        w.j = -w.j;
        w
    }

    /// Radial frequency (cycles per unit at scale 1) maximising
    /// `|f|^p·|Ψ|` along the wavelet's passband direction.
    pub fn peak_frequency(&self, weight_power: f64) -> f64 {
        match &self.eval {
            Eval::Iso(m) => m.peak(weight_power),
            Eval::Separable(m1, m2) => {
                // along the diagonal both factors share the same argument
                peak_search(|f| {
                    let t = f * FRAC_1_SQRT_2;
                    f.powf(weight_power) * (m1.even(t) * m2.even(t)).abs()
                })
            }
            Eval::Directional(m) => {
                peak_search(|f| {
                    let t = f * FRAC_1_SQRT_2;
                    f.powf(weight_power) * (m.even(t) * m.even(t)).abs()
                })
            }
        }
    }

    /// Energy-weighted magnitude of the mother transform along its passband
    /// direction, used to turn coefficient magnitudes into amplitudes.
    pub fn passband_gain(&self, f: f64) -> f64 {
        let c = match &self.eval {
            Eval::Iso(_) => self.mother(f, 0.0),
            _ if self.kind.is_monogenic() => self.mother(f, 0.0),
            _ => self.mother(f * FRAC_1_SQRT_2, f * FRAC_1_SQRT_2),
        };
        c[0].norm()
    }

    pub fn is_monogenic(&self) -> bool {
        self.kind.is_monogenic()
    }
}

#[inline]
fn diagonal(rho1: f64, rho2: f64) -> (f64, f64) {
    ((rho1 - rho2) * FRAC_1_SQRT_2, (rho1 + rho2) * FRAC_1_SQRT_2)
}

pub fn wavelet_ft_at(kind: WaveletKind, xi: &LocalityIndex, f1: f64, f2: f64) -> Result<WaveletFt> {
    if !(xi.a > 0.0) {
        return Err(Error::NonpositiveScale(xi.a));
    }
    Ok(Wavelet::new(kind)?.member(xi, f1, f2))
}

// ---------------------------------------------------------------------------
// Admissibility

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComponentMask {
    All,
    R,
    I,
    J,
    K,
}

impl ComponentMask {
    fn select(self, c: &[Complex64; 4]) -> f64 {
        match self {
            ComponentMask::All => c.iter().map(|z| z.norm_sqr()).sum(),
            ComponentMask::R => c[0].norm_sqr(),
            ComponentMask::I => c[1].norm_sqr(),
            ComponentMask::J => c[2].norm_sqr(),
            ComponentMask::K => c[3].norm_sqr(),
        }
    }
}

/// Resolution of the admissibility quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    pub radial: usize,
    pub angular: usize,
    pub rel_tol: f64,
    pub max_refinements: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self { radial: 512, angular: 64, rel_tol: 1e-10, max_refinements: 8 }
    }
}

/// `(2π)²·∬|Ψ|²/|f|² d²f` for the selected components.
///
/// In polar coordinates with `t = ln|f|` the integrand becomes `|Ψ|² dt dφ`;
/// both directions use the trapezoid rule and are refined together until
/// successive values agree.
pub fn admissibility_constant(kind: WaveletKind, mask: ComponentMask, q: Quadrature) -> Result<f64> {
    let w = Wavelet::new(kind)?;
    let dens = |t: f64, phi: f64| {
        let f = t.exp();
        mask.select(&w.mother(f * phi.cos(), f * phi.sin()))
    };
    let radial_max = |t: f64| (0..16).map(|s| dens(t, 2.0 * PI * s as f64 / 16.0 + 0.1)).fold(0.0, f64::max);
    // log-radial support: widen until the density is negligible at both ends
    let fpk = w.peak_frequency(0.0).max(1e-6);
    let peak = radial_max(fpk.ln()).max(f64::MIN_POSITIVE);
    let (mut lo, mut hi) = (fpk.ln() - 1.0, fpk.ln() + 1.0);
    while radial_max(lo) > 1e-18 * peak {
        lo -= 0.5;
        if lo < fpk.ln() - 200.0 {
            return Err(Error::DivergentIntegral(f64::INFINITY));
        }
    }
    while radial_max(hi) > 1e-18 * peak {
        hi += 0.5;
        if hi > fpk.ln() + 20.0 {
            return Err(Error::DivergentIntegral(f64::INFINITY));
        }
    }
    let integrate = |nr: usize, na: usize| -> f64 {
        let dt = (hi - lo) / nr as f64;
        let dphi = 2.0 * PI / na as f64;
        let total: f64 = (0..=nr)
            .into_par_iter()
            .map(|s| {
                let t = lo + s as f64 * dt;
                let wgt = if s == 0 || s == nr { 0.5 } else { 1.0 };
                // offset the angular nodes off the axes, where sgn jumps
                let ring: f64 = (0..na).map(|p| dens(t, (p as f64 + 0.5) * dphi)).sum();
                wgt * ring
            })
            .sum();
        (2.0 * PI).powi(2) * total * dt * dphi
    };
    let (mut nr, mut na) = (q.radial, q.angular);
    let mut prev = integrate(nr, na);
    let mut change = f64::INFINITY;
    for _ in 0..q.max_refinements {
        nr *= 2;
        na *= 2;
        let next = integrate(nr, na);
        change = ((next - prev) / next).abs();
        prev = next;
        if change < q.rel_tol {
            break;
        }
    }
    if !prev.is_finite() || prev <= 0.0 || change >= q.rel_tol.max(1e-6) {
        return Err(Error::DivergentIntegral(change));
    }
    Ok(prev)
}

// ---------------------------------------------------------------------------
// Spatial rendering

/// Transforms of the four components of member `ξ` on the DFT grid of an
/// `h×w` field.
pub fn member_spectra(w: &Wavelet, xi: &LocalityIndex, h: usize, wd: usize) -> [ComplexField; 4] {
    let grid = FreqGrid::new(h, wd);
    let mut out = [ComplexField::zeros(h, wd), ComplexField::zeros(h, wd), ComplexField::zeros(h, wd), ComplexField::zeros(h, wd)];
    for row in 0..h {
        for col in 0..wd {
            let (f1, f2) = grid.at(row, col);
            let c = w.member(xi, f1, f2).components();
            for u in 0..4 {
                out[u].data[row * wd + col] = c[u];
            }
        }
    }
    out
}

/// Samples of the member wavelet on an `n×n` periodic grid, obtained by
/// inverting its analytic transform.
pub fn spatial_field(kind: WaveletKind, xi: &LocalityIndex, n: usize) -> Result<QuaternionField> {
    if !(xi.a > 0.0) {
        return Err(Error::NonpositiveScale(xi.a));
    }
    if n < 2 {
        return Err(Error::BadShape(n, n));
    }
    let w = Wavelet::new(kind)?;
    let plan = Fft2::new(n, n);
    let specs = member_spectra(&w, xi, n, n);
    let mut out = QuaternionField::zeros(n, n);
    for (u, s) in specs.into_iter().enumerate() {
        out.planes[u] = plan.inverse(s).re().data;
    }
    let frac = boundary_energy_fraction(&out, xi);
    if frac > 1e-3 {
        return Err(Error::WindowTooSmall(frac));
    }
    Ok(out)
}

/// Share of the energy in the outer eighth of either axis, measured
/// periodically from the centre `b`.
pub fn boundary_energy_fraction(q: &QuaternionField, xi: &LocalityIndex) -> f64 {
    let n = q.h as f64;
    let edge = 7.0 * n / 16.0;
    let dist = |x: f64, c: f64| {
        let d = (x - c).rem_euclid(n);
        d.min(n - d)
    };
    let (mut tot, mut bnd) = (0.0, 0.0);
    for row in 0..q.h {
        for col in 0..q.w {
            let e = q.at(row, col).norm_sqr();
            tot += e;
            if dist(col as f64, xi.b1) >= edge || dist(row as f64, xi.b2) >= edge {
                bnd += e;
            }
        }
    }
    if tot == 0.0 {
        0.0
    } else {
        bnd / tot
    }
}

/// Renders on the default window, doubling it until the boundary check
/// passes. Sign-multiplier components decay only algebraically, so the
/// hypercomplexing kinds usually need a few doublings.
pub fn spatial_field_auto(kind: WaveletKind, xi: &LocalityIndex, max_side: usize) -> Result<QuaternionField> {
    let mut n = default_window(kind, xi.a)?;
    loop {
        match spatial_field(kind, xi, n) {
            Err(Error::WindowTooSmall(_)) if 2 * n <= max_side => n *= 2,
            r => return r,
        }
    }
}

/// Power-of-two window side holding six peak wavelengths of the member
/// (more for higher orders).
pub fn default_window(kind: WaveletKind, a: f64) -> Result<usize> {
    let w = Wavelet::new(kind)?;
    // anisotropic kinds decay with their per-axis frequency
    let f0 = if kind.is_isotropic() { w.peak_frequency(0.0) } else { w.peak_frequency(0.0) * FRAC_1_SQRT_2 };
    // higher Laguerre orders spread further in space
    let n = match kind {
        WaveletKind::SeparableHypercomplexing { n1, n2, .. } => n1.max(n2),
        WaveletKind::IsotropicHypercomplexing(p) | WaveletKind::IsotropicMonogenic(p) => p.n,
        WaveletKind::DirectionalMonogenic(p) | WaveletKind::HypercomplexDirectional(p) => p.n,
    };
    let need = 6.0 * ((n + 1) as f64).sqrt() * a / f0;
    Ok((need.ceil() as usize).next_power_of_two().max(16))
}

/// Spatial profile of the isotropic Morse wavelet with `n = 0, m = 2` at
/// radius `x` (scale 1).
pub fn closed_form_iso_m2(l: f64, x: f64) -> Result<f64> {
    let p = MorseParamsIso { n: 0, l, m: 2.0 };
    p.validate()?;
    let a = (l + 2.0) / 2.0;
    let f = hyp1f1_b1(a, -x * x / 4.0)?;
    Ok(p.ln_norm().exp() / (2.0 * PI) * 0.5 * ln_gamma(a).exp() * f)
}

/// `₁F₁(a; 1; z)`. Negative arguments go through Kummer's transformation so
/// the series has no catastrophic cancellation.
pub fn hyp1f1_b1(a: f64, z: f64) -> Result<f64> {
    if z < 0.0 {
        return Ok(z.exp() * hyp1f1_series(1.0 - a, -z)?);
    }
    hyp1f1_series(a, z)
}

fn hyp1f1_series(a: f64, z: f64) -> Result<f64> {
    const MAX_TERMS: usize = 10_000;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        term *= (a + kf) * z / ((kf + 1.0) * (kf + 1.0));
        sum += term;
        if term == 0.0 || (term.abs() < 1e-16 * sum.abs() && kf > a.abs()) {
            return Ok(sum);
        }
    }
    Err(Error::SeriesNonconvergent(MAX_TERMS))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::qft_forward;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn laguerre_values() {
        for (c, x) in [(0.3, 1.7), (-0.5, 4.0), (2.0, 0.0)] {
            assert_eq!(laguerre(0, c, x).unwrap(), 1.0);
        }
        assert!((laguerre(1, 0.0, 2.0).unwrap() + 1.0).abs() < 1e-15);
        assert!((laguerre(2, 1.0, 0.0).unwrap() - 3.0).abs() < 1e-15);
        assert!(matches!(laguerre(13, 0.0, 1.0), Err(Error::OrderTooLarge(13))));
    }

    #[test]
    fn laguerre_matches_recurrence() {
        // (k+1) L_{k+1} = (2k+1+c-x) L_k - (k+c) L_{k-1}
        let (c, x) = (1.3, 2.2);
        let mut prev = 1.0;
        let mut cur = 1.0 + c - x;
        for k in 1..12 {
            let next = ((2.0 * k as f64 + 1.0 + c - x) * cur - (k as f64 + c) * prev) / (k as f64 + 1.0);
            let got = laguerre(k + 1, c, x).unwrap();
            assert!((got - next).abs() < 1e-10 * next.abs().max(1.0), "n={}", k + 1);
            prev = cur;
            cur = next;
        }
    }

    #[test]
    fn morse1d_support_and_peak() {
        let m = Morse1D::new(MorseParams1D::default()).unwrap();
        assert_eq!(m.analytic(-0.1), 0.0);
        let f0 = (9.0f64 / 4.0).powf(0.25) / (2.0 * PI);
        assert!((f0 - 0.19489).abs() < 1e-4);
        assert!((m.peak(0.0) - f0).abs() < 1e-9);
    }

    fn energy_1d(m: &Morse1D) -> f64 {
        let n = 200_000;
        let hi = 2.0;
        let df = hi / n as f64;
        (1..n).map(|k| m.analytic(k as f64 * df).powi(2)).sum::<f64>() * df
    }

    #[test]
    fn morse1d_unit_energy() {
        for p in [MorseParams1D::default(), MorseParams1D { n: 2, beta: 3.0, gamma: 2.0 }, MorseParams1D { n: 1, beta: 1.5, gamma: 3.0 }] {
            let e = energy_1d(&Morse1D::new(p).unwrap());
            assert!((e - 1.0).abs() < 1e-6, "{p:?}: {e}");
        }
    }

    #[test]
    fn morse1d_parts() {
        let m = Morse1D::new(MorseParams1D::default()).unwrap();
        for f in [0.1, 0.2, 0.3] {
            assert_eq!(m.even(f), m.even(-f));
            assert_eq!(m.even(f) * 2.0, m.analytic(f));
            // Ψ⁺ = Ψᵉ + i·Ψᵒ-style recombination: Ψᵉ(f) + i·Ψᵒ(f) vanishes for f < 0
            let z = Complex64::new(m.even(-f), 0.0) + Complex64::new(0.0, 1.0) * m.odd(-f);
            assert!(z.norm() < 1e-15);
        }
    }

    #[test]
    fn iso_unit_energy_and_peak() {
        for p in [MorseParamsIso::default(), MorseParamsIso { n: 1, l: 4.0, m: 2.0 }, MorseParamsIso { n: 0, l: 2.0, m: 3.0 }] {
            let m = MorseIso::new(p).unwrap();
            assert_eq!(m.radial(0.0), 0.0);
            let n = 200_000;
            let df = 2.0 / n as f64;
            let e: f64 = (1..n).map(|k| {
                let f = k as f64 * df;
                2.0 * PI * f * m.radial(f).powi(2)
            }).sum::<f64>() * df;
            assert!((e - 1.0).abs() < 1e-5, "{p:?}: {e}");
        }
        let m = MorseIso::new(MorseParamsIso::default()).unwrap();
        assert!((m.peak(0.0) - (9.0f64 / 4.0).powf(0.25) / (2.0 * PI)).abs() < 1e-9);
    }

    #[test]
    fn iso_params_validated() {
        assert!(MorseIso::new(MorseParamsIso { n: 0, l: 0.0, m: 2.0 }).is_err());
        assert!(MorseIso::new(MorseParamsIso { n: 0, l: 1.0, m: 0.5 }).is_err());
        assert!(MorseIso::new(MorseParamsIso { n: 0, l: 0.5, m: 4.0 }).is_err());
    }

    #[test]
    fn isotropic_monogenic_on_its_ray() {
        let kind = WaveletKind::IsotropicMonogenic(MorseParamsIso::default());
        let theta = 0.7;
        let xi = LocalityIndex::new(3.0, theta);
        let f = 0.06;
        let w = wavelet_ft_at(kind, &xi, f * theta.cos(), f * theta.sin()).unwrap();
        let q = w.to_quaternion();
        let psi = MorseIso::new(MorseParamsIso::default()).unwrap().radial(3.0 * f);
        assert!((q.k + 3.0 * psi).abs() < 1e-12 * psi);
        assert!(q.j.abs() < 1e-12 * psi && q.i.abs() < 1e-12 * psi);
    }

    #[test]
    fn isotropic_monogenic_bracket_structure() {
        let kind = WaveletKind::IsotropicMonogenic(MorseParamsIso { n: 1, l: 5.0, m: 3.0 });
        let w = Wavelet::new(kind).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let xi = LocalityIndex::new(rng.random_range(1.0..6.0), rng.random_range(0.0..2.0 * PI));
            let (f1, f2) = (rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
            let q = w.member(&xi, f1, f2).to_quaternion();
            let d = f2.atan2(f1) - xi.theta;
            let v = xi.a * MorseIso::new(MorseParamsIso { n: 1, l: 5.0, m: 3.0 }).unwrap().radial(xi.a * f1.hypot(f2));
            let want = Quaternion::new(1.0 + d.sin(), 0.0, 0.0, -d.cos()).scale(v);
            assert!((q - want).norm() <= 1e-12 * v.abs());
        }
    }

    #[test]
    fn separable_component_pattern() {
        let kind = WaveletKind::SeparableHypercomplexing { n1: 0, n2: 0, beta: 9.0, gamma: 4.0 };
        let w = wavelet_ft_at(kind, &LocalityIndex::new(1.0, 0.0), 0.15, 0.2).unwrap();
        let ee = w.r.re;
        assert!(ee > 0.0);
        assert_eq!(w.i, Complex64::new(0.0, -ee));
        assert_eq!(w.j, Complex64::new(0.0, -ee));
        assert_eq!(w.k, Complex64::new(ee, 0.0));
    }

    #[test]
    fn directional_kinds_agree_in_passband() {
        let p = MorseParams1D::default();
        let f0 = Morse1D::new(p).unwrap().peak(0.0);
        let dm = Wavelet::new(WaveletKind::DirectionalMonogenic(p)).unwrap();
        let hd = Wavelet::new(WaveletKind::HypercomplexDirectional(p)).unwrap();
        let c = 2f64.sqrt() * f0;
        for s in [-1.0, 1.0] {
            for (d1, d2) in [(0.0, 0.0), (0.1, 0.0), (-0.1, 0.0), (0.0, 0.1), (0.0, -0.1), (0.07, 0.07)] {
                let (r1, r2) = (s * c * (1.0 + d1), s * c * d2);
                let a = dm.mother(r1, r2)[1];
                let b = hd.mother(r1, r2)[1];
                assert!((a - b).norm() <= 0.02 * b.norm(), "{r1} {r2}: {a} vs {b}");
            }
        }
        // the directional monogenic wavelet has no j or k part
        for (r1, r2) in [(0.3, 0.1), (-0.2, 0.25)] {
            let c = dm.mother(r1, r2);
            assert_eq!(c[2], ZERO);
            assert_eq!(c[3], ZERO);
        }
    }

    #[test]
    fn pi_rotation_gives_anti_monogenic() {
        let w = Wavelet::new(WaveletKind::IsotropicMonogenic(MorseParamsIso::default())).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let theta = rng.random_range(0.0..PI);
            let (f1, f2) = (rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3));
            let a = w.member(&LocalityIndex::new(2.0, theta + PI), f1, f2);
            let b = w.anti_monogenic_member(&LocalityIndex::new(2.0, theta), f1, f2);
            for (x, y) in a.components().iter().zip(b.components()) {
                let scale = b.components().iter().fold(0.0f64, |m, z| m.max(z.norm()));
                assert!((x - y).norm() <= 1e-14 * scale, "{a:?} {b:?}");
                assert_eq!(a.r, b.r);
            }
        }
    }

    #[test]
    fn admissibility_relations() {
        let p = MorseParamsIso::default();
        let q = Quadrature::default();
        let mono = WaveletKind::IsotropicMonogenic(p);
        let cr = admissibility_constant(mono, ComponentMask::R, q).unwrap();
        let ca = admissibility_constant(mono, ComponentMask::All, q).unwrap();
        let c1 = admissibility_constant(mono, ComponentMask::I, q).unwrap();
        let c2 = admissibility_constant(mono, ComponentMask::J, q).unwrap();
        assert!(cr > 0.0 && cr.is_finite());
        assert!((ca / (2.0 * cr) - 1.0).abs() < 1e-4);
        assert!(((c1 + c2) / cr - 1.0).abs() < 1e-4);
        assert!(c1 <= cr && c2 <= cr);
    }

    #[test]
    fn admissibility_closed_form_isotropic() {
        // (2π)²·2π·∫|Ψ(f)|²/f df for the isotropic profile, by substitution
        // t = 2(2πf)^m: (2π)³·Ã²/m·2^{-2l/m}·Γ(2l/m)  (n = 0)
        let p = MorseParamsIso::default();
        let c = admissibility_constant(WaveletKind::IsotropicMonogenic(p), ComponentMask::R, Quadrature::default()).unwrap();
        let s = 2.0 * p.l / p.m;
        let want = (2.0 * PI).powi(3) * (2.0 * p.ln_norm()).exp() / p.m * 2f64.powf(-s) * ln_gamma(s).exp();
        assert!((c / want - 1.0).abs() < 1e-9, "{c} vs {want}");
    }

    #[test]
    fn spatial_isotropic_is_quarter_turn_symmetric() {
        let kind = WaveletKind::IsotropicHypercomplexing(MorseParamsIso::default());
        let n = 128;
        let q = spatial_field(kind, &LocalityIndex::new(4.0, 0.0), n).unwrap();
        let r = q.plane(0);
        for row in 0..n {
            for col in 0..n {
                // (x1, x2) -> (-x2, x1)
                let v = r.at(col, (n - row) % n);
                assert!((v - r.at(row, col)).abs() < 1e-10 * r.max_abs());
            }
        }
    }

    #[test]
    fn spatial_separable_is_outer_product() {
        let (beta, gamma) = (9.0, 4.0);
        let kind = WaveletKind::SeparableHypercomplexing { n1: 0, n2: 0, beta, gamma };
        let n = 128;
        let a = 4.0;
        let q = spatial_field(kind, &LocalityIndex::new(a, 0.0), n).unwrap();
        // 1-D even wavelets at scale a: √a·Ψᵉ(a f) each, product gives a·Ψᵉᵉ
        let m = Morse1D::new(MorseParams1D { n: 0, beta, gamma }).unwrap();
        let plan = rustfft::FftPlanner::new().plan_fft_inverse(n);
        let mut v: Vec<Complex64> = (0..n)
            .map(|k| Complex64::new(a.sqrt() * m.even(crate::field::bin_frequency(k, n) * a), 0.0))
            .collect();
        plan.process(&mut v);
        let e: Vec<f64> = v.iter().map(|z| z.re / n as f64).collect();
        for row in 0..n {
            for col in 0..n {
                assert!((q.at(row, col).r - e[col] * e[row]).abs() < 1e-9 * q.plane(0).max_abs());
            }
        }
    }

    #[test]
    fn directional_monogenic_spatial_has_no_j_or_k() {
        let q = spatial_field(WaveletKind::DirectionalMonogenic(MorseParams1D::default()), &LocalityIndex::new(4.0, 0.3), 128).unwrap();
        assert!(q.planes[2].iter().all(|&v| v == 0.0));
        assert!(q.planes[3].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn components_have_zero_mean() {
        let kinds = [
            WaveletKind::SeparableHypercomplexing { n1: 0, n2: 1, beta: 9.0, gamma: 4.0 },
            WaveletKind::IsotropicHypercomplexing(MorseParamsIso::default()),
            WaveletKind::IsotropicMonogenic(MorseParamsIso::default()),
            WaveletKind::DirectionalMonogenic(MorseParams1D::default()),
            WaveletKind::HypercomplexDirectional(MorseParams1D::default()),
        ];
        for kind in kinds {
            let q = spatial_field_auto(kind, &LocalityIndex::new(4.0, 0.4), 2048).unwrap_or_else(|e| panic!("{kind:?}: {e}"));
            for u in 0..4 {
                let p = q.plane(u);
                let norm = p.norm_sqr().sqrt();
                assert!(p.mean().abs() <= 1e-10 * norm, "{kind:?} {u}");
            }
        }
    }

    #[test]
    fn non_symmetric_separable_flagged() {
        assert!(!WaveletKind::SeparableHypercomplexing { n1: 0, n2: 1, beta: 9.0, gamma: 4.0 }.is_symmetric());
        assert!(WaveletKind::SeparableHypercomplexing { n1: 1, n2: 1, beta: 9.0, gamma: 4.0 }.is_symmetric());
    }

    #[test]
    fn hypercomplexing_mother_leaks_into_negative_q1() {
        let n = 128;
        let q = spatial_field(WaveletKind::IsotropicHypercomplexing(MorseParamsIso::default()), &LocalityIndex::new(4.0, 0.0), n).unwrap();
        let s = qft_forward(&q);
        let grid = FreqGrid::new(n, n);
        let (mut tot, mut neg) = (0.0, 0.0);
        for row in 0..n {
            for col in 0..n {
                let e = s.at(row, col).norm_sqr();
                tot += e;
                if grid.at(row, col).0 < 0.0 {
                    neg += e;
                }
            }
        }
        assert!(neg / tot >= 0.01, "{}", neg / tot);
    }

    #[test]
    fn default_window_is_large_enough() {
        let kinds = [
            WaveletKind::SeparableHypercomplexing { n1: 0, n2: 0, beta: 9.0, gamma: 4.0 },
            WaveletKind::IsotropicMonogenic(MorseParamsIso::default()),
            WaveletKind::DirectionalMonogenic(MorseParams1D::default()),
            WaveletKind::HypercomplexDirectional(MorseParams1D::default()),
        ];
        for kind in kinds {
            for a in [2.0, 5.0, 12.0] {
                let n = default_window(kind, a).unwrap();
                assert!(spatial_field(kind, &LocalityIndex::new(a, 0.3), n).is_ok(), "{kind:?} a={a} n={n}");
            }
        }
    }

    #[test]
    fn window_too_small_detected() {
        let r = spatial_field(WaveletKind::IsotropicMonogenic(MorseParamsIso::default()), &LocalityIndex::new(12.0, 0.0), 32);
        assert!(matches!(r, Err(Error::WindowTooSmall(_))));
    }

    #[test]
    fn closed_form_matches_rendering() {
        let (l, a, n) = (9.0, 8.0, 256);
        let kind = WaveletKind::IsotropicMonogenic(MorseParamsIso { n: 0, l, m: 2.0 });
        let q = spatial_field(kind, &LocalityIndex::new(a, 0.0), n).unwrap();
        for s in [0.0, 0.5, 1.0, 2.0] {
            let col = (s * a) as usize;
            let got = q.at(0, col).r;
            let want = closed_form_iso_m2(l, s).unwrap() / a;
            assert!((got - want).abs() <= 1e-6 * want.abs().max(1e-3 * q.plane(0).max_abs()), "x/a={s}: {got} vs {want}");
        }
    }

    #[test]
    fn closed_form_decay_and_mexican_hat() {
        let v0 = closed_form_iso_m2(2.0, 0.0).unwrap();
        // at x = 8 the ratio is exactly -15·e^{-16}
        let r8 = closed_form_iso_m2(2.0, 8.0).unwrap() / v0;
        assert!((r8 + 15.0 * (-16f64).exp()).abs() < 1e-12 * r8.abs());
        assert!(r8.abs() < 2e-6);
        // l = 2 reduces to (1 - x²/4)·e^{-x²/4}
        let ratio: Vec<f64> = [0.3, 1.0, 1.5, 2.5, 3.7]
            .iter()
            .map(|&x| closed_form_iso_m2(2.0, x).unwrap() / ((1.0 - x * x / 4.0) * (-x * x / 4.0).exp()))
            .collect();
        for r in &ratio {
            assert!((r / v0 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn hypergeometric_against_polynomial_case() {
        // ₁F₁(-2; 1; z) = 1 - 2z + z²/2
        for z in [-3.0, 0.5, 4.0] {
            let want = 1.0 - 2.0 * z + z * z / 2.0;
            assert!((hyp1f1_b1(-2.0, z).unwrap() - want).abs() < 1e-12 * want.abs().max(1.0));
        }
        // ₁F₁(1; 1; z) = e^z
        assert!((hyp1f1_b1(1.0, 2.0).unwrap() - 2f64.exp()).abs() < 1e-13);
    }
}

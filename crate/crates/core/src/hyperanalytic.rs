//! Hypercomplex and monogenic extensions of real images, their rotated
//! variants, the four-way and two-way decompositions, and phase shifts.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FreqGrid, QuaternionField, RealField};
use crate::quat::{polar_hypercomplex, polar_monogenic, Quaternion};
use crate::spectral::{
    apply_multiplier_rotated, poisson_convolve, poisson_separable, rotation_cs, Fft2, Multiplier, PoissonDim, PoissonKind,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Sign of the `k` term in the hypercomplex extension. `Standard` adds
/// `+k·H_T g`; `Tilde` uses `-k·H_T g`, which is what the hypercomplexing
/// wavelets produce from their odd-odd component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HcConvention {
    Standard,
    Tilde,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum HyperanalyticKind {
    /// Component `(μ1, μ2)` of the four-way split in axes rotated by `theta`.
    Hypercomplex { mu1: Sign, mu2: Sign, theta: f64 },
    Monogenic { theta: f64 },
    AntiMonogenic { theta: f64 },
}

/// Filtered copies of `g` for several multipliers, sharing one forward FFT.
fn filtered(g: &RealField, ms: &[Multiplier], theta: f64) -> Vec<RealField> {
    let plan = Fft2::new(g.h, g.w);
    let grid = FreqGrid::new(g.h, g.w);
    let spec = plan.forward_real(g);
    ms.par_iter()
        .map(|&m| plan.inverse(apply_multiplier_rotated(&spec, m, &grid, theta)).re())
        .collect()
}

fn assemble(r: &RealField, i: RealField, j: RealField, k: RealField) -> QuaternionField {
    QuaternionField { h: r.h, w: r.w, planes: [r.data.clone(), i.data, j.data, k.data] }
}

/// `g + i·H1 g + j·H2 g + k·H_T g`.
pub fn hypercomplex_extend(g: &RealField) -> QuaternionField {
    hypercomplex_multiplier_extend(g, 0.0, Sign::Plus, Sign::Plus, HcConvention::Standard)
}

pub fn hypercomplex_extend_with(g: &RealField, convention: HcConvention) -> QuaternionField {
    hypercomplex_multiplier_extend(g, 0.0, Sign::Plus, Sign::Plus, convention)
}

/// `g + μ1·i·H̃1 g + μ2·j·H̃2 g ± μ1μ2·k·H̃_T g`, where the tilde operators use
/// signs of the rotated frequency `r_{-θ} f`. Exact for every `theta` because
/// the rotation only enters the multipliers; the cost is that bins on the
/// Nyquist lines are treated as non-analytic.
pub fn hypercomplex_multiplier_extend(g: &RealField, theta: f64, mu1: Sign, mu2: Sign, convention: HcConvention) -> QuaternionField {
    let mut parts = filtered(
        g,
        &[Multiplier::HilbertPartial1, Multiplier::HilbertPartial2, Multiplier::HilbertTotal],
        theta,
    );
    let kt = parts.pop().unwrap();
    let h2 = parts.pop().unwrap();
    let h1 = parts.pop().unwrap();
    let (m1, m2) = (mu1.value(), mu2.value());
    let ks = m1 * m2 * if convention == HcConvention::Standard { 1.0 } else { -1.0 };
    assemble(g, h1.map(|v| m1 * v), h2.map(|v| m2 * v), kt.map(|v| ks * v))
}

fn is_quarter_turn(theta: f64) -> bool {
    let t = (theta / FRAC_PI_2).round();
    (theta - t * FRAC_PI_2).abs() < 1e-12
}

/// θ-hypercomplex signal of a sampled image. Only quarter turns are accepted,
/// since those map the grid onto itself.
pub fn theta_hypercomplex_extend(g: &RealField, theta: f64) -> Result<QuaternionField> {
    if !is_quarter_turn(theta) {
        return Err(Error::UnsupportedRotation(theta));
    }
    Ok(hypercomplex_multiplier_extend(g, theta, Sign::Plus, Sign::Plus, HcConvention::Standard))
}

/// The four components in the order `++, -+, +-, --`. They average to `g`.
pub fn hypercomplex_decompose(g: &RealField, theta: f64) -> [QuaternionField; 4] {
    use Sign::*;
    [(Plus, Plus), (Minus, Plus), (Plus, Minus), (Minus, Minus)]
        .map(|(a, b)| hypercomplex_multiplier_extend(g, theta, a, b, HcConvention::Standard))
}

/// `g ± (i·R1 g + j·R2 g)`.
pub fn monogenic_extend(g: &RealField, sign: Sign) -> QuaternionField {
    theta_monogenic_extend(g, 0.0, sign)
}

/// Monogenic extension with Riesz components taken along axes rotated by θ.
pub fn theta_monogenic_extend(g: &RealField, theta: f64, sign: Sign) -> QuaternionField {
    let mut parts = filtered(g, &[Multiplier::Riesz1, Multiplier::Riesz2], 0.0);
    let r2 = parts.pop().unwrap();
    let r1 = parts.pop().unwrap();
    let (c, s) = rotation_cs(theta);
    let sg = sign.value();
    let i = r1.zip_map(&r2, |a, b| sg * (c * a + s * b));
    let j = r1.zip_map(&r2, |a, b| sg * (-s * a + c * b));
    assemble(g, i, j, RealField::zeros(g.h, g.w))
}

pub fn theta_monogenic_decompose(g: &RealField, theta: f64) -> (QuaternionField, QuaternionField) {
    let plus = theta_monogenic_extend(g, theta, Sign::Plus);
    let mut minus = plus.clone();
    minus.planes[1].iter_mut().for_each(|v| *v = -*v);
    minus.planes[2].iter_mut().for_each(|v| *v = -*v);
    (plus, minus)
}

pub fn extend(g: &RealField, kind: HyperanalyticKind) -> QuaternionField {
    match kind {
        HyperanalyticKind::Hypercomplex { mu1, mu2, theta } => {
            hypercomplex_multiplier_extend(g, theta, mu1, mu2, HcConvention::Standard)
        }
        HyperanalyticKind::Monogenic { theta } => theta_monogenic_extend(g, theta, Sign::Plus),
        HyperanalyticKind::AntiMonogenic { theta } => theta_monogenic_extend(g, theta, Sign::Minus),
    }
}

// ---------------------------------------------------------------------------
// Closed-form generators

/// `amp·cos(2π f1 x1' + φ1)·cos(2π f2 x2' + φ2)` with `x' = r_{-θ} x`.
/// A zero frequency makes that factor the constant `cos φ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparableWave {
    pub amp: f64,
    pub f1: f64,
    pub f2: f64,
    pub phase1: f64,
    pub phase2: f64,
}

impl SeparableWave {
    pub fn plane(amp: f64, f0: f64, phase: f64) -> Self {
        Self { amp, f1: f0, f2: 0.0, phase1: phase, phase2: 0.0 }
    }

    fn args(&self, x1: f64, x2: f64, theta: f64) -> (f64, f64) {
        let (c, s) = rotation_cs(theta);
        let y1 = c * x1 + s * x2;
        let y2 = -s * x1 + c * x2;
        (2.0 * PI * self.f1 * y1 + self.phase1, 2.0 * PI * self.f2 * y2 + self.phase2)
    }

    pub fn sample(&self, x1: f64, x2: f64, theta: f64) -> f64 {
        let (a, b) = self.args(x1, x2, theta);
        self.amp * a.cos() * b.cos()
    }

    /// Value of the θ-hypercomplex signal, `amp·e^{i a}·e^{j b}` after folding
    /// negative frequencies onto positive ones.
    pub fn theta_hypercomplex(&self, x1: f64, x2: f64, theta: f64) -> Quaternion {
        let (a, b) = self.args(x1, x2, theta);
        let left = match self.f1.partial_cmp(&0.0) {
            Some(std::cmp::Ordering::Greater) => Quaternion::new(a.cos(), a.sin(), 0.0, 0.0),
            Some(std::cmp::Ordering::Less) => Quaternion::new(a.cos(), -a.sin(), 0.0, 0.0),
            _ => Quaternion::real(a.cos()),
        };
        let right = match self.f2.partial_cmp(&0.0) {
            Some(std::cmp::Ordering::Greater) => Quaternion::new(b.cos(), 0.0, b.sin(), 0.0),
            Some(std::cmp::Ordering::Less) => Quaternion::new(b.cos(), 0.0, -b.sin(), 0.0),
            _ => Quaternion::real(b.cos()),
        };
        left * right * self.amp
    }
}

/// Samples of a sum of separable waves oriented at `theta`.
pub fn sample_generator(terms: &[SeparableWave], h: usize, w: usize, theta: f64) -> RealField {
    RealField::from_fn(h, w, |x1, x2| terms.iter().map(|t| t.sample(x1, x2, theta)).sum())
}

/// θ-hypercomplex signal of a generator sum, evaluated in closed form at any θ.
pub fn theta_hypercomplex_from_generator(terms: &[SeparableWave], h: usize, w: usize, theta: f64) -> QuaternionField {
    QuaternionField::from_fn(h, w, |x1, x2| {
        terms.iter().fold(Quaternion::ZERO, |acc, t| acc + t.theta_hypercomplex(x1, x2, theta))
    })
}

// ---------------------------------------------------------------------------
// Phase shifts

const PASS_THROUGH: f64 = 1e-12;

/// `|g⁺|·cos(2πφ - θ_s)` from the monogenic polar form; near-zero amplitudes
/// pass through unchanged.
pub fn phase_shift_plane(g: &RealField, shift: f64) -> RealField {
    let m = monogenic_extend(g, Sign::Plus);
    let peak = m.max_norm();
    let mut out = g.clone();
    for idx in 0..m.len() {
        let q = m.get(idx);
        if q.norm() <= PASS_THROUGH * peak {
            continue;
        }
        if let Ok(p) = polar_monogenic(q) {
            out.data[idx] = p.amplitude * (2.0 * PI * p.phase - shift).cos();
        }
    }
    out
}

/// Shifts the two separable oscillations by `shift1` and `shift2` radians,
/// using the polar form of the θ-hypercomplex signal.
pub fn phase_shift_separable(g: &RealField, shift1: f64, shift2: f64, theta: f64) -> Result<RealField> {
    let q = theta_hypercomplex_extend(g, theta)?;
    let peak = q.max_norm();
    let mut out = g.clone();
    for idx in 0..q.len() {
        let v = q.get(idx);
        if v.norm() <= PASS_THROUGH * peak {
            continue;
        }
        let p = polar_hypercomplex(v)?;
        let a = 2.0 * PI * p.alpha - shift1;
        let b = 2.0 * PI * p.beta - shift2;
        let c = 2.0 * PI * p.gamma;
        out.data[idx] = p.magnitude * (a.cos() * b.cos() * c.cos() + a.sin() * b.sin() * c.sin());
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Generalised Cauchy-Riemann residuals
//
// The sampled image is read as one period of a function on the unit torus, so
// the grid step is `1/w` along x1 and `1/h` along x2. Poisson extensions are
// evaluated exactly through their Fourier multipliers; every derivative, in x
// and in the half-space variables, is a centred difference with the grid step.

fn centred(plus: &RealField, minus: &RealField, step: f64) -> RealField {
    plus.zip_map(minus, |a, b| (a - b) / (2.0 * step))
}

fn dx1(f: &RealField) -> RealField {
    let (h, w) = (f.h, f.w);
    let step = 1.0 / w as f64;
    let mut out = RealField::zeros(h, w);
    for row in 0..h {
        for col in 0..w {
            out.data[row * w + col] = (f.at(row, (col + 1) % w) - f.at(row, (col + w - 1) % w)) / (2.0 * step);
        }
    }
    out
}

fn dx2(f: &RealField) -> RealField {
    let (h, w) = (f.h, f.w);
    let step = 1.0 / h as f64;
    let mut out = RealField::zeros(h, w);
    for row in 0..h {
        for col in 0..w {
            out.data[row * w + col] = (f.at((row + 1) % h, col) - f.at((row + h - 1) % h, col)) / (2.0 * step);
        }
    }
    out
}

fn max_abs_sum(a: &RealField, b: &RealField, sb: f64) -> f64 {
    a.data.iter().zip(&b.data).fold(0.0f64, |m, (x, y)| m.max((x + sb * y).abs()))
}

/// Largest residual of the hypercomplex Cauchy-Riemann system for
/// `u = P P g`, `v1 = Q P g`, `v2 = P Q g`, `v3 = Q Q g` at `y1 = y2 = y`
/// (unit-torus coordinates). The pairs `(u, v1)`, `(v2, v3)` are checked in
/// `(x1, y1)` and `(u, v2)`, `(v1, v3)` in `(x2, y2)`.
pub fn hypercomplex_cr_residual(g: &RealField, y: f64) -> Result<f64> {
    if g.h < 3 || g.w < 3 {
        return Err(Error::BadShape(g.h, g.w));
    }
    let (s1, s2) = (1.0 / g.w as f64, 1.0 / g.h as f64);
    if !(y > s1.max(s2)) {
        return Err(Error::NonpositiveScale(y));
    }
    // Poisson kernels take the half-space variable in samples
    let ext = |y1: f64, y2: f64, c1: bool, c2: bool| poisson_separable(g, y1 * g.w as f64, c1, y2 * g.h as f64, c2);
    let mut worst = 0.0f64;
    for c2 in [false, true] {
        let a = ext(y, y, false, c2)?;
        let b = ext(y, y, true, c2)?;
        let da = centred(&ext(y + s1, y, false, c2)?, &ext(y - s1, y, false, c2)?, s1);
        let db = centred(&ext(y + s1, y, true, c2)?, &ext(y - s1, y, true, c2)?, s1);
        worst = worst.max(max_abs_sum(&da, &dx1(&b), 1.0));
        worst = worst.max(max_abs_sum(&dx1(&a), &db, -1.0));
    }
    for c1 in [false, true] {
        let a = ext(y, y, c1, false)?;
        let b = ext(y, y, c1, true)?;
        let da = centred(&ext(y, y + s2, c1, false)?, &ext(y, y - s2, c1, false)?, s2);
        let db = centred(&ext(y, y + s2, c1, true)?, &ext(y, y - s2, c1, true)?, s2);
        worst = worst.max(max_abs_sum(&da, &dx2(&b), 1.0));
        worst = worst.max(max_abs_sum(&dx2(&a), &db, -1.0));
    }
    Ok(worst)
}

/// Largest residual of the Riesz system for the 2-D Poisson and conjugate
/// Poisson extensions `(u, v1, v2)` at height `y` on a square grid.
pub fn riesz_cr_residual(g: &RealField, y: f64) -> Result<f64> {
    if g.h != g.w || g.h < 3 {
        return Err(Error::BadShape(g.h, g.w));
    }
    let s = 1.0 / g.w as f64;
    if !(y > s) {
        return Err(Error::NonpositiveScale(y));
    }
    let n = g.w as f64;
    let ext = |yy: f64, kind: PoissonKind| poisson_convolve(g, yy * n, kind, PoissonDim::Two);
    let dy = |kind: PoissonKind| -> Result<RealField> { Ok(centred(&ext(y + s, kind)?, &ext(y - s, kind)?, s)) };
    let u = ext(y, PoissonKind::P)?;
    let v1 = ext(y, PoissonKind::Q1)?;
    let v2 = ext(y, PoissonKind::Q2)?;
    let (uy, v1y, v2y) = (dy(PoissonKind::P)?, dy(PoissonKind::Q1)?, dy(PoissonKind::Q2)?);
    let (v1x1, v2x2) = (dx1(&v1), dx2(&v2));
    let div = uy.data.iter().zip(&v1x1.data).zip(&v2x2.data).fold(0.0f64, |m, ((a, b), c)| m.max((a + b + c).abs()));
    let worst = div
        .max(max_abs_sum(&dx1(&u), &v1y, -1.0))
        .max(max_abs_sum(&dx2(&u), &v2y, -1.0))
        .max(max_abs_sum(&dx2(&v1), &dx1(&v2), -1.0));
    Ok(worst)
}

/// Observed convergence order `log2(r_k / r_{k+1})` between successive grid
/// halvings.
pub fn convergence_orders(residuals: &[f64]) -> Vec<f64> {
    residuals.windows(2).map(|p| (p[0] / p[1]).log2()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{filter_real, qft_forward};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_real(h: usize, w: usize, seed: u64) -> RealField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        RealField::from_fn(h, w, |_, _| rng.random_range(-1.0..1.0))
    }

    fn cc(n: usize, k1: f64, k2: f64) -> RealField {
        let nf = n as f64;
        RealField::from_fn(n, n, |x1, x2| (2.0 * PI * k1 * x1 / nf).cos() * (2.0 * PI * k2 * x2 / nf).cos())
    }

    #[test]
    fn hypercomplex_parity_quadruple() {
        let n = 32;
        let (k1, k2) = (3.0, 5.0);
        let q = hypercomplex_extend(&cc(n, k1, k2));
        let nf = n as f64;
        for row in 0..n {
            for col in 0..n {
                let (a, b) = (2.0 * PI * k1 * col as f64 / nf, 2.0 * PI * k2 * row as f64 / nf);
                let want = Quaternion::new(a.cos() * b.cos(), a.sin() * b.cos(), a.cos() * b.sin(), a.sin() * b.sin());
                assert!((q.at(row, col) - want).norm() < 1e-11);
            }
        }
    }

    #[test]
    fn hypercomplex_real_part_is_exact() {
        let g = random_real(9, 12, 1);
        let q = hypercomplex_extend(&g);
        assert_eq!(q.planes[0], g.data);
        let m = monogenic_extend(&g, Sign::Minus);
        assert_eq!(m.planes[0], g.data);
    }

    #[test]
    fn hypercomplex_spectrum_in_first_quadrant() {
        let n = 32;
        let g = RealField::from_fn(n, n, |x1, x2| {
            let nf = n as f64;
            (2.0 * PI * 3.0 * x1 / nf).cos() * (2.0 * PI * 5.0 * x2 / nf + 0.3).cos()
                + 0.5 * (2.0 * PI * 7.0 * x1 / nf + 1.0).sin() * (2.0 * PI * 2.0 * x2 / nf).cos()
        });
        let s = qft_forward(&hypercomplex_extend(&g));
        let grid = FreqGrid::new(n, n);
        let peak = s.max_norm();
        for row in 0..n {
            for col in 0..n {
                let (f1, f2) = grid.at(row, col);
                if f1 < 0.0 || f2 < 0.0 {
                    assert!(s.at(row, col).norm() <= 1e-10 * peak);
                }
            }
        }
    }

    #[test]
    fn separable_gamma_vanishes() {
        let q = hypercomplex_extend(&cc(32, 3.0, 5.0));
        for idx in 0..q.len() {
            let p = polar_hypercomplex(q.get(idx)).unwrap();
            assert!(p.gamma.abs() < 1e-10);
        }
    }

    #[test]
    fn four_components_average_to_input() {
        let g = random_real(10, 8, 2);
        for theta in [0.0, 0.7] {
            let parts = hypercomplex_decompose(&g, theta);
            let sum = parts.iter().skip(1).fold(parts[0].clone(), |a, b| a.add(b)).scale(0.25);
            assert!(sum.max_diff(&g.to_quaternion()) < 1e-14);
        }
    }

    #[test]
    fn theta_zero_is_bit_exact() {
        let g = random_real(12, 12, 3);
        assert_eq!(theta_hypercomplex_extend(&g, 0.0).unwrap(), hypercomplex_extend(&g));
        let (p, m) = theta_monogenic_decompose(&g, 0.0);
        assert_eq!(p, monogenic_extend(&g, Sign::Plus));
        assert_eq!(m, monogenic_extend(&g, Sign::Minus));
    }

    #[test]
    fn off_grid_rotation_rejected() {
        let g = random_real(8, 8, 4);
        assert!(matches!(theta_hypercomplex_extend(&g, 0.3), Err(Error::UnsupportedRotation(_))));
        assert!(theta_hypercomplex_extend(&g, PI).is_ok());
    }

    #[test]
    fn quarter_turn_matches_rotated_grid() {
        // g'(x) = g(r_θ x) on the periodic grid, θ = π/2: g'(x1, x2) = g(-x2, x1)
        let n = 16;
        let g = random_real(n, n, 5);
        let rotated = RealField::from_fn(n, n, |x1, x2| {
            let (c, r) = ((n as f64 - x2) as usize % n, x1 as usize);
            g.at(r, c)
        });
        let hq = hypercomplex_extend(&rotated);
        let tq = theta_hypercomplex_extend(&g, FRAC_PI_2).unwrap();
        // evaluate hq at r_{-θ} x = (x2, -x1)
        for row in 0..n {
            for col in 0..n {
                let v = hq.at((n - col) % n, row);
                assert!((v - tq.at(row, col)).norm() < 1e-12);
            }
        }
        // and the permuted components
        let h1 = filter_real(&g, Multiplier::HilbertPartial1, 0.0);
        let h2 = filter_real(&g, Multiplier::HilbertPartial2, 0.0);
        let ht = filter_real(&g, Multiplier::HilbertTotal, 0.0);
        for idx in 0..tq.len() {
            let want = Quaternion::new(g.data[idx], h2.data[idx], -h1.data[idx], -ht.data[idx]);
            assert!((tq.get(idx) - want).norm() < 1e-12);
        }
    }

    #[test]
    fn generator_matches_multiplier_path() {
        let n = 64;
        let theta = 3f64.atan2(4.0);
        let terms = [
            SeparableWave { amp: 1.0, f1: 5.0 * 2.0 / n as f64, f2: 5.0 / n as f64, phase1: 0.4, phase2: -0.2 },
            SeparableWave::plane(0.5, 5.0 * 3.0 / n as f64, 1.1),
        ];
        let g = sample_generator(&terms, n, n, theta);
        let closed = theta_hypercomplex_from_generator(&terms, n, n, theta);
        assert!(closed.plane(0).zip_map(&g, |a, b| a - b).max_abs() < 1e-12);
        let sampled = hypercomplex_multiplier_extend(&g, theta, Sign::Plus, Sign::Plus, HcConvention::Standard);
        assert!(sampled.max_diff(&closed) < 1e-9, "{}", sampled.max_diff(&closed));
    }

    #[test]
    fn rotated_separable_gamma_vanishes() {
        let n = 64;
        let theta = 3f64.atan2(4.0);
        let t = SeparableWave { amp: 1.0, f1: 10.0 / n as f64, f2: 5.0 / n as f64, phase1: 0.0, phase2: 0.5 };
        let q = theta_hypercomplex_from_generator(&[t], n, n, theta);
        let peak = q.max_norm();
        for idx in 0..q.len() {
            let v = q.get(idx);
            if v.norm() > 1e-6 * peak {
                assert!(polar_hypercomplex(v).unwrap().gamma.abs() < 1e-8);
            }
        }
    }

    #[test]
    fn monogenic_of_plane_wave() {
        let n = 40;
        let (k1, k2) = (4.0f64, 3.0f64);
        let nu = k2.atan2(k1);
        let f0 = (k1 * k1 + k2 * k2).sqrt() / n as f64;
        let g = RealField::from_fn(n, n, |x1, x2| (2.0 * PI * (k1 * x1 + k2 * x2) / n as f64).cos());
        let m = monogenic_extend(&g, Sign::Plus);
        for row in 0..n {
            for col in 0..n {
                let q = m.at(row, col);
                let p = polar_monogenic(q).unwrap();
                assert!((p.amplitude - 1.0).abs() < 1e-11);
                if q.i.hypot(q.j) > 1e-3 {
                    assert!((p.orientation.unwrap() - nu).abs() < 1e-10);
                }
                let along = col as f64 * nu.cos() + row as f64 * nu.sin();
                let d = (p.phase - f0 * along).rem_euclid(1.0);
                assert!(d.min(1.0 - d) < 1e-10);
            }
        }
    }

    #[test]
    fn monogenic_pair_averages_to_input() {
        let g = random_real(11, 9, 6);
        let (p, m) = theta_monogenic_decompose(&g, 0.4);
        assert!(p.add(&m).scale(0.5).max_diff(&g.to_quaternion()) < 1e-15);
        // conjugate pair
        assert!(p.map(|q| q.conj()).max_diff(&m) == 0.0);
    }

    #[test]
    fn theta_monogenic_magnitude_is_rotation_free() {
        let g = random_real(16, 16, 7);
        let a = monogenic_extend(&g, Sign::Plus).magnitude_sqr();
        let b = theta_monogenic_extend(&g, PI / 3.0, Sign::Plus).magnitude_sqr();
        assert!(a.zip_map(&b, |x, y| x.sqrt() - y.sqrt()).max_abs() < 1e-12);
        let r1 = filter_real(&g, Multiplier::Riesz1, 0.0);
        let r2 = filter_real(&g, Multiplier::Riesz2, 0.0);
        let q = theta_monogenic_extend(&g, PI / 3.0, Sign::Plus);
        let (c, s) = ((PI / 3.0).cos(), (PI / 3.0).sin());
        for idx in 0..q.len() {
            assert!((q.planes[1][idx] - (c * r1.data[idx] + s * r2.data[idx])).abs() < 1e-12);
            assert!((q.planes[2][idx] - (-s * r1.data[idx] + c * r2.data[idx])).abs() < 1e-12);
        }
    }

    #[test]
    fn plane_phase_shifts() {
        let n = 32;
        let f0 = 3.0 / n as f64;
        let g = RealField::from_fn(n, n, |x1, _| (2.0 * PI * f0 * x1).cos());
        assert!(phase_shift_plane(&g, 0.0).zip_map(&g, |a, b| a - b).max_abs() < 1e-14);
        let s = phase_shift_plane(&g, FRAC_PI_2);
        let want = RealField::from_fn(n, n, |x1, _| (2.0 * PI * f0 * x1).sin());
        assert!(s.zip_map(&want, |a, b| a - b).max_abs() < 1e-10);
        let s = phase_shift_plane(&g, PI);
        assert!(s.zip_map(&g, |a, b| a + b).max_abs() < 1e-10);
    }

    #[test]
    fn separable_phase_shifts() {
        let n = 32;
        let g = cc(n, 3.0, 5.0);
        let same = phase_shift_separable(&g, 0.0, 0.0, 0.0).unwrap();
        assert!(same.zip_map(&g, |a, b| a - b).max_abs() < 1e-12);
        let s = phase_shift_separable(&g, FRAC_PI_2, 0.0, 0.0).unwrap();
        let want = RealField::from_fn(n, n, |x1, x2| {
            (2.0 * PI * 3.0 * x1 / 32.0).sin() * (2.0 * PI * 5.0 * x2 / 32.0).cos()
        });
        assert!(s.zip_map(&want, |a, b| a - b).max_abs() < 1e-10);
    }

    #[test]
    fn shifted_extension_is_rotated_by_exponentials() {
        let n = 32;
        let g = cc(n, 3.0, 5.0);
        let (t1, t2) = (0.6, -1.1);
        let shifted = phase_shift_separable(&g, t1, t2, 0.0).unwrap();
        let lhs = hypercomplex_extend(&shifted);
        let el = Quaternion::new(t1.cos(), -t1.sin(), 0.0, 0.0);
        let er = Quaternion::new(t2.cos(), 0.0, -t2.sin(), 0.0);
        let rhs = hypercomplex_extend(&g).map(|q| el * q * er);
        assert!(lhs.max_diff(&rhs) < 1e-10);
    }

    fn torus_field(n: usize) -> RealField {
        let nf = n as f64;
        RealField::from_fn(n, n, |x1, x2| {
            let (a, b) = (2.0 * PI * x1 / nf, 2.0 * PI * x2 / nf);
            (a + 0.3).cos() * (2.0 * b).cos() + 0.7 * (3.0 * a - b + 1.1).sin() + 0.4 * (2.0 * a + 3.0 * b).cos()
        })
    }

    #[test]
    fn cauchy_riemann_residuals_are_second_order() {
        let y = 0.1;
        let hc: Vec<f64> = [16, 32, 64].iter().map(|&n| hypercomplex_cr_residual(&torus_field(n), y).unwrap()).collect();
        let rz: Vec<f64> = [16, 32, 64].iter().map(|&n| riesz_cr_residual(&torus_field(n), y).unwrap()).collect();
        for o in convergence_orders(&hc).into_iter().chain(convergence_orders(&rz)) {
            assert!((o - 2.0).abs() < 0.15, "{hc:?} {rz:?}");
        }
    }
}

//! 2-D FFTs, quaternion Fourier transforms, Hilbert/Riesz multipliers and
//! Poisson-kernel convolutions.
//!
//! Forward transforms use `e^{-2πi f·x}` without scaling; inverses scale by
//! `1/(HW)`. Odd multipliers are zero where their coordinate is zero and on
//! the Nyquist line of that coordinate, so that real inputs stay real.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::field::{ComplexField, FreqGrid, QuaternionField, RealField};
use crate::quat::{Quaternion, UnitPure};

/// Reusable 2-D FFT plan for one field shape.
#[derive(Clone)]
pub struct Fft2 {
    pub h: usize,
    pub w: usize,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    pub fn new(h: usize, w: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            h,
            w,
            row_fwd: planner.plan_fft_forward(w),
            row_inv: planner.plan_fft_inverse(w),
            col_fwd: planner.plan_fft_forward(h),
            col_inv: planner.plan_fft_inverse(h),
        }
    }

    fn run(&self, data: &mut [Complex64], inverse: bool) {
        let (h, w) = (self.h, self.w);
        let (row, col) = if inverse { (&self.row_inv, &self.col_inv) } else { (&self.row_fwd, &self.col_fwd) };
        data.par_chunks_mut(w).for_each(|r| row.process(r));
        let mut t = vec![Complex64::new(0.0, 0.0); h * w];
        transpose(data, &mut t, h, w);
        t.par_chunks_mut(h).for_each(|c| col.process(c));
        transpose(&t, data, w, h);
        if inverse {
            let s = 1.0 / (h * w) as f64;
            data.iter_mut().for_each(|z| *z *= s);
        }
    }

    pub fn forward(&self, mut x: ComplexField) -> ComplexField {
        assert_eq!((x.h, x.w), (self.h, self.w));
        self.run(&mut x.data, false);
        x
    }

    pub fn inverse(&self, mut x: ComplexField) -> ComplexField {
        assert_eq!((x.h, x.w), (self.h, self.w));
        self.run(&mut x.data, true);
        x
    }

    pub fn forward_real(&self, x: &RealField) -> ComplexField {
        self.forward(x.to_complex())
    }
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], h: usize, w: usize) {
    const B: usize = 32;
    for r0 in (0..h).step_by(B) {
        for c0 in (0..w).step_by(B) {
            for r in r0..(r0 + B).min(h) {
                for c in c0..(c0 + B).min(w) {
                    dst[c * h + r] = src[r * w + c];
                }
            }
        }
    }
}

pub fn fft2(x: &RealField) -> ComplexField {
    Fft2::new(x.h, x.w).forward_real(x)
}

pub fn fft2_complex(x: &ComplexField) -> ComplexField {
    Fft2::new(x.h, x.w).forward(x.clone())
}

pub fn ifft2(x: &ComplexField) -> ComplexField {
    Fft2::new(x.h, x.w).inverse(x.clone())
}

#[inline]
pub fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `(cos θ, sin θ)` with quarter turns made exact.
#[inline]
pub fn rotation_cs(theta: f64) -> (f64, f64) {
    if theta == 0.0 {
        return (1.0, 0.0);
    }
    let (mut s, mut c) = theta.sin_cos();
    if c.abs() < 1e-12 {
        c = 0.0;
        s = s.signum();
    } else if s.abs() < 1e-12 {
        s = 0.0;
        c = c.signum();
    }
    (c, s)
}

/// Coordinates of `r_{-θ} f`, with components below `1e-12·|f|` snapped to
/// zero so that grid axes stay exact sign boundaries.
#[inline]
pub fn rotate_back(f1: f64, f2: f64, theta: f64) -> (f64, f64) {
    if theta == 0.0 {
        return (f1, f2);
    }
    let (c, s) = rotation_cs(theta);
    let mut p1 = c * f1 + s * f2;
    let mut p2 = -s * f1 + c * f2;
    let tol = 1e-12 * f1.hypot(f2);
    if p1.abs() < tol {
        p1 = 0.0;
    }
    if p2.abs() < tol {
        p2 = 0.0;
    }
    (p1, p2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Multiplier {
    HilbertPartial1,
    HilbertPartial2,
    HilbertTotal,
    Riesz1,
    Riesz2,
}

impl Multiplier {
    /// Factor at bin `(row, col)` for analysis axes rotated by `theta`.
    ///
    /// An odd factor in a rotated coordinate is zeroed on the Nyquist line of
    /// every grid axis that coordinate depends on. Rotated Riesz factors are
    /// the cos/sin combination of the unrotated ones.
    pub fn factor(self, grid: &FreqGrid, row: usize, col: usize, theta: f64) -> Complex64 {
        let zero = Complex64::new(0.0, 0.0);
        let minus_i = Complex64::new(0.0, -1.0);
        let (f1, f2) = grid.at(row, col);
        let (nc, nr) = (grid.nyquist_col(col), grid.nyquist_row(row));
        let (c, s) = rotation_cs(theta);
        let ny1 = (c != 0.0 && nc) || (s != 0.0 && nr);
        let ny2 = (s != 0.0 && nc) || (c != 0.0 && nr);
        match self {
            Multiplier::HilbertPartial1 | Multiplier::HilbertPartial2 | Multiplier::HilbertTotal => {
                let (p1, p2) = rotate_back(f1, f2, theta);
                match self {
                    Multiplier::HilbertPartial1 if !ny1 => minus_i * sgn(p1),
                    Multiplier::HilbertPartial2 if !ny2 => minus_i * sgn(p2),
                    Multiplier::HilbertTotal if !(ny1 || ny2) => Complex64::new(-sgn(p1) * sgn(p2), 0.0),
                    _ => zero,
                }
            }
            Multiplier::Riesz1 | Multiplier::Riesz2 => {
                let f = f1.hypot(f2);
                if f == 0.0 {
                    return zero;
                }
                let r1 = if nc { 0.0 } else { f1 / f };
                let r2 = if nr { 0.0 } else { f2 / f };
                let v = if self == Multiplier::Riesz1 { c * r1 + s * r2 } else { -s * r1 + c * r2 };
                minus_i * v
            }
        }
    }
}

pub fn apply_multiplier(spectrum: &ComplexField, m: Multiplier, grid: &FreqGrid) -> ComplexField {
    apply_multiplier_rotated(spectrum, m, grid, 0.0)
}

pub fn apply_multiplier_rotated(spectrum: &ComplexField, m: Multiplier, grid: &FreqGrid, theta: f64) -> ComplexField {
    let mut out = spectrum.clone();
    for row in 0..out.h {
        for col in 0..out.w {
            out.data[row * out.w + col] *= m.factor(grid, row, col, theta);
        }
    }
    out
}

/// Real-field filter: transform, multiply, invert, keep the real part.
pub fn filter_real(g: &RealField, m: Multiplier, theta: f64) -> RealField {
    let plan = Fft2::new(g.h, g.w);
    let grid = FreqGrid::new(g.h, g.w);
    let spec = plan.forward_real(g);
    plan.inverse(apply_multiplier_rotated(&spec, m, &grid, theta)).re()
}

// ---------------------------------------------------------------------------
// Quaternion Fourier transforms

/// Per-plane cosine/sine sums `(CC, SC, CS, SS)` with `A = 2π x1 q1`,
/// `B = 2π x2 q2`, computed from one complex FFT and its `q1`-mirror.
fn trig_sums(plan: &Fft2, h: &[f64]) -> [Vec<f64>; 4] {
    let (hh, w) = (plan.h, plan.w);
    let f = plan.forward(ComplexField {
        h: hh,
        w,
        data: h.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
    });
    let n = hh * w;
    let mut cc = vec![0.0; n];
    let mut sc = vec![0.0; n];
    let mut cs = vec![0.0; n];
    let mut ss = vec![0.0; n];
    for row in 0..hh {
        for col in 0..w {
            let idx = row * w + col;
            let a = f.data[idx];
            // F(-q1, q2)
            let b = f.data[row * w + (w - col) % w];
            cc[idx] = 0.5 * (a.re + b.re);
            ss[idx] = 0.5 * (b.re - a.re);
            sc[idx] = 0.5 * (b.im - a.im);
            cs[idx] = -0.5 * (a.im + b.im);
        }
    }
    [cc, sc, cs, ss]
}

/// Left-`i`/right-`j` kernel transform. `sign = -1` for the forward transform.
fn qft_core(field: &QuaternionField, sign: f64) -> QuaternionField {
    let plan = Fft2::new(field.h, field.w);
    let mut out = QuaternionField::zeros(field.h, field.w);
    let sums: Vec<[Vec<f64>; 4]> = (0..4).into_par_iter().map(|u| trig_sums(&plan, &field.planes[u])).collect();
    for (u, s) in sums.iter().enumerate() {
        let e = Quaternion::basis(u);
        // j and k anticommute with i, which flips the left exponential
        let s1 = if u >= 2 { -sign } else { sign };
        let s2 = sign;
        #[allow(clippy::needless_range_loop)]
        for idx in 0..field.len() {
            let kern = Quaternion::new(s[0][idx], s1 * s[1][idx], s2 * s[2][idx], s1 * s2 * s[3][idx]);
            let cur = out.get(idx);
            out.set(idx, cur + e * kern);
        }
    }
    if sign > 0.0 {
        out = out.scale(1.0 / field.len() as f64);
    }
    out
}

/// `G_Q(q) = Σ_x e^{-2πi x1 q1} g(x) e^{-2πj x2 q2}`.
pub fn qft_forward(field: &QuaternionField) -> QuaternionField {
    qft_core(field, -1.0)
}

pub fn qft_inverse(spectrum: &QuaternionField) -> QuaternionField {
    qft_core(spectrum, 1.0)
}

/// Transform along a single unit pure quaternion: `Σ g(x) e^{-2π e f·x}`.
pub fn uqft_forward(g: &RealField, e: UnitPure) -> QuaternionField {
    let f = fft2(g);
    complex_to_axis(&f, e)
}

/// Forward transform of a field whose values lie in `span{1, e}`.
pub fn uqft_forward_q(field: &QuaternionField, e: UnitPure) -> QuaternionField {
    let z = axis_to_complex(field, e);
    complex_to_axis(&fft2_complex(&z), e)
}

pub fn uqft_inverse(spectrum: &QuaternionField, e: UnitPure) -> QuaternionField {
    let z = axis_to_complex(spectrum, e);
    complex_to_axis(&ifft2(&z), e)
}

fn axis_to_complex(field: &QuaternionField, e: UnitPure) -> ComplexField {
    let (s, c) = e.nu.sin_cos();
    let data = (0..field.len())
        .map(|i| Complex64::new(field.planes[0][i], c * field.planes[1][i] + s * field.planes[2][i]))
        .collect();
    ComplexField { h: field.h, w: field.w, data }
}

fn complex_to_axis(z: &ComplexField, e: UnitPure) -> QuaternionField {
    let mut out = QuaternionField::zeros(z.h, z.w);
    for (i, v) in z.data.iter().enumerate() {
        out.set(i, Quaternion::from_complex_along(*v, e));
    }
    out
}

/// Fourier transform with the kernel on the right, `Σ q(x) e^{-2πj f·x}`.
pub fn ft_right_j(field: &QuaternionField) -> QuaternionField {
    let plan = Fft2::new(field.h, field.w);
    let mut out = QuaternionField::zeros(field.h, field.w);
    for u in 0..4 {
        let f = plan.forward_real(&field.plane(u));
        let e = Quaternion::basis(u);
        for (idx, z) in f.data.iter().enumerate() {
            let cur = out.get(idx);
            out.set(idx, cur + e * Quaternion::new(z.re, 0.0, z.im, 0.0));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Poisson kernels

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum PoissonKind {
    P,
    Q1,
    Q2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum PoissonDim {
    /// Kernel acts along one axis: `P` and `Q1` along x1, `Q2` along x2.
    One,
    Two,
}

/// 1-D kernels `p = y/(π(x²+y²))`, `q = x/(π(x²+y²))`.
pub fn poisson_kernel_1d(x: f64, y: f64) -> (f64, f64) {
    let d = PI * (x * x + y * y);
    (y / d, x / d)
}

/// 2-D kernels `p = y/(2π(|x|²+y²)^{3/2})`, `q_l = x_l/(2π(|x|²+y²)^{3/2})`.
pub fn poisson_kernel_2d(x1: f64, x2: f64, y: f64) -> (f64, f64, f64) {
    let d = 2.0 * PI * (x1 * x1 + x2 * x2 + y * y).powf(1.5);
    (y / d, x1 / d, x2 / d)
}

/// Periodic convolution with a Poisson kernel. The kernel enters through its
/// closed-form Fourier transform (`e^{-2π|f|y}` times the Hilbert or Riesz
/// factor), which is the periodised continuous kernel.
pub fn poisson_convolve(g: &RealField, y: f64, kind: PoissonKind, dim: PoissonDim) -> Result<RealField> {
    if !(y > 0.0) {
        return Err(Error::NonpositiveScale(y));
    }
    let grid = FreqGrid::new(g.h, g.w);
    let plan = Fft2::new(g.h, g.w);
    let mut spec = plan.forward_real(g);
    for row in 0..g.h {
        for col in 0..g.w {
            let (f1, f2) = grid.at(row, col);
            let fac = match dim {
                PoissonDim::One => {
                    let (fa, ny) = match kind {
                        PoissonKind::P | PoissonKind::Q1 => (f1, grid.nyquist_col(col)),
                        PoissonKind::Q2 => (f2, grid.nyquist_row(row)),
                    };
                    let damp = (-2.0 * PI * fa.abs() * y).exp();
                    match kind {
                        PoissonKind::P => Complex64::new(damp, 0.0),
                        _ if ny => Complex64::new(0.0, 0.0),
                        _ => Complex64::new(0.0, -sgn(fa) * damp),
                    }
                }
                PoissonDim::Two => {
                    let f = f1.hypot(f2);
                    let damp = (-2.0 * PI * f * y).exp();
                    match kind {
                        PoissonKind::P => Complex64::new(damp, 0.0),
                        PoissonKind::Q1 | PoissonKind::Q2 => {
                            let (l, ny) = if kind == PoissonKind::Q1 {
                                (f1, grid.nyquist_col(col))
                            } else {
                                (f2, grid.nyquist_row(row))
                            };
                            if f == 0.0 || ny {
                                Complex64::new(0.0, 0.0)
                            } else {
                                Complex64::new(0.0, -l / f * damp)
                            }
                        }
                    }
                }
            };
            spec.data[row * g.w + col] *= fac;
        }
    }
    Ok(plan.inverse(spec).re())
}

/// Tensor-product kernel `k1(x1, y1) k2(x2, y2)` where each factor is the 1-D
/// `p` (`conjugate = false`) or `q` (`conjugate = true`).
pub fn poisson_separable(g: &RealField, y1: f64, conj1: bool, y2: f64, conj2: bool) -> Result<RealField> {
    for y in [y1, y2] {
        if !(y > 0.0) {
            return Err(Error::NonpositiveScale(y));
        }
    }
    let grid = FreqGrid::new(g.h, g.w);
    let plan = Fft2::new(g.h, g.w);
    let mut spec = plan.forward_real(g);
    let factor = |f: f64, y: f64, conj: bool, ny: bool| -> Complex64 {
        let damp = (-2.0 * PI * f.abs() * y).exp();
        if !conj {
            Complex64::new(damp, 0.0)
        } else if ny {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, -sgn(f) * damp)
        }
    };
    for row in 0..g.h {
        for col in 0..g.w {
            let (f1, f2) = grid.at(row, col);
            let fac = factor(f1, y1, conj1, grid.nyquist_col(col)) * factor(f2, y2, conj2, grid.nyquist_row(row));
            spec.data[row * g.w + col] *= fac;
        }
    }
    Ok(plan.inverse(spec).re())
}

// ---------------------------------------------------------------------------
// Direct-sum oracles (small fields only)

pub mod oracle {
    use super::*;

    pub const MAX_SIDE: usize = 16;

    /// `Σ_x g(x) e^{-2πi(k1 x1/W + k2 x2/H)}` by direct summation.
    pub fn dft2(x: &ComplexField) -> ComplexField {
        assert!(x.h <= MAX_SIDE && x.w <= MAX_SIDE, "oracle is for small fields");
        let mut out = ComplexField::zeros(x.h, x.w);
        for k2 in 0..x.h {
            for k1 in 0..x.w {
                let mut acc = Complex64::new(0.0, 0.0);
                for r in 0..x.h {
                    for c in 0..x.w {
                        let ph = -2.0 * PI * ((k1 * c) as f64 / x.w as f64 + (k2 * r) as f64 / x.h as f64);
                        acc += x.at(r, c) * Complex64::from_polar(1.0, ph);
                    }
                }
                out.data[k2 * x.w + k1] = acc;
            }
        }
        out
    }

    /// Quaternion double sum with the exponentials on their own sides.
    pub fn qft(x: &QuaternionField) -> QuaternionField {
        assert!(x.h <= MAX_SIDE && x.w <= MAX_SIDE, "oracle is for small fields");
        let mut out = QuaternionField::zeros(x.h, x.w);
        for k2 in 0..x.h {
            for k1 in 0..x.w {
                let mut acc = Quaternion::ZERO;
                for r in 0..x.h {
                    for c in 0..x.w {
                        let a = -2.0 * PI * (k1 * c) as f64 / x.w as f64;
                        let b = -2.0 * PI * (k2 * r) as f64 / x.h as f64;
                        let left = Quaternion::new(a.cos(), a.sin(), 0.0, 0.0);
                        let right = Quaternion::new(b.cos(), 0.0, b.sin(), 0.0);
                        acc += left * x.at(r, c) * right;
                    }
                }
                out.set(k2 * x.w + k1, acc);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_real(h: usize, w: usize, seed: u64) -> RealField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        RealField::from_fn(h, w, |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn constant_field_fft() {
        let x = RealField::from_fn(8, 8, |_, _| 1.0);
        let f = fft2(&x);
        assert!((f.data[0].re - 64.0).abs() < 1e-12);
        assert!(f.data[1..].iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn fft_matches_direct_sum() {
        let x = random_real(6, 5, 1);
        let a = fft2(&x);
        let b = oracle::dft2(&x.to_complex());
        for (p, q) in a.data.iter().zip(&b.data) {
            assert!((p - q).norm() < 1e-10);
        }
    }

    #[test]
    fn round_trip_and_parseval() {
        let x = random_real(12, 10, 2);
        let f = fft2(&x);
        let back = ifft2(&f).re();
        let err = back.zip_map(&x, |a, b| a - b).max_abs();
        assert!(err < 1e-12 * x.max_abs());
        let e_x = x.norm_sqr();
        let e_f: f64 = f.data.iter().map(|z| z.norm_sqr()).sum::<f64>() / 120.0;
        assert!((e_x - e_f).abs() < 1e-11 * e_x);
    }

    #[test]
    fn hilbert_of_cosine_is_sine() {
        let n = 32;
        let f0 = 3.0 / n as f64;
        let g = RealField::from_fn(n, n, |x1, _| (2.0 * PI * f0 * x1).cos());
        let h = filter_real(&g, Multiplier::HilbertPartial1, 0.0);
        let want = RealField::from_fn(n, n, |x1, _| (2.0 * PI * f0 * x1).sin());
        assert!(h.zip_map(&want, |a, b| a - b).max_abs() < 1e-11);
    }

    #[test]
    fn total_hilbert_of_product() {
        let n = 32;
        let (f1, f2) = (3.0 / 32.0, 5.0 / 32.0);
        let g = RealField::from_fn(n, n, |x1, x2| (2.0 * PI * f1 * x1).cos() * (2.0 * PI * f2 * x2).cos());
        let h = filter_real(&g, Multiplier::HilbertTotal, 0.0);
        let want = RealField::from_fn(n, n, |x1, x2| (2.0 * PI * f1 * x1).sin() * (2.0 * PI * f2 * x2).sin());
        assert!(h.zip_map(&want, |a, b| a - b).max_abs() < 1e-11);
    }

    #[test]
    fn riesz_of_plane_wave() {
        let n = 40;
        // bin (4, 3): orientation atan2(3, 4)
        let (k1, k2) = (4.0f64, 3.0f64);
        let nu = k2.atan2(k1);
        let ph = |x1: f64, x2: f64| 2.0 * PI * (k1 * x1 + k2 * x2) / n as f64;
        let g = RealField::from_fn(n, n, |x1, x2| ph(x1, x2).cos());
        let r1 = filter_real(&g, Multiplier::Riesz1, 0.0);
        let r2 = filter_real(&g, Multiplier::Riesz2, 0.0);
        let w1 = RealField::from_fn(n, n, |x1, x2| nu.cos() * ph(x1, x2).sin());
        let w2 = RealField::from_fn(n, n, |x1, x2| nu.sin() * ph(x1, x2).sin());
        assert!(r1.zip_map(&w1, |a, b| a - b).max_abs() < 1e-11);
        assert!(r2.zip_map(&w2, |a, b| a - b).max_abs() < 1e-11);
    }

    #[test]
    fn multiplier_output_is_real() {
        let g = random_real(16, 14, 3);
        let plan = Fft2::new(16, 14);
        let grid = FreqGrid::new(16, 14);
        let spec = plan.forward_real(&g);
        for m in [
            Multiplier::HilbertPartial1,
            Multiplier::HilbertPartial2,
            Multiplier::HilbertTotal,
            Multiplier::Riesz1,
            Multiplier::Riesz2,
        ] {
            for theta in [0.0, 0.4] {
                let out = plan.inverse(apply_multiplier_rotated(&spec, m, &grid, theta));
                let im = out.im().max_abs();
                assert!(im < 1e-11 * g.max_abs(), "{m:?} θ={theta}: imaginary residue {im}");
            }
        }
    }

    #[test]
    fn constant_field_qft() {
        let n = 6;
        let q = RealField::from_fn(n, n, |_, _| 1.0).to_quaternion();
        let s = qft_forward(&q);
        assert!((s.get(0) - Quaternion::real(36.0)).norm() < 1e-12);
        assert!((1..s.len()).all(|i| s.get(i).norm() < 1e-12));
    }

    #[test]
    fn qft_matches_double_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let q = QuaternionField::from_fn(5, 6, |_, _| {
            Quaternion::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let a = qft_forward(&q);
        let b = oracle::qft(&q);
        assert!(a.max_diff(&b) < 1e-9);
        let back = qft_inverse(&a);
        assert!(back.max_diff(&q) < 1e-11 * q.max_norm());
    }

    #[test]
    fn qft_real_input_split_relation() {
        let g = random_real(8, 8, 5);
        let s = qft_forward(&g.to_quaternion());
        let f = fft2(&g);
        let half_minus_k = Quaternion::new(0.5, 0.0, 0.0, -0.5);
        let half_plus_k = Quaternion::new(0.5, 0.0, 0.0, 0.5);
        for row in 0..8 {
            for col in 0..8 {
                let a = f.at(row, col);
                let b = f.at(row, (8 - col) % 8);
                let want = half_minus_k * Quaternion::new(a.re, 0.0, a.im, 0.0) + half_plus_k * Quaternion::new(b.re, 0.0, b.im, 0.0);
                assert!((s.at(row, col) - want).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn uqft_along_j_is_fft() {
        let g = random_real(8, 6, 6);
        let e = UnitPure::new(PI / 2.0);
        let u = uqft_forward(&g, e);
        let f = fft2(&g);
        for (idx, z) in f.data.iter().enumerate() {
            let q = u.get(idx);
            assert!((q.r - z.re).abs() < 1e-12 && (q.j - z.im).abs() < 1e-12 && q.i.abs() < 1e-12 && q.k == 0.0);
        }
    }

    #[test]
    fn uqft_round_trip() {
        let g = random_real(10, 12, 7);
        let e = UnitPure::new(0.7);
        let back = uqft_inverse(&uqft_forward(&g, e), e);
        assert!(back.max_diff(&g.to_quaternion()) < 1e-12 * g.max_abs());
    }

    #[test]
    fn poisson_rejects_nonpositive_scale() {
        let g = random_real(4, 4, 8);
        assert!(matches!(poisson_convolve(&g, 0.0, PoissonKind::P, PoissonDim::Two), Err(Error::NonpositiveScale(_))));
    }

    #[test]
    fn poisson_kernel_integrates_to_one() {
        // x = y tan t maps the half line onto [0, π/2)
        for y in [0.1, 1.0, 7.5] {
            let m = 20000;
            let (mut s1, mut s2) = (0.0, 0.0);
            for i in 0..m {
                let t = (i as f64 + 0.5) * (PI / 2.0) / m as f64;
                let x = y * t.tan();
                let dx = y / t.cos().powi(2) * (PI / 2.0) / m as f64;
                s1 += 2.0 * poisson_kernel_1d(x, y).0 * dx;
                s2 += 2.0 * PI * x * poisson_kernel_2d(x, 0.0, y).0 * dx;
            }
            assert!((s1 - 1.0).abs() < 1e-6, "1-D {s1}");
            assert!((s2 - 1.0).abs() < 1e-6, "2-D {s2}");
        }
    }

    #[test]
    fn conjugate_poisson_approximates_hilbert() {
        let n = 64;
        let f0 = 5.0 / n as f64;
        let y = 0.25;
        let g = RealField::from_fn(n, n, |x1, _| (2.0 * PI * f0 * x1).cos());
        let q = poisson_convolve(&g, y, PoissonKind::Q1, PoissonDim::One).unwrap();
        let att = (-2.0 * PI * f0 * y).exp();
        let want = RealField::from_fn(n, n, |x1, _| att * (2.0 * PI * f0 * x1).sin());
        assert!(q.zip_map(&want, |a, b| a - b).max_abs() < 1e-3);
    }
}

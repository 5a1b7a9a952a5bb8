//! Quaternion-valued continuous wavelet transform of real images.
//!
//! For each `(a, θ)` the four real component correlations are computed with
//! FFT multipliers and assembled as `w = w_r - i·w_i - j·w_j - k·w_k`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ComplexField, FreqGrid, QuaternionField, RealField};
use crate::hyperanalytic::{hypercomplex_decompose, hypercomplex_multiplier_extend, theta_monogenic_decompose, HcConvention, Sign};
use crate::quat::Quaternion;
use crate::spectral::Fft2;
use crate::wavelets::{admissibility_constant, ComponentMask, LocalityIndex, Quadrature, Wavelet, WaveletKind};

/// Signs applied to the component correlations when forming `w`.
const ASSEMBLY: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalityGrid {
    pub scales: Vec<f64>,
    pub angles: Vec<f64>,
}

impl LocalityGrid {
    pub fn new(scales: Vec<f64>, angles: Vec<f64>) -> Result<Self> {
        if scales.is_empty() || angles.is_empty() {
            return Err(Error::BadGrid("need at least one scale and one angle".into()));
        }
        if scales.iter().any(|&a| !(a > 0.0) || !a.is_finite()) {
            return Err(Error::BadGrid("scales must be positive and finite".into()));
        }
        if scales.windows(2).any(|p| p[1] <= p[0]) {
            return Err(Error::BadGrid("scales must be strictly increasing".into()));
        }
        if angles.iter().any(|&t| !(0.0..2.0 * PI).contains(&t)) {
            return Err(Error::BadGrid("angles must lie in [0, 2π)".into()));
        }
        Ok(Self { scales, angles })
    }

    /// `voices` log-spaced scales per octave from `min` up to `max`
    /// (inclusive when `max` falls on the lattice).
    pub fn log_scales(min: f64, max: f64, voices: usize) -> Result<Vec<f64>> {
        if !(min > 0.0 && max >= min && voices > 0) {
            return Err(Error::BadGrid(format!("bad scale range {min}:{max} at {voices} voices")));
        }
        let count = (voices as f64 * (max / min).log2() + 1e-9).floor() as usize;
        Ok((0..=count).map(|k| min * 2f64.powf(k as f64 / voices as f64)).collect())
    }

    /// `count` uniform angles `kπ/count` in `[0, π)`.
    pub fn half_turn_angles(count: usize) -> Vec<f64> {
        (0..count).map(|k| PI * k as f64 / count as f64).collect()
    }

    /// 8 voices per octave over `[4, min(H,W)/6]`, angles `kπ/16`.
    pub fn default_for(h: usize, w: usize) -> Result<Self> {
        let max = h.min(w) as f64 / 6.0;
        Self::new(Self::log_scales(4.0, max, 8)?, Self::half_turn_angles(16))
    }

    pub fn scales_per_decade(&self) -> f64 {
        let s = &self.scales;
        if s.len() < 2 {
            return 0.0;
        }
        (s.len() - 1) as f64 / (s[s.len() - 1] / s[0]).log10()
    }

    pub fn len(&self) -> usize {
        self.scales.len() * self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(a, θ)` pairs, scales outermost.
    pub fn pairs(&self) -> Vec<(f64, f64)> {
        self.scales.iter().flat_map(|&a| self.angles.iter().map(move |&t| (a, t))).collect()
    }
}

/// Admissible scales for an `h×w` field.
pub fn scale_bounds(h: usize, w: usize) -> (f64, f64) {
    (2.0, h.min(w) as f64 / 6.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSlab {
    pub a: f64,
    pub theta: f64,
    pub kind: WaveletKind,
    pub coeffs: QuaternionField,
}

/// `a·C_u(a·r_{-θ}f)` on the DFT grid, made Hermitian so that each component
/// is the transform of real periodic samples.
pub fn member_component_spectra(w: &Wavelet, a: f64, theta: f64, grid: &FreqGrid) -> [Vec<Complex64>; 4] {
    let (h, wd) = (grid.h, grid.w);
    let xi = LocalityIndex::new(a, theta);
    let mut raw: [Vec<Complex64>; 4] = std::array::from_fn(|_| vec![Complex64::new(0.0, 0.0); h * wd]);
    for row in 0..h {
        for col in 0..wd {
            let (f1, f2) = grid.at(row, col);
            let c = w.member(&xi, f1, f2).components();
            for u in 0..4 {
                raw[u][row * wd + col] = c[u];
            }
        }
    }
    raw.map(|v| hermitian(&v, grid))
}

fn hermitian(v: &[Complex64], grid: &FreqGrid) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
    for row in 0..grid.h {
        for col in 0..grid.w {
            let (mr, mc) = grid.mirror(row, col);
            out[row * grid.w + col] = 0.5 * (v[row * grid.w + col] + v[mr * grid.w + mc].conj());
        }
    }
    out
}

/// Inverse transform of two Hermitian spectra with one complex FFT.
fn inverse_pair(plan: &Fft2, a: &[Complex64], b: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
    let i = Complex64::new(0.0, 1.0);
    let data = a.iter().zip(b).map(|(x, y)| x + i * y).collect();
    let z = plan.inverse(ComplexField { h: plan.h, w: plan.w, data });
    (z.data.iter().map(|v| v.re).collect(), z.data.iter().map(|v| v.im).collect())
}

/// Forward transforms of two real planes with one complex FFT.
fn forward_pair(plan: &Fft2, grid: &FreqGrid, a: &[f64], b: &[f64]) -> (Vec<Complex64>, Vec<Complex64>) {
    let data = a.iter().zip(b).map(|(&x, &y)| Complex64::new(x, y)).collect();
    let z = plan.forward(ComplexField { h: plan.h, w: plan.w, data });
    let mut fa = vec![Complex64::new(0.0, 0.0); z.data.len()];
    let mut fb = fa.clone();
    let half_i = Complex64::new(0.0, 0.5);
    for row in 0..grid.h {
        for col in 0..grid.w {
            let (mr, mc) = grid.mirror(row, col);
            let p = z.data[row * grid.w + col];
            let q = z.data[mr * grid.w + mc].conj();
            fa[row * grid.w + col] = 0.5 * (p + q);
            fb[row * grid.w + col] = -half_i * (p - q);
        }
    }
    (fa, fb)
}

/// Transform of one image against one wavelet family.
pub struct Analyzer {
    pub h: usize,
    pub w: usize,
    pub wavelet: Wavelet,
    plan: Fft2,
    grid: FreqGrid,
    spectrum: Vec<Complex64>,
    check_scales: bool,
}

impl Analyzer {
    pub fn new(g: &RealField, kind: WaveletKind) -> Result<Self> {
        if g.data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let plan = Fft2::new(g.h, g.w);
        let spectrum = plan.forward_real(g).data;
        Ok(Self { h: g.h, w: g.w, wavelet: Wavelet::new(kind)?, grid: FreqGrid::new(g.h, g.w), plan, spectrum, check_scales: true })
    }

    /// Skips the scale-range precondition. Used by oracles on tiny fields.
    pub fn unchecked(mut self) -> Self {
        self.check_scales = false;
        self
    }

    fn check_scale(&self, a: f64) -> Result<()> {
        let (min, max) = scale_bounds(self.h, self.w);
        if self.check_scales && !(a >= min && a <= max) {
            return Err(Error::ScaleOutOfRange { scale: a, min, max });
        }
        if !(a > 0.0) {
            return Err(Error::NonpositiveScale(a));
        }
        Ok(())
    }

    /// Real correlations `w_u(b) = Σ_x g(x)·ψ_{u,ξ}(x)` for all four components.
    pub fn components(&self, a: f64, theta: f64) -> Result<[RealField; 4]> {
        self.check_scale(a)?;
        let c = member_component_spectra(&self.wavelet, a, theta, &self.grid);
        let w: Vec<Vec<Complex64>> = c.iter().map(|cu| self.spectrum.iter().zip(cu).map(|(g, c)| g * c.conj()).collect()).collect();
        let (p0, p1) = inverse_pair(&self.plan, &w[0], &w[1]);
        // the directional kinds have no j or k component
        let (p2, p3) = if matches!(self.wavelet.kind, WaveletKind::DirectionalMonogenic(_) | WaveletKind::HypercomplexDirectional(_)) {
            (vec![0.0; p0.len()], vec![0.0; p0.len()])
        } else {
            inverse_pair(&self.plan, &w[2], &w[3])
        };
        let mk = |d: Vec<f64>| RealField { h: self.h, w: self.w, data: d };
        Ok([mk(p0), mk(p1), mk(p2), mk(p3)])
    }

    pub fn slab(&self, a: f64, theta: f64) -> Result<CoefficientSlab> {
        let parts = self.components(a, theta)?;
        let mut coeffs = QuaternionField::zeros(self.h, self.w);
        for (u, p) in parts.into_iter().enumerate() {
            let s = ASSEMBLY[u];
            coeffs.planes[u] = if s == 1.0 { p.data } else { p.data.into_iter().map(|v| -v).collect() };
        }
        Ok(CoefficientSlab { a, theta, kind: self.wavelet.kind, coeffs })
    }
}

/// All slabs of `grid`, in grid order (scales outermost).
pub fn cwt(g: &RealField, kind: WaveletKind, grid: &LocalityGrid) -> Result<Vec<CoefficientSlab>> {
    let an = Analyzer::new(g, kind)?;
    grid.pairs().par_iter().map(|&(a, t)| an.slab(a, t)).collect()
}

/// Calls `sink` with each slab in grid order while keeping at most one batch
/// of slabs (one per worker) in memory.
pub fn cwt_streaming(g: &RealField, kind: WaveletKind, grid: &LocalityGrid, mut sink: impl FnMut(CoefficientSlab) -> Result<()>) -> Result<()> {
    let an = Analyzer::new(g, kind)?;
    let pairs = grid.pairs();
    let batch = rayon::current_num_threads().max(1);
    for chunk in pairs.chunks(batch) {
        let slabs: Vec<Result<CoefficientSlab>> = chunk.par_iter().map(|&(a, t)| an.slab(a, t)).collect();
        for s in slabs {
            sink(s?)?;
        }
    }
    Ok(())
}

/// CWT of a quaternion-valued image, `Σ_u e_u·cwt(q_u)`. Only the
/// verification suite needs it.
pub fn cwt_quaternion_slab(q: &QuaternionField, kind: WaveletKind, a: f64, theta: f64) -> Result<QuaternionField> {
    let mut acc = QuaternionField::zeros(q.h, q.w);
    for u in 0..4 {
        let plane = q.plane(u);
        if plane.data.iter().all(|&v| v == 0.0) {
            continue;
        }
        let s = Analyzer::new(&plane, kind)?.slab(a, theta)?;
        acc = acc.add(&s.coeffs.left_mul(Quaternion::basis(u)));
    }
    Ok(acc)
}

/// `Σ_u e_u·w_r(q_u)`: the transform with the real component of the wavelet
/// only.
fn cwt_quaternion_real_part(q: &QuaternionField, kind: WaveletKind, a: f64, theta: f64) -> Result<QuaternionField> {
    let mut acc = QuaternionField::zeros(q.h, q.w);
    for u in 0..4 {
        let r = Analyzer::new(&q.plane(u), kind)?.components(a, theta)?;
        acc.planes[u] = r[0].data.clone();
    }
    Ok(acc)
}

/// Local energy `|w|²`.
pub fn scalogram(slab: &CoefficientSlab) -> RealField {
    slab.coeffs.magnitude_sqr()
}

// ---------------------------------------------------------------------------
// Reconstruction

/// Minimum scale density accepted by [`reconstruct`].
pub const MIN_SCALES_PER_DECADE: f64 = 24.0;
/// Minimum angle count for kinds whose energy depends on direction.
pub const MIN_ANGLES: usize = 16;

/// Weight `2π/M` when the angles tile `[0, π)` or `[0, 2π)` uniformly.
fn angle_weight(kind: &WaveletKind, angles: &[f64]) -> Result<f64> {
    let m = angles.len();
    let angle_free = matches!(kind, WaveletKind::IsotropicMonogenic(_));
    if m == 1 {
        return if angle_free {
            Ok(2.0 * PI)
        } else {
            Err(Error::GridTooCoarse(format!("{} needs at least {MIN_ANGLES} angles", kind.name())))
        };
    }
    if !angle_free && m < MIN_ANGLES {
        return Err(Error::GridTooCoarse(format!("{m} angles, need at least {MIN_ANGLES}")));
    }
    let mut s = angles.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let d = s[1] - s[0];
    let uniform = s.windows(2).all(|p| ((p[1] - p[0]) - d).abs() < 1e-9);
    let span = d * m as f64;
    if !uniform || !((span - PI).abs() < 1e-9 || (span - 2.0 * PI).abs() < 1e-9) {
        return Err(Error::BadGrid("reconstruction needs uniform angles covering [0, π) or [0, 2π)".into()));
    }
    Ok(2.0 * PI / m as f64)
}

/// Trapezoid weights in `ln a`.
fn log_scale_weights(scales: &[f64]) -> Vec<f64> {
    let t: Vec<f64> = scales.iter().map(|a| a.ln()).collect();
    let n = t.len();
    (0..n)
        .map(|k| {
            let left = if k > 0 { t[k] - t[k - 1] } else { 0.0 };
            let right = if k + 1 < n { t[k + 1] - t[k] } else { 0.0 };
            0.5 * (left + right)
        })
        .collect()
}

/// Accumulates slabs one at a time into the inverse transform.
pub struct Reconstructor {
    wavelet: Wavelet,
    plan: Fft2,
    grid: FreqGrid,
    acc: Vec<Complex64>,
    scale_w: Vec<(f64, f64)>,
    angle_w: f64,
    norm: f64,
}

impl Reconstructor {
    pub fn new(kind: WaveletKind, locality: &LocalityGrid, h: usize, w: usize) -> Result<Self> {
        if locality.scales.len() < 2 || locality.scales_per_decade() < MIN_SCALES_PER_DECADE * (1.0 - 1e-9) {
            return Err(Error::GridTooCoarse(format!(
                "{:.1} scales per decade, need at least {MIN_SCALES_PER_DECADE}",
                locality.scales_per_decade()
            )));
        }
        let angle_w = angle_weight(&kind, &locality.angles)?;
        let c = admissibility_constant(kind, ComponentMask::All, Quadrature::default())?;
        let weights = log_scale_weights(&locality.scales);
        Ok(Self {
            wavelet: Wavelet::new(kind)?,
            plan: Fft2::new(h, w),
            grid: FreqGrid::new(h, w),
            acc: vec![Complex64::new(0.0, 0.0); h * w],
            scale_w: locality.scales.iter().copied().zip(weights).collect(),
            angle_w,
            norm: c / (2.0 * PI).powi(2),
        })
    }

    pub fn add(&mut self, slab: &CoefficientSlab) -> Result<()> {
        let wt = self
            .scale_w
            .iter()
            .find(|(a, _)| (a - slab.a).abs() <= 1e-12 * a)
            .map(|&(_, w)| w)
            .ok_or_else(|| Error::BadGrid(format!("slab scale {} is not on the grid", slab.a)))?;
        let weight = wt * self.angle_w / (slab.a * slab.a);
        let c = member_component_spectra(&self.wavelet, slab.a, slab.theta, &self.grid);
        let p = &slab.coeffs.planes;
        let (w0, w1) = forward_pair(&self.plan, &self.grid, &p[0], &p[1]);
        let (w2, w3) = forward_pair(&self.plan, &self.grid, &p[2], &p[3]);
        for (idx, acc) in self.acc.iter_mut().enumerate() {
            let s = w0[idx] * c[0][idx] * ASSEMBLY[0]
                + w1[idx] * c[1][idx] * ASSEMBLY[1]
                + w2[idx] * c[2][idx] * ASSEMBLY[2]
                + w3[idx] * c[3][idx] * ASSEMBLY[3];
            *acc += s * weight;
        }
        Ok(())
    }

    pub fn finish(self) -> RealField {
        let scale = 1.0 / self.norm;
        let data = self.acc.into_iter().map(|z| z * scale).collect();
        self.plan.inverse(ComplexField { h: self.grid.h, w: self.grid.w, data }).re()
    }
}

/// Discretised inverse transform over `da dθ d²b / a³`, normalised by the
/// admissibility constant of the full quaternion wavelet.
pub fn reconstruct(slabs: &[CoefficientSlab], kind: WaveletKind, grid: &LocalityGrid) -> Result<RealField> {
    let first = slabs.first().ok_or_else(|| Error::BadGrid("no slabs".into()))?;
    let (h, w) = (first.coeffs.h, first.coeffs.w);
    let mut r = Reconstructor::new(kind, grid, h, w)?;
    for s in slabs {
        r.add(s)?;
    }
    Ok(r.finish())
}

// ---------------------------------------------------------------------------
// Identity verification

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityResidual {
    pub name: String,
    pub a: f64,
    pub theta: f64,
    /// Largest pointwise difference divided by the largest reference value.
    pub residual: f64,
    /// Identities expected to fail are reported but not gated on.
    pub expect_zero: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub kind: WaveletKind,
    pub entries: Vec<IdentityResidual>,
}

impl IdentityReport {
    pub fn max_residual(&self) -> f64 {
        self.entries.iter().filter(|e| e.expect_zero).map(|e| e.residual).fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_residual() <= tol
    }
}

/// True when the dilated wavelet has non-negligible weight on a nonzero grid
/// bin whose rotated coordinates include an exact zero.
fn wavelet_on_rotated_axes(kind: WaveletKind, a: f64, theta: f64, h: usize, w: usize) -> Result<bool> {
    let wav = Wavelet::new(kind)?;
    let grid = FreqGrid::new(h, w);
    let peak = wav.passband_gain(wav.peak_frequency(0.0)).max(f64::MIN_POSITIVE);
    Ok((0..h).any(|row| {
        (0..w).any(|col| {
            let (f1, f2) = grid.at(row, col);
            let (p1, p2) = crate::spectral::rotate_back(f1, f2, theta);
            (f1 != 0.0 || f2 != 0.0) && (p1 == 0.0 || p2 == 0.0) && wav.mother(a * p1, a * p2)[0].norm() > 1e-13 * peak
        })
    }))
}

fn rel(lhs: &QuaternionField, rhs: &QuaternionField, reference: f64) -> f64 {
    lhs.max_diff(rhs) / reference.max(f64::MIN_POSITIVE)
}

/// Checks the coefficient identities at each `(a, θ)`:
///
/// * monogenic kinds: `M1` w = θ-monogenic extension of `w_r`; `M2` the
///   anti-monogenic component is annihilated; `M3` w(g) = ½·w(g̃⁺);
///   plus the informative `M2+` relation w(g̃⁺) = 2·w_r(g̃⁺).
/// * hypercomplexing kinds: `H1` w = θ-hypercomplex extension of `w_r`, and
///   equals the real-part transform of g̃⁺⁺; `H2` the four-component
///   relations w(g̃⁺⁺) = w(g̃⁺⁻) = 2w(g), w(g̃⁻⁺) = -w(g̃⁻⁻), mean = w(g).
pub fn verify_identities(g: &RealField, kind: WaveletKind, samples: &[(f64, f64)]) -> Result<IdentityReport> {
    let hyper = matches!(kind, WaveletKind::SeparableHypercomplexing { .. } | WaveletKind::IsotropicHypercomplexing(_));
    let mono = matches!(kind, WaveletKind::IsotropicMonogenic(_));
    if !hyper && !mono {
        return Err(Error::UnsupportedKind(kind.name().into()));
    }
    let an = Analyzer::new(g, kind)?;
    let mut entries = Vec::new();
    let mut push = |name: &str, a: f64, theta: f64, residual: f64, expect_zero: bool| {
        entries.push(IdentityResidual { name: name.into(), a, theta, residual, expect_zero });
    };
    for &(a, theta) in samples {
        let w = an.slab(a, theta)?.coeffs;
        let wr = an.components(a, theta)?[0].clone();
        let refv = w.max_norm();
        if mono {
            let ext = crate::hyperanalytic::theta_monogenic_extend(&wr, theta, Sign::Plus);
            push("M1", a, theta, rel(&w, &ext, refv), true);
            let (plus, minus) = theta_monogenic_decompose(g, theta);
            let wm = cwt_quaternion_slab(&minus, kind, a, theta)?;
            push("M2", a, theta, wm.max_norm() / refv.max(f64::MIN_POSITIVE), true);
            let wp = cwt_quaternion_slab(&plus, kind, a, theta)?;
            push("M3", a, theta, rel(&w, &wp.scale(0.5), refv), true);
            let wpr = cwt_quaternion_real_part(&plus, kind, a, theta)?;
            push("M2+", a, theta, rel(&wp, &wpr.scale(2.0), wp.max_norm()), true);
            // the (+) component is not annihilated
            push("M2+nonzero", a, theta, wp.max_norm() / refv.max(f64::MIN_POSITIVE), false);
        } else {
            let ext = hypercomplex_multiplier_extend(&wr, theta, Sign::Plus, Sign::Plus, HcConvention::Standard);
            push("H1-extension", a, theta, rel(&w, &ext, refv), true);
            let parts = hypercomplex_decompose(g, theta);
            let pp = cwt_quaternion_real_part(&parts[0], kind, a, theta)?;
            push("H1-even", a, theta, rel(&w, &pp, refv), true);
            let wq: Vec<QuaternionField> =
                parts.iter().map(|p| cwt_quaternion_slab(p, kind, a, theta)).collect::<Result<_>>()?;
            let two_w = w.scale(2.0);
            push("H2++", a, theta, rel(&wq[0], &two_w, 2.0 * refv), true);
            // the pairwise relations need the wavelet to vanish where a rotated
            // frequency coordinate is exactly zero (sgn 0 splits the bin)
            if !wavelet_on_rotated_axes(kind, a, theta, g.h, g.w)? {
                push("H2+-", a, theta, rel(&wq[2], &two_w, 2.0 * refv), true);
                push("H2-+--", a, theta, rel(&wq[1], &wq[3].scale(-1.0), refv), true);
            }
            let mean = wq[0].add(&wq[1]).add(&wq[2]).add(&wq[3]).scale(0.25);
            push("H2-mean", a, theta, rel(&mean, &w, refv), true);
        }
    }
    Ok(IdentityReport { kind, entries })
}

//! Ridge extraction: local amplitude, frequency, orientation and phase read
//! off the scale (and angle) maxima of the coefficient magnitude.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cwt::CoefficientSlab;
use crate::error::{Error, Result};
use crate::field::RealField;
use crate::quat::{polar_hypercomplex, polar_monogenic, Quaternion};
use crate::wavelets::{Wavelet, WaveletKind};

pub const DEFAULT_THRESHOLD: f64 = 0.05;

/// Neighbourhood half-width used when scoring separability per angle.
const GAMMA_WINDOW: usize = 2;

/// One ridge sample. Phases are in cycles, frequencies in cycles per sample,
/// angles in radians. Fields that do not apply to the wavelet family are
/// `None` and come out as empty CSV cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RidgePoint {
    pub b1: usize,
    pub b2: usize,
    pub scale: f64,
    pub theta: f64,
    pub amplitude: f64,
    pub orientation: Option<f64>,
    pub phase: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    /// Frequency implied by the ridge scale.
    pub freq: f64,
    /// Phase-gradient frequencies: along x1/x2 for the monogenic family, along
    /// the rotated axes for the hypercomplex family.
    pub freq1: Option<f64>,
    pub freq2: Option<f64>,
    pub gamma_score: Option<f64>,
}

/// Wrap into [-1/2, 1/2).
fn wrap(x: f64) -> f64 {
    x - (x + 0.5).floor()
}

/// Wrap a difference of angles that are only defined modulo `period`.
fn wrap_mod(x: f64, period: f64) -> f64 {
    period * wrap(x / period)
}

/// Mean of the two one-sided wrapped differences at `idx` along a line.
fn phase_derivative(get: impl Fn(usize) -> f64, idx: usize, len: usize, period: f64) -> Option<f64> {
    if idx == 0 || idx + 1 >= len {
        return None;
    }
    let fwd = wrap_mod(get(idx + 1) - get(idx), period);
    let bwd = wrap_mod(get(idx) - get(idx - 1), period);
    Some(0.5 * (fwd + bwd))
}

/// Vertex of the parabola through three equally spaced samples, as an offset
/// in steps from the middle one, with the interpolated value.
fn parabolic_peak(ym: f64, y0: f64, yp: f64) -> (f64, f64) {
    let den = ym - 2.0 * y0 + yp;
    if den >= 0.0 {
        return (0.0, y0);
    }
    let d = (0.5 * (ym - yp) / den).clamp(-0.5, 0.5);
    (d, y0 - 0.25 * (ym - yp) * d)
}

fn check_slabs(slabs: &[&CoefficientSlab]) -> Result<(usize, usize)> {
    let first = slabs.first().ok_or(Error::NoRidge)?;
    let (h, w) = (first.coeffs.h, first.coeffs.w);
    for s in slabs {
        if s.coeffs.h != h || s.coeffs.w != w {
            return Err(Error::ShapeMismatch(h, w, s.coeffs.h, s.coeffs.w));
        }
        if s.kind != first.kind {
            return Err(Error::UnsupportedKind(format!("mixed wavelet kinds {} and {}", first.kind.name(), s.kind.name())));
        }
    }
    Ok((h, w))
}

fn sorted_by_scale(mut v: Vec<&CoefficientSlab>) -> Vec<&CoefficientSlab> {
    v.sort_by(|x, y| x.a.total_cmp(&y.a));
    v
}

/// Parabolic refinement in ln a around slab `best`: (refined scale, refined |w|).
fn refine(slabs: &[&CoefficientSlab], mags: &[Vec<f64>], idx: usize, best: usize) -> (f64, f64) {
    let m0 = mags[best][idx];
    if best == 0 || best + 1 == slabs.len() || m0 <= 0.0 {
        return (slabs[best].a, m0);
    }
    let (lm, lp) = (mags[best - 1][idx], mags[best + 1][idx]);
    if lm <= 0.0 || lp <= 0.0 {
        return (slabs[best].a, m0);
    }
    let (la, l0, lb) = (slabs[best - 1].a.ln(), slabs[best].a.ln(), slabs[best + 1].a.ln());
    // log scales are uniform on grids from `log_scales`; fall back otherwise
    if ((l0 - la) - (lb - l0)).abs() > 1e-9 * (lb - la) {
        return (slabs[best].a, m0);
    }
    let (d, peak) = parabolic_peak(lm.ln(), m0.ln(), lp.ln());
    ((l0 + d * (l0 - la)).exp(), peak.exp())
}

/// Scale maximum of |w| at `idx`: (slab index, refined scale, refined |w|).
/// Ties go to the smallest scale.
fn scale_argmax(slabs: &[&CoefficientSlab], mags: &[Vec<f64>], idx: usize) -> (usize, f64, f64) {
    let mut best = 0;
    for s in 1..slabs.len() {
        if mags[s][idx] > mags[best][idx] {
            best = s;
        }
    }
    let (a, m) = refine(slabs, mags, idx, best);
    (best, a, m)
}

/// Every local maximum of |w| over scale at `idx` (plateaus report their
/// smallest scale).
fn scale_maxima(slabs: &[&CoefficientSlab], mags: &[Vec<f64>], idx: usize) -> Vec<(usize, f64, f64)> {
    let n = slabs.len();
    (0..n)
        .filter(|&s| {
            let m = mags[s][idx];
            let left = s == 0 || mags[s - 1][idx] < m;
            let right = s + 1 == n || mags[s + 1][idx] <= m;
            m > 0.0 && left && right
        })
        .map(|s| {
            let (a, m) = refine(slabs, mags, idx, s);
            (s, a, m)
        })
        .collect()
}

/// Monogenic phase of `q` in cycles, signed relative to the direction `nu`
/// so that neighbours on either side of the orientation fold agree.
fn signed_phase(q: Quaternion, nu: f64) -> f64 {
    let proj = q.i * nu.cos() + q.j * nu.sin();
    let pure = q.i.hypot(q.j);
    (if proj < 0.0 { -pure } else { pure }).atan2(q.r) / (2.0 * PI)
}

/// Plane-wave ridge from isotropic monogenic slabs at a single angle (the
/// first angle present is used), one point per position at the global scale
/// maximum.
pub fn monogenic_ridge(slabs: &[CoefficientSlab], threshold: f64) -> Result<Vec<RidgePoint>> {
    monogenic_points(slabs, threshold, false)
}

/// As [`monogenic_ridge`] but with a point for every local scale maximum
/// above the threshold, so superposed components at distinct scales each
/// produce their own ridge.
pub fn monogenic_ridge_all(slabs: &[CoefficientSlab], threshold: f64) -> Result<Vec<RidgePoint>> {
    monogenic_points(slabs, threshold, true)
}

fn monogenic_points(slabs: &[CoefficientSlab], threshold: f64, all: bool) -> Result<Vec<RidgePoint>> {
    let kind = slabs.first().ok_or(Error::NoRidge)?.kind;
    if !matches!(kind, WaveletKind::IsotropicMonogenic(_)) {
        return Err(Error::UnsupportedKind(kind.name().into()));
    }
    let theta = slabs[0].theta;
    let sel = sorted_by_scale(slabs.iter().filter(|s| s.theta == theta).collect());
    let (h, w) = check_slabs(&sel)?;
    let wav = Wavelet::new(kind)?;
    // the peak of a·|Ψ(a f)| over a sits at u·|Ψ(u)| maximal
    let f_peak = wav.peak_frequency(1.0);
    let gain = wav.passband_gain(f_peak);

    let mags: Vec<Vec<f64>> = sel.iter().map(|s| s.coeffs.magnitude_sqr().data.into_iter().map(f64::sqrt).collect()).collect();
    let cands: Vec<Vec<(usize, f64, f64)>> = (0..h * w)
        .into_par_iter()
        .map(|idx| if all { scale_maxima(&sel, &mags, idx) } else { vec![scale_argmax(&sel, &mags, idx)] })
        .collect();
    let global = cands.iter().flatten().fold(0.0f64, |m, b| m.max(b.2));
    if !(global > 0.0) {
        return Err(Error::NoRidge);
    }
    let cut = threshold * global;

    let rows: Vec<Vec<RidgePoint>> = (0..h)
        .into_par_iter()
        .map(|row| {
            let mut out = Vec::new();
            for col in 0..w {
                let idx = row * w + col;
                for &(s, a, m) in &cands[idx] {
                    if m < cut || m <= 0.0 {
                        continue;
                    }
                    let slab = &sel[s].coeffs;
                    let Ok(p) = polar_monogenic(slab.get(idx)) else { continue };
                    let Some(nu) = p.orientation else { continue };
                    // phase gradient within this slab, signed along ν
                    let ph = |i: usize| signed_phase(slab.get(i), nu);
                    let d1 = phase_derivative(|c| ph(row * w + c), col, w, 1.0);
                    let d2 = phase_derivative(|r| ph(r * w + col), row, h, 1.0);
                    out.push(RidgePoint {
                        b1: col,
                        b2: row,
                        scale: a,
                        theta,
                        amplitude: m / (a * gain),
                        orientation: Some((nu + theta).rem_euclid(PI)),
                        phase: Some(p.phase),
                        alpha: None,
                        beta: None,
                        freq: f_peak / a,
                        freq1: d1.map(f64::abs),
                        freq2: d2.map(f64::abs),
                        gamma_score: None,
                    });
                }
            }
            out
        })
        .collect();
    let pts: Vec<RidgePoint> = rows.into_iter().flatten().collect();
    if pts.is_empty() {
        return Err(Error::NoRidge);
    }
    Ok(pts)
}

struct AngleSummary {
    theta: f64,
    /// Per pixel: slab index, refined scale, refined |w|.
    best: Vec<(usize, f64, f64)>,
    /// Per pixel: polar angles (α, β, γ) at the ridge slab.
    polar: Vec<Option<(f64, f64, f64)>>,
    /// Per pixel: |w|²-weighted local mean of |γ|.
    score: Vec<f64>,
    slabs: Vec<usize>,
}

/// How the hypercomplex ridge picks the angle at each position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AngleRule {
    /// Largest |w| over the (a, θ) grid.
    MaxMagnitude,
    /// Smallest |w|²-weighted local mean of |γ|. Useful with narrowband
    /// wavelets, where |w| can peak at an angle that matches only one of the
    /// two plane-wave pairs of the texture.
    #[default]
    MinGamma,
}

/// Separable-texture ridge from hypercomplexing slabs over an angle grid,
/// with the default angle rule.
pub fn hypercomplex_ridge(slabs: &[CoefficientSlab], threshold: f64) -> Result<Vec<RidgePoint>> {
    hypercomplex_ridge_with(slabs, threshold, AngleRule::default())
}

/// As [`hypercomplex_ridge`] with an explicit angle rule. The scale is always
/// the |w| maximum at the chosen angle.
pub fn hypercomplex_ridge_with(slabs: &[CoefficientSlab], threshold: f64, rule: AngleRule) -> Result<Vec<RidgePoint>> {
    let kind = slabs.first().ok_or(Error::NoRidge)?.kind;
    if !matches!(kind, WaveletKind::SeparableHypercomplexing { .. } | WaveletKind::IsotropicHypercomplexing(_)) {
        return Err(Error::UnsupportedKind(kind.name().into()));
    }
    let refs: Vec<&CoefficientSlab> = slabs.iter().collect();
    let (h, w) = check_slabs(&refs)?;
    let mut thetas: Vec<f64> = slabs.iter().map(|s| s.theta).collect();
    thetas.sort_by(f64::total_cmp);
    thetas.dedup();
    let wav = Wavelet::new(kind)?;
    let f_peak = wav.peak_frequency(1.0);

    let mags: Vec<Vec<f64>> = slabs.iter().map(|s| s.coeffs.magnitude_sqr().data.into_iter().map(f64::sqrt).collect()).collect();

    let summaries: Vec<AngleSummary> = thetas
        .par_iter()
        .map(|&theta| {
            let mut ids: Vec<usize> = (0..slabs.len()).filter(|&i| slabs[i].theta == theta).collect();
            ids.sort_by(|&x, &y| slabs[x].a.total_cmp(&slabs[y].a));
            let sel: Vec<&CoefficientSlab> = ids.iter().map(|&i| &slabs[i]).collect();
            let m: Vec<Vec<f64>> = ids.iter().map(|&i| mags[i].clone()).collect();
            let best: Vec<(usize, f64, f64)> = (0..h * w).map(|idx| scale_argmax(&sel, &m, idx)).collect();
            let polar: Vec<Option<(f64, f64, f64)>> = best
                .iter()
                .enumerate()
                .map(|(idx, &(s, _, _))| polar_hypercomplex(sel[s].coeffs.get(idx)).ok().map(|p| (p.alpha, p.beta, p.gamma)))
                .collect();
            let score = (0..h * w)
                .map(|idx| {
                    let (row, col) = (idx / w, idx % w);
                    let (mut num, mut den) = (0.0, 0.0);
                    for r in row.saturating_sub(GAMMA_WINDOW)..(row + GAMMA_WINDOW + 1).min(h) {
                        for c in col.saturating_sub(GAMMA_WINDOW)..(col + GAMMA_WINDOW + 1).min(w) {
                            let j = r * w + c;
                            if let Some((_, _, g)) = polar[j] {
                                let e = best[j].2 * best[j].2;
                                num += e * g.abs();
                                den += e;
                            }
                        }
                    }
                    if den > 0.0 { num / den } else { f64::INFINITY }
                })
                .collect();
            AngleSummary { theta, best, polar, score, slabs: ids }
        })
        .collect();

    let global = summaries.iter().flat_map(|s| s.best.iter()).fold(0.0f64, |m, b| m.max(b.2));
    if !(global > 0.0) {
        return Err(Error::NoRidge);
    }
    let cut = threshold * global;

    let rows: Vec<Vec<RidgePoint>> = (0..h)
        .into_par_iter()
        .map(|row| {
            let mut out = Vec::new();
            for col in 0..w {
                let idx = row * w + col;
                // ties go to the first (smallest) angle
                let mut pick: Option<&AngleSummary> = None;
                for s in &summaries {
                    if s.polar[idx].is_none() {
                        continue;
                    }
                    let better = match (pick, rule) {
                        (None, _) => true,
                        (Some(p), AngleRule::MaxMagnitude) => s.best[idx].2 > p.best[idx].2,
                        (Some(p), AngleRule::MinGamma) => s.best[idx].2 >= cut && (p.best[idx].2 < cut || s.score[idx] < p.score[idx]),
                    };
                    if better {
                        pick = Some(s);
                    }
                }
                let Some(sum) = pick.filter(|s| s.best[idx].2 >= cut) else { continue };
                let (si, a, m) = sum.best[idx];
                let (alpha, beta, gamma) = sum.polar[idx].unwrap();
                let slab = &slabs[sum.slabs[si]];
                let polar_at = |i: usize| polar_hypercomplex(slab.coeffs.get(i)).ok();
                let grad = |pick: fn(&crate::quat::PolarHypercomplex) -> f64| -> Option<(f64, f64)> {
                    // α, β share a half-cycle ambiguity through the sign of q
                    let get = |i: usize| polar_at(i).as_ref().map(pick).unwrap_or(0.0);
                    let d1 = phase_derivative(|c| get(row * w + c), col, w, 0.5)?;
                    let d2 = phase_derivative(|r| get(r * w + col), row, h, 0.5)?;
                    Some((d1, d2))
                };
                let (c, s) = (sum.theta.cos(), sum.theta.sin());
                let f1 = grad(|p| p.alpha).map(|(d1, d2)| (c * d1 + s * d2).abs());
                let f2 = grad(|p| p.beta).map(|(d1, d2)| (-s * d1 + c * d2).abs());
                // amplitude from the even-even response at the measured frequencies
                let amplitude = match (f1, f2) {
                    (Some(u1), Some(u2)) => {
                        let r = wav.mother(a * u1, a * u2)[0].norm();
                        if r > 0.0 { m / (a * r) } else { m / (a * wav.passband_gain(f_peak)) }
                    }
                    _ => m / (a * wav.passband_gain(f_peak)),
                };
                out.push(RidgePoint {
                    b1: col,
                    b2: row,
                    scale: a,
                    theta: slab.theta,
                    amplitude,
                    orientation: None,
                    phase: None,
                    alpha: Some(alpha),
                    beta: Some(beta),
                    freq: f_peak / a,
                    freq1: f1,
                    freq2: f2,
                    gamma_score: Some(gamma.abs()),
                });
            }
            out
        })
        .collect();
    let pts: Vec<RidgePoint> = rows.into_iter().flatten().collect();
    if pts.is_empty() {
        return Err(Error::NoRidge);
    }
    Ok(pts)
}

/// Dispatches on the slab family.
pub fn ridge(slabs: &[CoefficientSlab], threshold: f64, rule: AngleRule) -> Result<Vec<RidgePoint>> {
    match slabs.first().ok_or(Error::NoRidge)?.kind {
        WaveletKind::IsotropicMonogenic(_) => monogenic_ridge(slabs, threshold),
        _ => hypercomplex_ridge_with(slabs, threshold, rule),
    }
}

/// Per-pixel orientation in [0, π) with a validity mask.
#[derive(Debug, Clone, PartialEq)]
pub struct OrientationField {
    pub orientation: RealField,
    pub mask: Vec<bool>,
}

/// Local orientation from the pure part of isotropic monogenic coefficients.
/// Pixels whose pure part is below `1e-12` of the slab peak are masked and set
/// to zero.
pub fn estimate_orientation_field(slab: &CoefficientSlab) -> Result<OrientationField> {
    if !matches!(slab.kind, WaveletKind::IsotropicMonogenic(_)) {
        return Err(Error::UnsupportedKind(slab.kind.name().into()));
    }
    let q = &slab.coeffs;
    let pure = |idx: usize| {
        let v: Quaternion = q.get(idx);
        v.i.hypot(v.j)
    };
    let peak = (0..q.len()).map(pure).fold(0.0f64, f64::max);
    let mut mask = vec![false; q.len()];
    let mut out = RealField::zeros(q.h, q.w);
    for (idx, m) in mask.iter_mut().enumerate() {
        if peak > 0.0 && pure(idx) > 1e-12 * peak {
            let v = q.get(idx);
            out.data[idx] = (v.j.atan2(v.i) + slab.theta).rem_euclid(PI);
            *m = true;
        }
    }
    Ok(OrientationField { orientation: out, mask })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrapping() {
        assert!((wrap(0.7) + 0.3).abs() < 1e-15);
        assert!((wrap_mod(0.3, 0.5) + 0.2).abs() < 1e-15);
        let d = phase_derivative(|i| [0.45, -0.45, -0.35][i], 1, 3, 1.0).unwrap();
        assert!((d - 0.1).abs() < 1e-12);
        assert_eq!(phase_derivative(|i| i as f64, 0, 3, 1.0), None);
    }

    #[test]
    fn parabola_vertex() {
        // y = -(x - 0.3)^2 sampled at -1, 0, 1
        let f = |x: f64| -(x - 0.3) * (x - 0.3);
        let (d, v) = parabolic_peak(f(-1.0), f(0.0), f(1.0));
        assert!((d - 0.3).abs() < 1e-12 && v.abs() < 1e-12);
    }
}

//! Sampled 2-D fields on a periodic grid.
//!
//! Storage is row-major. The column index is the `x1` coordinate and the row
//! index is `x2`; sample spacing is one unit.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quat::Quaternion;

fn check_shape(h: usize, w: usize) -> Result<()> {
    if h < 2 || w < 2 {
        return Err(Error::BadShape(h, w));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    pub h: usize,
    pub w: usize,
    pub data: Vec<f64>,
}

impl RealField {
    pub fn zeros(h: usize, w: usize) -> Self {
        Self { h, w, data: vec![0.0; h * w] }
    }

    pub fn from_vec(h: usize, w: usize, data: Vec<f64>) -> Result<Self> {
        check_shape(h, w)?;
        if data.len() != h * w {
            return Err(Error::Format(format!("expected {} samples, got {}", h * w, data.len())));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { h, w, data })
    }

    /// `f(x1, x2)` sampled at integer positions.
    pub fn from_fn(h: usize, w: usize, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let mut data = Vec::with_capacity(h * w);
        for row in 0..h {
            for col in 0..w {
                data.push(f(col as f64, row as f64));
            }
        }
        Self { h, w, data }
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.w + col]
    }

    #[inline]
    pub fn at_mut(&mut self, row: usize, col: usize) -> &mut f64 {
        &mut self.data[row * self.w + col]
    }

    pub fn same_shape<T: Shaped>(&self, other: &T) -> Result<()> {
        let (h, w) = other.shape();
        if (self.h, self.w) != (h, w) {
            return Err(Error::ShapeMismatch(self.h, self.w, h, w));
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { h: self.h, w: self.w, data: self.data.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_map(&self, o: &RealField, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        assert_eq!((self.h, self.w), (o.h, o.w));
        let data = self.data.iter().zip(&o.data).map(|(&a, &b)| f(a, b)).collect();
        Self { h: self.h, w: self.w, data }
    }

    pub fn dot(&self, o: &RealField) -> f64 {
        self.data.iter().zip(&o.data).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.dot(self)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn to_complex(&self) -> ComplexField {
        ComplexField {
            h: self.h,
            w: self.w,
            data: self.data.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }

    pub fn to_quaternion(&self) -> QuaternionField {
        let mut q = QuaternionField::zeros(self.h, self.w);
        q.planes[0] = self.data.clone();
        q
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    pub h: usize,
    pub w: usize,
    pub data: Vec<Complex64>,
}

impl ComplexField {
    pub fn zeros(h: usize, w: usize) -> Self {
        Self { h, w, data: vec![Complex64::new(0.0, 0.0); h * w] }
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.w + col]
    }

    pub fn re(&self) -> RealField {
        RealField { h: self.h, w: self.w, data: self.data.iter().map(|z| z.re).collect() }
    }

    pub fn im(&self) -> RealField {
        RealField { h: self.h, w: self.w, data: self.data.iter().map(|z| z.im).collect() }
    }
}

/// Four co-indexed real planes `(r, i, j, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuaternionField {
    pub h: usize,
    pub w: usize,
    pub planes: [Vec<f64>; 4],
}

impl QuaternionField {
    pub fn zeros(h: usize, w: usize) -> Self {
        let z = vec![0.0; h * w];
        Self { h, w, planes: [z.clone(), z.clone(), z.clone(), z] }
    }

    pub fn from_planes(r: RealField, i: RealField, j: RealField, k: RealField) -> Result<Self> {
        r.same_shape(&i)?;
        r.same_shape(&j)?;
        r.same_shape(&k)?;
        Ok(Self { h: r.h, w: r.w, planes: [r.data, i.data, j.data, k.data] })
    }

    pub fn from_fn(h: usize, w: usize, mut f: impl FnMut(f64, f64) -> Quaternion) -> Self {
        let mut q = Self::zeros(h, w);
        for row in 0..h {
            for col in 0..w {
                q.set(row * w + col, f(col as f64, row as f64));
            }
        }
        q
    }

    #[inline]
    pub fn get(&self, idx: usize) -> Quaternion {
        Quaternion::new(self.planes[0][idx], self.planes[1][idx], self.planes[2][idx], self.planes[3][idx])
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> Quaternion {
        self.get(row * self.w + col)
    }

    #[inline]
    pub fn set(&mut self, idx: usize, q: Quaternion) {
        self.planes[0][idx] = q.r;
        self.planes[1][idx] = q.i;
        self.planes[2][idx] = q.j;
        self.planes[3][idx] = q.k;
    }

    pub fn plane(&self, u: usize) -> RealField {
        RealField { h: self.h, w: self.w, data: self.planes[u].clone() }
    }

    pub fn len(&self) -> usize {
        self.h * self.w
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn map(&self, f: impl Fn(Quaternion) -> Quaternion) -> Self {
        let mut out = Self::zeros(self.h, self.w);
        for idx in 0..self.len() {
            out.set(idx, f(self.get(idx)));
        }
        out
    }

    pub fn zip_map(&self, o: &QuaternionField, f: impl Fn(Quaternion, Quaternion) -> Quaternion) -> Self {
        assert_eq!((self.h, self.w), (o.h, o.w));
        let mut out = Self::zeros(self.h, self.w);
        for idx in 0..self.len() {
            out.set(idx, f(self.get(idx), o.get(idx)));
        }
        out
    }

    pub fn add(&self, o: &QuaternionField) -> Self {
        self.zip_map(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &QuaternionField) -> Self {
        self.zip_map(o, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|q| q.scale(s))
    }

    /// `u·q(x)` for a constant quaternion on the left.
    pub fn left_mul(&self, u: Quaternion) -> Self {
        self.map(|q| u * q)
    }

    pub fn right_mul(&self, u: Quaternion) -> Self {
        self.map(|q| q * u)
    }

    pub fn magnitude_sqr(&self) -> RealField {
        let data = (0..self.len()).map(|i| self.get(i).norm_sqr()).collect();
        RealField { h: self.h, w: self.w, data }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.planes.iter().flat_map(|p| p.iter()).map(|v| v * v).sum()
    }

    pub fn max_norm(&self) -> f64 {
        (0..self.len()).fold(0.0, |m, i| m.max(self.get(i).norm()))
    }

    /// Largest pointwise distance, for residual reports.
    pub fn max_diff(&self, o: &QuaternionField) -> f64 {
        (0..self.len()).fold(0.0, |m, i| m.max((self.get(i) - o.get(i)).norm()))
    }
}

pub trait Shaped {
    fn shape(&self) -> (usize, usize);
}

impl Shaped for RealField {
    fn shape(&self) -> (usize, usize) {
        (self.h, self.w)
    }
}

impl Shaped for ComplexField {
    fn shape(&self) -> (usize, usize) {
        (self.h, self.w)
    }
}

impl Shaped for QuaternionField {
    fn shape(&self) -> (usize, usize) {
        (self.h, self.w)
    }
}

/// DFT bin frequencies in cycles per sample. Bins above the midpoint carry
/// negative frequencies; for even lengths the midpoint bin is -1/2.
#[derive(Debug, Clone)]
pub struct FreqGrid {
    pub h: usize,
    pub w: usize,
    /// One entry per column.
    pub f1: Vec<f64>,
    /// One entry per row.
    pub f2: Vec<f64>,
}

pub fn bin_frequency(k: usize, n: usize) -> f64 {
    if 2 * k < n {
        k as f64 / n as f64
    } else {
        (k as f64 - n as f64) / n as f64
    }
}

impl FreqGrid {
    pub fn new(h: usize, w: usize) -> Self {
        Self {
            h,
            w,
            f1: (0..w).map(|k| bin_frequency(k, w)).collect(),
            f2: (0..h).map(|k| bin_frequency(k, h)).collect(),
        }
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> (f64, f64) {
        (self.f1[col], self.f2[row])
    }

    pub fn radius(&self, row: usize, col: usize) -> f64 {
        self.f1[col].hypot(self.f2[row])
    }

    pub fn angle(&self, row: usize, col: usize) -> f64 {
        self.f2[row].atan2(self.f1[col])
    }

    #[inline]
    pub fn nyquist_col(&self, col: usize) -> bool {
        self.w.is_multiple_of(2) && col == self.w / 2
    }

    #[inline]
    pub fn nyquist_row(&self, row: usize) -> bool {
        self.h.is_multiple_of(2) && row == self.h / 2
    }

    /// Bin index of `-f` under periodic wrap.
    #[inline]
    pub fn mirror(&self, row: usize, col: usize) -> (usize, usize) {
        ((self.h - row) % self.h, (self.w - col) % self.w)
    }
}

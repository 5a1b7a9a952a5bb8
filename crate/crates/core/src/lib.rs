//! Hyperanalytic signals and quaternion-valued continuous wavelet transforms
//! on sampled 2-D fields.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod cwt;
pub mod error;
pub mod field;
pub mod hyperanalytic;
pub mod io;
pub mod quat;
pub mod ridge;
pub mod spectral;
pub mod synth;
pub mod wavelets;

pub use error::{Error, Result};
pub use field::{ComplexField, FreqGrid, QuaternionField, RealField};
pub use quat::Quaternion;

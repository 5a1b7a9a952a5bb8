//! Python bindings. Fields cross the boundary as lists of rows
//! (`numpy_array.tolist()` on the way in, `numpy.array(...)` on the way out).

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use hyperwave::cli::{KindArgs, KindName};
use hyperwave::cwt::{self, LocalityGrid};
use hyperwave::hyperanalytic::{hypercomplex_multiplier_extend, theta_monogenic_extend, HcConvention, Sign};
use hyperwave::ridge::{self, AngleRule};
use hyperwave::wavelets::WaveletKind;
use hyperwave::{QuaternionField, RealField};

type Rows = Vec<Vec<f64>>;

fn err(e: hyperwave::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn field(rows: Rows) -> PyResult<RealField> {
    let h = rows.len();
    let w = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != w) {
        return Err(PyValueError::new_err("rows have different lengths"));
    }
    RealField::from_vec(h, w, rows.into_iter().flatten().collect()).map_err(err)
}

fn rows(f: &RealField) -> Rows {
    f.data.chunks(f.w).map(<[f64]>::to_vec).collect()
}

fn planes(q: &QuaternionField) -> Vec<Rows> {
    (0..4).map(|u| rows(&q.plane(u))).collect()
}

#[allow(clippy::too_many_arguments)]
fn wavelet_kind(
    kind: &str,
    n: Option<usize>,
    l: Option<f64>,
    m: Option<f64>,
    beta: Option<f64>,
    gamma: Option<f64>,
    n1: Option<usize>,
    n2: Option<usize>,
) -> PyResult<WaveletKind> {
    let name: KindName = kind.parse().map_err(err)?;
    KindArgs { kind: name, n, l, m, beta, gamma, n1, n2 }.kind().map_err(err)
}

fn locality(scales: Vec<f64>, angles_deg: Vec<f64>) -> PyResult<LocalityGrid> {
    LocalityGrid::new(scales, angles_deg.into_iter().map(f64::to_radians).collect()).map_err(err)
}

/// Renders a synthetic field from the same spec language as the CLI.
#[pyfunction]
#[pyo3(signature = (spec, height = 128, width = 128))]
fn synth(spec: &str, height: usize, width: usize) -> PyResult<Rows> {
    Ok(rows(&hyperwave::synth::render_spec(spec, height, width).map_err(err)?))
}

/// θ-monogenic extension as four planes `[r, i, j, k]`.
#[pyfunction]
#[pyo3(signature = (image, angle = 0.0))]
fn monogenic(image: Rows, angle: f64) -> PyResult<Vec<Rows>> {
    Ok(planes(&theta_monogenic_extend(&field(image)?, angle.to_radians(), Sign::Plus)))
}

/// θ-hypercomplex extension as four planes `[r, i, j, k]`.
#[pyfunction]
#[pyo3(signature = (image, angle = 0.0))]
fn hypercomplex(image: Rows, angle: f64) -> PyResult<Vec<Rows>> {
    Ok(planes(&hypercomplex_multiplier_extend(&field(image)?, angle.to_radians(), Sign::Plus, Sign::Plus, HcConvention::Standard)))
}

/// Transform on an explicit grid. Returns `(scale, angle_rad, [r, i, j, k])`
/// per slab, scales outermost.
#[pyfunction]
#[pyo3(signature = (image, scales, angles, kind = "isotropic-monogenic", n = None, l = None, m = None, beta = None, gamma = None, n1 = None, n2 = None))]
#[allow(clippy::too_many_arguments)]
fn transform(
    image: Rows,
    scales: Vec<f64>,
    angles: Vec<f64>,
    kind: &str,
    n: Option<usize>,
    l: Option<f64>,
    m: Option<f64>,
    beta: Option<f64>,
    gamma: Option<f64>,
    n1: Option<usize>,
    n2: Option<usize>,
) -> PyResult<Vec<(f64, f64, Vec<Rows>)>> {
    let kind = wavelet_kind(kind, n, l, m, beta, gamma, n1, n2)?;
    let g = field(image)?;
    let slabs = cwt::cwt(&g, kind, &locality(scales, angles)?).map_err(err)?;
    Ok(slabs.iter().map(|s| (s.a, s.theta, planes(&s.coeffs))).collect())
}

/// Ridge points of the transform on the given grid, one dict per point.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (image, scales, angles, kind = "isotropic-monogenic", threshold = ridge::DEFAULT_THRESHOLD, beta = None, gamma = None))]
fn ridges<'py>(
    py: Python<'py>,
    image: Rows,
    scales: Vec<f64>,
    angles: Vec<f64>,
    kind: &str,
    threshold: f64,
    beta: Option<f64>,
    gamma: Option<f64>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let kind = wavelet_kind(kind, None, None, None, beta, gamma, None, None)?;
    let g = field(image)?;
    let slabs = cwt::cwt(&g, kind, &locality(scales, angles)?).map_err(err)?;
    let points = ridge::ridge(&slabs, threshold, AngleRule::default()).map_err(err)?;
    points
        .into_iter()
        .map(|p| {
            let d = PyDict::new(py);
            d.set_item("b1", p.b1)?;
            d.set_item("b2", p.b2)?;
            d.set_item("scale", p.scale)?;
            d.set_item("theta", p.theta)?;
            d.set_item("amplitude", p.amplitude)?;
            d.set_item("orientation", p.orientation)?;
            d.set_item("phase", p.phase)?;
            d.set_item("alpha", p.alpha)?;
            d.set_item("beta", p.beta)?;
            d.set_item("freq", p.freq)?;
            d.set_item("freq1", p.freq1)?;
            d.set_item("freq2", p.freq2)?;
            d.set_item("gamma_score", p.gamma_score)?;
            Ok(d)
        })
        .collect()
}

/// Exact-identity suite at one scale; returns `(passed, worst_residual)`.
#[pyfunction]
#[pyo3(signature = (image, kind = "isotropic-monogenic", scale = 4.0, angles = vec![0.0, 30.0, 60.0]))]
fn verify(image: Rows, kind: &str, scale: f64, angles: Vec<f64>) -> PyResult<(bool, f64)> {
    let kind = wavelet_kind(kind, None, None, None, None, None, None, None)?;
    let samples: Vec<(f64, f64)> = angles.into_iter().map(|t| (scale, t.to_radians())).collect();
    let r = cwt::verify_identities(&field(image)?, kind, &samples).map_err(err)?;
    Ok((r.passes(hyperwave::cli::VERIFY_TOL), r.max_residual()))
}

#[pymodule]
fn hyperwave_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(synth, m)?)?;
    m.add_function(wrap_pyfunction!(monogenic, m)?)?;
    m.add_function(wrap_pyfunction!(hypercomplex, m)?)?;
    m.add_function(wrap_pyfunction!(transform, m)?)?;
    m.add_function(wrap_pyfunction!(ridges, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}

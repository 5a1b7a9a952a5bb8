//! File formats: HWF1 field files, PGM input, ridge CSV and JSON manifests.
//!
//! HWF1 layout: an ASCII header line `HWF1 <REAL|CPLX|QUAT> <H> <W>\n`
//! followed by 1, 2 or 4 planes of little-endian `f64`, each row-major.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cwt::{CoefficientSlab, LocalityGrid};
use crate::error::{Error, Result};
use crate::field::{ComplexField, QuaternionField, RealField};
use crate::ridge::RidgePoint;
use crate::wavelets::WaveletKind;

pub const MAGIC: &str = "HWF1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Real,
    Complex,
    Quaternion,
}

impl FieldKind {
    pub fn tag(self) -> &'static str {
        match self {
            FieldKind::Real => "REAL",
            FieldKind::Complex => "CPLX",
            FieldKind::Quaternion => "QUAT",
        }
    }

    pub fn planes(self) -> usize {
        match self {
            FieldKind::Real => 1,
            FieldKind::Complex => 2,
            FieldKind::Quaternion => 4,
        }
    }

    fn from_tag(s: &str) -> Result<Self> {
        match s {
            "REAL" => Ok(FieldKind::Real),
            "CPLX" => Ok(FieldKind::Complex),
            "QUAT" => Ok(FieldKind::Quaternion),
            other => Err(Error::Format(format!("unknown HWF1 kind '{other}'"))),
        }
    }
}

/// Any field that can live in an HWF1 file.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyField {
    Real(RealField),
    Complex(ComplexField),
    Quaternion(QuaternionField),
}

impl AnyField {
    pub fn kind(&self) -> FieldKind {
        match self {
            AnyField::Real(_) => FieldKind::Real,
            AnyField::Complex(_) => FieldKind::Complex,
            AnyField::Quaternion(_) => FieldKind::Quaternion,
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        match self {
            AnyField::Real(f) => (f.h, f.w),
            AnyField::Complex(f) => (f.h, f.w),
            AnyField::Quaternion(f) => (f.h, f.w),
        }
    }

    fn planes(&self) -> Vec<Vec<f64>> {
        match self {
            AnyField::Real(f) => vec![f.data.clone()],
            AnyField::Complex(f) => vec![f.data.iter().map(|z| z.re).collect(), f.data.iter().map(|z| z.im).collect()],
            AnyField::Quaternion(f) => f.planes.to_vec(),
        }
    }

    pub fn into_real(self) -> Result<RealField> {
        match self {
            AnyField::Real(f) => Ok(f),
            other => Err(Error::Format(format!("expected a REAL field, found {}", other.kind().tag()))),
        }
    }

    pub fn into_quaternion(self) -> Result<QuaternionField> {
        match self {
            AnyField::Quaternion(f) => Ok(f),
            AnyField::Real(f) => Ok(f.to_quaternion()),
            other => Err(Error::Format(format!("expected a QUAT field, found {}", other.kind().tag()))),
        }
    }
}

impl From<RealField> for AnyField {
    fn from(f: RealField) -> Self {
        AnyField::Real(f)
    }
}

impl From<ComplexField> for AnyField {
    fn from(f: ComplexField) -> Self {
        AnyField::Complex(f)
    }
}

impl From<QuaternionField> for AnyField {
    fn from(f: QuaternionField) -> Self {
        AnyField::Quaternion(f)
    }
}

pub fn write_hwf<W: Write>(out: &mut W, field: &AnyField) -> Result<()> {
    let (h, w) = field.shape();
    writeln!(out, "{MAGIC} {} {h} {w}", field.kind().tag())?;
    let mut buf = Vec::with_capacity(8 * h * w);
    for plane in field.planes() {
        buf.clear();
        for v in plane {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        out.write_all(&buf)?;
    }
    Ok(())
}

pub fn read_hwf<R: BufRead>(input: &mut R) -> Result<AnyField> {
    let mut header = Vec::new();
    input.take(64).read_until(b'\n', &mut header)?;
    if header.last() != Some(&b'\n') {
        return Err(Error::Format("HWF1 header is not newline-terminated".into()));
    }
    let text = std::str::from_utf8(&header[..header.len() - 1]).map_err(|_| Error::Format("HWF1 header is not ASCII".into()))?;
    let parts: Vec<&str> = text.split(' ').collect();
    if parts.len() != 4 || parts[0] != MAGIC {
        return Err(Error::Format(format!("bad HWF1 header '{text}'")));
    }
    let kind = FieldKind::from_tag(parts[1])?;
    let dim = |s: &str| s.parse::<usize>().map_err(|_| Error::Format(format!("bad HWF1 dimension '{s}'")));
    let (h, w) = (dim(parts[2])?, dim(parts[3])?);
    if h == 0 || w == 0 {
        return Err(Error::BadShape(h, w));
    }
    let n = h.checked_mul(w).ok_or(Error::BadShape(h, w))?;
    let mut planes = Vec::with_capacity(kind.planes());
    let mut raw = vec![0u8; 8 * n];
    for _ in 0..kind.planes() {
        input.read_exact(&mut raw).map_err(|e| match e.kind() {
            std::io::ErrorKind::UnexpectedEof => Error::Format("HWF1 payload is truncated".into()),
            _ => Error::Io(e),
        })?;
        planes.push(raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect::<Vec<f64>>());
    }
    let mut probe = [0u8; 1];
    if input.read(&mut probe)? != 0 {
        return Err(Error::Format("HWF1 file has trailing bytes".into()));
    }
    Ok(match kind {
        FieldKind::Real => AnyField::Real(RealField { h, w, data: planes.pop().unwrap() }),
        FieldKind::Complex => {
            let data = planes[0].iter().zip(&planes[1]).map(|(&re, &im)| num_complex::Complex64::new(re, im)).collect();
            AnyField::Complex(ComplexField { h, w, data })
        }
        FieldKind::Quaternion => {
            let mut it = planes.into_iter();
            let p = [it.next().unwrap(), it.next().unwrap(), it.next().unwrap(), it.next().unwrap()];
            AnyField::Quaternion(QuaternionField { h, w, planes: p })
        }
    })
}

pub fn save_hwf(path: &Path, field: &AnyField) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_hwf(&mut out, field)?;
    out.flush()?;
    Ok(())
}

pub fn load_hwf(path: &Path) -> Result<AnyField> {
    read_hwf(&mut BufReader::new(File::open(path)?))
}

fn pgm_token<R: BufRead>(input: &mut R) -> Result<String> {
    let mut tok = Vec::new();
    loop {
        let mut byte = [0u8; 1];
        if input.read(&mut byte)? == 0 {
            break;
        }
        let c = byte[0];
        if c == b'#' && tok.is_empty() {
            let mut skip = Vec::new();
            input.read_until(b'\n', &mut skip)?;
            continue;
        }
        if c.is_ascii_whitespace() {
            if tok.is_empty() {
                continue;
            }
            break;
        }
        tok.push(c);
    }
    if tok.is_empty() {
        return Err(Error::Format("PGM header is truncated".into()));
    }
    String::from_utf8(tok).map_err(|_| Error::Format("PGM header is not ASCII".into()))
}

/// Binary PGM (P5), 8- or 16-bit, scaled to [0, 1]. Row index is x2.
pub fn read_pgm<R: BufRead>(input: &mut R) -> Result<RealField> {
    let magic = pgm_token(input)?;
    if magic != "P5" {
        return Err(Error::Format(format!("unsupported PGM variant '{magic}' (only P5)")));
    }
    let num = |s: String| s.parse::<usize>().map_err(|_| Error::Format(format!("bad PGM header value '{s}'")));
    let w = num(pgm_token(input)?)?;
    let h = num(pgm_token(input)?)?;
    let maxval = num(pgm_token(input)?)?;
    if !(1..=65535).contains(&maxval) {
        return Err(Error::Format(format!("PGM maxval {maxval} out of range")));
    }
    if h < 2 || w < 2 {
        return Err(Error::BadShape(h, w));
    }
    let bytes = if maxval < 256 { 1 } else { 2 };
    let mut raw = vec![0u8; bytes * h * w];
    input.read_exact(&mut raw).map_err(|_| Error::Format("PGM raster is truncated".into()))?;
    let scale = 1.0 / maxval as f64;
    let data = if bytes == 1 {
        raw.iter().map(|&v| v as f64 * scale).collect()
    } else {
        raw.chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]]) as f64 * scale).collect()
    };
    Ok(RealField { h, w, data })
}

pub fn load_pgm(path: &Path) -> Result<RealField> {
    read_pgm(&mut BufReader::new(File::open(path)?))
}

/// Writes a P5 file, mapping [lo, hi] linearly onto [0, maxval].
pub fn write_pgm<W: Write>(out: &mut W, field: &RealField, maxval: u16, lo: f64, hi: f64) -> Result<()> {
    if maxval == 0 {
        return Err(Error::Format("PGM maxval must be positive".into()));
    }
    write!(out, "P5\n{} {}\n{}\n", field.w, field.h, maxval)?;
    let span = if hi > lo { hi - lo } else { 1.0 };
    for &v in &field.data {
        let q = (((v - lo) / span).clamp(0.0, 1.0) * maxval as f64).round() as u16;
        if maxval < 256 {
            out.write_all(&[q as u8])?;
        } else {
            out.write_all(&q.to_be_bytes())?;
        }
    }
    Ok(())
}

/// Reads an input image by extension: `.pgm` or HWF1 otherwise.
pub fn load_input(path: &Path, remove_mean: bool) -> Result<RealField> {
    let is_pgm = path.extension().and_then(|e| e.to_str()).is_some_and(|e| e.eq_ignore_ascii_case("pgm"));
    let g = if is_pgm { load_pgm(path)? } else { load_hwf(path)?.into_real()? };
    Ok(if remove_mean {
        let m = g.mean();
        g.map(|v| v - m)
    } else {
        g
    })
}

pub fn write_ridges<W: Write>(out: W, points: &[RidgePoint]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    for p in points {
        wtr.serialize(p)?;
    }
    if points.is_empty() {
        wtr.write_record(RIDGE_COLUMNS)?;
    }
    wtr.flush()?;
    Ok(())
}

pub const RIDGE_COLUMNS: [&str; 13] =
    ["b1", "b2", "scale", "theta", "amplitude", "orientation", "phase", "alpha", "beta", "freq", "freq1", "freq2", "gamma_score"];

pub fn read_ridges<R: Read>(input: R) -> Result<Vec<RidgePoint>> {
    let mut rdr = csv::Reader::from_reader(input);
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

/// One slab file listed in a CWT manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlabEntry {
    /// Path relative to the manifest's directory.
    pub file: String,
    pub scale: f64,
    /// Radians.
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: String,
    pub input: String,
    pub height: usize,
    pub width: usize,
    pub wavelet: WaveletKind,
    pub scales: Vec<f64>,
    /// Radians.
    pub angles: Vec<f64>,
    pub mean_removed: bool,
    pub slabs: Vec<SlabEntry>,
}

impl Manifest {
    pub fn new(input: &str, h: usize, w: usize, kind: WaveletKind, grid: &LocalityGrid, mean_removed: bool) -> Self {
        Self {
            format: MAGIC.into(),
            input: input.into(),
            height: h,
            width: w,
            wavelet: kind,
            scales: grid.scales.clone(),
            angles: grid.angles.clone(),
            mean_removed,
            slabs: Vec::new(),
        }
    }

    pub fn slab_file_name(index: usize) -> String {
        format!("slab_{index:05}.hwf")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(&mut out, self)?;
        out.write_all(b"\n")?;
        out.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
    }

    pub fn grid(&self) -> Result<LocalityGrid> {
        LocalityGrid::new(self.scales.clone(), self.angles.clone())
    }

    fn slab_path(dir: &Path, file: &str) -> PathBuf {
        dir.join(file)
    }

    /// Loads every slab listed, resolving paths against `dir`.
    pub fn load_slabs(&self, dir: &Path) -> Result<Vec<CoefficientSlab>> {
        self.slabs
            .iter()
            .map(|e| {
                let coeffs = load_hwf(&Self::slab_path(dir, &e.file))?.into_quaternion()?;
                if coeffs.h != self.height || coeffs.w != self.width {
                    return Err(Error::ShapeMismatch(self.height, self.width, coeffs.h, coeffs.w));
                }
                Ok(CoefficientSlab { a: e.scale, theta: e.theta, kind: self.wavelet, coeffs })
            })
            .collect()
    }
}

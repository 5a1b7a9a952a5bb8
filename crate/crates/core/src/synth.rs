//! Test-image generators and the small spec language used by the CLI.
//!
//! A spec is a `+`-separated sum of terms `name:key=value,...`, e.g.
//! `planewave:f0=0.08,angle=30 + noise:sigma=0.1,seed=3`. Angles are in
//! degrees, phases in radians, frequencies in cycles per sample.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::field::{ComplexField, FreqGrid, RealField};
use crate::hyperanalytic::SeparableWave;
use crate::spectral::Fft2;

/// Zero-mean random field whose spectrum is confined to the annulus
/// `fmin ≤ |f| ≤ fmax` (Nyquist lines excluded), scaled to unit RMS.
pub fn bandlimited_noise(h: usize, w: usize, fmin: f64, fmax: f64, seed: u64) -> RealField {
    let grid = FreqGrid::new(h, w);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let mut spec = ComplexField::zeros(h, w);
    for row in 0..h {
        for col in 0..w {
            let r = grid.radius(row, col);
            if r >= fmin && r <= fmax && !grid.nyquist_col(col) && !grid.nyquist_row(row) {
                spec.data[row * w + col] = Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng));
            }
        }
    }
    // keep the Hermitian part so the field is real
    let mut sym = ComplexField::zeros(h, w);
    for row in 0..h {
        for col in 0..w {
            let (mr, mc) = grid.mirror(row, col);
            sym.data[row * w + col] = 0.5 * (spec.data[row * w + col] + spec.data[mr * w + mc].conj());
        }
    }
    let g = Fft2::new(h, w).inverse(sym).re();
    let rms = (g.norm_sqr() / g.data.len() as f64).sqrt();
    if rms > 0.0 {
        g.map(|v| v / rms)
    } else {
        g
    }
}

/// White Gaussian noise.
pub fn white_noise(h: usize, w: usize, sigma: f64, seed: u64) -> RealField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma.abs()).unwrap();
    RealField::from_fn(h, w, |_, _| normal.sample(&mut rng))
}

/// `amp·cos(2π f0 n_θ·x + φ)`.
pub fn plane_wave(h: usize, w: usize, f0: f64, angle: f64, amp: f64, phase: f64) -> RealField {
    let (s, c) = angle.sin_cos();
    RealField::from_fn(h, w, |x1, x2| amp * (2.0 * PI * f0 * (c * x1 + s * x2) + phase).cos())
}

/// Linear chirp along `n_θ`: local frequency `f0 + rate·(n_θ·x)`.
pub fn chirp(h: usize, w: usize, f0: f64, rate: f64, angle: f64, amp: f64) -> RealField {
    let (s, c) = angle.sin_cos();
    RealField::from_fn(h, w, |x1, x2| {
        let t = c * x1 + s * x2;
        amp * (2.0 * PI * (f0 * t + 0.5 * rate * t * t)).cos()
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    PlaneWave { f0: f64, angle: f64, amp: f64, phase: f64 },
    Separable { wave: SeparableWave, angle: f64 },
    Chirp { f0: f64, rate: f64, angle: f64, amp: f64 },
    Noise { sigma: f64, seed: u64 },
    BandNoise { fmin: f64, fmax: f64, sigma: f64, seed: u64 },
}

impl Term {
    pub fn render(&self, h: usize, w: usize) -> RealField {
        match *self {
            Term::PlaneWave { f0, angle, amp, phase } => plane_wave(h, w, f0, angle, amp, phase),
            Term::Separable { wave, angle } => RealField::from_fn(h, w, |x1, x2| wave.sample(x1, x2, angle)),
            Term::Chirp { f0, rate, angle, amp } => chirp(h, w, f0, rate, angle, amp),
            Term::Noise { sigma, seed } => white_noise(h, w, sigma, seed),
            Term::BandNoise { fmin, fmax, sigma, seed } => bandlimited_noise(h, w, fmin, fmax, seed).map(|v| sigma * v),
        }
    }
}

fn parse_kv(body: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for part in body.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::Format(format!("expected key=value, got '{part}'")))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

struct Args {
    map: BTreeMap<String, String>,
    term: String,
}

impl Args {
    fn num(&mut self, key: &str, default: Option<f64>) -> Result<f64> {
        match self.map.remove(key) {
            Some(v) => v.parse::<f64>().map_err(|_| Error::Format(format!("{}: '{key}' is not a number: '{v}'", self.term))),
            None => default.ok_or_else(|| Error::Format(format!("{}: missing '{key}'", self.term))),
        }
    }

    fn done(self) -> Result<()> {
        if let Some(k) = self.map.keys().next() {
            return Err(Error::Format(format!("{}: unknown key '{k}'", self.term)));
        }
        Ok(())
    }
}

pub fn parse_term(s: &str) -> Result<Term> {
    let s = s.trim();
    let (name, body) = s.split_once(':').unwrap_or((s, ""));
    let mut a = Args { map: parse_kv(body)?, term: name.to_string() };
    let term = match name {
        "planewave" | "plane" => Term::PlaneWave {
            f0: a.num("f0", None)?,
            angle: a.num("angle", Some(0.0))?.to_radians(),
            amp: a.num("amp", Some(1.0))?,
            phase: a.num("phase", Some(0.0))?,
        },
        "separable" => Term::Separable {
            wave: SeparableWave {
                f1: a.num("f1", None)?,
                f2: a.num("f2", None)?,
                amp: a.num("amp", Some(1.0))?,
                phase1: a.num("phase1", Some(0.0))?,
                phase2: a.num("phase2", Some(0.0))?,
            },
            angle: a.num("angle", Some(0.0))?.to_radians(),
        },
        "chirp" => Term::Chirp {
            f0: a.num("f0", None)?,
            rate: a.num("rate", None)?,
            angle: a.num("angle", Some(0.0))?.to_radians(),
            amp: a.num("amp", Some(1.0))?,
        },
        "noise" => Term::Noise { sigma: a.num("sigma", Some(1.0))?, seed: a.num("seed", Some(0.0))? as u64 },
        "bandnoise" => Term::BandNoise {
            fmin: a.num("fmin", None)?,
            fmax: a.num("fmax", None)?,
            sigma: a.num("sigma", Some(1.0))?,
            seed: a.num("seed", Some(0.0))? as u64,
        },
        other => return Err(Error::Format(format!("unknown synth term '{other}'"))),
    };
    a.done()?;
    Ok(term)
}

pub fn parse_spec(spec: &str) -> Result<Vec<Term>> {
    let terms: Vec<Term> = spec.split('+').filter(|t| !t.trim().is_empty()).map(parse_term).collect::<Result<_>>()?;
    if terms.is_empty() {
        return Err(Error::Format("empty synth spec".into()));
    }
    Ok(terms)
}

pub fn render_spec(spec: &str, h: usize, w: usize) -> Result<RealField> {
    if h < 2 || w < 2 {
        return Err(Error::BadShape(h, w));
    }
    let terms = parse_spec(spec)?;
    let mut acc = RealField::zeros(h, w);
    for t in &terms {
        acc = acc.zip_map(&t.render(h, w), |a, b| a + b);
    }
    Ok(acc)
}

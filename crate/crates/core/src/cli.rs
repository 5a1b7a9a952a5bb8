//! Command-line front end. Angles on the command line are degrees; files and
//! manifests store radians.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::cwt::{cwt_streaming, verify_identities, IdentityReport, LocalityGrid, Reconstructor};
use crate::error::{Error, Result};
use crate::field::RealField;
use crate::hyperanalytic::{hypercomplex_multiplier_extend, theta_monogenic_extend, HcConvention, Sign};
use crate::io::{load_hwf, load_input, save_hwf, write_ridges, AnyField, Manifest, SlabEntry};
use crate::quat::{polar_hypercomplex, polar_monogenic};
use crate::ridge::{ridge, AngleRule, DEFAULT_THRESHOLD};
use crate::synth::render_spec;
use crate::wavelets::{spatial_field, spatial_field_auto, LocalityIndex, MorseParams1D, MorseParamsIso, WaveletKind};

pub const THREADS_ENV: &str = "HYPERWAVE_THREADS";

/// Residual tolerance for `verify`.
pub const VERIFY_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "hyperwave", version, about = "Hypercomplex and monogenic 2-D continuous wavelet transforms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render a synthetic test field, e.g. "planewave:f0=0.08,angle=30 + noise:sigma=0.1,seed=7".
    Synth(SynthArgs),
    /// Render a member wavelet in space (QUAT field).
    Wavelet(WaveletArgs),
    /// Transform an image (PGM or REAL HWF1) into a directory of slab files plus manifest.json.
    Cwt(CwtArgs),
    /// Extract ridge points from a CWT manifest into CSV.
    Ridge(RidgeArgs),
    /// Polar planes of a QUAT field (or of the extension of a REAL field).
    Polar(PolarArgs),
    /// Invert a CWT manifest back to a REAL field.
    Reconstruct(ReconstructArgs),
    /// Run the exact-identity suite and print a JSON report.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindName {
    IsotropicMonogenic,
    IsotropicHypercomplexing,
    SeparableHypercomplexing,
    DirectionalMonogenic,
    HypercomplexDirectional,
}

impl std::str::FromStr for KindName {
    type Err = Error;

    /// Accepts the command-line spelling, e.g. `isotropic-monogenic`.
    fn from_str(s: &str) -> Result<Self> {
        <KindName as ValueEnum>::from_str(s, true).map_err(|_| Error::InvalidParams(format!("unknown wavelet kind '{s}'")))
    }
}

/// Wavelet family and Morse parameters. Unset parameters take the family defaults.
#[derive(Debug, Clone, Args)]
pub struct KindArgs {
    #[arg(long, value_enum, default_value = "isotropic-monogenic")]
    pub kind: KindName,
    /// Laguerre order (isotropic and directional kinds).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub l: Option<f64>,
    #[arg(long)]
    pub m: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub n1: Option<usize>,
    #[arg(long)]
    pub n2: Option<usize>,
}

impl KindArgs {
    pub fn kind(&self) -> Result<WaveletKind> {
        let iso = || {
            let d = MorseParamsIso::default();
            MorseParamsIso { n: self.n.unwrap_or(d.n), l: self.l.unwrap_or(d.l), m: self.m.unwrap_or(d.m) }
        };
        let one = || {
            let d = MorseParams1D::default();
            MorseParams1D { n: self.n.unwrap_or(d.n), beta: self.beta.unwrap_or(d.beta), gamma: self.gamma.unwrap_or(d.gamma) }
        };
        let iso_only = self.l.is_some() || self.m.is_some();
        let one_only = self.beta.is_some() || self.gamma.is_some();
        let kind = match self.kind {
            KindName::IsotropicMonogenic | KindName::IsotropicHypercomplexing if one_only || self.n1.is_some() || self.n2.is_some() => {
                return Err(Error::InvalidParams("isotropic kinds take --n, --l, --m".into()));
            }
            KindName::IsotropicMonogenic => WaveletKind::IsotropicMonogenic(iso()),
            KindName::IsotropicHypercomplexing => WaveletKind::IsotropicHypercomplexing(iso()),
            _ if iso_only => return Err(Error::InvalidParams("separable and directional kinds take --beta, --gamma".into())),
            KindName::SeparableHypercomplexing => {
                if self.n.is_some() {
                    return Err(Error::InvalidParams("separable kind takes --n1 and --n2".into()));
                }
                let d = MorseParams1D::default();
                WaveletKind::SeparableHypercomplexing {
                    n1: self.n1.unwrap_or(d.n),
                    n2: self.n2.unwrap_or(d.n),
                    beta: self.beta.unwrap_or(d.beta),
                    gamma: self.gamma.unwrap_or(d.gamma),
                }
            }
            _ if self.n1.is_some() || self.n2.is_some() => return Err(Error::InvalidParams("directional kinds take --n".into())),
            KindName::DirectionalMonogenic => WaveletKind::DirectionalMonogenic(one()),
            KindName::HypercomplexDirectional => WaveletKind::HypercomplexDirectional(one()),
        };
        // surfaces bad parameters before any work is done
        crate::wavelets::Wavelet::new(kind)?;
        Ok(kind)
    }
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    pub spec: String,
    #[arg(long, default_value_t = 128)]
    pub height: usize,
    #[arg(long, default_value_t = 128)]
    pub width: usize,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct WaveletArgs {
    #[command(flatten)]
    pub kind: KindArgs,
    #[arg(long, default_value_t = 4.0)]
    pub scale: f64,
    /// Degrees.
    #[arg(long, default_value_t = 0.0)]
    pub angle: f64,
    /// Window side; by default the smallest power of two that holds the wavelet.
    #[arg(long)]
    pub size: Option<usize>,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Scale range `min:max` in samples; defaults to `4:min(H,W)/6`.
    #[arg(long)]
    pub scales: Option<String>,
    #[arg(long, default_value_t = 8)]
    pub voices: usize,
    /// Comma-separated angles in degrees; defaults to 16 angles over a half turn.
    #[arg(long, allow_hyphen_values = true)]
    pub angles: Option<String>,
}

impl GridArgs {
    pub fn grid(&self, h: usize, w: usize) -> Result<LocalityGrid> {
        let (min, max) = match &self.scales {
            Some(s) => parse_scale_range(s)?,
            None => (4.0, h.min(w) as f64 / 6.0),
        };
        let scales = LocalityGrid::log_scales(min, max, self.voices)?;
        let angles = match &self.angles {
            Some(s) => parse_angles_deg(s)?,
            None => LocalityGrid::half_turn_angles(16),
        };
        LocalityGrid::new(scales, angles)
    }
}

#[derive(Debug, Args)]
pub struct CwtArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub kind: KindArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Keep the image mean instead of subtracting it.
    #[arg(long)]
    pub keep_mean: bool,
    /// Output directory (created if missing).
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AngleRuleName {
    MinGamma,
    MaxMagnitude,
}

#[derive(Debug, Args)]
pub struct RidgeArgs {
    /// manifest.json written by `cwt` (or its directory).
    pub manifest: PathBuf,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    pub threshold: f64,
    #[arg(long, value_enum, default_value = "min-gamma")]
    pub angle_rule: AngleRuleName,
    /// CSV path; stdout when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolarMode {
    Monogenic,
    Hypercomplex,
}

#[derive(Debug, Args)]
pub struct PolarArgs {
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "monogenic")]
    pub mode: PolarMode,
    /// Rotation used when extending a REAL input, in degrees.
    #[arg(long, default_value_t = 0.0)]
    pub angle: f64,
    /// Output files are `<prefix>_<plane>.hwf`.
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    pub manifest: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Image to test; a 64x64 band-limited random field when omitted.
    pub input: Option<PathBuf>,
    /// Restrict to one family; both the isotropic monogenic and the separable
    /// hypercomplexing families run by default.
    #[arg(long, value_enum)]
    pub kind: Option<KindName>,
    #[arg(long, default_value_t = 4.0)]
    pub scale: f64,
    /// Comma-separated angles in degrees.
    #[arg(long, default_value = "0,30,60", allow_hyphen_values = true)]
    pub angles: String,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// JSON path; stdout when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

pub fn parse_scale_range(s: &str) -> Result<(f64, f64)> {
    let bad = || Error::BadGrid(format!("expected --scales min:max, got '{s}'"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let min: f64 = a.trim().parse().map_err(|_| bad())?;
    let max: f64 = b.trim().parse().map_err(|_| bad())?;
    if !(min > 0.0 && max >= min && max.is_finite()) {
        return Err(bad());
    }
    Ok((min, max))
}

pub fn parse_angles_deg(s: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map(f64::to_radians).map_err(|_| Error::BadGrid(format!("bad angle '{t}'"))))
        .collect::<Result<_>>()?;
    if v.is_empty() {
        return Err(Error::BadGrid("no angles given".into()));
    }
    Ok(v)
}

/// Builds the global worker pool, honouring `HYPERWAVE_THREADS`.
pub fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| Error::Format(format!("{THREADS_ENV} must be a positive integer, got '{v}'")))?;
    if n == 0 {
        return Err(Error::Format(format!("{THREADS_ENV} must be positive")));
    }
    // a pool built earlier in the process wins; that is fine for tests
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn manifest_path(p: &Path) -> PathBuf {
    if p.is_dir() {
        p.join("manifest.json")
    } else {
        p.to_path_buf()
    }
}

fn write_json<T: Serialize>(value: &T, output: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match output {
        Some(p) => std::fs::write(p, text + "\n")?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

fn cmd_synth(a: &SynthArgs) -> Result<()> {
    let g = render_spec(&a.spec, a.height, a.width)?;
    save_hwf(&a.output, &g.into())
}

fn cmd_wavelet(a: &WaveletArgs) -> Result<()> {
    let kind = a.kind.kind()?;
    let mut xi = LocalityIndex::new(a.scale, a.angle.to_radians());
    let field = match a.size {
        Some(n) => {
            xi.b1 = (n / 2) as f64;
            xi.b2 = (n / 2) as f64;
            spatial_field(kind, &xi, n)?
        }
        None => {
            // centre the member in whatever window is chosen
            let probe = spatial_field_auto(kind, &xi, 1 << 12)?;
            let n = probe.h;
            xi.b1 = (n / 2) as f64;
            xi.b2 = (n / 2) as f64;
            spatial_field(kind, &xi, n)?
        }
    };
    save_hwf(&a.output, &field.into())
}

fn cmd_cwt(a: &CwtArgs) -> Result<()> {
    let kind = a.kind.kind()?;
    let g = load_input(&a.input, !a.keep_mean)?;
    let grid = a.grid.grid(g.h, g.w)?;
    std::fs::create_dir_all(&a.output)?;
    let mut manifest = Manifest::new(&a.input.to_string_lossy(), g.h, g.w, kind, &grid, !a.keep_mean);
    let mut index = 0;
    cwt_streaming(&g, kind, &grid, |slab| {
        let file = Manifest::slab_file_name(index);
        save_hwf(&a.output.join(&file), &AnyField::Quaternion(slab.coeffs))?;
        manifest.slabs.push(SlabEntry { file, scale: slab.a, theta: slab.theta });
        index += 1;
        Ok(())
    })?;
    manifest.save(&a.output.join("manifest.json"))
}

fn cmd_ridge(a: &RidgeArgs) -> Result<()> {
    let path = manifest_path(&a.manifest);
    let manifest = Manifest::load(&path)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let slabs = manifest.load_slabs(dir)?;
    let rule = match a.angle_rule {
        AngleRuleName::MinGamma => AngleRule::MinGamma,
        AngleRuleName::MaxMagnitude => AngleRule::MaxMagnitude,
    };
    let points = ridge(&slabs, a.threshold, rule)?;
    match &a.output {
        Some(p) => write_ridges(std::io::BufWriter::new(std::fs::File::create(p)?), &points),
        None => write_ridges(std::io::stdout().lock(), &points),
    }
}

fn cmd_polar(a: &PolarArgs) -> Result<()> {
    let theta = a.angle.to_radians();
    let q = match load_hwf(&a.input)? {
        AnyField::Real(g) => match a.mode {
            PolarMode::Monogenic => theta_monogenic_extend(&g, theta, Sign::Plus),
            PolarMode::Hypercomplex => hypercomplex_multiplier_extend(&g, theta, Sign::Plus, Sign::Plus, HcConvention::Standard),
        },
        AnyField::Quaternion(q) => q,
        AnyField::Complex(_) => return Err(Error::Format("polar needs a REAL or QUAT field".into())),
    };
    let (h, w) = (q.h, q.w);
    let names: &[&str] = match a.mode {
        PolarMode::Monogenic => &["amplitude", "orientation", "phase"],
        PolarMode::Hypercomplex => &["magnitude", "alpha", "beta", "gamma"],
    };
    let mut planes = vec![RealField::zeros(h, w); names.len()];
    for idx in 0..q.len() {
        let v = q.get(idx);
        let vals: Vec<f64> = match a.mode {
            PolarMode::Monogenic => {
                let p = polar_monogenic(v)?;
                vec![p.amplitude, p.orientation.unwrap_or(0.0), p.phase]
            }
            PolarMode::Hypercomplex => match polar_hypercomplex(v) {
                Ok(p) => vec![p.magnitude, p.alpha, p.beta, p.gamma],
                Err(Error::ZeroQuaternion) => vec![0.0; 4],
                Err(e) => return Err(e),
            },
        };
        for (p, v) in planes.iter_mut().zip(vals) {
            p.data[idx] = v;
        }
    }
    let stem = a.output.to_string_lossy().into_owned();
    for (name, plane) in names.iter().zip(planes) {
        save_hwf(Path::new(&format!("{stem}_{name}.hwf")), &plane.into())?;
    }
    Ok(())
}

fn cmd_reconstruct(a: &ReconstructArgs) -> Result<()> {
    let path = manifest_path(&a.manifest);
    let manifest = Manifest::load(&path)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let grid = manifest.grid()?;
    let mut rec = Reconstructor::new(manifest.wavelet, &grid, manifest.height, manifest.width)?;
    for slab in manifest.load_slabs(dir)? {
        rec.add(&slab)?;
    }
    save_hwf(&a.output, &rec.finish().into())
}

#[derive(Debug, Serialize)]
pub struct VerifyOutput {
    pub tolerance: f64,
    pub passed: bool,
    pub reports: Vec<IdentityReport>,
}

/// Runs the identity suite; the flag says whether every residual that
/// should vanish is within [`VERIFY_TOL`].
pub fn run_verify(a: &VerifyArgs) -> Result<VerifyOutput> {
    let g = match &a.input {
        Some(p) => load_input(p, true)?,
        None => crate::synth::bandlimited_noise(64, 64, 0.05, 0.35, a.seed),
    };
    let samples: Vec<(f64, f64)> = parse_angles_deg(&a.angles)?.into_iter().map(|t| (a.scale, t)).collect();
    let kinds = match a.kind {
        Some(k) => vec![KindArgs { kind: k, n: None, l: None, m: None, beta: None, gamma: None, n1: None, n2: None }.kind()?],
        None => vec![
            WaveletKind::IsotropicMonogenic(MorseParamsIso::default()),
            WaveletKind::SeparableHypercomplexing { n1: 0, n2: 0, beta: 9.0, gamma: 4.0 },
        ],
    };
    let reports: Vec<IdentityReport> = kinds.into_iter().map(|k| verify_identities(&g, k, &samples)).collect::<Result<_>>()?;
    let passed = reports.iter().all(|r| r.passes(VERIFY_TOL));
    Ok(VerifyOutput { tolerance: VERIFY_TOL, passed, reports })
}

/// Runs one parsed command. `Ok(false)` means the command ran but its check
/// failed (only `verify` does this).
pub fn run(cli: &Cli) -> Result<bool> {
    init_threads()?;
    match &cli.command {
        Command::Synth(a) => cmd_synth(a)?,
        Command::Wavelet(a) => cmd_wavelet(a)?,
        Command::Cwt(a) => cmd_cwt(a)?,
        Command::Ridge(a) => cmd_ridge(a)?,
        Command::Polar(a) => cmd_polar(a)?,
        Command::Reconstruct(a) => cmd_reconstruct(a)?,
        Command::Verify(a) => {
            let out = run_verify(a)?;
            write_json(&out, a.output.as_deref())?;
            return Ok(out.passed);
        }
    }
    Ok(true)
}

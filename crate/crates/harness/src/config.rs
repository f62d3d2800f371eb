//! Run configuration: defaults per command, an optional `key=value` file and
//! command-line overrides, applied in that order.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::ValueEnum;
use positlab_core::fft::MAX_LOG2;
use thiserror::Error;

/// Smallest transform exponent the harness sweeps.
pub const MIN_LOG2: u32 = 4;
/// Sizes above this are accepted with a long-running warning.
pub const LONG_RUNNING_LOG2: u32 = 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("{0}")]
    Invalid(String),
    #[error("{path}:{line}: {msg}")]
    File { path: String, line: usize, msg: String },
    #[error("cannot read config file {0}: {1}")]
    Read(String, String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Command {
    FftAccuracy,
    SpectralAccuracy,
    Conformance,
    CostReport,
    Bench,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::FftAccuracy => "fft-accuracy",
            Command::SpectralAccuracy => "spectral-accuracy",
            Command::Conformance => "conformance",
            Command::CostReport => "cost-report",
            Command::Bench => "bench",
        }
    }

    fn needs_seed(self) -> bool {
        matches!(self, Command::FftAccuracy | Command::Conformance | Command::Bench)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FormatId {
    Posit32,
    Float32,
    NativeF32,
    BigFloat,
}

impl FormatId {
    pub const ALL: [FormatId; 4] = [FormatId::Posit32, FormatId::Float32, FormatId::NativeF32, FormatId::BigFloat];

    pub fn name(self) -> &'static str {
        match self {
            FormatId::Posit32 => "posit32",
            FormatId::Float32 => "float32",
            FormatId::NativeF32 => "native_f32",
            FormatId::BigFloat => "bigfloat",
        }
    }
}

impl fmt::Display for FormatId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FormatId {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        FormatId::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| invalid(format!("unknown format {s:?} (expected posit32, float32, native_f32 or bigfloat)")))
    }
}

/// Input distribution for random transform inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Dist {
    /// Normal(0, 0.25) with draws outside [-1, 1] rejected.
    #[default]
    Truncnormal,
    /// Uniform on [-1, 1).
    Uniform,
}

impl FromStr for Dist {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "truncnormal" => Ok(Dist::Truncnormal),
            "uniform" => Ok(Dist::Uniform),
            _ => Err(invalid(format!("unknown distribution {s:?} (expected truncnormal or uniform)"))),
        }
    }
}

impl Dist {
    pub fn name(self) -> &'static str {
        match self {
            Dist::Truncnormal => "truncnormal",
            Dist::Uniform => "uniform",
        }
    }
}

/// Settings that may come from a config file or the command line. Unset
/// fields fall through to the next layer.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub sizes: Option<Vec<u32>>,
    pub formats: Option<Vec<FormatId>>,
    pub seed: Option<u64>,
    pub samples: Option<u64>,
    pub precision: Option<u32>,
    pub out: Option<PathBuf>,
    pub fastmath: Option<bool>,
    pub dist: Option<Dist>,
    pub steps: Option<u32>,
    pub repeats: Option<usize>,
    pub exhaustive: Option<bool>,
}

impl Overrides {
    /// `self` wins over `other`.
    pub fn over(self, other: Overrides) -> Overrides {
        Overrides {
            sizes: self.sizes.or(other.sizes),
            formats: self.formats.or(other.formats),
            seed: self.seed.or(other.seed),
            samples: self.samples.or(other.samples),
            precision: self.precision.or(other.precision),
            out: self.out.or(other.out),
            fastmath: self.fastmath.or(other.fastmath),
            dist: self.dist.or(other.dist),
            steps: self.steps.or(other.steps),
            repeats: self.repeats.or(other.repeats),
            exhaustive: self.exhaustive.or(other.exhaustive),
        }
    }

    /// Parses `key=value` lines. Blank lines and `#` comments are skipped.
    pub fn parse_file_text(text: &str, path: &str) -> Result<Overrides, ConfigError> {
        let mut o = Overrides::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| ConfigError::File { path: path.to_string(), line: i + 1, msg };
            let (key, value) = line.split_once('=').ok_or_else(|| err("expected key=value".into()))?;
            let (key, value) = (key.trim(), value.trim());
            o.set(key, value).map_err(|e| err(e.to_string()))?;
        }
        Ok(o)
    }

    pub fn load(path: &Path) -> Result<Overrides, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read(path.display().to_string(), e.to_string()))?;
        Overrides::parse_file_text(&text, &path.display().to_string())
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
            v.parse().map_err(|_| invalid(format!("{key}: cannot parse {v:?}")))
        }
        match key {
            "sizes" => self.sizes = Some(parse_sizes(value)?),
            "formats" => self.formats = Some(parse_formats(value)?),
            "seed" => self.seed = Some(num(key, value)?),
            "samples" => self.samples = Some(num(key, value)?),
            "precision" => self.precision = Some(num(key, value)?),
            "out" => self.out = Some(PathBuf::from(value)),
            "fastmath" => self.fastmath = Some(num(key, value)?),
            "dist" => self.dist = Some(value.parse()?),
            "steps" => self.steps = Some(num(key, value)?),
            "repeats" => self.repeats = Some(num(key, value)?),
            "exhaustive" => self.exhaustive = Some(num(key, value)?),
            _ => return Err(invalid(format!("unknown key {key:?}"))),
        }
        Ok(())
    }
}

/// Parses exponent lists such as `8,10,12` or ranges such as `6..12`
/// (inclusive), or a mix of both.
pub fn parse_sizes(s: &str) -> Result<Vec<u32>, ConfigError> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let num = |t: &str| t.trim().parse::<u32>().map_err(|_| invalid(format!("bad size exponent {t:?}")));
        if let Some((a, b)) = part.split_once("..") {
            let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
            if a > b {
                return Err(invalid(format!("empty size range {part:?}")));
            }
            out.extend(a..=b);
        } else {
            out.push(num(part)?);
        }
    }
    if out.is_empty() {
        return Err(invalid("no sizes given"));
    }
    Ok(out)
}

pub fn parse_formats(s: &str) -> Result<Vec<FormatId>, ConfigError> {
    let v = s.split(',').map(str::trim).filter(|p| !p.is_empty()).map(str::parse).collect::<Result<Vec<_>, _>>()?;
    if v.is_empty() {
        return Err(invalid("no formats given"));
    }
    Ok(v)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    /// Transform sizes as base-2 exponents, deduplicated and ascending.
    pub sizes: Vec<u32>,
    /// Deduplicated, in [`FormatId`] order.
    pub formats: Vec<FormatId>,
    pub seed: u64,
    pub samples: u64,
    /// Reference / BigFloat precision in bits.
    pub precision: u32,
    pub out: Option<PathBuf>,
    pub fastmath: bool,
    pub dist: Dist,
    pub steps: u32,
    pub repeats: usize,
    pub exhaustive: bool,
}

impl RunConfig {
    /// Applies per-command defaults under `o` and validates the result.
    pub fn resolve(command: Command, o: Overrides) -> Result<RunConfig, ConfigError> {
        use FormatId::*;
        let (sizes, formats): (Vec<u32>, Vec<FormatId>) = match command {
            Command::FftAccuracy => ((4..=18).collect(), vec![Posit32, Float32]),
            Command::SpectralAccuracy => ((6..=12).collect(), vec![Posit32, Float32]),
            Command::Conformance => (vec![], vec![Posit32, Float32]),
            Command::CostReport => (vec![10], vec![Posit32, Float32]),
            Command::Bench => (vec![8, 10, 12, 14, 16], vec![Posit32, Float32, NativeF32]),
        };
        let seed = match (o.seed, command.needs_seed()) {
            (Some(s), _) => s,
            (None, false) => 0,
            (None, true) => return Err(invalid(format!("{} needs --seed", command.name()))),
        };
        let mut cfg = RunConfig {
            command,
            sizes: o.sizes.unwrap_or(sizes),
            formats: o.formats.unwrap_or(formats),
            seed,
            samples: o.samples.unwrap_or(1_000_000),
            precision: o.precision.unwrap_or(positlab_core::refprec::DEFAULT_PREC),
            out: o.out,
            fastmath: o.fastmath.unwrap_or(true),
            dist: o.dist.unwrap_or_default(),
            steps: o.steps.unwrap_or(1000),
            repeats: o.repeats.unwrap_or(5),
            exhaustive: o.exhaustive.unwrap_or(false),
        };
        cfg.sizes.sort_unstable();
        cfg.sizes.dedup();
        cfg.formats.sort_unstable();
        cfg.formats.dedup();
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if let Some(&lg) = self.sizes.iter().find(|&&lg| !(MIN_LOG2..=MAX_LOG2).contains(&lg)) {
            return Err(invalid(format!("size exponent {lg} outside {MIN_LOG2}..={MAX_LOG2}")));
        }
        if !(16..=4096).contains(&self.precision) {
            return Err(invalid(format!("precision {} outside 16..=4096 bits", self.precision)));
        }
        if self.repeats == 0 {
            return Err(invalid("repeats must be at least 1"));
        }
        Ok(())
    }

    /// Sizes flagged as long-running.
    pub fn long_running_sizes(&self) -> Vec<u32> {
        self.sizes.iter().copied().filter(|&lg| lg > LONG_RUNNING_LOG2).collect()
    }
}

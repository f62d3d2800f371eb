use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use positlab::config::{parse_formats, parse_sizes};
use positlab::{emit, run, Command, ConfigError, Dist, Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "positlab", version, about = "posit32 vs float32 accuracy, conformance and cost experiments")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// FFT then IFFT round-trip error per format and size.
    FftAccuracy,
    /// Spectral wave-solver error against a high-precision reference.
    SpectralAccuracy,
    /// Correct-rounding checks of the posit32 and float32 kernels.
    Conformance,
    /// Operation counts, height and width of the traced operators (JSON).
    CostReport,
    /// Median wall-clock time of FFT plus IFFT.
    Bench,
}

#[derive(Args)]
struct Opts {
    /// Size exponents, e.g. `8,10,12` or `6..12`.
    #[arg(long, global = true)]
    sizes: Option<String>,
    /// Comma-separated formats: posit32, float32, native_f32, bigfloat.
    #[arg(long, global = true)]
    formats: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Random cases per conformance suite.
    #[arg(long, global = true)]
    samples: Option<u64>,
    /// Reference and BigFloat precision in bits.
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Trace operators without NaR / flush / saturation handling.
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    fastmath: Option<bool>,
    #[arg(long, global = true, value_enum)]
    dist: Option<Dist>,
    /// Time steps for spectral-accuracy.
    #[arg(long, global = true)]
    steps: Option<u32>,
    /// Timed repetitions per bench point.
    #[arg(long, global = true)]
    repeats: Option<usize>,
    /// Check every posit pattern in the round-trip suite.
    #[arg(long, global = true)]
    exhaustive: bool,
    /// key=value file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

impl Opts {
    fn overrides(self) -> Result<(Overrides, Option<PathBuf>), ConfigError> {
        let o = Overrides {
            sizes: self.sizes.as_deref().map(parse_sizes).transpose()?,
            formats: self.formats.as_deref().map(parse_formats).transpose()?,
            seed: self.seed,
            samples: self.samples,
            precision: self.precision,
            out: self.out,
            fastmath: self.fastmath,
            dist: self.dist,
            steps: self.steps,
            repeats: self.repeats,
            exhaustive: self.exhaustive.then_some(true),
        };
        Ok((o, self.config))
    }
}

fn resolve(command: Command, opts: Opts) -> Result<RunConfig, ConfigError> {
    let (cli, config_path) = opts.overrides()?;
    let file = config_path.map(|p| Overrides::load(&p)).transpose()?.unwrap_or_default();
    RunConfig::resolve(command, cli.over(file))
}

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match cli.command {
        Cmd::FftAccuracy => Command::FftAccuracy,
        Cmd::SpectralAccuracy => Command::SpectralAccuracy,
        Cmd::Conformance => Command::Conformance,
        Cmd::CostReport => Command::CostReport,
        Cmd::Bench => Command::Bench,
    };
    let cfg = match resolve(command, cli.opts) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    for lg in cfg.long_running_sizes() {
        eprintln!("warning: N = 2^{lg} is long-running");
    }
    let outcome = match run(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_FAILURE);
        }
    };
    if let Err(e) = emit(cfg.out.as_deref(), &outcome.bytes) {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_FAILURE);
    }
    if outcome.failed {
        for m in &outcome.messages {
            eprintln!("{m}");
        }
        eprintln!("conformance failures detected");
        return ExitCode::from(EXIT_FAILURE);
    }
    ExitCode::SUCCESS
}

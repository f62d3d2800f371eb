//! Experiment harness for the posit32 / float32 study: conformance suites,
//! FFT and spectral accuracy sweeps, operation-cost reports and wall-clock
//! benchmarks. Results are CSV (long form) or JSON.

pub mod accuracy;
pub mod bench;
pub mod config;
pub mod conformance;
pub mod cost;
pub mod inputs;
pub mod metrics;

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

pub use config::{Command, ConfigError, Dist, FormatId, Overrides, RunConfig};

/// Column names of every CSV the harness writes.
pub const CSV_HEADER: &str = "command,format,N,seed,metric,value";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] positlab_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

/// One long-form CSV row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub command: &'static str,
    pub format: String,
    #[serde(rename = "N")]
    pub n: String,
    pub seed: u64,
    pub metric: String,
    pub value: String,
}

impl Row {
    pub fn new(command: Command, format: impl Into<String>, n: Option<usize>, seed: u64, metric: impl Into<String>, value: impl ToString) -> Row {
        Row {
            command: command.name(),
            format: format.into(),
            n: n.map(|n| n.to_string()).unwrap_or_default(),
            seed,
            metric: metric.into(),
            value: value.to_string(),
        }
    }
}

/// Shortest round-trip text for a float metric.
pub fn fmt_value(v: f64) -> String {
    format!("{v:e}")
}

pub fn rows_to_csv(rows: &[Row]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(CSV_HEADER.split(','))?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| HarnessError::Io(e.into_error()))
}

/// Writes to `out`, or to stdout when `out` is `None`.
pub fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, bytes)?,
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(bytes)?;
            so.flush()?;
        }
    }
    Ok(())
}

/// Runs `$body` with `$f` bound to a reference to the arithmetic format
/// named by `$id`; BigFloat runs at `$prec` bits.
#[macro_export]
macro_rules! with_format {
    ($id:expr, $prec:expr, |$f:ident| $body:expr) => {
        match $id {
            $crate::FormatId::Posit32 => {
                let $f = &positlab_core::fft::Posit32;
                $body
            }
            $crate::FormatId::Float32 => {
                let $f = &positlab_core::fft::Float32;
                $body
            }
            $crate::FormatId::NativeF32 => {
                let $f = &positlab_core::fft::NativeF32;
                $body
            }
            $crate::FormatId::BigFloat => {
                let $f = &positlab_core::fft::BigFloatFormat::new($prec);
                $body
            }
        }
    };
}

/// Outcome of a command: serialized output plus whether it signals failure.
#[derive(Debug)]
pub struct Outcome {
    pub bytes: Vec<u8>,
    pub failed: bool,
    /// Diagnostics for a failed run.
    pub messages: Vec<String>,
}

/// Dispatches `cfg.command`.
pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    let csv = |rows: Vec<Row>| -> Result<Outcome> { Ok(Outcome { bytes: rows_to_csv(&rows)?, failed: false, messages: Vec::new() }) };
    match cfg.command {
        Command::FftAccuracy => csv(accuracy::fft_accuracy(cfg)?),
        Command::SpectralAccuracy => csv(accuracy::spectral_accuracy(cfg)?),
        Command::Conformance => {
            let report = conformance::run(cfg);
            let messages = report.tallies.iter().flat_map(|t| t.examples.iter().cloned()).collect();
            Ok(Outcome { bytes: rows_to_csv(&report.rows(cfg))?, failed: report.failures() > 0, messages })
        }
        Command::CostReport => {
            let mut json = cost::cost_report(cfg)?.to_string_pretty();
            json.push('\n');
            Ok(Outcome { bytes: json.into_bytes(), failed: false, messages: Vec::new() })
        }
        Command::Bench => csv(bench::bench(cfg)?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_matches_row_fields() {
        let csv = String::from_utf8(rows_to_csv(&[Row::new(Command::Bench, "posit32", Some(16), 1, "m", 2)]).unwrap()).unwrap();
        assert_eq!(csv, format!("{CSV_HEADER}\nbench,posit32,16,1,m,2\n"));
        let empty = String::from_utf8(rows_to_csv(&[]).unwrap()).unwrap();
        assert_eq!(empty, format!("{CSV_HEADER}\n"));
    }
}

//! FFT round-trip and spectral-solver accuracy sweeps.

use positlab_core::fft::{self, Format};
use positlab_core::spectral::{self, SpectralConfig};
use positlab_core::BigFloat;
use rayon::prelude::*;

use crate::config::{FormatId, RunConfig};
use crate::{fmt_value, inputs, metrics, with_format, Result, Row};

/// Error norm of `IFFT(FFT(x))` against `x`, where `x` is the input rounded
/// into the format.
pub fn round_trip_norm<F: Format>(fmt: &F, re: &[BigFloat], im: &[BigFloat]) -> Result<f64>
where
    F::Scalar: Send + Sync + 'static,
{
    let x = fft::from_reals(fmt, re, im);
    let back = fft::inverse(fmt, &fft::forward(fmt, &x)?)?;
    Ok(metrics::complex_error_norm(fmt, &x, &back))
}

fn points(cfg: &RunConfig) -> Vec<(FormatId, u32)> {
    cfg.formats.iter().flat_map(|&f| cfg.sizes.iter().map(move |&lg| (f, lg))).collect()
}

/// One `error_norm` row per (format, N), ordered by format then N.
pub fn fft_accuracy(cfg: &RunConfig) -> Result<Vec<Row>> {
    points(cfg)
        .into_par_iter()
        .map(|(id, lg)| {
            let n = 1usize << lg;
            let (re, im) = inputs::complex_input(n, cfg.dist, cfg.seed, lg as u64);
            let norm = with_format!(id, cfg.precision, |f| round_trip_norm(f, &re, &im))?;
            Ok(Row::new(cfg.command, id.name(), Some(n), cfg.seed, "error_norm", fmt_value(norm)))
        })
        .collect()
}

/// Reference precision for a spectral run: `cfg.precision`, raised when the
/// target itself is a BigFloat at that precision.
pub fn spectral_reference_precision(cfg: &RunConfig, id: FormatId) -> u32 {
    if id == FormatId::BigFloat {
        cfg.precision + 64
    } else {
        cfg.precision
    }
}

pub fn spectral_accuracy(cfg: &RunConfig) -> Result<Vec<Row>> {
    points(cfg)
        .into_par_iter()
        .map(|(id, lg)| {
            let n = 1usize << lg;
            let scfg = SpectralConfig::new(n)?.with_steps(cfg.steps);
            let ref_prec = spectral_reference_precision(cfg, id);
            let (_, norm) = with_format!(id, cfg.precision, |f| spectral::run_spectral(&scfg, f, ref_prec))?;
            Ok(Row::new(cfg.command, id.name(), Some(n), cfg.seed, "error_norm", fmt_value(norm)))
        })
        .collect()
}

//! Wall-clock timing of a forward plus inverse transform.

use std::time::Instant;

use positlab_core::fft::{self, Format};
use positlab_core::BigFloat;

use crate::config::RunConfig;
use crate::{inputs, with_format, Result, Row};

/// Median of `repeats` timings of `FFT` followed by `IFFT`, after one
/// untimed warm-up run that also fills the twiddle cache.
pub fn time_round_trip<F: Format>(fmt: &F, re: &[BigFloat], im: &[BigFloat], repeats: usize) -> Result<u128>
where
    F::Scalar: Send + Sync + 'static,
{
    let x = fft::from_reals(fmt, re, im);
    let run = || -> Result<u128> {
        let t = Instant::now();
        let y = fft::inverse(fmt, &fft::forward(fmt, &x)?)?;
        let ns = t.elapsed().as_nanos();
        std::hint::black_box(y);
        Ok(ns)
    };
    run()?;
    let mut times = (0..repeats).map(|_| run()).collect::<Result<Vec<_>>>()?;
    times.sort_unstable();
    Ok(times[times.len() / 2])
}

/// Timings run one point at a time, ordered by format then N.
pub fn bench(cfg: &RunConfig) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for &id in &cfg.formats {
        for &lg in &cfg.sizes {
            let n = 1usize << lg;
            let (re, im) = inputs::complex_input(n, cfg.dist, cfg.seed, lg as u64);
            let ns = with_format!(id, cfg.precision, |f| time_round_trip(f, &re, &im, cfg.repeats))?;
            rows.push(Row::new(cfg.command, id.name(), Some(n), cfg.seed, "ns_per_transform", ns));
        }
    }
    Ok(rows)
}

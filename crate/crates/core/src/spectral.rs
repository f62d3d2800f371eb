//! 1D spectral-method wave propagation.
//!
//! `u_tt = c^2 u_xx` on a periodic grid of N points spaced `2 pi / (N d)`,
//! so the domain has length `2 pi / d` and grid wavenumbers are multiples of
//! `d`. The Laplacian is `IFFT(-k^2 * FFT(u))` and time stepping is leapfrog:
//! `u_next = 2u - u_prev + (c dt)^2 Lap(u)`. Every operation after the
//! initial rounding runs in the target format.

use std::io::Write;

use crate::error::{Error, Result};
use crate::fft::{self, BigFloatFormat, Complex, Format};
use crate::refprec::{self, BigFloat};

/// Working precision for setting up initial conditions and constants.
const SETUP_PREC: u32 = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Sin,
    Cos,
}

/// One standing-wave component `amplitude * shape(mode * d * x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wave {
    pub amplitude: f64,
    pub mode: u32,
    pub shape: Shape,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralConfig {
    pub n: usize,
    pub d: u32,
    pub steps: u32,
    /// Time step as a fraction of the grid spacing (dt = dt_factor * dx).
    pub dt_factor: f64,
    pub c: f64,
    pub wavelet: Vec<Wave>,
}

impl SpectralConfig {
    /// `sin + cos(2 .)/2` over the domain, scaled into [-1, 1]; c = 1,
    /// dt = dx / 4, d = 20, 1000 steps.
    pub fn new(n: usize) -> Result<Self> {
        let cfg = SpectralConfig {
            n,
            d: 20,
            steps: 1000,
            dt_factor: 0.25,
            c: 1.0,
            wavelet: vec![
                Wave { amplitude: 1.0 / 1.5, mode: 1, shape: Shape::Sin },
                Wave { amplitude: 0.5 / 1.5, mode: 2, shape: Shape::Cos },
            ],
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_steps(mut self, steps: u32) -> Self {
        self.steps = steps;
        self
    }

    /// Checks the grid size and the stability bound `c dt k_max < 1`.
    pub fn validate(&self) -> Result<()> {
        fft::log2_size(self.n)?;
        if self.d == 0 || self.c.is_nan() || self.c <= 0.0 || self.dt_factor.is_nan() || self.dt_factor <= 0.0 {
            return Err(Error::InvalidConfig("d, c and dt must be positive".into()));
        }
        if self.wavelet.iter().any(|w| 2 * w.mode as usize >= self.n) {
            return Err(Error::InvalidConfig("wavelet mode not resolved by the grid".into()));
        }
        // k_max = pi / dx, so c dt k_max = pi c dt_factor.
        let cfl = std::f64::consts::PI * self.c * self.dt_factor;
        if cfl >= 1.0 {
            return Err(Error::InvalidConfig(format!("c*dt*k_max = {cfl:.3} must be below 1")));
        }
        Ok(())
    }

    pub fn dx(&self, prec: u32) -> BigFloat {
        refprec::pi(prec + 8).ldexp(1).div_u64(self.n as u64 * self.d as u64, prec)
    }

    pub fn dt(&self, prec: u32) -> BigFloat {
        self.dx(prec + 64).mul(&BigFloat::from_f64(self.dt_factor), prec)
    }

    /// Exact standing-wave solution with zero initial velocity at time
    /// `steps_from_zero * dt` on every grid point.
    pub fn exact(&self, steps_from_zero: i64, prec: u32) -> Vec<BigFloat> {
        let wp = prec + 64;
        let dx = self.dx(wp);
        let t = self.dt(wp).mul(&BigFloat::from_i64(steps_from_zero), wp);
        let c = BigFloat::from_f64(self.c);
        let mut u = vec![BigFloat::zero(); self.n];
        for w in &self.wavelet {
            let kw = BigFloat::from_u64(w.mode as u64 * self.d as u64);
            let time = refprec::cos(&c.mul(&kw, wp).mul(&t, wp), wp);
            let amp = BigFloat::from_f64(w.amplitude).mul(&time, wp);
            for (j, uj) in u.iter_mut().enumerate() {
                let theta = kw.mul(&dx, wp).mul(&BigFloat::from_u64(j as u64), wp);
                let (s, co) = refprec::sin_cos(&theta, wp);
                let f = match w.shape {
                    Shape::Sin => s,
                    Shape::Cos => co,
                };
                *uj = uj.add(&amp.mul(&f, wp), wp);
            }
        }
        u.into_iter().map(|v| v.round(prec)).collect()
    }
}

/// Field at the current and previous time levels.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveState<S> {
    pub u: Vec<S>,
    pub u_prev: Vec<S>,
}

/// Per-format constants: `-k^2` per frequency bin and `(c dt)^2`.
pub struct Operators<S> {
    pub neg_k2: Vec<S>,
    pub cdt2: S,
}

impl<S> Operators<S> {
    pub fn new<F: Format<Scalar = S>>(cfg: &SpectralConfig, fmt: &F) -> Self
    where
        S: Send + Sync + 'static,
    {
        let n = cfg.n as i64;
        let d = cfg.d as i64;
        let neg_k2 = (0..n)
            .map(|j| {
                let m = if j <= n / 2 { j } else { j - n };
                let k = BigFloat::from_i64(m * d);
                fmt.from_real(&k.mul(&k, 128).neg())
            })
            .collect();
        let cdt = BigFloat::from_f64(cfg.c).mul(&cfg.dt(SETUP_PREC), SETUP_PREC);
        let cdt2 = fmt.from_real(&cdt.mul(&cdt, SETUP_PREC));
        Operators { neg_k2, cdt2 }
    }
}

/// `IFFT(-k^2 * FFT(u))`, real part.
pub fn spectral_laplacian<F: Format>(fmt: &F, u: &[F::Scalar], ops: &Operators<F::Scalar>) -> Result<Vec<F::Scalar>>
where
    F::Scalar: Send + Sync + 'static,
{
    let zero = fmt.zero();
    let x: Vec<Complex<F::Scalar>> = u.iter().map(|v| Complex::new(v.clone(), zero.clone())).collect();
    let mut spec = fft::forward(fmt, &x)?;
    for (c, k2) in spec.iter_mut().zip(&ops.neg_k2) {
        c.re = fmt.mul(&c.re, k2);
        c.im = fmt.mul(&c.im, k2);
    }
    Ok(fft::inverse(fmt, &spec)?.into_iter().map(|c| c.re).collect())
}

/// One leapfrog step.
pub fn step_wave<F: Format>(fmt: &F, state: &WaveState<F::Scalar>, ops: &Operators<F::Scalar>) -> Result<WaveState<F::Scalar>>
where
    F::Scalar: Send + Sync + 'static,
{
    let lap = spectral_laplacian(fmt, &state.u, ops)?;
    let next = state
        .u
        .iter()
        .zip(&state.u_prev)
        .zip(&lap)
        .map(|((u, up), l)| {
            let two_u = fmt.add(u, u);
            fmt.add(&fmt.sub(&two_u, up), &fmt.mul(&ops.cdt2, l))
        })
        .collect();
    Ok(WaveState { u_prev: state.u.clone(), u: next })
}

/// Initial state: the exact solution at t = 0 and t = -dt, rounded into the
/// format.
pub fn initial_state<F: Format>(fmt: &F, cfg: &SpectralConfig) -> WaveState<F::Scalar>
where
    F::Scalar: Send + Sync + 'static,
{
    let round = |v: Vec<BigFloat>| v.iter().map(|x| fmt.from_real(x)).collect();
    WaveState { u: round(cfg.exact(0, SETUP_PREC)), u_prev: round(cfg.exact(-1, SETUP_PREC)) }
}

/// Runs `cfg.steps` steps in `fmt` from `state`, calling
/// `snapshot(step, field)` after the initial state and after each step.
/// Returns the final field as reals.
pub fn simulate_from<F: Format>(
    fmt: &F,
    cfg: &SpectralConfig,
    mut state: WaveState<F::Scalar>,
    mut snapshot: impl FnMut(u32, &[F::Scalar]),
) -> Result<Vec<BigFloat>>
where
    F::Scalar: Send + Sync + 'static,
{
    cfg.validate()?;
    let ops = Operators::new(cfg, fmt);
    snapshot(0, &state.u);
    for s in 1..=cfg.steps {
        state = step_wave(fmt, &state, &ops)?;
        snapshot(s, &state.u);
    }
    Ok(state.u.iter().map(|v| fmt.to_real(v)).collect())
}

/// [`simulate_from`] starting at [`initial_state`].
pub fn simulate<F: Format>(fmt: &F, cfg: &SpectralConfig, snapshot: impl FnMut(u32, &[F::Scalar])) -> Result<Vec<BigFloat>>
where
    F::Scalar: Send + Sync + 'static,
{
    simulate_from(fmt, cfg, initial_state(fmt, cfg), snapshot)
}

/// Final field of a high-precision run started from the initial state of
/// `fmt`, so that both runs see identical initial conditions.
pub fn reference_run<F: Format>(cfg: &SpectralConfig, fmt: &F, prec: u32) -> Result<Vec<BigFloat>>
where
    F::Scalar: Send + Sync + 'static,
{
    let start = initial_state(fmt, cfg);
    let lift = |v: &[F::Scalar]| v.iter().map(|x| fmt.to_real(x)).collect();
    let state = WaveState { u: lift(&start.u), u_prev: lift(&start.u_prev) };
    simulate_from(&BigFloatFormat::new(prec), cfg, state, |_, _| {})
}

/// Error norm `sqrt(sum (x_i - y_i)^2)`, evaluated at 256 bits.
pub fn error_norm(reference: &[BigFloat], values: &[BigFloat]) -> f64 {
    assert_eq!(reference.len(), values.len());
    let p = 256;
    let sum = reference.iter().zip(values).fold(BigFloat::zero(), |acc, (x, y)| {
        let d = x.sub(y, p);
        acc.add(&d.mul(&d, p), p)
    });
    sum.sqrt(p).expect("sum of squares is nonnegative").to_f64()
}

/// Runs `fmt` and a reference at `ref_prec` bits from the same initial
/// conditions; returns the final field and its error norm against the
/// reference.
pub fn run_spectral<F: Format>(cfg: &SpectralConfig, fmt: &F, ref_prec: u32) -> Result<(Vec<BigFloat>, f64)>
where
    F::Scalar: Send + Sync + 'static,
{
    let reference = reference_run(cfg, fmt, ref_prec)?;
    let field = simulate(fmt, cfg, |_, _| {})?;
    let norm = error_norm(&reference, &field);
    Ok((field, norm))
}

/// Writes `step,x,u` rows every `every` steps.
pub fn write_snapshots<F: Format, W: Write>(fmt: &F, cfg: &SpectralConfig, every: u32, out: &mut W) -> Result<()>
where
    F::Scalar: Send + Sync + 'static,
{
    let every = every.max(1);
    let dx = cfg.dx(64).to_f64();
    let mut rows = String::from("step,x,u\n");
    simulate(fmt, cfg, |s, u| {
        if s % every == 0 || s == cfg.steps {
            for (j, v) in u.iter().enumerate() {
                rows.push_str(&format!("{s},{:.17e},{:.17e}\n", j as f64 * dx, fmt.to_real(v).to_f64()));
            }
        }
    })?;
    out.write_all(rows.as_bytes()).map_err(|e| Error::InvalidConfig(format!("write failed: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fft::{Float32, Posit32};

    #[test]
    fn default_config_is_stable() {
        let cfg = SpectralConfig::new(64).unwrap();
        assert_eq!((cfg.d, cfg.steps, cfg.c), (20, 1000, 1.0));
        let bad = SpectralConfig { dt_factor: 0.5, ..cfg.clone() };
        assert!(matches!(bad.validate(), Err(Error::InvalidConfig(_))));
        assert!(SpectralConfig::new(48).is_err());
    }

    #[test]
    fn default_wavelet_spans_unit_interval() {
        let cfg = SpectralConfig::new(256).unwrap();
        let u: Vec<f64> = cfg.exact(0, 64).iter().map(|v| v.to_f64()).collect();
        let lo = u.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = u.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!((lo + 1.0).abs() < 1e-3 && hi <= 0.5 + 1e-12, "{lo} {hi}");
    }

    #[test]
    fn zero_steps_give_zero_error() {
        let cfg = SpectralConfig::new(16).unwrap().with_steps(0);
        let (_, e) = run_spectral(&cfg, &Posit32, 250).unwrap();
        assert_eq!(e, 0.0);
    }

    #[test]
    fn zero_field_stays_zero() {
        let cfg = SpectralConfig::new(16).unwrap();
        let ops = Operators::new(&cfg, &Float32);
        let z = vec![Float32.zero(); 16];
        let s = WaveState { u: z.clone(), u_prev: z.clone() };
        assert_eq!(step_wave(&Float32, &s, &ops).unwrap().u, z);
    }
}

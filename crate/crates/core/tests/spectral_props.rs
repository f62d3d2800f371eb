use positlab_core::fft::{BigFloatFormat, Float32, Format, Posit32};
use positlab_core::spectral::{self, Operators, Shape, SpectralConfig, Wave};
use positlab_core::{refprec, BigFloat};

fn single_mode(n: usize, d: u32, mode: u32) -> SpectralConfig {
    SpectralConfig {
        n,
        d,
        steps: 100,
        dt_factor: 0.25,
        c: 1.0,
        wavelet: vec![Wave { amplitude: 1.0, mode, shape: Shape::Sin }],
    }
}

fn laplacian_of<F: Format>(fmt: &F, cfg: &SpectralConfig, u: &[BigFloat]) -> Vec<BigFloat>
where
    F::Scalar: Send + Sync + 'static,
{
    let ops = Operators::new(cfg, fmt);
    let x: Vec<F::Scalar> = u.iter().map(|v| fmt.from_real(v)).collect();
    spectral::spectral_laplacian(fmt, &x, &ops).unwrap().iter().map(|v| fmt.to_real(v)).collect()
}

#[test]
fn sine_is_an_eigenfunction() {
    // Rounding noise in the empty bins is amplified by up to k_max^2 = 256.
    let cfg = single_mode(32, 1, 1);
    let u = cfg.exact(0, 200);
    for (eps, lap) in [(2f64.powi(-27), laplacian_of(&Posit32, &cfg, &u)), (2f64.powi(-24), laplacian_of(&Float32, &cfg, &u))] {
        let err = lap.iter().zip(&u).map(|(l, v)| (l.to_f64() + v.to_f64()).abs()).fold(0.0, f64::max);
        assert!(err < 256.0 * eps * 8.0, "{err:e}");
    }
}

#[test]
fn constant_field_has_zero_laplacian() {
    let cfg = single_mode(32, 20, 1);
    let u = vec![BigFloat::from_f64(0.375); 32];
    for lap in [laplacian_of(&Posit32, &cfg, &u), laplacian_of(&Float32, &cfg, &u)] {
        assert!(lap.iter().all(|v| v.is_zero()));
    }
}

#[test]
fn band_limited_laplacian_is_near_exact_at_high_precision() {
    let p = 250;
    let mut cfg = single_mode(32, 3, 1);
    cfg.wavelet = vec![
        Wave { amplitude: 0.3, mode: 1, shape: Shape::Sin },
        Wave { amplitude: -0.7, mode: 5, shape: Shape::Cos },
        Wave { amplitude: 0.2, mode: 9, shape: Shape::Sin },
    ];
    let u = cfg.exact(0, p);
    let lap = laplacian_of(&BigFloatFormat::new(p), &cfg, &u);
    let dx = cfg.dx(p + 32);
    for (j, l) in lap.iter().enumerate() {
        let mut want = BigFloat::zero();
        for w in &cfg.wavelet {
            let k = (w.mode * cfg.d) as u64;
            let theta = dx.mul(&BigFloat::from_u64(k * j as u64), p + 32);
            let (s, c) = refprec::sin_cos(&theta, p + 32);
            let f = if w.shape == Shape::Sin { s } else { c };
            let term = f.mul(&BigFloat::from_f64(w.amplitude), p + 32).mul(&BigFloat::from_u64(k * k), p + 32);
            want = want.sub(&term, p + 32);
        }
        let err = l.sub(&want, p + 32);
        assert!(err.is_zero() || err.msb_exp() < -200 + 12, "j={j} {}", err.msb_exp());
    }
}

#[test]
fn zero_field_stays_zero() {
    let mut cfg = single_mode(16, 20, 1);
    cfg.wavelet[0].amplitude = 0.0;
    let out = spectral::simulate(&Posit32, &cfg.clone().with_steps(5), |_, _| {}).unwrap();
    assert!(out.iter().all(|v| v.is_zero()));
}

fn time_error(dt_factor: f64, steps: u32) -> f64 {
    let mut cfg = single_mode(16, 20, 3);
    cfg.dt_factor = dt_factor;
    cfg.steps = steps;
    let fmt = BigFloatFormat::new(128);
    let got = spectral::simulate(&fmt, &cfg, |_, _| {}).unwrap();
    spectral::error_norm(&cfg.exact(steps as i64, 128), &got)
}

#[test]
fn leapfrog_is_second_order() {
    let coarse = time_error(0.25, 100);
    let fine = time_error(0.125, 200);
    let rate = coarse / fine;
    assert!((3.8..4.2).contains(&rate), "rate {rate}");
}

#[test]
fn reference_is_converged_in_precision() {
    let cfg = SpectralConfig::new(64).unwrap().with_steps(200);
    let a = spectral::reference_run(&cfg, &Posit32, 250).unwrap();
    let b = spectral::reference_run(&cfg, &Posit32, 300).unwrap();
    let diff = spectral::error_norm(&a, &b);
    let norm = spectral::error_norm(&a, &vec![BigFloat::zero(); a.len()]);
    assert!(diff < norm * 2f64.powi(-200), "{diff:e}");
}

#[test]
fn zero_steps_give_zero_error() {
    let cfg = SpectralConfig::new(64).unwrap().with_steps(0);
    assert_eq!(spectral::run_spectral(&cfg, &Posit32, 250).unwrap().1, 0.0);
    assert_eq!(spectral::run_spectral(&cfg, &Float32, 250).unwrap().1, 0.0);
}

#[test]
fn posit_beats_float_at_256() {
    let cfg = SpectralConfig::new(256).unwrap();
    let (_, p) = spectral::run_spectral(&cfg, &Posit32, 250).unwrap();
    let (_, f) = spectral::run_spectral(&cfg, &Float32, 250).unwrap();
    assert!(p < f, "posit {p:e} float {f:e}");
}

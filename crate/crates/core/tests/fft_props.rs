use positlab_core::fft::{self, BigFloatFormat, Complex, Float32, Format, Posit32};
use positlab_core::oracle;
use positlab_core::posit::PositBits;
use positlab_core::BigFloat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const P: u32 = 250;

fn random_reals(n: usize, seed: u64) -> (Vec<BigFloat>, Vec<BigFloat>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || BigFloat::from_f64(rng.random_range(-1.0..1.0));
    let re = (0..n).map(|_| draw()).collect();
    let im = (0..n).map(|_| draw()).collect();
    (re, im)
}

fn norm2(re: &[BigFloat], im: &[BigFloat]) -> BigFloat {
    re.iter().chain(im).fold(BigFloat::zero(), |acc, v| acc.add(&v.mul(v, 600), 600))
}

fn diff_norm2(a: &[Complex<BigFloat>], re: &[BigFloat], im: &[BigFloat]) -> BigFloat {
    let dr: Vec<BigFloat> = a.iter().zip(re).map(|(x, r)| x.re.sub(r, 600)).collect();
    let di: Vec<BigFloat> = a.iter().zip(im).map(|(x, i)| x.im.sub(i, 600)).collect();
    norm2(&dr, &di)
}

/// |a|^2 < 2^(2 * log2_bound) |b|^2
fn below(a: &BigFloat, b: &BigFloat, log2_bound: i64) -> bool {
    a.is_zero() || *a < b.clone().ldexp(2 * log2_bound)
}

#[test]
fn bigfloat_fft_matches_direct_dft() {
    let f = BigFloatFormat::new(P);
    for n in [16usize, 64] {
        let (re, im) = random_reals(n, n as u64);
        let x = fft::from_reals(&f, &re, &im);
        let got = fft::forward(&f, &x).unwrap();
        let (wr, wi) = oracle::dft(&re, &im, false, P + 20);
        assert!(below(&diff_norm2(&got, &wr, &wi), &norm2(&wr, &wi), -200), "N={n}");
    }
}

#[test]
fn parseval_holds_at_high_precision() {
    let f = BigFloatFormat::new(P);
    for n in [16usize, 64, 128] {
        let (re, im) = random_reals(n, 100 + n as u64);
        let x = fft::from_reals(&f, &re, &im);
        let y = fft::forward(&f, &x).unwrap();
        let lhs = norm2(&re, &im);
        let yr: Vec<BigFloat> = y.iter().map(|c| c.re.clone()).collect();
        let yi: Vec<BigFloat> = y.iter().map(|c| c.im.clone()).collect();
        let rhs = norm2(&yr, &yi).div_u64(n as u64, 600);
        assert!(lhs.sub(&rhs, 600).abs() < lhs.clone().ldexp(-200), "N={n}");
    }
}

#[test]
fn bigfloat_round_trip_is_near_exact() {
    let f = BigFloatFormat::new(P);
    let (re, im) = random_reals(64, 5);
    let x = fft::from_reals(&f, &re, &im);
    let back = fft::inverse(&f, &fft::forward(&f, &x).unwrap()).unwrap();
    for (a, b) in back.iter().zip(&x) {
        for d in [a.re.sub(&b.re, 600), a.im.sub(&b.im, 600)] {
            assert!(d.is_zero() || d.msb_exp() < -220);
        }
    }
}

#[test]
fn linearity_in_bigfloat() {
    let f = BigFloatFormat::new(P);
    let (xr, xi) = random_reals(64, 11);
    let (yr, yi) = random_reals(64, 12);
    let (alpha, beta) = (BigFloat::from_f64(0.75), BigFloat::from_f64(-1.25));
    let comb = |a: &[BigFloat], b: &[BigFloat]| -> Vec<BigFloat> {
        a.iter().zip(b).map(|(u, v)| alpha.mul(u, P).add(&beta.mul(v, P), P)).collect()
    };
    let z = fft::forward(&f, &fft::from_reals(&f, &comb(&xr, &yr), &comb(&xi, &yi))).unwrap();
    let fx = fft::forward(&f, &fft::from_reals(&f, &xr, &xi)).unwrap();
    let fy = fft::forward(&f, &fft::from_reals(&f, &yr, &yi)).unwrap();
    let er: Vec<BigFloat> = fx.iter().zip(&fy).map(|(a, b)| alpha.mul(&a.re, P).add(&beta.mul(&b.re, P), P)).collect();
    let ei: Vec<BigFloat> = fx.iter().zip(&fy).map(|(a, b)| alpha.mul(&a.im, P).add(&beta.mul(&b.im, P), P)).collect();
    assert!(below(&diff_norm2(&z, &er, &ei), &norm2(&er, &ei), -200));
}

/// Recursive Stockham written directly against posit scalars with its own
/// twiddle generation.
fn posit_replay(x: &[Complex<PositBits>]) -> Vec<Complex<PositBits>> {
    let n = x.len();
    let twiddle = |m: usize| {
        let theta = positlab_core::refprec::pi(200).ldexp(1).mul(&BigFloat::from_u64(m as u64), 200).div_u64(n as u64, 200);
        let (s, c) = positlab_core::refprec::sin_cos(&theta, 128);
        (PositBits::from_real(&c), PositBits::from_real(&s.neg()))
    };
    let cm = |a: (PositBits, PositBits), w: (PositBits, PositBits)| (a.0 * w.0 - a.1 * w.1, a.0 * w.1 + a.1 * w.0);
    fn rec(
        len: usize,
        s: usize,
        x: &mut Vec<(PositBits, PositBits)>,
        y: &mut Vec<(PositBits, PositBits)>,
        tw: &dyn Fn(usize, usize) -> (PositBits, PositBits),
        cm: &dyn Fn((PositBits, PositBits), (PositBits, PositBits)) -> (PositBits, PositBits),
    ) {
        if len == 1 {
            return;
        }
        let n1 = len / 4;
        for p in 0..n1 {
            let (w1, w2, w3) = (tw(p, len), tw(2 * p, len), tw(3 * p, len));
            for q in 0..s {
                let a = x[q + s * p];
                let b = x[q + s * (p + n1)];
                let c = x[q + s * (p + 2 * n1)];
                let d = x[q + s * (p + 3 * n1)];
                let apc = (a.0 + c.0, a.1 + c.1);
                let amc = (a.0 - c.0, a.1 - c.1);
                let bpd = (b.0 + d.0, b.1 + d.1);
                let bmd = (b.0 - d.0, b.1 - d.1);
                y[q + s * 4 * p] = (apc.0 + bpd.0, apc.1 + bpd.1);
                y[q + s * (4 * p + 1)] = cm((amc.0 + bmd.1, amc.1 - bmd.0), w1);
                y[q + s * (4 * p + 2)] = cm((apc.0 - bpd.0, apc.1 - bpd.1), w2);
                y[q + s * (4 * p + 3)] = cm((amc.0 - bmd.1, amc.1 + bmd.0), w3);
            }
        }
        rec(len / 4, 4 * s, y, x, tw, cm);
    }
    let tw = |m: usize, len: usize| twiddle(m * (n / len));
    let mut a: Vec<_> = x.iter().map(|c| (c.re, c.im)).collect();
    let mut b = a.clone();
    rec(n, 1, &mut a, &mut b, &tw, &cm);
    // log4(256) = 4 stages, so the result is back in the first buffer.
    a.into_iter().map(|(re, im)| Complex::new(re, im)).collect()
}

#[test]
fn posit_fft_matches_scalar_replay() {
    let (re, im) = random_reals(256, 3);
    let x = fft::from_reals(&Posit32, &re, &im);
    assert_eq!(fft::forward(&Posit32, &x).unwrap(), posit_replay(&x));
}

fn round_trip_error<F: Format>(f: &F, re: &[BigFloat], im: &[BigFloat]) -> f64
where
    F::Scalar: Send + Sync + 'static,
{
    let x = fft::from_reals(f, re, im);
    let back = fft::inverse(f, &fft::forward(f, &x).unwrap()).unwrap();
    let mut s = 0.0;
    for (a, b) in back.iter().zip(&x) {
        let dr = f.to_real(&a.re).sub(&f.to_real(&b.re), 200).to_f64();
        let di = f.to_real(&a.im).sub(&f.to_real(&b.im), 200).to_f64();
        s += dr * dr + di * di;
    }
    s.sqrt()
}

#[test]
fn posit_round_trip_beats_float32_at_1024() {
    let (re, im) = random_reals(1024, 42);
    let p = round_trip_error(&Posit32, &re, &im);
    let f = round_trip_error(&Float32, &re, &im);
    assert!(p > 0.0 && p < f, "posit {p} float {f}");
}

#[test]
fn posit_and_float_twiddles_agree_near_one() {
    let n = 1 << 16;
    let tp = fft::build_twiddles(n, &Posit32).unwrap();
    let tf = fft::build_twiddles(n, &Float32).unwrap();
    let (p, f) = (&tp.forward[0][1][0], &tf.forward[0][1][0]);
    for (a, b) in [(p.re.to_real(), f.re.to_real()), (p.im.to_real(), f.im.to_real())] {
        let rel = a.sub(&b, 300).abs();
        assert!(rel <= b.clone().abs().ldexp(-24), "{a:?} {b:?}");
    }
}

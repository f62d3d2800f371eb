//! Radix-4 iterative Stockham FFT, generic over the scalar format.
//!
//! Each stage reads one buffer and writes the other in natural order, so no
//! bit-reversal pass is needed. Sizes that are an odd power of two finish with
//! one radix-2 stage. Twiddles are computed once per (format, size) from
//! high-precision sine and cosine, rounded to the format, and cached.

use std::any::Any;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::posit::{self, PositBits};
use crate::refprec::{self, BigFloat};
use crate::softfloat::{self, FloatBits};

/// Largest supported size is 2^28.
pub const MAX_LOG2: u32 = 28;

/// The arithmetic a butterfly needs.
pub trait Arith {
    type Scalar: Clone;
    fn add(&self, a: &Self::Scalar, b: &Self::Scalar) -> Self::Scalar;
    fn sub(&self, a: &Self::Scalar, b: &Self::Scalar) -> Self::Scalar;
    fn mul(&self, a: &Self::Scalar, b: &Self::Scalar) -> Self::Scalar;
}

/// A real scalar format the transforms can run in.
pub trait Format: Arith + Send + Sync
where
    Self::Scalar: Send + Sync + 'static,
{
    fn name(&self) -> String;

    /// Distinguishes formats whose twiddles differ.
    fn cache_key(&self) -> String {
        self.name()
    }

    fn from_real(&self, v: &BigFloat) -> Self::Scalar;
    fn to_real(&self, a: &Self::Scalar) -> BigFloat;

    fn zero(&self) -> Self::Scalar {
        self.from_real(&BigFloat::zero())
    }

    /// Precision of the sine and cosine values twiddles are rounded from.
    fn twiddle_precision(&self) -> u32 {
        128
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Posit32;

impl Arith for Posit32 {
    type Scalar = PositBits;
    fn add(&self, a: &PositBits, b: &PositBits) -> PositBits {
        posit::posit_add(*a, *b)
    }
    fn sub(&self, a: &PositBits, b: &PositBits) -> PositBits {
        posit::posit_sub(*a, *b)
    }
    fn mul(&self, a: &PositBits, b: &PositBits) -> PositBits {
        posit::posit_mul(*a, *b)
    }
}

impl Format for Posit32 {
    fn name(&self) -> String {
        "posit32".into()
    }
    fn from_real(&self, v: &BigFloat) -> PositBits {
        posit::posit_from_real(v)
    }
    fn to_real(&self, a: &PositBits) -> BigFloat {
        posit::posit_to_real(*a)
    }
}

/// Software binary32.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Float32;

impl Arith for Float32 {
    type Scalar = FloatBits;
    fn add(&self, a: &FloatBits, b: &FloatBits) -> FloatBits {
        softfloat::sf32_add(*a, *b)
    }
    fn sub(&self, a: &FloatBits, b: &FloatBits) -> FloatBits {
        softfloat::sf32_sub(*a, *b)
    }
    fn mul(&self, a: &FloatBits, b: &FloatBits) -> FloatBits {
        softfloat::sf32_mul(*a, *b)
    }
}

impl Format for Float32 {
    fn name(&self) -> String {
        "float32".into()
    }
    fn from_real(&self, v: &BigFloat) -> FloatBits {
        softfloat::sf32_from_real(v)
    }
    fn to_real(&self, a: &FloatBits) -> BigFloat {
        softfloat::sf32_to_real(*a)
    }
}

/// Hardware `f32`, as a speed reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct NativeF32;

impl Arith for NativeF32 {
    type Scalar = f32;
    fn add(&self, a: &f32, b: &f32) -> f32 {
        a + b
    }
    fn sub(&self, a: &f32, b: &f32) -> f32 {
        a - b
    }
    fn mul(&self, a: &f32, b: &f32) -> f32 {
        a * b
    }
}

impl Format for NativeF32 {
    fn name(&self) -> String {
        "native_f32".into()
    }
    fn from_real(&self, v: &BigFloat) -> f32 {
        softfloat::sf32_from_real(v).to_f32()
    }
    fn to_real(&self, a: &f32) -> BigFloat {
        BigFloat::from_f64(*a as f64)
    }
}

/// Arbitrary precision, every operation rounded to `prec` bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BigFloatFormat {
    pub prec: u32,
}

impl BigFloatFormat {
    pub fn new(prec: u32) -> Self {
        BigFloatFormat { prec }
    }
}

impl Arith for BigFloatFormat {
    type Scalar = BigFloat;
    fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.prec)
    }
    fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.prec)
    }
    fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.prec)
    }
}

impl Format for BigFloatFormat {
    fn name(&self) -> String {
        format!("bigfloat{}", self.prec)
    }
    fn from_real(&self, v: &BigFloat) -> BigFloat {
        v.round(self.prec)
    }
    fn to_real(&self, a: &BigFloat) -> BigFloat {
        a.clone()
    }
    fn twiddle_precision(&self) -> u32 {
        self.prec + 64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Complex<S> {
    pub re: S,
    pub im: S,
}

impl<S> Complex<S> {
    pub fn new(re: S, im: S) -> Self {
        Complex { re, im }
    }
}

pub type ComplexVec<S> = Vec<Complex<S>>;

/// Schoolbook complex product: four multiplies, one add, one subtract.
pub fn cmul<A: Arith>(ar: &A, a: &Complex<A::Scalar>, w: &Complex<A::Scalar>) -> Complex<A::Scalar> {
    let re = ar.sub(&ar.mul(&a.re, &w.re), &ar.mul(&a.im, &w.im));
    let im = ar.add(&ar.mul(&a.re, &w.im), &ar.mul(&a.im, &w.re));
    Complex { re, im }
}

/// Radix-4 decimation-in-frequency butterfly. `w` holds w^1, w^2, w^3 for
/// the forward transform or their conjugates for the inverse.
pub fn butterfly4<A: Arith>(
    ar: &A,
    x: [&Complex<A::Scalar>; 4],
    w: [&Complex<A::Scalar>; 3],
    inverse: bool,
) -> [Complex<A::Scalar>; 4] {
    let [a, b, c, d] = x;
    let apc = Complex { re: ar.add(&a.re, &c.re), im: ar.add(&a.im, &c.im) };
    let amc = Complex { re: ar.sub(&a.re, &c.re), im: ar.sub(&a.im, &c.im) };
    let bpd = Complex { re: ar.add(&b.re, &d.re), im: ar.add(&b.im, &d.im) };
    let bmd = Complex { re: ar.sub(&b.re, &d.re), im: ar.sub(&b.im, &d.im) };
    // amc - j*bmd and amc + j*bmd
    let minus_j = Complex { re: ar.add(&amc.re, &bmd.im), im: ar.sub(&amc.im, &bmd.re) };
    let plus_j = Complex { re: ar.sub(&amc.re, &bmd.im), im: ar.add(&amc.im, &bmd.re) };
    let (t1, t3) = if inverse { (plus_j, minus_j) } else { (minus_j, plus_j) };
    let y0 = Complex { re: ar.add(&apc.re, &bpd.re), im: ar.add(&apc.im, &bpd.im) };
    let t2 = Complex { re: ar.sub(&apc.re, &bpd.re), im: ar.sub(&apc.im, &bpd.im) };
    [y0, cmul(ar, &t1, w[0]), cmul(ar, &t2, w[1]), cmul(ar, &t3, w[2])]
}

pub fn butterfly2<A: Arith>(ar: &A, a: &Complex<A::Scalar>, b: &Complex<A::Scalar>) -> [Complex<A::Scalar>; 2] {
    [
        Complex { re: ar.add(&a.re, &b.re), im: ar.add(&a.im, &b.im) },
        Complex { re: ar.sub(&a.re, &b.re), im: ar.sub(&a.im, &b.im) },
    ]
}

/// log2 of a supported transform size (a power of two from 2 to 2^28).
pub fn log2_size(n: usize) -> Result<u32> {
    if n < 2 || !n.is_power_of_two() || n.trailing_zeros() > MAX_LOG2 {
        return Err(Error::UnsupportedLength(n));
    }
    Ok(n.trailing_zeros())
}

/// Twiddles for every radix-4 stage of one transform size.
#[derive(Debug, Clone)]
pub struct TwiddleTable<S> {
    pub n: usize,
    pub format_key: String,
    /// `forward[s][p]` = (w^p, w^2p, w^3p) with w = e^{-2 pi i / n_s}, where
    /// n_s = n / 4^s is the sub-transform length at stage s.
    pub forward: Vec<Vec<[Complex<S>; 3]>>,
    /// Complex conjugates of `forward`.
    pub inverse: Vec<Vec<[Complex<S>; 3]>>,
}

/// cos and sin of 2 pi m / n at `prec` bits, for m in [0, n).
fn unit_roots(n: usize, prec: u32) -> Vec<(BigFloat, BigFloat)> {
    let wp = prec + 16;
    let two_pi = refprec::pi(wp + 16).ldexp(1);
    let direct = |m: usize| {
        let theta = two_pi.mul(&BigFloat::from_u64(m as u64), wp + 16).div_u64(n as u64, wp + 16);
        refprec::sin_cos(&theta, prec)
    };
    if n < 8 {
        return (0..n).map(|m| {
            let (s, c) = direct(m);
            (c, s)
        })
        .collect();
    }
    let (n8, n4, n2) = (n / 8, n / 4, n / 2);
    let first: Vec<(BigFloat, BigFloat)> = (0..=n8)
        .map(|m| {
            let (s, c) = direct(m);
            (c, s)
        })
        .collect();
    let quarter = |m: usize| -> (BigFloat, BigFloat) {
        // m in [0, n/4]
        if m <= n8 {
            first[m].clone()
        } else {
            let (c, s) = &first[n4 - m];
            (s.clone(), c.clone())
        }
    };
    let half = |m: usize| -> (BigFloat, BigFloat) {
        // m in [0, n/2]: rotate by a quarter turn above n/4
        if m <= n4 {
            quarter(m)
        } else {
            let (c, s) = quarter(m - n4);
            (s.neg(), c)
        }
    };
    (0..n)
        .map(|m| {
            if m <= n2 {
                half(m)
            } else {
                let (c, s) = half(m - n2);
                (c.neg(), s.neg())
            }
        })
        .collect()
}

/// Builds the twiddle table without consulting the cache.
pub fn build_twiddles_uncached<F: Format>(n: usize, fmt: &F) -> Result<TwiddleTable<F::Scalar>>
where
    F::Scalar: Send + Sync + 'static,
{
    let log2 = log2_size(n)?;
    let roots = unit_roots(n, fmt.twiddle_precision());
    // e^{-2 pi i m / n} rounded to the format.
    let mut rounded: HashMap<usize, (Complex<F::Scalar>, Complex<F::Scalar>)> = HashMap::new();
    let mut root = |m: usize| {
        rounded
            .entry(m)
            .or_insert_with(|| {
                let (c, s) = &roots[m];
                let re = fmt.from_real(c);
                let fwd = Complex { re: re.clone(), im: fmt.from_real(&s.clone().neg()) };
                let inv = Complex { re, im: fmt.from_real(s) };
                (fwd, inv)
            })
            .clone()
    };
    let mut forward = Vec::new();
    let mut inverse = Vec::new();
    let mut len = n;
    for _ in 0..log2 / 2 {
        let stride = n / len;
        let (mut f, mut i) = (Vec::with_capacity(len / 4), Vec::with_capacity(len / 4));
        for p in 0..len / 4 {
            let [a, b, c] = [1, 2, 3].map(|j| root(j * p * stride));
            f.push([a.0, b.0, c.0]);
            i.push([a.1, b.1, c.1]);
        }
        forward.push(f);
        inverse.push(i);
        len /= 4;
    }
    Ok(TwiddleTable { n, format_key: fmt.cache_key(), forward, inverse })
}

type CacheMap = HashMap<(String, usize), Arc<dyn Any + Send + Sync>>;

fn cache() -> &'static Mutex<CacheMap> {
    static CACHE: OnceLock<Mutex<CacheMap>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Twiddle table for (`n`, format), built on first use and shared afterwards.
pub fn build_twiddles<F: Format>(n: usize, fmt: &F) -> Result<Arc<TwiddleTable<F::Scalar>>>
where
    F::Scalar: Send + Sync + 'static,
{
    let key = (fmt.cache_key(), n);
    if let Some(t) = cache().lock().unwrap().get(&key) {
        return Ok(t.clone().downcast::<TwiddleTable<F::Scalar>>().expect("cache entry type"));
    }
    // Built outside the lock; a concurrent builder produces the same table.
    let t = Arc::new(build_twiddles_uncached(n, fmt)?);
    let mut c = cache().lock().unwrap();
    let entry = c.entry(key).or_insert_with(|| t.clone() as Arc<dyn Any + Send + Sync>);
    Ok(entry.clone().downcast::<TwiddleTable<F::Scalar>>().expect("cache entry type"))
}

fn check_table<F: Format>(fmt: &F, n: usize, t: &TwiddleTable<F::Scalar>) -> Result<()>
where
    F::Scalar: Send + Sync + 'static,
{
    log2_size(n)?;
    if t.n != n || t.format_key != fmt.cache_key() {
        return Err(Error::TwiddleMismatch { table: format!("{}/{}", t.format_key, t.n), input: format!("{}/{}", fmt.cache_key(), n) });
    }
    Ok(())
}

fn stockham<F: Format>(fmt: &F, x: &[Complex<F::Scalar>], tw: &[Vec<[Complex<F::Scalar>; 3]>], inverse: bool) -> ComplexVec<F::Scalar>
where
    F::Scalar: Send + Sync + 'static,
{
    let n = x.len();
    let mut src: ComplexVec<F::Scalar> = x.to_vec();
    let mut dst: ComplexVec<F::Scalar> = x.to_vec();
    let mut len = n;
    let mut s = 1;
    for stage in tw {
        let n1 = len / 4;
        for (p, w) in stage.iter().enumerate() {
            let w = [&w[0], &w[1], &w[2]];
            for q in 0..s {
                let a = &src[q + s * p];
                let b = &src[q + s * (p + n1)];
                let c = &src[q + s * (p + 2 * n1)];
                let d = &src[q + s * (p + 3 * n1)];
                let [y0, y1, y2, y3] = butterfly4(fmt, [a, b, c, d], w, inverse);
                let base = q + s * 4 * p;
                dst[base] = y0;
                dst[base + s] = y1;
                dst[base + 2 * s] = y2;
                dst[base + 3 * s] = y3;
            }
        }
        std::mem::swap(&mut src, &mut dst);
        len /= 4;
        s *= 4;
    }
    if len == 2 {
        for q in 0..s {
            let [y0, y1] = butterfly2(fmt, &src[q], &src[q + s]);
            dst[q] = y0;
            dst[q + s] = y1;
        }
        std::mem::swap(&mut src, &mut dst);
    }
    src
}

/// `X[k] = sum_n x[n] e^{-2 pi i nk/N}`.
pub fn fft_forward<F: Format>(fmt: &F, x: &[Complex<F::Scalar>], t: &TwiddleTable<F::Scalar>) -> Result<ComplexVec<F::Scalar>>
where
    F::Scalar: Send + Sync + 'static,
{
    check_table(fmt, x.len(), t)?;
    Ok(stockham(fmt, x, &t.forward, false))
}

/// `x[n] = (1/N) sum_k X[k] e^{2 pi i nk/N}`; the 1/N factor is rounded to
/// the format and applied with one multiply per component.
pub fn fft_inverse<F: Format>(fmt: &F, x: &[Complex<F::Scalar>], t: &TwiddleTable<F::Scalar>) -> Result<ComplexVec<F::Scalar>>
where
    F::Scalar: Send + Sync + 'static,
{
    check_table(fmt, x.len(), t)?;
    let mut y = stockham(fmt, x, &t.inverse, true);
    let scale = fmt.from_real(&BigFloat::one().ldexp(-(x.len().trailing_zeros() as i64)));
    for c in &mut y {
        c.re = fmt.mul(&c.re, &scale);
        c.im = fmt.mul(&c.im, &scale);
    }
    Ok(y)
}

/// Forward transform using the cached twiddle table.
pub fn forward<F: Format>(fmt: &F, x: &[Complex<F::Scalar>]) -> Result<ComplexVec<F::Scalar>>
where
    F::Scalar: Send + Sync + 'static,
{
    let t = build_twiddles(x.len(), fmt)?;
    fft_forward(fmt, x, &t)
}

/// Inverse transform using the cached twiddle table.
pub fn inverse<F: Format>(fmt: &F, x: &[Complex<F::Scalar>]) -> Result<ComplexVec<F::Scalar>>
where
    F::Scalar: Send + Sync + 'static,
{
    let t = build_twiddles(x.len(), fmt)?;
    fft_inverse(fmt, x, &t)
}

/// Rounds real pairs into the format.
pub fn from_reals<F: Format>(fmt: &F, re: &[BigFloat], im: &[BigFloat]) -> ComplexVec<F::Scalar>
where
    F::Scalar: Send + Sync + 'static,
{
    re.iter().zip(im).map(|(r, i)| Complex { re: fmt.from_real(r), im: fmt.from_real(i) }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real_vec<F: Format>(fmt: &F, v: &[f64]) -> ComplexVec<F::Scalar>
    where
        F::Scalar: Send + Sync + 'static,
    {
        v.iter().map(|&r| Complex { re: fmt.from_real(&BigFloat::from_f64(r)), im: fmt.zero() }).collect()
    }

    #[test]
    fn impulse_gives_flat_spectrum() {
        let x = real_vec(&Posit32, &[1.0, 0.0, 0.0, 0.0]);
        let y = forward(&Posit32, &x).unwrap();
        for c in &y {
            assert_eq!((c.re, c.im), (PositBits::ONE, PositBits::ZERO));
        }
        let back = inverse(&Posit32, &y).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn flat_spectrum_inverts_to_impulse() {
        let x = real_vec(&Float32, &[1.0; 4]);
        let y = inverse(&Float32, &x).unwrap();
        assert_eq!(y, real_vec(&Float32, &[1.0, 0.0, 0.0, 0.0]));
    }

    #[test]
    fn size_four_twiddles_are_exact() {
        let t = build_twiddles(4, &Float32).unwrap();
        assert_eq!(t.forward.len(), 1);
        let one = Complex { re: FloatBits::ONE, im: FloatBits::ZERO };
        assert_eq!(t.forward[0][0], [one, one, one]);
        let t = build_twiddles_uncached(16, &Posit32).unwrap();
        // p = 2 at the first stage: w^2p = e^{-2 pi i 4/16} = -i
        let w2 = &t.forward[0][2][1];
        assert_eq!((w2.re, w2.im), (PositBits::ZERO, PositBits::ONE.negate()));
    }

    #[test]
    fn eighth_root_matches_direct_rounding() {
        let t = build_twiddles_uncached(32, &Posit32).unwrap();
        // stage 0, p = 4: w^p = e^{-2 pi i 4/32} = e^{-i pi/4}
        let w = &t.forward[0][4][0];
        let c = refprec::cos(&refprec::pi(200).ldexp(-2), 128);
        assert_eq!(w.re, posit::posit_from_real(&c));
        assert_eq!(w.im, posit::posit_from_real(&c.neg()));
    }

    #[test]
    fn unsupported_sizes_and_mismatched_tables() {
        assert!(matches!(forward(&Posit32, &real_vec(&Posit32, &[1.0; 12])), Err(Error::UnsupportedLength(12))));
        let t = build_twiddles(8, &Posit32).unwrap();
        let x = real_vec(&Posit32, &[1.0; 16]);
        assert!(matches!(fft_forward(&Posit32, &x, &t), Err(Error::TwiddleMismatch { .. })));
    }

    #[test]
    fn odd_power_sizes_round_trip() {
        let f = BigFloatFormat::new(200);
        for n in [2usize, 8, 32] {
            let v: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
            let x = real_vec(&f, &v);
            let back = inverse(&f, &forward(&f, &x).unwrap()).unwrap();
            for (a, b) in x.iter().zip(&back) {
                let e = a.re.sub(&b.re, 400).abs();
                assert!(e.is_zero() || e.msb_exp() < -180, "n={n}");
            }
        }
    }
}

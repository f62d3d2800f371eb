//! Reference implementations used to check the integer kernels. Nothing in
//! here shares code with the kernels they check.

use std::cmp::Ordering;

use crate::posit::PositBits;
use crate::refprec::{self, BigFloat};
use crate::softfloat::FloatBits;

/// Value of an `n`-bit posit with two exponent bits, read field by field from
/// the bit string. `None` for NaR.
pub fn posit_value_nbits(bits: u64, n: u32) -> Option<BigFloat> {
    assert!((3..=64).contains(&n));
    let width_mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let bits = bits & width_mask;
    let sign_bit = 1u64 << (n - 1);
    if bits == 0 {
        return Some(BigFloat::zero());
    }
    if bits == sign_bit {
        return None;
    }
    let neg = bits & sign_bit != 0;
    let mag = if neg { bits.wrapping_neg() & width_mask } else { bits };
    let bit = |i: i32| (mag >> i) & 1;

    let mut i = n as i32 - 2;
    let first = bit(i);
    let mut run = 0i64;
    while i >= 0 && bit(i) == first {
        run += 1;
        i -= 1;
    }
    // Skip the terminating bit of the regime if there is one.
    i -= 1;
    let regime = if first == 1 { run - 1 } else { -run };

    let mut e = 0i64;
    for _ in 0..2 {
        e <<= 1;
        if i >= 0 {
            e |= bit(i) as i64;
            i -= 1;
        }
    }
    let fbits = (i + 1).max(0) as u32;
    let frac = if fbits == 0 { 0 } else { mag & ((1u64 << fbits) - 1) };
    // At most n - 5 fraction bits, so the significand fits a u64.
    let sig = BigFloat::from_u64((1u64 << fbits) | frac);
    let v = sig.ldexp(4 * regime + e - fbits as i64);
    Some(if neg { v.neg() } else { v })
}

/// Value of a posit32 pattern via [`posit_value_nbits`].
pub fn posit_value(p: PositBits) -> Option<BigFloat> {
    posit_value_nbits(p.0 as u64, 32)
}

/// Largest positive posit32 pattern whose value does not exceed `mag` (> 0),
/// or 0 when `mag` is below minPos.
fn floor_pattern(mag: &BigFloat) -> u32 {
    let (mut lo, mut hi) = (0u32, 0x7FFF_FFFFu32);
    let value = |p: u32| posit_value(PositBits(p)).expect("positive pattern");
    if value(hi) <= *mag {
        return hi;
    }
    // Invariant: value(lo) <= mag < value(hi), with value(0) = 0.
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if value(mid) <= *mag {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Rounds a real to posit32 by neighbour search: find the bracketing patterns,
/// compare against the rounding boundary, break ties toward the even pattern,
/// and saturate at minPos/maxPos.
///
/// The boundary between neighbours `p` and `p + 1` is the value of the 33-bit
/// posit `2p + 1`. Where the bracketing posits have at least one exponent bit
/// in their encoding, this is the arithmetic midpoint; where exponent bits are
/// cut off by a long regime, it is the boundary of bit-string rounding.
pub fn round_to_posit(v: &BigFloat) -> PositBits {
    if v.is_zero() {
        return PositBits::ZERO;
    }
    let mag = v.clone().abs();
    let lo = floor_pattern(&mag);
    let pick = if lo == 0 {
        1
    } else if lo == 0x7FFF_FFFF {
        lo
    } else {
        let lo_v = posit_value(PositBits(lo)).unwrap();
        if lo_v == mag {
            lo
        } else {
            let boundary = posit_value_nbits(((lo as u64) << 1) | 1, 33).unwrap();
            match mag.cmp(&boundary) {
                Ordering::Less => lo,
                Ordering::Greater => lo + 1,
                Ordering::Equal => {
                    if lo & 1 == 0 {
                        lo
                    } else {
                        lo + 1
                    }
                }
            }
        }
    };
    if v.is_neg() {
        PositBits(pick.wrapping_neg())
    } else {
        PositBits(pick)
    }
}

/// Rounds a real to the nearest posit32 by value (ties to the even pattern),
/// without regard to bit-string structure. Agrees with [`round_to_posit`]
/// wherever the neighbouring posits keep both exponent bits.
pub fn nearest_posit_by_value(v: &BigFloat) -> PositBits {
    if v.is_zero() {
        return PositBits::ZERO;
    }
    let mag = v.clone().abs();
    let lo = floor_pattern(&mag);
    let pick = if lo == 0 {
        1
    } else if lo == 0x7FFF_FFFF {
        lo
    } else {
        let a = posit_value(PositBits(lo)).unwrap();
        let b = posit_value(PositBits(lo + 1)).unwrap();
        let da = mag.sub(&a, 1024);
        let db = b.sub(&mag, 1024);
        match da.cmp(&db) {
            Ordering::Less => lo,
            Ordering::Greater => lo + 1,
            Ordering::Equal => lo + (lo & 1),
        }
    };
    if v.is_neg() {
        PositBits(pick.wrapping_neg())
    } else {
        PositBits(pick)
    }
}

/// Exact sum and product references for posit32 operands.
pub fn posit_add_ref(a: PositBits, b: PositBits) -> PositBits {
    posit_binop_ref(a, b, |x, y| x.add(y, refprec::EXACT_POSIT_PREC))
}

pub fn posit_sub_ref(a: PositBits, b: PositBits) -> PositBits {
    posit_binop_ref(a, b, |x, y| x.sub(y, refprec::EXACT_POSIT_PREC))
}

pub fn posit_mul_ref(a: PositBits, b: PositBits) -> PositBits {
    posit_binop_ref(a, b, |x, y| x.mul(y, 128))
}

fn posit_binop_ref(a: PositBits, b: PositBits, f: impl Fn(&BigFloat, &BigFloat) -> BigFloat) -> PositBits {
    match (posit_value(a), posit_value(b)) {
        (Some(x), Some(y)) => round_to_posit(&f(&x, &y)),
        _ => PositBits::NAR,
    }
}

/// Rounds a real to binary32 with an unbounded exponent, then flushes results
/// below the smallest normal to +0 and saturates overflow at the largest
/// normal. Works on the value of each candidate, not on bit fields.
pub fn round_to_f32(v: &BigFloat) -> FloatBits {
    if v.is_zero() {
        return FloatBits::ZERO;
    }
    let mag = v.clone().abs();
    // Scale into [2^23, 2^24) and round to an integer.
    let e = mag.msb_exp();
    let scaled = mag.ldexp(23 - e);
    let (q, r) = split_integer(&scaled);
    let half = BigFloat::one().ldexp(-1);
    let q = match r.cmp(&half) {
        Ordering::Less => q,
        Ordering::Greater => q + 1,
        Ordering::Equal => q + (q & 1),
    };
    let (q, e) = if q == 1 << 24 { (1u64 << 23, e + 1) } else { (q, e) };
    let bits = if e < -126 {
        0
    } else if e > 127 {
        0x7F7F_FFFF
    } else {
        (((e + 127) as u32) << 23) | (q as u32 & 0x7F_FFFF)
    };
    if bits != 0 && v.is_neg() {
        FloatBits(bits | 0x8000_0000)
    } else {
        FloatBits(bits)
    }
}

/// Integer part (as u64) and fractional part of a nonnegative value below 2^64.
fn split_integer(x: &BigFloat) -> (u64, BigFloat) {
    if x.is_zero() || x.msb_exp() < 0 {
        return (0, x.clone());
    }
    let (m, e) = x.to_biguint_parts();
    if e >= 0 {
        let q: u64 = (m << e as usize).try_into().expect("fits in u64");
        return (q, BigFloat::zero());
    }
    let sh = (-e) as usize;
    let q = &m >> sh;
    let r = m - (&q << sh);
    let qf: u64 = q.try_into().expect("fits in u64");
    (qf, BigFloat::from_biguint(false, &r, e))
}

/// Direct O(N^2) DFT `X[k] = sum_n x[n] e^{-2 pi i nk/N}` (or the unscaled
/// inverse when `inverse`), every product and sum at `prec` bits.
pub fn dft(re: &[BigFloat], im: &[BigFloat], inverse: bool, prec: u32) -> (Vec<BigFloat>, Vec<BigFloat>) {
    let n = re.len();
    assert_eq!(n, im.len());
    let wp = prec + 32;
    let two_pi = refprec::pi(wp + 32).ldexp(1);
    // w[j] = e^{-2 pi i j/N}, each computed directly from its own angle.
    let w: Vec<(BigFloat, BigFloat)> = (0..n)
        .map(|j| {
            let theta = two_pi.mul(&BigFloat::from_u64(j as u64), wp + 32).div_u64(n as u64, wp + 32);
            let (s, c) = refprec::sin_cos(&theta, wp);
            (c, if inverse { s } else { s.neg() })
        })
        .collect();
    let mut out_re = Vec::with_capacity(n);
    let mut out_im = Vec::with_capacity(n);
    for kk in 0..n {
        let mut sr = BigFloat::zero();
        let mut si = BigFloat::zero();
        for j in 0..n {
            let (c, s) = &w[(j * kk) % n];
            let pr = re[j].mul(c, wp).sub(&im[j].mul(s, wp), wp);
            let pi = re[j].mul(s, wp).add(&im[j].mul(c, wp), wp);
            sr = sr.add(&pr, wp);
            si = si.add(&pi, wp);
        }
        out_re.push(sr.round(prec));
        out_im.push(si.round(prec));
    }
    (out_re, out_im)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_posit_values() {
        assert_eq!(posit_value(PositBits(0x4000_0000)).unwrap(), BigFloat::one());
        assert_eq!(posit_value(PositBits(0x7FFF_FFFF)).unwrap(), BigFloat::one().ldexp(120));
        assert_eq!(posit_value(PositBits(1)).unwrap(), BigFloat::one().ldexp(-120));
        assert_eq!(posit_value(PositBits(0xC000_0000)).unwrap(), BigFloat::one().neg());
        assert!(posit_value(PositBits::NAR).is_none());
        // 0 1 0 01 1... : regime k=-1, e=1, fraction .1 => 1.5 * 2^-3
        let p = PositBits(0b0_01_01_1 << 26);
        assert_eq!(posit_value(p).unwrap(), BigFloat::from_f64(1.5 / 8.0));
    }

    #[test]
    fn rounding_matches_value_nearest_in_the_wide_range() {
        for v in [1.0, 1.0 + 2f64.powi(-28), 3.3, -1e-5, 7e20, 123.456] {
            let x = BigFloat::from_f64(v);
            assert_eq!(round_to_posit(&x), nearest_posit_by_value(&x), "{v}");
        }
    }

    #[test]
    fn rounding_saturates() {
        assert_eq!(round_to_posit(&BigFloat::one().ldexp(500)), PositBits::MAX_POS);
        assert_eq!(round_to_posit(&BigFloat::one().ldexp(-500).neg()), PositBits(u32::MAX));
    }

    #[test]
    fn f32_rounding_agrees_with_hardware() {
        for v in [0.1f64, 1.0 / 3.0, -2.5e-30, 3.0e38, 1.0 + 2f64.powi(-24)] {
            assert_eq!(round_to_f32(&BigFloat::from_f64(v)).to_f32(), v as f32, "{v}");
        }
        assert_eq!(round_to_f32(&BigFloat::from_f64(1e-40)), FloatBits::ZERO);
        assert_eq!(round_to_f32(&BigFloat::from_f64(1e39)), FloatBits::MAX_NORMAL);
    }

    #[test]
    fn dft_of_impulse_is_flat() {
        let mut re = vec![BigFloat::zero(); 4];
        re[0] = BigFloat::one();
        let im = vec![BigFloat::zero(); 4];
        let (xr, xi) = dft(&re, &im, false, 128);
        for j in 0..4 {
            assert_eq!(xr[j], BigFloat::one());
            assert!(xi[j].is_zero());
        }
    }
}

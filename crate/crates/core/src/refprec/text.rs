//! Decimal and hexadecimal-float text forms.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::BigFloat;
use crate::error::{Error, Result};

/// Parses `[-+]digits[.digits][e[-+]digits]` or a hex float
/// `[-+]0xH[.H][p[-+]digits]`, rounding to `prec` bits.
pub fn parse(text: &str, prec: u32) -> Result<BigFloat> {
    let err = || Error::Parse(text.to_string());
    let t = text.trim();
    let (neg, t) = match t.as_bytes().first() {
        Some(b'-') => (true, &t[1..]),
        Some(b'+') => (false, &t[1..]),
        _ => (false, t),
    };
    if t.is_empty() {
        return Err(err());
    }
    if let Some(h) = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        let (mant, exp) = match h.find(['p', 'P']) {
            Some(i) => (&h[..i], h[i + 1..].parse::<i64>().map_err(|_| err())?),
            None => (h, 0),
        };
        let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
        let digits = format!("{int}{frac}");
        if digits.is_empty() {
            return Err(err());
        }
        let m = BigUint::parse_bytes(digits.as_bytes(), 16).ok_or_else(err)?;
        let x = BigFloat::round_biguint(neg, &m, exp - 4 * frac.len() as i64, false, prec);
        return Ok(x);
    }
    let (mant, exp10) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i64>().map_err(|_| err())?),
        None => (t, 0),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    let digits = format!("{int}{frac}");
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err());
    }
    let m = BigUint::parse_bytes(digits.as_bytes(), 10).ok_or_else(err)?;
    let e10 = exp10 - frac.len() as i64;
    if e10 >= 0 {
        let m = m * BigUint::from(10u32).pow(e10 as u32);
        return Ok(BigFloat::round_biguint(neg, &m, 0, false, prec));
    }
    if m.is_zero() {
        return Ok(BigFloat::zero());
    }
    // m / 10^k with enough quotient bits for correct rounding.
    let den = BigUint::from(10u32).pow((-e10) as u32);
    let shift = (prec as i64 + 2 + den.bits() as i64 - m.bits() as i64).max(0) as usize;
    let (q, r) = (m << shift).div_rem(&den);
    Ok(BigFloat::round_biguint(neg, &q, -(shift as i64), !r.is_zero(), prec))
}

impl BigFloat {
    /// Exact hexadecimal form, e.g. `0x1.8p-3`, `-0x1p+0`, `0x0p+0`.
    pub fn to_hex_string(&self) -> String {
        if self.is_zero() {
            return "0x0p+0".to_string();
        }
        let (m, e) = self.to_biguint_parts();
        let tz = m.trailing_zeros().unwrap_or(0);
        let m = m >> tz as usize;
        let e = e + tz as i64;
        let nbits = m.bits();
        // Value = 1.f * 2^(e + nbits - 1); f has nbits - 1 bits, pad to nibbles.
        let fbits = nbits - 1;
        let pad = (4 - fbits % 4) % 4;
        let f = (&m - (BigUint::one() << fbits as usize)) << pad as usize;
        let sign = if self.is_neg() { "-" } else { "" };
        let exp = e + nbits as i64 - 1;
        if fbits == 0 {
            format!("{sign}0x1p{exp:+}")
        } else {
            let width = ((fbits + pad) / 4) as usize;
            format!("{sign}0x1.{:0>width$}p{exp:+}", f.to_str_radix(16))
        }
    }

    /// Scientific decimal form with `digits` significant digits, rounded to
    /// nearest (ties to even).
    pub fn to_decimal_string(&self, digits: usize) -> String {
        let digits = digits.max(1);
        if self.is_zero() {
            return format!("0.{}e+0", "0".repeat(digits - 1)).replace(".e", "e");
        }
        let (m, e) = self.to_biguint_parts();
        let mut e10 = ((self.msb_exp() as f64) * std::f64::consts::LOG10_2).floor() as i64;
        let lo = BigUint::from(10u32).pow(digits as u32 - 1);
        let hi = &lo * 10u32;
        let d = loop {
            let s = digits as i64 - 1 - e10;
            let mut num = m.clone();
            let mut den = BigUint::one();
            if e >= 0 {
                num <<= e as usize;
            } else {
                den <<= (-e) as usize;
            }
            if s >= 0 {
                num *= BigUint::from(10u32).pow(s as u32);
            } else {
                den *= BigUint::from(10u32).pow((-s) as u32);
            }
            let (q, r) = num.div_rem(&den);
            let twice = r << 1usize;
            let q = if twice > den || (twice == den && q.is_odd()) { q + 1u32 } else { q };
            if q >= hi {
                e10 += 1;
            } else if q < lo {
                e10 -= 1;
            } else {
                break q;
            }
        };
        let s = d.to_str_radix(10);
        let sign = if self.is_neg() { "-" } else { "" };
        if digits == 1 {
            format!("{sign}{s}e{e10:+}")
        } else {
            format!("{sign}{}.{}e{e10:+}", &s[..1], &s[1..])
        }
    }
}

//! IEEE-754 binary32 add, sub and mul for normal numbers, built from the same
//! integer primitives as the posit kernels.
//!
//! Results that would be subnormal flush to +0 and overflows saturate to the
//! largest normal magnitude, so no Inf, NaN or subnormal is ever produced.
//! Zero operands (either sign) are accepted; a zero result is always +0.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use crate::error::Error;
use crate::posit::{DecodedNumber, State};
use crate::refprec::BigFloat;
use crate::word::{k, Bits, Word};

/// A binary32 bit pattern.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct FloatBits(pub u32);

impl FloatBits {
    pub const ZERO: FloatBits = FloatBits(0);
    pub const ONE: FloatBits = FloatBits(0x3F80_0000);
    pub const MAX_NORMAL: FloatBits = FloatBits(0x7F7F_FFFF);
    pub const MIN_NORMAL: FloatBits = FloatBits(0x0080_0000);

    pub const fn from_bits(bits: u32) -> Self {
        FloatBits(bits)
    }

    pub const fn to_bits(self) -> u32 {
        self.0
    }

    pub const fn exponent_field(self) -> u32 {
        (self.0 >> 23) & 0xFF
    }

    pub const fn is_zero(self) -> bool {
        self.exponent_field() == 0
    }

    pub const fn is_normal(self) -> bool {
        let e = self.exponent_field();
        e != 0 && e != 255
    }

    /// Reinterprets the bits as a native `f32`.
    pub fn to_f32(self) -> f32 {
        f32::from_bits(self.0)
    }

    /// Nearest representable value under the flush/saturate rules.
    pub fn from_f64(v: f64) -> Self {
        sf32_from_real(&BigFloat::from_f64(v))
    }

    pub fn to_f64(self) -> f64 {
        sf32_to_real(self).to_f64()
    }

    pub fn to_real(self) -> BigFloat {
        sf32_to_real(self)
    }

    pub fn from_real(v: &BigFloat) -> Self {
        sf32_from_real(v)
    }

    /// Sign, unbiased exponent and left-aligned fraction.
    pub fn decode(self) -> DecodedNumber {
        if self.is_zero() {
            return DecodedNumber { sign: 0, sf: 0, fraction: 0, state: State::Zero };
        }
        DecodedNumber {
            sign: (self.0 >> 31) as u8,
            sf: self.exponent_field() as i32 - 127,
            fraction: self.0 << 9,
            state: State::Normal,
        }
    }
}

impl fmt::Debug for FloatBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FloatBits({:08x})", self.0)
    }
}

impl fmt::Display for FloatBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:08x}", self.0)
    }
}

impl fmt::LowerHex for FloatBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::LowerHex::fmt(&self.0, f)
    }
}

impl FromStr for FloatBits {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        let h = s.trim().trim_start_matches("0x");
        u32::from_str_radix(h, 16).map(FloatBits).map_err(|_| Error::Parse(s.to_string()))
    }
}

impl Add for FloatBits {
    type Output = FloatBits;
    fn add(self, o: Self) -> Self {
        sf32_add(self, o)
    }
}

impl Sub for FloatBits {
    type Output = FloatBits;
    fn sub(self, o: Self) -> Self {
        sf32_sub(self, o)
    }
}

impl Mul for FloatBits {
    type Output = FloatBits;
    fn mul(self, o: Self) -> Self {
        sf32_mul(self, o)
    }
}

impl Neg for FloatBits {
    type Output = FloatBits;
    fn neg(self) -> Self {
        if self.is_zero() {
            FloatBits::ZERO
        } else {
            FloatBits(self.0 ^ 0x8000_0000)
        }
    }
}

pub fn sf32_add(a: FloatBits, b: FloatBits) -> FloatBits {
    FloatBits(kernel::add(Bits(a.0), Bits(b.0), false).0)
}

pub fn sf32_sub(a: FloatBits, b: FloatBits) -> FloatBits {
    FloatBits(kernel::sub(Bits(a.0), Bits(b.0), false).0)
}

pub fn sf32_mul(a: FloatBits, b: FloatBits) -> FloatBits {
    FloatBits(kernel::mul(Bits(a.0), Bits(b.0), false).0)
}

/// Exact value of a zero or normal pattern.
pub fn sf32_to_real(x: FloatBits) -> BigFloat {
    if x.is_zero() {
        return BigFloat::zero();
    }
    let mant = (x.0 & 0x7F_FFFF) | 0x80_0000;
    BigFloat::from_parts(x.0 >> 31 == 1, mant as u64, x.exponent_field() as i64 - 150)
}

/// Nearest binary32 value, ties to even, with flush and saturation.
pub fn sf32_from_real(v: &BigFloat) -> FloatBits {
    if v.is_zero() {
        return FloatBits::ZERO;
    }
    let (top, rest) = v.top64();
    let e = (v.msb_exp().clamp(-1000, 1000) + 127) as i32;
    let sticky = Bits((top as u32 != 0 || rest) as u32);
    let m = Bits((top >> 32) as u32);
    FloatBits(kernel::round_pack(Bits(v.is_neg() as u32), Bits(e as u32), m, sticky, false).0)
}

/// Generic kernels over [`Word`]. `fastmath` drops flush and saturation.
pub mod kernel {
    use super::*;

    /// `m` has its leading one at bit 31 and represents
    /// `m / 2^31 * 2^(e - 127)`; `sticky` is 1 when nonzero bits lie below.
    pub fn round_pack<W: Word>(sign: W, e: W, m: W, sticky: W, fastmath: bool) -> W {
        let mant = m >> k(8);
        let round = (m >> k(7)) & k(1);
        let below = (m & k(0x7F)).ne(k(0)) | sticky;
        let inc = round & (below | (mant & k(1)));
        // The implicit bit carries into the exponent field, as does a
        // rounding overflow of the mantissa.
        let body = ((e - k(1)) << k(23)) + mant + inc;
        let packed = (sign << k(31)) | body;
        if fastmath {
            return packed;
        }
        let exp = e + ((mant + inc) >> k(24));
        W::cond(
            exp.slt(k(1)),
            || k(0),
            || W::cond(k::<W>(254).slt(exp), || (sign << k(31)) | k(0x7F7F_FFFF), || packed),
        )
    }

    pub fn add<W: Word>(a: W, b: W, fastmath: bool) -> W {
        let swap = (a & k(0x7FFF_FFFF)).ult(b & k(0x7FFF_FFFF));
        let (x, y) = W::cond(swap, || (b, a), || (a, b));
        let ex = (x >> k(23)) & k(0xFF);
        let ey = (y >> k(23)) & k(0xFF);
        W::cond(
            ex.eq(k(0)),
            || k(0),
            || {
                W::cond(
                    ey.eq(k(0)),
                    || x,
                    || {
                        // Implicit bit at bit 30 leaves room for the carry.
                        let mx = ((x & k(0x7F_FFFF)) | k(0x80_0000)) << k(7);
                        let my = ((y & k(0x7F_FFFF)) | k(0x80_0000)) << k(7);
                        let shift = ex - ey;
                        let mask = (k::<W>(1) << shift) - k(1);
                        let sticky = (my & mask).ne(k(0));
                        let my = (my >> shift) | sticky;
                        let (e, m, zero) = W::cond(
                            (x ^ y) >> k(31),
                            || {
                                let diff = mx - my;
                                let z = diff.clz();
                                (ex + k(1) - z, diff << z, diff.eq(k(0)))
                            },
                            || {
                                let sum = mx + my;
                                let (e, m) = W::cond(sum >> k(31), || (ex + k(1), sum), || (ex, sum << k(1)));
                                (e, m, k(0))
                            },
                        );
                        W::cond(zero, || k(0), || round_pack(x >> k(31), e, m, k(0), fastmath))
                    },
                )
            },
        )
    }

    pub fn sub<W: Word>(a: W, b: W, fastmath: bool) -> W {
        add(a, b ^ k(0x8000_0000), fastmath)
    }

    pub fn mul<W: Word>(a: W, b: W, fastmath: bool) -> W {
        let ea = (a >> k(23)) & k(0xFF);
        let eb = (b >> k(23)) & k(0xFF);
        W::cond(
            ea.eq(k(0)) | eb.eq(k(0)),
            || k(0),
            || {
                let ma = ((a & k(0x7F_FFFF)) | k(0x80_0000)) << k(8);
                let mb = ((b & k(0x7F_FFFF)) | k(0x80_0000)) << k(8);
                let hi = ma.mulhi(mb);
                let lo = ma.mul(mb);
                let e = ea + eb - k(127);
                // Product in [1, 4).
                let (e, m, sticky) = W::cond(
                    hi >> k(31),
                    || (e + k(1), hi, lo.ne(k(0))),
                    || (e, (hi << k(1)) | (lo >> k(31)), (lo << k(1)).ne(k(0))),
                );
                round_pack((a ^ b) >> k(31), e, m, sticky, fastmath)
            },
        )
    }
}

//! posit32 (two exponent bits) arithmetic on 32-bit integer words.
//!
//! The kernels follow the decode / align / add / encode structure: decoding
//! counts the regime run with a single count-leading-zeros, addition aligns
//! the significands by the scaling-factor difference, and encoding rebuilds
//! the regime, exponent and fraction fields and rounds to nearest, ties to
//! even, on the last retained bit. Encoding saturates: no nonzero real rounds
//! to 0 or NaR.
//!
//! Deviations from a literal reading of the textbook pseudocode: effective
//! subtraction (opposite signs) is handled with magnitude ordering and
//! leading-zero renormalization, the result takes the sign of the larger
//! operand, and alignment shifts keep a sticky bit.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use crate::error::Error;
use crate::refprec::BigFloat;
use crate::word::{k, Bits, Word};

/// Largest and smallest scaling factors: maxPos = 2^120, minPos = 2^-120.
pub const MAX_SF: i32 = 120;
pub const MIN_SF: i32 = -120;

const NAR: u32 = 0x8000_0000;

/// A posit32 bit pattern.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct PositBits(pub u32);

/// Decoding state of a posit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(i8)]
pub enum State {
    NaR = -1,
    Zero = 0,
    Normal = 1,
}

/// Unpacked posit: value = (-1)^sign * (1 + fraction / 2^32) * 2^sf.
///
/// `fraction` is left-aligned with the implicit bit not stored. For `Zero` and
/// `NaR`, `sf` and `fraction` are 0; `sign` is 1 for NaR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DecodedNumber {
    pub sign: u8,
    pub sf: i32,
    pub fraction: u32,
    pub state: State,
}

impl PositBits {
    pub const ZERO: PositBits = PositBits(0);
    pub const NAR: PositBits = PositBits(NAR);
    pub const ONE: PositBits = PositBits(0x4000_0000);
    pub const MAX_POS: PositBits = PositBits(0x7FFF_FFFF);
    pub const MIN_POS: PositBits = PositBits(0x0000_0001);

    pub const fn from_bits(bits: u32) -> Self {
        PositBits(bits)
    }

    pub const fn to_bits(self) -> u32 {
        self.0
    }

    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub const fn is_nar(self) -> bool {
        self.0 == NAR
    }

    /// Two's complement negation; fixes 0 and NaR.
    pub const fn negate(self) -> Self {
        PositBits(self.0.wrapping_neg())
    }

    pub fn decode(self) -> DecodedNumber {
        posit_decode(self)
    }

    pub fn to_real(self) -> BigFloat {
        posit_to_real(self)
    }

    pub fn from_real(v: &BigFloat) -> Self {
        posit_from_real(v)
    }

    /// Nearest posit to a finite `f64`.
    pub fn from_f64(v: f64) -> Self {
        posit_from_real(&BigFloat::from_f64(v))
    }

    /// Nearest `f64`; NaR maps to NaN.
    pub fn to_f64(self) -> f64 {
        if self.is_nar() {
            f64::NAN
        } else {
            posit_to_real(self).to_f64()
        }
    }
}

impl fmt::Debug for PositBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PositBits({:08x})", self.0)
    }
}

/// Eight lowercase hex digits.
impl fmt::Display for PositBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:08x}", self.0)
    }
}

impl fmt::LowerHex for PositBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::LowerHex::fmt(&self.0, f)
    }
}

impl FromStr for PositBits {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        let h = s.trim().trim_start_matches("0x");
        u32::from_str_radix(h, 16).map(PositBits).map_err(|_| Error::Parse(s.to_string()))
    }
}

impl Add for PositBits {
    type Output = PositBits;
    fn add(self, o: Self) -> Self {
        posit_add(self, o)
    }
}

impl Sub for PositBits {
    type Output = PositBits;
    fn sub(self, o: Self) -> Self {
        posit_sub(self, o)
    }
}

impl Mul for PositBits {
    type Output = PositBits;
    fn mul(self, o: Self) -> Self {
        posit_mul(self, o)
    }
}

impl Neg for PositBits {
    type Output = PositBits;
    fn neg(self) -> Self {
        self.negate()
    }
}

pub fn posit_decode(p: PositBits) -> DecodedNumber {
    let d = kernel::decode(Bits(p.0), false);
    if d.zero.0 != 0 {
        DecodedNumber { sign: 0, sf: 0, fraction: 0, state: State::Zero }
    } else if d.nar.0 != 0 {
        DecodedNumber { sign: 1, sf: 0, fraction: 0, state: State::NaR }
    } else {
        DecodedNumber { sign: d.sign.0 as u8, sf: d.sf.0 as i32, fraction: d.frac.0, state: State::Normal }
    }
}

/// Packs a decoded number, rounding the fraction to the bits the regime
/// leaves available. The fraction's lowest bit does not fit beside the
/// implicit bit and folds into the sticky bit.
pub fn posit_encode(d: DecodedNumber) -> PositBits {
    match d.state {
        State::Zero => PositBits::ZERO,
        State::NaR => PositBits::NAR,
        State::Normal => {
            let sig = Bits(0x8000_0000 | (d.fraction >> 1));
            let sticky = Bits(d.fraction & 1);
            let sf = Bits(d.sf.clamp(-4096, 4096) as u32);
            PositBits(kernel::encode(Bits((d.sign & 1) as u32), sf, sig, sticky).0)
        }
    }
}

pub fn posit_add(a: PositBits, b: PositBits) -> PositBits {
    PositBits(kernel::add(Bits(a.0), Bits(b.0), false).0)
}

pub fn posit_sub(a: PositBits, b: PositBits) -> PositBits {
    PositBits(kernel::sub(Bits(a.0), Bits(b.0), false).0)
}

pub fn posit_mul(a: PositBits, b: PositBits) -> PositBits {
    PositBits(kernel::mul(Bits(a.0), Bits(b.0), false).0)
}

/// Exact value. NaR has no real value and panics.
pub fn posit_to_real(p: PositBits) -> BigFloat {
    let d = posit_decode(p);
    match d.state {
        State::Zero => BigFloat::zero(),
        State::NaR => panic!("NaR has no real value"),
        State::Normal => {
            let mant = (1u64 << 32) | d.fraction as u64;
            BigFloat::from_parts(d.sign == 1, mant, d.sf as i64 - 32)
        }
    }
}

/// Nearest posit (ties to even on the last retained bit), saturating at
/// maxPos/minPos.
pub fn posit_from_real(v: &BigFloat) -> PositBits {
    if v.is_zero() {
        return PositBits::ZERO;
    }
    let (top, rest) = v.top64();
    let sf = v.msb_exp().clamp(-4096, 4096) as i32;
    let sig = Bits((top >> 32) as u32);
    let sticky = Bits((top as u32 != 0 || rest) as u32);
    PositBits(kernel::encode(Bits(v.is_neg() as u32), Bits(sf as u32), sig, sticky).0)
}

/// Generic kernels over [`Word`]. `fastmath` drops NaR handling.
pub mod kernel {
    use super::*;

    pub struct Unpacked<W> {
        pub sign: W,
        pub sf: W,
        pub frac: W,
        pub zero: W,
        pub nar: W,
    }

    pub fn decode<W: Word>(p: W, fastmath: bool) -> Unpacked<W> {
        let zero = p.eq(k(0));
        let nar = if fastmath { k(0) } else { p.eq(k(NAR)) };
        let sign = p >> k(31);
        // Negative posits decode as their two's complement.
        let mag = W::cond(sign, || k::<W>(0) - p, || p);
        let r = (mag >> k(30)) & k(1);
        let temp = mag << k(1);
        // Count leading 1s or 0s.
        let (l, regime) = W::cond(
            r,
            || {
                let l = (!temp).clz();
                (l, l - k(1))
            },
            || {
                let l = temp.clz();
                (l, k::<W>(0) - l)
            },
        );
        let rest = temp << (l + k(1));
        let e = rest >> k(30);
        let frac = rest << k(2);
        let sf = (regime << k(2)) + e;
        Unpacked { sign, sf, frac, zero, nar }
    }

    /// `sig` carries the implicit bit at bit 31; `sticky` is 1 when nonzero
    /// bits lie below `sig`. `sf` is a two's complement scaling factor.
    pub fn encode<W: Word>(sign: W, sf: W, sig: W, sticky: W) -> W {
        let sf = sf.smax(k(MIN_SF as u32)).smin(k(MAX_SF as u32));
        let regime = sf.sar(k(2));
        let e = sf & k(3);
        // Regime bits left-aligned in a word, and their count including the
        // terminating bit.
        let (field, len) = W::cond(
            regime.slt(k(0)),
            || {
                let run = k::<W>(0) - regime;
                (k::<W>(0x8000_0000) >> run, run + k(1))
            },
            || (!(k::<W>(u32::MAX) >> (regime + k(1))), regime + k(2)),
        );
        let frac = sig << k(1);
        let ef = (e << k(30)) | (frac >> k(2));
        let lost = frac & k(3);
        let hi = field | (ef >> len);
        let lo = ef << (k::<W>(32) - len);
        let body = hi >> k(1);
        let round = hi & k(1);
        let below = (lo | lost | sticky).ne(k(0));
        let body = body + (round & (below | (body & k(1))));
        W::cond(sign, || k::<W>(0) - body, || body)
    }

    pub fn add<W: Word>(a: W, b: W, fastmath: bool) -> W {
        let da = decode(a, fastmath);
        let db = decode(b, fastmath);
        W::cond(
            da.zero,
            || b,
            || {
                W::cond(
                    db.zero,
                    || a,
                    || {
                        let nar = da.nar | db.nar;
                        W::cond(nar, || k(NAR), || add_nonzero(&da, &db))
                    },
                )
            },
        )
    }

    fn add_nonzero<W: Word>(da: &Unpacked<W>, db: &Unpacked<W>) -> W {
        // Implicit bit at bit 30 leaves room for the carry.
        let fa = k::<W>(0x4000_0000) | (da.frac >> k(2));
        let fb = k::<W>(0x4000_0000) | (db.frac >> k(2));
        let b_larger = da.sf.slt(db.sf) | (da.sf.eq(db.sf) & fa.ult(fb));
        let (sign, sf_big, big, sf_small, small) = W::cond(
            b_larger,
            || (db.sign, db.sf, fb, da.sf, fa),
            || (da.sign, da.sf, fa, db.sf, fb),
        );
        let shift = sf_big - sf_small;
        let mask = (k::<W>(1) << shift) - k(1);
        let sticky = (small & mask).ne(k(0));
        let small = (small >> shift) | sticky;
        let (sf, sig, zero) = W::cond(
            da.sign ^ db.sign,
            || {
                let diff = big - small;
                let z = diff.clz();
                (sf_big + k(1) - z, diff << z, diff.eq(k(0)))
            },
            || {
                let sum = big + small;
                let carry = sum >> k(31);
                let (sf, sig) = W::cond(carry, || (sf_big + k(1), sum), || (sf_big, sum << k(1)));
                (sf, sig, k(0))
            },
        );
        W::cond(zero, || k(0), || encode(sign, sf, sig, k(0)))
    }

    /// Subtraction adds the two's complement of the subtrahend.
    pub fn sub<W: Word>(a: W, b: W, fastmath: bool) -> W {
        add(a, k::<W>(0) - b, fastmath)
    }

    pub fn mul<W: Word>(a: W, b: W, fastmath: bool) -> W {
        let da = decode(a, fastmath);
        let db = decode(b, fastmath);
        let nar = da.nar | db.nar;
        let zero = da.zero | db.zero;
        W::cond(
            nar,
            || k(NAR),
            || {
                W::cond(
                    zero,
                    || k(0),
                    || {
                        let sf = da.sf + db.sf;
                        let sign = da.sign ^ db.sign;
                        let fa = k::<W>(0x8000_0000) | (da.frac >> k(1));
                        let fb = k::<W>(0x8000_0000) | (db.frac >> k(1));
                        let hi = fa.mulhi(fb);
                        let lo = fa.mul(fb);
                        // Product in [1, 4).
                        let (sf, sig, sticky) = W::cond(
                            hi >> k(31),
                            || (sf + k(1), hi, lo.ne(k(0))),
                            || (sf, (hi << k(1)) | (lo >> k(31)), (lo << k(1)).ne(k(0))),
                        );
                        encode(sign, sf, sig, sticky)
                    },
                )
            },
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: f64) -> PositBits {
        PositBits::from_f64(v)
    }

    #[test]
    fn decode_specials_and_one() {
        assert_eq!(posit_decode(PositBits(0)).state, State::Zero);
        let nar = posit_decode(PositBits(0x8000_0000));
        assert_eq!((nar.state, nar.sign), (State::NaR, 1));
        let one = posit_decode(PositBits(0x4000_0000));
        assert_eq!(one, DecodedNumber { sign: 0, sf: 0, fraction: 0, state: State::Normal });
    }

    #[test]
    fn decode_extremes() {
        assert_eq!(posit_decode(PositBits::MAX_POS).sf, 120);
        assert_eq!(posit_decode(PositBits::MIN_POS).sf, -120);
        let neg_max = posit_decode(PositBits::MAX_POS.negate());
        assert_eq!((neg_max.sign, neg_max.sf), (1, 120));
    }

    #[test]
    fn encode_examples() {
        let one = DecodedNumber { sign: 0, sf: 0, fraction: 0, state: State::Normal };
        assert_eq!(posit_encode(one), PositBits(0x4000_0000));
        let big = DecodedNumber { sign: 0, sf: 121, fraction: 0x1234_5678, state: State::Normal };
        assert_eq!(posit_encode(big), PositBits::MAX_POS);
        let tiny = DecodedNumber { sign: 1, sf: -500, fraction: 0, state: State::Normal };
        assert_eq!(posit_encode(tiny), PositBits::MIN_POS.negate());
    }

    #[test]
    fn extreme_values() {
        assert_eq!(PositBits::MAX_POS.to_real(), BigFloat::one().ldexp(120));
        assert_eq!(PositBits::MIN_POS.to_real(), BigFloat::one().ldexp(-120));
    }

    #[test]
    fn add_examples() {
        assert_eq!(posit_add(p(1.0), PositBits::ZERO), p(1.0));
        assert_eq!(posit_add(PositBits::NAR, p(3.5)), PositBits::NAR);
        assert_eq!(posit_add(p(1.0), p(1.0)), p(2.0));
        assert_eq!(posit_add(p(1.5), p(-0.25)), p(1.25));
        assert_eq!(posit_add(p(-3.0), p(1.0)), p(-2.0));
        assert_eq!(posit_add(PositBits::MAX_POS, PositBits::MAX_POS), PositBits::MAX_POS);
    }

    #[test]
    fn sub_examples() {
        assert_eq!(posit_sub(p(1.0), p(1.0)), PositBits::ZERO);
        let x = p(2.75);
        assert_eq!(posit_sub(PositBits::ZERO, x), PositBits(x.0.wrapping_neg()));
        assert_eq!(posit_sub(PositBits::NAR, PositBits::ZERO), PositBits::NAR);
    }

    #[test]
    fn mul_examples() {
        assert_eq!(posit_mul(p(2.0), p(3.0)), p(6.0));
        assert_eq!(posit_mul(PositBits::NAR, PositBits::ZERO), PositBits::NAR);
        assert_eq!(posit_mul(p(-1.5), p(4.0)), p(-6.0));
        assert_eq!(posit_mul(PositBits::MIN_POS, PositBits::MIN_POS), PositBits::MIN_POS);
        assert_eq!(posit_mul(PositBits::MAX_POS, PositBits::MAX_POS), PositBits::MAX_POS);
    }

    #[test]
    fn from_real_near_one_has_27_fraction_bits() {
        // 1 + 2^-30 lies below the midpoint to 1 + 2^-27.
        let x = BigFloat::one().add(&BigFloat::one().ldexp(-30), 128);
        assert_eq!(posit_from_real(&x), PositBits(0x4000_0000));
        // 1 + 2^-27 is representable and is the next posit after 1.
        let y = BigFloat::one().add(&BigFloat::one().ldexp(-27), 128);
        assert_eq!(posit_from_real(&y), PositBits(0x4000_0001));
        // 1 + 2^-28 is the midpoint: ties go to the even pattern (1.0).
        let t = BigFloat::one().add(&BigFloat::one().ldexp(-28), 128);
        assert_eq!(posit_from_real(&t), PositBits(0x4000_0000));
    }

    #[test]
    fn hex_text() {
        assert_eq!(PositBits::ONE.to_string(), "40000000");
        assert_eq!("0x7fffffff".parse::<PositBits>().unwrap(), PositBits::MAX_POS);
        assert!("xyz".parse::<PositBits>().is_err());
    }
}

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use smallvec::SmallVec;

use crate::error::Error;

pub(crate) type Limbs = SmallVec<[u64; 8]>;

/// Binary floating-point number with an unbounded exponent and an
/// arbitrary-length significand.
///
/// The value is `(-1)^neg * sig * 2^exp` where `sig` is an integer stored as
/// little-endian 64-bit limbs whose most significant limb has its top bit set.
/// Zero has no limbs. Every arithmetic operation takes the target precision in
/// bits and rounds to nearest, ties to even.
#[derive(Clone)]
pub struct BigFloat {
    neg: bool,
    exp: i64,
    sig: Limbs,
}

impl BigFloat {
    pub const MIN_PREC: u32 = 64;

    pub fn zero() -> Self {
        BigFloat { neg: false, exp: 0, sig: Limbs::new() }
    }

    pub fn one() -> Self {
        Self::from_u64(1)
    }

    pub fn from_u64(v: u64) -> Self {
        Self::from_parts(false, v, 0)
    }

    pub fn from_i64(v: i64) -> Self {
        Self::from_parts(v < 0, v.unsigned_abs(), 0)
    }

    /// Exact value `(-1)^neg * mant * 2^exp`.
    pub fn from_parts(neg: bool, mant: u64, exp: i64) -> Self {
        if mant == 0 {
            return Self::zero();
        }
        let z = mant.leading_zeros();
        let mut sig = Limbs::new();
        sig.push(mant << z);
        BigFloat { neg, exp: exp - z as i64, sig }
    }

    /// Exact conversion of a finite `f64`.
    pub fn from_f64(v: f64) -> Self {
        assert!(v.is_finite(), "BigFloat::from_f64 requires a finite value");
        if v == 0.0 {
            return Self::zero();
        }
        let bits = v.to_bits();
        let neg = bits >> 63 != 0;
        let e = ((bits >> 52) & 0x7ff) as i64;
        let f = bits & ((1u64 << 52) - 1);
        if e == 0 {
            Self::from_parts(neg, f, -1074)
        } else {
            Self::from_parts(neg, f | (1u64 << 52), e - 1075)
        }
    }

    /// Exact conversion of an integer significand.
    pub fn from_biguint(neg: bool, mant: &BigUint, exp: i64) -> Self {
        if mant.is_zero() {
            return Self::zero();
        }
        let digits = mant.to_u64_digits();
        let mut sig: Limbs = digits.into_iter().collect();
        let z = sig.last().unwrap().leading_zeros();
        shl_limbs(&mut sig, z);
        BigFloat { neg, exp: exp - z as i64, sig }
    }

    /// Rounds an integer significand with trailing sticky information.
    pub(crate) fn round_biguint(neg: bool, mant: &BigUint, exp: i64, sticky: bool, prec: u32) -> Self {
        if mant.is_zero() {
            return Self::zero();
        }
        let mut sig: Limbs = mant.to_u64_digits().into_iter().collect();
        let z = sig.last().unwrap().leading_zeros();
        shl_limbs(&mut sig, z);
        round_limbs(neg, sig, exp - z as i64, sticky, prec)
    }

    pub fn is_zero(&self) -> bool {
        self.sig.is_empty()
    }

    pub fn is_neg(&self) -> bool {
        self.neg && !self.is_zero()
    }

    /// `floor(log2(|x|))`. Meaningless for zero.
    pub fn msb_exp(&self) -> i64 {
        self.exp + 64 * self.sig.len() as i64 - 1
    }

    /// Number of stored significand bits (a multiple of 64).
    pub fn stored_bits(&self) -> u32 {
        64 * self.sig.len() as u32
    }

    /// Top 64 significand bits (leading one at bit 63) plus a flag telling
    /// whether any lower bit is set. Zero yields `(0, false)`.
    pub fn top64(&self) -> (u64, bool) {
        match self.sig.split_last() {
            None => (0, false),
            Some((&top, rest)) => (top, rest.iter().any(|&l| l != 0)),
        }
    }

    pub fn neg(mut self) -> Self {
        if !self.is_zero() {
            self.neg = !self.neg;
        }
        self
    }

    pub fn abs(mut self) -> Self {
        self.neg = false;
        self
    }

    /// Multiplies by `2^n` exactly.
    pub fn ldexp(mut self, n: i64) -> Self {
        if !self.is_zero() {
            self.exp += n;
        }
        self
    }

    /// Rounds to `prec` bits.
    pub fn round(&self, prec: u32) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        round_limbs(self.neg, self.sig.clone(), self.exp, false, prec)
    }

    /// Integer significand and exponent such that `|x| = mant * 2^exp`.
    pub fn to_biguint_parts(&self) -> (BigUint, i64) {
        let mut bytes = Vec::with_capacity(self.sig.len() * 8);
        for l in &self.sig {
            bytes.extend_from_slice(&l.to_le_bytes());
        }
        (BigUint::from_bytes_le(&bytes), self.exp)
    }

    /// Nearest `f64` (ties to even). Out-of-range magnitudes give infinity,
    /// tiny ones flush to signed zero.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let r = self.round(53);
        let e = r.msb_exp();
        let sign = if r.neg { -1.0 } else { 1.0 };
        if e > 1023 {
            return sign * f64::INFINITY;
        }
        if e < -1022 {
            // Subnormal range: rebuild through a correctly rounded integer.
            let (m, x) = self.to_biguint_parts();
            let shift = -1074 - x;
            if shift <= 0 {
                return sign * f64::from_bits(0);
            }
            let q = &m >> (shift as usize);
            let rem = &m - (&q << (shift as usize));
            let half = BigUint::one() << (shift as usize - 1);
            let mut q = u64::try_from(&q).unwrap_or(u64::MAX);
            if rem > half || (rem == half && q & 1 == 1) {
                q += 1;
            }
            return sign * f64::from_bits(q);
        }
        let top = r.sig.last().copied().unwrap();
        let frac = (top >> 11) & ((1u64 << 52) - 1);
        let bits = (((e + 1023) as u64) << 52) | frac;
        sign * f64::from_bits(bits)
    }

    pub fn add(&self, o: &Self, prec: u32) -> Self {
        add_signed(self, o, o.neg, prec)
    }

    pub fn sub(&self, o: &Self, prec: u32) -> Self {
        add_signed(self, o, !o.neg, prec)
    }

    pub fn mul(&self, o: &Self, prec: u32) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let n = self.sig.len() + o.sig.len();
        let mut out: Limbs = SmallVec::from_elem(0, n);
        for (i, &a) in self.sig.iter().enumerate() {
            let mut carry = 0u128;
            for (j, &b) in o.sig.iter().enumerate() {
                let t = a as u128 * b as u128 + out[i + j] as u128 + carry;
                out[i + j] = t as u64;
                carry = t >> 64;
            }
            out[i + o.sig.len()] = carry as u64;
        }
        let mut exp = self.exp + o.exp;
        if out[n - 1] >> 63 == 0 {
            shl_limbs(&mut out, 1);
            exp -= 1;
        }
        round_limbs(self.neg != o.neg, out, exp, false, prec)
    }

    pub fn div(&self, o: &Self, prec: u32) -> Result<Self, Error> {
        if o.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let (a, ea) = self.to_biguint_parts();
        let (b, eb) = o.to_biguint_parts();
        let shift = (prec as i64 + 2 + b.bits() as i64 - a.bits() as i64).max(0) as usize;
        let num = a << shift;
        let q = &num / &b;
        let sticky = !(&num % &b).is_zero();
        Ok(Self::round_biguint(self.neg != o.neg, &q, ea - eb - shift as i64, sticky, prec))
    }

    pub fn sqrt(&self, prec: u32) -> Result<Self, Error> {
        if self.is_zero() {
            return Ok(Self::zero());
        }
        if self.neg {
            return Err(Error::NegativeSqrt);
        }
        let (m, e) = self.to_biguint_parts();
        let mut shift = (2 * prec as i64 + 4 - m.bits() as i64).max(0);
        if (e - shift) % 2 != 0 {
            shift += 1;
        }
        let m = m << shift as usize;
        let r = m.sqrt();
        let sticky = &r * &r != m;
        Ok(Self::round_biguint(false, &r, (e - shift) / 2, sticky, prec))
    }

    /// Division by a nonzero machine integer.
    pub fn div_u64(&self, d: u64, prec: u32) -> Self {
        assert!(d != 0, "division by zero");
        if self.is_zero() {
            return Self::zero();
        }
        let want = prec.div_ceil(64) as usize + 2;
        let pad = want.saturating_sub(self.sig.len());
        let mut num: Limbs = SmallVec::from_elem(0, pad);
        num.extend_from_slice(&self.sig);
        let mut q: Limbs = SmallVec::from_elem(0, num.len());
        let mut rem = 0u128;
        for i in (0..num.len()).rev() {
            let cur = (rem << 64) | num[i] as u128;
            q[i] = (cur / d as u128) as u64;
            rem = cur % d as u128;
        }
        while q.last() == Some(&0) {
            q.pop();
        }
        let z = q.last().unwrap().leading_zeros();
        shl_limbs(&mut q, z);
        round_limbs(self.neg, q, self.exp - 64 * pad as i64 - z as i64, rem != 0, prec)
    }

    /// Compares magnitudes.
    pub fn cmp_abs(&self, o: &Self) -> Ordering {
        match (self.is_zero(), o.is_zero()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        match self.msb_exp().cmp(&o.msb_exp()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        // Same leading-bit position: compare limbs from the top.
        let (la, lb) = (self.sig.len(), o.sig.len());
        for i in 0..la.max(lb) {
            let a = if i < la { self.sig[la - 1 - i] } else { 0 };
            let b = if i < lb { o.sig[lb - 1 - i] } else { 0 };
            match a.cmp(&b) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

/// Equality is by value: representations with different limb counts compare
/// equal when they denote the same number.
impl PartialEq for BigFloat {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}

impl Eq for BigFloat {}

impl std::hash::Hash for BigFloat {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        let low = self.sig.iter().take_while(|&&l| l == 0).count();
        self.is_neg().hash(h);
        if !self.is_zero() {
            (self.exp + 64 * low as i64).hash(h);
            self.sig[low..].hash(h);
        }
    }
}

impl PartialOrd for BigFloat {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for BigFloat {
    fn cmp(&self, o: &Self) -> Ordering {
        match (self.is_neg(), o.is_neg()) {
            (false, true) => {
                if self.is_zero() && o.is_zero() {
                    Ordering::Equal
                } else {
                    Ordering::Greater
                }
            }
            (true, false) => Ordering::Less,
            (false, false) => self.cmp_abs(o),
            (true, true) => o.cmp_abs(self),
        }
    }
}

impl fmt::Debug for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigFloat({})", self.to_hex_string())
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(20);
        f.write_str(&self.to_decimal_string(digits))
    }
}

/// Shifts left by `s < 64` bits in place; bits pushed out of the top are lost.
pub(crate) fn shl_limbs(x: &mut [u64], s: u32) {
    if s == 0 {
        return;
    }
    for i in (0..x.len()).rev() {
        let lo = if i > 0 { x[i - 1] >> (64 - s) } else { 0 };
        x[i] = (x[i] << s) | lo;
    }
}

fn leading_zeros(x: &[u64]) -> u64 {
    let mut n = 0;
    for &l in x.iter().rev() {
        if l == 0 {
            n += 64;
        } else {
            return n + l.leading_zeros() as u64;
        }
    }
    n
}

/// Shifts left by an arbitrary bit count within the same length.
fn shl_bits(x: &mut Limbs, s: u64) {
    let limbs = (s / 64) as usize;
    if limbs > 0 {
        let n = x.len();
        for i in (0..n).rev() {
            x[i] = if i >= limbs { x[i - limbs] } else { 0 };
        }
    }
    shl_limbs(x, (s % 64) as u32);
}

/// Places `src` into a window of `width` limbs, shifted right by `shift` bits
/// relative to top alignment. Bits falling off the bottom are reported.
fn place_shifted(src: &[u64], width: usize, shift: u64) -> (Limbs, bool) {
    let mut out: Limbs = SmallVec::from_elem(0, width);
    let limb_shift = (shift / 64) as usize;
    let bit_shift = (shift % 64) as u32;
    let mut lost = false;
    // Top-aligned position of src limb i (counting from the top) before the
    // shift is width-1-i; after shifting by whole limbs it moves down.
    for (i, &l) in src.iter().rev().enumerate() {
        let pos = width as i64 - 1 - i as i64 - limb_shift as i64;
        if bit_shift == 0 {
            if pos >= 0 {
                out[pos as usize] = l;
            } else if l != 0 {
                lost = true;
            }
        } else {
            let hi = l >> bit_shift;
            let lo = l << (64 - bit_shift);
            if pos >= 0 {
                out[pos as usize] |= hi;
            } else if hi != 0 {
                lost = true;
            }
            if pos >= 1 {
                out[pos as usize - 1] |= lo;
            } else if lo != 0 {
                lost = true;
            }
        }
    }
    (out, lost)
}

fn add_signed(a: &BigFloat, b: &BigFloat, b_neg: bool, prec: u32) -> BigFloat {
    if b.is_zero() {
        return a.round(prec);
    }
    if a.is_zero() {
        let mut r = b.round(prec);
        r.neg = b_neg;
        return r;
    }
    let (big, small, big_neg, small_neg) = if a.cmp_abs(b) == Ordering::Less {
        (b, a, b_neg, a.neg)
    } else {
        (a, b, a.neg, b_neg)
    };
    let width = big.sig.len().max(small.sig.len()).max(prec.div_ceil(64) as usize) + 1;
    let d = (big.msb_exp() - small.msb_exp()) as u64;
    let (mut x, _) = place_shifted(&big.sig, width, 0);
    // Beyond the window the smaller operand only contributes a sticky bit.
    let (y, lost) = if d >= 64 * width as u64 {
        (SmallVec::from_elem(0, width), true)
    } else {
        place_shifted(&small.sig, width, d)
    };
    let mut y = y;
    if lost {
        y[0] |= 1;
    }
    // Exponent of the window's least significant bit.
    let mut exp = big.msb_exp() + 1 - 64 * width as i64;
    if big_neg == small_neg {
        let mut carry = 0u64;
        for i in 0..width {
            let (s1, c1) = x[i].overflowing_add(y[i]);
            let (s2, c2) = s1.overflowing_add(carry);
            x[i] = s2;
            carry = (c1 | c2) as u64;
        }
        if carry != 0 {
            let sticky = x[0] & 1;
            for i in 0..width {
                let hi = if i + 1 < width { x[i + 1] << 63 } else { 1u64 << 63 };
                x[i] = (x[i] >> 1) | hi;
            }
            x[0] |= sticky;
            exp += 1;
        }
    } else {
        let mut borrow = 0u64;
        for i in 0..width {
            let (s1, b1) = x[i].overflowing_sub(y[i]);
            let (s2, b2) = s1.overflowing_sub(borrow);
            x[i] = s2;
            borrow = (b1 | b2) as u64;
        }
        let z = leading_zeros(&x);
        if z == 64 * width as u64 {
            return BigFloat::zero();
        }
        shl_bits(&mut x, z);
        exp -= z as i64;
    }
    round_limbs(big_neg, x, exp, false, prec)
}

/// Rounds a normalized limb vector (top bit of the last limb set) to `prec`
/// bits, ties to even. `sticky` reports nonzero bits below the vector.
pub(crate) fn round_limbs(neg: bool, mut x: Limbs, exp: i64, sticky: bool, prec: u32) -> BigFloat {
    debug_assert!(x.last().is_some_and(|l| l >> 63 == 1));
    let prec = prec.max(1);
    let out_len = prec.div_ceil(64) as usize;
    let mut exp = exp;
    if x.len() <= out_len && !sticky && 64 * x.len() as u32 <= prec {
        return BigFloat { neg, exp, sig: x };
    }
    if x.len() < out_len {
        let pad = out_len - x.len();
        let mut y: Limbs = SmallVec::from_elem(0, pad);
        y.extend_from_slice(&x);
        exp -= 64 * pad as i64;
        x = y;
    }
    // Drop whole limbs below the output window, then clear the low `cut`
    // bits of the lowest kept limb (cut < 64).
    let drop = x.len() - out_len;
    let cut = 64 * out_len as u32 - prec;
    let mut below = sticky || x[..drop.saturating_sub(1)].iter().any(|&l| l != 0);
    let round_bit;
    if cut == 0 {
        if drop > 0 {
            round_bit = x[drop - 1] >> 63 == 1;
            below |= x[drop - 1] << 1 != 0;
        } else {
            round_bit = false;
        }
    } else {
        if drop > 0 {
            below |= x[drop - 1] != 0;
        }
        let low = x[drop];
        round_bit = (low >> (cut - 1)) & 1 == 1;
        below |= low & ((1u64 << (cut - 1)) - 1) != 0;
    }
    let mut sig: Limbs = x[drop..].iter().copied().collect();
    exp += 64 * drop as i64;
    sig[0] &= !0u64 << cut;
    let lsb = (sig[0] >> cut) & 1;
    if round_bit && (below || lsb == 1) {
        let mut carry = 1u64 << cut;
        for l in sig.iter_mut() {
            let (s, c) = l.overflowing_add(carry);
            *l = s;
            carry = c as u64;
            if carry == 0 {
                break;
            }
        }
        if carry != 0 {
            let n = sig.len();
            sig.iter_mut().for_each(|l| *l = 0);
            sig[n - 1] = 1u64 << 63;
            exp += 1;
        }
    }
    BigFloat { neg, exp, sig }
}

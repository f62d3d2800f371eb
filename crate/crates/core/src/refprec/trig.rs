//! Sine and cosine by argument reduction against a stored pi and Taylor
//! series evaluated with extra working precision.
//!
//! Results are accurate to within one ulp at the requested precision; they are
//! not guaranteed to be correctly rounded.

use num_bigint::BigUint;
use num_traits::Num;
use std::sync::OnceLock;

use super::BigFloat;

/// floor(pi * 2^1022), 1024 bits.
const PI_HEX: &str = "c90fdaa22168c234c4c6628b80dc1cd129024e088a67cc74020bbea63b139b22\
514a08798e3404ddef9519b3cd3a431b302b0a6df25f14374fe1356d6d51c245e\
485b576625e7ec6f44c42e9a637ed6b0bff5cb6f406b7edee386bfb5a899fa5ae\
9f24117c4b1fe649286651ece45b3dc2007cb8a163bf0598da48361c55d39a";

const PI_BITS: u32 = 1024;

fn pi_full() -> &'static BigFloat {
    static PI: OnceLock<BigFloat> = OnceLock::new();
    PI.get_or_init(|| {
        let m = BigUint::from_str_radix(PI_HEX, 16).expect("pi constant");
        BigFloat::from_biguint(false, &m, -1022)
    })
}

/// pi rounded to `prec` bits (at most about 1020 bits are meaningful).
pub fn pi(prec: u32) -> BigFloat {
    pi_full().round(prec.min(PI_BITS - 2))
}

pub fn sin(theta: &BigFloat, prec: u32) -> BigFloat {
    sin_cos(theta, prec).0
}

pub fn cos(theta: &BigFloat, prec: u32) -> BigFloat {
    sin_cos(theta, prec).1
}

/// Both `sin(theta)` and `cos(theta)` rounded to `prec` bits.
pub fn sin_cos(theta: &BigFloat, prec: u32) -> (BigFloat, BigFloat) {
    if theta.is_zero() {
        return (BigFloat::zero(), BigFloat::one());
    }
    let mag = theta.msb_exp().max(0) as u32;
    let mut guard = 64u32;
    loop {
        let wp = prec + guard + mag;
        let (q, r, lost) = reduce(theta, wp);
        // Cancellation in the reduction eats into the guard bits; retry with
        // more unless the stored constant is exhausted.
        if lost + 24 > guard && wp + lost < PI_BITS - 64 {
            guard += lost + 32;
            continue;
        }
        let (s, c) = taylor(&r, wp);
        let (s, c) = match q.rem_euclid(4) {
            0 => (s, c),
            1 => (c, s.neg()),
            2 => (s.neg(), c.neg()),
            _ => (c.neg(), s),
        };
        return (s.round(prec), c.round(prec));
    }
}

/// Returns `(q, r, lost)` with `theta = q*pi/2 + r`, `|r| <= pi/4` (roughly)
/// and `lost` the number of leading bits cancelled when forming `r`.
fn reduce(theta: &BigFloat, wp: u32) -> (i64, BigFloat, u32) {
    let half_pi = pi(wp + 64).ldexp(-1);
    let t = theta.div(&half_pi, 64).expect("pi is nonzero").to_f64();
    assert!(t.abs() < 9.0e15, "sin/cos argument too large for reduction");
    let q = t.round() as i64;
    if q == 0 {
        return (0, theta.round(wp), 0);
    }
    let qhp = half_pi.mul(&BigFloat::from_i64(q), wp + 128);
    let r = theta.sub(&qhp, wp + 64);
    if r.is_zero() {
        return (q, r, 0);
    }
    let lost = (theta.msb_exp() - r.msb_exp()).max(0) as u32;
    (q, r.round(wp), lost)
}

fn taylor(r: &BigFloat, wp: u32) -> (BigFloat, BigFloat) {
    if r.is_zero() {
        return (BigFloat::zero(), BigFloat::one());
    }
    let r2 = r.mul(r, wp);
    let floor = -(wp as i64) - 8;

    // sin: r - r^3/3! + ...
    let mut term = r.clone();
    let mut sin = r.clone();
    let mut n = 1u64;
    loop {
        term = term.mul(&r2, wp).div_u64((n + 1) * (n + 2), wp).neg();
        n += 2;
        if term.is_zero() || term.msb_exp() < r.msb_exp() + floor {
            break;
        }
        sin = sin.add(&term, wp);
    }

    // cos: 1 - r^2/2! + ...
    let mut term = BigFloat::one();
    let mut cos = BigFloat::one();
    let mut n = 0u64;
    loop {
        term = term.mul(&r2, wp).div_u64((n + 1) * (n + 2), wp).neg();
        n += 2;
        if term.is_zero() || term.msb_exp() < floor {
            break;
        }
        cos = cos.add(&term, wp);
    }
    (sin, cos)
}

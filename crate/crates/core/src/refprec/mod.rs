//! Arbitrary-precision binary floating point, used as ground truth for the
//! posit and float32 kernels and as the high-precision transform format.

mod bigfloat;
mod text;
mod trig;

pub use bigfloat::BigFloat;
pub use text::parse;
pub use trig::{cos, pi, sin, sin_cos};

/// Default oracle precision in bits.
pub const DEFAULT_PREC: u32 = 250;

/// Precision that makes any posit32 sum or product exact.
pub const EXACT_POSIT_PREC: u32 = 512;

pub fn big_add(a: &BigFloat, b: &BigFloat, prec: u32) -> BigFloat {
    a.add(b, prec)
}

pub fn big_sub(a: &BigFloat, b: &BigFloat, prec: u32) -> BigFloat {
    a.sub(b, prec)
}

pub fn big_mul(a: &BigFloat, b: &BigFloat, prec: u32) -> BigFloat {
    a.mul(b, prec)
}

pub fn big_div(a: &BigFloat, b: &BigFloat, prec: u32) -> crate::Result<BigFloat> {
    a.div(b, prec)
}

pub fn big_sin(theta: &BigFloat, prec: u32) -> BigFloat {
    sin(theta, prec)
}

pub fn big_cos(theta: &BigFloat, prec: u32) -> BigFloat {
    cos(theta, prec)
}

pub fn big_sqrt(x: &BigFloat, prec: u32) -> crate::Result<BigFloat> {
    x.sqrt(prec)
}

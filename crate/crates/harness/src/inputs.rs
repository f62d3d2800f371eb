//! Seeded transform inputs.
//!
//! Every sweep point draws from its own ChaCha8 stream: the key comes from the
//! run seed and the stream number is the size exponent, so a point's inputs
//! depend only on `(seed, N)` and never on scheduling or on other points.

use positlab_core::BigFloat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::config::Dist;

/// Standard deviation of the truncated normal.
pub const SIGMA: f64 = 0.25;

pub fn point_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn draw(dist: Dist, rng: &mut impl Rng) -> f64 {
    match dist {
        Dist::Uniform => rng.random_range(-1.0..1.0),
        Dist::Truncnormal => {
            let normal = Normal::new(0.0, SIGMA).expect("valid sigma");
            loop {
                let x: f64 = normal.sample(rng);
                if (-1.0..=1.0).contains(&x) {
                    return x;
                }
            }
        }
    }
}

/// `n` complex values as separate real and imaginary parts, drawn
/// alternately (re, im, re, im, ...).
pub fn complex_input(n: usize, dist: Dist, seed: u64, stream: u64) -> (Vec<BigFloat>, Vec<BigFloat>) {
    let mut rng = point_rng(seed, stream);
    let mut re = Vec::with_capacity(n);
    let mut im = Vec::with_capacity(n);
    for _ in 0..n {
        re.push(BigFloat::from_f64(draw(dist, &mut rng)));
        im.push(BigFloat::from_f64(draw(dist, &mut rng)));
    }
    (re, im)
}

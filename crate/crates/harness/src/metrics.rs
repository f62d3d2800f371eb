//! Error norms.

use positlab_core::fft::{Complex, Format};
use positlab_core::spectral;
use positlab_core::BigFloat;

/// `sqrt(sum |x_i - y_i|^2)` over complex sequences, with every difference
/// taken exactly on the real values of the two sequences.
pub fn complex_error_norm<F: Format>(fmt: &F, x: &[Complex<F::Scalar>], y: &[Complex<F::Scalar>]) -> f64
where
    F::Scalar: Send + Sync + 'static,
{
    assert_eq!(x.len(), y.len());
    let flat = |v: &[Complex<F::Scalar>]| -> Vec<BigFloat> { v.iter().flat_map(|c| [fmt.to_real(&c.re), fmt.to_real(&c.im)]).collect() };
    spectral::error_norm(&flat(x), &flat(y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use positlab_core::fft::Float32;
    use positlab_core::softfloat::FloatBits;

    #[test]
    fn norm_of_a_single_offset() {
        let z = Complex::new(FloatBits::ZERO, FloatBits::ZERO);
        let a = vec![z, z];
        let b = vec![z, Complex::new(FloatBits::from_f64(3.0), FloatBits::from_f64(-4.0))];
        assert_eq!(complex_error_norm(&Float32, &a, &b), 5.0);
        assert_eq!(complex_error_norm(&Float32, &a, &a), 0.0);
    }
}

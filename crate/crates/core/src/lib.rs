//! Integer-only posit32 and float32 arithmetic, a format-generic radix-4
//! Stockham FFT, a 1D spectral wave solver, and an operation-graph cost model
//! for comparing the two formats.

pub mod error;
pub mod fft;
pub mod opgraph;
pub mod oracle;
pub mod posit;
pub mod refprec;
pub mod softfloat;
pub mod spectral;
pub mod word;

pub use error::{Error, Result};
pub use refprec::BigFloat;

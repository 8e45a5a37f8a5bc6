//! Nonuniform discrete Fourier transforms: direct evaluation, a gridding
//! approximation with a Kaiser-Bessel window, and the exact FFT reduction
//! for uniformly spaced frequencies.

mod direct;
mod plan;
mod uniform;

pub use direct::{ndft_adjoint, ndft_forward};
pub use plan::{plan_nfft, NfftPlan, DEFAULT_HALF_WIDTH, DEFAULT_SIGMA};
pub use uniform::{reciprocal_integer, uniform_ndft_fft, uniform_ndft_fft_adjoint, uniform_points, UniformPlan};

#[cfg(test)]
mod tests;

//! The truncated cosine `f(x) = cos(2 pi x)` on `[-1/2, 0)`, zero elsewhere,
//! and its Fourier transform `F f(xi) = int f(x) exp(-2 pi i x xi) dx`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::sampling::SamplingSet;

pub fn truncated_cosine(x: f64) -> f64 {
    if (-0.5..0.0).contains(&x) {
        (2.0 * PI * x).cos()
    } else {
        0.0
    }
}

fn sinc(t: f64) -> f64 {
    if t.abs() < 1e-8 {
        1.0 - (PI * t).powi(2) / 6.0
    } else {
        (PI * t).sin() / (PI * t)
    }
}

/// `int_{-1/2}^0 exp(2 pi i c x) dx`.
fn half_interval(c: f64) -> Complex64 {
    0.5 * sinc(c / 2.0) * Complex64::from_polar(1.0, -PI * c / 2.0)
}

pub fn truncated_cosine_fourier(xi: f64) -> Complex64 {
    0.5 * (half_interval(1.0 - xi) + half_interval(-1.0 - xi))
}

/// Samples of the truncated cosine transform; in 2D the tensor `f(x) f(y)`.
pub fn truncated_cosine_transform(samples: &SamplingSet) -> Vec<Complex64> {
    samples
        .coords()
        .chunks(samples.dim())
        .map(|p| p.iter().map(|&x| truncated_cosine_fourier(x)).product())
        .collect()
}

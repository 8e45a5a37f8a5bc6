//! Generalized sampling: reconstruction of compactly supported functions in
//! boundary-corrected Daubechies wavelet spaces from nonuniform Fourier samples.

pub mod bench;
pub mod coefficients;
pub mod error;
pub mod io;
pub mod nufft;
pub mod operator;
pub mod patterns;
pub mod sampling;
pub mod signals;
pub mod solver;
pub mod wavelet;
pub mod weights;

pub use coefficients::CoefficientGrid;
pub use error::{Error, ErrorClass, Result};
pub use sampling::SamplingSet;
pub use wavelet::{Family, Side};

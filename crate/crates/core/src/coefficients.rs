use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::wavelet::{weval_1d, weval_2d, Family, ReconstructionEvaluation};

/// Reconstruction coefficients in the scale-`J` interval basis.
///
/// 1D: `2^J` values, left boundary functions first. 2D: `2^J x 2^J` values
/// with the x index fastest (`c[iy * N + ix]`).
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientGrid {
    pub dim: usize,
    pub family: Family,
    pub j: u32,
    pub values: Vec<Complex64>,
}

impl CoefficientGrid {
    pub fn new(dim: usize, family: Family, j: u32, values: Vec<Complex64>) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::Parameter(format!("dimension must be 1 or 2, got {dim}")));
        }
        if j > 30 {
            return Err(Error::Parameter(format!("scale J = {j} is too large")));
        }
        let expected = Self::len_for(dim, j);
        if values.len() != expected {
            return Err(Error::Shape { expected, actual: values.len() });
        }
        Ok(Self { dim, family, j, values })
    }

    pub fn zeros(dim: usize, family: Family, j: u32) -> Result<Self> {
        Self::new(dim, family, j, vec![Complex64::default(); Self::len_for(dim, j)])
    }

    pub fn len_for(dim: usize, j: u32) -> usize {
        (1usize << j).pow(dim as u32)
    }

    pub fn side_len(&self) -> usize {
        1 << self.j
    }

    /// Real parts, the input the evaluators accept.
    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    /// Evaluates the real part of the expansion on the dyadic grid of resolution `r`.
    pub fn evaluate(&self, r: u32) -> Result<ReconstructionEvaluation> {
        let re = self.real_parts();
        if self.dim == 1 {
            weval_1d(&re, self.family, self.j, r)
        } else {
            weval_2d(&re, self.family, self.j, r)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_checks() {
        assert!(CoefficientGrid::zeros(2, Family::Haar, 3).unwrap().values.len() == 64);
        let bad = CoefficientGrid::new(1, Family::Haar, 3, vec![Complex64::default(); 7]);
        assert!(matches!(bad, Err(Error::Shape { expected: 8, actual: 7 })));
        assert!(CoefficientGrid::zeros(3, Family::Haar, 3).is_err());
    }

    #[test]
    fn haar_constant_evaluates_to_constant() {
        let n = 8usize;
        let c = vec![Complex64::new(1.0 / (n as f64).sqrt(), 5.0); n];
        let g = CoefficientGrid::new(1, Family::Haar, 3, c).unwrap();
        let ev = g.evaluate(8).unwrap();
        // the closed right endpoint lies outside every half-open Haar support
        assert!(ev.values[..256].iter().all(|v| (v - 1.0).abs() < 1e-12));
    }
}

use crate::error::{Error, Result};

/// Frequency locations `xi_m` in cycles per unit, one or two coordinates
/// per point, stored point-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingSet {
    dim: usize,
    coords: Vec<f64>,
}

impl SamplingSet {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::Parameter(format!("sampling dimension must be 1 or 2, got {dim}")));
        }
        if coords.is_empty() || coords.len() % dim != 0 {
            return Err(Error::Parameter(format!(
                "{} coordinates do not form a nonempty set of {dim}D points",
                coords.len()
            )));
        }
        if let Some(bad) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::Domain(format!("non-finite frequency {bad}")));
        }
        Ok(Self { dim, coords })
    }

    pub fn one_d(points: Vec<f64>) -> Result<Self> {
        Self::new(1, points)
    }

    pub fn two_d(points: &[[f64; 2]]) -> Result<Self> {
        Self::new(2, points.iter().flatten().copied().collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, m: usize) -> &[f64] {
        &self.coords[m * self.dim..(m + 1) * self.dim]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Values of coordinate `axis` for all points.
    pub fn axis(&self, axis: usize) -> Vec<f64> {
        self.coords.iter().skip(axis).step_by(self.dim).copied().collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.coords.iter().fold(0.0, |a, c| a.max(c.abs()))
    }
}

//! Exact NDFT on the centered grid `xi_m = (eps / N)(m - 1 - M/2)`, `m = 1..M`,
//! through one zero-padded FFT of length `N2 = qN / eps`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{check_len, Error, Result};

/// `1/eps` as an integer, if it is one.
pub fn reciprocal_integer(eps: f64) -> Option<usize> {
    if !(eps > 0.0) || !eps.is_finite() {
        return None;
    }
    let inv = 1.0 / eps;
    let r = inv.round();
    (r >= 1.0 && (inv - r).abs() <= 1e-9 * r).then_some(r as usize)
}

/// The scaled frequencies `(eps / N)(m - 1 - M/2)` of the uniform grid.
pub fn uniform_points(m: usize, eps: f64, n: usize) -> Vec<f64> {
    (0..m).map(|i| eps / n as f64 * (i as f64 - m as f64 / 2.0)).collect()
}

/// Plan for the uniform-grid transform of a length-`N1` centered vector.
pub struct UniformPlan {
    n1: usize,
    m: usize,
    q: usize,
    n2: usize,
    /// `exp(pi i (l-1) eps M / N)` on input slots.
    pre: Vec<Complex64>,
    /// `exp(pi i N1 xi_m)` on outputs.
    post: Vec<Complex64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for UniformPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("UniformPlan")
            .field("n1", &self.n1)
            .field("m", &self.m)
            .field("q", &self.q)
            .field("n2", &self.n2)
            .finish()
    }
}

impl UniformPlan {
    pub fn new(n1: usize, m: usize, eps: f64, n: usize) -> Result<Self> {
        let inv_eps = reciprocal_integer(eps)
            .ok_or_else(|| Error::Parameter(format!("1/epsilon must be a positive integer, got epsilon = {eps}")))?;
        if m < n {
            return Err(Error::Parameter(format!("uniform transform needs M >= N, got M = {m}, N = {n}")));
        }
        if n1 > n || n1 == 0 || n1 % 2 != 0 {
            return Err(Error::Parameter(format!("input length {n1} must be even and at most N = {n}")));
        }
        let block = n * inv_eps;
        let q = m.div_ceil(block).max(1);
        let n2 = q * block;
        let xi = uniform_points(m, eps, n);
        let shift = eps * m as f64 / (2.0 * n as f64);
        let pre = (0..n1).map(|l| Complex64::from_polar(1.0, 2.0 * PI * l as f64 * shift)).collect();
        let post = xi.iter().map(|x| Complex64::from_polar(1.0, PI * n1 as f64 * x)).collect();
        let mut planner = FftPlanner::new();
        Ok(Self {
            n1,
            m,
            q,
            n2,
            pre,
            post,
            fwd: planner.plan_fft_forward(n2),
            inv: planner.plan_fft_inverse(n2),
        })
    }

    pub fn input_len(&self) -> usize {
        self.n1
    }

    pub fn output_len(&self) -> usize {
        self.m
    }

    pub fn padded_len(&self) -> usize {
        self.n2
    }

    /// Writes `y_m = sum_l x_l exp(-2 pi i (l - 1 - N1/2) xi_m)`.
    pub fn forward_into(&self, x: &[Complex64], y: &mut [Complex64], work: &mut Vec<Complex64>) -> Result<()> {
        check_len(self.n1, x.len())?;
        check_len(self.m, y.len())?;
        work.clear();
        work.resize(self.n2, Complex64::default());
        for (l, (v, c)) in x.iter().zip(&self.pre).enumerate() {
            work[self.q * l] = v * c;
        }
        self.fwd.process(work);
        for ((o, z), c) in y.iter_mut().zip(work.iter()).zip(&self.post) {
            *o = z * c;
        }
        Ok(())
    }

    /// Writes `x_l = sum_m y_m exp(+2 pi i (l - 1 - N1/2) xi_m)`.
    pub fn adjoint_into(&self, y: &[Complex64], x: &mut [Complex64], work: &mut Vec<Complex64>) -> Result<()> {
        check_len(self.m, y.len())?;
        check_len(self.n1, x.len())?;
        work.clear();
        work.resize(self.n2, Complex64::default());
        for ((w, v), c) in work.iter_mut().zip(y).zip(&self.post) {
            *w = v * c.conj();
        }
        self.inv.process(work);
        for (l, (o, c)) in x.iter_mut().zip(&self.pre).enumerate() {
            *o = work[self.q * l] * c.conj();
        }
        Ok(())
    }
}

/// One-shot uniform-grid transform; see [`UniformPlan`].
pub fn uniform_ndft_fft(x: &[Complex64], m: usize, eps: f64, n: usize) -> Result<Vec<Complex64>> {
    let plan = UniformPlan::new(x.len(), m, eps, n)?;
    let mut y = vec![Complex64::default(); m];
    plan.forward_into(x, &mut y, &mut Vec::new())?;
    Ok(y)
}

/// Adjoint of [`uniform_ndft_fft`].
pub fn uniform_ndft_fft_adjoint(y: &[Complex64], n1: usize, eps: f64, n: usize) -> Result<Vec<Complex64>> {
    let plan = UniformPlan::new(n1, y.len(), eps, n)?;
    let mut x = vec![Complex64::default(); n1];
    plan.adjoint_into(y, &mut x, &mut Vec::new())?;
    Ok(x)
}

//! The interior NDFT used by the operator: either a gridding NFFT or, on
//! uniform grids, the exact FFT reduction.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Result;
use crate::nufft::{plan_nfft, reciprocal_integer, NfftPlan, UniformPlan};

/// Wraps a scaled frequency into `[-1/2, 1/2)`; the transform is 1-periodic.
pub(crate) fn wrap(x: f64) -> f64 {
    let w = x - (x + 0.5).floor();
    if w >= 0.5 {
        w - 1.0
    } else {
        w
    }
}

/// Detects `xi_m = eps (m - 1 - M/2)` with `1/eps` an integer; returns `eps`.
pub fn detect_uniform_grid(xs: &[f64]) -> Option<f64> {
    let m = xs.len();
    if m < 2 {
        return None;
    }
    let inv = reciprocal_integer(xs[1] - xs[0])?;
    let eps = 1.0 / inv as f64;
    let half = m as f64 / 2.0;
    xs.iter()
        .enumerate()
        .all(|(i, x)| (x - eps * (i as f64 - half)).abs() <= 1e-12 * x.abs().max(1.0))
        .then_some(eps)
}

/// How the outputs of a 1D transform map onto the sample list.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Layout {
    /// One output per sample.
    Flat,
    /// Samples are an `ma x ma` tensor grid; the axis is the slow index.
    Slow(usize),
    /// As above; the axis is the fast index.
    Fast(usize),
}

/// Transform of a length-`N` centered vector to all samples along one axis.
#[derive(Debug)]
pub(crate) enum AxisTransform {
    Nfft(NfftPlan),
    Uniform { plan: UniformPlan, layout: Layout },
}

impl AxisTransform {
    pub fn nfft(n: usize, scaled: &[f64], sigma: f64, w: usize) -> Result<Self> {
        let pts: Vec<f64> = scaled.iter().map(|&x| wrap(x)).collect();
        Ok(Self::Nfft(plan_nfft(&[n], &pts, sigma, w)?))
    }

    pub fn uniform_flat(n: usize, m: usize, eps: f64) -> Result<Self> {
        Ok(Self::Uniform { plan: UniformPlan::new(n, m, eps, n)?, layout: Layout::Flat })
    }

    pub fn uniform_tensor(n: usize, ma: usize, eps: f64, slow: bool) -> Result<Self> {
        let layout = if slow { Layout::Slow(ma) } else { Layout::Fast(ma) };
        Ok(Self::Uniform { plan: UniformPlan::new(n, ma, eps, n)?, layout })
    }

    pub fn forward(&self, v: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        match self {
            Self::Nfft(plan) => plan.forward_into(v, out),
            Self::Uniform { plan, layout } => {
                let mut work = Vec::new();
                match *layout {
                    Layout::Flat => plan.forward_into(v, out, &mut work),
                    Layout::Slow(ma) | Layout::Fast(ma) => {
                        let mut t = vec![Complex64::default(); ma];
                        plan.forward_into(v, &mut t, &mut work)?;
                        let slow = matches!(layout, Layout::Slow(_));
                        for (idx, o) in out.iter_mut().enumerate() {
                            *o = if slow { t[idx / ma] } else { t[idx % ma] };
                        }
                        Ok(())
                    }
                }
            }
        }
    }

    pub fn adjoint(&self, u: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        match self {
            Self::Nfft(plan) => plan.adjoint_into(u, out),
            Self::Uniform { plan, layout } => {
                let mut work = Vec::new();
                match *layout {
                    Layout::Flat => plan.adjoint_into(u, out, &mut work),
                    Layout::Slow(ma) | Layout::Fast(ma) => {
                        let mut s = vec![Complex64::default(); ma];
                        let slow = matches!(layout, Layout::Slow(_));
                        for (idx, v) in u.iter().enumerate() {
                            s[if slow { idx / ma } else { idx % ma }] += v;
                        }
                        plan.adjoint_into(&s, out, &mut work)
                    }
                }
            }
        }
    }
}

/// Transform of an `N x N` grid (rows y, columns x) to all samples.
#[derive(Debug)]
pub(crate) enum GridTransform {
    Nfft(NfftPlan),
    /// Tensor grid with sample `i * ma + j` at `(g_i, g_j)` = `(xi_x, xi_y)`.
    Uniform { plan: UniformPlan, n: usize, ma: usize },
}

impl GridTransform {
    /// `scaled` holds `(xi_x, xi_y)` pairs already divided by `N`.
    pub fn nfft(n: usize, scaled: &[f64], sigma: f64, w: usize) -> Result<Self> {
        let pts: Vec<f64> = scaled.chunks(2).flat_map(|c| [wrap(c[1]), wrap(c[0])]).collect();
        Ok(Self::Nfft(plan_nfft(&[n, n], &pts, sigma, w)?))
    }

    pub fn uniform(n: usize, ma: usize, eps: f64) -> Result<Self> {
        Ok(Self::Uniform { plan: UniformPlan::new(n, ma, eps, n)?, n, ma })
    }

    pub fn forward(&self, x: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        match self {
            Self::Nfft(plan) => plan.forward_into(x, out),
            Self::Uniform { plan, n, ma } => {
                let (n, ma) = (*n, *ma);
                // along y for each column kx: t[kx][j]
                let t: Vec<Vec<Complex64>> = (0..n)
                    .into_par_iter()
                    .map(|kx| {
                        let col: Vec<Complex64> = (0..n).map(|ky| x[ky * n + kx]).collect();
                        let mut o = vec![Complex64::default(); ma];
                        let mut work = Vec::new();
                        plan.forward_into(&col, &mut o, &mut work).map(|_| o)
                    })
                    .collect::<Result<_>>()?;
                // along x for each j: out[i * ma + j]
                let cols: Vec<Vec<Complex64>> = (0..ma)
                    .into_par_iter()
                    .map(|j| {
                        let row: Vec<Complex64> = (0..n).map(|kx| t[kx][j]).collect();
                        let mut o = vec![Complex64::default(); ma];
                        let mut work = Vec::new();
                        plan.forward_into(&row, &mut o, &mut work).map(|_| o)
                    })
                    .collect::<Result<_>>()?;
                for (j, c) in cols.iter().enumerate() {
                    for (i, v) in c.iter().enumerate() {
                        out[i * ma + j] = *v;
                    }
                }
                Ok(())
            }
        }
    }

    pub fn adjoint(&self, u: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        match self {
            Self::Nfft(plan) => plan.adjoint_into(u, out),
            Self::Uniform { plan, n, ma } => {
                let (n, ma) = (*n, *ma);
                // s[j][kx] from the samples u[i * ma + j] over i
                let s: Vec<Vec<Complex64>> = (0..ma)
                    .into_par_iter()
                    .map(|j| {
                        let col: Vec<Complex64> = (0..ma).map(|i| u[i * ma + j]).collect();
                        let mut o = vec![Complex64::default(); n];
                        let mut work = Vec::new();
                        plan.adjoint_into(&col, &mut o, &mut work).map(|_| o)
                    })
                    .collect::<Result<_>>()?;
                let cols: Vec<Vec<Complex64>> = (0..n)
                    .into_par_iter()
                    .map(|kx| {
                        let v: Vec<Complex64> = (0..ma).map(|j| s[j][kx]).collect();
                        let mut o = vec![Complex64::default(); n];
                        let mut work = Vec::new();
                        plan.adjoint_into(&v, &mut o, &mut work).map(|_| o)
                    })
                    .collect::<Result<_>>()?;
                for (kx, c) in cols.iter().enumerate() {
                    for (ky, v) in c.iter().enumerate() {
                        out[ky * n + kx] = *v;
                    }
                }
                Ok(())
            }
        }
    }
}

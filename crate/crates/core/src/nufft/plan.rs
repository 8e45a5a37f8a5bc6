use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::direct::{validate_lengths, validate_points};
use crate::error::{check_len, Error, Result};

pub const DEFAULT_SIGMA: f64 = 2.0;
pub const DEFAULT_HALF_WIDTH: usize = 6;

/// Points per spreading chunk in the adjoint. The chunking depends only on
/// the number of points, so the reduction order is fixed.
const SPREAD_CHUNK: usize = 8192;

/// Modified Bessel function of the first kind, order zero.
pub(crate) fn bessel_i0(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    while term > 1e-17 * sum {
        term *= q / (k * k);
        sum += term;
        k += 1.0;
    }
    sum
}

/// Kaiser-Bessel window for one axis with oversampled length `n`.
#[derive(Debug, Clone)]
struct Window {
    n: usize,
    m: usize,
    b: f64,
}

impl Window {
    fn new(n: usize, m: usize, sigma: f64) -> Self {
        Self { n, m, b: PI * (2.0 - 1.0 / sigma) }
    }

    /// Spatial window at `x` (in units where the grid spacing is `1/n`).
    fn spatial(&self, x: f64) -> f64 {
        let m = self.m as f64;
        let arg = m * m - (self.n as f64 * x).powi(2);
        if arg < 0.0 {
            return 0.0;
        }
        let s = arg.sqrt();
        if s < 1e-8 {
            self.b / PI
        } else {
            (self.b * s).sinh() / (PI * s)
        }
    }

    /// Fourier coefficient of the window at frequency `k`.
    fn fourier(&self, k: f64) -> f64 {
        let t = 2.0 * PI * k / self.n as f64;
        let m = self.m as f64;
        bessel_i0(m * (self.b * self.b - t * t).max(0.0).sqrt()) / self.n as f64
    }

    /// First grid index and the `2m + 2` weights touching `xi`.
    fn taps(&self, xi: f64, out: &mut [f64]) -> i64 {
        let nf = self.n as f64;
        let l0 = (nf * xi).floor() as i64 - self.m as i64;
        for (j, w) in out.iter_mut().enumerate() {
            let l = l0 + j as i64;
            *w = self.spatial(xi - l as f64 / nf);
        }
        l0
    }
}

/// Precomputed gridding NFFT for fixed points and transform lengths.
///
/// Grids are laid out over `k = -N/2 .. N/2 - 1` per axis, last axis fastest;
/// in 2D each point is `(xi_0, xi_1)` matching the axis order.
pub struct NfftPlan {
    n: Vec<usize>,
    over: Vec<usize>,
    sigma: f64,
    half_width: usize,
    m: usize,
    /// Per axis: first tap index for each point.
    starts: Vec<Vec<i64>>,
    /// Per axis: `2w + 2` weights for each point.
    weights: Vec<Vec<f64>>,
    /// Per axis: `1 / (n phi^(k))` for `k = -N/2 .. N/2 - 1`.
    deconv: Vec<Vec<f64>>,
    fwd: Vec<Arc<dyn Fft<f64>>>,
    inv: Vec<Arc<dyn Fft<f64>>>,
}

impl std::fmt::Debug for NfftPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NfftPlan")
            .field("n", &self.n)
            .field("oversampled", &self.over)
            .field("sigma", &self.sigma)
            .field("half_width", &self.half_width)
            .field("points", &self.m)
            .finish()
    }
}

/// Plans an NFFT over lengths `n` (one or two axes) at the given points,
/// with oversampling `sigma` and window half-width `w`.
pub fn plan_nfft(n: &[usize], points: &[f64], sigma: f64, w: usize) -> Result<NfftPlan> {
    validate_lengths(n)?;
    if !(sigma >= 1.25) {
        return Err(Error::Parameter(format!("oversampling factor {sigma} below 1.25")));
    }
    if w < 2 {
        return Err(Error::Parameter(format!("window half-width {w} below 2")));
    }
    let dim = n.len();
    let m = validate_points(points, dim)?;
    let over: Vec<usize> = n
        .iter()
        .map(|&k| {
            let o = (sigma * k as f64).ceil() as usize;
            o + o % 2
        })
        .collect();
    let taps = 2 * w + 2;
    let mut planner = FftPlanner::new();
    let mut starts = Vec::with_capacity(dim);
    let mut weights = Vec::with_capacity(dim);
    let mut deconv = Vec::with_capacity(dim);
    let mut fwd = Vec::with_capacity(dim);
    let mut inv = Vec::with_capacity(dim);
    for d in 0..dim {
        let win = Window::new(over[d], w, sigma);
        let per_point: Vec<(i64, Vec<f64>)> = (0..m)
            .into_par_iter()
            .map(|i| {
                let mut ws = vec![0.0; taps];
                let l0 = win.taps(points[i * dim + d], &mut ws);
                (l0, ws)
            })
            .collect();
        starts.push(per_point.iter().map(|(l, _)| *l).collect());
        weights.push(per_point.into_iter().flat_map(|(_, ws)| ws).collect());
        let half = (n[d] / 2) as f64;
        deconv.push((0..n[d]).map(|j| 1.0 / (over[d] as f64 * win.fourier(j as f64 - half))).collect());
        fwd.push(planner.plan_fft_forward(over[d]));
        inv.push(planner.plan_fft_inverse(over[d]));
    }
    Ok(NfftPlan { n: n.to_vec(), over, sigma, half_width: w, m, starts, weights, deconv, fwd, inv })
}

impl NfftPlan {
    pub fn lengths(&self) -> &[usize] {
        &self.n
    }

    pub fn oversampled_lengths(&self) -> &[usize] {
        &self.over
    }

    pub fn num_points(&self) -> usize {
        self.m
    }

    pub fn grid_len(&self) -> usize {
        self.n.iter().product()
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    fn taps(&self) -> usize {
        2 * self.half_width + 2
    }

    pub fn forward(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut y = vec![Complex64::default(); self.m];
        self.forward_into(x, &mut y)?;
        Ok(y)
    }

    pub fn adjoint(&self, y: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut x = vec![Complex64::default(); self.grid_len()];
        self.adjoint_into(y, &mut x)?;
        Ok(x)
    }

    /// Approximates `ndft_forward` at the planned points.
    pub fn forward_into(&self, x: &[Complex64], y: &mut [Complex64]) -> Result<()> {
        check_len(self.grid_len(), x.len())?;
        check_len(self.m, y.len())?;
        let mut g = vec![Complex64::default(); self.over.iter().product()];
        // deconvolve and scatter k into slot k mod n
        if self.n.len() == 1 {
            let (n, o) = (self.n[0], self.over[0]);
            for (j, v) in x.iter().enumerate() {
                g[(j + o - n / 2) % o] = v * self.deconv[0][j];
            }
        } else {
            let (ny, nx, oy, ox) = (self.n[0], self.n[1], self.over[0], self.over[1]);
            for (jy, row) in x.chunks(nx).enumerate() {
                let base = ((jy + oy - ny / 2) % oy) * ox;
                let dy = self.deconv[0][jy];
                for (jx, v) in row.iter().enumerate() {
                    g[base + (jx + ox - nx / 2) % ox] = v * (dy * self.deconv[1][jx]);
                }
            }
        }
        self.fft(&mut g, &self.fwd);
        self.interpolate(&g, y);
        Ok(())
    }

    /// Approximates `ndft_adjoint`; the exact adjoint of [`NfftPlan::forward_into`].
    pub fn adjoint_into(&self, y: &[Complex64], x: &mut [Complex64]) -> Result<()> {
        check_len(self.m, y.len())?;
        check_len(self.grid_len(), x.len())?;
        let mut g = self.spread(y);
        self.fft(&mut g, &self.inv);
        if self.n.len() == 1 {
            let (n, o) = (self.n[0], self.over[0]);
            for (j, v) in x.iter_mut().enumerate() {
                *v = g[(j + o - n / 2) % o] * self.deconv[0][j];
            }
        } else {
            let (ny, nx, oy, ox) = (self.n[0], self.n[1], self.over[0], self.over[1]);
            for (jy, row) in x.chunks_mut(nx).enumerate() {
                let base = ((jy + oy - ny / 2) % oy) * ox;
                let dy = self.deconv[0][jy];
                for (jx, v) in row.iter_mut().enumerate() {
                    *v = g[base + (jx + ox - nx / 2) % ox] * (dy * self.deconv[1][jx]);
                }
            }
        }
        Ok(())
    }

    fn fft(&self, g: &mut [Complex64], plans: &[Arc<dyn Fft<f64>>]) {
        if self.over.len() == 1 {
            plans[0].process(g);
            return;
        }
        let (oy, ox) = (self.over[0], self.over[1]);
        plans[1].process(g);
        let mut t = vec![Complex64::default(); g.len()];
        transpose(g, &mut t, oy, ox);
        plans[0].process(&mut t);
        transpose(&t, g, ox, oy);
    }

    fn interpolate(&self, g: &[Complex64], y: &mut [Complex64]) {
        let taps = self.taps();
        if self.n.len() == 1 {
            let o = self.over[0] as i64;
            y.par_iter_mut().enumerate().for_each(|(i, out)| {
                let l0 = self.starts[0][i];
                let ws = &self.weights[0][i * taps..(i + 1) * taps];
                *out = ws.iter().enumerate().map(|(j, w)| g[(l0 + j as i64).rem_euclid(o) as usize] * *w).sum();
            });
        } else {
            let (oy, ox) = (self.over[0] as i64, self.over[1] as i64);
            y.par_iter_mut().enumerate().for_each(|(i, out)| {
                let (ly, lx) = (self.starts[0][i], self.starts[1][i]);
                let wy = &self.weights[0][i * taps..(i + 1) * taps];
                let wx = &self.weights[1][i * taps..(i + 1) * taps];
                let mut acc = Complex64::default();
                for (a, wa) in wy.iter().enumerate() {
                    let row = (ly + a as i64).rem_euclid(oy) as usize * ox as usize;
                    let s: Complex64 = wx
                        .iter()
                        .enumerate()
                        .map(|(b, wb)| g[row + (lx + b as i64).rem_euclid(ox) as usize] * *wb)
                        .sum();
                    acc += s * *wa;
                }
                *out = acc;
            });
        }
    }

    fn spread(&self, y: &[Complex64]) -> Vec<Complex64> {
        let len: usize = self.over.iter().product();
        let chunks: Vec<Vec<Complex64>> = (0..self.m.div_ceil(SPREAD_CHUNK).max(1))
            .into_par_iter()
            .map(|c| {
                let mut g = vec![Complex64::default(); len];
                let range = c * SPREAD_CHUNK..((c + 1) * SPREAD_CHUNK).min(self.m);
                self.spread_range(y, range, &mut g);
                g
            })
            .collect();
        let mut iter = chunks.into_iter();
        let mut total = iter.next().expect("at least one chunk");
        for g in iter {
            total.iter_mut().zip(&g).for_each(|(a, b)| *a += b);
        }
        total
    }

    fn spread_range(&self, y: &[Complex64], range: std::ops::Range<usize>, g: &mut [Complex64]) {
        let taps = self.taps();
        if self.n.len() == 1 {
            let o = self.over[0] as i64;
            for i in range {
                let l0 = self.starts[0][i];
                for (j, w) in self.weights[0][i * taps..(i + 1) * taps].iter().enumerate() {
                    g[(l0 + j as i64).rem_euclid(o) as usize] += y[i] * *w;
                }
            }
        } else {
            let (oy, ox) = (self.over[0] as i64, self.over[1] as i64);
            for i in range {
                let (ly, lx) = (self.starts[0][i], self.starts[1][i]);
                let wy = &self.weights[0][i * taps..(i + 1) * taps];
                let wx = &self.weights[1][i * taps..(i + 1) * taps];
                for (a, wa) in wy.iter().enumerate() {
                    let row = (ly + a as i64).rem_euclid(oy) as usize * ox as usize;
                    let ya = y[i] * *wa;
                    for (b, wb) in wx.iter().enumerate() {
                        g[row + (lx + b as i64).rem_euclid(ox) as usize] += ya * *wb;
                    }
                }
            }
        }
    }
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    const B: usize = 32;
    for r0 in (0..rows).step_by(B) {
        for c0 in (0..cols).step_by(B) {
            for r in r0..(r0 + B).min(rows) {
                for c in c0..(c0 + B).min(cols) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}

//! The change-of-basis operator from coefficients in the interval-adapted
//! scaling-function basis at scale `J` to Fourier samples.
//!
//! Columns are ordered left boundary functions (`0..p`), interior translates
//! `k = n - N/2` (`p..N-p`), then right boundary functions, the last column
//! being the one at the edge. In 2D the coefficient array is flattened as
//! `c[iy * N + ix]` and sample points are `(xi_x, xi_y)`.

mod factors;
mod transform;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{check_len, Error, Result};
use crate::nufft::{DEFAULT_HALF_WIDTH, DEFAULT_SIGMA};
use crate::sampling::SamplingSet;
use crate::wavelet::Family;
use factors::AxisFactors;
use transform::{AxisTransform, GridTransform};

pub use transform::detect_uniform_grid;

/// Default cap on the number of entries [`densify`] will produce.
pub const DENSE_CAP: usize = 1 << 24;

/// A matrix-free linear map between complex vector spaces.
pub trait LinearOperator: Sync {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    fn forward_into(&self, x: &[Complex64], y: &mut [Complex64]) -> Result<()>;
    fn adjoint_into(&self, y: &[Complex64], x: &mut [Complex64]) -> Result<()>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UniformMode {
    /// Use the FFT reduction whenever the samples form a uniform grid.
    Auto,
    /// Always use the gridding NFFT.
    Never,
}

#[derive(Debug, Clone)]
pub struct Freq2WaveOptions {
    /// Every coordinate must satisfy `|xi| <= bandwidth`.
    pub bandwidth: Option<f64>,
    /// Voronoi weights `mu_m`; rows are scaled by `sqrt(mu_m)`.
    pub weights: Option<Vec<f64>>,
    pub sigma: f64,
    pub half_width: usize,
    pub uniform: UniformMode,
}

impl Default for Freq2WaveOptions {
    fn default() -> Self {
        Self {
            bandwidth: None,
            weights: None,
            sigma: DEFAULT_SIGMA,
            half_width: DEFAULT_HALF_WIDTH,
            uniform: UniformMode::Auto,
        }
    }
}

#[derive(Debug)]
enum Kernel {
    One(AxisTransform),
    Two { grid: GridTransform, along_x: AxisTransform, along_y: AxisTransform },
}

/// Implicit `M x N` (1D) or `M x N^2` (2D) change-of-basis matrix.
#[derive(Debug)]
pub struct Freq2WaveOp {
    family: Family,
    j: u32,
    n: usize,
    samples: SamplingSet,
    sqrt_weights: Option<Vec<f64>>,
    /// x factors first; weights are folded into them only.
    axes: Vec<AxisFactors>,
    kernel: Kernel,
    uniform: bool,
}

/// Builds the operator for `samples` in the scale-`j` space of `family`.
pub fn freq2wave(samples: &SamplingSet, family: Family, j: u32, opts: &Freq2WaveOptions) -> Result<Freq2WaveOp> {
    if j > 30 {
        return Err(Error::Parameter(format!("scale J = {j} is too large")));
    }
    let n = 1usize << j;
    if n < family.min_space_len() {
        return Err(Error::ScaleTooSmall { j, min_len: family.min_space_len() });
    }
    if let Some(bw) = opts.bandwidth {
        if !(bw > 0.0) {
            return Err(Error::Parameter(format!("bandwidth must be positive, got {bw}")));
        }
        let max = samples.max_abs();
        if max > bw {
            return Err(Error::BandwidthExceeded { xi: max, bandwidth: bw });
        }
    }
    let m = samples.len();
    let sqrt_weights = match &opts.weights {
        Some(w) => {
            check_len(m, w.len())?;
            if let Some(bad) = w.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
                return Err(Error::Domain(format!("weights must be finite and nonnegative, got {bad}")));
            }
            Some(w.iter().map(|v| v.sqrt()).collect::<Vec<_>>())
        }
        None => None,
    };

    let dim = samples.dim();
    let mut axes = (0..dim)
        .map(|a| AxisFactors::build(family, j, &samples.axis(a)))
        .collect::<Result<Vec<_>>>()?;
    if let Some(w) = &sqrt_weights {
        axes[0].scale_rows(w);
    }

    let scale = 1.0 / n as f64;
    let auto = opts.uniform == UniformMode::Auto;
    let (kernel, uniform) = if dim == 1 {
        let xs = samples.axis(0);
        match detect_uniform_grid(&xs).filter(|_| auto && m >= n) {
            Some(eps) => (Kernel::One(AxisTransform::uniform_flat(n, m, eps)?), true),
            None => {
                let scaled: Vec<f64> = xs.iter().map(|x| x * scale).collect();
                (Kernel::One(AxisTransform::nfft(n, &scaled, opts.sigma, opts.half_width)?), false)
            }
        }
    } else {
        match detect_uniform_tensor(samples).filter(|(ma, _)| auto && *ma >= n) {
            Some((ma, eps)) => (
                Kernel::Two {
                    grid: GridTransform::uniform(n, ma, eps)?,
                    along_x: AxisTransform::uniform_tensor(n, ma, eps, true)?,
                    along_y: AxisTransform::uniform_tensor(n, ma, eps, false)?,
                },
                true,
            ),
            None => {
                let scaled: Vec<f64> = samples.coords().iter().map(|x| x * scale).collect();
                let xs: Vec<f64> = samples.axis(0).iter().map(|x| x * scale).collect();
                let ys: Vec<f64> = samples.axis(1).iter().map(|x| x * scale).collect();
                (
                    Kernel::Two {
                        grid: GridTransform::nfft(n, &scaled, opts.sigma, opts.half_width)?,
                        along_x: AxisTransform::nfft(n, &xs, opts.sigma, opts.half_width)?,
                        along_y: AxisTransform::nfft(n, &ys, opts.sigma, opts.half_width)?,
                    },
                    false,
                )
            }
        }
    };

    Ok(Freq2WaveOp { family, j, n, samples: samples.clone(), sqrt_weights, axes, kernel, uniform })
}

/// Recognizes the tensor grid `i * Ma + j -> (g_i, g_j)` with `g` uniform.
fn detect_uniform_tensor(samples: &SamplingSet) -> Option<(usize, f64)> {
    let m = samples.len();
    let ma = (m as f64).sqrt().round() as usize;
    if ma * ma != m {
        return None;
    }
    let g: Vec<f64> = (0..ma).map(|j| samples.point(j)[1]).collect();
    let eps = detect_uniform_grid(&g)?;
    let matches = (0..m).all(|idx| {
        let pt = samples.point(idx);
        pt[0] == g[idx / ma] && pt[1] == g[idx % ma]
    });
    matches.then_some((ma, eps))
}

impl Freq2WaveOp {
    pub fn family(&self) -> Family {
        self.family
    }

    pub fn scale(&self) -> u32 {
        self.j
    }

    /// Coefficients per axis, `2^J`.
    pub fn side_len(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.samples.dim()
    }

    pub fn samples(&self) -> &SamplingSet {
        &self.samples
    }

    /// `sqrt(mu_m)` when the operator was built with weights.
    pub fn row_weights(&self) -> Option<&[f64]> {
        self.sqrt_weights.as_deref()
    }

    pub fn is_weighted(&self) -> bool {
        self.sqrt_weights.is_some()
    }

    /// Whether the interior transform uses the exact uniform-grid FFT.
    pub fn uses_uniform_fast_path(&self) -> bool {
        self.uniform
    }

    fn boundary_slots(&self) -> Vec<usize> {
        let (n, p) = (self.n, self.axes[0].p);
        (0..p).chain(n - p..n).collect()
    }

    fn is_interior(&self, slot: usize) -> bool {
        let p = self.axes[0].p;
        slot >= p && slot < self.n - p
    }

    fn forward_1d(&self, t: &AxisTransform, x: &[Complex64], y: &mut [Complex64]) -> Result<()> {
        let f = &self.axes[0];
        let (n, p) = (self.n, f.p);
        let mut interior = x.to_vec();
        for s in self.boundary_slots() {
            interior[s] = Complex64::default();
        }
        t.forward(&interior, y)?;
        y.par_iter_mut().enumerate().for_each(|(m, out)| {
            let mut acc = f.d[m] * *out;
            for c in 0..p {
                acc += f.left[m * p + c] * x[c] + f.right[m * p + c] * x[n - p + c];
            }
            *out = acc;
        });
        Ok(())
    }

    fn adjoint_1d(&self, t: &AxisTransform, y: &[Complex64], x: &mut [Complex64]) -> Result<()> {
        let f = &self.axes[0];
        let (n, p) = (self.n, f.p);
        let u: Vec<Complex64> = y.iter().zip(&f.d).map(|(v, d)| d.conj() * v).collect();
        t.adjoint(&u, x)?;
        for s in self.boundary_slots() {
            x[s] = (0..y.len()).map(|m| f.boundary(m, s, n).conj() * y[m]).sum();
        }
        let _ = p;
        Ok(())
    }

    fn forward_2d(
        &self,
        grid: &GridTransform,
        along_x: &AxisTransform,
        along_y: &AxisTransform,
        x: &[Complex64],
        y: &mut [Complex64],
    ) -> Result<()> {
        let (fx, fy) = (&self.axes[0], &self.axes[1]);
        let n = self.n;
        let m = y.len();
        let mut inner = vec![Complex64::default(); n * n];
        for iy in (0..n).filter(|&s| self.is_interior(s)) {
            for ix in (0..n).filter(|&s| self.is_interior(s)) {
                inner[iy * n + ix] = x[iy * n + ix];
            }
        }
        grid.forward(&inner, y)?;
        y.par_iter_mut().enumerate().for_each(|(i, v)| *v *= fx.d[i] * fy.d[i]);
        let bslots = self.boundary_slots();
        if bslots.is_empty() {
            return Ok(());
        }

        let mut t = vec![Complex64::default(); m];
        let mut line = vec![Complex64::default(); n];
        // x boundary, y interior
        for &ix in &bslots {
            for (iy, l) in line.iter_mut().enumerate() {
                *l = if self.is_interior(iy) { x[iy * n + ix] } else { Complex64::default() };
            }
            along_y.forward(&line, &mut t)?;
            y.par_iter_mut().enumerate().for_each(|(i, v)| *v += fx.boundary(i, ix, n) * fy.d[i] * t[i]);
        }
        // y boundary, x interior
        for &iy in &bslots {
            for (ix, l) in line.iter_mut().enumerate() {
                *l = if self.is_interior(ix) { x[iy * n + ix] } else { Complex64::default() };
            }
            along_x.forward(&line, &mut t)?;
            y.par_iter_mut().enumerate().for_each(|(i, v)| *v += fy.boundary(i, iy, n) * fx.d[i] * t[i]);
        }
        // corners
        y.par_iter_mut().enumerate().for_each(|(i, v)| {
            let mut acc = Complex64::default();
            for &iy in &bslots {
                let inner: Complex64 = bslots.iter().map(|&ix| fx.boundary(i, ix, n) * x[iy * n + ix]).sum();
                acc += fy.boundary(i, iy, n) * inner;
            }
            *v += acc;
        });
        Ok(())
    }

    fn adjoint_2d(
        &self,
        grid: &GridTransform,
        along_x: &AxisTransform,
        along_y: &AxisTransform,
        y: &[Complex64],
        x: &mut [Complex64],
    ) -> Result<()> {
        let (fx, fy) = (&self.axes[0], &self.axes[1]);
        let n = self.n;
        let m = y.len();
        let u: Vec<Complex64> = (0..m).map(|i| (fx.d[i] * fy.d[i]).conj() * y[i]).collect();
        grid.adjoint(&u, x)?;
        let bslots = self.boundary_slots();
        if bslots.is_empty() {
            return Ok(());
        }
        for iy in 0..n {
            for ix in 0..n {
                if !self.is_interior(ix) || !self.is_interior(iy) {
                    x[iy * n + ix] = Complex64::default();
                }
            }
        }

        let mut u = vec![Complex64::default(); m];
        let mut line = vec![Complex64::default(); n];
        for &ix in &bslots {
            u.par_iter_mut().enumerate().for_each(|(i, v)| *v = (fx.boundary(i, ix, n) * fy.d[i]).conj() * y[i]);
            along_y.adjoint(&u, &mut line)?;
            for (iy, l) in line.iter().enumerate() {
                if self.is_interior(iy) {
                    x[iy * n + ix] = *l;
                }
            }
        }
        for &iy in &bslots {
            u.par_iter_mut().enumerate().for_each(|(i, v)| *v = (fy.boundary(i, iy, n) * fx.d[i]).conj() * y[i]);
            along_x.adjoint(&u, &mut line)?;
            for (ix, l) in line.iter().enumerate() {
                if self.is_interior(ix) {
                    x[iy * n + ix] = *l;
                }
            }
        }
        let pairs: Vec<(usize, usize)> = bslots.iter().flat_map(|&iy| bslots.iter().map(move |&ix| (iy, ix))).collect();
        let corner: Vec<Complex64> = pairs
            .par_iter()
            .map(|&(iy, ix)| (0..m).map(|i| (fx.boundary(i, ix, n) * fy.boundary(i, iy, n)).conj() * y[i]).sum())
            .collect();
        for ((iy, ix), v) in pairs.into_iter().zip(corner) {
            x[iy * n + ix] = v;
        }
        Ok(())
    }
}

impl LinearOperator for Freq2WaveOp {
    fn nrows(&self) -> usize {
        self.samples.len()
    }

    fn ncols(&self) -> usize {
        self.n.pow(self.samples.dim() as u32)
    }

    fn forward_into(&self, x: &[Complex64], y: &mut [Complex64]) -> Result<()> {
        check_len(self.ncols(), x.len())?;
        check_len(self.nrows(), y.len())?;
        match &self.kernel {
            Kernel::One(t) => self.forward_1d(t, x, y),
            Kernel::Two { grid, along_x, along_y } => self.forward_2d(grid, along_x, along_y, x, y),
        }
    }

    fn adjoint_into(&self, y: &[Complex64], x: &mut [Complex64]) -> Result<()> {
        check_len(self.nrows(), y.len())?;
        check_len(self.ncols(), x.len())?;
        match &self.kernel {
            Kernel::One(t) => self.adjoint_1d(t, y, x),
            Kernel::Two { grid, along_x, along_y } => self.adjoint_2d(grid, along_x, along_y, y, x),
        }
    }
}

pub fn apply_forward<T: LinearOperator + ?Sized>(op: &T, x: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut y = vec![Complex64::default(); op.nrows()];
    op.forward_into(x, &mut y)?;
    Ok(y)
}

pub fn apply_adjoint<T: LinearOperator + ?Sized>(op: &T, y: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut x = vec![Complex64::default(); op.ncols()];
    op.adjoint_into(y, &mut x)?;
    Ok(x)
}

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn at(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.data.chunks(self.cols).map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn adjoint_mul_vec(&self, y: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); self.cols];
        for (row, v) in self.data.chunks(self.cols).zip(y) {
            for (o, a) in out.iter_mut().zip(row) {
                *o += a.conj() * v;
            }
        }
        out
    }
}

/// The explicit matrix, for testing; fails beyond `cap` entries.
pub fn densify(op: &Freq2WaveOp, cap: usize) -> Result<DenseMatrix> {
    let (rows, cols) = (op.nrows(), op.ncols());
    let entries = rows.saturating_mul(cols);
    if entries > cap {
        return Err(Error::CapExceeded { entries, cap });
    }
    let n = op.n;
    let data: Vec<Complex64> = (0..rows)
        .into_par_iter()
        .flat_map_iter(|m| {
            let pt = op.samples.point(m).to_vec();
            let fx = &op.axes[0];
            let row: Vec<Complex64> = if pt.len() == 1 {
                (0..n).map(|s| fx.entry(m, s, n, pt[0])).collect()
            } else {
                let fy = &op.axes[1];
                let ex: Vec<Complex64> = (0..n).map(|s| fx.entry(m, s, n, pt[0])).collect();
                (0..n).flat_map(|iy| {
                    let b = fy.entry(m, iy, n, pt[1]);
                    ex.iter().map(move |a| a * b).collect::<Vec<_>>()
                })
                .collect()
            };
            row
        })
        .collect();
    Ok(DenseMatrix { rows, cols, data })
}

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Result;
use crate::wavelet::{fourier_scaling, BoundaryFourier, Family, Side, DEFAULT_DEPTH, DEFAULT_TERMS};

/// Per-axis factors of the change-of-basis matrix for one coordinate of every
/// sample: the interior diagonal and the dense boundary blocks.
#[derive(Debug, Clone)]
pub(crate) struct AxisFactors {
    pub p: usize,
    /// `2^{-J/2} phi^(2^-J xi_m)`.
    pub d: Vec<Complex64>,
    /// `M x p`, row-major; column `c` is the boundary function `c` places
    /// from the left edge.
    pub left: Vec<Complex64>,
    /// `M x p`, row-major; column `c` is coefficient slot `N - p + c`.
    pub right: Vec<Complex64>,
}

impl AxisFactors {
    pub fn build(family: Family, j: u32, xi: &[f64]) -> Result<Self> {
        let p = family.boundary_width();
        let (lb, rb) = if p > 0 {
            (Some(BoundaryFourier::new(family, Side::Left)?), Some(BoundaryFourier::new(family, Side::Right)?))
        } else {
            (None, None)
        };

        // Many sampling patterns repeat coordinates along an axis, so every
        // distinct value is evaluated once.
        let mut slot_of: HashMap<u64, usize> = HashMap::new();
        let mut unique = Vec::new();
        let index: Vec<usize> = xi
            .iter()
            .map(|x| {
                *slot_of.entry(x.to_bits()).or_insert_with(|| {
                    unique.push(*x);
                    unique.len() - 1
                })
            })
            .collect();

        let scale = 0.5f64.powi(j as i32);
        let amp = scale.sqrt();
        let rows: Vec<(Complex64, Vec<Complex64>, Vec<Complex64>)> = unique
            .par_iter()
            .map(|&x| {
                let arg = scale * x;
                let d = amp * fourier_scaling(family, arg, DEFAULT_TERMS);
                let mut left = vec![Complex64::default(); p];
                let mut right = vec![Complex64::default(); p];
                if let (Some(lb), Some(rb)) = (&lb, &rb) {
                    let mut tmp = vec![Complex64::default(); p];
                    lb.eval_into(arg, DEFAULT_DEPTH, &mut tmp);
                    let ph = Complex64::from_polar(amp, PI * x);
                    for (o, t) in left.iter_mut().zip(&tmp) {
                        *o = ph * t;
                    }
                    rb.eval_into(arg, DEFAULT_DEPTH, &mut tmp);
                    let ph = Complex64::from_polar(amp, -PI * x);
                    for (c, o) in right.iter_mut().enumerate() {
                        *o = ph * tmp[p - 1 - c];
                    }
                }
                (d, left, right)
            })
            .collect();

        let m = xi.len();
        let mut out = AxisFactors {
            p,
            d: Vec::with_capacity(m),
            left: Vec::with_capacity(m * p),
            right: Vec::with_capacity(m * p),
        };
        for &u in &index {
            let (d, l, r) = &rows[u];
            out.d.push(*d);
            out.left.extend_from_slice(l);
            out.right.extend_from_slice(r);
        }
        Ok(out)
    }

    pub fn scale_rows(&mut self, w: &[f64]) {
        let p = self.p;
        for (m, &s) in w.iter().enumerate() {
            self.d[m] *= s;
            for c in 0..p {
                self.left[m * p + c] *= s;
                self.right[m * p + c] *= s;
            }
        }
    }

    /// Entry for boundary coefficient slot `slot` (`< p` or `>= n - p`).
    #[inline]
    pub fn boundary(&self, m: usize, slot: usize, n: usize) -> Complex64 {
        if slot < self.p {
            self.left[m * self.p + slot]
        } else {
            self.right[m * self.p + slot + self.p - n]
        }
    }

    /// Full row entry for any coefficient slot, with the interior phase
    /// computed from the unscaled frequency.
    pub fn entry(&self, m: usize, slot: usize, n: usize, xi: f64) -> Complex64 {
        if slot < self.p || slot >= n - self.p {
            self.boundary(m, slot, n)
        } else {
            let k = slot as f64 - (n / 2) as f64;
            self.d[m] * Complex64::from_polar(1.0, -2.0 * PI * k * xi / n as f64)
        }
    }
}

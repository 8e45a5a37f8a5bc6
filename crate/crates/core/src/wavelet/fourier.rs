//! Fourier transforms `F[f](xi) = int f(x) exp(-2 pi i xi x) dx` of interior
//! and boundary scaling functions.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::boundary::{boundary_filters, BoundaryFilterSet, Side};
use super::family::Family;
use crate::error::Result;

/// Default number of factors in the infinite product for `phi^`.
pub const DEFAULT_TERMS: usize = 48;
/// Default depth of the boundary-function recursion.
pub const DEFAULT_DEPTH: usize = 30;

/// Once the product argument drops below this, the remaining factors are
/// replaced by their first-order limit `exp(-2 pi i mu1 x)`.
const TAIL_ARGUMENT: f64 = 1e-10;

/// First moment `sum_k k h_k`, which equals `int x phi(x) dx`.
fn filter_first_moment(family: Family) -> f64 {
    let offset = family.filter_offset();
    family
        .filter()
        .iter()
        .enumerate()
        .map(|(j, h)| h * (offset + j as i64) as f64)
        .sum()
}

#[inline]
fn cis(theta: f64) -> Complex64 {
    let (s, c) = theta.sin_cos();
    Complex64::new(c, s)
}

/// Low-pass filter `m0(xi) = sum_k h_k exp(-2 pi i k xi)`.
pub fn low_pass(family: Family, xi: f64) -> Complex64 {
    let offset = family.filter_offset();
    family
        .filter()
        .iter()
        .enumerate()
        .map(|(j, h)| *h * cis(-2.0 * PI * (offset + j as i64) as f64 * xi))
        .sum()
}

fn haar_closed_form(xi: f64) -> Complex64 {
    if xi == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    // (1 - e^{-2 pi i xi}) / (2 pi i xi) = e^{-i pi xi} sin(pi xi) / (pi xi)
    let theta = PI * xi;
    cis(-theta) * (theta.sin() / theta)
}

/// `phi^(xi)` of the family's scaling function; Haar uses its closed form and
/// Daubechies families at most `terms` factors of `prod_{j>=1} m0(2^-j xi)`,
/// closed with a first-moment tail factor.
pub fn fourier_scaling(family: Family, xi: f64, terms: usize) -> Complex64 {
    match family {
        Family::Haar => haar_closed_form(xi),
        Family::Daubechies(_) => {
            // phi^(xi) = acc * phi^(arg) throughout, and once arg is tiny
            // phi^(arg) = 1 - 2 pi i mu1 arg + O(arg^2).
            let mut acc = Complex64::new(1.0, 0.0);
            let mut arg = xi;
            for _ in 0..terms.max(1) {
                if arg.abs() < TAIL_ARGUMENT {
                    break;
                }
                arg *= 0.5;
                acc *= low_pass(family, arg);
            }
            acc * cis(-2.0 * PI * filter_first_moment(family) * arg)
        }
    }
}

/// `F[phi_{J,k}](xi) = 2^{-J/2} exp(-2 pi i k 2^{-J} xi) phi^(2^{-J} xi)`.
pub fn fourier_scaling_dilated(family: Family, j: u32, k: i64, xi: f64) -> Complex64 {
    let scale = 0.5f64.powi(j as i32);
    let arg = scale * xi;
    scale.sqrt() * cis(-2.0 * PI * k as f64 * arg) * fourier_scaling(family, arg, DEFAULT_TERMS)
}

/// Tensor-product transform `phi^(xi_x) phi^(xi_y)`.
pub fn fourier_scaling_2d(family: Family, xi: (f64, f64)) -> Complex64 {
    fourier_scaling(family, xi.0, DEFAULT_TERMS) * fourier_scaling(family, xi.1, DEFAULT_TERMS)
}

/// Transforms of the `p` boundary functions at `xi = 0`, i.e. their integrals.
pub fn boundary_fourier_at_zero(family: Family, side: Side) -> Result<Vec<Complex64>> {
    let set = boundary_filters(family, side)?;
    Ok(set.fixed_point_at_zero()?.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
}

/// Transforms of the `p` boundary functions at `xi`, entry `k` for the
/// function `k` places from the edge.
pub fn fourier_boundary(family: Family, side: Side, xi: f64, depth: usize) -> Result<Vec<Complex64>> {
    let eval = BoundaryFourier::new(family, side)?;
    let mut out = vec![Complex64::new(0.0, 0.0); eval.width()];
    eval.eval_into(xi, depth, &mut out);
    Ok(out)
}

/// Reusable evaluator for boundary transforms; keeps the recursion matrices
/// and the fixed point so repeated evaluations only pay for the recursion.
#[derive(Debug, Clone)]
pub struct BoundaryFourier {
    family: Family,
    side: Side,
    set: &'static BoundaryFilterSet,
    at_zero: Vec<f64>,
}

impl BoundaryFourier {
    pub fn new(family: Family, side: Side) -> Result<Self> {
        let set = boundary_filters(family, side)?;
        let at_zero = set.fixed_point_at_zero()?;
        Ok(Self { family, side, set, at_zero })
    }

    pub fn width(&self) -> usize {
        self.set.p
    }

    /// Evaluates `U^depth v1(0) + sum_{l < depth} U^l V v2(xi / 2^{l+1})`.
    pub fn eval_into(&self, xi: f64, depth: usize, out: &mut [Complex64]) {
        let p = self.set.p;
        let cols = self.set.interior_cols();
        let depth = depth.max(1);

        // phi^ at xi / 2^l for l = 1..=depth, built from the smallest scale up.
        let mut phis = vec![Complex64::new(0.0, 0.0); depth + 1];
        phis[depth] = fourier_scaling(self.family, xi * 0.5f64.powi(depth as i32), DEFAULT_TERMS);
        for l in (1..depth).rev() {
            phis[l] = low_pass(self.family, xi * 0.5f64.powi(l as i32 + 1)) * phis[l + 1];
        }

        let mut acc: Vec<Complex64> = self.at_zero.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let mut next = vec![Complex64::new(0.0, 0.0); p];
        let mut v2 = vec![Complex64::new(0.0, 0.0); cols];
        for l in (0..depth).rev() {
            let eta = xi * 0.5f64.powi(l as i32 + 1);
            for (j, slot) in v2.iter_mut().enumerate() {
                let m = (p + j) as f64;
                let phase = match self.side {
                    Side::Left => cis(-2.0 * PI * m * eta),
                    Side::Right => cis(2.0 * PI * (m + 1.0) * eta),
                };
                *slot = phis[l + 1] * phase;
            }
            for (k, nk) in next.iter_mut().enumerate() {
                let mut s = Complex64::new(0.0, 0.0);
                for (i, a) in acc.iter().enumerate() {
                    s += self.set.u[k * p + i] * a;
                }
                for (j, w) in v2.iter().enumerate().take(2 * k + 1) {
                    s += self.set.v[k * cols + j] * w;
                }
                *nk = s;
            }
            std::mem::swap(&mut acc, &mut next);
        }
        out.copy_from_slice(&acc);
    }
}

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{check_len, Error, Result};

pub(crate) fn validate_points(points: &[f64], dim: usize) -> Result<usize> {
    if dim == 0 || points.len() % dim != 0 {
        return Err(Error::Shape { expected: dim, actual: points.len() % dim.max(1) });
    }
    if let Some(bad) = points.iter().find(|x| !(-0.5..0.5).contains(*x)) {
        return Err(Error::Domain(format!("scaled frequency {bad} outside [-1/2, 1/2)")));
    }
    Ok(points.len() / dim)
}

pub(crate) fn validate_lengths(n: &[usize]) -> Result<usize> {
    if n.is_empty() || n.len() > 2 {
        return Err(Error::Parameter(format!("transform dimension must be 1 or 2, got {}", n.len())));
    }
    if let Some(bad) = n.iter().find(|&&k| k == 0 || k % 2 != 0) {
        return Err(Error::Parameter(format!("transform lengths must be even and positive, got {bad}")));
    }
    Ok(n.iter().product())
}

/// `e^{-2 pi i k xi}` for `k = -N/2 .. N/2 - 1`.
fn phases(xi: f64, n: usize, sign: f64) -> Vec<Complex64> {
    (0..n)
        .map(|j| {
            let k = j as f64 - (n / 2) as f64;
            Complex64::from_polar(1.0, sign * 2.0 * PI * k * xi)
        })
        .collect()
}

/// Direct NDFT `y_m = sum_k x_k exp(-2 pi i k . xi_m)`.
///
/// `points` holds `n.len()` coordinates per point; `x` is laid out over
/// `k = -N/2 .. N/2 - 1` per axis with the last axis fastest.
pub fn ndft_forward(points: &[f64], n: &[usize], x: &[Complex64]) -> Result<Vec<Complex64>> {
    let total = validate_lengths(n)?;
    let dim = n.len();
    let m = validate_points(points, dim)?;
    check_len(total, x.len())?;
    Ok((0..m)
        .into_par_iter()
        .map(|i| {
            let xi = &points[i * dim..(i + 1) * dim];
            if dim == 1 {
                phases(xi[0], n[0], -1.0).iter().zip(x).map(|(e, v)| e * v).sum()
            } else {
                let ey = phases(xi[0], n[0], -1.0);
                let ex = phases(xi[1], n[1], -1.0);
                x.chunks(n[1])
                    .zip(&ey)
                    .map(|(row, a)| a * row.iter().zip(&ex).map(|(v, b)| v * b).sum::<Complex64>())
                    .sum()
            }
        })
        .collect())
}

/// Direct adjoint NDFT `z_k = sum_m y_m exp(+2 pi i k . xi_m)`.
pub fn ndft_adjoint(points: &[f64], n: &[usize], y: &[Complex64]) -> Result<Vec<Complex64>> {
    let total = validate_lengths(n)?;
    let dim = n.len();
    let m = validate_points(points, dim)?;
    check_len(m, y.len())?;
    let out = (0..total)
        .into_par_iter()
        .map(|flat| {
            let (ky, kx) = if dim == 1 { (0, flat) } else { (flat / n[1], flat % n[1]) };
            let kx = kx as f64 - (n[dim - 1] / 2) as f64;
            let ky = if dim == 1 { 0.0 } else { ky as f64 - (n[0] / 2) as f64 };
            (0..m)
                .map(|i| {
                    let arg = if dim == 1 {
                        kx * points[i]
                    } else {
                        ky * points[2 * i] + kx * points[2 * i + 1]
                    };
                    y[i] * Complex64::from_polar(1.0, 2.0 * PI * arg)
                })
                .sum()
        })
        .collect();
    Ok(out)
}

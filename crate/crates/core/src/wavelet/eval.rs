//! Point values of scaling functions on dyadic grids and evaluation of
//! coefficient vectors on `[-1/2, 1/2]`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::boundary::{boundary_filters, BoundaryFilterSet, Side};
use super::family::Family;
use crate::error::{check_len, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    Interior,
    Left(usize),
    Right(usize),
}

/// Samples of one scaling function at `x = start + i / 2^resolution`,
/// covering its support `[start, start + span]`.
#[derive(Debug, Clone)]
pub struct FunctionTable {
    pub family: Family,
    pub kind: TableKind,
    pub resolution: u32,
    pub start: i64,
    pub values: Vec<f64>,
}

impl FunctionTable {
    /// Support `[a, b]` in integer units.
    pub fn support(&self) -> (i64, i64) {
        let span = ((self.values.len() - 1) >> self.resolution) as i64;
        (self.start, self.start + span)
    }

    /// Value at `x = i / 2^resolution`; zero outside the support.
    pub fn at(&self, i: i64) -> f64 {
        let idx = i - (self.start << self.resolution);
        if idx < 0 {
            return 0.0;
        }
        self.values.get(idx as usize).copied().unwrap_or(0.0)
    }

    fn index(&self, idx: i64) -> f64 {
        if idx < 0 {
            return 0.0;
        }
        self.values.get(idx as usize).copied().unwrap_or(0.0)
    }
}

/// Values of the interior scaling function at `j / 2^r` over `[1 - p, p]`.
pub fn evaluate_scaling_dyadic(family: Family, r: u32) -> FunctionTable {
    let start = family.filter_offset();
    let mut table = FunctionTable {
        family,
        kind: TableKind::Interior,
        resolution: 0,
        start,
        values: integer_values(family),
    };
    for _ in 0..r {
        table = refine_interior(&table);
    }
    table
}

/// Values of the `p` boundary functions at one edge at `j / 2^r`.
///
/// Left functions live on `[0, p + k]`, right functions on `[-p - k, 0]`.
pub fn evaluate_boundary_dyadic(family: Family, side: Side, r: u32) -> Result<Vec<FunctionTable>> {
    let set = boundary_filters(family, side)?;
    // The right edge is the left construction for x -> 1 - x.
    let mirrored = |t: &FunctionTable| {
        let mut t = t.clone();
        if side == Side::Right {
            t.values.reverse();
        }
        t
    };
    let mut interior = evaluate_scaling_dyadic(family, 0);
    let mut tables = left_integer_values(set, &mirrored(&interior))?;
    for _ in 0..r {
        tables = refine_left(set, &tables, &mirrored(&interior));
        interior = refine_interior(&interior);
    }
    if side == Side::Right {
        for (k, t) in tables.iter_mut().enumerate() {
            t.values.reverse();
            t.start = -((set.p + k) as i64);
            t.kind = TableKind::Right(k);
        }
    }
    Ok(tables)
}

fn integer_values(family: Family) -> Vec<f64> {
    let p = family.vanishing_moments();
    if family == Family::Haar {
        return vec![1.0, 0.0];
    }
    // phi(n) = sum_j 2 h_{2n-j} phi(j) for n = 2-p .. p-1; the endpoints vanish.
    let h = family.filter();
    let offset = family.filter_offset();
    let tap = |j: i64| {
        let idx = j - offset;
        if idx >= 0 && (idx as usize) < h.len() {
            h[idx as usize]
        } else {
            0.0
        }
    };
    let lo = 2 - p as i64;
    let n = 2 * p - 2;
    let mut a = DMatrix::<f64>::zeros(n + 1, n);
    for row in 0..n {
        for col in 0..n {
            let (ni, nj) = (lo + row as i64, lo + col as i64);
            a[(row, col)] = 2.0 * tap(2 * ni - nj) - if row == col { 1.0 } else { 0.0 };
        }
        a[(n, row)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(n + 1);
    b[n] = 1.0;
    let sol = a.svd(true, true).solve(&b, 1e-14).expect("SVD computed with U and V");
    let mut out = Vec::with_capacity(2 * p);
    out.push(0.0);
    out.extend(sol.iter());
    out.push(0.0);
    out
}

fn refine_interior(table: &FunctionTable) -> FunctionTable {
    let family = table.family;
    let h = family.filter();
    let offset = family.filter_offset();
    let r = table.resolution;
    let len = 2 * (table.values.len() - 1) + 1;
    let values = (0..len as i64)
        .map(|i| {
            h.iter()
                .enumerate()
                .map(|(j, hk)| 2.0 * hk * table.index(i + ((table.start - offset - j as i64) << r)))
                .sum()
        })
        .collect();
    FunctionTable { resolution: r + 1, values, ..table.clone() }
}

fn left_integer_values(set: &BoundaryFilterSet, interior: &FunctionTable) -> Result<Vec<FunctionTable>> {
    let p = set.p;
    let s2 = std::f64::consts::SQRT_2;
    let big_p = DMatrix::from_fn(p, p, |k, l| s2 * set.big_h_at(k, l));

    // At x = 0 only the boundary functions contribute, so phi^L(0) spans
    // the eigenvalue-one eigenspace of P.
    let svd = (&big_p - DMatrix::identity(p, p)).svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let smallest = (0..p)
        .min_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]))
        .expect("p >= 2");
    let mut at0: Vec<f64> = v_t.row(smallest).iter().copied().collect();
    // The constant 1 = sum_k (int phi^L_k) phi^L_k(0) at the edge.
    let integrals = set.fixed_point_at_zero()?;
    let dot: f64 = at0.iter().zip(&integrals).map(|(a, b)| a * b).sum();
    if dot.abs() < 1e-12 {
        return Err(Error::Numerical("boundary values at the edge are degenerate".into()));
    }
    at0.iter_mut().for_each(|v| *v /= dot);

    let top = 2 * p - 1;
    let mut vals = vec![vec![0.0; top + 1]; p];
    for k in 0..p {
        vals[k][0] = at0[k];
    }
    for j in (1..top).rev() {
        for k in 0..p {
            if j >= p + k {
                continue;
            }
            let mut s = 0.0;
            if 2 * j <= top {
                s += (0..p).map(|l| big_p[(k, l)] * vals[l][2 * j]).sum::<f64>();
            }
            for m in p..=p + 2 * k {
                s += s2 * set.small_h_at(k, m) * interior.at(2 * j as i64 - m as i64);
            }
            vals[k][j] = s;
        }
    }
    Ok(vals
        .into_iter()
        .enumerate()
        .map(|(k, v)| FunctionTable {
            family: set.family,
            kind: TableKind::Left(k),
            resolution: 0,
            start: 0,
            values: v[..=p + k].to_vec(),
        })
        .collect())
}

fn refine_left(set: &BoundaryFilterSet, tables: &[FunctionTable], interior: &FunctionTable) -> Vec<FunctionTable> {
    // Both inputs are at the old resolution r.
    let p = set.p;
    let s2 = std::f64::consts::SQRT_2;
    let r = tables[0].resolution;
    tables
        .iter()
        .enumerate()
        .map(|(k, t)| {
            let len = ((p + k) << (r + 1)) + 1;
            let values = (0..len as i64)
                .map(|i| {
                    let mut s: f64 = (0..p).map(|l| s2 * set.big_h_at(k, l) * tables[l].index(i)).sum();
                    for m in p..=p + 2 * k {
                        // phi(2x - m) with 2x = i / 2^r
                        s += s2 * set.small_h_at(k, m) * interior.at(i - ((m as i64) << r));
                    }
                    s
                })
                .collect();
            FunctionTable { resolution: r + 1, values, ..t.clone() }
        })
        .collect()
}

/// A reconstruction sampled on the dyadic grid `-1/2 + i / 2^R`, `i = 0..=2^R`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionEvaluation {
    pub dim: usize,
    pub resolution: u32,
    /// 1D: `2^R + 1` values. 2D: row-major `(y, x)` array with `2^R + 1`
    /// entries per axis.
    pub values: Vec<f64>,
}

impl ReconstructionEvaluation {
    pub fn side_len(&self) -> usize {
        (1usize << self.resolution) + 1
    }

    pub fn points(&self) -> Vec<f64> {
        dyadic_grid(self.resolution)
    }
}

pub fn dyadic_grid(r: u32) -> Vec<f64> {
    let n = 1usize << r;
    (0..=n).map(|i| -0.5 + i as f64 / n as f64).collect()
}

/// Basis function samples on the output grid: `(first grid index, values)`.
struct Basis {
    rows: Vec<(usize, Vec<f64>)>,
}

impl Basis {
    fn new(family: Family, j: u32, r: u32) -> Result<Self> {
        let n = 1usize << j;
        if n < family.min_space_len() {
            return Err(Error::ScaleTooSmall { j, min_len: family.min_space_len() });
        }
        if r < j {
            return Err(Error::ResolutionTooCoarse { r, j });
        }
        let s = r - j;
        let grid = (1i64 << r) + 1;
        let scale = 2f64.powf(j as f64 / 2.0);
        let interior = evaluate_scaling_dyadic(family, s);
        let p = family.boundary_width();
        let (left, right) = if p > 0 {
            (evaluate_boundary_dyadic(family, Side::Left, s)?, evaluate_boundary_dyadic(family, Side::Right, s)?)
        } else {
            (Vec::new(), Vec::new())
        };

        let place = |table: &FunctionTable, shift: i64| -> (usize, Vec<f64>) {
            // grid index i holds table index i - shift
            let first = shift.max(0);
            let last = (shift + table.values.len() as i64).min(grid);
            let vals = (first..last).map(|i| scale * table.values[(i - shift) as usize]).collect();
            (first as usize, vals)
        };
        let rows = (0..n)
            .map(|col| {
                if col < p {
                    place(&left[col], 0)
                } else if col + p >= n {
                    let t = &right[n - 1 - col];
                    place(t, (n as i64 + t.start) << s)
                } else {
                    place(&interior, (col as i64 + interior.start) << s)
                }
            })
            .collect();
        Ok(Self { rows })
    }
}

/// Evaluates `sum_n c_n phi_n` on the closed dyadic grid of resolution `r`.
pub fn weval_1d(coeffs: &[f64], family: Family, j: u32, r: u32) -> Result<ReconstructionEvaluation> {
    let basis = Basis::new(family, j, r)?;
    check_len(basis.rows.len(), coeffs.len())?;
    let mut values = vec![0.0; (1usize << r) + 1];
    for (c, (first, row)) in coeffs.iter().zip(&basis.rows) {
        for (o, v) in values[*first..].iter_mut().zip(row) {
            *o += c * v;
        }
    }
    Ok(ReconstructionEvaluation { dim: 1, resolution: r, values })
}

/// Tensor-product evaluation of an `N x N` coefficient array stored with the
/// x index fastest (`c[iy * N + ix]`).
pub fn weval_2d(coeffs: &[f64], family: Family, j: u32, r: u32) -> Result<ReconstructionEvaluation> {
    let basis = Basis::new(family, j, r)?;
    let n = basis.rows.len();
    check_len(n * n, coeffs.len())?;
    let g = (1usize << r) + 1;

    // partial[b][ix] = sum_a c[b][a] phi_a(x_ix)
    let partial: Vec<Vec<f64>> = coeffs
        .par_chunks(n)
        .map(|row| {
            let mut acc = vec![0.0; g];
            for (c, (first, vals)) in row.iter().zip(&basis.rows) {
                for (o, v) in acc[*first..].iter_mut().zip(vals) {
                    *o += c * v;
                }
            }
            acc
        })
        .collect();

    let mut values = vec![0.0; g * g];
    values.par_chunks_mut(g).enumerate().for_each(|(iy, out)| {
        for (b, (first, vals)) in basis.rows.iter().enumerate() {
            if iy < *first || iy >= first + vals.len() {
                continue;
            }
            let w = vals[iy - first];
            for (o, v) in out.iter_mut().zip(&partial[b]) {
                *o += w * v;
            }
        }
    });
    Ok(ReconstructionEvaluation { dim: 2, resolution: r, values })
}

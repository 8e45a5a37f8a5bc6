//! Boundary-corrected scaling functions at the edges of an interval.
//!
//! The left edge functions live on `[0, p + k]` and satisfy
//!
//! ```text
//! phi^L_k(x) / sqrt(2) = sum_l H[k][l] phi^L_l(2x) + sum_{m=p}^{p+2k} h[k][m] phi(2x - m)
//! ```
//!
//! while the right edge functions live on `[-p - k, 0]` and use
//! `phi(2x + m + 1)` in place of `phi(2x - m)`. Both filter sets are built
//! from the interior filter: the truncated translates that cross the edge are
//! combined so that polynomials of degree `< p` are reproduced, arranged into
//! nested supports `[0, p + k]` and orthonormalized. The right edge is the
//! left construction applied to the reflected filter `h_{1-k}`.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};

use super::family::{Family, MAX_VANISHING_MOMENTS};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    fn index(self) -> usize {
        match self {
            Side::Left => 0,
            Side::Right => 1,
        }
    }
}

/// Boundary filters for one edge of one family.
///
/// Matrices are stored row-major. Column `j` of `h` and `v` corresponds to the
/// interior translate `m = p + j`.
#[derive(Debug, Clone)]
pub struct BoundaryFilterSet {
    pub family: Family,
    pub side: Side,
    pub p: usize,
    /// Boundary-to-boundary taps, `p x p`.
    pub big_h: Vec<f64>,
    /// Boundary-to-interior taps, `p x (2p - 1)`; row `k` is zero past column `2k`.
    pub small_h: Vec<f64>,
    /// `big_h / sqrt(2)`.
    pub u: Vec<f64>,
    /// `small_h / sqrt(2)`.
    pub v: Vec<f64>,
}

impl BoundaryFilterSet {
    pub fn interior_cols(&self) -> usize {
        2 * self.p - 1
    }

    pub fn big_h_at(&self, k: usize, l: usize) -> f64 {
        self.big_h[k * self.p + l]
    }

    /// Tap for interior translate `m` (`p <= m <= 3p - 2`).
    pub fn small_h_at(&self, k: usize, m: usize) -> f64 {
        self.small_h[k * self.interior_cols() + (m - self.p)]
    }

    /// Fixed point `v1(0)` of the Fourier recursion, i.e. the integrals of
    /// the boundary functions. Solves `(I - U) v = V 1`.
    pub fn fixed_point_at_zero(&self) -> Result<Vec<f64>> {
        let p = self.p;
        let cols = self.interior_cols();
        let lhs = DMatrix::from_fn(p, p, |i, j| {
            let id = if i == j { 1.0 } else { 0.0 };
            id - self.u[i * p + j]
        });
        let rhs = DVector::from_fn(p, |i, _| (0..cols).map(|j| self.v[i * cols + j]).sum());
        let sol = lhs
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Numerical("singular boundary fixed-point system".into()))?;
        Ok(sol.iter().copied().collect())
    }
}

/// Cached boundary filters for `family` at `side`.
///
/// Fails with a precondition error for Haar, which has no boundary functions.
pub fn boundary_filters(family: Family, side: Side) -> Result<&'static BoundaryFilterSet> {
    static CACHE: [[OnceLock<std::result::Result<BoundaryFilterSet, String>>; 2];
        MAX_VANISHING_MOMENTS + 1] = [const { [const { OnceLock::new() }, const { OnceLock::new() }] };
        MAX_VANISHING_MOMENTS + 1];

    let p = family.vanishing_moments();
    if p < 2 {
        return Err(Error::Precondition(format!(
            "{family} has no boundary scaling functions (p = {p})"
        )));
    }
    CACHE[p][side.index()]
        .get_or_init(|| build(family, side).map_err(|e| e.to_string()))
        .as_ref()
        .map_err(|e| Error::Numerical(e.clone()))
}

fn build(family: Family, side: Side) -> Result<BoundaryFilterSet> {
    let p = family.vanishing_moments();
    let mut filter = family.filter().to_vec();
    if side == Side::Right {
        filter.reverse();
    }
    let (hp, hi) = left_edge_refinement(&filter, p)?;
    let s2 = std::f64::consts::SQRT_2;
    let cols = 2 * p - 1;
    let big_h: Vec<f64> = (0..p * p).map(|i| hp[(i / p, i % p)] / s2).collect();
    let small_h: Vec<f64> = (0..p * cols).map(|i| hi[(i / cols, i % cols)] / s2).collect();
    let u = big_h.iter().map(|x| x / s2).collect();
    let v = small_h.iter().map(|x| x / s2).collect();
    Ok(BoundaryFilterSet { family, side, p, big_h, small_h, u, v })
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Moments `int x^i phi(x) dx`, `i < count`, of the scaling function defined
/// by `filter` (sum one, first index `1 - p`).
fn moments(filter: &[f64], offset: i64, count: usize) -> Vec<f64> {
    let mut out = vec![1.0];
    for i in 1..count {
        let mut s = 0.0;
        for (l, ml) in out.iter().enumerate() {
            let power: f64 = filter
                .iter()
                .enumerate()
                .map(|(j, hj)| hj * ((j as i64 + offset) as f64).powi((i - l) as i32))
                .sum();
            s += binomial(i, l) * ml * power;
        }
        let scale = 0.5f64.powi(i as i32);
        out.push(scale * s / (1.0 - scale));
    }
    out
}

/// Refinement coefficients `(P, Q)` of the orthonormal left edge functions:
/// `phi^L(x) = P phi^L(2x) + Q phi(2x - m)` with `m = p .. 3p - 2`.
fn left_edge_refinement(filter: &[f64], p: usize) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let offset = 1 - p as i64;
    let tap = |j: i64| -> f64 {
        let idx = j - offset;
        if idx >= 0 && (idx as usize) < filter.len() {
            filter[idx as usize]
        } else {
            0.0
        }
    };
    let mom = moments(filter, offset, p);

    // Polynomial reproduction x^k = sum_n y[k][n] phi(x - n); only the
    // translates n = 1-p .. p-1 reach across the edge.
    let ntrans = 2 * p - 1;
    let y = DMatrix::<f64>::from_fn(p, ntrans, |k, col| {
        let n = col as f64 + offset as f64;
        (0..=k).map(|i| binomial(k, i) * n.powi((k - i) as i32) * mom[i]).sum()
    });

    // Unnormalized edge functions e_k = x^k restricted to [0, inf) minus the
    // interior translates satisfy e_k(x) = 2^-k e_k(2x) + sum_m q[k][m] phi(2x - m).
    let q = DMatrix::from_fn(p, ntrans, |k, col| {
        let m = (p + col) as i64;
        2.0 * (0..ntrans)
            .map(|c| y[(k, c)] * tap(m - 2 * (c as i64 + offset)))
            .sum::<f64>()
    });
    // The rows of q are rescaled so the starting Gram matrix is tame; since
    // the starting P is diagonal this is still a valid refinement pair.
    let mut hi = q;
    for mut row in hi.row_iter_mut() {
        let norm = row.norm();
        row /= norm;
    }
    let mut hp = DMatrix::from_diagonal(&DVector::from_fn(p, |k, _| 0.5f64.powi(k as i32)));
    orthonormalize(&mut hp, &mut hi)?;

    // Nested supports: row k may only touch interior translates m <= p + 2k.
    // In an orthonormal basis the admissible combinations for row k form a
    // subspace S_k of dimension k + 1, and S_k is S_{k-1} plus one direction.
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(p);
    for k in 0..p {
        let banned: Vec<usize> = ((2 * k + 1)..ntrans).collect();
        let candidates = null_space(&hi, &banned, k + 1);
        let mut best: Option<(DVector<f64>, f64)> = None;
        for c in candidates {
            let mut r = c.clone();
            for a in &basis {
                r -= a * a.dot(&c);
            }
            let norm = r.norm();
            if best.as_ref().is_none_or(|(_, bn)| norm > *bn) {
                best = Some((r, norm));
            }
        }
        let (r, norm) = best.ok_or_else(|| Error::Numerical("empty edge subspace".into()))?;
        if norm < 1e-8 {
            return Err(Error::Numerical(format!("edge function {k} is degenerate")));
        }
        basis.push(r / norm);
    }
    let t = DMatrix::from_fn(p, p, |k, j| basis[k][j]);
    hp = &t * hp * t.transpose();
    hi = &t * hi;
    orthonormalize(&mut hp, &mut hi)?;

    for k in 0..p {
        for col in (2 * k + 1)..ntrans {
            if hi[(k, col)].abs() > 1e-8 {
                return Err(Error::Numerical(format!(
                    "edge function {k} has interior tap {} at m = {}",
                    hi[(k, col)],
                    p + col
                )));
            }
            hi[(k, col)] = 0.0;
        }
    }

    // Sign convention: every edge function has a nonnegative integral.
    let lhs = DMatrix::identity(p, p) - &hp * 0.5;
    let rhs = DVector::from_fn(p, |k, _| 0.5 * hi.row(k).sum());
    let integrals = lhs
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("singular boundary fixed-point system".into()))?;
    for k in 0..p {
        if integrals[k] < 0.0 {
            for j in 0..p {
                hp[(k, j)] = -hp[(k, j)];
                hp[(j, k)] = -hp[(j, k)];
            }
            for j in 0..ntrans {
                hi[(k, j)] = -hi[(k, j)];
            }
        }
    }
    Ok((hp, hi))
}

/// Change basis so the functions described by `(hp, hi)` become orthonormal.
/// Two passes absorb the rounding of the first.
fn orthonormalize(hp: &mut DMatrix<f64>, hi: &mut DMatrix<f64>) -> Result<()> {
    for _ in 0..2 {
        let g = stein_gram(hp, hi)?;
        let l = g
            .cholesky()
            .ok_or_else(|| Error::Numerical("boundary Gram matrix is not positive definite".into()))?
            .l();
        let l_inv = l
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Numerical("singular Cholesky factor".into()))?;
        *hp = &l_inv * &*hp * l;
        *hi = &l_inv * &*hi;
    }
    Ok(())
}

/// Gram matrix of functions obeying `f(x) = P f(2x) + Q phi(2x - m)` with
/// orthonormal interior translates: `G = (P G P^T + Q Q^T) / 2`.
fn stein_gram(hp: &DMatrix<f64>, hi: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let p = hp.nrows();
    let kron = hp.kronecker(hp);
    let lhs = DMatrix::identity(p * p, p * p) - kron * 0.5;
    let qqt = hi * hi.transpose();
    let rhs = DVector::from_fn(p * p, |i, _| 0.5 * qqt[(i / p, i % p)]);
    let sol = lhs
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("singular Gram equation".into()))?;
    let g = DMatrix::from_fn(p, p, |i, j| sol[i * p + j]);
    Ok((&g + g.transpose()) * 0.5)
}

/// Orthonormal vectors spanning `{c : sum_k c_k m[k][col] = 0 for col in cols}`
/// (least-violating directions when that space is smaller); returns `dim` vectors.
fn null_space(m: &DMatrix<f64>, cols: &[usize], dim: usize) -> Vec<DVector<f64>> {
    let p = m.nrows();
    if cols.is_empty() {
        return (0..p).map(|i| DVector::from_fn(p, |j, _| if i == j { 1.0 } else { 0.0 })).collect();
    }
    // Pad the constraint matrix to at least square so the SVD returns a full V.
    let rows = cols.len().max(p);
    let constraints = DMatrix::from_fn(rows, p, |r, c| if r < cols.len() { m[(c, cols[r])] } else { 0.0 });
    let svd = constraints.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    order
        .into_iter()
        .take(dim)
        .map(|row| v_t.row(row).transpose())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dbs() -> impl Iterator<Item = Family> {
        (2..=8).map(|p| Family::daubechies(p).unwrap())
    }

    #[test]
    fn haar_is_rejected() {
        assert!(matches!(boundary_filters(Family::Haar, Side::Left), Err(Error::Precondition(_))));
    }

    #[test]
    fn interior_taps_have_staggered_support() {
        for fam in dbs() {
            for side in [Side::Left, Side::Right] {
                let set = boundary_filters(fam, side).unwrap();
                let cols = set.interior_cols();
                for k in 0..set.p {
                    let populated = (0..cols).filter(|&j| set.small_h[k * cols + j] != 0.0).count();
                    assert_eq!(populated, 2 * k + 1, "{fam} {side:?} row {k}");
                }
            }
        }
    }

    #[test]
    fn refinement_relation_is_orthonormal() {
        for fam in dbs() {
            for side in [Side::Left, Side::Right] {
                let set = boundary_filters(fam, side).unwrap();
                let p = set.p;
                let hp = DMatrix::from_fn(p, p, |i, j| set.big_h_at(i, j) * std::f64::consts::SQRT_2);
                let hi = DMatrix::from_fn(p, 2 * p - 1, |i, j| set.small_h[i * (2 * p - 1) + j] * std::f64::consts::SQRT_2);
                let g = stein_gram(&hp, &hi).unwrap();
                let err = (g - DMatrix::identity(p, p)).abs().max();
                assert!(err < 1e-12, "{fam} {side:?}: {err}");
            }
        }
    }

    #[test]
    fn db2_matches_published_magnitudes() {
        // db2 edge filters as tabulated for orthonormal interval wavelets;
        // signs depend on the orientation convention, magnitudes do not.
        let cases = [
            (
                Side::Left,
                [0.6033325119, 0.6908955318, 0.0375174605, 0.4573276599],
                [0.3983129977, 0.8500881025, 0.2238203570, 0.1292227434],
            ),
            (
                Side::Right,
                [0.8705087534, 0.4348969980, 0.1942334074, 0.1901514184],
                [0.2303890438, 0.3749553316, 0.7675566693, 0.4431490496],
            ),
        ];
        for (side, want_big, want_small) in cases {
            let set = boundary_filters(Family::Daubechies(2), side).unwrap();
            for (got, want) in set.big_h.iter().zip(want_big) {
                assert!((got.abs() - want).abs() < 1e-9, "{side:?}: {got} vs {want}");
            }
            let got_small = [
                set.small_h_at(0, 2),
                set.small_h_at(1, 2),
                set.small_h_at(1, 3),
                set.small_h_at(1, 4),
            ];
            for (got, want) in got_small.iter().zip(want_small) {
                assert!((got.abs() - want).abs() < 1e-9, "{side:?}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn fixed_point_is_nonnegative() {
        for fam in dbs() {
            for side in [Side::Left, Side::Right] {
                let v = boundary_filters(fam, side).unwrap().fixed_point_at_zero().unwrap();
                assert!(v.iter().all(|x| *x >= 0.0), "{fam} {side:?}: {v:?}");
            }
        }
    }
}

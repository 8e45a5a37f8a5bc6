//! Matrix-free least squares through Krylov iterations on the normal
//! equations `T* T x = T* b`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::coefficients::CoefficientGrid;
use crate::error::{check_len, Error, Result};
use crate::operator::{DenseMatrix, Freq2WaveOp, LinearOperator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// Conjugate residuals on the normal equations. The normal-equation
    /// residual decreases monotonically.
    #[default]
    Crnr,
    /// Conjugate gradients on the normal equations (CGLS form).
    Cgnr,
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Defaults to `2 * ncols` when `None`.
    pub max_iterations: Option<usize>,
    /// Stop once `|T*(Tx - b)| / |T*b|` falls below this.
    pub tolerance: f64,
    pub initial_guess: Option<Vec<Complex64>>,
    pub method: Method,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { max_iterations: None, tolerance: 1e-10, initial_guess: None, method: Method::Crnr }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    /// Relative normal-equation residual of the returned iterate.
    pub final_residual: f64,
    /// One entry per iterate, starting with the initial guess.
    pub residual_history: Vec<f64>,
    pub converged: bool,
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn axpy(a: Complex64, x: &[Complex64], y: &mut [Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Solves `min |T x - b|` for a generic operator; `b` must already carry
/// any row weights.
pub fn solve_operator<T: LinearOperator + ?Sized>(
    op: &T,
    b: &[Complex64],
    opts: &SolveOptions,
) -> Result<(Vec<Complex64>, SolveStats)> {
    let (m, n) = (op.nrows(), op.ncols());
    check_len(m, b.len())?;
    if !(opts.tolerance > 0.0) {
        return Err(Error::Parameter(format!("tolerance must be positive, got {}", opts.tolerance)));
    }
    let max_iter = opts.max_iterations.unwrap_or(2 * n);
    if max_iter == 0 {
        return Err(Error::Parameter("max_iterations must be at least 1".into()));
    }
    let mut x = match &opts.initial_guess {
        Some(g) => {
            check_len(n, g.len())?;
            g.clone()
        }
        None => vec![Complex64::default(); n],
    };

    let mut z = vec![Complex64::default(); n];
    op.adjoint_into(b, &mut z)?;
    let scale = norm(&z);
    if scale == 0.0 {
        // T*b = 0: zero solves the normal equations.
        let stats = SolveStats { iterations: 0, final_residual: 0.0, residual_history: vec![0.0], converged: true };
        return Ok((vec![Complex64::default(); n], stats));
    }

    // residual r = b - T x
    let mut r = b.to_vec();
    let mut t = vec![Complex64::default(); m];
    if x.iter().any(|v| *v != Complex64::default()) {
        op.forward_into(&x, &mut t)?;
        for (ri, ti) in r.iter_mut().zip(&t) {
            *ri -= ti;
        }
        op.adjoint_into(&r, &mut z)?;
    }

    match opts.method {
        Method::Crnr => crnr(op, &mut x, &mut z, scale, max_iter, opts.tolerance),
        Method::Cgnr => cgnr(op, &mut x, r, &mut z, scale, max_iter, opts.tolerance),
    }
}

/// Conjugate residuals on `B x = c`, `B = T*T`, tracking `z = c - B x`.
fn crnr<T: LinearOperator + ?Sized>(
    op: &T,
    x: &mut Vec<Complex64>,
    z: &mut [Complex64],
    scale: f64,
    max_iter: usize,
    tol: f64,
) -> Result<(Vec<Complex64>, SolveStats)> {
    let (m, n) = (op.nrows(), op.ncols());
    let mut tz = vec![Complex64::default(); m];
    let mut bz = vec![Complex64::default(); n];
    op.forward_into(z, &mut tz)?;
    op.adjoint_into(&tz, &mut bz)?;
    let mut p = z.to_vec();
    let mut bp = bz.clone();
    let mut rho = tz.iter().map(|v| v.norm_sqr()).sum::<f64>();

    let mut history = vec![norm(z) / scale];
    let mut iterations = 0;
    while history[iterations] > tol && iterations < max_iter && rho > 0.0 {
        let denom = bp.iter().map(|v| v.norm_sqr()).sum::<f64>();
        if denom == 0.0 {
            break;
        }
        let alpha = Complex64::new(rho / denom, 0.0);
        axpy(alpha, &p, x);
        axpy(-alpha, &bp, z);
        op.forward_into(z, &mut tz)?;
        op.adjoint_into(&tz, &mut bz)?;
        let rho_new = tz.iter().map(|v| v.norm_sqr()).sum::<f64>();
        let beta = rho_new / rho;
        rho = rho_new;
        for ((pi, bpi), (zi, bzi)) in p.iter_mut().zip(bp.iter_mut()).zip(z.iter().zip(&bz)) {
            *pi = zi + beta * *pi;
            *bpi = bzi + beta * *bpi;
        }
        iterations += 1;
        history.push(norm(z) / scale);
    }
    let final_residual = history[iterations];
    let stats = SolveStats { iterations, final_residual, residual_history: history, converged: final_residual <= tol };
    Ok((std::mem::take(x), stats))
}

/// CGLS: conjugate gradients on the normal equations without forming them.
fn cgnr<T: LinearOperator + ?Sized>(
    op: &T,
    x: &mut Vec<Complex64>,
    mut r: Vec<Complex64>,
    z: &mut [Complex64],
    scale: f64,
    max_iter: usize,
    tol: f64,
) -> Result<(Vec<Complex64>, SolveStats)> {
    let m = op.nrows();
    let mut p = z.to_vec();
    let mut q = vec![Complex64::default(); m];
    let mut gamma = dot(z, z).re;
    let mut history = vec![gamma.sqrt() / scale];
    let mut best = (history[0], x.clone());
    let mut iterations = 0;
    while history[iterations] > tol && iterations < max_iter && gamma > 0.0 {
        op.forward_into(&p, &mut q)?;
        let qq = q.iter().map(|v| v.norm_sqr()).sum::<f64>();
        if qq == 0.0 {
            break;
        }
        let alpha = Complex64::new(gamma / qq, 0.0);
        axpy(alpha, &p, x);
        axpy(-alpha, &q, &mut r);
        op.adjoint_into(&r, z)?;
        let gamma_new = dot(z, z).re;
        let beta = gamma_new / gamma;
        gamma = gamma_new;
        for (pi, zi) in p.iter_mut().zip(z.iter()) {
            *pi = zi + beta * *pi;
        }
        iterations += 1;
        let res = gamma.sqrt() / scale;
        history.push(res);
        if res < best.0 {
            best = (res, x.clone());
        }
    }
    let (final_residual, x) = best;
    let stats = SolveStats { iterations, final_residual, residual_history: history, converged: final_residual <= tol };
    Ok((x, stats))
}

/// Reconstructs coefficients from raw samples. Row weights carried by the
/// operator are applied to the data before iterating.
pub fn solve_least_squares(
    op: &Freq2WaveOp,
    samples: &[Complex64],
    opts: &SolveOptions,
) -> Result<(CoefficientGrid, SolveStats)> {
    check_len(op.nrows(), samples.len())?;
    let b: Vec<Complex64> = match op.row_weights() {
        Some(w) => samples.iter().zip(w).map(|(s, w)| s * w).collect(),
        None => samples.to_vec(),
    };
    let (x, stats) = solve_operator(op, &b, opts)?;
    Ok((CoefficientGrid::new(op.dim(), op.family(), op.scale(), x)?, stats))
}

/// Least-squares solution of a small dense system through the Cholesky
/// factorization of its normal equations.
pub fn dense_lsq_oracle(a: &DenseMatrix, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
    check_len(a.rows, rhs.len())?;
    let mat = DMatrix::from_row_slice(a.rows, a.cols, &a.data);
    let b = DVector::from_column_slice(rhs);
    let normal = mat.adjoint() * &mat;
    let atb = mat.adjoint() * b;
    let chol = normal.cholesky().ok_or_else(|| Error::Numerical("normal matrix is not positive definite".into()))?;
    // reject numerically rank-deficient systems
    let diag = chol.l_dirty().diagonal();
    let (lo, hi) = diag.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), d| (lo.min(d.norm()), hi.max(d.norm())));
    if a.cols > 0 && lo <= 1e-7 * hi {
        return Err(Error::Numerical("matrix is rank deficient".into()));
    }
    Ok(chol.solve(&atb).iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{apply_adjoint, apply_forward, densify, freq2wave, Freq2WaveOptions, DENSE_CAP};
    use crate::sampling::SamplingSet;
    use crate::wavelet::Family;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
        (0..n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
    }

    fn grid(m: usize, eps: f64) -> Vec<f64> {
        (0..m).map(|i| eps * (i as f64 - m as f64 / 2.0)).collect()
    }

    fn rel(a: &[Complex64], b: &[Complex64]) -> f64 {
        let d: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        norm(&d) / norm(b)
    }

    #[test]
    fn recovers_in_span_coefficients() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for method in [Method::Crnr, Method::Cgnr] {
            let s = SamplingSet::one_d(grid(128, 0.5)).unwrap();
            let op = freq2wave(&s, Family::Daubechies(4), 5, &Freq2WaveOptions::default()).unwrap();
            let x0 = rand_vec(&mut rng, 32);
            let b = apply_forward(&op, &x0).unwrap();
            let opts = SolveOptions { method, ..Default::default() };
            let (x, stats) = solve_least_squares(&op, &b, &opts).unwrap();
            assert!(rel(&x.values, &x0) < 1e-6, "{method:?}");
            assert!(stats.converged && stats.iterations <= 50, "{stats:?}");
            assert_eq!(stats.residual_history.len(), stats.iterations + 1);
        }
    }

    #[test]
    fn zero_rhs_is_zero_in_no_iterations() {
        let s = SamplingSet::one_d(grid(16, 0.5)).unwrap();
        let op = freq2wave(&s, Family::Haar, 3, &Freq2WaveOptions::default()).unwrap();
        let (x, stats) = solve_least_squares(&op, &[Complex64::default(); 16], &SolveOptions::default()).unwrap();
        assert!(x.values.iter().all(|v| *v == Complex64::default()));
        assert_eq!(stats.iterations, 0);
        assert!(stats.converged);
    }

    #[test]
    fn matches_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = SamplingSet::one_d(grid(16, 0.5)).unwrap();
        let op = freq2wave(&s, Family::Haar, 3, &Freq2WaveOptions::default()).unwrap();
        let b = rand_vec(&mut rng, 16);
        let dense = densify(&op, DENSE_CAP).unwrap();
        let want = dense_lsq_oracle(&dense, &b).unwrap();
        let opts = SolveOptions { tolerance: 1e-13, ..Default::default() };
        let (x, _) = solve_least_squares(&op, &b, &opts).unwrap();
        assert!(rel(&x.values, &want) < 1e-8);
    }

    #[test]
    fn weighted_solve_applies_square_root_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut xi: Vec<f64> = (0..100).map(|_| rng.random_range(-15.0..15.0)).collect();
        xi.sort_by(f64::total_cmp);
        let mu = crate::weights::voronoi_weights_1d(&xi, 16.0).unwrap().mu;
        let s = SamplingSet::one_d(xi).unwrap();
        let plain = freq2wave(&s, Family::Daubechies(2), 4, &Freq2WaveOptions::default()).unwrap();
        let x0 = rand_vec(&mut rng, 16);
        let b = apply_forward(&plain, &x0).unwrap();
        let opts = Freq2WaveOptions { weights: Some(mu.clone()), ..Default::default() };
        let weighted = freq2wave(&s, Family::Daubechies(2), 4, &opts).unwrap();
        let (x, stats) = solve_least_squares(&weighted, &b, &SolveOptions::default()).unwrap();
        assert!(stats.converged);
        assert!(rel(&x.values, &x0) < 1e-6);

        // agrees with the dense weighted problem on noisy data
        let noisy: Vec<Complex64> = b.iter().map(|v| v + 0.01 * rand_vec(&mut rng, 1)[0]).collect();
        let dense = densify(&weighted, DENSE_CAP).unwrap();
        let bw: Vec<Complex64> = noisy.iter().zip(&mu).map(|(v, w)| v * w.sqrt()).collect();
        let want = dense_lsq_oracle(&dense, &bw).unwrap();
        let (x, _) = solve_least_squares(&weighted, &noisy, &SolveOptions { tolerance: 1e-12, ..Default::default() }).unwrap();
        assert!(rel(&x.values, &want) < 1e-6);
    }

    #[test]
    fn nonconvergence_is_reported() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = SamplingSet::one_d(grid(128, 0.5)).unwrap();
        let op = freq2wave(&s, Family::Daubechies(4), 5, &Freq2WaveOptions::default()).unwrap();
        let b = rand_vec(&mut rng, 128);
        let opts = SolveOptions { max_iterations: Some(2), ..Default::default() };
        let (_, stats) = solve_least_squares(&op, &b, &opts).unwrap();
        assert!(!stats.converged);
        assert_eq!(stats.iterations, 2);
    }

    #[test]
    fn initial_guess_at_solution_stops_immediately() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = SamplingSet::one_d(grid(64, 0.5)).unwrap();
        let op = freq2wave(&s, Family::Daubechies(2), 4, &Freq2WaveOptions::default()).unwrap();
        let x0 = rand_vec(&mut rng, 16);
        let b = apply_forward(&op, &x0).unwrap();
        let opts = SolveOptions { initial_guess: Some(x0.clone()), tolerance: 1e-8, ..Default::default() };
        let (x, stats) = solve_least_squares(&op, &b, &opts).unwrap();
        assert_eq!(stats.iterations, 0);
        assert_eq!(x.values, x0);
    }

    #[test]
    fn errors() {
        let s = SamplingSet::one_d(grid(16, 0.5)).unwrap();
        let op = freq2wave(&s, Family::Haar, 3, &Freq2WaveOptions::default()).unwrap();
        let b = vec![Complex64::new(1.0, 0.0); 16];
        assert!(matches!(solve_least_squares(&op, &b[..3], &SolveOptions::default()), Err(Error::Shape { .. })));
        let opts = SolveOptions { tolerance: 0.0, ..Default::default() };
        assert!(matches!(solve_least_squares(&op, &b, &opts), Err(Error::Parameter(_))));
        let opts = SolveOptions { initial_guess: Some(vec![Complex64::default(); 3]), ..Default::default() };
        assert!(matches!(solve_least_squares(&op, &b, &opts), Err(Error::Shape { .. })));
    }

    #[test]
    fn dense_oracle_cases() {
        let eye = DenseMatrix {
            rows: 3,
            cols: 3,
            data: (0..9).map(|i| if i % 4 == 0 { Complex64::new(1.0, 0.0) } else { Complex64::default() }).collect(),
        };
        let b = vec![Complex64::new(1.0, 2.0), Complex64::new(-3.0, 0.5), Complex64::new(0.0, 1.0)];
        assert!(rel(&dense_lsq_oracle(&eye, &b).unwrap(), &b) < 1e-15);
        assert!(dense_lsq_oracle(&eye, &[Complex64::default(); 3]).unwrap().iter().all(|v| v.norm() == 0.0));

        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = DenseMatrix { rows: 20, cols: 5, data: rand_vec(&mut rng, 100) };
        let b = rand_vec(&mut rng, 20);
        let x = dense_lsq_oracle(&a, &b).unwrap();
        let r: Vec<Complex64> = a.mul_vec(&x).iter().zip(&b).map(|(p, q)| p - q).collect();
        assert!(norm(&a.adjoint_mul_vec(&r)) < 1e-10);

        let mut data = rand_vec(&mut rng, 12);
        for row in 0..4 {
            data[row * 3 + 2] = data[row * 3] * 2.0;
        }
        let deficient = DenseMatrix { rows: 4, cols: 3, data };
        assert!(matches!(dense_lsq_oracle(&deficient, &rand_vec(&mut rng, 4)), Err(Error::Numerical(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn residual_history_is_nonincreasing(seed in any::<u64>(), fam in 0usize..3) {
            let family = [Family::Haar, Family::Daubechies(2), Family::Daubechies(4)][fam];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let xi: Vec<f64> = (0..90).map(|_| rng.random_range(-30.0..30.0)).collect();
            let s = SamplingSet::one_d(xi).unwrap();
            let op = freq2wave(&s, family, 5, &Freq2WaveOptions::default()).unwrap();
            let b = rand_vec(&mut rng, 90);
            let (_, stats) = solve_least_squares(&op, &b, &SolveOptions { max_iterations: Some(60), ..Default::default() }).unwrap();
            for w in stats.residual_history.windows(2) {
                prop_assert!(w[1] <= w[0] * (1.0 + 1e-12));
            }
        }

        #[test]
        fn row_permutation_invariance(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let xi: Vec<f64> = (0..64).map(|_| rng.random_range(-20.0..20.0)).collect();
            let b = rand_vec(&mut rng, 64);
            let mut perm: Vec<usize> = (0..64).collect();
            perm.shuffle(&mut rng);
            let xi2: Vec<f64> = perm.iter().map(|&i| xi[i]).collect();
            let b2: Vec<Complex64> = perm.iter().map(|&i| b[i]).collect();
            let opts = SolveOptions { tolerance: 1e-13, ..Default::default() };
            let op = freq2wave(&SamplingSet::one_d(xi).unwrap(), Family::Daubechies(2), 4, &Freq2WaveOptions::default()).unwrap();
            let op2 = freq2wave(&SamplingSet::one_d(xi2).unwrap(), Family::Daubechies(2), 4, &Freq2WaveOptions::default()).unwrap();
            let (x, _) = solve_least_squares(&op, &b, &opts).unwrap();
            let (x2, _) = solve_least_squares(&op2, &b2, &opts).unwrap();
            prop_assert!(rel(&x.values, &x2.values) < 1e-10);
        }

        #[test]
        fn normal_residual_is_small_at_convergence(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = SamplingSet::one_d(grid(64, 0.5)).unwrap();
            let op = freq2wave(&s, Family::Daubechies(3), 4, &Freq2WaveOptions::default()).unwrap();
            let b = rand_vec(&mut rng, 64);
            let (x, stats) = solve_least_squares(&op, &b, &SolveOptions::default()).unwrap();
            prop_assert!(stats.converged);
            let tx = apply_forward(&op, &x.values).unwrap();
            let r: Vec<Complex64> = tx.iter().zip(&b).map(|(p, q)| p - q).collect();
            let ratio = norm(&apply_adjoint(&op, &r).unwrap()) / norm(&apply_adjoint(&op, &b).unwrap());
            prop_assert!(ratio < 1e-8);
        }
    }
}

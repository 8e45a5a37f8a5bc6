use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::error::Error;

fn naive(points: &[f64], n: &[usize], x: &[Complex64], sign: f64) -> Vec<Complex64> {
    // Textbook double loop; no shared helpers with the library.
    let dim = n.len();
    let m = points.len() / dim;
    let mut out = vec![Complex64::new(0.0, 0.0); m];
    for (i, o) in out.iter_mut().enumerate() {
        for (flat, v) in x.iter().enumerate() {
            let mut arg = 0.0;
            let mut rest = flat;
            for d in (0..dim).rev() {
                let k = (rest % n[d]) as f64 - (n[d] / 2) as f64;
                rest /= n[d];
                arg += k * points[i * dim + d];
            }
            *o += v * Complex64::new((sign * 2.0 * PI * arg).cos(), (sign * 2.0 * PI * arg).sin());
        }
    }
    out
}

fn naive_adjoint(points: &[f64], n: &[usize], y: &[Complex64]) -> Vec<Complex64> {
    let total: usize = n.iter().product();
    let dim = n.len();
    (0..total)
        .map(|flat| {
            let mut ks = vec![0.0; dim];
            let mut rest = flat;
            for d in (0..dim).rev() {
                ks[d] = (rest % n[d]) as f64 - (n[d] / 2) as f64;
                rest /= n[d];
            }
            y.iter()
                .enumerate()
                .map(|(i, v)| {
                    let arg: f64 = (0..dim).map(|d| ks[d] * points[i * dim + d]).sum();
                    v * Complex64::new((2.0 * PI * arg).cos(), (2.0 * PI * arg).sin())
                })
                .sum()
        })
        .collect()
}

fn rand_vec(rng: &mut ChaCha8Rng, len: usize) -> Vec<Complex64> {
    (0..len).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
}

fn rand_points(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(-0.5..0.5)).collect()
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn rel_err(a: &[Complex64], b: &[Complex64]) -> f64 {
    let diff: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm(&diff) / norm(b)
}

#[test]
fn direct_trivial_cases() {
    let pts = [-0.5, -0.1, 0.2, 0.49];
    let mut x = vec![Complex64::default(); 8];
    x[4] = Complex64::new(1.0, 0.0);
    for v in ndft_forward(&pts, &[8], &x).unwrap() {
        assert!((v - 1.0).norm() < 1e-15);
    }
    let zero = ndft_forward(&pts, &[8], &[Complex64::default(); 8]).unwrap();
    assert!(zero.iter().all(|v| v.norm() == 0.0));
    let z = ndft_adjoint(&[0.0], &[8], &[Complex64::new(1.0, 0.0)]).unwrap();
    assert!(z.iter().all(|v| (v - 1.0).norm() < 1e-15));
    let z0 = ndft_adjoint(&pts, &[8], &[Complex64::default(); 4]).unwrap();
    assert!(z0.iter().all(|v| v.norm() == 0.0));
}

#[test]
fn direct_matches_double_loop() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in [vec![8], vec![6, 4]] {
        let total: usize = n.iter().product();
        let pts = rand_points(&mut rng, 7 * n.len());
        let x = rand_vec(&mut rng, total);
        let y = ndft_forward(&pts, &n, &x).unwrap();
        let want = naive(&pts, &n, &x, -1.0);
        for (a, b) in y.iter().zip(&want) {
            assert!((a - b).norm() < 1e-12);
        }
        let u = rand_vec(&mut rng, 7);
        let z = ndft_adjoint(&pts, &n, &u).unwrap();
        let want = naive_adjoint(&pts, &n, &u);
        for (a, b) in z.iter().zip(&want) {
            assert!((a - b).norm() < 1e-12);
        }
        let lhs = dot(&y, &u);
        let rhs = dot(&x, &z);
        assert!((lhs - rhs).norm() / (norm(&x) * norm(&u)) < 1e-12);
    }
}

#[test]
fn direct_errors() {
    assert!(matches!(ndft_forward(&[0.5], &[8], &[Complex64::default(); 8]), Err(Error::Domain(_))));
    assert!(matches!(ndft_forward(&[0.1], &[8], &[Complex64::default(); 7]), Err(Error::Shape { .. })));
    assert!(matches!(ndft_adjoint(&[-0.6], &[8], &[Complex64::default()]), Err(Error::Domain(_))));
}

#[test]
fn plan_shapes_and_errors() {
    let plan = plan_nfft(&[16], &[0.1, -0.3], 2.0, 6).unwrap();
    assert_eq!(plan.oversampled_lengths(), &[32]);
    let plan = plan_nfft(&[10], &[0.1], 1.25, 6).unwrap();
    assert_eq!(plan.oversampled_lengths(), &[14]);
    assert!(matches!(plan_nfft(&[16], &[0.5], 2.0, 6), Err(Error::Domain(_))));
    assert!(matches!(plan_nfft(&[16], &[0.1], 1.0, 6), Err(Error::Parameter(_))));
    assert!(matches!(plan_nfft(&[15], &[0.1], 2.0, 6), Err(Error::Parameter(_))));
    let plan = plan_nfft(&[8, 8], &[0.1, 0.2], 2.0, 6).unwrap();
    assert!(matches!(plan.forward(&[Complex64::default(); 63]), Err(Error::Shape { .. })));
}

#[test]
fn nfft_impulse_is_flat() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let pts = rand_points(&mut rng, 50);
    let plan = plan_nfft(&[32], &pts, DEFAULT_SIGMA, DEFAULT_HALF_WIDTH).unwrap();
    let mut x = vec![Complex64::default(); 32];
    x[16] = Complex64::new(1.0, 0.0);
    for v in plan.forward(&x).unwrap() {
        assert!((v - 1.0).norm() < 1e-7);
    }
}

#[test]
fn nfft_accuracy_1d_and_2d() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (n, m) in [(vec![64], 100), (vec![256], 4096), (vec![8, 8], 10), (vec![32, 16], 500)] {
        let total: usize = n.iter().product();
        let pts = rand_points(&mut rng, m * n.len());
        let plan = plan_nfft(&n, &pts, DEFAULT_SIGMA, DEFAULT_HALF_WIDTH).unwrap();
        let x = rand_vec(&mut rng, total);
        let fast = plan.forward(&x).unwrap();
        let exact = ndft_forward(&pts, &n, &x).unwrap();
        assert!(rel_err(&fast, &exact) < 1e-7, "{n:?}: {}", rel_err(&fast, &exact));
        let y = rand_vec(&mut rng, m);
        let fast = plan.adjoint(&y).unwrap();
        let exact = ndft_adjoint(&pts, &n, &y).unwrap();
        assert!(rel_err(&fast, &exact) < 1e-7, "{n:?} adjoint: {}", rel_err(&fast, &exact));
    }
}

#[test]
fn nfft_pairing() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for n in [vec![64], vec![16, 16]] {
        let total: usize = n.iter().product();
        let pts = rand_points(&mut rng, 300 * n.len());
        let plan = plan_nfft(&n, &pts, DEFAULT_SIGMA, DEFAULT_HALF_WIDTH).unwrap();
        let x = rand_vec(&mut rng, total);
        let y = rand_vec(&mut rng, 300);
        let lhs = dot(&plan.forward(&x).unwrap(), &y);
        let rhs = dot(&x, &plan.adjoint(&y).unwrap());
        assert!((lhs - rhs).norm() / (norm(&x) * norm(&y)) < 1e-12);
    }
}

#[test]
fn adjoint_is_deterministic_across_chunking() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pts = rand_points(&mut rng, 20000);
    let plan = plan_nfft(&[128], &pts, DEFAULT_SIGMA, DEFAULT_HALF_WIDTH).unwrap();
    let y = rand_vec(&mut rng, 20000);
    let a = plan.adjoint(&y).unwrap();
    let b = plan.adjoint(&y).unwrap();
    assert_eq!(a, b);
}

#[test]
fn uniform_matches_direct() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for (n1, n, m, eps) in [(8, 8, 16, 0.5), (4, 8, 8, 1.0), (512, 512, 1024, 0.5), (64, 128, 200, 0.25), (6, 6, 7, 1.0)] {
        let x = rand_vec(&mut rng, n1);
        let pts = uniform_points(m, eps, n);
        let fast = uniform_ndft_fft(&x, m, eps, n).unwrap();
        let exact = naive(&pts, &[n1], &x, -1.0);
        assert!(rel_err(&fast, &exact) < 1e-12, "{n1} {n} {m} {eps}: {}", rel_err(&fast, &exact));
        let y = rand_vec(&mut rng, m);
        let fast = uniform_ndft_fft_adjoint(&y, n1, eps, n).unwrap();
        let exact = naive_adjoint(&pts, &[n1], &y);
        assert!(rel_err(&fast, &exact) < 1e-12);
    }
    assert_eq!(uniform_points(16, 0.5, 8)[0], -0.5);
    assert_eq!(uniform_points(16, 0.5, 8)[15], 0.5 / 8.0 * 7.0);
    let zero = uniform_ndft_fft(&[Complex64::default(); 8], 16, 0.5, 8).unwrap();
    assert!(zero.iter().all(|v| v.norm() == 0.0));
}

#[test]
fn uniform_errors() {
    let x = [Complex64::default(); 8];
    assert!(matches!(uniform_ndft_fft(&x, 16, 0.3, 8), Err(Error::Parameter(_))));
    assert!(matches!(uniform_ndft_fft(&x, 4, 0.5, 8), Err(Error::Parameter(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn transforms_are_linear(seed in any::<u64>(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = rand_points(&mut rng, 40);
        let plan = plan_nfft(&[16], &pts, DEFAULT_SIGMA, DEFAULT_HALF_WIDTH).unwrap();
        let x1 = rand_vec(&mut rng, 16);
        let x2 = rand_vec(&mut rng, 16);
        let mix: Vec<Complex64> = x1.iter().zip(&x2).map(|(u, v)| u * a + v * b).collect();
        let f = |x: &[Complex64]| plan.forward(x).unwrap();
        let d = |x: &[Complex64]| ndft_forward(&pts, &[16], x).unwrap();
        for op in [&f as &dyn Fn(&[Complex64]) -> Vec<Complex64>, &d] {
            let lhs = op(&mix);
            let (y1, y2) = (op(&x1), op(&x2));
            for i in 0..lhs.len() {
                prop_assert!((lhs[i] - (y1[i] * a + y2[i] * b)).norm() < 1e-11);
            }
        }
    }

    #[test]
    fn direct_pairing_holds(seed in any::<u64>(), m in 1usize..30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = rand_points(&mut rng, 2 * m);
        let x = rand_vec(&mut rng, 32);
        let y = rand_vec(&mut rng, m);
        let lhs = dot(&ndft_forward(&pts, &[4, 8], &x).unwrap(), &y);
        let rhs = dot(&x, &ndft_adjoint(&pts, &[4, 8], &y).unwrap());
        prop_assert!((lhs - rhs).norm() / (norm(&x) * norm(&y)) < 1e-12);
    }
}

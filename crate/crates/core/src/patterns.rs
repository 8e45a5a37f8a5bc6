//! Sampling-pattern generators.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sampling::SamplingSet;

#[derive(Debug, Clone, PartialEq)]
pub enum PatternSpec {
    /// `M` points `eps (m - 1 - M/2)`; in 2D the `M x M` tensor grid.
    Grid { dim: usize, m: usize, eps: f64 },
    /// The grid with every coordinate perturbed uniformly in `[-eta, eta]`.
    Jitter { dim: usize, m: usize, eps: f64, eta: f64, seed: u64 },
    /// Archimedean spiral of radius `k`.
    Spiral { turns: usize, points_per_turn: usize, k: f64, closed: bool },
}

impl PatternSpec {
    pub fn generate(&self) -> Result<SamplingSet> {
        match *self {
            PatternSpec::Grid { dim: 1, m, eps } => gen_grid(m, eps),
            PatternSpec::Grid { dim: 2, m, eps } => gen_grid_2d(m, eps),
            PatternSpec::Jitter { dim: 1, m, eps, eta, seed } => gen_jitter(m, eps, eta, seed),
            PatternSpec::Jitter { dim: 2, m, eps, eta, seed } => gen_jitter_2d(m, eps, eta, seed),
            PatternSpec::Spiral { turns, points_per_turn, k, closed } => gen_spiral(turns, points_per_turn, k, closed),
            PatternSpec::Grid { dim, .. } | PatternSpec::Jitter { dim, .. } => {
                Err(Error::Parameter(format!("dimension must be 1 or 2, got {dim}")))
            }
        }
    }
}

fn check_grid(m: usize, eps: f64) -> Result<()> {
    if m == 0 {
        return Err(Error::Parameter("pattern needs at least one point".into()));
    }
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::Parameter(format!("spacing must be positive, got {eps}")));
    }
    Ok(())
}

fn grid_points(m: usize, eps: f64) -> Vec<f64> {
    let half = m as f64 / 2.0;
    (0..m).map(|i| eps * (i as f64 - half)).collect()
}

pub fn gen_grid(m: usize, eps: f64) -> Result<SamplingSet> {
    check_grid(m, eps)?;
    SamplingSet::one_d(grid_points(m, eps))
}

/// Tensor grid; point `i * M + j` is `(g_i, g_j)`.
pub fn gen_grid_2d(m: usize, eps: f64) -> Result<SamplingSet> {
    check_grid(m, eps)?;
    let g = grid_points(m, eps);
    let coords = (0..m * m).flat_map(|idx| [g[idx / m], g[idx % m]]).collect();
    SamplingSet::new(2, coords)
}

fn check_eta(eps: f64, eta: f64) -> Result<()> {
    if !(eta >= 0.0) || eta >= eps / 2.0 {
        return Err(Error::Parameter(format!("jitter amplitude must satisfy 0 <= eta < eps/2, got eta = {eta}, eps = {eps}")));
    }
    Ok(())
}

fn jitter(rng: &mut ChaCha8Rng, eta: f64) -> f64 {
    if eta == 0.0 {
        0.0
    } else {
        rng.random_range(-eta..=eta)
    }
}

/// Sorted jittered grid; `eta = 0` reproduces [`gen_grid`].
pub fn gen_jitter(m: usize, eps: f64, eta: f64, seed: u64) -> Result<SamplingSet> {
    check_grid(m, eps)?;
    check_eta(eps, eta)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts: Vec<f64> = grid_points(m, eps).into_iter().map(|x| x + jitter(&mut rng, eta)).collect();
    pts.sort_by(f64::total_cmp);
    SamplingSet::one_d(pts)
}

/// Tensor grid with every coordinate jittered independently.
pub fn gen_jitter_2d(m: usize, eps: f64, eta: f64, seed: u64) -> Result<SamplingSet> {
    check_grid(m, eps)?;
    check_eta(eps, eta)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = grid_points(m, eps);
    let coords = (0..m * m)
        .flat_map(|idx| [g[idx / m], g[idx % m]])
        .map(|x| x + jitter(&mut rng, eta))
        .collect();
    SamplingSet::new(2, coords)
}

/// `xi(t) = (K t / turns)(cos 2 pi t, sin 2 pi t)` at `t = i / points_per_turn`,
/// `i = 0..turns * points_per_turn`, including the end point `t = turns` when
/// `closed`.
pub fn gen_spiral(turns: usize, points_per_turn: usize, k: f64, closed: bool) -> Result<SamplingSet> {
    if turns == 0 || points_per_turn == 0 {
        return Err(Error::Parameter("spiral needs at least one turn and one point per turn".into()));
    }
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::Parameter(format!("spiral radius must be positive, got {k}")));
    }
    let count = turns * points_per_turn + usize::from(closed);
    let coords = (0..count)
        .flat_map(|i| {
            let t = i as f64 / points_per_turn as f64;
            let r = k * t / turns as f64;
            let a = 2.0 * PI * t;
            [r * a.cos(), r * a.sin()]
        })
        .collect();
    SamplingSet::new(2, coords)
}

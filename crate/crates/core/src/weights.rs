//! Voronoi weights and density of a sampling set inside the bandwidth region
//! `Y_K = [-K, K]` or `[-K, K]^2`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sampling::SamplingSet;

/// The interval or square `center + [-K, K]^dim`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandwidthRegion {
    pub dim: usize,
    pub k: f64,
    pub center: [f64; 2],
}

impl BandwidthRegion {
    pub fn new(dim: usize, k: f64) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::Parameter(format!("dimension must be 1 or 2, got {dim}")));
        }
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::Parameter(format!("bandwidth K must be positive, got {k}")));
        }
        Ok(Self { dim, k, center: [0.0; 2] })
    }

    pub fn centered_at(mut self, center: [f64; 2]) -> Self {
        self.center = center;
        self
    }

    /// Length or area of the region.
    pub fn measure(&self) -> f64 {
        (2.0 * self.k).powi(self.dim as i32)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightSet {
    pub mu: Vec<f64>,
}

impl WeightSet {
    pub fn total(&self) -> f64 {
        self.mu.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityReport {
    /// `sup_{y in Y} min_m |xi_m - y|`.
    pub delta_raw: f64,
    /// Half of `delta_raw`, the convention of the frame condition.
    pub delta_scaled: f64,
    /// `delta_scaled < 1/4`.
    pub satisfies_quarter_bound: bool,
}

impl DensityReport {
    fn from_raw(delta_raw: f64) -> Self {
        let delta_scaled = delta_raw / 2.0;
        Self { delta_raw, delta_scaled, satisfies_quarter_bound: delta_scaled < 0.25 }
    }
}

fn check_inside(x: f64, k: f64) -> Result<()> {
    if !x.is_finite() || x.abs() > k {
        return Err(Error::Domain(format!("sample {x} lies outside [-{k}, {k}]")));
    }
    Ok(())
}

/// Sorted positions relative to the region center, with the original index.
fn sorted_1d(points: &[f64], region: &BandwidthRegion) -> Result<Vec<(f64, usize)>> {
    if points.is_empty() {
        return Err(Error::DegenerateInput("no sample points".into()));
    }
    let mut v: Vec<(f64, usize)> = points.iter().map(|x| x - region.center[0]).zip(0..).collect();
    for (x, _) in &v {
        check_inside(*x, region.k)?;
    }
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    if let Some(w) = v.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::DegenerateInput(format!("duplicate sample point {}", w[0].0 + region.center[0])));
    }
    Ok(v)
}

fn weights_1d(points: &[f64], region: &BandwidthRegion) -> Result<WeightSet> {
    let v = sorted_1d(points, region)?;
    let k = region.k;
    let mut mu = vec![0.0; v.len()];
    for (i, (x, idx)) in v.iter().enumerate() {
        let lo = if i == 0 { -k } else { 0.5 * (v[i - 1].0 + x) };
        let hi = if i + 1 == v.len() { k } else { 0.5 * (x + v[i + 1].0) };
        mu[*idx] = hi - lo;
    }
    Ok(WeightSet { mu })
}

fn density_1d(points: &[f64], region: &BandwidthRegion) -> Result<DensityReport> {
    let v = sorted_1d(points, region)?;
    let k = region.k;
    let mut d = (v[0].0 + k).max(k - v[v.len() - 1].0);
    for w in v.windows(2) {
        d = d.max(0.5 * (w[1].0 - w[0].0));
    }
    Ok(DensityReport::from_raw(d))
}

/// Lengths of the Voronoi cells of `points` clipped to `[-K, K]`, in input order.
pub fn voronoi_weights_1d(points: &[f64], k: f64) -> Result<WeightSet> {
    weights_1d(points, &BandwidthRegion::new(1, k)?)
}

/// Areas of the Voronoi cells of `points` clipped to `[-K, K]^2`, in input order.
pub fn voronoi_weights_2d(points: &[[f64; 2]], k: f64) -> Result<WeightSet> {
    let cells = voronoi_cells(points, &BandwidthRegion::new(2, k)?)?;
    Ok(WeightSet { mu: cells.iter().map(|c| polygon_area(c)).collect() })
}

/// Voronoi weights for a 1D or 2D sampling set in `region`.
pub fn voronoi_weights(samples: &SamplingSet, region: &BandwidthRegion) -> Result<WeightSet> {
    check_dim(samples, region)?;
    if samples.dim() == 1 {
        weights_1d(samples.coords(), region)
    } else {
        let cells = voronoi_cells(&pairs(samples), region)?;
        Ok(WeightSet { mu: cells.iter().map(|c| polygon_area(c)).collect() })
    }
}

/// Density of a 1D or 2D sampling set in `region`.
pub fn density(samples: &SamplingSet, region: &BandwidthRegion) -> Result<DensityReport> {
    check_dim(samples, region)?;
    if samples.dim() == 1 {
        density_1d(samples.coords(), region)
    } else {
        let pts = pairs(samples);
        let cells = voronoi_cells(&pts, region)?;
        Ok(density_from_cells(&cells, &pts, region))
    }
}

/// Weights and density together, sharing the tessellation in 2D.
pub fn weights_and_density(samples: &SamplingSet, region: &BandwidthRegion) -> Result<(WeightSet, DensityReport)> {
    check_dim(samples, region)?;
    if samples.dim() == 1 {
        return Ok((weights_1d(samples.coords(), region)?, density_1d(samples.coords(), region)?));
    }
    let pts = pairs(samples);
    let cells = voronoi_cells(&pts, region)?;
    let mu = cells.iter().map(|c| polygon_area(c)).collect();
    Ok((WeightSet { mu }, density_from_cells(&cells, &pts, region)))
}

/// The farthest point of each cell from its generator is a cell vertex.
fn density_from_cells(cells: &[Polygon], pts: &[[f64; 2]], region: &BandwidthRegion) -> DensityReport {
    let c = region.center;
    let d = cells
        .par_iter()
        .zip(pts)
        .map(|(cell, p)| {
            let (px, py) = (p[0] - c[0], p[1] - c[1]);
            cell.iter().map(|v| (v[0] - px).hypot(v[1] - py)).fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    DensityReport::from_raw(d)
}

fn check_dim(samples: &SamplingSet, region: &BandwidthRegion) -> Result<()> {
    if samples.dim() != region.dim {
        return Err(Error::Shape { expected: region.dim, actual: samples.dim() });
    }
    Ok(())
}

fn pairs(samples: &SamplingSet) -> Vec<[f64; 2]> {
    samples.coords().chunks(2).map(|c| [c[0], c[1]]).collect()
}

type Polygon = Vec<[f64; 2]>;

/// Shoelace area of a convex polygon.
fn polygon_area(poly: &Polygon) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let s: f64 = (0..n)
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum();
    0.5 * s.abs()
}

/// Keeps the part of `poly` where `n . x <= c`.
fn clip(poly: &Polygon, n: [f64; 2], c: f64) -> Polygon {
    let mut out = Vec::with_capacity(poly.len() + 1);
    let side = |p: &[f64; 2]| n[0] * p[0] + n[1] * p[1] - c;
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        let (sa, sb) = (side(&a), side(&b));
        if sa <= 0.0 {
            out.push(a);
        }
        if (sa < 0.0 && sb > 0.0) || (sa > 0.0 && sb < 0.0) {
            let t = sa / (sa - sb);
            out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    out
}

/// Uniform bucket grid over the region for nearest-first neighbor sweeps.
struct Buckets {
    side: usize,
    size: f64,
    cells: Vec<Vec<usize>>,
}

impl Buckets {
    fn new(pts: &[[f64; 2]], k: f64) -> Self {
        let side = ((pts.len() as f64 / 2.0).sqrt().ceil() as usize).clamp(1, 1024);
        let size = 2.0 * k / side as f64;
        let mut cells = vec![Vec::new(); side * side];
        for (i, p) in pts.iter().enumerate() {
            let (bx, by) = (Self::coord(p[0], k, size, side), Self::coord(p[1], k, size, side));
            cells[by * side + bx].push(i);
        }
        Self { side, size, cells }
    }

    fn coord(x: f64, k: f64, size: f64, side: usize) -> usize {
        (((x + k) / size).floor().max(0.0) as usize).min(side - 1)
    }

    /// Indices in the square ring at Chebyshev distance `r` around bucket `(bx, by)`.
    fn ring(&self, bx: usize, by: usize, r: usize, out: &mut Vec<usize>) {
        out.clear();
        let (bx, by, r, s) = (bx as i64, by as i64, r as i64, self.side as i64);
        for y in by - r..=by + r {
            if y < 0 || y >= s {
                continue;
            }
            let step = if y == by - r || y == by + r { 1 } else { (2 * r).max(1) };
            let mut x = bx - r;
            while x <= bx + r {
                if x >= 0 && x < s {
                    out.extend_from_slice(&self.cells[(y * s + x) as usize]);
                }
                x += step;
            }
        }
    }
}

/// Voronoi cells clipped to the region, as polygons relative to its center.
fn voronoi_cells(points: &[[f64; 2]], region: &BandwidthRegion) -> Result<Vec<Polygon>> {
    if points.is_empty() {
        return Err(Error::DegenerateInput("no sample points".into()));
    }
    let k = region.k;
    let c = region.center;
    let pts: Vec<[f64; 2]> = points.iter().map(|p| [p[0] - c[0], p[1] - c[1]]).collect();
    for p in &pts {
        check_inside(p[0], k)?;
        check_inside(p[1], k)?;
    }
    let mut sorted: Vec<usize> = (0..pts.len()).collect();
    sorted.sort_by(|&a, &b| pts[a][0].total_cmp(&pts[b][0]).then(pts[a][1].total_cmp(&pts[b][1])));
    if let Some(w) = sorted.windows(2).find(|w| pts[w[0]] == pts[w[1]]) {
        let p = points[w[0]];
        return Err(Error::DegenerateInput(format!("duplicate sample point ({}, {})", p[0], p[1])));
    }

    let buckets = Buckets::new(&pts, k);
    let square: Polygon = vec![[-k, -k], [k, -k], [k, k], [-k, k]];
    let max_ring = buckets.side;
    let cells = (0..pts.len())
        .into_par_iter()
        .map_init(Vec::new, |ring, i| {
            let p = pts[i];
            let bx = Buckets::coord(p[0], k, buckets.size, buckets.side);
            let by = Buckets::coord(p[1], k, buckets.size, buckets.side);
            let mut poly = square.clone();
            for r in 0..=max_ring {
                // Every point in ring r is at least (r - 1) * size away; once
                // that exceeds twice the cell radius no bisector can cut it.
                let radius = poly.iter().map(|v| (v[0] - p[0]).hypot(v[1] - p[1])).fold(0.0, f64::max);
                if r >= 1 && (r as f64 - 1.0) * buckets.size > 2.0 * radius {
                    break;
                }
                buckets.ring(bx, by, r, ring);
                for &j in ring.iter() {
                    if j == i {
                        continue;
                    }
                    let q = pts[j];
                    let n = [q[0] - p[0], q[1] - p[1]];
                    let cc = 0.5 * (n[0] * (q[0] + p[0]) + n[1] * (q[1] + p[1]));
                    poly = clip(&poly, n, cc);
                }
            }
            poly
        })
        .collect();
    Ok(cells)
}

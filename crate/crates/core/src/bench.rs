//! Benchmark registry with the problem shapes of the published runtime
//! comparison, plus timing and CSV reporting.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{freq2wave, Freq2WaveOptions, LinearOperator};
use crate::patterns::PatternSpec;
use crate::sampling::SamplingSet;
use crate::signals::truncated_cosine_transform;
use crate::solver::{solve_least_squares, SolveOptions};
use crate::wavelet::Family;
use crate::weights::{voronoi_weights, BandwidthRegion};

pub const PROBLEM_NAMES: [&str; 5] = ["uniform1d", "jitter1d", "uniform2d", "jitter2d", "spiral"];

pub const WARMUP_RUNS: usize = 1;
pub const TIMED_RUNS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchProblem {
    pub name: String,
    pub family: Family,
    pub j: u32,
    pub pattern: PatternSpec,
    /// Half-width `K` of the weighting region; `None` runs unweighted.
    pub bandwidth: Option<f64>,
}

fn entry(name: &str, scale_log2: u32) -> Result<BenchProblem> {
    let s = 0.5f64.powi(scale_log2 as i32);
    let count = |m: usize| ((m as f64 * s).round() as usize).max(1);
    let (j, pattern, bandwidth) = match name {
        "uniform1d" => (12, PatternSpec::Grid { dim: 1, m: count(8192), eps: 0.5 }, None),
        "jitter1d" => {
            let m = count(5463);
            (11, PatternSpec::Jitter { dim: 1, m, eps: 0.75, eta: 0.1, seed: 1 }, Some(0.75 * (m as f64 + 1.0) / 2.0))
        }
        "uniform2d" => (8, PatternSpec::Grid { dim: 2, m: count(512), eps: 0.5 }, None),
        "jitter2d" => {
            let m = count(162);
            (5, PatternSpec::Jitter { dim: 2, m, eps: 0.4, eta: 0.1, seed: 2 }, Some(0.4 * (m as f64 + 1.0) / 2.0))
        }
        "spiral" => {
            let k = 24.0 * s;
            (5, PatternSpec::Spiral { turns: count(32), points_per_turn: count(865), k, closed: true }, Some(k))
        }
        other => {
            return Err(Error::Parameter(format!("unknown bench problem `{other}` (known: {})", PROBLEM_NAMES.join(", "))))
        }
    };
    let family = Family::Daubechies(4);
    if scale_log2 > j || (1usize << (j - scale_log2)) < family.min_space_len() {
        return Err(Error::Parameter(format!("scale 2^-{scale_log2} is too small for `{name}`")));
    }
    Ok(BenchProblem { name: name.to_string(), family, j: j - scale_log2, pattern, bandwidth })
}

/// The named problem at full size.
pub fn problem(name: &str) -> Result<BenchProblem> {
    entry(name, 0)
}

/// The named problem with sample counts per axis and `2^J` both multiplied
/// by `scale`, which must be `2^-k`.
pub fn scaled_problem(name: &str, scale: f64) -> Result<BenchProblem> {
    let k = -scale.log2();
    if !(scale > 0.0 && scale <= 1.0) || (k - k.round()).abs() > 1e-12 {
        return Err(Error::Parameter(format!("scale must be a power of 1/2, got {scale}")));
    }
    entry(name, k.round() as u32)
}

pub fn registry() -> Vec<BenchProblem> {
    PROBLEM_NAMES.iter().map(|n| problem(n).expect("registry entries are valid")).collect()
}

/// A generated problem ready to run.
#[derive(Debug, Clone)]
pub struct BenchInstance {
    pub problem: BenchProblem,
    pub samples: SamplingSet,
    pub data: Vec<Complex64>,
}

impl BenchProblem {
    pub fn dim(&self) -> usize {
        match self.pattern {
            PatternSpec::Grid { dim, .. } | PatternSpec::Jitter { dim, .. } => dim,
            PatternSpec::Spiral { .. } => 2,
        }
    }

    /// `(M, columns)` of the change-of-basis matrix.
    pub fn shape(&self) -> (usize, usize) {
        let m = match self.pattern {
            PatternSpec::Grid { dim, m, .. } | PatternSpec::Jitter { dim, m, .. } => m.pow(dim as u32),
            PatternSpec::Spiral { turns, points_per_turn, closed, .. } => turns * points_per_turn + usize::from(closed),
        };
        (m, (1usize << self.j).pow(self.dim() as u32))
    }

    pub fn instance(&self) -> Result<BenchInstance> {
        let samples = self.pattern.generate()?;
        let data = truncated_cosine_transform(&samples);
        Ok(BenchInstance { problem: self.clone(), samples, data })
    }
}

pub fn bench_solve_options() -> SolveOptions {
    SolveOptions { max_iterations: Some(200), tolerance: 1e-8, ..Default::default() }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunTiming {
    pub init_seconds: f64,
    pub solve_seconds: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// One timed construction (weights and operator) and solve.
pub fn run_once(inst: &BenchInstance) -> Result<RunTiming> {
    let p = &inst.problem;
    let start = Instant::now();
    let weights = match p.bandwidth {
        Some(k) => Some(voronoi_weights(&inst.samples, &BandwidthRegion::new(p.dim(), k)?)?.mu),
        None => None,
    };
    let opts = Freq2WaveOptions { weights, ..Default::default() };
    let op = freq2wave(&inst.samples, p.family, p.j, &opts)?;
    let init_seconds = start.elapsed().as_secs_f64();
    debug_assert_eq!((op.nrows(), op.ncols()), p.shape());

    let start = Instant::now();
    let (_, stats) = solve_least_squares(&op, &inst.data, &bench_solve_options())?;
    let solve_seconds = start.elapsed().as_secs_f64();
    Ok(RunTiming { init_seconds, solve_seconds, iterations: stats.iterations, converged: stats.converged })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub problem: String,
    pub rows: usize,
    pub cols: usize,
    pub init_seconds: f64,
    pub solve_seconds: f64,
    pub iterations: usize,
    pub seconds_per_iteration: f64,
}

pub const CSV_HEADER: &str = "problem,rows,cols,init_s,solve_s,iterations,s_per_iter";

impl BenchRecord {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.problem,
            self.rows,
            self.cols,
            self.init_seconds,
            self.solve_seconds,
            self.iterations,
            self.seconds_per_iteration
        )
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Runs `warmup` untimed repetitions, then reports medians over `runs`.
pub fn run_bench(problem: &BenchProblem, warmup: usize, runs: usize) -> Result<BenchRecord> {
    if runs == 0 {
        return Err(Error::Parameter("at least one timed run is required".into()));
    }
    let inst = problem.instance()?;
    for _ in 0..warmup {
        run_once(&inst)?;
    }
    let timings = (0..runs).map(|_| run_once(&inst)).collect::<Result<Vec<_>>>()?;
    let iterations = timings[0].iterations;
    if timings.iter().any(|t| t.iterations != iterations) {
        return Err(Error::Numerical("iteration count changed between identical runs".into()));
    }
    let init_seconds = median(timings.iter().map(|t| t.init_seconds).collect());
    let solve_seconds = median(timings.iter().map(|t| t.solve_seconds).collect());
    let (rows, cols) = problem.shape();
    Ok(BenchRecord {
        problem: problem.name.clone(),
        rows,
        cols,
        init_seconds,
        solve_seconds,
        iterations,
        seconds_per_iteration: if iterations > 0 { solve_seconds / iterations as f64 } else { 0.0 },
    })
}

/// Appends a record, writing the header first if the file is new or empty.
pub fn append_record(path: &Path, record: &BenchRecord) -> Result<()> {
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    if f.metadata()?.len() == 0 {
        writeln!(f, "{CSV_HEADER}")?;
    }
    writeln!(f, "{}", record.csv_line())?;
    Ok(())
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gsampling::bench::{append_record, problem, run_bench, scaled_problem, TIMED_RUNS, WARMUP_RUNS};
use gsampling::io::{self, Format};
use gsampling::operator::{detect_uniform_grid, freq2wave, Freq2WaveOptions};
use gsampling::patterns::PatternSpec;
use gsampling::signals::truncated_cosine_transform;
use gsampling::solver::{solve_least_squares, Method, SolveOptions};
use gsampling::weights::{weights_and_density, BandwidthRegion, DensityReport};
use gsampling::{Error, Family, SamplingSet};

#[derive(Parser)]
#[command(name = "gs", version, about = "Reconstruct functions on [-1/2, 1/2] from Fourier samples")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a sampling pattern, optionally with truncated-cosine samples.
    Gen(GenArgs),
    /// Voronoi weights and density of a frequency file.
    Weights(WeightsArgs),
    /// Solve for scaling-function coefficients.
    Reconstruct(ReconstructArgs),
    /// Evaluate a coefficient file on a dyadic grid.
    Evaluate(EvaluateArgs),
    /// Time a registered benchmark problem.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum PatternKind {
    Grid,
    Jitter,
    Spiral,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Bin,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Bin => Format::Binary,
        }
    }
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum, default_value = "grid")]
    pattern: PatternKind,
    #[arg(long, default_value_t = 1)]
    dim: usize,
    /// Points (per axis in 2D).
    #[arg(short = 'm', long, default_value_t = 128)]
    points: usize,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    /// Jitter amplitude.
    #[arg(long, default_value_t = 0.0)]
    eta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 32)]
    turns: usize,
    #[arg(long, default_value_t = 865)]
    points_per_turn: usize,
    /// Spiral radius.
    #[arg(long, default_value_t = 24.0)]
    radius: f64,
    /// Include the spiral end point.
    #[arg(long)]
    closed: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    #[arg(short, long)]
    output: PathBuf,
    /// Also write truncated-cosine samples at the generated points.
    #[arg(long)]
    samples: Option<PathBuf>,
}

#[derive(Args)]
struct WeightsArgs {
    freq_file: PathBuf,
    /// Half-width K of the region [-K, K]^d.
    #[arg(long)]
    bandwidth: f64,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct ReconstructArgs {
    freq_file: PathBuf,
    sample_file: PathBuf,
    #[arg(long, default_value = "haar")]
    family: Family,
    #[arg(short = 'J', long = "scale-J")]
    scale_j: u32,
    /// Half-width K of the bandwidth region; enables weighting for nonuniform sets.
    #[arg(long)]
    bandwidth: Option<f64>,
    /// Force Voronoi weighting on or off.
    #[arg(long)]
    weighted: Option<bool>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Use conjugate gradients instead of conjugate residuals.
    #[arg(long)]
    cg: bool,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    coeff_file: PathBuf,
    #[arg(short = 'R', long)]
    resolution: u32,
    /// CSV for 1D, 16-bit PGM for 2D.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    problem: String,
    /// Power of 1/2 applied to sample counts and 2^J.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, default_value_t = TIMED_RUNS)]
    runs: usize,
    #[arg(long, default_value_t = WARMUP_RUNS)]
    warmup: usize,
    /// CSV report the record is appended to.
    #[arg(long, default_value = "bench.csv")]
    report: PathBuf,
}

fn print_density(d: &DensityReport) {
    println!("delta_raw = {}", d.delta_raw);
    println!("delta_scaled = {}", d.delta_scaled);
    println!("quarter_bound = {}", if d.satisfies_quarter_bound { "satisfied" } else { "violated" });
}

fn gen(a: GenArgs) -> Result<(), Error> {
    let spec = match a.pattern {
        PatternKind::Grid => PatternSpec::Grid { dim: a.dim, m: a.points, eps: a.eps },
        PatternKind::Jitter => PatternSpec::Jitter { dim: a.dim, m: a.points, eps: a.eps, eta: a.eta, seed: a.seed },
        PatternKind::Spiral => {
            PatternSpec::Spiral { turns: a.turns, points_per_turn: a.points_per_turn, k: a.radius, closed: a.closed }
        }
    };
    let set = spec.generate()?;
    io::write_frequencies(&a.output, &set, a.format.into())?;
    if let Some(path) = a.samples {
        io::write_samples(&path, &truncated_cosine_transform(&set), a.format.into())?;
    }
    Ok(())
}

fn weights(a: WeightsArgs) -> Result<(), Error> {
    let set = io::read_frequencies(&a.freq_file)?;
    let region = BandwidthRegion::new(set.dim(), a.bandwidth)?;
    let (w, d) = weights_and_density(&set, &region)?;
    io::write_weights(&a.output, &w.mu)?;
    println!("points = {}", set.len());
    println!("total_weight = {}", w.total());
    print_density(&d);
    Ok(())
}

fn is_uniform(set: &SamplingSet) -> bool {
    if set.dim() == 1 {
        return detect_uniform_grid(set.coords()).is_some();
    }
    let m = set.len();
    let ma = (m as f64).sqrt().round() as usize;
    if ma * ma != m {
        return false;
    }
    let g: Vec<f64> = (0..ma).map(|j| set.point(j)[1]).collect();
    detect_uniform_grid(&g).is_some() && (0..m).all(|i| set.point(i) == [g[i / ma], g[i % ma]])
}

fn reconstruct(a: ReconstructArgs) -> Result<(), Error> {
    let set = io::read_frequencies(&a.freq_file)?;
    let samples = io::read_samples(&a.sample_file)?;
    if samples.len() != set.len() {
        return Err(Error::Shape { expected: set.len(), actual: samples.len() });
    }
    let weighted = a.weighted.unwrap_or(a.bandwidth.is_some() && !is_uniform(&set));
    let mut opts = Freq2WaveOptions { bandwidth: a.bandwidth, ..Default::default() };
    let mut density = None;
    if weighted {
        let k = a.bandwidth.ok_or_else(|| Error::Parameter("weighting needs --bandwidth".into()))?;
        let (w, d) = weights_and_density(&set, &BandwidthRegion::new(set.dim(), k)?)?;
        opts.weights = Some(w.mu);
        density = Some(d);
    }
    let op = freq2wave(&set, a.family, a.scale_j, &opts)?;
    let solve = SolveOptions {
        max_iterations: a.max_iter,
        tolerance: a.tol,
        method: if a.cg { Method::Cgnr } else { Method::Crnr },
        ..Default::default()
    };
    let (coeffs, stats) = solve_least_squares(&op, &samples, &solve)?;
    io::write_coefficients(&a.output, &coeffs)?;

    let mut sidecar = format!(
        "key,value\niterations,{}\nfinal_residual,{}\nconverged,{}\nweighted,{}\n",
        stats.iterations, stats.final_residual, stats.converged, weighted
    );
    if let Some(d) = density {
        sidecar.push_str(&format!("delta_raw,{}\ndelta_scaled,{}\n", d.delta_raw, d.delta_scaled));
    }
    fs::write(stats_path(&a.output), sidecar)?;
    println!("iterations = {}", stats.iterations);
    println!("final_residual = {}", stats.final_residual);
    if !stats.converged {
        return Err(Error::Numerical(format!(
            "solver stopped after {} iterations at residual {}",
            stats.iterations, stats.final_residual
        )));
    }
    Ok(())
}

fn stats_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".stats.csv");
    PathBuf::from(s)
}

fn evaluate(a: EvaluateArgs) -> Result<(), Error> {
    let coeffs = io::read_coefficients(&a.coeff_file)?;
    let ev = coeffs.evaluate(a.resolution)?;
    io::write_evaluation(&a.output, &ev)
}

fn bench(a: BenchArgs) -> Result<(), Error> {
    let p = if a.scale == 1.0 { problem(&a.problem)? } else { scaled_problem(&a.problem, a.scale)? };
    let record = run_bench(&p, a.warmup, a.runs)?;
    append_record(&a.report, &record)?;
    println!("{}", gsampling::bench::CSV_HEADER);
    println!("{}", record.csv_line());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Weights(a) => weights(a),
        Command::Reconstruct(a) => reconstruct(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Bench(a) => bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gs: {e}");
            ExitCode::from(e.class().exit_code() as u8)
        }
    }
}

//! Command-line driver for torus summation experiments.
//!
//! Every subcommand reads a JSON config (where it needs one), renders CSV or
//! JSON, and writes to `--out` or stdout. Exit codes: 0 on success, 2 when a
//! convergence or simulation tolerance was not met, 1 for any other failure.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use fejsum_core::experiment::{
    run_adversarial, run_convergence, run_tensor_sim, seeded_points, ExperimentConfig,
    SamplePoints, TensorSimConfig,
};
use fejsum_core::funcspace::TestFunction;
use fejsum_core::index::{MultiIndex, RectIndex};
use fejsum_core::kernels::{dirichlet, fejer};
use fejsum_core::summation::FourierTable;

#[derive(Parser)]
#[command(
    name = "fejsum",
    version,
    about = "Fejér summation experiments on high-dimensional tori"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate an averaging kernel on a uniform grid over one period.
    KernelTable(KernelTableArgs),
    /// Dump Fourier coefficients of a configured function over a degree box.
    Fourier(FourierArgs),
    /// Evaluate one Fejér mean of a configured function at sample points.
    Fejer(FejerArgs),
    /// Sweep a degree schedule and report per-step error quantiles.
    Converge(ConvergeArgs),
    /// Exhaustively scan rectangles for the worst error per sample point.
    Adversarial(AdversarialArgs),
    /// Replay a staircase of discrete averaging operators on a product grid.
    TensorSim(TensorSimArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Fejer,
    Dirichlet,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct KernelTableArgs {
    /// Which kernel to tabulate.
    #[arg(long, value_enum)]
    kind: Kind,
    /// Kernel degree.
    #[arg(long)]
    degree: u32,
    /// Number of uniform nodes on [0, 1).
    #[arg(long, default_value_t = 256)]
    nodes: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct FourierArgs {
    /// Experiment config naming the function.
    #[arg(long)]
    config: PathBuf,
    /// Degree box, comma-separated per axis; defaults to a small cube.
    #[arg(long, value_delimiter = ',')]
    degrees: Option<Vec<u32>>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct FejerArgs {
    /// Experiment config naming the function and sampling plan.
    #[arg(long)]
    config: PathBuf,
    /// Rectangle degrees, comma-separated; defaults to the config cube.
    #[arg(long, value_delimiter = ',')]
    rect: Option<Vec<u32>>,
    /// Replaces the config's sampling seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct ConvergeArgs {
    /// Experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Replaces the config's sampling seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the config's `out` path; stdout when both are absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct AdversarialArgs {
    /// Experiment config; `p_max` is the scan dimension (at most 3).
    #[arg(long)]
    config: PathBuf,
    /// Cap on (rectangle, point) evaluations; unlimited when absent.
    #[arg(long)]
    budget: Option<u64>,
    /// Replaces the config's sampling seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct TensorSimArgs {
    /// Tensor simulation config.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode> {
    match command {
        Command::KernelTable(args) => kernel_table(args),
        Command::Fourier(args) => fourier(args),
        Command::Fejer(args) => fejer_cmd(args),
        Command::Converge(args) => converge(args),
        Command::Adversarial(args) => adversarial(args),
        Command::TensorSim(args) => tensor_sim(args),
    }
}

fn load_config(path: &Path, seed: Option<u64>) -> Result<(ExperimentConfig, PathBuf)> {
    let cfg = ExperimentConfig::from_json_file(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let cfg = match seed {
        Some(seed) => cfg.with_seed(seed),
        None => cfg,
    };
    let base = path.parent().unwrap_or_else(|| Path::new(".")).to_path_buf();
    Ok((cfg, base))
}

fn write_out(out: Option<&Path>, contents: &str) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)
                    .with_context(|| format!("creating {}", dir.display()))?;
            }
            std::fs::write(path, contents)
                .with_context(|| format!("writing {}", path.display()))
        }
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct KernelRow {
    t: f64,
    value: f64,
}

fn kernel_table(args: KernelTableArgs) -> Result<ExitCode> {
    anyhow::ensure!(args.nodes > 0, "--nodes must be positive");
    let rows: Vec<KernelRow> = (0..args.nodes)
        .map(|j| {
            let t = j as f64 / args.nodes as f64;
            let value = match args.kind {
                Kind::Fejer => fejer(args.degree, t),
                Kind::Dirichlet => dirichlet(args.degree, t),
            };
            KernelRow { t, value }
        })
        .collect();
    let contents = match args.format {
        Format::Json => serde_json::to_string_pretty(&rows)?,
        Format::Csv => {
            let mut s = String::from("t,value\n");
            for row in &rows {
                let _ = writeln!(s, "{},{}", row.t, row.value);
            }
            s
        }
    };
    write_out(args.out.as_deref(), &contents)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct FourierRow {
    index: Vec<i64>,
    re: f64,
    im: f64,
}

fn fourier(args: FourierArgs) -> Result<ExitCode> {
    let (cfg, base) = load_config(&args.config, None)?;
    let f = TestFunction::from_spec(&cfg.function, &base)?;
    let degrees = args
        .degrees
        .unwrap_or_else(|| vec![cfg.n_max.min(8); cfg.p_max]);
    anyhow::ensure!(!degrees.is_empty(), "--degrees needs at least one axis");
    let table = FourierTable::build(&f, &degrees)?;

    let mut rows = Vec::new();
    let mut entry: Vec<i64> = degrees.iter().map(|&n| -i64::from(n)).collect();
    'rows: loop {
        let index = MultiIndex::from_pairs(
            entry.iter().enumerate().map(|(k, &n)| (k + 1, n)),
        )?;
        let c = table.coeff(&index)?;
        rows.push(FourierRow { index: entry.clone(), re: c.re, im: c.im });
        let mut axis = entry.len();
        loop {
            if axis == 0 {
                break 'rows;
            }
            axis -= 1;
            if entry[axis] < i64::from(degrees[axis]) {
                entry[axis] += 1;
                for (later, &d) in entry.iter_mut().zip(degrees.iter()).skip(axis + 1) {
                    *later = -i64::from(d);
                }
                continue 'rows;
            }
        }
    }

    let contents = match args.format {
        Format::Json => serde_json::to_string_pretty(&rows)?,
        Format::Csv => {
            let mut s = String::from("");
            for k in 1..=degrees.len() {
                let _ = write!(s, "n_{k},");
            }
            let _ = writeln!(s, "re,im");
            for row in &rows {
                for n in &row.index {
                    let _ = write!(s, "{n},");
                }
                let _ = writeln!(s, "{},{}", row.re, row.im);
            }
            s
        }
    };
    write_out(args.out.as_deref(), &contents)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct FejerRow {
    point: usize,
    x: Vec<f64>,
    re: f64,
    im: f64,
    abs_err: f64,
}

fn fejer_cmd(args: FejerArgs) -> Result<ExitCode> {
    let (cfg, base) = load_config(&args.config, args.seed)?;
    let f = TestFunction::from_spec(&cfg.function, &base)?;
    let degrees = args.rect.unwrap_or_else(|| vec![cfg.n_max; cfg.p_max]);
    let rect = RectIndex::new(degrees)?;
    let dim = rect.p().max(f.max_coord());
    let points = match &cfg.sample_points {
        SamplePoints::Seeded { count, seed } => seeded_points(*count, dim, *seed),
        SamplePoints::Explicit { points } => points.clone(),
    };
    let table = FourierTable::build(&f, rect.degrees())?;
    let mut rows = Vec::new();
    for (i, x) in points.iter().enumerate() {
        let mean = table.fejer_mean_at(&rect, x)?;
        let target = f.eval(x)?;
        rows.push(FejerRow {
            point: i,
            x: x.clone(),
            re: mean.re,
            im: mean.im,
            abs_err: (mean - target).norm(),
        });
    }

    let contents = match args.format {
        Format::Json => serde_json::to_string_pretty(&rows)?,
        Format::Csv => {
            let dim = rows.first().map_or(0, |r| r.x.len());
            let mut s = String::from("point");
            for k in 1..=dim {
                let _ = write!(s, ",x_{k}");
            }
            let _ = writeln!(s, ",re,im,abs_err");
            for row in &rows {
                let _ = write!(s, "{}", row.point);
                for v in &row.x {
                    let _ = write!(s, ",{v}");
                }
                let _ = writeln!(s, ",{},{},{}", row.re, row.im, row.abs_err);
            }
            s
        }
    };
    write_out(args.out.as_deref(), &contents)?;
    Ok(ExitCode::SUCCESS)
}

fn converge(args: ConvergeArgs) -> Result<ExitCode> {
    let (cfg, base) = load_config(&args.config, args.seed)?;
    let report = run_convergence(&cfg, &base)?;
    let contents = match args.format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json()?,
    };
    let config_out = cfg.out.as_ref().map(|rel| base.join(rel));
    let out = args.out.clone().or(config_out);
    write_out(out.as_deref(), &contents)?;
    if report.converged {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!(
            "tolerance not met: final median error {} > {}",
            report.steps.last().map_or(f64::NAN, |s| s.err_median),
            cfg.tolerance
        );
        Ok(ExitCode::from(2))
    }
}

fn adversarial(args: AdversarialArgs) -> Result<ExitCode> {
    let (cfg, base) = load_config(&args.config, args.seed)?;
    let report = run_adversarial(&cfg, &base, args.budget)?;
    let contents = match args.format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json()?,
    };
    write_out(args.out.as_deref(), &contents)?;
    Ok(ExitCode::SUCCESS)
}

fn tensor_sim(args: TensorSimArgs) -> Result<ExitCode> {
    let cfg = TensorSimConfig::from_json_file(&args.config)
        .with_context(|| format!("reading config {}", args.config.display()))?;
    let base = args.config.parent().unwrap_or_else(|| Path::new(".")).to_path_buf();
    let report = run_tensor_sim(&cfg, &base)?;
    let contents = match args.format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json()?,
    };
    write_out(args.out.as_deref(), &contents)?;
    if report.passed {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!(
            "tolerance not met: final error {} > {}",
            report.final_error, cfg.tolerance
        );
        Ok(ExitCode::from(2))
    }
}

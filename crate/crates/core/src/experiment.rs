//! Config-driven experiments and their serialized reports.
//!
//! An [`ExperimentConfig`] names a test function, a degree schedule, and a
//! sampling plan. [`run_convergence`] sweeps the schedule dimension by
//! dimension and records error quantiles per step; [`adversarial_search`]
//! exhaustively scans low-dimensional rectangles for the worst one per
//! sample point; [`run_tensor_sim`] replays a staircase of discrete
//! averaging operators on a product grid. Every report renders to CSV and
//! JSON with no timestamps or other environment noise, so identical configs
//! produce byte-identical output.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::{FunctionSpec, TestFunction};
use crate::index::{RectIndex, Schedule};
use crate::summation::{dimension_sweep, FourierTable};
use crate::tensor_net::{staircase_harness, HarnessStep, OperatorNet};

/// Sampling plan for pointwise error measurement.
///
/// `Seeded` draws `count` uniform points from a ChaCha8 stream, so a config
/// carries everything needed to reproduce a run. `Explicit` fixes the points
/// verbatim; each must supply at least as many coordinates as the run needs
/// (active dimensions and every coordinate the function reads).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum SamplePoints {
    Seeded { count: usize, seed: u64 },
    Explicit { points: Vec<Vec<f64>> },
}

/// One convergence or adversarial run, ready to serialize.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub function: FunctionSpec,
    pub schedule: Schedule,
    pub p_max: usize,
    pub n_max: u32,
    pub sample_points: SamplePoints,
    pub tolerance: f64,
    /// Destination hint for emitted reports. The library never writes it;
    /// callers that own I/O resolve it against their working directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

impl ExperimentConfig {
    /// Parses a config from a JSON file.
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// The seed that drives both point sampling and path randomness.
    /// Explicit point lists leave no seed to echo, so they run with 0.
    pub fn effective_seed(&self) -> u64 {
        match self.sample_points {
            SamplePoints::Seeded { seed, .. } => seed,
            SamplePoints::Explicit { .. } => 0,
        }
    }

    /// Returns the config with its sampling seed replaced. Explicit point
    /// lists are already fully determined, so they pass through unchanged.
    #[must_use]
    pub fn with_seed(mut self, seed: u64) -> Self {
        if let SamplePoints::Seeded { count, .. } = self.sample_points {
            self.sample_points = SamplePoints::Seeded { count, seed };
        }
        self
    }

    fn resolve_points(&self, dim: usize) -> Result<Vec<Vec<f64>>> {
        match &self.sample_points {
            SamplePoints::Seeded { count, seed } => {
                if *count == 0 {
                    return Err(Error::invalid("sample count must be positive"));
                }
                Ok(seeded_points(*count, dim, *seed))
            }
            SamplePoints::Explicit { points } => {
                if points.is_empty() {
                    return Err(Error::invalid("explicit sample list is empty"));
                }
                for x in points {
                    if x.len() < dim {
                        return Err(Error::MissingCoordinate { needed: dim, got: x.len() });
                    }
                }
                Ok(points.clone())
            }
        }
    }

    fn validate(&self) -> Result<()> {
        if self.p_max == 0 {
            return Err(Error::invalid("p_max must be at least 1"));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::invalid("tolerance must be positive"));
        }
        Ok(())
    }
}

/// Uniform points on `[0,1)^dim`, reproducible from the seed.
pub fn seeded_points(count: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..dim).map(|_| rng.gen::<f64>()).collect())
        .collect()
}

/// One step of a convergence run: the net position and the error quantiles
/// of `|Fejér mean - f|` over the sample points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub p: usize,
    pub degrees: Vec<u32>,
    pub err_max: f64,
    pub err_median: f64,
}

/// Output of [`run_convergence`]: the config echo, library version, resolved
/// seed, the Orlicz functional of the target for `d = 0..=3`, per-step error
/// records, and whether the final median error met the tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub config: ExperimentConfig,
    pub version: String,
    pub seed: u64,
    pub orlicz: Vec<f64>,
    pub steps: Vec<StepRecord>,
    pub converged: bool,
}

/// Sweeps the schedule through dimensions `1..=p_max`, growing degrees to
/// `n_max` inside each dimension before adding the next, and records error
/// quantiles at every step.
///
/// Relative paths inside the function spec resolve against `base`. The
/// sample seed also drives path randomness, so the whole report is a pure
/// function of the config.
pub fn run_convergence(cfg: &ExperimentConfig, base: &Path) -> Result<ConvergenceReport> {
    cfg.validate()?;
    let f = TestFunction::from_spec(&cfg.function, base)?;
    let seed = cfg.effective_seed();
    let dim = cfg.p_max.max(f.max_coord());
    let points = cfg.resolve_points(dim)?;
    let sweep = dimension_sweep(&f, &cfg.schedule, cfg.p_max, cfg.n_max, &points, seed)?;
    let steps: Vec<StepRecord> = sweep
        .into_iter()
        .enumerate()
        .map(|(step, s)| StepRecord {
            step,
            p: s.p,
            degrees: s.rect.degrees().to_vec(),
            err_max: s.err_max,
            err_median: s.err_median,
        })
        .collect();
    let converged = steps.last().is_some_and(|s| s.err_median <= cfg.tolerance);
    let orlicz: Vec<f64> = (0..=3).map(|d| f.orlicz_functional(d)).collect();
    Ok(ConvergenceReport {
        config: cfg.clone(),
        version: env!("CARGO_PKG_VERSION").to_owned(),
        seed,
        orlicz,
        steps,
        converged,
    })
}

impl ConvergenceReport {
    /// Renders the report as CSV. Metadata lines start with `#`; the data
    /// body has fixed columns `step,p,N_1..N_{p_max},err_max,err_median`
    /// with unused degree columns padded by -1.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        push_meta(&mut s, "convergence", &self.version, self.seed);
        let _ = writeln!(s, "# converged: {}", self.converged);
        let _ = writeln!(s, "# tolerance: {}", self.tolerance_display());
        let orlicz: Vec<String> =
            self.orlicz.iter().enumerate().map(|(d, v)| format!("d{d}={v}")).collect();
        let _ = writeln!(s, "# orlicz: {}", orlicz.join(" "));
        push_config_echo(&mut s, &self.config);
        let _ = write!(s, "step,p");
        for k in 1..=self.config.p_max {
            let _ = write!(s, ",N_{k}");
        }
        let _ = writeln!(s, ",err_max,err_median");
        for rec in &self.steps {
            let _ = write!(s, "{},{}", rec.step, rec.p);
            for k in 0..self.config.p_max {
                match rec.degrees.get(k) {
                    Some(n) => {
                        let _ = write!(s, ",{n}");
                    }
                    None => {
                        let _ = write!(s, ",-1");
                    }
                }
            }
            let _ = writeln!(s, ",{},{}", rec.err_max, rec.err_median);
        }
        s
    }

    /// Renders the report as pretty JSON; `parse(to_json(r)) == r`.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    fn tolerance_display(&self) -> f64 {
        self.config.tolerance
    }
}

/// Serialization target for emitted reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::invalid(format!("unknown format {other:?}, expected csv or json"))),
        }
    }
}

/// Writes a convergence report to `path` in the requested format, creating
/// missing parent directories.
pub fn emit(report: &ConvergenceReport, format: OutputFormat, path: &Path) -> Result<()> {
    let contents = match format {
        OutputFormat::Csv => report.to_csv(),
        OutputFormat::Json => report.to_json()?,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, contents)?;
    Ok(())
}

/// Worst, best, and cube-rectangle errors at one sample point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdversarialPointRecord {
    pub x: Vec<f64>,
    pub worst_degrees: Vec<u32>,
    pub worst_err: f64,
    pub best_degrees: Vec<u32>,
    pub best_err: f64,
    pub cube_err: f64,
}

/// Output of [`adversarial_search`]: per-point extremes over an exhaustive
/// rectangle scan, plus the scan bookkeeping.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdversarialReport {
    pub version: String,
    pub p: usize,
    pub n_max: u32,
    /// Rectangle evaluations spent, counting one per (rectangle, point)
    /// pair. The cube baseline is charged up front.
    pub evals: u64,
    /// True when the budget ran out before the scan finished; the extremes
    /// then cover only the rectangles visited.
    pub partial: bool,
    pub records: Vec<AdversarialPointRecord>,
}

/// Exhaustively scans every rectangle with degrees `0..=n_max` in `p <= 3`
/// dimensions and records, per sample point, the rectangle maximizing and
/// minimizing `|Fejér mean - f|`, alongside the full cube's error.
///
/// The scan runs in lexicographic degree order and ties keep the earliest
/// rectangle, so results are deterministic. `budget` caps the number of
/// (rectangle, point) evaluations; the cube baseline is charged first and
/// seeds every extreme, which keeps `best_err <= cube_err <= worst_err`
/// true even for truncated scans.
pub fn adversarial_search(
    f: &TestFunction,
    p: usize,
    n_max: u32,
    points: &[Vec<f64>],
    budget: Option<u64>,
) -> Result<AdversarialReport> {
    if p == 0 || p > 3 {
        return Err(Error::invalid("exhaustive rectangle search supports 1 to 3 dimensions"));
    }
    if points.is_empty() {
        return Err(Error::invalid("adversarial search needs at least one sample point"));
    }
    let needed = p.max(f.max_coord());
    for x in points {
        if x.len() < needed {
            return Err(Error::MissingCoordinate { needed, got: x.len() });
        }
    }
    let budget = budget.unwrap_or(u64::MAX);
    let table = FourierTable::build(f, &vec![n_max; p])?;
    let targets: Vec<Complex64> = points.iter().map(|x| f.eval(x)).collect::<Result<_>>()?;

    let cube = RectIndex::cube(p, n_max)?;
    let mut evals: u64 = 0;
    let mut records: Vec<AdversarialPointRecord> = Vec::with_capacity(points.len());
    for (x, &target) in points.iter().zip(&targets) {
        let cube_err = (table.fejer_mean_at(&cube, x)? - target).norm();
        evals += 1;
        records.push(AdversarialPointRecord {
            x: x.clone(),
            worst_degrees: cube.degrees().to_vec(),
            worst_err: cube_err,
            best_degrees: cube.degrees().to_vec(),
            best_err: cube_err,
            cube_err,
        });
    }

    let mut partial = false;
    let mut degrees = vec![0u32; p];
    'scan: loop {
        let rect = RectIndex::new(degrees.clone())?;
        for (i, x) in points.iter().enumerate() {
            if evals >= budget {
                partial = true;
                break 'scan;
            }
            evals += 1;
            let err = (table.fejer_mean_at(&rect, x)? - targets[i]).norm();
            let rec = &mut records[i];
            if err > rec.worst_err {
                rec.worst_err = err;
                rec.worst_degrees = degrees.clone();
            }
            if err < rec.best_err {
                rec.best_err = err;
                rec.best_degrees = degrees.clone();
            }
        }
        if !advance_odometer(&mut degrees, n_max) {
            break;
        }
    }

    Ok(AdversarialReport {
        version: env!("CARGO_PKG_VERSION").to_owned(),
        p,
        n_max,
        evals,
        partial,
        records,
    })
}

/// Runs [`adversarial_search`] from a config, sampling points the same way
/// [`run_convergence`] does. `config.p_max` is the scan dimension.
pub fn run_adversarial(
    cfg: &ExperimentConfig,
    base: &Path,
    budget: Option<u64>,
) -> Result<AdversarialReport> {
    cfg.validate()?;
    let f = TestFunction::from_spec(&cfg.function, base)?;
    let dim = cfg.p_max.max(f.max_coord());
    let points = cfg.resolve_points(dim)?;
    adversarial_search(&f, cfg.p_max, cfg.n_max, &points, budget)
}

fn advance_odometer(degrees: &mut [u32], n_max: u32) -> bool {
    for d in degrees.iter_mut().rev() {
        if *d < n_max {
            *d += 1;
            return true;
        }
        *d = 0;
    }
    false
}

impl AdversarialReport {
    /// Renders the report as CSV with `#` metadata lines and one row per
    /// sample point.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# fejsum adversarial report");
        let _ = writeln!(s, "# version: {}", self.version);
        let _ = writeln!(s, "# p: {}", self.p);
        let _ = writeln!(s, "# n_max: {}", self.n_max);
        let _ = writeln!(s, "# evals: {}", self.evals);
        let _ = writeln!(s, "# partial: {}", self.partial);
        let dim = self.records.first().map_or(0, |r| r.x.len());
        let _ = write!(s, "point");
        for k in 1..=dim {
            let _ = write!(s, ",x_{k}");
        }
        for k in 1..=self.p {
            let _ = write!(s, ",worst_N_{k}");
        }
        let _ = write!(s, ",worst_err");
        for k in 1..=self.p {
            let _ = write!(s, ",best_N_{k}");
        }
        let _ = writeln!(s, ",best_err,cube_err");
        for (i, rec) in self.records.iter().enumerate() {
            let _ = write!(s, "{i}");
            for v in &rec.x {
                let _ = write!(s, ",{v}");
            }
            for n in &rec.worst_degrees {
                let _ = write!(s, ",{n}");
            }
            let _ = write!(s, ",{}", rec.worst_err);
            for n in &rec.best_degrees {
                let _ = write!(s, ",{n}");
            }
            let _ = writeln!(s, ",{},{}", rec.best_err, rec.cube_err);
        }
        s
    }

    /// Renders the report as pretty JSON; `parse(to_json(r)) == r`.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// One discrete averaging chain per axis of a product grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorSimConfig {
    /// Circle grid sizes, one per axis.
    pub grids: Vec<usize>,
    /// Averaging degrees per axis; each list starts at 0 and stays below
    /// its grid size.
    pub degrees: Vec<Vec<u32>>,
    pub function: FunctionSpec,
    pub tolerance: f64,
}

impl TensorSimConfig {
    /// Parses a config from a JSON file.
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Output of [`run_tensor_sim`]: the staircase trace and whether the final
/// error met the tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorSimReport {
    pub config: TensorSimConfig,
    pub version: String,
    pub steps: Vec<HarnessStep>,
    pub final_error: f64,
    pub passed: bool,
}

/// Samples the function on the product grid, builds one discrete averaging
/// chain per axis, and replays the staircase activation pattern.
pub fn run_tensor_sim(cfg: &TensorSimConfig, base: &Path) -> Result<TensorSimReport> {
    if cfg.grids.is_empty() {
        return Err(Error::invalid("tensor simulation needs at least one axis"));
    }
    if cfg.grids.len() != cfg.degrees.len() {
        return Err(Error::DimensionMismatch {
            expected: cfg.grids.len(),
            got: cfg.degrees.len(),
        });
    }
    if cfg.tolerance.is_nan() || cfg.tolerance <= 0.0 {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let f = TestFunction::from_spec(&cfg.function, base)?;
    let field = f.sample_grid(&cfg.grids)?;
    let nets: Vec<OperatorNet> = cfg
        .grids
        .iter()
        .zip(&cfg.degrees)
        .map(|(&g, degs)| OperatorNet::fejer_on_circle(g, degs))
        .collect::<Result<_>>()?;
    let steps = staircase_harness(&nets, field.samples())?;
    let final_error = steps.last().map_or(0.0, |s| s.max_error);
    let passed = final_error <= cfg.tolerance;
    Ok(TensorSimReport {
        config: cfg.clone(),
        version: env!("CARGO_PKG_VERSION").to_owned(),
        steps,
        final_error,
        passed,
    })
}

impl TensorSimReport {
    /// Renders the trace as CSV with `#` metadata lines and one row per
    /// staircase step.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# fejsum tensor-sim report");
        let _ = writeln!(s, "# version: {}", self.version);
        let _ = writeln!(s, "# passed: {}", self.passed);
        let _ = writeln!(s, "# tolerance: {}", self.config.tolerance);
        let _ = writeln!(s, "# final_error: {}", self.final_error);
        let axes = self.config.grids.len();
        let _ = write!(s, "step,support");
        for k in 1..=axes {
            let _ = write!(s, ",s_{k}");
        }
        let _ = writeln!(s, ",max_error");
        for step in &self.steps {
            let _ = write!(s, "{},{}", step.step, step.support);
            for pos in &step.positions {
                let _ = write!(s, ",{pos}");
            }
            let _ = writeln!(s, ",{}", step.max_error);
        }
        s
    }

    /// Renders the report as pretty JSON; `parse(to_json(r)) == r`.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn push_meta(s: &mut String, kind: &str, version: &str, seed: u64) {
    let _ = writeln!(s, "# fejsum {kind} report");
    let _ = writeln!(s, "# version: {version}");
    let _ = writeln!(s, "# seed: {seed}");
}

fn push_config_echo(s: &mut String, config: &ExperimentConfig) {
    let echo = serde_json::to_string(config).expect("config serializes to JSON");
    let _ = writeln!(s, "# config: {echo}");
}

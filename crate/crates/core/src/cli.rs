//! Command-line front end. [`run`] parses arguments, executes one subcommand
//! and returns the process exit code.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::baselines::{agglomerative, dbscan, kmeans, AgglomerativeParams, DbscanParams, KMeansParams};
use crate::bench::{bench, format_bench};
use crate::clustering::Clustering;
use crate::dataset::{generate, Dataset, Shape};
use crate::drac::{drac_trace, DracParams};
use crate::error::{Error, Result};
use crate::labels::LabelsDocument;
use crate::svg::render_svg;
use crate::verify::{format_report, verify_coincidence, CoincidenceConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

pub const DEFAULT_DELTA: f64 = 0.85;
pub const DEFAULT_GAMMA: f64 = 0.9;

#[derive(Debug, Parser)]
#[command(
    name = "drac",
    version,
    about = "Shapley-value density clustering and solution-concept checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cluster a CSV file or a generated dataset.
    Cluster(ClusterArgs),
    /// Write a synthetic dataset as CSV.
    Generate(GenerateArgs),
    /// Render an SVG from a labels document.
    Plot(PlotArgs),
    /// Check that the solution concepts coincide on random games.
    VerifyCoincidence(VerifyArgs),
    /// Time the clustering pipeline on uniform data.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    Drac,
    Kmeans,
    Agglomerative,
    Dbscan,
}

impl Algorithm {
    fn name(self) -> &'static str {
        match self {
            Algorithm::Drac => "drac",
            Algorithm::Kmeans => "kmeans",
            Algorithm::Agglomerative => "agglomerative",
            Algorithm::Dbscan => "dbscan",
        }
    }
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["input", "generate"]))]
pub struct ClusterArgs {
    /// CSV file with one `x,y` row per point.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Synthetic shape to generate instead of reading a file.
    #[arg(long, value_name = "SHAPE")]
    pub generate: Option<Shape>,
    /// Number of points to generate.
    #[arg(long, default_value_t = 300, requires = "generate")]
    pub n: usize,
    /// Seed for the generator and for k-means.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// The CSV input starts with a header row.
    #[arg(long, requires = "input")]
    pub has_header: bool,
    #[arg(long, value_enum, default_value_t = Algorithm::Drac)]
    pub algorithm: Algorithm,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub min_pts: Option<usize>,
    /// Labels document (JSON) to write.
    #[arg(long, value_name = "OUT")]
    pub labels: Option<PathBuf>,
    /// SVG scatter plot to write.
    #[arg(long, value_name = "OUT.svg")]
    pub plot: Option<PathBuf>,
    /// JSON-lines trace of every clustering decision (drac only).
    #[arg(long, value_name = "OUT")]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub shape: Shape,
    #[arg(long, default_value_t = 300)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Destination CSV; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 3)]
    pub n_min: usize,
    #[arg(long, default_value_t = 8)]
    pub n_max: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
    /// Also write the full per-trial report as JSON.
    #[arg(long, value_name = "OUT")]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "500,1000,2000")]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    pub delta: f64,
    #[arg(long, default_value_t = DEFAULT_GAMMA)]
    pub gamma: f64,
}

/// Failure of a subcommand, carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParameter { .. } | Error::UnknownShape(_) | Error::PlayerCount { .. } => EXIT_USAGE,
            _ => EXIT_RUNTIME,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

/// Runs the command line `args` (program name first) and returns the exit
/// code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli.command) {
        Ok(out) => {
            print!("{}", out.stdout);
            out.code
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

/// Text for standard output and the exit code of a finished command.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self { code: EXIT_OK, stdout }
    }
}

pub fn execute(command: &Command) -> std::result::Result<Outcome, Failure> {
    match command {
        Command::Cluster(a) => cmd_cluster(a),
        Command::Generate(a) => cmd_generate(a),
        Command::Plot(a) => cmd_plot(a),
        Command::VerifyCoincidence(a) => cmd_verify(a),
        Command::Bench(a) => cmd_bench(a),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Plot title derived from the labels document alone, so re-plotting a saved
/// document reproduces the original SVG.
pub fn plot_title(doc: &LabelsDocument) -> String {
    format!("{} on {}", doc.algorithm, doc.source)
}

fn reject_unused(a: &ClusterArgs) -> std::result::Result<(), Failure> {
    let given: [(&str, bool, &[Algorithm]); 7] = [
        ("--delta", a.delta.is_some(), &[Algorithm::Drac]),
        ("--gamma", a.gamma.is_some(), &[Algorithm::Drac]),
        ("--k", a.k.is_some(), &[Algorithm::Kmeans]),
        ("--max-iters", a.max_iters.is_some(), &[Algorithm::Kmeans]),
        ("--threshold", a.threshold.is_some(), &[Algorithm::Agglomerative]),
        ("--eps", a.eps.is_some(), &[Algorithm::Dbscan]),
        ("--min-pts", a.min_pts.is_some(), &[Algorithm::Dbscan]),
    ];
    for (flag, present, applies) in given {
        if present && !applies.contains(&a.algorithm) {
            return Err(Failure::usage(format!(
                "{flag} does not apply to --algorithm {}",
                a.algorithm.name()
            )));
        }
    }
    if a.trace.is_some() && a.algorithm != Algorithm::Drac {
        return Err(Failure::usage("--trace is only available for --algorithm drac"));
    }
    Ok(())
}

fn required<T: Copy>(value: Option<T>, flag: &str, algorithm: Algorithm) -> std::result::Result<T, Failure> {
    value.ok_or_else(|| Failure::usage(format!("--algorithm {} requires {flag}", algorithm.name())))
}

fn cmd_cluster(a: &ClusterArgs) -> std::result::Result<Outcome, Failure> {
    reject_unused(a)?;
    let (dataset, source) = match (&a.input, a.generate) {
        (Some(path), None) => (Dataset::load_csv(path, a.has_header)?, path.display().to_string()),
        (None, Some(shape)) => (
            generate(shape, a.n, a.seed)?,
            format!("{shape}(n={}, seed={})", a.n, a.seed),
        ),
        _ => return Err(Failure::usage("give exactly one of --input and --generate")),
    };

    let mut parameters: BTreeMap<String, Value> = BTreeMap::new();
    let mut drac_clusters = None;
    let clustering: Clustering = match a.algorithm {
        Algorithm::Drac => {
            let params = DracParams::new(a.delta.unwrap_or(DEFAULT_DELTA), a.gamma.unwrap_or(DEFAULT_GAMMA))?;
            parameters.insert("delta".into(), json!(params.delta));
            parameters.insert("gamma".into(), json!(params.gamma));
            let (state, events) = drac_trace(&dataset, &params)?;
            if let Some(path) = &a.trace {
                let mut text = String::new();
                for e in &events {
                    let _ = writeln!(text, "{}", serde_json::to_string(e).map_err(Error::from)?);
                }
                write_file(path, &text)?;
            }
            drac_clusters = Some(state.clusters.clone());
            state.to_clustering()
        }
        Algorithm::Kmeans => {
            let params = KMeansParams {
                k: required(a.k, "--k", a.algorithm)?,
                max_iters: a.max_iters.unwrap_or(100),
                seed: a.seed,
            };
            parameters.insert("k".into(), json!(params.k));
            parameters.insert("max_iters".into(), json!(params.max_iters));
            kmeans(&dataset, &params)?
        }
        Algorithm::Agglomerative => {
            let params = AgglomerativeParams {
                threshold: required(a.threshold, "--threshold", a.algorithm)?,
            };
            parameters.insert("threshold".into(), json!(params.threshold));
            agglomerative(&dataset, &params)?
        }
        Algorithm::Dbscan => {
            let params = DbscanParams {
                eps: required(a.eps, "--eps", a.algorithm)?,
                min_pts: required(a.min_pts, "--min-pts", a.algorithm)?,
            };
            parameters.insert("eps".into(), json!(params.eps));
            parameters.insert("min_pts".into(), json!(params.min_pts));
            dbscan(&dataset, &params)?
        }
    };

    let mut doc = LabelsDocument::new(a.algorithm.name(), parameters, source, a.seed, &dataset, &clustering);
    if let Some(clusters) = drac_clusters {
        for (entry, c) in doc.clusters.iter_mut().zip(&clusters) {
            entry.l_max = Some(c.l_max);
            entry.beta = Some(c.beta);
        }
    }
    if let Some(path) = &a.labels {
        write_file(path, &doc.to_json()?)?;
    }
    if let Some(path) = &a.plot {
        write_file(path, &render_svg(&dataset, &clustering, &plot_title(&doc)))?;
    }
    Ok(Outcome::ok(format!(
        "{}: {} points, {} clusters, {} noise\n",
        a.algorithm.name(),
        doc.n_points,
        doc.n_clusters,
        doc.n_noise
    )))
}

fn cmd_generate(a: &GenerateArgs) -> std::result::Result<Outcome, Failure> {
    let csv = generate(a.shape, a.n, a.seed)?.to_csv();
    match &a.output {
        Some(path) => {
            write_file(path, &csv)?;
            Ok(Outcome::ok(String::new()))
        }
        None => Ok(Outcome::ok(csv)),
    }
}

fn cmd_plot(a: &PlotArgs) -> std::result::Result<Outcome, Failure> {
    let doc = LabelsDocument::from_json(&read_file(&a.labels)?)?;
    let svg = render_svg(&doc.dataset()?, &doc.clustering()?, &plot_title(&doc));
    write_file(&a.output, &svg)?;
    Ok(Outcome::ok(String::new()))
}

fn cmd_verify(a: &VerifyArgs) -> std::result::Result<Outcome, Failure> {
    let report = verify_coincidence(&CoincidenceConfig {
        trials: a.trials,
        n_min: a.n_min,
        n_max: a.n_max,
        seed: a.seed,
        tolerance: a.tolerance,
    })?;
    if let Some(path) = &a.report {
        let text = serde_json::to_string_pretty(&report).map_err(Error::from)? + "\n";
        write_file(path, &text)?;
    }
    Ok(Outcome {
        code: if report.passed() { EXIT_OK } else { EXIT_VERIFICATION },
        stdout: format_report(&report),
    })
}

fn cmd_bench(a: &BenchArgs) -> std::result::Result<Outcome, Failure> {
    if a.sizes.is_empty() || a.sizes.contains(&0) {
        return Err(Failure::usage("--sizes needs at least one positive size"));
    }
    let params = DracParams::new(a.delta, a.gamma)?;
    let rows = bench(&a.sizes, a.seed, &params, a.repeats)?;
    Ok(Outcome::ok(format_bench(&rows)))
}

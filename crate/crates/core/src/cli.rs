//! Command-line front end. [`run`] does all the work and returns the exit code
//! with the text destined for stdout and stderr, so the binary stays a shim.
//!
//! Exit codes: 0 success or true, 1 mathematical negative, 2 input error.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::atomic::{
    atomic_coefficients, combine_linear, combine_product, operator_weighted_sum, parseval_sum, perturb_sum,
    positive_perturbation,
};
use crate::duality::canonical_k_dual;
use crate::error::{Error, Result};
use crate::frame_file::FrameSpecFile;
use crate::gframe::{classify, optimal_k_lower_bound};
use crate::numerics::{Complex64, JsonScalar, ToleranceConfig};
use crate::verifier::{run_campaign_with_jobs, CampaignSpec, DimRanges, Generator, TheoremId, DEFAULT_DIM_CAP};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "kgframe", version, about = "K-g-frames on finite-dimensional complex Hilbert spaces")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Relative singular-value cutoff for rank decisions.
    #[arg(long, global = true, env = "KGFRAME_TOL_RANK")]
    tol_rank: Option<f64>,
    /// Relative floor for positive-semidefinite tests.
    #[arg(long, global = true, env = "KGFRAME_TOL_PSD")]
    tol_psd: Option<f64>,
    /// Relative bound on reconstruction and identity residuals.
    #[arg(long, global = true, env = "KGFRAME_TOL_RESIDUAL")]
    tol_residual: Option<f64>,
    /// Print the scalar fields of the report as a one-row CSV table.
    #[arg(long, global = true)]
    csv: bool,
}

#[derive(Debug, Args)]
struct InputArg {
    /// Frame spec JSON file, or `-` for stdin.
    #[arg(long, short)]
    input: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Optimal bounds and frame flags; exit 1 when not a K-g-frame.
    #[command(visible_alias = "bounds")]
    Check(InputArg),
    /// Canonical K-dual.
    Dual(InputArg),
    /// Atomic coefficients of `Kf`.
    Atomic {
        #[command(flatten)]
        input: InputArg,
        /// JSON array of scalars, each a number or {"re": .., "im": ..}.
        #[arg(long)]
        vector: String,
    },
    /// Combination constructions on the systems and operators of the input.
    Combine {
        #[command(flatten)]
        input: InputArg,
        #[arg(long, value_enum)]
        mode: CombineMode,
    },
    /// Randomized verification campaign for one statement.
    Verify {
        #[arg(long)]
        theorem: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Dimension ranges, e.g. `n=2..8,blocks=1..4,m=1..3`, or a bare ambient dimension.
        #[arg(long)]
        dims: Option<String>,
        /// Worker threads; defaults to the available parallelism.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Emit a random frame spec.
    Gen {
        #[arg(long, value_enum)]
        kind: GenKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        dims: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CombineMode {
    Linear,
    Product,
    Perturb,
    Parseval,
    Weighted,
    Positive,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GenKind {
    System,
    Parseval,
    OrthogonalPair,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Report {
    value: Value,
    positive: bool,
}

impl Report {
    fn new(value: impl Serialize, positive: bool) -> Self {
        Self {
            value: serde_json::to_value(value).expect("reports serialize"),
            positive,
        }
    }
}

/// Runs one command line; `args` includes the program name.
pub fn run<I, T>(args: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                CliOutput {
                    code: EXIT_INPUT,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                CliOutput {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let result = tolerances(&cli.global).and_then(|tol| execute(&cli.command, &tol));
    match result.and_then(|r| render(&r.value, cli.global.csv).map(|text| (text, r.positive))) {
        Ok((stdout, positive)) => CliOutput {
            code: if positive { EXIT_OK } else { EXIT_NEGATIVE },
            stdout,
            stderr: String::new(),
        },
        Err(e) => CliOutput {
            code: if e.is_input_error() { EXIT_INPUT } else { EXIT_NEGATIVE },
            stdout: String::new(),
            stderr: format!("error: {} ({})\n", e, e.name()),
        },
    }
}

fn tolerances(args: &GlobalArgs) -> Result<ToleranceConfig> {
    let d = ToleranceConfig::default();
    ToleranceConfig::new(
        args.tol_rank.unwrap_or(d.rank_rel),
        args.tol_psd.unwrap_or(d.psd_rel),
        args.tol_residual.unwrap_or(d.residual_rel),
    )
}

fn read_input(arg: &InputArg) -> Result<FrameSpecFile> {
    let text = if arg.input.as_os_str() == "-" {
        std::io::read_to_string(std::io::stdin())
    } else {
        std::fs::read_to_string(&arg.input)
    }
    .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", arg.input.display())))?;
    FrameSpecFile::from_json(&text)
}

fn dims_or_default(dims: &Option<String>) -> Result<DimRanges> {
    dims.as_deref().map_or(Ok(DimRanges::default()), str::parse)
}

fn execute(command: &Command, tol: &ToleranceConfig) -> Result<Report> {
    match command {
        Command::Check(input) => {
            let spec = read_input(input)?;
            let bounds = classify(&spec.system, &spec.k_or_identity(), tol)?;
            let positive = bounds.is_k_g_frame;
            Ok(Report::new(bounds, positive))
        }
        Command::Dual(input) => {
            let spec = read_input(input)?;
            let k = spec.k_or_identity();
            let pair = canonical_k_dual(&spec.system, &k, tol)?;
            let a_opt = optimal_k_lower_bound(&spec.system, &k, tol)?;
            let dual_norm_sq = pair.dual_norm_sq();
            Ok(Report::new(
                json!({
                    "dual": pair.dual,
                    "K": pair.k,
                    "dual_norm_sq": dual_norm_sq,
                    "a_opt": a_opt,
                    "product": a_opt * dual_norm_sq,
                    "reconstruction_residual": pair.reconstruction_residual,
                }),
                true,
            ))
        }
        Command::Atomic { input, vector } => {
            let spec = read_input(input)?;
            let f: Vec<JsonScalar> = serde_json::from_str(vector)
                .map_err(|e| Error::InvalidInput(format!("--vector: {e}")))?;
            let f: Vec<Complex64> = f.into_iter().map(|s| s.0).collect();
            let coeffs = atomic_coefficients(&spec.system, &spec.k_or_identity(), &f, tol)?;
            Ok(Report::new(coeffs, true))
        }
        Command::Combine { input, mode } => combine(&read_input(input)?, *mode, tol),
        Command::Verify {
            theorem,
            trials,
            seed,
            dims,
            jobs,
        } => {
            let theorem: TheoremId = theorem.parse()?;
            let spec = CampaignSpec::new(theorem, *trials, *seed).with_dims(dims_or_default(dims)?);
            let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, usize::from));
            let report = run_campaign_with_jobs(&spec, jobs)?;
            let positive = report.failures == 0;
            Ok(Report::new(report, positive))
        }
        Command::Gen { kind, seed, dims } => {
            let dims = dims_or_default(dims)?;
            dims.validate(DEFAULT_DIM_CAP)?;
            Ok(Report::new(generate(*kind, *seed, &dims)?, true))
        }
    }
}

fn combine(spec: &FrameSpecFile, mode: CombineMode, tol: &ToleranceConfig) -> Result<Report> {
    let sys = &spec.system;
    let k = spec.k_or_identity();
    let second = || FrameSpecFile::require("system2", &spec.system2);
    let u = || FrameSpecFile::require("U", &spec.u);
    let v = || FrameSpecFile::require("V", &spec.v);
    match mode {
        CombineMode::Linear => {
            let k2 = FrameSpecFile::require("K2", &spec.k2)?;
            let alpha = FrameSpecFile::scalar_or(&spec.alpha, 1.0);
            let beta = FrameSpecFile::scalar_or(&spec.beta, 1.0);
            let bound = combine_linear(sys, &k, k2, alpha, beta, tol)?;
            let combined_k = &k.scale(alpha) + &k2.scale(beta);
            let holds = bound.holds;
            Ok(Report::new(json!({ "K": combined_k, "bound": bound }), holds))
        }
        CombineMode::Product => {
            let k2 = FrameSpecFile::require("K2", &spec.k2)?;
            let bound = combine_product(sys, &k, k2, tol)?;
            let holds = bound.holds;
            Ok(Report::new(json!({ "K": &k * k2, "bound": bound }), holds))
        }
        CombineMode::Perturb => {
            let c = perturb_sum(sys, second()?, u()?, v()?, &k, tol)?;
            let holds = c.bound.holds;
            Ok(Report::new(c, holds))
        }
        CombineMode::Weighted => {
            let c = operator_weighted_sum(sys, second()?, u()?, v()?, &k, tol)?;
            let holds = c.bound.holds;
            Ok(Report::new(c, holds))
        }
        CombineMode::Parseval => Ok(Report::new(parseval_sum(sys, second()?, &k, tol)?, true)),
        CombineMode::Positive => {
            let p = positive_perturbation(sys, u()?, &k, spec.power.unwrap_or(1), tol)?;
            let frame = p.k_g_frame;
            Ok(Report::new(p, frame))
        }
    }
}

fn generate(kind: GenKind, seed: u64, dims: &DimRanges) -> Result<FrameSpecFile> {
    let mut g = Generator::new(seed);
    let (n, mut block_dims) = g.dims(dims);
    match kind {
        GenKind::System => Ok(FrameSpecFile::new(g.system(n, &block_dims)?)),
        GenKind::Parseval => {
            let total: usize = block_dims.iter().sum();
            if total < n {
                block_dims.push(n - total);
            }
            let k = g.square(n);
            let sys = g.parseval(&k, &block_dims)?;
            Ok(FrameSpecFile::new(sys).with_k(k))
        }
        GenKind::OrthogonalPair => {
            if block_dims.len() < 2 {
                block_dims.push(block_dims[0]);
            }
            let split = g.index(1, block_dims.len() - 1);
            let (l, other) = g.orthogonal_pair(n, &block_dims, split)?;
            let mut spec = FrameSpecFile::new(l);
            spec.system2 = Some(other);
            Ok(spec)
        }
    }
}

fn render(value: &Value, csv: bool) -> Result<String> {
    if !csv {
        let mut text = serde_json::to_string_pretty(value).expect("values serialize");
        text.push('\n');
        return Ok(text);
    }
    let mut row = Map::new();
    flatten("", value, &mut row);
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::InvalidInput(format!("csv: {e}"));
    w.write_record(row.keys()).map_err(io)?;
    w.write_record(row.values().map(|v| match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }))
    .map_err(io)?;
    let bytes = w.into_inner().map_err(|e| Error::InvalidInput(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Scalar leaves of nested objects under dotted keys; arrays (matrices,
/// systems, counterexample lists) are dropped.
fn flatten(prefix: &str, value: &Value, out: &mut Map<String, Value>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, out);
            }
        }
        Value::Array(_) => {}
        scalar => {
            out.insert(prefix.to_string(), scalar.clone());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flatten_keeps_scalars_only() {
        let v = json!({"a": 1, "b": {"c": true, "d": [1, 2]}, "e": null});
        let mut out = Map::new();
        flatten("", &v, &mut out);
        assert_eq!(out.keys().collect::<Vec<_>>(), vec!["a", "b.c", "e"]);
    }

    #[test]
    fn csv_has_header_and_one_row() {
        let text = render(&json!({"lower": 4.0, "k_g_frame": true}), true).unwrap();
        assert_eq!(text, "k_g_frame,lower\ntrue,4.0\n");
    }

    #[test]
    fn unknown_subcommand_is_an_input_error() {
        assert_eq!(run(["kgframe", "frobnicate"]).code, EXIT_INPUT);
        assert_eq!(run(["kgframe", "--help"]).code, EXIT_OK);
    }
}

//! Experiment runner: `decompose`, `optimize`, and `verify` subcommands
//! producing machine-readable JSON reports and CSV traces.
//!
//! Exit codes: 0 success, 2 usage or input error, 3 oracle cap violation,
//! 4 budget violation.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use crate::analysis::{nmi, pairwise_oracle, DEFAULT_ORACLE_CAP};
use crate::benchmarks::{build, BenchmarkSpec};
use crate::cc::{decc_optimize, monolithic_de, CcOutcome, DeParams};
use crate::error::FdgError;
use crate::fdg::{decompose, FdgConfig, FdgTrace};
use crate::idap::{lambda_sequence, SeparabilityType, DEFAULT_GAP_FACTOR};
use crate::indicator::Thresholds;
use crate::itip::DEFAULT_TRIALS;
use crate::problem::EvaluationLedger;
use crate::verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

/// Environment variable overriding the pairwise-oracle dimension cap.
pub const ORACLE_CAP_ENV: &str = "FDG_ORACLE_CAP";

#[derive(Parser, Debug)]
#[command(
    name = "fdg",
    version,
    about = "Fast differential grouping: decompose large-scale black-box problems and optimize them with cooperative coevolution"
)]
pub struct Cli {
    /// Seed for every stochastic draw (unsigned 64-bit).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decompose a problem spec and report groups, cost, and accuracy.
    Decompose(DecomposeArgs),
    /// Decompose-then-optimize, or run the monolithic baseline.
    Optimize(OptimizeArgs),
    /// Run a built-in verification suite and print a pass/fail table.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
pub struct DecomposeArgs {
    /// Path to a benchmark-spec JSON document.
    #[arg(long)]
    pub problem: PathBuf,
    /// Write the JSON report here (stdout when omitted); a plot-ready
    /// `<out>.lambda.csv` with the sorted indicator quotients is written
    /// alongside.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also run the O(n^2) pairwise oracle and report agreement.
    #[arg(long)]
    pub oracle: bool,
    /// Run the grouping loop regardless of the identified type.
    #[arg(long)]
    pub force_psdp: bool,
    /// Outlier factor for the indicator-distribution analysis.
    #[arg(long, default_value_t = DEFAULT_GAP_FACTOR)]
    pub gap_factor: f64,
    /// Trials per selection rule.
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Framework {
    /// Cooperative coevolution over the decomposition.
    Decc,
    /// Monolithic differential evolution baseline.
    Mono,
}

#[derive(Args, Debug)]
pub struct OptimizeArgs {
    /// Path to a benchmark-spec JSON document.
    #[arg(long)]
    pub problem: PathBuf,
    /// Total evaluation budget, including decomposition cost.
    #[arg(long)]
    pub budget: u64,
    #[arg(long, value_enum)]
    pub framework: Framework,
    /// Write the JSON summary here (stdout when omitted); the convergence
    /// trace goes to `<out>` with a `.csv` extension.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_GAP_FACTOR)]
    pub gap_factor: f64,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Probabilities,
    Indicators,
    Nmi,
    Complexity,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
}

/// Parse arguments and execute; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = err.exit_code();
            let _ = err.print();
            return code;
        }
    };
    match cli.command {
        Command::Decompose(args) => cmd_decompose(cli.seed, &args),
        Command::Optimize(args) => cmd_optimize(cli.seed, &args),
        Command::Verify(args) => cmd_verify(cli.seed, &args),
    }
}

fn fail_usage(err: impl std::fmt::Display) -> i32 {
    eprintln!("error: {err}");
    EXIT_USAGE
}

fn load_spec(path: &Path) -> Result<BenchmarkSpec, i32> {
    let text = fs::read_to_string(path).map_err(|e| fail_usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| fail_usage(format!("{}: {e}", path.display())))
}

fn write_text(path: Option<&Path>, content: &str) -> Result<(), i32> {
    match path {
        Some(path) => fs::write(path, content)
            .map_err(|e| fail_usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn oracle_cap() -> Result<usize, i32> {
    match std::env::var(ORACLE_CAP_ENV) {
        Ok(text) => text
            .parse::<usize>()
            .map_err(|_| fail_usage(format!("{ORACLE_CAP_ENV} must be an unsigned integer"))),
        Err(_) => Ok(DEFAULT_ORACLE_CAP),
    }
}

#[derive(Serialize)]
struct DecomposeReport<'a> {
    #[serde(rename = "type")]
    kind: SeparabilityType,
    nonseps: &'a [Vec<usize>],
    seps: &'a [usize],
    #[serde(rename = "feNum")]
    fe_num: u64,
    thresholds: Option<Thresholds>,
    nmi_vs_ground_truth: f64,
    nmi_vs_oracle: Option<f64>,
    trace: &'a FdgTrace,
}

fn cmd_decompose(seed: u64, args: &DecomposeArgs) -> i32 {
    let spec = match load_spec(&args.problem) {
        Ok(spec) => spec,
        Err(code) => return code,
    };
    let (problem, truth) = match build(&spec) {
        Ok(pair) => pair,
        Err(e) => return fail_usage(e),
    };
    let config = FdgConfig {
        trials: args.trials,
        gap_factor: args.gap_factor,
        force_psdp: args.force_psdp,
    };
    let ledger = EvaluationLedger::new();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let outcome = match decompose(&problem, &ledger, &config, &mut rng) {
        Ok(outcome) => outcome,
        Err(e) => return fail_usage(e),
    };
    let n = problem.dimension();
    let nmi_vs_ground_truth = match nmi(&outcome.decomposition, &truth, n) {
        Ok(v) => v,
        Err(e) => return fail_usage(e),
    };

    let nmi_vs_oracle = if args.oracle {
        let cap = match oracle_cap() {
            Ok(cap) => cap,
            Err(code) => return code,
        };
        let side_ledger = EvaluationLedger::new();
        match pairwise_oracle(&problem, &side_ledger, cap, args.gap_factor) {
            Ok(oracle) => match nmi(&outcome.decomposition, &oracle, n) {
                Ok(v) => Some(v),
                Err(e) => return fail_usage(e),
            },
            Err(FdgError::OracleCapExceeded { dimension, cap }) => {
                eprintln!("error: pairwise oracle capped at {cap} variables, problem has {dimension}");
                return EXIT_CAP;
            }
            Err(e) => return fail_usage(e),
        }
    } else {
        None
    };

    let report = DecomposeReport {
        kind: outcome.trace.kind,
        nonseps: &outcome.decomposition.nonseps,
        seps: &outcome.decomposition.seps,
        fe_num: outcome.fe_num,
        thresholds: outcome.trace.thresholds,
        nmi_vs_ground_truth,
        nmi_vs_oracle,
        trace: &outcome.trace,
    };
    let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
    json.push('\n');
    if let Err(code) = write_text(args.out.as_deref(), &json) {
        return code;
    }
    if let Some(out) = &args.out {
        if let Err(code) = write_lambda_csv(out, &outcome.trace) {
            return code;
        }
    }
    EXIT_OK
}

/// Sorted indicator values from the identification phase, exported as the
/// quotient sequence the distribution analysis ranks.
fn write_lambda_csv(report_path: &Path, trace: &FdgTrace) -> Result<(), i32> {
    let mut phi_values: Vec<f64> = trace
        .phases
        .iter()
        .find(|p| p.name == "itip")
        .and_then(|p| p.detail.get("phiValues"))
        .and_then(|v| v.as_array())
        .map(|a| a.iter().filter_map(|v| v.as_f64()).collect())
        .unwrap_or_default();
    phi_values.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let mut csv = String::from("index,lambda\n");
    for (i, lambda) in lambda_sequence(&phi_values).iter().enumerate() {
        csv.push_str(&format!("{},{}\n", i + 1, lambda));
    }
    let path = report_path.with_extension("lambda.csv");
    write_text(Some(&path), &csv)
}

#[derive(Serialize)]
struct OptimizeSummary {
    framework: &'static str,
    n: usize,
    budget: u64,
    #[serde(rename = "decompositionFeNum")]
    decomposition_fe_num: u64,
    #[serde(rename = "feNum")]
    fe_num: u64,
    final_fitness: Option<f64>,
    truncated: bool,
    best: Option<Vec<f64>>,
    error: Option<String>,
}

fn write_optimize_outputs(
    args: &OptimizeArgs,
    summary: &OptimizeSummary,
    outcome: Option<&CcOutcome>,
) -> Result<(), i32> {
    let mut json = serde_json::to_string_pretty(summary).expect("summary serializes");
    json.push('\n');
    write_text(args.out.as_deref(), &json)?;
    if let (Some(out), Some(outcome)) = (&args.out, outcome) {
        let mut csv = String::from("feNum,best_fitness\n");
        for point in &outcome.trace {
            csv.push_str(&format!("{},{}\n", point.fe_num, point.best_fitness));
        }
        write_text(Some(&out.with_extension("csv")), &csv)?;
    }
    Ok(())
}

fn cmd_optimize(seed: u64, args: &OptimizeArgs) -> i32 {
    let spec = match load_spec(&args.problem) {
        Ok(spec) => spec,
        Err(code) => return code,
    };
    let (problem, _) = match build(&spec) {
        Ok(pair) => pair,
        Err(e) => return fail_usage(e),
    };
    let n = problem.dimension();
    let framework_name = match args.framework {
        Framework::Decc => "decc",
        Framework::Mono => "mono",
    };
    if args.budget == 0 {
        eprintln!("error: budget must be positive");
        return EXIT_BUDGET;
    }

    let ledger = EvaluationLedger::new();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let params = DeParams::default();

    let decomposition = match args.framework {
        Framework::Decc => {
            let config = FdgConfig {
                trials: args.trials,
                gap_factor: args.gap_factor,
                force_psdp: false,
            };
            match decompose(&problem, &ledger, &config, &mut rng) {
                Ok(outcome) => Some(outcome),
                Err(e) => return fail_usage(e),
            }
        }
        Framework::Mono => None,
    };
    let decomposition_fe_num = decomposition.as_ref().map_or(0, |d| d.fe_num);

    if ledger.count() >= args.budget {
        let summary = OptimizeSummary {
            framework: framework_name,
            n,
            budget: args.budget,
            decomposition_fe_num,
            fe_num: ledger.count(),
            final_fitness: None,
            truncated: true,
            best: None,
            error: Some("budget does not cover the decomposition cost".into()),
        };
        if let Err(code) = write_optimize_outputs(args, &summary, None) {
            return code;
        }
        return EXIT_BUDGET;
    }

    let result = match &decomposition {
        Some(outcome) => decc_optimize(
            &problem,
            &ledger,
            &outcome.decomposition,
            args.budget,
            &params,
            &mut rng,
        ),
        None => monolithic_de(&problem, &ledger, args.budget, &params, &mut rng),
    };
    let outcome = match result {
        Ok(outcome) => outcome,
        Err(e) => return fail_usage(e),
    };

    let summary = OptimizeSummary {
        framework: framework_name,
        n,
        budget: args.budget,
        decomposition_fe_num,
        fe_num: ledger.count(),
        final_fitness: outcome.best.fitness,
        truncated: outcome.truncated,
        best: Some(outcome.best.values.clone()),
        error: None,
    };
    if let Err(code) = write_optimize_outputs(args, &summary, Some(&outcome)) {
        return code;
    }
    EXIT_OK
}

fn cmd_verify(seed: u64, args: &VerifyArgs) -> i32 {
    let checks = match args.suite {
        Suite::Probabilities => verify::probabilities_suite(seed),
        Suite::Indicators => verify::indicators_suite(seed),
        Suite::Nmi => verify::nmi_suite(),
        Suite::Complexity => verify::complexity_suite(seed),
    };
    let checks = match checks {
        Ok(checks) => checks,
        Err(e) => return fail_usage(e),
    };
    let mut all_passed = true;
    for check in &checks {
        let status = if check.passed { "PASS" } else { "FAIL" };
        all_passed &= check.passed;
        println!("{status}  {:<50} {}", check.name, check.detail);
    }
    println!(
        "{} of {} checks passed",
        checks.iter().filter(|c| c.passed).count(),
        checks.len()
    );
    if all_passed {
        EXIT_OK
    } else {
        1
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use czkit::endpoint::acceptance;
use czkit::endpoint::experiments::ExperimentEnv;
use czkit::endpoint::report::ExperimentReport;
use czkit::endpoint::suite::{
    commutator_report, endpoint_reports, kolmogorov_report, maximal_report, operator_report,
    orlicz_report, run_suite, sharpness_reports, weights_report, write_reports, SuiteConfig,
};
use czkit::lattice::FamilyKind;
use czkit::Result;

/// Numerical toolkit for multilinear singular integrals, Orlicz maximal
/// functions, multiple-weight classes, and their endpoint behaviour.
#[derive(Parser)]
#[command(name = "czkit", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Grid resolution (a power of two)
    #[arg(long, global = true)]
    n: Option<usize>,

    /// Window half-width R; the grid covers (-R, R)
    #[arg(long, global = true)]
    window: Option<f64>,

    /// Cube family: dyadic | shifted | all
    #[arg(long, global = true)]
    family: Option<String>,

    /// Operator arity (1 = principal-value convolution, 2 = bilinear)
    #[arg(long, global = true)]
    m: Option<usize>,

    /// Seed for every randomized draw
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory: one series CSV per report plus summary.csv
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// TOML config with the same keys; explicit flags win
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Luxemburg norms: nested-cube profile, identity and dichotomy checks
    Orlicz,
    /// Maximal functions: superlevel profile and iterated-maximal comparison
    Maximal,
    /// Multiple-weight constants: power-weight sweep and exactness checks
    Weights,
    /// Kernel size/smoothness checks and operator decay profile
    Operator,
    /// Iterated commutator: agreement of its two computation routes
    Commutator,
    /// Weighted endpoint ratio series for the bilinear operator
    Endpoint,
    /// Wide-window divergence series behind the sharpness claims
    Sharpness,
    /// Every experiment plus every acceptance criterion
    Suite,
}

fn build_env(cli: &Cli) -> Result<(ExperimentEnv, Option<PathBuf>, usize)> {
    let mut env = ExperimentEnv::default();
    let mut out = None;
    let mut m = None;
    if let Some(path) = &cli.config {
        let cfg = SuiteConfig::load(path)?;
        cfg.apply(&mut env)?;
        out = cfg.out;
        m = cfg.m;
    }
    if let Some(n) = cli.n {
        env.n = n;
    }
    if let Some(w) = cli.window {
        env.half_width = w;
    }
    if let Some(f) = &cli.family {
        env.family = FamilyKind::parse(f)?;
    }
    if let Some(s) = cli.seed {
        env.seed = s;
    }
    if cli.out.is_some() {
        out = cli.out.clone();
    }
    if cli.m.is_some() {
        m = cli.m;
    }
    Ok((env, out, m.unwrap_or(2)))
}

fn print_reports(reports: &[ExperimentReport]) {
    for report in reports {
        println!("{} {}", report.id, report.param_json());
        for (metric, value) in &report.summary {
            println!("  {metric} = {value:.6e}");
        }
        println!("  series rows: {}", report.series.len());
    }
}

fn run(cli: &Cli) -> Result<bool> {
    let (env, out, m) = build_env(cli)?;
    let reports = match cli.command {
        Command::Orlicz => vec![orlicz_report(&env)?],
        Command::Maximal => vec![maximal_report(&env)?],
        Command::Weights => vec![weights_report(&env)?],
        Command::Operator => vec![operator_report(&env, m)?],
        Command::Commutator => vec![commutator_report(&env)?],
        Command::Endpoint => {
            let mut reports = endpoint_reports(&env)?;
            reports.push(kolmogorov_report(&env)?);
            reports
        }
        Command::Sharpness => {
            let n = cli.n.unwrap_or(acceptance::DIVERGENCE_N);
            let half_width = cli.window.unwrap_or(acceptance::DIVERGENCE_HALF_WIDTH);
            sharpness_reports(n, half_width)?
        }
        Command::Suite => {
            let (reports, criteria, all_passed) = run_suite(out.as_deref())?;
            print_reports(&reports);
            for criterion in &criteria {
                println!("{}", criterion.line());
            }
            println!(
                "suite: {}/{} criteria passed",
                criteria.iter().filter(|c| c.passed).count(),
                criteria.len()
            );
            return Ok(all_passed);
        }
    };
    print_reports(&reports);
    if let Some(dir) = out {
        let summary = write_reports(&dir, &reports)?;
        println!("wrote {} series files and {}", reports.len(), summary.display());
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}

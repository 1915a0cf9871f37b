use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rankone::harness::{self, acceptance, config::DEFAULT_SEED, ExperimentConfig, MeasureSource};
use rankone::{Error, Support};

/// Rank-one perturbation laboratory. Every subcommand prints one JSON report
/// and exits with status 0 exactly when all of its checks pass.
#[derive(Parser)]
#[command(name = "rankone", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Write the CSV table here (subcommands that produce one).
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// Seed for randomized instances [default: 20240601].
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Tolerance override `NAME=VALUE`; repeatable.
    #[arg(long = "tol", global = true, value_parser = parse_tolerance)]
    tolerances: Vec<(String, f64)>,
}

#[derive(Args)]
struct MeasureArgs {
    /// `lebesgue_grid(N)`, `atoms([[pos, weight], ...])`, `mixed`,
    /// `file:PATH`, or an inline measure object.
    #[arg(long)]
    measure: Option<String>,
    /// Support for the presets.
    #[arg(long, value_enum)]
    support: Option<SupportArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SupportArg {
    Line,
    Circle,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues and weights of the perturbed operator, checked against an
    /// eigen-decomposition.
    SpectrumScan {
        #[command(flatten)]
        measure: MeasureArgs,
        /// Coupling `re` or `re,im`; repeatable.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
        alpha: Vec<[f64; 2]>,
    },
    /// Representation-operator residuals and Clark-operator route agreement.
    ClarkVerify {
        #[command(flatten)]
        measure: MeasureArgs,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
        alpha: Vec<[f64; 2]>,
        /// Contraction parameter `re` or `re,im` with modulus below 1.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
        gamma: Option<[f64; 2]>,
        #[arg(long, value_parser = ["universal", "snf", "dbr", "all"])]
        route: Option<String>,
        /// Boundary grid size.
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Operator norms of regularized singular integrals over an ε-grid.
    Regularize {
        #[command(flatten)]
        measure: MeasureArgs,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
        alpha: Vec<[f64; 2]>,
        #[arg(long, value_parser = ["hilbert", "cauchy_line", "cauchy_circle", "riesz", "beurling", "custom-json"])]
        kernel: Option<String>,
        /// Kernel definition for `custom-json`: inline JSON or a file path.
        #[arg(long)]
        kernel_json: Option<String>,
        #[arg(long, value_parser = ["trunc", "smooth", "cauchy", "radial"])]
        family: Option<String>,
        /// Comma-separated ε values, or `dyadic:K` for `2^0 … 2^-K`.
        #[arg(long, value_parser = parse_eps_grid)]
        eps_grid: Option<EpsGrid>,
    },
    /// Schur-multiplier variation bound on random kernel/multiplier pairs.
    SchurTest {
        #[arg(long)]
        pairs: Option<usize>,
    },
    /// Model-space consistency checks for `θ_γ`.
    ModelCheck {
        #[command(flatten)]
        measure: MeasureArgs,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
        gamma: Option<[f64; 2]>,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Dissipative perturbation through the Cayley transform.
    Dissipative {
        #[command(flatten)]
        measure: MeasureArgs,
        /// `re,im` with positive imaginary part.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
        alpha: [f64; 2],
        #[arg(long)]
        grid: Option<usize>,
    },
    /// The full acceptance suite, one summary line per criterion on stderr.
    Acceptance,
    /// Run an experiment from a JSON configuration file.
    Run { config: PathBuf },
}

#[derive(Clone)]
struct EpsGrid(Vec<f64>);

fn parse_complex(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|_| format!("`{t}` is not a number"));
    match parts[..] {
        [re] => Ok([num(re)?, 0.0]),
        [re, im] => Ok([num(re)?, num(im)?]),
        _ => Err(format!("expected `re` or `re,im`, got `{s}`")),
    }
}

fn parse_eps_grid(s: &str) -> Result<EpsGrid, String> {
    if let Some(k) = s.strip_prefix("dyadic:") {
        let k: i32 = k.parse().map_err(|_| format!("bad exponent `{k}`"))?;
        return Ok(EpsGrid((0..=k).map(|j| 0.5f64.powi(j)).collect()));
    }
    s.split(',').map(|t| t.trim().parse::<f64>().map_err(|_| format!("`{t}` is not a number"))).collect::<Result<_, _>>().map(EpsGrid)
}

fn parse_tolerance(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    Ok((k.to_string(), v.parse().map_err(|_| format!("`{v}` is not a number"))?))
}

fn measure_source(args: &MeasureArgs, subcommand: &str) -> Result<Option<MeasureSource>, Error> {
    let support = match args.support {
        Some(SupportArg::Line) => Support::Line,
        Some(SupportArg::Circle) => Support::Circle,
        None => harness::default_support(subcommand),
    };
    args.measure.as_deref().map(|m| MeasureSource::parse_cli(m, support)).transpose()
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &cli.command {
        Command::Run { config } => ExperimentConfig::load(config)?,
        Command::SpectrumScan { measure, alpha } => {
            let mut c = ExperimentConfig::new("spectrum-scan");
            c.measure = measure_source(measure, "spectrum-scan")?;
            c.alpha = alpha.clone();
            c
        }
        Command::ClarkVerify { measure, alpha, gamma, route, grid } => {
            let mut c = ExperimentConfig::new("clark-verify");
            c.measure = measure_source(measure, "clark-verify")?;
            c.alpha = alpha.clone();
            c.gamma = *gamma;
            c.route = route.clone();
            c.grid = *grid;
            c
        }
        Command::Regularize { measure, alpha, kernel, kernel_json, family, eps_grid } => {
            let mut c = ExperimentConfig::new("regularize");
            c.measure = measure_source(measure, "regularize")?;
            c.alpha = alpha.clone();
            c.kernel = kernel.clone();
            c.kernel_json = kernel_json.clone();
            c.family = family.clone();
            c.eps_grid = eps_grid.as_ref().map(|g| g.0.clone());
            c
        }
        Command::SchurTest { pairs } => {
            let mut c = ExperimentConfig::new("schur-test");
            c.pairs = *pairs;
            c
        }
        Command::ModelCheck { measure, gamma, grid } => {
            let mut c = ExperimentConfig::new("model-check");
            c.measure = measure_source(measure, "model-check")?;
            c.gamma = *gamma;
            c.grid = *grid;
            c
        }
        Command::Dissipative { measure, alpha, grid } => {
            let mut c = ExperimentConfig::new("dissipative");
            c.measure = measure_source(measure, "dissipative")?;
            c.alpha = vec![*alpha];
            c.grid = *grid;
            c
        }
        Command::Acceptance => ExperimentConfig::new("acceptance"),
    };
    let common = &cli.common;
    if common.seed.is_some() {
        cfg.seed = common.seed;
    }
    if common.out.is_some() {
        cfg.output = common.out.clone();
    }
    if common.csv.is_some() {
        cfg.csv = common.csv.clone();
    }
    cfg.tolerances.extend(common.tolerances.iter().cloned());
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = build_config(&cli).and_then(|cfg| {
        let out = if cfg.subcommand == "acceptance" {
            let seed = cfg.seed.unwrap_or(DEFAULT_SEED);
            let (report, outcomes) = acceptance::run_acceptance(seed);
            for o in &outcomes {
                eprintln!("{}", o.summary_line());
            }
            harness::CommandOutput { report, csv: None }
        } else {
            harness::run(&cfg)?
        };
        let json = harness::write_artifacts(&cfg, &out)?;
        if cfg.output.is_none() {
            print!("{json}");
        }
        Ok(out.report.passed)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

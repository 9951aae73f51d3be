mod output;
mod svg;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fuzzfrac::analysis::{
    apriori_norm_bound, holder_params, run_perturbation, sup_norm, verify_holder, Direction,
    PerturbationKind,
};
use fuzzfrac::config::EXAMPLE2_CONFIG;
use fuzzfrac::solver::export_level_sets;
use fuzzfrac::{solve, Error, ProblemConfig, RifsSpec, SampledFuzzyFunction};
use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
enum CliError {
    /// Bad flags, unreadable or malformed configuration (exit 2).
    #[error("{0}")]
    Usage(String),
    /// Validation or computation failure (exit 1).
    #[error("{0}")]
    Domain(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Domain(format!("i/o error: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Domain(format!("csv error: {e}"))
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "fuzzfrac",
    version,
    about = "Fuzzy-valued recurrent fractal interpolation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Problem configuration (JSON); `example2` selects the bundled example.
    #[arg(long, global = true, default_value = "example2")]
    config: String,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Grid points per subinterval.
    #[arg(long, global = true)]
    grid_density: Option<usize>,
    /// Number of λ steps for triangular ordinates.
    #[arg(long, global = true)]
    lambda_grid: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Comma-separated λ values to export.
    #[arg(long, global = true, value_delimiter = ',', value_parser = parse_lambda)]
    lambdas: Option<Vec<f64>>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the configuration and print the derived constants.
    Validate,
    /// Solve and write the level table and the iteration report.
    Solve,
    /// Solve and write SVG plots.
    Plot,
    /// Hölder parameters, a-priori bound and an empirical Hölder check.
    Analyze {
        #[arg(long, default_value_t = 10_000)]
        pairs: usize,
    },
    /// Perturb the problem, solve both and compare with the stability bound.
    Perturb {
        #[arg(long, value_parser = parse_kind)]
        kind: PerturbationKind,
        #[arg(long, allow_hyphen_values = true)]
        size: f64,
        /// Perturb a single component (node index, or 1-based interval for
        /// perturb_alpha) by `size` instead of a random direction.
        #[arg(long)]
        index: Option<usize>,
    },
}

fn parse_lambda(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is outside [0, 1]"))
    }
}

fn parse_kind(s: &str) -> Result<PerturbationKind, String> {
    s.parse()
}

impl Common {
    fn load(&self) -> CliResult<ProblemConfig> {
        let text = if self.config == "example2" {
            EXAMPLE2_CONFIG.to_string()
        } else {
            fs::read_to_string(&self.config)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", self.config)))?
        };
        let mut cfg = ProblemConfig::from_json(&text)
            .map_err(|e| CliError::Usage(format!("{}: {e}", self.config)))?;
        if let Some(t) = self.tol {
            cfg.tol = t;
        }
        if let Some(d) = self.grid_density {
            cfg.grid_density = d;
        }
        if let Some(g) = self.lambda_grid {
            cfg.lambda_grid_size = g;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(l) = &self.lambdas {
            cfg.output.lambdas = l.clone();
        }
        Ok(cfg)
    }

    fn out_dir(&self) -> CliResult<&Path> {
        fs::create_dir_all(&self.out)?;
        Ok(&self.out)
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("FUZZFRAC_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("FUZZFRAC_THREADS: `{raw}` is not a count")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Domain(e.to_string()))?;
    }
    Ok(())
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn list(vs: &[f64]) -> String {
    vs.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

fn validate(cfg: &ProblemConfig) -> CliResult<()> {
    let spec = match cfg.build_spec() {
        Ok(spec) => spec,
        Err(e) => {
            println!("[FAIL] configuration: {e}");
            return Err(CliError::Domain("validation failed".into()));
        }
    };
    let data = spec.data();
    println!(
        "[PASS] data set: {} points on [{}, {}], {} λ levels",
        data.xs().len(),
        data.x(0),
        data.x(data.intervals()),
        data.levels().len()
    );
    println!("[PASS] address map: {:?}", spec.address().entries());

    let scaling = spec.validate_scaling();
    println!(
        "[{}] scaling conditions (a1)-(a3)",
        mark(scaling.all_passed())
    );
    for f in scaling.failures() {
        println!(
            "       interval {} violates {} at λ = {}",
            f.interval,
            f.condition,
            f.offending_lambda.unwrap_or(f64::NAN)
        );
    }

    println!("transition matrix M:");
    for row in spec.matrix().rows() {
        println!("  [{}]", list(&row));
    }
    let unreachable = spec.matrix().unreachable();
    if unreachable.is_empty() {
        println!("[PASS] M is irreducible");
    } else {
        println!("[FAIL] M is reducible; unreachable intervals {unreachable:?}");
    }

    println!(
        "Lipschitz constants L_q: {}",
        list(spec.lipschitz_constants())
    );
    println!(
        "contraction factors c_l: {}",
        list(spec.contraction_factors())
    );
    let cert = spec.contraction_certificate();
    match &cert {
        Ok(c) => println!(
            "[PASS] contraction: theta_max = {}, theta = {}, c_w = [{}], max = {}",
            c.theta_max,
            c.theta,
            list(&c.coefficients),
            c.max_coefficient
        ),
        Err(e) => println!("[FAIL] contraction: {e}"),
    }

    if scaling.all_passed() && unreachable.is_empty() && cert.is_ok() {
        Ok(())
    } else {
        Err(CliError::Domain("validation failed".into()))
    }
}

fn solved(
    cfg: &ProblemConfig,
) -> CliResult<(RifsSpec, SampledFuzzyFunction, fuzzfrac::IterationReport)> {
    let spec = cfg.build_spec()?;
    let (f, report) = solve(&spec, &cfg.solve_options())?;
    Ok((spec, f, report))
}

fn cmd_solve(cfg: &ProblemConfig, common: &Common) -> CliResult<()> {
    let (_, f, report) = solved(cfg)?;
    let out = common.out_dir()?;
    let table = export_level_sets(&f, &cfg.output.lambdas)?;
    output::write_levels_csv(&out.join("solution.csv"), &table)?;
    let text = output::iteration_report(&report, cfg.grid_density, f.grid().len());
    output::write_text(&out.join("report.txt"), &text)?;
    print!("{text}");
    Ok(())
}

fn cmd_plot(cfg: &ProblemConfig, common: &Common) -> CliResult<()> {
    let (_, f, _) = solved(cfg)?;
    let out = common.out_dir()?;
    let (w, h) = (cfg.output.plot_width, cfg.output.plot_height);
    let table = export_level_sets(&f, &cfg.output.lambdas)?;
    output::write_text(&out.join("levels.svg"), &svg::level_plot(&table, w, h))?;
    let support = export_level_sets(&f, &[0.0])?;
    let core = export_level_sets(&f, &[1.0])?;
    output::write_text(
        &out.join("fuzzy_graph.svg"),
        &svg::fuzzy_graph_plot(&support, &core, w, h),
    )?;
    println!(
        "wrote {} and {}",
        out.join("levels.svg").display(),
        out.join("fuzzy_graph.svg").display()
    );
    Ok(())
}

fn cmd_analyze(cfg: &ProblemConfig, pairs: usize) -> CliResult<()> {
    let (spec, f, _) = solved(cfg)?;
    let hp = holder_params(&spec)?;
    let check = verify_holder(&f, &hp, pairs, cfg.seed, 10.0 * cfg.tol);
    print!(
        "{}",
        output::holder_report(&hp, apriori_norm_bound(&spec), sup_norm(&f), &check)
    );
    if check.passed() {
        Ok(())
    } else {
        Err(CliError::Domain("Hölder check failed".into()))
    }
}

fn cmd_perturb(
    cfg: &ProblemConfig,
    common: &Common,
    kind: PerturbationKind,
    size: f64,
    index: Option<usize>,
) -> CliResult<()> {
    let spec = cfg.build_spec()?;
    let dir = match index {
        Some(k) => Direction::Component(k),
        None => Direction::Random(cfg.seed),
    };
    let report = run_perturbation(&spec, kind, size, dir, &cfg.solve_options())?;
    let out = common.out_dir()?;
    output::write_stability_csv(&out.join("perturbation.csv"), &report)?;
    println!("kind: {}", report.kind);
    println!("size: {}", report.perturbation_size);
    println!("theoretical_bound: {}", report.theoretical_bound);
    println!("observed_d: {}", report.observed_d);
    println!("margin: {}", report.margin);
    if report.margin >= 0.0 {
        Ok(())
    } else {
        Err(CliError::Domain(
            "observed deviation exceeds the bound".into(),
        ))
    }
}

fn run(cli: Cli) -> CliResult<()> {
    configure_threads()?;
    let cfg = cli.common.load()?;
    match cli.command {
        Command::Validate => validate(&cfg),
        Command::Solve => cmd_solve(&cfg, &cli.common),
        Command::Plot => cmd_plot(&cfg, &cli.common),
        Command::Analyze { pairs } => cmd_analyze(&cfg, pairs),
        Command::Perturb { kind, size, index } => cmd_perturb(&cfg, &cli.common, kind, size, index),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                CliError::Usage(_) => ExitCode::from(2),
                CliError::Domain(_) => ExitCode::from(1),
            }
        }
    }
}

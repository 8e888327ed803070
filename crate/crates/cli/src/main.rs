mod commands;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use mahler_core::measure::{Method, QuadConfig};
use mahler_core::special::Family;
use serde::Deserialize;

use report::{print_table, CliError, Outcome, RunReport, Timing, EXIT_VERIFICATION};

#[derive(Parser)]
#[command(name = "mahler", version, about = "Mahler measures, measure-preserving substitutions and closed forms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    quad: QuadArgs,
    /// Emit a JSON report instead of a table.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// TOML file with defaults for method, nodes, total_nodes, shifts, seed,
    /// reduce_var and threads. Flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct QuadArgs {
    /// jensen, direct or qmc.
    #[arg(long, global = true)]
    method: Option<Method>,
    /// Tensor-rule nodes per dimension (a multiple of 4).
    #[arg(long, global = true)]
    nodes: Option<usize>,
    /// Lattice points per shift, rounded down to a prime.
    #[arg(long, global = true)]
    total_nodes: Option<usize>,
    /// Random shifts of the lattice rule.
    #[arg(long, global = true)]
    shifts: Option<usize>,
    #[arg(long, global = true, env = "MAHLER_SEED")]
    seed: Option<u64>,
    /// Variable eliminated with Jensen's formula.
    #[arg(long, global = true)]
    reduce_var: Option<String>,
}

#[derive(Args, Default)]
pub struct SpecArgs {
    /// Variable to substitute.
    #[arg(long)]
    var: Option<String>,
    /// The polynomial g, with all roots outside the open unit disc.
    #[arg(long)]
    g: Option<String>,
    /// Degree k of the reciprocal conjugate, k > deg g.
    #[arg(long, allow_hyphen_values = true)]
    k: Option<i64>,
    /// Unit scalar lambda with exact modulus one, e.g. `1`, `i` or `3/5+4/5*i`.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    lambda: String,
}

#[derive(Subcommand)]
enum Command {
    /// Mahler measure of a polynomial or rational function.
    Measure { expr: String },
    /// Apply the substitution v -> f(v)/g(v).
    Transform {
        expr: String,
        #[command(flatten)]
        spec: SpecArgs,
        /// Also measure both sides.
        #[arg(long)]
        check: bool,
    },
    /// Check a catalogue identity, an explicit value or a substitution.
    Verify {
        /// Catalogue key (see `mahler catalog`).
        key: Option<String>,
        #[arg(long, conflicts_with = "key")]
        lhs: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        rhs_value: Option<f64>,
        #[arg(long)]
        tolerance: Option<f64>,
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Closed-form value of R_m, S_m or T_m.
    ClosedForm {
        family: Family,
        m: u32,
        /// Compare with quadrature of the constructed function.
        #[arg(long)]
        check: bool,
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Run a property suite: roots-lemma, pencil, invariance or catalog.
    Suite {
        name: String,
        #[arg(long)]
        count: Option<usize>,
        /// Value used for the conjectural entries of the catalog suite.
        #[arg(long, allow_hyphen_values = true)]
        rhs_value: Option<f64>,
    },
    /// List the identity catalogue.
    Catalog,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    method: Option<Method>,
    nodes: Option<usize>,
    total_nodes: Option<usize>,
    shifts: Option<usize>,
    seed: Option<u64>,
    reduce_var: Option<String>,
    threads: Option<usize>,
}

fn load_config(path: Option<&PathBuf>) -> Result<FileConfig, CliError> {
    let Some(path) = path else { return Ok(FileConfig::default()) };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn quad_config(q: &QuadArgs, file: &FileConfig) -> Result<QuadConfig, CliError> {
    let d = QuadConfig::default();
    let cfg = QuadConfig {
        method: q.method.or(file.method).unwrap_or(d.method),
        nodes_per_dim: q.nodes.or(file.nodes),
        total_nodes: q.total_nodes.or(file.total_nodes).unwrap_or(d.total_nodes),
        shifts: q.shifts.or(file.shifts).unwrap_or(d.shifts),
        seed: q.seed.or(file.seed).unwrap_or(d.seed),
        reduction_variable: q.reduce_var.clone().or_else(|| file.reduce_var.clone()),
        ..d
    };
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli, cfg: &QuadConfig) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Measure { expr } => commands::measure_cmd(expr, cfg),
        Command::Transform { expr, spec, check } => commands::transform_cmd(expr, spec, *check, cfg),
        Command::Verify { key, lhs, rhs_value, tolerance, spec } => commands::verify_cmd(
            commands::VerifyArgs {
                key: key.as_deref(),
                lhs: lhs.as_deref(),
                rhs_value: *rhs_value,
                tolerance: *tolerance,
                spec,
            },
            cfg,
        ),
        Command::ClosedForm { family, m, check, tolerance } => {
            commands::closed_form_cmd(*family, *m, *check, *tolerance, cfg)
        }
        Command::Suite { name, count, rhs_value } => commands::suite_cmd(name, *count, *rhs_value, cfg),
        Command::Catalog => Ok(commands::catalog_cmd()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let setup = load_config(cli.config.as_ref()).and_then(|file| {
        let threads = cli.threads.or(file.threads);
        if let Some(n) = threads {
            if n == 0 {
                return Err(CliError::Usage("--threads must be at least 1".into()));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::Usage(e.to_string()))?;
        }
        quad_config(&cli.quad, &file)
    });
    let result = setup.and_then(|cfg| run(&cli, &cfg).map(|o| (o, cfg)));
    let (outcome, cfg) = match result {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {}", e.message());
            return e.code();
        }
    };
    if cli.json {
        let report = RunReport {
            version: env!("CARGO_PKG_VERSION"),
            command: outcome.command,
            inputs: outcome.inputs.clone(),
            seed: cfg.seed,
            results: outcome.results.clone(),
            pass: outcome.pass,
            warnings: outcome.warnings.clone(),
            timing: Timing {
                wall_seconds: start.elapsed().as_secs_f64(),
                threads: rayon::current_num_threads(),
            },
        };
        let text = serde_json::to_string_pretty(&report).expect("report serialises");
        // A closed stdout (e.g. piped into `head`) is not an error worth reporting.
        let _ = writeln!(std::io::stdout().lock(), "{text}");
    } else {
        let _ = print_table(&outcome, &mut std::io::stdout().lock());
    }
    match outcome.pass {
        Some(false) => ExitCode::from(EXIT_VERIFICATION),
        _ => ExitCode::SUCCESS,
    }
}

//! cuspsum: exponential sums of cusp form coefficients with rational
//! additive twists. Builds exact coefficient tables, evaluates twisted
//! sums, Voronoi terms, moment integrals, quadruple counts and
//! exponent-pair bounds, and writes canonical JSON reports.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cuspsum::error::Error;

mod config;
mod report;
mod runner;

use config::{FormChoice, RunConfig};
use runner::Runner;

#[derive(Parser, Debug)]
#[command(
    name = "cuspsum",
    version,
    about = "Twisted exponential sums of cusp form coefficients: tables, moments, Voronoi checks",
    disable_help_subcommand = true
)]
struct Cli {
    /// Flat key-value config file; CLI flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Form: delta, delta_e4, delta_e6, or unit_impulse (synthetic a(1)-only)
    #[arg(long, global = true)]
    form: Option<String>,

    /// Table length (also the quadruple cutoff for the quadruples command)
    #[arg(long = "n-max", visible_alias = "n", global = true)]
    n_max: Option<usize>,

    /// Twist numerator
    #[arg(long, global = true, allow_hyphen_values = true)]
    h: Option<i64>,

    /// Twist denominator
    #[arg(long, global = true)]
    k: Option<u64>,

    /// M grid (comma separated)
    #[arg(long = "M", global = true, value_delimiter = ',')]
    m_grid: Option<Vec<f64>>,

    /// Short-sum length grid (comma separated)
    #[arg(long = "delta", global = true, value_delimiter = ',')]
    delta_grid: Option<Vec<f64>>,

    /// Integration length for short-sum mean squares (default: M)
    #[arg(long, global = true)]
    xi: Option<f64>,

    /// Large-value threshold grid (comma separated; default M^{1/4})
    #[arg(long = "V", global = true, value_delimiter = ',')]
    v_grid: Option<Vec<f64>>,

    /// Moment exponent A
    #[arg(long = "A", global = true)]
    a_exp: Option<f64>,

    /// Exponent-pair process word over {A, B}
    #[arg(long, global = true)]
    word: Option<String>,

    /// Operational epsilon for admissibility windows and bound display
    #[arg(long, global = true)]
    eps: Option<f64>,

    /// Oscillation functional constant c
    #[arg(long = "c-small", global = true)]
    c_small: Option<f64>,

    /// Oscillation functional constant C
    #[arg(long = "C-big", global = true)]
    c_big: Option<f64>,

    /// Report output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker thread count (does not affect report bytes)
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Run the exact Deligne/Hecke verification after building tables
    #[arg(long, global = true)]
    verify: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build coefficient tables, export CSV, report statistics
    Coeffs,
    /// Truncated Voronoi error scan with fitted slope
    Voronoi,
    /// Moment integrals, constants C and C_F, large values, short sums
    Moments,
    /// Enumerate square-root additive quadruples and spacing minima
    Quadruples,
    /// Exponent-pair word calculus and derived bounds
    Exppairs,
    /// Oscillation scan of the omega functional
    Oscillation,
    /// Everything above in sequence
    All,
}

fn build_config(cli: &Cli) -> Result<RunConfig, String> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            RunConfig::from_text(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(form) = &cli.form {
        cfg.form = FormChoice::parse(form)?;
    }
    if let Some(n) = cli.n_max {
        cfg.n_max = n;
    }
    match (cli.h, cli.k) {
        (Some(h), Some(k)) => cfg.twists = vec![(h, k)],
        (Some(h), None) => cfg.twists = vec![(h, 1)],
        (None, Some(k)) => cfg.twists = vec![(0, k)],
        (None, None) => {}
    }
    if let Some(g) = &cli.m_grid {
        cfg.m_grid = g.clone();
    }
    if let Some(g) = &cli.delta_grid {
        cfg.delta_grid = g.clone();
    }
    if cli.xi.is_some() {
        cfg.xi = cli.xi;
    }
    if let Some(g) = &cli.v_grid {
        cfg.v_grid = g.clone();
    }
    if let Some(a) = cli.a_exp {
        cfg.a_exp = a;
    }
    if let Some(w) = &cli.word {
        cfg.word = w.clone();
    }
    if let Some(e) = cli.eps {
        cfg.eps = e;
    }
    if let Some(c) = cli.c_small {
        cfg.c_small = c;
    }
    if let Some(c) = cli.c_big {
        cfg.c_big = c;
    }
    if let Some(o) = &cli.out {
        cfg.out_dir = o.clone();
    }
    if let Some(w) = cli.workers {
        cfg.workers = w;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are success, everything else is usage
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    let cfg = match build_config(&cli) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("config error: {msg}");
            return ExitCode::from(1);
        }
    };
    let workers = cfg.workers;
    let runner = Runner::new(cfg);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("worker pool: {e}");
            return ExitCode::from(1);
        }
    };
    let result = pool.install(|| match cli.command {
        Command::Coeffs => runner.run_coeffs(cli.verify),
        Command::Voronoi => runner.run_voronoi(),
        Command::Moments => runner.run_moments(),
        Command::Quadruples => runner.run_quadruples(),
        Command::Exppairs => runner.run_exppairs(),
        Command::Oscillation => runner.run_oscillation(),
        Command::All => runner.run_all(cli.verify),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ (Error::CapExceeded { .. } | Error::IterationBudget(_, _))) => {
            eprintln!("resource refusal: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

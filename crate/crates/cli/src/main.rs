use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use heckmort_cli::cache::Cache;
use heckmort_cli::parser::{parse_equation, parse_expr, parse_file};
use heckmort_cli::selftest::{run_all, DEFAULT_SEED};
use heckmort_cli::verify::{
    cached_evaluate, exit_code, reports_json, run_verify, OutputFormat, RunConfig, EXIT_ENGINE, EXIT_MISMATCH, EXIT_OK,
    EXIT_USAGE,
};
use heckmort_core::master::{replay_proof, verify_master, MasterParams, Specialization};
use heckmort_core::{Exponent, SignedMonomial};

#[derive(Parser)]
#[command(name = "heckmort", version, about = "Exact verification of q-series identities")]
struct Cli {
    /// Print progress to stderr
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    /// Cache directory (default: $HECKMORT_CACHE_DIR or ~/.cache/heckmort)
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Do not read or write the series cache
    #[arg(long, global = true)]
    no_cache: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Verify every equation of an identity file, or inline equations
    Verify {
        #[arg(long, required_unless_present = "eq")]
        file: Option<PathBuf>,
        /// An inline equation `lhs == rhs`; may be repeated
        #[arg(long)]
        eq: Vec<String>,
        #[arg(long, default_value = "60")]
        order: String,
        /// Write the JSON report array here (`-` for stdout)
        #[arg(long)]
        json: Option<PathBuf>,
        /// Parallel equations; 0 uses every core
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Print the truncated expansion of an expression
    Series {
        #[arg(long)]
        expr: String,
        #[arg(long, default_value = "60")]
        order: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Check f_{n,n+p,n} = g_{n,n+p,n} + θ_{n,p} at one specialization
    Master {
        #[arg(long)]
        n: i64,
        #[arg(long)]
        p: i64,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[arg(long, default_value = "60")]
        order: String,
    },
    /// Replay the multiple-sum proof of the master formula stage by stage
    Replay {
        #[arg(long)]
        n: i64,
        #[arg(long)]
        p: i64,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[arg(long, default_value = "30")]
        order: String,
    },
    /// Run the acceptance suite
    Selftest {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Run only these criteria
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
    /// Manage the series cache
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Subcommand)]
enum CacheAction {
    /// Delete every cached series
    Clear,
}

/// `println!` that ignores a closed stdout, so `heckmort ... | head` neither
/// panics nor changes the exit code.
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE as u8)
}

fn engine(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_ENGINE as u8)
}

fn code(c: i32) -> ExitCode {
    ExitCode::from(c as u8)
}

fn config(order: &str, cli: &Cli) -> Result<RunConfig, String> {
    let order: Exponent = order.parse().map_err(|e| format!("bad --order `{order}`: {e}"))?;
    let mut cfg = RunConfig::new(order).map_err(|e| e.to_string())?;
    cfg.verbosity = cli.verbose;
    if !cli.no_cache {
        cfg.cache = Some(Cache::new(cli.cache_dir.clone().unwrap_or_else(Cache::default_dir)));
    }
    Ok(cfg)
}

fn monomial(flag: &str, s: &str) -> Result<SignedMonomial, String> {
    s.parse().map_err(|e| format!("bad {flag} `{s}`: {e}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Verify { file, eq, order, json, jobs } => {
            let mut cfg = match config(order, &cli) {
                Ok(c) => c,
                Err(e) => return usage(e),
            };
            cfg.jobs = *jobs;
            let mut eqs = Vec::new();
            if let Some(path) = file {
                let src = match fs::read_to_string(path) {
                    Ok(s) => s,
                    Err(e) => return usage(format!("{}: {e}", path.display())),
                };
                match parse_file(&src) {
                    Ok(v) => eqs.extend(v),
                    Err(e) => return usage(format!("{}: {e}", path.display())),
                }
            }
            for text in eq {
                match parse_equation(text) {
                    Ok(e) => eqs.push(e),
                    Err(e) => return usage(e),
                }
            }
            if cfg.verbosity > 0 {
                eprintln!("verifying {} equations mod q^({})", eqs.len(), cfg.order);
            }
            let reports = run_verify(&eqs, &cfg);
            let to_stdout = json.as_deref().is_some_and(|p| p.as_os_str() == "-");
            if !to_stdout {
                for r in &reports {
                    out!("{r}");
                }
            }
            if let Some(path) = json {
                let text = reports_json(&reports);
                if to_stdout {
                    out!("{text}");
                } else if let Err(e) = fs::write(path, text + "\n") {
                    return usage(format!("{}: {e}", path.display()));
                }
            }
            code(exit_code(&reports))
        }
        Command::Series { expr, order, format } => {
            let mut cfg = match config(order, &cli) {
                Ok(c) => c,
                Err(e) => return usage(e),
            };
            cfg.format = match format {
                Format::Text => OutputFormat::Text,
                Format::Json => OutputFormat::Json,
            };
            let node = match parse_expr(expr) {
                Ok(n) => n,
                Err(e) => return usage(e),
            };
            match cached_evaluate(&node, cfg.order, cfg.cache.as_ref()) {
                Ok(s) => {
                    match cfg.format {
                        OutputFormat::Text => out!("{s}"),
                        OutputFormat::Json => {
                            out!("{}", serde_json::to_string_pretty(&s.to_json()).expect("serializable"))
                        }
                    }
                    code(EXIT_OK)
                }
                Err(e) => engine(e),
            }
        }
        Command::Master { n, p, x, y, order } => {
            let (cfg, x, y) = match (config(order, &cli), monomial("--x", x), monomial("--y", y)) {
                (Ok(c), Ok(x), Ok(y)) => (c, x, y),
                (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => return usage(e),
            };
            let mp = match MasterParams::new(*n, *p) {
                Ok(mp) => mp,
                Err(e) => return usage(e),
            };
            match verify_master(mp, &Specialization::new(x, y), cfg.order) {
                Ok(r) => {
                    out!("{r}");
                    code(if r.is_verified() { EXIT_OK } else { EXIT_MISMATCH })
                }
                Err(e) => engine(e),
            }
        }
        Command::Replay { n, p, x, y, order } => {
            let (cfg, x, y) = match (config(order, &cli), monomial("--x", x), monomial("--y", y)) {
                (Ok(c), Ok(x), Ok(y)) => (c, x, y),
                (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => return usage(e),
            };
            let mp = match MasterParams::new(*n, *p) {
                Ok(mp) => mp,
                Err(e) => return usage(e),
            };
            match replay_proof(mp, &Specialization::new(x, y), cfg.order) {
                Ok(stages) => {
                    for s in &stages {
                        out!("{:<9} {:<13} {}", s.stage, s.report.status.as_str(), s.description);
                    }
                    code(if stages.iter().all(|s| s.is_verified()) { EXIT_OK } else { EXIT_MISMATCH })
                }
                Err(e) => engine(e),
            }
        }
        Command::Selftest { seed, only } => {
            let outcomes: Vec<_> = if only.is_empty() {
                run_all(*seed)
            } else {
                only.iter().map(|id| heckmort_cli::selftest::run_criterion(*id, *seed)).collect()
            };
            for o in &outcomes {
                out!("{o}");
            }
            let passed = outcomes.iter().filter(|o| o.passed).count();
            out!("{passed}/{} criteria passed", outcomes.len());
            code(if passed == outcomes.len() { EXIT_OK } else { EXIT_MISMATCH })
        }
        Command::Cache { action: CacheAction::Clear } => {
            let cache = Cache::new(cli.cache_dir.clone().unwrap_or_else(Cache::default_dir));
            match cache.clear() {
                Ok(n) => {
                    out!("removed {n} entries from {}", cache.dir().display());
                    code(EXIT_OK)
                }
                Err(e) => usage(format!("{}: {e}", cache.dir().display())),
            }
        }
    }
}

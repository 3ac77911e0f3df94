mod commands;
mod config;
mod output;
mod reproduce;
mod svg;

use std::path::Path;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

#[derive(Debug)]
pub enum CliError {
    /// Unreadable, unparsable, or schema-invalid input (exit 2).
    Config(String),
    /// A simulation or I/O failure during an otherwise valid run (exit 3).
    Runtime(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config-invalid: {m}"),
            CliError::Runtime(m) => write!(f, "runtime-failure: {m}"),
        }
    }
}

#[derive(Parser)]
#[command(name = "scq", version, about = "Squeezed cat qubit studies: noise rates, gates, preparation, circuit planning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Output directory (created if missing).
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Also render SVG charts.
    #[arg(long)]
    plot: bool,
    /// Worker threads for study grids (default: all cores; SCQ_THREADS overrides).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct ConfigArgs {
    /// TOML config file.
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Subcommand)]
enum Command {
    /// Bit/phase-flip rate studies over (α², r, noise-knob) grids.
    Rates(ConfigArgs),
    /// Dissipative Z(θ) gate error probabilities.
    Zgate(ConfigArgs),
    /// Unconditional squeezed-cat preparation convergence.
    Prep(ConfigArgs),
    /// Circuit-QED pump plan and two-mode validation.
    Circuit(ConfigArgs),
    /// Reproduce a bundled desk-scale figure study (fig1..fig5).
    Reproduce {
        /// Figure id: fig1, fig2, fig3, fig4, or fig5.
        figure: String,
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn init_threads(cli_threads: Option<usize>) {
    let n = std::env::var("SCQ_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
        .or(cli_threads);
    if let Some(n) = n {
        // Ignore the error if a pool already exists (e.g. under tests).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

type Runner = Box<dyn FnOnce(&Path, bool) -> Result<Vec<String>, CliError>>;

fn section_missing(name: &str) -> CliError {
    CliError::Config(format!("config has no [{name}] section"))
}

/// Resolve a subcommand into (label, resolved-config text, work closure),
/// validating eagerly so config errors exit 2 before any work starts.
fn prepare(command: Command) -> Result<(CommonArgs, String, String, Runner), CliError> {
    match command {
        Command::Rates(a) => {
            let cfg = config::load(&a.config)?;
            let resolved = resolve_text(&cfg)?;
            let c = cfg.rates.ok_or_else(|| section_missing("rates"))?;
            c.validate()?;
            Ok((a.common, "rates".into(), resolved, Box::new(move |out, plot| commands::run_rates(&c, out, plot))))
        }
        Command::Zgate(a) => {
            let cfg = config::load(&a.config)?;
            let resolved = resolve_text(&cfg)?;
            let c = cfg.zgate.ok_or_else(|| section_missing("zgate"))?;
            c.validate()?;
            Ok((a.common, "zgate".into(), resolved, Box::new(move |out, plot| commands::run_zgate(&c, out, plot))))
        }
        Command::Prep(a) => {
            let cfg = config::load(&a.config)?;
            let resolved = resolve_text(&cfg)?;
            let c = cfg.prep.ok_or_else(|| section_missing("prep"))?;
            c.validate()?;
            Ok((a.common, "prep".into(), resolved, Box::new(move |out, plot| commands::run_prep(&c, out, plot))))
        }
        Command::Circuit(a) => {
            let cfg = config::load(&a.config)?;
            let resolved = resolve_text(&cfg)?;
            let c = cfg.circuit.ok_or_else(|| section_missing("circuit"))?;
            c.validate()?;
            Ok((a.common, "circuit".into(), resolved, Box::new(move |out, plot| commands::run_circuit(&c, out, plot))))
        }
        Command::Reproduce { figure, common } => {
            if !reproduce::FIGURES.contains(&figure.as_str()) {
                return Err(CliError::Config(format!(
                    "unknown figure id {figure:?}; expected one of {}",
                    reproduce::FIGURES.join(", ")
                )));
            }
            let resolved = format!("figure = {figure:?}\n");
            let label = format!("reproduce {figure}");
            Ok((common, label, resolved, Box::new(move |out, plot| reproduce::run(&figure, out, plot))))
        }
    }
}

fn resolve_text(cfg: &config::Config) -> Result<String, CliError> {
    toml::to_string_pretty(cfg)
        .map_err(|e| CliError::Runtime(format!("serializing resolved config: {e}")))
}

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    let (common, label, resolved_config, runner) = prepare(cli.command)?;
    init_threads(common.threads);
    let out = output::ensure_out_dir(&common.out)?;

    let start = Instant::now();
    let result = runner(&out, common.plot);
    let manifest = output::RunManifest {
        command: label,
        resolved_config,
        wall_seconds: start.elapsed().as_secs_f64(),
        complete: result.is_ok(),
        outputs: match &result {
            Ok(files) => files.clone(),
            // Partial results stay on disk; the manifest marks the run incomplete.
            Err(_) => list_outputs(&out),
        },
    };
    manifest.write(&out)?;
    result.map(|_| ())
}

fn list_outputs(out: &Path) -> Vec<String> {
    let mut v: Vec<String> = std::fs::read_dir(out)
        .into_iter()
        .flatten()
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n != "manifest.toml" && !n.ends_with(".tmp"))
        .collect();
    v.sort();
    v
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                CliError::Config(_) => ExitCode::from(2),
                CliError::Runtime(_) => ExitCode::from(3),
            }
        }
    }
}

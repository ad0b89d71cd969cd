//! `optpess` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use optpess_core::{solve_cmdp_exact, Dims};

use crate::config::load_config;
use crate::envfile::EnvironmentFile;
use crate::experiment::{run_grid, ExperimentContext};
use crate::generate::{generate_environment, GeneratorSpec};
use crate::metrics_io::{format_number, write_series, write_summary};
use crate::{io_err, LabError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "optpess", version, about = "Safe exploration experiments on tabular constrained MDPs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every (agent, seed) cell of a TOML config and write CSVs.
    Run {
        config: PathBuf,
        /// Output directory; overrides the config's `output`.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Generate an environment file (random, chain or boundary_tight).
    GenEnv {
        spec: GeneratorSpec,
        seed: u64,
        out: PathBuf,
        #[arg(long, default_value_t = 5)]
        states: usize,
        #[arg(long, default_value_t = 3)]
        actions: usize,
        #[arg(long, default_value_t = 5)]
        horizon: usize,
    },
    /// Print the exact constrained optimum, its cost and the optimal policy.
    Solve { envfile: PathBuf },
    /// Check an environment file and list every problem found.
    Validate { envfile: PathBuf },
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_RUNTIME
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<(), LabError> {
    match command {
        Command::Run { config, output } => run_config(&config, output.as_deref(), out),
        Command::GenEnv {
            spec,
            seed,
            out: path,
            states,
            actions,
            horizon,
        } => {
            let env = generate_environment(spec, seed, Dims::new(states, actions, horizon))?;
            env.write(&path)?;
            say(out, format_args!("wrote {} environment to {}", spec.as_str(), path.display()))
        }
        Command::Solve { envfile } => solve(&envfile, out),
        Command::Validate { envfile } => validate(&envfile, out),
    }
}

fn say(out: &mut dyn Write, text: std::fmt::Arguments<'_>) -> Result<(), LabError> {
    writeln!(out, "{text}").map_err(io_err("<stdout>"))
}

fn run_config(path: &Path, output: Option<&Path>, out: &mut dyn Write) -> Result<(), LabError> {
    let cfg = load_config(path)?;
    let dir = output.map(Path::to_path_buf).unwrap_or_else(|| cfg.output.clone());
    std::fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    let ctx = ExperimentContext::from_config(&cfg)?;
    let runs = run_grid(&ctx, &cfg.agents, &cfg.seeds)?;
    for series in &runs {
        write_series(&dir, series)?;
    }
    write_summary(&dir, &runs)?;
    let resolved = dir.join("resolved_config.toml");
    std::fs::write(&resolved, &cfg.resolved_text).map_err(io_err(&resolved))?;
    say(
        out,
        format_args!("wrote {} runs and summary.csv to {}", runs.len(), dir.display()),
    )
}

fn solve(path: &Path, out: &mut dyn Write) -> Result<(), LabError> {
    let env = EnvironmentFile::read(path)?;
    let model = env.to_model()?;
    let sol = solve_cmdp_exact(&model)?;
    let d = model.dims;
    let mut text = format!(
        "value {}\ncost {}\nthreshold {}\npolicy h s a prob\n",
        format_number(sol.value),
        format_number(sol.cost),
        format_number(model.threshold)
    );
    for h in 0..d.horizon {
        for s in 0..d.states {
            for a in 0..d.actions {
                let p = sol.policy.prob(h, s, a);
                if p > 0.0 {
                    text.push_str(&format!("{} {s} {a} {}\n", h + 1, format_number(p)));
                }
            }
        }
    }
    out.write_all(text.as_bytes()).map_err(io_err("<stdout>"))
}

fn validate(path: &Path, out: &mut dyn Write) -> Result<(), LabError> {
    let env = EnvironmentFile::read(path)?;
    let model = env.to_model_unchecked()?;
    let violations = model.validate();
    if !violations.is_empty() {
        return Err(LabError::InvalidModel(violations));
    }
    let safe = env.safe_baseline(&model)?;
    let d = model.dims;
    say(
        out,
        format_args!(
            "ok: {} states, {} actions, horizon {}, tau {}{}",
            d.states,
            d.actions,
            d.horizon,
            format_number(model.threshold),
            match safe {
                Some(b) => format!(", safe cost {}", format_number(b.cost_bound)),
                None => String::new(),
            }
        ),
    )
}

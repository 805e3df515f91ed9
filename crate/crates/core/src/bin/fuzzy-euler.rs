use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fuzzy_euler::experiment::{
    self, Command, ConfigFile, ExperimentConfig, ExperimentError, Report,
};
use fuzzy_euler::RateClass;

#[derive(Parser)]
#[command(
    name = "fuzzy-euler",
    version,
    about = "Euler summability experiments on fuzzy sequences"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Euler parameter p.
    #[arg(long, global = true)]
    p: Option<f64>,

    /// Largest index n.
    #[arg(long, global = true)]
    upto: Option<usize>,

    /// Number of α levels for generated sequences.
    #[arg(long = "grid", global = true)]
    grid_size: Option<usize>,

    /// Input sequence (JSON array of fuzzy numbers).
    #[arg(long = "in", global = true)]
    input: Option<PathBuf>,

    /// Output CSV. The JSON summary goes to `<out>.summary.json`.
    #[arg(long = "out", global = true)]
    output: Option<PathBuf>,

    /// Override a tolerance, e.g. `--tol compose=1e-9`. Repeatable.
    #[arg(long = "tol", global = true, value_parser = experiment::parse_tolerance)]
    tolerances: Vec<(String, f64)>,

    /// TOML file with defaults; flags win over it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Euler means of a sequence.
    Transform,
    /// Gap statistic and rate verdict.
    Diagnose {
        /// Treat the input as series terms.
        #[arg(long)]
        series: bool,
        /// Fail unless the verdict matches.
        #[arg(long)]
        expect: Option<RateClass>,
    },
    /// Binomial sandwich check.
    Bounds {
        /// Number of probabilities j/(count+1).
        #[arg(long)]
        p_count: Option<usize>,
    },
    /// Compare E_r(E_p) with E_q termwise.
    ComposeCheck,
    /// Measured rate on the alternating example against its closed form.
    ReproduceExample,
    /// Convergence of the auxiliary limit sequences.
    LimitsCheck {
        /// Largest q.
        #[arg(long)]
        q_max: Option<u64>,
    },
}

fn build_config(cli: Cli) -> Result<ExperimentConfig, ExperimentError> {
    let command = match &cli.command {
        Cmd::Transform => Command::Transform,
        Cmd::Diagnose { .. } => Command::Diagnose,
        Cmd::Bounds { .. } => Command::Bounds,
        Cmd::ComposeCheck => Command::ComposeCheck,
        Cmd::ReproduceExample => Command::ReproduceExample,
        Cmd::LimitsCheck { .. } => Command::LimitsCheck,
    };
    let mut config = ExperimentConfig::new(command);
    if let Some(path) = &cli.common.config {
        config.apply_file(ConfigFile::load(path)?)?;
    }
    let c = cli.common;
    if let Some(p) = c.p {
        config.p = p;
    }
    if let Some(upto) = c.upto {
        config.upto = upto;
    }
    if let Some(g) = c.grid_size {
        config.grid_size = g;
    }
    if c.input.is_some() {
        config.input_path = c.input;
    }
    if c.output.is_some() {
        config.output_path = c.output;
    }
    for (name, value) in c.tolerances {
        config.set_tolerance(&name, value)?;
    }
    match cli.command {
        Cmd::Diagnose { series, expect } => {
            config.series |= series;
            if expect.is_some() {
                config.expect = expect;
            }
        }
        Cmd::Bounds { p_count: Some(n) } => config.p_count = n,
        Cmd::LimitsCheck { q_max: Some(q) } => config.q_max = q,
        _ => {}
    }
    config.validate()?;
    Ok(config)
}

fn write_file(path: &Path, text: &str) -> Result<(), ExperimentError> {
    std::fs::write(path, text).map_err(|source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(config: &ExperimentConfig, report: &Report) -> Result<(), ExperimentError> {
    match &config.output_path {
        Some(out) => {
            write_file(out, &report.csv)?;
            let mut name = out.as_os_str().to_owned();
            name.push(".summary.json");
            write_file(Path::new(&name), &report.summary_text())?;
        }
        None => {
            print!("{}", report.csv);
            eprint!("{}", report.summary_text());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = build_config(cli).and_then(|config| {
        let report = experiment::run(&config)?;
        emit(&config, &report)?;
        Ok(report.passed)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("fuzzy-euler: check failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("fuzzy-euler: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

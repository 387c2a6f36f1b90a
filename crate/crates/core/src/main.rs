use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gridsolve::claims::{claim_figure_smoke, run_core_claims};
use gridsolve::config::{parse_config, ConditionMode, ExperimentConfig, OutputFormat};
use gridsolve::experiment::run_experiment;
use gridsolve::{assemble_energy, condition_number, densify, Error};

#[derive(Parser)]
#[command(name = "gridsolve", version, about = "Grid energy minimization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more experiment configs (in parallel, one directory each).
    Run {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
        /// Base output directory; each config writes to `<DIR>/<config stem>`.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        /// Output formats, replacing the config's list. Repeatable.
        #[arg(long = "format", value_name = "csv|gnuplot|svg")]
        formats: Vec<OutputFormat>,
    },
    /// Check the acceptance criteria and print a pass/fail table.
    Verify {
        /// Directory holding the shipped figure configs.
        #[arg(long, default_value = "experiments")]
        experiments: PathBuf,
        /// Print the per-claim details.
        #[arg(long, short)]
        verbose: bool,
    },
    /// Print the spectrum summary of a config's normal matrix.
    Condition { config: PathBuf },
}

/// Largest system `condition` will decompose.
const CONDITION_LIMIT: usize = 2500;

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config { .. } => 1,
        Error::Domain(_) | Error::Singular { .. } => 2,
        Error::Io { .. } => 3,
    }
}

fn load(path: &Path) -> Result<ExperimentConfig, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    parse_config(&text)
}

fn output_dir(config_path: &Path, config: &ExperimentConfig, out: Option<&Path>) -> PathBuf {
    let stem = config_path.file_stem().map(PathBuf::from).unwrap_or_else(|| PathBuf::from("experiment"));
    let base = match (out, &config.output_directory) {
        (Some(dir), _) => dir.to_path_buf(),
        (None, Some(dir)) if dir.is_relative() => config_path.parent().unwrap_or(Path::new(".")).join(dir),
        (None, Some(dir)) => dir.clone(),
        (None, None) => PathBuf::from("out"),
    };
    base.join(stem)
}

fn run_one(path: &Path, out: Option<&Path>, formats: &[OutputFormat]) -> Result<String, Error> {
    let mut config = load(path)?;
    if !formats.is_empty() {
        let mut f = formats.to_vec();
        f.sort();
        f.dedup();
        config.outputs = f;
    }
    let dir = output_dir(path, &config, out);
    let outcome = run_experiment(&config, &dir)?;
    let mut line = format!(
        "{}: {} after {} iterations, residual {:.3e} -> {}",
        path.display(),
        serde_json::to_string(&outcome.trace.termination).unwrap_or_default().trim_matches('"'),
        outcome.trace.iterations_run,
        outcome.trace.final_residual(),
        dir.display()
    );
    for w in &outcome.warnings {
        line.push_str(&format!("\n  warning: {w}"));
    }
    Ok(line)
}

fn cmd_run(configs: &[PathBuf], out: Option<&Path>, formats: &[OutputFormat]) -> u8 {
    let results: Vec<Result<String, Error>> = std::thread::scope(|s| {
        let handles: Vec<_> = configs.iter().map(|p| s.spawn(move || run_one(p, out, formats))).collect();
        handles.into_iter().map(|h| h.join().expect("experiment worker panicked")).collect()
    });
    let mut code = 0;
    for (path, result) in configs.iter().zip(results) {
        match result {
            Ok(line) => println!("{line}"),
            Err(e) => {
                eprintln!("{}: {e}", path.display());
                if code == 0 {
                    code = exit_code(&e);
                }
            }
        }
    }
    code
}

fn cmd_verify(experiments: &Path, verbose: bool) -> u8 {
    let mut outcomes = run_core_claims();
    if experiments.is_dir() {
        match tempfile_dir() {
            Ok(scratch) => {
                outcomes.push(claim_figure_smoke(experiments, &scratch));
                let _ = std::fs::remove_dir_all(&scratch);
            }
            Err(e) => {
                eprintln!("{e}");
                return 3;
            }
        }
    } else {
        eprintln!("skipping claim 11: {} is not a directory", experiments.display());
    }
    for o in &outcomes {
        println!("{o}");
        if verbose || !o.passed {
            for d in &o.details {
                println!("      {d}");
            }
        }
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("{} of {} claims passed", outcomes.len() - failed, outcomes.len());
    if failed == 0 {
        0
    } else {
        2
    }
}

fn tempfile_dir() -> Result<PathBuf, Error> {
    let dir = std::env::temp_dir().join(format!("gridsolve-verify-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| Error::Io {
        path: dir.clone(),
        source: e,
    })?;
    Ok(dir)
}

fn cmd_condition(path: &Path) -> Result<(), Error> {
    let config = load(path)?;
    let as_config = |e: Error| match e {
        Error::Domain(message) => Error::Config {
            line: None,
            key: "constraints".into(),
            message,
        },
        other => other,
    };
    let constraints = config.constraint_set().map_err(as_config)?;
    let system = assemble_energy(&config.grid, config.energy, &constraints).map_err(as_config)?;
    let normal = system.normal_equations();
    let order = normal.order();
    if order > CONDITION_LIMIT {
        return Err(Error::Domain(format!(
            "{order} unknowns exceed the dense eigensolver limit of {CONDITION_LIMIT}"
        )));
    }
    if order > ConditionMode::AUTO_LIMIT {
        eprintln!("note: dense eigendecomposition of {order} unknowns is O(N^3) per sweep and may take minutes");
    }
    let s = condition_number(&densify(&normal.matrix)?)?;
    println!("grid              {}", config.grid);
    println!("energy            {}", config.energy);
    println!("unknowns          {}", normal.order());
    println!("lambda_max        {:.6e}", s.lambda_max);
    println!("lambda_min        {:.6e}", s.lambda_min_nonzero);
    println!("condition_number  {:.6e}", s.condition_number);
    println!("near_null_dim     {}", s.near_null_dimension);
    for w in &system.warnings {
        println!("warning           {w}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { configs, out, formats } => cmd_run(&configs, out.as_deref(), &formats),
        Command::Verify { experiments, verbose } => cmd_verify(&experiments, verbose),
        Command::Condition { config } => match cmd_condition(&config) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("{}: {e}", config.display());
                exit_code(&e)
            }
        },
    };
    ExitCode::from(code)
}

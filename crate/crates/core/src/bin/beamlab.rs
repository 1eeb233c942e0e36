use std::path::PathBuf;
use std::process::ExitCode;

use beamlab::scenario::{self, parse_scenario, preset, run_scenario, RunOptions, Scenario, ScenarioError, SolverKind};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "beamlab", version, about = "Beam statics, vibration modes and dynamic response from JSON scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Source {
    /// Scenario file (JSON).
    #[arg(conflicts_with = "preset", required_unless_present = "preset")]
    file: Option<PathBuf>,
    /// Built-in scenario name (see `beamlab presets`).
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario with the solver it names.
    Run {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        out: PathBuf,
        /// Record every S-th time step.
        #[arg(long)]
        stride: Option<usize>,
        /// Worker threads for frequency sweeps.
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Natural frequencies and mode shapes of the scenario's beam.
    Modal {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 3)]
        modes: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a sweep scenario.
    Sweep {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Run a static scenario.
    Static {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        out: PathBuf,
    },
    /// List built-in scenarios, or print one as JSON.
    Presets { name: Option<String> },
}

fn load(source: &Source) -> Result<Scenario, ScenarioError> {
    match (&source.file, &source.preset) {
        (_, Some(name)) => preset(name),
        (Some(path), None) => {
            let text = std::fs::read(path).map_err(|e| ScenarioError::Invalid {
                field: "scenario".into(),
                message: format!("cannot read {}: {e}", path.display()),
            })?;
            parse_scenario(&text)
        }
        (None, None) => unreachable!("clap requires a source"),
    }
}

fn expect_solver(s: &Scenario, kind: SolverKind) -> Result<(), ScenarioError> {
    if s.solver != kind {
        return Err(ScenarioError::Invalid {
            field: "solver".into(),
            message: format!("expected a {} scenario, got {}", kind.name(), s.solver.name()),
        });
    }
    Ok(())
}

fn execute(s: &Scenario, opts: &RunOptions, out: Option<&PathBuf>) -> Result<(), ScenarioError> {
    let result = run_scenario(s, opts)?;
    if let Some(dir) = out {
        let files = scenario::write_csv(&result, dir)?;
        println!("{}: wrote {} to {}", s.name, files.join(", "), dir.display());
    }
    for (k, v) in &result.provenance.summary {
        println!("  {k} = {}", scenario::fmt_f64(*v));
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), ScenarioError> {
    match cli.command {
        Command::Run {
            source,
            out,
            stride,
            threads,
        } => {
            let mut s = load(&source)?;
            if let Some(st) = stride {
                if st == 0 {
                    return Err(ScenarioError::Invalid {
                        field: "--stride".into(),
                        message: "must be >= 1".into(),
                    });
                }
                s.stride = st;
                s.notes.push(format!("output.stride={st} set on the command line"));
            }
            execute(&s, &RunOptions { threads, ..RunOptions::default() }, Some(&out))
        }
        Command::Modal { source, modes, out } => {
            let mut s = load(&source)?;
            s.solver = SolverKind::Modal;
            let result = run_scenario(&s, &RunOptions { modes, ..RunOptions::default() })?;
            println!("mode_index,beta,omega_rad_s,f_hz");
            for (i, m) in result.modes.iter().enumerate() {
                println!(
                    "{},{},{},{}",
                    i + 1,
                    scenario::fmt_f64(m.beta),
                    scenario::fmt_f64(m.omega),
                    scenario::fmt_f64(m.f_hz)
                );
            }
            if let Some(dir) = out {
                scenario::write_csv(&result, &dir)?;
            }
            Ok(())
        }
        Command::Sweep { source, out, threads } => {
            let s = load(&source)?;
            expect_solver(&s, SolverKind::Sweep)?;
            execute(&s, &RunOptions { threads, ..RunOptions::default() }, Some(&out))
        }
        Command::Static { source, out } => {
            let s = load(&source)?;
            expect_solver(&s, SolverKind::Static)?;
            execute(&s, &RunOptions::default(), Some(&out))
        }
        Command::Presets { name } => {
            match name {
                Some(n) => println!("{}", preset(&n)?.to_json()),
                None => {
                    for n in scenario::PRESET_NAMES {
                        let s = preset(n)?;
                        println!("{n:8} {}", s.solver.name());
                    }
                }
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                ScenarioError::Parse { .. } | ScenarioError::Invalid { .. } => 2,
                ScenarioError::Solver { .. } => 3,
                ScenarioError::Io(_) => 1,
            })
        }
    }
}

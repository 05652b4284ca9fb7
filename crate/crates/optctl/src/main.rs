use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use richards_optctl::run::run_many;
use richards_optctl::{
    builtin_scenario, gradient_check, load_scenario, thread_cap, AppError, FieldLayout, GradientCheckOptions,
    Overrides, Scenario, BUILTIN_NAMES,
};

/// Optimal irrigation control for the 1D Richards equation.
#[derive(Parser)]
#[command(name = "richards-optctl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in scenarios.
    List {
        /// Print each scenario as a TOML document.
        #[arg(long)]
        toml: bool,
    },
    /// Parse and validate a scenario document.
    Validate { file: PathBuf },
    /// Optimize one or more scenarios and write CSV/JSON output.
    Run {
        /// Built-in names or scenario files.
        #[arg(required = true)]
        targets: Vec<String>,
        /// Output directory. With several targets, each run writes to a
        /// subdirectory named after its scenario.
        #[arg(long)]
        out: PathBuf,
        /// One row per depth and one column per time level.
        #[arg(long)]
        wide: bool,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Compare the adjoint gradient with central finite differences.
    GradientCheck {
        target: String,
        #[arg(long, default_value_t = 5)]
        directions: usize,
        #[arg(long, default_value_t = 1e-5)]
        step: f64,
        /// Uniform control value to check at.
        #[arg(long, default_value_t = 0.01)]
        at: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Relative error above which the check fails.
        #[arg(long, default_value_t = 1e-2)]
        threshold: f64,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
}

#[derive(Args)]
struct OverrideArgs {
    #[arg(long)]
    maxit: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    nz: Option<usize>,
    #[arg(long)]
    nt: Option<usize>,
}

impl OverrideArgs {
    fn load(&self, target: &str) -> Result<Scenario, AppError> {
        let o = Overrides {
            maxit: self.maxit,
            tol: self.tol,
            epsilon: self.eps,
            lambda: self.lambda,
            nz: self.nz,
            nt: self.nt,
        };
        let scenario = load_scenario(target)?;
        if o.is_empty() {
            Ok(scenario)
        } else {
            o.apply(&scenario)
        }
    }
}

fn execute(command: Command) -> Result<bool, AppError> {
    match command {
        Command::List { toml } => {
            for name in BUILTIN_NAMES {
                let s = builtin_scenario(name)?;
                if toml {
                    println!("# {name}\n{}", s.to_toml());
                } else {
                    println!("{name:<14} Z = {} cm, T = {} h, {}x{} grid", s.grid.depth, s.grid.horizon, s.grid.nz, s.grid.nt);
                }
            }
            Ok(true)
        }
        Command::Validate { file } => {
            let s = load_scenario(&file.to_string_lossy())?;
            println!("{}: ok ({}x{} grid)", s.name, s.grid.nz, s.grid.nt);
            Ok(true)
        }
        Command::Run { targets, out, wide, overrides } => {
            let mut jobs = Vec::new();
            for t in &targets {
                let s = overrides.load(t)?;
                let dir = if targets.len() == 1 { out.clone() } else { out.join(&s.name) };
                jobs.push((s, dir));
            }
            let layout = if wide { FieldLayout::Wide } else { FieldLayout::Long };
            let mut first_error = None;
            for ((s, dir), result) in jobs.iter().zip(run_many(&jobs, layout, thread_cap())) {
                match result {
                    Ok(b) => {
                        let r = &b.report;
                        println!(
                            "{}: {} after {} iterations, J {:.8e} -> {:.8e}, {:.1} s, output in {}",
                            s.name,
                            r.exit_reason,
                            r.iterations,
                            r.cost_history[0],
                            r.cost_history[r.cost_history.len() - 1],
                            r.wall_time_seconds,
                            dir.display()
                        );
                    }
                    Err(e) => {
                        eprintln!("{}: {e}", s.name);
                        first_error.get_or_insert(e);
                    }
                }
            }
            match first_error {
                Some(e) => Err(e),
                None => Ok(true),
            }
        }
        Command::GradientCheck { target, directions, step, at, seed, threshold, overrides } => {
            let s = overrides.load(&target)?;
            let opts = GradientCheckOptions { directions, step, base: at, seed, threads: thread_cap() };
            let check = gradient_check(&s, &opts)?;
            println!("direction  adjoint                  finite-difference        relative error");
            for k in 0..check.adjoint.len() {
                println!(
                    "{k:>9}  {:>23.16e}  {:>23.16e}  {:.3e}",
                    check.adjoint[k], check.finite_difference[k], check.relative_errors[k]
                );
            }
            let worst = check.max_relative_error();
            let ok = worst <= threshold;
            println!("max relative error {worst:.3e} ({})", if ok { "ok" } else { "above threshold" });
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

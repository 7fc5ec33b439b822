use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qslcorr_cli::{
    emit_sweep_csv, emit_trajectory_csv, parse_raw, run_single, run_sweep, selftest, CliError,
    RawConfig, ScenarioConfig,
};

#[derive(Parser)]
#[command(name = "qslcorr", version, about = "Correlation-based quantum speed limits for two-qubit channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve one scenario and write the per-node trajectory CSV.
    Run {
        #[command(flatten)]
        scenario: ScenarioFlags,
    },
    /// Sweep one parameter and write one CSV row per value.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioFlags,
        /// Parameter to sweep: kappa, lambda, Lambda, Lambda12, M12, omega or tau.
        #[arg(long)]
        param: Option<String>,
        #[arg(long, allow_negative_numbers = true)]
        from: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        to: Option<f64>,
        #[arg(long)]
        count: Option<i64>,
        /// Worker threads for sweep points.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Run the built-in acceptance checks.
    Selftest,
}

#[derive(Args)]
struct ScenarioFlags {
    /// Flat TOML config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    initial: Option<String>,
    #[arg(long)]
    measure: Option<String>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long = "lambda-ratio")]
    lambda_ratio: Option<f64>,
    #[arg(long = "Lambda")]
    emission: Option<f64>,
    #[arg(long = "Lambda12", allow_negative_numbers = true)]
    collective_damping: Option<f64>,
    #[arg(long = "M12", allow_negative_numbers = true)]
    dipole_coupling: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    steps: Option<i64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ScenarioFlags {
    fn raw(&self) -> Result<RawConfig, CliError> {
        let file = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| CliError::Io {
                    path: path.display().to_string(),
                    message: e.to_string(),
                })?;
                parse_raw(&text)?
            }
            None => RawConfig::default(),
        };
        let flags = RawConfig {
            model: self.model.clone(),
            initial: self.initial.clone(),
            measure: self.measure.clone(),
            kappa: self.kappa,
            lambda: self.lambda,
            lambda_ratio: self.lambda_ratio,
            emission: self.emission,
            collective_damping: self.collective_damping,
            dipole_coupling: self.dipole_coupling,
            omega: self.omega,
            tau: self.tau,
            steps: self.steps,
            ..Default::default()
        };
        Ok(file.overlay(&flags))
    }
}

fn write_output(out: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }),
        None => match std::io::stdout().write_all(text.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                Err(CliError::Io { path: "<stdout>".into(), message: e.to_string() })
            }
            _ => Ok(()),
        },
    }
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run { scenario } => {
            let config = ScenarioConfig::from_raw(&scenario.raw()?)?;
            let run = run_single(&config)?;
            eprintln!(
                "qslcorr: {} nodes, tau_QC = {:.6}, max clamp {:.1e}, separable-state grid overrides {}",
                run.nodes.len(),
                run.final_result().tau_unified,
                run.trajectory.max_clamp,
                run.sigma_overrides()
            );
            write_output(scenario.out.as_ref(), &emit_trajectory_csv(&run))
        }
        Command::Sweep { scenario, param, from, to, count, jobs } => {
            let stanza = RawConfig {
                sweep_param: param,
                sweep_from: from,
                sweep_to: to,
                sweep_count: count,
                ..Default::default()
            };
            let config = ScenarioConfig::from_raw(&scenario.raw()?.overlay(&stanza))?;
            let sweep = config
                .sweep
                .ok_or_else(|| CliError::Validation("no sweep given: set --param/--from/--to/--count or a sweep stanza".into()))?;
            let rows = run_sweep(&config, &sweep, jobs.max(1))?;
            write_output(scenario.out.as_ref(), &emit_sweep_csv(&rows))
        }
        Command::Selftest => {
            let (lines, checks) = selftest();
            for line in lines {
                println!("{line}");
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            if failed > 0 {
                return Err(CliError::SelftestFailed { failed, total: checks.len() });
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("error[UsageError]: {}", first.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.render());
            ExitCode::FAILURE
        }
    }
}

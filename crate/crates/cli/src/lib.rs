//! Configuration, CSV output and drivers behind the `qslcorr` binary.

pub mod config;
pub mod csv;
pub mod error;

use qslcorr::golden::{self, Check};
use qslcorr::qsl::{run_scenario, run_scenarios, ScenarioRun};

pub use config::{parse_config, parse_raw, RawConfig, ScenarioConfig, Sweep, SweepParam};
pub use csv::{emit_sweep_csv, emit_trajectory_csv, SweepRow};
pub use error::CliError;

pub fn run_single(config: &ScenarioConfig) -> Result<ScenarioRun, CliError> {
    Ok(run_scenario(&config.scenario()?)?)
}

/// Evaluates every sweep point on `jobs` threads; rows keep sweep order.
pub fn run_sweep(config: &ScenarioConfig, sweep: &Sweep, jobs: usize) -> Result<Vec<SweepRow>, CliError> {
    let values = sweep.values();
    let scenarios = values
        .iter()
        .map(|&v| config.with_value(sweep.param, v).scenario())
        .collect::<Result<Vec<_>, _>>()?;
    values
        .into_iter()
        .zip(run_scenarios(&scenarios, jobs))
        .map(|(value, run)| Ok(SweepRow { value, result: *run?.final_result() }))
        .collect()
}

/// Runs the acceptance checks; the lines are `PASS name: detail` or `FAIL …`.
pub fn selftest() -> (Vec<String>, Vec<Check>) {
    let checks = golden::all_checks();
    let lines = checks
        .iter()
        .map(|c| format!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail))
        .collect();
    (lines, checks)
}

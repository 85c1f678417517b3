//! Configuration, reports and exports for the `seamless` command.

pub mod config;
pub mod error;
pub mod export;
pub mod report;

pub use config::{parse_config, serialize_scenario};
pub use error::{CliError, CliResult};

use seamless_core::engine::{run_scenario_with_threads, sweep, with_threads, OperatingCharacteristics, Scenario, SweepPoint};
use seamless_core::simmodel::DesignKind;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

/// Run a scenario document of the expected design and format the result.
pub fn run_document(text: &str, design: DesignKind, format: Format, threads: usize) -> CliResult<String> {
    let scenario = parse_config(text)?;
    if scenario.design() != design {
        let want = match design {
            DesignKind::TreatmentSelection => "treatsel",
            DesignKind::SubgroupSelection => "subpop",
        };
        return Err(CliError::config("design", format!("this command runs {want} scenarios")));
    }
    let oc = run_scenario_with_threads(&scenario, threads).map_err(|e| CliError::from_core("scenario", e))?;
    format_run(&oc, &scenario, format)
}

pub fn format_run(oc: &OperatingCharacteristics, scenario: &Scenario, format: Format) -> CliResult<String> {
    match format {
        Format::Table => report::render_report(oc, scenario),
        Format::Csv => export::to_csv(oc),
        Format::Json => export::to_json(oc),
    }
}

/// Run the `[sweep]` section of a scenario document.
pub fn sweep_document(text: &str, format: Format, threads: usize) -> CliResult<String> {
    let doc = config::parse_document(text)?;
    let scenario = config::scenario_from_config(&doc)?;
    let request = config::sweep_from_config(&doc)?.ok_or_else(|| CliError::config("sweep", "missing required section"))?;
    let points: Vec<SweepPoint> = with_threads(threads, || sweep(&scenario, &request.axis, &request.values))
        .map_err(|e| CliError::from_core("scenario", e))?
        .map_err(|e| CliError::from_core("sweep", e))?;
    match format {
        Format::Table => Ok(report::render_sweep(&points)),
        Format::Csv => export::sweep_to_csv(&points),
        Format::Json => export::sweep_to_json(&points),
    }
}

//! Experiment harness for `su2poly`: configuration, the experiments behind
//! each subcommand, CSV/JSON output and SVG charts.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod plot;

use std::path::{Path, PathBuf};

pub use config::ExperimentConfig;
pub use error::{LabError, Result};
pub use experiments::Report;

/// The experiments that read a config and write tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    Universality,
    Lacunary,
    Fejer,
    Thm5,
    Roundtrip,
    Plancherel,
    Counterexample,
    Local,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Universality => "universality",
            Experiment::Lacunary => "lacunary",
            Experiment::Fejer => "fejer",
            Experiment::Thm5 => "thm5",
            Experiment::Roundtrip => "roundtrip",
            Experiment::Plancherel => "plancherel",
            Experiment::Counterexample => "counterexample",
            Experiment::Local => "local",
        }
    }

    pub fn run(self, cfg: &ExperimentConfig) -> Result<Report> {
        use experiments::*;
        let name = cfg.output.clone().unwrap_or_else(|| self.name().to_string());
        Ok(match self {
            Experiment::Universality => universality::run(cfg)?.report(&name),
            Experiment::Lacunary => lacunary::run(cfg)?.report(&name),
            Experiment::Fejer => fejer::run(cfg)?.report(&name),
            Experiment::Thm5 => thm5::run(cfg)?.report(&name),
            Experiment::Roundtrip => roundtrip::report(&roundtrip::run(cfg)?, &name),
            Experiment::Plancherel => plancherel::report(&plancherel::run(cfg)?, &name),
            Experiment::Counterexample => counterexample::report(&counterexample::run(cfg)?, &name),
            Experiment::Local => local::report(&local::run(cfg)?, &name),
        })
    }
}

/// Writes every table and JSON document of `report` into `dir`.
pub fn write_report(report: &Report, dir: &Path, config_hash: &str) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    let mut paths = Vec::new();
    for t in &report.tables {
        paths.push(t.write(dir, config_hash)?);
    }
    for (name, value) in &report.json {
        paths.push(output::write_json(dir, name, value)?);
    }
    Ok(paths)
}

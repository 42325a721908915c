//! The Plancherel-type inequality for all pairs `l < m` on random systems.

use rayon::prelude::*;
use su2poly::szego::{ladder_from_coeffs, plancherel_check};
use su2poly::ClassTag;

use super::{num, Report};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::output::Table;

pub const DEFAULT_TRIALS: usize = 10;
pub const DEFAULT_N: usize = 16;
pub const DEFAULT_RADIUS: f64 = 1.0;
pub const DEFAULT_NODES: usize = 1024;
pub const SLACK_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Row {
    pub trial: usize,
    pub l: usize,
    pub m: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub nodes: usize,
    pub clamped: usize,
}

impl Row {
    /// `rhs - lhs`; negative values violate the inequality.
    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }
}

pub fn run(cfg: &ExperimentConfig) -> Result<Vec<Row>> {
    let trials = cfg.trials.unwrap_or(DEFAULT_TRIALS);
    let nodes = cfg.nodes_or(DEFAULT_NODES)?;
    let systems = (0..trials)
        .map(|t| Ok(ladder_from_coeffs(&cfg.trial_coeffs(t, DEFAULT_N, DEFAULT_RADIUS)?, ClassTag::TMinus)?))
        .collect::<Result<Vec<_>>>()?;
    let tasks: Vec<(usize, usize, usize)> = systems
        .iter()
        .enumerate()
        .flat_map(|(t, sys)| {
            let n = sys.degree();
            (0..=n).flat_map(move |m| (0..m).map(move |l| (t, l, m)))
        })
        .collect();
    let rows = tasks
        .par_iter()
        .map(|&(t, l, m)| {
            let rep = plancherel_check(&systems[t], l, m, nodes)?;
            Ok(Row { trial: t, l, m, lhs: rep.lhs, rhs: rep.rhs, nodes: rep.nodes, clamped: rep.clamped })
        })
        .collect::<std::result::Result<Vec<_>, su2poly::Error>>()?;
    Ok(rows)
}

pub fn report(rows: &[Row], name: &str) -> Report {
    let mut table = Table::new(name, &["trial", "l", "m", "lhs", "rhs", "slack", "nodes", "clamped"]);
    let mut violations = Vec::new();
    for r in rows {
        table.push([
            r.trial.to_string(),
            r.l.to_string(),
            r.m.to_string(),
            num(r.lhs),
            num(r.rhs),
            num(r.slack()),
            r.nodes.to_string(),
            r.clamped.to_string(),
        ]);
        if !(r.lhs <= r.rhs + SLACK_TOL) {
            violations.push(format!("trial {}, l = {}, m = {}: lhs {} > rhs {}", r.trial, r.l, r.m, r.lhs, r.rhs));
        }
    }
    let min_slack = rows.iter().map(Row::slack).fold(f64::INFINITY, f64::min);
    let summary = vec![format!("{} pairs checked, smallest slack {:.3e}", rows.len(), min_slack)];
    Report { tables: vec![table], summary, violations, ..Default::default() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inequality_holds_on_small_systems() {
        let cfg = ExperimentConfig::from_json(r#"{"seed": 11, "trials": 2, "coeffs": {"source": "random", "n": 6, "radius": 1.0}}"#, "t").unwrap();
        let rows = run(&cfg).unwrap();
        assert_eq!(rows.len(), 2 * 21);
        assert!(report(&rows, "p").violations.is_empty());
    }

    #[test]
    fn zero_coefficients_are_tight() {
        let cfg = ExperimentConfig::from_json(r#"{"coeffs": {"source": "explicit", "values": [0, 0, 0]}, "trials": 1}"#, "t").unwrap();
        for r in run(&cfg).unwrap() {
            assert!(r.lhs.abs() < 1e-12 && r.rhs.abs() < 1e-12, "{r:?}");
        }
    }
}

//! Inverse maps applied to forward maps on random coefficient sequences.

use rayon::prelude::*;
use su2poly::nlfs::{forward, from_polys, layer_strip, to_polys};
use su2poly::szego::{extract_coeffs, ladder_from_coeffs};
use su2poly::{ClassTag, C64};

use super::{num, Report};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::output::Table;

pub const DEFAULT_TRIALS: usize = 10;
pub const DEFAULT_N: usize = 64;
pub const DEFAULT_RADIUS: f64 = 1.0;
pub const STRIP_TOL: f64 = 1e-9;
pub const EXTRACT_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub trial: usize,
    pub n: usize,
    /// `max_k |F_k - layer_strip(forward(F))_k|`, infinite if stripping failed.
    pub strip_err: f64,
    pub strip_status: String,
    /// `max_k |F_k - extract_coeffs(ladder(F))_k|`
    pub extract_err: f64,
    /// Largest coefficient difference of `from_polys(to_polys(pair))`.
    pub polys_err: f64,
    pub su2: f64,
}

fn max_diff(x: &[C64], y: &[C64]) -> f64 {
    if x.len() != y.len() {
        return f64::INFINITY;
    }
    x.iter().zip(y).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
}

pub fn trial(index: usize, f: &[C64]) -> Result<Row> {
    let pair = forward(f);
    let (strip_err, strip_status) = match layer_strip(&pair) {
        Ok(g) => (max_diff(f, &g), "ok".to_string()),
        Err(e) => (f64::INFINITY, e.to_string()),
    };
    let sys = ladder_from_coeffs(f, ClassTag::TMinus)?;
    let extract_err = max_diff(f, &extract_coeffs(&sys.monic, &sys.monic_tilde)?.f);
    let (phi, phi_tilde) = to_polys(&pair)?;
    let back = from_polys(&phi, &phi_tilde, pair.n)?;
    let polys_err = (&back.a - &pair.a).max_abs_coeff().max((&back.b - &pair.b).max_abs_coeff());
    Ok(Row { trial: index, n: f.len(), strip_err, strip_status, extract_err, polys_err, su2: pair.su2_residual() })
}

pub fn run(cfg: &ExperimentConfig) -> Result<Vec<Row>> {
    let trials = cfg.trials.unwrap_or(DEFAULT_TRIALS);
    let draws = (0..trials)
        .map(|t| cfg.trial_coeffs(t, DEFAULT_N, DEFAULT_RADIUS))
        .collect::<Result<Vec<_>>>()?;
    draws.par_iter().enumerate().map(|(t, f)| trial(t, f)).collect()
}

pub fn report(rows: &[Row], name: &str) -> Report {
    let mut table = Table::new(name, &["trial", "n", "strip_err", "strip_status", "extract_err", "polys_err", "su2"]);
    let mut violations = Vec::new();
    for r in rows {
        table.push([
            r.trial.to_string(),
            r.n.to_string(),
            num(r.strip_err),
            r.strip_status.clone(),
            num(r.extract_err),
            num(r.polys_err),
            num(r.su2),
        ]);
        if !(r.strip_err <= STRIP_TOL) {
            violations.push(format!("trial {}: layer stripping error {:e} ({})", r.trial, r.strip_err, r.strip_status));
        }
        if !(r.extract_err <= EXTRACT_TOL) {
            violations.push(format!("trial {}: extraction error {:e}", r.trial, r.extract_err));
        }
    }
    let worst = |pick: fn(&Row) -> f64| rows.iter().map(pick).fold(0.0, f64::max);
    let summary = vec![
        format!("{} trials", rows.len()),
        format!("max layer stripping error {:.3e}", worst(|r| r.strip_err)),
        format!("max extraction error {:.3e}", worst(|r| r.extract_err)),
        format!("max polynomial roundtrip error {:.3e}", worst(|r| r.polys_err)),
        format!("max SU(2) residual {:.3e}", worst(|r| r.su2)),
    ];
    Report { tables: vec![table], summary, violations, ..Default::default() }
}

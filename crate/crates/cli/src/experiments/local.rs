//! Local parameters, their product and difference relations, and the zero
//! distance at each `(s, n)`.

use rayon::prelude::*;
use su2poly::localparams::LocalRow;
use su2poly::C64;

use super::{num, system_for, Report};
use crate::config::{DegreeSchedule, ExperimentConfig, PointSource};
use crate::error::Result;
use crate::output::Table;

pub const DEFAULT_DEGREES: [usize; 6] = [4, 8, 16, 32, 64, 128];
pub const SUM_OF_SQUARES_TOL: f64 = 1e-10;

pub fn run(cfg: &ExperimentConfig) -> Result<Vec<LocalRow>> {
    let degrees = cfg.degrees_or(DegreeSchedule::List { values: DEFAULT_DEGREES.to_vec() })?;
    let points = cfg.points_or(PointSource::Random { count: 16 })?;
    let m = cfg.nodes_or(4096)?;
    let nmax = degrees.iter().map(|d| d.n).max().unwrap_or(0);
    let (sys, mu) = system_for(cfg, nmax, m)?;
    let tasks: Vec<(C64, usize)> = points.iter().flat_map(|&s| degrees.iter().map(move |d| (s, d.n))).collect();
    let rows = tasks
        .par_iter()
        .map(|&(s, n)| LocalRow::compute(&sys, &mu, s, n))
        .collect::<std::result::Result<Vec<_>, su2poly::Error>>()?;
    Ok(rows)
}

/// `|A|^2 + |B|^2 + |A~|^2 + |B~|^2`, which is 2 for every `(s, n)`.
pub fn sum_of_squares(r: &LocalRow) -> f64 {
    r.abs_a.powi(2) + r.abs_b.powi(2) + r.abs_a_tilde.powi(2) + r.abs_b_tilde.powi(2)
}

pub fn report(rows: &[LocalRow], name: &str) -> Report {
    let mut table = Table::new(
        name,
        &["s_re", "s_im", "n", "abs_a", "abs_b", "abs_a_tilde", "abs_b_tilde", "sum_sq", "prod", "diff", "zero_distance"],
    );
    let mut violations = Vec::new();
    for r in rows {
        let sq = sum_of_squares(r);
        table.push([
            num(r.s_re),
            num(r.s_im),
            r.n.to_string(),
            num(r.abs_a),
            num(r.abs_b),
            num(r.abs_a_tilde),
            num(r.abs_b_tilde),
            num(sq),
            num(r.prod),
            num(r.diff),
            num(r.zero_distance),
        ]);
        if !((sq - 2.0).abs() <= SUM_OF_SQUARES_TOL) {
            violations.push(format!("sum of squares {sq} at s = ({}, {}), n = {}", r.s_re, r.s_im, r.n));
        }
    }
    let worst = rows.iter().map(|r| (sum_of_squares(r) - 2.0).abs()).fold(0.0, f64::max);
    let summary = vec![format!("{} rows, largest sum-of-squares deviation {:.3e}", rows.len(), worst)];
    Report { tables: vec![table], summary, violations, ..Default::default() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mu_r_rows_satisfy_identity() {
        let cfg = ExperimentConfig::from_json(
            r#"{"measure": {"kind": "mu_r", "r": 0.5}, "degrees": {"schedule": "list", "values": [4, 16]}, "points": {"source": "list", "values": [0.3, [0, 1]]}}"#,
            "t",
        )
        .unwrap();
        let rows = run(&cfg).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(report(&rows, "l").violations.is_empty());
        for r in &rows {
            assert!(r.abs_b <= 4.0 * 0.5 / r.n as f64 + 1e-12);
        }
    }
}

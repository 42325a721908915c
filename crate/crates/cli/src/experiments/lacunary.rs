//! Convergence of `(star(phi_n) phiTilde_n)^2 (s)` to `conj(w(s)^{-2})` along a
//! lacunary degree schedule.

use rayon::prelude::*;
use su2poly::nlfs::{forward, w_at, B_THRESHOLD, SUP_CHECK_NODES};
use su2poly::szego::circle_values;
use su2poly::C64;

use super::{num, quantile, sorted, Report};
use crate::config::{random_disk, CoeffSource, Degree, DegreeSchedule, ExperimentConfig, PointSource, COEFF_STREAM};
use crate::error::{LabError, Result};
use crate::output::Table;

pub const DEFAULT_N: usize = 256;
pub const DEFAULT_RADIUS: f64 = 0.02;
/// Random draws tried before giving up on `sup |b| < 2^{-1/2}`.
pub const MAX_DRAWS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Row {
    pub s: C64,
    pub k: usize,
    pub n: usize,
    pub error: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quantiles {
    pub k: usize,
    pub n: usize,
    pub q10: f64,
    pub median: f64,
    pub q90: f64,
    pub max: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lacunary {
    pub coeffs: Vec<C64>,
    pub sup_b: f64,
    pub lacunarity: f64,
    pub draws: usize,
    pub rows: Vec<Row>,
    pub summary: Vec<Quantiles>,
}

fn default_schedule() -> DegreeSchedule {
    DegreeSchedule::Lacunary { base: 1.5, count: 19, start: 4 }
}

/// Coefficients with grid `sup |b|` below the threshold. Random sources are
/// redrawn from the same stream until one qualifies.
fn admissible(cfg: &ExperimentConfig) -> Result<(Vec<C64>, f64, usize)> {
    let sup = |f: &[C64]| forward(f).sup_b(SUP_CHECK_NODES.max(8 * (f.len() + 1)).next_power_of_two());
    let (n, radius) = match &cfg.coeffs {
        Some(CoeffSource::Random { n, radius }) => (*n, *radius),
        None => (DEFAULT_N, DEFAULT_RADIUS),
        Some(CoeffSource::FromB { .. }) => {
            return Err(LabError::Config("the lacunary experiment needs explicit or random coefficients".into()))
        }
        Some(CoeffSource::Explicit { .. }) => {
            let f = cfg.coeffs_direct()?.unwrap_or_default();
            let s = sup(&f);
            if s >= B_THRESHOLD {
                return Err(su2poly::Error::HypothesisViolated { sup: s }.into());
            }
            return Ok((f, s, 1));
        }
    };
    let mut rng = cfg.rng(COEFF_STREAM, "the coefficient sequence")?;
    let mut last = 0.0;
    for draw in 1..=MAX_DRAWS {
        let f = random_disk(&mut rng, n, radius);
        last = sup(&f);
        if last < B_THRESHOLD {
            return Ok((f, last, draw));
        }
    }
    Err(LabError::Violation(format!(
        "no draw out of {MAX_DRAWS} had sup |b| < 2^(-1/2) (last {last}); lower the radius"
    )))
}

pub fn run(cfg: &ExperimentConfig) -> Result<Lacunary> {
    let schedule = cfg.degrees.clone().unwrap_or_else(default_schedule);
    let lacunarity = schedule.lacunarity()?;
    let degrees: Vec<Degree> = schedule.degrees()?;
    let points = cfg.points_or(PointSource::Random { count: 64 })?;
    let (coeffs, sup_b, draws) = admissible(cfg)?;
    let pair = forward(&coeffs);
    let big_n = coeffs.len();
    let top = degrees.iter().map(|d| d.n).max().unwrap_or(0).min(big_n);

    let rows: Vec<Row> = points
        .par_iter()
        .flat_map_iter(|&s| {
            let vals = circle_values(&coeffs, s, top);
            let target = (1.0 / w_at(&pair.a, &pair.b, s)).conj().powi(2);
            // star(phi_n) phiTilde_n is constant in n once n passes the last coefficient
            degrees.iter().map(move |d| {
                let (p, q) = vals[d.n.min(top)];
                let v = p.conj() * q;
                Row { s, k: d.k, n: d.n, error: (v * v - target).norm() }
            })
        })
        .collect();

    let summary = degrees
        .iter()
        .map(|d| {
            let errs = sorted(rows.iter().filter(|r| r.k == d.k).map(|r| r.error).collect());
            Quantiles {
                k: d.k,
                n: d.n,
                q10: quantile(&errs, 0.1),
                median: quantile(&errs, 0.5),
                q90: quantile(&errs, 0.9),
                max: errs.last().copied().unwrap_or(f64::NAN),
            }
        })
        .collect();
    Ok(Lacunary { coeffs, sup_b, lacunarity, draws, rows, summary })
}

impl Lacunary {
    pub fn median_at(&self, k: usize) -> Option<f64> {
        self.summary.iter().find(|q| q.k == k).map(|q| q.median)
    }

    pub fn report(&self, name: &str) -> Report {
        let mut rows = Table::new(name, &["s_re", "s_im", "k", "n", "error"]);
        for r in &self.rows {
            rows.push([num(r.s.re), num(r.s.im), r.k.to_string(), r.n.to_string(), num(r.error)]);
        }
        let mut summary = Table::new(format!("{name}_summary"), &["k", "n", "q10", "median", "q90", "max"]);
        for q in &self.summary {
            summary.push([q.k.to_string(), q.n.to_string(), num(q.q10), num(q.median), num(q.q90), num(q.max)]);
        }
        let mut lines = vec![format!(
            "N = {}, sup |b| = {:.4}, lacunarity {:.4}, draws {}",
            self.coeffs.len(),
            self.sup_b,
            self.lacunarity,
            self.draws
        )];
        lines.extend(self.summary.iter().map(|q| format!("k = {:>2}, n = {:>5}: median error {:.3e}", q.k, q.n, q.median)));
        Report { tables: vec![rows, summary], summary: lines, ..Default::default() }
    }
}

//! Universality sweep: the gap `|conj(w(s)) K_n(z, lambda) - D_n(z, lambda)| / (n + 1)`
//! against the bound `e^{30C} L(mu, s, n)`.

use rayon::prelude::*;
use su2poly::kernels::universality_gap;
use su2poly::{UniversalityRecord, C64};

use super::{num, quantile, require, sorted, system_for, Report};
use crate::config::{DegreeSchedule, ExperimentConfig, PointSource};
use crate::error::Result;
use crate::output::Table;

pub const DEFAULT_DEGREES: [usize; 7] = [8, 16, 32, 64, 128, 256, 512];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Row {
    pub record: UniversalityRecord,
    pub offset: [f64; 2],
}

#[derive(Clone, Debug, PartialEq)]
pub struct Universality {
    pub rows: Vec<Row>,
}

pub fn run(cfg: &ExperimentConfig) -> Result<Universality> {
    let c = cfg.c.unwrap_or(2.0);
    require(c >= 2.0, || format!("C must be at least 2, got {c}"))?;
    let degrees = cfg.degrees_or(DegreeSchedule::List { values: DEFAULT_DEGREES.to_vec() })?;
    for d in &degrees {
        require(d.n as f64 >= 2.0 * c, || format!("degree {} is below 2C = {}", d.n, 2.0 * c))?;
    }
    let offsets = cfg.offsets.clone().unwrap_or_else(|| vec![[0.0, 0.0]]);
    for o in &offsets {
        require(o[0].abs() <= 1.0 && o[1].abs() <= 1.0, || format!("offsets must lie in [-1, 1], got {o:?}"))?;
    }
    let points = cfg.points_or(PointSource::Random { count: 64 })?;
    let m = cfg.nodes_or(4096)?;
    let nmax = degrees.iter().map(|d| d.n).max().unwrap_or(0);
    let (sys, mu) = system_for(cfg, nmax, m)?;

    let mut tasks: Vec<(C64, usize, [f64; 2])> = Vec::new();
    for &s in &points {
        for d in &degrees {
            tasks.extend(offsets.iter().map(|&o| (s, d.n, o)));
        }
    }
    let rows = tasks
        .par_iter()
        .map(|&(s, n, o)| {
            let step = c / n as f64;
            let z = s * C64::from_polar(1.0, o[0] * step);
            let lambda = s * C64::from_polar(1.0, o[1] * step);
            let record = universality_gap(&sys, &mu, s, n, c, z, lambda, m)?;
            Ok(Row { record, offset: o })
        })
        .collect::<std::result::Result<Vec<_>, su2poly::Error>>()?;
    Ok(Universality { rows })
}

impl Universality {
    /// Median of `gap` and `L` at each degree, in schedule order.
    pub fn medians(&self) -> Vec<(usize, f64, f64)> {
        let mut ns: Vec<usize> = Vec::new();
        for r in &self.rows {
            if !ns.contains(&r.record.n) {
                ns.push(r.record.n);
            }
        }
        ns.into_iter()
            .map(|n| {
                let at: Vec<&Row> = self.rows.iter().filter(|r| r.record.n == n).collect();
                let gaps = sorted(at.iter().map(|r| r.record.gap).collect());
                let ls = sorted(at.iter().map(|r| r.record.l_value).collect());
                (n, quantile(&gaps, 0.5), quantile(&ls, 0.5))
            })
            .collect()
    }

    pub fn report(&self, name: &str) -> Report {
        let mut header: Vec<&str> = UniversalityRecord::CSV_HEADER.to_vec();
        header.extend(["z_offset", "lambda_offset"]);
        let mut table = Table::new(name, &header);
        let mut violations = Vec::new();
        for r in &self.rows {
            let mut cells = r.record.csv_row().to_vec();
            cells.push(num(r.offset[0]));
            cells.push(num(r.offset[1]));
            table.push(cells);
            if !r.record.within_bound() {
                violations.push(format!(
                    "gap {} exceeds bound {} at s = {}, n = {}",
                    r.record.gap, r.record.bound, r.record.s, r.record.n
                ));
            }
        }
        let summary = self
            .medians()
            .into_iter()
            .map(|(n, g, l)| format!("n = {n:>5}: median gap {g:.3e}, median L {l:.3e}"))
            .collect();
        Report { tables: vec![table], summary, violations, ..Default::default() }
    }
}

//! The family `mu_r` with `F = (r, 0, 0, ...)`: recurrence against closed
//! forms, and the density growth as `r -> 1`.

use rayon::prelude::*;
use su2poly::cmeasure::mu_r_density;
use su2poly::grid;
use su2poly::szego::{circle_values, ladder_from_coeffs, verify_system};
use su2poly::{CircleMeasure, ClassTag, LaurentPoly, C64};

use super::{num, require, thm5, Report};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::output::Table;

pub const DEFAULT_R: [f64; 5] = [0.25, 0.5, 0.9, 0.99, 0.999];
pub const DEFAULT_MAX_DEGREE: usize = 64;
pub const PRODUCT_GRID: usize = 256;
pub const DEFAULT_NODES: usize = 65536;
pub const ORTHO_DEGREE: usize = 20;
pub const ORTHO_NODES: usize = 4096;
pub const PIPELINE_STEPS: usize = 8;
pub const PIPELINE_BANDWIDTH: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub r: f64,
    /// `max_n` coefficient error of the recurrence ladders against the closed forms.
    pub ladder_err: f64,
    /// `max_n max_grid |star(phi_n) phiTilde_n - (1 - r^2 + 2ri Im s)/(1 + r^2)|`
    pub product_err: f64,
    /// `max_n max_grid |star(phi_n) phiTilde_n - conj(1/w_r)|`
    pub density_err: f64,
    pub orthonormality: f64,
    pub w_max_closed: f64,
    pub sup_b: f64,
    pub pipeline: std::result::Result<PipelineRow, String>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PipelineRow {
    /// Largest modulus of the density produced by the pipeline on its grid.
    pub w_max: f64,
    pub f1_err: f64,
    pub su2_residual: f64,
}

/// `(1 + r^2)^{-1/2} (z^n + s r z^{n-1})` with `s = +1` for `phi` and `-1`
/// for `phiTilde`; `1` at `n = 0`.
pub fn closed_form(r: f64, n: usize, sign: f64) -> LaurentPoly {
    if n == 0 {
        return LaurentPoly::one();
    }
    let c = 1.0 / (1.0 + r * r).sqrt();
    let mut coeffs = vec![C64::new(0.0, 0.0); n + 1];
    coeffs[n] = C64::new(c, 0.0);
    coeffs[n - 1] = C64::new(sign * r * c, 0.0);
    LaurentPoly::from_coeffs(coeffs)
}

pub fn row(r: f64, nmax: usize, nodes: usize) -> Result<Row> {
    let f = {
        let mut f = vec![C64::new(0.0, 0.0); nmax];
        if nmax > 0 {
            f[0] = C64::new(r, 0.0);
        }
        f
    };
    let sys = ladder_from_coeffs(&f, ClassTag::TMinus)?;
    let mut ladder_err: f64 = 0.0;
    for n in 0..=nmax {
        ladder_err = ladder_err
            .max((&sys.phi[n] - &closed_form(r, n, 1.0)).max_abs_coeff())
            .max((&sys.phi_tilde[n] - &closed_form(r, n, -1.0)).max_abs_coeff());
    }
    let (mut product_err, mut density_err) = (0.0f64, 0.0f64);
    for s in grid::nodes(PRODUCT_GRID) {
        let closed = C64::new(1.0 - r * r, 2.0 * r * s.im) / (1.0 + r * r);
        let target = (1.0 / mu_r_density(r, s)).conj();
        for (n, (p, q)) in circle_values(&f, s, nmax).into_iter().enumerate() {
            if n == 0 {
                continue;
            }
            let v = p.conj() * q;
            product_err = product_err.max((v - closed).norm());
            density_err = density_err.max((v - target).norm());
        }
    }
    let ortho_sys = ladder_from_coeffs(&f[..nmax.min(ORTHO_DEGREE)], ClassTag::TMinus)?;
    let orthonormality = verify_system(&ortho_sys, &CircleMeasure::mu_r(r)?, ORTHO_NODES)?.orthonormality;
    let sup_b = r / (1.0 + r * r).sqrt();
    let pipeline = match thm5::pipeline(&[C64::new(sup_b, 0.0)], PIPELINE_STEPS, PIPELINE_BANDWIDTH, su2poly::nlfs::DEFAULT_DEGREE_CAP, nodes) {
        Ok(p) => Ok(PipelineRow {
            w_max: p.w.iter().map(|v| v.norm()).fold(0.0, f64::max),
            f1_err: (p.strip.f[0] - r).norm().max(p.strip.f[1..].iter().map(|x| x.norm()).fold(0.0, f64::max)),
            su2_residual: p.su2_residual,
        }),
        Err(e) => Err(e.to_string()),
    };
    Ok(Row {
        r,
        ladder_err,
        product_err,
        density_err,
        orthonormality,
        w_max_closed: (1.0 + r * r) / (1.0 - r * r),
        sup_b,
        pipeline,
    })
}

pub fn run(cfg: &ExperimentConfig) -> Result<Vec<Row>> {
    let rs = cfg.r_values.clone().unwrap_or_else(|| DEFAULT_R.to_vec());
    require(!rs.is_empty(), || "r_values is empty".into())?;
    for &r in &rs {
        require((0.0..1.0).contains(&r), || format!("r must lie in [0, 1), got {r}"))?;
    }
    let nmax = match &cfg.degrees {
        Some(schedule) => schedule.degrees()?.iter().map(|d| d.n).max().unwrap_or(0),
        None => DEFAULT_MAX_DEGREE,
    };
    let nodes = cfg.nodes_or(DEFAULT_NODES)?;
    require(nodes.is_power_of_two(), || format!("nodes must be a power of two, got {nodes}"))?;
    rs.par_iter().map(|&r| row(r, nmax, nodes)).collect()
}

/// `true` if the pipeline accepted every `r` and its density maximum
/// increases strictly along the list of rows.
pub fn w_max_monotone(rows: &[Row]) -> bool {
    let maxima: Option<Vec<f64>> = rows.iter().map(|r| r.pipeline.as_ref().ok().map(|p| p.w_max)).collect();
    maxima.is_some_and(|m| m.windows(2).all(|w| w[1] > w[0]))
}

pub fn report(rows: &[Row], name: &str) -> Report {
    let mut table = Table::new(
        name,
        &[
            "r",
            "ladder_err",
            "product_err",
            "density_err",
            "orthonormality",
            "sup_b",
            "w_max_closed",
            "pipeline_accepted",
            "w_max",
            "pipeline_f_err",
            "pipeline_su2",
        ],
    );
    let mut summary = Vec::new();
    let mut violations = Vec::new();
    for r in rows {
        let (acc, w_max, ferr, su2) = match &r.pipeline {
            Ok(p) => ("true".to_string(), num(p.w_max), num(p.f1_err), num(p.su2_residual)),
            Err(_) => ("false".to_string(), String::new(), String::new(), String::new()),
        };
        table.push([
            num(r.r),
            num(r.ladder_err),
            num(r.product_err),
            num(r.density_err),
            num(r.orthonormality),
            num(r.sup_b),
            num(r.w_max_closed),
            acc,
            w_max,
            ferr,
            su2,
        ]);
        match &r.pipeline {
            Ok(p) => summary.push(format!(
                "r = {}: ladder {:.1e}, product {:.1e}, orthonormality {:.1e}, w max {:.4} (closed form {:.4})",
                r.r, r.ladder_err, r.product_err, r.orthonormality, p.w_max, r.w_max_closed
            )),
            Err(e) => {
                summary.push(format!("r = {}: pipeline rejected: {e}", r.r));
                violations.push(format!("pipeline rejected r = {} < 1: {e}", r.r));
            }
        }
    }
    let increasing_r = rows.windows(2).all(|w| w[1].r > w[0].r);
    if increasing_r && !w_max_monotone(rows) {
        violations.push("density maximum is not increasing in r".into());
    }
    Report { tables: vec![table], summary, violations, ..Default::default() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms_match_at_degree_one() {
        let p = closed_form(0.5, 1, 1.0);
        assert!((p.eval_unchecked(C64::new(1.0, 0.0)) - 1.5 / 1.25f64.sqrt()).norm() < 1e-15);
    }

    #[test]
    fn small_family_matches_closed_forms() {
        let rows = run(&ExperimentConfig::from_json(r#"{"r_values": [0.25, 0.5, 0.9], "nodes": 4096}"#, "t").unwrap()).unwrap();
        for r in &rows {
            assert!(r.ladder_err < 1e-12 && r.product_err < 1e-10 && r.density_err < 1e-10, "{r:?}");
            assert!(r.orthonormality < 1e-8, "{r:?}");
            let p = r.pipeline.as_ref().unwrap();
            assert!(p.f1_err < 1e-8, "{r:?}");
        }
        assert!(w_max_monotone(&rows));
    }

    #[test]
    fn r_outside_unit_interval_is_rejected() {
        let cfg = ExperimentConfig::from_json(r#"{"r_values": [1.0]}"#, "t").unwrap();
        assert_eq!(run(&cfg).unwrap_err().exit_code(), 2);
    }
}

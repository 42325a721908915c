//! From an analytic `b` with `sup |b| < 2^{-1/2}` to a measure and its
//! coefficient sequence: outer factorization, density, truncated layer
//! stripping.

use rayon::prelude::*;
use serde_json::json;
use su2poly::grid;
use su2poly::nlfs::{
    layer_strip_truncated, outer_from_modulus, w_from_ab, OuterFunction, TruncatedStrip, B_MARGIN, B_THRESHOLD,
    DEFAULT_DEGREE_CAP, DEFAULT_NODES, SUP_CHECK_NODES,
};
use su2poly::szego::{circle_values, ladder_from_coeffs, verify_system};
use su2poly::{CircleMeasure, ClassTag, LaurentPoly, C64};

use super::{num, require, Report};
use crate::config::{CoeffSource, ExperimentConfig};
use crate::error::{LabError, Result};
use crate::output::Table;

/// Ladder degree used for the orthonormality check.
pub const ORTHO_DEGREE: usize = 20;

#[derive(Clone, Debug)]
pub struct Pipeline {
    pub a_star: OuterFunction,
    pub a: LaurentPoly,
    pub b: LaurentPoly,
    pub sup_b: f64,
    /// `max_grid ||a|^2 + |b|^2 - 1|`
    pub su2_residual: f64,
    pub w: Vec<C64>,
    pub strip: TruncatedStrip,
    pub measure: CircleMeasure,
}

/// `b = sum_k b[k-1] z^k` through the pipeline on an `m`-point grid.
pub fn pipeline(b: &[C64], steps: usize, bandwidth: usize, degree_cap: usize, m: usize) -> Result<Pipeline> {
    let b = LaurentPoly::new(1, b.to_vec());
    let check = m.max(SUP_CHECK_NODES).max(8 * (b.len() + 1)).next_power_of_two();
    let sup_b = grid::eval_on_grid(&b, check).iter().map(|v| v.norm()).fold(0.0, f64::max);
    if sup_b >= B_THRESHOLD - B_MARGIN {
        return Err(LabError::Violation(format!(
            "sup |b| = {sup_b} is not below 2^(-1/2) = {B_THRESHOLD}; the threshold is sharp, \
             and beyond it the pair need not produce polynomials converging to the density"
        )));
    }
    let bv = grid::eval_on_grid(&b, m);
    let logmod: Vec<f64> = bv.iter().map(|v| 0.5 * (1.0 - v.norm_sqr()).ln()).collect();
    let a_star = outer_from_modulus(&logmod, degree_cap)?;
    let a = a_star.poly.star();
    let su2_residual = grid::eval_on_grid(&a, m)
        .iter()
        .zip(&bv)
        .map(|(x, y)| (x.norm_sqr() + y.norm_sqr() - 1.0).abs())
        .fold(0.0, f64::max);
    let w = w_from_ab(&a, &b, m)?;
    let measure = CircleMeasure::from_samples(w.clone())?;
    let strip = layer_strip_truncated(&a_star.poly, &b, steps, bandwidth)?;
    Ok(Pipeline { a_star, a, b, sup_b, su2_residual, w, strip, measure })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Thm5 {
    pub b: Vec<C64>,
    pub nodes: usize,
    pub degree_cap: usize,
    pub sup_b: f64,
    pub su2_residual: f64,
    pub boundary_error: f64,
    pub clamped: usize,
    pub orthonormality: f64,
    pub strip_residual_b: f64,
    pub strip_truncated: f64,
    pub f: Vec<C64>,
    /// `(n, int |star(phi_n) phiTilde_n - 1/conj(w)| dm)`
    pub l1: Vec<(usize, f64)>,
}

/// `int |star(phi_n) phiTilde_n - 1/conj(w)| dm` for `n = 0..=f.len()`, on
/// the grid carrying `w`.
pub fn l1_trend(f: &[C64], w: &[C64]) -> Vec<(usize, f64)> {
    let m = w.len();
    let top = f.len();
    let per_node: Vec<Vec<f64>> = (0..m)
        .into_par_iter()
        .map(|k| {
            let s = grid::node(m, k);
            let target = 1.0 / w[k].conj();
            circle_values(f, s, top).iter().map(|(p, q)| (p.conj() * q - target).norm()).collect()
        })
        .collect();
    (0..=top)
        .map(|n| (n, per_node.iter().map(|v| v[n]).sum::<f64>() / m as f64))
        .collect()
}

pub fn run(cfg: &ExperimentConfig) -> Result<Thm5> {
    let Some(CoeffSource::FromB { b, steps, bandwidth }) = &cfg.coeffs else {
        return Err(LabError::Config("thm5 needs `coeffs` with source \"from_b\"".into()));
    };
    let b: Vec<C64> = b.iter().map(|&v| v.into()).collect();
    let m = cfg.nodes_or(DEFAULT_NODES)?;
    require(m.is_power_of_two(), || format!("nodes must be a power of two, got {m}"))?;
    let degree_cap = cfg.degree_cap.unwrap_or(DEFAULT_DEGREE_CAP);
    let run = pipeline(&b, *steps, *bandwidth, degree_cap, m)?;
    let sys = ladder_from_coeffs(&run.strip.f[..run.strip.f.len().min(ORTHO_DEGREE)], ClassTag::TMinus)?;
    let orthonormality = verify_system(&sys, &run.measure, m)?.orthonormality;
    Ok(Thm5 {
        b,
        nodes: m,
        degree_cap,
        sup_b: run.sup_b,
        su2_residual: run.su2_residual,
        boundary_error: run.a_star.boundary_error,
        clamped: run.a_star.clamped,
        orthonormality,
        strip_residual_b: run.strip.residual_b,
        strip_truncated: run.strip.truncated,
        l1: l1_trend(&run.strip.f, &run.w),
        f: run.strip.f,
    })
}

impl Thm5 {
    pub fn report(&self, name: &str) -> Report {
        let mut trend = Table::new(name, &["n", "l1"]);
        for (n, v) in &self.l1 {
            trend.push([n.to_string(), num(*v)]);
        }
        let mut coeffs = Table::new(format!("{name}_coeffs"), &["k", "f_re", "f_im"]);
        for (k, f) in self.f.iter().enumerate() {
            coeffs.push([(k + 1).to_string(), num(f.re), num(f.im)]);
        }
        let value = json!({
            "b": self.b.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>(),
            "nodes": self.nodes,
            "degree_cap": self.degree_cap,
            "sup_b": self.sup_b,
            "su2_residual": self.su2_residual,
            "outer_boundary_error": self.boundary_error,
            "clamped": self.clamped,
            "orthonormality": self.orthonormality,
            "strip_residual_b": self.strip_residual_b,
            "strip_truncated": self.strip_truncated,
        });
        let last = self.l1.last().map_or(f64::NAN, |x| x.1);
        let summary = vec![
            format!("sup |b| = {:.6}, SU(2) residual {:.3e}", self.sup_b, self.su2_residual),
            format!(
                "orthonormality residual (degree <= {}) {:.3e}",
                ORTHO_DEGREE.min(self.f.len()),
                self.orthonormality
            ),
            format!(
                "stripping: {} coefficients, remaining |b| {:.3e}, truncated {:.3e}",
                self.f.len(),
                self.strip_residual_b,
                self.strip_truncated
            ),
            format!("L1 distance at n = {}: {:.3e}", self.f.len(), last),
        ];
        Report {
            tables: vec![trend, coeffs],
            json: vec![(format!("{name}_report"), value)],
            summary,
            violations: Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(b: &str, extra: &str) -> ExperimentConfig {
        ExperimentConfig::from_json(&format!(r#"{{"coeffs": {{"source": "from_b", "b": {b}{extra}}}}}"#), "t").unwrap()
    }

    #[test]
    fn mu_r_b_recovers_single_coefficient() {
        let t = run(&cfg(&format!("[{}]", 0.5 / 1.25f64.sqrt()), r#", "steps": 8"#)).unwrap();
        assert!((t.f[0] - C64::new(0.5, 0.0)).norm() < 1e-8);
        assert!(t.f[1..].iter().all(|x| x.norm() < 1e-8));
        assert!(t.su2_residual < 1e-8 && t.orthonormality < 1e-8);
        assert!(t.l1.iter().skip(1).all(|(_, v)| *v < 1e-8));
    }

    #[test]
    fn l1_trend_decreases_for_polynomial_b() {
        let t = run(&cfg("[0.3, 0, 0.2]", r#", "steps": 64"#)).unwrap();
        assert!(t.su2_residual < 1e-8, "{}", t.su2_residual);
        assert!(t.orthonormality < 1e-8, "{}", t.orthonormality);
        for w in t.l1.windows(2) {
            assert!(w[1].1 <= w[0].1 + 1e-12, "{:?}", t.l1);
        }
        assert!(t.l1[1].1 < t.l1[0].1 && t.l1[3].1 < 1e-12, "{:?}", t.l1);
    }

    #[test]
    fn b_above_threshold_is_rejected() {
        let err = run(&cfg("[0.71]", "")).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert!(err.to_string().contains("sharp"));
    }

    #[test]
    fn missing_b_is_a_config_error() {
        assert_eq!(run(&ExperimentConfig::default()).unwrap_err().exit_code(), 2);
    }
}

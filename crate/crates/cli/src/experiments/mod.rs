//! The experiments behind each subcommand. Each `run` function returns typed
//! rows; [`Report`] turns them into CSV tables and a verdict.

pub mod counterexample;
pub mod fejer;
pub mod lacunary;
pub mod local;
pub mod plancherel;
pub mod roundtrip;
pub mod thm5;
pub mod universality;

use su2poly::szego::{ladder_from_coeffs, system_from_moments};
use su2poly::{CircleMeasure, ClassTag, MeasureSpec, OrthoSystem, C64};

use crate::config::{CoeffSource, ExperimentConfig};
use crate::error::{LabError, Result};
use crate::output::Table;

/// Output of one experiment run.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub tables: Vec<Table>,
    pub json: Vec<(String, serde_json::Value)>,
    pub summary: Vec<String>,
    pub violations: Vec<String>,
}

/// Column value for an `f64`: the shortest round-trip representation.
pub(crate) fn num(x: f64) -> String {
    x.to_string()
}

/// Sorted-sample quantile by the nearest-rank rule.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let idx = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len()) - 1;
    sorted[idx]
}

pub fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

/// The ladder and measure an experiment works with, up to degree `nmax`.
///
/// Explicit or random coefficients give the recurrence ladder, with the
/// configured measure or else the measure induced by the coefficients.
/// Without coefficients, closed-form families use their known coefficients
/// and other measures go through the moment recursion.
pub fn system_for(cfg: &ExperimentConfig, nmax: usize, m: usize) -> Result<(OrthoSystem, CircleMeasure)> {
    if let Some(CoeffSource::FromB { b, steps, bandwidth }) = &cfg.coeffs {
        let b: Vec<C64> = b.iter().map(|&v| v.into()).collect();
        let run = thm5::pipeline(&b, *steps, *bandwidth, cfg.degree_cap.unwrap_or(su2poly::nlfs::DEFAULT_DEGREE_CAP), m)?;
        let mu = match &cfg.measure {
            Some(spec) => spec.build()?,
            None => run.measure.clone(),
        };
        return Ok((padded_ladder(&run.strip.f, nmax)?, mu));
    }
    if let Some(f) = cfg.coeffs_direct()? {
        let mu = match &cfg.measure {
            Some(spec) => spec.build()?,
            None => MeasureSpec::Nlfs { coeffs: f.iter().map(|&c| c.into()).collect() }.build()?,
        };
        return Ok((padded_ladder(&f, nmax)?, mu));
    }
    let spec = cfg.measure.clone().unwrap_or(MeasureSpec::Uniform);
    let mu = spec.build()?;
    let f: Vec<C64> = match &spec {
        MeasureSpec::Uniform => Vec::new(),
        MeasureSpec::MuR { r } => vec![C64::new(*r, 0.0)],
        MeasureSpec::Nlfs { coeffs } => coeffs.iter().map(|&c| c.into()).collect(),
        _ => return Ok((system_from_moments(&mu, nmax, m)?, mu)),
    };
    Ok((padded_ladder(&f, nmax)?, mu))
}

fn padded_ladder(f: &[C64], nmax: usize) -> Result<OrthoSystem> {
    let mut f = f.to_vec();
    if f.len() < nmax {
        f.resize(nmax, C64::new(0.0, 0.0));
    }
    Ok(ladder_from_coeffs(&f, ClassTag::TMinus)?)
}

pub(crate) fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(LabError::Config(msg()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_rank_quantiles() {
        let v = sorted(vec![5.0, 1.0, 3.0, 2.0, 4.0]);
        assert_eq!(quantile(&v, 0.5), 3.0);
        assert_eq!(quantile(&v, 0.0), 1.0);
        assert_eq!(quantile(&v, 1.0), 5.0);
        assert!(quantile(&[], 0.5).is_nan());
    }

    #[test]
    fn mu_r_system_uses_closed_form_coefficients() {
        let cfg = ExperimentConfig::from_json(r#"{"measure": {"kind": "mu_r", "r": 0.5}}"#, "t").unwrap();
        let (sys, _) = system_for(&cfg, 5, 256).unwrap();
        assert_eq!(sys.degree(), 5);
        assert_eq!(sys.f[0], C64::new(0.5, 0.0));
        assert!(sys.f[1..].iter().all(|x| x.norm() == 0.0));
    }
}

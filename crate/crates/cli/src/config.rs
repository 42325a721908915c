//! JSON experiment configuration.
//!
//! Every field is optional; each subcommand falls back to its own defaults.
//! Unknown fields are rejected.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use su2poly::cmeasure::PointValue;
use su2poly::{ComplexValue, MeasureSpec, C64};

use crate::error::{LabError, Result};

pub const COEFF_STREAM: u64 = 1;
pub const POINT_STREAM: u64 = 2;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<CoeffSource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degrees: Option<DegreeSchedule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<PointSource>,
    /// Quadrature grid size `M`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
    /// Neighbourhood constant `C` of the universality sweep.
    #[serde(default, rename = "C", skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    /// Offsets `(u, v)` placing `z = s e^{iuC/n}` and `lambda = s e^{ivC/n}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offsets: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilons: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    /// Degree cap `D` of the outer function.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree_cap: Option<usize>,
    /// Base name of the main output file, without extension.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

/// Where the coefficient sequence `F_1, F_2, ...` comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoeffSource {
    Explicit { values: Vec<ComplexValue> },
    /// `n` entries drawn uniformly from the disk of the given radius.
    Random { n: usize, radius: f64 },
    /// `b = sum_k b[k-1] z^k`, inverted by the outer-function pipeline.
    FromB {
        b: Vec<ComplexValue>,
        #[serde(default = "default_steps")]
        steps: usize,
        #[serde(default = "default_bandwidth")]
        bandwidth: usize,
    },
}

fn default_steps() -> usize {
    64
}

fn default_bandwidth() -> usize {
    256
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "schedule", rename_all = "snake_case", deny_unknown_fields)]
pub enum DegreeSchedule {
    List { values: Vec<usize> },
    /// `n_0 = start`, `n_{k+1} = ceil(base n_k)`.
    Lacunary {
        base: f64,
        count: usize,
        #[serde(default = "default_start")]
        start: usize,
    },
    /// `n_k = ceil(base^k)` for `k = 0..=count`.
    Powers { base: f64, count: usize },
}

fn default_start() -> usize {
    4
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum PointSource {
    /// Angles in radians or `[re, im]` pairs on the circle.
    List { values: Vec<PointValue> },
    /// Uniform angles.
    Random {
        #[serde(default = "default_point_count")]
        count: usize,
    },
}

fn default_point_count() -> usize {
    64
}

/// One entry of a degree schedule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Degree {
    pub k: usize,
    pub n: usize,
}

impl DegreeSchedule {
    pub fn degrees(&self) -> Result<Vec<Degree>> {
        let ns: Vec<usize> = match self {
            DegreeSchedule::List { values } => values.clone(),
            DegreeSchedule::Lacunary { base, count, start } => {
                check_base(*base)?;
                if *start == 0 {
                    return Err(LabError::Config("lacunary schedule needs start >= 1".into()));
                }
                let mut out = vec![*start];
                for _ in 0..*count {
                    let last = *out.last().expect("non-empty") as f64;
                    out.push((base * last).ceil() as usize);
                }
                out
            }
            DegreeSchedule::Powers { base, count } => {
                check_base(*base)?;
                (0..=*count).map(|k| base.powi(k as i32).ceil() as usize).collect()
            }
        };
        if ns.is_empty() {
            return Err(LabError::Config("degree schedule is empty".into()));
        }
        Ok(ns.into_iter().enumerate().map(|(k, n)| Degree { k, n }).collect())
    }

    /// Smallest ratio `n_{k+1} / n_k`; a schedule is lacunary when it is
    /// strictly increasing and this ratio exceeds 1.
    pub fn lacunarity(&self) -> Result<f64> {
        let ds = self.degrees()?;
        if ds.len() < 2 {
            return Err(LabError::Config("a lacunary schedule needs at least two degrees".into()));
        }
        let mut ratio = f64::INFINITY;
        for w in ds.windows(2) {
            if w[0].n == 0 || w[1].n <= w[0].n {
                return Err(LabError::Config(format!("schedule is not lacunary at {} -> {}", w[0].n, w[1].n)));
            }
            ratio = ratio.min(w[1].n as f64 / w[0].n as f64);
        }
        Ok(ratio)
    }
}

fn check_base(base: f64) -> Result<()> {
    if !(base > 1.0 && base.is_finite()) {
        return Err(LabError::Config(format!("schedule base must exceed 1, got {base}")));
    }
    Ok(())
}

/// Draws `n` points uniformly from the disk of radius `radius`.
pub fn random_disk(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> Vec<C64> {
    (0..n)
        .map(|_| {
            let r = radius * rng.gen::<f64>().sqrt();
            let t = rng.gen_range(0.0..std::f64::consts::TAU);
            C64::from_polar(r, t)
        })
        .collect()
}

impl ExperimentConfig {
    pub fn from_json(text: &str, origin: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            LabError::Config(format!("{origin}: line {}, column {}: {e}", e.line(), e.column()))
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        Self::from_json(&text, &path.display().to_string())
    }

    /// SHA-256 of the canonical JSON form, as lowercase hex.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(bytes))
    }

    pub fn require_seed(&self, what: &str) -> Result<u64> {
        self.seed.ok_or_else(|| LabError::Config(format!("{what} is random, so a seed is required (config `seed` or --seed)")))
    }

    pub fn rng(&self, stream: u64, what: &str) -> Result<ChaCha8Rng> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.require_seed(what)?);
        rng.set_stream(stream);
        Ok(rng)
    }

    pub fn nodes_or(&self, default: usize) -> Result<usize> {
        let m = self.nodes.unwrap_or(default);
        if m < 64 {
            return Err(LabError::Config(format!("nodes must be at least 64, got {m}")));
        }
        Ok(m)
    }

    pub fn degrees_or(&self, default: DegreeSchedule) -> Result<Vec<Degree>> {
        self.degrees.as_ref().unwrap_or(&default).degrees()
    }

    pub fn points_or(&self, default: PointSource) -> Result<Vec<C64>> {
        match self.points.as_ref().unwrap_or(&default) {
            PointSource::List { values } => {
                if values.is_empty() {
                    return Err(LabError::Config("point list is empty".into()));
                }
                values.iter().map(|p| p.to_point().map_err(|e| LabError::Config(e.to_string()))).collect()
            }
            PointSource::Random { count } => {
                let mut rng = self.rng(POINT_STREAM, "the point sample")?;
                Ok((0..*count).map(|_| C64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))).collect())
            }
        }
    }

    /// Explicit or random coefficients. `FromB` is resolved by the callers
    /// that support it.
    pub fn coeffs_direct(&self) -> Result<Option<Vec<C64>>> {
        match &self.coeffs {
            None => Ok(None),
            Some(CoeffSource::Explicit { values }) => Ok(Some(values.iter().map(|&v| v.into()).collect())),
            Some(CoeffSource::Random { n, radius }) => {
                if !(*radius >= 0.0 && radius.is_finite()) {
                    return Err(LabError::Config(format!("radius must be finite and non-negative, got {radius}")));
                }
                let mut rng = self.rng(COEFF_STREAM, "the coefficient sequence")?;
                Ok(Some(random_disk(&mut rng, *n, *radius)))
            }
            Some(CoeffSource::FromB { .. }) => Ok(None),
        }
    }

    /// Random draws for trial-based experiments; trial `t` uses its own
    /// stream so that adding trials does not change earlier ones.
    pub fn trial_coeffs(&self, trial: usize, default_n: usize, default_radius: f64) -> Result<Vec<C64>> {
        match &self.coeffs {
            Some(CoeffSource::Explicit { values }) => Ok(values.iter().map(|&v| v.into()).collect()),
            Some(CoeffSource::FromB { .. }) => Err(LabError::Config("this experiment needs explicit or random coefficients".into())),
            Some(CoeffSource::Random { n, radius }) => self.trial_draw(trial, *n, *radius),
            None => self.trial_draw(trial, default_n, default_radius),
        }
    }

    fn trial_draw(&self, trial: usize, n: usize, radius: f64) -> Result<Vec<C64>> {
        let mut rng = self.rng(COEFF_STREAM + 16 + trial as u64, "the coefficient sequence")?;
        Ok(random_disk(&mut rng, n, radius))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_parses() {
        let cfg = ExperimentConfig::from_json("{}", "test").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
    }

    #[test]
    fn unknown_field_reports_position() {
        let err = ExperimentConfig::from_json("{\n  \"seed\": 1,\n  \"sed\": 2\n}", "cfg.json").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 3"), "{msg}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn full_config_roundtrips() {
        let text = r#"{
            "seed": 9,
            "measure": {"kind": "mu_r", "r": 0.5},
            "coeffs": {"source": "random", "n": 8, "radius": 0.5},
            "degrees": {"schedule": "lacunary", "base": 1.5, "count": 4},
            "points": {"source": "list", "values": [0.5, [0.0, 1.0]]},
            "nodes": 1024,
            "C": 2.0
        }"#;
        let cfg = ExperimentConfig::from_json(text, "t").unwrap();
        let back: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(cfg.hash(), back.hash());
        assert_eq!(cfg.hash().len(), 64);
    }

    #[test]
    fn lacunary_schedule_values() {
        let s = DegreeSchedule::Lacunary { base: 1.5, count: 5, start: 4 };
        let ns: Vec<usize> = s.degrees().unwrap().iter().map(|d| d.n).collect();
        assert_eq!(ns, vec![4, 6, 9, 14, 21, 32]);
        assert!(s.lacunarity().unwrap() >= 1.5 - 1e-12);
    }

    #[test]
    fn power_schedule_values() {
        let s = DegreeSchedule::Powers { base: 1.5, count: 20 };
        let ns: Vec<usize> = s.degrees().unwrap().iter().map(|d| d.n).collect();
        assert_eq!(&ns[..8], &[1, 2, 3, 4, 6, 8, 12, 18]);
        assert_eq!(ns[20], 3326);
        let l = s.lacunarity().unwrap();
        assert!((l - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn non_increasing_list_is_not_lacunary() {
        let s = DegreeSchedule::List { values: vec![4, 8, 8] };
        assert!(s.lacunarity().is_err());
    }

    #[test]
    fn random_sources_need_a_seed() {
        let cfg = ExperimentConfig { coeffs: Some(CoeffSource::Random { n: 3, radius: 0.1 }), ..Default::default() };
        assert!(matches!(cfg.coeffs_direct(), Err(LabError::Config(_))));
        let seeded = ExperimentConfig { seed: Some(4), ..cfg };
        let a = seeded.coeffs_direct().unwrap().unwrap();
        let b = seeded.coeffs_direct().unwrap().unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|x| x.norm() <= 0.1));
    }

    #[test]
    fn off_circle_point_is_rejected() {
        let cfg = ExperimentConfig::from_json(r#"{"points": {"source": "list", "values": [[0.5, 0.5]]}}"#, "t").unwrap();
        assert!(cfg.points_or(PointSource::Random { count: 1 }).is_err());
    }
}

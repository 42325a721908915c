//! Complex probability measures on the unit circle.
//!
//! A [`CircleMeasure`] is an absolutely continuous part `w dm` plus a finite
//! list of atoms, where `m` is normalized arclength (`dtheta / 2pi`, total
//! mass 1). This is the only arclength convention in the crate; the factor
//! `1/(2pi)` that would accompany raw arclength is folded into `m`.
//!
//! Atoms are always summed exactly and never smeared onto a grid.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid;
use crate::lpoly::LaurentPoly;

/// Absolute tolerance of the adaptive quadrature.
pub const ADAPTIVE_TOL: f64 = 1e-10;
/// Largest grid the adaptive quadrature will try.
pub const MAX_NODES: usize = 1 << 20;
pub const MIN_NODES: usize = 64;
pub const DEFAULT_NORMALIZATION_TOL: f64 = 1e-8;

pub type DensityFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// Radon-Nikodym derivative `w` of the absolutely continuous part with
/// respect to normalized arclength.
#[derive(Clone)]
pub enum Density {
    Zero,
    /// `w = 1`
    Uniform,
    /// `w_r(s) = (1 + r^2) / ((1 - r s)(1 + r / s))`, the density whose
    /// coefficient sequence is `(r, 0, 0, ...)`.
    MuR { r: f64 },
    /// Closed-form evaluator `z -> w(z)` for `|z| = 1`.
    Func { label: String, f: DensityFn },
    /// Values at the nodes of a uniform grid.
    Samples(Arc<Vec<Complex64>>),
    /// Weighted sum of densities.
    Mix(Vec<(Complex64, Density)>),
}

impl fmt::Debug for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Density::Zero => write!(f, "Zero"),
            Density::Uniform => write!(f, "Uniform"),
            Density::MuR { r } => write!(f, "MuR {{ r: {r} }}"),
            Density::Func { label, .. } => write!(f, "Func({label})"),
            Density::Samples(v) => write!(f, "Samples(len = {})", v.len()),
            Density::Mix(parts) => f.debug_list().entries(parts.iter()).finish(),
        }
    }
}

pub fn mu_r_density(r: f64, s: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    (1.0 + r * r) / ((one - r * s) * (one + r / s))
}

impl Density {
    /// `w(s)` for `|s| = 1`. Sampled densities are interpolated with a
    /// periodic 4-point Lagrange stencil.
    pub fn eval(&self, s: Complex64) -> Complex64 {
        match self {
            Density::Zero => Complex64::new(0.0, 0.0),
            Density::Uniform => Complex64::new(1.0, 0.0),
            Density::MuR { r } => mu_r_density(*r, s),
            Density::Func { f, .. } => f(s),
            Density::Samples(v) => grid::interpolate(v, s.arg()),
            Density::Mix(parts) => parts.iter().map(|(c, d)| c * d.eval(s)).sum(),
        }
    }

    /// Sample count if the density carries grid samples.
    pub fn grid_size(&self) -> Option<usize> {
        match self {
            Density::Samples(v) => Some(v.len()),
            Density::Mix(parts) => parts.iter().find_map(|(_, d)| d.grid_size()),
            _ => None,
        }
    }

    fn check_grids(&self, expected: Option<usize>) -> Result<()> {
        match self {
            Density::Samples(v) => {
                if !v.len().is_power_of_two() || v.len() < 4 {
                    return Err(Error::InvalidMeasure(format!(
                        "sample count {} is not a power of two >= 4",
                        v.len()
                    )));
                }
                if let Some(m) = expected {
                    if m != v.len() {
                        return Err(Error::InvalidMeasure(format!(
                            "mixed sample grids of sizes {m} and {}",
                            v.len()
                        )));
                    }
                }
                Ok(())
            }
            Density::Mix(parts) => parts.iter().try_for_each(|(_, d)| d.check_grids(expected.or(self.grid_size()))),
            _ => Ok(()),
        }
    }

    /// Density values at the nodes of an `m`-point grid.
    pub fn values_on_grid(&self, m: usize) -> Vec<Complex64> {
        match self {
            Density::Zero => vec![Complex64::new(0.0, 0.0); m],
            Density::Uniform => vec![Complex64::new(1.0, 0.0); m],
            Density::Samples(v) if v.len() == m => v.as_ref().clone(),
            Density::Mix(parts) => {
                let mut out = vec![Complex64::new(0.0, 0.0); m];
                for (c, d) in parts {
                    for (o, v) in out.iter_mut().zip(d.values_on_grid(m)) {
                        *o += c * v;
                    }
                }
                out
            }
            _ => (0..m).map(|k| self.eval(grid::node(m, k))).collect(),
        }
    }

    /// Density of the conjugate measure.
    pub fn conj(&self) -> Density {
        match self {
            Density::Zero => Density::Zero,
            Density::Uniform => Density::Uniform,
            Density::MuR { .. } | Density::Func { .. } => {
                let inner = self.clone();
                Density::Func {
                    label: format!("conj({self:?})"),
                    f: Arc::new(move |s| inner.eval(s).conj()),
                }
            }
            Density::Samples(v) => Density::Samples(Arc::new(v.iter().map(|c| c.conj()).collect())),
            Density::Mix(parts) => Density::Mix(parts.iter().map(|(c, d)| (c.conj(), d.conj())).collect()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub point: Complex64,
    pub weight: Complex64,
}

#[derive(Clone, Debug)]
pub struct CircleMeasure {
    pub density: Density,
    pub atoms: Vec<Atom>,
    pub normalization_tol: f64,
}

/// Uniform `m`-point rule with weights `1/m`. Exact for Laurent polynomials
/// with frequencies in `(-m, m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Quadrature {
    pub m: usize,
}

impl Quadrature {
    pub fn new(m: usize) -> Self {
        Quadrature { m }
    }

    pub fn nodes(&self) -> Vec<Complex64> {
        grid::nodes(self.m)
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.m as f64
    }

    pub fn integrate(&self, values: &[Complex64]) -> Complex64 {
        assert_eq!(values.len(), self.m, "sample count does not match the rule");
        grid::mean(values)
    }

    pub fn integrate_poly(&self, p: &LaurentPoly) -> Complex64 {
        grid::mean(&grid::eval_on_grid(p, self.m))
    }
}

/// Precomputed moments `c_j = int z^j dmu` over a frequency window.
#[derive(Clone, Debug)]
pub struct MomentTable {
    lo: i64,
    values: Vec<Complex64>,
}

impl MomentTable {
    pub fn get(&self, j: i64) -> Complex64 {
        self.values[(j - self.lo) as usize]
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.values.len() as i64 - 1
    }

    /// `int h dmu` for a Laurent polynomial inside the window.
    pub fn integrate(&self, h: &LaurentPoly) -> Complex64 {
        assert!(h.is_zero() || (h.lo() >= self.lo && h.hi() <= self.hi()), "polynomial outside moment window");
        h.coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| c * self.get(h.lo() + i as i64))
            .sum()
    }

    /// `<f, g>_mu = int f g^* dmu`
    pub fn pairing(&self, f: &LaurentPoly, g: &LaurentPoly) -> Complex64 {
        self.integrate(&(f * &g.star()))
    }
}

fn check_unit(s: Complex64) -> Result<()> {
    if (s.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::Precondition(format!("point {s} is not on the unit circle")));
    }
    Ok(())
}

impl CircleMeasure {
    /// Builds the measure and checks `int dmu = 1` within
    /// [`DEFAULT_NORMALIZATION_TOL`].
    pub fn new(density: Density, atoms: Vec<Atom>) -> Result<Self> {
        Self::with_tolerance(density, atoms, DEFAULT_NORMALIZATION_TOL)
    }

    pub fn with_tolerance(density: Density, atoms: Vec<Atom>, normalization_tol: f64) -> Result<Self> {
        density.check_grids(None)?;
        for a in &atoms {
            check_unit(a.point).map_err(|_| Error::InvalidMeasure(format!("atom at {} is off the circle", a.point)))?;
        }
        let mu = CircleMeasure { density, atoms, normalization_tol };
        let mass = mu.moment(0, MIN_NODES)?;
        if (mass - 1.0).norm() > normalization_tol {
            return Err(Error::NotNormalized { mass, tol: normalization_tol });
        }
        Ok(mu)
    }

    /// Skips the normalization check.
    pub fn new_unchecked(density: Density, atoms: Vec<Atom>) -> Self {
        CircleMeasure { density, atoms, normalization_tol: DEFAULT_NORMALIZATION_TOL }
    }

    pub fn uniform() -> Self {
        Self::new_unchecked(Density::Uniform, Vec::new())
    }

    /// The absolutely continuous measure `w_r dm`, `0 <= r < 1`.
    pub fn mu_r(r: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::InvalidMeasure(format!("mu_r needs 0 <= r < 1, got {r}")));
        }
        Self::new(Density::MuR { r }, Vec::new())
    }

    pub fn from_samples(values: Vec<Complex64>) -> Result<Self> {
        Self::new(Density::Samples(Arc::new(values)), Vec::new())
    }

    pub fn from_fn(label: impl Into<String>, f: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static) -> Result<Self> {
        Self::new(Density::Func { label: label.into(), f: Arc::new(f) }, Vec::new())
    }

    /// The conjugate measure.
    pub fn conj(&self) -> Self {
        CircleMeasure {
            density: self.density.conj(),
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom { point: a.point, weight: a.weight.conj() })
                .collect(),
            normalization_tol: self.normalization_tol,
        }
    }

    /// `w(s)`, the density of the absolutely continuous part at `s`.
    pub fn density_at(&self, s: Complex64) -> Complex64 {
        self.density.eval(s)
    }

    fn atom_moment(&self, j: i64) -> Complex64 {
        self.atoms.iter().map(|a| a.weight * a.point.powi(j as i32)).sum()
    }

    fn density_moments_at(&self, lo: i64, hi: i64, m: usize) -> Vec<Complex64> {
        match &self.density {
            Density::Zero => vec![Complex64::new(0.0, 0.0); (hi - lo + 1) as usize],
            Density::Uniform => (lo..=hi)
                .map(|j| if j == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
                .collect(),
            d => grid::grid_moments(&d.values_on_grid(m), lo, hi),
        }
    }

    /// Moments `c_j` for `j` in `lo..=hi`.
    ///
    /// Closed-form densities are integrated on grids of `m, 2m, 4m, ...`
    /// nodes until two successive grids agree to [`ADAPTIVE_TOL`] in every
    /// moment. Sampled densities are integrated on their own grid.
    pub fn moment_table(&self, lo: i64, hi: i64, m: usize) -> Result<MomentTable> {
        if m < MIN_NODES {
            return Err(Error::Precondition(format!("node count {m} < {MIN_NODES}")));
        }
        let dens = match (&self.density, self.density.grid_size()) {
            (Density::Zero | Density::Uniform, _) => self.density_moments_at(lo, hi, m),
            (_, Some(ms)) => self.density_moments_at(lo, hi, ms),
            (_, None) => {
                let mut m = m.next_power_of_two();
                let mut prev = self.density_moments_at(lo, hi, m);
                loop {
                    m *= 2;
                    let next = self.density_moments_at(lo, hi, m);
                    let (i, diff) = prev
                        .iter()
                        .zip(&next)
                        .map(|(a, b)| (a - b).norm())
                        .enumerate()
                        .fold((0, 0.0), |acc, (i, d)| if d > acc.1 { (i, d) } else { acc });
                    if diff < ADAPTIVE_TOL {
                        break next;
                    }
                    if m >= MAX_NODES {
                        return Err(Error::ToleranceNotMet { last: next[i], previous: prev[i] });
                    }
                    prev = next;
                }
            }
        };
        let values = dens
            .into_iter()
            .zip(lo..=hi)
            .map(|(d, j)| d + self.atom_moment(j))
            .collect();
        Ok(MomentTable { lo, values })
    }

    /// `c_j = int z^j dmu`
    pub fn moment(&self, j: i64, m: usize) -> Result<Complex64> {
        Ok(self.moment_table(j, j, m)?.get(j))
    }

    /// `<f, g>_mu = int f g^* dmu`; linear in `f`, conjugate linear in `g`.
    pub fn pairing(&self, f: &LaurentPoly, g: &LaurentPoly, m: usize) -> Result<Complex64> {
        let h = f * &g.star();
        if h.is_zero() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok(self.moment_table(h.lo(), h.hi(), m)?.integrate(&h))
    }

    /// `L(mu, s, n) = int min{n+1, 1/((n+1)|y-s|^2)} |dmu(y) - w(s) dm(y)|`.
    ///
    /// The absolutely continuous part is integrated on a grid of at least
    /// `max(m, 64(n+1))` nodes (sampled densities use their own grid), atoms
    /// contribute the kernel value times `|weight|`. Whether `s` is a
    /// Lebesgue point of `w` is not checked.
    pub fn l_functional(&self, s: Complex64, n: usize, m: usize) -> Result<f64> {
        check_unit(s)?;
        let np1 = (n + 1) as f64;
        let kernel = |y: Complex64| {
            let d2 = (y - s).norm_sqr();
            if d2 == 0.0 {
                np1
            } else {
                np1.min(1.0 / (np1 * d2))
            }
        };
        let ws = self.density_at(s);
        let grid_m = self
            .density
            .grid_size()
            .unwrap_or_else(|| m.max(64 * (n + 1)).next_power_of_two());
        let vals = self.density.values_on_grid(grid_m);
        let ac: f64 = vals
            .iter()
            .enumerate()
            .map(|(k, w)| kernel(grid::node(grid_m, k)) * (w - ws).norm())
            .sum::<f64>()
            / grid_m as f64;
        let singular: f64 = self.atoms.iter().map(|a| kernel(a.point) * a.weight.norm()).sum();
        Ok(ac + singular)
    }
}

/// A complex number written either as a bare real or as `[re, im]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexValue {
    Real(f64),
    Pair([f64; 2]),
}

impl From<ComplexValue> for Complex64 {
    fn from(v: ComplexValue) -> Self {
        match v {
            ComplexValue::Real(x) => Complex64::new(x, 0.0),
            ComplexValue::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

impl From<Complex64> for ComplexValue {
    fn from(c: Complex64) -> Self {
        ComplexValue::Pair([c.re, c.im])
    }
}

/// A point on the circle: a bare number is an angle in radians, a pair is
/// the point itself.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointValue {
    Angle(f64),
    Pair([f64; 2]),
}

impl PointValue {
    pub fn to_point(self) -> Result<Complex64> {
        let p = match self {
            PointValue::Angle(t) => Complex64::from_polar(1.0, t),
            PointValue::Pair([re, im]) => Complex64::new(re, im),
        };
        check_unit(p).map_err(|e| Error::InvalidMeasure(e.to_string()))?;
        Ok(p)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomSpec {
    pub point: PointValue,
    pub weight: ComplexValue,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixPart {
    pub weight: ComplexValue,
    pub measure: MeasureSpec,
}

/// JSON description of a measure, e.g. `{"kind":"mu_r","r":0.5}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureSpec {
    Uniform,
    MuR { r: f64 },
    Samples { values: Vec<ComplexValue> },
    Atoms { list: Vec<AtomSpec> },
    Mix { parts: Vec<MixPart> },
    /// The measure `w dm` with `w = 1/((a^* - b)(a + b^*))` induced by a
    /// finite coefficient sequence.
    Nlfs { coeffs: Vec<ComplexValue> },
}

impl MeasureSpec {
    fn parts(&self) -> Result<(Density, Vec<Atom>)> {
        Ok(match self {
            MeasureSpec::Uniform => (Density::Uniform, Vec::new()),
            MeasureSpec::MuR { r } => {
                if !(0.0..1.0).contains(r) {
                    return Err(Error::InvalidMeasure(format!("mu_r needs 0 <= r < 1, got {r}")));
                }
                (Density::MuR { r: *r }, Vec::new())
            }
            MeasureSpec::Samples { values } => {
                (Density::Samples(Arc::new(values.iter().map(|&v| v.into()).collect())), Vec::new())
            }
            MeasureSpec::Atoms { list } => {
                let atoms = list
                    .iter()
                    .map(|a| Ok(Atom { point: a.point.to_point()?, weight: a.weight.into() }))
                    .collect::<Result<Vec<_>>>()?;
                (Density::Zero, atoms)
            }
            MeasureSpec::Mix { parts } => {
                let mut dens = Vec::new();
                let mut atoms = Vec::new();
                for part in parts {
                    let c: Complex64 = part.weight.into();
                    let (d, a) = part.measure.parts()?;
                    dens.push((c, d));
                    atoms.extend(a.into_iter().map(|a| Atom { point: a.point, weight: c * a.weight }));
                }
                (Density::Mix(dens), atoms)
            }
            MeasureSpec::Nlfs { coeffs } => {
                let f: Vec<Complex64> = coeffs.iter().map(|&v| v.into()).collect();
                let pair = crate::nlfs::forward(&f);
                (crate::nlfs::density_from_pair(&pair)?, Vec::new())
            }
        })
    }

    pub fn build(&self) -> Result<CircleMeasure> {
        let (density, atoms) = self.parts()?;
        CircleMeasure::new(density, atoms)
    }
}

//! SU(2)-valued nonlinear Fourier series.
//!
//! A finite coefficient sequence `F_1..F_n` defines the ordered product
//!
//! ```text
//! G_n = prod_{j=1..n} (1 + |F_j|^2)^{-1/2} [[1, F_j z^j], [-conj(F_j) z^{-j}, 1]]
//!     = [[a, b], [-star(b), star(a)]]
//! ```
//!
//! with `a` supported on frequencies `[-n, 0]` and `b` on `[1, n]`. The
//! orthogonal polynomials of class `Tminus` are recovered as
//! `phi_n = z^n (a + star(b))` and `phiTilde_n = z^n (a - star(b))`.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cmeasure::Density;
use crate::error::{Error, Result};
use crate::grid;
use crate::lpoly::LaurentPoly;

/// `2^{-1/2}`, the sharp bound on `sup |b|`.
pub const B_THRESHOLD: f64 = std::f64::consts::FRAC_1_SQRT_2;
/// Slack subtracted from [`B_THRESHOLD`] before comparing.
pub const B_MARGIN: f64 = 1e-9;
pub const SU2_TOL: f64 = 1e-8;
pub const STRIP_DEGENERATE: f64 = 1e-12;
pub const STRIP_RESIDUAL_TOL: f64 = 1e-9;
pub const LOG_FLOOR: f64 = -700.0;
pub const DEFAULT_DEGREE_CAP: usize = 256;
pub const DEFAULT_NODES: usize = 8192;
/// Grid used to check `sup |b|` when a density is built from a pair.
pub const SUP_CHECK_NODES: usize = 4096;

const TAYLOR_TERMS: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NlfsPair {
    pub a: LaurentPoly,
    pub b: LaurentPoly,
    pub n: usize,
}

fn in_window(p: &LaurentPoly, lo: i64, hi: i64) -> bool {
    p.is_zero() || (p.lo() >= lo && p.hi() <= hi)
}

impl NlfsPair {
    pub fn identity() -> Self {
        NlfsPair { a: LaurentPoly::one(), b: LaurentPoly::zero(), n: 0 }
    }

    pub fn check_support(&self) -> Result<()> {
        let n = self.n as i64;
        if !in_window(&self.a, -n, 0) {
            return Err(Error::MalformedPair(format!("a has frequencies {}..{} outside [-{n}, 0]", self.a.lo(), self.a.hi())));
        }
        if !in_window(&self.b, 1, n) {
            return Err(Error::MalformedPair(format!("b has frequencies {}..{} outside [1, {n}]", self.b.lo(), self.b.hi())));
        }
        Ok(())
    }

    /// Largest coefficient of `a star(a) + b star(b) - 1`.
    pub fn su2_residual(&self) -> f64 {
        let d = &(&self.a * &self.a.star()) + &(&self.b * &self.b.star());
        (&d - &LaurentPoly::one()).max_abs_coeff()
    }

    /// `a(0)`, the constant coefficient of `a`; real and positive for
    /// outputs of [`forward`].
    pub fn a0(&self) -> Complex64 {
        self.a.coeff(0)
    }

    /// `max |b|` over an `m`-point grid.
    pub fn sup_b(&self, m: usize) -> f64 {
        grid::eval_on_grid(&self.b, m).iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Multiplies the factors of `F_1..F_n` from left to right.
pub fn forward(f: &[Complex64]) -> NlfsPair {
    let mut a = LaurentPoly::one();
    let mut b = LaurentPoly::zero();
    for (j, &fj) in f.iter().enumerate() {
        let k = j as i64 + 1;
        let c = 1.0 / (1.0 + fj.norm_sqr()).sqrt();
        let na = &a - &b.shift(-k).scale(fj.conj());
        let nb = &a.shift(k).scale(fj) + &b;
        a = na.scale_real(c);
        b = nb.scale_real(c);
    }
    NlfsPair { a, b, n: f.len() }
}

/// `(phi_n, phiTilde_n) = (z^n (a + star(b)), z^n (a - star(b)))`
pub fn to_polys(pair: &NlfsPair) -> Result<(LaurentPoly, LaurentPoly)> {
    pair.check_support()?;
    let n = pair.n as i64;
    let bs = pair.b.star();
    Ok(((&pair.a + &bs).shift(n), (&pair.a - &bs).shift(n)))
}

/// Inverse of [`to_polys`].
pub fn from_polys(phi: &LaurentPoly, phi_tilde: &LaurentPoly, n: usize) -> Result<NlfsPair> {
    let k = -(n as i64);
    let a = (phi + phi_tilde).shift(k).scale_real(0.5);
    let b = (phi - phi_tilde).shift(k).scale_real(0.5).star();
    let pair = NlfsPair { a, b, n };
    pair.check_support()?;
    Ok(pair)
}

/// Recovers `F_1..F_n` from an exact finite pair by peeling factors from the
/// top: `F_k = b[k] / a[0]`, then the pair is multiplied on the right by the
/// inverse of factor `k` and cut back to the window of degree `k - 1`.
pub fn layer_strip(pair: &NlfsPair) -> Result<Vec<Complex64>> {
    pair.check_support()?;
    let su2 = pair.su2_residual();
    if su2 > SU2_TOL {
        return Err(Error::MalformedPair(format!("SU(2) residual {su2:e} exceeds {SU2_TOL:e}")));
    }
    let mut a = pair.a.clone();
    let mut b = pair.b.clone();
    let mut f = vec![Complex64::new(0.0, 0.0); pair.n];
    let mut discarded = 0.0f64;
    for k in (1..=pair.n).rev() {
        let a0 = a.coeff(0);
        if a0.norm() < STRIP_DEGENERATE {
            return Err(Error::StrippingDegenerate { step: pair.n - k + 1, a0: a0.norm() });
        }
        let fk = b.coeff(k as i64) / a0;
        f[k - 1] = fk;
        let c = 1.0 / (1.0 + fk.norm_sqr()).sqrt();
        let ki = k as i64;
        let na = (&a + &b.shift(-ki).scale(fk.conj())).scale_real(c);
        let nb = (&b - &a.shift(ki).scale(fk)).scale_real(c);
        let (wa, wb) = (na.window(1 - ki, 0), nb.window(1, ki - 1));
        discarded = discarded.max((&na - &wa).max_abs_coeff()).max((&nb - &wb).max_abs_coeff());
        a = wa;
        b = wb;
    }
    let residual = discarded.max((&a - &LaurentPoly::one()).max_abs_coeff()).max(b.max_abs_coeff());
    if residual > STRIP_RESIDUAL_TOL {
        return Err(Error::NotExactNlfs { residual });
    }
    Ok(f)
}

/// Result of [`layer_strip_truncated`].
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedStrip {
    pub f: Vec<Complex64>,
    /// `l2` norm of the remaining `b` after the last step.
    pub residual_b: f64,
    /// Largest coefficient dropped by the bandwidth cut.
    pub truncated: f64,
}

/// Inverse transform of a pair `(a_star, b)` whose coefficient sequence may
/// be infinite, with `a_star = star(a)` analytic and `b(0) = 0`.
///
/// Factors are peeled from the bottom, `F_k = b[k] / a_star[0]`, updating
/// ```text
/// a_star <- (a_star + conj(F_k) z^{-k} b) / sqrt(1 + |F_k|^2)
/// b      <- (b - F_k z^k a_star)          / sqrt(1 + |F_k|^2)
/// ```
/// for `k = 1..=steps`, with both series cut to degree `bandwidth`.
pub fn layer_strip_truncated(
    a_star: &LaurentPoly,
    b: &LaurentPoly,
    steps: usize,
    bandwidth: usize,
) -> Result<TruncatedStrip> {
    if !in_window(a_star, 0, i64::MAX) || !in_window(b, 1, i64::MAX) {
        return Err(Error::MalformedPair("a_star must be analytic and b must vanish at 0".into()));
    }
    let w = bandwidth as i64;
    let mut ast = a_star.window(0, w);
    let mut bb = b.window(1, w);
    let mut f = Vec::with_capacity(steps);
    let mut truncated = 0.0f64;
    for k in 1..=steps {
        let a0 = ast.coeff(0);
        if a0.norm() < STRIP_DEGENERATE {
            return Err(Error::StrippingDegenerate { step: k, a0: a0.norm() });
        }
        let ki = k as i64;
        let fk = bb.coeff(ki) / a0;
        f.push(fk);
        let c = 1.0 / (1.0 + fk.norm_sqr()).sqrt();
        let na = (&ast + &bb.shift(-ki).scale(fk.conj())).scale_real(c);
        let nb = (&bb - &ast.shift(ki).scale(fk)).scale_real(c);
        let (wa, wb) = (na.window(0, w), nb.window(ki + 1, w));
        truncated = truncated.max((&na - &wa).max_abs_coeff()).max((&nb - &wb).max_abs_coeff());
        ast = wa;
        bb = wb;
    }
    Ok(TruncatedStrip { f, residual_b: bb.l2_norm(), truncated })
}

/// Result of [`outer_from_modulus`].
#[derive(Clone, Debug, PartialEq)]
pub struct OuterFunction {
    /// Analytic polynomial of degree at most the cap.
    pub poly: LaurentPoly,
    /// Number of samples raised to the log floor.
    pub clamped: usize,
    /// `max_k ||g(node_k)| - exp(logmod_k)|` over the input grid.
    pub boundary_error: f64,
}

fn truncated_mul(p: &LaurentPoly, q: &LaurentPoly, d: i64) -> LaurentPoly {
    (p * q).window(0, d)
}

fn exp_series(h: &LaurentPoly, d: i64) -> LaurentPoly {
    let norm = h.l1_norm();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let x = h.scale_real(0.5f64.powi(squarings as i32));
    let mut term = LaurentPoly::one();
    let mut sum = LaurentPoly::one();
    for k in 1..TAYLOR_TERMS {
        term = truncated_mul(&term, &x, d).scale_real(1.0 / k as f64);
        sum = &sum + &term;
    }
    for _ in 0..squarings {
        sum = truncated_mul(&sum, &sum, d);
    }
    sum
}

/// Outer function with boundary log-modulus given by `logmod` on a uniform
/// grid, truncated to degree `degree_cap`.
///
/// With `h = u_0 + 2 sum_{1 <= k <= D} u_k z^k`, where `u_k` are the Fourier
/// coefficients of the samples, the result is `exp(u_0) exp(h - u_0)`; the
/// second factor is a 16-term Taylor series after scaling by a power of two,
/// squared back up, all truncated to degree `D`.
pub fn outer_from_modulus(logmod: &[f64], degree_cap: usize) -> Result<OuterFunction> {
    let m = logmod.len();
    if m < 4 || 2 * degree_cap >= m {
        return Err(Error::Precondition(format!("grid of {m} nodes cannot carry degree {degree_cap}")));
    }
    let mut clamped = 0;
    let vals: Vec<Complex64> = logmod
        .iter()
        .map(|&x| {
            if x.is_nan() || x < LOG_FLOOR {
                clamped += 1;
                Complex64::new(LOG_FLOOR, 0.0)
            } else {
                Complex64::new(x, 0.0)
            }
        })
        .collect();
    let u = grid::fourier_coeffs(&vals);
    let d = degree_cap as i64;
    let tail: Vec<Complex64> = (0..=degree_cap).map(|k| if k == 0 { Complex64::new(0.0, 0.0) } else { 2.0 * u[k] }).collect();
    let h = LaurentPoly::from_coeffs(tail);
    let poly = exp_series(&h, d).scale_real(u[0].re.exp());
    let boundary_error = grid::eval_on_grid(&poly, m)
        .iter()
        .zip(&vals)
        .map(|(g, l)| (g.norm() - l.re.exp()).abs())
        .fold(0.0, f64::max);
    Ok(OuterFunction { poly, clamped, boundary_error })
}

/// `w(s) = 1 / ((star(a) - b)(a + star(b)))(s)` for `|s| = 1`.
pub fn w_at(a: &LaurentPoly, b: &LaurentPoly, s: Complex64) -> Complex64 {
    let av = a.eval_unchecked(s);
    let bv = b.eval_unchecked(s);
    1.0 / ((av.conj() - bv) * (av + bv.conj()))
}

fn check_sup(b: &LaurentPoly, m: usize) -> Result<()> {
    let sup = grid::eval_on_grid(b, m).iter().map(|v| v.norm()).fold(0.0, f64::max);
    if sup >= B_THRESHOLD - B_MARGIN {
        return Err(Error::HypothesisViolated { sup });
    }
    Ok(())
}

/// Samples of `w = 1/((star(a) - b)(a + star(b)))` on an `m`-point grid.
/// Fails if `sup |b|` on the grid reaches `2^{-1/2} - 1e-9`.
pub fn w_from_ab(a: &LaurentPoly, b: &LaurentPoly, m: usize) -> Result<Vec<Complex64>> {
    check_sup(b, m)?;
    let av = grid::eval_on_grid(a, m);
    let bv = grid::eval_on_grid(b, m);
    Ok(av
        .iter()
        .zip(&bv)
        .map(|(a, b)| 1.0 / ((a.conj() - b) * (a + b.conj())))
        .collect())
}

/// Closed-form density `w` of a finite pair, evaluated exactly at any point
/// of the circle.
pub fn density_from_pair(pair: &NlfsPair) -> Result<Density> {
    pair.check_support()?;
    check_sup(&pair.b, SUP_CHECK_NODES.max(8 * (pair.n + 1)).next_power_of_two())?;
    let a = pair.a.clone();
    let b = pair.b.clone();
    Ok(Density::Func {
        label: format!("nlfs(n = {})", pair.n),
        f: Arc::new(move |s| w_at(&a, &b, s)),
    })
}

/// `((star(a) + b)(a - star(b)))^2 (s)`, which equals
/// `(star(phi_n) phiTilde_n)^2 (s)` on the circle.
pub fn convergence_functional(pair: &NlfsPair, s: Complex64) -> Result<Complex64> {
    if (s.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::Precondition(format!("point {s} is not on the unit circle")));
    }
    let av = pair.a.eval_unchecked(s);
    let bv = pair.b.eval_unchecked(s);
    let v = (av.conj() + bv) * (av - bv.conj());
    Ok(v * v)
}

//! Left and right orthogonal polynomials of a complex measure.
//!
//! For a measure `mu` with nonvanishing Toeplitz determinants there are unique
//! monic `Phi_n`, `PhiTilde_n` of degree `n` with
//! `<Phi_n, z^k>_mu = <z^k, PhiTilde_n>_mu = 0` for `k < n`. They satisfy the
//! generalized Szego recurrence
//!
//! ```text
//! Phi_{n+1}      = z Phi_n      + conj(F_{n+1})      z^n star(PhiTilde_n)
//! PhiTilde_{n+1} = z PhiTilde_n + conj(FTilde_{n+1}) z^n star(Phi_n)
//! ```
//!
//! Class `Tminus` is `FTilde = -F`, class `Tplus` is `FTilde = F`.
//! The recurrence route is the production path; the determinant route in
//! [`monic_from_moments`] serves as a cross-check and loses accuracy quickly
//! beyond degree 16.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cmeasure::{CircleMeasure, MAX_NODES};
use crate::error::{Error, Result};
use crate::grid;
use crate::lpoly::LaurentPoly;

/// Tolerance on `|F + FTilde|` and `|F - FTilde|` used for class detection.
pub const CLASS_TOL: f64 = 1e-9;
/// Relative size below which a Toeplitz determinant counts as zero.
pub const SINGULAR_TOL: f64 = 1e-10;
pub const LOG_FLOOR: f64 = -700.0;
/// Stopping tolerance when refining the Plancherel log-integral.
pub const PLANCHEREL_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassTag {
    #[serde(rename = "T")]
    T,
    #[serde(rename = "Tplus")]
    TPlus,
    #[serde(rename = "Tminus")]
    TMinus,
    #[serde(rename = "unknown")]
    Unknown,
}

/// Orthogonal polynomial ladders of degrees `0..=N` together with their
/// recurrence coefficients. `f[j - 1]` holds `F_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrthoSystem {
    pub f: Vec<Complex64>,
    pub f_tilde: Vec<Complex64>,
    pub monic: Vec<LaurentPoly>,
    pub monic_tilde: Vec<LaurentPoly>,
    pub phi: Vec<LaurentPoly>,
    pub phi_tilde: Vec<LaurentPoly>,
    /// `<Phi_n, PhiTilde_n>_mu`, i.e. `prod_{j <= n} (1 + |F_j|^2)` in class
    /// `Tminus` and `prod_{j <= n} (1 - |F_j|^2)` in class `Tplus`.
    pub norms: Vec<f64>,
    pub class: ClassTag,
}

impl OrthoSystem {
    /// Top degree `N`.
    pub fn degree(&self) -> usize {
        self.f.len()
    }
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// Builds the ladders from recurrence coefficients `F_1..F_N`.
///
/// In class `Tminus` the normalized ladder is produced directly by
/// ```text
/// phi_{n+1}      = (z phi_n      + conj(F) z^n star(phiTilde_n)) / sqrt(1 + |F|^2)
/// phiTilde_{n+1} = (z phiTilde_n - conj(F) z^n star(phi_n))      / sqrt(1 + |F|^2)
/// ```
/// and `Phi_n = sqrt(norms[n]) phi_n`. In class `Tplus` the monic ladder is
/// produced first and divided by `sqrt|norms[n]|`; this fails if some
/// `|F_j| = 1`, where the normalization is undefined.
pub fn ladder_from_coeffs(f: &[Complex64], class: ClassTag) -> Result<OrthoSystem> {
    match class {
        ClassTag::TMinus => Ok(ladder_tminus(f)),
        ClassTag::TPlus => ladder_tplus(f),
        other => Err(Error::Domain(format!("no recurrence ladder for class {other:?}"))),
    }
}

fn ladder_tminus(f: &[Complex64]) -> OrthoSystem {
    let n = f.len();
    let mut phi = Vec::with_capacity(n + 1);
    let mut phi_tilde = Vec::with_capacity(n + 1);
    let mut norms = Vec::with_capacity(n + 1);
    phi.push(LaurentPoly::one());
    phi_tilde.push(LaurentPoly::one());
    norms.push(1.0);
    for (k, &fk) in f.iter().enumerate() {
        let p = &phi[k];
        let q = &phi_tilde[k];
        let c = 1.0 / (1.0 + fk.norm_sqr()).sqrt();
        let zp = p.shift(1);
        let zq = q.shift(1);
        let tq = q.star().shift(k as i64).scale(fk.conj());
        let tp = p.star().shift(k as i64).scale(fk.conj());
        phi.push((&zp + &tq).scale_real(c));
        phi_tilde.push((&zq - &tp).scale_real(c));
        norms.push(norms[k] * (1.0 + fk.norm_sqr()));
    }
    let monic = phi.iter().zip(&norms).map(|(p, &s)| p.scale_real(s.sqrt())).collect();
    let monic_tilde = phi_tilde.iter().zip(&norms).map(|(p, &s)| p.scale_real(s.sqrt())).collect();
    OrthoSystem {
        f: f.to_vec(),
        f_tilde: f.iter().map(|x| -x).collect(),
        monic,
        monic_tilde,
        phi,
        phi_tilde,
        norms,
        class: ClassTag::TMinus,
    }
}

fn ladder_tplus(f: &[Complex64]) -> Result<OrthoSystem> {
    let n = f.len();
    let mut monic = Vec::with_capacity(n + 1);
    let mut monic_tilde = Vec::with_capacity(n + 1);
    let mut norms = Vec::with_capacity(n + 1);
    monic.push(LaurentPoly::one());
    monic_tilde.push(LaurentPoly::one());
    norms.push(1.0);
    for (k, &fk) in f.iter().enumerate() {
        let p: &LaurentPoly = &monic[k];
        let q: &LaurentPoly = &monic_tilde[k];
        let next = &p.shift(1) + &q.star().shift(k as i64).scale(fk.conj());
        let next_tilde = &q.shift(1) + &p.star().shift(k as i64).scale(fk.conj());
        monic.push(next);
        monic_tilde.push(next_tilde);
        let s = norms[k] * (1.0 - fk.norm_sqr());
        if s == 0.0 {
            return Err(Error::Domain(format!("|F_{}| = 1 leaves the Tplus ladder unnormalizable", k + 1)));
        }
        norms.push(s);
    }
    let phi = monic.iter().zip(&norms).map(|(p, &s)| p.scale_real(1.0 / s.abs().sqrt())).collect();
    let phi_tilde = monic_tilde
        .iter()
        .zip(&norms)
        .map(|(p, &s)| p.scale_real(1.0 / s.abs().sqrt()))
        .collect();
    Ok(OrthoSystem {
        f: f.to_vec(),
        f_tilde: f.to_vec(),
        monic,
        monic_tilde,
        phi,
        phi_tilde,
        norms,
        class: ClassTag::TPlus,
    })
}

/// Values `(phi_k(s), phiTilde_k(s))` for `k = 0..=n` of the `Tminus` ladder
/// at a point `s` of the unit circle, by the scalar recurrence. Coefficients
/// beyond `f.len()` are taken to be zero. Costs `O(n)` per point.
pub fn circle_values(f: &[Complex64], s: Complex64, n: usize) -> Vec<(Complex64, Complex64)> {
    let mut out = Vec::with_capacity(n + 1);
    let (mut p, mut q) = (one(), one());
    let mut sk = one();
    out.push((p, q));
    for k in 0..n {
        let fk = f.get(k).copied().unwrap_or_default();
        let c = 1.0 / (1.0 + fk.norm_sqr()).sqrt();
        // star(g)(s) = conj(g(s)) on the circle
        let np = (s * p + sk * fk.conj() * q.conj()) * c;
        let nq = (s * q - sk * fk.conj() * p.conj()) * c;
        p = np;
        q = nq;
        sk *= s;
        out.push((p, q));
    }
    out
}

/// Output of [`monic_from_moments`].
#[derive(Clone, Debug)]
pub struct MomentLadder {
    pub monic: LaurentPoly,
    pub monic_tilde: LaurentPoly,
    /// Toeplitz determinants `Delta_0..Delta_{n-1}` of `mu`.
    pub deltas: Vec<Complex64>,
}

fn toeplitz(c: &dyn Fn(i64) -> Complex64, k: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(k + 1, k + 1, |i, j| c(i as i64 - j as i64))
}

fn checked_det(m: DMatrix<Complex64>, k: usize) -> Result<Complex64> {
    let scale: f64 = m.row_iter().map(|r| r.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()).product();
    let det = m.lu().determinant();
    if !(det.norm() >= SINGULAR_TOL * scale) {
        return Err(Error::NearSingularMoments { k, det: det.norm() });
    }
    Ok(det)
}

/// Heine's formula: the coefficient of `z^(n-j)` in `Phi_n` is
/// `(-1)^j minor_j / Delta_{n-1}`, where `minor_j` deletes column `j` from the
/// rows `[c_{i-0}, ..., c_{i-n}]`, `i = 1..=n`.
fn heine(c: &dyn Fn(i64) -> Complex64, n: usize) -> Result<(LaurentPoly, Vec<Complex64>)> {
    let mut deltas = Vec::with_capacity(n);
    for k in 0..n {
        deltas.push(checked_det(toeplitz(c, k), k)?);
    }
    if n == 0 {
        return Ok((LaurentPoly::one(), deltas));
    }
    let rows = DMatrix::from_fn(n, n + 1, |i, j| c(i as i64 + 1 - j as i64));
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    for j in 0..=n {
        let minor = rows.clone().remove_column(j).lu().determinant();
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        coeffs[n - j] = minor * sign / deltas[n - 1];
    }
    Ok((LaurentPoly::from_coeffs(coeffs), deltas))
}

/// Monic `Phi_n` and `PhiTilde_n` from the moments of `mu` by Heine's
/// determinant formula. `PhiTilde_n` comes from the conjugate measure, whose
/// moments are `conj(c_{-j})`. `m` is the starting node count for the
/// moment quadrature.
pub fn monic_from_moments(mu: &CircleMeasure, n: usize, m: usize) -> Result<MomentLadder> {
    let table = mu.moment_table(-(n as i64), n as i64, m)?;
    let c = |j: i64| table.get(j);
    let d = |j: i64| table.get(-j).conj();
    let (monic, deltas) = heine(&c, n)?;
    let (monic_tilde, _) = heine(&d, n)?;
    Ok(MomentLadder { monic, monic_tilde, deltas })
}

/// Recurrence coefficients of `mu` up to index `n` by the generalized
/// Levinson recursion. With `h_k = <Phi_k, PhiTilde_k>_mu`,
///
/// ```text
/// conj(F_{k+1}) = -<z Phi_k, 1>_mu / h_k
/// FTilde_{k+1}  = -<1, z PhiTilde_k>_mu / h_k
/// h_{k+1}       = h_k (1 - conj(F_{k+1}) FTilde_{k+1})
/// ```
///
/// Unlike [`monic_from_moments`] this stays accurate at high degree. The
/// class is detected as in [`extract_coeffs`].
pub fn coeffs_from_moments(mu: &CircleMeasure, n: usize, m: usize) -> Result<Extracted> {
    let top = n as i64 + 1;
    let table = mu.moment_table(-top, top, m)?;
    let mut p = LaurentPoly::one();
    let mut q = LaurentPoly::one();
    let mut h = one();
    let mut f = Vec::with_capacity(n);
    let mut f_tilde = Vec::with_capacity(n);
    for k in 0..n {
        if h.norm() < SINGULAR_TOL {
            return Err(Error::NearSingularMoments { k, det: h.norm() });
        }
        let zp: Complex64 = p.coeffs().iter().enumerate().map(|(i, c)| c * table.get(i as i64 + 1)).sum();
        let zq: Complex64 = q.coeffs().iter().enumerate().map(|(i, c)| c.conj() * table.get(-(i as i64) - 1)).sum();
        let fk_conj = -zp / h;
        let ftk = -zq / h;
        let next = &p.shift(1) + &q.star().shift(k as i64).scale(fk_conj);
        let next_tilde = &q.shift(1) + &p.star().shift(k as i64).scale(ftk.conj());
        p = next;
        q = next_tilde;
        h *= 1.0 - fk_conj * ftk;
        f.push(fk_conj.conj());
        f_tilde.push(ftk);
    }
    Ok(classify(f, f_tilde))
}

/// Ladder of `mu` up to degree `n` through [`coeffs_from_moments`]; fails
/// for measures outside `Tplus` and `Tminus`.
pub fn system_from_moments(mu: &CircleMeasure, n: usize, m: usize) -> Result<OrthoSystem> {
    let ex = coeffs_from_moments(mu, n, m)?;
    match ex.class {
        ClassTag::TMinus | ClassTag::TPlus => ladder_from_coeffs(&ex.f, ex.class),
        other => Err(Error::Domain(format!("measure has class {other:?}; no normalized ladder is built"))),
    }
}

fn classify(f: Vec<Complex64>, f_tilde: Vec<Complex64>) -> Extracted {
    let minus = f.iter().zip(&f_tilde).map(|(a, b)| (a + b).norm()).fold(0.0, f64::max) < CLASS_TOL;
    let plus = f.iter().zip(&f_tilde).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) < CLASS_TOL;
    let class = match (minus, plus) {
        (true, _) => ClassTag::TMinus,
        (false, true) => ClassTag::TPlus,
        (false, false) => ClassTag::T,
    };
    Extracted { f, f_tilde, class, both_classes: minus && plus }
}

/// Output of [`extract_coeffs`].
#[derive(Clone, Debug, PartialEq)]
pub struct Extracted {
    pub f: Vec<Complex64>,
    pub f_tilde: Vec<Complex64>,
    pub class: ClassTag,
    /// Set when the coefficients fit both `Tplus` and `Tminus`, i.e. all of
    /// them vanish; `class` is then `TMinus`.
    pub both_classes: bool,
}

/// Recovers `F` and `FTilde` from ladders with `ladder[n]` of exact degree
/// `n`, as `F_{n+1} = conj(P_{n+1}(0) / lead(P_{n+1}))`. For monic ladders
/// this is `conj(Phi_{n+1}(0))`; the division makes normalized ladders
/// acceptable too.
pub fn extract_coeffs(ladder: &[LaurentPoly], ladder_tilde: &[LaurentPoly]) -> Result<Extracted> {
    if ladder.len() != ladder_tilde.len() || ladder.is_empty() {
        return Err(Error::MalformedLadder(format!(
            "ladders of lengths {} and {}",
            ladder.len(),
            ladder_tilde.len()
        )));
    }
    let ratio = |p: &LaurentPoly, n: usize| -> Result<Complex64> {
        if p.is_zero() || p.lo() < 0 || p.hi() != n as i64 {
            return Err(Error::MalformedLadder(format!("entry {n} is not a polynomial of degree {n}")));
        }
        Ok((p.coeff(0) / p.leading()).conj())
    };
    let mut f = Vec::new();
    let mut f_tilde = Vec::new();
    for (n, (p, q)) in ladder.iter().zip(ladder_tilde).enumerate() {
        let a = ratio(p, n)?;
        let b = ratio(q, n)?;
        if n > 0 {
            f.push(a);
            f_tilde.push(b);
        }
    }
    Ok(classify(f, f_tilde))
}

/// Residuals reported by [`verify_system`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemReport {
    /// `max_{j,k} |<phi_j, phiTilde_k>_mu - delta_jk|`
    pub orthonormality: f64,
    /// `max_n max_grid ||phi_n|^2 + |phiTilde_n|^2 - 2|`
    pub determinant: f64,
    /// `max_n |<Phi_n, PhiTilde_n>_mu - norms[n]|`
    pub norm_identity: f64,
}

impl SystemReport {
    pub fn max(&self) -> f64 {
        self.orthonormality.max(self.determinant).max(self.norm_identity)
    }
}

/// Checks the ladders of `sys` against `mu`. `m` is the quadrature grid for
/// the moments (a starting size for closed-form densities) and the grid for
/// the pointwise determinant identity.
pub fn verify_system(sys: &OrthoSystem, mu: &CircleMeasure, m: usize) -> Result<SystemReport> {
    let n = sys.degree() as i64;
    let table = mu.moment_table(-n, n, m)?;
    let mut orth: f64 = 0.0;
    for (j, p) in sys.phi.iter().enumerate() {
        for (k, q) in sys.phi_tilde.iter().enumerate() {
            let target = if j == k { 1.0 } else { 0.0 };
            orth = orth.max((table.pairing(p, q) - target).norm());
        }
    }
    let mut det: f64 = 0.0;
    for (p, q) in sys.phi.iter().zip(&sys.phi_tilde) {
        let pv = grid::eval_on_grid(p, m);
        let qv = grid::eval_on_grid(q, m);
        for (a, b) in pv.iter().zip(&qv) {
            det = det.max((a.norm_sqr() + b.norm_sqr() - 2.0).abs());
        }
    }
    let norm_identity = sys
        .monic
        .iter()
        .zip(&sys.monic_tilde)
        .zip(&sys.norms)
        .map(|((p, q), &s)| (table.pairing(p, q) - s).norm())
        .fold(0.0, f64::max);
    Ok(SystemReport { orthonormality: orth, determinant: det, norm_identity })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlancherelReport {
    /// `-2 int log |u| dm` with `u = (star(phi_l) phi_m + star(phiTilde_l) phiTilde_m) / 2`
    pub lhs: f64,
    /// `sum_{l < j <= m} log(1 + |F_j|^2)`
    pub rhs: f64,
    /// Number of nodes where `log |u|` was clamped to the floor.
    pub clamped: usize,
    /// Grid size at which the log-integral settled.
    pub nodes: usize,
}

/// Both sides of the Plancherel type inequality `lhs <= rhs` between
/// degrees `l < m`, with `nodes` quadrature points.
pub fn plancherel_check(sys: &OrthoSystem, l: usize, m: usize, nodes: usize) -> Result<PlancherelReport> {
    if l >= m || m > sys.degree() {
        return Err(Error::Precondition(format!("need 0 <= l < m <= {}, got l = {l}, m = {m}", sys.degree())));
    }
    let u = (&(&sys.phi[l].star() * &sys.phi[m]) + &(&sys.phi_tilde[l].star() * &sys.phi_tilde[m])).scale_real(0.5);
    let rhs = sys.f[l..m].iter().map(|x| (1.0 + x.norm_sqr()).ln()).sum();
    let mut size = nodes.max(2 * u.len()).next_power_of_two();
    let mut prev = log_mean(&u, size);
    while size < MAX_NODES {
        size *= 2;
        let next = log_mean(&u, size);
        let done = (next.0 - prev.0).abs() <= PLANCHEREL_TOL;
        prev = next;
        if done {
            break;
        }
    }
    Ok(PlancherelReport { lhs: -2.0 * prev.0, rhs, clamped: prev.1, nodes: size })
}

fn log_mean(u: &LaurentPoly, nodes: usize) -> (f64, usize) {
    let mut clamped = 0;
    let acc: f64 = grid::eval_on_grid(u, nodes)
        .iter()
        .map(|v| {
            let lg = v.norm().ln();
            if lg >= LOG_FLOOR {
                lg
            } else {
                clamped += 1;
                LOG_FLOOR
            }
        })
        .sum();
    (acc / nodes as f64, clamped)
}

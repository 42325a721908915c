//! Laurent polynomials with complex coefficients.
//!
//! A [`LaurentPoly`] stores a dense coefficient window `lo..=hi`. All the
//! polynomials that appear in this crate (orthogonal polynomials, the entries
//! of the nonlinear Fourier series, reproducing kernels in one variable) are
//! dense in their windows, so no sparse representation is provided.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Products longer than this are computed with an FFT convolution.
pub const FFT_THRESHOLD: usize = 128;

const NEWTON_STEPS: usize = 5;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LaurentPoly {
    lo: i64,
    coeffs: Vec<Complex64>,
}

impl LaurentPoly {
    /// Builds `sum_k coeffs[k] z^(lo + k)` and trims exact zeros at both ends.
    pub fn new(lo: i64, coeffs: Vec<Complex64>) -> Self {
        let mut p = LaurentPoly { lo, coeffs };
        p.trim();
        p
    }

    /// Ordinary polynomial `sum_k coeffs[k] z^k`.
    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Self {
        Self::new(0, coeffs)
    }

    pub fn from_real(lo: i64, coeffs: &[f64]) -> Self {
        Self::new(lo, coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        LaurentPoly { lo: 0, coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(0, vec![c])
    }

    /// `c z^k`
    pub fn monomial(k: i64, c: Complex64) -> Self {
        Self::new(k, vec![c])
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Highest frequency; equals `lo - 1` for the zero polynomial.
    pub fn hi(&self) -> i64 {
        self.lo + self.coeffs.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `z^k`, zero outside the window.
    pub fn coeff(&self, k: i64) -> Complex64 {
        if self.coeffs.is_empty() || k < self.lo || k > self.hi() {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k - self.lo) as usize]
        }
    }

    /// Leading coefficient (highest frequency), zero for the zero polynomial.
    pub fn leading(&self) -> Complex64 {
        self.coeffs.last().copied().unwrap_or_default()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Euclidean norm of the coefficient vector (the L2 norm on the circle).
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Removes exact zeros at both ends. The zero polynomial becomes `lo = 0`
    /// with no coefficients.
    pub fn trim(&mut self) {
        self.chop(0.0);
    }

    /// Like [`trim`](Self::trim) but treats coefficients with modulus `<= tol`
    /// at either end as zero.
    pub fn chop(&mut self, tol: f64) {
        let start = self.coeffs.iter().position(|c| c.norm() > tol);
        match start {
            None => {
                self.lo = 0;
                self.coeffs.clear();
            }
            Some(start) => {
                let end = self.coeffs.iter().rposition(|c| c.norm() > tol).unwrap();
                self.coeffs.truncate(end + 1);
                self.coeffs.drain(..start);
                self.lo += start as i64;
            }
        }
    }

    pub fn chopped(mut self, tol: f64) -> Self {
        self.chop(tol);
        self
    }

    /// `g*(z) = conj(g(1 / conj z))`: reflects frequencies and conjugates
    /// coefficients. On the unit circle this is complex conjugation.
    pub fn star(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let coeffs = self.coeffs.iter().rev().map(|c| c.conj()).collect();
        LaurentPoly { lo: -self.hi(), coeffs }
    }

    /// Multiplies by `z^k`.
    pub fn shift(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        LaurentPoly { lo: self.lo + k, coeffs: self.coeffs.clone() }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(self.lo, self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    /// Keeps only the frequencies in `lo..=hi`.
    pub fn window(&self, lo: i64, hi: i64) -> Self {
        if hi < lo {
            return Self::zero();
        }
        let coeffs = (lo..=hi).map(|k| self.coeff(k)).collect();
        Self::new(lo, coeffs)
    }

    /// Sum of absolute coefficient values; an upper bound of `|p|` on the circle.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// Horner evaluation. Rounding error is bounded by roughly
    /// `eps * len * max|c| * max(|z|, 1/|z|)^max(|lo|, |hi|)`.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if self.is_zero() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if z == Complex64::new(0.0, 0.0) && self.lo < 0 {
            return Err(Error::Domain("evaluation at 0 with negative frequencies".into()));
        }
        Ok(self.eval_unchecked(z))
    }

    /// Horner evaluation without the `z = 0` check.
    pub fn eval_unchecked(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        if self.lo == 0 {
            acc
        } else {
            acc * z.powi(self.lo as i32)
        }
    }

    /// Evaluates at `e^{i theta}`.
    pub fn eval_angle(&self, theta: f64) -> Complex64 {
        self.eval_unchecked(Complex64::from_polar(1.0, theta))
    }

    /// Coefficient-wise derivative of the polynomial part `z^(-lo) p`.
    fn poly_part_derivative(coeffs: &[Complex64]) -> Vec<Complex64> {
        coeffs.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect()
    }

    pub fn mul_direct(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.len() + other.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(self.lo + other.lo, out)
    }

    pub fn mul_fft(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let out_len = self.len() + other.len() - 1;
        let size = out_len.next_power_of_two();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(size);
        let inv = planner.plan_fft_inverse(size);
        let mut a = vec![Complex64::new(0.0, 0.0); size];
        let mut b = vec![Complex64::new(0.0, 0.0); size];
        a[..self.len()].copy_from_slice(&self.coeffs);
        b[..other.len()].copy_from_slice(&other.coeffs);
        fwd.process(&mut a);
        fwd.process(&mut b);
        for (x, y) in a.iter_mut().zip(&b) {
            *x *= y;
        }
        inv.process(&mut a);
        let norm = 1.0 / size as f64;
        a.truncate(out_len);
        for x in a.iter_mut() {
            *x *= norm;
        }
        Self::new(self.lo + other.lo, a)
    }

    /// Roots of the polynomial.
    ///
    /// For `lo >= 0` the polynomial is taken as it stands, so `z^lo` contributes
    /// a root at 0 of multiplicity `lo`. For `lo < 0` the Laurent factor
    /// `z^lo` is divided out first. The nonzero roots are eigenvalues of the
    /// balanced companion matrix, each polished independently by at most five
    /// Newton steps.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        if self.is_zero() {
            return Err(Error::Domain("roots of the zero polynomial".into()));
        }
        let zero_roots = self.lo.max(0) as usize;
        let mut roots = vec![Complex64::new(0.0, 0.0); zero_roots];
        let degree = self.len() - 1;
        if degree == 0 {
            return Ok(roots);
        }
        let lead = self.leading();
        let monic: Vec<Complex64> = self.coeffs.iter().map(|c| c / lead).collect();
        let companion = balance(companion_matrix(&monic));
        let eig = companion
            .schur()
            .eigenvalues()
            .ok_or_else(|| Error::RootFinding("Schur iteration did not converge".into()))?;
        let deriv = Self::poly_part_derivative(&self.coeffs);
        for &z0 in eig.iter() {
            roots.push(newton_polish(&self.coeffs, &deriv, z0));
        }
        Ok(roots)
    }

    /// `prod_i (z - r_i)`, with the factors multiplied in Leja order to keep
    /// intermediate coefficients small.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        leja_order(roots).iter().fold(Self::one(), |acc, &r| {
            acc.mul_direct(&Self::new(0, vec![-r, Complex64::new(1.0, 0.0)]))
        })
    }
}

/// Greedy Leja ordering: start from the largest point, then repeatedly take
/// the point maximizing the product of distances to those already taken.
fn leja_order(points: &[Complex64]) -> Vec<Complex64> {
    let mut rest = points.to_vec();
    let mut out = Vec::with_capacity(points.len());
    let Some(first) = (0..rest.len()).max_by(|&i, &j| rest[i].norm().total_cmp(&rest[j].norm())) else {
        return out;
    };
    out.push(rest.swap_remove(first));
    let mut score: Vec<f64> = rest.iter().map(|p| (p - out[0]).norm().ln()).collect();
    while !rest.is_empty() {
        let k = (0..rest.len()).max_by(|&i, &j| score[i].total_cmp(&score[j])).unwrap();
        let p = rest.swap_remove(k);
        score.swap_remove(k);
        for (s, q) in score.iter_mut().zip(&rest) {
            *s += (q - p).norm().ln();
        }
        out.push(p);
    }
    out
}

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

fn newton_polish(coeffs: &[Complex64], deriv: &[Complex64], z0: Complex64) -> Complex64 {
    let mut z = z0;
    let mut res = horner(coeffs, z).norm();
    for _ in 0..NEWTON_STEPS {
        let d = horner(deriv, z);
        if d.norm() == 0.0 {
            break;
        }
        let candidate = z - horner(coeffs, z) / d;
        let cres = horner(coeffs, candidate).norm();
        if !(cres < res) {
            break;
        }
        z = candidate;
        res = cres;
    }
    z
}

/// Companion matrix of a monic polynomial given low-to-high.
fn companion_matrix(monic: &[Complex64]) -> DMatrix<Complex64> {
    let n = monic.len() - 1;
    let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for i in 1..n {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        m[(i, n - 1)] = -monic[i];
    }
    m
}

/// Parlett-Reinsch diagonal similarity balancing with powers of two.
fn balance(mut m: DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = m.nrows();
    let radix = 2.0_f64;
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].norm();
                    r += m[(i, j)].norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let g = r / radix;
            while c < g {
                f *= radix;
                c *= radix * radix;
            }
            let g = r * radix;
            while c > g {
                f /= radix;
                c /= radix * radix;
            }
            if (c + r) / f < 0.95 * s {
                converged = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
    }
    m
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, other: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        let coeffs = (lo..=hi).map(|k| self.coeff(k) + other.coeff(k)).collect();
        LaurentPoly::new(lo, coeffs)
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, other: &LaurentPoly) -> LaurentPoly {
        self + &(-other)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly { lo: self.lo, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    /// Direct convolution for short products, FFT above [`FFT_THRESHOLD`].
    fn mul(self, other: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() || other.is_zero() {
            return LaurentPoly::zero();
        }
        if self.len() + other.len() - 1 > FFT_THRESHOLD {
            self.mul_fft(other)
        } else {
            self.mul_direct(other)
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, other: LaurentPoly) -> LaurentPoly {
                (&self).$m(&other)
            }
        }
        impl $tr<&LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, other: &LaurentPoly) -> LaurentPoly {
                (&self).$m(other)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

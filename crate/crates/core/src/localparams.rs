//! Local parameters of the orthogonal polynomials at a point of the circle.
//!
//! With `gamma_n = e^{i pi / n}`,
//!
//! ```text
//! A = (phi_n(s) - phi_n(s gamma_n)) / (2 s^n)      B = (phi_n(s) + phi_n(s gamma_n)) / 2
//! ```
//!
//! so that `A z^n + B` interpolates `phi_n` at `s` and `s gamma_n`. The tilde
//! versions use `phiTilde_n`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cmeasure::CircleMeasure;
use crate::error::{Error, Result};
use crate::szego::OrthoSystem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    SmallA,
    SmallB,
    BothLarge,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalParams {
    pub s: Complex64,
    pub n: usize,
    pub a: Complex64,
    pub b: Complex64,
    pub a_tilde: Complex64,
    pub b_tilde: Complex64,
}

impl LocalParams {
    /// `|A|^2 + |B|^2 + |ATilde|^2 + |BTilde|^2`, equal to 2.
    pub fn sum_of_squares(&self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr() + self.a_tilde.norm_sqr() + self.b_tilde.norm_sqr()
    }

    /// Buckets the sample by which of `|A|`, `|B|` falls below `delta`.
    pub fn region(&self, delta: f64) -> Region {
        if self.a.norm() < delta {
            Region::SmallA
        } else if self.b.norm() < delta {
            Region::SmallB
        } else {
            Region::BothLarge
        }
    }

    /// `A z^n + B`
    pub fn model(&self, z: Complex64) -> Complex64 {
        self.a * z.powu(self.n as u32) + self.b
    }
}

fn check_point(sys: &OrthoSystem, s: Complex64, n: usize) -> Result<()> {
    if (s.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::Precondition(format!("|s| = {} is not 1", s.norm())));
    }
    if n == 0 || n > sys.degree() {
        return Err(Error::Precondition(format!("need 1 <= n <= {}, got {n}", sys.degree())));
    }
    Ok(())
}

pub fn gamma(n: usize) -> Complex64 {
    Complex64::from_polar(1.0, PI / n as f64)
}

pub fn local_params(sys: &OrthoSystem, s: Complex64, n: usize) -> Result<LocalParams> {
    check_point(sys, s, n)?;
    let t = s * gamma(n);
    let sn = s.powu(n as u32);
    let (p, q) = (&sys.phi[n], &sys.phi_tilde[n]);
    let (ps, pt) = (p.eval_unchecked(s), p.eval_unchecked(t));
    let (qs, qt) = (q.eval_unchecked(s), q.eval_unchecked(t));
    Ok(LocalParams {
        s,
        n,
        a: (ps - pt) / (2.0 * sn),
        b: (ps + pt) / 2.0,
        a_tilde: (qs - qt) / (2.0 * sn),
        b_tilde: (qs + qt) / 2.0,
    })
}

/// `|phi_n(z) - A z^n - B|`, for `C >= 4`, `n >= 4C` and `|z - s| <= C/n`.
pub fn local_approx_error(sys: &OrthoSystem, s: Complex64, n: usize, z: Complex64, c: f64) -> Result<f64> {
    check_point(sys, s, n)?;
    let nf = n as f64;
    if c < 4.0 || nf < 4.0 * c {
        return Err(Error::Precondition(format!("need C >= 4 and n >= 4C, got C = {c}, n = {n}")));
    }
    if (z - s).norm() > c / nf {
        return Err(Error::Precondition(format!("|z - s| = {} > C/n = {}", (z - s).norm(), c / nf)));
    }
    let lp = local_params(sys, s, n)?;
    Ok((sys.phi[n].eval_unchecked(z) - lp.model(z)).norm())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbDiagnostics {
    /// `|A conj(B) + ATilde conj(BTilde)|`
    pub prod: f64,
    /// `|-ATilde conj(A) + BTilde conj(B) + 1/conj(w(s))|`
    pub diff: f64,
    /// `1/conj(w(s))`
    pub w_inv: Complex64,
}

pub fn ab_diagnostics(sys: &OrthoSystem, mu: &CircleMeasure, s: Complex64, n: usize) -> Result<AbDiagnostics> {
    let lp = local_params(sys, s, n)?;
    let w_inv = 1.0 / mu.density_at(s).conj();
    Ok(AbDiagnostics {
        prod: (lp.a * lp.b.conj() + lp.a_tilde * lp.b_tilde.conj()).norm(),
        diff: (-lp.a_tilde * lp.a.conj() + lp.b_tilde * lp.b.conj() + w_inv).norm(),
        w_inv,
    })
}

/// `min { |z - s| : phi_n(z) = 0 }`
pub fn zero_distance(sys: &OrthoSystem, s: Complex64, n: usize) -> Result<f64> {
    if n == 0 || n > sys.degree() {
        return Err(Error::Precondition(format!("need 1 <= n <= {}, got {n}", sys.degree())));
    }
    Ok(sys.phi[n]
        .roots()?
        .iter()
        .map(|r| (r - s).norm())
        .fold(f64::INFINITY, f64::min))
}

/// One line of a local-parameter sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalRow {
    pub s_re: f64,
    pub s_im: f64,
    pub n: usize,
    pub abs_a: f64,
    pub abs_b: f64,
    pub abs_a_tilde: f64,
    pub abs_b_tilde: f64,
    pub prod: f64,
    pub diff: f64,
    pub zero_distance: f64,
}

impl LocalRow {
    pub fn compute(sys: &OrthoSystem, mu: &CircleMeasure, s: Complex64, n: usize) -> Result<Self> {
        let lp = local_params(sys, s, n)?;
        let ab = ab_diagnostics(sys, mu, s, n)?;
        Ok(LocalRow {
            s_re: s.re,
            s_im: s.im,
            n,
            abs_a: lp.a.norm(),
            abs_b: lp.b.norm(),
            abs_a_tilde: lp.a_tilde.norm(),
            abs_b_tilde: lp.b_tilde.norm(),
            prod: ab.prod,
            diff: ab.diff,
            zero_distance: zero_distance(sys, s, n)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::szego::{ladder_from_coeffs, ClassTag};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mu_r_system(r: f64, n: usize) -> OrthoSystem {
        let mut f = vec![c(0.0, 0.0); n];
        f[0] = c(r, 0.0);
        ladder_from_coeffs(&f, ClassTag::TMinus).unwrap()
    }

    #[test]
    fn zero_system_parameters() {
        let sys = ladder_from_coeffs(&[c(0.0, 0.0); 7], ClassTag::TMinus).unwrap();
        let s = Complex64::from_polar(1.0, 1.1);
        let lp = local_params(&sys, s, 7).unwrap();
        assert!((lp.a - 1.0).norm() < 1e-14 && lp.b.norm() < 1e-14);
        assert!((lp.a_tilde - 1.0).norm() < 1e-14 && lp.b_tilde.norm() < 1e-14);
        let ab = ab_diagnostics(&sys, &CircleMeasure::uniform(), s, 7).unwrap();
        assert!(ab.prod < 1e-14 && ab.diff < 1e-14);
        assert!((zero_distance(&sys, s, 7).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sum_of_squares_and_bounds() {
        let f: Vec<Complex64> = (0..30).map(|k| c((k as f64 * 0.9).sin(), (k as f64 * 0.4).cos() * 0.7)).collect();
        let sys = ladder_from_coeffs(&f, ClassTag::TMinus).unwrap();
        for n in [1, 5, 17, 30] {
            for t in [0.0, 0.7, 2.9, 5.5] {
                let lp = local_params(&sys, Complex64::from_polar(1.0, t), n).unwrap();
                assert!((lp.sum_of_squares() - 2.0).abs() < 1e-10);
                for v in [lp.a, lp.b, lp.a_tilde, lp.b_tilde] {
                    assert!(v.norm() <= 2f64.sqrt() + 1e-10);
                }
            }
        }
    }

    #[test]
    fn mu_r_small_b() {
        let r = 0.5;
        let sys = mu_r_system(r, 40);
        let s = c(0.0, 1.0);
        for n in [4, 10, 40] {
            let lp = local_params(&sys, s, n).unwrap();
            let g = gamma(n);
            let expected = r * s.powu(n as u32 - 1) * (1.0 - g.inv()) / (2.0 * (1.0 + r * r).sqrt());
            assert!((lp.b - expected).norm() < 1e-13);
            assert!(lp.b.norm() <= 4.0 * r / n as f64);
        }
    }

    #[test]
    fn interpolation_nodes_are_exact() {
        let sys = mu_r_system(0.3, 20);
        let s = Complex64::from_polar(1.0, 0.4);
        assert!(local_approx_error(&sys, s, 20, s, 4.0).unwrap() < 1e-12);
        assert!(local_approx_error(&sys, s, 20, s * gamma(20), 4.0).unwrap() < 1e-12);
        assert!(local_approx_error(&sys, s, 12, s, 4.0).is_err());
        assert!(local_approx_error(&sys, s, 20, s * 1.5, 4.0).is_err());
    }

    #[test]
    fn mu_r_first_degree_zero() {
        let sys = mu_r_system(0.5, 1);
        let s = Complex64::from_polar(1.0, 2.0);
        assert!((zero_distance(&sys, s, 1).unwrap() - (c(-0.5, 0.0) - s).norm()).abs() < 1e-12);
    }

    #[test]
    fn diagnostics_decay_for_mu_r() {
        let mu = CircleMeasure::mu_r(0.5).unwrap();
        let sys = mu_r_system(0.5, 256);
        let s = c(0.0, 1.0);
        let small = ab_diagnostics(&sys, &mu, s, 8).unwrap();
        let large = ab_diagnostics(&sys, &mu, s, 256).unwrap();
        assert!(large.prod < small.prod && large.diff < small.diff);
        assert!(mu.density_at(s).norm() >= 1.0);
    }

    #[test]
    fn continuity_in_degree() {
        let f: Vec<Complex64> = (0..25).map(|k| c((k as f64 * 1.7).cos() * 0.3, (k as f64).sin() * 0.2)).collect();
        let sys = ladder_from_coeffs(&f, ClassTag::TMinus).unwrap();
        let s = Complex64::from_polar(1.0, 0.9);
        for (n, fn1) in f.iter().enumerate().skip(1) {
            let step = (sys.phi[n + 1].eval_unchecked(s) - s * sys.phi[n].eval_unchecked(s)).norm();
            assert!(step <= 4.0 * fn1.norm() + 1e-12);
            let (p, q) = (local_params(&sys, s, n).unwrap(), local_params(&sys, s, n + 1).unwrap());
            let slack = 8.0 * fn1.norm() + 1000.0 / n as f64;
            assert!((q.a - p.a).norm() <= slack && (q.b - p.b).norm() <= slack);
        }
    }
}

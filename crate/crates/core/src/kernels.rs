//! Reproducing kernels `K_n(z, lambda) = sum_{j <= n} phiTilde_j(z) star(phi_j)(lambda)`
//! and the universality gap against the Dirichlet kernel.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cmeasure::CircleMeasure;
use crate::error::{Error, Result};
use crate::lpoly::LaurentPoly;
use crate::szego::OrthoSystem;

/// Below this value of `|1 - z / lambda|` the Christoffel-Darboux quotient
/// is replaced by the direct sum.
pub const CD_DIAGONAL_TOL: f64 = 1e-8;
/// Absolute allowance for rounding in the gap when comparing with the bound.
pub const GAP_ROUNDOFF: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelRoute {
    DirectSum,
    ChristoffelDarboux,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelEval {
    pub n: usize,
    pub z: Complex64,
    pub lambda: Complex64,
    pub value: Complex64,
    pub route: KernelRoute,
    /// Set when `k_cd` fell back to the direct sum near the diagonal.
    pub fallback: bool,
}

fn check_degree(sys: &OrthoSystem, n: usize) -> Result<()> {
    if n > sys.degree() {
        return Err(Error::Precondition(format!("degree {n} exceeds ladder degree {}", sys.degree())));
    }
    Ok(())
}

fn check_lambda(lambda: Complex64) -> Result<()> {
    if lambda == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain("kernel evaluated at lambda = 0".into()));
    }
    Ok(())
}

/// `star(p)(lambda) = conj(p(1 / conj(lambda)))`
fn star_eval(p: &LaurentPoly, lambda: Complex64) -> Complex64 {
    p.eval_unchecked(1.0 / lambda.conj()).conj()
}

/// Kernel by its defining sum.
pub fn k_direct(sys: &OrthoSystem, n: usize, z: Complex64, lambda: Complex64) -> Result<Complex64> {
    check_degree(sys, n)?;
    check_lambda(lambda)?;
    Ok((0..=n)
        .map(|j| sys.phi_tilde[j].eval_unchecked(z) * star_eval(&sys.phi[j], lambda))
        .sum())
}

/// Degree `n + 1` entries, continued by `F_{n+1} = 0` when the ladder stops
/// at `n`. The Christoffel-Darboux right side does not depend on `F_{n+1}`.
fn next_pair(sys: &OrthoSystem, n: usize) -> (LaurentPoly, LaurentPoly) {
    if n < sys.degree() {
        (sys.phi[n + 1].clone(), sys.phi_tilde[n + 1].clone())
    } else {
        (sys.phi[n].shift(1), sys.phi_tilde[n].shift(1))
    }
}

/// Kernel by the Christoffel-Darboux formula
///
/// ```text
/// (1 - z / lambda) K_n(z, lambda)
///     = z^{n+1} lambda^{-n-1} star(phi_{n+1})(z) phiTilde_{n+1}(lambda)
///       - phiTilde_{n+1}(z) star(phi_{n+1})(lambda)
/// ```
pub fn k_cd(sys: &OrthoSystem, n: usize, z: Complex64, lambda: Complex64) -> Result<KernelEval> {
    check_degree(sys, n)?;
    check_lambda(lambda)?;
    let denom = 1.0 - z / lambda;
    if denom.norm() <= CD_DIAGONAL_TOL {
        let value = k_direct(sys, n, z, lambda)?;
        return Ok(KernelEval { n, z, lambda, value, route: KernelRoute::DirectSum, fallback: true });
    }
    let (p, q) = next_pair(sys, n);
    let m = n as i64 + 1;
    // z^{n+1} star(phi_{n+1})(z) is a polynomial, evaluated as such so z = 0 is fine
    let reversed = p.star().shift(m);
    let first = reversed.eval_unchecked(z) * lambda.powi(-(m as i32)) * q.eval_unchecked(lambda);
    let second = q.eval_unchecked(z) * star_eval(&p, lambda);
    Ok(KernelEval {
        n,
        z,
        lambda,
        value: (first - second) / denom,
        route: KernelRoute::ChristoffelDarboux,
        fallback: false,
    })
}

/// `D_n(z, lambda) = sum_{j <= n} (z / lambda)^j`
pub fn dirichlet(n: usize, z: Complex64, lambda: Complex64) -> Complex64 {
    let x = z / lambda;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut p = Complex64::new(1.0, 0.0);
    for _ in 0..=n {
        acc += p;
        p *= x;
    }
    acc
}

/// `|<f, K_n(., lambda)>_mu - f(lambda)|`.
///
/// The star in the pairing acts on both variables of the kernel, so the
/// pairing is `<f, G>_mu` with `G(y) = sum_j conj(phi_j(lambda)) phiTilde_j(y)`.
pub fn reproduce_check(
    sys: &OrthoSystem,
    mu: &CircleMeasure,
    n: usize,
    f: &LaurentPoly,
    lambda: Complex64,
    m: usize,
) -> Result<f64> {
    check_degree(sys, n)?;
    check_lambda(lambda)?;
    let mut g = LaurentPoly::zero();
    for j in 0..=n {
        g = &g + &sys.phi_tilde[j].scale(sys.phi[j].eval_unchecked(lambda).conj());
    }
    let lhs = mu.pairing(f, &g, m)?;
    Ok((lhs - f.eval(lambda)?).norm())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniversalityRecord {
    pub s: Complex64,
    pub n: usize,
    #[serde(rename = "C")]
    pub c: f64,
    pub gap: f64,
    #[serde(rename = "L")]
    pub l_value: f64,
    pub bound: f64,
}

impl UniversalityRecord {
    pub const CSV_HEADER: [&'static str; 7] = ["s_re", "s_im", "n", "C", "gap", "L", "bound"];

    pub fn csv_row(&self) -> [String; 7] {
        [
            self.s.re.to_string(),
            self.s.im.to_string(),
            self.n.to_string(),
            self.c.to_string(),
            self.gap.to_string(),
            self.l_value.to_string(),
            self.bound.to_string(),
        ]
    }

    pub fn within_bound(&self) -> bool {
        self.gap <= self.bound + GAP_ROUNDOFF
    }
}

/// Gap `|conj(w(s)) K_n(z, lambda) - D_n(z, lambda)| / (n + 1)` together with
/// `L(mu, s, n)` and the bound `e^{30 C} L`.
///
/// Requires `|s| = 1`, `C >= 2`, `n >= 2C`, `|z - s| <= C/n` and
/// `|lambda - s| <= C/n`.
#[allow(clippy::too_many_arguments)]
pub fn universality_gap(
    sys: &OrthoSystem,
    mu: &CircleMeasure,
    s: Complex64,
    n: usize,
    c: f64,
    z: Complex64,
    lambda: Complex64,
    m: usize,
) -> Result<UniversalityRecord> {
    if (s.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::Precondition(format!("|s| = {} is not 1", s.norm())));
    }
    if c < 2.0 {
        return Err(Error::Precondition(format!("C = {c} < 2")));
    }
    let nf = n as f64;
    if nf < 2.0 * c {
        return Err(Error::Precondition(format!("n = {n} < 2C = {}", 2.0 * c)));
    }
    if (z - s).norm() > c / nf {
        return Err(Error::Precondition(format!("|z - s| = {} > C/n = {}", (z - s).norm(), c / nf)));
    }
    if (lambda - s).norm() > c / nf {
        return Err(Error::Precondition(format!("|lambda - s| = {} > C/n = {}", (lambda - s).norm(), c / nf)));
    }
    let k = k_direct(sys, n, z, lambda)?;
    let w = mu.density_at(s);
    let gap = (w.conj() * k - dirichlet(n, z, lambda)).norm() / (nf + 1.0);
    let l_value = mu.l_functional(s, n, m)?;
    Ok(UniversalityRecord { s, n, c, gap, l_value, bound: (30.0 * c).exp() * l_value })
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
    fn zero_system_is_dirichlet() {
        let sys = ladder_from_coeffs(&[c(0.0, 0.0); 6], ClassTag::TMinus).unwrap();
        let (z, l) = (c(0.3, 1.2), c(-0.7, 0.4));
        assert!((k_direct(&sys, 6, z, l).unwrap() - dirichlet(6, z, l)).norm() < 1e-12);
        let s = Complex64::from_polar(1.0, 0.4);
        assert!((k_direct(&sys, 6, s, s).unwrap() - 7.0).norm() < 1e-13);
    }

    #[test]
    fn mu_r_first_degree_diagonal() {
        let r = 0.5;
        let sys = mu_r_system(r, 1);
        let one = c(1.0, 0.0);
        let expected = 1.0 + (1.0 - r) * (1.0 + r) / (1.0 + r * r);
        assert!((k_direct(&sys, 1, one, one).unwrap() - expected).norm() < 1e-14);
    }

    #[test]
    fn lambda_zero_is_a_domain_error() {
        let sys = mu_r_system(0.5, 2);
        assert!(matches!(k_direct(&sys, 2, c(1.0, 0.0), c(0.0, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn cd_geometric_sum() {
        let sys = ladder_from_coeffs(&[c(0.0, 0.0); 5], ClassTag::TMinus).unwrap();
        let v = k_cd(&sys, 5, c(2.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!((v.value - 63.0).norm() < 1e-12);
        assert_eq!(v.route, KernelRoute::ChristoffelDarboux);
    }

    #[test]
    fn cd_matches_direct_for_mu_r() {
        let sys = mu_r_system(0.5, 6);
        for n in [4, 6] {
            let v = k_cd(&sys, n, c(0.0, 1.0), c(0.0, -1.0)).unwrap();
            assert!((v.value - k_direct(&sys, n, c(0.0, 1.0), c(0.0, -1.0)).unwrap()).norm() < 1e-12);
        }
    }

    #[test]
    fn cd_matches_direct_for_generic_coefficients() {
        let f: Vec<Complex64> = (0..12).map(|k| c((k as f64).sin() * 0.8, (k as f64 * 2.1).cos() * 0.6)).collect();
        let sys = ladder_from_coeffs(&f, ClassTag::TMinus).unwrap();
        for (z, l) in [(c(0.9, 0.3), c(-0.2, 1.05)), (c(0.0, 0.0), c(1.0, 0.0)), (c(1.1, -0.4), c(0.5, 0.5))] {
            for n in [0, 3, 11, 12] {
                let d = k_direct(&sys, n, z, l).unwrap();
                let v = k_cd(&sys, n, z, l).unwrap().value;
                assert!((d - v).norm() <= 1e-10 * d.norm().max(1.0), "n = {n}: {d} vs {v}");
            }
        }
    }

    #[test]
    fn cd_falls_back_on_diagonal() {
        let sys = mu_r_system(0.5, 3);
        let s = c(0.6, 0.8);
        let v = k_cd(&sys, 3, s, s).unwrap();
        assert!(v.fallback && v.route == KernelRoute::DirectSum);
    }

    #[test]
    fn reproducing_property() {
        let sys = ladder_from_coeffs(&[c(0.0, 0.0); 3], ClassTag::TMinus).unwrap();
        let f = LaurentPoly::monomial(2, c(1.0, 0.0));
        let res = reproduce_check(&sys, &CircleMeasure::uniform(), 3, &f, c(0.0, 1.0), 64).unwrap();
        assert!(res < 1e-12);

        let mu = CircleMeasure::mu_r(0.5).unwrap();
        let sys = mu_r_system(0.5, 6);
        let lambda = c(0.7, 0.1);
        assert!(reproduce_check(&sys, &mu, 5, &sys.phi[2], lambda, 4096).unwrap() < 1e-8);
        assert!(reproduce_check(&sys, &mu, 5, &sys.phi[6], lambda, 4096).unwrap() > 1e-2);
    }

    #[test]
    fn uniform_measure_has_no_gap() {
        let sys = ladder_from_coeffs(&[c(0.0, 0.0); 16], ClassTag::TMinus).unwrap();
        let s = c(0.0, 1.0);
        let rec = universality_gap(&sys, &CircleMeasure::uniform(), s, 16, 2.0, s, s, 256).unwrap();
        assert!(rec.gap < 1e-14);
        assert_eq!(rec.l_value, 0.0);
    }

    #[test]
    fn universality_gap_decays_for_mu_r() {
        let mu = CircleMeasure::mu_r(0.5).unwrap();
        let s = c(0.0, 1.0);
        let sys = mu_r_system(0.5, 128);
        let recs: Vec<UniversalityRecord> = [8usize, 32, 128]
            .iter()
            .map(|&n| universality_gap(&sys, &mu, s, n, 2.0, s, s, 1024).unwrap())
            .collect();
        // K_n(s, s) = 1 + n conj(1/w(s)) for the closed forms, so the gap is |w(s) - 1| / (n + 1)
        let w = mu.density_at(s);
        for r in &recs {
            assert!(r.within_bound());
            assert!((r.gap - (w - 1.0).norm() / (r.n + 1) as f64).abs() < 1e-12);
        }
        assert!(recs[2].gap < 0.1 * recs[0].gap);
    }

    #[test]
    fn universality_preconditions() {
        let sys = mu_r_system(0.5, 8);
        let mu = CircleMeasure::mu_r(0.5).unwrap();
        let s = c(0.0, 1.0);
        assert!(universality_gap(&sys, &mu, s, 3, 2.0, s, s, 64).is_err());
        assert!(universality_gap(&sys, &mu, s, 8, 1.0, s, s, 64).is_err());
        assert!(universality_gap(&sys, &mu, s, 8, 2.0, s + 0.5, s, 64).is_err());
        assert!(universality_gap(&sys, &mu, c(1.0, 1.0), 8, 2.0, s, s, 64).is_err());
    }
}

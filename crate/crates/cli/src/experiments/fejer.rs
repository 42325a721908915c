//! Diagonal kernel expression against its first-order (Fejér) approximation
//! for small coefficient sequences.

use rayon::prelude::*;
use su2poly::nlfs::{forward, w_at};
use su2poly::szego::circle_values;
use su2poly::C64;

use super::{num, require, Report};
use crate::config::{DegreeSchedule, ExperimentConfig, PointSource};
use crate::error::Result;
use crate::output::Table;

pub const DEFAULT_EPSILONS: [f64; 3] = [0.1, 0.05, 0.025];
pub const DEFAULT_SHAPE_LEN: usize = 16;
pub const DEFAULT_MAX_DEGREE: usize = 32;
pub const DEFAULT_ANGLE: f64 = 0.7;

/// `F_k = k^{-2} e^{ik}` for `k = 1..=n`.
pub fn default_shape(n: usize) -> Vec<C64> {
    (1..=n).map(|k| C64::from_polar(1.0 / (k * k) as f64, k as f64)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Row {
    pub eps: f64,
    pub s: C64,
    pub n: usize,
    /// `|K_n(s,s) - conj(1/w(s)) (n+1)| / (n+1)`
    pub nonlinear: f64,
    /// `|mean_{j <= n} Im Fhat_{[1,j]}(s) - Im Fhat(s)|`
    pub fejer_gap: f64,
    /// `|mean_{j <= n} Fhat_{[-j,j]}(s) - Fhat(s)|` for the extension `F_{-k} = conj(F_k)`
    pub fejer_diff: f64,
    /// `|nonlinear - 2 fejer_gap|`
    pub mismatch: f64,
    /// Modulus of the complex difference between the kernel expression and
    /// its linearization `2i (mean Im Fhat_{[1,j]} - Im Fhat)`.
    pub linear_residual: f64,
}

/// Scaling of the two mismatch measures between consecutive `eps`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scaling {
    pub s: C64,
    pub eps_hi: f64,
    pub eps_lo: f64,
    /// Ratio of `max_n linear_residual`.
    pub residual_ratio: f64,
    /// Ratio of `max_n mismatch`.
    pub mismatch_ratio: f64,
}

impl Scaling {
    /// Observed order `log(ratio) / log(eps_hi / eps_lo)`.
    pub fn residual_order(&self) -> f64 {
        self.residual_ratio.ln() / (self.eps_hi / self.eps_lo).ln()
    }

    pub fn mismatch_order(&self) -> f64 {
        self.mismatch_ratio.ln() / (self.eps_hi / self.eps_lo).ln()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fejer {
    pub shape: Vec<C64>,
    pub rows: Vec<Row>,
    pub scaling: Vec<Scaling>,
}

/// Rows for one coefficient sequence and point, degrees `0..=nmax`.
pub fn rows_for(f: &[C64], eps: f64, s: C64, degrees: &[usize]) -> Vec<Row> {
    let pair = forward(f);
    let w_inv_conj = (1.0 / w_at(&pair.a, &pair.b, s)).conj();
    let nmax = degrees.iter().copied().max().unwrap_or(0);
    let vals = circle_values(f, s, nmax);
    let mut partial = vec![C64::new(0.0, 0.0); nmax + 1];
    let mut acc = C64::new(0.0, 0.0);
    let mut sk = C64::new(1.0, 0.0);
    for (j, slot) in partial.iter_mut().enumerate().skip(1) {
        sk *= s;
        if let Some(fj) = f.get(j - 1) {
            acc += fj * sk;
        }
        *slot = acc;
    }
    let mut full = C64::new(0.0, 0.0);
    let mut sk = C64::new(1.0, 0.0);
    for fj in f {
        sk *= s;
        full += fj * sk;
    }
    let mut rows = Vec::with_capacity(degrees.len());
    let (mut kernel, mut im_sum, mut re_sum) = (C64::new(0.0, 0.0), 0.0, 0.0);
    for n in 0..=nmax {
        let (p, q) = vals[n];
        kernel += p.conj() * q;
        im_sum += partial[n].im;
        re_sum += partial[n].re;
        if !degrees.contains(&n) {
            continue;
        }
        let np1 = (n + 1) as f64;
        let expr = (kernel - w_inv_conj * np1) / np1;
        let gap = im_sum / np1 - full.im;
        let nonlinear = expr.norm();
        rows.push(Row {
            eps,
            s,
            n,
            nonlinear,
            fejer_gap: gap.abs(),
            fejer_diff: (2.0 * (re_sum / np1 - full.re)).abs(),
            mismatch: (nonlinear - 2.0 * gap.abs()).abs(),
            linear_residual: (expr - C64::new(0.0, 2.0 * gap)).norm(),
        });
    }
    rows
}

pub fn run(cfg: &ExperimentConfig) -> Result<Fejer> {
    let mut shape = cfg.coeffs_direct()?.unwrap_or_else(|| default_shape(DEFAULT_SHAPE_LEN));
    let l1: f64 = shape.iter().map(|x| x.norm()).sum();
    if l1 > 0.0 {
        shape.iter_mut().for_each(|x| *x /= l1);
    }
    let epsilons = cfg.epsilons.clone().unwrap_or_else(|| DEFAULT_EPSILONS.to_vec());
    require(!epsilons.is_empty() && epsilons.iter().all(|e| *e > 0.0 && e.is_finite()), || {
        format!("epsilons must be positive, got {epsilons:?}")
    })?;
    let degrees: Vec<usize> = cfg
        .degrees_or(DegreeSchedule::List { values: (0..=DEFAULT_MAX_DEGREE).collect() })?
        .iter()
        .map(|d| d.n)
        .collect();
    let points = cfg.points_or(PointSource::List { values: vec![su2poly::cmeasure::PointValue::Angle(DEFAULT_ANGLE)] })?;

    let tasks: Vec<(f64, C64)> = epsilons.iter().flat_map(|&e| points.iter().map(move |&s| (e, s))).collect();
    let rows: Vec<Row> = tasks
        .par_iter()
        .flat_map_iter(|&(eps, s)| {
            let f: Vec<C64> = shape.iter().map(|x| x * eps).collect();
            rows_for(&f, eps, s, &degrees)
        })
        .collect();

    let worst = |eps: f64, s: C64, pick: fn(&Row) -> f64| {
        rows.iter().filter(|r| r.eps == eps && r.s == s).map(pick).fold(0.0, f64::max)
    };
    let mut scaling = Vec::new();
    for &s in &points {
        for w in epsilons.windows(2) {
            let (hi, lo) = (w[0], w[1]);
            scaling.push(Scaling {
                s,
                eps_hi: hi,
                eps_lo: lo,
                residual_ratio: worst(hi, s, |r| r.linear_residual) / worst(lo, s, |r| r.linear_residual),
                mismatch_ratio: worst(hi, s, |r| r.mismatch) / worst(lo, s, |r| r.mismatch),
            });
        }
    }
    Ok(Fejer { shape, rows, scaling })
}

impl Fejer {
    pub fn report(&self, name: &str) -> Report {
        let mut rows = Table::new(
            name,
            &["eps", "s_re", "s_im", "n", "nonlinear", "fejer_gap", "fejer_diff", "mismatch", "linear_residual"],
        );
        for r in &self.rows {
            rows.push([
                num(r.eps),
                num(r.s.re),
                num(r.s.im),
                r.n.to_string(),
                num(r.nonlinear),
                num(r.fejer_gap),
                num(r.fejer_diff),
                num(r.mismatch),
                num(r.linear_residual),
            ]);
        }
        let mut scaling = Table::new(
            format!("{name}_scaling"),
            &["s_re", "s_im", "eps_hi", "eps_lo", "residual_ratio", "residual_order", "mismatch_ratio", "mismatch_order"],
        );
        let mut summary = Vec::new();
        let mut violations = Vec::new();
        for sc in &self.scaling {
            scaling.push([
                num(sc.s.re),
                num(sc.s.im),
                num(sc.eps_hi),
                num(sc.eps_lo),
                num(sc.residual_ratio),
                num(sc.residual_order()),
                num(sc.mismatch_ratio),
                num(sc.mismatch_order()),
            ]);
            summary.push(format!(
                "s = {:.4}, eps {} -> {}: residual ratio {:.3} (order {:.2}), modulus mismatch ratio {:.3} (order {:.2})",
                sc.s,
                sc.eps_hi,
                sc.eps_lo,
                sc.residual_ratio,
                sc.residual_order(),
                sc.mismatch_ratio,
                sc.mismatch_order()
            ));
            let order = sc.residual_order();
            if order.is_finite() && (order - 2.0).abs() > 1.0 {
                violations.push(format!("linearization residual has order {order:.2}, expected 2 within a factor 2"));
            }
        }
        Report { tables: vec![rows, scaling], summary, violations, ..Default::default() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_sequence_gives_zero_columns() {
        let rows = rows_for(&[C64::new(0.0, 0.0); 4], 0.1, C64::from_polar(1.0, 0.3), &[0, 1, 5]);
        assert_eq!(rows.len(), 3);
        for r in rows {
            assert!(r.nonlinear < 1e-15 && r.fejer_gap < 1e-15 && r.linear_residual < 1e-15);
        }
    }

    #[test]
    fn kernel_sum_matches_direct_route() {
        let f = vec![C64::new(0.05, 0.02), C64::new(-0.01, 0.03)];
        let s = C64::from_polar(1.0, 1.3);
        let sys = su2poly::szego::ladder_from_coeffs(&f, su2poly::ClassTag::TMinus).unwrap();
        let pair = forward(&f);
        let w = w_at(&pair.a, &pair.b, s);
        let k = su2poly::kernels::k_direct(&sys, 2, s, s).unwrap();
        let expected = (k - (1.0 / w).conj() * 3.0).norm() / 3.0;
        let row = rows_for(&f, 1.0, s, &[2])[0];
        assert!((row.nonlinear - expected).abs() < 1e-14);
    }

    #[test]
    fn fejer_column_tends_to_zero() {
        let f = default_shape(8);
        let s = C64::from_polar(1.0, 0.9);
        let degrees: Vec<usize> = vec![10, 100, 1000];
        let rows = rows_for(&f, 1.0, s, &degrees);
        assert!(rows[2].fejer_gap < rows[1].fejer_gap && rows[1].fejer_gap < rows[0].fejer_gap);
        assert!(rows[2].fejer_diff < 0.01);
    }

    #[test]
    fn linearization_is_second_order() {
        let fe = run(&ExperimentConfig::default()).unwrap();
        for sc in &fe.scaling {
            assert!((2.5..=6.0).contains(&sc.residual_ratio), "{sc:?}");
        }
    }
}

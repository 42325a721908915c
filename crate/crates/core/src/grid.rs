//! Uniform grids on the unit circle and the FFT plumbing that moves between
//! coefficients and grid values.
//!
//! Grid node `k` of an `M`-point grid is `e^{2 pi i k / M}`; quadrature
//! weights are `1/M` (normalized arclength).

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::lpoly::LaurentPoly;

pub fn node(m: usize, k: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64)
}

pub fn nodes(m: usize) -> Vec<Complex64> {
    (0..m).map(|k| node(m, k)).collect()
}

/// Values of `p` at all `m` grid nodes. Frequencies are folded modulo `m`,
/// so the result is exact (up to rounding) for any window.
pub fn eval_on_grid(p: &LaurentPoly, m: usize) -> Vec<Complex64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for (i, c) in p.coeffs().iter().enumerate() {
        let k = (p.lo() + i as i64).rem_euclid(m as i64) as usize;
        buf[k] += c;
    }
    FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
    buf
}

/// Normalized discrete Fourier coefficients `(1/m) sum_j v_j e^{-2 pi i j k / m}`,
/// indexed by `k mod m`.
pub fn fourier_coeffs(values: &[Complex64]) -> Vec<Complex64> {
    let m = values.len();
    let mut buf = values.to_vec();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let inv = 1.0 / m as f64;
    buf.iter_mut().for_each(|x| *x *= inv);
    buf
}

/// Quadrature moments `(1/m) sum_k v_k node_k^j` for `j` in `lo..=hi`.
pub fn grid_moments(values: &[Complex64], lo: i64, hi: i64) -> Vec<Complex64> {
    let m = values.len();
    let mut buf = values.to_vec();
    // sum_k v_k e^{+2 pi i j k / m} is the unnormalized inverse transform
    FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
    let inv = 1.0 / m as f64;
    (lo..=hi)
        .map(|j| buf[j.rem_euclid(m as i64) as usize] * inv)
        .collect()
}

/// Mean over the grid, i.e. the trapezoidal rule for `int f dm`.
pub fn mean(values: &[Complex64]) -> Complex64 {
    values.iter().sum::<Complex64>() / values.len() as f64
}

/// Periodic 4-point Lagrange interpolation of grid samples at angle `theta`.
pub fn interpolate(values: &[Complex64], theta: f64) -> Complex64 {
    let m = values.len() as i64;
    let h = 2.0 * PI / m as f64;
    let x = theta.rem_euclid(2.0 * PI) / h;
    let i0 = x.floor() as i64;
    let t = x - i0 as f64;
    if t == 0.0 {
        return values[i0.rem_euclid(m) as usize];
    }
    // nodes at offsets -1, 0, 1, 2 relative to i0
    let offs = [-1.0, 0.0, 1.0, 2.0];
    let mut acc = Complex64::new(0.0, 0.0);
    for (a, &oa) in offs.iter().enumerate() {
        let mut w = 1.0;
        for (b, &ob) in offs.iter().enumerate() {
            if a != b {
                w *= (t - ob) / (oa - ob);
            }
        }
        acc += values[(i0 + oa as i64).rem_euclid(m) as usize] * w;
    }
    acc
}

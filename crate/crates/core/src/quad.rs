//! Small numerical kernels: composite Simpson quadrature, cumulative
//! antiderivatives, uniform-grid interpolation and least-squares slopes.

use std::ops::{Add, Mul};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Composite Simpson over equally spaced samples. `values.len()` must be odd
/// and at least 3; `h` may be negative.
pub fn simpson<T>(values: &[T], h: f64) -> T
where
    T: Copy + Default + Add<Output = T> + Mul<f64, Output = T>,
{
    let n = values.len();
    assert!(
        n >= 3 && n % 2 == 1,
        "simpson needs an odd number (>= 3) of samples, got {n}"
    );
    let mut odd = T::default();
    let mut even = T::default();
    for (k, v) in values.iter().enumerate().take(n - 1).skip(1) {
        if k % 2 == 1 {
            odd = odd + *v;
        } else {
            even = even + *v;
        }
    }
    (values[0] + values[n - 1] + odd * 4.0 + even * 2.0) * (h / 3.0)
}

/// Simpson weight of node `k` in a rule with `n` samples (odd `n`), without
/// the `h/3` factor.
#[inline]
pub fn simpson_weight(k: usize, n: usize) -> f64 {
    if k == 0 || k == n - 1 {
        1.0
    } else if k % 2 == 1 {
        4.0
    } else {
        2.0
    }
}

/// Smallest even integer `>= x / h` (at least 2 when `x > 0`).
pub fn even_steps(x: f64, h: f64) -> usize {
    if x <= 0.0 {
        return 0;
    }
    let n = (x / h - 1e-9).ceil().max(1.0) as usize;
    n + n % 2
}

/// Definite integral of `f` over `[a, b]` by composite Simpson with a step
/// close to `h_target`.
pub fn integrate<F>(f: F, a: f64, b: f64, h_target: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    if a == b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let n = even_steps((b - a).abs(), h_target).max(2);
    let h = (b - a) / n as f64;
    let vals = (0..=n).map(|k| f(a + k as f64 * h)).collect::<Result<Vec<_>>>()?;
    Ok(simpson(&vals, h))
}

/// `F(t0 + k h) = \int_{t0}^{t0 + k h} f`, k = 0..=n, using Simpson on each
/// interval with its midpoint.
pub fn cumulative<F>(f: F, t0: f64, h: f64, n: usize) -> Result<Vec<Complex64>>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = Complex64::new(0.0, 0.0);
    out.push(acc);
    let mut left = f(t0)?;
    for k in 0..n {
        let a = t0 + k as f64 * h;
        let mid = f(a + 0.5 * h)?;
        let right = f(t0 + (k + 1) as f64 * h)?;
        acc += (left + mid * 4.0 + right) * (h / 6.0);
        out.push(acc);
        left = right;
    }
    Ok(out)
}

/// Four-point Lagrange weights for a fractional position `x` (in grid
/// units, relative to node `base`) on nodes `base..base+4`.
#[inline]
fn lagrange4_weights(x: f64) -> [f64; 4] {
    // Nodes at 0, 1, 2, 3.
    let (d0, d1, d2, d3) = (x, x - 1.0, x - 2.0, x - 3.0);
    [
        -(d1 * d2 * d3) / 6.0,
        (d0 * d2 * d3) / 2.0,
        -(d0 * d1 * d3) / 2.0,
        (d0 * d1 * d2) / 6.0,
    ]
}

/// Cubic (4-point Lagrange) interpolation of a strided uniform grid. `values`
/// holds `n` samples of `dim` components each; writes the `dim` components
/// at time `t` into `out`. Returns `None` if `t` is outside the grid.
pub fn lagrange4(values: &[Complex64], dim: usize, t0: f64, dt: f64, t: f64, out: &mut [Complex64]) -> Option<()> {
    let n = values.len() / dim;
    let pos = (t - t0) / dt;
    let tol = 1e-9;
    if n < 2 || pos < -tol || pos > (n - 1) as f64 + tol {
        return None;
    }
    let nearest = pos.round();
    if (pos - nearest).abs() <= 1e-12 {
        let k = (nearest as usize).min(n - 1);
        out.copy_from_slice(&values[k * dim..(k + 1) * dim]);
        return Some(());
    }
    if n < 4 {
        // Linear fallback on tiny grids.
        let k = (pos.floor() as usize).min(n - 2);
        let w = pos - k as f64;
        for i in 0..dim {
            out[i] = values[k * dim + i] * (1.0 - w) + values[(k + 1) * dim + i] * w;
        }
        return Some(());
    }
    let base = (pos.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
    let w = lagrange4_weights(pos - base as f64);
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, wj) in w.iter().enumerate() {
            acc += values[(base + j) * dim + i] * *wj;
        }
        *o = acc;
    }
    Some(())
}

/// Cubic interpolation of real samples on a uniform grid.
pub fn lagrange4_real(values: &[f64], x0: f64, dx: f64, x: f64) -> Option<f64> {
    let n = values.len();
    let pos = (x - x0) / dx;
    if n < 4 || pos < -1e-9 || pos > (n - 1) as f64 + 1e-9 {
        return None;
    }
    let base = (pos.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
    let w = lagrange4_weights(pos - base as f64);
    Some((0..4).map(|j| values[base + j] * w[j]).sum())
}

/// Least-squares slope of `ys` against `xs`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let (slope, _) = ls_fit(xs, ys)?;
    Ok(slope)
}

/// Least-squares line `(slope, intercept)`.
pub fn ls_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::invalid("least-squares fit needs at least two points"));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("least-squares fit with degenerate abscissae"));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn simpson_integrates_cubics_exactly() {
        let h = 0.25;
        let vals: Vec<f64> = (0..=8).map(|k| (k as f64 * h).powi(3)).collect();
        assert!((simpson(&vals, h) - 2.0f64.powi(4) / 4.0).abs() < 1e-13);
    }

    #[test]
    fn cumulative_sin_matches_cosine() {
        let h = 0.01;
        let f = cumulative(|t| Ok(Complex64::new(t.sin(), 0.0)), 0.0, h, 1000).unwrap();
        for (k, v) in f.iter().enumerate() {
            let t = k as f64 * h;
            assert!((v.re - (1.0 - t.cos())).abs() < 1e-11);
        }
    }

    #[test]
    fn lagrange_reproduces_cubic() {
        let dt = 0.5;
        let vals: Vec<Complex64> = (0..10).map(|k| Complex64::new((k as f64 * dt).powi(3), 1.0)).collect();
        let mut out = [Complex64::new(0.0, 0.0)];
        for &t in &[0.1, 1.3, 4.4, 4.5] {
            lagrange4(&vals, 1, 0.0, dt, t, &mut out).unwrap();
            assert!((out[0].re - t.powi(3)).abs() < 1e-12, "t = {t}");
            assert!((out[0].im - 1.0).abs() < 1e-12);
        }
        assert!(lagrange4(&vals, 1, 0.0, dt, 4.6, &mut out).is_none());
    }

    #[test]
    fn integrate_handles_reversed_limits() {
        let v = integrate(|t| Ok(Complex64::new(t.cos(), 0.0)), PI / 2.0, 0.0, 0.01).unwrap();
        assert!((v.re + 1.0).abs() < 1e-10);
    }

    #[test]
    fn even_steps_rounds_up_to_even() {
        assert_eq!(even_steps(1.0, 0.1), 10);
        assert_eq!(even_steps(1.05, 0.1), 12);
        assert_eq!(even_steps(0.0, 0.1), 0);
        assert_eq!(even_steps(0.01, 0.1), 2);
    }
}

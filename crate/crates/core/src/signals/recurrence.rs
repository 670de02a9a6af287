//! Numerical recurrence diagnostics: bounded antiderivatives and
//! epsilon-translation numbers tested on the grid lattice.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{GridFunction, ScalarSignal};
use crate::error::{Error, Result};
use crate::quad::{self, cumulative};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AntiderivativeReport {
    pub sup_f: f64,
    pub growth_slope: f64,
    pub bounded_verdict: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub sup: f64,
    pub growth_slope: f64,
    pub bounded: bool,
}

/// Least-squares slope of the running maximum `r -> max_{dist <= r} |v|`
/// against `r`, over the outer half of the distances.
///
/// `distances` must be non-decreasing.
pub fn running_max_slope(distances: &[f64], magnitudes: &[f64]) -> Result<f64> {
    if distances.len() != magnitudes.len() || distances.len() < 4 {
        return Err(Error::invalid("growth fit needs at least four samples"));
    }
    let r_max = *distances.last().expect("non-empty");
    let mut running = 0.0f64;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (r, m) in distances.iter().zip(magnitudes) {
        running = running.max(*m);
        if *r >= 0.5 * r_max {
            xs.push(*r);
            ys.push(running);
        }
    }
    quad::ls_slope(&xs, &ys)
}

/// Growth report for a grid function, measured from its first point.
pub fn growth_report(g: &GridFunction, bound_tol: f64) -> Result<GrowthReport> {
    let distances: Vec<f64> = (0..g.len()).map(|k| k as f64 * g.dt()).collect();
    let magnitudes: Vec<f64> = (0..g.len()).map(|k| quad::norm(g.value(k))).collect();
    let growth_slope = running_max_slope(&distances, &magnitudes)?;
    Ok(GrowthReport {
        sup: g.sup_norm(),
        growth_slope,
        bounded: growth_slope < bound_tol,
    })
}

/// Antiderivative `F(t) = \int_0^t f` on `[-horizon, horizon]`; the verdict
/// is `growth_slope < bound_tol` where the slope is fitted to
/// `max_{|s| <= r} |F(s)|` over `r` in the outer half of the window.
pub fn bounded_antiderivative_check(f: &ScalarSignal, horizon: f64, bound_tol: f64) -> Result<AntiderivativeReport> {
    bounded_antiderivative_check_with_step(f, horizon, bound_tol, 0.01)
}

pub fn bounded_antiderivative_check_with_step(
    f: &ScalarSignal,
    horizon: f64,
    bound_tol: f64,
    dt: f64,
) -> Result<AntiderivativeReport> {
    if !(horizon > 0.0) {
        return Err(Error::invalid("antiderivative check needs horizon > 0"));
    }
    let n = ((horizon / dt).ceil() as usize).max(4);
    let h = horizon / n as f64;
    let forward = cumulative(|t| f.eval(t), 0.0, h, n)?;
    let backward = cumulative(|t| f.eval(t), 0.0, -h, n)?;
    let distances: Vec<f64> = (0..=n).map(|k| k as f64 * h).collect();
    let magnitudes: Vec<f64> = forward
        .iter()
        .zip(&backward)
        .map(|(a, b)| a.norm().max(b.norm()))
        .collect();
    let sup_f = magnitudes.iter().copied().fold(0.0, f64::max);
    let growth_slope = running_max_slope(&distances, &magnitudes)?;
    Ok(AntiderivativeReport {
        sup_f,
        growth_slope,
        bounded_verdict: growth_slope < bound_tol,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateDeviation {
    /// Candidate rounded onto the grid lattice.
    pub xi: f64,
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceReport {
    pub epsilon: f64,
    /// Accepted shifts, ascending by deviation.
    pub translation_numbers: Vec<CandidateDeviation>,
    /// One entry per candidate, in input order.
    pub deviations: Vec<CandidateDeviation>,
}

/// `sup_k |g(t_k + xi) - g(t_k)|` over the overlap, `xi = shift * dt`.
pub fn shift_deviation(g: &GridFunction, shift: isize) -> Result<f64> {
    let n = g.len();
    let s = shift.unsigned_abs();
    if s >= n - 1 {
        return Err(Error::EmptyOverlap {
            shift: shift as f64 * g.dt(),
            window: (n - 1) as f64 * g.dt(),
        });
    }
    let dim = g.dim();
    let vals = g.values();
    let (lo, hi) = if shift >= 0 { (0, s) } else { (s, 0) };
    let mut sup = 0.0f64;
    for k in 0..n - s {
        let a = &vals[(k + hi) * dim..(k + hi + 1) * dim];
        let b = &vals[(k + lo) * dim..(k + lo + 1) * dim];
        let d = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
        sup = sup.max(d);
    }
    Ok(sup)
}

/// Tests each candidate shift (rounded to a multiple of `dt`) as an
/// epsilon-translation number of the sampled function.
pub fn translation_recurrence_test(g: &GridFunction, candidates: &[f64], epsilon: f64) -> Result<RecurrenceReport> {
    let mut deviations = Vec::with_capacity(candidates.len());
    for &xi in candidates {
        let shift = (xi / g.dt()).round() as isize;
        deviations.push(CandidateDeviation {
            xi: shift as f64 * g.dt(),
            deviation: shift_deviation(g, shift)?,
        });
    }
    let mut translation_numbers: Vec<CandidateDeviation> =
        deviations.iter().filter(|c| c.deviation <= epsilon).cloned().collect();
    translation_numbers.sort_by(|a, b| a.deviation.total_cmp(&b.deviation).then(a.xi.total_cmp(&b.xi)));
    Ok(RecurrenceReport {
        epsilon,
        translation_numbers,
        deviations,
    })
}

/// Shifts by whole grid steps: `g(. + shift dt)` on the overlap.
pub fn shift_grid(g: &GridFunction, shift: isize) -> Result<GridFunction> {
    let n = g.len();
    let s = shift.unsigned_abs();
    if s >= n - 1 {
        return Err(Error::EmptyOverlap {
            shift: shift as f64 * g.dt(),
            window: (n - 1) as f64 * g.dt(),
        });
    }
    if shift >= 0 {
        // (g_xi)(t) = g(t + xi) is defined for t in [t0, t_end - xi].
        let vals: Vec<Complex64> = g.values()[s * g.dim()..].to_vec();
        GridFunction::new(g.t0(), g.dt(), g.dim(), vals)
    } else {
        let vals: Vec<Complex64> = g.values()[..(n - s) * g.dim()].to_vec();
        GridFunction::new(g.t0() + s as f64 * g.dt(), g.dt(), g.dim(), vals)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signals::sample;
    use std::f64::consts::{PI, SQRT_2};

    #[test]
    fn cosine_has_bounded_antiderivative() {
        let r = bounded_antiderivative_check(&ScalarSignal::cos(1.0, 1.0, 0.0), 100.0, 1e-2).unwrap();
        assert!((r.sup_f - 1.0).abs() < 1e-6);
        assert!(r.bounded_verdict);
    }

    #[test]
    fn constant_has_linear_antiderivative() {
        let r = bounded_antiderivative_check(&ScalarSignal::constant(1.0), 100.0, 1e-2).unwrap();
        assert!((r.growth_slope - 1.0).abs() < 1e-9);
        assert!(!r.bounded_verdict);
    }

    #[test]
    fn sin_sqrt2_antiderivative_bound() {
        // F = (1 - cos(sqrt2 t)) / sqrt2, so sup |F| = 2 / sqrt2.
        let r = bounded_antiderivative_check(&ScalarSignal::sin(1.0, SQRT_2, 0.0), 100.0, 1e-2).unwrap();
        assert!(r.sup_f <= 2.0 / SQRT_2 + 1e-9);
        assert!(r.sup_f > 2.0 / SQRT_2 - 1e-3);
        assert!(r.bounded_verdict);
    }

    #[test]
    fn exact_period_is_accepted() {
        let dt = 0.01;
        let g = sample(&ScalarSignal::sin(1.0, 1.0, 0.0), 0.0, dt, 5001).unwrap();
        let r = translation_recurrence_test(&g, &[2.0 * PI, 3.0], 0.01).unwrap();
        // Rounding 2 pi to the lattice moves it by at most dt / 2.
        assert!(r.deviations[0].deviation <= dt / 2.0 + 1e-12);
        assert_eq!(r.translation_numbers.len(), 1);
        assert!((r.translation_numbers[0].xi - 628.0 * dt).abs() < 1e-12);
    }

    #[test]
    fn constants_accept_everything() {
        let g = sample(&ScalarSignal::constant(4.0), 0.0, 0.1, 101).unwrap();
        let r = translation_recurrence_test(&g, &[0.5, 1.0, -3.3, 7.0], 1e-12).unwrap();
        assert_eq!(r.translation_numbers.len(), 4);
        assert!(r.deviations.iter().all(|d| d.deviation == 0.0));
    }

    #[test]
    fn empty_overlap_is_an_error() {
        let g = sample(&ScalarSignal::constant(4.0), 0.0, 0.1, 11).unwrap();
        assert!(matches!(
            translation_recurrence_test(&g, &[1.0], 0.1),
            Err(Error::EmptyOverlap { .. })
        ));
        assert!(translation_recurrence_test(&g, &[-1.5], 0.1).is_err());
    }

    #[test]
    fn shift_grid_matches_translated_samples() {
        let s = ScalarSignal::sin(1.0, 1.0, 0.2);
        let g = sample(&s, 0.0, 0.1, 101).unwrap();
        let shifted = shift_grid(&g, 7).unwrap();
        let direct = sample(&s.translate(0.7), 0.0, 0.1, shifted.len()).unwrap();
        assert!(shifted.sup_diff(&direct).unwrap() < 1e-14);
    }
}

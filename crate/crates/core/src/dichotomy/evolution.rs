//! Evolution operator `Psi(t, s)` of `Y' = A(t) Y`, integrated directly
//! from `s` to `t` by RK4 and composed from cached window transitions.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{identity, CMatrix};
use crate::signals::MatrixSignal;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionOptions {
    /// Re-anchoring length.
    pub window: f64,
    pub rk_step: f64,
    /// Largest admissible `|t - s|`.
    pub horizon: f64,
}

impl Default for EvolutionOptions {
    fn default() -> Self {
        EvolutionOptions {
            window: 5.0,
            rk_step: 1e-3,
            horizon: 200.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct EvolutionField {
    a: MatrixSignal,
    constant: Option<CMatrix>,
    anchor_times: Vec<f64>,
    forward: Vec<CMatrix>,
    backward: Vec<CMatrix>,
    options: EvolutionOptions,
}

impl EvolutionField {
    /// Builds the field and caches window transitions covering `[t0, t1]`.
    pub fn new(a: MatrixSignal, t0: f64, t1: f64, options: EvolutionOptions) -> Result<Self> {
        if !(options.window > 0.0 && options.rk_step > 0.0 && options.horizon > 0.0) {
            return Err(Error::invalid("evolution window, rk_step and horizon must be positive"));
        }
        if !(t1 >= t0) || !t0.is_finite() || !t1.is_finite() {
            return Err(Error::invalid("evolution span must satisfy t0 <= t1"));
        }
        let constant = if a.is_constant() { Some(a.eval(0.0)?) } else { None };
        let mut field = EvolutionField {
            a,
            constant,
            anchor_times: Vec::new(),
            forward: Vec::new(),
            backward: Vec::new(),
            options,
        };
        let count = ((t1 - t0) / options.window).ceil() as usize;
        let anchors: Vec<f64> = (0..=count).map(|k| t0 + k as f64 * options.window).collect();
        for w in anchors.windows(2) {
            field.forward.push(field.integrate(w[1], w[0])?);
            field.backward.push(field.integrate(w[0], w[1])?);
        }
        field.anchor_times = anchors;
        Ok(field)
    }

    /// Field with default options and no cached span.
    pub fn with_defaults(a: MatrixSignal) -> Result<Self> {
        Self::new(a, 0.0, 0.0, EvolutionOptions::default())
    }

    pub fn coefficient(&self) -> &MatrixSignal {
        &self.a
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn options(&self) -> EvolutionOptions {
        self.options
    }

    pub fn anchor_times(&self) -> &[f64] {
        &self.anchor_times
    }

    pub fn is_constant(&self) -> bool {
        self.constant.is_some()
    }

    /// `Psi(t, s)`.
    pub fn evolution(&self, t: f64, s: f64) -> Result<CMatrix> {
        let span = (t - s).abs();
        if span > self.options.horizon {
            return Err(Error::HorizonExceeded {
                span,
                horizon: self.options.horizon,
            });
        }
        if t == s {
            return Ok(identity(self.dim()));
        }
        let anchors = &self.anchor_times;
        let (lo, hi) = if t > s { (s, t) } else { (t, s) };
        // Whole cached windows strictly inside [lo, hi].
        let first = anchors.partition_point(|&a| a < lo);
        let last = anchors.partition_point(|&a| a <= hi);
        if last < first + 2 {
            return self.integrate(t, s);
        }
        let (i, j) = (first, last - 1);
        if t > s {
            let mut m = self.integrate(anchors[i], s)?;
            for k in i..j {
                m = &self.forward[k] * m;
            }
            Ok(self.integrate(t, anchors[j])? * m)
        } else {
            let mut m = self.integrate(anchors[j], s)?;
            for k in (i..j).rev() {
                m = &self.backward[k] * m;
            }
            Ok(self.integrate(t, anchors[i])? * m)
        }
    }

    /// Direct RK4 integration of `Y' = A Y`, `Y(s) = I`, to time `t`, with
    /// `ceil(|t - s| / rk_step)` equal steps.
    pub fn integrate(&self, t: f64, s: f64) -> Result<CMatrix> {
        let p = self.dim();
        if t == s {
            return Ok(identity(p));
        }
        let n = ((t - s).abs() / self.options.rk_step - 1e-9).ceil().max(1.0) as usize;
        let h = (t - s) / n as f64;
        if let Some(a) = &self.constant {
            let step = rk4_constant_step(a, h);
            return Ok(matrix_power(&step, n));
        }
        let mut y = identity(p);
        let mut a0 = self.a.eval(s)?;
        let mut am = DMatrix::zeros(p, p);
        let mut a1 = DMatrix::zeros(p, p);
        for k in 0..n {
            let r = s + k as f64 * h;
            self.a.eval_into(r + 0.5 * h, &mut am)?;
            self.a.eval_into(s + (k + 1) as f64 * h, &mut a1)?;
            let step = rk4_step(&a0, &am, &a1, h);
            y = step * y;
            std::mem::swap(&mut a0, &mut a1);
        }
        Ok(y)
    }

    /// `Psi(t_{k+1}, t_k)` for `t_k = t0 + k dt`, `k = 0..n-1`. A constant
    /// coefficient yields a single shared matrix.
    pub fn forward_steps(&self, t0: f64, dt: f64, n: usize) -> Result<Vec<CMatrix>> {
        if self.constant.is_some() {
            return Ok(vec![self.integrate(dt, 0.0)?]);
        }
        (0..n)
            .map(|k| self.integrate(t0 + (k + 1) as f64 * dt, t0 + k as f64 * dt))
            .collect()
    }

    /// `Psi(t_k, t_{k+1})`, laid out as in [`Self::forward_steps`].
    pub fn backward_steps(&self, t0: f64, dt: f64, n: usize) -> Result<Vec<CMatrix>> {
        if self.constant.is_some() {
            return Ok(vec![self.integrate(0.0, dt)?]);
        }
        (0..n)
            .map(|k| self.integrate(t0 + k as f64 * dt, t0 + (k + 1) as f64 * dt))
            .collect()
    }
}

/// One classical RK4 step for the linear system, as a matrix acting on `Y`.
fn rk4_step(a0: &CMatrix, am: &CMatrix, a1: &CMatrix, h: f64) -> CMatrix {
    let p = a0.nrows();
    let id = identity(p);
    let hc = Complex64::new(h, 0.0);
    let half = Complex64::new(0.5 * h, 0.0);
    let k1 = a0.clone();
    let k2 = am * (&id + &k1 * half);
    let k3 = am * (&id + &k2 * half);
    let k4 = a1 * (&id + &k3 * hc);
    let sum = k1 + k2 * Complex64::new(2.0, 0.0) + k3 * Complex64::new(2.0, 0.0) + k4;
    id + sum * Complex64::new(h / 6.0, 0.0)
}

fn rk4_constant_step(a: &CMatrix, h: f64) -> CMatrix {
    rk4_step(a, a, a, h)
}

fn matrix_power(m: &CMatrix, mut n: usize) -> CMatrix {
    let mut result = identity(m.nrows());
    let mut base = m.clone();
    while n > 0 {
        if n & 1 == 1 {
            result = &result * &base;
        }
        n >>= 1;
        if n > 0 {
            base = &base * &base;
        }
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use crate::signals::ScalarSignal;

    fn scalar(s: ScalarSignal) -> MatrixSignal {
        MatrixSignal::scalar(s)
    }

    fn periodic() -> MatrixSignal {
        scalar(ScalarSignal::constant(-2.0) + ScalarSignal::sin(1.0, 1.0, 0.0))
    }

    fn closed_form(t: f64, s: f64) -> f64 {
        (-2.0 * (t - s) + s.cos() - t.cos()).exp()
    }

    #[test]
    fn identity_at_equal_times() {
        let e = EvolutionField::with_defaults(periodic()).unwrap();
        assert!(max_abs(&(e.evolution(1.3, 1.3).unwrap() - identity(1))) == 0.0);
    }

    #[test]
    fn constant_scalar_decay() {
        let e = EvolutionField::with_defaults(scalar(ScalarSignal::constant(-1.0))).unwrap();
        let v = e.evolution(2.0, 1.0).unwrap()[(0, 0)];
        assert!((v.re - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn periodic_scalar_matches_closed_form() {
        let e = EvolutionField::new(periodic(), 0.0, 20.0, EvolutionOptions::default()).unwrap();
        for (t, s) in [(3.0, 1.0), (1.0, 3.0), (17.0, 2.5), (2.5, 14.0)] {
            let v = e.evolution(t, s).unwrap()[(0, 0)];
            let exact = closed_form(t, s);
            assert!(
                (v.re - exact).abs() < 1e-8 * exact.max(1.0),
                "({t},{s}): {} vs {exact}",
                v.re
            );
            assert!(v.im.abs() < 1e-14);
        }
    }

    #[test]
    fn cached_and_direct_agree() {
        let e = EvolutionField::new(periodic(), 0.0, 30.0, EvolutionOptions::default()).unwrap();
        let cached = e.evolution(27.3, 1.1).unwrap()[(0, 0)];
        let direct = e.integrate(27.3, 1.1).unwrap()[(0, 0)];
        assert!((cached - direct).norm() < 1e-10 * direct.norm());
    }

    #[test]
    fn horizon_is_enforced() {
        let opts = EvolutionOptions {
            horizon: 10.0,
            ..EvolutionOptions::default()
        };
        let e = EvolutionField::new(periodic(), 0.0, 0.0, opts).unwrap();
        assert!(matches!(e.evolution(11.0, 0.0), Err(Error::HorizonExceeded { .. })));
    }

    #[test]
    fn cocycle_law() {
        let rows = vec![
            vec![
                ScalarSignal::constant(-1.0) + ScalarSignal::cos(0.5, 1.0, 0.0),
                ScalarSignal::constant(0.3),
            ],
            vec![ScalarSignal::sin(0.2, 2.0, 0.0), ScalarSignal::constant(0.5)],
        ];
        let a = MatrixSignal::new(rows, crate::signals::Structure::General).unwrap();
        let e = EvolutionField::new(a, 0.0, 10.0, EvolutionOptions::default()).unwrap();
        for (t, s, r) in [(4.0, 2.0, 0.5), (1.0, 6.0, 3.0), (9.5, 0.2, 7.7)] {
            let lhs = e.evolution(t, s).unwrap() * e.evolution(s, r).unwrap();
            let rhs = e.evolution(t, r).unwrap();
            assert!(max_abs(&(lhs - &rhs)) < 1e-9 * max_abs(&rhs).max(1.0));
        }
    }

    #[test]
    fn rotation_is_orthogonal() {
        let a = MatrixSignal::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]).unwrap();
        let e = EvolutionField::with_defaults(a).unwrap();
        let m = e.evolution(std::f64::consts::PI, 0.0).unwrap();
        assert!(max_abs(&(m + identity(2))) < 1e-10);
    }
}

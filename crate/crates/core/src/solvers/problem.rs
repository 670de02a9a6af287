use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::lagrange4_real;
use crate::signals::{MatrixSignal, ScalarSignal, Window};

/// Nonlinear perturbation `g(t, y)`, applied componentwise. Every variant
/// satisfies `g(t, 0) = 0`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Nonlinearity {
    #[default]
    None,
    /// `weight(t) (e^{-gamma y} - 1)`, Lipschitz with `gamma |weight|_inf` on `y >= 0`.
    ScaledExpDecay { gamma: f64, weight: ScalarSignal },
    /// Tabulated scalar map of `Re y` with a declared Lipschitz constant,
    /// interpolated by cubic Lagrange on `y_min + k dy`.
    UserTable {
        y_min: f64,
        dy: f64,
        values: Vec<f64>,
        lipschitz: f64,
    },
}

impl Nonlinearity {
    /// Tabulates `map` on `[y_min, y_max]`.
    pub fn table<F: Fn(f64) -> f64>(map: F, y_min: f64, y_max: f64, dy: f64, lipschitz: f64) -> Result<Self> {
        if !(y_max > y_min && dy > 0.0) {
            return Err(Error::invalid("table range must be non-empty with dy > 0"));
        }
        let n = ((y_max - y_min) / dy).round() as usize + 1;
        let values = (0..n).map(|k| map(y_min + k as f64 * dy)).collect();
        let g = Nonlinearity::UserTable {
            y_min,
            dy,
            values,
            lipschitz,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn is_none(&self) -> bool {
        matches!(self, Nonlinearity::None)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Nonlinearity::None => Ok(()),
            Nonlinearity::ScaledExpDecay { gamma, .. } => {
                if !(*gamma >= 0.0 && gamma.is_finite()) {
                    return Err(Error::invalid(format!("gamma = {gamma} must be finite and >= 0")));
                }
                Ok(())
            }
            Nonlinearity::UserTable {
                y_min,
                dy,
                values,
                lipschitz,
            } => {
                if values.len() < 4 || !(*dy > 0.0) {
                    return Err(Error::invalid("user table needs dy > 0 and at least four values"));
                }
                if !(*lipschitz >= 0.0) {
                    return Err(Error::invalid("user table Lipschitz constant must be >= 0"));
                }
                let secant = values.windows(2).map(|w| (w[1] - w[0]).abs() / dy).fold(0.0, f64::max);
                if secant > lipschitz * (1.0 + 1e-9) + 1e-12 {
                    return Err(Error::invalid(format!(
                        "user table has secant slope {secant} above its declared Lipschitz constant {lipschitz}"
                    )));
                }
                let y_max = y_min + (values.len() - 1) as f64 * dy;
                if *y_min <= 0.0 && y_max >= 0.0 {
                    let at_zero = lagrange4_real(values, *y_min, *dy, 0.0).unwrap_or(0.0);
                    let scale = values.iter().map(|v| v.abs()).fold(1.0, f64::max);
                    if at_zero.abs() > 1e-10 * scale {
                        return Err(Error::invalid(format!("user table must vanish at 0, has {at_zero}")));
                    }
                }
                Ok(())
            }
        }
    }

    /// Lipschitz constant on the sampled window.
    pub fn lipschitz(&self, window: &Window) -> Result<f64> {
        match self {
            Nonlinearity::None => Ok(0.0),
            Nonlinearity::ScaledExpDecay { gamma, weight } => {
                Ok(gamma * weight.sup_norm_on(window.t0, window.t1, window.dt)?)
            }
            Nonlinearity::UserTable { lipschitz, .. } => Ok(*lipschitz),
        }
    }

    /// Writes `g(t, y)` into `out`. `weight` is the value of the weight
    /// signal at `t` (ignored by other variants).
    pub fn apply(&self, weight: Complex64, y: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        match self {
            Nonlinearity::None => out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0)),
            Nonlinearity::ScaledExpDecay { gamma, .. } => {
                for (o, v) in out.iter_mut().zip(y) {
                    *o = weight * ((-*gamma * v).exp() - 1.0);
                }
            }
            Nonlinearity::UserTable { y_min, dy, values, .. } => {
                for (o, v) in out.iter_mut().zip(y) {
                    let g = lagrange4_real(values, *y_min, *dy, v.re).ok_or_else(|| {
                        let y_max = y_min + (values.len() - 1) as f64 * dy;
                        Error::invalid(format!("argument {} outside the table range [{y_min}, {y_max}]", v.re))
                    })?;
                    *o = Complex64::new(g, 0.0);
                }
            }
        }
        Ok(())
    }

    /// The time-dependent weight, if any.
    pub fn weight(&self) -> Option<&ScalarSignal> {
        match self {
            Nonlinearity::ScaledExpDecay { weight, .. } => Some(weight),
            _ => None,
        }
    }
}

/// `y' = A(t) y + f(t) + g(t, y(t - tau))` with the ball radius `rho` of the
/// contraction domain around the linear solution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    #[serde(rename = "A")]
    pub a: MatrixSignal,
    pub f: Vec<ScalarSignal>,
    #[serde(default)]
    pub g: Nonlinearity,
    #[serde(default)]
    pub tau: f64,
    pub rho: f64,
}

impl ProblemSpec {
    pub fn new(a: MatrixSignal, f: Vec<ScalarSignal>, g: Nonlinearity, tau: f64, rho: f64) -> Result<Self> {
        let spec = ProblemSpec { a, f, g, tau, rho };
        spec.validate()?;
        Ok(spec)
    }

    /// Linear problem without delay.
    pub fn linear(a: MatrixSignal, f: Vec<ScalarSignal>) -> Result<Self> {
        Self::new(a, f, Nonlinearity::None, 0.0, 1.0)
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn validate(&self) -> Result<()> {
        if self.f.len() != self.a.dim() {
            return Err(Error::invalid(format!(
                "forcing has {} components but A is {}x{}",
                self.f.len(),
                self.a.dim(),
                self.a.dim()
            )));
        }
        if !(self.tau >= 0.0 && self.tau.is_finite()) {
            return Err(Error::invalid(format!(
                "delay tau = {} must be finite and >= 0",
                self.tau
            )));
        }
        if !(self.rho > 0.0) {
            return Err(Error::invalid(format!(
                "ball radius rho = {} must be positive",
                self.rho
            )));
        }
        self.g.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_decay_vanishes_at_zero() {
        let g = Nonlinearity::ScaledExpDecay {
            gamma: 0.3,
            weight: ScalarSignal::constant(2.0),
        };
        let mut out = [Complex64::new(1.0, 0.0)];
        g.apply(Complex64::new(2.0, 0.0), &[Complex64::new(0.0, 0.0)], &mut out)
            .unwrap();
        assert_eq!(out[0], Complex64::new(0.0, 0.0));
        g.apply(Complex64::new(2.0, 0.0), &[Complex64::new(1.0, 0.0)], &mut out)
            .unwrap();
        assert!((out[0].re - 2.0 * ((-0.3f64).exp() - 1.0)).abs() < 1e-15);
        let w = Window::new(0.0, 10.0, 0.1).unwrap();
        assert!((g.lipschitz(&w).unwrap() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn sine_table() {
        let g = Nonlinearity::table(|y| 0.1 * y.sin(), -20.0, 20.0, 1e-3, 0.1).unwrap();
        let mut out = [Complex64::new(0.0, 0.0)];
        g.apply(Complex64::new(0.0, 0.0), &[Complex64::new(1.2345, 0.0)], &mut out)
            .unwrap();
        assert!((out[0].re - 0.1 * 1.2345f64.sin()).abs() < 1e-12);
        assert!(g
            .apply(Complex64::new(0.0, 0.0), &[Complex64::new(25.0, 0.0)], &mut out)
            .is_err());
    }

    #[test]
    fn table_validation() {
        assert!(Nonlinearity::table(|y| 0.5 * y.sin(), -5.0, 5.0, 1e-2, 0.1).is_err());
        assert!(Nonlinearity::table(|y| 0.1 * y.cos(), -5.0, 5.0, 1e-2, 0.1).is_err());
    }

    #[test]
    fn spec_validation_and_json() {
        let a = MatrixSignal::scalar(ScalarSignal::constant(-1.0));
        assert!(ProblemSpec::new(a.clone(), vec![], Nonlinearity::None, 0.0, 1.0).is_err());
        assert!(ProblemSpec::new(a.clone(), vec![ScalarSignal::zero()], Nonlinearity::None, -1.0, 1.0).is_err());
        assert!(ProblemSpec::new(a.clone(), vec![ScalarSignal::zero()], Nonlinearity::None, 0.0, 0.0).is_err());
        let spec = ProblemSpec::new(
            a,
            vec![ScalarSignal::cos(1.0, 1.0, 0.0)],
            Nonlinearity::ScaledExpDecay {
                gamma: 0.1,
                weight: ScalarSignal::constant(1.0),
            },
            1.0,
            3.0,
        )
        .unwrap();
        let s = crate::io::to_json_string(&spec).unwrap();
        assert!(s.contains("\"kind\": \"scaled_exp_decay\""));
        let back: ProblemSpec = crate::io::from_json_str(&s).unwrap();
        assert_eq!(back, spec);
    }
}

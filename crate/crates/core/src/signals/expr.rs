use std::ops::{Add, Mul, Neg};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lower bound on `|a + u(t)|` for `recip_shift(a)` compositions.
pub const EPS_DIV: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrigKind {
    Sin,
    Cos,
}

/// Unary maps allowed as the outer function of a composition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "map", rename_all = "snake_case")]
pub enum UnaryMap {
    Exp,
    Sin,
    Cos,
    Neg,
    /// `u -> 1 / (a + u)`
    RecipShift {
        a: f64,
    },
}

/// Closed-form coefficient function `R -> C`.
///
/// Translation is symbolic (trig phases are rewritten), so translated
/// signals are again closed-form expressions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum ScalarSignal {
    Const {
        #[serde(with = "crate::io::complex")]
        value: Complex64,
    },
    Trig {
        amplitude: f64,
        frequency: f64,
        phase: f64,
        kind: TrigKind,
    },
    Sum {
        terms: Vec<ScalarSignal>,
    },
    Product {
        factors: Vec<ScalarSignal>,
    },
    Compose {
        outer: UnaryMap,
        inner: Box<ScalarSignal>,
    },
    Scale {
        #[serde(with = "crate::io::complex")]
        k: Complex64,
        inner: Box<ScalarSignal>,
    },
}

impl ScalarSignal {
    pub fn constant(value: f64) -> Self {
        ScalarSignal::Const {
            value: Complex64::new(value, 0.0),
        }
    }

    pub fn complex(value: Complex64) -> Self {
        ScalarSignal::Const { value }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    /// `amplitude * sin(frequency * t + phase)`
    pub fn sin(amplitude: f64, frequency: f64, phase: f64) -> Self {
        ScalarSignal::Trig {
            amplitude,
            frequency,
            phase,
            kind: TrigKind::Sin,
        }
    }

    /// `amplitude * cos(frequency * t + phase)`
    pub fn cos(amplitude: f64, frequency: f64, phase: f64) -> Self {
        ScalarSignal::Trig {
            amplitude,
            frequency,
            phase,
            kind: TrigKind::Cos,
        }
    }

    /// `e^{i frequency t}` written as `cos + i sin`.
    pub fn cis(frequency: f64) -> Self {
        Self::sum(vec![
            Self::cos(1.0, frequency, 0.0),
            Self::sin(1.0, frequency, 0.0).scaled(Complex64::new(0.0, 1.0)),
        ])
    }

    pub fn sum(terms: Vec<ScalarSignal>) -> Self {
        ScalarSignal::Sum { terms }
    }

    pub fn product(factors: Vec<ScalarSignal>) -> Self {
        ScalarSignal::Product { factors }
    }

    pub fn compose(outer: UnaryMap, inner: ScalarSignal) -> Self {
        ScalarSignal::Compose {
            outer,
            inner: Box::new(inner),
        }
    }

    pub fn scaled(self, k: Complex64) -> Self {
        ScalarSignal::Scale {
            k,
            inner: Box::new(self),
        }
    }

    pub fn scaled_re(self, k: f64) -> Self {
        self.scaled(Complex64::new(k, 0.0))
    }

    /// `cos(1 / (2 + sin t + sin(sqrt(2) t)))`.
    pub fn levitan_like() -> Self {
        let inner = Self::sum(vec![Self::sin(1.0, 1.0, 0.0), Self::sin(1.0, 2f64.sqrt(), 0.0)]);
        Self::compose(UnaryMap::Cos, Self::compose(UnaryMap::RecipShift { a: 2.0 }, inner))
    }

    pub fn eval(&self, t: f64) -> Result<Complex64> {
        Ok(match self {
            ScalarSignal::Const { value } => *value,
            ScalarSignal::Trig {
                amplitude,
                frequency,
                phase,
                kind,
            } => {
                let arg = frequency * t + phase;
                let v = match kind {
                    TrigKind::Sin => arg.sin(),
                    TrigKind::Cos => arg.cos(),
                };
                Complex64::new(amplitude * v, 0.0)
            }
            ScalarSignal::Sum { terms } => {
                let mut acc = Complex64::new(0.0, 0.0);
                for term in terms {
                    acc += term.eval(t)?;
                }
                acc
            }
            ScalarSignal::Product { factors } => {
                let mut acc = Complex64::new(1.0, 0.0);
                for factor in factors {
                    acc *= factor.eval(t)?;
                }
                acc
            }
            ScalarSignal::Compose { outer, inner } => {
                let u = inner.eval(t)?;
                match outer {
                    UnaryMap::Exp => u.exp(),
                    UnaryMap::Sin => u.sin(),
                    UnaryMap::Cos => u.cos(),
                    UnaryMap::Neg => -u,
                    UnaryMap::RecipShift { a } => {
                        let d = u + a;
                        let magnitude = d.norm();
                        if magnitude < EPS_DIV {
                            return Err(Error::DivisionGuard {
                                t,
                                shift: *a,
                                magnitude,
                                eps: EPS_DIV,
                            });
                        }
                        d.inv()
                    }
                }
            }
            ScalarSignal::Scale { k, inner } => k * inner.eval(t)?,
        })
    }

    /// Real part of `eval`; convenience for real-valued coefficients.
    pub fn eval_re(&self, t: f64) -> Result<f64> {
        Ok(self.eval(t)?.re)
    }

    /// The signal `t -> s(t + xi)`.
    pub fn translate(&self, xi: f64) -> Self {
        match self {
            ScalarSignal::Const { .. } => self.clone(),
            ScalarSignal::Trig {
                amplitude,
                frequency,
                phase,
                kind,
            } => ScalarSignal::Trig {
                amplitude: *amplitude,
                frequency: *frequency,
                phase: phase + frequency * xi,
                kind: *kind,
            },
            ScalarSignal::Sum { terms } => ScalarSignal::Sum {
                terms: terms.iter().map(|s| s.translate(xi)).collect(),
            },
            ScalarSignal::Product { factors } => ScalarSignal::Product {
                factors: factors.iter().map(|s| s.translate(xi)).collect(),
            },
            ScalarSignal::Compose { outer, inner } => ScalarSignal::Compose {
                outer: *outer,
                inner: Box::new(inner.translate(xi)),
            },
            ScalarSignal::Scale { k, inner } => ScalarSignal::Scale {
                k: *k,
                inner: Box::new(inner.translate(xi)),
            },
        }
    }

    /// Structurally zero (no evaluation involved).
    pub fn is_zero(&self) -> bool {
        match self {
            ScalarSignal::Const { value } => *value == Complex64::new(0.0, 0.0),
            ScalarSignal::Trig { amplitude, .. } => *amplitude == 0.0,
            ScalarSignal::Sum { terms } => terms.iter().all(|s| s.is_zero()),
            ScalarSignal::Product { factors } => factors.iter().any(|s| s.is_zero()),
            ScalarSignal::Compose { outer, inner } => matches!(outer, UnaryMap::Neg | UnaryMap::Sin) && inner.is_zero(),
            ScalarSignal::Scale { k, inner } => *k == Complex64::new(0.0, 0.0) || inner.is_zero(),
        }
    }

    /// Time-independent (no trig term with nonzero frequency).
    pub fn is_constant(&self) -> bool {
        match self {
            ScalarSignal::Const { .. } => true,
            ScalarSignal::Trig {
                amplitude, frequency, ..
            } => *frequency == 0.0 || *amplitude == 0.0,
            ScalarSignal::Sum { terms } => terms.iter().all(|s| s.is_constant()),
            ScalarSignal::Product { factors } => {
                factors.iter().any(|s| s.is_zero()) || factors.iter().all(|s| s.is_constant())
            }
            ScalarSignal::Compose { inner, .. } => inner.is_constant(),
            ScalarSignal::Scale { k, inner } => *k == Complex64::new(0.0, 0.0) || inner.is_constant(),
        }
    }

    /// Sampled sup-norm on `[t0, t1]` with spacing at most `dt`.
    pub fn sup_norm_on(&self, t0: f64, t1: f64, dt: f64) -> Result<f64> {
        let n = (((t1 - t0) / dt).ceil() as usize).max(1);
        let h = (t1 - t0) / n as f64;
        let mut sup = 0.0f64;
        for k in 0..=n {
            sup = sup.max(self.eval(t0 + k as f64 * h)?.norm());
        }
        Ok(sup)
    }
}

impl Add for ScalarSignal {
    type Output = ScalarSignal;

    fn add(self, rhs: ScalarSignal) -> ScalarSignal {
        match self {
            ScalarSignal::Sum { mut terms } => {
                terms.push(rhs);
                ScalarSignal::Sum { terms }
            }
            lhs => ScalarSignal::Sum { terms: vec![lhs, rhs] },
        }
    }
}

impl Mul for ScalarSignal {
    type Output = ScalarSignal;

    fn mul(self, rhs: ScalarSignal) -> ScalarSignal {
        ScalarSignal::Product {
            factors: vec![self, rhs],
        }
    }
}

impl Neg for ScalarSignal {
    type Output = ScalarSignal;

    fn neg(self) -> ScalarSignal {
        self.scaled_re(-1.0)
    }
}

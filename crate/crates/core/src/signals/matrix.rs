use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ScalarSignal;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Structure {
    Constant,
    Diagonal,
    UpperTriangular,
    General,
}

/// `p x p` matrix of coefficient functions with a validated structure tag.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrixSignal", into = "RawMatrixSignal")]
pub struct MatrixSignal {
    dim: usize,
    entries: Vec<ScalarSignal>,
    structure: Structure,
}

#[derive(Serialize, Deserialize)]
struct RawMatrixSignal {
    dim: usize,
    structure: Structure,
    entries: Vec<Vec<ScalarSignal>>,
}

impl TryFrom<RawMatrixSignal> for MatrixSignal {
    type Error = Error;

    fn try_from(raw: RawMatrixSignal) -> Result<Self> {
        if raw.entries.len() != raw.dim {
            return Err(Error::invalid(format!(
                "matrix signal: expected {} rows, got {}",
                raw.dim,
                raw.entries.len()
            )));
        }
        MatrixSignal::new(raw.entries, raw.structure)
    }
}

impl From<MatrixSignal> for RawMatrixSignal {
    fn from(m: MatrixSignal) -> Self {
        let dim = m.dim;
        let entries = m.entries.chunks(dim).map(|row| row.to_vec()).collect();
        RawMatrixSignal {
            dim,
            structure: m.structure,
            entries,
        }
    }
}

impl MatrixSignal {
    /// Builds from rows; the structure tag is checked against the entries.
    pub fn new(rows: Vec<Vec<ScalarSignal>>, structure: Structure) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::invalid("matrix signal must have dimension >= 1"));
        }
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != dim) {
            return Err(Error::invalid(format!(
                "matrix signal row {i} has {} entries, expected {dim}",
                row.len()
            )));
        }
        let entries: Vec<ScalarSignal> = rows.into_iter().flatten().collect();
        let m = MatrixSignal {
            dim,
            entries,
            structure,
        };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        let p = self.dim;
        let bad = |what: &str, i: usize, j: usize| {
            Err(Error::invalid(format!(
                "matrix signal tagged {:?} but entry ({i},{j}) is {what}",
                self.structure
            )))
        };
        for i in 0..p {
            for j in 0..p {
                let e = self.entry(i, j);
                match self.structure {
                    Structure::Constant if !e.is_constant() => return bad("time-dependent", i, j),
                    Structure::Diagonal if i != j && !e.is_zero() => return bad("nonzero", i, j),
                    Structure::UpperTriangular if i > j && !e.is_zero() => return bad("nonzero", i, j),
                    _ => {}
                }
            }
        }
        Ok(())
    }

    /// 1 x 1 matrix; tagged constant when the entry is.
    pub fn scalar(s: ScalarSignal) -> Self {
        let structure = if s.is_constant() {
            Structure::Constant
        } else {
            Structure::Diagonal
        };
        MatrixSignal {
            dim: 1,
            entries: vec![s],
            structure,
        }
    }

    pub fn diagonal(diag: Vec<ScalarSignal>) -> Self {
        let p = diag.len();
        let mut entries = vec![ScalarSignal::zero(); p * p];
        for (k, s) in diag.into_iter().enumerate() {
            entries[k * p + k] = s;
        }
        MatrixSignal {
            dim: p,
            entries,
            structure: Structure::Diagonal,
        }
    }

    pub fn from_constant(m: &DMatrix<Complex64>) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::invalid("constant matrix must be square and non-empty"));
        }
        let p = m.nrows();
        let rows = (0..p)
            .map(|i| (0..p).map(|j| ScalarSignal::complex(m[(i, j)])).collect())
            .collect();
        MatrixSignal::new(rows, Structure::Constant)
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let p = rows.len();
        let m = DMatrix::from_fn(p, p, |i, j| {
            Complex64::new(rows[i].get(j).copied().unwrap_or(f64::NAN), 0.0)
        });
        if rows.iter().any(|r| r.len() != p) {
            return Err(Error::invalid("rows must form a square matrix"));
        }
        Self::from_constant(&m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn structure(&self) -> Structure {
        self.structure
    }

    pub fn entry(&self, i: usize, j: usize) -> &ScalarSignal {
        &self.entries[i * self.dim + j]
    }

    /// True when every entry is time-independent, whatever the tag says.
    pub fn is_constant(&self) -> bool {
        self.structure == Structure::Constant || self.entries.iter().all(|e| e.is_constant())
    }

    /// Zero below the diagonal.
    pub fn is_upper_triangular(&self) -> bool {
        (0..self.dim).all(|i| (0..i).all(|j| self.entry(i, j).is_zero()))
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| i == j || self.entry(i, j).is_zero()))
    }

    pub fn eval(&self, t: f64) -> Result<DMatrix<Complex64>> {
        let p = self.dim;
        let mut m = DMatrix::zeros(p, p);
        self.eval_into(t, &mut m)?;
        Ok(m)
    }

    pub fn eval_into(&self, t: f64, out: &mut DMatrix<Complex64>) -> Result<()> {
        let p = self.dim;
        for i in 0..p {
            for j in 0..p {
                let e = self.entry(i, j);
                out[(i, j)] = if e.is_zero() {
                    Complex64::new(0.0, 0.0)
                } else {
                    e.eval(t)?
                };
            }
        }
        Ok(())
    }

    pub fn translate(&self, xi: f64) -> Self {
        MatrixSignal {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e.translate(xi)).collect(),
            structure: self.structure,
        }
    }

    /// Sampled sup of the spectral norm on `[t0, t1]`.
    pub fn sup_norm_on(&self, t0: f64, t1: f64, dt: f64) -> Result<f64> {
        let n = (((t1 - t0) / dt).ceil() as usize).max(1);
        let h = (t1 - t0) / n as f64;
        let mut sup = 0.0f64;
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for k in 0..=n {
            self.eval_into(t0 + k as f64 * h, &mut m)?;
            sup = sup.max(crate::linalg::spectral_norm(&m));
        }
        Ok(sup)
    }

    /// Sampled sup over `t` of `|A(t + xi) - A(t)|`.
    pub fn shift_deviation(&self, xi: f64, t0: f64, t1: f64, dt: f64) -> Result<f64> {
        let shifted = self.translate(xi);
        let n = (((t1 - t0) / dt).ceil() as usize).max(1);
        let h = (t1 - t0) / n as f64;
        let mut sup = 0.0f64;
        for k in 0..=n {
            let t = t0 + k as f64 * h;
            let d = shifted.eval(t)? - self.eval(t)?;
            sup = sup.max(crate::linalg::spectral_norm(&d));
        }
        Ok(sup)
    }
}

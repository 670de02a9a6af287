use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{MatrixSignal, ScalarSignal};
use crate::error::{Error, Result};
use crate::io::fmt_f64;
use crate::quad;

/// Uniform time grid `t0, t0 + dt, ..., t1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub t0: f64,
    pub t1: f64,
    pub dt: f64,
}

impl Window {
    pub fn new(t0: f64, t1: f64, dt: f64) -> Result<Self> {
        let w = Window { t0, t1, dt };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t0.is_finite() && self.t1.is_finite() && self.dt.is_finite()) {
            return Err(Error::invalid("window bounds must be finite"));
        }
        if self.dt <= 0.0 {
            return Err(Error::invalid(format!("window dt must be positive, got {}", self.dt)));
        }
        if self.t1 <= self.t0 {
            return Err(Error::invalid(format!(
                "window needs t1 > t0, got [{}, {}]",
                self.t0, self.t1
            )));
        }
        Ok(())
    }

    /// Number of grid points (`t1` is rounded onto the lattice).
    pub fn len(&self) -> usize {
        ((self.t1 - self.t0) / self.dt).round() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    /// Same lattice extended by `left` and `right` points.
    pub fn padded(&self, left: usize, right: usize) -> Window {
        let n = self.len() - 1;
        Window {
            t0: self.t0 - left as f64 * self.dt,
            t1: self.t0 + (n + right) as f64 * self.dt,
            dt: self.dt,
        }
    }

    pub fn span(&self) -> f64 {
        (self.len() - 1) as f64 * self.dt
    }
}

/// Uniformly sampled vector-valued function on a finite window.
///
/// Values are stored point-major: the `dim` components of point `k` are
/// `values[k * dim .. (k + 1) * dim]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    t0: f64,
    dt: f64,
    dim: usize,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(t0: f64, dt: f64, dim: usize, values: Vec<Complex64>) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() || !t0.is_finite() {
            return Err(Error::invalid(format!(
                "grid needs finite t0 and dt > 0 (t0 = {t0}, dt = {dt})"
            )));
        }
        if dim == 0 || !values.len().is_multiple_of(dim) {
            return Err(Error::invalid("grid values do not match the dimension"));
        }
        if values.len() / dim < 2 {
            return Err(Error::invalid("grid needs at least two points"));
        }
        if let Some(k) = values.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::invalid(format!("grid value at point {} is not finite", k / dim)));
        }
        Ok(GridFunction { t0, dt, dim, values })
    }

    pub fn from_scalars(t0: f64, dt: f64, values: Vec<Complex64>) -> Result<Self> {
        Self::new(t0, dt, 1, values)
    }

    pub fn from_real(t0: f64, dt: f64, values: &[f64]) -> Result<Self> {
        Self::new(t0, dt, 1, values.iter().map(|v| Complex64::new(*v, 0.0)).collect())
    }

    pub fn zeros(window: &Window, dim: usize) -> Result<Self> {
        Self::new(
            window.t0,
            window.dt,
            dim,
            vec![Complex64::new(0.0, 0.0); window.len() * dim],
        )
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.len() - 1)
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn window(&self) -> Window {
        Window {
            t0: self.t0,
            t1: self.t_end(),
            dt: self.dt,
        }
    }

    pub fn value(&self, k: usize) -> &[Complex64] {
        &self.values[k * self.dim..(k + 1) * self.dim]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Component `i` at every point.
    pub fn component(&self, i: usize) -> Vec<Complex64> {
        (0..self.len()).map(|k| self.values[k * self.dim + i]).collect()
    }

    /// Scalar grids only: value at point `k`.
    pub fn scalar(&self, k: usize) -> Complex64 {
        self.values[k * self.dim]
    }

    /// `max_k |g(t_k)|` with the Euclidean norm on components.
    pub fn sup_norm(&self) -> f64 {
        self.values.chunks(self.dim).map(quad::norm).fold(0.0, f64::max)
    }

    /// Sup-norm of `self - other` on the common lattice points.
    pub fn sup_diff(&self, other: &GridFunction) -> Result<f64> {
        let (a, b) = self.aligned_overlap(other)?;
        let mut sup = 0.0f64;
        for k in 0..a.1 {
            let x = self.value(a.0 + k);
            let y = other.value(b + k);
            let d: f64 = x.iter().zip(y).map(|(u, v)| (u - v).norm_sqr()).sum::<f64>().sqrt();
            sup = sup.max(d);
        }
        Ok(sup)
    }

    /// For grids on the same lattice: `((start in self, count), start in other)`.
    fn aligned_overlap(&self, other: &GridFunction) -> Result<((usize, usize), usize)> {
        if self.dim != other.dim || (self.dt - other.dt).abs() > 1e-12 * self.dt {
            return Err(Error::invalid("grids differ in dimension or step"));
        }
        let offset = (other.t0 - self.t0) / self.dt;
        if (offset - offset.round()).abs() > 1e-6 {
            return Err(Error::invalid("grids are not on the same lattice"));
        }
        let off = offset.round() as isize;
        let start_self = off.max(0) as usize;
        let start_other = (-off).max(0) as usize;
        let count = (self.len() as isize - start_self as isize).min(other.len() as isize - start_other as isize);
        if count <= 0 {
            return Err(Error::EmptyOverlap {
                shift: other.t0 - self.t0,
                window: self.t_end() - self.t0,
            });
        }
        Ok(((start_self, count as usize), start_other))
    }

    /// Points with index in `first..=last`.
    pub fn slice(&self, first: usize, last: usize) -> Result<GridFunction> {
        if last >= self.len() || last <= first {
            return Err(Error::invalid(format!(
                "slice {first}..={last} out of range for {} points",
                self.len()
            )));
        }
        GridFunction::new(
            self.time(first),
            self.dt,
            self.dim,
            self.values[first * self.dim..(last + 1) * self.dim].to_vec(),
        )
    }

    /// Restriction to the lattice points of `window` (which must lie inside).
    pub fn restrict(&self, window: &Window) -> Result<GridFunction> {
        let first = (window.t0 - self.t0) / self.dt;
        if first < -1e-6 || (first - first.round()).abs() > 1e-6 {
            return Err(Error::invalid(format!(
                "window start {} is not a lattice point inside the grid starting at {}",
                window.t0, self.t0
            )));
        }
        let first = first.round() as usize;
        let last = first + window.len() - 1;
        if last >= self.len() {
            return Err(Error::WindowTooShort {
                needed: last + 1,
                available: self.len(),
            });
        }
        self.slice(first, last)
    }

    /// Cubic interpolation at an arbitrary time inside the grid.
    pub fn sample_at(&self, t: f64) -> Option<Vec<Complex64>> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        quad::lagrange4(&self.values, self.dim, self.t0, self.dt, t, &mut out)?;
        Some(out)
    }

    pub fn map<F: Fn(f64, &[Complex64], &mut [Complex64])>(&self, f: F) -> Result<GridFunction> {
        let mut values = vec![Complex64::new(0.0, 0.0); self.values.len()];
        for k in 0..self.len() {
            f(
                self.time(k),
                self.value(k),
                &mut values[k * self.dim..(k + 1) * self.dim],
            );
        }
        GridFunction::new(self.t0, self.dt, self.dim, values)
    }

    /// `a * self + b * other` on identical grids.
    pub fn lin_comb(&self, a: Complex64, other: &GridFunction, b: Complex64) -> Result<GridFunction> {
        if self.len() != other.len() || self.dim != other.dim || (self.t0 - other.t0).abs() > 1e-9 * self.dt {
            return Err(Error::invalid("linear combination needs identical grids"));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        GridFunction::new(self.t0, self.dt, self.dim, values)
    }

    /// Writes `t,y1_re,y1_im,...` with 17 significant digits.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["t".to_string()];
        for i in 1..=self.dim {
            header.push(format!("y{i}_re"));
            header.push(format!("y{i}_im"));
        }
        w.write_record(&header)?;
        let mut row = Vec::with_capacity(1 + 2 * self.dim);
        for k in 0..self.len() {
            row.clear();
            row.push(fmt_f64(self.time(k)));
            for z in self.value(k) {
                row.push(fmt_f64(z.re));
                row.push(fmt_f64(z.im));
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("CSV output is ASCII"))
    }

    /// Parses the CSV written by [`GridFunction::write_csv`]. The step is
    /// taken from the first two rows and checked against the rest.
    pub fn read_csv<R: Read>(reader: R) -> Result<GridFunction> {
        let mut r = csv::Reader::from_reader(reader);
        let headers = r.headers()?.clone();
        if headers.is_empty() || &headers[0] != "t" || (headers.len() - 1) % 2 != 0 || headers.len() < 3 {
            return Err(Error::invalid("CSV header must be t,y1_re,y1_im,..."));
        }
        let dim = (headers.len() - 1) / 2;
        let mut times = Vec::new();
        let mut values = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let parse = |s: &str| -> Result<f64> {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::invalid(format!("CSV value {s:?} is not a number")))
            };
            times.push(parse(&rec[0])?);
            for i in 0..dim {
                values.push(Complex64::new(parse(&rec[1 + 2 * i])?, parse(&rec[2 + 2 * i])?));
            }
        }
        if times.len() < 2 {
            return Err(Error::invalid("CSV needs at least two rows"));
        }
        let dt = times[1] - times[0];
        let g = GridFunction::new(times[0], dt, dim, values)?;
        for (k, t) in times.iter().enumerate() {
            if (g.time(k) - t).abs() > 1e-9 * (1.0 + t.abs()) {
                return Err(Error::invalid(format!("CSV row {k} breaks the uniform step")));
            }
        }
        Ok(g)
    }
}

/// Anything that evaluates to a fixed-size complex vector at each time.
pub trait Samplable {
    fn sample_dim(&self) -> usize;
    fn eval_into(&self, t: f64, out: &mut [Complex64]) -> Result<()>;
}

impl Samplable for ScalarSignal {
    fn sample_dim(&self) -> usize {
        1
    }

    fn eval_into(&self, t: f64, out: &mut [Complex64]) -> Result<()> {
        out[0] = self.eval(t)?;
        Ok(())
    }
}

impl Samplable for [ScalarSignal] {
    fn sample_dim(&self) -> usize {
        self.len()
    }

    fn eval_into(&self, t: f64, out: &mut [Complex64]) -> Result<()> {
        for (o, s) in out.iter_mut().zip(self) {
            *o = s.eval(t)?;
        }
        Ok(())
    }
}

impl Samplable for Vec<ScalarSignal> {
    fn sample_dim(&self) -> usize {
        self.len()
    }

    fn eval_into(&self, t: f64, out: &mut [Complex64]) -> Result<()> {
        self.as_slice().eval_into(t, out)
    }
}

/// Matrices sample row-major into `p * p` components.
impl Samplable for MatrixSignal {
    fn sample_dim(&self) -> usize {
        self.dim() * self.dim()
    }

    fn eval_into(&self, t: f64, out: &mut [Complex64]) -> Result<()> {
        let p = self.dim();
        for i in 0..p {
            for j in 0..p {
                out[i * p + j] = self.entry(i, j).eval(t)?;
            }
        }
        Ok(())
    }
}

/// `values[k] = s(t0 + k dt)`, `k = 0..n`.
pub fn sample<S: Samplable + ?Sized>(s: &S, t0: f64, dt: f64, n: usize) -> Result<GridFunction> {
    if n < 2 {
        return Err(Error::invalid("sampling needs N >= 2"));
    }
    if !(dt > 0.0) {
        return Err(Error::invalid("sampling needs dt > 0"));
    }
    let dim = s.sample_dim();
    let mut values = vec![Complex64::new(0.0, 0.0); n * dim];
    for k in 0..n {
        s.eval_into(t0 + k as f64 * dt, &mut values[k * dim..(k + 1) * dim])?;
    }
    GridFunction::new(t0, dt, dim, values)
}

pub fn sample_window<S: Samplable + ?Sized>(s: &S, window: &Window) -> Result<GridFunction> {
    sample(s, window.t0, window.dt, window.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sample_examples() {
        let g = sample(&ScalarSignal::constant(1.0), -3.0, 0.1, 7).unwrap();
        assert!(g.values().iter().all(|z| *z == Complex64::new(1.0, 0.0)));
        let c = sample(&ScalarSignal::cos(1.0, 1.0, 0.0), 0.0, PI, 3).unwrap();
        let expect = [1.0, -1.0, 1.0];
        for (k, e) in expect.iter().enumerate() {
            assert!((c.scalar(k).re - e).abs() < 1e-15);
        }
        let d1 = ScalarSignal::sin(1.0, 1.0, 0.0);
        let d2 = ScalarSignal::cos(2.0, 0.5, 0.0);
        let m = MatrixSignal::diagonal(vec![d1.clone(), d2.clone()]);
        let gm = sample(&m, 0.0, 0.25, 9).unwrap();
        let g1 = sample(&d1, 0.0, 0.25, 9).unwrap();
        let g2 = sample(&d2, 0.0, 0.25, 9).unwrap();
        for k in 0..9 {
            assert_eq!(gm.value(k)[0], g1.scalar(k));
            assert_eq!(gm.value(k)[3], g2.scalar(k));
            assert_eq!(gm.value(k)[1], Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn invalid_grids_are_rejected() {
        assert!(GridFunction::from_real(0.0, 0.1, &[1.0]).is_err());
        assert!(GridFunction::from_real(0.0, 0.0, &[1.0, 2.0]).is_err());
        assert!(GridFunction::from_real(0.0, 0.1, &[1.0, f64::NAN]).is_err());
        assert!(sample(&ScalarSignal::zero(), 0.0, 0.1, 1).is_err());
    }

    #[test]
    fn csv_header_and_round_trip() {
        let g = GridFunction::new(
            -1.0,
            0.1,
            2,
            vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(0.1, -2.0),
                Complex64::new(1.0 / 3.0, 0.0),
                Complex64::new(PI, 1e-300),
            ],
        )
        .unwrap();
        let s = g.to_csv_string().unwrap();
        assert!(s.starts_with("t,y1_re,y1_im,y2_re,y2_im\n"));
        assert!(s.contains("3.3333333333333331e-1"));
        let back = GridFunction::read_csv(s.as_bytes()).unwrap();
        assert_eq!(back.values(), g.values());
        assert_eq!(back.len(), 2);
    }

    #[test]
    fn restrict_and_diff() {
        let w = Window::new(0.0, 1.0, 0.1).unwrap();
        assert_eq!(w.len(), 11);
        let g = sample_window(&ScalarSignal::sin(1.0, 1.0, 0.0), &w.padded(3, 2)).unwrap();
        let r = g.restrict(&w).unwrap();
        assert_eq!(r.len(), 11);
        assert!((r.t0() - 0.0).abs() < 1e-12);
        let direct = sample_window(&ScalarSignal::sin(1.0, 1.0, 0.0), &w).unwrap();
        assert!(r.sup_diff(&direct).unwrap() < 1e-15);
    }
}

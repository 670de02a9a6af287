//! Method-of-steps RK4 integrator for initial-value delay problems, used as
//! an independent check on the Green-operator constructions.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::lagrange4;
use crate::signals::{GridFunction, ScalarSignal};
use crate::solvers::ProblemSpec;

/// Tolerance of the continuity check at the join `t0`.
pub const JOIN_TOL: f64 = 1e-8;

/// Default transient in units of `1/alpha`.
pub const TRANSIENT_FACTOR: f64 = 15.0;

#[derive(Clone, Debug, PartialEq)]
enum HistoryData {
    Signals(Vec<ScalarSignal>),
    Grid(GridFunction),
}

/// Initial data on `[t0 - tau, t0]`.
#[derive(Clone, Debug, PartialEq)]
pub struct History {
    t0: f64,
    tau: f64,
    data: HistoryData,
    initial: Vec<Complex64>,
}

impl History {
    pub fn from_signals(components: Vec<ScalarSignal>, t0: f64, tau: f64) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::History("history needs at least one component".into()));
        }
        if !(tau >= 0.0 && tau.is_finite() && t0.is_finite()) {
            return Err(Error::History(format!(
                "invalid history interval t0 = {t0}, tau = {tau}"
            )));
        }
        let initial = components.iter().map(|s| s.eval(t0)).collect::<Result<Vec<_>>>()?;
        Ok(History {
            t0,
            tau,
            data: HistoryData::Signals(components),
            initial,
        })
    }

    /// Constant history with the given real components.
    pub fn constant(values: &[f64], t0: f64, tau: f64) -> Result<Self> {
        Self::from_signals(values.iter().map(|v| ScalarSignal::constant(*v)).collect(), t0, tau)
    }

    /// Sampled history; the grid must span exactly one delay interval and
    /// ends at `t0`.
    pub fn from_grid(grid: GridFunction, tau: f64) -> Result<Self> {
        let span = grid.t_end() - grid.t0();
        if (span - tau).abs() > JOIN_TOL * tau.max(1.0) {
            return Err(Error::History(format!(
                "history grid spans {span} but the delay is {tau}"
            )));
        }
        let t0 = grid.t_end();
        let initial = grid.value(grid.len() - 1).to_vec();
        Ok(History {
            t0,
            tau,
            data: HistoryData::Grid(grid),
            initial,
        })
    }

    /// Replaces the initial value `y(t0)`, which must continue the history.
    pub fn with_initial(mut self, y0: Vec<Complex64>) -> Result<Self> {
        if y0.len() != self.dim() {
            return Err(Error::History("initial value has the wrong dimension".into()));
        }
        let jump = y0
            .iter()
            .zip(&self.initial)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if jump > JOIN_TOL {
            return Err(Error::History(format!("history is discontinuous at t0: jump {jump:e}")));
        }
        self.initial = y0;
        Ok(self)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn dim(&self) -> usize {
        self.initial.len()
    }

    pub fn initial(&self) -> &[Complex64] {
        &self.initial
    }

    /// History value at `t` in `[t0 - tau, t0]`.
    pub fn eval(&self, t: f64, out: &mut [Complex64]) -> Result<()> {
        let slack = 1e-9 * self.tau.max(1.0);
        if t < self.t0 - self.tau - slack || t > self.t0 + slack {
            return Err(Error::History(format!(
                "t = {t} lies outside the history interval [{}, {}]",
                self.t0 - self.tau,
                self.t0
            )));
        }
        match &self.data {
            HistoryData::Signals(s) => {
                for (o, c) in out.iter_mut().zip(s) {
                    *o = c.eval(t)?;
                }
            }
            HistoryData::Grid(g) => {
                lagrange4(g.values(), g.dim(), g.t0(), g.dt(), t, out)
                    .ok_or_else(|| Error::History(format!("cannot interpolate the history at t = {t}")))?;
            }
        }
        Ok(())
    }
}

fn hermite(
    y0: &[Complex64],
    d0: &[Complex64],
    y1: &[Complex64],
    d1: &[Complex64],
    h: f64,
    theta: f64,
    out: &mut [Complex64],
) {
    let t2 = theta * theta;
    let t3 = t2 * theta;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = (t3 - 2.0 * t2 + theta) * h;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = (t3 - t2) * h;
    for i in 0..out.len() {
        out[i] = y0[i] * h00 + d0[i] * h10 + y1[i] * h01 + d1[i] * h11;
    }
}

struct Trajectory<'a> {
    history: &'a History,
    t0: f64,
    step: f64,
    dim: usize,
    y: Vec<Complex64>,
    dy: Vec<Complex64>,
}

impl Trajectory<'_> {
    fn node_count(&self) -> usize {
        self.y.len() / self.dim
    }

    /// Solution value at a past time `s`, from the history or by cubic
    /// Hermite interpolation between computed nodes.
    fn past(&self, s: f64, out: &mut [Complex64]) -> Result<()> {
        let pos = (s - self.t0) / self.step;
        if pos <= 1e-9 {
            return self.history.eval(s.min(self.t0), out);
        }
        let d = self.dim;
        let nearest = pos.round();
        if (pos - nearest).abs() <= 1e-9 {
            let k = nearest as usize;
            if k >= self.node_count() {
                return Err(Error::History(format!("delayed time {s} is not yet computed")));
            }
            out.copy_from_slice(&self.y[k * d..(k + 1) * d]);
            return Ok(());
        }
        let k = pos.floor() as usize;
        if k + 1 >= self.node_count() {
            return Err(Error::History(format!("delayed time {s} is not yet computed")));
        }
        let (a, b) = (k * d, (k + 1) * d);
        hermite(
            &self.y[a..b],
            &self.dy[a..b],
            &self.y[b..b + d],
            &self.dy[b..b + d],
            self.step,
            pos - k as f64,
            out,
        );
        Ok(())
    }
}

struct Rhs<'a> {
    spec: &'a ProblemSpec,
    delayed: Vec<Complex64>,
    gv: Vec<Complex64>,
}

impl Rhs<'_> {
    /// `A(t) y + f(t) + g(t, y(t - tau))`, the delayed value taken from
    /// `self.delayed` unless `tau = 0`.
    fn eval(&mut self, t: f64, y: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        let spec = self.spec;
        let weight = match spec.g.weight() {
            Some(w) => w.eval(t)?,
            None => Complex64::new(0.0, 0.0),
        };
        let arg: &[Complex64] = if spec.tau == 0.0 { y } else { &self.delayed };
        spec.g.apply(weight, arg, &mut self.gv)?;
        let a = spec.a.eval(t)?;
        for i in 0..out.len() {
            let mut v = spec.f[i].eval(t)? + self.gv[i];
            for (j, yj) in y.iter().enumerate() {
                v += a[(i, j)] * yj;
            }
            out[i] = v;
        }
        Ok(())
    }
}

/// Classical RK4 march from the history's `t0` to `t_end` with a fixed
/// step. When `tau > 0` the step must divide `tau`.
pub fn integrate_dde(spec: &ProblemSpec, history: &History, t_end: f64, step: f64) -> Result<GridFunction> {
    spec.validate()?;
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::invalid(format!("step {step} must be positive")));
    }
    if history.dim() != spec.dim() {
        return Err(Error::History("history dimension does not match the problem".into()));
    }
    if (history.tau() - spec.tau).abs() > 1e-12 * spec.tau.max(1.0) {
        return Err(Error::History(format!(
            "history covers a delay of {} but the problem has tau = {}",
            history.tau(),
            spec.tau
        )));
    }
    if spec.tau > 0.0 {
        let m = spec.tau / step;
        if (m - m.round()).abs() > 1e-9 * m.max(1.0) || m.round() < 1.0 {
            return Err(Error::StepMismatch { step, tau: spec.tau });
        }
    }
    let t0 = history.t0();
    if !(t_end > t0) {
        return Err(Error::invalid(format!("t_end = {t_end} must exceed t0 = {t0}")));
    }
    let n = ((t_end - t0) / step - 1e-9).ceil() as usize;
    let d = spec.dim();
    let mut traj = Trajectory {
        history,
        t0,
        step,
        dim: d,
        y: Vec::with_capacity((n + 1) * d),
        dy: Vec::with_capacity((n + 1) * d),
    };
    let mut rhs = Rhs {
        spec,
        delayed: vec![Complex64::new(0.0, 0.0); d],
        gv: vec![Complex64::new(0.0, 0.0); d],
    };
    let zero = Complex64::new(0.0, 0.0);
    let (mut k2, mut k3, mut k4) = (vec![zero; d], vec![zero; d], vec![zero; d]);
    let mut stage = vec![zero; d];
    let mut deriv = vec![zero; d];

    let delayed = spec.tau > 0.0;
    let y0 = history.initial().to_vec();
    if delayed {
        traj.past(t0 - spec.tau, &mut rhs.delayed)?;
    }
    rhs.eval(t0, &y0, &mut deriv)?;
    traj.y.extend_from_slice(&y0);
    traj.dy.extend_from_slice(&deriv);

    for k in 0..n {
        let t = t0 + k as f64 * step;
        let yk = traj.y[k * d..(k + 1) * d].to_vec();
        let k1 = traj.dy[k * d..(k + 1) * d].to_vec();

        if delayed {
            traj.past(t + 0.5 * step - spec.tau, &mut rhs.delayed)?;
        }
        for i in 0..d {
            stage[i] = yk[i] + k1[i] * (0.5 * step);
        }
        rhs.eval(t + 0.5 * step, &stage, &mut k2)?;
        for i in 0..d {
            stage[i] = yk[i] + k2[i] * (0.5 * step);
        }
        rhs.eval(t + 0.5 * step, &stage, &mut k3)?;
        if delayed {
            traj.past(t + step - spec.tau, &mut rhs.delayed)?;
        }
        for i in 0..d {
            stage[i] = yk[i] + k3[i] * step;
        }
        rhs.eval(t + step, &stage, &mut k4)?;
        for i in 0..d {
            stage[i] = yk[i] + (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (step / 6.0);
        }
        rhs.eval(t + step, &stage, &mut deriv)?;
        traj.y.extend_from_slice(&stage);
        traj.dy.extend_from_slice(&deriv);
    }
    GridFunction::new(t0, step, d, traj.y)
}

/// Sup-norm of `a - b` over the nodes of `a` at or after
/// `max(a.t0, b.t0) + transient` that `b` also covers, with `b` resampled
/// onto those nodes by cubic interpolation.
pub fn compare_after_transient(a: &GridFunction, b: &GridFunction, transient: f64) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::invalid("compared grids have different dimensions"));
    }
    let start = a.t0().max(b.t0()) + transient;
    let end = a.t_end().min(b.t_end());
    let slack = 1e-9 * a.dt();
    let d = a.dim();
    let mut tmp = vec![Complex64::new(0.0, 0.0); d];
    let mut sup = 0.0f64;
    let mut count = 0usize;
    for k in 0..a.len() {
        let t = a.time(k);
        if t < start - slack || t > end + slack {
            continue;
        }
        if lagrange4(b.values(), d, b.t0(), b.dt(), t, &mut tmp).is_none() {
            continue;
        }
        count += 1;
        let diff = a
            .value(k)
            .iter()
            .zip(&tmp)
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt();
        sup = sup.max(diff);
    }
    if count == 0 {
        return Err(Error::EmptyOverlap {
            shift: transient,
            window: (end - a.t0().max(b.t0())).max(0.0),
        });
    }
    Ok(sup)
}

use num_complex::Complex64;

use super::picard::delay_steps;
use super::ProblemSpec;
use crate::error::{Error, Result};
use crate::quad::lagrange4;
use crate::signals::GridFunction;

/// Sup over interior points of `|y' - A y - f - g(t, y(t - tau))|`, with `y'`
/// by central differences. Points whose delayed argument falls before the
/// grid are skipped.
pub fn residual_check(y: &GridFunction, spec: &ProblemSpec) -> Result<f64> {
    spec.validate()?;
    let dim = spec.dim();
    if y.dim() != dim {
        return Err(Error::invalid("solution dimension does not match the problem"));
    }
    if y.len() < 3 {
        return Err(Error::invalid("residual check needs at least three grid points"));
    }
    let dt = y.dt();
    let shift = if spec.tau == 0.0 {
        Some(0)
    } else {
        delay_steps(spec.tau, dt)
    };
    let mut delayed = vec![Complex64::new(0.0, 0.0); dim];
    let mut gv = vec![Complex64::new(0.0, 0.0); dim];
    let mut fv = vec![Complex64::new(0.0, 0.0); dim];
    let mut sup = 0.0f64;
    for k in 1..y.len() - 1 {
        let t = y.time(k);
        let have = match shift {
            Some(s) if s <= k => {
                delayed.copy_from_slice(y.value(k - s));
                true
            }
            Some(_) => false,
            None => lagrange4(y.values(), dim, y.t0(), dt, t - spec.tau, &mut delayed).is_some(),
        };
        if !have {
            continue;
        }
        let weight = match spec.g.weight() {
            Some(w) => w.eval(t)?,
            None => Complex64::new(0.0, 0.0),
        };
        spec.g.apply(weight, &delayed, &mut gv)?;
        for (fi, s) in fv.iter_mut().zip(&spec.f) {
            *fi = s.eval(t)?;
        }
        let a = spec.a.eval(t)?;
        let yk = y.value(k);
        let (prev, next) = (y.value(k - 1), y.value(k + 1));
        let mut defect = 0.0;
        for i in 0..dim {
            let deriv = (next[i] - prev[i]) / (2.0 * dt);
            let mut rhs = fv[i] + gv[i];
            for j in 0..dim {
                rhs += a[(i, j)] * yk[j];
            }
            defect += (deriv - rhs).norm_sqr();
        }
        sup = sup.max(defect.sqrt());
    }
    Ok(sup)
}

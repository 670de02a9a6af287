use automorph::dichotomy::{DichotomyEstimate, EvolutionField, EvolutionOptions};
use automorph::greenop::TruncationPolicy;
use automorph::io::{from_json_str, to_json_string};
use automorph::linalg::spectral_norm;
use automorph::signals::{ergodic_mean, GridFunction, MatrixSignal, MeanSettings, ScalarSignal, Window};
use automorph::solvers::{solve_linear_green, ProblemSpec};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn cfg() -> ProptestConfig {
    ProptestConfig {
        cases: 24,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(cfg())]

    #[test]
    fn json_floats_round_trip(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
        let text = to_json_string(&x).unwrap();
        let back: f64 = from_json_str(&text).unwrap();
        prop_assert_eq!(back.to_bits(), x.to_bits());
    }

    #[test]
    fn csv_round_trip(values in prop::collection::vec((-1e6f64..1e6, -1e6f64..1e6), 4..40), t0 in -10.0f64..10.0) {
        let even = values.len() / 2 * 2;
        let zs: Vec<_> = values[..even].iter().map(|&(re, im)| Complex64::new(re, im)).collect();
        let g = GridFunction::new(t0, 0.125, 2, zs).unwrap();
        let text = g.to_csv_string().unwrap();
        let back = GridFunction::read_csv(text.as_bytes()).unwrap();
        prop_assert_eq!(back.values(), g.values());
        prop_assert_eq!(back.t0(), g.t0());
        prop_assert!((back.dt() - g.dt()).abs() <= 1e-15 * (1.0 + t0.abs()));
    }

    #[test]
    fn translation_shifts_evaluation(a in -2.0f64..2.0, w in 0.1f64..3.0, phase in 0.0f64..6.0, xi in -20.0f64..20.0, t in -20.0f64..20.0) {
        let s = ScalarSignal::constant(0.5) + ScalarSignal::sin(a, w, phase) * ScalarSignal::cos(1.0, 0.5 * w, 0.0);
        let lhs = s.translate(xi).eval(t).unwrap();
        let rhs = s.eval(t + xi).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
    }

    #[test]
    fn mean_of_shifted_trig_sum(c in -3.0f64..3.0, a in -1.0f64..1.0, w in 0.5f64..3.0) {
        let s = ScalarSignal::constant(c) + ScalarSignal::sin(a, w, 0.3);
        let r = ergodic_mean(&s, &MeanSettings::default()).unwrap();
        prop_assert!(r.converged);
        prop_assert!((r.mean - c).norm() < 1e-3);
    }

    #[test]
    fn cocycle_and_scalar_closed_form(m in -2.0f64..-0.2, b in 0.0f64..1.0, s in 0.0f64..3.0, r in 0.0f64..3.0, t in 0.0f64..3.0) {
        let mu = ScalarSignal::constant(m) + ScalarSignal::sin(b, 1.0, 0.0);
        let e = EvolutionField::new(MatrixSignal::scalar(mu), 0.0, 3.0, EvolutionOptions::default()).unwrap();
        let full = e.evolution(t, s).unwrap();
        let split = e.evolution(t, r).unwrap() * e.evolution(r, s).unwrap();
        prop_assert!(spectral_norm(&(&full - split)) <= 1e-9 * spectral_norm(&full).max(1.0));
        // exp(m (t - s) + b (cos s - cos t))
        let exact = (m * (t - s) + b * (s.cos() - t.cos())).exp();
        prop_assert!((full[(0, 0)].re - exact).abs() <= 1e-9 * exact.max(1.0));
    }

    #[test]
    fn bounded_solution_of_constant_diagonal(rates in prop::collection::vec(prop_oneof![-2.0f64..-0.5, 0.5f64..2.0], 1..4), level in -2.0f64..2.0) {
        let p = rates.len();
        let a = MatrixSignal::diagonal(rates.iter().map(|&l| ScalarSignal::constant(l)).collect());
        let proj = DMatrix::from_fn(p, p, |i, j| {
            if i == j && rates[i] < 0.0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }
        });
        let alpha = rates.iter().map(|l| l.abs()).fold(f64::INFINITY, f64::min) * 0.99;
        let d = DichotomyEstimate::user_supplied(proj, 1.0, alpha, 100.0).unwrap();
        let f = vec![ScalarSignal::constant(level); p];
        let spec = ProblemSpec::linear(a.clone(), f).unwrap();
        let e = EvolutionField::with_defaults(a).unwrap();
        let w = Window::new(0.0, 2.0, 0.05).unwrap();
        let policy = TruncationPolicy::default();
        let y = solve_linear_green(&spec, &e, &d, &w, &policy).unwrap();
        // y_i = -level / rate_i
        for k in 0..y.len() {
            for (i, l) in rates.iter().enumerate() {
                prop_assert!((y.value(k)[i].re + level / l).abs() < 1e-6);
            }
        }
        let f_norm = level.abs() * (p as f64).sqrt();
        prop_assert!(y.sup_norm() <= 2.0 / alpha * f_norm + policy.tol);
    }
}

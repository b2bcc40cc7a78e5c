use std::f64::consts::PI;

use huygens::experiments::{compression_sweep, ExperimentConfig};
use huygens::geometry::{ComplexRadius, Direction, Vector3};
use huygens::quadrature::product_rule;
use huygens::signal::GaussianSignal;
use huygens::time::{
    analytic_propagator, reproduce_propagator_alternative, reproduce_propagator_series, spacetime_reproducing,
    SPolicy, SpacetimeEvent, SpacetimeOptions,
};

const X_E: Vector3 = Vector3::new(0.0, 0.0, 2.5);
const X_R: Vector3 = Vector3::new(200.0, 0.0, 0.0);

fn sig() -> GaussianSignal {
    GaussianSignal::new(0.3 * 2f64.sqrt()).unwrap()
}

#[test]
fn causal_support_and_peak_location() {
    let s = sig();
    let r = (X_R - X_E).norm();
    let dt = s.d / 8.0;
    let times: Vec<f64> = (0..400).map(|k| r - 20.0 * s.d + k as f64 * dt).collect();
    let rule = product_rule(Direction::new(X_R).unwrap(), PI, 256, 128).unwrap();
    for a in [0.0, 5.0, 50.0] {
        let alpha = ComplexRadius::new(10.0, a).unwrap();
        let series = reproduce_propagator_series(&X_E, &X_R, &times, &alpha, s, &rule).unwrap();
        let peak = s.peak() / r;
        for (t, v) in times.iter().zip(&series) {
            if *t < r - 6.0 * s.d {
                assert!(v.abs() < 1e-8 * peak, "a={a} t={t}: {v}");
            }
        }
        let argmax = times
            .iter()
            .zip(&series)
            .max_by(|x, y| x.1.total_cmp(y.1))
            .map(|(t, _)| *t)
            .unwrap();
        assert!((argmax - r).abs() <= dt, "a={a}: peak at {argmax}, expected {r}");
    }
}

#[test]
fn good_and_alternative_forms_agree_for_moderate_a() {
    let s = sig();
    let r = (X_R - X_E).norm();
    // the alternative form converges more slowly in the polar angle
    let rule = product_rule(Direction::new(X_R).unwrap(), PI, 512, 256).unwrap();
    for a in [0.0, 1.0, 5.0] {
        let alpha = ComplexRadius::new(10.0, a).unwrap();
        for t in [r - s.d, r, r + s.d] {
            let good = reproduce_propagator_series(&X_E, &X_R, &[t], &alpha, s, &rule).unwrap()[0];
            let (bad, _) = reproduce_propagator_alternative(&X_E, &X_R, t, &alpha, s, &rule).unwrap();
            let bad = bad.to_complex();
            let scale = s.peak() / r;
            assert!((good - bad.re).abs() < 1e-8 * scale, "a={a} t={t}: {good} vs {bad}");
            assert!(bad.im.abs() < 1e-8 * scale);
        }
    }
}

#[test]
fn spacetime_result_is_independent_of_contour() {
    let alpha = ComplexRadius::new(10.0, 5.0).unwrap();
    let r = (X_R - X_E).norm();
    let x_e = SpacetimeEvent::new(X_E, 0.0);
    let rule = product_rule(Direction::new(X_R).unwrap(), PI, 64, 64).unwrap();
    for t_r in [r - 0.2, r + 0.1] {
        let x_r = SpacetimeEvent::new(X_R, t_r);
        let exact = analytic_propagator(&x_e, &x_r, 0.3 * 2f64.sqrt()).unwrap().to_complex();
        let values: Vec<_> = [0.0, 0.25, 0.5, 0.75, 1.0]
            .iter()
            .map(|&l| {
                let options = SpacetimeOptions {
                    policy: SPolicy::Lambda(l),
                    ..SpacetimeOptions::default()
                };
                let res = spacetime_reproducing(&x_e, &x_r, &alpha, 0.3, 0.3, &rule, &options).unwrap();
                assert_eq!(res.unstable_nodes, 0);
                res.value.to_complex()
            })
            .collect();
        for v in &values {
            assert!((v - values[0]).norm() < 1e-9 * exact.norm(), "{v} vs {}", values[0]);
            assert!((v - exact).norm() < 1e-9 * exact.norm());
        }
    }
}

#[test]
fn compression_curves_are_ordered_and_monotone() {
    let result = compression_sweep(&ExperimentConfig::default()).unwrap();
    let [c0, c5, c50] = [0.0, 5.0, 50.0].map(|a| result.curves.iter().find(|c| c.a == a).unwrap());
    // below 1e-6 all three are quadrature noise
    for ((p0, p5), p50) in c0.points.iter().zip(&c5.points).zip(&c50.points) {
        if p0.1 > 1e-6 {
            assert!(p50.1 <= p5.1 && p5.1 <= p0.1, "beta={}: {} {} {}", p0.0, p0.1, p5.1, p50.1);
        }
    }
    for curve in [c0, c5, c50] {
        for w in curve.points.windows(2) {
            assert!(w[1].1 <= w[0].1 + 1e-3, "a={} beta={}", curve.a, w[1].0);
        }
        assert!(curve.points.last().unwrap().1 < 1e-6);
    }
}

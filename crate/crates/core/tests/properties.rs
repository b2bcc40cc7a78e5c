use std::f64::consts::PI;

use huygens::faddeeva::faddeeva;
use huygens::geometry::{
    classify_zone, complex_distance, complex_distance_alpha, eta_bounds, oblate_coordinates, ComplexRadius,
    Direction, PathGeometry, Role, Vector3, ZoneLabel,
};
use huygens::quadrature::{band_rule, product_rule};
use huygens::scaled::ScaledComplex;
use huygens::signal::{analytic_gaussian, gaussian, ComplexTime, GaussianSignal};
use huygens::Complex64;
use proptest::prelude::*;

fn direction() -> impl Strategy<Value = Direction> {
    (-1.0f64..1.0, 0.0..2.0 * PI).prop_map(|(c, phi)| Direction::from_spherical(c.acos(), phi))
}

/// `(R, a, n̂, x_e, x_r)` with `|x_e| < R < |x_r|`.
fn configuration() -> impl Strategy<Value = (f64, f64, Direction, Vector3, Vector3)> {
    (1.0f64..20.0, 0.001f64..3.0, direction(), direction(), 0.0f64..0.999, direction(), 1.001f64..20.0).prop_map(
        |(r, a, n, de, fe, dr, fr)| (r, a * r, n, de.vector() * (fe * r), dr.vector() * (fr * r)),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn branch_has_nonnegative_real_part((r, a, n, x_e, x_r) in configuration()) {
        let alpha = ComplexRadius::new(r, a).unwrap();
        let rec = complex_distance(&x_r, &alpha, &n, Role::Reception).unwrap();
        let emi = complex_distance(&x_e, &alpha, &n, Role::Emission).unwrap();
        prop_assert!(rec.xi >= 0.0 && emi.xi >= 0.0);
        let along = n.dot(&(x_r - n.vector() * r));
        if along.abs() > 1e-9 * r {
            prop_assert_eq!(rec.eta.signum(), along.signum());
        }
    }

    #[test]
    fn conjugate_radius_conjugates_distance((r, a, n, x_e, x_r) in configuration()) {
        let alpha = Complex64::new(r, a);
        for (point, role) in [(x_r, Role::Reception), (x_e, Role::Emission)] {
            let z = complex_distance_alpha(&point, alpha, &n, role).unwrap().zeta;
            let zc = complex_distance_alpha(&point, alpha.conj(), &n, role).unwrap().zeta;
            prop_assert!((zc - z.conj()).norm() <= 1e-14 * z.norm());
        }
    }

    #[test]
    fn oblate_coordinates_invert_distance((r, a, n, _x_e, x_r) in configuration()) {
        let alpha = ComplexRadius::new(r, a).unwrap();
        let dist = complex_distance(&x_r, &alpha, &n, Role::Reception).unwrap();
        let (rho, z) = oblate_coordinates(&dist, a).unwrap();
        // rebuild a point with the same (ρ, z) and recompute ζ
        let (e1, _) = n.frame();
        let rebuilt = n.vector() * (r + z) + e1 * rho;
        let again = complex_distance(&rebuilt, &alpha, &n, Role::Reception).unwrap();
        prop_assert!((again.zeta - dist.zeta).norm() <= 1e-9 * (dist.zeta.norm() + a));
    }

    #[test]
    fn eta_bounds_and_zone_sign((r, a, n, x_e, x_r) in configuration()) {
        let alpha = ComplexRadius::new(r, a).unwrap();
        let (lo, hi) = eta_bounds(&x_e, &alpha).unwrap();
        let path = PathGeometry::new(&n, &x_e, &x_r, alpha.alpha()).unwrap();
        let eta_e = path.emission.eta;
        prop_assert!(eta_e >= lo - 1e-12 * a && eta_e <= hi + 1e-12 * a);
        prop_assert!(path.reception.eta.abs() <= a * (1.0 + 1e-12));
        let eta = path.eta();
        prop_assert!(eta >= -2.0 * a * (1.0 + 1e-12) && eta <= a - lo + 1e-12 * a);
        if let Ok(zone) = classify_zone(&n, &x_e, &x_r, &alpha) {
            prop_assert_eq!(zone == ZoneLabel::Frontal, path.reception.eta > path.emission.eta);
        }
    }

    #[test]
    fn scaled_multiplication_adds_logs(
        l1 in -800.0f64..800.0, p1 in -PI..PI, l2 in -800.0f64..800.0, p2 in -PI..PI,
    ) {
        let x = ScaledComplex::new(l1, p1);
        let y = ScaledComplex::new(l2, p2);
        let prod = x * y;
        prop_assert!((prod.log_magnitude - (l1 + l2)).abs() <= 1e-12 * (l1.abs() + l2.abs()).max(1.0));
        let dphase = (prod.phase - (p1 + p2)).rem_euclid(2.0 * PI);
        prop_assert!(dphase.min(2.0 * PI - dphase) < 1e-12);
    }

    #[test]
    fn scaled_round_trip(re in -1e100f64..1e100, im in -1e100f64..1e100) {
        let z = Complex64::new(re, im);
        let back = ScaledComplex::from_complex(z).to_complex();
        // exp(ln|z|) carries a relative error of ε·|ln|z||
        let bound = (4.0 + z.norm().ln().abs()) * f64::EPSILON * z.norm();
        prop_assert!((back - z).norm() <= bound);
    }

    #[test]
    fn partition_identity(d in 0.1f64..3.0, t in -6.0f64..6.0, s in -5.0f64..5.0) {
        let sig = GaussianSignal::new(d).unwrap();
        let tau = ComplexTime::new(t * d, s * d);
        let sum = analytic_gaussian(tau, sig).add(&analytic_gaussian(-tau, sig));
        let g = gaussian(tau, sig);
        let scale = g.abs().max(analytic_gaussian(tau, sig).abs());
        prop_assert!(sum.sub(&g).abs() <= 1e-12 * scale);
    }

    #[test]
    fn faddeeva_mirror_symmetry(x in -30.0f64..30.0, y in 0.0f64..30.0) {
        let z = Complex64::new(x, y);
        let w = faddeeva(z);
        let mirror = faddeeva(-z.conj()).conj();
        prop_assert!((w - mirror).norm() <= 1e-14 * w.norm());
    }

    #[test]
    fn rule_weights_are_positive_and_sum_to_solid_angle(
        pole in direction(), inner in 0.0f64..1.5, width in 0.01f64..1.6, nt in 1usize..40, np in 1usize..40,
    ) {
        let rule = band_rule(pole, inner, inner + width, nt, np).unwrap();
        prop_assert_eq!(rule.len(), nt * np);
        prop_assert!(rule.nodes.iter().all(|(_, w)| *w > 0.0));
        prop_assert!((rule.weight_sum() - rule.solid_angle()).abs() <= 1e-12 * rule.solid_angle());
        for (n, _) in &rule.nodes {
            let theta = pole.angle_to(n);
            prop_assert!(theta > inner - 1e-12 && theta < inner + width + 1e-12);
        }
        let cap = product_rule(pole, inner + width, nt, np).unwrap();
        prop_assert!(cap.nodes.iter().all(|(n, _)| pole.angle_to(n) < inner + width));
    }
}

use std::sync::Arc;

use proptest::prelude::*;

use centroaffine::boundary;
use centroaffine::catalog;
use centroaffine::chart::ChartFrame;
use centroaffine::complete::{self, curve_length, log_length_bound, Routes, Segment, Status, VerdictConfig};
use centroaffine::homcalc::{self, HomogeneousPolynomial, SharedFunction};
use centroaffine::{linalg, sampling, Exec};

fn cubic_in_3(coeffs: &[f64]) -> HomogeneousPolynomial {
    let mut terms = Vec::new();
    let mut i = 0;
    for a in 0..=3u32 {
        for b in 0..=(3 - a) {
            terms.push((vec![a, b, 3 - a - b], coeffs[i]));
            i += 1;
        }
    }
    HomogeneousPolynomial::from_terms(3, 3, terms).unwrap()
}

fn regular_cubic() -> ChartFrame {
    let h: SharedFunction = Arc::new(HomogeneousPolynomial::parse("x^3 - x*y^2").unwrap());
    ChartFrame::make_chart(h, &[1.0, 0.0], 1e-12).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn euler_and_scaling(
        coeffs in prop::collection::vec(-2.0f64..2.0, 10),
        x in prop::collection::vec(-3.0f64..3.0, 3),
        lambda in 0.2f64..5.0,
    ) {
        let p = cubic_in_3(&coeffs);
        let g = p.grad(&x);
        let scale = linalg::norm(&x) * linalg::norm(&g) + 3.0 * p.eval(&x).abs() + 1e-12;
        prop_assert!(homcalc::euler_residual(&p, &x).unwrap().abs() <= 1e-12 * scale);
        let y = linalg::scale(&x, lambda);
        let lhs = p.eval(&y);
        let rhs = lambda.powi(3) * p.eval(&x);
        let mag = coeffs.iter().map(|c| c.abs()).sum::<f64>() * linalg::norm(&y).powi(3) + 1e-12;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * mag);
    }

    #[test]
    fn restriction_matches_evaluation(
        coeffs in prop::collection::vec(-2.0f64..2.0, 10),
        x in prop::collection::vec(-2.0f64..2.0, 3),
        v in prop::collection::vec(-2.0f64..2.0, 3),
        t in -2.0f64..2.0,
    ) {
        prop_assume!(linalg::norm(&v) > 1e-3);
        let p = cubic_in_3(&coeffs);
        let shared: SharedFunction = Arc::new(p.clone());
        let r = homcalc::restrict_to_line(&shared, &x, &v).unwrap();
        let direct = p.eval(&linalg::axpy(&x, t, &v));
        let mag = coeffs.iter().map(|c| c.abs()).sum::<f64>() * (linalg::norm(&x) + t.abs() * linalg::norm(&v)).powi(3) + 1e-12;
        prop_assert!((r.value(t).unwrap() - direct).abs() <= 1e-12 * mag);
        // d/dt h(x + t v) = ∇h · v
        let d = linalg::dot(&p.grad(&linalg::axpy(&x, t, &v)), &v);
        prop_assert!((r.d1(t).unwrap() - d).abs() <= 1e-11 * mag);
    }

    /// Along a chord of `B`, `√h` of a cubic with closed level set is concave.
    #[test]
    fn sqrt_h_concave_on_chords(theta in 0.0f64..std::f64::consts::TAU, s in -0.95f64..0.95) {
        let f = regular_cubic();
        let dir = [theta.cos(), theta.sin()];
        let base = f.ambient(&[s]);
        let h = f.h();
        let line = |t: f64| h.value(&linalg::axpy(&base, t, &dir)).unwrap();
        let h0 = homcalc::restrict_to_line(h, &base, &dir).unwrap();
        let roots = h0.polynomial().unwrap().real_roots();
        let lo = roots.iter().copied().filter(|r| *r < 0.0).fold(f64::NEG_INFINITY, f64::max);
        let hi = roots.iter().copied().filter(|r| *r > 0.0).fold(f64::INFINITY, f64::min);
        // a line parallel to a direction inside the cone never leaves it on one side
        prop_assume!(lo.is_finite() && hi.is_finite());
        let m = 64;
        let dt = (hi - lo) / m as f64;
        for i in 1..m - 1 {
            let t = lo + dt * i as f64;
            let (a, b, c) = (line(t).max(0.0).sqrt(), line(t + dt).max(0.0).sqrt(), line(t + 2.0 * dt).max(0.0).sqrt());
            prop_assert!(a - 2.0 * b + c <= 1e-12, "second difference {} at t = {}", a - 2.0 * b + c, t);
        }
    }

    /// Any chart segment is at least as long as the logarithmic bound.
    #[test]
    fn log_bound_below_segment_length(a in -0.9f64..0.9, b in -0.9f64..0.9) {
        prop_assume!((a - b).abs() > 1e-3);
        let f = regular_cubic();
        let l = curve_length(&f, &Segment::new(vec![a], vec![b]), 1e-10).unwrap();
        let bound = log_length_bound(3.0, 1.5, f.hbar(&[a]).unwrap(), f.hbar(&[b]).unwrap());
        prop_assert!(l.length >= bound - 1e-12, "{} < {}", l.length, bound);
    }
}

#[test]
fn disabling_routes_never_changes_a_decision() {
    let base = VerdictConfig {
        lines: 300,
        concavity_samples: 400,
        ..Default::default()
    };
    for e in catalog::entries() {
        let f = e.frame().unwrap();
        let full = complete::completeness_verdict(&f, &base);
        for off in 0..6 {
            let mut routes = Routes::all();
            match off {
                0 => routes.quadric = false,
                1 => routes.cubic = false,
                2 => routes.regular = false,
                3 => routes.n1 = false,
                4 => routes.concavity = false,
                _ => routes.witness = false,
            }
            let v = complete::completeness_verdict(&f, &VerdictConfig { routes, ..base.clone() });
            if v.status != Status::Inconclusive {
                // complete and numerically-certified agree; neither contradicts incomplete
                let same_side = |s: Status| s == Status::Incomplete;
                assert_eq!(same_side(v.status), same_side(full.status), "{} with route {off} off", e.id);
            }
        }
        let none = complete::completeness_verdict(&f, &VerdictConfig { routes: Routes::none(), ..base.clone() });
        assert_eq!(none.status, Status::Inconclusive, "{}", e.id);
    }
}

#[test]
fn parallel_and_sequential_scans_agree() {
    let h: SharedFunction = Arc::new(HomogeneousPolynomial::parse("x^3 - x*y^2 - x*z^2").unwrap());
    let f = ChartFrame::make_chart(h, &[1.0, 0.0, 0.0], 1e-12).unwrap();
    let dirs = sampling::directions(2, 300);
    let a = boundary::boundary_scan(&f, &dirs, Exec::Parallel).unwrap();
    let b = boundary::boundary_scan(&f, &dirs, Exec::Sequential).unwrap();
    assert_eq!(a.len(), b.len());
    for (p, q) in a.iter().zip(&b) {
        assert_eq!(p.point, q.point);
    }
}

#[test]
fn boundary_points_are_zeros_of_h() {
    for e in catalog::entries().into_iter().filter(|e| e.expected.status == "complete") {
        let f = e.frame().unwrap();
        let dirs = sampling::directions(f.n(), boundary::default_direction_count(f.n()));
        for bp in boundary::boundary_scan(&f, &dirs, Exec::Parallel).unwrap() {
            if let Some(v) = bp.hval {
                assert!(v.abs() <= 1e-10, "{}: h = {v} at {:?}", e.id, bp.point);
            }
            assert!((linalg::norm(&bp.point) - 1.0).abs() < 1e-14);
            let inside = linalg::axpy(&bp.ray_origin, 0.999 * bp.distance, &bp.direction);
            assert!(f.h().value(&f.ambient(&inside)).unwrap() > 0.0);
        }
    }
}

#[test]
fn compactness_radius_bounds_scan() {
    for text in ["x^3 - x*y^2", "x^2*y"] {
        let h: SharedFunction = Arc::new(HomogeneousPolynomial::parse(text).unwrap());
        let seed = if text == "x^2*y" { [1.0, 1.0] } else { [1.0, 0.0] };
        let f = ChartFrame::make_chart(h, &seed, 1e-12).unwrap();
        let cb = boundary::compactness_bound(&f, 1000, Exec::Parallel).unwrap();
        let dirs = sampling::directions(1, 2);
        for bp in boundary::boundary_scan(&f, &dirs, Exec::Parallel).unwrap() {
            assert!(bp.distance <= cb.radius_bound, "{text}: {} > {}", bp.distance, cb.radius_bound);
        }
    }
}

#[test]
fn perturbation_tends_to_original() {
    let h: SharedFunction = Arc::new(HomogeneousPolynomial::parse("x^2*y").unwrap());
    let f = ChartFrame::make_chart(h.clone(), &[1.0, 1.0], 1e-12).unwrap();
    let orig = h.as_polynomial().unwrap();
    let mut last = f64::INFINITY;
    for eps in [1e-1, 1e-2, 1e-3, 1e-4] {
        let p = boundary::gen_perturb(&f, eps).unwrap();
        let d = p.h_eps.sub(orig).unwrap().coefficient_scale();
        assert!(d < last);
        last = d;
    }
    assert!(last < 1e-3);
    assert!(boundary::gen_perturb(&f, 1.0).is_err());
}

#[test]
fn homogeneity_of_the_analytic_map() {
    let (h, _) = catalog::analytic_example(2.5).unwrap();
    for x in [[1.0, 2.0], [0.3, 0.1], [5.0, 5.0]] {
        assert!(h.contains(&x));
        assert!(homcalc::homogeneity_defect(h.as_ref(), &x, 1.7).unwrap() < 1e-12);
    }
}

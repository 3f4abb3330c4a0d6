use proptest::prelude::*;
use widthforge::harmonics::{eval_value, rotate_coeffs, OddHarmonicCoeffs, PointEvaluator};
use widthforge::{bodies, functionals, linalg, optimizer, w_floor, SphereGrid};

fn body() -> impl Strategy<Value = OddHarmonicCoeffs> {
    (
        prop::sample::select(vec![3usize, 5, 7]),
        any::<u64>(),
        0.05f64..1.0,
    )
        .prop_map(|(l, seed, scale)| bodies::random_odd(l, seed, scale).unwrap())
}

fn direction() -> impl Strategy<Value = [f64; 3]> {
    (-1.0f64..1.0, 0.0f64..std::f64::consts::TAU).prop_map(|(z, phi)| {
        let r = (1.0 - z * z).sqrt();
        [r * phi.cos(), r * phi.sin(), z]
    })
}

fn grid() -> SphereGrid {
    SphereGrid::new(32, 64).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn h_and_alpha_are_odd_beta_is_even(c in body(), u in direction()) {
        let e = PointEvaluator::new(&c);
        let (p, q) = (e.eval(u), e.eval(linalg::scale(u, -1.0)));
        let tol = 1e-11 * (1.0 + c.norm() * c.norm());
        prop_assert!((eval_value(&c, u) + eval_value(&c, linalg::scale(u, -1.0))).abs() < tol);
        prop_assert!((p.alpha() + q.alpha()).abs() < 1e-9 * (1.0 + c.norm()));
        prop_assert!((p.beta() - q.beta()).abs() < 1e-9 * (1.0 + c.norm() * c.norm()));
    }

    #[test]
    fn opposite_support_planes_are_2w_apart(c in body(), u in direction(), w in 0.1f64..3.0) {
        let e = PointEvaluator::new(&c);
        let f = |v: [f64; 3]| {
            let p = e.eval(v);
            linalg::add(linalg::scale(v, p.h + w), p.grad)
        };
        let gap = linalg::dot(linalg::sub(f(u), f(linalg::scale(u, -1.0))), u);
        prop_assert!((gap - 2.0 * w).abs() < 1e-10 * (1.0 + w));
    }

    #[test]
    fn energy_is_a_nonnegative_quadratic_form(c in body(), t in -5.0f64..5.0) {
        let e = functionals::energy(&c);
        prop_assert!(e >= 0.0);
        prop_assert!((functionals::energy(&c.scaled(t)) - t * t * e).abs() <= 1e-12 * (1.0 + t * t * e));
    }

    #[test]
    fn energy_and_floor_are_rotation_invariant(
        c in body(),
        axis in direction(),
        angle in 0.0f64..std::f64::consts::PI,
    ) {
        let r = rotate_coeffs(&c, &linalg::rotation(axis, angle));
        let (e, er) = (functionals::energy(&c), functionals::energy(&r));
        prop_assert!((e - er).abs() <= 1e-10 * e);
        let g = grid();
        let (w, wr) = (w_floor(&c, &g, 3).unwrap().w0, w_floor(&r, &g, 3).unwrap().w0);
        prop_assert!((w - wr).abs() <= 1e-6 * w, "{} vs {}", w, wr);
    }

    #[test]
    fn floor_is_homogeneous_and_convex(a in body(), b in body(), t in 0.1f64..10.0) {
        let g = grid();
        let lmax = a.lmax().max(b.lmax());
        let (a, b) = (a.relayout(lmax, false), b.relayout(lmax, false));
        let wa = w_floor(&a, &g, 3).unwrap().w0;
        let wb = w_floor(&b, &g, 3).unwrap().w0;
        let wt = w_floor(&a.scaled(t), &g, 3).unwrap().w0;
        prop_assert!((wt - t * wa).abs() <= 1e-8 * t * wa);
        let mid = w_floor(&a.add_scaled(&b, 1.0).scaled(0.5), &g, 3).unwrap().w0;
        prop_assert!(mid <= 0.5 * (wa + wb) * (1.0 + 1e-8));
    }

    #[test]
    fn closed_forms_satisfy_blaschke(c in body(), w in 0.01f64..5.0) {
        let v = functionals::volume(&c, w);
        let a = functionals::area(&c, w);
        let r = v - w * a + 8.0 / 3.0 * std::f64::consts::PI * w.powi(3);
        prop_assert!(r.abs() <= 1e-12 * (1.0 + v.abs() + (w * a).abs()));
    }

    #[test]
    fn ratio_at_floor_is_below_one(c in body()) {
        let g = grid();
        let w0 = w_floor(&c, &g, 3).unwrap().w0;
        let r = functionals::ratio_i(&c, w0).unwrap();
        prop_assert!(r > 0.0 && r < 1.0);
        let o = optimizer::objective(&c, &g).unwrap();
        prop_assert!((optimizer::ratio_from_objective(o.value) - r).abs() < 1e-6);
    }

    #[test]
    fn coefficients_round_trip_through_json(c in body()) {
        let text = serde_json::to_string(&c).unwrap();
        let back: OddHarmonicCoeffs = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, c);
    }
}

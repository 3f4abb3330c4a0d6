mod common;

use common::{cube_odd, fd_curvatures, fd_gradient, fd_radii, sphere_point};
use widthforge::geometry;
use widthforge::harmonics::PointEvaluator;
use widthforge::{w_floor, SphereGrid};

#[test]
fn principal_curvatures_match_finite_differences() {
    let mut worst: f64 = 0.0;
    for case in 0..6u64 {
        let c = cube_odd([3, 5, 7][case as usize % 3], case, 0.15);
        let eval = PointEvaluator::new(&c);
        let w = 0.5 + 2.0 * common::bisection_floor(&c, &SphereGrid::new(24, 48).unwrap());
        for k in 0..20 {
            let u = sphere_point(100 * case + k);
            let p = eval.eval(u);
            let k_an = geometry::curvature(p.alpha(), p.beta(), w).unwrap();
            let (k1, k2) = fd_curvatures(&c, w, u, 1e-4);
            worst = worst
                .max((k_an.k1 - k1).abs() / k1.abs())
                .max((k_an.k2 - k2).abs() / k2.abs());
        }
    }
    assert!(worst < 1e-4, "worst relative error {worst:e}");
}

#[test]
fn radii_sum_and_product_are_alpha_and_density() {
    let c = cube_odd(5, 7, 0.4);
    let eval = PointEvaluator::new(&c);
    let w = 1.3;
    for k in 0..25 {
        let u = sphere_point(k);
        let p = eval.eval(u);
        let (r1, r2) = fd_radii(&c, w, u, 1e-4);
        assert!((r1 + r2 - (2.0 * w + p.alpha())).abs() < 1e-5);
        assert!((r1 * r2 - geometry::density(p.alpha(), p.beta(), w)).abs() < 1e-5);
    }
}

#[test]
fn boundary_point_is_the_gradient_of_the_support() {
    let c = cube_odd(7, 3, 0.5);
    let eval = PointEvaluator::new(&c);
    let w = 0.8;
    // includes both poles, where the evaluator changes chart
    let mut dirs = vec![[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]];
    dirs.extend((0..20).map(sphere_point));
    for u in dirs {
        let p = eval.eval(u);
        let g = fd_gradient(&c, u, 1e-5);
        for i in 0..3 {
            let analytic = (p.h + w) * u[i] + p.grad[i];
            assert!((analytic - (w * u[i] + g[i])).abs() < 1e-7, "{u:?}");
        }
    }
}

#[test]
fn floor_matches_bisection_oracle() {
    let grid = SphereGrid::new(32, 64).unwrap();
    for seed in 0..6 {
        let c = cube_odd([3, 5, 7][seed as usize % 3], seed, 0.3);
        let w0 = w_floor(&c, &grid, 3).unwrap().w0;
        let oracle = common::bisection_floor(&c, &grid);
        assert!(
            (w0 - oracle).abs() <= 1e-6 * oracle,
            "seed {seed}: {w0} vs {oracle}"
        );
    }
}

//! Oracles shared by the integration tests. None of them call the jet,
//! floor or functional code they are used to check.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use widthforge::harmonics::{eval_value, OddHarmonicCoeffs};
use widthforge::SphereGrid;

pub type V3 = [f64; 3];

fn dot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn unit(a: V3) -> V3 {
    let n = dot(a, a).sqrt();
    [a[0] / n, a[1] / n, a[2] / n]
}

fn cross(a: V3, b: V3) -> V3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn tangent_frame(u: V3) -> (V3, V3) {
    let a = if u[0].abs() < 0.8 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let t1 = unit(cross(u, a));
    (t1, cross(u, t1))
}

/// `|x| h(x/|x|)`, the 1-homogeneous extension of `h`.
pub fn homogeneous(c: &OddHarmonicCoeffs, x: V3) -> f64 {
    let r = dot(x, x).sqrt();
    r * eval_value(c, [x[0] / r, x[1] / r, x[2] / r])
}

fn shifted(u: V3, a: V3, s: f64, b: V3, t: f64) -> V3 {
    [
        u[0] + s * a[0] + t * b[0],
        u[1] + s * a[1] + t * b[1],
        u[2] + s * a[2] + t * b[2],
    ]
}

/// Central-difference gradient of the homogeneous extension, i.e. the
/// boundary point of the body with support `h + w` minus `w u`.
pub fn fd_gradient(c: &OddHarmonicCoeffs, u: V3, step: f64) -> V3 {
    let e = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let mut g = [0.0; 3];
    for k in 0..3 {
        g[k] = (homogeneous(c, shifted(u, e[k], step, e[k], 0.0))
            - homogeneous(c, shifted(u, e[k], -step, e[k], 0.0)))
            / (2.0 * step);
    }
    g
}

/// Tangential block of the Hessian of the homogeneous extension in the
/// frame of [`tangent_frame`], by central differences.
pub fn fd_tangent_hessian(c: &OddHarmonicCoeffs, u: V3, step: f64) -> [[f64; 2]; 2] {
    let (t1, t2) = tangent_frame(u);
    let t = [t1, t2];
    let f = |x: V3| homogeneous(c, x);
    let mut m = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = (f(shifted(u, t[i], step, t[j], step))
                - f(shifted(u, t[i], step, t[j], -step))
                - f(shifted(u, t[i], -step, t[j], step))
                + f(shifted(u, t[i], -step, t[j], -step)))
                / (4.0 * step * step);
        }
    }
    m
}

/// Principal radii `(r_small, r_large)` of the body `h + w` at normal `u`.
pub fn fd_radii(c: &OddHarmonicCoeffs, w: f64, u: V3, step: f64) -> (f64, f64) {
    radii_from(fd_tangent_hessian(c, u, step), w)
}

/// As [`fd_radii`] with one Richardson step on `step` and `2 step`, so the
/// truncation error is fourth order.
pub fn fd_radii_extrapolated(c: &OddHarmonicCoeffs, w: f64, u: V3, step: f64) -> (f64, f64) {
    let a = fd_tangent_hessian(c, u, step);
    let b = fd_tangent_hessian(c, u, 2.0 * step);
    let mut m = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = (4.0 * a[i][j] - b[i][j]) / 3.0;
        }
    }
    radii_from(m, w)
}

fn radii_from(m: [[f64; 2]; 2], w: f64) -> (f64, f64) {
    let b = 0.5 * (m[0][1] + m[1][0]);
    let mean = 0.5 * (m[0][0] + m[1][1]);
    let dev = (0.25 * (m[0][0] - m[1][1]).powi(2) + b * b).sqrt();
    (w + mean - dev, w + mean + dev)
}

/// Principal curvatures `(k1, k2)`, `k1 ≥ k2`, as reciprocal radii.
pub fn fd_curvatures(c: &OddHarmonicCoeffs, w: f64, u: V3, step: f64) -> (f64, f64) {
    let (r1, r2) = fd_radii(c, w, u, step);
    (1.0 / r1, 1.0 / r2)
}

/// Product of the principal radii, the area element.
pub fn fd_density(c: &OddHarmonicCoeffs, w: f64, u: V3) -> f64 {
    let (a, b) = fd_radii(c, w, u, 1e-4);
    a * b
}

/// Floor by bisection on the minimum of the area element.
///
/// Both radii come from the extrapolated finite-difference Hessian at the
/// grid nodes and at the points found by a pattern search for the smallest
/// radius around the lowest few local minima. The area element
/// `(w + λ₁)(w + λ₂)` is then minimized over those points for each `w`.
pub fn bisection_floor(c: &OddHarmonicCoeffs, grid: &SphereGrid) -> f64 {
    let radii = |u: V3| fd_radii_extrapolated(c, 0.0, u, 2e-3);
    let mut pts: Vec<(f64, f64)> = grid.nodes().iter().map(|n| radii(n.u)).collect();
    let mut minima: Vec<usize> = (0..pts.len())
        .filter(|&i| grid.neighbours(i).all(|j| pts[j].0 >= pts[i].0))
        .collect();
    minima.sort_by(|&a, &b| pts[a].0.total_cmp(&pts[b].0));
    let (dt, dp) = grid.cell_size();
    let polished: Vec<(f64, f64)> = minima
        .iter()
        .take(8)
        .map(|&i| {
            let mut u = grid.node(i).u;
            let mut f = pts[i];
            let mut h = dt.max(dp);
            while h > 1e-9 {
                let (t1, t2) = tangent_frame(u);
                let mut moved = false;
                for (d, s) in [(t1, h), (t1, -h), (t2, h), (t2, -h)] {
                    let v = unit(shifted(u, d, s, d, 0.0));
                    let fv = radii(v);
                    if fv.0 < f.0 {
                        u = v;
                        f = fv;
                        moved = true;
                        break;
                    }
                }
                if !moved {
                    h *= 0.5;
                }
            }
            f
        })
        .collect();
    pts.extend(polished);
    let g = |w: f64| {
        pts.iter()
            .map(|&(a, b)| (w + a) * (w + b))
            .fold(f64::INFINITY, f64::min)
    };
    if g(0.0) >= 0.0 {
        return 0.0;
    }
    let mut hi = 1.0;
    while g(hi) < 0.0 {
        hi *= 2.0;
    }
    // step down to the first sign change below a convex width
    let mut lo = hi;
    loop {
        lo *= 0.9;
        if g(lo) < 0.0 {
            break;
        }
        hi = lo;
    }
    while hi - lo > 1e-15 * hi {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Seeded odd coefficients with a prescribed norm, uniform in the cube
/// before scaling.
pub fn cube_odd(lmax: usize, seed: u64, norm: f64) -> OddHarmonicCoeffs {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut c = OddHarmonicCoeffs::zeros(lmax, false).unwrap();
    for v in c.values_mut() {
        *v = rng.gen_range(-1.0..1.0);
    }
    let n = c.norm();
    c.scaled(norm / n)
}

pub fn sphere_point(seed: u64) -> V3 {
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0x5eed);
    loop {
        let v: V3 = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        let n = dot(v, v);
        if n > 1e-4 && n <= 1.0 {
            return unit(v);
        }
    }
}

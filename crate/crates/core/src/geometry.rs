//! Pointwise boundary geometry of the body with support function `h + w`.
//!
//! With `α = 2h + Δh` and `β = h² + hΔh + H(h)`, the boundary area element is
//! `(w² + αw + β) dA` and the radii of curvature are the roots in `r` of
//! `r² - (2w + α) r + (w² + αw + β) = 0`. All quantities are frame
//! invariants, so they are evaluated directly from the orthonormal-frame jet.

use serde::Serialize;

use crate::grid::SphereGrid;
use crate::harmonics::{JetSample, SupportJet};
use crate::linalg::{self, Vec3};

/// Absolute clamp for slightly negative discriminants `α² - 4β`.
pub const EPS_DISC: f64 = 1e-9;

/// Relative scale for treating the area element as zero.
pub const EPS_DEG_REL: f64 = 1e-9;

#[inline]
pub fn alpha(s: &JetSample) -> f64 {
    2.0 * s.h + s.lap
}

#[inline]
pub fn beta(s: &JetSample) -> f64 {
    s.h * s.h + s.h * s.lap + s.dethess
}

#[inline]
pub fn density(alpha: f64, beta: f64, w: f64) -> f64 {
    w * w + alpha * w + beta
}

/// Degeneracy threshold for the area element at given `(α, β, w)`.
#[inline]
pub fn degeneracy_threshold(alpha: f64, beta: f64, w: f64) -> f64 {
    EPS_DEG_REL * (w * w + alpha.abs() * w + beta.abs() + 1.0)
}

/// Principal, Gauss and mean curvature at a regular point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Curvature {
    /// Larger principal curvature.
    pub k1: f64,
    /// Smaller principal curvature.
    pub k2: f64,
    pub gauss: f64,
    pub mean: f64,
}

/// Curvatures from `(α, β, w)`, or `None` where the area element vanishes
/// or the discriminant is negative beyond [`EPS_DISC`].
pub fn curvature(alpha: f64, beta: f64, w: f64) -> Option<Curvature> {
    let d = density(alpha, beta, w);
    if d <= degeneracy_threshold(alpha, beta, w) {
        return None;
    }
    let mut disc = alpha * alpha - 4.0 * beta;
    if disc < -EPS_DISC {
        return None;
    }
    if disc < 0.0 {
        disc = 0.0;
    }
    let root = disc.sqrt();
    let num = 2.0 * w + alpha;
    Some(Curvature {
        k1: (num + root) / (2.0 * d),
        k2: (num - root) / (2.0 * d),
        gauss: 1.0 / d,
        mean: num / (2.0 * d),
    })
}

pub fn alpha_beta(jet: &SupportJet) -> (Vec<f64>, Vec<f64>) {
    jet.samples.iter().map(|s| (alpha(s), beta(s))).unzip()
}

/// `w² + αw + β` at every node; may be negative below the width floor.
pub fn area_element(jet: &SupportJet, w: f64) -> Vec<f64> {
    jet.samples
        .iter()
        .map(|s| density(alpha(s), beta(s), w))
        .collect()
}

/// Boundary point `f(u) = (h + w) u + ∇h` for a single jet sample.
pub fn embed_point(sample: &JetSample, w: f64, theta: f64, phi: f64) -> Vec3 {
    let (st, ct, sp, cp) = (theta.sin(), theta.cos(), phi.sin(), phi.cos());
    embed_with_frame(
        sample,
        w,
        [st * cp, st * sp, ct],
        [ct * cp, ct * sp, -st],
        [-sp, cp, 0.0],
    )
}

fn embed_with_frame(s: &JetSample, w: f64, u: Vec3, et: Vec3, ep: Vec3) -> Vec3 {
    let radial = linalg::scale(u, s.h + w);
    let tangent = linalg::add(linalg::scale(et, s.grad[0]), linalg::scale(ep, s.grad[1]));
    linalg::add(radial, tangent)
}

pub fn embed(jet: &SupportJet, w: f64, grid: &SphereGrid) -> Vec<Vec3> {
    grid.nodes()
        .iter()
        .zip(&jet.samples)
        .map(|(n, s)| {
            let (st, ct, sp, cp) = (n.sin_theta, n.cos_theta, n.sin_phi, n.cos_phi);
            embed_with_frame(s, w, n.u, [ct * cp, ct * sp, -st], [-sp, cp, 0.0])
        })
        .collect()
}

pub fn curvatures(jet: &SupportJet, w: f64) -> Vec<Option<Curvature>> {
    jet.samples
        .iter()
        .map(|s| curvature(alpha(s), beta(s), w))
        .collect()
}

/// Everything the boundary looks like at one width parameter.
#[derive(Debug, Clone, Serialize)]
pub struct BodyGeometry {
    pub w: f64,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub density: Vec<f64>,
    pub curvature: Vec<Option<Curvature>>,
    pub points: Vec<Vec3>,
}

impl BodyGeometry {
    pub fn new(jet: &SupportJet, w: f64, grid: &SphereGrid) -> Self {
        let (alpha, beta) = alpha_beta(jet);
        let density = alpha
            .iter()
            .zip(&beta)
            .map(|(&a, &b)| self::density(a, b, w))
            .collect();
        let curvature = alpha
            .iter()
            .zip(&beta)
            .map(|(&a, &b)| self::curvature(a, b, w))
            .collect();
        Self {
            w,
            alpha,
            beta,
            density,
            curvature,
            points: embed(jet, w, grid),
        }
    }

    pub fn min_density(&self) -> f64 {
        self.density.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonics::{synth_jet, OddHarmonicCoeffs};
    use approx::assert_abs_diff_eq;

    fn random_coeffs(lmax: usize, d1: bool, seed: u64, scale: f64) -> OddHarmonicCoeffs {
        let mut c = OddHarmonicCoeffs::zeros(lmax, d1).unwrap();
        let mut x = seed as f64 + 0.5;
        for v in c.values_mut() {
            x = (x * 7.31 + 0.17).fract();
            *v = x - 0.5;
        }
        let n = c.norm();
        c.scaled(scale / n)
    }

    #[test]
    fn zero_field_is_unit_sphere() {
        let grid = SphereGrid::for_degree(3);
        let jet = synth_jet(&OddHarmonicCoeffs::zeros(3, false).unwrap(), &grid).unwrap();
        let (a, b) = alpha_beta(&jet);
        assert!(a.iter().chain(&b).all(|&v| v == 0.0));
        let d = area_element(&jet, 1.0);
        assert!(d.iter().all(|&v| v == 1.0));
        assert_abs_diff_eq!(
            grid.integrate(&d).unwrap(),
            4.0 * std::f64::consts::PI,
            epsilon = 1e-12
        );
        for c in curvatures(&jet, 1.0) {
            let c = c.unwrap();
            assert_eq!((c.k1, c.k2), (1.0, 1.0));
        }
        for p in embed(&jet, 2.0, &grid) {
            assert_abs_diff_eq!(linalg::norm(p), 2.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn degree_one_is_a_translation() {
        let grid = SphereGrid::for_degree(3);
        let k = (3.0 / (4.0 * std::f64::consts::PI)).sqrt();
        let mut c = OddHarmonicCoeffs::zeros(3, true).unwrap();
        c.set(1, 1, 0.4).unwrap(); // 0.4 k x
        c.set(1, 0, -0.2).unwrap(); // -0.2 k z
        let v0 = [0.4 * k, 0.0, -0.2 * k];
        let jet = synth_jet(&c, &grid).unwrap();
        let (a, b) = alpha_beta(&jet);
        for (a, b) in a.iter().zip(&b) {
            assert_abs_diff_eq!(*a, 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(*b, 0.0, epsilon = 1e-12);
        }
        let w = 1.3;
        for (n, p) in grid.nodes().iter().zip(embed(&jet, w, &grid)) {
            let expect = linalg::add(linalg::scale(n.u, w), v0);
            for k in 0..3 {
                assert_abs_diff_eq!(p[k], expect[k], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn degree_three_alpha_is_minus_ten_h() {
        let grid = SphereGrid::for_degree(3);
        let eps = 0.05;
        let mut c = OddHarmonicCoeffs::zeros(3, false).unwrap();
        c.set(3, 1, eps).unwrap();
        let jet = synth_jet(&c, &grid).unwrap();
        let (a, _) = alpha_beta(&jet);
        for (a, s) in a.iter().zip(&jet.samples) {
            assert_abs_diff_eq!(*a, -10.0 * s.h, epsilon = 1e-10);
        }
    }

    #[test]
    fn width_relation_and_parity() {
        let grid = SphereGrid::for_degree(7);
        let c = random_coeffs(7, true, 3, 0.2);
        let jet = synth_jet(&c, &grid).unwrap();
        let w = 1.7;
        let pts = embed(&jet, w, &grid);
        let (al, be) = alpha_beta(&jet);
        let dens = area_element(&jet, w);
        for i in 0..grid.len() {
            let a = grid.antipode(i).unwrap();
            let d = linalg::sub(pts[i], pts[a]);
            assert_abs_diff_eq!(linalg::dot(d, grid.node(i).u), 2.0 * w, epsilon = 1e-10);
            assert_abs_diff_eq!(al[i], -al[a], epsilon = 1e-12);
            assert_abs_diff_eq!(be[i], be[a], epsilon = 1e-12);
            assert_abs_diff_eq!(
                dens[i] + dens[a],
                2.0 * w * w + 2.0 * be[i],
                epsilon = 1e-12
            );
            assert_abs_diff_eq!(dens[i] - dens[a], 2.0 * al[i] * w, epsilon = 1e-12);
        }
    }

    #[test]
    fn curvature_consistency() {
        let grid = SphereGrid::for_degree(5);
        let c = random_coeffs(5, false, 11, 0.02);
        let jet = synth_jet(&c, &grid).unwrap();
        let w = 1.0;
        for k in curvatures(&jet, w).into_iter().map(Option::unwrap) {
            assert!(k.k1 >= k.k2);
            assert_abs_diff_eq!(k.k1 * k.k2, k.gauss, epsilon = 1e-10);
            assert_abs_diff_eq!(k.k1 + k.k2, 2.0 * k.mean, epsilon = 1e-10);
        }
    }

    #[test]
    fn umbilic_point_has_equal_curvatures() {
        // α² = 4β
        let k = curvature(0.5, 0.0625, 1.0).unwrap();
        assert_eq!(k.k1, k.k2);
        assert_eq!(k.k1, k.mean);
        // slightly negative discriminant is clamped
        let k = curvature(0.5, 0.0625 + 1e-10, 1.0).unwrap();
        assert_eq!(k.k1, k.k2);
        assert!(curvature(0.5, 0.2, 1.0).is_none());
    }

    #[test]
    fn degenerate_density_is_undefined() {
        // roots of w² + αw + β at w = 1 and w = 0.5
        assert!(curvature(-1.5, 0.5, 1.0).is_none());
        assert!(curvature(-1.5, 0.5, 1.0 + 1e-12).is_none());
        assert!(curvature(-1.5, 0.5, 1.1).is_some());
    }

    #[test]
    fn smaller_curvature_at_the_singular_parameter() {
        // density(-u) = 0 at w means w² - αw + β = 0 at u, and then k2(u) = 1/(2w)
        let (al, w) = (0.7f64, 1.2f64);
        let be = al * w - w * w;
        let k = curvature(al, be, w).unwrap();
        assert_abs_diff_eq!(k.k2, 1.0 / (2.0 * w), epsilon = 1e-14);
        assert_abs_diff_eq!(k.k1, 1.0 / al, epsilon = 1e-14);
    }

    #[test]
    fn sphere_limit() {
        let grid = SphereGrid::for_degree(5);
        let w = 2.0;
        let mut worst: f64 = 0.0;
        for scale in [1e-2, 1e-4, 1e-6] {
            let c = random_coeffs(5, false, 5, scale);
            let jet = synth_jet(&c, &grid).unwrap();
            let dev = curvatures(&jet, w)
                .into_iter()
                .map(|k| {
                    let k = k.unwrap();
                    (k.k1 - 1.0 / w).abs().max((k.k2 - 1.0 / w).abs())
                })
                .fold(0.0, f64::max);
            assert!(worst == 0.0 || dev < worst);
            worst = dev;
        }
        assert!(worst < 1e-4);
    }
}

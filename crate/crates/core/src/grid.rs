//! Product quadrature on the unit sphere.
//!
//! Nodes are Gauss-Legendre in `cos θ` times a uniform ring in `φ`. Both
//! factors are symmetric, so `(θ, φ) -> (π - θ, φ + π)` maps nodes onto nodes
//! and the antipodal map is an exact permutation of the node list. Weights of
//! antipodal nodes are bit-identical, which lets [`SphereGrid::integrate`]
//! cancel odd integrands exactly rather than to quadrature accuracy.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// A single quadrature node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    /// Colatitude in radians, strictly inside `(0, π)`.
    pub theta: f64,
    /// Longitude in radians, in `[0, 2π)`.
    pub phi: f64,
    /// Unit vector `(sin θ cos φ, sin θ sin φ, cos θ)`.
    pub u: [f64; 3],
    pub sin_theta: f64,
    pub cos_theta: f64,
    pub sin_phi: f64,
    pub cos_phi: f64,
}

#[derive(Debug, Clone)]
pub struct SphereGrid {
    n_theta: usize,
    n_phi: usize,
    nodes: Vec<Node>,
    weights: Vec<f64>,
    antipode: Vec<usize>,
    band_limit: usize,
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, ascending.
///
/// Only the non-negative half is computed by Newton iteration; the other half
/// is its exact mirror so that `x[n - 1 - i] == -x[i]` bit for bit.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let half = n.div_ceil(2);
    for k in 0..half {
        // k-th largest root, Tricomi initial guess
        let mut z = (PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let weight = 2.0 / ((1.0 - z * z) * dp * dp);
        let hi = n - 1 - k;
        let lo = k;
        if hi == lo {
            x[hi] = 0.0;
            w[hi] = weight;
        } else {
            x[hi] = z;
            x[lo] = -z;
            w[hi] = weight;
            w[lo] = weight;
        }
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

impl SphereGrid {
    /// Builds the `n_theta x n_phi` product grid.
    ///
    /// Exact for spherical polynomials of degree `<= min(2 n_theta - 1, n_phi - 1)`.
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta == 0 {
            return Err(Error::InvalidGrid("n_theta must be at least 1".into()));
        }
        if n_phi < 2 || !n_phi.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "n_phi must be even and at least 2, got {n_phi}"
            )));
        }
        let (xs, ws) = gauss_legendre(n_theta);
        let half_phi = n_phi / 2;
        let dphi = 2.0 * PI / n_phi as f64;
        // cos/sin of the first half ring; the second half is the exact negation
        let trig: Vec<(f64, f64)> = (0..n_phi)
            .map(|j| {
                if j < half_phi {
                    let p = j as f64 * dphi;
                    (p.cos(), p.sin())
                } else {
                    let p = (j - half_phi) as f64 * dphi;
                    (-p.cos(), -p.sin())
                }
            })
            .collect();

        let mut nodes = Vec::with_capacity(n_theta * n_phi);
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        let mut antipode = Vec::with_capacity(n_theta * n_phi);
        for (i, (&x, &wt)) in xs.iter().zip(&ws).enumerate() {
            // xs ascending in cos θ, so reverse to get θ ascending
            let ct = -x;
            let st = (1.0 - x * x).sqrt();
            let theta = ct.acos();
            for (j, &(cp, sp)) in trig.iter().enumerate() {
                nodes.push(Node {
                    theta,
                    phi: j as f64 * dphi,
                    u: [st * cp, st * sp, ct],
                    sin_theta: st,
                    cos_theta: ct,
                    sin_phi: sp,
                    cos_phi: cp,
                });
                weights.push(wt * dphi);
                let ia = n_theta - 1 - i;
                let ja = (j + half_phi) % n_phi;
                antipode.push(ia * n_phi + ja);
            }
        }
        Ok(Self {
            n_theta,
            n_phi,
            nodes,
            weights,
            antipode,
            band_limit: (2 * n_theta - 1).min(n_phi - 1),
        })
    }

    /// Default grid for coefficients up to degree `lmax`: `(2L + 2) x (4L + 4)`.
    pub fn for_degree(lmax: usize) -> Self {
        Self::new(2 * lmax + 2, 4 * lmax + 4).expect("default grid sizes are valid")
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &Node {
        &self.nodes[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn band_limit(&self) -> usize {
        self.band_limit
    }

    /// Angular spacing `(Δθ, Δφ)` of one grid cell.
    pub fn cell_size(&self) -> (f64, f64) {
        (PI / self.n_theta as f64, 2.0 * PI / self.n_phi as f64)
    }

    pub fn antipode(&self, i: usize) -> Result<usize> {
        self.antipode.get(i).copied().ok_or(Error::IndexOutOfRange {
            index: i,
            len: self.nodes.len(),
        })
    }

    pub fn antipode_index(&self) -> &[usize] {
        &self.antipode
    }

    /// Ring-neighbour indices of node `i` (up to 8, wrapping in `φ`).
    pub fn neighbours(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let (it, jp) = (i / self.n_phi, i % self.n_phi);
        let n_phi = self.n_phi;
        let n_theta = self.n_theta;
        (-1i64..=1).flat_map(move |di| {
            (-1i64..=1).filter_map(move |dj| {
                if di == 0 && dj == 0 {
                    return None;
                }
                let ti = it as i64 + di;
                if ti < 0 || ti >= n_theta as i64 {
                    return None;
                }
                let pj = (jp as i64 + dj).rem_euclid(n_phi as i64) as usize;
                Some(ti as usize * n_phi + pj)
            })
        })
    }

    /// `∫_{S²} field dA` as `Σ wᵢ fᵢ`.
    ///
    /// Terms are accumulated per antipodal pair with compensated summation;
    /// a field that is exactly odd on the nodes integrates to exactly zero.
    pub fn integrate(&self, field: &[f64]) -> Result<f64> {
        if field.len() != self.nodes.len() {
            return Err(Error::LengthMismatch {
                expected: self.nodes.len(),
                got: field.len(),
            });
        }
        Ok(self.integrate_unchecked(field))
    }

    pub(crate) fn integrate_unchecked(&self, field: &[f64]) -> f64 {
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for i in 0..self.nodes.len() {
            let a = self.antipode[i];
            if a < i {
                continue;
            }
            // weights[i] == weights[a] exactly
            let term = self.weights[i] * (field[i] + field[a]);
            let t = sum + term;
            if sum.abs() >= term.abs() {
                comp += (sum - t) + term;
            } else {
                comp += (term - t) + sum;
            }
            sum = t;
        }
        sum + comp
    }

    /// Integrates a field given as a closure over node indices.
    pub fn integrate_with(&self, f: impl Fn(usize) -> f64) -> f64 {
        let field: Vec<f64> = (0..self.nodes.len()).map(f).collect();
        self.integrate_unchecked(&field)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_grid_has_two_equatorial_nodes() {
        let g = SphereGrid::new(1, 2).unwrap();
        assert_eq!(g.len(), 2);
        for n in g.nodes() {
            assert!((n.theta - PI / 2.0).abs() < 1e-15);
        }
        assert_eq!(g.node(0).phi, 0.0);
        assert!((g.node(1).phi - PI).abs() < 1e-15);
        for &w in g.weights() {
            assert!((w - 2.0 * PI).abs() < 1e-14);
        }
    }

    #[test]
    fn weights_sum_to_sphere_area() {
        let g = SphereGrid::new(16, 32).unwrap();
        let total: f64 = g.integrate(&vec![1.0; g.len()]).unwrap();
        assert!((total - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn integrates_cos_squared() {
        let g = SphereGrid::new(16, 32).unwrap();
        let v = g.integrate_with(|i| g.node(i).cos_theta.powi(2));
        assert!((v - 4.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(SphereGrid::new(0, 4).is_err());
        assert!(SphereGrid::new(4, 5).is_err());
        assert!(SphereGrid::new(4, 0).is_err());
    }

    #[test]
    fn antipode_is_fixed_point_free_involution() {
        let g = SphereGrid::new(7, 10).unwrap();
        for i in 0..g.len() {
            let a = g.antipode(i).unwrap();
            assert_ne!(a, i);
            assert_eq!(g.antipode(a).unwrap(), i);
            let (u, v) = (g.node(i).u, g.node(a).u);
            for k in 0..3 {
                assert!((u[k] + v[k]).abs() < 1e-14);
            }
            let dot: f64 = (0..3).map(|k| u[k] * v[k]).sum();
            assert!((dot + 1.0).abs() < 1e-14);
            assert_eq!(g.weights()[i], g.weights()[a]);
        }
        assert!(g.antipode(g.len()).is_err());
    }

    #[test]
    fn antipode_in_spherical_coordinates() {
        // n_theta = 3 has its middle ring on the equator; pick a ring with θ != π/2
        let g = SphereGrid::new(3, 6).unwrap();
        let i = 1; // θ = θ₀, φ = π/3
        let a = g.antipode(i).unwrap();
        assert!((g.node(a).theta - (PI - g.node(i).theta)).abs() < 1e-14);
        assert!((g.node(a).phi - (g.node(i).phi + PI)).abs() < 1e-14);
    }

    #[test]
    fn no_node_at_the_poles() {
        let g = SphereGrid::new(40, 8).unwrap();
        for n in g.nodes() {
            assert!(n.sin_theta > 0.0);
            assert!(n.theta > 0.0 && n.theta < PI);
        }
    }

    #[test]
    fn odd_field_cancels_exactly() {
        let g = SphereGrid::new(9, 14).unwrap();
        let field: Vec<f64> = (0..g.len())
            .map(|i| {
                let u = g.node(i).u;
                u[0] * 0.3 + u[1].powi(3) - 1.7 * u[2] * u[0] * u[0]
            })
            .collect();
        assert_eq!(g.integrate(&field).unwrap(), 0.0);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let g = SphereGrid::new(2, 4).unwrap();
        assert!(matches!(
            g.integrate(&[1.0; 3]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(6);
        // exact to degree 11
        let v: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(10)).sum();
        assert!((v - 2.0 / 11.0).abs() < 1e-14);
        for i in 0..6 {
            assert_eq!(x[i], -x[5 - i]);
        }
    }
}

//! Closed triangle meshes of the boundary `f(u) = (h + w) u + ∇h` and OBJ
//! output.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::floor;
use crate::grid::SphereGrid;
use crate::harmonics::{OddHarmonicCoeffs, PointEvaluator};
use crate::linalg::{self, Vec3};

/// Boundary mesh on an equiangular display grid.
///
/// Vertex 0 is the image of the north pole, the last vertex that of the
/// south pole, and the rings `θ = πi/n_theta` for `i = 1..n_theta` lie in
/// between. Faces are counter-clockwise seen from outside.
#[derive(Debug, Clone, Serialize)]
pub struct Mesh {
    pub n_theta: usize,
    pub n_phi: usize,
    /// Sphere direction each vertex is the image of.
    pub directions: Vec<Vec3>,
    pub vertices: Vec<Vec3>,
    pub faces: Vec<[usize; 3]>,
}

impl Mesh {
    /// Samples the boundary at width parameter `w`.
    ///
    /// Below the width floor the surface self-intersects, so `w` must be at
    /// least `w₀(h) (1 - 1e-9)`.
    pub fn from_body(
        coeffs: &OddHarmonicCoeffs,
        w: f64,
        n_theta: usize,
        n_phi: usize,
    ) -> Result<Self> {
        if n_theta < 2 || n_phi < 3 {
            return Err(Error::InvalidGrid(format!(
                "display grid needs n_theta >= 2 and n_phi >= 3, got {n_theta} x {n_phi}"
            )));
        }
        if !(w > 0.0) {
            return Err(Error::NonPositiveWidth(w));
        }
        let lmax = coeffs.lmax();
        let check = SphereGrid::new(4 * (lmax + 1), 8 * (lmax + 1))?;
        let w0 = floor::w_floor(coeffs, &check, 3)?.w0;
        if w < w0 * (1.0 - 1e-9) {
            return Err(Error::BelowFloor { w, w0 });
        }
        Ok(Self::sample(coeffs, w, n_theta, n_phi))
    }

    /// Samples without the floor check.
    pub fn sample(coeffs: &OddHarmonicCoeffs, w: f64, n_theta: usize, n_phi: usize) -> Self {
        let eval = PointEvaluator::new(coeffs);
        let mut directions = vec![[0.0, 0.0, 1.0]];
        for i in 1..n_theta {
            let theta = std::f64::consts::PI * i as f64 / n_theta as f64;
            let (st, ct) = theta.sin_cos();
            for j in 0..n_phi {
                let phi = 2.0 * std::f64::consts::PI * j as f64 / n_phi as f64;
                let (sp, cp) = phi.sin_cos();
                directions.push([st * cp, st * sp, ct]);
            }
        }
        directions.push([0.0, 0.0, -1.0]);
        let vertices = directions
            .iter()
            .map(|&u| {
                let p = eval.eval(u);
                linalg::add(linalg::scale(u, p.h + w), p.grad)
            })
            .collect();

        let ring = |i: usize, j: usize| 1 + (i - 1) * n_phi + j % n_phi;
        let south = 1 + (n_theta - 1) * n_phi;
        let mut faces = Vec::with_capacity(2 * n_theta * n_phi);
        for j in 0..n_phi {
            faces.push([0, ring(1, j), ring(1, j + 1)]);
        }
        for i in 1..n_theta - 1 {
            for j in 0..n_phi {
                let (a, b) = (ring(i, j), ring(i + 1, j));
                let (c, d) = (ring(i + 1, j + 1), ring(i, j + 1));
                faces.push([a, b, c]);
                faces.push([a, c, d]);
            }
        }
        for j in 0..n_phi {
            faces.push([ring(n_theta - 1, j), south, ring(n_theta - 1, j + 1)]);
        }
        Self {
            n_theta,
            n_phi,
            directions,
            vertices,
            faces,
        }
    }

    /// Enclosed volume by the divergence theorem over the triangles.
    pub fn volume(&self) -> f64 {
        self.faces
            .iter()
            .map(|&[a, b, c]| {
                let (p, q, r) = (self.vertices[a], self.vertices[b], self.vertices[c]);
                linalg::dot(p, linalg::cross(q, r))
            })
            .sum::<f64>()
            / 6.0
    }

    pub fn area(&self) -> f64 {
        self.faces
            .iter()
            .map(|&[a, b, c]| {
                let (p, q, r) = (self.vertices[a], self.vertices[b], self.vertices[c]);
                0.5 * linalg::norm(linalg::cross(linalg::sub(q, p), linalg::sub(r, p)))
            })
            .sum()
    }

    /// `max_v ⟨v, u⟩` over the vertices.
    pub fn support(&self, u: Vec3) -> f64 {
        self.vertices
            .iter()
            .map(|&v| linalg::dot(v, u))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest `|s(u) + s(-u) - 2w|` of the vertex support over the given
    /// directions.
    pub fn width_deviation(&self, w: f64, directions: &[Vec3]) -> f64 {
        directions
            .iter()
            .map(|&u| (self.support(u) + self.support(linalg::scale(u, -1.0)) - 2.0 * w).abs())
            .fold(0.0, f64::max)
    }

    pub fn write_obj<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "# {} vertices, {} faces",
            self.vertices.len(),
            self.faces.len()
        )?;
        for v in &self.vertices {
            writeln!(out, "v {:.17e} {:.17e} {:.17e}", v[0], v[1], v[2])?;
        }
        for f in &self.faces {
            writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
        }
        Ok(())
    }
}

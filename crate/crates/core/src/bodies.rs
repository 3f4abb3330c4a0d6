//! Reference bodies: the ball, seeded random odd fields, and the Reuleaux
//! triangle revolved about one of its symmetry axes.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::SphereGrid;
use crate::harmonics::{self, OddHarmonicCoeffs};

/// The ball: `h = 0`.
pub fn ball() -> OddHarmonicCoeffs {
    OddHarmonicCoeffs::zeros(3, false).expect("odd lmax")
}

/// Gaussian coefficients on odd degrees `3..=lmax`, rescaled to norm `scale`.
pub fn random_odd(lmax: usize, seed: u64, scale: f64) -> Result<OddHarmonicCoeffs> {
    if lmax < 3 || lmax.is_multiple_of(2) {
        return Err(Error::InvalidCoefficients(format!(
            "random fields need an odd lmax >= 3, got {lmax}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = OddHarmonicCoeffs::zeros(lmax, false)?;
    for v in c.values_mut() {
        *v = rng.sample(StandardNormal);
    }
    let n = c.norm();
    Ok(c.scaled(scale / n))
}

/// One piece `offset + amplitude · cos(ψ - phase)` of a piecewise profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfilePiece {
    pub start: f64,
    pub end: f64,
    pub offset: f64,
    pub amplitude: f64,
    pub phase: f64,
}

impl ProfilePiece {
    fn value(&self, psi: f64) -> f64 {
        self.offset + self.amplitude * (psi - self.phase).cos()
    }

    fn slope(&self, psi: f64) -> f64 {
        -self.amplitude * (psi - self.phase).sin()
    }
}

/// Support function of a body of revolution as a function of the polar
/// angle `ψ ∈ [0, π]` of the direction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxisymmetricProfile {
    pub width: f64,
    pub pieces: Vec<ProfilePiece>,
}

impl AxisymmetricProfile {
    fn piece(&self, psi: f64) -> &ProfilePiece {
        let psi = psi.clamp(0.0, PI);
        self.pieces
            .iter()
            .find(|p| psi <= p.end)
            .unwrap_or_else(|| self.pieces.last().expect("non-empty profile"))
    }

    pub fn support(&self, psi: f64) -> f64 {
        self.piece(psi).value(psi)
    }

    pub fn derivative(&self, psi: f64) -> f64 {
        self.piece(psi).slope(psi)
    }

    /// Interior angles where the second derivative jumps.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.pieces[..self.pieces.len() - 1]
            .iter()
            .map(|p| p.end)
            .collect()
    }

    /// Largest jump of value and of first derivative across the breakpoints.
    pub fn continuity_defect(&self) -> (f64, f64) {
        self.pieces.windows(2).fold((0.0, 0.0), |(dv, dd), w| {
            let t = w[0].end;
            (
                f64::max(dv, (w[0].value(t) - w[1].value(t)).abs()),
                f64::max(dd, (w[0].slope(t) - w[1].slope(t)).abs()),
            )
        })
    }
}

/// The Reuleaux triangle of the given width revolved about the symmetry axis
/// through its top vertex.
///
/// With circumradius `R = width/√3` the vertices sit at `(0, R)` and
/// `(±width/2, -R/2)` in the `(x, z)` half-plane. The support in direction
/// `(sin ψ, cos ψ)` alternates between a vertex (`⟨V, n⟩`) and the arc
/// centred at the opposite vertex (`⟨V, n⟩ + width`).
pub fn rotated_reuleaux(width: f64) -> Result<AxisymmetricProfile> {
    if !(width > 0.0) {
        return Err(Error::NonPositiveWidth(width));
    }
    let r = width / 3f64.sqrt();
    let piece = |start: f64, end: f64, offset: f64, phase: f64| ProfilePiece {
        start,
        end,
        offset,
        amplitude: r,
        phase,
    };
    Ok(AxisymmetricProfile {
        width,
        pieces: vec![
            piece(0.0, PI / 6.0, 0.0, 0.0),
            piece(PI / 6.0, PI / 2.0, width, 4.0 * PI / 3.0),
            piece(PI / 2.0, 5.0 * PI / 6.0, 0.0, 2.0 * PI / 3.0),
            piece(5.0 * PI / 6.0, PI, width, 0.0),
        ],
    })
}

/// Projects `support(θ) - width/2` onto odd harmonics up to `lmax`.
///
/// The projection grid is much finer in `θ` than the band limit requires
/// because the profile is only `C^{1,1}`.
pub fn profile_to_coeffs(profile: &AxisymmetricProfile, lmax: usize) -> Result<OddHarmonicCoeffs> {
    if lmax.is_multiple_of(2) {
        return Err(Error::InvalidCoefficients(format!(
            "lmax must be odd, got {lmax}"
        )));
    }
    let grid = SphereGrid::new(16 * (lmax + 1), 2 * lmax + 4)?;
    let half = 0.5 * profile.width;
    let field: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|n| profile.support(n.theta) - half)
        .collect();
    harmonics::project(&field, &grid, lmax, true)
}

/// Monte-Carlo volume estimate with its standard error.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct VolumeEstimate {
    pub volume: f64,
    pub std_error: f64,
    pub samples: u64,
    pub hits: u64,
}

const MC_CHUNKS: u64 = 64;

/// Volume of the revolved Reuleaux triangle by rejection sampling in its
/// bounding cylinder.
///
/// A point at radius `ρ` and height `z` is inside when `(ρ, z)` lies in all
/// three discs of radius `width` centred at the triangle's vertices. Each of
/// a fixed number of chunks draws from its own ChaCha stream, so the result
/// does not depend on the thread count.
pub fn reuleaux_volume_monte_carlo(width: f64, samples: u64, seed: u64) -> Result<VolumeEstimate> {
    if !(width > 0.0) {
        return Err(Error::NonPositiveWidth(width));
    }
    let r = width / 3f64.sqrt();
    let vertices = [(0.0, r), (0.5 * width, -0.5 * r), (-0.5 * width, -0.5 * r)];
    let rho_max = 0.5 * width;
    let z_min = r - width;
    let d2 = width * width;
    let hits: u64 = (0..MC_CHUNKS)
        .into_par_iter()
        .map(|chunk| {
            let n = samples / MC_CHUNKS + u64::from(chunk < samples % MC_CHUNKS);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let mut hits = 0u64;
            for _ in 0..n {
                let rho = rho_max * rng.gen::<f64>().sqrt();
                let z = z_min + width * rng.gen::<f64>();
                if vertices
                    .iter()
                    .all(|&(vx, vz)| (rho - vx).powi(2) + (z - vz).powi(2) <= d2)
                {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    let cylinder = PI * rho_max * rho_max * width;
    let p = hits as f64 / samples as f64;
    Ok(VolumeEstimate {
        volume: cylinder * p,
        std_error: cylinder * (p * (1.0 - p) / samples as f64).sqrt(),
        samples,
        hits,
    })
}

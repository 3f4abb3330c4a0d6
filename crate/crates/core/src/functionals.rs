//! Global functionals of a constant-width body `(h, w)`.
//!
//! Each functional has a closed form in the coefficients and an independent
//! quadrature over the boundary parametrization; [`evaluate`] reports both.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry;
use crate::grid::SphereGrid;
use crate::harmonics::{OddHarmonicCoeffs, SupportJet, SynthesisPlan};

/// Spectral weight of a degree-`l` coefficient in the Wirtinger energy.
#[inline]
pub fn energy_weight(l: usize) -> f64 {
    (l * (l + 1)) as f64 / 2.0 - 1.0
}

/// Wirtinger energy `∫ (|∇h|²/2 - h²) dA = Σ (l(l+1)/2 - 1) c²`.
pub fn energy(coeffs: &OddHarmonicCoeffs) -> f64 {
    coeffs
        .modes()
        .iter()
        .zip(coeffs.values())
        .map(|(&(l, _), &c)| energy_weight(l) * c * c)
        .sum()
}

/// Bilinear form associated with [`energy`].
pub fn energy_bilinear(a: &OddHarmonicCoeffs, b: &OddHarmonicCoeffs) -> f64 {
    a.modes()
        .iter()
        .zip(a.values())
        .map(|(&(l, m), &c)| energy_weight(l) * c * b.get(l, m))
        .sum()
}

/// Quadrature form of the Wirtinger energy from a synthesized jet.
pub fn energy_quadrature(jet: &SupportJet, grid: &SphereGrid) -> f64 {
    grid.integrate_with(|i| {
        let s = &jet.samples[i];
        0.5 * s.grad_norm_sq() - s.h * s.h
    })
}

/// `(4π/3) w³ - w 𝓔(h)`.
pub fn volume(coeffs: &OddHarmonicCoeffs, w: f64) -> f64 {
    4.0 * PI / 3.0 * w.powi(3) - w * energy(coeffs)
}

/// `4π w² - 𝓔(h)`.
pub fn area(coeffs: &OddHarmonicCoeffs, w: f64) -> f64 {
    4.0 * PI * w * w - energy(coeffs)
}

/// Volume over the volume of the ball of radius `w`: `1 - 𝓔(h) / (4πw²/3)`.
pub fn ratio_i(coeffs: &OddHarmonicCoeffs, w: f64) -> Result<f64> {
    ratio_from_energy(energy(coeffs), w)
}

pub fn ratio_from_energy(energy: f64, w: f64) -> Result<f64> {
    if !(w > 0.0) {
        return Err(Error::NonPositiveWidth(w));
    }
    Ok(1.0 - energy / (4.0 * PI * w * w / 3.0))
}

/// `(1/3) ∫ s d𝐴̄` by quadrature (divergence theorem).
pub fn volume_direct(jet: &SupportJet, grid: &SphereGrid, w: f64) -> f64 {
    grid.integrate_with(|i| {
        let s = &jet.samples[i];
        (s.h + w) * geometry::density(geometry::alpha(s), geometry::beta(s), w)
    }) / 3.0
}

/// `∫ d𝐴̄` by quadrature.
pub fn area_direct(jet: &SupportJet, grid: &SphereGrid, w: f64) -> f64 {
    grid.integrate_with(|i| {
        let s = &jet.samples[i];
        geometry::density(geometry::alpha(s), geometry::beta(s), w)
    })
}

/// `|∫ H(h) dA - ½ ∫ |∇h|² dA|`.
pub fn hessian_identity_residual(jet: &SupportJet, grid: &SphereGrid) -> f64 {
    let det = grid.integrate_with(|i| jet.samples[i].dethess);
    let grad = grid.integrate_with(|i| jet.samples[i].grad_norm_sq());
    (det - 0.5 * grad).abs()
}

/// `∫ |∇h|² dA` by quadrature.
pub fn dirichlet_quadrature(jet: &SupportJet, grid: &SphereGrid) -> f64 {
    grid.integrate_with(|i| jet.samples[i].grad_norm_sq())
}

/// `|∫ (h³ + h²Δh + h H(h)) dA|`, the cubic term of the volume expansion.
pub fn cubic_residual(jet: &SupportJet, grid: &SphereGrid) -> f64 {
    grid.integrate_with(|i| {
        let s = &jet.samples[i];
        s.h * (s.h * s.h + s.h * s.lap + s.dethess)
    })
    .abs()
}

/// `|𝓥 - w𝓐 + (8/3)πw³|`.
pub fn blaschke_residual(volume: f64, area: f64, w: f64) -> f64 {
    (volume - w * area + 8.0 / 3.0 * PI * w.powi(3)).abs()
}

/// All functionals of `(h, w)` with their cross-checks.
///
/// Lengths are in the unit of `w`; the body's width is `2w`.
#[derive(Debug, Clone, Serialize)]
pub struct FunctionalReport {
    pub w: f64,
    pub width: f64,
    pub energy: f64,
    pub energy_quadrature: f64,
    pub volume: f64,
    pub area: f64,
    pub ratio: f64,
    pub volume_direct: f64,
    pub area_direct: f64,
    /// Blaschke relation evaluated on the quadrature volume and area.
    pub blaschke_residual: f64,
    pub hessian_identity_residual: f64,
    pub cubic_residual: f64,
    pub min_density: f64,
}

impl FunctionalReport {
    pub fn from_jet(
        coeffs: &OddHarmonicCoeffs,
        jet: &SupportJet,
        grid: &SphereGrid,
        w: f64,
    ) -> Result<Self> {
        let e = energy(coeffs);
        let volume_direct = volume_direct(jet, grid, w);
        let area_direct = area_direct(jet, grid, w);
        let min_density = geometry::area_element(jet, w)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        Ok(Self {
            w,
            width: 2.0 * w,
            energy: e,
            energy_quadrature: energy_quadrature(jet, grid),
            volume: volume(coeffs, w),
            area: area(coeffs, w),
            ratio: ratio_from_energy(e, w)?,
            volume_direct,
            area_direct,
            blaschke_residual: blaschke_residual(volume_direct, area_direct, w),
            hessian_identity_residual: hessian_identity_residual(jet, grid),
            cubic_residual: cubic_residual(jet, grid),
            min_density,
        })
    }
}

/// Synthesizes `h` on `grid` and evaluates every functional at `w`.
pub fn evaluate(coeffs: &OddHarmonicCoeffs, w: f64, grid: &SphereGrid) -> Result<FunctionalReport> {
    let jet = SynthesisPlan::for_coeffs(grid, coeffs)?.synth(coeffs)?;
    FunctionalReport::from_jet(coeffs, &jet, grid, w)
}

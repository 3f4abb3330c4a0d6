//! The width floor `w₀(h)`: the least `w` for which `h + w` is still the
//! support function of a convex body.
//!
//! The area element `w² + αw + β` is positive for all `w` above its larger
//! root `W(u) = (-α + √(α² - 4β)) / 2`, so `w₀ = max(0, sup_u W(u))`. Since
//! `α² - 4β = (a - c)² + 4b² >= 0`, `W` equals `-h - λ_min(Hess h)` and is
//! continuous everywhere; it fails to be smooth only at umbilics. The sup is
//! taken as a grid maximum polished by local simplex searches around the
//! highest local maxima of the node field.

use serde::Serialize;

use crate::error::Result;
use crate::geometry;
use crate::grid::SphereGrid;
use crate::harmonics::{OddHarmonicCoeffs, PointEvaluator, SupportJet, SynthesisPlan};
use crate::linalg::{self, Vec3};
use crate::nelder_mead::{self, NelderMeadOptions};

/// Number of seed maxima refined per level.
pub const REFINE_SEEDS: usize = 5;

/// Controls the local polishing of the grid maximum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FloorOptions {
    pub refine_levels: usize,
    pub seeds: usize,
    /// Simplex size, relative to the search radius, at which a local search stops.
    pub x_rel_tol: f64,
    pub disc: Discriminant,
}

impl FloorOptions {
    pub fn levels(refine_levels: usize) -> Self {
        Self {
            refine_levels,
            ..Default::default()
        }
    }
}

impl Default for FloorOptions {
    fn default() -> Self {
        Self {
            refine_levels: 3,
            seeds: REFINE_SEEDS,
            x_rel_tol: 1e-9,
            disc: Discriminant::Exact,
        }
    }
}

/// Which discriminant to use for the larger root.
///
/// `Erratum` uses `α² - β`, the form printed in the original remark, and
/// exists so verification runs can demonstrate that the checks catch it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum Discriminant {
    #[default]
    Exact,
    Erratum,
}

/// Larger root of `w² + αw + β` clamped at zero, or 0 without a real root.
#[inline]
pub fn root_width(alpha: f64, beta: f64, disc: Discriminant) -> f64 {
    let d = match disc {
        Discriminant::Exact => alpha * alpha - 4.0 * beta,
        Discriminant::Erratum => alpha * alpha - beta,
    };
    if d < 0.0 {
        // only reachable through rounding for the exact form
        return (-0.5 * alpha).max(0.0);
    }
    (0.5 * (-alpha + d.sqrt())).max(0.0)
}

pub fn w_field(jet: &SupportJet) -> Vec<f64> {
    w_field_with(jet, Discriminant::Exact)
}

pub fn w_field_with(jet: &SupportJet, disc: Discriminant) -> Vec<f64> {
    jet.samples
        .iter()
        .map(|s| root_width(geometry::alpha(s), geometry::beta(s), disc))
        .collect()
}

/// A refined maximizer of `W`.
#[derive(Debug, Clone, Serialize)]
pub struct FloorPeak {
    pub seed_node: usize,
    pub u: Vec3,
    pub w: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RefinementStep {
    pub level: usize,
    pub w0: f64,
    pub radius: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct WidthFloorResult {
    pub w0: f64,
    /// Maximum of the node field before refinement.
    pub grid_max: f64,
    /// Seed nodes whose refined peak reaches `w0` to within `1e-6 w0`.
    pub argmax_nodes: Vec<usize>,
    /// Refined peaks, best first.
    pub peaks: Vec<FloorPeak>,
    #[serde(skip)]
    pub w_field: Vec<f64>,
    pub refinement_record: Vec<RefinementStep>,
}

/// Local maxima of a node field, highest first (ties by index).
fn ranked_local_maxima(grid: &SphereGrid, field: &[f64]) -> Vec<usize> {
    let mut maxima: Vec<usize> = (0..field.len())
        .filter(|&i| grid.neighbours(i).all(|j| field[j] <= field[i]))
        .collect();
    maxima.sort_by(|&a, &b| field[b].total_cmp(&field[a]).then(a.cmp(&b)));
    maxima
}

/// Tangent frame at a non-polar unit vector.
fn tangent_frame(u: Vec3) -> (Vec3, Vec3) {
    let (ct, st, cp, sp) = linalg::spherical_trig(u);
    if st < 1e-12 {
        return ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
    }
    ([ct * cp, ct * sp, -st], [-sp, cp, 0.0])
}

/// Maximizes `W` in a disc of the given angular radius around `center`.
fn refine_peak(
    eval: &PointEvaluator,
    center: Vec3,
    radius: f64,
    x_rel_tol: f64,
    disc: Discriminant,
) -> (Vec3, f64) {
    let (e1, e2) = tangent_frame(center);
    let to_point = |x: &[f64]| {
        let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
        let (a, b) = if r > radius {
            (x[0] * radius / r, x[1] * radius / r)
        } else {
            (x[0], x[1])
        };
        linalg::normalize(linalg::add(
            center,
            linalg::add(linalg::scale(e1, a), linalg::scale(e2, b)),
        ))
    };
    let value = |x: &[f64]| {
        let pj = eval.eval(to_point(x));
        root_width(pj.alpha(), pj.beta(), disc)
    };
    let opts = NelderMeadOptions {
        max_iters: 200,
        f_tol: 1e-15,
        x_tol: x_rel_tol * radius.max(1e-12),
        adaptive: false,
    };
    let res = nelder_mead::minimize(|x| -value(x), &[0.0, 0.0], 0.5 * radius, &opts, |_| {});
    (to_point(&res.x), -res.f)
}

/// Computes `w₀(h)` on `grid`, polishing the grid maximum `refine_levels` times.
pub fn w_floor(
    coeffs: &OddHarmonicCoeffs,
    grid: &SphereGrid,
    refine_levels: usize,
) -> Result<WidthFloorResult> {
    let jet = SynthesisPlan::for_coeffs(grid, coeffs)?.synth(coeffs)?;
    let eval = PointEvaluator::new(coeffs);
    Ok(w_floor_from_jet(
        &eval,
        &jet,
        grid,
        &FloorOptions::levels(refine_levels),
    ))
}

/// Floor computation from an already synthesized jet.
///
/// Level 1 searches a disc of one grid cell around each of the `seeds`
/// highest local maxima of the node field; every further level restarts
/// from the current peaks with half the previous radius.
pub fn w_floor_from_jet(
    eval: &PointEvaluator,
    jet: &SupportJet,
    grid: &SphereGrid,
    opts: &FloorOptions,
) -> WidthFloorResult {
    let disc = opts.disc;
    let field = w_field_with(jet, disc);
    let grid_max = field.iter().copied().fold(0.0, f64::max);
    let mut peaks: Vec<FloorPeak> = ranked_local_maxima(grid, &field)
        .into_iter()
        .take(opts.seeds)
        .map(|i| FloorPeak {
            seed_node: i,
            u: grid.node(i).u,
            w: field[i],
        })
        .collect();
    let mut record = vec![RefinementStep {
        level: 0,
        w0: grid_max,
        radius: 0.0,
    }];
    // nothing to refine when W vanishes identically
    if grid_max > 0.0 {
        let (dt, dp) = grid.cell_size();
        let mut radius = dt.max(dp);
        for level in 1..=opts.refine_levels {
            for p in peaks.iter_mut() {
                let (u, w) = refine_peak(eval, p.u, radius, opts.x_rel_tol, disc);
                if w > p.w {
                    p.u = u;
                    p.w = w;
                }
            }
            let best = peaks.iter().map(|p| p.w).fold(grid_max, f64::max);
            record.push(RefinementStep {
                level,
                w0: best,
                radius,
            });
            radius *= 0.5;
        }
    }
    peaks.sort_by(|a, b| b.w.total_cmp(&a.w).then(a.seed_node.cmp(&b.seed_node)));
    let w0 = peaks.iter().map(|p| p.w).fold(grid_max, f64::max);
    let argmax_nodes = peaks
        .iter()
        .filter(|p| p.w >= w0 * (1.0 - 1e-6))
        .map(|p| p.seed_node)
        .collect();
    WidthFloorResult {
        w0,
        grid_max,
        argmax_nodes,
        peaks,
        w_field: field,
        refinement_record: record,
    }
}

/// Nodes where the area element at `w` is at most `tol · w²`.
pub fn singular_set(
    coeffs: &OddHarmonicCoeffs,
    grid: &SphereGrid,
    w: f64,
    tol: f64,
) -> Result<Vec<usize>> {
    let jet = SynthesisPlan::for_coeffs(grid, coeffs)?.synth(coeffs)?;
    Ok(singular_nodes(&jet, w, tol))
}

pub fn singular_nodes(jet: &SupportJet, w: f64, tol: f64) -> Vec<usize> {
    geometry::area_element(jet, w)
        .iter()
        .enumerate()
        .filter(|(_, &d)| d <= tol * w * w)
        .map(|(i, _)| i)
        .collect()
}

/// Soft maximum `T log Σ exp(Wᵢ / T)` of the node field, an upper bound on
/// the grid maximum that is smooth in the coefficients.
pub fn soft_floor(field: &[f64], temperature: f64) -> f64 {
    let m = field.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = field.iter().map(|&v| ((v - m) / temperature).exp()).sum();
    m + temperature * s.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonics::synth_jet;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_field_has_zero_floor() {
        let grid = SphereGrid::for_degree(3);
        let c = OddHarmonicCoeffs::zeros(3, false).unwrap();
        let r = w_floor(&c, &grid, 2).unwrap();
        assert_eq!(r.w0, 0.0);
        assert!(r.w_field.iter().all(|&w| w == 0.0));
        assert!(singular_set(&c, &grid, 1.0, 1e-6).unwrap().is_empty());
    }

    #[test]
    fn root_matches_quadratic() {
        for &(a, b) in &[(-0.3, -0.1), (0.5, -2.0), (-1.0, 0.2), (0.2, 0.01)] {
            let w = root_width(a, b, Discriminant::Exact);
            if w > 0.0 {
                assert_abs_diff_eq!(w * w + a * w + b, 0.0, epsilon = 1e-14);
                assert!(geometry::density(a, b, w + 1e-6) > 0.0);
            }
        }
        assert_eq!(root_width(1.0, 0.1, Discriminant::Exact), 0.0);
    }

    #[test]
    fn root_field_brackets_sign_change() {
        let grid = SphereGrid::for_degree(3);
        let mut c = OddHarmonicCoeffs::zeros(3, false).unwrap();
        c.set(3, 0, 0.1).unwrap();
        c.set(3, 2, -0.07).unwrap();
        let jet = synth_jet(&c, &grid).unwrap();
        let field = w_field(&jet);
        let delta = 1e-7;
        for (s, &w) in jet.samples.iter().zip(&field) {
            let (a, b) = (geometry::alpha(s), geometry::beta(s));
            let other = -a - w; // sum of roots is -α
            if w > 1e-3 && (w - other).abs() > 1e-3 {
                assert!(geometry::density(a, b, w + delta) > 0.0);
                assert!(geometry::density(a, b, w - delta) < 0.0);
            }
        }
    }

    #[test]
    fn refinement_never_decreases() {
        let grid = SphereGrid::for_degree(5);
        let mut c = OddHarmonicCoeffs::zeros(5, false).unwrap();
        for (i, v) in c.values_mut().iter_mut().enumerate() {
            *v = ((i * 13 % 7) as f64 - 3.0) * 0.01;
        }
        let r = w_floor(&c, &grid, 3).unwrap();
        assert!(r.w0 >= r.grid_max);
        assert!(r.refinement_record.windows(2).all(|w| w[1].w0 >= w[0].w0));
        assert!(!r.argmax_nodes.is_empty());
    }

    #[test]
    fn soft_floor_bounds_the_max() {
        let f = [0.1, 0.3, 0.25];
        let s = soft_floor(&f, 0.01);
        assert!(s >= 0.3 && s < 0.3 + 0.01 * 3f64.ln() + 1e-15);
    }
}

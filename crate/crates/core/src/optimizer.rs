//! Search for local minimizers of the volume ratio at the width floor, the
//! normal flow, and the necessary conditions a minimizer must satisfy.
//!
//! At `w = w₀(h)` the ratio is `1 - (3/4π) 𝓔(h)/w₀(h)²`, so minimizing it
//! means maximizing the scale-invariant objective `𝓔/w₀²`. The search runs
//! projected Nelder-Mead on the unit sphere of coefficients without degree 1,
//! which fixes both the scale and the translation gauge.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::floor::{self, FloorOptions, WidthFloorResult, REFINE_SEEDS};
use crate::functionals::{self, FunctionalReport};
use crate::geometry;
use crate::grid::SphereGrid;
use crate::harmonics::{self, OddHarmonicCoeffs, PointEvaluator, SynthesisPlan};
use crate::linalg::{self, Vec3};
use crate::nelder_mead::{self, NelderMeadOptions};

fn default_lmax() -> usize {
    7
}
fn default_restarts() -> usize {
    4
}
fn default_max_iters() -> usize {
    1500
}
fn default_objective_tolerance() -> f64 {
    1e-9
}
fn default_initial_step() -> f64 {
    0.2
}
fn default_polish_rounds() -> usize {
    10
}
fn default_search_refine_levels() -> usize {
    1
}
fn default_normalization() -> f64 {
    1.0
}
fn default_true() -> bool {
    true
}
fn default_delta_smooth() -> f64 {
    1e-3
}
fn default_tol() -> f64 {
    5e-2
}

/// Every knob of [`optimize`]; also the JSON config file schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfig {
    #[serde(default = "default_lmax")]
    pub lmax: usize,
    /// Search grid; defaults to `4(lmax + 1) × 8(lmax + 1)`.
    #[serde(default)]
    pub grid_theta: Option<usize>,
    #[serde(default)]
    pub grid_phi: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    /// Iteration cap of a single simplex run.
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default = "default_objective_tolerance")]
    pub objective_tolerance: f64,
    /// Edge length of the initial simplex.
    #[serde(default = "default_initial_step")]
    pub initial_step: f64,
    /// Restarts of the simplex from the incumbent. The step is halved after
    /// each round that gains less than 0.1%.
    #[serde(default = "default_polish_rounds")]
    pub polish_rounds: usize,
    /// Refinement levels of the floor during the search.
    #[serde(default = "default_search_refine_levels")]
    pub search_refine_levels: usize,
    /// Log-sum-exp temperature replacing the floor during the search; 0 disables.
    #[serde(default)]
    pub soft_max_temperature: f64,
    #[serde(default = "default_normalization")]
    pub normalization: f64,
    /// Restrict the search to `m = 0` coefficients.
    #[serde(default)]
    pub axisymmetric: bool,
    /// Start restart 0 from the best body found by the same search at
    /// `lmax - 2`, recursively down to the degree-3 harmonic.
    #[serde(default = "default_true")]
    pub continuation: bool,
    /// Search in energy-weighted coordinates.
    #[serde(default = "default_true")]
    pub precondition: bool,
    /// Smooth-set threshold as a multiple of `w₀²`.
    #[serde(default = "default_delta_smooth")]
    pub delta_smooth: f64,
    #[serde(default = "default_tol")]
    pub verification_tol: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.lmax < 3 || self.lmax.is_multiple_of(2) {
            return bad(format!("lmax must be odd and >= 3, got {}", self.lmax));
        }
        if self.restarts == 0 {
            return bad("restarts must be at least 1".into());
        }
        if self.max_iters == 0 {
            return bad("max_iters must be positive".into());
        }
        for (name, v) in [
            ("objective_tolerance", self.objective_tolerance),
            ("initial_step", self.initial_step),
            ("normalization", self.normalization),
            ("delta_smooth", self.delta_smooth),
            ("verification_tol", self.verification_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive and finite, got {v}"));
            }
        }
        if !(self.soft_max_temperature >= 0.0 && self.soft_max_temperature.is_finite()) {
            return bad(format!(
                "soft_max_temperature must be >= 0, got {}",
                self.soft_max_temperature
            ));
        }
        let grid = self.grid()?;
        if grid.band_limit() < 2 * self.lmax {
            return Err(Error::GridTooCoarse {
                lmax: self.lmax,
                needed: 2 * self.lmax,
                band_limit: grid.band_limit(),
            });
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<SphereGrid> {
        SphereGrid::new(
            self.grid_theta.unwrap_or(4 * (self.lmax + 1)),
            self.grid_phi.unwrap_or(8 * (self.lmax + 1)),
        )
    }

    /// Floor settings used inside the search: loose local tolerances, since
    /// the search grid already resolves the peaks well.
    pub fn search_floor(&self) -> FloorOptions {
        FloorOptions {
            refine_levels: self.search_refine_levels,
            seeds: REFINE_SEEDS,
            x_rel_tol: 1e-3,
            ..Default::default()
        }
    }

    /// Grid twice as fine as the search grid, used for verification.
    pub fn verification_grid(&self) -> Result<SphereGrid> {
        let g = self.grid()?;
        SphereGrid::new(2 * g.n_theta(), 2 * g.n_phi())
    }
}

/// Value of `𝓔/w₀²` and its ingredients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObjectiveValue {
    pub value: f64,
    pub w0: f64,
    pub energy: f64,
    /// `w₀` vanishes: `h` lies in the degree-1 span.
    pub gauge: bool,
}

/// Reusable evaluator of the objective on a fixed grid and layout.
pub struct Objective {
    grid: SphereGrid,
    plan: SynthesisPlan,
    lmax: usize,
    include_degree_one: bool,
    floor: FloorOptions,
    temperature: f64,
}

impl Objective {
    pub fn new(
        grid: &SphereGrid,
        lmax: usize,
        include_degree_one: bool,
        floor: FloorOptions,
        temperature: f64,
    ) -> Result<Self> {
        Ok(Self {
            grid: grid.clone(),
            plan: SynthesisPlan::new(grid, lmax, include_degree_one)?,
            lmax,
            include_degree_one,
            floor,
            temperature,
        })
    }

    pub fn eval(&self, coeffs: &OddHarmonicCoeffs) -> Result<ObjectiveValue> {
        if coeffs.is_zero() {
            return Err(Error::ZeroCoefficients);
        }
        let c = coeffs.relayout(self.lmax, self.include_degree_one);
        let jet = self.plan.synth(&c)?;
        let w0 = if self.temperature > 0.0 {
            floor::soft_floor(&floor::w_field(&jet), self.temperature)
        } else {
            let eval = PointEvaluator::new(&c);
            floor::w_floor_from_jet(&eval, &jet, &self.grid, &self.floor).w0
        };
        let energy = functionals::energy(&c);
        if w0 <= 1e-12 * c.norm() {
            return Ok(ObjectiveValue {
                value: 0.0,
                w0,
                energy,
                gauge: true,
            });
        }
        Ok(ObjectiveValue {
            value: energy / (w0 * w0),
            w0,
            energy,
            gauge: false,
        })
    }
}

/// `𝓔(h)/w₀(h)²` with a fully refined floor on `grid`.
pub fn objective(coeffs: &OddHarmonicCoeffs, grid: &SphereGrid) -> Result<ObjectiveValue> {
    Objective::new(
        grid,
        coeffs.lmax(),
        coeffs.include_degree_one(),
        FloorOptions::default(),
        0.0,
    )?
    .eval(coeffs)
}

/// Converts an objective value into the ratio at the floor.
pub fn ratio_from_objective(value: f64) -> f64 {
    1.0 - 3.0 / (4.0 * PI) * value
}

/// Smooth-set diagnostics for a body at its floor.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub w: f64,
    pub delta_smooth: f64,
    pub tol: f64,
    pub n_nodes: usize,
    /// Max over smooth nodes of `min(density(u), density(-u)) / w²`.
    pub antipodal_vanishing_score: f64,
    /// Max over smooth nodes of `|2 w k₂ - 1|`.
    pub k2_deviation: f64,
    pub k2_is_smaller: f64,
    pub smooth_fraction: f64,
    pub pass: bool,
}

/// Checks that the area element vanishes at one point of every antipodal
/// pair and that the smaller principal curvature is `1/(2w)` wherever the
/// boundary is smooth.
///
/// A node is smooth when its area element is at least `delta_smooth_rel · w²`.
pub fn verify_necessary_conditions(
    coeffs: &OddHarmonicCoeffs,
    w: f64,
    grid: &SphereGrid,
    delta_smooth_rel: f64,
    tol: f64,
) -> Result<VerificationReport> {
    if !(w > 0.0) {
        return Err(Error::NonPositiveWidth(w));
    }
    let jet = SynthesisPlan::for_coeffs(grid, coeffs)?.synth(coeffs)?;
    let geo = geometry::area_element(&jet, w);
    let anti = grid.antipode_index();
    let delta = delta_smooth_rel * w * w;
    let mut score: f64 = 0.0;
    let mut k2_dev: f64 = 0.0;
    let mut smooth = 0usize;
    let mut ordered = 0usize;
    for (i, s) in jet.samples.iter().enumerate() {
        if geo[i] < delta {
            continue;
        }
        smooth += 1;
        score = score.max(geo[i].min(geo[anti[i]]) / (w * w));
        if let Some(k) = geometry::curvature(geometry::alpha(s), geometry::beta(s), w) {
            k2_dev = k2_dev.max((2.0 * w * k.k2 - 1.0).abs());
            if k.k2 <= k.k1 {
                ordered += 1;
            }
        }
    }
    let frac = |n: usize, d: usize| if d == 0 { 0.0 } else { n as f64 / d as f64 };
    Ok(VerificationReport {
        w,
        delta_smooth: delta,
        tol,
        n_nodes: grid.len(),
        antipodal_vanishing_score: score,
        k2_deviation: k2_dev,
        k2_is_smaller: frac(ordered, smooth),
        smooth_fraction: frac(smooth, grid.len()),
        pass: score <= tol && k2_dev <= tol,
    })
}

/// `|𝓔(h+εv) - 2𝓔(h) + 𝓔(h-εv) - 2ε²𝓔(v)|`.
pub fn second_variation_check(h: &OddHarmonicCoeffs, v: &OddHarmonicCoeffs, eps: f64) -> f64 {
    let e = functionals::energy;
    (e(&h.add_scaled(v, eps)) - 2.0 * e(h) + e(&h.add_scaled(v, -eps)) - 2.0 * eps * eps * e(v))
        .abs()
}

/// Band-limited odd bump centred at `±center`.
#[derive(Debug, Clone, Serialize)]
pub struct BumpPerturbation {
    pub center: Vec3,
    pub radius: f64,
    pub coeffs: OddHarmonicCoeffs,
    /// `‖b - Pb‖ / ‖b‖` for the bump `b` and its projection `Pb`.
    pub leakage: f64,
}

/// Projects `b(u) = φ(∠(u, c)) - φ(∠(u, -c))` onto degrees `1..=lmax`, with
/// `φ(t) = exp(-1 / (1 - (t/r)²))` inside the angular radius `r`.
///
/// Leakage counts only the part above `lmax`; the degree-1 part is a
/// translation and is dropped from the returned coefficients.
pub fn bump_perturbation(center: Vec3, radius: f64, lmax: usize) -> Result<BumpPerturbation> {
    if !(radius > 0.0 && radius < PI / 2.0) {
        return Err(Error::InvalidConfig(format!(
            "bump radius must lie in (0, π/2), got {radius}"
        )));
    }
    let c = linalg::normalize(center);
    let n = (8 * (lmax + 1)).max((8.0 * PI / radius) as usize);
    let grid = SphereGrid::new(n, 2 * n)?;
    let bump = |t: f64| {
        let x = t / radius;
        if x < 1.0 {
            (-1.0 / (1.0 - x * x)).exp()
        } else {
            0.0
        }
    };
    let field: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|nd| {
            let d = linalg::dot(nd.u, c).clamp(-1.0, 1.0);
            bump(d.acos()) - bump((-d).acos())
        })
        .collect();
    let full = harmonics::project(&field, &grid, lmax, true)?;
    let total = grid.integrate(&field.iter().map(|f| f * f).collect::<Vec<_>>())?;
    let kept = full.norm().powi(2);
    Ok(BumpPerturbation {
        center: c,
        radius,
        leakage: (1.0 - kept / total).max(0.0).sqrt(),
        coeffs: full.without_degree_one(),
    })
}

/// Objective response to a bump on the most doubly smooth antipodal pair.
#[derive(Debug, Clone, Serialize)]
pub struct SecondVariationDiagnostic {
    pub bump: BumpPerturbation,
    pub eps: f64,
    pub base: f64,
    pub plus: f64,
    pub minus: f64,
    /// `𝓔(v)` of the normalized perturbation.
    pub energy_v: f64,
    /// Either signed perturbation raised the objective by more than `tol`.
    pub improves: bool,
}

/// Perturbs `coeffs` by `±eps · v`, `v` a unit bump centred where both
/// `u` and `-u` carry the largest area element at `w0`.
pub fn second_variation_diagnostic(
    coeffs: &OddHarmonicCoeffs,
    w0: f64,
    grid: &SphereGrid,
    radius: f64,
    eps: f64,
    tol: f64,
) -> Result<SecondVariationDiagnostic> {
    let jet = SynthesisPlan::for_coeffs(grid, coeffs)?.synth(coeffs)?;
    let dens = geometry::area_element(&jet, w0);
    let anti = grid.antipode_index();
    let best = (0..grid.len())
        .max_by(|&a, &b| {
            let fa = dens[a].min(dens[anti[a]]);
            let fb = dens[b].min(dens[anti[b]]);
            fa.total_cmp(&fb).then(b.cmp(&a))
        })
        .ok_or_else(|| Error::InvalidGrid("empty grid".into()))?;
    let bump = bump_perturbation(grid.node(best).u, radius, coeffs.lmax())?;
    let v = bump.coeffs.scaled(1.0 / bump.coeffs.norm());
    let v = v.relayout(coeffs.lmax(), coeffs.include_degree_one());
    let obj = Objective::new(
        grid,
        coeffs.lmax(),
        coeffs.include_degree_one(),
        FloorOptions::default(),
        0.0,
    )?;
    let base = obj.eval(coeffs)?.value;
    let plus = obj.eval(&coeffs.add_scaled(&v, eps))?.value;
    let minus = obj.eval(&coeffs.add_scaled(&v, -eps))?.value;
    Ok(SecondVariationDiagnostic {
        energy_v: functionals::energy(&v),
        improves: plus > base + tol || minus > base + tol,
        bump,
        eps,
        base,
        plus,
        minus,
    })
}

/// Evaluates the parallel bodies `h + w` for `w` from `w_start` down to
/// `w_end` in `steps` equal decrements.
pub fn normal_flow(
    coeffs: &OddHarmonicCoeffs,
    w_start: f64,
    w_end: f64,
    steps: usize,
    grid: &SphereGrid,
) -> Result<Vec<FunctionalReport>> {
    if !(w_end > 0.0) {
        return Err(Error::NonPositiveWidth(w_end));
    }
    if w_start < w_end || steps == 0 {
        return Err(Error::InvalidConfig(format!(
            "flow needs w_start >= w_end and steps >= 1, got {w_start} -> {w_end} in {steps}"
        )));
    }
    let w0 = floor::w_floor(coeffs, grid, 3)?.w0;
    if w_end < w0 * (1.0 - 1e-9) {
        return Err(Error::BelowFloor { w: w_end, w0 });
    }
    let jet = SynthesisPlan::for_coeffs(grid, coeffs)?.synth(coeffs)?;
    (0..=steps)
        .map(|k| {
            let t = k as f64 / steps as f64;
            let w = if k == steps {
                w_end
            } else {
                w_start + t * (w_end - w_start)
            };
            FunctionalReport::from_jet(coeffs, &jet, grid, w)
        })
        .collect()
}

/// Rotates `coeffs` so that the largest value of its degree-3 part sits at
/// `+ẑ`. The objective is unchanged; this only eases visual comparison.
pub fn canonicalize(coeffs: &OddHarmonicCoeffs) -> OddHarmonicCoeffs {
    let mut h3 = OddHarmonicCoeffs::zeros(3, false).expect("odd lmax");
    for m in -3..=3 {
        h3.set(3, m, coeffs.get(3, m)).expect("degree 3 present");
    }
    if h3.is_zero() {
        return coeffs.clone();
    }
    let grid = SphereGrid::new(48, 96).expect("valid grid");
    let values = SynthesisPlan::for_coeffs(&grid, &h3)
        .expect("fine grid")
        .synth_h(h3.values());
    let best = (0..values.len())
        .max_by(|&a, &b| values[a].total_cmp(&values[b]).then(b.cmp(&a)))
        .expect("non-empty grid");
    let u = grid.node(best).u;
    let z = [0.0, 0.0, 1.0];
    let axis = linalg::cross(u, z);
    let s = linalg::norm(axis);
    if s < 1e-15 {
        return coeffs.clone();
    }
    let angle = s.atan2(linalg::dot(u, z));
    harmonics::rotate_coeffs(coeffs, &linalg::rotation(axis, angle))
}

/// A body at its floor with its verification.
#[derive(Debug, Clone, Serialize)]
pub struct CandidateBody {
    pub coeffs: OddHarmonicCoeffs,
    pub canonical_coeffs: OddHarmonicCoeffs,
    pub w0: f64,
    pub energy: f64,
    pub objective: f64,
    pub ratio: f64,
    pub floor: WidthFloorResult,
    pub verification: VerificationReport,
}

impl CandidateBody {
    /// Evaluates `coeffs` at its floor on the verification grid.
    pub fn at_floor(coeffs: &OddHarmonicCoeffs, config: &OptimizerConfig) -> Result<Self> {
        let grid = config.verification_grid()?;
        let floor = floor::w_floor(coeffs, &grid, 4)?;
        let w0 = floor.w0;
        let energy = functionals::energy(coeffs);
        let verification = verify_necessary_conditions(
            coeffs,
            w0,
            &grid,
            config.delta_smooth,
            config.verification_tol,
        )?;
        Ok(Self {
            coeffs: coeffs.clone(),
            canonical_coeffs: canonicalize(coeffs),
            w0,
            energy,
            objective: energy / (w0 * w0),
            ratio: functionals::ratio_i(coeffs, w0)?,
            floor,
            verification,
        })
    }
}

/// Per-restart record.
#[derive(Debug, Clone, Serialize)]
pub struct RestartLog {
    pub index: usize,
    pub start_objective: f64,
    pub best_objective: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    /// Best objective after every simplex iteration, polishing included.
    pub history: Vec<f64>,
    #[serde(skip)]
    pub best: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizationOutcome {
    pub config: OptimizerConfig,
    pub candidate: CandidateBody,
    /// Ratio of the axisymmetric degree-3 start at its own floor.
    pub start_ratio: f64,
    pub restarts: Vec<RestartLog>,
}

/// Search coordinates `y = √(l(l+1)/2 - 1) · c`, in which the energy is
/// `‖y‖²`. Every direction then moves the energy at the same rate, which the
/// simplex needs in order to make progress on the high degrees.
struct SearchSpace {
    slots: Vec<usize>,
    scales: Vec<f64>,
    lmax: usize,
    norm: f64,
}

impl SearchSpace {
    fn new(config: &OptimizerConfig) -> Self {
        let layout = OddHarmonicCoeffs::zeros(config.lmax, false).expect("validated lmax");
        let (slots, scales) = layout
            .modes()
            .iter()
            .enumerate()
            .filter(|(_, &(_, m))| !config.axisymmetric || m == 0)
            .map(|(i, &(l, _))| {
                let s = if config.precondition {
                    functionals::energy_weight(l).sqrt()
                } else {
                    1.0
                };
                (i, s)
            })
            .unzip();
        Self {
            slots,
            scales,
            lmax: config.lmax,
            norm: config.normalization,
        }
    }

    /// Coefficients for search coordinates, rescaled to the configured norm.
    fn to_coeffs(&self, x: &[f64]) -> OddHarmonicCoeffs {
        let mut c = OddHarmonicCoeffs::zeros(self.lmax, false).expect("validated lmax");
        for ((&s, &v), &k) in self.slots.iter().zip(x).zip(&self.scales) {
            c.values_mut()[s] = v / k;
        }
        let n = c.norm();
        if n > 0.0 {
            c.scaled(self.norm / n)
        } else {
            c
        }
    }

    fn from_coeffs(&self, c: &OddHarmonicCoeffs) -> Vec<f64> {
        let c = c.relayout(self.lmax, false);
        let mut x: Vec<f64> = self
            .slots
            .iter()
            .zip(&self.scales)
            .map(|(&s, &k)| c.values()[s] * k)
            .collect();
        self.project(&mut x);
        x
    }

    fn project(&self, x: &mut [f64]) {
        let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n > 0.0 {
            x.iter_mut().for_each(|v| *v /= n);
        }
    }

    /// Restart 0 is the axisymmetric degree-3 harmonic; the others draw
    /// coefficients with standard deviation `1/l²`.
    fn start(&self, index: usize, seed: u64) -> Vec<f64> {
        let mut c = OddHarmonicCoeffs::zeros(self.lmax, false).expect("validated lmax");
        if index == 0 {
            c.set(3, 0, 1.0).expect("degree 3 present");
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(index as u64);
            let modes = c.modes();
            for &s in &self.slots {
                let l = modes[s].0 as f64;
                c.values_mut()[s] = rng.sample::<f64, _>(StandardNormal) / (l * l);
            }
        }
        self.from_coeffs(&c)
    }
}

fn run_restart(
    space: &SearchSpace,
    objective: &Objective,
    config: &OptimizerConfig,
    index: usize,
    x0: Vec<f64>,
) -> RestartLog {
    let f = |x: &[f64]| match objective.eval(&space.to_coeffs(x)) {
        Ok(v) => -v.value,
        Err(_) => f64::NAN,
    };
    let opts = NelderMeadOptions {
        max_iters: config.max_iters,
        f_tol: 0.1 * config.objective_tolerance,
        x_tol: 1e-8,
        adaptive: true,
    };
    let start_objective = -f(&x0);
    let mut best = x0;
    let mut best_f = -start_objective;
    let mut history: Vec<f64> = Vec::new();
    let mut iterations = 0;
    let mut evaluations = 1;
    let mut converged = false;
    let mut step = config.initial_step;
    for round in 0..=config.polish_rounds {
        let r = nelder_mead::minimize(f, &best, step, &opts, |x| space.project(x));
        // the incumbent carries over between rounds
        for v in &r.history {
            let last = history.last().copied().unwrap_or(f64::NEG_INFINITY);
            history.push(last.max(-v));
        }
        iterations += r.iters;
        evaluations += r.evals;
        let gain = best_f - r.f;
        if r.f < best_f {
            best = r.x;
            best_f = r.f;
        }
        if round > 0 && gain <= config.objective_tolerance {
            converged = true;
            break;
        }
        // a fresh simplex of the same size is worth another try while the
        // last one still made real progress
        if gain < 1e-3 * best_f.abs() {
            step *= 0.5;
        }
    }
    RestartLog {
        index,
        start_objective,
        best_objective: -best_f,
        iterations,
        evaluations,
        converged,
        history,
        best,
    }
}

/// Best body of the restart-0 chain at `lmax - 2`.
fn continuation_start(config: &OptimizerConfig) -> Result<OddHarmonicCoeffs> {
    let mut c = OddHarmonicCoeffs::zeros(3, false)?;
    c.set(3, 0, 1.0)?;
    for l in (3..config.lmax).step_by(2) {
        let sub = OptimizerConfig {
            lmax: l,
            grid_theta: None,
            grid_phi: None,
            ..config.clone()
        };
        let space = SearchSpace::new(&sub);
        let objective = Objective::new(
            &sub.grid()?,
            l,
            false,
            sub.search_floor(),
            sub.soft_max_temperature,
        )?;
        let log = run_restart(&space, &objective, &sub, 0, space.from_coeffs(&c));
        c = space.to_coeffs(&log.best);
    }
    Ok(c)
}

/// Runs `config.restarts` seeded searches in parallel and returns the best.
///
/// Restart 0 starts from the axisymmetric degree-3 harmonic, or with
/// `continuation` from the best body one degree lower; the others start
/// from Gaussian directions. Ties are broken by restart index.
pub fn optimize(config: &OptimizerConfig) -> Result<OptimizationOutcome> {
    optimize_with_starts(config, None)
}

/// Local search from a given start only, with the same polishing rules.
pub fn optimize_from(
    config: &OptimizerConfig,
    start: &OddHarmonicCoeffs,
) -> Result<OptimizationOutcome> {
    if start.is_zero() {
        return Err(Error::ZeroCoefficients);
    }
    optimize_with_starts(config, Some(start))
}

fn optimize_with_starts(
    config: &OptimizerConfig,
    start: Option<&OddHarmonicCoeffs>,
) -> Result<OptimizationOutcome> {
    config.validate()?;
    let grid = config.grid()?;
    let space = SearchSpace::new(config);
    let objective = Objective::new(
        &grid,
        config.lmax,
        false,
        config.search_floor(),
        config.soft_max_temperature,
    )?;
    let starts: Vec<Vec<f64>> = match start {
        Some(c) => vec![space.from_coeffs(c)],
        None => (0..config.restarts)
            .map(|i| {
                if i == 0 && config.continuation && config.lmax > 3 {
                    Ok(space.from_coeffs(&continuation_start(config)?))
                } else {
                    Ok(space.start(i, config.seed))
                }
            })
            .collect::<Result<_>>()?,
    };
    let logs: Vec<RestartLog> = starts
        .into_par_iter()
        .enumerate()
        .map(|(i, x0)| run_restart(&space, &objective, config, i, x0))
        .collect();
    let winner = logs
        .iter()
        .fold(None::<&RestartLog>, |acc, r| match acc {
            Some(a) if a.best_objective >= r.best_objective => Some(a),
            _ => Some(r),
        })
        .expect("at least one restart");
    let coeffs = space.to_coeffs(&winner.best);
    let candidate = CandidateBody::at_floor(&coeffs, config)?;
    let y30 = space.to_coeffs(&space.start(0, config.seed));
    let start_floor = floor::w_floor(&y30, &config.verification_grid()?, 4)?.w0;
    Ok(OptimizationOutcome {
        config: config.clone(),
        candidate,
        start_ratio: functionals::ratio_i(&y30, start_floor)?,
        restarts: logs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies;
    use approx::assert_abs_diff_eq;

    fn y30() -> OddHarmonicCoeffs {
        let mut c = OddHarmonicCoeffs::zeros(3, false).unwrap();
        c.set(3, 0, 1.0).unwrap();
        c
    }

    #[test]
    fn config_defaults_and_validation() {
        let c = OptimizerConfig::default();
        assert_eq!(c.lmax, 7);
        assert_eq!(c.normalization, 1.0);
        c.validate().unwrap();
        for bad in [
            r#"{"lmax": 4}"#,
            r#"{"lmax": 1}"#,
            r#"{"restarts": 0}"#,
            r#"{"normalization": -1}"#,
            r#"{"grid_theta": 4}"#,
        ] {
            let c: OptimizerConfig = serde_json::from_str(bad).unwrap();
            assert!(c.validate().is_err(), "{bad}");
        }
        assert!(serde_json::from_str::<OptimizerConfig>(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn objective_gauge_cases() {
        let grid = SphereGrid::for_degree(3);
        let zero = OddHarmonicCoeffs::zeros(3, true).unwrap();
        assert!(matches!(
            objective(&zero, &grid),
            Err(Error::ZeroCoefficients)
        ));
        let mut d1 = zero.clone();
        d1.set(1, 0, 1.0).unwrap();
        let v = objective(&d1, &grid).unwrap();
        assert!(v.gauge);
        assert_eq!(v.value, 0.0);
    }

    #[test]
    fn objective_is_scale_invariant() {
        let grid = SphereGrid::for_degree(5);
        let c = bodies::random_odd(5, 4, 1.0).unwrap();
        let base = objective(&c, &grid).unwrap().value;
        for t in [0.5, 2.0, 10.0] {
            let v = objective(&c.scaled(t), &grid).unwrap().value;
            assert!((v - base).abs() <= 1e-8 * base);
        }
    }

    #[test]
    fn second_variation_is_exact() {
        let h = bodies::random_odd(7, 1, 0.7).unwrap();
        let v = bodies::random_odd(7, 2, 1.3).unwrap();
        for eps in [1e-3, 0.1, 1.0] {
            let r = second_variation_check(&h, &v, eps);
            let e = functionals::energy;
            assert!(r <= 1e-10 * (1.0 + e(&h) + e(&v)));
        }
    }

    #[test]
    fn ball_fails_verification() {
        let grid = SphereGrid::for_degree(3);
        let r = verify_necessary_conditions(&bodies::ball(), 1.0, &grid, 1e-3, 5e-2).unwrap();
        assert_eq!(r.smooth_fraction, 1.0);
        assert_abs_diff_eq!(r.k2_deviation, 1.0, epsilon = 1e-12);
        assert!(!r.pass);
    }

    #[test]
    fn flow_of_ball_and_floor_guard() {
        let grid = SphereGrid::for_degree(3);
        let traj = normal_flow(&bodies::ball(), 2.0, 1.0, 4, &grid).unwrap();
        assert_eq!(traj.len(), 5);
        for r in &traj {
            assert_abs_diff_eq!(r.volume, 4.0 * PI / 3.0 * r.w.powi(3), epsilon = 1e-12);
            assert_eq!(r.ratio, 1.0);
        }
        let c = y30().scaled(0.1);
        let w0 = floor::w_floor(&c, &grid, 3).unwrap().w0;
        assert!(matches!(
            normal_flow(&c, 1.0, 0.5 * w0, 3, &grid),
            Err(Error::BelowFloor { .. })
        ));
        let traj = normal_flow(&c, 1.0, w0, 8, &grid).unwrap();
        assert!(traj.windows(2).all(|p| p[1].ratio < p[0].ratio));
    }

    #[test]
    fn bump_is_odd_and_mostly_captured() {
        let b = bump_perturbation([0.3, 0.2, 0.9], 0.8, 9).unwrap();
        assert!(b.leakage > 0.0 && b.leakage < 0.5, "{}", b.leakage);
        assert!(!b.coeffs.include_degree_one());
        let narrow = bump_perturbation([0.3, 0.2, 0.9], 0.3, 9).unwrap();
        assert!(narrow.leakage > b.leakage);
        assert!(bump_perturbation([0.0, 0.0, 1.0], 2.0, 9).is_err());
    }

    #[test]
    fn canonical_form_keeps_objective() {
        let grid = SphereGrid::for_degree(5);
        let c = bodies::random_odd(5, 9, 1.0).unwrap();
        let k = canonicalize(&c);
        assert_abs_diff_eq!(k.norm(), c.norm(), epsilon = 1e-12);
        let (a, b) = (objective(&c, &grid).unwrap(), objective(&k, &grid).unwrap());
        assert!((a.value - b.value).abs() < 1e-6 * a.value);
        let top = harmonics::eval_value(&k.relayout(3, false), [0.0, 0.0, 1.0]);
        assert!(top > 0.0);
    }

    #[test]
    fn degree_three_search_improves_on_start() {
        let config = OptimizerConfig {
            lmax: 3,
            restarts: 2,
            max_iters: 400,
            polish_rounds: 1,
            ..Default::default()
        };
        let out = optimize(&config).unwrap();
        let c = &out.candidate;
        assert!(c.objective > 0.0 && c.ratio < 1.0);
        assert_abs_diff_eq!(c.coeffs.norm(), 1.0, epsilon = 1e-12);
        assert!(c.ratio <= out.start_ratio + 1e-9);
        for r in &out.restarts {
            assert!(r.history.windows(2).all(|w| w[1] >= w[0]));
        }
        let again = optimize(&config).unwrap();
        assert_eq!(again.candidate.coeffs, c.coeffs);
    }
}

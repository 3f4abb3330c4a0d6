//! Real spherical harmonics on odd degrees and the second-order jet of `h`.
//!
//! The basis is fully normalized (orthonormal for `dA`) without the
//! Condon-Shortley phase:
//!
//! ```text
//! Y_{l,0}  = P̄_l^0(cos θ)
//! Y_{l,m}  = √2 P̄_l^m(cos θ) cos(mφ)     m > 0
//! Y_{l,-m} = √2 P̄_l^m(cos θ) sin(mφ)     m > 0
//! ```
//!
//! Derivatives are analytic. `dP̄/dθ` comes from the degree-lowering
//! recurrence and `d²P̄/dθ²` from the associated Legendre equation, so jets
//! are exact to rounding at every node of a pole-free grid. Points closer
//! than [`POLE_GUARD`] to a pole are evaluated in a rotated chart.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::SphereGrid;
use crate::linalg::{self, Mat3, Vec3};

/// `|cos θ|` above which point evaluation switches to a rotated chart.
pub const POLE_GUARD: f64 = 0.98;

/// Coefficients of `h` on odd degrees.
///
/// Degree 1 (translations) is only present when `include_degree_one` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "CoeffFile", try_from = "CoeffFile")]
pub struct OddHarmonicCoeffs {
    lmax: usize,
    include_degree_one: bool,
    values: Vec<f64>,
}

fn first_degree(include_degree_one: bool) -> usize {
    if include_degree_one {
        1
    } else {
        3
    }
}

fn degree_offset(l: usize, l0: usize) -> usize {
    // Σ (2k + 1) over odd k in [l0, l)
    (l0..l).step_by(2).map(|k| 2 * k + 1).sum()
}

impl OddHarmonicCoeffs {
    pub fn zeros(lmax: usize, include_degree_one: bool) -> Result<Self> {
        if lmax.is_multiple_of(2) {
            return Err(Error::InvalidCoefficients(format!(
                "lmax must be odd, got {lmax}"
            )));
        }
        let n = Self::basis_len(lmax, include_degree_one);
        Ok(Self {
            lmax,
            include_degree_one,
            values: vec![0.0; n],
        })
    }

    /// Number of basis functions for the given layout.
    pub fn basis_len(lmax: usize, include_degree_one: bool) -> usize {
        let l0 = first_degree(include_degree_one);
        if lmax < l0 {
            0
        } else {
            degree_offset(lmax + 2, l0)
        }
    }

    pub fn from_values(lmax: usize, include_degree_one: bool, values: Vec<f64>) -> Result<Self> {
        let mut c = Self::zeros(lmax, include_degree_one)?;
        if values.len() != c.values.len() {
            return Err(Error::InvalidCoefficients(format!(
                "expected {} values for lmax = {lmax}, got {}",
                c.values.len(),
                values.len()
            )));
        }
        c.values = values;
        Ok(c)
    }

    pub fn lmax(&self) -> usize {
        self.lmax
    }

    pub fn include_degree_one(&self) -> bool {
        self.include_degree_one
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Odd degrees carried by this layout, ascending.
    pub fn degrees(&self) -> impl Iterator<Item = usize> {
        (first_degree(self.include_degree_one)..=self.lmax).step_by(2)
    }

    /// `(l, m)` for every slot, in storage order.
    pub fn modes(&self) -> Vec<(usize, i64)> {
        self.degrees()
            .flat_map(|l| (-(l as i64)..=l as i64).map(move |m| (l, m)))
            .collect()
    }

    pub fn index(&self, l: usize, m: i64) -> Option<usize> {
        let l0 = first_degree(self.include_degree_one);
        if l.is_multiple_of(2) || l < l0 || l > self.lmax || m.unsigned_abs() as usize > l {
            return None;
        }
        Some(degree_offset(l, l0) + (m + l as i64) as usize)
    }

    pub fn get(&self, l: usize, m: i64) -> f64 {
        self.index(l, m).map_or(0.0, |i| self.values[i])
    }

    pub fn set(&mut self, l: usize, m: i64, value: f64) -> Result<()> {
        let i = self.index(l, m).ok_or_else(|| {
            Error::InvalidCoefficients(format!(
                "mode (l = {l}, m = {m}) not in layout lmax = {}, degree one = {}",
                self.lmax, self.include_degree_one
            ))
        })?;
        self.values[i] = value;
        Ok(())
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn scaled(&self, t: f64) -> Self {
        let mut c = self.clone();
        c.values.iter_mut().for_each(|v| *v *= t);
        c
    }

    /// `self + t * other`, re-laid-out to the union of both layouts.
    pub fn add_scaled(&self, other: &Self, t: f64) -> Self {
        let lmax = self.lmax.max(other.lmax);
        let d1 = self.include_degree_one || other.include_degree_one;
        let mut out = self.relayout(lmax, d1);
        for (i, (l, m)) in other.modes().into_iter().enumerate() {
            let j = out.index(l, m).expect("union layout");
            out.values[j] += t * other.values[i];
        }
        out
    }

    /// Copies into a different layout; modes that do not fit are dropped.
    pub fn relayout(&self, lmax: usize, include_degree_one: bool) -> Self {
        let mut out = Self::zeros(lmax, include_degree_one).expect("odd lmax");
        for (i, (l, m)) in self.modes().into_iter().enumerate() {
            if let Some(j) = out.index(l, m) {
                out.values[j] = self.values[i];
            }
        }
        out
    }

    /// Same coefficients with the degree-1 block removed.
    pub fn without_degree_one(&self) -> Self {
        self.relayout(self.lmax.max(3), false)
    }

    /// Keeps only the `m = 0` modes.
    pub fn axisymmetric_part(&self) -> Self {
        let mut out = self.clone();
        for (i, (_, m)) in self.modes().into_iter().enumerate() {
            if m != 0 {
                out.values[i] = 0.0;
            }
        }
        out
    }

    /// Sum of squares of degree-`l` coefficients.
    pub fn degree_power(&self, l: usize) -> f64 {
        (-(l as i64)..=l as i64)
            .map(|m| self.get(l, m).powi(2))
            .sum()
    }

    pub fn to_file(&self) -> CoeffFile {
        CoeffFile {
            lmax: self.lmax,
            entries: self
                .modes()
                .into_iter()
                .zip(&self.values)
                .map(|((l, m), &v)| (l, m, v))
                .collect(),
        }
    }

    pub fn from_file(file: &CoeffFile) -> Result<Self> {
        let lmax = file.lmax;
        if lmax.is_multiple_of(2) {
            return Err(Error::InvalidCoefficients(format!(
                "lmax must be odd, got {lmax}"
            )));
        }
        let mut d1 = false;
        for &(l, m, v) in &file.entries {
            if l % 2 == 0 {
                return Err(Error::InvalidCoefficients(format!(
                    "even-degree coefficient (l = {l}, m = {m}) breaks constant width"
                )));
            }
            if l > lmax || m.unsigned_abs() as usize > l {
                return Err(Error::InvalidCoefficients(format!(
                    "mode (l = {l}, m = {m}) outside lmax = {lmax}"
                )));
            }
            if !v.is_finite() {
                return Err(Error::InvalidCoefficients(format!(
                    "non-finite coefficient at (l = {l}, m = {m})"
                )));
            }
            d1 |= l == 1;
        }
        let mut c = Self::zeros(lmax, d1)?;
        let mut seen = vec![false; c.len()];
        for &(l, m, v) in &file.entries {
            let i = c.index(l, m).expect("validated above");
            if seen[i] {
                return Err(Error::InvalidCoefficients(format!(
                    "duplicate entry (l = {l}, m = {m})"
                )));
            }
            seen[i] = true;
            c.values[i] = v;
        }
        Ok(c)
    }
}

impl From<OddHarmonicCoeffs> for CoeffFile {
    fn from(c: OddHarmonicCoeffs) -> Self {
        c.to_file()
    }
}

impl TryFrom<CoeffFile> for OddHarmonicCoeffs {
    type Error = Error;

    fn try_from(file: CoeffFile) -> Result<Self> {
        Self::from_file(&file)
    }
}

/// On-disk coefficient format: `{"lmax": L, "entries": [[l, m, value], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffFile {
    pub lmax: usize,
    pub entries: Vec<(usize, i64, f64)>,
}

/// Normalized associated Legendre functions `P̄_l^m(cos θ)` and their first
/// two `θ`-derivatives, for `0 <= m <= l <= lmax`.
#[derive(Debug, Clone)]
pub struct Legendre {
    p: Vec<f64>,
    dp: Vec<f64>,
    d2p: Vec<f64>,
}

#[inline]
fn tri(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

impl Legendre {
    pub fn new(lmax: usize, cos_t: f64, sin_t: f64, derivatives: bool) -> Self {
        let n = tri(lmax, lmax) + 1;
        let mut p = vec![0.0; n];
        let mut pmm = 1.0 / (4.0 * PI).sqrt();
        for m in 0..=lmax {
            if m > 0 {
                let mf = m as f64;
                pmm *= ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * sin_t;
            }
            p[tri(m, m)] = pmm;
            if m < lmax {
                p[tri(m + 1, m)] = (2.0 * m as f64 + 3.0).sqrt() * cos_t * pmm;
            }
            for l in m + 2..=lmax {
                let (lf, mf) = (l as f64, m as f64);
                let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
                let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
                p[tri(l, m)] = a * (cos_t * p[tri(l - 1, m)] - b * p[tri(l - 2, m)]);
            }
        }
        let (mut dp, mut d2p) = (Vec::new(), Vec::new());
        if derivatives {
            dp = vec![0.0; n];
            d2p = vec![0.0; n];
            let cot = cos_t / sin_t;
            for l in 0..=lmax {
                for m in 0..=l {
                    let (lf, mf) = (l as f64, m as f64);
                    let lower = if l > m {
                        ((2.0 * lf + 1.0) * (lf * lf - mf * mf) / (2.0 * lf - 1.0)).sqrt()
                            * p[tri(l - 1, m)]
                    } else {
                        0.0
                    };
                    let d = (lf * cos_t * p[tri(l, m)] - lower) / sin_t;
                    dp[tri(l, m)] = d;
                    d2p[tri(l, m)] =
                        -cot * d - (lf * (lf + 1.0) - mf * mf / (sin_t * sin_t)) * p[tri(l, m)];
                }
            }
        }
        Self { p, dp, d2p }
    }

    pub fn p(&self, l: usize, m: usize) -> f64 {
        self.p[tri(l, m)]
    }

    pub fn dp(&self, l: usize, m: usize) -> f64 {
        self.dp[tri(l, m)]
    }

    pub fn d2p(&self, l: usize, m: usize) -> f64 {
        self.d2p[tri(l, m)]
    }
}

/// `(cos kφ, sin kφ)` for `k = 0..=kmax` by angle addition, so that negating
/// `(cos φ, sin φ)` flips each pair by exactly `(-1)^k`.
fn trig_table(kmax: usize, cos_p: f64, sin_p: f64) -> Vec<(f64, f64)> {
    let mut t = Vec::with_capacity(kmax + 1);
    t.push((1.0, 0.0));
    for k in 1..=kmax {
        let (c, s) = t[k - 1];
        t.push((c * cos_p - s * sin_p, s * cos_p + c * sin_p));
    }
    t
}

/// Basis rows at one point, in orthonormal-frame components:
/// `[Y, ∇_θ Y, ∇_φ Y, Hess_θθ, Hess_θφ, Hess_φφ]`.
pub type FrameRow = [f64; 6];

fn frame_rows(
    modes: &[(usize, i64)],
    lmax: usize,
    cos_t: f64,
    sin_t: f64,
    cos_p: f64,
    sin_p: f64,
) -> Vec<FrameRow> {
    let leg = Legendre::new(lmax, cos_t, sin_t, true);
    let trig = trig_table(lmax, cos_p, sin_p);
    let cot = cos_t / sin_t;
    let sqrt2 = std::f64::consts::SQRT_2;
    modes
        .iter()
        .map(|&(l, m)| {
            let k = m.unsigned_abs() as usize;
            let kf = k as f64;
            let (t, dt) = match m.signum() {
                0 => (1.0, 0.0),
                1 => (sqrt2 * trig[k].0, -sqrt2 * kf * trig[k].1),
                _ => (sqrt2 * trig[k].1, sqrt2 * kf * trig[k].0),
            };
            let d2t = -kf * kf * t;
            let (p, dp, d2p) = (leg.p(l, k), leg.dp(l, k), leg.d2p(l, k));
            let y = p * t;
            let y_t = dp * t;
            let y_p = p * dt;
            let y_tt = d2p * t;
            let y_tp = dp * dt;
            let y_pp = p * d2t;
            [
                y,
                y_t,
                y_p / sin_t,
                y_tt,
                (y_tp - cot * y_p) / sin_t,
                y_pp / (sin_t * sin_t) + cot * y_t,
            ]
        })
        .collect()
}

/// Second-order jet of `h` at one point.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct JetSample {
    pub h: f64,
    /// `∇h` in the frame `{e_θ, e_φ}`.
    pub grad: [f64; 2],
    /// Covariant Hessian `(a, b, c)` in the same frame.
    pub hess: [f64; 3],
    /// `Δh = a + c`.
    pub lap: f64,
    /// `H(h) = ac - b²`.
    pub dethess: f64,
}

impl JetSample {
    fn from_components(h: f64, gt: f64, gp: f64, a: f64, b: f64, c: f64) -> Self {
        Self {
            h,
            grad: [gt, gp],
            hess: [a, b, c],
            lap: a + c,
            dethess: a * c - b * b,
        }
    }

    pub fn grad_norm_sq(&self) -> f64 {
        self.grad[0] * self.grad[0] + self.grad[1] * self.grad[1]
    }
}

/// Per-node jets of `h` on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportJet {
    pub samples: Vec<JetSample>,
}

impl SupportJet {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn h(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.h).collect()
    }
}

/// Basis rows tabulated on a grid, reused across many syntheses with the
/// same layout.
#[derive(Debug, Clone)]
pub struct SynthesisPlan {
    lmax: usize,
    include_degree_one: bool,
    n_basis: usize,
    rows: Vec<FrameRow>,
}

impl SynthesisPlan {
    pub fn new(grid: &SphereGrid, lmax: usize, include_degree_one: bool) -> Result<Self> {
        let needed = 2 * lmax;
        if grid.band_limit() < needed {
            return Err(Error::GridTooCoarse {
                lmax,
                needed,
                band_limit: grid.band_limit(),
            });
        }
        let layout = OddHarmonicCoeffs::zeros(lmax, include_degree_one)?;
        let modes = layout.modes();
        let rows = grid
            .nodes()
            .iter()
            .flat_map(|n| frame_rows(&modes, lmax, n.cos_theta, n.sin_theta, n.cos_phi, n.sin_phi))
            .collect();
        Ok(Self {
            lmax,
            include_degree_one,
            n_basis: modes.len(),
            rows,
        })
    }

    pub fn for_coeffs(grid: &SphereGrid, coeffs: &OddHarmonicCoeffs) -> Result<Self> {
        Self::new(grid, coeffs.lmax, coeffs.include_degree_one)
    }

    pub fn lmax(&self) -> usize {
        self.lmax
    }

    fn check(&self, coeffs: &OddHarmonicCoeffs) -> Result<()> {
        if coeffs.lmax != self.lmax || coeffs.include_degree_one != self.include_degree_one {
            return Err(Error::InvalidCoefficients(format!(
                "coefficient layout (lmax = {}, degree one = {}) does not match plan (lmax = {}, degree one = {})",
                coeffs.lmax, coeffs.include_degree_one, self.lmax, self.include_degree_one
            )));
        }
        Ok(())
    }

    pub fn synth(&self, coeffs: &OddHarmonicCoeffs) -> Result<SupportJet> {
        self.check(coeffs)?;
        Ok(self.synth_values(&coeffs.values))
    }

    /// Synthesis from a raw coefficient vector in this plan's layout.
    pub fn synth_values(&self, values: &[f64]) -> SupportJet {
        assert_eq!(values.len(), self.n_basis);
        let samples = if self.n_basis == 0 {
            vec![JetSample::default(); self.rows.len()]
        } else {
            self.rows
                .chunks_exact(self.n_basis)
                .map(|rows| {
                    let mut acc = [0.0f64; 6];
                    for (r, &c) in rows.iter().zip(values) {
                        for k in 0..6 {
                            acc[k] += c * r[k];
                        }
                    }
                    JetSample::from_components(acc[0], acc[1], acc[2], acc[3], acc[4], acc[5])
                })
                .collect()
        };
        SupportJet { samples }
    }

    /// Values only (no derivatives) of `h` on the grid.
    pub fn synth_h(&self, values: &[f64]) -> Vec<f64> {
        if self.n_basis == 0 {
            return vec![0.0; self.rows.len()];
        }
        self.rows
            .chunks_exact(self.n_basis)
            .map(|rows| rows.iter().zip(values).map(|(r, c)| c * r[0]).sum())
            .collect()
    }
}

/// Synthesizes the jet of `h` at every grid node.
pub fn synth_jet(coeffs: &OddHarmonicCoeffs, grid: &SphereGrid) -> Result<SupportJet> {
    SynthesisPlan::for_coeffs(grid, coeffs)?.synth(coeffs)
}

/// Jet at an arbitrary `(θ, φ)` with `sin θ > 0`, in the local frame.
///
/// Accuracy degrades as `θ` approaches a pole; use [`PointEvaluator`] for
/// directions that may lie near one.
pub fn eval_jet_at(coeffs: &OddHarmonicCoeffs, theta: f64, phi: f64) -> JetSample {
    let modes = coeffs.modes();
    if modes.is_empty() {
        return JetSample::default();
    }
    let rows = frame_rows(
        &modes,
        coeffs.lmax,
        theta.cos(),
        theta.sin(),
        phi.cos(),
        phi.sin(),
    );
    let mut acc = [0.0f64; 6];
    for (r, &c) in rows.iter().zip(&coeffs.values) {
        for k in 0..6 {
            acc[k] += c * r[k];
        }
    }
    JetSample::from_components(acc[0], acc[1], acc[2], acc[3], acc[4], acc[5])
}

/// `h(u)` at a unit vector; needs no derivatives, so it is accurate at the poles.
pub fn eval_value(coeffs: &OddHarmonicCoeffs, u: Vec3) -> f64 {
    let modes = coeffs.modes();
    if modes.is_empty() {
        return 0.0;
    }
    let (ct, st, cp, sp) = linalg::spherical_trig(u);
    let leg = Legendre::new(coeffs.lmax, ct, st, false);
    let trig = trig_table(coeffs.lmax, cp, sp);
    let sqrt2 = std::f64::consts::SQRT_2;
    modes
        .iter()
        .zip(&coeffs.values)
        .map(|(&(l, m), &c)| {
            let k = m.unsigned_abs() as usize;
            let t = match m.signum() {
                0 => 1.0,
                1 => sqrt2 * trig[k].0,
                _ => sqrt2 * trig[k].1,
            };
            c * leg.p(l, k) * t
        })
        .sum()
}

/// Coefficients of the rotated field `h'(q) = h(Rᵀ q)`.
///
/// Rotations preserve each degree, so projecting samples on a grid exact to
/// `2 lmax` recovers the rotated coefficients to rounding.
pub fn rotate_coeffs(coeffs: &OddHarmonicCoeffs, rot: &Mat3) -> OddHarmonicCoeffs {
    let l = coeffs.lmax;
    let grid = SphereGrid::new(l + 1, 2 * l + 2).expect("valid grid");
    let rt = linalg::transpose(rot);
    let field: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|n| eval_value(coeffs, linalg::mat_vec(&rt, n.u)))
        .collect();
    project_odd_part(&field, &grid, l, coeffs.include_degree_one)
}

fn frame_vectors(theta: f64, phi: f64) -> (Vec3, Vec3, Vec3) {
    let (st, ct, sp, cp) = (theta.sin(), theta.cos(), phi.sin(), phi.cos());
    (
        [st * cp, st * sp, ct],
        [ct * cp, ct * sp, -st],
        [-sp, cp, 0.0],
    )
}

/// Scalar jet invariants plus the ambient gradient at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointJet {
    pub u: Vec3,
    pub h: f64,
    pub lap: f64,
    pub dethess: f64,
    /// `∇h` as an ambient vector tangent to the sphere at `u`.
    pub grad: Vec3,
}

impl PointJet {
    pub fn alpha(&self) -> f64 {
        2.0 * self.h + self.lap
    }

    pub fn beta(&self) -> f64 {
        self.h * self.h + self.h * self.lap + self.dethess
    }
}

/// Evaluates jets at arbitrary directions, including the poles.
///
/// Near a pole the field is evaluated through a copy of the coefficients
/// rotated by 90° about the y-axis, which moves both poles to the equator.
#[derive(Debug, Clone)]
pub struct PointEvaluator {
    coeffs: OddHarmonicCoeffs,
    rotated: OnceLock<OddHarmonicCoeffs>,
}

/// Rotation by +90° about the y-axis: `ẑ -> x̂`.
const POLE_CHART: Mat3 = [[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 0.0]];

impl PointEvaluator {
    pub fn new(coeffs: &OddHarmonicCoeffs) -> Self {
        Self {
            coeffs: coeffs.clone(),
            rotated: OnceLock::new(),
        }
    }

    pub fn coeffs(&self) -> &OddHarmonicCoeffs {
        &self.coeffs
    }

    pub fn eval(&self, u: Vec3) -> PointJet {
        let u = linalg::normalize(u);
        if u[2].abs() <= POLE_GUARD {
            let theta = u[2].clamp(-1.0, 1.0).acos();
            let phi = u[1].atan2(u[0]);
            Self::eval_chart(&self.coeffs, theta, phi, u)
        } else {
            // h'(q) = h(Rᵀq)  =>  ∇h(u) = Rᵀ ∇h'(Ru)
            let q = linalg::mat_vec(&POLE_CHART, u);
            let theta = q[2].clamp(-1.0, 1.0).acos();
            let phi = q[1].atan2(q[0]);
            let rotated = self
                .rotated
                .get_or_init(|| rotate_coeffs(&self.coeffs, &POLE_CHART));
            let pj = Self::eval_chart(rotated, theta, phi, q);
            PointJet {
                u,
                grad: linalg::mat_vec(&linalg::transpose(&POLE_CHART), pj.grad),
                ..pj
            }
        }
    }

    pub fn eval_angles(&self, theta: f64, phi: f64) -> PointJet {
        self.eval(frame_vectors(theta, phi).0)
    }

    fn eval_chart(coeffs: &OddHarmonicCoeffs, theta: f64, phi: f64, u: Vec3) -> PointJet {
        let j = eval_jet_at(coeffs, theta, phi);
        let (_, et, ep) = frame_vectors(theta, phi);
        PointJet {
            u,
            h: j.h,
            lap: j.lap,
            dethess: j.dethess,
            grad: linalg::add(linalg::scale(et, j.grad[0]), linalg::scale(ep, j.grad[1])),
        }
    }
}

/// Projects an antipodally odd field onto odd-degree harmonics up to `lmax`.
///
/// The field's even part `(f(u) + f(-u)) / 2` is measured first; if its L²
/// norm exceeds `1e-8 · max(1, ‖f‖)` the field is rejected, otherwise it is
/// discarded and only the odd part is projected. Odd-degree coefficients
/// `c_{l,m} = ∫ f Y_{l,m} dA` are then exact for band-limited fields when the
/// grid is exact to degree `2 lmax`.
pub fn project(
    field: &[f64],
    grid: &SphereGrid,
    lmax: usize,
    include_degree_one: bool,
) -> Result<OddHarmonicCoeffs> {
    if field.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            got: field.len(),
        });
    }
    if lmax.is_multiple_of(2) {
        return Err(Error::InvalidCoefficients(format!(
            "lmax must be odd, got {lmax}"
        )));
    }
    if grid.band_limit() < 2 * lmax {
        return Err(Error::GridTooCoarse {
            lmax,
            needed: 2 * lmax,
            band_limit: grid.band_limit(),
        });
    }
    let anti = grid.antipode_index();
    let even: Vec<f64> = (0..field.len())
        .map(|i| 0.5 * (field[i] + field[anti[i]]))
        .collect();
    let even_norm = grid
        .integrate_unchecked(&even.iter().map(|e| e * e).collect::<Vec<_>>())
        .sqrt();
    let total_norm = grid
        .integrate_unchecked(&field.iter().map(|f| f * f).collect::<Vec<_>>())
        .sqrt();
    let tolerance = 1e-8 * total_norm.max(1.0);
    if even_norm > tolerance {
        return Err(Error::ParityViolation {
            even_norm,
            tolerance,
        });
    }
    Ok(project_odd_part(field, grid, lmax, include_degree_one))
}

fn project_odd_part(
    field: &[f64],
    grid: &SphereGrid,
    lmax: usize,
    include_degree_one: bool,
) -> OddHarmonicCoeffs {
    let anti = grid.antipode_index();
    let odd: Vec<f64> = (0..field.len())
        .map(|i| 0.5 * (field[i] - field[anti[i]]))
        .collect();
    let mut out = OddHarmonicCoeffs::zeros(lmax, include_degree_one).expect("odd lmax");
    let modes = out.modes();
    let sqrt2 = std::f64::consts::SQRT_2;
    let mut acc = vec![0.0; modes.len()];
    // one Legendre table per ring
    for ring in 0..grid.n_theta() {
        let n0 = grid.node(ring * grid.n_phi());
        let leg = Legendre::new(lmax, n0.cos_theta, n0.sin_theta, false);
        for j in 0..grid.n_phi() {
            let idx = ring * grid.n_phi() + j;
            let n = grid.node(idx);
            let wf = grid.weights()[idx] * odd[idx];
            if wf == 0.0 {
                continue;
            }
            let trig = trig_table(lmax, n.cos_phi, n.sin_phi);
            for (slot, &(l, m)) in modes.iter().enumerate() {
                let k = m.unsigned_abs() as usize;
                let t = match m.signum() {
                    0 => 1.0,
                    1 => sqrt2 * trig[k].0,
                    _ => sqrt2 * trig[k].1,
                };
                acc[slot] += wf * leg.p(l, k) * t;
            }
        }
    }
    out.values = acc;
    out
}

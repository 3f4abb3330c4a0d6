//! Constant-width bodies in ℝ³ described by support functions `s = h + w`
//! with `h` odd on the unit sphere.
//!
//! The crate evaluates the boundary geometry of such bodies, their volume and
//! area functionals, and the width floor `w₀(h)` below which the parallel body
//! stops being convex. It searches for local minimizers of the volume ratio
//! and checks the necessary conditions they must satisfy.

pub mod bodies;
pub mod error;
pub mod floor;
pub mod functionals;
pub mod geometry;
pub mod grid;
pub mod harmonics;
pub mod linalg;
pub mod mesh;
pub mod nelder_mead;
pub mod optimizer;
pub mod report;
pub mod verify;

pub use error::{Error, Result};
pub use floor::{w_floor, WidthFloorResult};
pub use functionals::{evaluate, FunctionalReport};
pub use geometry::BodyGeometry;
pub use grid::SphereGrid;
pub use harmonics::{synth_jet, OddHarmonicCoeffs, SupportJet};

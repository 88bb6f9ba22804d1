//! Solver toolkit for systems of homogeneous polynomial equations.
//!
//! The crate tracks zeros of square homogeneous systems along great circles
//! of the unit sphere of system space (under the Weyl inner product), using
//! projective Newton corrections. On top of the tracker sit a randomized
//! solver (random start pair), a deterministic solver (fixed start systems
//! chosen by a degree/dimension case split), an all-roots solver, and a
//! seeded Monte Carlo laboratory that checks the exact condition-number
//! identities the step-count analysis rests on.

pub mod algebra;
pub mod conditioning;
pub mod experiments;
pub mod geometry;
pub mod homotopy;
pub mod linalg;
pub mod newton;
pub mod rng;
pub mod sampling;
pub mod solvers;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

pub use algebra::{DegreeProfile, HomogeneousPoly, MultiIndex, PolySystem, ProjPoint};
pub use homotopy::{StepStrategy, TrackResult, TrackStatus, TrackerConfig};
pub use rng::{CounterRng, SeedSpec};

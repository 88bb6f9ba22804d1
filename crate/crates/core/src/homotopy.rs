//! Adaptive path tracking along great circles.
//!
//! Two step-size strategies are provided. `MuSquared` takes arc steps
//! `c / (D^{3/2} mu^2)` at the current approximate pair. `ConditionLength`
//! takes `c / (D^{3/2} mu sqrt(1 + |zeta_dot|^2))`, which makes every step
//! consume roughly `c / D^{3/2}` of the condition length of the lifted
//! path, so the step count is proportional to that length rather than to
//! the integral of `mu^2`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{DegreeProfile, PolySystem, ProjPoint};
use crate::conditioning::PairAnalysis;
use crate::geometry::{great_circle, projective_distance, GeometryError, GreatCirclePath};
use crate::newton::{is_approximate_zero, newton_step};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepStrategy {
    /// Step proportional to `mu^{-2}`.
    MuSquared,
    /// Step proportional to the inverse condition-length integrand.
    ConditionLength,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrackerConfig {
    pub strategy: StepStrategy,
    /// Arc-length budget constant `c`.
    pub step_constant: f64,
    pub max_steps: u64,
    /// Abort when `mu` at the tracked pair exceeds this cap.
    pub mu_cap: f64,
    /// Newton corrections applied after each step.
    pub corrections: u32,
    /// Certify the endpoint as an approximate zero on success.
    pub certify_end: bool,
    /// Record one trace row per step.
    pub record_trace: bool,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        TrackerConfig {
            strategy: StepStrategy::ConditionLength,
            step_constant: 0.04,
            max_steps: 1_000_000,
            mu_cap: 1e12,
            corrections: 1,
            certify_end: true,
            record_trace: false,
        }
    }
}

impl TrackerConfig {
    pub fn with_strategy(strategy: StepStrategy) -> Self {
        TrackerConfig {
            strategy,
            ..Default::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrackStatus {
    Success,
    Singular,
    StepLimit,
    ConditionCap,
    DegeneratePath,
}

/// One row of the per-run diagnostic trace: state at the left node of a
/// step, the step taken from it, and the residual after correction.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraceRow {
    pub s: f64,
    pub t: f64,
    pub mu: f64,
    pub mu_frobenius: f64,
    pub delta_s: f64,
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct TrackResult {
    pub status: TrackStatus,
    pub final_point: ProjPoint,
    /// Number of homotopy steps taken.
    pub steps: u64,
    /// Accumulated `mu |(hdot, zeta_dot)| delta_s` over the steps, evaluated
    /// at the Newton-refined left node of each step, so that under
    /// `ConditionLength` each full step contributes exactly
    /// `c / D^{3/2}` and `steps <= D^{3/2} / c * condition_length + 1`.
    pub condition_length: f64,
    pub mu_peak: f64,
    pub certified: bool,
    /// Largest projective distance between consecutive tracked points.
    pub max_jump: f64,
    pub trace: Vec<TraceRow>,
}

#[derive(Debug, Error, PartialEq)]
pub enum TrackError {
    #[error("start point is not a certified approximate zero of the start system")]
    NotAnApproximateZero,
}

/// Stepper state shared by the public entry points; `advance_to` walks the
/// current point to an arbitrary arc position.
pub struct Tracker<'a> {
    path: &'a GreatCirclePath,
    cfg: &'a TrackerConfig,
    step_scale: f64, // D^{3/2} / c
    pub s: f64,
    pub x: ProjPoint,
    pub steps: u64,
    pub condition_length: f64,
    pub mu_peak: f64,
    pub max_jump: f64,
    pub trace: Vec<TraceRow>,
}

impl<'a> Tracker<'a> {
    /// `x0` must already be an (approximately) exact zero of
    /// `path.point_at(0)`; the public `track` entry certifies it first.
    pub fn new(path: &'a GreatCirclePath, cfg: &'a TrackerConfig, x0: ProjPoint) -> Self {
        let d = path.start().profile().max_degree() as f64;
        Tracker {
            path,
            cfg,
            step_scale: d.powf(1.5) / cfg.step_constant,
            s: 0.0,
            x: x0,
            steps: 0,
            condition_length: 0.0,
            mu_peak: 0.0,
            max_jump: 0.0,
            trace: Vec::new(),
        }
    }

    /// Advance the tracked zero to arc position `target`, taking adaptive
    /// steps and one or more Newton corrections per step.
    pub fn advance_to(&mut self, target: f64) -> Result<(), TrackStatus> {
        while self.s < target - 1e-15 {
            let here = self.path.point_at(self.s);
            let analysis = PairAnalysis::new(&here, &self.x);
            if analysis.is_singular() {
                return Err(TrackStatus::Singular);
            }
            let mu = analysis.estimate.mu;
            self.mu_peak = self.mu_peak.max(mu);
            if mu >= self.cfg.mu_cap {
                return Err(TrackStatus::ConditionCap);
            }
            // Condition-length integrand at the refined left node.
            let velocity = self.path.velocity_at(self.s);
            let zdot = analysis
                .zeta_dot(&velocity)
                .map_err(|_| TrackStatus::Singular)?;
            let speed_sq = 1.0 + zdot.iter().map(|c| c.norm_sqr()).sum::<f64>();
            let integrand = mu * speed_sq.sqrt();
            let mut delta_s = match self.cfg.strategy {
                StepStrategy::MuSquared => 1.0 / (self.step_scale * mu * mu),
                StepStrategy::ConditionLength => 1.0 / (self.step_scale * integrand),
            };
            if self.s + delta_s >= target {
                delta_s = target - self.s;
            }
            if self.steps >= self.cfg.max_steps {
                return Err(TrackStatus::StepLimit);
            }
            let s_next = self.s + delta_s;
            let next_system = self.path.point_at(s_next);
            let mut x_next = self.x.clone();
            for _ in 0..self.cfg.corrections.max(1) {
                x_next = newton_step(&next_system, &x_next).map_err(|_| TrackStatus::Singular)?;
            }
            self.max_jump = self.max_jump.max(projective_distance(&self.x, &x_next));
            self.condition_length += integrand * delta_s;
            self.steps += 1;
            if self.cfg.record_trace {
                self.trace.push(TraceRow {
                    s: self.s,
                    t: unit_segment_parameter(self.path.angle(), self.s),
                    mu,
                    mu_frobenius: analysis.estimate.mu_frobenius,
                    delta_s,
                    residual: next_system.eval_norm(x_next.rep()),
                });
            }
            self.s = s_next;
            self.x = x_next;
        }
        Ok(())
    }

    fn into_result(self, status: TrackStatus, certified: bool) -> TrackResult {
        TrackResult {
            status,
            final_point: self.x,
            steps: self.steps,
            condition_length: self.condition_length,
            mu_peak: self.mu_peak,
            certified,
            max_jump: self.max_jump,
            trace: self.trace,
        }
    }
}

/// Chord parameter of the arc position `s` for a unit-norm target.
fn unit_segment_parameter(angle: f64, s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    s.sin() / (s.sin() + (angle - s).sin())
}

/// Track an approximate zero of `path.point_at(0)` to the far end of the
/// path. The start point must pass the approximate-zero certificate.
pub fn track(
    path: &GreatCirclePath,
    x0: &ProjPoint,
    cfg: &TrackerConfig,
) -> Result<TrackResult, TrackError> {
    let (ok, polished) = is_approximate_zero(path.start(), x0);
    if !ok {
        return Err(TrackError::NotAnApproximateZero);
    }
    let mut tracker = Tracker::new(path, cfg, polished);
    match tracker.advance_to(path.angle()) {
        Ok(()) => {
            if cfg.certify_end {
                let target = path.point_at(path.angle());
                let (certified, zero) = is_approximate_zero(&target, &tracker.x);
                tracker.x = zero;
                if certified {
                    Ok(tracker.into_result(TrackStatus::Success, true))
                } else {
                    // The tracked point reached the end but is not in the
                    // quadratic-convergence basin: the pair is effectively
                    // ill-posed at this precision.
                    Ok(tracker.into_result(TrackStatus::Singular, false))
                }
            } else {
                Ok(tracker.into_result(TrackStatus::Success, false))
            }
        }
        Err(status) => Ok(tracker.into_result(status, false)),
    }
}

/// Build the great circle from `g` to `f / |f|` and track. A degenerate
/// pair of endpoints is reported as a `DegeneratePath` status with the
/// start point unchanged.
pub fn track_between(
    g: &PolySystem,
    f: &PolySystem,
    x0: &ProjPoint,
    cfg: &TrackerConfig,
) -> Result<TrackResult, TrackError> {
    let target = match f.normalized() {
        Ok(t) => t,
        Err(_) => return Ok(degenerate_result(x0)),
    };
    match great_circle(g, &target) {
        Ok(path) => track(&path, x0, cfg),
        Err(GeometryError::DegeneratePath) => Ok(degenerate_result(x0)),
        Err(_) => unreachable!("great_circle only fails with DegeneratePath"),
    }
}

/// Track the spherical arc toward a target of arbitrary norm, reporting the
/// chord parameter `t` of the unnormalized segment `(1-t) g + t f` in the
/// trace alongside the arc length.
pub fn track_segment(
    g: &PolySystem,
    f: &PolySystem,
    x0: &ProjPoint,
    cfg: &TrackerConfig,
) -> Result<TrackResult, TrackError> {
    let mut result = track_between(g, f, x0, cfg)?;
    for row in &mut result.trace {
        if let Ok(t) = crate::geometry::segment_to_arc(g, f, row.s) {
            row.t = t;
        }
    }
    Ok(result)
}

fn degenerate_result(x0: &ProjPoint) -> TrackResult {
    TrackResult {
        status: TrackStatus::DegeneratePath,
        final_point: x0.clone(),
        steps: 0,
        condition_length: 0.0,
        mu_peak: 0.0,
        certified: false,
        max_jump: 0.0,
        trace: Vec::new(),
    }
}

/// A priori bound on the expected step count of the randomized solver under
/// the condition-length strategy: `400 D^{3/2} n sqrt(N)`.
pub fn step_count_bound(profile: &DegreeProfile) -> f64 {
    let d = profile.max_degree() as f64;
    400.0 * d.powf(1.5) * profile.n() as f64 * (profile.size() as f64).sqrt()
}

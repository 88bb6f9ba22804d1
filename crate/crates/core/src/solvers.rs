//! End-to-end solvers: the randomized solver (random start pair), the
//! deterministic solver (fixed start system chosen by comparing the largest
//! degree with the number of equations), and the all-roots solver that
//! tracks every path from the roots-of-unity start system.

use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::{DegreeProfile, HomogeneousPoly, PolySystem, ProjPoint};
use crate::homotopy::{track_between, TrackResult, TrackStatus, TrackerConfig};
use crate::newton::is_approximate_zero;
use crate::rng::SeedSpec;
use crate::sampling::{bp_initial_pair, SamplingError};
use crate::C64;

#[derive(Debug, Error, PartialEq)]
pub enum SolveError {
    #[error("input system is zero")]
    ZeroSystem,
    #[error("path stayed degenerate after retries")]
    DegenerateAfterRetries,
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Track(#[from] crate::homotopy::TrackError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Algorithm {
    Randomized,
    Deterministic,
}

/// Outcome of one solve: the start pair used, the tracker result, and
/// bookkeeping for reproduction.
#[derive(Clone, Debug)]
pub struct SolveReport {
    /// FNV-1a hash of the input coefficients, for report correlation.
    pub input_hash: String,
    pub algorithm: Algorithm,
    pub start_system: PolySystem,
    pub start_zero: ProjPoint,
    pub result: TrackResult,
    pub wall_ms: f64,
    /// Seed of the start pair (randomized algorithm only).
    pub seed: Option<SeedSpec>,
}

impl SolveReport {
    pub fn succeeded(&self) -> bool {
        self.result.status == TrackStatus::Success
    }
}

/// Canonical 64-bit hash of a system's shape and coefficients.
pub fn system_hash(f: &PolySystem) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01B3);
        }
    };
    eat(&(f.n() as u64).to_le_bytes());
    for &d in f.profile().degrees() {
        eat(&u64::from(d).to_le_bytes());
    }
    for poly in f.components() {
        for c in poly.coeffs() {
            eat(&c.re.to_bits().to_le_bytes());
            eat(&c.im.to_bits().to_le_bytes());
        }
    }
    format!("{h:016x}")
}

/// Start system with the single well-posed zero `e_0`: component `i` is
/// `(sum_j 1/d_j)^{-1/2} X0^{d_i - 1} X_i`, which has unit norm overall.
pub fn gbar(profile: &DegreeProfile) -> (PolySystem, ProjPoint) {
    let n = profile.n();
    let scale: f64 = profile
        .degrees()
        .iter()
        .map(|&d| 1.0 / f64::from(d))
        .sum::<f64>()
        .powf(-0.5);
    let components = profile
        .degrees()
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            let mut alpha = vec![0u32; n + 1];
            alpha[0] = d - 1;
            alpha[i + 1] += 1;
            HomogeneousPoly::monomial(n, d, &alpha, C64::new(scale, 0.0)).expect("valid exponent")
        })
        .collect();
    let system = PolySystem::new(components).expect("square by construction");
    (system, ProjPoint::standard(n + 1, 0))
}

/// Roots-of-unity start system: component `i` is
/// `(X0^{d_i} - X_i^{d_i}) / sqrt(2n)`, of unit norm, whose zeros are the
/// product of roots of unity below.
pub fn ubar(profile: &DegreeProfile) -> PolySystem {
    let n = profile.n();
    let scale = 1.0 / (2.0 * n as f64).sqrt();
    let components = profile
        .degrees()
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            let mut alpha0 = vec![0u32; n + 1];
            alpha0[0] = d;
            let mut poly = HomogeneousPoly::monomial(n, d, &alpha0, C64::new(scale, 0.0)).unwrap();
            let mut alpha_i = vec![0u32; n + 1];
            alpha_i[i + 1] = d;
            let idx = poly.basis().index_of(&alpha_i).expect("pure power in basis");
            poly.coeffs_mut()[idx] = C64::new(-scale, 0.0);
            poly
        })
        .collect();
    PolySystem::new(components).expect("square by construction")
}

/// All zeros of `ubar`: `(1, w_1, ..., w_n) / sqrt(n+1)` over every choice
/// of `d_i`-th roots of unity `w_i`, enumerated lexicographically in the
/// root indices. The first entry is the all-ones point.
pub fn ubar_zeros(profile: &DegreeProfile) -> Vec<ProjPoint> {
    let n = profile.n();
    let total = profile.bezout();
    let mut zeros = Vec::with_capacity(total as usize);
    let mut indices = vec![0u32; n];
    loop {
        let mut rep = Vec::with_capacity(n + 1);
        rep.push(C64::new(1.0, 0.0));
        for (i, &k) in indices.iter().enumerate() {
            let d = f64::from(profile.degrees()[i]);
            let theta = 2.0 * std::f64::consts::PI * f64::from(k) / d;
            rep.push(C64::new(theta.cos(), theta.sin()));
        }
        zeros.push(ProjPoint::new(rep).expect("nonzero representative"));
        // Odometer increment over the root indices.
        let mut pos = n;
        loop {
            if pos == 0 {
                return zeros;
            }
            pos -= 1;
            indices[pos] += 1;
            if indices[pos] < profile.degrees()[pos] {
                break;
            }
            indices[pos] = 0;
        }
    }
}

/// Randomized solver: draw a random start pair, connect it to the target by
/// a great circle, track, certify. Redraws the pair (next stream) up to
/// three times if the path is degenerate.
pub fn solve_randomized(
    f: &PolySystem,
    cfg: &TrackerConfig,
    seed: SeedSpec,
) -> Result<SolveReport, SolveError> {
    let started = Instant::now();
    let target = f.normalized().map_err(|_| SolveError::ZeroSystem)?;
    let mut spec = seed;
    for _ in 0..=3 {
        let pair = bp_initial_pair(f.profile(), spec)?;
        let start = pair
            .system
            .normalized()
            .expect("random start system is nonzero");
        let result = track_between(&start, &target, &pair.zero, cfg)?;
        if result.status == TrackStatus::DegeneratePath {
            spec = spec.next_stream();
            continue;
        }
        return Ok(SolveReport {
            input_hash: system_hash(f),
            algorithm: Algorithm::Randomized,
            start_system: start,
            start_zero: pair.zero,
            result,
            wall_ms: started.elapsed().as_secs_f64() * 1e3,
            seed: Some(spec),
        });
    }
    Err(SolveError::DegenerateAfterRetries)
}

/// Deterministic solver. Case split on the largest degree `D` versus the
/// number of equations `n`: `D > n` starts from the `gbar` pair at `e_0`,
/// `D <= n` from the roots-of-unity system at the all-ones zero. If the
/// target coincides with the start (degenerate path) the start zero is
/// certified directly against the target.
pub fn solve_deterministic(f: &PolySystem, cfg: &TrackerConfig) -> Result<SolveReport, SolveError> {
    let started = Instant::now();
    let target = f.normalized().map_err(|_| SolveError::ZeroSystem)?;
    let profile = f.profile();
    let (start, zero) = if u64::from(profile.max_degree()) > profile.n() as u64 {
        gbar(profile)
    } else {
        let system = ubar(profile);
        let zero = ubar_zeros(profile)
            .into_iter()
            .next()
            .expect("at least one zero");
        (system, zero)
    };
    let mut result = track_between(&start, &target, &zero, cfg)?;
    if result.status == TrackStatus::DegeneratePath {
        // Target is (anti)parallel to the start system, so they share their
        // zero set; certify the start zero on the target directly.
        let (ok, polished) = is_approximate_zero(&target, &zero);
        if ok {
            result.status = TrackStatus::Success;
            result.certified = true;
            result.final_point = polished;
        }
    }
    Ok(SolveReport {
        input_hash: system_hash(f),
        algorithm: Algorithm::Deterministic,
        start_system: start,
        start_zero: zero,
        result,
        wall_ms: started.elapsed().as_secs_f64() * 1e3,
        seed: None,
    })
}

/// Projective distance below which two tracked endpoints are considered the
/// same zero.
pub const DEDUP_DISTANCE: f64 = 1e-6;

/// All-roots result: certified distinct zeros plus per-path failure records.
#[derive(Clone, Debug)]
pub struct ZeroSet {
    pub zeros: Vec<ProjPoint>,
    /// Path index and status for every path that did not produce a
    /// certified endpoint.
    pub failures: Vec<(usize, TrackStatus)>,
    /// Pairs of path endpoints that collided within `DEDUP_DISTANCE`
    /// (suspected multiple zeros); the duplicate endpoints are merged.
    pub collisions: usize,
    /// True when every path succeeded and the zeros are pairwise distinct.
    pub complete: bool,
}

/// Track every path from the roots-of-unity start system to `f / |f|`,
/// deduplicate the endpoints, and sort them canonically (lexicographic on
/// the phase-normalized representatives).
pub fn all_zeros(f: &PolySystem, cfg: &TrackerConfig) -> Result<ZeroSet, SolveError> {
    let target = f.normalized().map_err(|_| SolveError::ZeroSystem)?;
    let profile = f.profile();
    let start = ubar(profile);
    let starts = ubar_zeros(profile);
    let expected = starts.len();

    let outcomes: Vec<(usize, Result<ProjPoint, TrackStatus>)> = starts
        .into_par_iter()
        .enumerate()
        .map(|(idx, zero)| {
            let outcome = match track_between(&start, &target, &zero, cfg) {
                Ok(result) if result.status == TrackStatus::Success => Ok(result.final_point),
                Ok(result) if result.status == TrackStatus::DegeneratePath => {
                    // Parallel start and target share zeros.
                    let (ok, polished) = is_approximate_zero(&target, &zero);
                    if ok {
                        Ok(polished)
                    } else {
                        Err(TrackStatus::DegeneratePath)
                    }
                }
                Ok(result) => Err(result.status),
                Err(_) => Err(TrackStatus::Singular),
            };
            (idx, outcome)
        })
        .collect();

    let mut endpoints = Vec::with_capacity(expected);
    let mut failures = Vec::new();
    for (idx, outcome) in outcomes {
        match outcome {
            Ok(point) => endpoints.push(point),
            Err(status) => failures.push((idx, status)),
        }
    }

    // Merge endpoints closer than the dedup threshold.
    let mut distinct: Vec<ProjPoint> = Vec::with_capacity(endpoints.len());
    let mut collisions = 0;
    for point in endpoints {
        if distinct
            .iter()
            .any(|z| crate::geometry::projective_distance(z, &point) < DEDUP_DISTANCE)
        {
            collisions += 1;
        } else {
            distinct.push(point);
        }
    }
    distinct.sort_by(|a, b| {
        for (x, y) in a.rep().iter().zip(b.rep()) {
            match x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)) {
                std::cmp::Ordering::Equal => continue,
                other => return other,
            }
        }
        std::cmp::Ordering::Equal
    });

    let complete = failures.is_empty() && collisions == 0 && distinct.len() == expected;
    Ok(ZeroSet {
        zeros: distinct,
        failures,
        collisions,
        complete,
    })
}

//! Projective Newton operator, iterative refinement, and the
//! approximate-zero certificate.

use nalgebra::DVector;
use thiserror::Error;

use crate::algebra::{PolySystem, ProjPoint};
use crate::geometry::{projective_distance, restricted_jacobian};
use crate::linalg::is_numerically_singular;
use crate::C64;

#[derive(Debug, Error, PartialEq)]
pub enum NewtonError {
    #[error("restricted Jacobian is numerically singular at the iterate")]
    SingularJacobian,
}

/// Number of refinement steps behind the approximate-zero certificate.
pub const CERTIFICATE_STEPS: usize = 4;

/// Relative residual accepted at the certified zero estimate.
pub const CERTIFICATE_RESIDUAL: f64 = 1e-10;

/// Distances at or below this are treated as converged when checking the
/// halving pattern; successive iterates this close are at the fixed point
/// up to double-precision noise.
const CONTRACTION_FLOOR: f64 = 1e-13;

/// One projective Newton step: solve `(Dh(y)|_perp) w = h(y)` in the
/// tangent frame and renormalize `y - w`.
pub fn newton_step(h: &PolySystem, y: &ProjPoint) -> Result<ProjPoint, NewtonError> {
    let rj = restricted_jacobian(h, y);
    if is_numerically_singular(&rj.matrix) {
        return Err(NewtonError::SingularJacobian);
    }
    let values = h.eval(y.rep());
    let rhs = DVector::from_column_slice(&values);
    let coords = rj
        .matrix
        .lu()
        .solve(&rhs)
        .ok_or(NewtonError::SingularJacobian)?;
    let w = rj.frame.to_ambient(&coords);
    let next: Vec<C64> = y.rep().iter().zip(&w).map(|(&yi, &wi)| yi - wi).collect();
    ProjPoint::new(next).map_err(|_| NewtonError::SingularJacobian)
}

/// Outcome of `k` refinement steps. `distances[i]` is the projective
/// distance between iterates `i` and `i + 1`; `certified` is set when the
/// run exhibits the quadratic-halving contraction pattern of an approximate
/// zero and ends at a small relative residual.
#[derive(Clone, Debug)]
pub struct NewtonReport {
    pub iterates: Vec<ProjPoint>,
    pub distances: Vec<f64>,
    pub certified: bool,
    pub hit_singular: bool,
}

impl NewtonReport {
    pub fn final_point(&self) -> &ProjPoint {
        self.iterates.last().expect("at least the start point")
    }
}

/// Apply `newton_step` up to `k` times, recording the projective distances
/// between consecutive iterates. Stops early (uncertified) if a singular
/// Jacobian is hit.
pub fn refine(h: &PolySystem, y: &ProjPoint, k: usize) -> NewtonReport {
    let mut iterates = vec![y.clone()];
    let mut distances = Vec::with_capacity(k);
    let mut hit_singular = false;
    for _ in 0..k {
        match newton_step(h, iterates.last().expect("nonempty")) {
            Ok(next) => {
                distances.push(projective_distance(iterates.last().expect("nonempty"), &next));
                iterates.push(next);
            }
            Err(NewtonError::SingularJacobian) => {
                hit_singular = true;
                break;
            }
        }
    }
    let certified = !hit_singular && k >= CERTIFICATE_STEPS && {
        let pattern = contraction_pattern_holds(&distances);
        let residual = h.eval_norm(iterates.last().expect("nonempty").rep());
        pattern && residual <= CERTIFICATE_RESIDUAL * h.weyl_norm()
    };
    NewtonReport {
        iterates,
        distances,
        certified,
        hit_singular,
    }
}

/// Quadratic-halving pattern: `d_k <= (1/2)^{2^{k-1} - 1} d_1` for each
/// recorded step, with an absolute floor for distances at noise level.
fn contraction_pattern_holds(distances: &[f64]) -> bool {
    if distances.is_empty() {
        return false;
    }
    let d1 = distances[0];
    distances.iter().enumerate().all(|(i, &d)| {
        let factor = 0.5f64.powi((1i32 << i) - 1);
        d <= (factor * d1).max(CONTRACTION_FLOOR)
    })
}

/// Approximate-zero certificate: four Newton steps must contract
/// quadratically (each distance at most `(1/2)^{2^{k-1}-1}` times the first)
/// and end at relative residual `1e-10`. Returns the verdict together with
/// the final iterate, which on success is the associated zero estimate.
pub fn is_approximate_zero(h: &PolySystem, x: &ProjPoint) -> (bool, ProjPoint) {
    let report = refine(h, x, CERTIFICATE_STEPS);
    let point = report.final_point().clone();
    (report.certified, point)
}

//! Condition numbers of a (system, point) pair, the implicit derivative of
//! the tracked zero, and the condition-length integrand driving the adaptive
//! step size.
//!
//! For unit `zeta` the condition number is
//! `mu(f, zeta) = |f| * |M^{-1} diag(sqrt(d_i))|` with `M` the Jacobian
//! restricted to `zeta`-perp, using the spectral norm; `mu_F` uses the
//! Frobenius norm instead. Both are infinite when `M` is numerically
//! singular (smallest singular value at most `1e-14` times the largest).

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::algebra::{vec_norm, PolySystem, ProjPoint};
use crate::geometry::{restricted_jacobian, TangentFrame};
use crate::linalg::{frobenius_norm, is_numerically_singular, singular_values, spectral_norm, SINGULARITY_RATIO};
use crate::C64;

#[derive(Debug, Error, PartialEq)]
pub enum ConditioningError {
    #[error("restricted Jacobian is numerically singular")]
    SingularPair,
    #[error("zero list is empty")]
    EmptyZeroList,
}

/// Condition numbers of one pair. `mu = mu_frobenius = +inf` and
/// `singular = true` for ill-posed pairs.
#[derive(Clone, Copy, Debug)]
pub struct ConditionEstimate {
    pub mu: f64,
    pub mu_frobenius: f64,
    pub singular: bool,
}

/// Shared analysis of one pair: the condition estimate plus the factored
/// restricted Jacobian, so that callers needing both `mu` and `zeta_dot`
/// at the same pair factor the matrix once.
pub struct PairAnalysis {
    pub estimate: ConditionEstimate,
    frame: TangentFrame,
    lu: Option<nalgebra::LU<C64, nalgebra::Dyn, nalgebra::Dyn>>,
}

impl PairAnalysis {
    pub fn new(f: &PolySystem, zeta: &ProjPoint) -> Self {
        let rj = restricted_jacobian(f, zeta);
        let m = rj.matrix;
        if is_numerically_singular(&m) {
            return PairAnalysis {
                estimate: ConditionEstimate {
                    mu: f64::INFINITY,
                    mu_frobenius: f64::INFINITY,
                    singular: true,
                },
                frame: rj.frame,
                lu: None,
            };
        }
        let n = f.n();
        let scaled_degrees = DMatrix::from_diagonal(&DVector::from_iterator(
            n,
            f.profile()
                .degrees()
                .iter()
                .map(|&d| C64::new(f64::from(d).sqrt(), 0.0)),
        ));
        let lu = m.lu();
        let inv_scaled = match lu.solve(&scaled_degrees) {
            Some(x) => x,
            None => {
                return PairAnalysis {
                    estimate: ConditionEstimate {
                        mu: f64::INFINITY,
                        mu_frobenius: f64::INFINITY,
                        singular: true,
                    },
                    frame: rj.frame,
                    lu: None,
                }
            }
        };
        let f_norm = f.weyl_norm();
        let estimate = ConditionEstimate {
            mu: f_norm * spectral_norm(&inv_scaled),
            mu_frobenius: f_norm * frobenius_norm(&inv_scaled),
            singular: false,
        };
        PairAnalysis {
            estimate,
            frame: rj.frame,
            lu: Some(lu),
        }
    }

    pub fn is_singular(&self) -> bool {
        self.estimate.singular
    }

    /// The tangent vector `v` in `zeta`-perp with `Df(zeta) v + fdot(zeta) = 0`,
    /// given the values `fdot(zeta)`.
    pub fn zeta_dot_from_values(&self, fdot_values: &[C64]) -> Result<Vec<C64>, ConditioningError> {
        let lu = self.lu.as_ref().ok_or(ConditioningError::SingularPair)?;
        let rhs = DVector::from_iterator(fdot_values.len(), fdot_values.iter().map(|&v| -v));
        let coords = lu.solve(&rhs).ok_or(ConditioningError::SingularPair)?;
        Ok(self.frame.to_ambient(&coords))
    }

    pub fn zeta_dot(&self, fdot: &PolySystem) -> Result<Vec<C64>, ConditioningError> {
        self.zeta_dot_from_values(&fdot.eval(self.frame.point().rep()))
    }
}

/// Both condition numbers of the pair.
pub fn condition_estimate(f: &PolySystem, zeta: &ProjPoint) -> ConditionEstimate {
    PairAnalysis::new(f, zeta).estimate
}

/// Spectral-norm condition number; `+inf` encodes ill-posedness.
pub fn mu(f: &PolySystem, zeta: &ProjPoint) -> f64 {
    condition_estimate(f, zeta).mu
}

/// Frobenius-norm condition number; `+inf` encodes ill-posedness.
pub fn mu_frobenius(f: &PolySystem, zeta: &ProjPoint) -> f64 {
    condition_estimate(f, zeta).mu_frobenius
}

/// Derivative of the zero as the system moves with velocity `fdot`:
/// the solution of `Df(zeta) v + fdot(zeta) = 0` in `zeta`-perp.
///
/// Differentiating `f_t(zeta_t) = 0` forces the minus sign on the solve;
/// only the norm of the result enters any step-size or length bound.
pub fn zeta_dot(
    f: &PolySystem,
    zeta: &ProjPoint,
    fdot: &PolySystem,
) -> Result<Vec<C64>, ConditioningError> {
    PairAnalysis::new(f, zeta).zeta_dot(fdot)
}

/// `mu(f, zeta) * sqrt(|fdot|^2 + |zeta_dot|^2)`: the integrand of the
/// condition length with respect to arc length.
pub fn condition_length_integrand(
    f: &PolySystem,
    zeta: &ProjPoint,
    fdot: &PolySystem,
) -> Result<f64, ConditioningError> {
    let analysis = PairAnalysis::new(f, zeta);
    if analysis.is_singular() {
        return Err(ConditioningError::SingularPair);
    }
    let v = analysis.zeta_dot(fdot)?;
    let speed_sq = fdot.weyl_norm_sq() + v.iter().map(|c| c.norm_sqr()).sum::<f64>();
    Ok(analysis.estimate.mu * speed_sq.sqrt())
}

/// Fiber averages `(mean mu^2, mean mu_F^2)` over a complete zero list;
/// infinite if any pair is ill-posed.
pub fn mu_averages(
    f: &PolySystem,
    zeros: &[ProjPoint],
) -> Result<(f64, f64), ConditioningError> {
    if zeros.is_empty() {
        return Err(ConditioningError::EmptyZeroList);
    }
    let mut sum_mu = 0.0;
    let mut sum_muf = 0.0;
    for zeta in zeros {
        let est = condition_estimate(f, zeta);
        if est.singular {
            return Ok((f64::INFINITY, f64::INFINITY));
        }
        sum_mu += est.mu * est.mu;
        sum_muf += est.mu_frobenius * est.mu_frobenius;
    }
    let count = zeros.len() as f64;
    Ok((sum_mu / count, sum_muf / count))
}

/// Frobenius norm of the inverse restricted Jacobian alone (no degree
/// scaling, no `|f|` factor); used by the tangent-average identity.
pub fn inverse_restricted_frobenius(
    f: &PolySystem,
    zeta: &ProjPoint,
) -> Result<f64, ConditioningError> {
    let rj = restricted_jacobian(f, zeta);
    let sv = singular_values(&rj.matrix);
    let (smax, smin) = (sv[0], sv[sv.len() - 1]);
    if smax == 0.0 || smin <= SINGULARITY_RATIO * smax {
        return Err(ConditioningError::SingularPair);
    }
    Ok(sv.iter().map(|s| 1.0 / (s * s)).sum::<f64>().sqrt())
}

/// Euclidean norm of an ambient tangent vector (unit base point).
pub fn tangent_norm(v: &[C64]) -> f64 {
    vec_norm(v)
}

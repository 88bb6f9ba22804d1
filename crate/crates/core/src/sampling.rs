//! Random ensembles on system space: complex Gaussians, uniform sphere
//! samples, Gaussian matrices, unit tangent directions, and the random
//! (system, zero) start pair for the randomized solver.
//!
//! Conventions: a complex Gaussian with variance `sigma^2` has independent
//! real and imaginary parts of variance `sigma^2 / 2` per complex
//! coordinate, so a centered standard draw has `E |coordinate|^2 = 1` and
//! `E |f|^2 = N` over a profile of size `N`. All draws consume a
//! [`CounterRng`] in a fixed documented order, so a `SeedSpec` pins the
//! result bit-exactly.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::algebra::{embed_linear_at, project_fiber, DegreeProfile, PolySystem, ProjPoint};
use crate::linalg::{kernel_vector, KernelError};
use crate::newton::newton_step;
use crate::rng::{CounterRng, SeedSpec};
use crate::C64;

#[derive(Debug, Error, PartialEq)]
pub enum SamplingError {
    #[error("kernel of the sampled linear part is degenerate after retries")]
    KernelDegenerate,
}

/// Random start pair: a system together with one polished zero of it.
#[derive(Clone, Debug)]
pub struct InitialPair {
    pub system: PolySystem,
    pub zero: ProjPoint,
    /// `|f0(zero)|` after polishing.
    pub residual: f64,
}

/// Gaussian system `center + sigma * sum_alpha xi_alpha e_alpha` over the
/// Weyl-orthonormal basis `e_alpha = sqrt(multinomial) z^alpha`. Draw order:
/// components in order, monomials in basis order.
pub fn gaussian_system(
    profile: &DegreeProfile,
    center: Option<&PolySystem>,
    sigma: f64,
    rng: &mut CounterRng,
) -> PolySystem {
    let mut f = match center {
        Some(c) => {
            assert_eq!(c.profile(), profile, "center profile mismatch");
            c.clone()
        }
        None => PolySystem::zero(profile),
    };
    for poly in f.components_mut() {
        let basis = crate::algebra::monomial_basis(poly.n(), poly.degree());
        let weights = basis.multinomials().to_vec();
        for (coeff, w) in poly.coeffs_mut().iter_mut().zip(weights) {
            *coeff += rng.complex_gaussian(sigma) * w.sqrt();
        }
    }
    f
}

/// Centered Gaussian draw normalized to the unit sphere; uniform there by
/// unitary invariance of the ensemble.
pub fn uniform_sphere_system(profile: &DegreeProfile, rng: &mut CounterRng) -> PolySystem {
    loop {
        let f = gaussian_system(profile, None, 1.0, rng);
        if let Ok(unit) = f.normalized() {
            return unit;
        }
    }
}

/// Matrix with i.i.d. complex Gaussian entries (variance `sigma^2` each),
/// drawn in row-major order.
pub fn gaussian_matrix(
    rows: usize,
    cols: usize,
    center: Option<&DMatrix<C64>>,
    sigma: f64,
    rng: &mut CounterRng,
) -> DMatrix<C64> {
    let mut m = match center {
        Some(c) => {
            assert_eq!((c.nrows(), c.ncols()), (rows, cols));
            c.clone()
        }
        None => DMatrix::from_element(rows, cols, C64::new(0.0, 0.0)),
    };
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] += rng.complex_gaussian(sigma);
        }
    }
    m
}

/// Uniform draw from the unit sphere of the real tangent space at `f`
/// (remove the `Re<., f>` component of a Gaussian, then normalize).
pub fn unit_tangent_system(f: &PolySystem, rng: &mut CounterRng) -> PolySystem {
    loop {
        let g = gaussian_system(f.profile(), None, 1.0, rng);
        let along = g.weyl_inner(f).expect("same profile").re;
        let tangent = g.axpy(C64::new(-along, 0.0), f);
        if let Ok(unit) = tangent.normalized() {
            return unit;
        }
    }
}

const BP_MAX_RETRIES: u64 = 16;

/// Random (system, zero) pair: the linear part is drawn first as a Gaussian
/// `n x (n+1)` matrix, the zero is its kernel direction, and the remaining
/// coefficients come from a fresh Gaussian whose linear behaviour at the
/// zero is replaced by the embedded matrix.
///
/// Draw order per attempt: matrix entries row-major, then the full Gaussian
/// system. A degenerate kernel draw (probability zero in exact arithmetic)
/// moves to the next stream.
pub fn bp_initial_pair(profile: &DegreeProfile, spec: SeedSpec) -> Result<InitialPair, SamplingError> {
    let mut spec = spec;
    for _ in 0..BP_MAX_RETRIES {
        let mut rng = CounterRng::new(spec);
        let n = profile.n();
        let linear = gaussian_matrix(n, n + 1, None, 1.0, &mut rng);
        let zeta = match kernel_vector(&linear) {
            Ok(v) => ProjPoint::new(v.iter().copied().collect()).expect("unit kernel vector"),
            Err(KernelError::Degenerate) => {
                spec = spec.next_stream();
                continue;
            }
            Err(KernelError::Shape) => unreachable!("matrix shape fixed above"),
        };
        let g = gaussian_system(profile, None, 1.0, &mut rng);
        let system = assemble_bp_system(profile, &g, &zeta, &linear);
        // Newton polish; the construction is exact in exact arithmetic.
        let mut zero = zeta;
        let mut residual = system.eval_norm(zero.rep());
        for _ in 0..3 {
            if residual <= 1e-14 * system.weyl_norm() {
                break;
            }
            match newton_step(&system, &zero) {
                Ok(next) => {
                    let next_residual = system.eval_norm(next.rep());
                    if next_residual < residual {
                        zero = next;
                        residual = next_residual;
                    } else {
                        break;
                    }
                }
                Err(_) => break,
            }
        }
        return Ok(InitialPair {
            system,
            zero,
            residual,
        });
    }
    Err(SamplingError::KernelDegenerate)
}

/// Replace the linear behaviour of `g` at `zeta` by the rows of `linear`:
/// project onto the fiber, strip the embedded-linear component read off the
/// gradient, and add `sqrt(d_i) <z,zeta>^{d_i - 1} (linear z)_i`.
fn assemble_bp_system(
    profile: &DegreeProfile,
    g: &PolySystem,
    zeta: &ProjPoint,
    linear: &DMatrix<C64>,
) -> PolySystem {
    let n = profile.n();
    let h = project_fiber(g, zeta);
    let jac = h.jacobian(zeta.rep());
    let mut components = Vec::with_capacity(n);
    for (i, poly) in h.components().iter().enumerate() {
        let d = poly.degree();
        let grad_row: Vec<C64> = (0..=n).map(|k| jac[(i, k)]).collect();
        let strip = embed_linear_at(zeta, n, d, &grad_row);
        let add_row: Vec<C64> = (0..=n)
            .map(|k| linear[(i, k)] * f64::from(d).sqrt())
            .collect();
        let add = embed_linear_at(zeta, n, d, &add_row);
        let mut out = poly.clone();
        for ((c, s), a) in out
            .coeffs_mut()
            .iter_mut()
            .zip(strip.coeffs())
            .zip(add.coeffs())
        {
            *c = *c - s + a;
        }
        components.push(out);
    }
    PolySystem::new(components).expect("profile preserved")
}

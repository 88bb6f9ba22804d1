//! Shared support for the integration suites: an independent univariate
//! root oracle (companion-matrix eigenvalues) and random-instance helpers.
//! The oracle deliberately shares no code with the homotopy tracker.

use nalgebra::DMatrix;
use polyhom::algebra::monomial_basis;
use polyhom::{C64, CounterRng, HomogeneousPoly, PolySystem, ProjPoint};

/// Roots of a univariate homogeneous polynomial as projective points,
/// computed by dehomogenizing to `p(u) = sum c_k u^k` (u = x1/x0) and taking
/// the eigenvalues of the companion matrix via a complex Schur
/// decomposition. Requires a nonvanishing leading coefficient.
pub fn univariate_roots(f: &PolySystem) -> Vec<ProjPoint> {
    assert_eq!(f.n(), 1, "univariate oracle needs n = 1");
    let poly = &f.components()[0];
    let d = poly.degree() as usize;
    // Coefficient of X0^{d-k} X1^k in canonical order is entry k.
    let coeffs = poly.coeffs();
    assert_eq!(coeffs.len(), d + 1);
    let lead = coeffs[d];
    assert!(
        lead.norm() > 1e-10 * poly.weyl_norm_sq().sqrt(),
        "leading coefficient too small for the companion oracle"
    );
    let mut companion = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
    for k in 0..d {
        companion[(k, d - 1)] = -coeffs[k] / lead;
        if k + 1 < d {
            companion[(k + 1, k)] = C64::new(1.0, 0.0);
        }
    }
    let (_, t) = companion.schur().unpack();
    (0..d)
        .map(|k| {
            let root = t[(k, k)];
            ProjPoint::new(vec![C64::new(1.0, 0.0), root]).expect("finite root")
        })
        .collect()
}

pub fn random_system(degrees: &[u32], rng: &mut CounterRng) -> PolySystem {
    let n = degrees.len();
    let components = degrees
        .iter()
        .map(|&d| {
            let len = monomial_basis(n, d).len();
            let coeffs = (0..len).map(|_| rng.complex_gaussian(1.0)).collect();
            HomogeneousPoly::from_coeffs(n, d, coeffs).unwrap()
        })
        .collect();
    PolySystem::new(components).unwrap()
}

pub fn random_point(vars: usize, rng: &mut CounterRng) -> Vec<C64> {
    (0..vars).map(|_| rng.complex_gaussian(1.0)).collect()
}

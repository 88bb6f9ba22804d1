//! Dense homogeneous polynomials over the complex numbers with the Weyl
//! (Bombieri-Weyl) Hermitian structure.
//!
//! Coefficients are stored in the monomial basis, in graded-lexicographic
//! order descending on the exponent of `X0` first; the Weyl weights
//! `1/multinomial(d, alpha)` are applied on the fly by the inner-product
//! routines. Storage is dense, sized for desk scale (system size up to
//! around 10^4 coefficients).

mod io;

pub use io::{read_point, read_system, system_from_json, system_to_json, write_point, write_system, SystemIoError};

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::C64;

#[derive(Debug, Error, PartialEq)]
pub enum AlgebraError {
    #[error("degree profile must contain at least one equation")]
    EmptyProfile,
    #[error("polynomial degrees must be at least 1")]
    ZeroDegree,
    #[error("Bezout number overflows u64")]
    BezoutOverflow,
    #[error("coefficient vector has length {got}, expected {expected}")]
    CoefficientLength { expected: usize, got: usize },
    #[error("exponent tuple {0:?} does not have the required degree")]
    BadExponent(Vec<u32>),
    #[error("component count or variable count does not match the profile")]
    ProfileMismatch,
    #[error("cannot normalize a zero vector")]
    ZeroVector,
}

/// Shape of a square system: `n` equations in `n + 1` variables with
/// degrees `d_1..d_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DegreeProfile {
    degrees: Vec<u32>,
}

impl DegreeProfile {
    pub fn new(degrees: Vec<u32>) -> Result<Self, AlgebraError> {
        if degrees.is_empty() {
            return Err(AlgebraError::EmptyProfile);
        }
        if degrees.iter().any(|&d| d == 0) {
            return Err(AlgebraError::ZeroDegree);
        }
        let profile = DegreeProfile { degrees };
        profile
            .degrees
            .iter()
            .try_fold(1u64, |acc, &d| acc.checked_mul(u64::from(d)))
            .ok_or(AlgebraError::BezoutOverflow)?;
        Ok(profile)
    }

    /// Uniform profile: `n` equations all of degree `d`.
    pub fn uniform(n: usize, d: u32) -> Result<Self, AlgebraError> {
        Self::new(vec![d; n])
    }

    /// Number of equations.
    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    /// Number of variables, `n + 1`.
    pub fn vars(&self) -> usize {
        self.degrees.len() + 1
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    /// Largest degree.
    pub fn max_degree(&self) -> u32 {
        *self.degrees.iter().max().expect("nonempty")
    }

    /// Product of the degrees: the generic number of projective zeros.
    pub fn bezout(&self) -> u64 {
        self.degrees.iter().map(|&d| u64::from(d)).product()
    }

    /// Total coefficient count over all components.
    pub fn size(&self) -> usize {
        self.degrees
            .iter()
            .map(|&d| binomial(self.n() as u64 + u64::from(d), self.n() as u64) as usize)
            .sum()
    }
}

/// Exponent tuple `(alpha_0, ..., alpha_n)` of one monomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

/// Exact binomial coefficient, computed in u128 and returned as f64.
/// Exact for every value representable below 2^53 (ample at desk scale).
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as f64
}

/// Multinomial coefficient `d! / (alpha_0! ... alpha_n!)` for `|alpha| = d`.
pub fn multinomial(alpha: &[u32]) -> f64 {
    let mut acc = 1.0;
    let mut total: u64 = 0;
    for &a in alpha {
        total += u64::from(a);
        acc *= binomial(total, u64::from(a));
    }
    acc
}

/// All multi-indices of degree `d` in `n + 1` variables, in
/// graded-lexicographic order descending on `alpha_0` first.
/// Deterministic across runs.
pub fn enumerate_monomials(n: usize, d: u32) -> Vec<MultiIndex> {
    let mut out = Vec::with_capacity(binomial(n as u64 + u64::from(d), n as u64) as usize);
    let mut current = vec![0u32; n + 1];
    fill_monomials(&mut out, &mut current, 0, d);
    out
}

fn fill_monomials(out: &mut Vec<MultiIndex>, current: &mut Vec<u32>, pos: usize, remaining: u32) {
    if pos == current.len() - 1 {
        current[pos] = remaining;
        out.push(MultiIndex(current.clone()));
        return;
    }
    for e in (0..=remaining).rev() {
        current[pos] = e;
        fill_monomials(out, current, pos + 1, remaining - e);
        current[pos] = 0;
    }
}

/// Monomial table for one `(n, degree)` pair: exponent tuples in canonical
/// order, their multinomial weights, and the reverse index. Shared through a
/// process-wide cache since every polynomial of the same shape uses the same
/// table.
#[derive(Debug)]
pub struct MonomialBasis {
    n: usize,
    degree: u32,
    exponents: Vec<MultiIndex>,
    multinomials: Vec<f64>,
    index: HashMap<Vec<u32>, usize>,
}

impl MonomialBasis {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self) -> &[MultiIndex] {
        &self.exponents
    }

    pub fn multinomials(&self) -> &[f64] {
        &self.multinomials
    }

    pub fn index_of(&self, alpha: &[u32]) -> Option<usize> {
        self.index.get(alpha).copied()
    }
}

fn basis_cache() -> &'static Mutex<HashMap<(usize, u32), Arc<MonomialBasis>>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u32), Arc<MonomialBasis>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Shared monomial table for degree-`d` polynomials in `n + 1` variables.
pub fn monomial_basis(n: usize, d: u32) -> Arc<MonomialBasis> {
    let mut cache = basis_cache().lock().expect("basis cache poisoned");
    cache
        .entry((n, d))
        .or_insert_with(|| {
            let exponents = enumerate_monomials(n, d);
            let multinomials = exponents.iter().map(|a| multinomial(a.exponents())).collect();
            let index = exponents
                .iter()
                .enumerate()
                .map(|(i, a)| (a.exponents().to_vec(), i))
                .collect();
            Arc::new(MonomialBasis {
                n,
                degree: d,
                exponents,
                multinomials,
                index,
            })
        })
        .clone()
}

/// Powers `x_j^e` for `e = 0..=d`, reused across the monomials of one
/// evaluation.
fn power_table(x: &[C64], d: u32) -> Vec<Vec<C64>> {
    x.iter()
        .map(|&xj| {
            let mut row = Vec::with_capacity(d as usize + 1);
            let mut acc = C64::new(1.0, 0.0);
            row.push(acc);
            for _ in 0..d {
                acc *= xj;
                row.push(acc);
            }
            row
        })
        .collect()
}

/// One dense homogeneous polynomial.
#[derive(Clone, Debug)]
pub struct HomogeneousPoly {
    basis: Arc<MonomialBasis>,
    coeffs: Vec<C64>,
}

impl HomogeneousPoly {
    pub fn zero(n: usize, d: u32) -> Self {
        let basis = monomial_basis(n, d);
        let coeffs = vec![C64::new(0.0, 0.0); basis.len()];
        HomogeneousPoly { basis, coeffs }
    }

    pub fn from_coeffs(n: usize, d: u32, coeffs: Vec<C64>) -> Result<Self, AlgebraError> {
        let basis = monomial_basis(n, d);
        if coeffs.len() != basis.len() {
            return Err(AlgebraError::CoefficientLength {
                expected: basis.len(),
                got: coeffs.len(),
            });
        }
        Ok(HomogeneousPoly { basis, coeffs })
    }

    /// The single monomial `c * z^alpha`.
    pub fn monomial(n: usize, d: u32, alpha: &[u32], c: C64) -> Result<Self, AlgebraError> {
        let mut p = Self::zero(n, d);
        let idx = p
            .basis
            .index_of(alpha)
            .ok_or_else(|| AlgebraError::BadExponent(alpha.to_vec()))?;
        p.coeffs[idx] = c;
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.basis.n()
    }

    pub fn degree(&self) -> u32 {
        self.basis.degree()
    }

    pub fn basis(&self) -> &MonomialBasis {
        &self.basis
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [C64] {
        &mut self.coeffs
    }

    pub fn coeff(&self, alpha: &[u32]) -> Option<C64> {
        self.basis.index_of(alpha).map(|i| self.coeffs[i])
    }

    /// Direct monomial summation using a shared power table.
    pub fn evaluate(&self, x: &[C64]) -> C64 {
        debug_assert_eq!(x.len(), self.n() + 1);
        let powers = power_table(x, self.degree());
        self.evaluate_with(&powers)
    }

    fn evaluate_with(&self, powers: &[Vec<C64>]) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (alpha, &c) in self.basis.exponents().iter().zip(&self.coeffs) {
            if c == C64::new(0.0, 0.0) {
                continue;
            }
            let mut m = c;
            for (j, &e) in alpha.exponents().iter().enumerate() {
                if e > 0 {
                    m *= powers[j][e as usize];
                }
            }
            acc += m;
        }
        acc
    }

    /// All partial derivatives evaluated at `x`.
    pub fn gradient(&self, x: &[C64]) -> Vec<C64> {
        let powers = power_table(x, self.degree());
        self.gradient_with(&powers)
    }

    fn gradient_with(&self, powers: &[Vec<C64>]) -> Vec<C64> {
        let vars = self.n() + 1;
        let mut grad = vec![C64::new(0.0, 0.0); vars];
        for (alpha, &c) in self.basis.exponents().iter().zip(&self.coeffs) {
            if c == C64::new(0.0, 0.0) {
                continue;
            }
            let exps = alpha.exponents();
            for k in 0..vars {
                let ek = exps[k];
                if ek == 0 {
                    continue;
                }
                let mut m = c * f64::from(ek);
                for (j, &e) in exps.iter().enumerate() {
                    let e = if j == k { e - 1 } else { e };
                    if e > 0 {
                        m *= powers[j][e as usize];
                    }
                }
                grad[k] += m;
            }
        }
        grad
    }

    /// Weyl inner product `<self, other>`, conjugate-linear in `other`.
    pub fn weyl_inner(&self, other: &HomogeneousPoly) -> Result<C64, AlgebraError> {
        if self.n() != other.n() || self.degree() != other.degree() {
            return Err(AlgebraError::ProfileMismatch);
        }
        let mut acc = C64::new(0.0, 0.0);
        for ((&a, &b), &w) in self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .zip(self.basis.multinomials())
        {
            acc += a * b.conj() / w;
        }
        Ok(acc)
    }

    pub fn weyl_norm_sq(&self) -> f64 {
        self.coeffs
            .iter()
            .zip(self.basis.multinomials())
            .map(|(&c, &w)| c.norm_sqr() / w)
            .sum()
    }

    /// Substitution `z -> A z`; `a` is `(n+1) x (n+1)`.
    pub fn compose_linear(&self, a: &DMatrix<C64>) -> Self {
        let vars = self.n() + 1;
        assert_eq!((a.nrows(), a.ncols()), (vars, vars), "substitution matrix shape");
        let mut out = Self::zero(self.n(), self.degree());
        for (alpha, &c) in self.basis.exponents().iter().zip(&self.coeffs) {
            if c == C64::new(0.0, 0.0) {
                continue;
            }
            // Expand prod_j (row_j(A) . z)^{alpha_j} by repeated
            // multiplication with linear forms.
            let mut acc: Vec<C64> = vec![c]; // degree-0 polynomial
            let mut deg = 0u32;
            for (j, &e) in alpha.exponents().iter().enumerate() {
                for _ in 0..e {
                    acc = multiply_by_linear(self.n(), deg, &acc, a.row(j).iter().copied());
                    deg += 1;
                }
            }
            for (i, v) in acc.into_iter().enumerate() {
                out.coeffs[i] += v;
            }
        }
        out
    }
}

/// Multiply a dense degree-`deg` coefficient vector by the linear form with
/// the given coefficients, producing a degree-`deg + 1` vector.
fn multiply_by_linear(
    n: usize,
    deg: u32,
    coeffs: &[C64],
    linear: impl Iterator<Item = C64>,
) -> Vec<C64> {
    let from = monomial_basis(n, deg);
    let to = monomial_basis(n, deg + 1);
    let mut out = vec![C64::new(0.0, 0.0); to.len()];
    let linear: Vec<C64> = linear.collect();
    let mut bumped = vec![0u32; n + 1];
    for (alpha, &c) in from.exponents().iter().zip(coeffs) {
        if c == C64::new(0.0, 0.0) {
            continue;
        }
        bumped.copy_from_slice(alpha.exponents());
        for (m, &lm) in linear.iter().enumerate() {
            if lm == C64::new(0.0, 0.0) {
                continue;
            }
            bumped[m] += 1;
            let idx = to.index_of(&bumped).expect("bumped exponent in basis");
            out[idx] += c * lm;
            bumped[m] -= 1;
        }
    }
    out
}

/// A square system: `n` homogeneous polynomials in `n + 1` variables.
#[derive(Clone, Debug)]
pub struct PolySystem {
    profile: DegreeProfile,
    components: Vec<HomogeneousPoly>,
}

impl PolySystem {
    pub fn new(components: Vec<HomogeneousPoly>) -> Result<Self, AlgebraError> {
        if components.is_empty() {
            return Err(AlgebraError::EmptyProfile);
        }
        let n = components.len();
        if components.iter().any(|p| p.n() != n) {
            return Err(AlgebraError::ProfileMismatch);
        }
        let profile = DegreeProfile::new(components.iter().map(|p| p.degree()).collect())?;
        Ok(PolySystem { profile, components })
    }

    pub fn zero(profile: &DegreeProfile) -> Self {
        let components = profile
            .degrees()
            .iter()
            .map(|&d| HomogeneousPoly::zero(profile.n(), d))
            .collect();
        PolySystem {
            profile: profile.clone(),
            components,
        }
    }

    pub fn profile(&self) -> &DegreeProfile {
        &self.profile
    }

    pub fn n(&self) -> usize {
        self.profile.n()
    }

    pub fn components(&self) -> &[HomogeneousPoly] {
        &self.components
    }

    pub fn components_mut(&mut self) -> &mut [HomogeneousPoly] {
        &mut self.components
    }

    pub fn eval(&self, x: &[C64]) -> Vec<C64> {
        let d = self.profile.max_degree();
        let powers = power_table(x, d);
        self.components.iter().map(|p| p.evaluate_with(&powers)).collect()
    }

    /// Euclidean norm of the value vector `f(x)`.
    pub fn eval_norm(&self, x: &[C64]) -> f64 {
        self.eval(x).iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Full Jacobian `Df(x)`, an `n x (n+1)` matrix.
    pub fn jacobian(&self, x: &[C64]) -> DMatrix<C64> {
        let n = self.n();
        let vars = n + 1;
        let powers = power_table(x, self.profile.max_degree());
        let mut jac = DMatrix::from_element(n, vars, C64::new(0.0, 0.0));
        for (i, p) in self.components.iter().enumerate() {
            let grad = p.gradient_with(&powers);
            for (k, g) in grad.into_iter().enumerate() {
                jac[(i, k)] = g;
            }
        }
        jac
    }

    pub fn weyl_inner(&self, other: &PolySystem) -> Result<C64, AlgebraError> {
        if self.profile != other.profile {
            return Err(AlgebraError::ProfileMismatch);
        }
        let mut acc = C64::new(0.0, 0.0);
        for (a, b) in self.components.iter().zip(&other.components) {
            acc += a.weyl_inner(b)?;
        }
        Ok(acc)
    }

    pub fn weyl_norm_sq(&self) -> f64 {
        self.components.iter().map(|p| p.weyl_norm_sq()).sum()
    }

    pub fn weyl_norm(&self) -> f64 {
        self.weyl_norm_sq().sqrt()
    }

    pub fn scale(&self, factor: C64) -> Self {
        let mut out = self.clone();
        for p in &mut out.components {
            for c in p.coeffs_mut() {
                *c *= factor;
            }
        }
        out
    }

    pub fn scale_re(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    pub fn normalized(&self) -> Result<Self, AlgebraError> {
        let norm = self.weyl_norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(AlgebraError::ZeroVector);
        }
        Ok(self.scale_re(1.0 / norm))
    }

    /// `self + factor * other` (profiles must match).
    pub fn axpy(&self, factor: C64, other: &PolySystem) -> Self {
        assert_eq!(self.profile, other.profile, "profile mismatch");
        let mut out = self.clone();
        for (p, q) in out.components.iter_mut().zip(&other.components) {
            for (c, &o) in p.coeffs_mut().iter_mut().zip(q.coeffs()) {
                *c += factor * o;
            }
        }
        out
    }

    /// Real linear combination `a * f + b * g`.
    pub fn linear_combination(a: f64, f: &PolySystem, b: f64, g: &PolySystem) -> Self {
        f.scale_re(a).axpy(C64::new(b, 0.0), g)
    }

    /// Substitution `z -> A z` applied to every component.
    pub fn compose_linear(&self, a: &DMatrix<C64>) -> Self {
        let components = self.components.iter().map(|p| p.compose_linear(a)).collect();
        PolySystem {
            profile: self.profile.clone(),
            components,
        }
    }
}

impl std::ops::Sub for &PolySystem {
    type Output = PolySystem;

    fn sub(self, rhs: &PolySystem) -> PolySystem {
        self.axpy(C64::new(-1.0, 0.0), rhs)
    }
}

impl std::ops::Add for &PolySystem {
    type Output = PolySystem;

    fn add(self, rhs: &PolySystem) -> PolySystem {
        self.axpy(C64::new(1.0, 0.0), rhs)
    }
}

/// Unit-norm representative of a point of complex projective n-space.
///
/// The representative is unique: after normalization the first coordinate of
/// largest modulus (ties broken by lowest index) is real and nonnegative, so
/// equal projective points get bit-equal representatives.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjPoint {
    rep: Vec<C64>,
}

impl ProjPoint {
    pub fn new(v: Vec<C64>) -> Result<Self, AlgebraError> {
        let norm_sq: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        let norm = norm_sq.sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(AlgebraError::ZeroVector);
        }
        let mut imax = 0;
        let mut best = -1.0;
        for (i, c) in v.iter().enumerate() {
            let m = c.norm_sqr();
            if m > best {
                best = m;
                imax = i;
            }
        }
        let pivot = v[imax];
        let phase = pivot / pivot.norm();
        let factor = phase.conj() / norm;
        let mut rep: Vec<C64> = v.iter().map(|&c| c * factor).collect();
        // The pivot is real by construction; store it exactly so.
        rep[imax] = C64::new(pivot.norm() / norm, 0.0);
        Ok(ProjPoint { rep })
    }

    /// The standard basis point `e_k` in `vars` coordinates.
    pub fn standard(vars: usize, k: usize) -> Self {
        let mut rep = vec![C64::new(0.0, 0.0); vars];
        rep[k] = C64::new(1.0, 0.0);
        ProjPoint { rep }
    }

    pub fn rep(&self) -> &[C64] {
        &self.rep
    }

    pub fn vars(&self) -> usize {
        self.rep.len()
    }

    /// Standard Hermitian inner product of the representatives.
    pub fn herm_inner(&self, other: &ProjPoint) -> C64 {
        herm_inner(&self.rep, other.rep())
    }

    pub fn as_dvector(&self) -> DVector<C64> {
        DVector::from_column_slice(&self.rep)
    }
}

/// `<x, y> = sum x_k conj(y_k)`.
pub fn herm_inner(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(&a, &b)| a * b.conj()).sum()
}

pub fn vec_norm(x: &[C64]) -> f64 {
    x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// The system with component `i` equal to `a_i * <z, zeta>^{d_i}`, expanded
/// into monomial coefficients `a_i * multinomial(d_i, alpha) * conj(zeta)^alpha`.
/// Component `i` has Weyl norm `|a_i|` when `zeta` is unit.
pub fn kernel_system(zeta: &ProjPoint, profile: &DegreeProfile, a: &[C64]) -> PolySystem {
    assert_eq!(a.len(), profile.n(), "one scalar per component");
    let zbar: Vec<C64> = zeta.rep().iter().map(|c| c.conj()).collect();
    let components = profile
        .degrees()
        .iter()
        .zip(a)
        .map(|(&d, &ai)| {
            let mut p = HomogeneousPoly::zero(profile.n(), d);
            let basis = p.basis.clone();
            for (idx, alpha) in basis.exponents().iter().enumerate() {
                let mut m = ai * basis.multinomials()[idx];
                for (j, &e) in alpha.exponents().iter().enumerate() {
                    for _ in 0..e {
                        m *= zbar[j];
                    }
                }
                p.coeffs[idx] = m;
            }
            p
        })
        .collect();
    PolySystem {
        profile: profile.clone(),
        components,
    }
}

/// Orthogonal projection of `f` onto the fiber of systems vanishing at
/// `zeta`: subtracts the kernel-system component carrying the values
/// `f(zeta)`.
pub fn project_fiber(f: &PolySystem, zeta: &ProjPoint) -> PolySystem {
    let values = f.eval(zeta.rep());
    let kernel = kernel_system(zeta, f.profile(), &values);
    f - &kernel
}

/// The degree-`d` polynomial `<z, zeta>^{d-1} * (b . z)` for a linear form
/// with coefficients `b`. Together with a `sqrt(d)` factor this embeds
/// linear forms vanishing at `zeta` isometrically into degree-`d` space.
pub fn embed_linear_at(zeta: &ProjPoint, n: usize, d: u32, b: &[C64]) -> HomogeneousPoly {
    assert!(d >= 1);
    assert_eq!(b.len(), n + 1);
    let zbar: Vec<C64> = zeta.rep().iter().map(|c| c.conj()).collect();
    let lower = monomial_basis(n, d - 1);
    let mut p = HomogeneousPoly::zero(n, d);
    let basis = p.basis.clone();
    let mut bumped = vec![0u32; n + 1];
    for (idx, beta) in lower.exponents().iter().enumerate() {
        let mut m = C64::new(lower.multinomials()[idx], 0.0);
        for (j, &e) in beta.exponents().iter().enumerate() {
            for _ in 0..e {
                m *= zbar[j];
            }
        }
        if m == C64::new(0.0, 0.0) {
            continue;
        }
        bumped.copy_from_slice(beta.exponents());
        for (k, &bk) in b.iter().enumerate() {
            if bk == C64::new(0.0, 0.0) {
                continue;
            }
            bumped[k] += 1;
            let target = basis.index_of(&bumped).expect("bumped exponent in basis");
            p.coeffs[target] += m * bk;
            bumped[k] -= 1;
        }
    }
    p
}

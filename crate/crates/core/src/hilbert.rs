//! The matrix model of conditional probability.
//!
//! Events are orthogonal projections, states are density matrices and
//! `mu(x) = tr(rho x)`. Conditioning on an event `e` uses the maps
//! `U_e x = e x e` and `T_e x = (e x + x e) / 2`; the Lüders conditional
//! probability is `mu(f | e) = tr(e rho e f) / tr(rho e)`.
//!
//! Interference terms are built from `mu(U_e f) = tr(e rho e f)`, which equals
//! `mu(f | e) mu(e)` and stays well defined when `mu(e) = 0`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::eigen::{hermitian_eigenvalues, jacobi_hermitian, EigenError};
use crate::random::{
    random_composition, random_density_matrix, random_hermitian, random_unitary, stream_rng,
};

pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
pub const PROJECTOR_TOLERANCE: f64 = 1e-10;
pub const PROJECTOR_SPECTRUM_TOLERANCE: f64 = 1e-9;
pub const DENSITY_TOLERANCE: f64 = 1e-10;
pub const ORTHOGONALITY_TOLERANCE: f64 = 1e-10;
pub const ZERO_PROBABILITY: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HilbertError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (drift {drift:e})")]
    NotHermitian { drift: f64 },
    #[error("matrix is not a projector ({0})")]
    NotProjector(String),
    #[error("matrix is not a density state ({0})")]
    NotDensity(String),
    #[error("events are not orthogonal (|e f| = {norm:e})")]
    NotOrthogonal { norm: f64 },
    #[error("conditioning event has probability {probability:e}")]
    ZeroProbabilityCondition { probability: f64 },
    #[error(transparent)]
    Eigen(#[from] EigenError),
}

fn half() -> Complex64 {
    Complex64::new(0.5, 0.0)
}

/// Symmetrizes `m`, failing if it drifted further than the Hermitian tolerance.
fn hermitize(m: DMatrix<Complex64>) -> Result<DMatrix<Complex64>, HilbertError> {
    let drift = (&m - m.adjoint()).norm();
    if drift > HERMITIAN_TOLERANCE * m.norm().max(1.0) {
        return Err(HilbertError::NotHermitian { drift });
    }
    Ok((&m + m.adjoint()) * half())
}

#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(DMatrix<Complex64>);

impl HermitianMatrix {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self, HilbertError> {
        if m.nrows() != m.ncols() {
            return Err(HilbertError::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        Ok(Self(hermitize(m)?))
    }

    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self, HilbertError> {
        Self::new(DMatrix::from_row_iterator(
            dim,
            dim,
            entries.iter().map(|&x| Complex64::new(x, 0.0)),
        ))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    /// `Re tr(self * other)`, the pairing of a state with an observable.
    pub fn trace_with(&self, other: &HermitianMatrix) -> f64 {
        (&self.0 * &other.0).trace().re
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn distance(&self, other: &HermitianMatrix) -> f64 {
        (&self.0 - &other.0).norm()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>, HilbertError> {
        Ok(hermitian_eigenvalues(&self.0)?)
    }

    pub fn add(&self, other: &HermitianMatrix) -> Result<HermitianMatrix, HilbertError> {
        same_dim(self.dim(), other.dim())?;
        Ok(Self(&self.0 + &other.0))
    }

    pub fn sub(&self, other: &HermitianMatrix) -> Result<HermitianMatrix, HilbertError> {
        same_dim(self.dim(), other.dim())?;
        Ok(Self(&self.0 - &other.0))
    }

    pub fn scale(&self, factor: f64) -> HermitianMatrix {
        Self(&self.0 * Complex64::new(factor, 0.0))
    }

    /// `u x u^dagger`; the result is Hermitian whenever `u` is unitary.
    pub fn conjugate_by(&self, u: &DMatrix<Complex64>) -> Result<HermitianMatrix, HilbertError> {
        same_dim(self.dim(), u.nrows())?;
        Self::new(u * &self.0 * u.adjoint())
    }
}

fn same_dim(expected: usize, found: usize) -> Result<(), HilbertError> {
    if expected == found {
        Ok(())
    } else {
        Err(HilbertError::DimensionMismatch { expected, found })
    }
}

/// An orthogonal projection: an event of the matrix model.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector(HermitianMatrix);

impl Projector {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self, HilbertError> {
        let h = HermitianMatrix::new(m)?;
        let idem = (&h.0 * &h.0 - &h.0).norm();
        if idem > PROJECTOR_TOLERANCE {
            return Err(HilbertError::NotProjector(format!("|P^2 - P| = {idem:e}")));
        }
        for lambda in h.eigenvalues()? {
            if lambda.abs() > PROJECTOR_SPECTRUM_TOLERANCE
                && (lambda - 1.0).abs() > PROJECTOR_SPECTRUM_TOLERANCE
            {
                return Err(HilbertError::NotProjector(format!("eigenvalue {lambda}")));
            }
        }
        Ok(Self(h))
    }

    /// Projector onto the span of the given orthonormal vectors.
    pub fn from_orthonormal(dim: usize, vectors: &[DVector<Complex64>]) -> Result<Self, HilbertError> {
        let mut m = DMatrix::zeros(dim, dim);
        for v in vectors {
            same_dim(dim, v.len())?;
            m += v * v.adjoint();
        }
        Self::new(m)
    }

    /// Rank-one projector onto `v / |v|`.
    pub fn onto(v: &DVector<Complex64>) -> Result<Self, HilbertError> {
        let n = v.norm();
        Self::from_orthonormal(v.len(), &[v / Complex64::new(n, 0.0)])
    }

    /// Projector onto the computational basis vector `index`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut m = DMatrix::zeros(dim, dim);
        m[(index, index)] = Complex64::new(1.0, 0.0);
        Self(HermitianMatrix(m))
    }

    pub fn identity(dim: usize) -> Self {
        Self(HermitianMatrix::identity(dim))
    }

    pub fn zero(dim: usize) -> Self {
        Self(HermitianMatrix::zeros(dim))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn as_hermitian(&self) -> &HermitianMatrix {
        &self.0
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        self.0.matrix()
    }

    pub fn rank(&self) -> usize {
        self.0.trace().round() as usize
    }

    /// `e' = 1 - e`.
    pub fn complement(&self) -> Projector {
        Self(HermitianMatrix(
            DMatrix::identity(self.dim(), self.dim()) - self.matrix(),
        ))
    }

    /// `|e f|` in the Frobenius norm.
    pub fn overlap(&self, other: &Projector) -> Result<f64, HilbertError> {
        same_dim(self.dim(), other.dim())?;
        Ok((self.matrix() * other.matrix()).norm())
    }

    pub fn is_orthogonal_to(&self, other: &Projector, tolerance: f64) -> Result<bool, HilbertError> {
        Ok(self.overlap(other)? <= tolerance)
    }

    /// `e + f` for orthogonal `e`, `f`.
    pub fn orthogonal_sum(&self, other: &Projector) -> Result<Projector, HilbertError> {
        let norm = self.overlap(other)?;
        if norm > ORTHOGONALITY_TOLERANCE {
            return Err(HilbertError::NotOrthogonal { norm });
        }
        Self::new(self.matrix() + other.matrix())
    }

    /// Orthonormal basis of the range, read off the spectral decomposition.
    pub fn range_basis(&self) -> Result<Vec<DVector<Complex64>>, HilbertError> {
        let eig = jacobi_hermitian(self.matrix())?;
        Ok(eig
            .values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 0.5)
            .map(|(k, _)| eig.vectors.column(k).into_owned())
            .collect())
    }

    pub fn conjugate_by(&self, u: &DMatrix<Complex64>) -> Result<Projector, HilbertError> {
        Projector::new(self.0.conjugate_by(u)?.0)
    }
}

/// A density matrix: positive semidefinite with unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState(HermitianMatrix);

impl DensityState {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self, HilbertError> {
        let h = HermitianMatrix::new(m)?;
        let tr = h.trace();
        if (tr - 1.0).abs() > DENSITY_TOLERANCE {
            return Err(HilbertError::NotDensity(format!("trace {tr}")));
        }
        let min = h.eigenvalues()?.first().copied().unwrap_or(0.0);
        if min < -DENSITY_TOLERANCE {
            return Err(HilbertError::NotDensity(format!("eigenvalue {min:e}")));
        }
        Ok(Self(h))
    }

    /// `|psi><psi|` for the normalized `psi`.
    pub fn pure(psi: &DVector<Complex64>) -> Result<Self, HilbertError> {
        let v = psi / Complex64::new(psi.norm(), 0.0);
        Self::new(&v * v.adjoint())
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(HermitianMatrix(
            DMatrix::identity(dim, dim) * Complex64::new(1.0 / dim as f64, 0.0),
        ))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn as_hermitian(&self) -> &HermitianMatrix {
        &self.0
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        self.0.matrix()
    }

    /// `mu(x) = tr(rho x)`.
    pub fn expectation(&self, x: &HermitianMatrix) -> Result<f64, HilbertError> {
        same_dim(self.dim(), x.dim())?;
        Ok(self.0.trace_with(x))
    }

    pub fn probability(&self, e: &Projector) -> Result<f64, HilbertError> {
        self.expectation(e.as_hermitian())
    }

    /// The Lüders update `e rho e / tr(rho e)`.
    pub fn conditioned_on(&self, e: &Projector) -> Result<DensityState, HilbertError> {
        let p = self.probability(e)?;
        if p <= ZERO_PROBABILITY {
            return Err(HilbertError::ZeroProbabilityCondition { probability: p });
        }
        let m = e.matrix() * self.matrix() * e.matrix() / Complex64::new(p, 0.0);
        DensityState::new(m)
    }
}

/// Three pairwise orthogonal events.
#[derive(Debug, Clone, PartialEq)]
pub struct EventTriple {
    events: [Projector; 3],
}

impl EventTriple {
    pub fn new(e1: Projector, e2: Projector, e3: Projector) -> Result<Self, HilbertError> {
        same_dim(e1.dim(), e2.dim())?;
        same_dim(e1.dim(), e3.dim())?;
        for (a, b) in [(&e1, &e2), (&e1, &e3), (&e2, &e3)] {
            let norm = a.overlap(b)?;
            if norm > ORTHOGONALITY_TOLERANCE {
                return Err(HilbertError::NotOrthogonal { norm });
            }
        }
        Ok(Self {
            events: [e1, e2, e3],
        })
    }

    pub fn events(&self) -> &[Projector; 3] {
        &self.events
    }

    pub fn dim(&self) -> usize {
        self.events[0].dim()
    }
}

/// `U_e x = e x e`.
pub fn u_map(e: &Projector, x: &HermitianMatrix) -> Result<HermitianMatrix, HilbertError> {
    same_dim(e.dim(), x.dim())?;
    HermitianMatrix::new(e.matrix() * x.matrix() * e.matrix())
}

/// `T_e x = (e x + x e) / 2`, the Jordan product.
pub fn t_map(e: &Projector, x: &HermitianMatrix) -> Result<HermitianMatrix, HilbertError> {
    same_dim(e.dim(), x.dim())?;
    HermitianMatrix::new((e.matrix() * x.matrix() + x.matrix() * e.matrix()) * half())
}

/// `T_e x` assembled from the conditioning maps: `(x + U_e x - U_e' x) / 2`.
pub fn t_map_from_u(e: &Projector, x: &HermitianMatrix) -> Result<HermitianMatrix, HilbertError> {
    let ue = u_map(e, x)?;
    let ue_c = u_map(&e.complement(), x)?;
    Ok(x.add(&ue)?.sub(&ue_c)?.scale(0.5))
}

/// Lüders conditional probability `tr(e rho e f) / tr(rho e)`.
pub fn cond_prob(rho: &DensityState, e: &Projector, f: &Projector) -> Result<f64, HilbertError> {
    let p = rho.probability(e)?;
    if p <= ZERO_PROBABILITY {
        return Err(HilbertError::ZeroProbabilityCondition { probability: p });
    }
    Ok(conditioned_weight(rho, e, f)? / p)
}

/// `mu(U_e f) = tr(e rho e f)`, i.e. `mu(f | e) mu(e)` without the division.
pub fn conditioned_weight(rho: &DensityState, e: &Projector, f: &Projector) -> Result<f64, HilbertError> {
    same_dim(rho.dim(), e.dim())?;
    same_dim(rho.dim(), f.dim())?;
    Ok((e.matrix() * rho.matrix() * e.matrix() * f.matrix()).trace().re)
}

fn event_sum(events: &[&Projector]) -> DMatrix<Complex64> {
    let d = events[0].dim();
    events
        .iter()
        .fold(DMatrix::zeros(d, d), |acc, e| acc + e.matrix())
}

fn weight_of_sum(rho: &DensityState, events: &[&Projector], f: &Projector) -> f64 {
    let s = event_sum(events);
    (&s * rho.matrix() * &s * f.matrix()).trace().re
}

/// Sorkin's third-order interference term for a triple of exclusive events.
///
/// ```text
/// I3 = mu(U_{e1+e2+e3} f) - mu(U_{e1+e2} f) - mu(U_{e1+e3} f) - mu(U_{e2+e3} f)
///    + mu(U_{e1} f) + mu(U_{e2} f) + mu(U_{e3} f)
/// ```
pub fn sorkin_i3(rho: &DensityState, triple: &EventTriple, f: &Projector) -> Result<f64, HilbertError> {
    same_dim(rho.dim(), triple.dim())?;
    same_dim(rho.dim(), f.dim())?;
    let [e1, e2, e3] = triple.events();
    let w = |events: &[&Projector]| weight_of_sum(rho, events, f);
    Ok(w(&[e1, e2, e3]) - w(&[e1, e2]) - w(&[e1, e3]) - w(&[e2, e3]) + w(&[e1]) + w(&[e2]) + w(&[e3]))
}

/// Second-order term `mu(U_{e1+e2} f) - mu(U_{e1} f) - mu(U_{e2} f)`.
pub fn sorkin_i2(
    rho: &DensityState,
    e1: &Projector,
    e2: &Projector,
    f: &Projector,
) -> Result<f64, HilbertError> {
    same_dim(rho.dim(), e1.dim())?;
    same_dim(rho.dim(), e2.dim())?;
    same_dim(rho.dim(), f.dim())?;
    let norm = e1.overlap(e2)?;
    if norm > ORTHOGONALITY_TOLERANCE {
        return Err(HilbertError::NotOrthogonal { norm });
    }
    let w = |events: &[&Projector]| weight_of_sum(rho, events, f);
    Ok(w(&[e1, e2]) - w(&[e1]) - w(&[e2]))
}

/// `|T_{e+f} x - T_e x - T_f x|` (Frobenius) for orthogonal `e`, `f`.
pub fn check_t_additivity(
    e: &Projector,
    f: &Projector,
    x: &HermitianMatrix,
) -> Result<f64, HilbertError> {
    let sum = e.orthogonal_sum(f)?;
    let lhs = t_map(&sum, x)?;
    let rhs = t_map(e, x)?.add(&t_map(f, x)?)?;
    Ok(lhs.distance(&rhs))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyCheck {
    pub name: &'static str,
    pub cases: usize,
    pub max_residual: f64,
}

/// Maximum residual per algebraic property over a set of samples.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PropertyReport {
    pub checks: Vec<PropertyCheck>,
}

impl PropertyReport {
    fn record(&mut self, name: &'static str, residual: f64) {
        match self.checks.iter_mut().find(|c| c.name == name) {
            Some(c) => {
                c.cases += 1;
                c.max_residual = c.max_residual.max(residual);
            }
            None => self.checks.push(PropertyCheck {
                name,
                cases: 1,
                max_residual: residual,
            }),
        }
    }

    pub fn max_residual(&self) -> f64 {
        self.checks
            .iter()
            .map(|c| c.max_residual)
            .fold(0.0, f64::max)
    }

    pub fn get(&self, name: &str) -> Option<&PropertyCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn merge(&mut self, other: &PropertyReport) {
        for c in &other.checks {
            match self.checks.iter_mut().find(|x| x.name == c.name) {
                Some(x) => {
                    x.cases += c.cases;
                    x.max_residual = x.max_residual.max(c.max_residual);
                }
                None => self.checks.push(c.clone()),
            }
        }
    }
}

/// Events below `e` and orthogonal to `e` used as probes: `e`, `e'` and rank-one pieces of each.
fn probe_events(e: &Projector) -> Result<(Vec<Projector>, Vec<Projector>), HilbertError> {
    let d = e.dim();
    let complement = e.complement();
    let mut below = vec![e.clone()];
    for v in e.range_basis()? {
        below.push(Projector::from_orthonormal(d, &[v])?);
    }
    let mut orthogonal = vec![complement.clone(), Projector::zero(d)];
    for v in complement.range_basis()? {
        orthogonal.push(Projector::from_orthonormal(d, &[v])?);
    }
    Ok((below, orthogonal))
}

/// States with `mu(e) = 1`: the given ones that already qualify plus every Lüders update on `e`.
fn states_supported_on(e: &Projector, states: &[DensityState]) -> Result<Vec<DensityState>, HilbertError> {
    let mut out = Vec::new();
    for rho in states {
        let p = rho.probability(e)?;
        if (p - 1.0).abs() <= DENSITY_TOLERANCE {
            out.push(rho.clone());
        }
        if p > ZERO_PROBABILITY {
            out.push(rho.conditioned_on(e)?);
        }
    }
    Ok(out)
}

pub const U_IDEMPOTENT: &str = "U_e U_e x = U_e x";
pub const U_FIXES_EVENT: &str = "U_e e = e";
pub const U_UNIT: &str = "U_e 1 = e";
pub const U_KILLS_ORTHOGONAL: &str = "U_e f = 0 for e _|_ f";
pub const U_FIXES_BELOW: &str = "U_e f = f for e' _|_ f";
pub const U_STATE_INVARIANT: &str = "mu(U_e x) = mu(x) when mu(e) = 1";
pub const U_LUEDERS: &str = "mu(f|e) mu(e) = mu(U_e f)";

/// Residuals of the listed properties of `U_e` over the given samples.
pub fn check_u_properties(
    e: &Projector,
    samples: &[HermitianMatrix],
    states: &[DensityState],
) -> Result<PropertyReport, HilbertError> {
    let d = e.dim();
    let mut report = PropertyReport::default();
    let (below, orthogonal) = probe_events(e)?;

    for x in samples {
        let ux = u_map(e, x)?;
        report.record(U_IDEMPOTENT, u_map(e, &ux)?.distance(&ux));
    }
    report.record(U_FIXES_EVENT, u_map(e, e.as_hermitian())?.distance(e.as_hermitian()));
    report.record(
        U_UNIT,
        u_map(e, &HermitianMatrix::identity(d))?.distance(e.as_hermitian()),
    );
    for f in &orthogonal {
        report.record(U_KILLS_ORTHOGONAL, u_map(e, f.as_hermitian())?.frobenius_norm());
    }
    for f in &below {
        report.record(U_FIXES_BELOW, u_map(e, f.as_hermitian())?.distance(f.as_hermitian()));
    }
    for rho in states_supported_on(e, states)? {
        for x in samples {
            let r = (rho.expectation(&u_map(e, x)?)? - rho.expectation(x)?).abs();
            report.record(U_STATE_INVARIANT, r);
        }
    }
    for rho in states {
        if rho.probability(e)? <= ZERO_PROBABILITY {
            continue;
        }
        for f in below.iter().chain(&orthogonal) {
            let lhs = cond_prob(rho, e, f)? * rho.probability(e)?;
            let rhs = rho.expectation(&u_map(e, f.as_hermitian())?)?;
            report.record(U_LUEDERS, (lhs - rhs).abs());
        }
    }
    Ok(report)
}

pub const T_FIXES_EVENT: &str = "T_e e = e";
pub const T_UNIT: &str = "T_e 1 = e";
pub const T_KILLS_ORTHOGONAL: &str = "T_e f = 0 for e _|_ f";
pub const T_STATE_INVARIANT: &str = "mu(T_e x) = mu(x) when mu(e) = 1";
pub const T_JORDAN_FORM: &str = "(e x + x e)/2 = (x + U_e x - U_e' x)/2";

/// Residuals of the listed properties of `T_e` over the given samples.
pub fn check_t_properties(
    e: &Projector,
    samples: &[HermitianMatrix],
    states: &[DensityState],
) -> Result<PropertyReport, HilbertError> {
    let d = e.dim();
    let mut report = PropertyReport::default();
    let (_, orthogonal) = probe_events(e)?;

    report.record(T_FIXES_EVENT, t_map(e, e.as_hermitian())?.distance(e.as_hermitian()));
    report.record(
        T_UNIT,
        t_map(e, &HermitianMatrix::identity(d))?.distance(e.as_hermitian()),
    );
    for f in &orthogonal {
        report.record(T_KILLS_ORTHOGONAL, t_map(e, f.as_hermitian())?.frobenius_norm());
    }
    for x in samples {
        report.record(T_JORDAN_FORM, t_map(e, x)?.distance(&t_map_from_u(e, x)?));
    }
    for rho in states_supported_on(e, states)? {
        for x in samples {
            let r = (rho.expectation(&t_map(e, x)?)? - rho.expectation(x)?).abs();
            report.record(T_STATE_INVARIANT, r);
        }
    }
    Ok(report)
}

/// One randomized instance: a state, an orthogonal triple, a target event and an observable.
#[derive(Debug, Clone)]
pub struct InterferenceInstance {
    pub rho: DensityState,
    pub triple: EventTriple,
    pub target: Projector,
    pub observable: HermitianMatrix,
}

/// Projector onto a random subspace of rank `1..dim`.
pub fn random_projector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Projector, HilbertError> {
    let u = random_unitary(dim, rng);
    let rank = if dim > 1 { rng.random_range(1..dim) } else { 1 };
    let cols: Vec<_> = (0..rank).map(|k| u.column(k).into_owned()).collect();
    Projector::from_orthonormal(dim, &cols)
}

/// Random pairwise orthogonal triple: columns of a Haar unitary grouped into three ranges
/// whose ranks are positive and sum to at most `dim`.
pub fn random_orthogonal_triple<R: Rng + ?Sized>(
    dim: usize,
    rng: &mut R,
) -> Result<EventTriple, HilbertError> {
    assert!(dim >= 3, "an orthogonal triple of nonzero events needs dimension >= 3");
    let u = random_unitary(dim, rng);
    let used = rng.random_range(3..=dim);
    let ranks = random_composition(used, 3, rng);
    let mut start = 0;
    let mut events = Vec::with_capacity(3);
    for r in ranks {
        let cols: Vec<_> = (start..start + r).map(|k| u.column(k).into_owned()).collect();
        events.push(Projector::from_orthonormal(dim, &cols)?);
        start += r;
    }
    let e3 = events.pop().expect("three events");
    let e2 = events.pop().expect("three events");
    let e1 = events.pop().expect("three events");
    EventTriple::new(e1, e2, e3)
}

pub fn random_density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<DensityState, HilbertError> {
    DensityState::new(random_density_matrix(dim, rng))
}

pub fn random_observable<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<HermitianMatrix, HilbertError> {
    HermitianMatrix::new(random_hermitian(dim, rng))
}

/// Instance `index` of the corpus seeded by `seed`, in dimension `dim`.
pub fn interference_instance(dim: usize, seed: u64, index: u64) -> Result<InterferenceInstance, HilbertError> {
    let mut rng = stream_rng(seed, index);
    Ok(InterferenceInstance {
        rho: random_density(dim, &mut rng)?,
        triple: random_orthogonal_triple(dim, &mut rng)?,
        target: random_projector(dim, &mut rng)?,
        observable: random_observable(dim, &mut rng)?,
    })
}

/// Worst-case residuals over a randomized corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceSummary {
    pub instances: usize,
    pub max_abs_i3: f64,
    pub max_t_additivity: f64,
    pub max_t_form_gap: f64,
    pub max_conditional_state_gap: f64,
}

/// Runs the corpus. Instance `i` has dimension `dims[i % dims.len()]` and stream `i`.
pub fn interference_scan(dims: &[usize], samples: usize, seed: u64) -> Result<InterferenceSummary, HilbertError> {
    assert!(!dims.is_empty());
    let per_instance: Vec<[f64; 4]> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let dim = dims[i % dims.len()];
            let inst = interference_instance(dim, seed, i as u64)?;
            let [e1, e2, e3] = inst.triple.events();
            let i3 = sorkin_i3(&inst.rho, &inst.triple, &inst.target)?.abs();
            let mut t_add: f64 = 0.0;
            let mut t_form: f64 = 0.0;
            for (a, b) in [(e1, e2), (e1, e3), (e2, e3)] {
                t_add = t_add.max(check_t_additivity(a, b, &inst.observable)?);
                t_add = t_add.max(check_t_additivity(a, b, inst.target.as_hermitian())?);
            }
            for e in [e1, e2, e3, &inst.target] {
                t_form = t_form.max(t_map(e, &inst.observable)?.distance(&t_map_from_u(e, &inst.observable)?));
            }
            // mu(.|e) is a state: additive on e1 + e2 and one on the identity.
            let mut cond_gap: f64 = 0.0;
            if inst.rho.probability(&inst.target)? > ZERO_PROBABILITY {
                let c = |f: &Projector| cond_prob(&inst.rho, &inst.target, f);
                let sum = e1.orthogonal_sum(e2)?;
                cond_gap = cond_gap.max((c(&sum)? - c(e1)? - c(e2)?).abs());
                cond_gap = cond_gap.max((c(&Projector::identity(dim))? - 1.0).abs());
            }
            Ok([i3, t_add, t_form, cond_gap])
        })
        .collect::<Result<_, HilbertError>>()?;

    let max_of = |k: usize| per_instance.iter().map(|r| r[k]).fold(0.0, f64::max);
    Ok(InterferenceSummary {
        instances: samples,
        max_abs_i3: max_of(0),
        max_t_additivity: max_of(1),
        max_t_form_gap: max_of(2),
        max_conditional_state_gap: max_of(3),
    })
}

/// A fixed instance with visible second-order interference.
#[derive(Debug, Clone)]
pub struct I2Witness {
    pub psi: DVector<Complex64>,
    pub phi: DVector<Complex64>,
    pub rho: DensityState,
    pub e1: Projector,
    pub e2: Projector,
    pub target: Projector,
    pub value: f64,
}

/// `rho = |psi><psi|` with `psi = (1,1,0)/sqrt2`, target `|phi><phi|` with `phi = (1,1,1)/sqrt3`,
/// and `e1`, `e2` the first two basis projectors. `I2 = 2/3 - 1/6 - 1/6 = 1/3`.
pub fn i2_witness() -> Result<I2Witness, HilbertError> {
    let c = |x: f64| Complex64::new(x, 0.0);
    let psi = DVector::from_vec(vec![c(1.0), c(1.0), c(0.0)]) / c(2f64.sqrt());
    let phi = DVector::from_vec(vec![c(1.0), c(1.0), c(1.0)]) / c(3f64.sqrt());
    let rho = DensityState::pure(&psi)?;
    let e1 = Projector::basis(3, 0);
    let e2 = Projector::basis(3, 1);
    let target = Projector::onto(&phi)?;
    let value = sorkin_i2(&rho, &e1, &e2, &target)?;
    Ok(I2Witness {
        psi,
        phi,
        rho,
        e1,
        e2,
        target,
        value,
    })
}

//! Points of the Grassmann manifold of rank-`N` orthogonal projections in
//! `ℂ^{ν×ν}`, tangent coordinates, and the polar-type retraction with its
//! derivatives.
//!
//! A point keeps its projection `P` together with orthonormal bases `Y` of
//! `ran P` and `Y⊥` of `ker P`. A tangent vector at `P` is stored as its
//! coordinate matrix `B ∈ ℂ^{N×(ν−N)}` and embeds as
//! `ξ = (Y B Y⊥* + Y⊥ B* Y*)/2`, so that `‖ξ‖_X = ‖B‖₁,∞`.

mod basis;
mod na;
mod retraction;

pub use basis::{basis_vectors, complexify, realify};
pub use na::{na_directional, Functional, LinearFunctional, NaComparison};
pub use retraction::{d2retract, d3retract, differential_injectivity, dretract, retract, Direction, RetractionFrame};

use nalgebra::{Complex, ComplexField, DMatrix};

use crate::error::{invalid, Error, Result};
use crate::matnorm::one_inf;
use crate::scalar::{all_finite, cr, czero, CMat, Real};

/// Hermiticity tolerance on ingest.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Idempotency tolerance on ingest.
pub const IDEMPOTENT_TOL: f64 = 1e-12;
/// Trace tolerance on ingest.
pub const TRACE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct GrassmannPoint<T: Real> {
    p: CMat<T>,
    y: CMat<T>,
    y_perp: CMat<T>,
}

/// Residuals of the projection invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionResiduals<T> {
    pub hermitian: T,
    pub idempotent: T,
    pub trace: T,
}

impl<T: Real> ProjectionResiduals<T> {
    pub fn max(&self) -> T {
        self.hermitian.max(self.idempotent).max(self.trace)
    }
}

pub fn projection_residuals<T: Real>(p: &CMat<T>, n: usize) -> ProjectionResiduals<T> {
    let tr = p.trace();
    ProjectionResiduals {
        hermitian: one_inf(&(p - p.adjoint())),
        idempotent: one_inf(&(p * p - p)),
        trace: (tr - cr(T::lit(n as f64))).modulus(),
    }
}

fn hermitian_split<T: Real>(p: &CMat<T>) -> Result<(CMat<T>, CMat<T>)> {
    let nu = p.nrows();
    let eig = p.clone().symmetric_eigen();
    let half = T::lit(0.5);
    let mut hi = Vec::new();
    let mut lo = Vec::new();
    for i in 0..nu {
        let lam = eig.eigenvalues[i];
        if (lam - half).abs() <= T::tol(1e-12) {
            return Err(Error::NotOnManifold(format!("eigenvalue {lam} sits on the 0.5 split")));
        }
        if lam > half {
            hi.push((lam, i));
        } else {
            lo.push((lam, i));
        }
    }
    // descending for the range, ascending for the kernel, for reproducible bases
    hi.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.1.cmp(&b.1))
    });
    lo.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.1.cmp(&b.1))
    });
    let take = |idx: &[(T, usize)]| {
        let mut m = CMat::<T>::zeros(nu, idx.len());
        for (c, &(_, i)) in idx.iter().enumerate() {
            m.set_column(c, &eig.eigenvectors.column(i));
        }
        m
    };
    Ok((take(&hi), take(&lo)))
}

impl<T: Real> GrassmannPoint<T> {
    /// `diag(1,…,1,0,…,0)` with the standard bases.
    pub fn canonical(n: usize, nu: usize) -> Result<Self> {
        if n == 0 || n >= nu {
            return invalid(format!("need 0 < N < ν, got N={n}, ν={nu}"));
        }
        let mut p = CMat::<T>::zeros(nu, nu);
        for i in 0..n {
            p[(i, i)] = cr(T::one());
        }
        let id = CMat::<T>::identity(nu, nu);
        Ok(Self {
            p,
            y: id.columns(0, n).into_owned(),
            y_perp: id.columns(n, nu - n).into_owned(),
        })
    }

    /// Ingests a projection matrix, recovering bases by a Hermitian
    /// eigendecomposition split at 0.5.
    pub fn from_projection(p: CMat<T>) -> Result<Self> {
        let nu = p.nrows();
        if nu != p.ncols() || nu < 2 {
            return Err(Error::DimensionMismatch(format!(
                "projection is {}x{}",
                p.nrows(),
                p.ncols()
            )));
        }
        if !all_finite(&p) {
            return invalid("projection has non-finite entries");
        }
        let herm = one_inf(&(&p - p.adjoint()));
        if herm > T::tol(HERMITIAN_TOL) {
            return Err(Error::NotOnManifold(format!("not Hermitian (residual {herm})")));
        }
        let idem = one_inf(&(&p * &p - &p));
        if idem > T::tol(IDEMPOTENT_TOL) {
            return Err(Error::NotOnManifold(format!("not idempotent (residual {idem})")));
        }
        let (y, y_perp) = hermitian_split(&p)?;
        let n = y.ncols();
        let tr = (p.trace() - cr(T::lit(n as f64))).modulus();
        if tr > T::tol(TRACE_TOL) {
            return Err(Error::NotOnManifold(format!("trace off by {tr}")));
        }
        if n == 0 || n == nu {
            return Err(Error::NotOnManifold(format!("rank {n} outside 0 < N < ν")));
        }
        Ok(Self { p, y, y_perp })
    }

    /// Point spanned by the orthonormal columns of `y`.
    pub fn from_basis(y: CMat<T>) -> Result<Self> {
        let (nu, n) = y.shape();
        if n == 0 || n >= nu {
            return invalid(format!("basis is {nu}x{n}, need 0 < N < ν"));
        }
        if !all_finite(&y) {
            return invalid("basis has non-finite entries");
        }
        let gram = y.adjoint() * &y;
        let dev = one_inf(&(gram - CMat::<T>::identity(n, n)));
        if dev > T::tol(1e-10) {
            return Err(Error::NotOnManifold(format!(
                "basis is not orthonormal (residual {dev})"
            )));
        }
        let p = &y * y.adjoint();
        let (_, y_perp) = hermitian_split(&p)?;
        if y_perp.ncols() != nu - n {
            return Err(Error::NotOnManifold("complement has the wrong dimension".into()));
        }
        Ok(Self { p, y, y_perp })
    }

    pub fn projector(&self) -> &CMat<T> {
        &self.p
    }
    pub fn basis(&self) -> &CMat<T> {
        &self.y
    }
    pub fn complement(&self) -> &CMat<T> {
        &self.y_perp
    }
    /// Rank `N`.
    pub fn rank(&self) -> usize {
        self.y.ncols()
    }
    /// Ambient dimension `ν`.
    pub fn nu(&self) -> usize {
        self.p.nrows()
    }
    /// Real dimension `2N(ν−N)` of the tangent space.
    pub fn tangent_dim(&self) -> usize {
        2 * self.rank() * (self.nu() - self.rank())
    }

    pub fn residuals(&self) -> ProjectionResiduals<T> {
        projection_residuals(&self.p, self.rank())
    }

    pub fn zero_tangent(&self) -> TangentCoord<T> {
        TangentCoord {
            entries: CMat::zeros(self.rank(), self.nu() - self.rank()),
        }
    }

    pub(crate) fn check_anchor(&self, t: &TangentCoord<T>) -> Result<()> {
        if t.entries.nrows() != self.rank() || t.entries.ncols() != self.nu() - self.rank() {
            return Err(Error::AnchorMismatch(format!(
                "coordinates are {}x{}, point expects {}x{}",
                t.entries.nrows(),
                t.entries.ncols(),
                self.rank(),
                self.nu() - self.rank()
            )));
        }
        Ok(())
    }

    /// Embeds tangent coordinates as the Hermitian matrix `ξ` together with
    /// its halves `Y B Y⊥*` and `Y⊥ B* Y*`.
    pub fn embed(&self, t: &TangentCoord<T>) -> Result<TangentEmbedding<T>> {
        self.check_anchor(t)?;
        let upper = &self.y * &t.entries * self.y_perp.adjoint();
        let lower = &self.y_perp * t.entries.adjoint() * self.y.adjoint();
        let half = cr(T::lit(0.5));
        let xi = (&upper + &lower) * half;
        Ok(TangentEmbedding { xi, upper, lower })
    }

    /// Coordinates of an embedded tangent vector: `B = 2 Y* ξ Y⊥`.
    pub fn coordinates(&self, xi: &CMat<T>) -> TangentCoord<T> {
        let two = cr(T::lit(2.0));
        TangentCoord {
            entries: self.y.adjoint() * xi * &self.y_perp * two,
        }
    }
}

/// Tangent vector in the coordinates of its anchor point.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentCoord<T: Real> {
    pub entries: CMat<T>,
}

impl<T: Real> TangentCoord<T> {
    pub fn new(entries: CMat<T>) -> Result<Self> {
        if !all_finite(&entries) {
            return invalid("tangent coordinates have non-finite entries");
        }
        Ok(Self { entries })
    }

    pub fn zeros(n: usize, nu: usize) -> Self {
        Self {
            entries: CMat::zeros(n, nu - n),
        }
    }

    /// `‖ξ‖_X = ‖B‖₁,∞`.
    pub fn norm(&self) -> T {
        one_inf(&self.entries)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            entries: &self.entries + &other.entries,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            entries: &self.entries - &other.entries,
        }
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            entries: &self.entries * cr(s),
        }
    }

    /// Single-entry coordinate `value · E_jk`.
    pub fn unit(n: usize, nu: usize, j: usize, k: usize, value: Complex<T>) -> Self {
        let mut b = DMatrix::from_element(n, nu - n, czero());
        b[(j, k)] = value;
        Self { entries: b }
    }
}

/// `ξ = (upper + lower)/2` with `upper = Y B Y⊥*` and `lower = Y⊥ B* Y*`.
#[derive(Debug, Clone)]
pub struct TangentEmbedding<T: Real> {
    pub xi: CMat<T>,
    pub upper: CMat<T>,
    pub lower: CMat<T>,
}

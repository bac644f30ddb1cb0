//! Non-adjoint evaluation of directional derivatives of `f ∘ R_P`.
//!
//! For the basis pair `η_jk, η̂_jk` one has `η_jk + iη̂_jk = Y⊥ E_kj Y*`, and
//! `d(f∘R)(ξ;η_jk) + i d(f∘R)(ξ;η̂_jk)` equals the derivative along that
//! non-Hermitian direction with every `Y*ζ*` occurrence dropped.

use nalgebra::{Complex, ComplexField};

use super::{GrassmannPoint, RetractionFrame, TangentCoord};
use crate::error::{Error, Result};
use crate::scalar::{c, trace_product, CMat, Real};

/// Scalar function of a `ν×ν` matrix, written as a polynomial in the entries
/// (no conjugates) so that its differential is complex-linear.
pub trait Functional<T: Real> {
    fn value(&self, p: &CMat<T>) -> Complex<T>;
    /// `D` with `df(P; H) = tr(D H)`.
    fn differential(&self, p: &CMat<T>) -> CMat<T>;
    /// `d²f(P; H₁, H₂)`.
    fn second(&self, p: &CMat<T>, h1: &CMat<T>, h2: &CMat<T>) -> Complex<T>;
}

/// `P ↦ tr(D P)`.
#[derive(Debug, Clone)]
pub struct LinearFunctional<T: Real> {
    pub matrix: CMat<T>,
}

impl<T: Real> Functional<T> for LinearFunctional<T> {
    fn value(&self, p: &CMat<T>) -> Complex<T> {
        trace_product(&self.matrix, p)
    }
    fn differential(&self, _p: &CMat<T>) -> CMat<T> {
        self.matrix.clone()
    }
    fn second(&self, _p: &CMat<T>, _h1: &CMat<T>, _h2: &CMat<T>) -> Complex<T> {
        c(T::zero(), T::zero())
    }
}

/// Both evaluation paths for one basis pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NaComparison<T> {
    /// Non-adjoint evaluation along `η_jk + iη̂_jk`.
    pub na: Complex<T>,
    /// `d(f∘R)(ξ;η_jk) + i d(f∘R)(ξ;η̂_jk)`.
    pub pair: Complex<T>,
    pub deviation: T,
}

/// Agreement threshold between the two paths.
pub const NA_TOL: f64 = 1e-9;

/// Compares the two paths for the first derivative, or for the second
/// derivative when `other` supplies the second direction.
pub fn na_directional<T: Real, F: Functional<T>>(
    point: &GrassmannPoint<T>,
    xi: &TangentCoord<T>,
    f: &F,
    j: usize,
    k: usize,
    other: Option<&TangentCoord<T>>,
) -> Result<NaComparison<T>> {
    let (n, nu) = (point.rank(), point.nu());
    if j >= n || k >= nu - n {
        return Err(Error::InvalidInput(format!("basis index ({j},{k}) out of range")));
    }
    let frame = RetractionFrame::from_tangent(point, xi)?;
    let r = frame.projection();
    let df = f.differential(&r);
    let real = point.embed(&TangentCoord::unit(n, nu, j, k, c(T::one(), T::zero())))?;
    let imag = point.embed(&TangentCoord::unit(n, nu, j, k, c(T::zero(), T::one())))?;
    let d_re = frame.direction(&real.xi);
    let d_im = frame.direction(&imag.xi);
    // real.lower = Y⊥ E_kj Y* = η + iη̂
    let d_na = frame.direction_na(&real.lower);
    let i = c(T::zero(), T::one());
    let (na, pair) = match other {
        None => {
            let eval = |d| trace_product(&df, &frame.d1(d));
            (eval(&d_na), eval(&d_re) + i * eval(&d_im))
        }
        Some(z) => {
            let dz = frame.direction(&point.embed(z)?.xi);
            let rz = frame.d1(&dz);
            let eval = |d| f.second(&r, &frame.d1(d), &rz) + trace_product(&df, &frame.d2(d, &dz));
            (eval(&d_na), eval(&d_re) + i * eval(&d_im))
        }
    };
    let deviation = (na - pair).modulus();
    let scale = pair.modulus().max(T::one());
    if deviation > T::tol(NA_TOL) * scale {
        return Err(Error::Consistency(format!(
            "non-adjoint path disagrees at ({j},{k}): {deviation}"
        )));
    }
    Ok(NaComparison { na, pair, deviation })
}

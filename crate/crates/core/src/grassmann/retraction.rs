//! `R_P(ξ) = X Z⁻¹ X*` with `X = (I+ξ)Y` and `Z = I + Y*ξ*ξY`, and its first
//! three derivatives.
//!
//! Every derivative formula is a sum of terms in which a direction `ζ`
//! enters either as `ζY` or as `Y*ζ*`. A [`Direction`] carries both slots
//! separately, which lets the same code evaluate the non-adjoint part
//! (drop the `Y*ζ*` slot) for non-Hermitian directions.

use nalgebra::{DMatrix, DVector};

use super::{basis_vectors, hermitian_split, realify, GrassmannPoint, TangentCoord};
use crate::error::{Error, Result};
use crate::scalar::{all_finite, cr, CMat, Real};

/// Direction `ζ` split into its `ζY` and `Y*ζ*` occurrences.
#[derive(Debug, Clone)]
pub struct Direction<T: Real> {
    /// `ζ Y` (ν×N)
    pub right: CMat<T>,
    /// `Y* ζ*` (N×ν), zero for the non-adjoint part
    pub left: CMat<T>,
}

/// Quantities shared by every derivative of the retraction at `(P, ξ)`.
#[derive(Debug, Clone)]
pub struct RetractionFrame<T: Real> {
    y: CMat<T>,
    x: CMat<T>,
    g: CMat<T>,
    g_half: CMat<T>,
    gx: CMat<T>,
    xg: CMat<T>,
    xi_y: CMat<T>,
    y_xi: CMat<T>,
}

impl<T: Real> RetractionFrame<T> {
    /// Frame for an arbitrary (normally Hermitian tangent) `ν×ν` matrix `ξ`.
    pub fn new(point: &GrassmannPoint<T>, xi: &CMat<T>) -> Result<Self> {
        let nu = point.nu();
        if xi.shape() != (nu, nu) {
            return Err(Error::DimensionMismatch(format!(
                "ξ is {}x{}, expected {nu}x{nu}",
                xi.nrows(),
                xi.ncols()
            )));
        }
        if !all_finite(xi) {
            return Err(Error::InvalidInput("ξ has non-finite entries".into()));
        }
        let y = point.basis().clone();
        let n = y.ncols();
        let xi_y = xi * &y;
        let x = &y + &xi_y;
        let z = CMat::<T>::identity(n, n) + xi_y.adjoint() * &xi_y;
        let eig = z.symmetric_eigen();
        let v = &eig.eigenvectors;
        let inv = DVector::from_fn(n, |i, _| cr(T::one() / eig.eigenvalues[i]));
        let inv_half = DVector::from_fn(n, |i, _| cr(T::one() / eig.eigenvalues[i].sqrt()));
        let g = v * CMat::from_diagonal(&inv) * v.adjoint();
        let g_half = v * CMat::from_diagonal(&inv_half) * v.adjoint();
        let gx = &g * x.adjoint();
        let xg = &x * &g;
        let y_xi = y.adjoint() * xi.adjoint();
        Ok(Self {
            y,
            x,
            g,
            g_half,
            gx,
            xg,
            xi_y,
            y_xi,
        })
    }

    pub fn from_tangent(point: &GrassmannPoint<T>, t: &TangentCoord<T>) -> Result<Self> {
        let e = point.embed(t)?;
        Self::new(point, &e.xi)
    }

    /// `R_P(ξ)` as a matrix.
    pub fn projection(&self) -> CMat<T> {
        let yn = &self.x * &self.g_half;
        &yn * yn.adjoint()
    }

    /// `R_P(ξ)` with range basis `X Z^{-1/2}`.
    pub fn retracted_point(&self) -> Result<GrassmannPoint<T>> {
        let y = &self.x * &self.g_half;
        let p = &y * y.adjoint();
        let (_, y_perp) = hermitian_split(&p)?;
        if y_perp.ncols() != p.nrows() - y.ncols() {
            return Err(Error::NotOnManifold("retraction lost rank".into()));
        }
        Ok(GrassmannPoint { p, y, y_perp })
    }

    pub fn direction(&self, zeta: &CMat<T>) -> Direction<T> {
        Direction {
            right: zeta * &self.y,
            left: self.y.adjoint() * zeta.adjoint(),
        }
    }

    /// Direction with the `Y*ζ*` slot removed.
    pub fn direction_na(&self, zeta: &CMat<T>) -> Direction<T> {
        let n = self.y.ncols();
        Direction {
            right: zeta * &self.y,
            left: CMat::zeros(n, zeta.nrows()),
        }
    }

    /// `Y*(ζ*ξ + ξ*ζ)Y`
    fn mixed(&self, d: &Direction<T>) -> CMat<T> {
        &d.left * &self.xi_y + &self.y_xi * &d.right
    }

    /// `dR(ξ; ζ)`
    pub fn d1(&self, d: &Direction<T>) -> CMat<T> {
        let m = self.mixed(d);
        &d.right * &self.gx - &self.xg * m * &self.gx + &self.xg * &d.left
    }

    fn r_tilde(&self, d1: &Direction<T>, m1: &CMat<T>, d2: &Direction<T>, m2: &CMat<T>) -> CMat<T> {
        let g = &self.g;
        let a1g = &d1.right * g;
        let xgm1g = &self.xg * m1 * g;
        -(&a1g * m2 * &self.gx) + &a1g * &d2.left - &self.xg * &d1.left * &d2.right * &self.gx + &xgm1g * m2 * &self.gx
            - xgm1g * &d2.left
    }

    /// `d²R(ξ; ζ₁, ζ₂)`
    pub fn d2(&self, d1: &Direction<T>, d2: &Direction<T>) -> CMat<T> {
        let m1 = self.mixed(d1);
        let m2 = self.mixed(d2);
        self.r_tilde(d1, &m1, d2, &m2) + self.r_tilde(d2, &m2, d1, &m1)
    }

    fn r_hat(&self, d: [&Direction<T>; 3], m: [&CMat<T>; 3]) -> CMat<T> {
        let g = &self.g;
        let (gx, xg) = (&self.gx, &self.xg);
        let a1g = &d[0].right * g;
        let xgc1a2g = xg * &d[0].left * &d[1].right * g;
        let xgm1g = xg * m[0] * g;
        let xgm1gm2g = &xgm1g * m[1] * g;
        let a1gm2g = &a1g * m[1] * g;
        -(&a1g * &d[1].left * &d[2].right * gx) + &a1gm2g * m[2] * gx - &a1gm2g * &d[2].left + &xgc1a2g * m[2] * gx
            - &xgc1a2g * &d[2].left
            + &xgm1g * &d[1].left * &d[2].right * gx
            - &xgm1gm2g * m[2] * gx
            + &xgm1gm2g * &d[2].left
    }

    /// `d³R(ξ; ζ₁, ζ₂, ζ₃)`
    pub fn d3(&self, d1: &Direction<T>, d2: &Direction<T>, d3: &Direction<T>) -> CMat<T> {
        let ds = [d1, d2, d3];
        let ms = [self.mixed(d1), self.mixed(d2), self.mixed(d3)];
        const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let nu = self.x.nrows();
        let mut out = CMat::zeros(nu, nu);
        for p in PERMS {
            out += self.r_hat([ds[p[0]], ds[p[1]], ds[p[2]]], [&ms[p[0]], &ms[p[1]], &ms[p[2]]]);
        }
        out
    }
}

/// `R_P(ξ)` for tangent coordinates `xi`.
pub fn retract<T: Real>(point: &GrassmannPoint<T>, xi: &TangentCoord<T>) -> Result<GrassmannPoint<T>> {
    RetractionFrame::from_tangent(point, xi)?.retracted_point()
}

fn frame_and_dirs<T: Real>(
    point: &GrassmannPoint<T>,
    xi: &TangentCoord<T>,
    zetas: &[&TangentCoord<T>],
) -> Result<(RetractionFrame<T>, Vec<Direction<T>>)> {
    let frame = RetractionFrame::from_tangent(point, xi)?;
    let dirs = zetas
        .iter()
        .map(|z| point.embed(z).map(|e| frame.direction(&e.xi)))
        .collect::<Result<Vec<_>>>()?;
    Ok((frame, dirs))
}

pub fn dretract<T: Real>(point: &GrassmannPoint<T>, xi: &TangentCoord<T>, zeta: &TangentCoord<T>) -> Result<CMat<T>> {
    let (f, d) = frame_and_dirs(point, xi, &[zeta])?;
    Ok(f.d1(&d[0]))
}

pub fn d2retract<T: Real>(
    point: &GrassmannPoint<T>,
    xi: &TangentCoord<T>,
    z1: &TangentCoord<T>,
    z2: &TangentCoord<T>,
) -> Result<CMat<T>> {
    let (f, d) = frame_and_dirs(point, xi, &[z1, z2])?;
    Ok(f.d2(&d[0], &d[1]))
}

pub fn d3retract<T: Real>(
    point: &GrassmannPoint<T>,
    xi: &TangentCoord<T>,
    z1: &TangentCoord<T>,
    z2: &TangentCoord<T>,
    z3: &TangentCoord<T>,
) -> Result<CMat<T>> {
    let (f, d) = frame_and_dirs(point, xi, &[z1, z2, z3])?;
    Ok(f.d3(&d[0], &d[1], &d[2]))
}

/// Smallest singular value of `dR_P(ξ)` written in basis coordinates at the
/// anchor (inputs) and at `R_P(ξ)` (outputs).
pub fn differential_injectivity<T: Real>(point: &GrassmannPoint<T>, xi: &TangentCoord<T>) -> Result<T> {
    let frame = RetractionFrame::from_tangent(point, xi)?;
    let q = frame.retracted_point()?;
    let basis = basis_vectors(point);
    let dim = basis.len();
    let mut m = DMatrix::<T>::zeros(dim, dim);
    for (col, e) in basis.iter().enumerate() {
        let dr = frame.d1(&frame.direction(&point.embed(e)?.xi));
        let coords = q.coordinates(&dr);
        m.set_column(col, &realify(&coords.entries));
    }
    let sv = m.singular_values();
    Ok(sv.iter().fold(T::lit(f64::INFINITY), |a, &b| a.min(b)))
}

use nalgebra::DVector;

use super::{GrassmannPoint, TangentCoord};
use crate::scalar::{c, CMat, Real};

/// Tangent basis `η_q, η̂_q` with `q` running row-major over `(j, k)`:
/// index `2q` has `B = E_jk`, index `2q+1` has `B = iE_jk`.
pub fn basis_vectors<T: Real>(point: &GrassmannPoint<T>) -> Vec<TangentCoord<T>> {
    let (n, nu) = (point.rank(), point.nu());
    let mut out = Vec::with_capacity(point.tangent_dim());
    for j in 0..n {
        for k in 0..nu - n {
            out.push(TangentCoord::unit(n, nu, j, k, c(T::one(), T::zero())));
            out.push(TangentCoord::unit(n, nu, j, k, c(T::zero(), T::one())));
        }
    }
    out
}

/// Real coordinates in the basis order of [`basis_vectors`].
pub fn realify<T: Real>(b: &CMat<T>) -> DVector<T> {
    let (r, k) = b.shape();
    DVector::from_fn(2 * r * k, |i, _| {
        let z = b[(i / 2 / k, (i / 2) % k)];
        if i % 2 == 0 {
            z.re
        } else {
            z.im
        }
    })
}

pub fn complexify<T: Real>(v: &DVector<T>, rows: usize, cols: usize) -> CMat<T> {
    CMat::from_fn(rows, cols, |j, k| {
        let q = j * cols + k;
        c(v[2 * q], v[2 * q + 1])
    })
}

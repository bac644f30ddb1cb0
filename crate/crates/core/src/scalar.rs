//! Scalar abstraction shared by every numerical routine in the crate.

use nalgebra::{Complex, DMatrix, RealField};
use num_traits::ToPrimitive;

/// Real floating-point scalar the core is generic over (`f32`, `f64`).
pub trait Real: RealField + Copy + ToPrimitive {
    /// Converts an `f64` literal.
    fn lit(x: f64) -> Self {
        nalgebra::convert(x)
    }

    /// Rescales a tolerance written for `f64` to this type's precision.
    fn tol(x: f64) -> Self {
        let ratio = Self::default_epsilon().to_f64().unwrap_or(f64::EPSILON) / f64::EPSILON;
        Self::lit(x * ratio.max(1.0))
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type Cplx<T> = Complex<T>;
pub type CMat<T> = DMatrix<Complex<T>>;
pub type RMat<T> = DMatrix<T>;

pub(crate) fn c<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

pub(crate) fn cr<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

#[cfg(test)]
pub(crate) fn cl<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

pub(crate) fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

pub fn trace_product<T: Real>(a: &CMat<T>, b: &CMat<T>) -> Complex<T> {
    // tr(A B) without forming the product
    let mut s = czero::<T>();
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            s += a[(i, k)] * b[(k, i)];
        }
    }
    s
}

pub(crate) fn all_finite<T: Real>(m: &CMat<T>) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

//! Gram-Schmidt orthonormalization of a localized, nearly orthonormal family,
//! with the error chain `ε₀ → ε₁…ε₄` and propagation of the measured
//! constants to the orthonormalized basis.

use nalgebra::{ComplexField, DMatrix};

use crate::conditions::ConditionReport;
use crate::error::{invalid, Error, Result};
use crate::integrals::{transform_basis, IntegralSet};
use crate::matnorm::{norm_weighted, one_inf, WeightSet};
use crate::scalar::{all_finite, c, cr, CMat, RMat, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonChain<T> {
    pub eps0: T,
    pub eps1: T,
    pub eps2: T,
    pub eps3: T,
    pub eps4: T,
}

/// Requires `0 ≤ ε₀ < 1/2` so that `ε₁ < 1`.
pub fn epsilon_chain<T: Real>(eps0: T) -> Result<EpsilonChain<T>> {
    if !(eps0 >= T::zero()) || !eps0.is_finite() {
        return invalid(format!("eps0 must be finite and non-negative, got {eps0}"));
    }
    let one = T::one();
    if eps0 >= one {
        return Err(Error::HypothesisViolation(format!("eps0 = {eps0} is not below 1")));
    }
    let eps1 = eps0 / (one - eps0);
    if eps1 >= one {
        return Err(Error::HypothesisViolation(format!(
            "eps1 = {eps1} is not below 1 (eps0 must be below 1/2)"
        )));
    }
    let q = one - eps1;
    let eps2 = eps0 / (one - eps0) / q;
    let eps3 = T::lit(4.0) * eps2 / q.powi(3)
        + T::lit(6.0) * eps2.powi(2) / q.powi(2)
        + T::lit(4.0) * eps2.powi(3) / q
        + eps2.powi(4);
    let eps4 = (one / (q * q) - one).max(one - one / ((one + eps1) * (one + eps1)));
    Ok(EpsilonChain {
        eps0,
        eps1,
        eps2,
        eps3,
        eps4,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrthoResult<T: Real> {
    /// Row `j` holds the coefficients of `φ_j` in the input family.
    pub transform: CMat<T>,
    /// Strictly lower triangular `s_jk`, so that `C = diag(1/‖φ̃_j‖) − S`.
    pub correction: CMat<T>,
    /// `‖φ̃_j‖`
    pub norms: Vec<T>,
    pub chain: EpsilonChain<T>,
    /// `‖S‖_{w,1,∞}`
    pub s_weighted: T,
}

/// Tolerance on `C̄ A Cᵀ = I`.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

/// `conj(C) A Cᵀ`, the Gram matrix of the new family.
pub fn transformed_gram<T: Real>(c_mat: &CMat<T>, gram: &CMat<T>) -> CMat<T> {
    c_mat.map(|z| z.conj()) * gram * c_mat.transpose()
}

pub fn schmidt<T: Real>(gram: &CMat<T>, weights: &WeightSet<T>) -> Result<OrthoResult<T>> {
    let nu = gram.nrows();
    if gram.ncols() != nu || nu == 0 {
        return Err(Error::DimensionMismatch("Gram matrix must be square".into()));
    }
    if weights.dim() != nu {
        return Err(Error::DimensionMismatch(format!(
            "weights are {0}x{0}, Gram matrix is {nu}x{nu}",
            weights.dim()
        )));
    }
    if !all_finite(gram) {
        return invalid("Gram matrix has non-finite entries");
    }
    if one_inf(&(gram - gram.adjoint())) > T::tol(1e-12) * one_inf(gram).max(T::one()) {
        return invalid("Gram matrix is not Hermitian");
    }
    for j in 0..nu {
        if (gram[(j, j)] - cr(T::one())).modulus() > T::tol(1e-10) {
            return Err(Error::HypothesisViolation(format!(
                "Gram diagonal entry {j} is not 1 (family not normalized)"
            )));
        }
    }
    if gram.clone().cholesky().is_none() {
        return Err(Error::HypothesisViolation(
            "Gram matrix is not positive definite".into(),
        ));
    }
    let eps0 = norm_weighted(&(gram - CMat::identity(nu, nu)), weights)?;
    let chain = epsilon_chain(eps0)?;

    let mut cm = CMat::zeros(nu, nu);
    let mut s = CMat::zeros(nu, nu);
    let mut norms = Vec::with_capacity(nu);
    for j in 0..nu {
        let (x, norm2) = if j == 0 {
            (CMat::zeros(0, 1), gram[(0, 0)].re)
        } else {
            let block = gram.view((0, 0), (j, j)).into_owned();
            let rhs = gram.view((0, j), (j, 1)).into_owned();
            let chol = block
                .cholesky()
                .ok_or_else(|| Error::HypothesisViolation(format!("leading block {j} is not positive definite")))?;
            let x = chol.solve(&rhs);
            let proj = (rhs.adjoint() * &x)[(0, 0)];
            (x, gram[(j, j)].re - proj.re)
        };
        if !(norm2 > T::zero()) {
            return Err(Error::HypothesisViolation(format!(
                "orbital {j} is linearly dependent on its predecessors"
            )));
        }
        let norm = norm2.sqrt();
        let inv = T::one() / norm;
        cm[(j, j)] = c(inv, T::zero());
        for k in 0..j {
            let sk = x[(k, 0)] * cr(inv);
            s[(j, k)] = sk;
            cm[(j, k)] = -sk;
        }
        norms.push(norm);
    }
    let s_weighted = norm_weighted(&s, weights)?;
    let dev = one_inf(&(transformed_gram(&cm, gram) - CMat::identity(nu, nu)));
    if dev > T::tol(ORTHONORMAL_TOL) {
        return Err(Error::Consistency(format!("orthonormality residual {dev}")));
    }
    let slack = T::tol(1e-12);
    if let Some((j, n)) = norms
        .iter()
        .enumerate()
        .find(|(_, n)| (**n - T::one()).abs() > chain.eps1 + slack)
    {
        return Err(Error::Consistency(format!(
            "norm of orbital {j} is {n}, outside 1 ± eps1"
        )));
    }
    if s_weighted > chain.eps2 + slack {
        return Err(Error::Consistency(format!(
            "weighted norm of S is {s_weighted}, above eps2 = {}",
            chain.eps2
        )));
    }
    Ok(OrthoResult {
        transform: cm,
        correction: s,
        norms,
        chain,
        s_weighted,
    })
}

/// `A' = Σ_m (Ã')^m`, where `Ã'` holds the off-diagonal Gram moduli.
/// Terms are summed until their weighted norm drops below `1e-16`.
pub fn comparison_matrix<T: Real>(gram: &CMat<T>, weights: &WeightSet<T>) -> Result<RMat<T>> {
    let nu = gram.nrows();
    let off = RMat::from_fn(nu, nu, |k, l| if k == l { T::zero() } else { gram[(k, l)].modulus() });
    let mut sum = RMat::identity(nu, nu);
    let mut term = RMat::identity(nu, nu);
    for _ in 0..100_000 {
        term = &term * &off;
        sum += &term;
        if norm_weighted(&term, weights)? < T::lit(1e-16) {
            return Ok(sum);
        }
    }
    Err(Error::HypothesisViolation(
        "Neumann series for the comparison matrix does not converge".into(),
    ))
}

/// The constants the certificate consumes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantSet<T> {
    pub eps_tilde: T,
    pub c_tilde: T,
    pub c_hat: T,
    pub c_check: T,
    pub c_breve: T,
    pub eps: T,
    pub delta: T,
    pub gamma: T,
}

impl<T: Real> ConstantSet<T> {
    pub fn from_report(r: &ConditionReport<T>) -> Self {
        Self {
            eps_tilde: r.lmo.eps_tilde,
            c_tilde: r.lmo.c_tilde,
            c_hat: r.lmo.c_hat,
            c_check: r.lmo.c_check,
            c_breve: r.ni.c_breve,
            eps: r.oi.eps,
            delta: r.oi.delta,
            gamma: r.oi.gamma,
        }
    }

    /// Every upper-bound constant is at most its counterpart in `bound`, and
    /// the gap is at least the predicted one.
    pub fn dominated_by(&self, bound: &Self, slack: T) -> Vec<&'static str> {
        let mut bad = Vec::new();
        let pairs = [
            ("eps_tilde", self.eps_tilde, bound.eps_tilde),
            ("c_tilde", self.c_tilde, bound.c_tilde),
            ("c_hat", self.c_hat, bound.c_hat),
            ("c_check", self.c_check, bound.c_check),
            ("c_breve", self.c_breve, bound.c_breve),
            ("eps", self.eps, bound.eps),
            ("delta", self.delta, bound.delta),
        ];
        for (name, got, max) in pairs {
            if got > max + slack * max.abs().max(T::one()) {
                bad.push(name);
            }
        }
        if self.gamma < bound.gamma - slack * bound.gamma.abs().max(T::one()) {
            bad.push("gamma");
        }
        bad
    }
}

/// Constants of the orthonormalized basis predicted from those of the input
/// family.
pub fn propagate_constants<T: Real>(primed: &ConstantSet<T>, chain: &EpsilonChain<T>) -> ConstantSet<T> {
    let one = T::one();
    let two = T::lit(2.0);
    let q = one - chain.eps1;
    let (e2, e3, e4) = (chain.eps2, chain.eps3, chain.eps4);
    let lin = two * e2 / q + e2 * e2;
    let quart = one / q.powi(4) + e3;
    let sq = one / (q * q) + lin;
    let p = primed;
    let mixed = |x: T| {
        x / (q * q) + lin * (p.c_check + p.c_breve) + two * e4 * p.eps_tilde / (q * q) + e3 * (p.c_tilde + p.c_hat)
    };
    ConstantSet {
        eps_tilde: p.eps_tilde / q.powi(4) + e3 * p.c_tilde,
        c_tilde: quart * p.c_tilde,
        c_hat: quart * p.c_hat,
        c_check: sq * p.c_check,
        c_breve: sq * p.c_breve,
        eps: mixed(p.eps),
        delta: mixed(p.delta),
        gamma: p.gamma / ((one + chain.eps1) * (one + chain.eps1))
            - two * lin * (p.c_check + p.c_breve)
            - two * e4 * (p.c_tilde + two * p.c_hat) / (q * q)
            - two * e3 * (p.c_tilde + p.c_hat),
    }
}

/// Orthonormalizes and re-expresses the integrals in the new basis.
pub fn orthogonalize_pipeline<T: Real>(
    set: &IntegralSet<T>,
    gram: &CMat<T>,
    weights: &WeightSet<T>,
) -> Result<(IntegralSet<T>, OrthoResult<T>)> {
    if gram.nrows() != set.nu() {
        return Err(Error::DimensionMismatch(format!(
            "Gram matrix is {0}x{0}, integrals have ν={1}",
            gram.nrows(),
            set.nu()
        )));
    }
    let res = schmidt(gram, weights)?;
    let out = transform_basis(set, &res.transform)?;
    Ok((out, res))
}

/// Lower-triangular check of span preservation: `C` has a positive real
/// diagonal and nothing above it.
pub fn preserves_leading_spans<T: Real>(c_mat: &DMatrix<nalgebra::Complex<T>>) -> bool {
    let n = c_mat.nrows();
    (0..n).all(|j| c_mat[(j, j)].re > T::zero() && c_mat[(j, j)].im == T::zero())
        && (0..n).all(|j| (j + 1..n).all(|k| c_mat[(j, k)].modulus() == T::zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cl;

    #[test]
    fn chain_worked_example() {
        let ch = epsilon_chain(0.1f64).unwrap();
        assert!((ch.eps1 - 1.0 / 9.0).abs() < 1e-15);
        assert!((ch.eps2 - 1.0 / 8.0).abs() < 1e-15);
        assert!((ch.eps4 - 17.0 / 64.0).abs() < 1e-15);
        assert!(epsilon_chain(1.0f64).is_err());
    }

    #[test]
    fn two_by_two_example() {
        let gram = DMatrix::from_row_slice(2, 2, &[cl(1.0, 0.0), cl(0.1, 0.0), cl(0.1, 0.0), cl(1.0, 0.0)]);
        let w = WeightSet::new(DMatrix::from_row_slice(2, 2, &[2.0, 2.0, 2.0, 2.0])).unwrap();
        let r = schmidt(&gram, &w).unwrap();
        assert!((r.norms[1] - 0.99f64.sqrt()).abs() < 1e-15);
        let s = 0.99f64.sqrt();
        assert!((r.transform[(1, 0)].re + 0.1 / s).abs() < 1e-15);
        assert!((r.transform[(1, 1)].re - 1.0 / s).abs() < 1e-15);
        assert!(preserves_leading_spans(&r.transform));
    }

    #[test]
    fn identity_gram_is_fixed() {
        let w = WeightSet::new(DMatrix::from_row_slice(2, 2, &[2.0, 2.0, 2.0, 2.0])).unwrap();
        let r = schmidt(&CMat::<f64>::identity(2, 2), &w).unwrap();
        assert_eq!(r.transform, CMat::identity(2, 2));
        assert_eq!(r.chain.eps0, 0.0);
    }
}

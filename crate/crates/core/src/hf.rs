//! Hartree-Fock energy on the Grassmann manifold and the derivatives of
//! `ξ ↦ 𝓔(R_{P⁰}(ξ))` in tangent coordinates.

use log::warn;
use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::grassmann::{basis_vectors, Functional, GrassmannPoint, RetractionFrame, TangentCoord};
use crate::integrals::IntegralSet;
use crate::matnorm::one_inf;
use crate::scalar::{c, czero, trace_product, CMat, RMat, Real};

/// Imaginary residue above this (relative) triggers a warning.
pub const IMAG_WARN: f64 = 1e-10;
/// Imaginary residue above this (relative) is an error.
pub const IMAG_ERROR: f64 = 1e-6;

pub(crate) fn real_part<T: Real>(z: Complex<T>, what: &str) -> Result<T> {
    let scale = z.re.abs().max(T::one());
    let im = z.im.abs();
    if im > T::tol(IMAG_ERROR) * scale {
        return Err(Error::Consistency(format!("{what} has imaginary part {im}")));
    }
    if im > T::tol(IMAG_WARN) * scale {
        warn!("{what} has imaginary residue {im}");
    }
    Ok(z.re)
}

/// `𝓔 = 𝓣 + 𝓥 + 𝓖̃ + 𝓖̂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown<T> {
    pub total: T,
    pub kinetic: T,
    pub nuclear: T,
    pub coulomb: T,
    pub exchange: T,
}

/// Two-electron part of the Fock map as a `ν²×ν²` matrix acting on
/// row-major vectorized matrices: `G(H)_kj = Σ_lm H_lm ([kj|ml] − [kl|mj])`.
#[derive(Debug, Clone)]
pub struct TwoElectronKernel<T: Real> {
    nu: usize,
    k: CMat<T>,
}

impl<T: Real> TwoElectronKernel<T> {
    pub fn new(set: &IntegralSet<T>) -> Self {
        let nu = set.nu();
        let eri = set.eri();
        let k = DMatrix::from_fn(nu * nu, nu * nu, |row, col| {
            let (kk, j) = (row / nu, row % nu);
            let (l, m) = (col / nu, col % nu);
            eri.get(kk, j, m, l) - eri.get(kk, l, m, j)
        });
        Self { nu, k }
    }

    pub fn apply(&self, h: &CMat<T>) -> CMat<T> {
        let nu = self.nu;
        let v = CMat::from_fn(nu * nu, 1, |i, _| h[(i / nu, i % nu)]);
        let out = &self.k * v;
        CMat::from_fn(nu, nu, |r, cc| out[(r * nu + cc, 0)])
    }
}

/// Hartree-Fock model bound to one integral set.
#[derive(Debug, Clone)]
pub struct HartreeFock<'a, T: Real> {
    set: &'a IntegralSet<T>,
    kernel: TwoElectronKernel<T>,
}

impl<'a, T: Real> HartreeFock<'a, T> {
    pub fn new(set: &'a IntegralSet<T>) -> Self {
        Self {
            set,
            kernel: TwoElectronKernel::new(set),
        }
    }

    pub fn integrals(&self) -> &IntegralSet<T> {
        self.set
    }

    pub fn kernel(&self) -> &TwoElectronKernel<T> {
        &self.kernel
    }

    fn check_dim(&self, m: &CMat<T>) -> Result<()> {
        let nu = self.set.nu();
        if m.shape() != (nu, nu) {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{}, integrals have ν={nu}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(())
    }

    fn check_point(&self, p: &GrassmannPoint<T>) -> Result<()> {
        self.check_dim(p.projector())?;
        if p.rank() != self.set.n_elec() {
            return Err(Error::DimensionMismatch(format!(
                "point has rank {}, integrals have N={}",
                p.rank(),
                self.set.n_elec()
            )));
        }
        Ok(())
    }

    /// `F_kj = h_kj + Σ_lm p_lm ([kj|ml] − [kl|mj])` for any matrix `P`.
    pub fn fock_of(&self, p: &CMat<T>) -> CMat<T> {
        self.set.core_hamiltonian() + self.kernel.apply(p)
    }

    pub fn fock(&self, p: &GrassmannPoint<T>) -> Result<CMat<T>> {
        self.check_point(p)?;
        Ok(self.fock_of(p.projector()))
    }

    /// `tr(hP) + ½ tr(P G(P))` without any realness check.
    pub fn energy_of(&self, p: &CMat<T>) -> Complex<T> {
        let half = c(T::lit(0.5), T::zero());
        trace_product(self.set.core_hamiltonian(), p) + half * trace_product(&self.kernel.apply(p), p)
    }

    pub fn energy(&self, p: &GrassmannPoint<T>) -> Result<EnergyBreakdown<T>> {
        self.check_point(p)?;
        let pm = p.projector();
        let nu = self.set.nu();
        let eri = self.set.eri();
        let kinetic = trace_product(pm, self.set.kinetic());
        let mut nuclear = czero();
        for a in self.set.attraction() {
            nuclear -= trace_product(pm, a);
        }
        let mut coul = CMat::zeros(nu, nu);
        let mut exch = CMat::zeros(nu, nu);
        for k in 0..nu {
            for j in 0..nu {
                let (mut sc, mut sx) = (czero(), czero());
                for l in 0..nu {
                    for m in 0..nu {
                        sc += pm[(l, m)] * eri.get(k, j, m, l);
                        sx += pm[(l, m)] * eri.get(k, l, m, j);
                    }
                }
                coul[(k, j)] = sc;
                exch[(k, j)] = sx;
            }
        }
        let half = T::lit(0.5);
        Ok(EnergyBreakdown {
            total: real_part(self.energy_of(pm), "energy")?,
            kinetic: real_part(kinetic, "kinetic energy")?,
            nuclear: real_part(nuclear, "nuclear energy")?,
            coulomb: real_part(trace_product(pm, &coul), "coulomb energy")? * half,
            exchange: -real_part(trace_product(pm, &exch), "exchange energy")? * half,
        })
    }

    fn frame(&self, anchor: &GrassmannPoint<T>, xi: &TangentCoord<T>) -> Result<RetractionFrame<T>> {
        self.check_point(anchor)?;
        anchor.check_anchor(xi)?;
        RetractionFrame::from_tangent(anchor, xi)
    }

    /// Component `(j, k)` is `d(𝓔∘R)(ξ;η_jk) + i d(𝓔∘R)(ξ;η̂_jk)`.
    pub fn gradient(&self, anchor: &GrassmannPoint<T>, xi: &TangentCoord<T>) -> Result<CMat<T>> {
        let frame = self.frame(anchor, xi)?;
        let f = self.fock_of(&frame.projection());
        let (n, nu) = (anchor.rank(), anchor.nu());
        let basis = basis_vectors(anchor);
        let mut out = CMat::zeros(n, nu - n);
        for j in 0..n {
            for k in 0..nu - n {
                let q = j * (nu - n) + k;
                let mut parts = [T::zero(); 2];
                for (r, part) in parts.iter_mut().enumerate() {
                    let d = frame.direction(&anchor.embed(&basis[2 * q + r])?.xi);
                    *part = real_part(trace_product(&f, &frame.d1(&d)), "gradient component")?;
                }
                out[(j, k)] = c(parts[0], parts[1]);
            }
        }
        Ok(out)
    }

    /// Same components, each from one non-adjoint evaluation along
    /// `η_jk + iη̂_jk`.
    pub fn gradient_na(&self, anchor: &GrassmannPoint<T>, xi: &TangentCoord<T>) -> Result<CMat<T>> {
        let frame = self.frame(anchor, xi)?;
        let f = self.fock_of(&frame.projection());
        let (n, nu) = (anchor.rank(), anchor.nu());
        let mut out = CMat::zeros(n, nu - n);
        for j in 0..n {
            for k in 0..nu - n {
                let e = anchor.embed(&TangentCoord::unit(n, nu, j, k, c(T::one(), T::zero())))?;
                out[(j, k)] = trace_product(&f, &frame.d1(&frame.direction_na(&e.lower)));
            }
        }
        Ok(out)
    }

    /// `F'(ξ)ζ`: component `(j, k)` is `d²(𝓔∘R)(ξ;η_jk,ζ) + i d²(𝓔∘R)(ξ;η̂_jk,ζ)`.
    pub fn hessian_apply(
        &self,
        anchor: &GrassmannPoint<T>,
        xi: &TangentCoord<T>,
        zeta: &TangentCoord<T>,
    ) -> Result<CMat<T>> {
        let frame = self.frame(anchor, xi)?;
        anchor.check_anchor(zeta)?;
        let f = self.fock_of(&frame.projection());
        let dz = frame.direction(&anchor.embed(zeta)?.xi);
        let gz = self.kernel.apply(&frame.d1(&dz));
        let (n, nu) = (anchor.rank(), anchor.nu());
        let basis = basis_vectors(anchor);
        let mut out = CMat::zeros(n, nu - n);
        for j in 0..n {
            for k in 0..nu - n {
                let q = j * (nu - n) + k;
                let mut parts = [T::zero(); 2];
                for (r, part) in parts.iter_mut().enumerate() {
                    let d = frame.direction(&anchor.embed(&basis[2 * q + r])?.xi);
                    let v = trace_product(&gz, &frame.d1(&d)) + trace_product(&f, &frame.d2(&d, &dz));
                    *part = real_part(v, "hessian component")?;
                }
                out[(j, k)] = c(parts[0], parts[1]);
            }
        }
        Ok(out)
    }

    /// Realified `F'(ξ)` in the basis order of [`basis_vectors`].
    pub fn hessian_matrix(&self, anchor: &GrassmannPoint<T>, xi: &TangentCoord<T>) -> Result<RMat<T>> {
        let frame = self.frame(anchor, xi)?;
        let f = self.fock_of(&frame.projection());
        let dirs = basis_vectors(anchor)
            .iter()
            .map(|b| anchor.embed(b).map(|e| frame.direction(&e.xi)))
            .collect::<Result<Vec<_>>>()?;
        let dr: Vec<CMat<T>> = dirs.iter().map(|d| frame.d1(d)).collect();
        let gr: Vec<CMat<T>> = dr.iter().map(|m| self.kernel.apply(m)).collect();
        let dim = dirs.len();
        let mut h = RMat::zeros(dim, dim);
        for row in 0..dim {
            for col in 0..dim {
                let v = trace_product(&gr[col], &dr[row]) + trace_product(&f, &frame.d2(&dirs[row], &dirs[col]));
                h[(row, col)] = real_part(v, "hessian entry")?;
            }
        }
        Ok(h)
    }
}

impl<T: Real> Functional<T> for HartreeFock<'_, T> {
    fn value(&self, p: &CMat<T>) -> Complex<T> {
        self.energy_of(p)
    }
    fn differential(&self, p: &CMat<T>) -> CMat<T> {
        self.fock_of(p)
    }
    fn second(&self, _p: &CMat<T>, h1: &CMat<T>, h2: &CMat<T>) -> Complex<T> {
        trace_product(&self.kernel.apply(h2), h1)
    }
}

/// `Σ_{j∈S} p_jj`.
pub fn population<T: Real>(p: &GrassmannPoint<T>, subset: &[usize]) -> Result<T> {
    let nu = p.nu();
    let mut s = czero();
    for &j in subset {
        if j >= nu {
            return Err(Error::InvalidInput(format!("orbital index {j} out of range")));
        }
        s += p.projector()[(j, j)];
    }
    real_part(s, "population")
}

/// `‖F(P)P − PF(P)‖₁,∞`.
pub fn commutator_residual<T: Real>(hf: &HartreeFock<'_, T>, p: &GrassmannPoint<T>) -> Result<T> {
    let f = hf.fock(p)?;
    let pm = p.projector();
    Ok(one_inf(&(&f * pm - pm * &f)))
}

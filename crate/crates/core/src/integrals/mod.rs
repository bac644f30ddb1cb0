//! One- and two-electron integrals in a finite orbital basis.
//!
//! Matrix entry `(a, b)` always means `⟨φ_a, O φ_b⟩` (first index
//! conjugated). The two-electron tensor entry `(j, k, l, m)` is
//! `[jk|lm] = ∫∫ φ_j*(x) φ_k(x) |x−y|⁻¹ φ_l*(y) φ_m(y)`.

mod synthetic;

pub use synthetic::{generate_synthetic, SyntheticParams};

use nalgebra::{Complex, ComplexField};

use crate::error::{invalid, Error, Result};
use crate::scalar::{all_finite, czero, CMat, Real};

pub const SYMMETRY_TOL: f64 = 1e-12;
pub const DECOMPOSITION_TOL: f64 = 1e-10;

/// Dense two-electron tensor, row-major in `(j, k, l, m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Eri<T: Real> {
    nu: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> Eri<T> {
    pub fn zeros(nu: usize) -> Self {
        Self {
            nu,
            data: vec![czero(); nu.pow(4)],
        }
    }

    pub fn from_flat(nu: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if data.len() != nu.pow(4) {
            return Err(Error::DimensionMismatch(format!(
                "two-electron tensor has {} entries, expected {}",
                data.len(),
                nu.pow(4)
            )));
        }
        Ok(Self { nu, data })
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    #[inline]
    fn idx(&self, j: usize, k: usize, l: usize, m: usize) -> usize {
        ((j * self.nu + k) * self.nu + l) * self.nu + m
    }

    /// `[jk|lm]`
    #[inline]
    pub fn get(&self, j: usize, k: usize, l: usize, m: usize) -> Complex<T> {
        self.data[self.idx(j, k, l, m)]
    }

    #[inline]
    pub fn set(&mut self, j: usize, k: usize, l: usize, m: usize, v: Complex<T>) {
        let i = self.idx(j, k, l, m);
        self.data[i] = v;
    }

    pub fn as_flat(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn max_modulus(&self) -> T {
        self.data.iter().fold(T::zero(), |a, z| a.max(z.modulus()))
    }

    /// Contracts tensor slot `slot` with `m`: `out[…i…] = Σ_i' m[i,i'] in[…i'…]`.
    fn contract_slot(&self, slot: usize, m: &CMat<T>) -> Self {
        let nu = self.nu;
        let stride = nu.pow(3 - slot as u32);
        let mut out = Self::zeros(nu);
        for base in 0..self.data.len() {
            let i = (base / stride) % nu;
            if i != 0 {
                continue;
            }
            for a in 0..nu {
                let mut s = czero();
                for b in 0..nu {
                    s += m[(a, b)] * self.data[base + b * stride];
                }
                out.data[base + a * stride] = s;
            }
        }
        out
    }
}

/// Nucleus with charge `Z` at a position.
#[derive(Debug, Clone, PartialEq)]
pub struct Nucleus<T> {
    pub charge: T,
    pub position: [T; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegralSet<T: Real> {
    n_elec: usize,
    h: CMat<T>,
    kinetic: CMat<T>,
    attraction: Vec<CMat<T>>,
    eri: Eri<T>,
    nuclei: Vec<Nucleus<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IssueKind {
    CoreNotHermitian,
    KineticNotHermitian,
    AttractionNotHermitian,
    Decomposition,
    EriConjugateSymmetry,
    EriExchangeSymmetry,
}

impl IssueKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::CoreNotHermitian => "core_hamiltonian_not_hermitian",
            Self::KineticNotHermitian => "kinetic_not_hermitian",
            Self::AttractionNotHermitian => "attraction_not_hermitian",
            Self::Decomposition => "core_hamiltonian_decomposition",
            Self::EriConjugateSymmetry => "eri_conjugate_symmetry",
            Self::EriExchangeSymmetry => "eri_exchange_symmetry",
        }
    }
}

/// Worst violation of one symmetry, with the indices where it occurs.
#[derive(Debug, Clone, PartialEq)]
pub struct Issue<T> {
    pub kind: IssueKind,
    pub witness: Vec<usize>,
    pub magnitude: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegralReport<T> {
    pub issues: Vec<Issue<T>>,
}

impl<T> IntegralReport<T> {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

fn worst_hermitian<T: Real>(m: &CMat<T>) -> (T, Vec<usize>) {
    let mut best = (T::zero(), vec![0, 0]);
    for j in 0..m.nrows() {
        for k in j..m.ncols() {
            let d = (m[(j, k)] - m[(k, j)].conj()).modulus();
            if d > best.0 {
                best = (d, vec![j, k]);
            }
        }
    }
    best
}

fn matrix_max<T: Real>(m: &CMat<T>) -> T {
    m.iter().fold(T::zero(), |a, z| a.max(z.modulus()))
}

impl<T: Real> IntegralSet<T> {
    /// Assembles an integral set after checking shapes and finiteness only.
    pub fn new_unvalidated(
        n_elec: usize,
        h: CMat<T>,
        kinetic: CMat<T>,
        attraction: Vec<CMat<T>>,
        eri: Eri<T>,
        nuclei: Vec<Nucleus<T>>,
    ) -> Result<Self> {
        let nu = h.nrows();
        if nu < 2 {
            return invalid("need at least two orbitals");
        }
        if n_elec == 0 || n_elec >= nu {
            return invalid(format!("need 0 < N < ν, got N={n_elec}, ν={nu}"));
        }
        let square = |m: &CMat<T>| m.nrows() == nu && m.ncols() == nu;
        if !square(&h) || !square(&kinetic) || attraction.iter().any(|a| !square(a)) || eri.nu() != nu {
            return Err(Error::DimensionMismatch(format!(
                "all integral blocks must be {nu}x{nu}"
            )));
        }
        if attraction.len() != nuclei.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} attraction matrices for {} nuclei",
                attraction.len(),
                nuclei.len()
            )));
        }
        let finite = all_finite(&h)
            && all_finite(&kinetic)
            && attraction.iter().all(all_finite)
            && eri.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
            && nuclei
                .iter()
                .all(|n| n.charge.is_finite() && n.position.iter().all(|x| x.is_finite()));
        if !finite {
            return invalid("integrals contain non-finite values");
        }
        Ok(Self {
            n_elec,
            h,
            kinetic,
            attraction,
            eri,
            nuclei,
        })
    }

    /// Assembles and validates; any symmetry violation is an error.
    pub fn new(
        n_elec: usize,
        h: CMat<T>,
        kinetic: CMat<T>,
        attraction: Vec<CMat<T>>,
        eri: Eri<T>,
        nuclei: Vec<Nucleus<T>>,
    ) -> Result<Self> {
        let set = Self::new_unvalidated(n_elec, h, kinetic, attraction, eri, nuclei)?;
        let report = set.validate();
        if let Some(issue) = report.issues.first() {
            return Err(Error::Consistency(format!(
                "{} violated at {:?} by {}",
                issue.kind.name(),
                issue.witness,
                issue.magnitude
            )));
        }
        Ok(set)
    }

    pub fn nu(&self) -> usize {
        self.h.nrows()
    }
    pub fn n_elec(&self) -> usize {
        self.n_elec
    }
    /// Core Hamiltonian, entry `(k, j) = ⟨φ_k, h φ_j⟩`.
    pub fn core_hamiltonian(&self) -> &CMat<T> {
        &self.h
    }
    /// Entry `(j, k) = ⟨∇φ_j, ∇φ_k⟩`.
    pub fn kinetic(&self) -> &CMat<T> {
        &self.kinetic
    }
    /// One matrix per nucleus, entry `(j, k) = ∫ Z_l |x − x_l|⁻¹ φ_j* φ_k`.
    pub fn attraction(&self) -> &[CMat<T>] {
        &self.attraction
    }
    pub fn eri(&self) -> &Eri<T> {
        &self.eri
    }
    pub fn nuclei(&self) -> &[Nucleus<T>] {
        &self.nuclei
    }

    /// `⟨jl||km⟩ = [jk|lm] − [jm|lk]`.
    pub fn antisym(&self, j: usize, l: usize, k: usize, m: usize) -> Result<Complex<T>> {
        let nu = self.nu();
        if [j, k, l, m].iter().any(|&i| i >= nu) {
            return invalid(format!("index out of range for ν={nu}"));
        }
        Ok(self.eri.get(j, k, l, m) - self.eri.get(j, m, l, k))
    }

    pub fn validate(&self) -> IntegralReport<T> {
        let nu = self.nu();
        let mut issues = Vec::new();
        let one_scale = matrix_max(&self.h).max(matrix_max(&self.kinetic)).max(T::one());
        let sym_tol = T::tol(SYMMETRY_TOL) * one_scale;
        let mut herm = |m: &CMat<T>, kind, extra: Option<usize>| {
            let (d, mut w) = worst_hermitian(m);
            if d > sym_tol {
                if let Some(l) = extra {
                    w.insert(0, l);
                }
                issues.push(Issue {
                    kind,
                    witness: w,
                    magnitude: d,
                });
            }
        };
        herm(&self.h, IssueKind::CoreNotHermitian, None);
        herm(&self.kinetic, IssueKind::KineticNotHermitian, None);
        for (l, a) in self.attraction.iter().enumerate() {
            herm(a, IssueKind::AttractionNotHermitian, Some(l));
        }
        let mut rebuilt = self.kinetic.clone();
        for a in &self.attraction {
            rebuilt -= a;
        }
        let mut worst = (T::zero(), vec![0, 0]);
        for j in 0..nu {
            for k in 0..nu {
                let d = (rebuilt[(j, k)] - self.h[(j, k)]).modulus();
                if d > worst.0 {
                    worst = (d, vec![j, k]);
                }
            }
        }
        if worst.0 > T::tol(DECOMPOSITION_TOL) * one_scale {
            issues.push(Issue {
                kind: IssueKind::Decomposition,
                witness: worst.1,
                magnitude: worst.0,
            });
        }
        let eri_tol = T::tol(SYMMETRY_TOL) * self.eri.max_modulus().max(T::one());
        let mut conj = (T::zero(), vec![]);
        let mut exch = (T::zero(), vec![]);
        for j in 0..nu {
            for k in 0..nu {
                for l in 0..nu {
                    for m in 0..nu {
                        let v = self.eri.get(j, k, l, m);
                        let dc = (v.conj() - self.eri.get(k, j, m, l)).modulus();
                        if dc > conj.0 {
                            conj = (dc, vec![j, k, l, m]);
                        }
                        let de = (v - self.eri.get(l, m, j, k)).modulus();
                        if de > exch.0 {
                            exch = (de, vec![j, k, l, m]);
                        }
                    }
                }
            }
        }
        if conj.0 > eri_tol {
            issues.push(Issue {
                kind: IssueKind::EriConjugateSymmetry,
                witness: conj.1,
                magnitude: conj.0,
            });
        }
        if exch.0 > eri_tol {
            issues.push(Issue {
                kind: IssueKind::EriExchangeSymmetry,
                witness: exch.1,
                magnitude: exch.0,
            });
        }
        IntegralReport { issues }
    }
}

/// Integrals in the basis `φ_j' = Σ_k C_jk φ_k` (rows of `C` are expansion
/// coefficients): one-electron blocks become `C̄ M Cᵀ` and
/// `[jk|lm]' = Σ C̄_jj' C_kk' C̄_ll' C_mm' [j'k'|l'm']`.
pub fn transform_basis<T: Real>(set: &IntegralSet<T>, c: &CMat<T>) -> Result<IntegralSet<T>> {
    let nu = set.nu();
    if c.shape() != (nu, nu) {
        return Err(Error::DimensionMismatch(format!(
            "C is {}x{}, expected {nu}x{nu}",
            c.nrows(),
            c.ncols()
        )));
    }
    if !all_finite(c) {
        return invalid("C has non-finite entries");
    }
    let lu = c.clone().lu();
    let det = lu.determinant().modulus();
    let scale = c.iter().fold(T::zero(), |a, z| a.max(z.modulus())).powi(nu as i32);
    if !(det > T::tol(1e-14) * scale) {
        return Err(Error::Singular("basis transformation is singular".into()));
    }
    let cbar = c.map(|z| z.conj());
    let ct = c.transpose();
    let one = |m: &CMat<T>| &cbar * m * &ct;
    let eri = set
        .eri
        .contract_slot(0, &cbar)
        .contract_slot(1, c)
        .contract_slot(2, &cbar)
        .contract_slot(3, c);
    Ok(IntegralSet {
        n_elec: set.n_elec,
        h: one(&set.h),
        kinetic: one(&set.kinetic),
        attraction: set.attraction.iter().map(one).collect(),
        eri,
        nuclei: set.nuclei.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cl;

    fn tiny() -> IntegralSet<f64> {
        let mut h = CMat::zeros(2, 2);
        h[(0, 0)] = cl(-1.0, 0.0);
        h[(1, 1)] = cl(1.0, 0.0);
        IntegralSet::new(1, h.clone(), h, vec![], Eri::zeros(2), vec![]).unwrap()
    }

    #[test]
    fn broken_exchange_symmetry_is_reported() {
        let s = tiny();
        let mut eri = Eri::zeros(2);
        eri.set(0, 0, 1, 1, cl(0.3, 0.0));
        let bad = IntegralSet::new_unvalidated(
            1,
            s.core_hamiltonian().clone(),
            s.kinetic().clone(),
            vec![],
            eri,
            vec![],
        )
        .unwrap();
        let kinds: Vec<_> = bad.validate().issues.iter().map(|i| i.kind).collect();
        assert!(kinds.contains(&IssueKind::EriExchangeSymmetry));
    }

    #[test]
    fn antisym_index_range() {
        let s = tiny();
        assert!(s.antisym(0, 1, 0, 1).is_ok());
        assert!(s.antisym(0, 2, 0, 1).is_err());
    }

    #[test]
    fn identity_transform_is_noop() {
        let s = tiny();
        assert_eq!(transform_basis(&s, &CMat::identity(2, 2)).unwrap(), s);
        assert!(matches!(
            transform_basis(&s, &CMat::zeros(2, 2)),
            Err(Error::Singular(_))
        ));
    }
}

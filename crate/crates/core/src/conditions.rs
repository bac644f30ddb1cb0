//! Measured localization, orbital-isolation and nuclear constants.
//!
//! Each constant is the smallest value for which its defining inequality
//! holds on the given integrals and weights.

use nalgebra::{Complex, ComplexField, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grassmann::GrassmannPoint;
use crate::hf::HartreeFock;
use crate::integrals::IntegralSet;
use crate::matnorm::{one_inf, WeightSet};
use crate::scalar::{RMat, Real};

/// Two-electron localization constants.
#[derive(Debug, Clone, PartialEq)]
pub struct LmoConstants<T: Real> {
    /// Bound on the off-pattern integrals.
    pub eps_tilde: T,
    /// `v⁻¹`, symmetric, column sums at most one.
    pub v_inv: RMat<T>,
    pub c_tilde: T,
    /// `u⁻¹`, symmetric.
    pub u_inv: RMat<T>,
    pub c_hat: T,
    /// Kinetic row-sum constant.
    pub c_check: T,
}

/// Orbital-isolation constants at the canonical point.
#[derive(Debug, Clone, PartialEq)]
pub struct OiConstants<T> {
    /// Occupied/virtual Fock coupling.
    pub eps: T,
    /// Within-block Fock coupling.
    pub delta: T,
    /// Signed gap constant.
    pub gamma: T,
    /// `(j, k)` attaining the gap.
    pub gamma_at: (usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct NiConstants<T> {
    pub c_breve: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Clause {
    pub name: &'static str,
    pub holds: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport<T: Real> {
    pub lmo: LmoConstants<T>,
    pub oi: OiConstants<T>,
    pub ni: NiConstants<T>,
    pub clauses: Vec<Clause>,
}

impl<T: Real> ConditionReport<T> {
    pub fn feasible(&self) -> bool {
        self.clauses.iter().all(|c| c.holds)
    }
}

fn check_weights<T: Real>(set: &IntegralSet<T>, w: &WeightSet<T>) -> Result<()> {
    if w.dim() != set.nu() {
        return Err(Error::DimensionMismatch(format!(
            "weights are {0}x{0}, integrals have ν={1}",
            w.dim(),
            set.nu()
        )));
    }
    Ok(())
}

/// `{j,k} ≠ {l,m}` and not (`j = k` and `l = m`).
pub fn off_pattern(j: usize, k: usize, l: usize, m: usize) -> bool {
    let same_pair = (j == l && k == m) || (j == m && k == l);
    !same_pair && (j != k || l != m)
}

pub fn measure_lmo<T: Real>(set: &IntegralSet<T>, weights: &WeightSet<T>) -> Result<LmoConstants<T>> {
    check_weights(set, weights)?;
    let nu = set.nu();
    let w = &weights.matrix;
    let eri = set.eri();
    let mut v_tilde = RMat::<T>::zeros(nu, nu);
    let mut u_inv = RMat::<T>::zeros(nu, nu);
    let mut c_hat = T::zero();
    for j in 0..nu {
        for k in 0..nu {
            for l in 0..nu {
                for m in 0..nu {
                    let x = eri.get(j, k, l, m).modulus() * w[(j, k)] * w[(l, m)];
                    u_inv[(j, l)] = u_inv[(j, l)].max(x);
                    c_hat = c_hat.max(x);
                    if off_pattern(j, k, l, m) {
                        v_tilde[(j, l)] = v_tilde[(j, l)].max(x);
                    }
                }
            }
        }
    }
    let col_max = |m: &RMat<T>| (0..nu).fold(T::zero(), |a, l| a.max(m.column(l).sum()));
    let eps_tilde = col_max(&v_tilde);
    let v_inv = if eps_tilde > T::zero() {
        v_tilde / eps_tilde
    } else {
        v_tilde
    };
    let c_tilde = (0..nu).fold(T::zero(), |a, j| a.max(u_inv.row(j).sum()));
    let kin = set.kinetic();
    let c_check = (0..nu).fold(T::zero(), |a, j| {
        a.max((0..nu).fold(T::zero(), |s, k| s + kin[(j, k)].modulus()))
    });
    Ok(LmoConstants {
        eps_tilde,
        v_inv,
        c_tilde,
        u_inv,
        c_hat,
        c_check,
    })
}

pub fn measure_oi<T: Real>(set: &IntegralSet<T>) -> Result<OiConstants<T>> {
    let (n, nu) = (set.n_elec(), set.nu());
    let p0 = GrassmannPoint::canonical(n, nu)?;
    let f = HartreeFock::new(set).fock(&p0)?;
    let occ = 0..n;
    let virt = n..nu;
    let abs = |r: usize, c: usize| f[(r, c)].modulus();
    let mut eps = T::zero();
    for k in virt.clone() {
        eps = eps.max(occ.clone().fold(T::zero(), |s, j| s + abs(k, j)));
    }
    for j in occ.clone() {
        eps = eps.max(virt.clone().fold(T::zero(), |s, k| s + abs(k, j)));
    }
    let mut delta = T::zero();
    for block in [occ.clone(), virt.clone()] {
        for j in block.clone() {
            delta = delta.max(block.clone().filter(|&k| k != j).fold(T::zero(), |s, k| s + abs(j, k)));
        }
    }
    let eri = set.eri();
    let mut gamma = None;
    for j in occ {
        for k in virt.clone() {
            // F_kk − F_jj − ⟨kj||kj⟩ with ⟨kj||kj⟩ = [kk|jj] − [kj|jk]
            let g = f[(k, k)].re - f[(j, j)].re - (eri.get(k, k, j, j).re - eri.get(k, j, j, k).re);
            if gamma.map_or(true, |(best, _)| g < best) {
                gamma = Some((g, (j, k)));
            }
        }
    }
    let (gamma, gamma_at) = gamma.expect("0 < N < ν");
    Ok(OiConstants {
        eps,
        delta,
        gamma,
        gamma_at,
    })
}

pub fn measure_ni<T: Real>(set: &IntegralSet<T>, weights: &WeightSet<T>) -> Result<NiConstants<T>> {
    check_weights(set, weights)?;
    let nu = set.nu();
    let mut c_breve = T::zero();
    for j in 0..nu {
        for k in 0..nu {
            let s = set
                .attraction()
                .iter()
                .fold(T::zero(), |s, a| s + a[(j, k)].modulus() * weights.matrix[(j, k)]);
            c_breve = c_breve.max(s);
        }
    }
    Ok(NiConstants { c_breve })
}

pub fn measure_conditions<T: Real>(set: &IntegralSet<T>, weights: &WeightSet<T>) -> Result<ConditionReport<T>> {
    let lmo = measure_lmo(set, weights)?;
    let oi = measure_oi(set)?;
    let ni = measure_ni(set, weights)?;
    let wr = weights.validate();
    let clause = |name, holds, detail: String| Clause { name, holds, detail };
    let clauses = vec![
        clause("weights_valid", wr.is_valid(), format!("{:?}", wr.violations.first())),
        clause(
            "eps_tilde_below_one",
            lmo.eps_tilde < T::one(),
            format!("eps_tilde = {}", lmo.eps_tilde),
        ),
        clause("eps_below_one", oi.eps < T::one(), format!("eps = {}", oi.eps)),
        clause(
            "gamma_positive",
            oi.gamma > T::zero(),
            format!("gamma = {} at {:?}", oi.gamma, oi.gamma_at),
        ),
    ];
    Ok(ConditionReport { lmo, oi, ni, clauses })
}

/// One failed inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundViolation {
    pub clause: String,
    pub witness: Vec<usize>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractionReport {
    pub trials: usize,
    /// Largest observed `‖T‖/‖A'‖` over all variants of bound (a), and the
    /// corresponding ratios for (b) and (c).
    pub max_ratio: [f64; 3],
    pub violations: Vec<BoundViolation>,
}

impl ContractionReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// All 24 orderings of the four slots.
fn permutations() -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let mut seen = [false; 4];
                    p.iter().for_each(|&i| seen[i] = true);
                    if seen.iter().all(|&s| s) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

/// Verifies the entrywise inequalities behind each constant, then the three
/// contraction bounds on `trials` random matrices plus every single-entry
/// matrix. Slack is relative, `1e-12`.
pub fn contraction_bound_check<T: Real>(
    set: &IntegralSet<T>,
    weights: &WeightSet<T>,
    lmo: &LmoConstants<T>,
    trials: usize,
    seed: u64,
) -> Result<ContractionReport> {
    check_weights(set, weights)?;
    let nu = set.nu();
    let slack = 1e-12;
    let w = weights.matrix.map(|x| x.as_f64());
    let eri: Vec<Complex<f64>> = set
        .eri()
        .as_flat()
        .iter()
        .map(|z| Complex::new(z.re.as_f64(), z.im.as_f64()))
        .collect();
    let lam = |j: usize, k: usize, l: usize, m: usize| eri[((j * nu + k) * nu + l) * nu + m];
    let v_inv = lmo.v_inv.map(|x| x.as_f64());
    let u_inv = lmo.u_inv.map(|x| x.as_f64());
    let (eps_tilde, c_tilde, c_hat) = (lmo.eps_tilde.as_f64(), lmo.c_tilde.as_f64(), lmo.c_hat.as_f64());
    let mut violations = Vec::new();
    let fail = |clause: &str, witness: Vec<usize>, lhs: f64, rhs: f64, out: &mut Vec<BoundViolation>| {
        if lhs > rhs + slack * rhs.abs().max(1e-300) && out.len() < 16 {
            out.push(BoundViolation {
                clause: clause.into(),
                witness,
                lhs,
                rhs,
            });
        }
    };

    for j in 0..nu {
        for k in 0..nu {
            for l in 0..nu {
                for m in 0..nu {
                    let x = lam(j, k, l, m).norm() * w[(j, k)] * w[(l, m)];
                    let wit = vec![j, k, l, m];
                    if off_pattern(j, k, l, m) {
                        fail(
                            "off_pattern_entry",
                            wit.clone(),
                            x,
                            eps_tilde * v_inv[(j, l)],
                            &mut violations,
                        );
                    }
                    fail("entry_vs_u", wit.clone(), x, u_inv[(j, l)], &mut violations);
                    fail("entry_vs_c_hat", wit, x, c_hat, &mut violations);
                }
            }
        }
    }
    for l in 0..nu {
        fail("v_column_sum", vec![l], v_inv.column(l).sum(), 1.0, &mut violations);
        fail("u_row_sum", vec![l], u_inv.row(l).sum(), c_tilde, &mut violations);
        for j in 0..nu {
            fail("v_at_most_one", vec![j, l], v_inv[(j, l)], 1.0, &mut violations);
        }
    }

    let perms = permutations();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inputs: Vec<DMatrix<Complex<f64>>> = Vec::new();
    for _ in 0..trials {
        inputs.push(DMatrix::from_fn(nu, nu, |_, _| {
            Complex::from_polar(rng.gen_range(0.0..1.0), rng.gen_range(0.0..std::f64::consts::TAU))
        }));
    }
    for l in 0..nu {
        for m in 0..nu {
            let mut a = DMatrix::from_element(nu, nu, Complex::new(0.0, 0.0));
            a[(l, m)] = Complex::new(1.0, 0.0);
            inputs.push(a);
        }
    }
    let mut max_ratio = [0.0f64; 3];
    for (trial, a) in inputs.iter().enumerate() {
        let na = one_inf(a);
        if na == 0.0 {
            continue;
        }
        for p in &perms {
            let t = DMatrix::from_fn(nu, nu, |j, k| {
                if j == k {
                    return Complex::new(0.0, 0.0);
                }
                let mut s = Complex::new(0.0, 0.0);
                for l in 0..nu {
                    for m in 0..nu {
                        if (j == l && k == m) || (j == m && k == l) {
                            continue;
                        }
                        let idx = [j, k, l, m];
                        s += lam(idx[p[0]], idx[p[1]], idx[p[2]], idx[p[3]]) * a[(l, m)];
                    }
                }
                s
            });
            let r = one_inf(&t) / na;
            max_ratio[0] = max_ratio[0].max(r);
            fail(
                "bound_a",
                vec![trial, p[0], p[1], p[2], p[3]],
                one_inf(&t),
                eps_tilde * na,
                &mut violations,
            );
        }
        let contract = |hat: bool| {
            DMatrix::from_fn(nu, nu, |j, k| {
                let mut s = Complex::new(0.0, 0.0);
                for l in 0..nu {
                    for m in 0..nu {
                        s += if hat { lam(j, m, l, k) } else { lam(j, k, l, m) } * a[(l, m)];
                    }
                }
                s
            })
        };
        let tt = one_inf(&contract(false));
        let th = one_inf(&contract(true));
        max_ratio[1] = max_ratio[1].max(tt / na);
        max_ratio[2] = max_ratio[2].max(th / na);
        fail("bound_b", vec![trial], tt, c_tilde * na, &mut violations);
        fail("bound_c", vec![trial], th, c_hat * na, &mut violations);
    }
    Ok(ContractionReport {
        trials: inputs.len(),
        max_ratio,
        violations,
    })
}

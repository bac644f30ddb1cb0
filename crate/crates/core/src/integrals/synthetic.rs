//! Seeded generator of localized synthetic integral sets with prescribed
//! gap and coupling at the canonical point.

use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Eri, IntegralSet, Nucleus};
use crate::error::{invalid, Result};
use crate::matnorm::WeightSet;
use crate::scalar::{CMat, Real};

/// Targets for the generated instance. Entries decay like
/// `exp(−decay·|index distance|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticParams {
    /// Exact value of the occupied/virtual gap constant.
    pub gap: f64,
    /// Exact value of the occupied/virtual Fock coupling.
    pub coupling: f64,
    pub decay: f64,
    /// Exact value of the within-block Fock coupling.
    pub delta: f64,
    /// Scale of Coulomb and exchange type two-electron integrals.
    pub coulomb: f64,
    /// Upper bound on the measured off-pattern two-electron constant.
    pub eps_tilde: f64,
    /// Scale of the nuclear attraction matrices.
    pub nuclear: f64,
}

impl Default for SyntheticParams {
    fn default() -> Self {
        Self {
            gap: 1.0,
            coupling: 0.01,
            decay: 2.0,
            delta: 0.02,
            coulomb: 0.01,
            eps_tilde: 0.02,
            nuclear: 0.01,
        }
    }
}

fn disk(rng: &mut ChaCha8Rng) -> Complex<f64> {
    let r: f64 = rng.gen_range(0.0..1.0);
    let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    Complex::from_polar(r, t)
}

fn band(rng: &mut ChaCha8Rng) -> f64 {
    0.5 + 0.5 * rng.gen_range(0.0..1.0)
}

fn dist(a: usize, b: usize) -> f64 {
    (a as f64 - b as f64).abs()
}

/// Weight matrix `w_jk = a·b^{|j−k|}` with `b = exp(decay/2)` and
/// `a = (b+1)/(b−1)`, which satisfies the weight axioms for any chain length.
fn chain_weights(nu: usize, decay: f64) -> (DMatrix<f64>, f64) {
    let b = (decay / 2.0).exp();
    let a = (b + 1.0) / (b - 1.0);
    (DMatrix::from_fn(nu, nu, |j, k| a * b.powf(dist(j, k))), a)
}

fn eri_envelope(p: &SyntheticParams, off_scale: f64, j: usize, k: usize, l: usize, m: usize) -> (u8, f64) {
    if j == k && l == m {
        (0, p.coulomb * (-p.decay * dist(j, l)).exp())
    } else if (j == l && k == m) || (j == m && k == l) {
        (1, p.coulomb * (-2.0 * p.decay * dist(j, k)).exp())
    } else {
        let spread = dist(j, k) + dist(l, m) + dist(j, l).min(dist(k, m));
        (2, off_scale * (-p.decay * spread).exp())
    }
}

/// Deterministic synthetic instance for `seed`.
pub fn generate_synthetic<T: Real>(
    seed: u64,
    nu: usize,
    n: usize,
    p: &SyntheticParams,
) -> Result<(IntegralSet<T>, WeightSet<T>)> {
    if n == 0 || n >= nu {
        return invalid(format!("need 0 < N < ν, got N={n}, ν={nu}"));
    }
    let finite = [p.gap, p.coupling, p.decay, p.delta, p.coulomb, p.eps_tilde, p.nuclear];
    if finite.iter().any(|x| !x.is_finite() || *x < 0.0) || p.gap <= 0.0 || p.decay <= 0.0 {
        return invalid("synthetic parameters must be finite, non-negative, with positive gap and decay");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, a) = chain_weights(nu, p.decay);
    let off_scale = p.eps_tilde / (a * a * (1.0 + 2.0 / ((p.decay / 2.0).exp() - 1.0)));

    let n4 = nu.pow(4);
    let mut raw = vec![Complex::new(0.0, 0.0); n4];
    let at = |j: usize, k: usize, l: usize, m: usize| ((j * nu + k) * nu + l) * nu + m;
    for j in 0..nu {
        for k in 0..nu {
            for l in 0..nu {
                for m in 0..nu {
                    let (cat, env) = eri_envelope(p, off_scale, j, k, l, m);
                    let v = match cat {
                        0 => Complex::new(env * band(&mut rng), 0.0),
                        1 => Complex::from_polar(env * band(&mut rng), rng.gen_range(0.0..std::f64::consts::TAU)),
                        _ => disk(&mut rng) * env,
                    };
                    raw[at(j, k, l, m)] = v;
                }
            }
        }
    }
    // average over the symmetry group of the tensor
    let mut eri = vec![Complex::new(0.0, 0.0); n4];
    for j in 0..nu {
        for k in 0..nu {
            for l in 0..nu {
                for m in 0..nu {
                    let s = raw[at(j, k, l, m)]
                        + raw[at(l, m, j, k)]
                        + raw[at(k, j, m, l)].conj()
                        + raw[at(m, l, k, j)].conj();
                    eri[at(j, k, l, m)] = s * 0.25;
                }
            }
        }
    }
    let g = |j, k, l, m| eri[at(j, k, l, m)];

    let mut fock = DMatrix::from_element(nu, nu, Complex::new(0.0, 0.0));
    let spread = 0.1 * p.gap / nu as f64;
    for j in 0..n {
        fock[(j, j)] = Complex::new(-p.gap / 2.0 - spread * j as f64, 0.0);
    }
    for k in n..nu {
        let worst = (0..n)
            .map(|j| fock[(j, j)].re + g(k, k, j, j).re - g(k, j, j, k).re)
            .fold(f64::NEG_INFINITY, f64::max);
        fock[(k, k)] = Complex::new(worst + p.gap + spread * (k - n) as f64, 0.0);
    }
    let mut fill = |pairs: Vec<(usize, usize)>, target: f64, rows: &dyn Fn(usize) -> bool| {
        let vals: Vec<Complex<f64>> = pairs
            .iter()
            .map(|&(r, c)| disk(&mut rng) * (-p.decay * dist(r, c)).exp())
            .collect();
        let mut sums = vec![0.0; nu];
        for (&(r, c), v) in pairs.iter().zip(&vals) {
            sums[r] += v.norm();
            sums[c] += v.norm();
        }
        let max = (0..nu).filter(|&i| rows(i)).map(|i| sums[i]).fold(0.0, f64::max);
        let s = if max > 0.0 { target / max } else { 0.0 };
        for (&(r, c), v) in pairs.iter().zip(vals) {
            fock[(r, c)] = v * s;
            fock[(c, r)] = (v * s).conj();
        }
    };
    let mut within = Vec::new();
    for r in 0..nu {
        for c in r + 1..nu {
            if (r < n) == (c < n) {
                within.push((r, c));
            }
        }
    }
    fill(within, p.delta, &|_| true);
    let mut across = Vec::new();
    for k in n..nu {
        for j in 0..n {
            across.push((k, j));
        }
    }
    fill(across, p.coupling, &|_| true);

    let mut h = fock.clone();
    for k in 0..nu {
        for j in 0..nu {
            let two: Complex<f64> = (0..n).map(|l| g(k, j, l, l) - g(k, l, l, j)).sum();
            h[(k, j)] -= two;
        }
    }
    let mut attraction = Vec::with_capacity(nu);
    for l in 0..nu {
        let mut m = DMatrix::from_element(nu, nu, Complex::new(0.0, 0.0));
        for j in 0..nu {
            for k in j..nu {
                let env = p.nuclear * (-p.decay * (dist(j, l) + dist(k, l)) / 2.0).exp();
                if j == k {
                    m[(j, j)] = Complex::new(env * band(&mut rng), 0.0);
                } else {
                    let v = disk(&mut rng) * env;
                    m[(j, k)] = v;
                    m[(k, j)] = v.conj();
                }
            }
        }
        attraction.push(m);
    }
    let mut kinetic = h.clone();
    for m in &attraction {
        kinetic += m;
    }
    // re-derive h so the decomposition holds to rounding
    let mut h_exact = kinetic.clone();
    for m in &attraction {
        h_exact -= m;
    }

    let cast = |m: &DMatrix<Complex<f64>>| -> CMat<T> { m.map(|z| Complex::new(T::lit(z.re), T::lit(z.im))) };
    let nuclei = (0..nu)
        .map(|l| Nucleus {
            charge: T::one(),
            position: [T::lit(l as f64), T::zero(), T::zero()],
        })
        .collect();
    let eri_t = Eri::from_flat(
        nu,
        eri.iter().map(|z| Complex::new(T::lit(z.re), T::lit(z.im))).collect(),
    )?;
    let set = IntegralSet::new(
        n,
        cast(&h_exact),
        cast(&kinetic),
        attraction.iter().map(cast).collect(),
        eri_t,
        nuclei,
    )?;
    let points = (0..nu).map(|l| [T::lit(l as f64), T::zero(), T::zero()]).collect();
    let weights = WeightSet {
        matrix: w.map(T::lit),
        points: Some(points),
    };
    Ok((set, weights))
}

#![allow(dead_code)]

use hfcert::grassmann::{GrassmannPoint, TangentCoord};
use hfcert::matnorm::one_inf;
use hfcert::scalar::CMat;
use nalgebra::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_cmat(rng: &mut ChaCha8Rng, r: usize, c: usize) -> CMat<f64> {
    CMat::from_fn(r, c, |_, _| {
        Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

/// Random coordinates rescaled to `‖B‖₁,∞ = norm`.
pub fn random_tangent(rng: &mut ChaCha8Rng, n: usize, nu: usize, norm: f64) -> TangentCoord<f64> {
    let b = random_cmat(rng, n, nu - n);
    let s = one_inf(&b);
    TangentCoord::new(b * Complex::new(norm / s, 0.0)).unwrap()
}

/// Random point: canonical point moved by a random retraction.
pub fn random_point(rng: &mut ChaCha8Rng, n: usize, nu: usize) -> GrassmannPoint<f64> {
    let p0 = GrassmannPoint::canonical(n, nu).unwrap();
    let t = random_tangent(rng, n, nu, 1.5);
    hfcert::grassmann::retract(&p0, &t).unwrap()
}

pub fn random_dims(rng: &mut ChaCha8Rng, max_nu: usize) -> (usize, usize) {
    let nu = rng.gen_range(2..=max_nu);
    let n = rng.gen_range(1..nu);
    (n, nu)
}

pub fn rel_err(a: &CMat<f64>, b: &CMat<f64>) -> f64 {
    one_inf(&(a - b)) / one_inf(a).max(1.0)
}

use hfcert::integrals::{generate_synthetic, IntegralSet, SyntheticParams};
use hfcert::matnorm::WeightSet;

/// Strongly interacting synthetic set, so every term of the energy matters.
pub fn random_integrals(rng: &mut ChaCha8Rng, nu: usize, n: usize) -> IntegralSet<f64> {
    let params = SyntheticParams {
        gap: rng.gen_range(0.5..2.0),
        coupling: rng.gen_range(0.05..0.5),
        decay: rng.gen_range(0.5..2.0),
        delta: rng.gen_range(0.0..0.3),
        coulomb: rng.gen_range(0.1..0.8),
        eps_tilde: rng.gen_range(0.1..0.8),
        nuclear: rng.gen_range(0.0..0.5),
    };
    generate_synthetic::<f64>(rng.gen(), nu, n, &params).unwrap().0
}

/// Weakly coupled instance intended to pass the certificate gates.
pub fn certified_instance(seed: u64, nu: usize, n: usize) -> (IntegralSet<f64>, WeightSet<f64>) {
    let params = SyntheticParams {
        coupling: 0.005,
        ..SyntheticParams::default()
    };
    generate_synthetic::<f64>(seed, nu, n, &params).unwrap()
}

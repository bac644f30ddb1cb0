//! Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero if any
//! criterion fails. Tolerances and runtime budgets are fixed here.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command as Process, ExitCode};
use std::time::{Duration, Instant};

use hfcert::conditions::{contraction_bound_check, measure_conditions};
use hfcert::grassmann::{
    basis_vectors, d2retract, d3retract, dretract, na_directional, retract, Functional, GrassmannPoint,
    LinearFunctional, TangentCoord,
};
use hfcert::hf::{commutator_residual, HartreeFock};
use hfcert::integrals::{generate_synthetic, transform_basis, IntegralSet, SyntheticParams};
use hfcert::kantorovich::{
    certify, displacement_check, inverse_hessian_norm, lipschitz_constants, lipschitz_ratio, newton_solve,
    EpsHatPolicy, NewtonOptions,
};
use hfcert::matnorm::{norm_weighted, one_inf, WeightSet};
use hfcert::ortho::{orthogonalize_pipeline, propagate_constants, schmidt, transformed_gram, ConstantSet};
use hfcert::scalar::{trace_product, CMat};
use hfcert_cli::{run, Command, RunConfig};
use nalgebra::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_cmat(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMat<f64> {
    CMat::from_fn(rows, cols, |_, _| {
        Complex::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
    })
}

fn random_tangent(r: &mut ChaCha8Rng, n: usize, nu: usize, norm: f64) -> TangentCoord<f64> {
    let b = random_cmat(r, n, nu - n);
    let s = one_inf(&b);
    TangentCoord::new(b * Complex::new(norm / s, 0.0)).unwrap()
}

fn random_dims(r: &mut ChaCha8Rng, max_nu: usize) -> (usize, usize) {
    let nu = r.gen_range(2..=max_nu);
    (r.gen_range(1..nu), nu)
}

fn random_point(r: &mut ChaCha8Rng, n: usize, nu: usize) -> GrassmannPoint<f64> {
    let t = random_tangent(r, n, nu, 1.5);
    retract(&GrassmannPoint::canonical(n, nu).unwrap(), &t).unwrap()
}

fn rel_err(a: &CMat<f64>, b: &CMat<f64>) -> f64 {
    one_inf(&(a - b)) / one_inf(a).max(1.0)
}

/// Strongly interacting instance so every energy term contributes.
fn random_integrals(r: &mut ChaCha8Rng, nu: usize, n: usize) -> IntegralSet<f64> {
    let params = SyntheticParams {
        gap: r.gen_range(0.5..2.0),
        coupling: r.gen_range(0.05..0.5),
        decay: r.gen_range(0.5..2.0),
        delta: r.gen_range(0.0..0.3),
        coulomb: r.gen_range(0.1..0.8),
        eps_tilde: r.gen_range(0.1..0.8),
        nuclear: r.gen_range(0.0..0.5),
    };
    generate_synthetic::<f64>(r.gen(), nu, n, &params).unwrap().0
}

const CERTIFIED_SHAPES: [(u64, usize, usize); 6] = [(1, 4, 1), (2, 4, 2), (3, 6, 2), (4, 6, 3), (5, 8, 2), (6, 8, 3)];

fn certified_instance(seed: u64, nu: usize, n: usize) -> (IntegralSet<f64>, WeightSet<f64>) {
    let params = SyntheticParams {
        coupling: 0.005,
        ..SyntheticParams::default()
    };
    generate_synthetic::<f64>(seed, nu, n, &params).unwrap()
}

fn retraction_validity() -> Check {
    let mut r = rng(101);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (n, nu) = random_dims(&mut r, 6);
        let p = random_point(&mut r, n, nu);
        let norm = r.gen_range(0.0..10.0);
        let q = retract(&p, &random_tangent(&mut r, n, nu, norm)).map_err(|e| e.to_string())?;
        worst = worst.max(q.residuals().max());
    }
    ensure!(worst <= 1e-10, "worst projection residual {worst:e}");
    Ok(format!("1000 draws, worst residual {worst:.1e}"))
}

fn derivative_oracles() -> Check {
    let mut r = rng(102);
    let mut worst = [0.0f64; 4];
    for _ in 0..100 {
        let (n, nu) = random_dims(&mut r, 5);
        let p = random_point(&mut r, n, nu);
        let xi = random_tangent(&mut r, n, nu, 1.0);
        let z: Vec<_> = (0..3).map(|_| random_tangent(&mut r, n, nu, 1.0)).collect();
        let at = |h: f64, dir: &TangentCoord<f64>| xi.add(&dir.scale(h));

        let h1 = 1e-5;
        let fd1 = (retract(&p, &at(h1, &z[0])).unwrap().projector()
            - retract(&p, &at(-h1, &z[0])).unwrap().projector())
            * Complex::new(0.5 / h1, 0.0);
        worst[0] = worst[0].max(rel_err(&dretract(&p, &xi, &z[0]).unwrap(), &fd1));

        let h2 = 1e-4;
        let fd2 = (dretract(&p, &at(h2, &z[1]), &z[0]).unwrap() - dretract(&p, &at(-h2, &z[1]), &z[0]).unwrap())
            * Complex::new(0.5 / h2, 0.0);
        worst[1] = worst[1].max(rel_err(&d2retract(&p, &xi, &z[0], &z[1]).unwrap(), &fd2));

        let fd3 = (d2retract(&p, &at(h2, &z[2]), &z[0], &z[1]).unwrap()
            - d2retract(&p, &at(-h2, &z[2]), &z[0], &z[1]).unwrap())
            * Complex::new(0.5 / h2, 0.0);
        worst[2] = worst[2].max(rel_err(&d3retract(&p, &xi, &z[0], &z[1], &z[2]).unwrap(), &fd3));

        let zero = p.zero_tangent();
        for j in 0..n {
            for k in 0..nu - n {
                let e = TangentCoord::unit(n, nu, j, k, Complex::new(1.0, 0.0));
                let ie = TangentCoord::unit(n, nu, j, k, Complex::new(0.0, 1.0));
                worst[3] = worst[3].max(one_inf(&d2retract(&p, &zero, &e, &ie).unwrap()));
            }
        }
    }
    ensure!(
        worst[0] < 1e-6 && worst[1] < 1e-4 && worst[2] < 1e-3 && worst[3] <= 1e-12,
        "relative errors d1 {:.1e}, d2 {:.1e}, d3 {:.1e}, cross term {:.1e}",
        worst[0],
        worst[1],
        worst[2],
        worst[3]
    );
    Ok(format!(
        "d1 {:.1e}, d2 {:.1e}, d3 {:.1e}, cross term {:.1e}",
        worst[0], worst[1], worst[2], worst[3]
    ))
}

fn energy_at(hf: &HartreeFock<f64>, p0: &GrassmannPoint<f64>, xi: &TangentCoord<f64>) -> f64 {
    hf.energy(&retract(p0, xi).unwrap()).unwrap().total
}

fn gradient_hessian() -> Check {
    let mut r = rng(103);
    let (mut g_worst, mut h_worst, mut diag_worst) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..50 {
        let (n, nu) = random_dims(&mut r, 5);
        let set = random_integrals(&mut r, nu, n);
        let hf = HartreeFock::new(&set);
        let p0 = GrassmannPoint::canonical(n, nu).unwrap();
        let xi = random_tangent(&mut r, n, nu, 0.5);
        let basis = basis_vectors(&p0);
        let e = |t: &TangentCoord<f64>| energy_at(&hf, &p0, t);

        let g = hf.gradient(&p0, &xi).unwrap();
        let h = 1e-5;
        for (q, b) in basis.iter().enumerate() {
            let fd = (e(&xi.add(&b.scale(h))) - e(&xi.add(&b.scale(-h)))) / (2.0 * h);
            let comp = g[(q / 2 / (nu - n), (q / 2) % (nu - n))];
            let an = if q % 2 == 0 { comp.re } else { comp.im };
            g_worst = g_worst.max((an - fd).abs() / an.abs().max(1.0));
        }

        let m = hf.hessian_matrix(&p0, &xi).unwrap();
        let h = 1e-4;
        for (a, ba) in basis.iter().enumerate() {
            for (b, bb) in basis.iter().enumerate().skip(a) {
                let s = |x: f64, y: f64| e(&xi.add(&ba.scale(x)).add(&bb.scale(y)));
                let fd = (s(h, h) - s(h, -h) - s(-h, h) + s(-h, -h)) / (4.0 * h * h);
                h_worst = h_worst.max((m[(a, b)] - fd).abs() / m[(a, b)].abs().max(1.0));
            }
        }

        let f = hf.fock(&p0).unwrap();
        let m0 = hf.hessian_matrix(&p0, &p0.zero_tangent()).unwrap();
        let eri = set.eri();
        for j in 0..n {
            for kk in 0..nu - n {
                let k = n + kk;
                let q = j * (nu - n) + kk;
                let want =
                    0.5 * (f[(k, k)].re - f[(j, j)].re) + 0.5 * (eri.get(k, j, j, k).re - eri.get(k, k, j, j).re);
                diag_worst = diag_worst
                    .max((m0[(2 * q, 2 * q)] - want).abs())
                    .max((m0[(2 * q + 1, 2 * q + 1)] - want).abs());
            }
        }
    }
    ensure!(
        g_worst < 1e-6 && h_worst < 1e-5 && diag_worst < 1e-10,
        "gradient {g_worst:.1e}, Hessian {h_worst:.1e}, diagonal closed form {diag_worst:.1e}"
    );
    Ok(format!(
        "50 sets: gradient {g_worst:.1e}, Hessian {h_worst:.1e}, diagonal {diag_worst:.1e}"
    ))
}

/// `P ↦ tr(A P B P)`.
struct QuadraticFunctional {
    a: CMat<f64>,
    b: CMat<f64>,
}

impl Functional<f64> for QuadraticFunctional {
    fn value(&self, p: &CMat<f64>) -> Complex<f64> {
        (&self.a * p * &self.b * p).trace()
    }
    fn differential(&self, p: &CMat<f64>) -> CMat<f64> {
        &self.b * p * &self.a + &self.a * p * &self.b
    }
    fn second(&self, _p: &CMat<f64>, h1: &CMat<f64>, h2: &CMat<f64>) -> Complex<f64> {
        trace_product(&(&self.a * h1 * &self.b), h2) + trace_product(&(&self.a * h2 * &self.b), h1)
    }
}

fn na_equivalence() -> Check {
    let mut r = rng(104);
    let mut worst = 0.0f64;
    let mut count = 0usize;
    for _ in 0..30 {
        let (n, nu) = random_dims(&mut r, 5);
        let set = random_integrals(&mut r, nu, n);
        let hf = HartreeFock::new(&set);
        let lin = LinearFunctional {
            matrix: random_cmat(&mut r, nu, nu),
        };
        let quad = QuadraticFunctional {
            a: random_cmat(&mut r, nu, nu),
            b: random_cmat(&mut r, nu, nu),
        };
        let p0 = GrassmannPoint::canonical(n, nu).unwrap();
        let xi = random_tangent(&mut r, n, nu, 0.7);
        let z = random_tangent(&mut r, n, nu, 1.0);
        for j in 0..n {
            for k in 0..nu - n {
                for other in [None, Some(&z)] {
                    let devs = [
                        na_directional(&p0, &xi, &hf, j, k, other),
                        na_directional(&p0, &xi, &lin, j, k, other),
                        na_directional(&p0, &xi, &quad, j, k, other),
                    ];
                    for d in devs {
                        worst = worst.max(d.map_err(|e| e.to_string())?.deviation);
                        count += 1;
                    }
                }
            }
        }
        let g = hf.gradient(&p0, &xi).unwrap();
        worst = worst.max(one_inf(&(hf.gradient_na(&p0, &xi).unwrap() - &g)) / one_inf(&g).max(1.0));
    }
    ensure!(worst < 1e-9, "largest deviation {worst:e}");
    Ok(format!(
        "{count} comparisons (energy, linear, quadratic), worst {worst:.1e}"
    ))
}

fn contraction_bounds() -> Check {
    let mut r = rng(105);
    let mut detail = Vec::new();
    for inst in 0..4 {
        let (n, nu) = [(1, 4), (2, 4), (2, 5), (3, 6)][inst];
        let params = SyntheticParams {
            eps_tilde: r.gen_range(0.05..0.5),
            coulomb: r.gen_range(0.05..0.5),
            ..Default::default()
        };
        let (set, w) = generate_synthetic::<f64>(r.gen(), nu, n, &params).unwrap();
        let report = measure_conditions(&set, &w).map_err(|e| e.to_string())?;
        let lmo = &report.lmo;
        let check =
            |l: &hfcert::conditions::LmoConstants<f64>| contraction_bound_check(&set, &w, l, 100, 7 + inst as u64);
        let base = check(lmo).map_err(|e| e.to_string())?;
        ensure!(base.holds(), "instance {inst}: {:?}", base.violations.first());
        let halved = [
            (
                "eps_tilde",
                hfcert::conditions::LmoConstants {
                    eps_tilde: lmo.eps_tilde / 2.0,
                    ..lmo.clone()
                },
            ),
            (
                "c_tilde",
                hfcert::conditions::LmoConstants {
                    c_tilde: lmo.c_tilde / 2.0,
                    ..lmo.clone()
                },
            ),
            (
                "c_hat",
                hfcert::conditions::LmoConstants {
                    c_hat: lmo.c_hat / 2.0,
                    ..lmo.clone()
                },
            ),
        ];
        for (name, l) in halved {
            let rep = check(&l).map_err(|e| e.to_string())?;
            ensure!(!rep.holds(), "instance {inst}: halving {name} went undetected");
        }
        detail.push(format!(
            "{:.2}/{:.2}/{:.2}",
            base.max_ratio[0], base.max_ratio[1], base.max_ratio[2]
        ));
    }
    Ok(format!(
        "4 instances hold; every halving detected; max ratios {}",
        detail.join(", ")
    ))
}

fn end_to_end() -> Check {
    let mut lines = Vec::new();
    for (seed, nu, n) in CERTIFIED_SHAPES {
        let (set, w) = certified_instance(seed, nu, n);
        let report = measure_conditions(&set, &w).map_err(|e| e.to_string())?;
        let cert = certify(&report, EpsHatPolicy::Search).map_err(|e| e.to_string())?;
        ensure!(cert.valid(), "({nu},{n}): certificate gates {:?}", cert.gates);
        let trace = newton_solve(&set, &NewtonOptions::default()).map_err(|e| e.to_string())?;
        let last = trace.iterates.last().unwrap().gradient_norm;
        ensure!(trace.converged && last <= 1e-10, "({nu},{n}): final gradient {last:e}");
        let (c_star, theta) = (cert.c_star.unwrap(), cert.theta.unwrap());
        let kappa = c_star * cert.lipschitz.big_l / (2.0 * (1.0 - 2.0 * theta).sqrt());
        let ratios = trace.quadratic_ratios(1e-12);
        ensure!(
            !ratios.is_empty(),
            "({nu},{n}): too few steps to observe the step ratio"
        );
        ensure!(
            ratios.iter().all(|q| *q <= kappa),
            "({nu},{n}): step ratios {ratios:?} exceed {kappa}"
        );
        let hf = HartreeFock::new(&set);
        let comm = commutator_residual(&hf, &trace.point).unwrap();
        ensure!(comm <= 1e-8, "({nu},{n}): commutator residual {comm:e}");
        let d = displacement_check(&trace.point, &cert).unwrap();
        let tau = cert.tau_star.unwrap();
        let bound = tau * (1.0 + (1.0 + tau).powi(2) / (1.0 - tau * tau));
        ensure!(
            d.measured <= bound,
            "({nu},{n}): displacement {} above {bound}",
            d.measured
        );
        lines.push(format!("({nu},{n}) {} it", trace.iterates.len() - 1));
    }
    Ok(format!(
        "{} instances certified and solved: {}",
        CERTIFIED_SHAPES.len(),
        lines.join(", ")
    ))
}

fn bound_sharpness() -> Check {
    let mut r = rng(107);
    let mut worst = [0.0f64; 2];
    for (seed, nu, n) in CERTIFIED_SHAPES {
        let (set, w) = certified_instance(seed, nu, n);
        let cert = certify(&measure_conditions(&set, &w).unwrap(), EpsHatPolicy::Search).unwrap();
        let c_star = cert.c_star.ok_or("no c*")?;
        let inv = inverse_hessian_norm(&set).map_err(|e| e.to_string())?;
        ensure!(
            inv.upper <= c_star,
            "({nu},{n}): ||F'(0)^-1|| <= {} exceeds c* = {c_star}",
            inv.upper
        );
        worst[0] = worst[0].max(inv.upper / c_star);
        for _ in 0..10 {
            let (sa, sb) = (
                r.gen_range(0.0..1.0) * cert.eps_hat,
                r.gen_range(0.0..1.0) * cert.eps_hat,
            );
            let a = random_tangent(&mut r, n, nu, sa);
            let b = random_tangent(&mut r, n, nu, sb);
            let ratio = lipschitz_ratio(&set, &a, &b).map_err(|e| e.to_string())?;
            ensure!(
                ratio <= cert.lipschitz.big_l,
                "({nu},{n}): Lipschitz ratio {ratio} exceeds {}",
                cert.lipschitz.big_l
            );
            worst[1] = worst[1].max(ratio / cert.lipschitz.big_l);
        }
    }
    Ok(format!(
        "max ||F'(0)^-1||/c* = {:.3}, max Lipschitz ratio/L = {:.3}",
        worst[0], worst[1]
    ))
}

fn near_identity(r: &mut ChaCha8Rng, w: &WeightSet<f64>, size: f64) -> CMat<f64> {
    let nu = w.dim();
    let size = size / (nu - 1) as f64;
    let mut m = CMat::from_fn(nu, nu, |j, k| {
        if j == k {
            Complex::new(1.0, 0.0)
        } else {
            Complex::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)) * (size / w.matrix[(j, k)])
        }
    });
    for j in 0..nu {
        let norm = m.row(j).norm();
        m.row_mut(j).unscale_mut(norm);
    }
    m
}

fn orthogonalization() -> Check {
    let mut r = rng(108);
    let mut grams = 0;
    let mut max_eps0 = 0.0f64;
    for _ in 0..300 {
        let nu = r.gen_range(2..=8);
        let (_, w) = certified_instance(r.gen(), nu, 1);
        let size = r.gen_range(0.0..0.2);
        let m = near_identity(&mut r, &w, size);
        let gram = transformed_gram(&m, &CMat::identity(nu, nu));
        let eps0 = norm_weighted(&(&gram - CMat::identity(nu, nu)), &w).unwrap();
        if eps0 > 0.2 {
            continue;
        }
        let res = schmidt(&gram, &w).map_err(|e| format!("eps0 = {eps0}: {e}"))?;
        let orth = one_inf(&(transformed_gram(&res.transform, &gram) - CMat::identity(nu, nu)));
        ensure!(orth <= 1e-10, "orthonormality residual {orth:e}");
        ensure!(
            res.s_weighted <= res.chain.eps2,
            "||S||_w = {} above eps2 = {}",
            res.s_weighted,
            res.chain.eps2
        );
        ensure!(
            res.norms.iter().all(|x| (x - 1.0).abs() <= res.chain.eps1),
            "norm outside 1 +- eps1"
        );
        grams += 1;
        max_eps0 = max_eps0.max(eps0);
    }
    ensure!(grams >= 100, "only {grams} Gram matrices with eps0 <= 0.2");

    let mut compared = 0;
    let mut max_primed_eps0 = 0.0f64;
    for trial in 0..60 {
        let nu = [4, 6, 8][trial % 3];
        let (set, w) = certified_instance(r.gen(), nu, nu / 2);
        let size = r.gen_range(0.005..0.2);
        let m = near_identity(&mut r, &w, size);
        let gram = transformed_gram(&m, &CMat::identity(nu, nu));
        if norm_weighted(&(&gram - CMat::identity(nu, nu)), &w).unwrap() > 0.2 {
            continue;
        }
        let primed = transform_basis(&set, &m).unwrap();
        let Ok(before) = measure_conditions(&primed, &w) else {
            continue;
        };
        if !before.feasible() {
            continue;
        }
        let (out, res) = orthogonalize_pipeline(&primed, &gram, &w).map_err(|e| e.to_string())?;
        let predicted = propagate_constants(&ConstantSet::from_report(&before), &res.chain);
        let measured = ConstantSet::from_report(&measure_conditions(&out, &w).map_err(|e| e.to_string())?);
        let bad = measured.dominated_by(&predicted, 1e-10);
        ensure!(
            bad.is_empty(),
            "eps0 = {}: measured exceeds prediction for {bad:?}",
            res.chain.eps0
        );
        compared += 1;
        max_primed_eps0 = max_primed_eps0.max(res.chain.eps0);
    }
    ensure!(
        compared >= 20,
        "only {compared} primed instances satisfied the hypotheses"
    );
    Ok(format!("{grams} Gram matrices (eps0 up to {max_eps0:.3}); {compared} propagation comparisons (eps0 up to {max_primed_eps0:.3})"))
}

fn certificate_arithmetic() -> Check {
    let mut worst = 0.0f64;
    let mut r = rng(109);
    let mut reports = Vec::new();
    for (seed, nu, n) in CERTIFIED_SHAPES {
        let (set, w) = certified_instance(seed, nu, n);
        reports.push(measure_conditions(&set, &w).unwrap());
    }
    for report in &reports {
        for _ in 0..20 {
            let eps_hat = r.gen_range(0.01..0.9);
            let cert = certify(report, EpsHatPolicy::Fixed(eps_hat)).map_err(|e| e.to_string())?;
            if let (Some(a), Some(b)) = (cert.tau_star, cert.tau_star_alt) {
                worst = worst.max((a - b).abs() / a.abs().max(b.abs()));
            }
        }
    }
    ensure!(worst <= 1e-12, "tau* forms differ by {worst:e}");
    for _ in 0..100 {
        let c: [f64; 4] = [r.gen(), r.gen(), r.gen(), r.gen()];
        let l = lipschitz_constants(0.0, c[0], c[1], c[2], c[3]).map_err(|e| e.to_string())?;
        let c0 = 6.0 * (c[0] + c[1] + c[2] + c[3]);
        let d0 = 4.0 * (c[0] + c[1]);
        ensure!(
            l.big_c == c0 && l.big_d == d0 && l.big_l == l.big_c + 3.0 * l.big_d,
            "eps_hat = 0: got {:?}, want C {c0}, D {d0}",
            l
        );
    }
    Ok(format!(
        "tau* forms agree to {worst:.1e}; eps_hat = 0 closed forms exact on 100 draws"
    ))
}

fn determinism() -> Check {
    let mut cfg = RunConfig::new(Command::Report);
    cfg.seed = 1;
    let a = run(&cfg).map_err(|e| e.to_string())?;
    let b = run(&cfg).map_err(|e| e.to_string())?;
    ensure!(a == b, "library reports differ");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut files = Vec::new();
    for name in ["one.json", "two.json"] {
        let path = dir.path().join(name);
        let st = Process::new(env!("CARGO_BIN_EXE_hfcert"))
            .args(["report", "--seed", "1", "-o"])
            .arg(&path)
            .status()
            .map_err(|e| e.to_string())?;
        ensure!(st.success(), "report exited with {st}");
        files.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    ensure!(files[0] == files[1], "binary reports differ");
    ensure!(files[0] == a.document.as_bytes(), "binary and library reports differ");
    Ok(format!(
        "report seed=1: {} bytes, identical across 4 runs",
        files[0].len()
    ))
}

struct Criterion {
    id: u32,
    name: &'static str,
    check: fn() -> Check,
    budget: Option<Duration>,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            id: 1,
            name: "retraction validity",
            check: retraction_validity,
            budget: Some(Duration::from_secs(5)),
        },
        Criterion {
            id: 2,
            name: "derivative oracles",
            check: derivative_oracles,
            budget: Some(Duration::from_secs(30)),
        },
        Criterion {
            id: 3,
            name: "gradient and Hessian",
            check: gradient_hessian,
            budget: None,
        },
        Criterion {
            id: 4,
            name: "non-adjoint equivalence",
            check: na_equivalence,
            budget: None,
        },
        Criterion {
            id: 5,
            name: "contraction bounds",
            check: contraction_bounds,
            budget: None,
        },
        Criterion {
            id: 6,
            name: "end-to-end certificate",
            check: end_to_end,
            budget: Some(Duration::from_secs(60)),
        },
        Criterion {
            id: 7,
            name: "bound sharpness",
            check: bound_sharpness,
            budget: None,
        },
        Criterion {
            id: 8,
            name: "orthogonalization",
            check: orthogonalization,
            budget: None,
        },
        Criterion {
            id: 9,
            name: "certificate arithmetic",
            check: certificate_arithmetic,
            budget: None,
        },
        Criterion {
            id: 10,
            name: "determinism",
            check: determinism,
            budget: None,
        },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.check)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match (outcome, c.budget) {
            (Ok(_), Some(b)) if elapsed > b => {
                Err(format!("took {:.2} s, budget {} s", elapsed.as_secs_f64(), b.as_secs()))
            }
            (o, _) => o,
        };
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "{tag} criterion {:>2} {} ({:.2} s): {detail}",
            c.id,
            c.name,
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

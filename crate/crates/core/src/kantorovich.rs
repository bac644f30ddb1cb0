//! Kantorovich certificate from measured constants, and Newton's method on
//! the gradient map `F(ξ)` of `ξ ↦ 𝓔(R_{P⁰}(ξ))`.

use nalgebra::DVector;

use crate::conditions::ConditionReport;
use crate::error::{invalid, Error, Result};
use crate::grassmann::{complexify, realify, retract, GrassmannPoint, TangentCoord};
use crate::hf::HartreeFock;
use crate::integrals::IntegralSet;
use crate::matnorm::{one_inf, x_operator_norm, OperatorNorm};
use crate::scalar::{RMat, Real};

/// `C_ε̂`, `D_ε̂` and `L_ε̂ = C_ε̂ + 3D_ε̂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lipschitz<T> {
    pub big_c: T,
    pub big_d: T,
    pub big_l: T,
}

pub fn lipschitz_constants<T: Real>(eps_hat: T, c_tilde: T, c_hat: T, c_breve: T, c_check: T) -> Result<Lipschitz<T>> {
    if !(eps_hat >= T::zero() && eps_hat < T::one()) {
        return invalid(format!("eps_hat must lie in [0, 1), got {eps_hat}"));
    }
    let consts = [c_tilde, c_hat, c_breve, c_check];
    if consts.iter().any(|x| !x.is_finite() || *x < T::zero()) {
        return invalid("constants must be finite and non-negative");
    }
    let one = T::one();
    let two = T::lit(2.0);
    let e = eps_hat;
    let q = one - e * e;
    let qi = one / q;
    let sum = c_tilde + c_hat + c_breve + c_check;
    let c = T::lit(6.0)
        * sum
        * (one + e).powi(2)
        * qi.powi(3)
        * (one
            + two * e * (one + qi * (one + e) * (one + T::lit(3.0) * e))
            + two * qi * qi * (one + e).powi(2) * e * e);
    let d = two
        * (c_tilde + c_hat)
        * (one + e)
        * qi
        * qi
        * (one + qi * (one + e) * e)
        * (one + qi * (one + e) * (one + T::lit(5.0) * e) + T::lit(4.0) * qi * qi * (one + e).powi(2) * e * e);
    Ok(Lipschitz {
        big_c: c,
        big_d: d,
        big_l: c + T::lit(3.0) * d,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsHatPolicy {
    /// Smallest feasible `ε̂` from a 64-point log grid on `(1e-4, 1−1e-4)`
    /// refined by 40 bisection steps.
    Search,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gates {
    /// `ε < 1`, `ε̃ < 1`, `γ > 0` and valid weights.
    pub hypotheses: bool,
    /// `γ/2 − δ − 2ε̃ > 0`.
    pub positivity: bool,
    pub theta_below_half: bool,
    pub eps_hat_above_tau: bool,
}

impl Gates {
    pub fn all(&self) -> bool {
        self.hypotheses && self.positivity && self.theta_below_half && self.eps_hat_above_tau
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate<T> {
    pub eps: T,
    pub eps_hat: T,
    pub lipschitz: Lipschitz<T>,
    /// `1/(γ/2 − δ − 2ε̃)`, absent when not positive.
    pub c_star: Option<T>,
    pub theta: Option<T>,
    /// `(1 − √(1−2θ))/(c*L)`
    pub tau_star: Option<T>,
    /// `2c*ε/(1 + √(1−2θ))`
    pub tau_star_alt: Option<T>,
    pub tau_star_star: Option<T>,
    /// `τ* − c*ε`
    pub radius: Option<T>,
    /// Bound on `‖P∞ − P⁰‖₁,∞`.
    pub displacement_bound: Option<T>,
    /// `c*ε + r ≤ ε̂`
    pub ball_within_eps_hat: bool,
    pub gates: Gates,
}

impl<T> Certificate<T> {
    pub fn valid(&self) -> bool {
        self.gates.all()
    }
}

struct Eval<T> {
    theta: T,
    tau: Option<(T, T, T)>,
}

fn evaluate<T: Real>(report: &ConditionReport<T>, c_star: T, eps_hat: T) -> Result<Eval<T>> {
    let lmo = &report.lmo;
    let lipschitz = lipschitz_constants(eps_hat, lmo.c_tilde, lmo.c_hat, report.ni.c_breve, lmo.c_check)?;
    let eps = report.oi.eps;
    let theta = c_star * c_star * eps * lipschitz.big_l;
    let two = T::lit(2.0);
    let tau = if theta <= T::lit(0.5) {
        let root = (T::one() - two * theta).max(T::zero()).sqrt();
        let cl = c_star * lipschitz.big_l;
        Some((
            (T::one() - root) / cl,
            two * c_star * eps / (T::one() + root),
            (T::one() + root) / cl,
        ))
    } else {
        None
    };
    Ok(Eval { theta, tau })
}

fn feasible<T: Real>(ev: &Eval<T>, eps_hat: T) -> bool {
    ev.theta < T::lit(0.5) && ev.tau.map_or(false, |(_, alt, _)| eps_hat > alt)
}

pub fn certify<T: Real>(report: &ConditionReport<T>, policy: EpsHatPolicy) -> Result<Certificate<T>> {
    let oi = &report.oi;
    let hypotheses = report.feasible();
    let denom = oi.gamma / T::lit(2.0) - oi.delta - T::lit(2.0) * report.lmo.eps_tilde;
    let positivity = denom > T::zero();
    let c_star = if positivity { Some(T::one() / denom) } else { None };

    let eps_hat = match (policy, c_star) {
        (EpsHatPolicy::Fixed(e), _) => {
            if !(e > 0.0 && e < 1.0) {
                return invalid(format!("eps_hat must lie in (0, 1), got {e}"));
            }
            T::lit(e)
        }
        (EpsHatPolicy::Search, None) => T::lit(1e-4),
        (EpsHatPolicy::Search, Some(cs)) => {
            let (lo_e, hi_e) = (1e-4f64.ln(), (1.0 - 1e-4f64).ln());
            let grid: Vec<T> = (0..64)
                .map(|i| T::lit((lo_e + (hi_e - lo_e) * i as f64 / 63.0).exp()))
                .collect();
            let mut first = None;
            for (i, &g) in grid.iter().enumerate() {
                if feasible(&evaluate(report, cs, g)?, g) {
                    first = Some(i);
                    break;
                }
            }
            match first {
                None => grid[0],
                Some(i) => {
                    let mut lo = if i == 0 { T::zero() } else { grid[i - 1] };
                    let mut hi = grid[i];
                    for _ in 0..40 {
                        let mid = if lo > T::zero() {
                            (lo * hi).sqrt()
                        } else {
                            hi / T::lit(2.0)
                        };
                        if feasible(&evaluate(report, cs, mid)?, mid) {
                            hi = mid;
                        } else {
                            lo = mid;
                        }
                    }
                    hi
                }
            }
        }
    };

    let lmo = &report.lmo;
    let lipschitz = lipschitz_constants(eps_hat, lmo.c_tilde, lmo.c_hat, report.ni.c_breve, lmo.c_check)?;
    let mut cert = Certificate {
        eps: oi.eps,
        eps_hat,
        lipschitz,
        c_star,
        theta: None,
        tau_star: None,
        tau_star_alt: None,
        tau_star_star: None,
        radius: None,
        displacement_bound: None,
        ball_within_eps_hat: false,
        gates: Gates {
            hypotheses,
            positivity,
            theta_below_half: false,
            eps_hat_above_tau: false,
        },
    };
    if let Some(cs) = c_star {
        let ev = evaluate(report, cs, eps_hat)?;
        cert.theta = Some(ev.theta);
        cert.gates.theta_below_half = ev.theta < T::lit(0.5);
        if let Some((tau, alt, tau2)) = ev.tau {
            cert.tau_star = Some(tau);
            cert.tau_star_alt = Some(alt);
            cert.tau_star_star = Some(tau2);
            let r = alt - cs * oi.eps;
            cert.radius = Some(r);
            cert.gates.eps_hat_above_tau = eps_hat > alt;
            cert.ball_within_eps_hat = cs * oi.eps + r <= eps_hat;
            if alt < T::one() {
                let one = T::one();
                cert.displacement_bound = Some(alt * (one + (one + alt).powi(2) / (one - alt * alt)));
            }
        }
    }
    Ok(cert)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Re-anchor the chart at every iterate instead of staying at `P⁰`.
    pub recenter: bool,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 50,
            recenter: false,
        }
    }
}

/// Reciprocal condition estimate below which the Newton system is rejected.
pub const MIN_RCOND: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct Iterate<T: Real> {
    /// Coordinates in the chart the step was taken from.
    pub coords: TangentCoord<T>,
    pub gradient_norm: T,
    /// `‖Δ_m‖_X` of the step leaving this iterate.
    pub step_norm: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonTrace<T: Real> {
    pub iterates: Vec<Iterate<T>>,
    pub converged: bool,
    pub recenter: bool,
    /// `P∞`
    pub point: GrassmannPoint<T>,
}

impl<T: Real> NewtonTrace<T> {
    /// `‖Δ_{m+1}‖ / ‖Δ_m‖²` over consecutive steps whose predecessor exceeds
    /// `floor`.
    pub fn quadratic_ratios(&self, floor: T) -> Vec<T> {
        let steps: Vec<T> = self.iterates.iter().filter_map(|i| i.step_norm).collect();
        steps
            .windows(2)
            .filter(|w| w[0] > floor)
            .map(|w| w[1] / (w[0] * w[0]))
            .collect()
    }
}

fn rcond<T: Real>(h: &RMat<T>, inv: &RMat<T>) -> T {
    let n1 = |m: &RMat<T>| (0..m.ncols()).fold(T::zero(), |a, j| a.max(m.column(j).abs().sum()));
    T::one() / (n1(h) * n1(inv))
}

/// Solves `F'(ξ)Δ = −F(ξ)` by LU with partial pivoting.
pub fn newton_step<T: Real>(
    hf: &HartreeFock<'_, T>,
    anchor: &GrassmannPoint<T>,
    xi: &TangentCoord<T>,
) -> Result<TangentCoord<T>> {
    let g = realify(&hf.gradient(anchor, xi)?);
    let h = hf.hessian_matrix(anchor, xi)?;
    let lu = h.clone().lu();
    let inv = lu
        .try_inverse()
        .ok_or_else(|| Error::Solver("Newton system is singular".into()))?;
    let rc = rcond(&h, &inv);
    if !(rc >= T::lit(MIN_RCOND)) {
        return Err(Error::Solver(format!("Newton system is ill-conditioned (rcond {rc})")));
    }
    let delta: DVector<T> = h
        .lu()
        .solve(&(-g))
        .ok_or_else(|| Error::Solver("LU solve failed".into()))?;
    Ok(TangentCoord {
        entries: complexify(&delta, anchor.rank(), anchor.nu() - anchor.rank()),
    })
}

pub fn newton_solve<T: Real>(set: &IntegralSet<T>, opts: &NewtonOptions) -> Result<NewtonTrace<T>> {
    if !(opts.tol > 0.0) {
        return invalid("tolerance must be positive");
    }
    let hf = HartreeFock::new(set);
    let mut anchor = GrassmannPoint::canonical(set.n_elec(), set.nu())?;
    let mut xi = anchor.zero_tangent();
    let mut iterates = Vec::new();
    let mut converged = false;
    for _ in 0..=opts.max_iter {
        let gnorm = one_inf(&hf.gradient(&anchor, &xi)?);
        if !gnorm.is_finite() {
            return Err(Error::Solver("gradient became non-finite".into()));
        }
        iterates.push(Iterate {
            coords: xi.clone(),
            gradient_norm: gnorm,
            step_norm: None,
        });
        if gnorm <= T::lit(opts.tol) {
            converged = true;
            break;
        }
        if iterates.len() > opts.max_iter {
            break;
        }
        let delta = newton_step(&hf, &anchor, &xi)?;
        iterates.last_mut().expect("pushed").step_norm = Some(delta.norm());
        if opts.recenter {
            anchor = retract(&anchor, &delta)?;
            xi = anchor.zero_tangent();
        } else {
            xi = xi.add(&delta);
        }
    }
    let point = retract(&anchor, &xi)?;
    Ok(NewtonTrace {
        iterates,
        converged,
        recenter: opts.recenter,
        point,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacementCheck<T> {
    pub measured: T,
    pub bound: Option<T>,
    pub holds: bool,
}

/// Compares `‖P∞ − P⁰‖₁,∞` with the certified bound.
pub fn displacement_check<T: Real>(point: &GrassmannPoint<T>, cert: &Certificate<T>) -> Result<DisplacementCheck<T>> {
    let p0 = GrassmannPoint::<T>::canonical(point.rank(), point.nu())?;
    let measured = one_inf(&(point.projector() - p0.projector()));
    let holds = cert.displacement_bound.map_or(false, |b| measured <= b);
    Ok(DisplacementCheck {
        measured,
        bound: cert.displacement_bound,
        holds,
    })
}

/// `‖F'(0)⁻¹‖` on tangent coordinates.
pub fn inverse_hessian_norm<T: Real>(set: &IntegralSet<T>) -> Result<OperatorNorm<T>> {
    let hf = HartreeFock::new(set);
    let p0 = GrassmannPoint::canonical(set.n_elec(), set.nu())?;
    let h = hf.hessian_matrix(&p0, &p0.zero_tangent())?;
    let inv = h
        .try_inverse()
        .ok_or_else(|| Error::Singular("F'(0) is singular".into()))?;
    x_operator_norm(&inv, p0.rank(), p0.nu() - p0.rank())
}

/// Upper bound on `‖F'(ξ₁) − F'(ξ₂)‖ / ‖ξ₁ − ξ₂‖`.
pub fn lipschitz_ratio<T: Real>(set: &IntegralSet<T>, xi1: &TangentCoord<T>, xi2: &TangentCoord<T>) -> Result<T> {
    let hf = HartreeFock::new(set);
    let p0 = GrassmannPoint::canonical(set.n_elec(), set.nu())?;
    let diff = hf.hessian_matrix(&p0, xi1)? - hf.hessian_matrix(&p0, xi2)?;
    let dist = xi1.sub(xi2).norm();
    if dist == T::zero() {
        return invalid("the two points coincide");
    }
    Ok(x_operator_norm(&diff, p0.rank(), p0.nu() - p0.rank())?.upper / dist)
}

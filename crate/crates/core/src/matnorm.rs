//! The `(1,∞)` matrix norm, its weighted variant, weight matrices, and the
//! induced operator norm on tangent coordinates.
//!
//! For a matrix `A`, `‖A‖₁,∞ = max(max column abs-sum, max row abs-sum)`.
//! The weighted norm multiplies each entry by `w_jk` before taking it.

use nalgebra::{ComplexField, DMatrix};

use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

/// Slack used when checking the weight axioms.
pub const WEIGHT_SLACK: f64 = 1e-12;

fn one_inf_by<T: Real>(rows: usize, cols: usize, modulus: impl Fn(usize, usize) -> T) -> T {
    let mut col = vec![T::zero(); cols];
    let mut best = T::zero();
    for i in 0..rows {
        let mut row = T::zero();
        for j in 0..cols {
            let m = modulus(i, j);
            row += m;
            col[j] += m;
        }
        best = best.max(row);
    }
    col.into_iter().fold(best, |a, b| a.max(b))
}

/// Unchecked `(1,∞)` norm; NaN propagates.
pub fn one_inf<T: Real, N: ComplexField<RealField = T>>(a: &DMatrix<N>) -> T {
    one_inf_by(a.nrows(), a.ncols(), |i, j| a[(i, j)].clone().modulus())
}

/// `‖A‖₁,∞`, rejecting non-finite entries.
pub fn norm_one_inf<T: Real, N: ComplexField<RealField = T>>(a: &DMatrix<N>) -> Result<T> {
    let v = one_inf(a);
    if !v.is_finite() || a.iter().any(|z| !z.clone().modulus().is_finite()) {
        return invalid("matrix has non-finite entries");
    }
    Ok(v)
}

/// `‖(w_jk a_jk)‖₁,∞`.
pub fn norm_weighted<T: Real, N: ComplexField<RealField = T>>(a: &DMatrix<N>, weights: &WeightSet<T>) -> Result<T> {
    let w = &weights.matrix;
    if w.shape() != a.shape() {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{}, weights are {}x{}",
            a.nrows(),
            a.ncols(),
            w.nrows(),
            w.ncols()
        )));
    }
    let v = one_inf_by(a.nrows(), a.ncols(), |i, j| w[(i, j)] * a[(i, j)].clone().modulus());
    if !v.is_finite() || a.iter().any(|z| !z.clone().modulus().is_finite()) {
        return invalid("matrix has non-finite entries");
    }
    Ok(v)
}

/// Symmetric weight matrix encoding the localization of the orbitals.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSet<T: Real> {
    pub matrix: DMatrix<T>,
    /// Orbital centres the weights were derived from, if any.
    pub points: Option<Vec<[T; 3]>>,
}

impl<T: Real> WeightSet<T> {
    pub fn new(w: DMatrix<T>) -> Result<Self> {
        if w.nrows() != w.ncols() || w.nrows() == 0 {
            return invalid("weight matrix must be square and non-empty");
        }
        if w.iter().any(|x| !x.is_finite()) {
            return invalid("weight matrix has non-finite entries");
        }
        Ok(Self {
            matrix: w,
            points: None,
        })
    }

    /// All-ones weights (only valid for a single orbital).
    pub fn ones(nu: usize) -> Self {
        Self {
            matrix: DMatrix::from_element(nu, nu, T::one()),
            points: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn validate(&self) -> WeightReport<T> {
        validate_weights(self, T::tol(WEIGHT_SLACK))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum WeightViolation<T> {
    NotSymmetric { j: usize, k: usize },
    BelowOne { j: usize, k: usize, value: T },
    RowSum { j: usize, sum: T },
    Submultiplicative { j: usize, k: usize, l: usize, excess: T },
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightReport<T> {
    pub violations: Vec<WeightViolation<T>>,
    /// `max_j Σ_k 1/w_jk`
    pub max_row_sum: T,
}

impl<T> WeightReport<T> {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

const MAX_WITNESSES: usize = 16;

/// Checks symmetry, `w ≥ 1`, `max_j Σ_k 1/w_jk ≤ 1` and
/// `w_jk⁻¹ w_kl⁻¹ ≤ w_jl⁻¹`, each up to `slack`.
pub fn validate_weights<T: Real>(weights: &WeightSet<T>, slack: T) -> WeightReport<T> {
    let w = &weights.matrix;
    let n = w.nrows();
    let mut out = Vec::new();
    let push = |v: WeightViolation<T>, out: &mut Vec<WeightViolation<T>>| {
        if out.len() < MAX_WITNESSES {
            out.push(v);
        }
    };
    for j in 0..n {
        for k in 0..n {
            if k > j && (w[(j, k)] - w[(k, j)]).abs() > slack * w[(j, k)].abs().max(T::one()) {
                push(WeightViolation::NotSymmetric { j, k }, &mut out);
            }
            if w[(j, k)] < T::one() - slack {
                push(WeightViolation::BelowOne { j, k, value: w[(j, k)] }, &mut out);
            }
        }
    }
    let mut max_row_sum = T::zero();
    for j in 0..n {
        let sum = (0..n).fold(T::zero(), |s, k| s + T::one() / w[(j, k)]);
        max_row_sum = max_row_sum.max(sum);
        if sum > T::one() + slack {
            push(WeightViolation::RowSum { j, sum }, &mut out);
        }
    }
    for j in 0..n {
        for k in 0..n {
            let a = T::one() / w[(j, k)];
            for l in 0..n {
                let excess = a / w[(k, l)] - T::one() / w[(j, l)];
                if excess > slack {
                    push(WeightViolation::Submultiplicative { j, k, l, excess }, &mut out);
                }
            }
        }
    }
    WeightReport {
        violations: out,
        max_row_sum,
    }
}

/// Builds weights `w_jk = max(1, c·|q_j − q_k|^s)` off the diagonal with a
/// common diagonal `d = 1/(1 − max_j Σ_{k≠j} 1/w_jk)`, choosing the smallest
/// feasible scale `c` by bisection.
pub fn weights_from_points<T: Real>(points: &[[T; 3]], s: T) -> Result<WeightSet<T>> {
    let n = points.len();
    if n == 0 {
        return invalid("no points given");
    }
    if !(s >= T::zero()) || !s.is_finite() {
        return invalid("decay exponent must be finite and non-negative");
    }
    if points.iter().flatten().any(|x| !x.is_finite()) {
        return invalid("points must be finite");
    }
    if n == 1 {
        let mut ws = WeightSet::ones(1);
        ws.points = Some(points.to_vec());
        return Ok(ws);
    }
    let dist = |a: &[T; 3], b: &[T; 3]| {
        let d = (0..3).fold(T::zero(), |acc, i| acc + (a[i] - b[i]) * (a[i] - b[i]));
        d.sqrt()
    };
    let build = |scale: T| -> Option<WeightSet<T>> {
        let mut w = DMatrix::from_element(n, n, T::one());
        let mut worst = T::zero();
        for j in 0..n {
            let mut row = T::zero();
            for k in 0..n {
                if k != j {
                    let v = (scale * dist(&points[j], &points[k]).powf(s)).max(T::one());
                    w[(j, k)] = v;
                    row += T::one() / v;
                }
            }
            worst = worst.max(row);
        }
        if worst >= T::one() {
            return None;
        }
        let d = T::one() / (T::one() - worst);
        for j in 0..n {
            w[(j, j)] = d;
        }
        let ws = WeightSet {
            matrix: w,
            points: Some(points.to_vec()),
        };
        if validate_weights(&ws, T::tol(WEIGHT_SLACK)).is_valid() {
            Some(ws)
        } else {
            None
        }
    };
    let two = T::lit(2.0);
    let cap = T::lit(1e150);
    let mut hi = T::one();
    let mut found = build(hi);
    while found.is_none() {
        hi *= two * two;
        if hi > cap {
            return Err(Error::ConstructionFailed(
                "no scale makes the weights satisfy the axioms (coincident points?)".into(),
            ));
        }
        found = build(hi);
    }
    let mut lo = hi / (two * two);
    // shrink the lower end until it is infeasible or tiny
    while lo > T::lit(1e-150) && build(lo).is_some() {
        hi = lo;
        lo /= two * two;
    }
    let mut best = build(hi).expect("feasible upper bracket");
    for _ in 0..64 {
        let mid = (lo * hi).sqrt();
        match build(mid) {
            Some(ws) => {
                hi = mid;
                best = ws;
            }
            None => lo = mid,
        }
    }
    Ok(best)
}

/// Two-sided estimate of an operator norm on tangent coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorNorm<T> {
    /// Attained by an explicit unit-norm probe.
    pub lower: T,
    /// Certified upper bound.
    pub upper: T,
}

fn spectral_2x2<T: Real>(a: T, b: T, c: T, d: T) -> T {
    let half = T::lit(0.5);
    let p = ((a + d) * (a + d) + (c - b) * (c - b)).sqrt();
    let q = ((a - d) * (a - d) + (b + c) * (b + c)).sqrt();
    half * (p + q)
}

/// Maximum-weight bipartite matching value of a non-negative matrix, i.e. the
/// supremum of `Σ c_lm x_lm` over doubly substochastic `x`.
pub(crate) fn assignment_value<T: Real>(c: &DMatrix<T>) -> T {
    let (r, k) = c.shape();
    let transpose = r > k;
    let (small, large) = if transpose { (k, r) } else { (r, k) };
    let at = |s: usize, l: usize| if transpose { c[(l, s)] } else { c[(s, l)] };
    if small > 20 {
        // loose but valid fallback
        let by_rows = (0..r).fold(T::zero(), |acc, i| {
            acc + (0..k).fold(T::zero(), |m, j| m.max(c[(i, j)]))
        });
        let by_cols = (0..k).fold(T::zero(), |acc, j| {
            acc + (0..r).fold(T::zero(), |m, i| m.max(c[(i, j)]))
        });
        return by_rows.min(by_cols);
    }
    let states = 1usize << small;
    let mut dp = vec![T::zero(); states];
    for l in 0..large {
        for mask in (0..states).rev() {
            for s in 0..small {
                if mask & (1 << s) == 0 {
                    let v = dp[mask] + at(s, l);
                    let next = mask | (1 << s);
                    if v > dp[next] {
                        dp[next] = v;
                    }
                }
            }
        }
    }
    dp.into_iter().fold(T::zero(), |a, b| a.max(b))
}

/// Norm of a real-linear operator on `rows × cols` complex matrices equipped
/// with `‖·‖₁,∞`, given as its realified matrix. Realified index of entry
/// `(j, k)` is `2(j·cols + k)` for the real part and one more for the
/// imaginary part.
pub fn x_operator_norm<T: Real>(op: &DMatrix<T>, rows: usize, cols: usize) -> Result<OperatorNorm<T>> {
    let n = rows * cols;
    if op.nrows() != 2 * n || op.ncols() != 2 * n {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, expected {}x{}",
            op.nrows(),
            op.ncols(),
            2 * n,
            2 * n
        )));
    }
    if op.iter().any(|x| !x.is_finite()) {
        return invalid("operator has non-finite entries");
    }
    // block[(out, in)] = spectral norm of the 2x2 real block
    let block = DMatrix::from_fn(n, n, |p, q| {
        spectral_2x2(
            op[(2 * p, 2 * q)],
            op[(2 * p, 2 * q + 1)],
            op[(2 * p + 1, 2 * q)],
            op[(2 * p + 1, 2 * q + 1)],
        )
    });
    let mut upper = T::zero();
    for j in 0..rows {
        let c = DMatrix::from_fn(rows, cols, |l, m| {
            (0..cols).fold(T::zero(), |s, k| s + block[(j * cols + k, l * cols + m)])
        });
        upper = upper.max(assignment_value(&c));
    }
    for k in 0..cols {
        let c = DMatrix::from_fn(rows, cols, |l, m| {
            (0..rows).fold(T::zero(), |s, j| s + block[(j * cols + k, l * cols + m)])
        });
        upper = upper.max(assignment_value(&c));
    }
    let mut lower = T::zero();
    for q in 0..n {
        for step in 0..8 {
            let theta = T::lit(step as f64 * std::f64::consts::PI / 4.0);
            let (cs, sn) = (theta.cos(), theta.sin());
            let out = DMatrix::from_fn(rows, cols, |j, k| {
                let p = j * cols + k;
                let re = op[(2 * p, 2 * q)] * cs + op[(2 * p, 2 * q + 1)] * sn;
                let im = op[(2 * p + 1, 2 * q)] * cs + op[(2 * p + 1, 2 * q + 1)] * sn;
                (re * re + im * im).sqrt()
            });
            lower = lower.max(one_inf(&out));
        }
    }
    Ok(OperatorNorm { lower, upper })
}

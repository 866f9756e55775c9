//! Displacement matrix, Fourier matrix B(k) = D₀ + p(k)·D_λ and its lift
//! B̃(x, y) to the 2-torus, the Kronecker square A(k) = B(k) ⊗ conj B(k)
//! and its real form A_U(k) = U·A(k)·U⁻¹.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::substitution::{eigen_data, Rule};
use crate::zlambda::{AlgebraicPoint, QuadraticRing};

pub type CMat2 = Matrix2<Complex64>;

/// T_ij: relative positions of type-i tiles inside type-j supertiles.
#[derive(Debug, Clone, PartialEq)]
pub struct DisplacementMatrix {
    pub sets: [[Vec<AlgebraicPoint>; 2]; 2],
}

impl DisplacementMatrix {
    pub fn cardinalities(&self) -> [[usize; 2]; 2] {
        let s = &self.sets;
        [
            [s[0][0].len(), s[0][1].len()],
            [s[1][0].len(), s[1][1].len()],
        ]
    }

    pub fn get(&self, i: usize, j: usize) -> &[AlgebraicPoint] {
        &self.sets[i][j]
    }

    /// Largest |t| over all displacements, as a real number.
    pub fn max_abs(&self, ring: &QuadraticRing) -> f64 {
        self.sets
            .iter()
            .flatten()
            .flatten()
            .map(|&t| ring.embed(t).abs())
            .fold(0.0, f64::max)
    }
}

/// T = [[{0}, {0}], [S, ∅]] with S = {λ, λ+1, …, λ+m−1}.
pub fn displacement_matrix(m: u64) -> Result<DisplacementMatrix> {
    let ring = QuadraticRing::new(m)?;
    let s = (0..m as i64).map(|j| ring.point(j, 1)).collect();
    Ok(DisplacementMatrix {
        sets: [
            [vec![AlgebraicPoint::ZERO], vec![AlgebraicPoint::ZERO]],
            [s, Vec::new()],
        ],
    })
}

/// λ as an unevaluated sum hi + lo, accurate to about 2⁻¹⁰⁶ relative.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SplitLambda {
    hi: f64,
    lo: f64,
}

impl SplitLambda {
    pub(crate) fn new(m: u64) -> Self {
        let m = m as f64;
        let hi = 0.5 * (1.0 + (4.0 * m + 1.0).sqrt());
        // one Newton step on f(x) = x² − x − m, residual formed exactly
        let sq_err = hi.mul_add(hi, -(hi * hi));
        let f = (hi * hi - hi - m) + sq_err;
        let lo = -f / (2.0 * hi - 1.0);
        Self { hi, lo }
    }

    /// frac(λ·k) in [0, 1), with the product carried in two terms.
    pub(crate) fn frac_times(&self, k: f64) -> f64 {
        let p = self.hi * k;
        let p_err = self.hi.mul_add(k, -p);
        let whole = p.floor();
        frac((p - whole) + (p_err + self.lo * k))
    }
}

/// Reduction to [0, 1).
pub fn frac(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

fn cis(t: f64) -> Complex64 {
    let (s, c) = (TAU * t).sin_cos();
    Complex64::new(c, s)
}

/// ψ(y) = 1 + z + … + z^{m−1} at z = e^{2πiy}.
pub fn psi(m: u64, y: f64) -> Complex64 {
    let z = cis(frac(y));
    let mut acc = Complex64::new(0.0, 0.0);
    let mut pow = Complex64::new(1.0, 0.0);
    for _ in 0..m {
        acc += pow;
        pow *= z;
    }
    acc
}

/// p̃(x, y) = e^{2πix}·ψ(y).
pub fn p_tilde(m: u64, x: f64, y: f64) -> Complex64 {
    cis(frac(x)) * psi(m, y)
}

/// p(k) = e^{2πiλk}·(1 + z + … + z^{m−1}), z = e^{2πik}.
pub fn p_eval(m: u64, k: f64) -> Complex64 {
    let lam = SplitLambda::new(m);
    p_tilde(m, lam.frac_times(k), frac(k))
}

/// [[1, 1], [p, 0]].
pub fn b_from_p(p: Complex64) -> CMat2 {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    CMat2::new(one, one, p, zero)
}

pub fn b_eval(m: u64, k: f64) -> CMat2 {
    b_from_p(p_eval(m, k))
}

/// B̃(x, y), 1-periodic in both arguments.
pub fn b_tilde_eval(m: u64, x: f64, y: f64) -> CMat2 {
    b_from_p(p_tilde(m, x, y))
}

/// The integer matrix M acting on row vectors: (x, y)·M = (x + m·y, x).
pub fn torus_step(m: u64, x: f64, y: f64) -> (f64, f64) {
    (frac(x + m as f64 * y), frac(x))
}

/// Z_m = (1/m)Z \ Z, the zero set of p.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZeroSet {
    m: u64,
}

impl ZeroSet {
    pub fn new(m: u64) -> Result<Self> {
        Rule::new(m)?;
        Ok(Self { m })
    }

    /// Distance from k to Z_m (∞ for m = 1, where Z_1 is empty).
    pub fn dist(&self, k: f64) -> f64 {
        if self.m == 1 {
            return f64::INFINITY;
        }
        let m = self.m as f64;
        let f = frac(k);
        // nearest j/m with j ∈ {1, …, m−1}
        let j = (f * m).round().clamp(1.0, m - 1.0);
        (f - j / m).abs()
    }

    pub fn contains(&self, k: f64, tol: f64) -> bool {
        self.dist(k) <= tol
    }
}

/// A(k) = B(k) ⊗ conj B(k).
pub fn a_eval(m: u64, k: f64) -> Matrix4<Complex64> {
    let b = b_eval(m, k);
    b.kronecker(&b.map(|z| z.conj()))
}

/// The unitary U conjugating the Kronecker algebra into real matrices.
pub fn u_matrix() -> Matrix4<Complex64> {
    let s = FRAC_1_SQRT_2;
    let c = |re: f64, im: f64| Complex64::new(re * s, im * s);
    let o = Complex64::new(0.0, 0.0);
    Matrix4::new(
        c(1.0, -1.0),
        o,
        o,
        o,
        o,
        c(1.0, 0.0),
        c(0.0, -1.0),
        o,
        o,
        c(0.0, -1.0),
        c(1.0, 0.0),
        o,
        o,
        o,
        o,
        c(1.0, -1.0),
    )
}

/// A_U(k) together with c(k) = Re p(k), s(k) = Im p(k).
#[derive(Debug, Clone, PartialEq)]
pub struct RealifiedEval {
    pub k: f64,
    pub matrix: Matrix4<f64>,
    pub c: f64,
    pub s: f64,
}

pub fn cs_eval(m: u64, k: f64) -> (f64, f64) {
    let p = p_eval(m, k);
    (p.re, p.im)
}

pub fn a_u_from_cs(c: f64, s: f64) -> Matrix4<f64> {
    Matrix4::new(
        1.0,
        1.0,
        1.0,
        1.0,
        c + s,
        s,
        c,
        0.0,
        c - s,
        c,
        -s,
        0.0,
        c * c + s * s,
        0.0,
        0.0,
        0.0,
    )
}

pub fn a_u_eval(m: u64, k: f64) -> RealifiedEval {
    let (c, s) = cs_eval(m, k);
    RealifiedEval {
        k,
        matrix: a_u_from_cs(c, s),
        c,
        s,
    }
}

/// A_U²(k) := A_U(k/λ)·A_U(k).
pub fn a_u2_eval(m: u64, k: f64) -> Matrix4<f64> {
    let lambda = eigen_data(m).map(|e| e.lambda_plus).unwrap_or(1.0);
    a_u_eval(m, k / lambda).matrix * a_u_eval(m, k).matrix
}

/// M ⊗ M as a real 4×4 matrix.
pub fn kron_subst(m: u64) -> Matrix4<f64> {
    a_u_from_cs(m as f64, 0.0)
}

/// w_PF = v_PF ⊗ v_PF, entries ν_i·ν_j.
pub fn pf_tensor(m: u64) -> Result<Vector4<f64>> {
    let [n0, n1] = eigen_data(m)?.freq;
    Ok(Vector4::new(n0 * n0, n0 * n1, n1 * n0, n1 * n1))
}

fn strictly_positive(a: &Matrix4<f64>) -> bool {
    a.iter().all(|&x| x > 0.0) && a.determinant() > 0.0
}

/// Largest ε such that A_U²(k) is entrywise positive with positive
/// determinant on (0, ε], found by a 10⁻⁴ scan refined by bisection to 10⁻⁶,
/// then shrunk by 0.9.
pub fn epsilon_estimate(m: u64) -> Result<f64> {
    Rule::new(m)?;
    const STEP: f64 = 1e-4;
    let mut good = 0.0;
    let mut bad = None;
    for i in 1..=10_000 {
        let k = i as f64 * STEP;
        if strictly_positive(&a_u2_eval(m, k)) {
            good = k;
        } else {
            bad = Some(k);
            break;
        }
    }
    if good == 0.0 {
        return Err(invalid(format!("no positivity interval found for m = {m}")));
    }
    if let Some(mut hi) = bad {
        let mut lo = good;
        while hi - lo > 1e-6 {
            let mid = 0.5 * (lo + hi);
            if strictly_positive(&a_u2_eval(m, mid)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        good = lo;
    }
    Ok(0.9 * good)
}

/// Trajectory of the rescaled iteration w_{n+1} = A_U²(k/λ^{2n})·w_n.
#[derive(Debug, Clone, PartialEq)]
pub struct PositivityRun {
    /// w_n / ‖w_n‖₁ for n = 0..=steps.
    pub directions: Vec<Vector4<f64>>,
    /// log ‖w_n‖₁.
    pub log_norms: Vec<f64>,
    /// Every iterate was strictly positive.
    pub all_positive: bool,
}

impl PositivityRun {
    /// (log‖w_{n+1}‖ − log‖w_n‖) for the last step.
    pub fn last_growth(&self) -> f64 {
        let n = self.log_norms.len();
        self.log_norms[n - 1] - self.log_norms[n - 2]
    }
}

pub fn positivity_iteration(
    m: u64,
    k: f64,
    w0: Vector4<f64>,
    steps: usize,
) -> Result<PositivityRun> {
    let eps = epsilon_estimate(m)?;
    if !(k >= 0.0 && k <= eps) {
        return Err(invalid(format!("k = {k} outside [0, ε] with ε = {eps}")));
    }
    if w0.iter().any(|&x| x < 0.0) || w0.iter().all(|&x| x == 0.0) {
        return Err(invalid("starting vector must be non-negative and non-zero"));
    }
    let lambda = eigen_data(m)?.lambda_plus;
    let norm1 = |v: &Vector4<f64>| v.iter().map(|x| x.abs()).sum::<f64>();
    let mut w = w0 / norm1(&w0);
    let mut log_norm = norm1(&w0).ln();
    let mut run = PositivityRun {
        directions: vec![w],
        log_norms: vec![log_norm],
        all_positive: true,
    };
    let mut kk = k;
    for _ in 0..steps {
        let next = a_u2_eval(m, kk) * w;
        run.all_positive &= next.iter().all(|&x| x > 0.0);
        let n = norm1(&next);
        log_norm += n.ln();
        w = next / n;
        run.directions.push(w);
        run.log_norms.push(log_norm);
        kk /= lambda * lambda;
    }
    Ok(run)
}

//! The Fourier-matrix cocycle B^(n)(k) = B(k)·B(λk)⋯B(λ^{n−1}k), its
//! Lyapunov exponents, the determinant average, the mean log-norms that
//! decide singularity, and the constant-length variant.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::fourier::{b_from_p, frac, psi, CMat2, SplitLambda, ZeroSet};
use crate::quadrature::{pairwise_sum, torus_mean};
use crate::substitution::{classify, eigen_data, Rule, SpectralClass};

/// Common denominator of the orbit grid: lcm(1, …, 20) times a prime.
/// Every m ≤ 20 divides it, so rational points j/m are represented exactly.
pub const ORBIT_DENOMINATOR: u64 = 232_792_560 * 39_620_561_843;

/// Inverse-route and singular-hit tolerance on the distance to Z_m.
pub const ZERO_SET_TOL: f64 = 1e-9;

/// Seed used when the caller does not supply one.
pub const DEFAULT_SEED: u64 = 1;

fn mod_mul(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % ORBIT_DENOMINATOR as u128) as u64
}

fn mod_add(a: u64, b: u64) -> u64 {
    ((a as u128 + b as u128) % ORBIT_DENOMINATOR as u128) as u64
}

/// Nearest grid point to t mod 1. A double that is the rounding of a
/// fraction j/q with q ≤ 20 is read as that fraction exactly.
fn to_grid(t: f64) -> u64 {
    let f = frac(t);
    for q in 1..=20u64 {
        let j = (f * q as f64).round();
        if (f - j / q as f64).abs() <= 4.0 * f64::EPSILON {
            return mod_mul(j as u64 % q, ORBIT_DENOMINATOR / q);
        }
    }
    let g = (f * ORBIT_DENOMINATOR as f64).round() as u128;
    (g % ORBIT_DENOMINATOR as u128) as u64
}

fn from_grid(g: u64) -> f64 {
    g as f64 / ORBIT_DENOMINATOR as f64
}

fn cis(t: f64) -> Complex64 {
    let (s, c) = (TAU * t).sin_cos();
    Complex64::new(c, s)
}

/// Orbit of the toral endomorphism (x, y) ↦ (x + m·y, x) on the grid
/// (1/D)Z², started at (λk mod 1, k mod 1). The y-coordinate at step j is
/// λ^j·k mod 1 up to the initial rounding, with no error growth from the
/// iteration itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusOrbit {
    m: u64,
    start: (u64, u64),
    point: (u64, u64),
    step: usize,
}

impl TorusOrbit {
    pub fn new(m: u64, k: f64) -> Result<Self> {
        let y = to_grid(k);
        let x = match classify(m)? {
            // x = λ·y stays on the line exactly when λ is an integer
            SpectralClass::IntegerMultiplier(l) => mod_mul(l + 1, y),
            _ => to_grid(SplitLambda::new(m).frac_times(k)),
        };
        Ok(Self::from_grid(m, x, y))
    }

    /// Start at (x/D, y/D) for grid integers x, y.
    pub fn from_grid(m: u64, x: u64, y: u64) -> Self {
        let start = (x % ORBIT_DENOMINATOR, y % ORBIT_DENOMINATOR);
        Self {
            m,
            start,
            point: start,
            step: 0,
        }
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn grid_point(&self) -> (u64, u64) {
        self.point
    }

    /// Current point as reals in [0, 1)².
    pub fn point(&self) -> (f64, f64) {
        (from_grid(self.point.0), from_grid(self.point.1))
    }

    pub fn advance(&mut self) {
        let (x, y) = self.point;
        self.point = (mod_add(x, mod_mul(self.m, y)), x);
        self.step += 1;
    }

    /// The start point times M^j, computed from scratch by repeated squaring.
    pub fn at_step(&self, j: u64) -> (u64, u64) {
        // row vector times [[a, b], [c, d]]
        let mul = |p: [u64; 4], q: [u64; 4]| {
            [
                mod_add(mod_mul(p[0], q[0]), mod_mul(p[1], q[2])),
                mod_add(mod_mul(p[0], q[1]), mod_mul(p[1], q[3])),
                mod_add(mod_mul(p[2], q[0]), mod_mul(p[3], q[2])),
                mod_add(mod_mul(p[2], q[1]), mod_mul(p[3], q[3])),
            ]
        };
        let mut result = [1, 0, 0, 1];
        let mut base = [1, 1, self.m % ORBIT_DENOMINATOR, 0];
        let mut e = j;
        while e > 0 {
            if e & 1 == 1 {
                result = mul(result, base);
            }
            base = mul(base, base);
            e >>= 1;
        }
        let (x, y) = self.start;
        (
            mod_add(mod_mul(x, result[0]), mod_mul(y, result[2])),
            mod_add(mod_mul(x, result[1]), mod_mul(y, result[3])),
        )
    }

    /// Exact test of p̃ = 0 at the current point when m divides D.
    pub fn on_zero_set(&self) -> bool {
        let y = self.point.1;
        if ORBIT_DENOMINATOR.is_multiple_of(self.m) {
            y != 0 && mod_mul(self.m, y) == 0
        } else {
            ZeroSet::new(self.m)
                .map(|z| z.dist(from_grid(y)) == 0.0)
                .unwrap_or(false)
        }
    }

    /// Distance of the current y to Z_m.
    pub fn zero_set_dist(&self) -> f64 {
        if self.on_zero_set() {
            return 0.0;
        }
        ZeroSet::new(self.m)
            .map(|z| z.dist(from_grid(self.point.1)))
            .unwrap_or(f64::INFINITY)
    }

    /// p̃ at the current point.
    pub fn p(&self) -> Complex64 {
        let (x, y) = self.point();
        cis(x) * psi(self.m, y)
    }

    /// log|det B| = log|ψ(y)| at the current point (−∞ on Z_m).
    pub fn log_abs_det(&self) -> f64 {
        if self.on_zero_set() {
            return f64::NEG_INFINITY;
        }
        psi(self.m, self.point().1).norm().ln()
    }
}

/// Running product kept as e^{log_scale}·matrix with ‖matrix‖_F = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct CocycleAccumulator {
    pub matrix: CMat2,
    pub log_scale: f64,
    pub n: usize,
    pub k0: f64,
}

impl CocycleAccumulator {
    /// Empty product (the identity).
    pub fn identity(k0: f64) -> Self {
        let s = std::f64::consts::SQRT_2;
        Self {
            matrix: CMat2::identity() / Complex64::new(s, 0.0),
            log_scale: s.ln(),
            n: 0,
            k0,
        }
    }

    /// Right-multiply by `factor`.
    pub fn push(&mut self, factor: &CMat2) {
        self.renormalize(self.matrix * factor);
    }

    /// Left-multiply by `factor`.
    pub fn push_left(&mut self, factor: &CMat2) {
        self.renormalize(factor * self.matrix);
    }

    fn renormalize(&mut self, next: CMat2) {
        let norm = next.norm();
        self.n += 1;
        if norm == 0.0 {
            self.matrix = next;
            self.log_scale = f64::NEG_INFINITY;
            return;
        }
        self.matrix = next / Complex64::new(norm, 0.0);
        self.log_scale += norm.ln();
    }

    /// e^{log_scale}·matrix; overflows for long products.
    pub fn product(&self) -> CMat2 {
        self.matrix * Complex64::new(self.log_scale.exp(), 0.0)
    }
}

/// B^(n)(k), rescaled to unit Frobenius norm at every step.
pub fn cocycle_product(m: u64, k: f64, n: usize) -> Result<CocycleAccumulator> {
    if n == 0 {
        return Err(invalid("cocycle length n must be at least 1"));
    }
    let mut orbit = TorusOrbit::new(m, k)?;
    let mut acc = CocycleAccumulator::identity(k);
    for _ in 0..n {
        acc.push(&b_from_p(orbit.p()));
        orbit.advance();
    }
    Ok(acc)
}

/// (1/n)·log‖B^(n)(k)‖_F.
pub fn chi_b_estimate(m: u64, k: f64, n: usize) -> Result<f64> {
    let acc = cocycle_product(m, k, n)?;
    Ok(acc.log_scale / n as f64)
}

/// Extremal exponents of the cocycle together with χ^B.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovEstimate {
    pub chi_b: f64,
    pub chi_min: f64,
    pub chi_max: f64,
    /// χ_min from the growth of the inverse product, when computed.
    pub chi_min_inverse: Option<f64>,
    pub n: usize,
    pub k: f64,
}

impl LyapunovEstimate {
    fn from_chi_b(log_sqrt_lambda: f64, chi_b: f64, n: usize, k: f64) -> Self {
        Self {
            chi_b,
            chi_min: log_sqrt_lambda - chi_b,
            chi_max: log_sqrt_lambda + chi_b,
            chi_min_inverse: None,
            n,
            k,
        }
    }
}

/// χ_max, χ_min from the forward product, and χ_min again from the inverse
/// product B(λ^{n−1}k)^{-1}⋯B(k)^{-1} multiplied out step by step.
pub fn lyapunov_pair(m: u64, k: f64, n: usize) -> Result<LyapunovEstimate> {
    if n == 0 {
        return Err(invalid("cocycle length n must be at least 1"));
    }
    let log_sqrt_lambda = 0.5 * eigen_data(m)?.log_lambda();
    let mut orbit = TorusOrbit::new(m, k)?;
    let mut forward = CocycleAccumulator::identity(k);
    let mut inverse = CocycleAccumulator::identity(k);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    for step in 0..n {
        if orbit.zero_set_dist() < ZERO_SET_TOL {
            return Err(Error::SingularOrbit { k, step });
        }
        let p = orbit.p();
        forward.push(&b_from_p(p));
        // [[1, 1], [p, 0]]⁻¹ = [[0, 1/p], [1, −1/p]]
        let q = one / p;
        inverse.push_left(&CMat2::new(zero, q, one, -q));
        orbit.advance();
    }
    let chi_b = forward.log_scale / n as f64;
    let mut est = LyapunovEstimate::from_chi_b(log_sqrt_lambda, chi_b, n, k);
    est.chi_min_inverse = Some(log_sqrt_lambda - inverse.log_scale / n as f64);
    Ok(est)
}

/// (1/n)·Σ_{j<n} log|det B(λ^j k)|; −∞ when the orbit meets Z_m.
pub fn det_average(m: u64, k: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let mut orbit = TorusOrbit::new(m, k)?;
    let mut terms = Vec::with_capacity(n);
    for _ in 0..n {
        let t = orbit.log_abs_det();
        if t == f64::NEG_INFINITY || t < (1e-300f64).ln() {
            return Ok(f64::NEG_INFINITY);
        }
        terms.push(t);
        orbit.advance();
    }
    Ok(pairwise_sum(&terms) / n as f64)
}

/// Uniform samples from (0, 1) drawn from a seeded ChaCha8 stream.
pub struct KSampler {
    rng: ChaCha8Rng,
}

impl KSampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn next_k(&mut self) -> f64 {
        loop {
            let k: f64 = self.rng.random();
            if k > 0.0 {
                return k;
            }
        }
    }

    pub fn take(&mut self, count: usize) -> Vec<f64> {
        (0..count).map(|_| self.next_k()).collect()
    }
}

/// Evaluates `f` at `count` seeded random k, drawing replacement samples for
/// those where `f` reports a singular orbit. Replacements are drawn in index
/// order, so the output depends only on the seed.
pub fn sample_over_k<T, F>(seed: u64, count: usize, f: F) -> Result<Vec<(f64, T)>>
where
    T: Send,
    F: Fn(f64) -> Result<T> + Sync + Send,
{
    const MAX_ROUNDS: usize = 32;
    let mut sampler = KSampler::new(seed);
    let mut ks = sampler.take(count);
    let mut out: Vec<Option<(f64, T)>> = (0..count).map(|_| None).collect();
    for _ in 0..MAX_ROUNDS {
        let pending: Vec<usize> = (0..count).filter(|&i| out[i].is_none()).collect();
        if pending.is_empty() {
            break;
        }
        let results = crate::par::map_range(pending.len(), |j| f(ks[pending[j]]));
        for (&i, r) in pending.iter().zip(results) {
            match r {
                Ok(v) => out[i] = Some((ks[i], v)),
                Err(Error::SingularOrbit { .. }) => ks[i] = sampler.next_k(),
                Err(e) => return Err(e),
            }
        }
    }
    out.into_iter()
        .map(|o| o.ok_or_else(|| Error::NonConvergence("resampling did not avoid Z_m".into())))
        .collect()
}

/// [`det_average`] over seeded samples; orbits meeting Z_m are resampled.
pub fn det_average_sampled(m: u64, n: usize, count: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    sample_over_k(seed, count, |k| {
        let v = det_average(m, k, n)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::SingularOrbit { k, step: 0 })
        }
    })
}

/// Grid resolution per axis for the mean log-norm table.
pub const TABLE1_RESOLUTION: usize = 2048;
/// Largest N tried when searching for the minimal N.
pub const MAX_N: usize = 12;
/// Accepted grid-refinement error.
pub const MEAN_TOLERANCE: f64 = 1e-3;

/// (1/N)·M(log‖B^(N)‖²_F) with its grid-refinement error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEstimate {
    pub n: usize,
    pub value: f64,
    /// Nodes per axis; the 1-D route uses resolution² nodes on the line.
    pub grid_resolution: usize,
    pub error_estimate: f64,
}

/// log‖B̃^(N)‖²_F for N = 1..=out.len() along the torus orbit of (x, y).
fn log_norms_along(m: u64, mut x: f64, mut y: f64, out: &mut [f64]) {
    let mut prod = CMat2::identity();
    for slot in out.iter_mut() {
        prod *= b_from_p(cis(x) * psi(m, y));
        *slot = prod.norm_squared().ln();
        (x, y) = (frac(x + m as f64 * y), x);
    }
}

/// Torus means (1/N)∫ log‖B̃^(N)(x, y)‖²_F for N = 1..=n_max.
pub fn torus_means(m: u64, n_max: usize, res: usize) -> Result<Vec<f64>> {
    Rule::new(m)?;
    if n_max == 0 || res < 2 {
        return Err(invalid("need n_max ≥ 1 and resolution ≥ 2"));
    }
    let h = 1.0 / res as f64;
    let rows = crate::par::map_range(res, |i| {
        let x = (i as f64 + 0.5) * h;
        let mut per_n: Vec<Vec<f64>> = vec![Vec::with_capacity(res); n_max];
        let mut buf = vec![0.0; n_max];
        for j in 0..res {
            log_norms_along(m, x, (j as f64 + 0.5) * h, &mut buf);
            for (v, &b) in per_n.iter_mut().zip(&buf) {
                v.push(b);
            }
        }
        per_n.iter().map(|v| pairwise_sum(v)).collect::<Vec<f64>>()
    });
    Ok((0..n_max)
        .map(|n| {
            let col: Vec<f64> = rows.iter().map(|r| r[n]).collect();
            pairwise_sum(&col) * h * h / (n + 1) as f64
        })
        .collect())
}

/// Line means (1/N)∫₀¹ log‖B^(N)(k)‖²_F for integer λ, N = 1..=n_max,
/// with `nodes` midpoint nodes.
pub fn line_means(m: u64, n_max: usize, nodes: usize) -> Result<Vec<f64>> {
    let lambda = match classify(m)? {
        SpectralClass::IntegerMultiplier(l) => l + 1,
        _ => return Err(invalid(format!("λ is not an integer for m = {m}"))),
    };
    const CHUNK: usize = 4096;
    let h = 1.0 / nodes as f64;
    let chunks = nodes.div_ceil(CHUNK);
    let sums = crate::par::map_range(chunks, |c| {
        let mut per_n: Vec<Vec<f64>> = vec![Vec::with_capacity(CHUNK); n_max];
        let mut buf = vec![0.0; n_max];
        for j in c * CHUNK..((c + 1) * CHUNK).min(nodes) {
            let k = (j as f64 + 0.5) * h;
            log_norms_along(m, frac(lambda as f64 * k), k, &mut buf);
            for (v, &b) in per_n.iter_mut().zip(&buf) {
                v.push(b);
            }
        }
        per_n.iter().map(|v| pairwise_sum(v)).collect::<Vec<f64>>()
    });
    Ok((0..n_max)
        .map(|n| {
            let col: Vec<f64> = sums.iter().map(|r| r[n]).collect();
            pairwise_sum(&col) * h / (n + 1) as f64
        })
        .collect())
}

fn checked(n: usize, res: usize, fine: f64, coarse: f64) -> Result<MeanEstimate> {
    checked_within(n, res, fine, coarse, MEAN_TOLERANCE)
}

fn checked_within(n: usize, res: usize, fine: f64, coarse: f64, tol: f64) -> Result<MeanEstimate> {
    let est = MeanEstimate {
        n,
        value: fine,
        grid_resolution: res,
        error_estimate: (fine - coarse).abs(),
    };
    if est.error_estimate >= tol {
        return Err(Error::NonConvergence(format!(
            "mean for N = {n} at resolution {res} has refinement error {:.2e}",
            est.error_estimate
        )));
    }
    Ok(est)
}

/// The mean deciding singularity: a line integral when λ is an integer,
/// otherwise the integral over the 2-torus of the lifted cocycle.
pub fn mean_log_norm(m: u64, n: usize, resolution: usize) -> Result<MeanEstimate> {
    if n == 0 {
        return Err(invalid("N must be at least 1"));
    }
    if matches!(classify(m)?, SpectralClass::IntegerMultiplier(_)) {
        let nodes = resolution * resolution;
        let fine = line_means(m, n, nodes)?[n - 1];
        let coarse = line_means(m, n, nodes / 4)?[n - 1];
        checked(n, resolution, fine, coarse)
    } else {
        mean_log_norm_torus(m, n, resolution)
    }
}

/// The torus mean for any m, including integer λ.
pub fn mean_log_norm_torus(m: u64, n: usize, resolution: usize) -> Result<MeanEstimate> {
    if n == 0 {
        return Err(invalid("N must be at least 1"));
    }
    let fine = torus_means(m, n, resolution)?[n - 1];
    let coarse = torus_means(m, n, resolution / 2)?[n - 1];
    checked(n, resolution, fine, coarse)
}

/// One row of the minimal-N table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Table1Row {
    pub m: u64,
    pub log_lambda: f64,
    pub n: usize,
    pub mean: f64,
    pub grid_resolution: usize,
    pub error_estimate: f64,
    /// |log λ − mean| stayed below the tolerance after refinement.
    pub indeterminate: bool,
}

/// Minimal N with log λ > (1/N)·M(log‖B̃^(N)‖²_F) for one m.
pub fn table1_row(m: u64, resolution: usize) -> Result<Table1Row> {
    table1_row_within(m, resolution, MEAN_TOLERANCE)
}

/// As [`table1_row`] with `tol` as both the tie and the refinement tolerance.
pub fn table1_row_within(m: u64, resolution: usize, tol: f64) -> Result<Table1Row> {
    if !(tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    const MAX_DOUBLINGS: u32 = 2;
    let log_lambda = eigen_data(m)?.log_lambda();
    let mut res = resolution;
    let mut n_max = 6.min(MAX_N);
    let mut doublings = 0;
    loop {
        let fine = torus_means(m, n_max, res)?;
        let coarse = torus_means(m, n_max, res / 2)?;
        let found = fine.iter().position(|&v| log_lambda - v > -tol);
        let Some(i) = found else {
            if n_max < MAX_N {
                n_max = MAX_N;
                continue;
            }
            return Err(Error::NonConvergence(format!(
                "no N ≤ {MAX_N} with log λ > mean for m = {m}"
            )));
        };
        let est = checked_within(i + 1, res, fine[i], coarse[i], tol)?;
        let margin = log_lambda - est.value;
        if margin.abs() < tol && doublings < MAX_DOUBLINGS {
            res *= 2;
            doublings += 1;
            continue;
        }
        if margin < 0.0 {
            // a near-tie resolved against this N: move on to the next one
            let next = fine[i + 1..]
                .iter()
                .position(|&v| v < log_lambda)
                .map(|j| i + 1 + j);
            if let Some(j) = next {
                let est = checked_within(j + 1, res, fine[j], coarse[j], tol)?;
                return Ok(row(m, log_lambda, est, false));
            }
            return Err(Error::NonConvergence(format!(
                "no N ≤ {n_max} found for m = {m}"
            )));
        }
        return Ok(row(m, log_lambda, est, margin < tol));
    }
}

fn row(m: u64, log_lambda: f64, est: MeanEstimate, indeterminate: bool) -> Table1Row {
    Table1Row {
        m,
        log_lambda,
        n: est.n,
        mean: est.value,
        grid_resolution: est.grid_resolution,
        error_estimate: est.error_estimate,
        indeterminate,
    }
}

pub fn table1(m_from: u64, m_to: u64, resolution: usize) -> Result<Vec<Table1Row>> {
    table1_within(m_from, m_to, resolution, MEAN_TOLERANCE)
}

pub fn table1_within(
    m_from: u64,
    m_to: u64,
    resolution: usize,
    tol: f64,
) -> Result<Vec<Table1Row>> {
    if m_from == 0 || m_from > m_to {
        return Err(invalid(format!("bad m range {m_from}..={m_to}")));
    }
    (m_from..=m_to)
        .map(|m| table1_row_within(m, resolution, tol))
        .collect()
}

/// The Fourier matrix of the constant-length substitution.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantLengthFourier {
    pub l: u64,
    pub k: f64,
    pub matrix: CMat2,
}

/// ψ_ℓ(z) = 1 + z + … + z^ℓ at z = e^{2πik}.
pub fn psi_l(l: u64, k: f64) -> Complex64 {
    psi(l + 1, k)
}

/// [[1, ψ_ℓ(z)], [z·ψ_{ℓ−1}(z), 0]].
pub fn constant_length_fourier(l: u64, k: f64) -> Result<ConstantLengthFourier> {
    if l == 0 {
        return Err(invalid("ℓ must be at least 1"));
    }
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let matrix = CMat2::new(one, psi_l(l, k), cis(frac(k)) * psi(l, k), zero);
    Ok(ConstantLengthFourier { l, k, matrix })
}

/// Orbit k ↦ (ℓ+1)k mod 1 on the exact grid.
fn constant_length_orbit(l: u64, k: f64) -> impl Iterator<Item = f64> {
    let mut y = to_grid(k);
    std::iter::from_fn(move || {
        let cur = from_grid(y);
        y = mod_mul(l + 1, y);
        Some(cur)
    })
}

/// Exponents of B(k)·B((ℓ+1)k)⋯ for the constant-length matrix.
pub fn constant_length_exponents(l: u64, k: f64, n: usize) -> Result<LyapunovEstimate> {
    if n == 0 {
        return Err(invalid("cocycle length n must be at least 1"));
    }
    constant_length_fourier(l, k)?;
    // In the row basis {(1,1), (1,0)} every factor is lower triangular,
    // PB(k)P⁻¹ = [[ψ_ℓ, 0], [ψ_ℓ, −zψ_{ℓ−1}]]. Multiplying in that basis
    // keeps the zero exact; rounding in the original basis does not, and
    // the perturbed product grows at a spurious rate of order 1/|log ε|.
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let p = CMat2::new(one, one, one, zero);
    let p_inv = CMat2::new(zero, one, one, -one);
    let mut acc = CocycleAccumulator::identity(k);
    for y in constant_length_orbit(l, k).take(n) {
        let eigen = psi_l(l, y);
        acc.push(&CMat2::new(eigen, zero, eigen, -cis(y) * psi(l, y)));
    }
    let log_norm = acc.log_scale + (p_inv * acc.matrix * p).norm().ln();
    let log_sqrt = 0.5 * ((l + 1) as f64).ln();
    Ok(LyapunovEstimate::from_chi_b(
        log_sqrt,
        log_norm / n as f64,
        n,
        k,
    ))
}

/// (1/n)·Σ log|ψ_ℓ((ℓ+1)^j k)|, the growth along the common left eigenvector.
pub fn psi_eigen_average(l: u64, k: f64, n: usize) -> Result<f64> {
    if l == 0 || n == 0 {
        return Err(invalid("need ℓ ≥ 1 and n ≥ 1"));
    }
    let terms: Vec<f64> = constant_length_orbit(l, k)
        .take(n)
        .map(|y| psi_l(l, y).norm().ln())
        .collect();
    Ok(pairwise_sum(&terms) / n as f64)
}

/// Torus mean of log|p̃|², zero for every m.
pub fn mean_log_abs_p(m: u64, res: usize) -> Result<f64> {
    Rule::new(m)?;
    Ok(torus_mean(res, |x, y| (cis(x) * psi(m, y)).norm_sqr().ln()))
}

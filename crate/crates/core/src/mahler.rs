//! Logarithmic Mahler measures m(p) = ∫₀¹ log|p(e^{2πit})| dt of the q, r
//! and s families, by Jensen's formula over the roots and by quadrature on
//! the unit circle.

use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::poly::{geometric_sum, roots, strip_unimodular_factors, IntPolynomial};
use crate::quadrature::{integrate, integrate_pieces, periodic_mean, torus_mean};
use crate::substitution::eigen_data;

/// log √46.
pub const LOG_SQRT_46: f64 = 1.914_320_698_244_547_5;
/// log(3 + √5).
pub const LOG_3_PLUS_SQRT5: f64 = 1.655_570_830_679_152;

/// Roots with ||α| − 1| below this count as lying on the unit circle.
pub const ON_CIRCLE_TOL: f64 = 1e-10;

/// Phase offset for the quadrature, so that no node or segment boundary
/// falls on a root of unity.
const PHASE: f64 = 0.061_803_398_874_989_48;

/// q_m(z) = 2z^{m−1} + (1 + z + … + z^{m−1})².
pub fn q_poly(m: u64) -> Result<IntPolynomial> {
    if m == 0 {
        return Err(invalid("m must be at least 1"));
    }
    let psi = geometric_sum(m as usize);
    let sq = &psi * &psi;
    let mut coeffs = sq.coeffs().to_vec();
    coeffs[m as usize - 1] += 2;
    IntPolynomial::new(coeffs)
}

/// r_m(z) = z^{2m} + 2z^{m+1} − 6z^m + 2z^{m−1} + 1 for m ≥ 2, and
/// r₁ = 3(z − 1)², so that r_m = (z − 1)²·q_m for all m.
pub fn r_poly(m: u64) -> Result<IntPolynomial> {
    match m {
        0 => Err(invalid("m must be at least 1")),
        1 => IntPolynomial::new(vec![3, -6, 3]),
        _ => {
            let m = m as usize;
            IntPolynomial::from_terms(&[(1, 2 * m), (2, m + 1), (-6, m), (2, m - 1), (1, 0)])
        }
    }
}

/// s_ℓ(z) = z^{2ℓ+2} + z^{2ℓ+1} + z^{ℓ+2} − 6z^{ℓ+1} + z^ℓ + z + 1.
pub fn s_poly(l: u64) -> Result<IntPolynomial> {
    if l == 0 {
        return Err(invalid("ℓ must be at least 1"));
    }
    let l = l as usize;
    IntPolynomial::from_terms(&[
        (1, 2 * l + 2),
        (1, 2 * l + 1),
        (1, l + 2),
        (-6, l + 1),
        (1, l),
        (1, 1),
        (1, 0),
    ])
}

/// ψ_ℓ(z) = 1 + z + … + z^ℓ.
pub fn psi_poly(l: u64) -> IntPolynomial {
    geometric_sum(l as usize + 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MahlerMethod {
    Quadrature,
    Roots,
}

impl fmt::Display for MahlerMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MahlerMethod::Quadrature => write!(f, "quadrature"),
            MahlerMethod::Roots => write!(f, "roots"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MahlerResult {
    pub value: f64,
    pub method: MahlerMethod,
    pub error_estimate: f64,
}

/// Jensen's formula: log|c_d| + Σ_{|α|>1} log|α|. Cyclotomic factors and
/// powers of z are divided out exactly before the roots are computed.
pub fn mahler_roots(p: &IntPolynomial) -> Result<MahlerResult> {
    let reduced = strip_unimodular_factors(p);
    let mut value = (reduced.leading() as f64).abs().ln();
    let mut error = 0.0;
    for root in roots(&reduced)? {
        let r = root.value.norm();
        if r > 1.0 + ON_CIRCLE_TOL {
            value += r.ln();
            error += root.correction / r;
        } else if (r - 1.0).abs() <= ON_CIRCLE_TOL {
            error += (r - 1.0).abs();
        }
    }
    Ok(MahlerResult {
        value,
        method: MahlerMethod::Roots,
        error_estimate: error + 4.0 * f64::EPSILON * reduced.degree() as f64,
    })
}

/// ∫₀¹ log|p(e^{2πit})| dt by adaptive Gauss–Kronrod over `n_points` initial
/// segments of a phase-shifted period.
pub fn mahler_quadrature(p: &IntPolynomial, n_points: usize) -> Result<MahlerResult> {
    const TOL: f64 = 1e-11;
    if n_points < 16 {
        return Err(invalid("n_points must be at least 16"));
    }
    let f = |t: f64| {
        let (s, c) = (TAU * t).sin_cos();
        // a node can round onto a root of unity; the clamp only affects a
        // set of width ~1e-16
        p.eval_compensated(Complex64::new(c, s))
            .norm()
            .max(f64::MIN_POSITIVE)
            .ln()
    };
    let est = integrate_pieces(f, PHASE, 1.0 + PHASE, n_points, TOL)?;
    if !est.value.is_finite() {
        return Err(Error::NonConvergence("quadrature met a zero of p".into()));
    }
    Ok(MahlerResult {
        value: est.value,
        method: MahlerMethod::Quadrature,
        error_estimate: est.error,
    })
}

/// ∫₀¹ log(2 + (sin mπt / sin πt)²) dt, which equals m(q_m).
pub fn sin_form_eval(m: u64, n_points: usize) -> Result<f64> {
    if m == 0 {
        return Err(invalid("m must be at least 1"));
    }
    let m = m as f64;
    let f = |t: f64| {
        let ratio = (m * PI * t).sin() / (PI * t).sin();
        (2.0 + ratio * ratio).ln()
    };
    Ok(periodic_mean(f, 1e-13, n_points)?.value)
}

/// One point of the log λ versus m(q_m) comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Figure1Row {
    pub m: u64,
    pub log_lambda: f64,
    pub m_q: f64,
}

pub fn figure1_data(m_from: u64, m_to: u64) -> Result<Vec<Figure1Row>> {
    if m_from == 0 || m_from > m_to || m_to > 200 {
        return Err(invalid(format!(
            "m range {m_from}..={m_to} must lie in 1..=200"
        )));
    }
    let ms: Vec<u64> = (m_from..=m_to).collect();
    crate::par::map_range(ms.len(), |i| {
        let m = ms[i];
        Ok(Figure1Row {
            m,
            log_lambda: eigen_data(m)?.log_lambda(),
            m_q: mahler_roots(&q_poly(m)?)?.value,
        })
    })
    .into_iter()
    .collect()
}

/// m(q_m) against the two universal upper bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsReport {
    pub m: u64,
    pub m_q: f64,
    /// log √46 − m(q_m).
    pub margin_sqrt46: f64,
    /// log(3 + √5) − m(q_m).
    pub margin_3_sqrt5: f64,
}

impl BoundsReport {
    pub fn holds(&self) -> bool {
        self.margin_sqrt46 > 0.0 && self.margin_3_sqrt5 >= -1e-9
    }
}

pub fn bounds_check(m: u64) -> Result<BoundsReport> {
    let m_q = mahler_roots(&q_poly(m)?)?.value;
    Ok(BoundsReport {
        m,
        m_q,
        margin_sqrt46: LOG_SQRT_46 - m_q,
        margin_3_sqrt5: LOG_3_PLUS_SQRT5 - m_q,
    })
}

/// m values in [m_from, m_to) where m(q_{m+1}) < m(q_m).
pub fn q_measure_decreases(m_from: u64, m_to: u64) -> Result<Vec<u64>> {
    let rows = figure1_data(m_from, m_to)?;
    Ok(rows
        .windows(2)
        .filter(|w| w[1].m_q < w[0].m_q)
        .map(|w| w[0].m)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoVarLimits {
    /// lim m(q_m) = 2∫₀¹ arsinh(√2·sin πt) dt.
    pub limit_q: f64,
    /// ∫∫ log(6 − 2cos2πt₁ − 2cos2πt₂ − 2cos2π(t₁+t₂)) over the 2-torus.
    pub limit_s: f64,
    /// Grid-refinement error of `limit_s`.
    pub limit_s_error: f64,
}

/// The two limits; `resolution` is the per-axis grid for `limit_s`.
pub fn two_var_limits(resolution: usize) -> Result<TwoVarLimits> {
    if resolution < 4 {
        return Err(invalid("resolution must be at least 4"));
    }
    let half = integrate(
        |t: f64| (2f64.sqrt() * (PI * t).sin()).asinh(),
        0.0,
        1.0,
        1e-13,
    )?;
    let f = |x: f64, y: f64| {
        (6.0 - 2.0 * (TAU * x).cos() - 2.0 * (TAU * y).cos() - 2.0 * (TAU * (x + y)).cos()).ln()
    };
    let fine = torus_mean(resolution, f);
    let coarse = torus_mean(resolution / 2, f);
    Ok(TwoVarLimits {
        limit_q: 2.0 * half.value,
        limit_s: fine,
        limit_s_error: (fine - coarse).abs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootClass {
    Salem,
    Pisot,
    Perron,
}

impl fmt::Display for RootClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RootClass::Salem => write!(f, "Salem"),
            RootClass::Pisot => write!(f, "Pisot"),
            RootClass::Perron => write!(f, "Perron"),
        }
    }
}

/// The minimal polynomial of M(q_m) = e^{m(q_m)} for m ∈ {3, 4, 5}.
#[derive(Debug, Clone, PartialEq)]
pub struct PerronInfo {
    pub m: u64,
    pub poly: IntPolynomial,
    /// Largest root.
    pub xi: f64,
    /// Largest modulus among the remaining roots.
    pub second_modulus: f64,
    pub class: RootClass,
}

pub fn perron_root_info(m: u64) -> Result<PerronInfo> {
    const TOL: f64 = 1e-8;
    let coeffs: Vec<i64> = match m {
        3 => vec![1, -3, -4, -3, 1],
        4 => vec![1, 2, -2, -4, 1],
        5 => vec![1, -6, 7, 0, -3, 0, 7, -6, 1],
        _ => return Err(invalid(format!("no root data for m = {m}; use 3, 4 or 5"))),
    };
    let poly = IntPolynomial::new(coeffs)?;
    let mut moduli: Vec<f64> = roots(&poly)?.iter().map(|r| r.value.norm()).collect();
    moduli.sort_by(|a, b| b.total_cmp(a));
    let (xi, rest) = (moduli[0], &moduli[1..]);
    let second_modulus = rest[0];
    let class = if rest.iter().all(|&r| r < 1.0 - TOL) {
        RootClass::Pisot
    } else if rest.iter().all(|&r| r < 1.0 + TOL) {
        RootClass::Salem
    } else {
        RootClass::Perron
    };
    Ok(PerronInfo {
        m,
        poly,
        xi,
        second_modulus,
        class,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn family_coefficients() {
        assert_eq!(q_poly(1).unwrap().coeffs(), &[3]);
        assert_eq!(q_poly(2).unwrap().coeffs(), &[1, 4, 1]);
        assert_eq!(r_poly(2).unwrap().coeffs(), &[1, 2, -6, 2, 1]);
        assert_eq!(s_poly(1).unwrap().coeffs(), &[1, 2, -6, 2, 1]);
        assert_eq!(r_poly(1).unwrap().coeffs(), &[3, -6, 3]);
        assert!(q_poly(0).is_err() && r_poly(0).is_err() && s_poly(0).is_err());
    }

    #[test]
    fn r_is_z_minus_one_squared_times_q() {
        let sq = IntPolynomial::new(vec![1, -2, 1]).unwrap();
        for m in 1..=200 {
            assert_eq!(&sq * &q_poly(m).unwrap(), r_poly(m).unwrap(), "m={m}");
            if m >= 2 {
                assert_eq!(r_poly(m).unwrap().norm2_sq(), 46);
            }
        }
    }

    #[test]
    fn closed_forms() {
        let l3 = 3f64.ln();
        let l23 = (2.0 + 3f64.sqrt()).ln();
        assert!((mahler_roots(&q_poly(1).unwrap()).unwrap().value - l3).abs() < 1e-12);
        assert!((mahler_roots(&q_poly(2).unwrap()).unwrap().value - l23).abs() < 1e-12);
        assert!((mahler_quadrature(&q_poly(2).unwrap(), 16).unwrap().value - l23).abs() < 1e-9);
        let p = IntPolynomial::new(vec![1, -4, 1]).unwrap();
        assert!((mahler_roots(&p).unwrap().value - l23).abs() < 1e-12);
        let p = IntPolynomial::new(vec![1, -3, 1]).unwrap();
        let golden = ((3.0 + 5f64.sqrt()) / 2.0).ln();
        assert!((mahler_quadrature(&p, 16).unwrap().value - golden).abs() < 1e-9);
        assert!((golden + 2f64.ln() - LOG_3_PLUS_SQRT5).abs() < 1e-12);
        assert!((0.5 * 46f64.ln() - LOG_SQRT_46).abs() < 1e-15);
    }

    #[test]
    fn vanishing_measures() {
        let sq = IntPolynomial::new(vec![1, -2, 1]).unwrap();
        assert!(mahler_quadrature(&sq, 16).unwrap().value.abs() < 1e-9);
        assert_eq!(mahler_roots(&sq).unwrap().value, 0.0);
        let l = 3;
        let det = &(&IntPolynomial::monomial(1) * &psi_poly(l - 1)) * &psi_poly(l);
        assert!(mahler_quadrature(&det, 16).unwrap().value.abs() < 1e-9);
        for l in 1..=20 {
            assert!(mahler_roots(&psi_poly(l)).unwrap().value.abs() < 1e-9);
            assert!(
                mahler_roots(&IntPolynomial::monomial(l as usize))
                    .unwrap()
                    .value
                    .abs()
                    < 1e-9
            );
        }
    }

    #[test]
    fn sin_form_matches() {
        assert!((sin_form_eval(1, 16).unwrap() - 3f64.ln()).abs() < 1e-12);
        assert!((sin_form_eval(2, 16).unwrap() - (2.0 + 3f64.sqrt()).ln()).abs() < 1e-12);
        for m in [5u64, 11, 30] {
            let roots = mahler_roots(&q_poly(m).unwrap()).unwrap().value;
            assert!(
                (sin_form_eval(m, 16).unwrap() - roots).abs() < 1e-9,
                "m={m}"
            );
        }
    }

    #[test]
    fn methods_agree_on_families() {
        for m in (1..=60).step_by(7) {
            for p in [q_poly(m).unwrap(), r_poly(m).unwrap(), s_poly(m).unwrap()] {
                let a = mahler_roots(&p).unwrap();
                let b = mahler_quadrature(&p, 64).unwrap();
                let tol = 1e-6f64.max(a.error_estimate + b.error_estimate);
                assert!((a.value - b.value).abs() < tol, "m={m} p={p}");
            }
        }
    }

    #[test]
    fn perron_data() {
        let info = perron_root_info(3).unwrap();
        assert_eq!(info.class, RootClass::Salem);
        let mq = mahler_roots(&q_poly(3).unwrap()).unwrap().value;
        assert!((mq.exp() - info.xi).abs() < 1e-8);
        let info = perron_root_info(4).unwrap();
        assert_eq!(info.poly.to_string(), "z^4 - 4z^3 - 2z^2 + 2z + 1");
        assert_eq!(info.class, RootClass::Pisot);
        let info = perron_root_info(5).unwrap();
        assert_eq!(info.class, RootClass::Perron);
        assert!((info.second_modulus - 1.354).abs() < 1e-3);
        assert!(perron_root_info(6).is_err());
    }

    #[test]
    fn limit_q_matches_jensen_reduction() {
        // ∫₀¹ log((A + √(A² − B²))/2) dt with A = 6 − 4cos 2πt, B = 2
        let f = |t: f64| {
            let a = 6.0 - 4.0 * (TAU * t).cos();
            ((a + (a * a - 4.0).sqrt()) / 2.0).ln()
        };
        let reduced = periodic_mean(f, 1e-13, 64).unwrap().value;
        let lim = two_var_limits(64).unwrap();
        assert!((lim.limit_q - reduced).abs() < 1e-10);
        assert!((lim.limit_q - 1.550675).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn multiplicativity(
            a in proptest::collection::vec(-4i64..=4, 2..6),
            b in proptest::collection::vec(-4i64..=4, 2..6),
        ) {
            prop_assume!(*a.last().unwrap() != 0 && *b.last().unwrap() != 0);
            let p = IntPolynomial::new(a).unwrap();
            let q = IntPolynomial::new(b).unwrap();
            let lhs = mahler_roots(&(&p * &q)).unwrap().value;
            let rhs = mahler_roots(&p).unwrap().value + mahler_roots(&q).unwrap().value;
            prop_assert!((lhs - rhs).abs() < 1e-9, "{} vs {}", lhs, rhs);
        }
    }
}

//! Checks shared by the acceptance runner and the integration tests. Each
//! returns whether the criterion holds together with the measured values.

#![allow(dead_code)]

use nalgebra::{RowVector2, Vector4};
use num_complex::Complex64;

use inflation_spectra::cocycle::{
    chi_b_estimate, constant_length_exponents, constant_length_fourier, det_average,
    det_average_sampled, lyapunov_pair, psi_l, sample_over_k, table1, KSampler, DEFAULT_SEED,
    TABLE1_RESOLUTION,
};
use inflation_spectra::fourier::{epsilon_estimate, pf_tensor, positivity_iteration};
use inflation_spectra::mahler::{
    figure1_data, mahler_quadrature, mahler_roots, perron_root_info, q_poly, two_var_limits,
    LOG_3_PLUS_SQRT5, LOG_SQRT_46,
};
use inflation_spectra::paircorr::{
    bragg_intensity_zero, default_exponent_radii, intensity_eigen_residual,
    pair_correlations_within, renormalization_residual, scaling_exponent, spectral_report,
    ReportConfig, WeightVector, BRAGG_EXPONENT_THRESHOLD,
};
use inflation_spectra::substitution::{
    eigen_data, fixed_point, recode_to_binary, tilde_fixed_point,
};

pub struct Outcome {
    pub pass: bool,
    pub detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

/// log λ, N(m) and the mean (1/N)·M(log‖B^(N)‖²_F) for m = 1..=20, as printed
/// to three decimals.
pub const TABLE1_REFERENCE: [(f64, usize, f64); 20] = [
    (0.481, 6, 0.439),
    (0.693, 4, 0.677),
    (0.834, 4, 0.770),
    (0.941, 3, 0.924),
    (1.027, 3, 0.949),
    (1.099, 3, 0.964),
    (1.161, 2, 1.144),
    (1.216, 2, 1.152),
    (1.265, 2, 1.157),
    (1.309, 2, 1.161),
    (1.349, 2, 1.164),
    (1.386, 2, 1.166),
    (1.421, 2, 1.168),
    (1.453, 2, 1.169),
    (1.483, 2, 1.170),
    (1.511, 2, 1.171),
    (1.538, 2, 1.172),
    (1.563, 1, 1.546),
    (1.587, 1, 1.547),
    (1.609, 1, 1.547),
];

pub fn table1_reproduction() -> Outcome {
    let rows = match table1(1, 20, TABLE1_RESOLUTION) {
        Ok(rows) => rows,
        Err(e) => return Outcome::new(false, format!("table1 failed: {e}")),
    };
    let mut worst_log = 0.0f64;
    let mut worst_mean = 0.0f64;
    let mut bad_n = Vec::new();
    for (row, &(log_lambda, n, mean)) in rows.iter().zip(&TABLE1_REFERENCE) {
        worst_log = worst_log.max((row.log_lambda - log_lambda).abs());
        worst_mean = worst_mean.max((row.mean - mean).abs());
        if row.n != n {
            bad_n.push(row.m);
        }
    }
    Outcome::new(
        worst_log < 1e-3 && worst_mean < 2e-3 && bad_n.is_empty(),
        format!(
            "max |Δ log λ| = {worst_log:.2e}, max |Δ mean| = {worst_mean:.2e}, N mismatches at m = {bad_n:?}"
        ),
    )
}

pub fn figure1_crossing() -> Outcome {
    let rows = match figure1_data(1, 30) {
        Ok(rows) => rows,
        Err(e) => return Outcome::new(false, format!("figure1_data failed: {e}")),
    };
    let mut min_margin = f64::INFINITY;
    let mut wrong_side = Vec::new();
    for r in &rows {
        let signed = if r.m <= 17 {
            r.m_q - r.log_lambda
        } else {
            r.log_lambda - r.m_q
        };
        min_margin = min_margin.min(signed);
        if signed <= 5e-3 {
            wrong_side.push(r.m);
        }
    }
    Outcome::new(
        wrong_side.is_empty(),
        format!("smallest margin {min_margin:.4}; failing m = {wrong_side:?}"),
    )
}

/// Largest real root of an integer polynomial (coefficients from z⁰ up) by
/// bisection above the Cauchy bound's lower end.
fn largest_real_root(coeffs: &[f64]) -> f64 {
    let eval = |x: f64| coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c);
    let lead = *coeffs.last().unwrap();
    let bound = 1.0 + coeffs.iter().map(|c| (c / lead).abs()).fold(0.0, f64::max);
    // scan down from the bound for the first sign change
    let steps = 100_000;
    let mut hi = bound;
    let mut lo = hi;
    for i in 1..=steps {
        lo = bound - bound * i as f64 / steps as f64;
        if eval(lo).signum() != eval(hi).signum() {
            break;
        }
        hi = lo;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if eval(mid).signum() == eval(hi).signum() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn mahler_closed_forms() -> Outcome {
    let run = || -> inflation_spectra::Result<(bool, String)> {
        let q1 = q_poly(1)?;
        let q2 = q_poly(2)?;
        let exact1 = 3f64.ln();
        let exact2 = (2.0 + 3f64.sqrt()).ln();
        let root_err = (mahler_roots(&q1)?.value - exact1)
            .abs()
            .max((mahler_roots(&q2)?.value - exact2).abs());
        let quad_err = (mahler_quadrature(&q1, 64)?.value - exact1)
            .abs()
            .max((mahler_quadrature(&q2, 64)?.value - exact2).abs());
        let mut max_mq = f64::NEG_INFINITY;
        for m in 1..=60 {
            let v = mahler_roots(&q_poly(m)?)?.value;
            max_mq = max_mq.max(v);
        }
        let margin_sqrt46 = LOG_SQRT_46 - max_mq;
        let margin_3_sqrt5 = LOG_3_PLUS_SQRT5 - max_mq;
        let bound_ok = margin_sqrt46 > 0.0 && margin_3_sqrt5 >= -1e-9;
        let lim = two_var_limits(2048)?;
        let lim_q_err = (lim.limit_q - 1.550675).abs();
        let lim_s_err = (lim.limit_s - 1.615).abs();
        let second = perron_root_info(5)?.second_modulus;
        let mut xi_err = 0.0f64;
        for (m, coeffs) in [
            (3u64, [1.0, -3.0, -4.0, -3.0, 1.0]),
            (4, [1.0, 2.0, -2.0, -4.0, 1.0]),
        ] {
            let xi = largest_real_root(&coeffs);
            xi_err = xi_err.max((mahler_roots(&q_poly(m)?)?.value.exp() - xi).abs());
        }
        let pass = root_err < 1e-9
            && quad_err < 1e-6
            && bound_ok
            && lim_q_err < 1e-5
            && lim_s_err < 2e-3
            && (second - 1.354).abs() < 1e-3
            && xi_err < 1e-8;
        Ok((
            pass,
            format!(
                "closed forms: roots {root_err:.1e}, quadrature {quad_err:.1e}; max m(q_m≤60) = {max_mq:.6} (margins {margin_sqrt46:.4}, {margin_3_sqrt5:.4}); \
                 limits {:.7} / {:.5}; m=5 second modulus {second:.4}; ξ error {xi_err:.1e}",
                lim.limit_q, lim.limit_s
            ),
        ))
    };
    match run() {
        Ok((pass, detail)) => Outcome::new(pass, detail),
        Err(e) => Outcome::new(false, format!("error: {e}")),
    }
}

pub fn determinant_average() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    for m in [2u64, 3, 5, 6, 12] {
        match det_average_sampled(m, 100_000, 100, DEFAULT_SEED) {
            Ok(samples) => {
                let good = samples.iter().filter(|(_, v)| v.abs() < 0.05).count();
                pass &= good >= 90;
                details.push(format!("m={m}: {good}/100"));
            }
            Err(e) => {
                pass = false;
                details.push(format!("m={m}: {e}"));
            }
        }
    }
    let m1: Vec<f64> = KSampler::new(DEFAULT_SEED)
        .take(20)
        .into_iter()
        .map(|k| det_average(1, k, 100_000).unwrap_or(f64::NAN))
        .collect();
    let m1_zero = m1.iter().all(|&v| v == 0.0);
    pass &= m1_zero;
    details.push(format!("m=1 exactly 0: {m1_zero}"));
    Outcome::new(pass, details.join(", "))
}

pub fn sum_rule_and_positivity() -> Outcome {
    let mut agree = 0usize;
    let mut total = 0usize;
    let mut sum_rule_err = 0.0f64;
    for m in [1u64, 2, 3, 5, 18] {
        let log_lambda = eigen_data(m).unwrap().log_lambda();
        let est = match sample_over_k(DEFAULT_SEED, 20, |k| lyapunov_pair(m, k, 100_000)) {
            Ok(v) => v,
            Err(e) => return Outcome::new(false, format!("m={m}: {e}")),
        };
        for (_, e) in est {
            total += 1;
            sum_rule_err = sum_rule_err.max((e.chi_min + e.chi_max - log_lambda).abs());
            if let Some(inv) = e.chi_min_inverse {
                if (inv - e.chi_min).abs() < 0.02 {
                    agree += 1;
                }
            }
        }
    }
    let cfg = ReportConfig {
        n: 20_000,
        samples: 10,
        seed: DEFAULT_SEED,
        resolution: 512,
    };
    let report = spectral_report(3, WeightVector::real(1.0, 1.0), &cfg);
    let (bound, verdict_ok) = match &report {
        Ok(r) => (
            r.chi_min_bound.unwrap_or(f64::NAN),
            r.n_min.map(|x| x.0) == Some(4) && r.verdict.contains("purely singular continuous"),
        ),
        Err(_) => (f64::NAN, false),
    };
    Outcome::new(
        sum_rule_err < 1e-12 && agree * 10 >= total * 9 && bound > 0.0 && verdict_ok,
        format!(
            "sum-rule error {sum_rule_err:.1e}; inverse route agrees in {agree}/{total}; \
             m=3 bound χ_min ≥ {bound:.4}, singular verdict: {verdict_ok}"
        ),
    )
}

/// Mean and spread of χ^B for m = 1 over 20 seeded k at cocycle length n.
pub fn fibonacci_chi_b(n: usize) -> (f64, f64, f64) {
    let v: Vec<f64> = sample_over_k(DEFAULT_SEED, 20, |k| chi_b_estimate(1, k, n))
        .expect("Fibonacci orbits avoid the zero set")
        .into_iter()
        .map(|x| x.1)
        .collect();
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (mean, lo, hi)
}

pub fn fibonacci_exponent() -> Outcome {
    let (mean, lo, hi) = fibonacci_chi_b(100_000);
    Outcome::new(
        (mean - 0.163).abs() < 0.02,
        format!("mean χ^B = {mean:.5} (range {lo:.5}..{hi:.5}), target 0.163 ± 0.02"),
    )
}

pub fn constant_length_exponents_vanish() -> Outcome {
    let mut worst = 0.0f64;
    for l in 1..=3u64 {
        for k in KSampler::new(DEFAULT_SEED).take(20) {
            match constant_length_exponents(l, k, 100_000) {
                Ok(e) => worst = worst.max(e.chi_b),
                Err(e) => return Outcome::new(false, format!("ℓ={l}: {e}")),
            }
        }
    }
    let one = Complex64::new(1.0, 0.0);
    let mut eig_err = 0.0f64;
    let mut sampler = KSampler::new(DEFAULT_SEED + 1);
    for _ in 0..1000 {
        let k = sampler.next_k();
        for l in 1..=3u64 {
            let b = constant_length_fourier(l, k).unwrap().matrix;
            let row = RowVector2::new(one, one) * b;
            let ev = psi_l(l, k);
            eig_err = eig_err.max((row[0] - ev).norm()).max((row[1] - ev).norm());
        }
    }
    Outcome::new(
        worst < 0.02 && eig_err < 1e-12,
        format!(
            "largest χ^B over ℓ ∈ {{1,2,3}} × 20 k: {worst:.5}; eigenvector error {eig_err:.1e}"
        ),
    )
}

pub fn positivity_iteration_check() -> Outcome {
    let mut pass = true;
    let mut details = Vec::new();
    for m in [2u64, 3] {
        let eps = epsilon_estimate(m).unwrap();
        let run = positivity_iteration(m, eps / 2.0, Vector4::new(1.0, 0.0, 0.0, 0.0), 50).unwrap();
        let log_lambda = eigen_data(m).unwrap().log_lambda();
        let growth_err = (run.last_growth() - 4.0 * log_lambda).abs();
        let pf = pf_tensor(m).unwrap();
        let dir_err = (run.directions.last().unwrap() - pf / pf.sum()).amax();
        pass &= growth_err < 1e-3 && dir_err < 1e-8 && run.all_positive;
        details.push(format!(
            "m={m}: growth error {growth_err:.1e}, direction error {dir_err:.1e}"
        ));
    }
    Outcome::new(pass, details.join("; "))
}

pub fn renormalization_relations() -> Outcome {
    let mut pass = true;
    let mut details = Vec::new();
    for m in [1u64, 2, 3] {
        let mut res = [0.0; 2];
        let mut card = 0;
        for (i, r) in [10_000.0, 40_000.0].into_iter().enumerate() {
            let table = pair_correlations_within(m, r, 128.0).unwrap();
            if i == 0 {
                card = table.card;
            }
            res[i] = renormalization_residual(&table, m, 100.0).unwrap();
        }
        let noise = 2.0 / card as f64;
        pass &= res[0] < 5e-3 && res[1] <= 0.5 * res[0] + noise;
        details.push(format!("m={m}: {:.2e} → {:.2e}", res[0], res[1]));
    }
    Outcome::new(pass, details.join("; "))
}

pub fn intensities() -> Outcome {
    let u = WeightVector::real(1.0, 1.0);
    let mut i0_err = 0.0f64;
    let mut eig_res = 0.0f64;
    let mut k0_worst = 0.0f64;
    let radii = default_exponent_radii();
    for m in 1..=30u64 {
        i0_err = i0_err.max((bragg_intensity_zero(m, u).unwrap() - 1.0).abs());
        eig_res = eig_res.max(intensity_eigen_residual(m).unwrap());
        // counts in [−R, R] fluctuate like R^(log|λ₂|/log λ), which for large m
        // keeps the finite-radius fit visibly off 2; the band is the one that
        // separates the two peak shapes
        let e = scaling_exponent(m, u, 0.0, &radii).unwrap();
        k0_worst = k0_worst.max((e - 2.0).abs());
    }
    let generic: Vec<f64> = KSampler::new(DEFAULT_SEED)
        .take(5)
        .into_iter()
        .map(|k| scaling_exponent(3, u, k, &radii).unwrap())
        .collect();
    let generic_max = generic.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Outcome::new(
        i0_err < 1e-12 && eig_res < 1e-12 && k0_worst < 2.0 - BRAGG_EXPONENT_THRESHOLD && generic_max < BRAGG_EXPONENT_THRESHOLD,
        format!(
            "I₀ error {i0_err:.1e}; eigen residual {eig_res:.1e}; max |exponent − 2| at k=0 {k0_worst:.3}; \
             m=3 generic exponents {:?}",
            generic.iter().map(|e| (e * 100.0).round() / 100.0).collect::<Vec<_>>()
        ),
    )
}

pub fn mld_recode() -> Outcome {
    let mut pass = true;
    let mut details = Vec::new();
    for l in [1u64, 2] {
        let m = l * (l + 1);
        let bin = recode_to_binary(&tilde_fixed_point(l, 20_000).unwrap(), l).unwrap();
        let reference = fixed_point(m, 10_000).unwrap();
        let same = bin.central(5_000, 5_000) == reference && reference.len() == 10_000;
        pass &= same;
        details.push(format!(
            "ℓ={l}: {}",
            if same { "identical" } else { "differs" }
        ));
    }
    Outcome::new(pass, details.join("; "))
}

pub type Check = (u32, &'static str, fn() -> Outcome);

pub fn all() -> Vec<Check> {
    vec![
        (
            1,
            "mean log-norm table",
            table1_reproduction as fn() -> Outcome,
        ),
        (2, "Mahler measure crossing", figure1_crossing),
        (3, "Mahler closed forms and bounds", mahler_closed_forms),
        (4, "determinant ergodic average", determinant_average),
        (5, "sum rule and positivity", sum_rule_and_positivity),
        (6, "Fibonacci exponent", fibonacci_exponent),
        (
            7,
            "constant-length exponents",
            constant_length_exponents_vanish,
        ),
        (8, "positivity iteration", positivity_iteration_check),
        (9, "renormalisation relations", renormalization_relations),
        (10, "intensities and periodogram", intensities),
        (11, "MLD recode", mld_recode),
    ]
}

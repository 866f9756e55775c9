//! Pair-correlation coefficients of a finite patch, their renormalisation
//! relations, intensities at k = 0, finite-window periodograms and the
//! per-m spectral summary.

use std::collections::{HashMap, HashSet};
use std::f64::consts::TAU;
use std::fmt;

use nalgebra::Vector4;
use num_complex::Complex64;

use crate::cocycle::{lyapunov_pair, mean_log_norm_torus, sample_over_k, DEFAULT_SEED};
use crate::error::{invalid, Error, Result};
use crate::fourier::{displacement_matrix, kron_subst, pf_tensor};
use crate::substitution::{
    classify, eigen_data, fixed_point, geometric_patch, substitute, Patch, SpectralClass,
};
use crate::zlambda::{AlgebraicPoint, QuadraticRing};

/// Largest |z| tabulated by [`empirical_pair_correlations`].
pub const DEFAULT_MAX_DISPLACEMENT: f64 = 512.0;

/// Key of one pair-correlation coefficient ν_ij(z).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairKey {
    pub i: u8,
    pub j: u8,
    pub z: AlgebraicPoint,
}

/// ν̂_ij(z) = card(Λ^(i)_R ∩ (Λ^(j)_R − z)) / card(Λ_R) for |z| up to
/// `max_displacement`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairCorrelationTable {
    pub m: u64,
    pub radius: f64,
    pub max_displacement: f64,
    /// card(Λ_R).
    pub card: usize,
    counts: HashMap<PairKey, u64>,
    ring: QuadraticRing,
}

impl PairCorrelationTable {
    pub fn ring(&self) -> &QuadraticRing {
        &self.ring
    }

    /// ν̂_ij(z); zero off the support.
    pub fn get(&self, i: u8, j: u8, z: AlgebraicPoint) -> f64 {
        let z = self.ring.normalize(z);
        self.counts
            .get(&PairKey { i, j, z })
            .map_or(0.0, |&c| c as f64 / self.card as f64)
    }

    pub fn count(&self, i: u8, j: u8, z: AlgebraicPoint) -> u64 {
        let z = self.ring.normalize(z);
        self.counts.get(&PairKey { i, j, z }).copied().unwrap_or(0)
    }

    /// All (key, ν̂) pairs in a fixed order.
    pub fn entries(&self) -> Vec<(PairKey, f64)> {
        let mut out: Vec<(PairKey, f64)> = self
            .counts
            .iter()
            .map(|(&k, &c)| (k, c as f64 / self.card as f64))
            .collect();
        out.sort_by(|a, b| {
            (a.0.i, a.0.j)
                .cmp(&(b.0.i, b.0.j))
                .then(self.ring.embed(a.0.z).total_cmp(&self.ring.embed(b.0.z)))
        });
        out
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

pub fn empirical_pair_correlations(m: u64, radius: f64) -> Result<PairCorrelationTable> {
    pair_correlations_within(m, radius, DEFAULT_MAX_DISPLACEMENT.min(2.0 * radius))
}

/// As [`empirical_pair_correlations`] with an explicit cut-off |z| ≤ max_displacement.
pub fn pair_correlations_within(
    m: u64,
    radius: f64,
    max_displacement: f64,
) -> Result<PairCorrelationTable> {
    let patch = Patch::around_origin(m, radius)?;
    table_from_patch(m, &patch, radius, max_displacement)
}

/// The fixed point is ρ applied to its own supertile sequence, so the
/// supertiles of Λ_R form this patch, up to tiles straddling ±R.
fn supertile_patch(m: u64, radius: f64) -> Result<Patch> {
    let lambda = eigen_data(m)?.lambda_plus;
    let per_side = radius.ceil() as usize + 2;
    let supertiles = substitute(&fixed_point(m, 2 * per_side)?, m, 1)?;
    Ok(geometric_patch(&supertiles, m)?.window(radius / lambda))
}

fn table_from_patch(
    m: u64,
    patch: &Patch,
    radius: f64,
    max_displacement: f64,
) -> Result<PairCorrelationTable> {
    let ring = *patch.ring();
    let points: Vec<(f64, u8, AlgebraicPoint)> = patch
        .tiles()
        .iter()
        .map(|t| (ring.embed(t.left), t.kind, t.left))
        .collect();
    let per_type = |kind| points.iter().filter(|p| p.1 == kind).count();
    if per_type(0) < 2 || per_type(1) < 2 {
        return Err(invalid(format!(
            "radius {radius} is too small: the window needs at least two tiles of each type"
        )));
    }
    let mut counts: HashMap<PairKey, u64> = HashMap::new();
    for (a, &(xa, ia, pa)) in points.iter().enumerate() {
        *counts
            .entry(PairKey {
                i: ia,
                j: ia,
                z: AlgebraicPoint::ZERO,
            })
            .or_default() += 1;
        for &(xb, ib, pb) in &points[a + 1..] {
            if xb - xa > max_displacement {
                break;
            }
            let z = ring.normalize(pb - pa);
            *counts.entry(PairKey { i: ia, j: ib, z }).or_default() += 1;
            *counts
                .entry(PairKey {
                    i: ib,
                    j: ia,
                    z: ring.normalize(-z),
                })
                .or_default() += 1;
        }
    }
    Ok(PairCorrelationTable {
        m,
        radius,
        max_displacement,
        card: points.len(),
        counts,
        ring,
    })
}

/// Largest deviation from ν_ij(z) = (1/λ) Σ_{k,ℓ} Σ_{r∈T_ik} Σ_{s∈T_jℓ}
/// ν_kℓ((z + r − s)/λ) over |z| ≤ interior_radius. The left side is read
/// from `table`, the right side from the supertiles of the same window.
/// Arguments outside Z[λ]·λ contribute 0.
pub fn renormalization_residual(
    table: &PairCorrelationTable,
    m: u64,
    interior_radius: f64,
) -> Result<f64> {
    if table.m != m {
        return Err(invalid(format!(
            "table was built for m = {}, not {m}",
            table.m
        )));
    }
    let t = displacement_matrix(m)?;
    let ring = table.ring;
    let lambda = ring.lambda();
    let max_t = t.max_abs(&ring);
    let reach = (interior_radius + 2.0 * max_t) / lambda;
    if interior_radius > table.max_displacement || interior_radius > table.radius / lambda - max_t {
        return Err(invalid(format!(
            "interior radius {interior_radius} too large for R = {} and |z| ≤ {}",
            table.radius, table.max_displacement
        )));
    }
    let coarse = table_from_patch(
        m,
        &supertile_patch(m, table.radius)?,
        table.radius / lambda,
        reach,
    )?;
    let offsets = |i: usize, j: usize| -> Vec<(usize, usize, AlgebraicPoint)> {
        let mut out = Vec::new();
        for k in 0..2 {
            for l in 0..2 {
                for &r in t.get(i, k) {
                    for &s in t.get(j, l) {
                        out.push((k, l, r - s));
                    }
                }
            }
        }
        out
    };

    // candidate z: the fine support plus everything the coarse support reaches
    let mut candidates: HashSet<PairKey> = table
        .entries()
        .into_iter()
        .map(|e| e.0)
        .filter(|key| ring.embed(key.z).abs() <= interior_radius)
        .collect();
    for (key, _) in coarse.entries() {
        for i in 0..2u8 {
            for j in 0..2u8 {
                for (k, l, shift) in offsets(i as usize, j as usize) {
                    if (k as u8, l as u8) != (key.i, key.j) {
                        continue;
                    }
                    let z = ring.normalize(ring.mul_lambda(key.z) - shift);
                    if ring.embed(z).abs() <= interior_radius {
                        candidates.insert(PairKey { i, j, z });
                    }
                }
            }
        }
    }

    let mut worst: f64 = 0.0;
    for key in candidates {
        let lhs = table.get(key.i, key.j, key.z);
        let mut rhs = 0.0;
        for (k, l, shift) in offsets(key.i as usize, key.j as usize) {
            if let Some(w) = ring.div_lambda(ring.normalize(key.z + shift)) {
                rhs += coarse.get(k as u8, l as u8, w);
            }
        }
        worst = worst.max((lhs - rhs / lambda).abs());
    }
    Ok(worst)
}

/// Point weights (u₀, u₁) of the Dirac comb.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightVector {
    pub u0: Complex64,
    pub u1: Complex64,
}

impl WeightVector {
    pub fn new(u0: Complex64, u1: Complex64) -> Self {
        Self { u0, u1 }
    }

    pub fn real(u0: f64, u1: f64) -> Self {
        Self::new(Complex64::new(u0, 0.0), Complex64::new(u1, 0.0))
    }

    pub fn weight(&self, kind: u8) -> Complex64 {
        if kind == 0 {
            self.u0
        } else {
            self.u1
        }
    }

    /// u₀·u₁ ≠ 0.
    pub fn is_nontrivial(&self) -> bool {
        self.u0.norm() > 0.0 && self.u1.norm() > 0.0
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.u0, self.u1)
    }
}

/// I₀ = |ν₀u₀ + ν₁u₁|².
pub fn bragg_intensity_zero(m: u64, u: WeightVector) -> Result<f64> {
    let [n0, n1] = eigen_data(m)?.freq;
    Ok((u.u0 * n0 + u.u1 * n1).norm_sqr())
}

/// I(0) with entries ν_iν_j.
pub fn intensity_vector_zero(m: u64) -> Result<Vector4<f64>> {
    pf_tensor(m)
}

/// max |(1/λ²)·A(0)·I(0) − I(0)|.
pub fn intensity_eigen_residual(m: u64) -> Result<f64> {
    let lambda = eigen_data(m)?.lambda_plus;
    let i0 = intensity_vector_zero(m)?;
    Ok((kron_subst(m) * i0 / (lambda * lambda) - i0).amax())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodogramSample {
    pub k: f64,
    pub intensity: f64,
    pub radius: f64,
}

fn weighted_sum(points: &[(f64, u8)], u: WeightVector, k: f64) -> Complex64 {
    points
        .iter()
        .map(|&(x, kind)| {
            let (s, c) = (-TAU * k * x).sin_cos();
            u.weight(kind) * Complex64::new(c, s)
        })
        .sum()
}

fn window_points(m: u64, radius: f64) -> Result<Vec<(f64, u8)>> {
    let patch = Patch::around_origin(m, radius)?;
    Ok(patch
        .tiles()
        .iter()
        .map(|t| (patch.position(t), t.kind))
        .collect())
}

/// |Σ_{x∈Λ_R} u_x e^{−2πikx}|² / (2R) at each k.
pub fn periodogram(
    m: u64,
    u: WeightVector,
    radius: f64,
    ks: &[f64],
) -> Result<Vec<PeriodogramSample>> {
    if !(radius > 0.0) {
        return Err(invalid("radius must be positive"));
    }
    let points = window_points(m, radius)?;
    Ok(crate::par::map_range(ks.len(), |i| PeriodogramSample {
        k: ks[i],
        intensity: weighted_sum(&points, u, ks[i]).norm_sqr() / (2.0 * radius),
        radius,
    }))
}

/// Exponents above this count as Bragg-like growth.
pub const BRAGG_EXPONENT_THRESHOLD: f64 = 1.7;

/// Dyadic radii 125·2^j, j = 0..8, for [`scaling_exponent`].
pub fn default_exponent_radii() -> Vec<f64> {
    (0..8).map(|j| 125.0 * f64::from(1u32 << j)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeakShape {
    BraggLike,
    ContinuousLike,
}

impl PeakShape {
    pub fn from_exponent(exponent: f64) -> Self {
        if exponent > BRAGG_EXPONENT_THRESHOLD {
            PeakShape::BraggLike
        } else {
            PeakShape::ContinuousLike
        }
    }
}

impl fmt::Display for PeakShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PeakShape::BraggLike => "Bragg-like",
            PeakShape::ContinuousLike => "continuous-like",
        })
    }
}

/// Least-squares slope of log|Σ_{x∈Λ_R} u_x e^{−2πikx}|² against log R.
pub fn scaling_exponent(m: u64, u: WeightVector, k: f64, radii: &[f64]) -> Result<f64> {
    if radii.len() < 2 || radii.iter().any(|&r| !(r > 0.0)) {
        return Err(invalid("need at least two positive radii"));
    }
    let r_max = radii.iter().copied().fold(0.0, f64::max);
    let points = window_points(m, r_max)?;
    let samples: Vec<(f64, f64)> = radii
        .iter()
        .map(|&r| {
            let inside: Vec<(f64, u8)> =
                points.iter().copied().filter(|p| p.0.abs() <= r).collect();
            (r.ln(), weighted_sum(&inside, u, k).norm_sqr().ln())
        })
        .collect();
    let n = samples.len() as f64;
    let mx = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let my = samples.iter().map(|s| s.1).sum::<f64>() / n;
    let sxy: f64 = samples.iter().map(|s| (s.0 - mx) * (s.1 - my)).sum();
    let sxx: f64 = samples.iter().map(|s| (s.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Settings for [`spectral_report`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportConfig {
    /// Cocycle length for the χ_min estimates.
    pub n: usize,
    /// Number of sampled k.
    pub samples: usize,
    pub seed: u64,
    /// Grid resolution per axis for the mean log-norm.
    pub resolution: usize,
}

impl Default for ReportConfig {
    fn default() -> Self {
        Self {
            n: 10_000,
            samples: 20,
            seed: DEFAULT_SEED,
            resolution: 512,
        }
    }
}

/// Everything the classification of one m rests on.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport {
    pub m: u64,
    pub class: SpectralClass,
    pub u: WeightVector,
    pub log_lambda: f64,
    /// Intensity of the Bragg peak at 0.
    pub i0: f64,
    /// Mean of the sampled χ_min estimates.
    pub chi_min_mean: f64,
    /// Smallest sampled χ_min estimate.
    pub chi_min_smallest: f64,
    /// Minimal N with log λ > mean, and that mean.
    pub n_min: Option<(usize, f64)>,
    /// (log λ − mean)/2, a lower bound for χ_min.
    pub chi_min_bound: Option<f64>,
    pub verdict: String,
}

impl fmt::Display for SpectralReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "m = {} ({})", self.m, self.class)?;
        writeln!(f, "weights u = {}", self.u)?;
        writeln!(f, "log λ = {:.6}", self.log_lambda)?;
        writeln!(f, "I₀ = {:.6}", self.i0)?;
        writeln!(
            f,
            "χ_min (sampled): mean {:.6}, smallest {:.6}",
            self.chi_min_mean, self.chi_min_smallest
        )?;
        match (self.n_min, self.chi_min_bound) {
            (Some((n, mean)), Some(bound)) => {
                writeln!(f, "N = {n}: mean {mean:.6} < log λ, so χ_min ≥ {bound:.6}")?
            }
            _ => writeln!(f, "no N ≤ 12 with mean < log λ")?,
        }
        write!(f, "verdict: {}", self.verdict)
    }
}

pub fn spectral_report(m: u64, u: WeightVector, config: &ReportConfig) -> Result<SpectralReport> {
    if !u.is_nontrivial() {
        return Err(Error::Hypothesis(format!(
            "weights {u} must satisfy u₀·u₁ ≠ 0"
        )));
    }
    let class = classify(m)?;
    let log_lambda = eigen_data(m)?.log_lambda();
    let i0 = bragg_intensity_zero(m, u)?;

    let estimates = sample_over_k(config.seed, config.samples.max(1), |k| {
        lyapunov_pair(m, k, config.n)
    })?;
    let chi: Vec<f64> = estimates.iter().map(|e| e.1.chi_min).collect();
    let chi_min_mean = chi.iter().sum::<f64>() / chi.len() as f64;
    let chi_min_smallest = chi.iter().copied().fold(f64::INFINITY, f64::min);

    let mut n_min = None;
    for n in 1..=crate::cocycle::MAX_N {
        match mean_log_norm_torus(m, n, config.resolution) {
            Ok(est) if est.value < log_lambda => {
                n_min = Some((n, est.value));
                break;
            }
            Ok(_) | Err(Error::NonConvergence(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    let chi_min_bound = n_min.map(|(_, mean)| 0.5 * (log_lambda - mean));

    let verdict = match class {
        SpectralClass::Fibonacci => "pure point (Fibonacci)".to_string(),
        SpectralClass::IntegerMultiplier(l) => format!("pure point (integer multiplier, ℓ={l})"),
        SpectralClass::NonPV => {
            let margin = match chi_min_bound {
                Some(b) if b > 0.0 => format!("χ_min ≥ {b:.4} > 0"),
                _ => "χ_min margin not established at this resolution".to_string(),
            };
            format!(
                "purely singular continuous apart from the trivial Bragg peak at 0 \
                 (I₀ = {i0:.6}); {margin}"
            )
        }
    };
    Ok(SpectralReport {
        m,
        class,
        u,
        log_lambda,
        i0,
        chi_min_mean,
        chi_min_smallest,
        n_min,
        chi_min_bound,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_entries_are_frequencies() {
        let table = empirical_pair_correlations(2, 2000.0).unwrap();
        let zero = AlgebraicPoint::ZERO;
        assert!((table.get(0, 0, zero) + table.get(1, 1, zero) - 1.0).abs() < 1e-15);
        let [n0, n1] = eigen_data(2).unwrap().freq;
        assert!((table.get(0, 0, zero) - n0).abs() < 5e-3);
        assert!((table.get(1, 1, zero) - n1).abs() < 5e-3);
    }

    #[test]
    fn symmetry_and_support() {
        let table = empirical_pair_correlations(3, 500.0).unwrap();
        for (key, v) in table.entries() {
            let mirrored = table.get(key.j, key.i, -key.z);
            assert!((v - mirrored).abs() <= 2.0 / table.card as f64);
        }
        // ν̂₁₁ vanishes at distance 0 < |z| < 1: 1-tiles are 1 apart at least
        assert_eq!(table.get(0, 0, table.ring().point(1, 0)), 0.0);
    }

    #[test]
    fn matches_brute_force_word_count() {
        // m = 2: positions are integers; ν₀₀(2) counts 0-tiles whose
        // successor tile, 2 further, is again a 0-tile
        let table = pair_correlations_within(2, 3000.0, 8.0).unwrap();
        let patch = Patch::around_origin(2, 3000.0).unwrap();
        let ring = patch.ring();
        let tiles = patch.tiles();
        let mut direct = 0u64;
        for (a, ta) in tiles.iter().enumerate() {
            for tb in &tiles[a + 1..] {
                if ring.embed(tb.left - ta.left) > 2.5 {
                    break;
                }
                if ta.kind == 0
                    && tb.kind == 0
                    && ring.normalize(tb.left - ta.left) == ring.point(2, 0)
                {
                    direct += 1;
                }
            }
        }
        assert_eq!(table.count(0, 0, ring.point(2, 0)), direct);
        assert!(direct > 0);
        let word = fixed_point(2, 10).unwrap();
        assert!(!word.is_empty());
    }

    #[test]
    fn renormalization_holds() {
        for m in [1u64, 2, 3] {
            let table = pair_correlations_within(m, 4000.0, 60.0).unwrap();
            let res = renormalization_residual(&table, m, 40.0).unwrap();
            assert!(res < 5e-3, "m={m} residual {res}");
        }
        let table = pair_correlations_within(2, 400.0, 50.0).unwrap();
        assert!(renormalization_residual(&table, 2, 300.0).is_err());
        assert!(renormalization_residual(&table, 3, 10.0).is_err());
    }

    #[test]
    fn too_small_radius() {
        assert!(empirical_pair_correlations(5, 1.0).is_err());
    }

    #[test]
    fn intensities_at_zero() {
        assert!(
            (bragg_intensity_zero(4, WeightVector::real(1.0, 1.0)).unwrap() - 1.0).abs() < 1e-15
        );
        assert!(
            (bragg_intensity_zero(2, WeightVector::real(1.0, 0.0)).unwrap() - 0.25).abs() < 1e-15
        );
        let tau = eigen_data(1).unwrap().lambda_plus;
        assert!(
            (bragg_intensity_zero(1, WeightVector::real(1.0, 0.0)).unwrap() - tau.powi(-2)).abs()
                < 1e-15
        );
        let v = intensity_vector_zero(2).unwrap();
        assert!((v - Vector4::repeat(0.25)).amax() < 1e-15);
        for m in 1..=30 {
            assert!(intensity_eigen_residual(m).unwrap() < 1e-12);
        }
    }

    #[test]
    fn periodogram_at_zero() {
        let u = WeightVector::real(1.0, 1.0);
        let r = 300.0;
        let s = periodogram(3, u, r, &[0.0]).unwrap();
        let card = Patch::around_origin(3, r).unwrap().tiles().len() as f64;
        assert!((s[0].intensity - card * card / (2.0 * r)).abs() < 1e-9 * card * card);
        let e = scaling_exponent(3, u, 0.0, &[250.0, 500.0, 1000.0]).unwrap();
        assert!((e - 2.0).abs() < 0.05);
        assert_eq!(PeakShape::from_exponent(e), PeakShape::BraggLike);
        assert_eq!(PeakShape::from_exponent(1.0), PeakShape::ContinuousLike);
        assert_eq!(default_exponent_radii().len(), 8);
        assert!(scaling_exponent(3, u, 0.1, &[100.0]).is_err());
    }

    #[test]
    fn report_rejects_trivial_weights() {
        let cfg = ReportConfig {
            n: 100,
            samples: 2,
            seed: 1,
            resolution: 64,
        };
        assert!(matches!(
            spectral_report(3, WeightVector::real(1.0, 0.0), &cfg),
            Err(Error::Hypothesis(_))
        ));
        let rep = spectral_report(6, WeightVector::real(1.0, -2.0), &cfg).unwrap();
        assert_eq!(rep.verdict, "pure point (integer multiplier, ℓ=2)");
        let rep = spectral_report(1, WeightVector::real(1.0, 1.0), &cfg).unwrap();
        assert_eq!(rep.verdict, "pure point (Fibonacci)");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]

            #[test]
            fn normalised_and_symmetric(m in 1u64..12, r in 60.0f64..600.0) {
                let table = pair_correlations_within(m, r, 30.0).unwrap();
                let zero = AlgebraicPoint::ZERO;
                prop_assert!((table.get(0, 0, zero) + table.get(1, 1, zero) - 1.0).abs() < 1e-15);
                for (key, _) in table.entries() {
                    prop_assert_eq!(table.count(key.i, key.j, key.z), table.count(key.j, key.i, -key.z));
                }
            }

            #[test]
            fn intensity_at_zero_is_bounded(m in 1u64..50, a in -2.0f64..2.0, b in -2.0f64..2.0) {
                let i0 = bragg_intensity_zero(m, WeightVector::real(a, b)).unwrap();
                prop_assert!(i0 <= a.abs().max(b.abs()).powi(2) + 1e-12);
            }
        }
    }
}

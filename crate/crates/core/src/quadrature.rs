//! Quadrature used by the Mahler and cocycle code: adaptive Gauss–Kronrod
//! for integrands with integrable log singularities, and midpoint rules for
//! smooth periodic integrands on the circle and the 2-torus.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn kronrod15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Result of a quadrature with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Globally adaptive G7–K15 on [a, b]: the segment with the largest error
/// estimate is bisected until the summed estimate drops below `tol`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<Estimate> {
    integrate_pieces(f, a, b, 1, tol)
}

/// As [`integrate`], starting from `pieces` equal segments.
pub fn integrate_pieces(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    pieces: usize,
    tol: f64,
) -> Result<Estimate> {
    const MAX_SEGMENTS: usize = 200_000;
    let pieces = pieces.max(1);
    let h = (b - a) / pieces as f64;
    let mut heap = BinaryHeap::with_capacity(pieces);
    let mut total_err = 0.0;
    for i in 0..pieces {
        let lo = a + i as f64 * h;
        let hi = if i + 1 == pieces { b } else { lo + h };
        let (value, error) = kronrod15(&f, lo, hi);
        total_err += error;
        heap.push(Segment {
            a: lo,
            b: hi,
            value,
            error,
        });
    }
    let mut splits = 0usize;
    while total_err > tol {
        if heap.len() >= MAX_SEGMENTS {
            return Err(Error::NonConvergence(format!(
                "adaptive quadrature stopped at error {total_err:e} > {tol:e}"
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // segment cannot be split further in f64
            heap.push(worst);
            break;
        }
        let (v1, e1) = kronrod15(&f, worst.a, mid);
        let (v2, e2) = kronrod15(&f, mid, worst.b);
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
        total_err += e1 + e2 - worst.error;
        splits += 1;
        if splits.is_multiple_of(1024) {
            total_err = heap.iter().map(|s| s.error).sum();
        }
    }
    total_err = heap.iter().map(|s| s.error).sum();
    let mut segments = heap.into_vec();
    segments.sort_by(|x, y| x.a.total_cmp(&y.a));
    let values: Vec<f64> = segments.iter().map(|s| s.value).collect();
    Ok(Estimate {
        value: pairwise_sum(&values),
        error: total_err,
    })
}

/// Mean of a 1-periodic function by the shifted midpoint rule, doubling the
/// node count from `start` until consecutive values differ by < `tol`.
pub fn periodic_mean(f: impl Fn(f64) -> f64, tol: f64, start: usize) -> Result<Estimate> {
    const MAX_DOUBLINGS: u32 = 24;
    let rule = |n: usize| {
        let h = 1.0 / n as f64;
        let values: Vec<f64> = (0..n).map(|j| f((j as f64 + 0.5) * h)).collect();
        pairwise_sum(&values) * h
    };
    let mut n = start.max(16);
    let mut prev = rule(n);
    for _ in 0..MAX_DOUBLINGS {
        n *= 2;
        let next = rule(n);
        let diff = (next - prev).abs();
        if diff < tol {
            return Ok(Estimate {
                value: next,
                error: diff,
            });
        }
        prev = next;
    }
    Err(Error::NonConvergence(format!(
        "periodic midpoint rule did not reach {tol:e} with {n} nodes"
    )))
}

/// Midpoint-rule mean of f over [0,1)², `res` nodes per axis.
///
/// Row sums are formed independently and reduced pairwise in row order, so
/// the result does not depend on the number of worker threads.
pub fn torus_mean<F>(res: usize, f: F) -> f64
where
    F: Fn(f64, f64) -> f64 + Sync + Send,
{
    let h = 1.0 / res as f64;
    let row = |i: usize| {
        let x = (i as f64 + 0.5) * h;
        let values: Vec<f64> = (0..res).map(|j| f(x, (j as f64 + 0.5) * h)).collect();
        pairwise_sum(&values)
    };
    let rows = crate::par::map_range(res, row);
    pairwise_sum(&rows) * h * h
}

/// Midpoint-rule mean of a function on [0,1).
pub fn line_mean<F>(res: usize, f: F) -> f64
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    const CHUNK: usize = 4096;
    let h = 1.0 / res as f64;
    let chunks = res.div_ceil(CHUNK);
    let sums = crate::par::map_range(chunks, |c| {
        let values: Vec<f64> = (c * CHUNK..((c + 1) * CHUNK).min(res))
            .map(|j| f((j as f64 + 0.5) * h))
            .collect();
        pairwise_sum(&values)
    });
    pairwise_sum(&sums) * h
}

/// Recursive pairwise summation.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 16 {
        return values.iter().sum();
    }
    let (a, b) = values.split_at(values.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

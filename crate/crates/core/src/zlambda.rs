//! Exact arithmetic in the Z-module Z[λ], where λ is the Perron root of
//! x² − x − m.
//!
//! Points are stored as integer pairs `(a, b)` standing for `a + bλ`. When λ
//! is an integer (m = ℓ(ℓ+1)) the pair is folded to `(a + bλ, 0)` so equality
//! stays exact.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{invalid, Result};

/// An element `a + bλ` of Z[λ].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct AlgebraicPoint {
    pub a: i64,
    pub b: i64,
}

impl AlgebraicPoint {
    pub const ZERO: AlgebraicPoint = AlgebraicPoint { a: 0, b: 0 };

    pub const fn new(a: i64, b: i64) -> Self {
        Self { a, b }
    }
}

impl Add for AlgebraicPoint {
    type Output = AlgebraicPoint;
    fn add(self, rhs: Self) -> Self {
        AlgebraicPoint::new(self.a + rhs.a, self.b + rhs.b)
    }
}

impl Sub for AlgebraicPoint {
    type Output = AlgebraicPoint;
    fn sub(self, rhs: Self) -> Self {
        AlgebraicPoint::new(self.a - rhs.a, self.b - rhs.b)
    }
}

impl Neg for AlgebraicPoint {
    type Output = AlgebraicPoint;
    fn neg(self) -> Self {
        AlgebraicPoint::new(-self.a, -self.b)
    }
}

impl fmt::Display for AlgebraicPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a, self.b) {
            (a, 0) => write!(f, "{a}"),
            (0, b) => write!(f, "{b}λ"),
            (a, b) if b < 0 => write!(f, "{a}-{}λ", -b),
            (a, b) => write!(f, "{a}+{b}λ"),
        }
    }
}

/// The ring Z[λ] for a fixed family parameter `m`, responsible for normal
/// forms, the real embedding and exact division by λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticRing {
    m: i64,
    lambda: f64,
    integer_lambda: Option<i64>,
}

impl QuadraticRing {
    pub fn new(m: u64) -> Result<Self> {
        if m == 0 {
            return Err(invalid("m must be at least 1"));
        }
        let m = m as i64;
        let lambda = 0.5 * (1.0 + ((4 * m + 1) as f64).sqrt());
        let r = lambda.round() as i64;
        let integer_lambda = (r * r - r == m).then_some(r);
        Ok(Self {
            m,
            lambda,
            integer_lambda,
        })
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn integer_lambda(&self) -> Option<i64> {
        self.integer_lambda
    }

    /// `a + bλ` in normal form.
    pub fn point(&self, a: i64, b: i64) -> AlgebraicPoint {
        match self.integer_lambda {
            Some(l) => AlgebraicPoint::new(a + b * l, 0),
            None => AlgebraicPoint::new(a, b),
        }
    }

    pub fn normalize(&self, p: AlgebraicPoint) -> AlgebraicPoint {
        self.point(p.a, p.b)
    }

    /// λ itself.
    pub fn lambda_point(&self) -> AlgebraicPoint {
        self.point(0, 1)
    }

    pub fn embed(&self, p: AlgebraicPoint) -> f64 {
        p.a as f64 + p.b as f64 * self.lambda
    }

    /// λ·p, using λ² = λ + m.
    pub fn mul_lambda(&self, p: AlgebraicPoint) -> AlgebraicPoint {
        self.point(self.m * p.b, p.a + p.b)
    }

    /// p/λ when it lies in Z[λ], otherwise `None`.
    ///
    /// With λ⁻¹ = (λ − 1)/m one gets (a + bλ)/λ = (b − a/m) + (a/m)λ, which is
    /// in the module iff m | a. For integer λ the module is Z and the test is
    /// plain divisibility by λ.
    pub fn div_lambda(&self, p: AlgebraicPoint) -> Option<AlgebraicPoint> {
        match self.integer_lambda {
            Some(l) => (p.a % l == 0).then(|| AlgebraicPoint::new(p.a / l, 0)),
            None => (p.a % self.m == 0).then(|| {
                let q = p.a / self.m;
                AlgebraicPoint::new(p.b - q, q)
            }),
        }
    }
}

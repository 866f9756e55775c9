//! Dense integer polynomials and their complex roots.

use std::fmt;
use std::ops::Mul;

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// c₀ + c₁z + … + c_d z^d with c_d ≠ 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<i64>,
}

impl IntPolynomial {
    /// Coefficients in increasing degree; trailing zeros are dropped.
    pub fn new(mut coeffs: Vec<i64>) -> Result<Self> {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(invalid("the zero polynomial has no Mahler measure"));
        }
        Ok(Self { coeffs })
    }

    pub fn constant(c: i64) -> Result<Self> {
        Self::new(vec![c])
    }

    /// z^k.
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![0; k + 1];
        coeffs[k] = 1;
        Self { coeffs }
    }

    /// Sum of `terms` (coefficient, exponent), collecting equal exponents.
    pub fn from_terms(terms: &[(i64, usize)]) -> Result<Self> {
        let deg = terms.iter().map(|t| t.1).max().unwrap_or(0);
        let mut coeffs = vec![0; deg + 1];
        for &(c, e) in terms {
            coeffs[e] += c;
        }
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> i64 {
        self.coeffs[self.degree()]
    }

    /// Σ c_i², the squared 2-norm of the coefficient vector.
    pub fn norm2_sq(&self) -> i64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c as f64)
    }

    /// p(z) with the Horner recurrence carried in double-double arithmetic,
    /// so cancellation near multiple roots costs no accuracy until |p| is
    /// of order ε²·Σ|c_i|.
    pub fn eval_compensated(&self, z: Complex64) -> Complex64 {
        let mut re = Dd::ZERO;
        let mut im = Dd::ZERO;
        for &c in self.coeffs.iter().rev() {
            let next_re = re.mul_f64(z.re).add(im.mul_f64(z.im).neg());
            let next_im = re.mul_f64(z.im).add(im.mul_f64(z.re));
            re = next_re.add(Dd::from(c as f64));
            im = next_im;
        }
        Complex64::new(re.value(), im.value())
    }

    pub fn eval_int(&self, z: i64) -> i64 {
        self.coeffs.iter().rev().fold(0, |acc, &c| acc * z + c)
    }

    /// Exact quotient by a monic divisor, or None if the remainder is non-zero.
    pub fn div_exact(&self, divisor: &IntPolynomial) -> Option<IntPolynomial> {
        if divisor.leading() != 1 || divisor.degree() > self.degree() {
            return None;
        }
        let mut rem = self.coeffs.clone();
        let dd = divisor.degree();
        let mut quot = vec![0; self.degree() - dd + 1];
        for i in (0..quot.len()).rev() {
            let q = rem[i + dd];
            quot[i] = q;
            if q != 0 {
                for (j, &d) in divisor.coeffs.iter().enumerate() {
                    rem[i + j] -= q * d;
                }
            }
        }
        if rem.iter().any(|&r| r != 0) {
            return None;
        }
        IntPolynomial::new(quot).ok()
    }
}

impl Mul for &IntPolynomial {
    type Output = IntPolynomial;

    fn mul(self, rhs: &IntPolynomial) -> IntPolynomial {
        let mut coeffs = vec![0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        IntPolynomial { coeffs }
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else { "+" };
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.unsigned_abs();
            match (e, a) {
                (0, _) => write!(f, "{a}")?,
                (1, 1) => write!(f, "z")?,
                (1, _) => write!(f, "{a}z")?,
                (_, 1) => write!(f, "z^{e}")?,
                _ => write!(f, "{a}z^{e}")?,
            }
        }
        Ok(())
    }
}

/// Unevaluated sum hi + lo with |lo| ≤ ulp(hi)/2.
#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }

    fn neg(self) -> Self {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let bb = s - a;
        (s, (a - (s - bb)) + (b - bb))
    }

    fn quick(hi: f64, lo: f64) -> Self {
        let s = hi + lo;
        Dd {
            hi: s,
            lo: lo - (s - hi),
        }
    }

    fn add(self, other: Dd) -> Dd {
        let (s, e) = Self::two_sum(self.hi, other.hi);
        Self::quick(s, e + self.lo + other.lo)
    }

    fn mul_f64(self, x: f64) -> Dd {
        let p = self.hi * x;
        let e = self.hi.mul_add(x, -p);
        Self::quick(p, e + self.lo * x)
    }
}

/// 1 + z + … + z^{n−1} (the constant 0 polynomial is not allowed, so n ≥ 1).
pub fn geometric_sum(n: usize) -> IntPolynomial {
    IntPolynomial {
        coeffs: vec![1; n.max(1)],
    }
}

/// The n-th cyclotomic polynomial.
pub fn cyclotomic(n: usize) -> IntPolynomial {
    assert!(n >= 1);
    let mut p = IntPolynomial::from_terms(&[(-1, 0), (1, n)]).expect("non-zero");
    for d in 1..n {
        if n.is_multiple_of(d) {
            p = p.div_exact(&cyclotomic(d)).expect("Φ_d divides z^n − 1");
        }
    }
    p
}

/// p with every factor z and every cyclotomic factor Φ_n, n ≤ 2·deg + 2,
/// divided out exactly (with multiplicity). These factors lie on or at the
/// origin and contribute nothing to the Mahler measure.
pub fn strip_unimodular_factors(p: &IntPolynomial) -> IntPolynomial {
    let lead_zeros = p.coeffs.iter().take_while(|&&c| c == 0).count();
    let mut q = IntPolynomial {
        coeffs: p.coeffs[lead_zeros..].to_vec(),
    };
    let bound = 2 * q.degree() + 2;
    for n in 1..=bound {
        if q.degree() == 0 {
            break;
        }
        let phi = cyclotomic(n);
        if phi.degree() > q.degree() {
            continue;
        }
        while let Some(next) = q.div_exact(&phi) {
            q = next;
            if q.degree() < phi.degree() {
                break;
            }
        }
    }
    q
}

/// Parlett–Reinsch balancing with radix 2, in place.
fn balance(a: &mut DMatrix<f64>) {
    const RADIX: f64 = 2.0;
    let n = a.nrows();
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX * RADIX;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= RADIX * RADIX;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                for j in 0..n {
                    a[(i, j)] /= f;
                    a[(j, i)] *= f;
                }
            }
        }
    }
}

/// A root together with the size of the last Newton correction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub value: Complex64,
    pub correction: f64,
}

/// Eigenvalues closer than this (relative to max(1, |z|)) are treated as one
/// multiple root.
pub const CLUSTER_TOL: f64 = 1e-4;

/// All complex roots of p: eigenvalues of the balanced companion matrix,
/// then polished by Newton's method on p itself. Clusters of eigenvalues
/// are replaced by their centroid.
pub fn roots(p: &IntPolynomial) -> Result<Vec<Root>> {
    let d = p.degree();
    if d == 0 {
        return Ok(Vec::new());
    }
    let lead = p.leading() as f64;
    let mut companion = DMatrix::<f64>::zeros(d, d);
    for i in 1..d {
        companion[(i, i - 1)] = 1.0;
    }
    for i in 0..d {
        companion[(i, d - 1)] = -(p.coeffs[i] as f64) / lead;
    }
    balance(&mut companion);
    // QR iteration can stall on a rotation-symmetric spectrum (z^d − 1);
    // retrying on C − σI breaks the symmetry without moving the roots
    let mut eigenvalues = None;
    for shift in [0.0, 0.5, -0.37] {
        let shifted = &companion - DMatrix::<f64>::identity(d, d) * shift;
        if let Some(schur) = Schur::try_new(shifted, f64::EPSILON, 100 * d.max(10)) {
            eigenvalues = Some(schur.complex_eigenvalues().map(|z| z + shift));
            break;
        }
    }
    let eigenvalues = eigenvalues
        .ok_or_else(|| Error::NonConvergence(format!("Schur iteration failed for degree {d}")))?;
    let derivative: Vec<f64> = (1..=d).map(|i| i as f64 * p.coeffs[i] as f64).collect();
    let eval_d = |z: Complex64| {
        derivative
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    };
    // a multiple root splits into a cluster of size ~ε^{1/k}; the cluster's
    // centroid is well conditioned, individual members are not
    let eigenvalues: Vec<Complex64> = eigenvalues.iter().copied().collect();
    let mut cluster_of: Vec<usize> = (0..d).collect();
    for i in 0..d {
        for j in 0..i {
            let tol = CLUSTER_TOL * eigenvalues[i].norm().max(1.0);
            if (eigenvalues[i] - eigenvalues[j]).norm() < tol {
                let (from, to) = (cluster_of[i], cluster_of[j]);
                for c in cluster_of.iter_mut().filter(|c| **c == from) {
                    *c = to;
                }
            }
        }
    }
    Ok((0..d)
        .map(|i| {
            let members: Vec<Complex64> = (0..d)
                .filter(|&j| cluster_of[j] == cluster_of[i])
                .map(|j| eigenvalues[j])
                .collect();
            if members.len() > 1 {
                let centroid = members.iter().sum::<Complex64>() / members.len() as f64;
                let spread = members
                    .iter()
                    .map(|z| (z - centroid).norm())
                    .fold(0.0, f64::max);
                return Root {
                    value: centroid,
                    correction: spread,
                };
            }
            let mut z = eigenvalues[i];
            let mut correction = 0.0;
            for _ in 0..3 {
                let dp = eval_d(z);
                if dp.norm() == 0.0 {
                    break;
                }
                let step = p.eval(z) / dp;
                // accept only steps that reduce the residual
                if (p.eval(z - step)).norm() < p.eval(z).norm() {
                    z -= step;
                    correction = step.norm();
                } else {
                    break;
                }
            }
            Root {
                value: z,
                correction,
            }
        })
        .collect())
}

use super::{eigen_decomposition, Mat, NumError, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

/// Dense univariate polynomial with complex coefficients, lowest degree first.
///
/// Trailing exact zeros are stripped, so the empty coefficient list is the
/// zero polynomial.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CPoly {
    coeffs: Vec<C64>,
}

impl CPoly {
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        while coeffs.last().is_some_and(|c| *c == C64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: C64) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(C64::new(1.0, 0.0))
    }

    /// `c0 + c1 u`.
    pub fn linear(c0: C64, c1: C64) -> Self {
        Self::new(vec![c0, c1])
    }

    /// Monic polynomial with the given roots, `∏ (u − r)`.
    pub fn from_roots(roots: &[C64]) -> Self {
        let mut out = Self::one();
        for r in roots {
            out = &out * &Self::linear(-r, C64::new(1.0, 0.0));
        }
        out
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Coefficient of `u^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> C64 {
        self.coeffs.last().copied().unwrap_or_default()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Horner evaluation.
    pub fn eval(&self, u: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::default(), |acc, c| acc * u + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * k as f64)
                .collect(),
        )
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// `p(u + s)`.
    pub fn shift(&self, s: C64) -> Self {
        let step = Self::linear(s, C64::new(1.0, 0.0));
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(), |acc, c| &(&acc * &step) + &Self::constant(*c))
    }

    /// `p(s u)`.
    pub fn dilate(&self, s: C64) -> Self {
        let mut pw = C64::new(1.0, 0.0);
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            out.push(c * pw);
            pw *= s;
        }
        Self::new(out)
    }

    /// Drop trailing coefficients below `rel × max |coeff|`.
    pub fn trimmed(&self, rel: f64) -> Self {
        let cut = rel * self.max_abs_coeff();
        let mut coeffs = self.coeffs.clone();
        while coeffs.last().is_some_and(|c| c.norm() <= cut) {
            coeffs.pop();
        }
        Self::new(coeffs)
    }

    /// Largest coefficient distance after padding to a common length.
    pub fn distance(&self, other: &Self) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n).map(|k| (self.coeff(k) - other.coeff(k)).norm()).fold(0.0, f64::max)
    }

    /// Roots from the companion matrix, each refined by one Newton step.
    pub fn roots(&self) -> Result<Vec<C64>, NumError> {
        let d = match self.degree() {
            Some(d) if d >= 1 => d,
            _ => return Err(NumError::DegenerateInput("polynomial of degree < 1")),
        };
        let lead = self.leading();
        let mut comp = Mat::zeros(d, d);
        for i in 1..d {
            comp[(i, i - 1)] = C64::new(1.0, 0.0);
        }
        for i in 0..d {
            comp[(i, d - 1)] = -self.coeffs[i] / lead;
        }
        let (vals, _) = eigen_decomposition(&comp, false);
        let dp = self.derivative();
        Ok(vals
            .into_iter()
            .map(|r| {
                let slope = dp.eval(r);
                if slope.norm() == 0.0 {
                    return r;
                }
                let polished = r - self.eval(r) / slope;
                if self.eval(polished).norm() <= self.eval(r).norm() {
                    polished
                } else {
                    r
                }
            })
            .collect())
    }

    /// Interpolate `f` by a polynomial of the given degree from its values on
    /// `degree + 1` equally spaced points of the circle `|u| = radius`.
    ///
    /// Exact when `f` is such a polynomial; the nodes form a scaled DFT, so
    /// the solve is perfectly conditioned.
    pub fn interpolate_circle(f: impl Fn(C64) -> C64, degree: usize, radius: f64) -> Self {
        let n = degree + 1;
        let vals: Vec<C64> = (0..n)
            .map(|j| f(C64::from_polar(radius, 2.0 * PI * j as f64 / n as f64)))
            .collect();
        let coeffs = (0..n)
            .map(|k| {
                let s: C64 = vals
                    .iter()
                    .enumerate()
                    .map(|(j, v)| v * C64::from_polar(1.0, -2.0 * PI * (j * k) as f64 / n as f64))
                    .sum();
                s / (n as f64 * radius.powi(k as i32))
            })
            .collect();
        Self::new(coeffs)
    }
}

impl Add for &CPoly {
    type Output = CPoly;
    fn add(self, rhs: &CPoly) -> CPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        CPoly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &CPoly {
    type Output = CPoly;
    fn sub(self, rhs: &CPoly) -> CPoly {
        self + &(-rhs)
    }
}

impl Neg for &CPoly {
    type Output = CPoly;
    fn neg(self) -> CPoly {
        CPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &CPoly {
    type Output = CPoly;
    fn mul(self, rhs: &CPoly) -> CPoly {
        if self.is_zero() || rhs.is_zero() {
            return CPoly::zero();
        }
        let mut out = vec![C64::default(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        CPoly::new(out)
    }
}

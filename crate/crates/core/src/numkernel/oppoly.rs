use super::{CPoly, Mat, NumError, Vector, C64};

/// Polynomial in `u` whose coefficients are dense operators on one space.
#[derive(Debug, Clone, PartialEq)]
pub struct OpPoly {
    coeffs: Vec<Mat>,
    dim: usize,
}

impl OpPoly {
    pub fn new(coeffs: Vec<Mat>, dim: usize) -> Result<Self, NumError> {
        for m in &coeffs {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(NumError::ShapeMismatch { expected: dim, got: m.nrows().max(m.ncols()) });
            }
        }
        Ok(Self { coeffs, dim })
    }

    pub fn zero(dim: usize) -> Self {
        Self { coeffs: Vec::new(), dim }
    }

    pub fn constant(m: Mat) -> Self {
        let dim = m.nrows();
        Self { coeffs: vec![m], dim }
    }

    /// `p(u) · I`.
    pub fn scalar(p: &CPoly, dim: usize) -> Self {
        let id = Mat::identity(dim, dim);
        Self { coeffs: p.coeffs().iter().map(|c| &id * *c).collect(), dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &[Mat] {
        &self.coeffs
    }

    /// Coefficient of `u^k`, zero beyond the stored length.
    pub fn coeff(&self, k: usize) -> Mat {
        self.coeffs.get(k).cloned().unwrap_or_else(|| Mat::zeros(self.dim, self.dim))
    }

    /// Index of the highest coefficient with nonzero norm.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|m| m.norm() > 0.0)
    }

    pub fn eval(&self, u: C64) -> Mat {
        let mut acc = Mat::zeros(self.dim, self.dim);
        for m in self.coeffs.iter().rev() {
            acc *= u;
            acc += m;
        }
        acc
    }

    pub fn apply(&self, u: C64, v: &Vector) -> Result<Vector, NumError> {
        if v.len() != self.dim {
            return Err(NumError::ShapeMismatch { expected: self.dim, got: v.len() });
        }
        let mut acc = Vector::zeros(self.dim);
        for m in self.coeffs.iter().rev() {
            acc = acc * u + m * v;
        }
        Ok(acc)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|m| m * s).collect(), dim: self.dim }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self { coeffs: (0..n).map(|k| self.coeff(k) + other.coeff(k)).collect(), dim: self.dim }
    }

    /// Product of operator polynomials, `self` on the left.
    pub fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::zero(self.dim);
        }
        let mut out = vec![Mat::zeros(self.dim, self.dim); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self { coeffs: out, dim: self.dim }
    }

    /// Conjugate every coefficient, `S⁻¹ P(u) S` given `S` and `S⁻¹`.
    pub fn conjugate(&self, s: &Mat, s_inv: &Mat) -> Self {
        Self { coeffs: self.coeffs.iter().map(|m| s_inv * m * s).collect(), dim: self.dim }
    }
}

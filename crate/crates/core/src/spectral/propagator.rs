use std::ops::Mul;

use super::operator::DiagonalOperator;
use crate::error::{LabError, Result};

/// Row-major 2×2 real matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix2(pub [[f64; 2]; 2]);

impl Matrix2 {
    pub const IDENTITY: Matrix2 = Matrix2([[1.0, 0.0], [0.0, 1.0]]);

    pub fn det(&self) -> f64 {
        let m = self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    #[inline]
    pub fn apply(&self, a: f64, b: f64) -> (f64, f64) {
        let m = self.0;
        (m[0][0] * a + m[0][1] * b, m[1][0] * a + m[1][1] * b)
    }

    pub fn max_abs_diff(&self, other: &Matrix2) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((self.0[i][j] - other.0[i][j]).abs());
            }
        }
        d
    }
}

impl Mul for Matrix2 {
    type Output = Matrix2;

    fn mul(self, rhs: Matrix2) -> Matrix2 {
        let (a, b) = (self.0, rhs.0);
        let mut out = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Matrix2(out)
    }
}

/// Mode-wise `exp(t A)` for the first-order wave system `(u, v)' = (v, -mu² u)`.
pub fn wave_mode_propagator(mu: f64, t: f64) -> Matrix2 {
    let (s, c) = (mu * t).sin_cos();
    Matrix2([[c, s / mu], [-mu * s, c]])
}

/// `(cos(t symbol), sin(t symbol))`.
pub fn phase_propagator(symbol: f64, t: f64) -> (f64, f64) {
    let (s, c) = (t * symbol).sin_cos();
    (c, s)
}

/// Semigroup of the generator `-op`: entries `exp(-t mu_k)`.
pub fn semigroup_propagator(op: &DiagonalOperator, t: f64) -> DiagonalOperator {
    let entries = op.eigenvalues().iter().map(|mu| (-t * mu).exp()).collect();
    DiagonalOperator::from_eigenvalues(*op.basis(), entries)
        .expect("entry count matches the source operator")
}

/// Yosida approximant `exp(t A_lambda)` with `A = -op`, i.e. entries
/// `exp(-t mu_k / (1 + mu_k / lambda))`.
pub fn yosida_propagator(op: &DiagonalOperator, lambda: f64, t: f64) -> Result<DiagonalOperator> {
    if !(lambda > 0.0) {
        return Err(LabError::Domain(format!(
            "Yosida parameter must be positive, got {lambda}"
        )));
    }
    let entries = op
        .eigenvalues()
        .iter()
        .map(|&mu| (-t * mu / (1.0 + mu / lambda)).exp())
        .collect();
    DiagonalOperator::from_eigenvalues(*op.basis(), entries)
}

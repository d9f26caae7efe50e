use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::basis::{Basis, BasisKind};
use crate::error::{LabError, Result};

/// Operator acting diagonally on a basis, stored as its eigenvalue sequence.
///
/// For the Dirichlet Laplacian the stored values are those of `-theta Δ`,
/// i.e. `theta k² pi²`. Phase symbols (Airy, Schrödinger) may be signed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalOperator {
    basis: Basis,
    eigenvalues: Vec<f64>,
}

impl DiagonalOperator {
    pub fn new(basis: Basis, eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.len() != basis.len() {
            return Err(LabError::IncompatibleSpaces(format!(
                "{} eigenvalues for a basis of {} functions",
                eigenvalues.len(),
                basis.len()
            )));
        }
        Ok(Self { basis, eigenvalues })
    }

    /// `-theta Δ` with Dirichlet conditions on `(0, 1)`.
    pub fn dirichlet_laplacian(modes: usize, theta: f64) -> Result<Self> {
        if !(theta > 0.0) {
            return Err(LabError::Domain(format!("theta must be positive, got {theta}")));
        }
        let basis = Basis::dirichlet_sine(modes);
        let eigenvalues = (1..=modes)
            .map(|k| theta * (k as f64 * PI).powi(2))
            .collect();
        Ok(Self { basis, eigenvalues })
    }

    /// Fourier multiplier `xi -> symbol(xi)` on a torus basis.
    pub fn fourier_symbol(basis: Basis, symbol: impl Fn(f64) -> f64) -> Result<Self> {
        if !matches!(basis.kind(), BasisKind::FourierTorus { .. }) {
            return Err(LabError::IncompatibleSpaces(
                "Fourier symbols need a torus basis".into(),
            ));
        }
        let eigenvalues = (0..basis.len()).map(|i| symbol(basis.wave_number(i))).collect();
        Ok(Self { basis, eigenvalues })
    }

    /// Bessel-potential weights `1 + xi²` on a torus basis.
    pub fn bessel_potential(basis: Basis) -> Result<Self> {
        Self::fourier_symbol(basis, |xi| 1.0 + xi * xi)
    }

    /// Arbitrary nonnegative diagonal values with no spatial meaning.
    pub fn from_eigenvalues(basis: Basis, eigenvalues: Vec<f64>) -> Result<Self> {
        Self::new(basis, eigenvalues)
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Theta of a Dirichlet Laplacian, recovered from the first eigenvalue.
    pub fn dirichlet_theta(&self) -> Option<f64> {
        match self.basis.kind() {
            BasisKind::DirichletSine if !self.eigenvalues.is_empty() => {
                Some(self.eigenvalues[0] / (PI * PI))
            }
            _ => None,
        }
    }

    /// Mode-wise power `mu_k^r`.
    pub fn power(&self, r: f64) -> DiagonalOperator {
        DiagonalOperator {
            basis: self.basis,
            eigenvalues: self.eigenvalues.iter().map(|m| m.powf(r)).collect(),
        }
    }
}

/// The norm of the interpolation space `H_r` attached to a positive diagonal
/// operator: `‖x‖²_{H_r} = Σ mu_k^{2r} x_k²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpolationSpaceNorm {
    operator: DiagonalOperator,
    exponent: f64,
}

impl InterpolationSpaceNorm {
    pub fn new(operator: DiagonalOperator, exponent: f64) -> Result<Self> {
        if exponent != 0.0 && operator.eigenvalues.iter().any(|&m| !(m > 0.0)) {
            return Err(LabError::Domain(
                "fractional norms need strictly positive eigenvalues".into(),
            ));
        }
        Ok(Self { operator, exponent })
    }

    pub fn operator(&self) -> &DiagonalOperator {
        &self.operator
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    /// Weight `mu_k^{2r}` of mode `k`.
    pub fn weight(&self, i: usize) -> f64 {
        if self.exponent == 0.0 {
            1.0
        } else {
            self.operator.eigenvalues[i].powf(2.0 * self.exponent)
        }
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.operator.len()).map(|i| self.weight(i)).collect()
    }

    /// Squared norm of a raw coefficient vector in this space's basis.
    pub fn norm_sq_coefficients(&self, coefficients: &[f64]) -> f64 {
        coefficients
            .iter()
            .enumerate()
            .map(|(i, c)| self.weight(i) * c * c)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laplacian_spectrum_positive_increasing() {
        let op = DiagonalOperator::dirichlet_laplacian(50, 0.3).unwrap();
        let ev = op.eigenvalues();
        assert!(ev[0] > 0.0);
        assert!(ev.windows(2).all(|w| w[1] > w[0]));
        assert!((op.dirichlet_theta().unwrap() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn rejects_nonpositive_theta() {
        assert!(DiagonalOperator::dirichlet_laplacian(4, 0.0).is_err());
    }

    #[test]
    fn negative_exponent_needs_positive_spectrum() {
        let basis = Basis::fourier_torus(1.0, 2);
        let lap = DiagonalOperator::fourier_symbol(basis, |xi| xi * xi).unwrap();
        assert!(InterpolationSpaceNorm::new(lap.clone(), -0.5).is_err());
        assert!(InterpolationSpaceNorm::new(lap, 0.0).is_ok());
    }
}

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use super::basis::{Basis, BasisKind};
use super::operator::InterpolationSpaceNorm;
use crate::error::{LabError, Result};

/// Coefficients of a function in an orthonormal basis.
///
/// Complex-valued fields interleave `(re, im)` per basis function, so the
/// coefficient vector is twice the basis length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralField {
    basis: Basis,
    complex: bool,
    coefficients: Vec<f64>,
}

impl SpectralField {
    pub fn zeros(basis: Basis) -> Self {
        Self {
            basis,
            complex: false,
            coefficients: vec![0.0; basis.len()],
        }
    }

    pub fn complex_zeros(basis: Basis) -> Self {
        Self {
            basis,
            complex: true,
            coefficients: vec![0.0; 2 * basis.len()],
        }
    }

    pub fn from_coefficients(basis: Basis, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.len() != basis.len() {
            return Err(LabError::IncompatibleSpaces(format!(
                "{} coefficients for a basis of {} functions",
                coefficients.len(),
                basis.len()
            )));
        }
        Ok(Self {
            basis,
            complex: false,
            coefficients,
        })
    }

    /// Complex field from interleaved `(re, im)` pairs.
    pub fn from_complex_pairs(basis: Basis, interleaved: Vec<f64>) -> Result<Self> {
        if interleaved.len() != 2 * basis.len() {
            return Err(LabError::IncompatibleSpaces(format!(
                "{} reals for a complex field over {} functions",
                interleaved.len(),
                basis.len()
            )));
        }
        Ok(Self {
            basis,
            complex: true,
            coefficients: interleaved,
        })
    }

    /// Basis function `i` with unit coefficient.
    pub fn unit(basis: Basis, i: usize) -> Self {
        let mut f = Self::zeros(basis);
        f.coefficients[i] = 1.0;
        f
    }

    /// Orthogonal projection of the constant function 1 onto `basis`.
    pub fn constant_one(basis: Basis) -> Self {
        let coefficients = match basis.kind() {
            // <1, sqrt2 sin(k pi s)> = sqrt2 (1 - cos k pi) / (k pi)
            BasisKind::DirichletSine => (1..=basis.len())
                .map(|k| {
                    if k % 2 == 1 {
                        2.0 * SQRT_2 / (k as f64 * PI)
                    } else {
                        0.0
                    }
                })
                .collect(),
            BasisKind::FourierTorus { half_length } => {
                let mut c = vec![0.0; basis.len()];
                c[0] = (2.0 * half_length).sqrt();
                c
            }
        };
        Self {
            basis,
            complex: false,
            coefficients,
        }
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn is_complex(&self) -> bool {
        self.complex
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn coefficients_mut(&mut self) -> &mut [f64] {
        &mut self.coefficients
    }

    pub fn into_coefficients(self) -> Vec<f64> {
        self.coefficients
    }

    /// Number of basis functions carried.
    pub fn truncation(&self) -> usize {
        self.basis.len()
    }

    /// Euclidean norm of the coefficient vector (the L² norm by Parseval).
    pub fn l2_norm(&self) -> f64 {
        self.coefficients.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Evaluates a real field at `s` by direct synthesis.
    pub fn eval(&self, s: f64) -> f64 {
        assert!(!self.complex, "eval is defined for real fields");
        self.coefficients
            .iter()
            .enumerate()
            .map(|(i, c)| c * self.basis.eval(i, s))
            .sum()
    }
}

/// `‖x‖_{H_r} = sqrt(Σ mu_k^{2r} |x_k|²)`.
pub fn fractional_norm(x: &SpectralField, space: &InterpolationSpaceNorm) -> Result<f64> {
    if !x.basis().same_space(space.operator().basis()) {
        return Err(LabError::IncompatibleSpaces(format!(
            "field on {:?} measured in a norm over {:?}",
            x.basis(),
            space.operator().basis()
        )));
    }
    let sum: f64 = if x.is_complex() {
        x.coefficients()
            .chunks_exact(2)
            .enumerate()
            .map(|(i, p)| space.weight(i) * (p[0] * p[0] + p[1] * p[1]))
            .sum()
    } else {
        space.norm_sq_coefficients(x.coefficients())
    };
    Ok(sum.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::DiagonalOperator;
    use proptest::prelude::*;

    fn laplacian_norm(modes: usize, r: f64) -> InterpolationSpaceNorm {
        InterpolationSpaceNorm::new(DiagonalOperator::dirichlet_laplacian(modes, 1.0).unwrap(), r)
            .unwrap()
    }

    #[test]
    fn fractional_norm_examples() {
        let basis = Basis::dirichlet_sine(8);
        let e1 = SpectralField::unit(basis, 0);
        let e2 = SpectralField::unit(basis, 1);
        assert_eq!(fractional_norm(&e1, &laplacian_norm(8, 0.0)).unwrap(), 1.0);
        assert!((fractional_norm(&e1, &laplacian_norm(8, 0.5)).unwrap() - PI).abs() < 1e-14);
        let v = fractional_norm(&e2, &laplacian_norm(8, -0.5)).unwrap();
        assert!((v - 1.0 / (2.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn basis_mismatch_is_an_error() {
        let x = SpectralField::unit(Basis::dirichlet_sine(4), 0);
        let err = fractional_norm(&x, &laplacian_norm(8, 0.0)).unwrap_err();
        assert!(matches!(err, LabError::IncompatibleSpaces(_)));
    }

    #[test]
    fn constant_projection_converges_in_l2() {
        // ‖P_N 1‖² = 1 - sum_{odd k > N} 8/(k pi)²
        let f = SpectralField::constant_one(Basis::dirichlet_sine(2000));
        assert!((f.l2_norm() - 1.0).abs() < 1e-3);
        assert!((f.eval(0.5) - 1.0).abs() < 1e-2);
    }

    proptest! {
        #[test]
        fn parseval_at_exponent_zero(coefs in prop::collection::vec(-10.0f64..10.0, 1..40)) {
            let basis = Basis::dirichlet_sine(coefs.len());
            let x = SpectralField::from_coefficients(basis, coefs.clone()).unwrap();
            let euclid = coefs.iter().map(|c| c * c).sum::<f64>().sqrt();
            let n = fractional_norm(&x, &laplacian_norm(coefs.len(), 0.0)).unwrap();
            prop_assert!((n - euclid).abs() <= 1e-12 * euclid.max(1.0));
        }

        #[test]
        fn norm_monotone_in_exponent(coefs in prop::collection::vec(-1.0f64..1.0, 1..20),
                                     r1 in -1.0f64..1.0, dr in 0.0f64..1.0) {
            // every Dirichlet eigenvalue exceeds 1, so the weights grow with r
            let basis = Basis::dirichlet_sine(coefs.len());
            let x = SpectralField::from_coefficients(basis, coefs.clone()).unwrap();
            let lo = fractional_norm(&x, &laplacian_norm(coefs.len(), r1)).unwrap();
            let hi = fractional_norm(&x, &laplacian_norm(coefs.len(), r1 + dr)).unwrap();
            prop_assert!(hi >= lo * (1.0 - 1e-12));
        }
    }
}

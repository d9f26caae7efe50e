use serde::{Deserialize, Serialize};

use crate::state::StateNorm;

/// Bounded smooth test functions on `H`, all with `|phi| ≤ 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunctional {
    /// `exp(-‖x‖²_H / 2)`.
    GaussianBell,
    /// `sin(<x, psi>_H)`.
    SmoothLinear { psi: Vec<f64> },
}

impl TestFunctional {
    pub fn eval(&self, norm: &StateNorm, x: &[f64]) -> f64 {
        match self {
            Self::GaussianBell => (-0.5 * norm.norm_sq(x)).exp(),
            Self::SmoothLinear { psi } => norm.inner(x, psi).sin(),
        }
    }

    /// `‖phi‖_{C²_b} = |phi(0)| + sup ‖D phi‖ + sup ‖D² phi‖`.
    pub fn c2_norm(&self, norm: &StateNorm) -> f64 {
        match self {
            // phi(0) = 1; D phi(x) = -phi(x) x has norm r e^{-r²/2}, largest
            // at r = 1; D² phi(x) = phi(x)(x ⊗ x - I) has norm
            // e^{-r²/2} max(1, |r² - 1|) ≤ 1, attained at x = 0
            Self::GaussianBell => 2.0 + (-0.5f64).exp(),
            // phi(0) = 0; D phi = cos(.) psi, D² phi = -sin(.) psi ⊗ psi
            Self::SmoothLinear { psi } => {
                let p = norm.norm(psi);
                p + p * p
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_norm_covers_derivative_sup() {
        let norm = StateNorm::unweighted(1);
        let phi = TestFunctional::GaussianBell;
        // numerical sup of |phi'| and |phi''| on a fine grid of the line
        let (mut d1, mut d2) = (0.0f64, 0.0f64);
        for i in 0..=40000 {
            let r = -10.0 + i as f64 * 5e-4;
            let e = (-0.5 * r * r).exp();
            d1 = d1.max((r * e).abs());
            d2 = d2.max(((r * r - 1.0) * e).abs());
        }
        assert!((phi.c2_norm(&norm) - (1.0 + d1 + d2)).abs() < 1e-9);
        assert_eq!(phi.eval(&norm, &[0.0]), 1.0);
    }

    #[test]
    fn linear_functional_is_bounded() {
        let norm = StateNorm::Weighted(vec![1.0, 4.0]);
        let phi = TestFunctional::SmoothLinear { psi: vec![0.5, 0.25] };
        assert!((phi.eval(&norm, &[1.0, 1.0]) - 1.5f64.sin()).abs() < 1e-15);
        let p = (0.25f64 + 0.25).sqrt();
        assert!((phi.c2_norm(&norm) - (p + p * p)).abs() < 1e-15);
    }
}

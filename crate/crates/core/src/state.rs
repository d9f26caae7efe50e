//! Flat state vectors and the norms measuring them.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::spectral::Basis;

/// How a flat `Vec<f64>` state is laid out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StateLayout {
    /// One real coefficient per basis function.
    Real { basis: Basis },
    /// Positions `[0, N)` followed by velocities `[N, 2N)`.
    WavePair { basis: Basis },
    /// Interleaved `(re, im)` per basis function.
    Complex { basis: Basis },
    /// Point values on a uniform maturity grid.
    Curve { points: usize },
}

impl StateLayout {
    pub fn len(&self) -> usize {
        match *self {
            Self::Real { basis } => basis.len(),
            Self::WavePair { basis } | Self::Complex { basis } => 2 * basis.len(),
            Self::Curve { points } => points,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn basis(&self) -> Option<Basis> {
        match *self {
            Self::Real { basis } | Self::WavePair { basis } | Self::Complex { basis } => Some(basis),
            Self::Curve { .. } => None,
        }
    }

    /// Component read by state-dependent coefficients (the position for wave).
    pub fn input_range(&self) -> Range<usize> {
        match *self {
            Self::WavePair { basis } => 0..basis.len(),
            _ => 0..self.len(),
        }
    }

    /// Component written by drift and noise (the velocity for wave).
    pub fn target_range(&self) -> Range<usize> {
        match *self {
            Self::WavePair { basis } => basis.len()..2 * basis.len(),
            _ => 0..self.len(),
        }
    }

    pub fn is_complex(&self) -> bool {
        matches!(self, Self::Complex { .. })
    }
}

/// A Hilbert norm on a flat state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum StateNorm {
    /// `Σ w_i x_i²`.
    Weighted(Vec<f64>),
    /// `h_0² + Σ_j e^{alpha (tau_j + h/2)} ((h_{j+1} - h_j)/h)² h`, the grid
    /// version of `h(0)² + ∫ |h'|² e^{alpha tau} dtau`.
    Curve { alpha: f64, spacing: f64 },
}

impl StateNorm {
    pub fn unweighted(len: usize) -> Self {
        Self::Weighted(vec![1.0; len])
    }

    pub fn inner(&self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            Self::Weighted(w) => {
                debug_assert_eq!(w.len(), x.len());
                w.iter().zip(x).zip(y).map(|((w, a), b)| w * a * b).sum()
            }
            Self::Curve { alpha, spacing } => {
                let h = *spacing;
                let Some((x0, y0)) = x.first().zip(y.first()) else {
                    return 0.0;
                };
                let mut acc = x0 * y0;
                for j in 0..x.len().saturating_sub(1) {
                    let w = (alpha * (j as f64 * h + 0.5 * h)).exp();
                    acc += w * (x[j + 1] - x[j]) * (y[j + 1] - y[j]) / h;
                }
                acc
            }
        }
    }

    pub fn norm_sq(&self, x: &[f64]) -> f64 {
        self.inner(x, x)
    }

    pub fn norm(&self, x: &[f64]) -> f64 {
        self.norm_sq(x).sqrt()
    }

    /// `‖x - y‖²` without allocating.
    pub fn distance_sq(&self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            Self::Weighted(w) => w
                .iter()
                .zip(x)
                .zip(y)
                .map(|((w, a), b)| w * (a - b) * (a - b))
                .sum(),
            Self::Curve { .. } => {
                let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
                self.norm_sq(&d)
            }
        }
    }

    /// Restriction of a weighted norm to a sub-range of the state.
    pub fn weights_on(&self, range: Range<usize>) -> Option<&[f64]> {
        match self {
            Self::Weighted(w) => Some(&w[range]),
            Self::Curve { .. } => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wave_ranges() {
        let l = StateLayout::WavePair { basis: Basis::dirichlet_sine(5) };
        assert_eq!(l.len(), 10);
        assert_eq!(l.input_range(), 0..5);
        assert_eq!(l.target_range(), 5..10);
    }

    #[test]
    fn curve_norm_of_linear_function() {
        // h(tau) = tau on [0, 1] with alpha = 0: h(0)² + ∫ 1 = 1
        let n = StateNorm::Curve { alpha: 0.0, spacing: 0.1 };
        let x: Vec<f64> = (0..=10).map(|j| j as f64 * 0.1).collect();
        assert!((n.norm_sq(&x) - 1.0).abs() < 1e-12);
        let c = vec![2.0; 11];
        assert!((n.norm_sq(&c) - 4.0).abs() < 1e-12);
    }
}

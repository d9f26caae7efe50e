//! Closed-form Gaussian expectations for the drift-free additive diagonal
//! model `X^n_1 = Σ_{k<n} lambda_k beta_k(1) f_k`.

use serde::{Deserialize, Serialize};

use super::report::ErrorReport;
use crate::coefficients::TailLaw;
use crate::error::{LabError, Result};
use crate::special::compensated_sum;

/// Upper cutoff for the explicit part of infinite sums.
const MAX_CUTOFF: usize = 1 << 26;
/// Target for the remainder estimate of `Σ_{k ≥ K} log(1 + lambda_k²)`.
const REMAINDER_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LambdaSequence {
    /// `lambda_k = (k + 1)^{-q}` for `k ≥ 0`.
    PowerLaw { q: f64 },
    /// Finitely many nonzero entries.
    Explicit { values: Vec<f64> },
}

/// Truncation level `n`, or the untruncated noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Level {
    Finite(usize),
    Infinite,
}

impl LambdaSequence {
    pub fn power_law(q: f64) -> Result<Self> {
        let s = Self::PowerLaw { q };
        s.check()?;
        Ok(s)
    }

    fn law(q: f64) -> TailLaw {
        TailLaw {
            scale: 1.0,
            exponent: 2.0 * q,
            shift: 1.0,
        }
    }

    pub fn check(&self) -> Result<()> {
        match self {
            Self::PowerLaw { q } => Self::law(*q).check(),
            Self::Explicit { values } => {
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(LabError::Domain("lambda entries must be finite".into()));
                }
                Ok(())
            }
        }
    }

    pub fn lambda(&self, k: usize) -> f64 {
        match self {
            Self::PowerLaw { q } => ((k + 1) as f64).powf(-q),
            Self::Explicit { values } => values.get(k).copied().unwrap_or(0.0),
        }
    }

    /// First `n` entries.
    pub fn take(&self, n: usize) -> Vec<f64> {
        (0..n).map(|k| self.lambda(k)).collect()
    }

    /// `Σ_{k ≥ n} lambda_k²`.
    pub fn tail_sq(&self, n: usize) -> f64 {
        match self {
            Self::PowerLaw { q } => Self::law(*q).sum_from(n),
            Self::Explicit { values } => {
                compensated_sum(values.iter().skip(n).map(|v| v * v))
            }
        }
    }

    /// `Σ_{k ≥ n} log(1 + lambda_k²)`.
    ///
    /// Power laws are summed explicitly up to a cutoff `K` and closed with
    /// `Σ_{k ≥ K} (x_k - x_k²/2)`, `x_k = lambda_k²`. Since
    /// `x - x²/2 ≤ log(1 + x) ≤ x - x²/2 + x³/3`, the remainder error is at
    /// most `x_K² Σ_{k ≥ K} x_k / 3`, and `K` is grown until that is below
    /// `1e-13`.
    fn log_tail(&self, n: usize) -> f64 {
        match self {
            Self::Explicit { values } => {
                compensated_sum(values.iter().skip(n).map(|v| (v * v).ln_1p()))
            }
            Self::PowerLaw { q } => {
                let mut k_cut = n.max(64);
                loop {
                    let x = self.lambda(k_cut).powi(2);
                    if x * x * self.tail_sq(k_cut) / 3.0 < REMAINDER_TOL || k_cut >= MAX_CUTOFF {
                        break;
                    }
                    k_cut *= 2;
                }
                let quartic = Self::law(2.0 * q).sum_from(k_cut);
                let head = (n..k_cut).map(|k| self.lambda(k).powi(2).ln_1p());
                compensated_sum(head.chain([self.tail_sq(k_cut), -0.5 * quartic]))
            }
        }
    }
}

/// `E[phi(X^n_1)] = exp(-½ Σ_{k<n} log(1 + lambda_k²))` for the Gaussian bell.
pub fn gaussian_oracle(lambdas: &LambdaSequence, level: Level) -> Result<f64> {
    lambdas.check()?;
    let s = match level {
        Level::Finite(n) => compensated_sum((0..n).map(|k| lambdas.lambda(k).powi(2).ln_1p())),
        Level::Infinite => lambdas.log_tail(0),
    };
    Ok((-0.5 * s).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SharpnessRow {
    pub n: usize,
    pub phi_n: f64,
    pub phi_inf: f64,
    /// `Σ_{k ≥ n} lambda_k²`.
    pub tail: f64,
    /// `(E phi(X^n) - E phi(X^∞)) / tail`; `None` for an empty tail.
    pub weak_ratio: Option<f64>,
    /// Simulated `strong_sq` over the tail it estimates (1 without a report).
    pub strong_ratio: Option<f64>,
}

/// Weak ratios from the oracle alone; strong ratios from `report` when given.
///
/// A report compares level `n` with its reference level, so its strong ratio
/// divides by `Σ_{k=n}^{n_ref-1} lambda_k²`.
pub fn sharpness_ratios(
    lambdas: &LambdaSequence,
    levels: &[usize],
    report: Option<&ErrorReport>,
) -> Result<Vec<SharpnessRow>> {
    lambdas.check()?;
    let phi_inf = gaussian_oracle(lambdas, Level::Infinite)?;
    levels
        .iter()
        .map(|&n| {
            let phi_n = gaussian_oracle(lambdas, Level::Finite(n))?;
            let tail = lambdas.tail_sq(n);
            let weak_ratio = (tail > 0.0).then(|| {
                // E phi(X^n) - E phi(X^∞) = E phi(X^n) (1 - exp(-½ Σ_{k≥n} log(1 + x_k)))
                -phi_n * (-0.5 * lambdas.log_tail(n)).exp_m1() / tail
            });
            let strong_ratio = match report {
                None => (tail > 0.0).then_some(1.0),
                Some(r) => {
                    let row = r.rows.iter().find(|row| row.n == n);
                    let t = tail - lambdas.tail_sq(r.n_ref);
                    row.and_then(|row| (t > 0.0).then(|| row.strong_sq / t))
                }
            };
            Ok(SharpnessRow {
                n,
                phi_n,
                phi_inf,
                tail,
                weak_ratio,
                strong_ratio,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_unit_lambda() {
        let l = LambdaSequence::Explicit { values: vec![1.0] };
        let v = gaussian_oracle(&l, Level::Finite(1)).unwrap();
        assert!((v - (-0.5 * 2f64.ln()).exp()).abs() < 1e-15);
        assert!((v - 0.70710678).abs() < 1e-8);
    }

    #[test]
    fn harmonic_product_limit() {
        let l = LambdaSequence::power_law(1.0).unwrap();
        let v = gaussian_oracle(&l, Level::Infinite).unwrap();
        let pi = std::f64::consts::PI;
        assert!((v - (pi / pi.sinh()).sqrt()).abs() < 1e-13);
        // partial products to 10^6 terms agree up to the truncated tail ~ 1e-6
        let partial = gaussian_oracle(&l, Level::Finite(1_000_000)).unwrap();
        assert!((partial - v).abs() < 1e-6);
    }

    #[test]
    fn zero_lambdas_give_one() {
        let l = LambdaSequence::Explicit { values: vec![0.0; 5] };
        assert_eq!(gaussian_oracle(&l, Level::Infinite).unwrap(), 1.0);
    }

    #[test]
    fn divergent_law_rejected() {
        assert!(matches!(LambdaSequence::power_law(0.5), Err(LabError::DivergentTail(_))));
        let l = LambdaSequence::PowerLaw { q: 0.25 };
        assert!(gaussian_oracle(&l, Level::Finite(3)).is_err());
    }

    #[test]
    fn empty_tail_ratio_is_unavailable() {
        let l = LambdaSequence::Explicit { values: vec![0.5] };
        let rows = sharpness_ratios(&l, &[1, 2], None).unwrap();
        assert!(rows.iter().all(|r| r.weak_ratio.is_none() && r.strong_ratio.is_none()));
    }

    #[test]
    fn weak_ratio_at_most_half() {
        let l = LambdaSequence::power_law(1.0).unwrap();
        let levels: Vec<usize> = (1..=64).collect();
        for r in sharpness_ratios(&l, &levels, None).unwrap() {
            assert!(r.weak_ratio.unwrap() <= 0.5);
        }
    }

    #[test]
    fn log_bracket_holds_termwise() {
        for q in [0.75, 1.0, 2.0] {
            let l = LambdaSequence::power_law(q).unwrap();
            for k in 0..200 {
                let x = l.lambda(k).powi(2);
                assert!(0.5 * x.ln_1p() <= 0.5 * x);
            }
            for n in [1, 10, 100] {
                assert!(l.log_tail(n) <= l.tail_sq(n));
            }
        }
    }

    #[test]
    fn weak_ratio_approaches_half_limit() {
        let l = LambdaSequence::power_law(1.0).unwrap();
        let pi = std::f64::consts::PI;
        let limit = 0.5 * (pi / pi.sinh()).sqrt();
        let rows = sharpness_ratios(&l, &[64, 1024], None).unwrap();
        assert!((rows[0].weak_ratio.unwrap() / limit - 1.0).abs() < 0.05);
        assert!((rows[1].weak_ratio.unwrap() / limit - 1.0).abs() < 0.01);
    }
}

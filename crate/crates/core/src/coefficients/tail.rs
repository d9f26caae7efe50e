use std::fmt;

use serde::{Deserialize, Serialize};

use super::DiffusionCoefficient;
use crate::error::{LabError, Result};
use crate::special::power_tail;
use crate::spectral::InterpolationSpaceNorm;

/// `‖B e_k‖²_H = scale (k + shift)^{-exponent}` for the columns past the
/// stored ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailLaw {
    pub scale: f64,
    pub exponent: f64,
    pub shift: f64,
}

impl TailLaw {
    pub fn check(&self) -> Result<()> {
        if !(self.exponent > 1.0) {
            return Err(LabError::DivergentTail(format!(
                "column norms decay like k^-{}; the sum diverges",
                self.exponent
            )));
        }
        Ok(())
    }

    /// `Σ_{k ≥ from} scale (k + shift)^{-exponent}`.
    pub fn sum_from(&self, from: usize) -> f64 {
        if self.scale == 0.0 {
            return 0.0;
        }
        self.scale * power_tail(self.exponent, self.shift, from)
    }
}

/// Closed-form information about `sup_x Σ_{k ≥ n} ‖B(x) e_k‖²_H / (1 + ‖x‖²_V)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TailModel {
    None,
    /// State-independent columns: the supremum is the plain tail sum.
    Exact {
        column_norms_sq: Vec<f64>,
        beyond: Option<TailLaw>,
    },
    /// `B(x) e_k = <x, e_k> 1` on `(0, 1)`.
    RankOne,
    /// `constant · n^{exponent}`.
    PowerLaw { constant: f64, exponent: f64 },
    /// `prefactor · Σ_{k ≥ n} ‖Σ e_k‖²_H`.
    Scaled {
        prefactor: f64,
        column_norms_sq: Vec<f64>,
        beyond: Option<TailLaw>,
    },
}

fn column_tail(norms: &[f64], beyond: Option<&TailLaw>, from: usize, to: Option<usize>) -> f64 {
    let stored_end = to.map_or(norms.len(), |t| t.min(norms.len()));
    let stored: f64 = norms.get(from..stored_end).map_or(0.0, |s| s.iter().sum());
    let start = from.max(norms.len());
    let law = match (beyond, to) {
        (Some(l), None) => l.sum_from(start),
        (Some(l), Some(t)) if t > start => l.sum_from(start) - l.sum_from(t),
        _ => 0.0,
    };
    stored + law
}

impl TailModel {
    /// `Σ_{k ≥ n} ‖B e_k‖²` for state-independent models.
    pub fn exact_tail(&self, n: usize) -> Option<f64> {
        match self {
            Self::Exact {
                column_norms_sq,
                beyond,
            } => Some(column_tail(column_norms_sq, beyond.as_ref(), n, None)),
            _ => None,
        }
    }

    /// `Σ_{k=n}^{m-1} ‖B e_k‖²` for state-independent models.
    pub fn tail_between(&self, n: usize, m: usize) -> Option<f64> {
        match self {
            Self::Exact {
                column_norms_sq,
                beyond,
            } => Some(column_tail(column_norms_sq, beyond.as_ref(), n, Some(m.max(n)))),
            _ => None,
        }
    }
}

/// A tail bound or the marker that no closed form is known.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TailBound {
    Value(f64),
    Unavailable,
}

impl TailBound {
    pub fn value(&self) -> Option<f64> {
        match self {
            Self::Value(v) => Some(*v),
            Self::Unavailable => None,
        }
    }
}

impl fmt::Display for TailBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Value(v) => write!(f, "{v:.16e}"),
            Self::Unavailable => f.write_str("unavailable"),
        }
    }
}

/// Closed-form bound on `sup_{x ∈ V} Σ_{k ≥ n} ‖B(x) e_k‖²_H / (1 + ‖x‖²_V)`.
///
/// `v` is only consulted by the rank-one family; `None` means `V = H`.
pub fn tail_ratio_bound(
    b: &DiffusionCoefficient,
    v: Option<&InterpolationSpaceNorm>,
    n: usize,
) -> TailBound {
    match b.tail_model() {
        TailModel::None => TailBound::Unavailable,
        TailModel::Exact {
            column_norms_sq,
            beyond,
        } => TailBound::Value(column_tail(column_norms_sq, beyond.as_ref(), n, None)),
        TailModel::RankOne => {
            // sup over x of Σ_{k≥n} x_k² / (1 + Σ mu_k^{2r} x_k²) is mu_n^{-2r},
            // approached by x = lambda e_n as lambda grows
            let r = v.map_or(0.0, InterpolationSpaceNorm::exponent);
            if r == 0.0 {
                return TailBound::Value(1.0);
            }
            match v.and_then(|v| v.operator().dirichlet_theta()) {
                Some(theta) => {
                    let k = n.max(1) as f64;
                    let mu = theta * (std::f64::consts::PI * k).powi(2);
                    TailBound::Value(mu.powf(-2.0 * r))
                }
                None => TailBound::Unavailable,
            }
        }
        TailModel::PowerLaw { constant, exponent } => {
            TailBound::Value(constant * (n.max(1) as f64).powf(*exponent))
        }
        TailModel::Scaled {
            prefactor,
            column_norms_sq,
            beyond,
        } => TailBound::Value(prefactor * column_tail(column_norms_sq, beyond.as_ref(), n, None)),
    }
}

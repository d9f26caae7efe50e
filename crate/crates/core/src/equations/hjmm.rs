use serde::{Deserialize, Serialize};

use super::{EquationSpec, Propagator};
use crate::coefficients::{cumulative_trapezoid, DiffusionCoefficient, DriftCoefficient, NoArbitrageDrift, TraceScope};
use crate::error::{LabError, Result};
use crate::error_lab::NormInputs;
use crate::state::{StateLayout, StateNorm};

/// Forward-rate curve model on the maturity grid `tau_j = j tau_max / J`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HjmmParams {
    /// Volatility curves `B e_k`, each with `J + 1` grid values.
    pub rows: Vec<Vec<f64>>,
    /// Weight of the derivative norm `h(0)² + ∫ |h'|² e^{alpha tau}`.
    pub alpha: f64,
    pub tau_max: f64,
    pub intervals: usize,
    pub initial: Vec<f64>,
    pub horizon: f64,
    pub scope: TraceScope,
}

impl HjmmParams {
    pub fn spacing(&self) -> f64 {
        self.tau_max / self.intervals as f64
    }

    pub fn grid(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..=self.intervals).map(|j| j as f64 * h).collect()
    }
}

/// `b_k(tau) = a_k exp(-beta_k tau)` sampled on `grid`.
pub fn exponential_rows(amplitudes: &[f64], decays: &[f64], grid: &[f64]) -> Vec<Vec<f64>> {
    amplitudes
        .iter()
        .zip(decays)
        .map(|(a, b)| grid.iter().map(|t| a * (-b * t).exp()).collect())
        .collect()
}

/// `max_k ‖m(b_k, b_k)‖ / ‖b_k‖²` over the rows, with `m(x, y) = x ∫_0^· y`.
///
/// Used with `‖trace m(B, B) - trace m(B P_n, B P_n)‖ ≤ Σ_{k ≥ n} ‖m(b_k, b_k)‖`,
/// the estimate bounds the drift tail without knowing the operator norm of `m`.
pub fn bilinear_norm_estimate(rows: &[Vec<f64>], norm: &StateNorm, spacing: f64) -> f64 {
    rows.iter()
        .filter_map(|r| {
            let n2 = norm.norm_sq(r);
            if n2 == 0.0 {
                return None;
            }
            let integral = cumulative_trapezoid(r, spacing);
            let m: Vec<f64> = r.iter().zip(&integral).map(|(a, b)| a * b).collect();
            Some(norm.norm(&m) / n2)
        })
        .fold(0.0, f64::max)
}

pub fn make_hjmm(p: &HjmmParams) -> Result<EquationSpec> {
    if p.intervals == 0 {
        return Err(LabError::config("intervals", "the maturity grid needs at least one interval"));
    }
    if !(p.tau_max > 0.0) {
        return Err(LabError::config("tau_max", "tau_max must be positive"));
    }
    if !(p.alpha > 0.0) {
        return Err(LabError::config("alpha", "alpha must be positive"));
    }
    let h = p.spacing();
    let ratio = p.horizon / h;
    if !(p.horizon > 0.0) || (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) {
        return Err(LabError::config(
            "T",
            format!("horizon {} is not a multiple of the maturity spacing {h}", p.horizon),
        ));
    }
    let points = p.intervals + 1;
    if let Some(bad) = p.rows.iter().position(|r| r.len() != points) {
        return Err(LabError::config("rows", format!("row {bad} must have {points} grid values")));
    }
    if p.initial.len() != points {
        return Err(LabError::config("initial", format!("initial curve must have {points} grid values")));
    }
    let norm = StateNorm::Curve { alpha: p.alpha, spacing: h };
    let drift = NoArbitrageDrift::new(&p.rows, h, p.scope);
    let full_drift = norm.norm(drift.truncated_curve(p.rows.len()));
    let b = DiffusionCoefficient::additive_rows(p.rows.clone(), |r| norm.norm_sq(r));
    let hs = b.tail_model().exact_tail(0).unwrap_or(0.0).sqrt();
    // h(t)² ≤ 2 h(0)² + (2/alpha) ∫ |h'|² e^{alpha tau} for the shifted curve
    let s = (2f64).max(1.0 + 2.0 / p.alpha).sqrt();
    let x0 = norm.norm(&p.initial);
    let inputs = NormInputs {
        semigroup_h: s,
        semigroup_v: s,
        drift_c1: full_drift,
        drift_c2: full_drift,
        diffusion_c1: hs,
        diffusion_c2: hs,
        drift_lip_h: full_drift,
        diffusion_lip_h: hs,
        drift_lip_v: full_drift,
        diffusion_lip_v: hs,
        initial_h: x0,
        initial_v: x0,
    };
    Ok(EquationSpec::new(
        "hjmm",
        StateLayout::Curve { points },
        Propagator::Shift { spacing: h },
        DriftCoefficient::NoArbitrage(drift),
        b,
        p.initial.clone(),
        p.horizon,
    )?
    .with_h_norm(norm.clone())?
    .with_v_norm(norm)?
    .with_norm_inputs(Some(inputs)))
}

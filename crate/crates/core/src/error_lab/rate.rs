use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Least-squares fit `log e ≈ intercept + slope log n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub levels: Vec<usize>,
    pub errors: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    /// Root mean square of the log residuals.
    pub residual: f64,
}

/// Nonpositive or non-finite errors are dropped with a warning.
pub fn fit_rate(levels: &[usize], errors: &[f64]) -> Result<RateFit> {
    if levels.len() != errors.len() {
        return Err(LabError::InsufficientData(format!(
            "{} levels but {} errors",
            levels.len(),
            errors.len()
        )));
    }
    let mut kept_n = Vec::new();
    let mut kept_e = Vec::new();
    for (&n, &e) in levels.iter().zip(errors) {
        if e > 0.0 && e.is_finite() && n > 0 {
            kept_n.push(n);
            kept_e.push(e);
        } else {
            log::warn!("excluding level {n} from the rate fit: error value {e}");
        }
    }
    if kept_n.len() < 3 {
        return Err(LabError::InsufficientData(format!(
            "rate fit needs at least 3 positive errors, got {}",
            kept_n.len()
        )));
    }
    let xs: Vec<f64> = kept_n.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = kept_e.iter().map(|e| e.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(LabError::InsufficientData("rate fit needs distinct levels".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(RateFit {
        levels: kept_n,
        errors: kept_e,
        slope,
        intercept,
        residual: (ss / m).sqrt(),
    })
}

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{EquationSpec, Propagator};
use crate::coefficients::{
    estimate_multiplier_norm, DiffusionCoefficient, DiffusionKind, DriftCoefficient, NemytskiiFn,
    NoiseShape, PointwiseFactor, TailLaw, TailModel,
};
use crate::error::{LabError, Result};
use crate::error_lab::NormInputs;
use crate::special::hurwitz_zeta;
use crate::spectral::{Basis, Collocation, DiagonalOperator, InterpolationSpaceNorm, TransformPath};
use crate::state::{StateLayout, StateNorm};

/// Drift of the velocity equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum WaveDrift {
    Zero,
    /// `f(s, x) = f0(s) + f1(s) x`; needs `eta = 0`.
    Affine { f0: Vec<f64>, f1: PointwiseFactor },
    /// Needs `eta` in `(0, rho) ∩ (0, 1/4 - rho)`.
    Nemytskii(NemytskiiFn),
}

/// Damping-free wave equation `u'' = theta Δ u + f(u) + (b0 + b1 u) dW/dt` on
/// `(0, 1)` with Dirichlet conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveParams {
    pub theta: f64,
    pub epsilon: f64,
    pub eta: f64,
    pub drift: WaveDrift,
    pub b0: PointwiseFactor,
    pub b1: PointwiseFactor,
    /// Sobolev exponent `2 sigma` of `b1`; only range-checked.
    pub sigma: f64,
    /// Initial position and velocity coefficients, zero padded to `modes`.
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub horizon: f64,
    pub modes: usize,
    pub collocation_points: Option<usize>,
    pub transform: TransformPath,
}

impl WaveParams {
    /// Deterministic linear wave with `xi = (e_1, 0)`.
    pub fn free(theta: f64, modes: usize, horizon: f64) -> Self {
        Self {
            theta,
            epsilon: 0.5,
            eta: 0.0,
            drift: WaveDrift::Zero,
            b0: PointwiseFactor::Constant(0.0),
            b1: PointwiseFactor::Constant(0.0),
            sigma: 0.5,
            position: vec![1.0],
            velocity: vec![],
            horizon,
            modes,
            collocation_points: None,
            transform: TransformPath::Fast,
        }
    }

    pub fn rho(&self) -> f64 {
        (1.0 - self.epsilon) / 4.0
    }

    fn validate(&self) -> Result<()> {
        if self.modes == 0 {
            return Err(LabError::config("modes", "at least one mode is required"));
        }
        if !(self.theta > 0.0) {
            return Err(LabError::config("theta", "theta must be positive"));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(LabError::config("epsilon", "epsilon must lie in (0, 1)"));
        }
        if !(self.sigma > 0.25) {
            return Err(LabError::config("sigma", "sigma must exceed 1/4"));
        }
        let rho = self.rho();
        let case_b = self.eta > 0.0 && self.eta < rho.min(0.25 - rho);
        match &self.drift {
            WaveDrift::Affine { .. } if self.eta != 0.0 => {
                return Err(LabError::config("eta", "an affine drift requires eta = 0"));
            }
            WaveDrift::Nemytskii(_) if !case_b => {
                return Err(LabError::config(
                    "eta",
                    format!("a Nemytskii drift requires eta in (0, {})", rho.min(0.25 - rho)),
                ));
            }
            WaveDrift::Zero if !(self.eta == 0.0 || case_b) => {
                return Err(LabError::config(
                    "eta",
                    format!("eta must be 0 or lie in (0, {})", rho.min(0.25 - rho)),
                ));
            }
            _ => {}
        }
        let n = self.modes;
        let too_long = |v: &[f64]| v.len() > n;
        if too_long(&self.position) || too_long(&self.velocity) {
            return Err(LabError::config("initial", "more initial coefficients than modes"));
        }
        for (name, f) in [("b0", &self.b0), ("b1", &self.b1)] {
            if let PointwiseFactor::Field(v) = f {
                if v.len() != n {
                    return Err(LabError::config(name, format!("field needs {n} coefficients")));
                }
            }
        }
        if let WaveDrift::Affine { f0, f1 } = &self.drift {
            if too_long(f0) {
                return Err(LabError::config("f0", "more coefficients than modes"));
            }
            if matches!(f1, PointwiseFactor::Field(v) if v.len() != n) {
                return Err(LabError::config("f1", format!("field needs {n} coefficients")));
            }
        }
        Ok(())
    }
}

fn padded(v: &[f64], n: usize) -> Vec<f64> {
    let mut out = v.to_vec();
    out.resize(n, 0.0);
    out
}

/// `Σ_{k odd} k^{-p} = 2^{-p} zeta(p, 1/2)`.
fn odd_zeta(p: f64) -> f64 {
    2f64.powf(-p) * hurwitz_zeta(p, 0.5)
}

/// `‖1‖_{H_r}` for the Dirichlet Laplacian `-theta Δ`, `r < 1/4`.
fn unit_norm(theta: f64, r: f64) -> f64 {
    // <1, e_k>² = 8 / (k pi)² for odd k
    let mu1 = theta * PI * PI;
    (8.0 * mu1.powf(2.0 * r) / (PI * PI) * odd_zeta(2.0 - 4.0 * r)).sqrt()
}

pub fn make_wave(p: &WaveParams) -> Result<EquationSpec> {
    p.validate()?;
    let n = p.modes;
    let rho = p.rho();
    let basis = Basis::dirichlet_sine(n);
    let op = DiagonalOperator::dirichlet_laplacian(n, p.theta)?;
    let mu = op.eigenvalues().to_vec();
    let weights = |r: f64| -> Vec<f64> {
        mu.iter()
            .map(|m| m.powf(2.0 * r))
            .chain(mu.iter().map(|m| m.powf(2.0 * r - 1.0)))
            .collect()
    };
    let h_weights = weights(p.eta);
    let v_weights = weights(rho);
    let layout = StateLayout::WavePair { basis };

    let drift = match &p.drift {
        WaveDrift::Zero => DriftCoefficient::Zero,
        WaveDrift::Affine { f0, f1 } => DriftCoefficient::Affine {
            f0: padded(f0, n),
            f1: f1.clone(),
        },
        WaveDrift::Nemytskii(f) => DriftCoefficient::Nemytskii(*f),
    };

    let kind = DiffusionKind::PointwiseAffine {
        b0: p.b0.clone(),
        b1: p.b1.clone(),
        shape: NoiseShape::Identity { offset: 1 },
    };
    let mu1 = p.theta * PI * PI;
    let tail = match (&p.b0, &p.b1) {
        // column k carries e_k into velocity coordinate k - 1
        (PointwiseFactor::Constant(c), b1) if b1.is_zero() => TailModel::Exact {
            column_norms_sq: std::iter::once(0.0)
                .chain(h_weights[n..].iter().map(|w| c * c * w))
                .collect(),
            beyond: Some(TailLaw {
                scale: c * c * mu1.powf(2.0 * p.eta - 1.0),
                exponent: 2.0 - 4.0 * p.eta,
                shift: 0.0,
            }),
        },
        (PointwiseFactor::Constant(c0), PointwiseFactor::Constant(c1)) => {
            let y_modes = n.min(16);
            let m = estimate_multiplier_norm(p.theta, p.eta - 0.5, rho, rho, y_modes, 256)?;
            let lip = c0.abs() * unit_norm(p.theta, rho) + c1.abs();
            TailModel::PowerLaw {
                constant: mu1.powf(-2.0 * rho) * m * m * lip * lip,
                exponent: p.epsilon - 1.0,
            }
        }
        _ => TailModel::None,
    };
    let diffusion = DiffusionCoefficient::new(kind, tail);

    let needs_grid = !p.b1.is_zero()
        || matches!(p.b0, PointwiseFactor::Field(_))
        || matches!(&p.drift, WaveDrift::Nemytskii(_))
        || matches!(&p.drift, WaveDrift::Affine { f1: PointwiseFactor::Field(_), .. });
    let grid = if needs_grid {
        Some(match p.collocation_points {
            Some(g) => Collocation::with_size(&basis, g, p.transform)?,
            None => Collocation::for_basis(&basis, p.transform)?,
        })
    } else {
        None
    };

    let mut initial = padded(&p.position, n);
    initial.extend(padded(&p.velocity, n));

    let h_norm = StateNorm::Weighted(h_weights);
    let v_norm = StateNorm::Weighted(v_weights);
    let inputs = wave_norm_inputs(p, &h_norm, &v_norm, &initial);
    let omega = mu.iter().map(|m| m.sqrt()).collect();
    Ok(EquationSpec::new("wave", layout, Propagator::Wave { omega }, drift, diffusion, initial, p.horizon)?
        .with_h_norm(h_norm)?
        .with_v_norm(v_norm)?
        .with_v_space(Some(InterpolationSpaceNorm::new(op, rho)?))
        .with_collocation(grid)
        .with_norm_inputs(inputs))
}

/// Closed-form norms for `eta = 0`, constant `f1`, `b0`, `b1`.
fn wave_norm_inputs(
    p: &WaveParams,
    h_norm: &StateNorm,
    v_norm: &StateNorm,
    initial: &[f64],
) -> Option<NormInputs> {
    if p.eta != 0.0 {
        return None;
    }
    let (f0, f1) = match &p.drift {
        WaveDrift::Zero => (Vec::new(), 0.0),
        WaveDrift::Affine {
            f0,
            f1: PointwiseFactor::Constant(c),
        } => (f0.clone(), *c),
        _ => return None,
    };
    let (PointwiseFactor::Constant(b0), PointwiseFactor::Constant(b1)) = (&p.b0, &p.b1) else {
        return None;
    };
    let theta = p.theta;
    let rho = p.rho();
    let mu1 = theta * PI * PI;
    let mu = |k: usize| theta * (k as f64 * PI).powi(2);
    let f0_norm = |r: f64| -> f64 {
        f0.iter()
            .enumerate()
            .map(|(i, c)| mu(i + 1).powf(2.0 * r) * c * c)
            .sum::<f64>()
            .sqrt()
    };
    let drift_h = f0_norm(-0.5) + mu1.powf(-0.5) * f1.abs();
    let drift_v = f0_norm(rho - 0.5) + mu1.powf(-0.5) * f1.abs();
    // Σ_k mu_k^{-1} = 1/(6 theta); |e_m| ≤ sqrt2 bounds the derivative
    let diff_h = b0.abs() / (6.0 * theta).sqrt() + b1.abs() / (3.0 * theta).sqrt();
    let s_v = mu1.powf(2.0 * rho - 1.0) * hurwitz_zeta(2.0 - 4.0 * rho, 1.0);
    let diff_v = b0.abs() * s_v.sqrt() + b1.abs() * (2.0 * s_v).sqrt() * mu1.powf(-rho);
    Some(NormInputs {
        semigroup_h: 1.0,
        semigroup_v: 1.0,
        drift_c1: drift_h,
        drift_c2: drift_h,
        diffusion_c1: diff_h,
        diffusion_c2: diff_h,
        drift_lip_h: drift_h,
        diffusion_lip_h: diff_h,
        drift_lip_v: drift_v,
        diffusion_lip_v: diff_v,
        initial_h: h_norm.norm(initial),
        initial_v: v_norm.norm(initial),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::SpectralField;

    #[test]
    fn unit_norm_matches_coefficients() {
        let (theta, r) = (1.3, 0.1);
        let one = SpectralField::constant_one(Basis::dirichlet_sine(200_000));
        let brute: f64 = one
            .coefficients()
            .iter()
            .enumerate()
            .map(|(i, c)| (theta * ((i + 1) as f64 * PI).powi(2)).powf(2.0 * r) * c * c)
            .sum();
        // the truncated sum misses a tail of order K^{4r - 1}
        assert!((unit_norm(theta, r).powi(2) - brute).abs() < 1e-3 * brute);
        assert!((unit_norm(theta, 0.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn constraints_are_named() {
        let mut p = WaveParams::free(1.0, 8, 1.0);
        p.epsilon = 1.0;
        assert!(matches!(make_wave(&p), Err(LabError::Config { field, .. }) if field == "epsilon"));
        let mut p = WaveParams::free(1.0, 8, 1.0);
        p.drift = WaveDrift::Nemytskii(NemytskiiFn::Sine { amplitude: 1.0, frequency: 1.0 });
        assert!(matches!(make_wave(&p), Err(LabError::Config { field, .. }) if field == "eta"));
        p.eta = 0.05;
        assert!(make_wave(&p).is_ok());
        let mut p = WaveParams::free(1.0, 8, 1.0);
        p.sigma = 0.25;
        assert!(matches!(make_wave(&p), Err(LabError::Config { field, .. }) if field == "sigma"));
        let mut p = WaveParams::free(1.0, 8, 1.0);
        p.eta = 0.01;
        p.drift = WaveDrift::Affine { f0: vec![], f1: PointwiseFactor::Constant(1.0) };
        assert!(matches!(make_wave(&p), Err(LabError::Config { field, .. }) if field == "eta"));
    }

    #[test]
    fn additive_tail_is_zeta() {
        let mut p = WaveParams::free(1.0, 64, 1.0);
        p.b0 = PointwiseFactor::Constant(1.0);
        let spec = make_wave(&p).unwrap();
        let tail = spec.tail_bound(16).value().unwrap();
        assert!((tail - 0.006_534_586_471_988_771).abs() < 1e-15);
        assert_eq!(spec.reference_bias(65).unwrap() > 0.0, true);
    }

    #[test]
    fn multiplicative_tail_decays_like_n_to_eps_minus_one() {
        let mut p = WaveParams::free(1.0, 32, 1.0);
        p.b0 = PointwiseFactor::Constant(1.0);
        p.b1 = PointwiseFactor::Constant(0.5);
        let spec = make_wave(&p).unwrap();
        let a = spec.tail_bound(8).value().unwrap();
        let b = spec.tail_bound(32).value().unwrap();
        assert!(((a / b).ln() / 4f64.ln() - 0.5).abs() < 1e-12);
        assert!(spec.collocation().is_some());
        assert!(spec.norm_inputs().is_some());
    }
}

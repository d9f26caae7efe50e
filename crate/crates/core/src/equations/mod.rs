//! Model equations: a state layout, its norms, an exact propagator and the
//! drift and diffusion coefficients, bundled as an [`EquationSpec`].

mod fourier;
mod hjmm;
mod propagator;
mod wave;

use serde::{Deserialize, Serialize};

use crate::coefficients::{
    tail_ratio_bound, DiffusionCoefficient, DriftCoefficient, TailBound, TailLaw,
};
use crate::error::{LabError, Result};
use crate::error_lab::NormInputs;
use crate::spectral::{Basis, Collocation, InterpolationSpaceNorm};
use crate::state::{StateLayout, StateNorm};

pub use fourier::{make_airy, make_schrodinger, FourierParams, SigmaRows};
pub use hjmm::{bilinear_norm_estimate, exponential_rows, make_hjmm, HjmmParams};
pub use propagator::{PreparedPropagator, Propagator};
pub use wave::{make_wave, WaveDrift, WaveParams};

#[derive(Debug, Clone)]
pub struct EquationSpec {
    name: String,
    layout: StateLayout,
    h_norm: StateNorm,
    v_norm: StateNorm,
    v_space: Option<InterpolationSpaceNorm>,
    propagator: Propagator,
    drift: DriftCoefficient,
    diffusion: DiffusionCoefficient,
    collocation: Option<Collocation>,
    initial: Vec<f64>,
    horizon: f64,
    rotate_minus_i: bool,
    norm_inputs: Option<NormInputs>,
}

fn check_norm(norm: &StateNorm, layout: &StateLayout, field: &str) -> Result<()> {
    if let StateNorm::Weighted(w) = norm {
        if w.len() != layout.len() {
            return Err(LabError::config(
                field,
                format!("{} weights for a state of length {}", w.len(), layout.len()),
            ));
        }
    }
    Ok(())
}

impl EquationSpec {
    /// Spec with unweighted `H = V` norms, no collocation grid and no `-i`.
    pub fn new(
        name: impl Into<String>,
        layout: StateLayout,
        propagator: Propagator,
        drift: DriftCoefficient,
        diffusion: DiffusionCoefficient,
        initial: Vec<f64>,
        horizon: f64,
    ) -> Result<Self> {
        if initial.len() != layout.len() {
            return Err(LabError::config(
                "initial",
                format!("initial state has {} entries, layout needs {}", initial.len(), layout.len()),
            ));
        }
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(LabError::config("T", format!("horizon must be positive, got {horizon}")));
        }
        let norm = StateNorm::unweighted(layout.len());
        Ok(Self {
            name: name.into(),
            layout,
            h_norm: norm.clone(),
            v_norm: norm,
            v_space: None,
            propagator,
            drift,
            diffusion,
            collocation: None,
            initial,
            horizon,
            rotate_minus_i: false,
            norm_inputs: None,
        })
    }

    pub fn with_h_norm(mut self, norm: StateNorm) -> Result<Self> {
        check_norm(&norm, &self.layout, "h_norm")?;
        self.h_norm = norm;
        Ok(self)
    }

    pub fn with_v_norm(mut self, norm: StateNorm) -> Result<Self> {
        check_norm(&norm, &self.layout, "v_norm")?;
        self.v_norm = norm;
        Ok(self)
    }

    pub fn with_v_space(mut self, space: Option<InterpolationSpaceNorm>) -> Self {
        self.v_space = space;
        self
    }

    pub fn with_collocation(mut self, grid: Option<Collocation>) -> Self {
        self.collocation = grid;
        self
    }

    pub fn with_minus_i(mut self, on: bool) -> Self {
        self.rotate_minus_i = on;
        self
    }

    pub fn with_norm_inputs(mut self, inputs: Option<NormInputs>) -> Self {
        self.norm_inputs = inputs;
        self
    }

    pub fn with_drift(mut self, drift: DriftCoefficient) -> Self {
        self.drift = drift;
        self
    }

    pub fn with_diffusion(mut self, diffusion: DiffusionCoefficient) -> Self {
        self.diffusion = diffusion;
        self
    }

    pub fn with_initial(mut self, initial: Vec<f64>) -> Result<Self> {
        if initial.len() != self.layout.len() {
            return Err(LabError::config("initial", "initial state length does not match the layout"));
        }
        self.initial = initial;
        Ok(self)
    }

    pub fn with_horizon(mut self, horizon: f64) -> Result<Self> {
        if !(horizon > 0.0) {
            return Err(LabError::config("T", format!("horizon must be positive, got {horizon}")));
        }
        self.horizon = horizon;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn layout(&self) -> &StateLayout {
        &self.layout
    }

    pub fn h_norm(&self) -> &StateNorm {
        &self.h_norm
    }

    pub fn v_norm(&self) -> &StateNorm {
        &self.v_norm
    }

    pub fn v_space(&self) -> Option<&InterpolationSpaceNorm> {
        self.v_space.as_ref()
    }

    pub fn propagator(&self) -> &Propagator {
        &self.propagator
    }

    pub fn drift(&self) -> &DriftCoefficient {
        &self.drift
    }

    pub fn diffusion(&self) -> &DiffusionCoefficient {
        &self.diffusion
    }

    pub fn collocation(&self) -> Option<&Collocation> {
        self.collocation.as_ref()
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Whether drift and noise increments are multiplied by `-i`.
    pub fn rotates_minus_i(&self) -> bool {
        self.rotate_minus_i
    }

    pub fn norm_inputs(&self) -> Option<&NormInputs> {
        self.norm_inputs.as_ref()
    }

    /// `sup_{x ∈ V} Σ_{k ≥ n} ‖B(x) e_k‖²_H / (1 + ‖x‖²_V)` where known.
    pub fn tail_bound(&self, n: usize) -> TailBound {
        tail_ratio_bound(&self.diffusion, self.v_space.as_ref(), n)
    }

    /// `Σ_{k ≥ n_ref} ‖B e_k‖²_H` for state-independent noise.
    pub fn reference_bias(&self, n_ref: usize) -> Option<f64> {
        self.diffusion.tail_model().exact_tail(n_ref)
    }

    /// `Σ_{k=n}^{n_ref - 1} ‖B e_k‖²_H` for state-independent noise.
    pub fn truncated_tail(&self, n: usize, n_ref: usize) -> Option<f64> {
        self.diffusion.tail_model().tail_between(n, n_ref)
    }
}

/// Parameters of the drift-free additive model `X_t = B W_t`, `B e_k = lambda_k f_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalParams {
    pub lambdas: Vec<f64>,
    /// Law of `lambda_k²` past the stored entries.
    pub beyond: Option<TailLaw>,
    pub horizon: f64,
}

impl DiagonalParams {
    /// `lambda_k = (k + 1)^{-q}` for `k < modes`, with the matching tail law.
    pub fn power_law(q: f64, modes: usize, horizon: f64) -> Result<Self> {
        let law = TailLaw {
            scale: 1.0,
            exponent: 2.0 * q,
            shift: 1.0,
        };
        law.check()?;
        Ok(Self {
            lambdas: (0..modes).map(|k| ((k + 1) as f64).powf(-q)).collect(),
            beyond: Some(law),
            horizon,
        })
    }
}

pub fn make_diagonal(p: &DiagonalParams) -> Result<EquationSpec> {
    let n = p.lambdas.len();
    if n == 0 {
        return Err(LabError::config("lambdas", "at least one mode is required"));
    }
    let layout = StateLayout::Real {
        basis: Basis::dirichlet_sine(n),
    };
    let b = DiffusionCoefficient::additive_diagonal(p.lambdas.clone(), 0, &vec![1.0; n], p.beyond)?;
    let hs = b
        .tail_model()
        .exact_tail(0)
        .expect("additive noise has an exact tail")
        .sqrt();
    let inputs = NormInputs {
        diffusion_c1: hs,
        diffusion_c2: hs,
        diffusion_lip_h: hs,
        diffusion_lip_v: hs,
        ..NormInputs::trivial(1.0)
    };
    Ok(EquationSpec::new(
        "diagonal",
        layout,
        Propagator::Identity,
        DriftCoefficient::Zero,
        b,
        vec![0.0; n],
        p.horizon,
    )?
    .with_norm_inputs(Some(inputs)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_tail_and_bias() {
        let spec = make_diagonal(&DiagonalParams::power_law(1.0, 64, 1.0).unwrap()).unwrap();
        let t = spec.truncated_tail(16, 64).unwrap();
        let brute: f64 = (16..64).map(|k| ((k + 1) as f64).powi(-2)).sum();
        assert!((t - brute).abs() < 1e-15);
        let bias = spec.reference_bias(64).unwrap();
        let expect = crate::special::hurwitz_zeta(2.0, 65.0);
        assert!((bias - expect).abs() < 1e-15);
        assert_eq!(spec.tail_bound(16).value(), Some(t + bias));
    }

    #[test]
    fn divergent_power_law_rejected() {
        assert!(matches!(
            DiagonalParams::power_law(0.5, 8, 1.0),
            Err(LabError::DivergentTail(_))
        ));
    }

    #[test]
    fn initial_length_checked() {
        let layout = StateLayout::Real { basis: Basis::dirichlet_sine(3) };
        let b = DiffusionCoefficient::additive_diagonal(vec![], 0, &[], None).unwrap();
        let err = EquationSpec::new("x", layout, Propagator::Identity, DriftCoefficient::Zero, b, vec![0.0; 2], 1.0);
        assert!(matches!(err, Err(LabError::Config { .. })));
    }
}

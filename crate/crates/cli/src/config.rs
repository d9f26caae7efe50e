//! TOML experiment files.
//!
//! ```toml
//! [experiment]
//! seed = 7
//! paths = 256
//! steps = 64
//! n_ref = 128
//! levels = [4, 8, 16, 32]
//!
//! [equation]
//! kind = "wave"
//! modes = 128
//! b0 = 1.0
//! ```

use serde::{Deserialize, Serialize};

use spde_lab_core::coefficients::{PointwiseFactor, TraceScope};
use spde_lab_core::equations::{
    exponential_rows, make_airy, make_diagonal, make_hjmm, make_schrodinger, make_wave,
    DiagonalParams, FourierParams, HjmmParams, SigmaRows, WaveDrift, WaveParams,
};
use spde_lab_core::error_lab::TestFunctional;
use spde_lab_core::spectral::TransformPath;
use spde_lab_core::{EquationSpec, LabError};

use crate::CliError;

pub const DEFAULT_BUDGET: f64 = 4e9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub equation: EquationConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Experiment {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub paths: usize,
    pub steps: usize,
    pub n_ref: usize,
    pub levels: Vec<usize>,
    #[serde(default)]
    pub functional: FunctionalKind,
    /// Allow levels above `n_ref / 4`.
    #[serde(default)]
    pub allow_coarse_reference: bool,
    /// Refuse runs with `n_ref * steps * paths` above this.
    #[serde(default = "default_budget")]
    pub budget: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collocation_points: Option<usize>,
}

fn default_budget() -> f64 {
    DEFAULT_BUDGET
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionalKind {
    #[default]
    GaussianBell,
    /// `sin(<x, e_0>)` with the first state coordinate.
    SmoothLinear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EquationConfig {
    Wave(WaveConfig),
    Schrodinger(FourierConfig),
    Airy(FourierConfig),
    Hjmm(HjmmConfig),
    Diagonal(DiagonalConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveConfig {
    pub modes: usize,
    #[serde(default = "one")]
    pub theta: f64,
    #[serde(default = "half")]
    pub epsilon: f64,
    #[serde(default = "half")]
    pub sigma: f64,
    #[serde(default)]
    pub eta: f64,
    #[serde(default)]
    pub b0: f64,
    #[serde(default)]
    pub b1: f64,
    #[serde(default)]
    pub f0: Vec<f64>,
    #[serde(default)]
    pub f1: f64,
    #[serde(default = "unit_vec")]
    pub position: Vec<f64>,
    #[serde(default)]
    pub velocity: Vec<f64>,
    #[serde(default = "one")]
    pub horizon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierConfig {
    pub half_length: f64,
    pub cutoff: usize,
    #[serde(default = "one")]
    pub sigma_scale: f64,
    #[serde(default = "one")]
    pub sigma_decay: f64,
    #[serde(default)]
    pub b0: f64,
    #[serde(default)]
    pub b1: f64,
    #[serde(default)]
    pub f1: f64,
    #[serde(default = "one")]
    pub r: f64,
    #[serde(default = "unit_vec")]
    pub initial: Vec<f64>,
    #[serde(default = "one")]
    pub horizon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HjmmConfig {
    pub amplitudes: Vec<f64>,
    pub decays: Vec<f64>,
    #[serde(default = "one")]
    pub alpha: f64,
    pub tau_max: f64,
    pub intervals: usize,
    /// Flat initial forward curve.
    pub initial_rate: f64,
    #[serde(default = "one")]
    pub horizon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagonalConfig {
    /// `lambda_k = (k + 1)^{-q}`.
    pub q: f64,
    pub modes: usize,
    #[serde(default = "one")]
    pub horizon: f64,
}

fn one() -> f64 {
    1.0
}

fn half() -> f64 {
    0.5
}

fn unit_vec() -> Vec<f64> {
    vec![1.0]
}

/// 1-based line of the first `key = ...` assignment in `text`.
pub fn line_of(text: &str, key: &str) -> Option<usize> {
    text.lines().position(|l| {
        l.trim_start()
            .strip_prefix(key)
            .is_some_and(|rest| rest.trim_start().starts_with('='))
    })
    .map(|i| i + 1)
}

fn config_error(text: &str, key: &str, message: impl std::fmt::Display) -> CliError {
    let at = line_of(text, key).map_or(String::new(), |l| format!(" at line {l}"));
    CliError::Config(format!("field `{key}`{at}: {message}"))
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| {
            let at = e.span().map_or(String::new(), |s| {
                format!(" at line {}", text[..s.start].matches('\n').count() + 1)
            });
            CliError::Config(format!("invalid config{at}: {}", e.message()))
        })?;
        cfg.validate(text)?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configs serialize")
    }

    fn validate(&self, text: &str) -> Result<(), CliError> {
        let e = &self.experiment;
        if e.paths < 2 {
            return Err(config_error(text, "paths", "at least 2 paths are needed"));
        }
        if e.steps == 0 {
            return Err(config_error(text, "steps", "at least one time step is needed"));
        }
        if e.n_ref == 0 {
            return Err(config_error(text, "n_ref", "the reference level must be positive"));
        }
        if e.levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(config_error(text, "levels", "levels must be strictly increasing"));
        }
        if let Some(&bad) = e.levels.iter().find(|&&n| n == 0 || n > e.n_ref) {
            return Err(config_error(
                text,
                "levels",
                format!("level {bad} lies outside [1, n_ref = {}]", e.n_ref),
            ));
        }
        if !e.allow_coarse_reference {
            if let Some(&bad) = e.levels.iter().find(|&&n| 4 * n > e.n_ref) {
                return Err(config_error(
                    text,
                    "levels",
                    format!(
                        "level {bad} exceeds n_ref / 4 = {}; set allow_coarse_reference = true to accept the reference bias",
                        e.n_ref / 4
                    ),
                ));
            }
        }
        if !(e.budget > 0.0) {
            return Err(config_error(text, "budget", "the budget must be positive"));
        }
        self.build_spec().map_err(|err| match err {
            LabError::Config { field, message } => {
                let key = if field == "T" { "horizon".to_string() } else { field };
                config_error(text, &key, message)
            }
            other => CliError::Config(other.to_string()),
        })?;
        Ok(())
    }

    /// `n_ref · steps · paths`.
    pub fn cost(&self) -> f64 {
        let e = &self.experiment;
        e.n_ref as f64 * e.steps as f64 * e.paths as f64
    }

    pub fn functional(&self, spec: &EquationSpec) -> TestFunctional {
        match self.experiment.functional {
            FunctionalKind::GaussianBell => TestFunctional::GaussianBell,
            FunctionalKind::SmoothLinear => {
                let mut psi = vec![0.0; spec.layout().len()];
                psi[0] = 1.0;
                TestFunctional::SmoothLinear { psi }
            }
        }
    }

    pub fn build_spec(&self) -> spde_lab_core::Result<EquationSpec> {
        match &self.equation {
            EquationConfig::Wave(w) => {
                let drift = if w.f1 == 0.0 && w.f0.iter().all(|&v| v == 0.0) {
                    WaveDrift::Zero
                } else {
                    WaveDrift::Affine {
                        f0: w.f0.clone(),
                        f1: PointwiseFactor::Constant(w.f1),
                    }
                };
                make_wave(&WaveParams {
                    theta: w.theta,
                    epsilon: w.epsilon,
                    eta: w.eta,
                    drift,
                    b0: PointwiseFactor::Constant(w.b0),
                    b1: PointwiseFactor::Constant(w.b1),
                    sigma: w.sigma,
                    position: w.position.clone(),
                    velocity: w.velocity.clone(),
                    horizon: w.horizon,
                    modes: w.modes,
                    collocation_points: self.experiment.collocation_points,
                    transform: TransformPath::Fast,
                })
            }
            EquationConfig::Schrodinger(f) => make_schrodinger(&fourier_params(f, self)),
            EquationConfig::Airy(f) => make_airy(&fourier_params(f, self)),
            EquationConfig::Hjmm(h) => {
                if h.amplitudes.len() != h.decays.len() {
                    return Err(LabError::Config {
                        field: "decays".into(),
                        message: "needs one decay per amplitude".into(),
                    });
                }
                let mut p = HjmmParams {
                    rows: vec![],
                    alpha: h.alpha,
                    tau_max: h.tau_max,
                    intervals: h.intervals,
                    initial: vec![h.initial_rate; h.intervals + 1],
                    horizon: h.horizon,
                    scope: TraceScope::Truncated,
                };
                p.rows = exponential_rows(&h.amplitudes, &h.decays, &p.grid());
                make_hjmm(&p)
            }
            EquationConfig::Diagonal(d) => {
                make_diagonal(&DiagonalParams::power_law(d.q, d.modes, d.horizon)?)
            }
        }
    }
}

fn fourier_params(f: &FourierConfig, cfg: &ExperimentConfig) -> FourierParams {
    FourierParams {
        half_length: f.half_length,
        cutoff: f.cutoff,
        f0: vec![],
        f1: f.f1,
        b0: PointwiseFactor::Constant(f.b0),
        b1: f.b1,
        sigma: SigmaRows::Diagonal {
            scale: f.sigma_scale,
            decay: f.sigma_decay,
        },
        r: f.r,
        initial: f.initial.clone(),
        horizon: f.horizon,
        collocation_points: cfg.experiment.collocation_points,
    }
}

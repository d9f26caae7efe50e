//! Truncated cylindrical Wiener increments with per-path substreams.
//!
//! Gaussians come from `rand_distr::StandardNormal` (ziggurat) over a
//! `ChaCha8Rng` seeded with the experiment seed; the path index selects the
//! ChaCha stream, so every path owns an independent, reproducible block.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Uniform time grid `t_m = m T / M`, `m = 0..=M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    steps: usize,
    horizon: f64,
}

impl TimeGrid {
    pub fn uniform(horizon: f64, steps: usize) -> Result<Self> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(LabError::config("T", format!("horizon must be positive, got {horizon}")));
        }
        Ok(Self { steps, horizon })
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn step_size(&self) -> f64 {
        if self.steps == 0 {
            0.0
        } else {
            self.horizon / self.steps as f64
        }
    }

    pub fn time(&self, m: usize) -> f64 {
        self.horizon * m as f64 / self.steps as f64
    }
}

/// Which increments to draw: `M × n_ref` normals for one path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoisePlan {
    pub mode_count_ref: usize,
    pub time_grid: TimeGrid,
    pub seed: u64,
    pub path_index: u64,
}

impl NoisePlan {
    pub fn new(mode_count_ref: usize, time_grid: TimeGrid, seed: u64, path_index: u64) -> Self {
        Self {
            mode_count_ref,
            time_grid,
            seed,
            path_index,
        }
    }

    /// Same plan for another path.
    pub fn with_path(&self, path_index: u64) -> Self {
        Self { path_index, ..*self }
    }
}

/// Row-major `M × n` block of Brownian increments; entry `(m, k)` drives
/// noise column `k` over `[t_m, t_{m+1}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct IncrementBlock {
    steps: usize,
    modes: usize,
    step_size: f64,
    data: Vec<f64>,
}

impl IncrementBlock {
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn step_size(&self) -> f64 {
        self.step_size
    }

    pub fn row(&self, m: usize) -> &[f64] {
        &self.data[m * self.modes..(m + 1) * self.modes]
    }

    pub fn entries(&self) -> &[f64] {
        &self.data
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }
}

pub fn generate_increments(plan: &NoisePlan) -> IncrementBlock {
    let steps = plan.time_grid.steps();
    let modes = plan.mode_count_ref;
    let h = plan.time_grid.step_size();
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    rng.set_stream(plan.path_index);
    let scale = h.sqrt();
    let data = (0..steps * modes)
        .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
        .collect();
    IncrementBlock {
        steps,
        modes,
        step_size: h,
        data,
    }
}

/// Keeps the first `n` noise columns (the projection `P_n`).
pub fn truncate(block: &IncrementBlock, n: usize) -> Result<IncrementBlock> {
    if n == 0 {
        return Err(LabError::Domain("truncation level must be at least 1".into()));
    }
    if n > block.modes {
        return Err(LabError::ReferenceTooCoarse {
            requested: n,
            available: block.modes,
        });
    }
    let mut data = Vec::with_capacity(block.steps * n);
    for m in 0..block.steps {
        data.extend_from_slice(&block.row(m)[..n]);
    }
    Ok(IncrementBlock {
        steps: block.steps,
        modes: n,
        step_size: block.step_size,
        data,
    })
}

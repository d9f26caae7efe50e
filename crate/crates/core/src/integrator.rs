//! Exponential Euler stepping `x <- S_h (x + h F(x) + B(x) P_n dW)`.

use serde::{Deserialize, Serialize};

use crate::coefficients::CoefficientScratch;
use crate::equations::{EquationSpec, PreparedPropagator};
use crate::error::{LabError, Result};
use crate::noise::{generate_increments, IncrementBlock, NoisePlan};
use crate::spectral::{Collocation, TransformPath};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepperConfig {
    pub steps: usize,
    pub record_path: bool,
    /// Overrides the equation's collocation grid size when set.
    pub collocation_points: Option<usize>,
}

impl StepperConfig {
    pub fn new(steps: usize) -> Self {
        Self {
            steps,
            record_path: false,
            collocation_points: None,
        }
    }
}

/// States at `t_0, …, t_M` (only the last one unless paths are recorded).
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn terminal(&self) -> &[f64] {
        self.states.last().expect("trajectories hold at least one state")
    }
}

/// Reusable per-thread state for stepping one spec at a fixed step size.
pub struct Stepper<'a> {
    spec: &'a EquationSpec,
    grid: Option<Collocation>,
    prepared: PreparedPropagator,
    scratch: CoefficientScratch,
    increment: Vec<f64>,
    h: f64,
}

impl<'a> Stepper<'a> {
    pub fn new(spec: &'a EquationSpec, h: f64, collocation_points: Option<usize>) -> Result<Self> {
        if !(h > 0.0) {
            return Err(LabError::config("steps", format!("step size must be positive, got {h}")));
        }
        let grid = match (collocation_points, spec.collocation(), spec.layout().basis()) {
            (Some(points), Some(g), Some(basis)) => {
                let path = match g {
                    Collocation::Sine(s) => s.path(),
                    Collocation::Fourier(_) => TransformPath::Direct,
                };
                Some(Collocation::with_size(&basis, points, path)?)
            }
            (_, g, _) => g.cloned(),
        };
        let target = spec.layout().target_range().len();
        Ok(Self {
            spec,
            scratch: CoefficientScratch::for_grid(grid.as_ref(), target),
            grid,
            prepared: spec.propagator().prepare(h)?,
            increment: vec![0.0; target],
            h,
        })
    }

    /// One step at noise level `n` with increments `dw` (already scaled by `sqrt h`).
    pub fn advance(&mut self, x: &mut [f64], dw: &[f64], n: usize) -> Result<()> {
        let spec = self.spec;
        let layout = spec.layout();
        let grid = self.grid.as_ref();
        self.increment.iter_mut().for_each(|v| *v = 0.0);
        spec.drift()
            .accumulate(layout, grid, x, n, self.h, &mut self.increment, &mut self.scratch)?;
        spec.diffusion()
            .accumulate(layout, grid, x, dw, n, &mut self.increment, &mut self.scratch)?;
        if spec.rotates_minus_i() {
            // -i (a + ib) = b - ia
            for z in self.increment.chunks_exact_mut(2) {
                let (a, b) = (z[0], z[1]);
                z[0] = b;
                z[1] = -a;
            }
        }
        x[layout.target_range()]
            .iter_mut()
            .zip(&self.increment)
            .for_each(|(v, d)| *v += d);
        self.prepared.apply(x);
        Ok(())
    }
}

/// `S_h (x + h F(x) + B(x) P_n dW)`.
pub fn step(spec: &EquationSpec, x: &[f64], dw: &[f64], n: usize, h: f64) -> Result<Vec<f64>> {
    let mut out = x.to_vec();
    Stepper::new(spec, h, None)?.advance(&mut out, dw, n)?;
    Ok(out)
}

fn check_block(spec: &EquationSpec, block: &IncrementBlock, n: usize, cfg: &StepperConfig) -> Result<()> {
    if cfg.steps == 0 {
        return Err(LabError::config("steps", "at least one time step is required"));
    }
    if block.steps() != cfg.steps {
        return Err(LabError::config(
            "steps",
            format!("noise block has {} steps, configuration asks for {}", block.steps(), cfg.steps),
        ));
    }
    let h = spec.horizon() / cfg.steps as f64;
    if (block.step_size() - h).abs() > 1e-12 * h {
        return Err(LabError::config(
            "T",
            format!("noise horizon {} does not match the equation horizon {}", block.step_size() * cfg.steps as f64, spec.horizon()),
        ));
    }
    if n == 0 {
        return Err(LabError::Domain("truncation level must be at least 1".into()));
    }
    if n > block.modes() {
        return Err(LabError::ReferenceTooCoarse {
            requested: n,
            available: block.modes(),
        });
    }
    Ok(())
}

/// Runs the scheme driven by the first `n` columns of `block`.
pub fn simulate_with_block(
    spec: &EquationSpec,
    block: &IncrementBlock,
    n: usize,
    cfg: &StepperConfig,
) -> Result<Trajectory> {
    Ok(simulate_levels(spec, block, &[n], cfg)?.pop().expect("one level requested"))
}

/// Runs every level in `levels` on the same increments.
pub fn simulate_levels(
    spec: &EquationSpec,
    block: &IncrementBlock,
    levels: &[usize],
    cfg: &StepperConfig,
) -> Result<Vec<Trajectory>> {
    for &n in levels {
        check_block(spec, block, n, cfg)?;
    }
    let h = spec.horizon() / cfg.steps as f64;
    let mut stepper = Stepper::new(spec, h, cfg.collocation_points)?;
    let grid = crate::noise::TimeGrid::uniform(spec.horizon(), cfg.steps)?;
    levels
        .iter()
        .map(|&n| {
            let mut x = spec.initial().to_vec();
            let mut times = vec![0.0];
            let mut states = Vec::new();
            if cfg.record_path {
                states.push(x.clone());
            }
            for m in 0..cfg.steps {
                stepper.advance(&mut x, block.row(m), n)?;
                if cfg.record_path {
                    times.push(grid.time(m + 1));
                    states.push(x.clone());
                }
            }
            if !cfg.record_path {
                times = vec![spec.horizon()];
                states.push(x);
            }
            Ok(Trajectory { times, states })
        })
        .collect()
}

/// Terminal state `X^n_T` for the path described by `plan`.
pub fn simulate_terminal(
    spec: &EquationSpec,
    plan: &NoisePlan,
    n: usize,
    cfg: &StepperConfig,
) -> Result<Vec<f64>> {
    let horizon = plan.time_grid.horizon();
    if (horizon - spec.horizon()).abs() > 1e-12 * spec.horizon() {
        return Err(LabError::config(
            "T",
            format!("plan horizon {horizon} does not match the equation horizon {}", spec.horizon()),
        ));
    }
    let block = generate_increments(plan);
    let cfg = StepperConfig {
        record_path: false,
        ..*cfg
    };
    Ok(simulate_with_block(spec, &block, n, &cfg)?.states.pop().expect("terminal state"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{DiffusionCoefficient, DriftCoefficient, PointwiseFactor};
    use crate::equations::{make_wave, Propagator, WaveParams};
    use crate::noise::TimeGrid;
    use crate::spectral::Basis;
    use crate::state::StateLayout;

    #[test]
    fn forward_euler_on_linear_growth() {
        let layout = StateLayout::Real { basis: Basis::dirichlet_sine(1) };
        let drift = DriftCoefficient::Affine { f0: vec![0.0], f1: PointwiseFactor::Constant(1.0) };
        let b = DiffusionCoefficient::additive_diagonal(vec![0.0], 0, &[1.0], None).unwrap();
        let spec = EquationSpec::new("linear", layout, Propagator::Identity, drift, b, vec![1.0], 1.0).unwrap();
        let x = step(&spec, &[1.0], &[0.0], 1, 0.1).unwrap();
        assert!((x[0] - 1.1).abs() < 1e-15);
    }

    #[test]
    fn free_wave_returns_after_full_period() {
        let spec = make_wave(&WaveParams::free(1.0, 4, 2.0)).unwrap();
        let plan = NoisePlan::new(1, TimeGrid::uniform(2.0, 100).unwrap(), 1, 0);
        let x = simulate_terminal(&spec, &plan, 1, &StepperConfig::new(100)).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn noise_enters_velocity_before_rotation() {
        let mut p = WaveParams::free(1.0, 1, 1.0);
        p.position = vec![0.0];
        p.b0 = PointwiseFactor::Constant(1.0);
        let spec = make_wave(&p).unwrap();
        let h = 0.01;
        let x = step(&spec, &[0.0, 0.0], &[0.0, 0.3], 2, h).unwrap();
        let m = crate::spectral::wave_mode_propagator(std::f64::consts::PI, h);
        let (a, b) = m.apply(0.0, 0.3);
        assert!((x[0] - a).abs() < 1e-15 && (x[1] - b).abs() < 1e-15);
    }

    #[test]
    fn horizon_mismatch_is_config_error() {
        let spec = make_wave(&WaveParams::free(1.0, 4, 2.0)).unwrap();
        let plan = NoisePlan::new(1, TimeGrid::uniform(1.0, 10).unwrap(), 1, 0);
        assert!(matches!(
            simulate_terminal(&spec, &plan, 1, &StepperConfig::new(10)),
            Err(LabError::Config { .. })
        ));
    }

    #[test]
    fn recorded_path_has_every_step() {
        let spec = make_wave(&WaveParams::free(1.0, 2, 1.0)).unwrap();
        let block = generate_increments(&NoisePlan::new(2, TimeGrid::uniform(1.0, 8).unwrap(), 3, 0));
        let cfg = StepperConfig { record_path: true, ..StepperConfig::new(8) };
        let t = simulate_with_block(&spec, &block, 2, &cfg).unwrap();
        assert_eq!(t.states.len(), 9);
        assert_eq!(t.times.len(), 9);
        assert_eq!(t.states[0], spec.initial());
    }
}

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::constants::bound_constants;
use super::functional::TestFunctional;
use super::rate::{fit_rate, RateFit};
use crate::coefficients::TailBound;
use crate::equations::EquationSpec;
use crate::error::{LabError, Result};
use crate::integrator::{simulate_levels, StepperConfig};
use crate::noise::{generate_increments, NoisePlan};

/// Execution knobs that do not change results.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunOptions {
    /// Dedicated worker pool size; `None` uses the global pool.
    pub workers: Option<usize>,
    pub collocation_points: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRow {
    pub n: usize,
    pub paths: usize,
    /// Mean of `‖X^{n_ref}_T - X^n_T‖²_H`.
    pub strong_sq: f64,
    pub strong_se: f64,
    /// Mean of `phi(X^{n_ref}_T) - phi(X^n_T)`.
    pub weak: f64,
    pub weak_se: f64,
    /// Mean of `phi(X^n_T)`.
    pub phi_mean: f64,
    pub phi_se: f64,
    pub tail_bound: TailBound,
    /// `C · tail_bound(n)` when both are known.
    pub bound: Option<f64>,
    /// `Σ_{k ≥ n_ref} ‖B e_k‖²_H` for state-independent noise.
    pub reference_bias: Option<f64>,
}

impl LevelRow {
    /// `strong_sq + |weak| / ‖phi‖_{C²_b}`.
    pub fn combined_error(&self, phi_norm: f64) -> f64 {
        self.strong_sq + self.weak.abs() / phi_norm
    }

    pub fn combined_se(&self, phi_norm: f64) -> f64 {
        self.strong_se.hypot(self.weak_se / phi_norm)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub equation: String,
    pub seed: u64,
    pub paths: usize,
    pub n_ref: usize,
    pub steps: usize,
    pub horizon: f64,
    pub functional: TestFunctional,
    pub phi_norm: f64,
    pub constant_c: Option<f64>,
    pub rows: Vec<LevelRow>,
    /// Fit of `strong_sq` against `n`, when at least three rows are positive.
    pub fit: Option<RateFit>,
}

pub const CSV_HEADER: &str = "equation,n,paths,strong_sq,strong_se,weak,weak_se,phi_mean,phi_se,tail_bound,bound,reference_bias,slope,intercept";

fn num(v: Option<f64>) -> String {
    match v {
        Some(v) => format!("{v:.16e}"),
        None => "unavailable".to_string(),
    }
}

impl ErrorReport {
    pub fn row(&self, n: usize) -> Option<&LevelRow> {
        self.rows.iter().find(|r| r.n == n)
    }

    /// One line per level; doubles use 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        let slope = num(self.fit.as_ref().map(|f| f.slope));
        let intercept = num(self.fit.as_ref().map(|f| f.intercept));
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                self.equation,
                r.n,
                r.paths,
                num(Some(r.strong_sq)),
                num(Some(r.strong_se)),
                num(Some(r.weak)),
                num(Some(r.weak_se)),
                num(Some(r.phi_mean)),
                num(Some(r.phi_se)),
                r.tail_bound,
                num(r.bound),
                num(r.reference_bias),
                slope,
                intercept,
            );
        }
        out
    }

    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("reports serialize")
    }
}

/// Sample mean and standard error, summed in index order.
fn mean_se(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let p = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / p;
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / (p - 1.0);
    (mean, (var / p).sqrt())
}

struct PathSample {
    /// Per level: squared distance, phi difference, phi at the level.
    levels: Vec<(f64, f64, f64)>,
}

fn run_path(
    spec: &EquationSpec,
    plan: &NoisePlan,
    levels: &[usize],
    functional: &TestFunctional,
    cfg: &StepperConfig,
) -> Result<PathSample> {
    let block = generate_increments(plan);
    let mut all = levels.to_vec();
    all.push(plan.mode_count_ref);
    let mut states = simulate_levels(spec, &block, &all, cfg)?;
    let reference = states.pop().expect("reference level").states.pop().expect("terminal");
    let norm = spec.h_norm();
    let phi_ref = functional.eval(norm, &reference);
    let levels = states
        .iter()
        .map(|t| {
            let x = t.terminal();
            let phi = functional.eval(norm, x);
            (norm.distance_sq(&reference, x), phi_ref - phi, phi)
        })
        .collect();
    Ok(PathSample { levels })
}

/// Coupled strong and weak errors of each level against `plan.mode_count_ref`.
///
/// Path `p` uses `plan.with_path(p)`; every level of a path shares its
/// increments, and the reduction runs in path order, so results do not
/// depend on the worker count.
pub fn estimate_errors(
    spec: &EquationSpec,
    levels: &[usize],
    paths: usize,
    functional: &TestFunctional,
    plan: &NoisePlan,
    opts: &RunOptions,
) -> Result<ErrorReport> {
    if paths < 2 {
        return Err(LabError::config("paths", format!("at least 2 paths are needed, got {paths}")));
    }
    let n_ref = plan.mode_count_ref;
    if let Some(&bad) = levels.iter().find(|&&n| n > n_ref) {
        return Err(LabError::ReferenceTooCoarse {
            requested: bad,
            available: n_ref,
        });
    }
    let cfg = StepperConfig {
        steps: plan.time_grid.steps(),
        record_path: false,
        collocation_points: opts.collocation_points,
    };
    let work = || -> Result<Vec<PathSample>> {
        (0..paths as u64)
            .into_par_iter()
            .map(|p| run_path(spec, &plan.with_path(p), levels, functional, &cfg))
            .collect()
    };
    let samples = match opts.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| LabError::config("workers", e.to_string()))?
            .install(work)?,
        None => work()?,
    };

    let phi_norm = functional.c2_norm(spec.h_norm());
    let constant_c = spec
        .norm_inputs()
        .map(|x| bound_constants(x, spec.horizon()).c);
    let rows: Vec<LevelRow> = levels
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let col = |j: usize| samples.iter().map(move |s| match j {
                0 => s.levels[i].0,
                1 => s.levels[i].1,
                _ => s.levels[i].2,
            });
            let (strong_sq, strong_se) = mean_se(col(0));
            let (weak, weak_se) = mean_se(col(1));
            let (phi_mean, phi_se) = mean_se(col(2));
            let tail_bound = spec.tail_bound(n);
            LevelRow {
                n,
                paths,
                strong_sq,
                strong_se,
                weak,
                weak_se,
                phi_mean,
                phi_se,
                tail_bound,
                bound: constant_c.zip(tail_bound.value()).map(|(c, t)| c * t),
                reference_bias: spec.reference_bias(n_ref),
            }
        })
        .collect();
    let fit = if rows.iter().filter(|r| r.strong_sq > 0.0).count() >= 3 {
        let (ns, es): (Vec<usize>, Vec<f64>) = rows.iter().map(|r| (r.n, r.strong_sq)).unzip();
        fit_rate(&ns, &es).ok()
    } else {
        None
    };
    Ok(ErrorReport {
        equation: spec.name().to_string(),
        seed: plan.seed,
        paths,
        n_ref,
        steps: cfg.steps,
        horizon: spec.horizon(),
        functional: functional.clone(),
        phi_norm,
        constant_c,
        rows,
        fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equations::{make_diagonal, DiagonalParams};
    use crate::noise::TimeGrid;

    fn diagonal() -> EquationSpec {
        make_diagonal(&DiagonalParams::power_law(1.0, 32, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn reference_level_has_zero_error() {
        let spec = diagonal();
        let plan = NoisePlan::new(32, TimeGrid::uniform(1.0, 4).unwrap(), 5, 0);
        let r = estimate_errors(&spec, &[8, 32], 16, &TestFunctional::GaussianBell, &plan, &RunOptions::default()).unwrap();
        let last = r.row(32).unwrap();
        assert_eq!(last.strong_sq, 0.0);
        assert_eq!(last.weak, 0.0);
        assert!(r.row(8).unwrap().strong_sq > 0.0);
    }

    #[test]
    fn two_path_smoke_run() {
        let spec = diagonal();
        let plan = NoisePlan::new(16, TimeGrid::uniform(1.0, 2).unwrap(), 9, 0);
        let r = estimate_errors(&spec, &[2, 4], 2, &TestFunctional::GaussianBell, &plan, &RunOptions::default()).unwrap();
        for row in &r.rows {
            assert!(row.strong_sq.is_finite() && row.strong_se > 0.0 && row.weak_se > 0.0);
        }
        let csv = r.to_csv();
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.lines().nth(1).unwrap().ends_with("unavailable,unavailable"));
    }

    #[test]
    fn level_past_reference_rejected() {
        let spec = diagonal();
        let plan = NoisePlan::new(8, TimeGrid::uniform(1.0, 2).unwrap(), 9, 0);
        assert!(matches!(
            estimate_errors(&spec, &[16], 4, &TestFunctional::GaussianBell, &plan, &RunOptions::default()),
            Err(LabError::ReferenceTooCoarse { .. })
        ));
        assert!(matches!(
            estimate_errors(&spec, &[4], 1, &TestFunctional::GaussianBell, &plan, &RunOptions::default()),
            Err(LabError::Config { .. })
        ));
    }

    #[test]
    fn worker_count_does_not_change_csv() {
        let spec = diagonal();
        let plan = NoisePlan::new(32, TimeGrid::uniform(1.0, 4).unwrap(), 11, 0);
        let run = |w| {
            let opts = RunOptions { workers: Some(w), collocation_points: None };
            estimate_errors(&spec, &[2, 4, 8], 64, &TestFunctional::GaussianBell, &plan, &opts)
                .unwrap()
                .to_csv()
        };
        assert_eq!(run(1), run(3));
    }
}

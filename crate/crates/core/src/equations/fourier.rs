use serde::{Deserialize, Serialize};

use super::{EquationSpec, Propagator};
use crate::coefficients::{
    DiffusionCoefficient, DiffusionKind, DriftCoefficient, NoiseShape, PointwiseFactor, TailModel,
};
use crate::error::{LabError, Result};
use crate::error_lab::NormInputs;
use crate::spectral::{Basis, Collocation, DiagonalOperator, InterpolationSpaceNorm, TransformPath};
use crate::state::{StateLayout, StateNorm};

/// Image `Sigma e_k` of the noise basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SigmaRows {
    /// `Sigma e_k = scale (1 + k)^{-decay} g_k` with `g_k` the `k`-th real
    /// torus function, for `k` below the basis size.
    Diagonal { scale: f64, decay: f64 },
    /// Explicit rows in state coordinates (interleaved for complex states).
    Rows(Vec<Vec<f64>>),
}

/// Shared parameters of the Schrödinger and Airy models on the torus `[-L, L)`.
///
/// `f0`, `initial` and explicit sigma rows use state coordinates; `b0` is a
/// real factor in the torus basis; `f1` and `b1` are real constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierParams {
    pub half_length: f64,
    pub cutoff: usize,
    pub f0: Vec<f64>,
    pub f1: f64,
    pub b0: PointwiseFactor,
    pub b1: f64,
    pub sigma: SigmaRows,
    /// Bessel exponent of `V = H^r`.
    pub r: f64,
    pub initial: Vec<f64>,
    pub horizon: f64,
    pub collocation_points: Option<usize>,
}

impl FourierParams {
    /// Noise-free flow started from one basis function.
    pub fn free(half_length: f64, cutoff: usize, mode: usize, horizon: f64) -> Self {
        let mut initial = vec![0.0; mode + 1];
        initial[mode] = 1.0;
        Self {
            half_length,
            cutoff,
            f0: vec![],
            f1: 0.0,
            b0: PointwiseFactor::Constant(0.0),
            b1: 0.0,
            sigma: SigmaRows::Diagonal { scale: 0.0, decay: 1.0 },
            r: 1.0,
            initial,
            horizon,
            collocation_points: None,
        }
    }

    pub fn basis(&self) -> Basis {
        Basis::fourier_torus(self.half_length, self.cutoff)
    }
}

fn padded(v: &[f64], n: usize) -> Vec<f64> {
    let mut out = v.to_vec();
    out.resize(n, 0.0);
    out
}

fn build(p: &FourierParams, complex: bool) -> Result<EquationSpec> {
    if !(p.half_length > 0.0) {
        return Err(LabError::config("half_length", "torus half-length must be positive"));
    }
    if !(p.r > 0.5) {
        return Err(LabError::config("r", format!("V = H^r needs r > 1/2, got {}", p.r)));
    }
    let basis = p.basis();
    let n = basis.len();
    let len = if complex { 2 * n } else { n };
    for (field, v) in [("f0", &p.f0), ("initial", &p.initial)] {
        if v.len() > len {
            return Err(LabError::config(field, format!("at most {len} coefficients allowed")));
        }
    }
    if matches!(&p.b0, PointwiseFactor::Field(v) if v.len() != n) {
        return Err(LabError::config("b0", format!("field needs {n} coefficients")));
    }

    let bessel = DiagonalOperator::bessel_potential(basis)?;
    let v_space = InterpolationSpaceNorm::new(bessel, p.r / 2.0)?;
    let per_mode = v_space.weights();
    let v_weights: Vec<f64> = if complex {
        per_mode.iter().flat_map(|w| [*w, *w]).collect()
    } else {
        per_mode.clone()
    };
    let v_norm = StateNorm::Weighted(v_weights.clone());
    let h_norm = StateNorm::unweighted(len);

    let rows: Vec<Vec<f64>> = match &p.sigma {
        SigmaRows::Diagonal { scale, decay } => (0..n)
            .map(|k| {
                let mut row = vec![0.0; len];
                row[if complex { 2 * k } else { k }] = scale * ((1 + k) as f64).powf(-decay);
                row
            })
            .collect(),
        SigmaRows::Rows(rows) => {
            if let Some(bad) = rows.iter().position(|r| r.len() != len) {
                return Err(LabError::config("sigma", format!("row {bad} must have {len} entries")));
            }
            rows.clone()
        }
    };
    let col_h: Vec<f64> = rows.iter().map(|r| h_norm.norm_sq(r)).collect();
    let col_v: Vec<f64> = rows.iter().map(|r| v_norm.norm_sq(r)).collect();

    let b0_v = match &p.b0 {
        PointwiseFactor::Constant(c) => c.abs() * (2.0 * p.half_length).sqrt(),
        PointwiseFactor::Field(f) => v_space.norm_sq_coefficients(f).sqrt(),
    };
    let tail = TailModel::Scaled {
        prefactor: (b0_v + p.b1.abs()).powi(2),
        column_norms_sq: col_h.clone(),
        beyond: None,
    };
    let diffusion = DiffusionCoefficient::new(
        DiffusionKind::PointwiseAffine {
            b0: p.b0.clone(),
            b1: PointwiseFactor::Constant(p.b1),
            shape: NoiseShape::Rows(rows),
        },
        tail,
    );
    let drift = if p.f0.iter().all(|&c| c == 0.0) && p.f1 == 0.0 {
        DriftCoefficient::Zero
    } else {
        DriftCoefficient::Affine {
            f0: padded(&p.f0, len),
            f1: PointwiseFactor::Constant(p.f1),
        }
    };

    let needs_grid = p.b1 != 0.0 || matches!(p.b0, PointwiseFactor::Field(_));
    let grid = if needs_grid {
        Some(match p.collocation_points {
            Some(g) => Collocation::with_size(&basis, g, TransformPath::Direct)?,
            None => Collocation::for_basis(&basis, TransformPath::Direct)?,
        })
    } else {
        None
    };

    let initial = padded(&p.initial, len);
    let propagator = if complex {
        Propagator::ComplexPhase {
            symbols: (0..n).map(|i| basis.wave_number(i).powi(2)).collect(),
        }
    } else {
        Propagator::RealFourierPhase {
            symbols: (0..=p.cutoff)
                .map(|j| if j == 0 { 0.0 } else { basis.wave_number(2 * j - 1).powi(3) })
                .collect(),
        }
    };
    let layout = if complex {
        StateLayout::Complex { basis }
    } else {
        StateLayout::Real { basis }
    };

    // closed forms only for additive noise with a constant factor
    let inputs = match p.b0 {
        PointwiseFactor::Constant(b0) if p.b1 == 0.0 => {
            let f0 = padded(&p.f0, len);
            let drift_h = h_norm.norm(&f0) + p.f1.abs();
            let drift_v = v_norm.norm(&f0) + p.f1.abs();
            let diff_h = b0.abs() * col_h.iter().sum::<f64>().sqrt();
            let diff_v = b0.abs() * col_v.iter().sum::<f64>().sqrt();
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
                initial_h: h_norm.norm(&initial),
                initial_v: v_norm.norm(&initial),
            })
        }
        _ => None,
    };

    let name = if complex { "schrodinger" } else { "airy" };
    Ok(EquationSpec::new(name, layout, propagator, drift, diffusion, initial, p.horizon)?
        .with_h_norm(h_norm)?
        .with_v_norm(v_norm)?
        .with_collocation(grid)
        .with_minus_i(complex)
        .with_norm_inputs(inputs))
}

/// Complex field `z` on the torus with `S_t` the multiplier `exp(i t xi²)`
/// and drift and noise entering through `-i`.
pub fn make_schrodinger(p: &FourierParams) -> Result<EquationSpec> {
    build(p, true)
}

/// Real field on the torus with `S_t` the multiplier `exp(i t xi³)`.
pub fn make_airy(p: &FourierParams) -> Result<EquationSpec> {
    build(p, false)
}

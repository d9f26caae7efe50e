use std::f64::consts::{PI, SQRT_2};

use crate::error::{LabError, Result};
use crate::special::gauss_legendre_unit;
use crate::spectral::{BasisKind, DiagonalOperator, SpectralField};

/// `∫_0^1 sin(j pi s) ds`.
fn sine_integral(j: i64) -> f64 {
    if j % 2 == 0 {
        0.0
    } else {
        2.0 / (j as f64 * PI)
    }
}

/// `∫_0^1 cos(p pi s) sin(m pi s) ds`.
fn cos_sin_integral(p: i64, m: i64) -> f64 {
    0.5 * (sine_integral(m + p) + sine_integral(m - p))
}

/// `∫_0^1 e_l e_n e_m` for the sine modes `e_k = sqrt2 sin(k pi s)`, `k ≥ 1`.
pub fn sine_triple_product(l: usize, n: usize, m: usize) -> f64 {
    let (l, n, m) = (l as i64, n as i64, m as i64);
    SQRT_2 * (cos_sin_integral(l - n, m) - cos_sin_integral(l + n, m))
}

fn check_ranges(gamma: f64, beta: f64) -> Result<()> {
    if !(0.0..0.25).contains(&gamma) {
        return Err(LabError::Domain(format!("gamma must lie in [0, 1/4), got {gamma}")));
    }
    if !(beta < -0.25 - gamma) {
        return Err(LabError::Domain(format!(
            "beta must be below -1/4 - gamma = {}, got {beta}",
            -0.25 - gamma
        )));
    }
    Ok(())
}

fn theta_of(op: &DiagonalOperator) -> Result<f64> {
    op.dirichlet_theta().ok_or_else(|| {
        LabError::IncompatibleSpaces("multiplication norms need a Dirichlet Laplacian".into())
    })
}

/// Truncated `‖M(x)‖²_{HS(H_{-gamma}; H_beta)} = Σ_{m ≤ cutoff} mu_m^{2 beta} ‖x e_m‖²_{H_gamma}`
/// with `H_gamma` truncated to the same cutoff.
///
/// Products are collocated at Gauss-Legendre nodes. A product of sine modes is
/// a cosine series, so a sine grid would alias; the Gauss rule integrates the
/// trigonometric integrands to machine precision.
pub fn multiplication_hs_norm_sq(
    x: &SpectralField,
    op: &DiagonalOperator,
    gamma: f64,
    beta: f64,
    cutoff: usize,
) -> Result<f64> {
    check_ranges(gamma, beta)?;
    if x.basis().kind() != BasisKind::DirichletSine || x.is_complex() {
        return Err(LabError::IncompatibleSpaces(
            "multiplication norms are defined for real sine fields".into(),
        ));
    }
    let theta = theta_of(op)?;
    if cutoff == 0 || x.coefficients().iter().all(|&c| c == 0.0) {
        return Ok(0.0);
    }
    let support = x.truncation();
    let (nodes, weights) = gauss_legendre_unit(support + 2 * cutoff + 32);
    let xv: Vec<f64> = nodes.iter().map(|&s| x.eval(s)).collect();
    let modes: Vec<Vec<f64>> = (1..=cutoff)
        .map(|k| nodes.iter().map(|&s| SQRT_2 * (k as f64 * PI * s).sin()).collect())
        .collect();

    let mu = |k: usize| theta * (k as f64 * PI).powi(2);
    let wg: Vec<f64> = (1..=cutoff).map(|k| mu(k).powf(2.0 * gamma)).collect();
    let mut prod = vec![0.0; nodes.len()];
    let mut total = 0.0;
    for m in 1..=cutoff {
        for ((p, xq), (em, wq)) in prod.iter_mut().zip(&xv).zip(modes[m - 1].iter().zip(&weights)) {
            *p = wq * xq * em;
        }
        let inner: f64 = modes
            .iter()
            .zip(&wg)
            .map(|(en, w)| {
                let c: f64 = prod.iter().zip(en).map(|(a, b)| a * b).sum();
                w * c * c
            })
            .sum();
        total += mu(m).powf(2.0 * beta) * inner;
    }
    Ok(total)
}

/// Square root of [`multiplication_hs_norm_sq`].
pub fn multiplication_hs_norm(
    x: &SpectralField,
    op: &DiagonalOperator,
    gamma: f64,
    beta: f64,
    cutoff: usize,
) -> Result<f64> {
    multiplication_hs_norm_sq(x, op, gamma, beta, cutoff).map(f64::sqrt)
}

/// Estimate of `‖M‖_{L(H_rho; HS(H_{-gamma}; H_beta))}` for `M(y) = y ·`.
///
/// Maximizes `‖M(y)‖²_HS / ‖y‖²_{H_rho}` over `y` in the span of the first
/// `y_modes` sine modes, with both HS sums cut at `cutoff`. The quadratic
/// form is assembled from exact triple products and its top generalized
/// eigenvalue found by power iteration.
pub fn estimate_multiplier_norm(
    theta: f64,
    beta: f64,
    gamma: f64,
    rho: f64,
    y_modes: usize,
    cutoff: usize,
) -> Result<f64> {
    check_ranges(gamma, beta)?;
    if !(theta > 0.0) {
        return Err(LabError::Domain(format!("theta must be positive, got {theta}")));
    }
    let k = y_modes;
    let mu = |j: usize| theta * (j as f64 * PI).powi(2);
    let wn: Vec<f64> = (1..=cutoff).map(|j| mu(j).powf(2.0 * gamma)).collect();
    let wm: Vec<f64> = (1..=cutoff).map(|j| mu(j).powf(2.0 * beta)).collect();
    let mut gram = vec![0.0; k * k];
    let mut t = vec![0.0; k];
    for n in 1..=cutoff {
        for m in 1..=cutoff {
            let w = wn[n - 1] * wm[m - 1];
            let mut any = false;
            for (l, tl) in t.iter_mut().enumerate() {
                // nonzero only when l + n + m is odd
                *tl = if (l + 1 + n + m) % 2 == 1 {
                    any = true;
                    sine_triple_product(l + 1, n, m)
                } else {
                    0.0
                };
            }
            if !any {
                continue;
            }
            for a in 0..k {
                if t[a] == 0.0 {
                    continue;
                }
                let wa = w * t[a];
                let row = &mut gram[a * k..(a + 1) * k];
                for (g, tb) in row.iter_mut().zip(&t) {
                    *g += wa * tb;
                }
            }
        }
    }
    // D^{-1/2} G D^{-1/2} with D = diag(mu_l^{2 rho})
    let dinv: Vec<f64> = (1..=k).map(|l| mu(l).powf(-rho)).collect();
    for a in 0..k {
        for b in 0..k {
            gram[a * k + b] *= dinv[a] * dinv[b];
        }
    }
    let mut v = vec![1.0 / (k as f64).sqrt(); k];
    let mut w = vec![0.0; k];
    let mut lambda = 0.0;
    for _ in 0..2000 {
        for a in 0..k {
            w[a] = gram[a * k..(a + 1) * k].iter().zip(&v).map(|(g, x)| g * x).sum();
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Ok(0.0);
        }
        let next = v.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>();
        v.iter_mut().zip(&w).for_each(|(a, b)| *a = b / norm);
        if (next - lambda).abs() <= 1e-13 * next.abs() {
            lambda = next;
            break;
        }
        lambda = next;
    }
    Ok(lambda.max(0.0).sqrt())
}

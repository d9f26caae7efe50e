use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::spectral::{phase_propagator, wave_mode_propagator, Matrix2};

/// Exact-in-time semigroup action on a flat state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Propagator {
    Identity,
    /// `x_i -> exp(-t r_i) x_i`.
    Decay { rates: Vec<f64> },
    /// Position/velocity pairs `(x_i, x_{N+i})` evolved by the mode matrix of
    /// frequency `omega_i`.
    Wave { omega: Vec<f64> },
    /// Interleaved complex coefficients `z_i -> exp(i t s_i) z_i`.
    ComplexPhase { symbols: Vec<f64> },
    /// Real torus coefficients: the `(cos_j, sin_j)` pair is transported by
    /// the multiplier `exp(i t s_j)` with an odd symbol; `symbols[j]`
    /// belongs to frequency `j` and entry 0 is ignored.
    RealFourierPhase { symbols: Vec<f64> },
    /// `(S_t x)(tau) = x(t + tau)` on a uniform grid, constant beyond the
    /// last point.
    Shift { spacing: f64 },
}

/// A propagator with its coefficients tabulated for one fixed time.
#[derive(Debug, Clone, PartialEq)]
pub enum PreparedPropagator {
    Identity,
    Scale(Vec<f64>),
    Wave(Vec<Matrix2>),
    Complex(Vec<(f64, f64)>),
    RealPhase(Vec<(f64, f64)>),
    Shift(usize),
}

fn shift_steps(spacing: f64, t: f64) -> Result<usize> {
    let k = t / spacing;
    let r = k.round();
    if t < 0.0 || (k - r).abs() > 1e-9 * k.abs().max(1.0) {
        return Err(LabError::config(
            "steps",
            format!("shift time {t} is not a nonnegative multiple of the maturity spacing {spacing}"),
        ));
    }
    Ok(r as usize)
}

impl Propagator {
    pub fn prepare(&self, t: f64) -> Result<PreparedPropagator> {
        Ok(match self {
            Self::Identity => PreparedPropagator::Identity,
            Self::Decay { rates } => {
                PreparedPropagator::Scale(rates.iter().map(|r| (-t * r).exp()).collect())
            }
            Self::Wave { omega } => {
                PreparedPropagator::Wave(omega.iter().map(|&w| wave_mode_propagator(w, t)).collect())
            }
            Self::ComplexPhase { symbols } => {
                PreparedPropagator::Complex(symbols.iter().map(|&s| phase_propagator(s, t)).collect())
            }
            Self::RealFourierPhase { symbols } => {
                PreparedPropagator::RealPhase(symbols.iter().map(|&s| phase_propagator(s, t)).collect())
            }
            Self::Shift { spacing } => PreparedPropagator::Shift(shift_steps(*spacing, t)?),
        })
    }

    /// `x <- S_t x`.
    pub fn apply(&self, x: &mut [f64], t: f64) -> Result<()> {
        self.prepare(t)?.apply(x);
        Ok(())
    }
}

impl PreparedPropagator {
    pub fn apply(&self, x: &mut [f64]) {
        match self {
            Self::Identity => {}
            Self::Scale(s) => x.iter_mut().zip(s).for_each(|(v, s)| *v *= s),
            Self::Wave(blocks) => {
                let n = blocks.len();
                let (pos, vel) = x.split_at_mut(n);
                for ((p, v), m) in pos.iter_mut().zip(vel.iter_mut()).zip(blocks) {
                    let (a, b) = m.apply(*p, *v);
                    *p = a;
                    *v = b;
                }
            }
            Self::Complex(rot) => {
                for (z, &(c, s)) in x.chunks_exact_mut(2).zip(rot) {
                    let (re, im) = (z[0], z[1]);
                    z[0] = re * c - im * s;
                    z[1] = re * s + im * c;
                }
            }
            Self::RealPhase(rot) => {
                // indices 2j - 1 and 2j hold cos_j and sin_j
                for (j, &(c, s)) in rot.iter().enumerate().skip(1) {
                    let (i, k) = (2 * j - 1, 2 * j);
                    if k >= x.len() {
                        break;
                    }
                    let (a, b) = (x[i], x[k]);
                    x[i] = a * c + b * s;
                    x[k] = b * c - a * s;
                }
            }
            Self::Shift(k) => {
                let k = *k;
                if k == 0 || x.is_empty() {
                    return;
                }
                let last = x.len() - 1;
                for j in 0..x.len() {
                    x[j] = x[(j + k).min(last)];
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn shift_is_index_shift_with_flat_end() {
        let p = Propagator::Shift { spacing: 0.25 };
        let mut x = vec![0.0, 1.0, 2.0, 3.0, 4.0];
        p.apply(&mut x, 0.5).unwrap();
        assert_eq!(x, vec![2.0, 3.0, 4.0, 4.0, 4.0]);
        assert!(matches!(p.apply(&mut x, 0.3), Err(LabError::Config { .. })));
    }

    #[test]
    fn airy_pair_at_unit_frequency_turns_by_t() {
        // cos(x) -> cos(x + t)
        let p = Propagator::RealFourierPhase { symbols: vec![0.0, 1.0] };
        let mut x = vec![0.3, 1.0, 0.0];
        p.apply(&mut x, std::f64::consts::PI).unwrap();
        assert!((x[0] - 0.3).abs() < 1e-15);
        assert!((x[1] + 1.0).abs() < 1e-15 && x[2].abs() < 1e-15);
        let mut y = vec![0.0, 1.0, 0.0];
        p.apply(&mut y, 0.5).unwrap();
        assert!((y[1] - 0.5f64.cos()).abs() < 1e-15 && (y[2] + 0.5f64.sin()).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn group_law(t in -10.0f64..10.0, s in -10.0f64..10.0,
                     x in prop::collection::vec(-1.0f64..1.0, 6)) {
            let props = [
                Propagator::Wave { omega: vec![1.0, 2.5, 7.0] },
                Propagator::ComplexPhase { symbols: vec![0.0, 0.3, 4.0] },
                Propagator::RealFourierPhase { symbols: vec![0.0, 0.7, 5.1] },
            ];
            for p in &props {
                let mut a = x[..5].to_vec();
                if matches!(p, Propagator::Wave { .. } | Propagator::ComplexPhase { .. }) {
                    a = x.clone();
                }
                let mut b = a.clone();
                p.apply(&mut a, s).unwrap();
                p.apply(&mut a, t).unwrap();
                p.apply(&mut b, t + s).unwrap();
                for (u, v) in a.iter().zip(&b) {
                    prop_assert!((u - v).abs() < 1e-10);
                }
            }
        }
    }
}

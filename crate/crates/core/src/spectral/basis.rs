use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

/// Which orthonormal system a coefficient vector refers to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BasisKind {
    /// `e_k(s) = sqrt(2) sin(k pi s)` on `(0, 1)`, `k = 1, 2, ...`.
    DirichletSine,
    /// Real Fourier system on the torus `[-L, L)`: the constant mode followed
    /// by `(cos, sin)` pairs of frequency `pi j / L`, all L²-normalized.
    FourierTorus { half_length: f64 },
}

/// An orthonormal basis truncated to a contiguous block of modes.
///
/// Coefficient index `i` maps to sine mode `k = i + 1`, or, for the torus,
/// to the constant (`i = 0`), `cos` (`i = 2j - 1`) and `sin` (`i = 2j`)
/// functions of frequency `j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Basis {
    kind: BasisKind,
    len: usize,
}

impl Basis {
    /// Sine modes `1..=modes`.
    pub fn dirichlet_sine(modes: usize) -> Self {
        Self {
            kind: BasisKind::DirichletSine,
            len: modes,
        }
    }

    /// Torus basis with frequencies `0..=cutoff`, so `2 cutoff + 1` functions.
    pub fn fourier_torus(half_length: f64, cutoff: usize) -> Self {
        assert!(half_length > 0.0, "torus half-length must be positive");
        Self {
            kind: BasisKind::FourierTorus { half_length },
            len: 2 * cutoff + 1,
        }
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    /// Number of basis functions.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Highest Fourier frequency index (torus) or mode count (sine).
    pub fn cutoff(&self) -> usize {
        match self.kind {
            BasisKind::DirichletSine => self.len,
            BasisKind::FourierTorus { .. } => self.len / 2,
        }
    }

    /// Wave number of coefficient `i`: `k pi` for sines, `pi j / L` on the torus.
    pub fn wave_number(&self, i: usize) -> f64 {
        match self.kind {
            BasisKind::DirichletSine => (i + 1) as f64 * PI,
            BasisKind::FourierTorus { half_length } => PI * i.div_ceil(2) as f64 / half_length,
        }
    }

    /// Evaluates basis function `i` at `s`.
    pub fn eval(&self, i: usize, s: f64) -> f64 {
        match self.kind {
            BasisKind::DirichletSine => SQRT_2 * ((i + 1) as f64 * PI * s).sin(),
            BasisKind::FourierTorus { half_length } => {
                if i == 0 {
                    (2.0 * half_length).sqrt().recip()
                } else {
                    let xi = self.wave_number(i);
                    let norm = half_length.sqrt().recip();
                    if i % 2 == 1 {
                        norm * (xi * s).cos()
                    } else {
                        norm * (xi * s).sin()
                    }
                }
            }
        }
    }

    /// Same family and size.
    pub fn same_space(&self, other: &Basis) -> bool {
        self == other
    }
}

//! Exact spectral calculus for the diagonal and block-diagonal operators of
//! the model equations: bases, fractional norms, group propagators, Yosida
//! approximants and collocation transforms.

mod basis;
mod field;
mod operator;
mod propagator;
mod transform;

pub use basis::{Basis, BasisKind};
pub use field::{fractional_norm, SpectralField};
pub use operator::{DiagonalOperator, InterpolationSpaceNorm};
pub use propagator::{
    phase_propagator, semigroup_propagator, wave_mode_propagator, yosida_propagator, Matrix2,
};
pub use transform::{Collocation, FourierGrid, SineGrid, TransformBuffer, TransformPath};

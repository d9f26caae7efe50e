//! Spectral simulation of stochastic evolution equations driven by a
//! truncated cylindrical Wiener process, with error measurement against a
//! fine reference truncation.

pub mod coefficients;
pub mod equations;
pub mod error;
pub mod error_lab;
pub mod integrator;
pub mod noise;
pub mod special;
pub mod spectral;
pub mod state;

pub use equations::{make_diagonal, DiagonalParams, EquationSpec};
pub use error::{LabError, Result};
pub use error_lab::{estimate_errors, ErrorReport, TestFunctional};
pub use integrator::{simulate_terminal, StepperConfig};
pub use noise::{NoisePlan, TimeGrid};
pub use state::{StateLayout, StateNorm};

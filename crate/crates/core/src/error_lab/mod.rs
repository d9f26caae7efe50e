//! Coupled strong/weak error estimation, the Gaussian oracle, rate fits and
//! the explicit error constants.

mod constants;
mod functional;
mod oracle;
mod rate;
mod report;

pub use constants::{bound_constants, BoundConstants, NormInputs};
pub use functional::TestFunctional;
pub use oracle::{gaussian_oracle, sharpness_ratios, LambdaSequence, Level, SharpnessRow};
pub use rate::{fit_rate, RateFit};
pub use report::{estimate_errors, ErrorReport, LevelRow, RunOptions, CSV_HEADER};

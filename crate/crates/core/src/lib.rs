//! Matrix-free convolutional phase retrieval.
//!
//! Recovers a complex signal `x ∈ Cⁿ` from magnitudes `y = |a ⊛ x|` of its
//! cyclic convolution with a random kernel `a ∈ Cᵐ`. The pipeline is a
//! spectral initializer followed by weighted generalized gradient descent on
//! the amplitude objective `f(z) = (1/2m) ‖b^{1/2} ⊙ (y − |Az|)‖²`.
//!
//! Modules:
//!
//! * [`operators`]: complex vectors, FFT-backed and dense measurement
//!   operators, phase utilities, distance modulo global phase.
//! * [`weighting`]: Gaussian smoothing weights and the scalar helper functions
//!   used to analyse them.
//! * [`initialization`]: norm estimate, matrix-free `Y`, power method.
//! * [`solver`]: objective, generalized Wirtinger gradient, gradient descent
//!   and the alternating-direction baseline.
//! * [`lemma_verify`]: Monte-Carlo checks of the closed-form expectations.
//! * [`harness`]: seeded experiments, phase-transition sweeps and reports.

pub mod error;
pub mod harness;
pub mod initialization;
pub mod lemma_verify;
pub mod operators;
pub mod rng;
pub mod solver;
pub mod weighting;

pub use error::{Error, Result};
pub use operators::{
    ComplexVector, ConvolutionalMeasurement, DenseMeasurement, MeasurementOperator, Observations,
    C64,
};

/// Default smoothing variance for the Gaussian weights.
pub const DEFAULT_SIGMA_SQ: f64 = 0.51;
/// Default gradient stepsize (`2σ² + 1` at the default variance).
pub const DEFAULT_TAU: f64 = 2.02;
/// Success tolerance on `dist(z, X)`.
pub const SUCCESS_TOL: f64 = 1e-5;
/// Default iteration cap for gradient descent.
pub const DEFAULT_MAX_ITERS: usize = 20_000;

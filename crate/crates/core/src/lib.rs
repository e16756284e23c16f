//! Quantum operations on the torus: Kraus channels, their non-unitality,
//! noise models, quantized maps and invariant states.

pub mod channel;
pub mod error;
pub mod field;
pub mod linalg;
pub mod maps;
pub mod noise;
pub mod spec;
pub mod steady;
pub mod torus;

pub use channel::{
    frobenius_distance, translation_coefficients, AffineRep, DensityMatrix, KrausChannel,
};
pub use error::{Error, Result};
pub use linalg::Operator;
pub use maps::{
    classical_attractor, classical_step, quantum_baker, quantum_standard_map, unitary_channel,
    AttractorParams, ClassicalPoint, PhaseHistogram,
};
pub use noise::{
    gad_channel, gad_eta, gad_translation_diagonal, rup_gaussian, s_model_channel, sdc_channel,
    sdc_eta_analytic, sdc_eta_exact, sdc_gamma, sloppy_noise, GadModel, StochasticCoefficients,
};
pub use spec::{ChannelSpec, MapSpec};
pub use steady::{
    default_max_iter, invariant_state, invariant_state_spectral, subleading_modulus,
    ConvergenceReport,
};
pub use torus::{HusimiGrid, StateVector, TorusSpace};

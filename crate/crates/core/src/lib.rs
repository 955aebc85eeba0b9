//! Frame-based noise spectroscopy and dynamical-decoupling design for a qubit
//! dephasing under random telegraph noise.
//!
//! Units: times in μs, rates and angular frequencies in rad/μs.

pub mod comb;
pub mod control;
pub mod dyson;
pub mod error;
pub mod exact;
pub mod harness;
pub mod montecarlo;
pub mod noise;
pub mod optimize;
pub mod pauli;
pub mod predict;
pub mod process;
pub mod qns;
pub mod quad;
pub mod rng;
pub mod simplex;
pub mod spectra;

pub use control::{DigitalControl, FrameCoefficients, Pulse, RandomControlLaw};
pub use error::{QnsError, Result};
pub use noise::{NoiseModel, Trajectory};
pub use pauli::{DensityMatrix, Observable};

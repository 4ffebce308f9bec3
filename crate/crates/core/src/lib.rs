//! Simulator for collapse-based signalling protocols.
//!
//! * [`hilbert`]: pure states, dense operators, projective measurement.
//! * [`wavepacket`]: analytic Gaussian packets and a grid cross-check engine.
//! * [`protocols`]: the nonlocal-projector and momentum-measurement protocols,
//!   signalling-gap statistics and the commutation audit.
//!
//! Trials run on the rayon pool when the `parallel` feature is enabled (the
//! default) and on the calling thread otherwise; a fixed seed gives identical
//! results in both modes.

pub mod error;
pub mod exec;
pub mod hilbert;
pub mod protocols;
pub mod rng;
pub mod wavepacket;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use exec::Execution;
pub use hilbert::{commutator, measure, MeasurementResult, Operator, Projector, StateVector};
pub use wavepacket::{DetectionWindow, GaussianPacket, GridWavefunction, Representation};

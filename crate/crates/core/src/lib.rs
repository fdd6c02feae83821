//! Seeded simulation of single-qubit teleportation with error injection.
//!
//! The numeric core is generic over the real scalar ([`Real`], implemented for
//! `f32` and `f64`); the aliases below fix it to double precision, which is what
//! the analysis harness uses.
//!
//! ```
//! use teleport_core::{run_trial, NoiseConfig, RngStream, State};
//!
//! let input = State::from_real(&[0.6, 0.8]).unwrap();
//! let record = run_trial(&input, &NoiseConfig::ideal(7), &mut RngStream::new(7)).unwrap();
//! assert!(record.fidelity > 1.0 - 1e-10);
//! ```

pub mod analysis;
pub mod bits;
pub mod error;
pub mod gates;
mod linalg;
pub mod noise;
pub mod protocol;
pub mod scalar;
pub mod statevec;

pub use analysis::{
    amplification_experiment, certify_source, estimate_fidelity, estimate_mean_fidelity, sweep,
    AmplificationReport, CertifierReport, FidelityEstimate, SweepParameter, SweepResult, SweepSpec,
};
pub use bits::Bits;
pub use error::{Result, SimError};
pub use gates::{apply_1q, apply_2q, apply_cnot, Unitary};
pub use noise::{
    flip_bits, haar_random_qubit, perturb_unitary, sample_noisy_bell, NoiseConfig, NoiseSite,
    RngStream, SiteFlags,
};
pub use protocol::{
    correction_for, ideal_bell, run_trial, run_trial_all_branches, step_states, ClassicalMessage,
    CorrectionLabel, CorrectionMap, Teleporter, TrialRecord,
};
pub use scalar::Real;
pub use statevec::{normalize, Measurement, StateVector};

pub type State = StateVector<f64>;
pub type StateF32 = StateVector<f32>;
pub type Gate = Unitary<f64>;
pub type GateF32 = Unitary<f32>;
pub type Record = TrialRecord<f64>;
pub type RecordF32 = TrialRecord<f32>;
pub type Amplitude = num_complex::Complex<f64>;

//! The teleportation protocol as two parties joined by a two-bit classical message.
//!
//! Qubit 0 carries the unknown input, qubit 1 is Alice's half of the Bell pair
//! and qubit 2 is Bob's half. Alice applies CNOT(0, 1) then H(0), measures
//! qubits 0 and 1, and sends the two bits; Bob picks his correction from the
//! received bits.
//!
//! Grouping the post-Hadamard state by Alice's two bits gives Bob's branches
//!
//! ```text
//! 00: a|0> + b|1>    01: a|1> + b|0>    10: a|0> - b|1>    11: a|1> - b|0>
//! ```
//!
//! so the correction map is `00 -> I, 01 -> X, 10 -> Z, 11 -> [[0,-1],[1,0]]`
//! (the last one restores the input up to a global sign). Swapping the X and Z
//! assignments, as [`CorrectionMap::SwappedXZ`] does, breaks branches 01 and 10.
//!
//! Random draws happen in a fixed order so that a seed pins a trial: Bell pair,
//! XOR error, Hadamard error, measurement, readout mask, channel mask,
//! correction error. Disabled sites draw nothing.

use std::fmt;

use num_complex::Complex;

use crate::bits::Bits;
use crate::error::{Result, SimError};
use crate::gates::{apply_1q, apply_2q, apply_cnot, Unitary};
use crate::noise::{
    flip_mask, perturb_unitary, sample_gate_error, sample_noisy_bell, NoiseConfig, RngStream,
};
use crate::scalar::{lit, Real};
use crate::statevec::{Amplitude, StateVector};

/// Alice's measured qubits, in transmission order.
pub const MEASURED: [usize; 2] = [0, 1];
pub const BOB_QUBIT: usize = 2;

/// `(|00> + |11>) / sqrt(2)`.
pub fn ideal_bell<T: Real>() -> StateVector<T> {
    let h = Complex::new(lit::<T>(0.5).sqrt(), T::zero());
    let z = Complex::new(T::zero(), T::zero());
    StateVector::from_raw(vec![h, z, z, h])
}

/// The two bits Alice sends: outcome of qubit 0 then qubit 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ClassicalMessage(Bits);

impl ClassicalMessage {
    pub fn new(bits: Bits) -> Result<Self> {
        if bits.len() != 2 {
            return Err(SimError::InvalidInput(format!(
                "classical message must have 2 bits, got {bits}"
            )));
        }
        Ok(Self(bits))
    }

    pub fn bits(self) -> Bits {
        self.0
    }
}

impl fmt::Display for ClassicalMessage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CorrectionLabel {
    I,
    X,
    Z,
    Corr11,
}

impl CorrectionLabel {
    pub fn name(self) -> &'static str {
        match self {
            CorrectionLabel::I => "I",
            CorrectionLabel::X => "X",
            CorrectionLabel::Z => "Z",
            CorrectionLabel::Corr11 => "CORR11",
        }
    }

    pub fn unitary<T: Real>(self) -> Unitary<T> {
        match self {
            CorrectionLabel::I => Unitary::i2(),
            CorrectionLabel::X => Unitary::pauli_x(),
            CorrectionLabel::Z => Unitary::pauli_z(),
            CorrectionLabel::Corr11 => Unitary::corr11(),
        }
    }
}

impl fmt::Display for CorrectionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How Bob turns received bits into a correction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CorrectionMap {
    /// `00 -> I, 01 -> X, 10 -> Z, 11 -> CORR11`; restores the input on every branch.
    #[default]
    Derived,
    /// `00 -> I, 01 -> Z, 10 -> X, 11 -> CORR11`; wrong on branches 01 and 10.
    SwappedXZ,
}

impl CorrectionMap {
    pub fn label(self, received: ClassicalMessage) -> CorrectionLabel {
        match (self, received.bits().value()) {
            (_, 0b00) => CorrectionLabel::I,
            (CorrectionMap::Derived, 0b01) | (CorrectionMap::SwappedXZ, 0b10) => CorrectionLabel::X,
            (CorrectionMap::Derived, 0b10) | (CorrectionMap::SwappedXZ, 0b01) => CorrectionLabel::Z,
            _ => CorrectionLabel::Corr11,
        }
    }
}

/// Bob's operator for `received` under the derived map.
pub fn correction_for<T: Real>(received: ClassicalMessage) -> Unitary<T> {
    CorrectionMap::Derived.label(received).unitary()
}

/// One protocol run.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord<T> {
    pub input_a: Amplitude<T>,
    pub input_b: Amplitude<T>,
    /// True collapse outcome of qubits 0 and 1.
    pub outcome: Bits,
    /// What Alice's apparatus reported.
    pub reported: Bits,
    /// What reached Bob.
    pub received: Bits,
    pub correction: CorrectionLabel,
    pub bob_state: StateVector<T>,
    pub fidelity: T,
    pub branch_probability: T,
}

/// The three-qubit state after each of Alice's first three steps.
#[derive(Clone, Debug, PartialEq)]
pub struct StepStates<T> {
    pub after_tensor: StateVector<T>,
    pub after_xor: StateVector<T>,
    pub after_hadamard: StateVector<T>,
}

/// Noise draws made before Alice measures.
struct AliceDraws<T> {
    pair: StateVector<T>,
    xor: Option<Unitary<T>>,
    hadamard: Option<Unitary<T>>,
}

/// Noise draws made after Alice measures. Masks are XORed onto the bits.
struct ReportDraws<T> {
    readout: Option<Bits>,
    channel: Option<Bits>,
    correction_error: Option<Unitary<T>>,
}

fn check_input<T: Real>(input: &StateVector<T>) -> Result<()> {
    if input.n_qubits() != 1 {
        return Err(SimError::InvalidInput(format!(
            "teleportation input must be one qubit, got {}",
            input.n_qubits()
        )));
    }
    Ok(())
}

fn steps<T: Real>(input: &StateVector<T>, draws: &AliceDraws<T>) -> Result<StepStates<T>> {
    check_input(input)?;
    let after_tensor = input.tensor(&draws.pair)?;
    let after_xor = match &draws.xor {
        Some(u) => apply_2q(&after_tensor, u, 0, 1)?,
        None => apply_cnot(&after_tensor, 0, 1)?,
    };
    let h = draws.hadamard.clone().unwrap_or_else(Unitary::hadamard);
    let after_hadamard = apply_1q(&after_xor, &h, 0)?;
    Ok(StepStates {
        after_tensor,
        after_xor,
        after_hadamard,
    })
}

/// Noise-free states after tensoring with the Bell pair, CNOT(0, 1) and H(0).
pub fn step_states<T: Real>(input: &StateVector<T>) -> Result<StepStates<T>> {
    let draws = AliceDraws {
        pair: ideal_bell(),
        xor: None,
        hadamard: None,
    };
    steps(input, &draws)
}

/// Runs Alice's and Bob's sides of one teleportation.
#[derive(Clone, Copy, Debug)]
pub struct Teleporter {
    config: NoiseConfig,
    map: CorrectionMap,
}

impl Teleporter {
    pub fn new(config: NoiseConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            map: CorrectionMap::Derived,
        })
    }

    pub fn with_correction_map(mut self, map: CorrectionMap) -> Self {
        self.map = map;
        self
    }

    pub fn config(&self) -> &NoiseConfig {
        &self.config
    }

    fn alice_draws<T: Real>(&self, rng: &mut RngStream) -> AliceDraws<T> {
        let c = &self.config;
        let pair = if c.sites.bell {
            sample_noisy_bell(c.eta_bell, rng)
        } else {
            ideal_bell()
        };
        let xor = c
            .sites
            .xor
            .then(|| perturb_unitary(&Unitary::cnot(), c.sigma_gate, rng));
        let hadamard = c
            .sites
            .hadamard
            .then(|| perturb_unitary(&Unitary::hadamard(), c.sigma_gate, rng));
        AliceDraws {
            pair,
            xor,
            hadamard,
        }
    }

    fn report_draws<T: Real>(&self, rng: &mut RngStream) -> ReportDraws<T> {
        let c = &self.config;
        ReportDraws {
            readout: c.sites.readout.then(|| flip_mask(2, c.q_readout, rng)),
            channel: c.sites.channel.then(|| flip_mask(2, c.p_classical, rng)),
            correction_error: c
                .sites
                .correction
                .then(|| sample_gate_error(2, c.sigma_gate, rng)),
        }
    }

    /// Alice reports `outcome`, the message crosses the channel, and Bob corrects.
    fn finish<T: Real>(
        &self,
        input: &StateVector<T>,
        collapsed: &StateVector<T>,
        outcome: Bits,
        branch_probability: T,
        draws: &ReportDraws<T>,
    ) -> Result<TrialRecord<T>> {
        let reported = draws.readout.map_or(outcome, |m| outcome.xor(m));
        let sent = ClassicalMessage::new(reported)?;
        let received =
            ClassicalMessage::new(draws.channel.map_or(sent.bits(), |m| sent.bits().xor(m)))?;

        let label = self.map.label(received);
        let ideal = label.unitary::<T>();
        let correction = match &draws.correction_error {
            Some(err) if self.config.sigma_gate != 0.0 => err.mul(&ideal),
            _ => ideal,
        };
        let bob_raw = collapsed.factor_measured(&MEASURED, outcome)?;
        let bob_state = apply_1q(&bob_raw, &correction, 0)?;
        let fidelity = input.fidelity(&bob_state)?;
        Ok(TrialRecord {
            input_a: input.amplitude(0),
            input_b: input.amplitude(1),
            outcome,
            reported,
            received: received.bits(),
            correction: label,
            bob_state,
            fidelity,
            branch_probability,
        })
    }

    /// One run with a sampled measurement outcome.
    pub fn run<T: Real>(
        &self,
        input: &StateVector<T>,
        rng: &mut RngStream,
    ) -> Result<TrialRecord<T>> {
        let alice = self.alice_draws(rng);
        let states = steps(input, &alice)?;
        let m = states.after_hadamard.measure_qubits(&MEASURED, rng)?;
        let report = self.report_draws(rng);
        self.finish(input, &m.collapsed, m.outcome, m.probability, &report)
    }

    /// Projects onto each of Alice's four outcomes in turn instead of sampling.
    /// Every noise site is drawn once and shared by all four branches.
    pub fn run_all_branches<T: Real>(
        &self,
        input: &StateVector<T>,
        rng: &mut RngStream,
    ) -> Result<Vec<TrialRecord<T>>> {
        let alice = self.alice_draws(rng);
        let states = steps(input, &alice)?;
        let report = self.report_draws(rng);
        (0..4u32)
            .map(|k| {
                let outcome = Bits::new(k, 2)?;
                let (collapsed, p) = states.after_hadamard.project(&MEASURED, outcome)?;
                self.finish(input, &collapsed, outcome, p, &report)
            })
            .collect()
    }
}

/// One teleportation of `input` under `config`.
pub fn run_trial<T: Real>(
    input: &StateVector<T>,
    config: &NoiseConfig,
    rng: &mut RngStream,
) -> Result<TrialRecord<T>> {
    Teleporter::new(*config)?.run(input, rng)
}

/// All four measurement branches of one teleportation, in outcome order `00..11`.
pub fn run_trial_all_branches<T: Real>(
    input: &StateVector<T>,
    config: &NoiseConfig,
    rng: &mut RngStream,
) -> Result<Vec<TrialRecord<T>>> {
    Teleporter::new(*config)?.run_all_branches(input, rng)
}

//! Dense pure-state vectors over 1 to 12 qubits.
//!
//! Qubit 0 is the most significant bit of a basis index, so the ket label
//! `|q0 q1 ... q(n-1)>` read left to right is the binary form of the index:
//! `|100>` on three qubits is index 4.

use num_complex::Complex;

use crate::bits::Bits;
use crate::error::{Result, SimError};
use crate::noise::RngStream;
use crate::scalar::{lit, Real};

pub const MAX_QUBITS: usize = 12;

/// Squared norms (and total probabilities) below this are treated as zero.
pub const DEGENERACY_FLOOR: f64 = 1e-12;

/// Inconsistent weight tolerated by [`StateVector::factor_measured`].
pub const FACTOR_TOLERANCE: f64 = 1e-9;

pub type Amplitude<T> = Complex<T>;

/// Normalized pure state of `n_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T> {
    n_qubits: usize,
    amps: Vec<Amplitude<T>>,
}

/// Result of a sampled projective measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct Measurement<T> {
    pub outcome: Bits,
    pub collapsed: StateVector<T>,
    /// Born weight of the drawn outcome.
    pub probability: T,
}

fn qubits_for_len(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(SimError::InvalidInput(format!(
            "amplitude count {len} is not 2^n for n >= 1"
        )));
    }
    let n = len.trailing_zeros() as usize;
    if n > MAX_QUBITS {
        return Err(SimError::InvalidInput(format!(
            "{n} qubits exceeds the {MAX_QUBITS}-qubit limit"
        )));
    }
    Ok(n)
}

fn squared_norm<T: Real>(amps: &[Amplitude<T>]) -> T {
    amps.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr())
}

/// Rescales `amps` to unit norm.
pub fn normalize<T: Real>(amps: Vec<Amplitude<T>>) -> Result<StateVector<T>> {
    let n_qubits = qubits_for_len(amps.len())?;
    if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
        return Err(SimError::InvalidInput("non-finite amplitude".into()));
    }
    let norm_sq = squared_norm(&amps);
    if norm_sq.as_f64() <= DEGENERACY_FLOOR {
        return Err(SimError::DegenerateState(norm_sq.as_f64()));
    }
    let inv = norm_sq.sqrt().recip();
    let amps = amps.into_iter().map(|a| a * inv).collect();
    Ok(StateVector { n_qubits, amps })
}

impl<T: Real> StateVector<T> {
    /// Wraps already-normalized amplitudes, rejecting anything off the unit sphere.
    pub fn new(amps: Vec<Amplitude<T>>) -> Result<Self> {
        let n_qubits = qubits_for_len(amps.len())?;
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(SimError::InvalidInput("non-finite amplitude".into()));
        }
        let deviation = (squared_norm(&amps).as_f64() - 1.0).abs();
        if deviation > T::TOLERANCE {
            return Err(SimError::InvalidInput(format!(
                "state is not normalized (|norm^2 - 1| = {deviation:e})"
            )));
        }
        Ok(Self { n_qubits, amps })
    }

    /// Builds a state from amplitudes that are normalized by construction.
    pub(crate) fn from_raw(amps: Vec<Amplitude<T>>) -> Self {
        let n_qubits = amps.len().trailing_zeros() as usize;
        debug_assert!(amps.len().is_power_of_two() && (1..=MAX_QUBITS).contains(&n_qubits));
        Self { n_qubits, amps }
    }

    /// Single-qubit state `a|0> + b|1>`, normalized.
    pub fn qubit(a: Amplitude<T>, b: Amplitude<T>) -> Result<Self> {
        normalize(vec![a, b])
    }

    /// Computational basis state named by `label`, e.g. `"100"`.
    pub fn basis_state(n_qubits: usize, label: &str) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&n_qubits) {
            return Err(SimError::InvalidInput(format!(
                "qubit count {n_qubits} outside 1..={MAX_QUBITS}"
            )));
        }
        let bits: Bits = label.parse()?;
        if bits.len() != n_qubits {
            return Err(SimError::InvalidInput(format!(
                "label {label:?} has {} bits, expected {n_qubits}",
                bits.len()
            )));
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << n_qubits];
        amps[bits.value() as usize] = Complex::new(T::one(), T::zero());
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Amplitude<T>] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Amplitude<T> {
        self.amps[index]
    }

    pub fn into_amplitudes(self) -> Vec<Amplitude<T>> {
        self.amps
    }

    pub fn squared_norm(&self) -> T {
        squared_norm(&self.amps)
    }

    /// Multiplies every amplitude by `e^{i theta}`.
    pub fn with_global_phase(&self, theta: T) -> Self {
        let phase = Complex::from_polar(T::one(), theta);
        Self {
            n_qubits: self.n_qubits,
            amps: self.amps.iter().map(|&a| a * phase).collect(),
        }
    }

    /// Bit mask of qubit `q` within a basis index.
    pub(crate) fn mask(&self, q: usize) -> usize {
        1 << (self.n_qubits - 1 - q)
    }

    /// `self` as the leading qubits, `right` as the trailing ones.
    pub fn tensor(&self, right: &Self) -> Result<Self> {
        let n = self.n_qubits + right.n_qubits;
        if n > MAX_QUBITS {
            return Err(SimError::InvalidInput(format!(
                "tensor product of {} and {} qubits exceeds {MAX_QUBITS}",
                self.n_qubits, right.n_qubits
            )));
        }
        let amps = self
            .amps
            .iter()
            .flat_map(|&l| right.amps.iter().map(move |&r| l * r))
            .collect();
        Ok(Self { n_qubits: n, amps })
    }

    fn check_same_size(&self, other: &Self) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(SimError::InvalidInput(format!(
                "dimension mismatch: {} vs {} qubits",
                self.n_qubits, other.n_qubits
            )));
        }
        Ok(())
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner_product(&self, other: &Self) -> Result<Amplitude<T>> {
        self.check_same_size(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (u, v)| {
                acc + u.conj() * v
            }))
    }

    /// `|<self|other>|^2`, clamped to `[0, 1]`.
    pub fn fidelity(&self, other: &Self) -> Result<T> {
        let overlap = self.inner_product(other)?.norm_sqr();
        Ok(overlap.max(T::zero()).min(T::one()))
    }

    fn check_targets(&self, targets: &[usize]) -> Result<()> {
        if targets.is_empty() {
            return Err(SimError::InvalidInput("no qubits to measure".into()));
        }
        for (i, &t) in targets.iter().enumerate() {
            if t >= self.n_qubits {
                return Err(SimError::InvalidInput(format!(
                    "qubit {t} out of range for {} qubits",
                    self.n_qubits
                )));
            }
            if targets[..i].contains(&t) {
                return Err(SimError::InvalidInput(format!("qubit {t} listed twice")));
            }
        }
        Ok(())
    }

    /// Outcome value of basis index `idx` restricted to `targets`, first target leftmost.
    fn outcome_of(&self, idx: usize, targets: &[usize]) -> u32 {
        targets
            .iter()
            .fold(0, |acc, &t| (acc << 1) | u32::from(idx & self.mask(t) != 0))
    }

    /// Born probabilities of measuring `targets`, indexed by outcome value.
    pub fn outcome_probabilities(&self, targets: &[usize]) -> Result<Vec<T>> {
        self.check_targets(targets)?;
        let mut probs = vec![T::zero(); 1 << targets.len()];
        for (idx, a) in self.amps.iter().enumerate() {
            let k = self.outcome_of(idx, targets) as usize;
            probs[k] = probs[k] + a.norm_sqr();
        }
        Ok(probs)
    }

    /// Projects onto `outcome` of `targets`, returning the renormalized state and its Born weight.
    pub fn project(&self, targets: &[usize], outcome: Bits) -> Result<(Self, T)> {
        self.check_targets(targets)?;
        if outcome.len() != targets.len() {
            return Err(SimError::InvalidInput(format!(
                "outcome {outcome} does not match {} measured qubits",
                targets.len()
            )));
        }
        let mut weight = T::zero();
        let mut amps = self.amps.clone();
        for (idx, a) in amps.iter_mut().enumerate() {
            if self.outcome_of(idx, targets) == outcome.value() {
                weight = weight + a.norm_sqr();
            } else {
                *a = Complex::new(T::zero(), T::zero());
            }
        }
        if weight.as_f64() < DEGENERACY_FLOOR {
            return Err(SimError::DegenerateMeasurement(weight.as_f64()));
        }
        let inv = weight.sqrt().recip();
        for a in &mut amps {
            *a = *a * inv;
        }
        Ok((
            Self {
                n_qubits: self.n_qubits,
                amps,
            },
            weight,
        ))
    }

    /// Samples a projective measurement of `targets` in the computational basis.
    pub fn measure_qubits(&self, targets: &[usize], rng: &mut RngStream) -> Result<Measurement<T>> {
        let probs = self.outcome_probabilities(targets)?;
        let total = probs.iter().fold(T::zero(), |acc, &p| acc + p);
        if total.as_f64() < DEGENERACY_FLOOR {
            return Err(SimError::DegenerateMeasurement(total.as_f64()));
        }
        let draw = rng.uniform() * total.as_f64();
        let mut cumulative = 0.0;
        let mut chosen = None;
        for (k, p) in probs.iter().enumerate() {
            if p.as_f64() <= 0.0 {
                continue;
            }
            cumulative += p.as_f64();
            chosen = Some(k);
            if draw < cumulative {
                break;
            }
        }
        // A nonzero total guarantees at least one positive weight.
        let k = chosen.expect("positive total probability");
        let outcome = Bits::new(k as u32, targets.len())?;
        let (collapsed, weight) = self.project(targets, outcome)?;
        Ok(Measurement {
            outcome,
            collapsed,
            probability: weight / total,
        })
    }

    /// State of the unmeasured qubits once `measured` is known to read `outcome`.
    pub fn factor_measured(&self, measured: &[usize], outcome: Bits) -> Result<Self> {
        self.check_targets(measured)?;
        if measured.len() >= self.n_qubits {
            return Err(SimError::InvalidInput(
                "no unmeasured qubits left to factor out".into(),
            ));
        }
        if outcome.len() != measured.len() {
            return Err(SimError::InvalidInput(format!(
                "outcome {outcome} does not match {} measured qubits",
                measured.len()
            )));
        }
        let remaining: Vec<usize> = (0..self.n_qubits)
            .filter(|q| !measured.contains(q))
            .collect();
        let mut stray = 0.0;
        let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << remaining.len()];
        for (idx, &a) in self.amps.iter().enumerate() {
            if self.outcome_of(idx, measured) == outcome.value() {
                amps[self.outcome_of(idx, &remaining) as usize] = a;
            } else {
                stray += a.norm_sqr().as_f64();
            }
        }
        if stray > FACTOR_TOLERANCE {
            return Err(SimError::Contract(format!(
                "state carries weight {stray:e} outside outcome {outcome}"
            )));
        }
        normalize(amps)
    }
}

impl StateVector<f64> {
    /// Convenience constructor for real amplitude lists.
    pub fn from_real(values: &[f64]) -> Result<Self> {
        normalize(values.iter().map(|&v| Complex::new(v, 0.0)).collect())
    }
}

/// `(|0> + |1>) / sqrt(2)`.
pub fn plus_state<T: Real>() -> StateVector<T> {
    let h = lit::<T>(0.5).sqrt();
    StateVector::from_raw(vec![Complex::new(h, T::zero()), Complex::new(h, T::zero())])
}

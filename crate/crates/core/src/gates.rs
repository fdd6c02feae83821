//! Small dense unitaries and their action on state vectors.
//!
//! The correction operators Bob chooses from are [`Unitary::i2`],
//! [`Unitary::pauli_x`], [`Unitary::pauli_z`] and [`Unitary::corr11`]
//! (`[[0, -1], [1, 0]]`, which equals `-iY`).

use std::fmt;

use num_complex::Complex;

use crate::error::{Result, SimError};
use crate::scalar::{lit, Real};
use crate::statevec::StateVector;

/// A 2x2 or 4x4 unitary matrix, stored row-major.
#[derive(Clone, PartialEq)]
pub struct Unitary<T> {
    dim: usize,
    entries: Vec<Complex<T>>,
}

impl<T: Real> fmt::Debug for Unitary<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<_> = self.entries.chunks(self.dim).collect();
        f.debug_struct("Unitary").field("rows", &rows).finish()
    }
}

fn re<T: Real>(x: f64) -> Complex<T> {
    Complex::new(lit(x), T::zero())
}

impl<T: Real> Unitary<T> {
    /// Checks shape and `U^dagger U = I` before accepting `entries`.
    pub fn new(dim: usize, entries: Vec<Complex<T>>) -> Result<Self> {
        if dim != 2 && dim != 4 {
            return Err(SimError::InvalidInput(format!(
                "unitary dimension {dim} (only 2 and 4 are supported)"
            )));
        }
        if entries.len() != dim * dim {
            return Err(SimError::InvalidInput(format!(
                "{} entries for a {dim}x{dim} matrix",
                entries.len()
            )));
        }
        let u = Self { dim, entries };
        let dev = u.unitarity_deviation();
        if dev.is_nan() || dev >= T::TOLERANCE {
            return Err(SimError::InvalidInput(format!(
                "matrix is not unitary (max |U^dagger U - I| = {dev:e})"
            )));
        }
        Ok(u)
    }

    pub(crate) fn from_raw(dim: usize, entries: Vec<Complex<T>>) -> Self {
        debug_assert_eq!(entries.len(), dim * dim);
        Self { dim, entries }
    }

    fn from_real(dim: usize, values: &[f64]) -> Self {
        Self::from_raw(dim, values.iter().map(|&v| re(v)).collect())
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![Complex::new(T::zero(), T::zero()); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex::new(T::one(), T::zero());
        }
        Self::from_raw(dim, entries)
    }

    pub fn i2() -> Self {
        Self::identity(2)
    }

    pub fn pauli_x() -> Self {
        Self::from_real(2, &[0.0, 1.0, 1.0, 0.0])
    }

    pub fn pauli_y() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        let i = Complex::new(T::zero(), T::one());
        Self::from_raw(2, vec![z, -i, i, z])
    }

    pub fn pauli_z() -> Self {
        Self::from_real(2, &[1.0, 0.0, 0.0, -1.0])
    }

    pub fn hadamard() -> Self {
        let h = lit::<T>(0.5).sqrt();
        let c = |s: T| Complex::new(s * h, T::zero());
        Self::from_raw(2, vec![c(T::one()), c(T::one()), c(T::one()), c(-T::one())])
    }

    /// `[[0, -1], [1, 0]]`, Bob's correction for outcome `11`.
    pub fn corr11() -> Self {
        Self::from_real(2, &[0.0, -1.0, 1.0, 0.0])
    }

    /// Controlled-NOT with the more significant qubit as control.
    pub fn cnot() -> Self {
        #[rustfmt::skip]
        let m = [
            1.0, 0.0, 0.0, 0.0,
            0.0, 1.0, 0.0, 0.0,
            0.0, 0.0, 0.0, 1.0,
            0.0, 0.0, 1.0, 0.0,
        ];
        Self::from_real(4, &m)
    }

    pub fn swap() -> Self {
        #[rustfmt::skip]
        let m = [
            1.0, 0.0, 0.0, 0.0,
            0.0, 0.0, 1.0, 0.0,
            0.0, 1.0, 0.0, 0.0,
            0.0, 0.0, 0.0, 1.0,
        ];
        Self::from_real(4, &m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.entries[row * self.dim + col]
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let entries = (0..d * d)
            .map(|k| self.entries[(k % d) * d + k / d].conj())
            .collect();
        Self::from_raw(d, entries)
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in unitary product");
        let d = self.dim;
        let mut entries = vec![Complex::new(T::zero(), T::zero()); d * d];
        for r in 0..d {
            for c in 0..d {
                entries[r * d + c] = (0..d).fold(Complex::new(T::zero(), T::zero()), |acc, k| {
                    acc + self.get(r, k) * rhs.get(k, c)
                });
            }
        }
        Self::from_raw(d, entries)
    }

    /// Multiplies every entry by a unit-modulus phase.
    pub fn with_phase(&self, phase: Complex<T>) -> Self {
        Self::from_raw(self.dim, self.entries.iter().map(|&e| e * phase).collect())
    }

    /// Largest entry modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm().as_f64())
            .fold(0.0, f64::max)
    }

    /// `max |(U^dagger U - I)_{ij}|`.
    pub fn unitarity_deviation(&self) -> f64 {
        self.adjoint()
            .mul(self)
            .max_abs_diff(&Self::identity(self.dim))
    }
}

fn check_qubit<T: Real>(sv: &StateVector<T>, q: usize) -> Result<()> {
    if q >= sv.n_qubits() {
        return Err(SimError::InvalidInput(format!(
            "qubit {q} out of range for {} qubits",
            sv.n_qubits()
        )));
    }
    Ok(())
}

/// Applies a 2x2 unitary to qubit `target`.
pub fn apply_1q<T: Real>(
    sv: &StateVector<T>,
    u: &Unitary<T>,
    target: usize,
) -> Result<StateVector<T>> {
    if u.dim() != 2 {
        return Err(SimError::InvalidInput(
            "apply_1q needs a 2x2 unitary".into(),
        ));
    }
    check_qubit(sv, target)?;
    let mask = sv.mask(target);
    let (u00, u01, u10, u11) = (u.get(0, 0), u.get(0, 1), u.get(1, 0), u.get(1, 1));
    let mut amps = sv.amplitudes().to_vec();
    for i0 in (0..amps.len()).filter(|i| i & mask == 0) {
        let i1 = i0 | mask;
        let (a0, a1) = (amps[i0], amps[i1]);
        amps[i0] = u00 * a0 + u01 * a1;
        amps[i1] = u10 * a0 + u11 * a1;
    }
    Ok(StateVector::from_raw(amps))
}

fn check_pair<T: Real>(sv: &StateVector<T>, a: usize, b: usize) -> Result<()> {
    check_qubit(sv, a)?;
    check_qubit(sv, b)?;
    if a == b {
        return Err(SimError::InvalidInput(format!(
            "two-qubit gate needs distinct qubits, got {a} twice"
        )));
    }
    Ok(())
}

/// Flips `target` on every basis state whose `control` bit is 1.
pub fn apply_cnot<T: Real>(
    sv: &StateVector<T>,
    control: usize,
    target: usize,
) -> Result<StateVector<T>> {
    check_pair(sv, control, target)?;
    let (cm, tm) = (sv.mask(control), sv.mask(target));
    let src = sv.amplitudes();
    let amps = (0..src.len())
        .map(|i| if i & cm != 0 { src[i ^ tm] } else { src[i] })
        .collect();
    Ok(StateVector::from_raw(amps))
}

/// Applies a 4x4 unitary on qubits `(q_hi, q_lo)`; `q_hi` is the more significant
/// bit of the two-qubit subspace index.
pub fn apply_2q<T: Real>(
    sv: &StateVector<T>,
    u: &Unitary<T>,
    q_hi: usize,
    q_lo: usize,
) -> Result<StateVector<T>> {
    if u.dim() != 4 {
        return Err(SimError::InvalidInput(
            "apply_2q needs a 4x4 unitary".into(),
        ));
    }
    check_pair(sv, q_hi, q_lo)?;
    let (hm, lm) = (sv.mask(q_hi), sv.mask(q_lo));
    let mut amps = sv.amplitudes().to_vec();
    for base in (0..amps.len()).filter(|i| i & (hm | lm) == 0) {
        let idx = [base, base | lm, base | hm, base | hm | lm];
        let v = idx.map(|i| amps[i]);
        for (r, &out) in idx.iter().enumerate() {
            amps[out] = (0..4).fold(Complex::new(T::zero(), T::zero()), |acc, c| {
                acc + u.get(r, c) * v[c]
            });
        }
    }
    Ok(StateVector::from_raw(amps))
}

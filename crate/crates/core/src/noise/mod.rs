//! Error models for every fallible site of the protocol, plus the seeded
//! random streams they draw from.
//!
//! | site         | model                                                        |
//! |--------------|--------------------------------------------------------------|
//! | `bell`       | `normalize(bell + eta * g)`, `g` a standard complex Gaussian 4-vector |
//! | `xor`        | `exp(-iE) * CNOT`, `E = sigma * (G + G^dagger) / 2`          |
//! | `hadamard`   | `exp(-i eps . sigma_vec) * H`, `eps_k ~ N(0, sigma^2)`       |
//! | `correction` | same as `hadamard`, around Bob's chosen operator              |
//! | `readout`    | each reported bit flipped with probability `q`               |
//! | `channel`    | each transmitted bit flipped with probability `p`            |

mod rng;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;

pub use rng::{mix_seed, RngStream};

use crate::bits::Bits;
use crate::error::{Result, SimError};
use crate::gates::Unitary;
use crate::linalg::hermitian_exp_neg_i;
use crate::protocol::ideal_bell;
use crate::scalar::{lit, Real};
use crate::statevec::{normalize, StateVector};

/// A place in the protocol where an error can be injected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NoiseSite {
    Bell,
    Xor,
    Hadamard,
    Correction,
    Channel,
    Readout,
}

impl NoiseSite {
    pub const ALL: [NoiseSite; 6] = [
        NoiseSite::Bell,
        NoiseSite::Xor,
        NoiseSite::Hadamard,
        NoiseSite::Correction,
        NoiseSite::Channel,
        NoiseSite::Readout,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NoiseSite::Bell => "bell",
            NoiseSite::Xor => "xor",
            NoiseSite::Hadamard => "hadamard",
            NoiseSite::Correction => "correction",
            NoiseSite::Channel => "channel",
            NoiseSite::Readout => "readout",
        }
    }
}

impl fmt::Display for NoiseSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NoiseSite {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        NoiseSite::ALL
            .into_iter()
            .find(|site| site.name() == s)
            .ok_or_else(|| SimError::InvalidInput(format!("unknown noise site {s:?}")))
    }
}

/// Independent on/off switches, one per [`NoiseSite`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SiteFlags {
    pub bell: bool,
    pub xor: bool,
    pub hadamard: bool,
    pub correction: bool,
    pub channel: bool,
    pub readout: bool,
}

impl SiteFlags {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn all() -> Self {
        Self {
            bell: true,
            xor: true,
            hadamard: true,
            correction: true,
            channel: true,
            readout: true,
        }
    }

    pub fn only(site: NoiseSite) -> Self {
        Self::none().with(site, true)
    }

    /// `xor`, `hadamard` and `correction`: the sites driven by `sigma_gate`.
    pub fn gates() -> Self {
        Self::none()
            .with(NoiseSite::Xor, true)
            .with(NoiseSite::Hadamard, true)
            .with(NoiseSite::Correction, true)
    }

    pub fn with(mut self, site: NoiseSite, on: bool) -> Self {
        *self.flag_mut(site) = on;
        self
    }

    pub fn get(&self, site: NoiseSite) -> bool {
        match site {
            NoiseSite::Bell => self.bell,
            NoiseSite::Xor => self.xor,
            NoiseSite::Hadamard => self.hadamard,
            NoiseSite::Correction => self.correction,
            NoiseSite::Channel => self.channel,
            NoiseSite::Readout => self.readout,
        }
    }

    pub fn flag_mut(&mut self, site: NoiseSite) -> &mut bool {
        match site {
            NoiseSite::Bell => &mut self.bell,
            NoiseSite::Xor => &mut self.xor,
            NoiseSite::Hadamard => &mut self.hadamard,
            NoiseSite::Correction => &mut self.correction,
            NoiseSite::Channel => &mut self.channel,
            NoiseSite::Readout => &mut self.readout,
        }
    }

    pub fn any(&self) -> bool {
        NoiseSite::ALL.iter().any(|&s| self.get(s))
    }
}

/// All error magnitudes for a run, plus the master seed.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NoiseConfig {
    /// Bell-pair perturbation magnitude (dimensionless).
    pub eta_bell: f64,
    /// Gate imprecision scale in radians.
    pub sigma_gate: f64,
    /// Per-bit flip probability on the classical channel.
    pub p_classical: f64,
    /// Per-bit misreport probability of Alice's measurement record.
    pub q_readout: f64,
    pub seed: u64,
    pub sites: SiteFlags,
}

impl NoiseConfig {
    /// Noise-free configuration with the given seed.
    pub fn ideal(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let magnitude = |name: &str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(SimError::InvalidInput(format!(
                    "{name} = {v} must be finite and non-negative"
                )))
            }
        };
        let probability = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(SimError::InvalidInput(format!(
                    "{name} = {v} must lie in [0, 1]"
                )))
            }
        };
        magnitude("eta_bell", self.eta_bell)?;
        magnitude("sigma_gate", self.sigma_gate)?;
        probability("p_classical", self.p_classical)?;
        probability("q_readout", self.q_readout)
    }
}

/// Bell pair `(|00> + |11>)/sqrt(2)` displaced by `eta` times a standard complex
/// Gaussian 4-vector, renormalized. Always consumes four complex draws.
pub fn sample_noisy_bell<T: Real>(eta: f64, rng: &mut RngStream) -> StateVector<T> {
    assert!(
        eta.is_finite() && eta >= 0.0,
        "eta must be finite and non-negative"
    );
    let g: [Complex<f64>; 4] = std::array::from_fn(|_| rng.complex_gaussian());
    let ideal = ideal_bell::<T>();
    if eta == 0.0 {
        return ideal;
    }
    let amps = ideal
        .amplitudes()
        .iter()
        .zip(g)
        .map(|(&a, g)| a + Complex::new(lit::<T>(eta * g.re), lit::<T>(eta * g.im)))
        .collect();
    normalize(amps).expect("a Gaussian displacement of a unit vector is almost surely nonzero")
}

/// Random error unitary `exp(-iE)` of the given dimension.
///
/// For `dim == 2`, `E = eps . (X, Y, Z)` with `eps_k ~ N(0, sigma^2)`, using the
/// closed form `cos|eps| I - i sin|eps| (eps_hat . sigma_vec)`. For `dim == 4`,
/// `E = sigma (G + G^dagger)/2` with `G` standard complex Gaussian, exponentiated
/// through its eigendecomposition.
pub fn sample_gate_error<T: Real>(dim: usize, sigma: f64, rng: &mut RngStream) -> Unitary<T> {
    assert!(
        sigma.is_finite() && sigma >= 0.0,
        "sigma must be finite and non-negative"
    );
    match dim {
        2 => {
            let eps = [0; 3].map(|_| sigma * rng.standard_normal());
            let angle = eps.iter().map(|e| e * e).sum::<f64>().sqrt();
            if angle == 0.0 {
                return Unitary::i2();
            }
            let [nx, ny, nz] = eps.map(|e| e / angle);
            let (s, c) = angle.sin_cos();
            let z = |re: f64, im: f64| Complex::new(lit::<T>(re), lit::<T>(im));
            Unitary::from_raw(
                2,
                vec![
                    z(c, -s * nz),
                    z(-s * ny, -s * nx),
                    z(s * ny, -s * nx),
                    z(c, s * nz),
                ],
            )
        }
        4 => {
            let g: Vec<Complex<f64>> = (0..16).map(|_| rng.complex_gaussian()).collect();
            if sigma == 0.0 {
                return Unitary::identity(4);
            }
            let h: Vec<Complex<T>> = (0..16)
                .map(|k| {
                    let (r, c) = (k / 4, k % 4);
                    let e = (g[k] + g[c * 4 + r].conj()) * (sigma / 2.0);
                    Complex::new(lit(e.re), lit(e.im))
                })
                .collect();
            Unitary::from_raw(4, hermitian_exp_neg_i(&h, 4))
        }
        _ => panic!("gate errors are defined for 2x2 and 4x4 unitaries only"),
    }
}

/// `exp(-iE) * u` with `E` drawn by [`sample_gate_error`].
pub fn perturb_unitary<T: Real>(u: &Unitary<T>, sigma: f64, rng: &mut RngStream) -> Unitary<T> {
    let err = sample_gate_error(u.dim(), sigma, rng);
    if sigma == 0.0 {
        return u.clone();
    }
    err.mul(u)
}

/// Mask with each of `len` bits set independently with probability `p`.
pub fn flip_mask(len: usize, p: f64, rng: &mut RngStream) -> Bits {
    assert!(
        (0.0..=1.0).contains(&p),
        "flip probability must lie in [0, 1]"
    );
    let flips: Vec<bool> = (0..len).map(|_| rng.bernoulli(p)).collect();
    Bits::from_bools(&flips).expect("mask length matches a valid bit string")
}

/// Flips each bit of `bits` independently with probability `p`.
pub fn flip_bits(bits: Bits, p: f64, rng: &mut RngStream) -> Bits {
    bits.xor(flip_mask(bits.len(), p, rng))
}

/// Haar-uniform qubit `cos(t/2)|0> + e^{i phi} sin(t/2)|1>` with `cos t` uniform
/// on `[-1, 1]` and `phi` uniform on `[0, 2 pi)`.
pub fn haar_random_qubit<T: Real>(rng: &mut RngStream) -> StateVector<T> {
    let cos_theta = 2.0 * rng.uniform() - 1.0;
    let phi = std::f64::consts::TAU * rng.uniform();
    let a = ((1.0 + cos_theta) / 2.0).sqrt();
    let b = Complex::from_polar(((1.0 - cos_theta) / 2.0).sqrt(), phi);
    normalize(vec![
        Complex::new(lit(a), T::zero()),
        Complex::new(lit(b.re), lit(b.im)),
    ])
    .expect("Haar sample has unit norm")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::apply_1q;

    #[test]
    fn config_validation_names_the_field() {
        let mut c = NoiseConfig::ideal(1);
        assert!(c.validate().is_ok());
        c.p_classical = 1.5;
        assert!(c
            .validate()
            .unwrap_err()
            .to_string()
            .contains("p_classical"));
        c = NoiseConfig::ideal(1);
        c.sigma_gate = -0.1;
        assert!(c.validate().unwrap_err().to_string().contains("sigma_gate"));
        c = NoiseConfig::ideal(1);
        c.eta_bell = f64::INFINITY;
        assert!(c.validate().is_err());
        c = NoiseConfig::ideal(1);
        c.q_readout = f64::NAN;
        assert!(c.validate().unwrap_err().to_string().contains("q_readout"));
    }

    #[test]
    fn site_names_round_trip() {
        for s in NoiseSite::ALL {
            assert_eq!(s.name().parse::<NoiseSite>().unwrap(), s);
            assert!(SiteFlags::only(s).get(s));
            assert!(!SiteFlags::only(s).with(s, false).any());
        }
        assert!("gamma".parse::<NoiseSite>().is_err());
        assert!(SiteFlags::all().any());
    }

    #[test]
    fn zero_eta_gives_exact_bell() {
        let mut rng = RngStream::new(4);
        assert_eq!(sample_noisy_bell::<f64>(0.0, &mut rng), ideal_bell());
    }

    #[test]
    fn noisy_bell_is_normalized() {
        let mut rng = RngStream::new(4);
        for eta in [0.01, 0.3, 2.0, 50.0] {
            for _ in 0..200 {
                let s = sample_noisy_bell::<f64>(eta, &mut rng);
                assert!((s.squared_norm() - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn small_eta_keeps_high_fidelity() {
        let mut rng = RngStream::new(10);
        let bell = ideal_bell::<f64>();
        let good = (0..10_000)
            .filter(|_| {
                sample_noisy_bell::<f64>(0.1, &mut rng)
                    .fidelity(&bell)
                    .unwrap()
                    >= 0.9
            })
            .count();
        assert!(good >= 9_900, "only {good} of 10000 draws reached 0.9");
    }

    #[test]
    fn bell_infidelity_grows_with_eta() {
        let bell = ideal_bell::<f64>();
        let means: Vec<f64> = [0.01, 0.05, 0.1, 0.2]
            .iter()
            .map(|&eta| {
                let mut rng = RngStream::new(77);
                (0..10_000)
                    .map(|_| {
                        1.0 - sample_noisy_bell::<f64>(eta, &mut rng)
                            .fidelity(&bell)
                            .unwrap()
                    })
                    .sum::<f64>()
                    / 10_000.0
            })
            .collect();
        assert!(means.windows(2).all(|w| w[0] < w[1]), "{means:?}");
    }

    #[test]
    fn zero_sigma_leaves_gates_unchanged() {
        let mut rng = RngStream::new(3);
        let h = Unitary::<f64>::hadamard();
        assert_eq!(perturb_unitary(&h, 0.0, &mut rng), h);
        let cnot = Unitary::<f64>::cnot();
        assert_eq!(perturb_unitary(&cnot, 0.0, &mut rng), cnot);
    }

    #[test]
    fn perturbed_gates_stay_unitary() {
        let mut rng = RngStream::new(12);
        for _ in 0..1000 {
            let u2 = perturb_unitary(&Unitary::<f64>::hadamard(), 0.3, &mut rng);
            assert!(u2.unitarity_deviation() < 1e-9);
            let u4 = perturb_unitary(&Unitary::<f64>::cnot(), 0.3, &mut rng);
            assert!(u4.unitarity_deviation() < 1e-9);
        }
        for sigma in [5.0, 40.0] {
            assert!(sample_gate_error::<f64>(4, sigma, &mut rng).unitarity_deviation() < 1e-9);
            assert!(sample_gate_error::<f64>(2, sigma, &mut rng).unitarity_deviation() < 1e-9);
        }
    }

    #[test]
    fn single_qubit_error_matches_pauli_expansion() {
        // exp(-i eps.sigma) rebuilt from the Pauli matrices with the same draws.
        let mut a = RngStream::new(31);
        let mut b = RngStream::new(31);
        let u = sample_gate_error::<f64>(2, 0.4, &mut a);
        let eps = [0; 3].map(|_| 0.4 * b.standard_normal());
        let t = eps.iter().map(|e| e * e).sum::<f64>().sqrt();
        let paulis = [
            Unitary::<f64>::pauli_x(),
            Unitary::pauli_y(),
            Unitary::pauli_z(),
        ];
        for r in 0..2 {
            for c in 0..2 {
                let id = if r == c { t.cos() } else { 0.0 };
                let gen: Complex<f64> = (0..3).map(|k| paulis[k].get(r, c) * (eps[k] / t)).sum();
                let expect = Complex::new(id, 0.0) - Complex::new(0.0, t.sin()) * gen;
                assert!((u.get(r, c) - expect).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn gate_error_infidelity_scales_quadratically() {
        let h = Unitary::<f64>::hadamard();
        let zero = StateVector::<f64>::basis_state(1, "0").unwrap();
        let target = apply_1q(&zero, &h, 0).unwrap();
        let sigmas = [0.01, 0.03, 0.1];
        let losses: Vec<f64> = sigmas
            .iter()
            .map(|&s| {
                let mut rng = RngStream::new(5);
                (0..10_000)
                    .map(|_| {
                        let u = perturb_unitary(&h, s, &mut rng);
                        1.0 - apply_1q(&zero, &u, 0).unwrap().fidelity(&target).unwrap()
                    })
                    .sum::<f64>()
                    / 10_000.0
            })
            .collect();
        let slope = log_log_slope(&sigmas, &losses);
        assert!((1.7..=2.3).contains(&slope), "slope {slope}");
    }

    fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
        let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
        let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
        let n = x.len() as f64;
        let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
        let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
        let var: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
        cov / var
    }

    #[test]
    fn flip_extremes_and_rate() {
        let mut rng = RngStream::new(6);
        let bits: Bits = "01".parse().unwrap();
        assert_eq!(flip_bits(bits, 0.0, &mut rng), bits);
        assert_eq!(flip_bits(bits, 1.0, &mut rng).to_string(), "10");
        let mut counts = [0usize; 2];
        for _ in 0..10_000 {
            let out = flip_bits(bits, 0.5, &mut rng);
            for (i, c) in counts.iter_mut().enumerate() {
                *c += usize::from(out.bit(i) != bits.bit(i));
            }
        }
        for c in counts {
            assert!((c as f64 / 10_000.0 - 0.5).abs() <= 0.02, "{c}");
        }
    }

    #[test]
    fn haar_qubits_are_normalized_and_uniform() {
        let mut rng = RngStream::new(21);
        let n = 10_000;
        let mut sum_a2 = 0.0;
        for _ in 0..n {
            let q = haar_random_qubit::<f64>(&mut rng);
            assert!((q.squared_norm() - 1.0).abs() < 1e-12);
            sum_a2 += q.amplitude(0).norm_sqr();
        }
        assert!((sum_a2 / n as f64 - 0.5).abs() < 0.01);
    }

    #[test]
    fn haar_pauli_overlap_averages_one_third() {
        let mut rng = RngStream::new(22);
        let n = 100_000;
        let paulis = [
            Unitary::<f64>::pauli_x(),
            Unitary::pauli_y(),
            Unitary::pauli_z(),
        ];
        let mut sums = [0.0; 3];
        for _ in 0..n {
            let q = haar_random_qubit::<f64>(&mut rng);
            for (s, p) in sums.iter_mut().zip(&paulis) {
                *s += q.fidelity(&apply_1q(&q, p, 0).unwrap()).unwrap();
            }
        }
        for s in sums {
            assert!((s / n as f64 - 1.0 / 3.0).abs() < 0.01, "{}", s / n as f64);
        }
    }

    #[test]
    fn samplers_are_seed_deterministic() {
        let draw = |seed| {
            let mut rng = RngStream::new(seed);
            (
                sample_noisy_bell::<f64>(0.2, &mut rng),
                perturb_unitary(&Unitary::<f64>::cnot(), 0.2, &mut rng),
                haar_random_qubit::<f64>(&mut rng),
                flip_mask(2, 0.5, &mut rng),
            )
        };
        assert_eq!(draw(9), draw(9));
    }

    #[test]
    fn single_precision_samplers() {
        let mut rng = RngStream::new(9);
        let u = perturb_unitary(&Unitary::<f32>::cnot(), 0.3, &mut rng);
        assert!(u.unitarity_deviation() < f32::TOLERANCE);
        let q = haar_random_qubit::<f32>(&mut rng);
        assert!((q.squared_norm() - 1.0).abs() < 1e-6);
    }
}

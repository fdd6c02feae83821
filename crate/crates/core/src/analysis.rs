//! Monte Carlo experiments over many teleportation trials.
//!
//! Trial `i` of an estimate seeded with `s` draws its Haar-random input and all
//! of its noise from `RngStream::child(s, i)`. Trials run in parallel and are
//! reduced in index order, so results do not depend on thread scheduling.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Result, SimError};
use crate::gates::{apply_1q, Unitary};
use crate::noise::{
    haar_random_qubit, mix_seed, sample_noisy_bell, NoiseConfig, NoiseSite, RngStream, SiteFlags,
};
use crate::protocol::{Teleporter, MEASURED};

/// Mean and standard error of a sample.
fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Fidelity statistics over a batch of sampled trials.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FidelityEstimate {
    pub mean: f64,
    pub stderr: f64,
    /// Counts of Alice's true outcomes `00, 01, 10, 11`.
    pub histogram: [u64; 4],
    pub trials: u64,
}

/// Runs `n_trials` sampled teleportations of Haar-random inputs.
pub fn estimate_fidelity(
    config: &NoiseConfig,
    n_trials: u64,
    seed: u64,
) -> Result<FidelityEstimate> {
    if n_trials == 0 {
        return Err(SimError::InvalidInput("n_trials must be at least 1".into()));
    }
    let teleporter = Teleporter::new(*config)?;
    let results = (0..n_trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngStream::child(seed, i);
            let input = haar_random_qubit::<f64>(&mut rng);
            teleporter
                .run(&input, &mut rng)
                .map(|r| (r.fidelity, r.outcome.value() as usize))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut histogram = [0u64; 4];
    for &(_, k) in &results {
        histogram[k] += 1;
    }
    let fidelities: Vec<f64> = results.into_iter().map(|(f, _)| f).collect();
    let (mean, stderr) = mean_and_stderr(&fidelities);
    Ok(FidelityEstimate {
        mean,
        stderr,
        histogram,
        trials: n_trials,
    })
}

/// `(mean, stderr)` of the teleported fidelity.
pub fn estimate_mean_fidelity(
    config: &NoiseConfig,
    n_trials: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    estimate_fidelity(config, n_trials, seed).map(|e| (e.mean, e.stderr))
}

/// Mean fidelity when each transmitted bit flips with probability `p`:
/// no flip keeps fidelity 1, any net flip applies a wrong Pauli whose Haar-averaged
/// fidelity is 1/3.
pub fn channel_flip_fidelity(p: f64) -> f64 {
    let clean = (1.0 - p) * (1.0 - p);
    clean + (1.0 - clean) / 3.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SweepParameter {
    EtaBell,
    SigmaGate,
    PClassical,
    QReadout,
}

impl SweepParameter {
    pub const ALL: [SweepParameter; 4] = [
        SweepParameter::EtaBell,
        SweepParameter::SigmaGate,
        SweepParameter::PClassical,
        SweepParameter::QReadout,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::EtaBell => "eta_bell",
            SweepParameter::SigmaGate => "sigma_gate",
            SweepParameter::PClassical => "p_classical",
            SweepParameter::QReadout => "q_readout",
        }
    }

    /// Sites whose error magnitude this parameter sets.
    pub fn sites(self) -> &'static [NoiseSite] {
        match self {
            SweepParameter::EtaBell => &[NoiseSite::Bell],
            SweepParameter::SigmaGate => {
                &[NoiseSite::Xor, NoiseSite::Hadamard, NoiseSite::Correction]
            }
            SweepParameter::PClassical => &[NoiseSite::Channel],
            SweepParameter::QReadout => &[NoiseSite::Readout],
        }
    }

    /// `base` with this parameter set to `value`. When none of the parameter's
    /// sites is enabled in `base`, all of them are switched on.
    pub fn apply(self, base: &NoiseConfig, value: f64) -> NoiseConfig {
        let mut cfg = *base;
        match self {
            SweepParameter::EtaBell => cfg.eta_bell = value,
            SweepParameter::SigmaGate => cfg.sigma_gate = value,
            SweepParameter::PClassical => cfg.p_classical = value,
            SweepParameter::QReadout => cfg.q_readout = value,
        }
        if !self.sites().iter().any(|&s| cfg.sites.get(s)) {
            for &s in self.sites() {
                *cfg.sites.flag_mut(s) = true;
            }
        }
        cfg
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParameter {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        SweepParameter::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| SimError::InvalidInput(format!("unknown sweep parameter {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    pub trials_per_point: u64,
    pub base_config: NoiseConfig,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(SimError::InvalidInput(
                "sweep needs at least one value".into(),
            ));
        }
        if self.trials_per_point == 0 {
            return Err(SimError::InvalidInput(
                "trials_per_point must be at least 1".into(),
            ));
        }
        for &v in &self.values {
            self.parameter.apply(&self.base_config, v).validate()?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub mean_fidelity: f64,
    pub stderr: f64,
    pub histogram: [u64; 4],
    pub trials: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub parameter: SweepParameter,
    pub points: Vec<SweepPoint>,
}

pub const SWEEP_CSV_HEADER: &str = "param,value,mean_fidelity,stderr,n00,n01,n10,n11,trials";

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(SWEEP_CSV_HEADER);
        out.push('\n');
        for p in &self.points {
            let [n00, n01, n10, n11] = p.histogram;
            let _ = writeln!(
                out,
                "{},{},{},{},{n00},{n01},{n10},{n11},{}",
                self.parameter,
                format_number(p.value),
                format_number(p.mean_fidelity),
                format_number(p.stderr),
                p.trials
            );
        }
        out
    }
}

/// One estimate per value; point `k` is seeded with `mix_seed(base seed, k)`.
pub fn sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let points = spec
        .values
        .iter()
        .enumerate()
        .map(|(k, &value)| {
            let cfg = spec.parameter.apply(&spec.base_config, value);
            let est = estimate_fidelity(
                &cfg,
                spec.trials_per_point,
                mix_seed(spec.base_config.seed, k as u64),
            )?;
            Ok(SweepPoint {
                value,
                mean_fidelity: est.mean,
                stderr: est.stderr,
                histogram: est.histogram,
                trials: est.trials,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        parameter: spec.parameter,
        points,
    })
}

/// Which sites were noisy in one row of the amplification experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AmplificationSites {
    Only(NoiseSite),
    All,
}

impl fmt::Display for AmplificationSites {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AmplificationSites::Only(site) => site.fmt(f),
            AmplificationSites::All => f.write_str("all"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmplificationRow {
    pub sites: AmplificationSites,
    pub mean_infidelity: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AmplificationReport {
    pub sigma: f64,
    pub trials: u64,
    /// Four single-site rows (bell, xor, hadamard, correction) then the all-site row.
    pub rows: Vec<AmplificationRow>,
}

pub const AMPLIFICATION_CSV_HEADER: &str =
    "sites,mean_infidelity,stderr,trials,ratio_to_max_single";

impl AmplificationReport {
    pub fn single_site(&self) -> &[AmplificationRow] {
        &self.rows[..4]
    }

    pub fn all_sites(&self) -> &AmplificationRow {
        &self.rows[4]
    }

    pub fn max_single(&self) -> &AmplificationRow {
        self.single_site()
            .iter()
            .max_by(|a, b| a.mean_infidelity.total_cmp(&b.mean_infidelity))
            .expect("four single-site rows")
    }

    /// All-site infidelity over the largest single-site infidelity.
    pub fn ratio(&self) -> f64 {
        self.all_sites().mean_infidelity / self.max_single().mean_infidelity
    }

    pub fn to_csv(&self) -> String {
        let max = self.max_single().mean_infidelity;
        let mut out = String::from(AMPLIFICATION_CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                row.sites,
                format_number(row.mean_infidelity),
                format_number(row.stderr),
                self.trials,
                format_number(row.mean_infidelity / max)
            );
        }
        out
    }
}

pub const AMPLIFIED_SITES: [NoiseSite; 4] = [
    NoiseSite::Bell,
    NoiseSite::Xor,
    NoiseSite::Hadamard,
    NoiseSite::Correction,
];

/// Infidelity with each of the four quantum sites noisy alone, then all at once.
///
/// The Bell site uses `eta_bell = sigma`, gate sites use `sigma_gate = sigma`.
/// Every row uses the same seed, so rows share their Haar inputs.
pub fn amplification_experiment(sigma: f64, trials: u64, seed: u64) -> Result<AmplificationReport> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(SimError::InvalidInput(format!(
            "sigma = {sigma} must be positive"
        )));
    }
    let base = NoiseConfig {
        eta_bell: sigma,
        sigma_gate: sigma,
        seed,
        ..NoiseConfig::default()
    };
    let all = AMPLIFIED_SITES
        .iter()
        .fold(SiteFlags::none(), |f, &s| f.with(s, true));
    let layouts = AMPLIFIED_SITES
        .iter()
        .map(|&s| (AmplificationSites::Only(s), SiteFlags::only(s)))
        .chain(std::iter::once((AmplificationSites::All, all)));
    let rows = layouts
        .map(|(sites, flags)| {
            let est = estimate_fidelity(
                &NoiseConfig {
                    sites: flags,
                    ..base
                },
                trials,
                seed,
            )?;
            Ok(AmplificationRow {
                sites,
                mean_infidelity: 1.0 - est.mean,
                stderr: est.stderr,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AmplificationReport {
        sigma,
        trials,
        rows,
    })
}

/// Correlators measured on sacrificed pairs from a Bell source.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertifierReport {
    pub n_pairs: u64,
    pub zz_correlator: f64,
    pub xx_correlator: f64,
    pub stderr_zz: f64,
    pub stderr_xx: f64,
}

pub const CERTIFIER_CSV_HEADER: &str = "n_pairs,zz_correlator,stderr_zz,xx_correlator,stderr_xx";

impl CertifierReport {
    pub fn to_csv(&self) -> String {
        format!(
            "{CERTIFIER_CSV_HEADER}\n{},{},{},{},{}\n",
            self.n_pairs,
            format_number(self.zz_correlator),
            format_number(self.stderr_zz),
            format_number(self.xx_correlator),
            format_number(self.stderr_xx)
        )
    }
}

/// `(agreements - disagreements) / n` and its normal-approximation standard error
/// `sqrt((1 - c^2) / n)`.
fn correlator(products: impl Iterator<Item = i64>) -> (f64, f64) {
    let (sum, n) = products.fold((0i64, 0u64), |(s, n), p| (s + p, n + 1));
    let c = sum as f64 / n as f64;
    (c, ((1.0 - c * c).max(0.0) / n as f64).sqrt())
}

/// Draws `n_pairs` pairs from a source of Bell-state perturbation `eta` and
/// destroys each one: even-indexed pairs are measured in the Z basis on both
/// qubits, odd-indexed pairs in the X basis.
pub fn certify_source(eta: f64, n_pairs: u64, seed: u64) -> Result<CertifierReport> {
    if n_pairs < 2 {
        return Err(SimError::InvalidInput(
            "certification needs at least 2 pairs".into(),
        ));
    }
    if !(eta.is_finite() && eta >= 0.0) {
        return Err(SimError::InvalidInput(format!(
            "eta = {eta} must be non-negative"
        )));
    }
    let h = Unitary::<f64>::hadamard();
    let products = (0..n_pairs)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngStream::child(seed, i);
            let mut pair = sample_noisy_bell::<f64>(eta, &mut rng);
            if i % 2 == 1 {
                pair = apply_1q(&apply_1q(&pair, &h, 0)?, &h, 1)?;
            }
            let m = pair.measure_qubits(&MEASURED, &mut rng)?;
            Ok(if m.outcome.bit(0) == m.outcome.bit(1) {
                1
            } else {
                -1
            })
        })
        .collect::<Result<Vec<i64>>>()?;
    let (zz, stderr_zz) = correlator(products.iter().step_by(2).copied());
    let (xx, stderr_xx) = correlator(products.iter().skip(1).step_by(2).copied());
    Ok(CertifierReport {
        n_pairs,
        zz_correlator: zz,
        xx_correlator: xx,
        stderr_zz,
        stderr_xx,
    })
}

/// Fixed-point text with 12 significant digits; scientific outside `[1e-6, 1e12)`.
///
/// Rust's float formatting is exact, so the text depends only on the value.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0.00000000000".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.11e}");
    let exp: i32 = sci
        .rsplit_once('e')
        .and_then(|(_, e)| e.parse().ok())
        .expect("exponent in scientific format");
    if (-6..12).contains(&exp) {
        format!("{:.*}", (11 - exp) as usize, x)
    } else {
        sci
    }
}

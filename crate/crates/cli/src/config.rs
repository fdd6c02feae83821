//! JSON run configuration with command-line overrides.
//!
//! ```json
//! {
//!   "command": "sweep",
//!   "trials": 10000,
//!   "noise": {
//!     "eta_bell": 0.0, "sigma_gate": 0.0, "p_classical": 0.0, "q_readout": 0.0,
//!     "seed": 42,
//!     "sites": { "bell": false, "xor": false, "hadamard": false,
//!                "correction": false, "channel": false, "readout": false }
//!   },
//!   "sweep": { "parameter": "p_classical", "values": [0.0, 0.1] },
//!   "output": { "path": "out.csv", "format": "csv" }
//! }
//! ```
//!
//! Every field is optional in the file. Unset magnitudes are 0, unset sites are
//! off, `trials` is 10000. The seed must be given, in the file or with `--seed`.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Deserialize;
use teleport_core::{NoiseConfig, NoiseSite, SiteFlags, SweepSpec};
use thiserror::Error;

pub const DEFAULT_TRIALS: u64 = 10_000;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("malformed config at `{path}`: {message}")]
    Malformed { path: String, message: String },
    #[error("invalid value for `{key}`: {message}")]
    Invalid { key: String, message: String },
    #[error("missing `{key}`: {message}")]
    Missing { key: String, message: String },
}

fn invalid(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        message: message.into(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Run,
    Estimate,
    Sweep,
    Amplify,
    Certify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Run => "run",
            Command::Estimate => "estimate",
            Command::Sweep => "sweep",
            Command::Amplify => "amplify",
            Command::Certify => "certify",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            Command::Run,
            Command::Estimate,
            Command::Sweep,
            Command::Amplify,
            Command::Certify,
        ]
        .into_iter()
        .find(|c| c.name() == s)
        .ok_or_else(|| invalid("command", format!("unknown command {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(invalid(
                "format",
                format!("expected csv or json, got {other:?}"),
            )),
        }
    }
}

/// A validated run description.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub noise: NoiseConfig,
    pub trials: u64,
    pub sweep: Option<SweepSpec>,
    pub output_path: Option<PathBuf>,
    pub output_format: OutputFormat,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    command: Option<String>,
    trials: Option<u64>,
    noise: Option<FileNoise>,
    sweep: Option<FileSweep>,
    output: Option<FileOutput>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileNoise {
    eta_bell: Option<f64>,
    sigma_gate: Option<f64>,
    p_classical: Option<f64>,
    q_readout: Option<f64>,
    seed: Option<u64>,
    sites: Option<FileSites>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileSites {
    bell: Option<bool>,
    xor: Option<bool>,
    hadamard: Option<bool>,
    correction: Option<bool>,
    channel: Option<bool>,
    readout: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileSweep {
    parameter: Option<String>,
    values: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileOutput {
    path: Option<PathBuf>,
    format: Option<String>,
}

fn parse_number<T: FromStr>(key: &str, text: &str) -> Result<T, ConfigError> {
    text.trim()
        .parse()
        .map_err(|_| invalid(key, format!("cannot parse {text:?}")))
}

/// Parses `json_text` and applies `overrides`, which win over file values.
///
/// Override keys: `command`, `seed`, `trials`, `param`, `values` (comma-separated
/// list), `out`, `format`.
pub fn parse_config(
    json_text: &str,
    overrides: &[(String, String)],
) -> Result<RunConfig, ConfigError> {
    let text = if json_text.trim().is_empty() {
        "{}"
    } else {
        json_text
    };
    let mut de = serde_json::Deserializer::from_str(text);
    let file: FileConfig = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        ConfigError::Malformed {
            path,
            message: e.into_inner().to_string(),
        }
    })?;

    let mut command = file.command.as_deref().map(str::parse).transpose()?;
    let mut trials = file.trials;
    let noise_file = file.noise.unwrap_or_default();
    let mut seed = noise_file.seed;
    let sweep_file = file.sweep.unwrap_or_default();
    let mut parameter = sweep_file.parameter;
    let mut values = sweep_file.values;
    let output_file = file.output.unwrap_or_default();
    let mut output_path = output_file.path;
    let mut format = output_file.format.as_deref().map(str::parse).transpose()?;

    for (key, value) in overrides {
        match key.as_str() {
            "command" => command = Some(value.parse()?),
            "seed" => seed = Some(parse_number("seed", value)?),
            "trials" => trials = Some(parse_number("trials", value)?),
            "param" => parameter = Some(value.clone()),
            "values" => {
                values = Some(
                    value
                        .split(',')
                        .map(|v| parse_number("values", v))
                        .collect::<Result<_, _>>()?,
                )
            }
            "out" => output_path = Some(PathBuf::from(value)),
            "format" => format = Some(value.parse()?),
            other => return Err(invalid(other, "unknown override")),
        }
    }

    let command = command.ok_or_else(|| ConfigError::Missing {
        key: "command".into(),
        message: "one of run, estimate, sweep, amplify, certify".into(),
    })?;
    let seed = seed.ok_or_else(|| ConfigError::Missing {
        key: "seed".into(),
        message: "runs are seeded explicitly (noise.seed or --seed)".into(),
    })?;
    let trials = trials.unwrap_or(DEFAULT_TRIALS);
    if trials == 0 {
        return Err(invalid("trials", "must be at least 1"));
    }

    let sites_file = noise_file.sites.unwrap_or_default();
    let mut sites = SiteFlags::none();
    for (site, flag) in [
        (NoiseSite::Bell, sites_file.bell),
        (NoiseSite::Xor, sites_file.xor),
        (NoiseSite::Hadamard, sites_file.hadamard),
        (NoiseSite::Correction, sites_file.correction),
        (NoiseSite::Channel, sites_file.channel),
        (NoiseSite::Readout, sites_file.readout),
    ] {
        *sites.flag_mut(site) = flag.unwrap_or(false);
    }
    let noise = NoiseConfig {
        eta_bell: noise_file.eta_bell.unwrap_or(0.0),
        sigma_gate: noise_file.sigma_gate.unwrap_or(0.0),
        p_classical: noise_file.p_classical.unwrap_or(0.0),
        q_readout: noise_file.q_readout.unwrap_or(0.0),
        seed,
        sites,
    };
    noise.validate().map_err(|e| {
        let msg = e.to_string();
        let key = ["eta_bell", "sigma_gate", "p_classical", "q_readout"]
            .into_iter()
            .find(|k| msg.contains(k))
            .unwrap_or("noise");
        invalid(&format!("noise.{key}"), msg)
    })?;

    let sweep = match (parameter, values) {
        (Some(p), Some(v)) => {
            let spec = SweepSpec {
                parameter: p.parse().map_err(|e: teleport_core::SimError| {
                    invalid("sweep.parameter", e.to_string())
                })?,
                values: v,
                trials_per_point: trials,
                base_config: noise,
            };
            spec.validate().map_err(|e| {
                invalid(&format!("sweep.values ({})", spec.parameter), e.to_string())
            })?;
            Some(spec)
        }
        (None, None) => None,
        (Some(_), None) => {
            return Err(ConfigError::Missing {
                key: "sweep.values".into(),
                message: "a sweep parameter needs values (or --values)".into(),
            })
        }
        (None, Some(_)) => {
            return Err(ConfigError::Missing {
                key: "sweep.parameter".into(),
                message: "sweep values need a parameter (or --param)".into(),
            })
        }
    };

    match command {
        Command::Sweep if sweep.is_none() => {
            return Err(ConfigError::Missing {
                key: "sweep".into(),
                message: "the sweep command needs a parameter and values".into(),
            })
        }
        Command::Amplify if noise.sigma_gate <= 0.0 => {
            return Err(invalid("noise.sigma_gate", "amplify needs sigma_gate > 0"))
        }
        Command::Certify if trials < 2 => {
            return Err(invalid("trials", "certify needs at least 2 pairs"))
        }
        _ => {}
    }

    let output_format = format.unwrap_or(match command {
        Command::Run => OutputFormat::Json,
        _ => OutputFormat::Csv,
    });

    Ok(RunConfig {
        command,
        noise,
        trials,
        sweep,
        output_path,
        output_format,
    })
}

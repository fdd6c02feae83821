//! Command dispatch and output rendering.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use serde_json::{json, Value};
use teleport_core::analysis::{format_number, FidelityEstimate};
use teleport_core::{
    amplification_experiment, certify_source, estimate_fidelity, haar_random_qubit, run_trial,
    sweep, AmplificationReport, CertifierReport, Record, RngStream, SimError, State, SweepResult,
};
use thiserror::Error;

use crate::config::{Command, OutputFormat, RunConfig};

#[derive(Debug, Error)]
pub enum ExecError {
    #[error("cannot write {path}: {source}")]
    Output { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Simulation(#[from] SimError),
}

impl ExecError {
    /// 2 for output failures, 3 for internal contract violations.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExecError::Output { .. } => 2,
            ExecError::Simulation(_) => 3,
        }
    }
}

/// JSON number carrying the same 12 significant digits as the CSV output.
fn num(x: f64) -> Value {
    match format_number(x).parse::<f64>() {
        Ok(v) if v.is_finite() => json!(v),
        _ => Value::Null,
    }
}

fn complex(z: teleport_core::Amplitude) -> Value {
    json!({ "re": num(z.re), "im": num(z.im) })
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

pub fn record_json(r: &Record) -> Value {
    json!({
        "input_a": complex(r.input_a),
        "input_b": complex(r.input_b),
        "outcome": r.outcome.to_string(),
        "reported": r.reported.to_string(),
        "received": r.received.to_string(),
        "correction": r.correction.name(),
        "bob_state": r.bob_state.amplitudes().iter().map(|&z| complex(z)).collect::<Vec<_>>(),
        "fidelity": num(r.fidelity),
        "branch_probability": num(r.branch_probability),
    })
}

const RECORD_CSV_HEADER: &str =
    "input_a_re,input_a_im,input_b_re,input_b_im,outcome,reported,received,\
correction,bob_0_re,bob_0_im,bob_1_re,bob_1_im,fidelity,branch_probability";

fn record_csv(r: &Record) -> String {
    let bob = r.bob_state.amplitudes();
    let fields = [r.input_a.re, r.input_a.im, r.input_b.re, r.input_b.im]
        .map(format_number)
        .join(",");
    format!(
        "{RECORD_CSV_HEADER}\n{fields},{},{},{},{},{},{},{},{},{},{}\n",
        r.outcome,
        r.reported,
        r.received,
        r.correction,
        format_number(bob[0].re),
        format_number(bob[0].im),
        format_number(bob[1].re),
        format_number(bob[1].im),
        format_number(r.fidelity),
        format_number(r.branch_probability),
    )
}

fn estimate_output(e: &FidelityEstimate, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => format!(
            "mean_fidelity,stderr,trials\n{},{},{}\n",
            format_number(e.mean),
            format_number(e.stderr),
            e.trials
        ),
        OutputFormat::Json => pretty(&json!({
            "mean_fidelity": num(e.mean),
            "stderr": num(e.stderr),
            "trials": e.trials,
            "histogram": { "00": e.histogram[0], "01": e.histogram[1], "10": e.histogram[2], "11": e.histogram[3] },
        })),
    }
}

fn sweep_output(res: &SweepResult, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => res.to_csv(),
        OutputFormat::Json => pretty(&json!({
            "param": res.parameter.name(),
            "points": res.points.iter().map(|p| json!({
                "value": num(p.value),
                "mean_fidelity": num(p.mean_fidelity),
                "stderr": num(p.stderr),
                "histogram": p.histogram,
                "trials": p.trials,
            })).collect::<Vec<_>>(),
        })),
    }
}

fn amplify_output(rep: &AmplificationReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => rep.to_csv(),
        OutputFormat::Json => pretty(&json!({
            "sigma": num(rep.sigma),
            "trials": rep.trials,
            "rows": rep.rows.iter().map(|r| json!({
                "sites": r.sites.to_string(),
                "mean_infidelity": num(r.mean_infidelity),
                "stderr": num(r.stderr),
            })).collect::<Vec<_>>(),
            "ratio_all_to_max_single": num(rep.ratio()),
        })),
    }
}

fn certify_output(rep: &CertifierReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => rep.to_csv(),
        OutputFormat::Json => pretty(&json!({
            "n_pairs": rep.n_pairs,
            "zz_correlator": num(rep.zz_correlator),
            "stderr_zz": num(rep.stderr_zz),
            "xx_correlator": num(rep.xx_correlator),
            "stderr_xx": num(rep.stderr_xx),
        })),
    }
}

/// Runs the configured experiment and renders its output.
pub fn render(config: &RunConfig) -> Result<String, SimError> {
    let noise = &config.noise;
    let format = config.output_format;
    Ok(match config.command {
        Command::Run => {
            let mut rng = RngStream::new(noise.seed);
            let input: State = haar_random_qubit(&mut rng);
            let record = run_trial(&input, noise, &mut rng)?;
            match format {
                OutputFormat::Json => pretty(&record_json(&record)),
                OutputFormat::Csv => record_csv(&record),
            }
        }
        Command::Estimate => estimate_output(
            &estimate_fidelity(noise, config.trials, noise.seed)?,
            format,
        ),
        Command::Sweep => {
            let spec = config
                .sweep
                .as_ref()
                .ok_or_else(|| SimError::Contract("sweep command without a sweep spec".into()))?;
            sweep_output(&sweep(spec)?, format)
        }
        Command::Amplify => amplify_output(
            &amplification_experiment(noise.sigma_gate, config.trials, noise.seed)?,
            format,
        ),
        Command::Certify => certify_output(
            &certify_source(noise.eta_bell, config.trials, noise.seed)?,
            format,
        ),
    })
}

/// Renders the output and writes it to the configured file or stdout.
pub fn execute(config: &RunConfig) -> Result<(), ExecError> {
    let text = render(config)?;
    match &config.output_path {
        Some(path) => fs::write(path, text).map_err(|source| ExecError::Output {
            path: path.clone(),
            source,
        }),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| ExecError::Output {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use teleport_lab::{execute, parse_config};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CommandArg {
    Run,
    Estimate,
    Sweep,
    Amplify,
    Certify,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

/// Seeded teleportation experiments with injectable noise.
#[derive(Debug, Parser)]
#[command(name = "teleport-lab", version)]
struct Cli {
    #[arg(value_enum)]
    command: CommandArg,
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    /// Sweep parameter: eta_bell, sigma_gate, p_classical or q_readout.
    #[arg(long)]
    param: Option<String>,
    /// Comma-separated sweep values.
    #[arg(long, allow_hyphen_values = true)]
    values: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

impl Cli {
    fn overrides(&self) -> Vec<(String, String)> {
        let command = match self.command {
            CommandArg::Run => "run",
            CommandArg::Estimate => "estimate",
            CommandArg::Sweep => "sweep",
            CommandArg::Amplify => "amplify",
            CommandArg::Certify => "certify",
        };
        let mut kv = vec![("command".to_string(), command.to_string())];
        let mut push = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                kv.push((k.to_string(), v));
            }
        };
        push("seed", self.seed.map(|s| s.to_string()));
        push("trials", self.trials.map(|t| t.to_string()));
        push("param", self.param.clone());
        push("values", self.values.clone());
        push("out", self.out.as_ref().map(|p| p.display().to_string()));
        push(
            "format",
            self.format.map(|f| match f {
                FormatArg::Csv => "csv".to_string(),
                FormatArg::Json => "json".to_string(),
            }),
        );
        kv
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let text = match &cli.config {
        Some(path) => match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: cannot read config {}: {e}", path.display());
                return ExitCode::from(1);
            }
        },
        None => String::new(),
    };
    let config = match parse_config(&text, &cli.overrides()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match execute(&config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use telesim::channels::ChannelKind;
use telesim::cli::{self, CliFailure, EsdMode};
use telesim::teleport::RecoveryKind;

/// Simulator for single- and two-qubit teleportation under non-commuting
/// transmission and recovery noises.
///
/// Every command accepts `--config FILE` with a JSON object whose keys match
/// the long flag names; explicit flags win over the file. Internal sweeps
/// honor RAYON_NUM_THREADS (default: available parallelism).
#[derive(Parser)]
#[command(name = "telesim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Channel negativity over the transmission time (CSV).
    Channel(ChannelArgs),
    /// Average teleportation fidelity, simulated vs closed form (CSV).
    Fidelity(FidelityArgs),
    /// Critical recovery frequency for the dephased channel (JSON).
    CriticalOmega(CriticalOmegaArgs),
    /// Entanglement-sudden-death time for a chosen scenario (JSON).
    Esd(EsdArgs),
    /// Reproduce both reference tables (CSV pair).
    Tables(TablesArgs),
    /// Run the full acceptance suite and report PASS/FAIL per criterion.
    PaperCheck(PaperCheckArgs),
}

#[derive(Args)]
struct ChannelArgs {
    /// ideal | dephasing | bitflip | combined
    #[arg(long)]
    kind: Option<String>,
    /// Noise rate.
    #[arg(long)]
    gamma: Option<f64>,
    /// Largest transmission time.
    #[arg(long)]
    tmax: Option<f64>,
    /// Grid step.
    #[arg(long)]
    dt: Option<f64>,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also dump the sampled channel matrices as JSON.
    #[arg(long)]
    dump_matrices: Option<PathBuf>,
    /// JSON config file merged under the flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct FidelityArgs {
    /// ideal | dephasing | bitflip | combined
    #[arg(long)]
    channel: Option<String>,
    /// p | d | b | bp | i
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    omega0: Option<f64>,
    /// Transmission time (fixed channel; ignored for alpha = p, where the
    /// time column itself sweeps the transmission time).
    #[arg(long)]
    t0: Option<f64>,
    #[arg(long)]
    tmax: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct CriticalOmegaArgs {
    /// i | d | b
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    t0: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct EsdArgs {
    /// channel | two-qubit-channel | two-qubit-readout
    #[arg(long)]
    mode: Option<String>,
    /// Channel kind.
    #[arg(long)]
    kind: Option<String>,
    /// Recovery kind for two-qubit-readout mode.
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    omega0: Option<f64>,
    /// Two-qubit input angle (radians).
    #[arg(long)]
    theta: Option<f64>,
    /// Transmission time for two-qubit-readout mode.
    #[arg(long)]
    t0: Option<f64>,
    /// Measurement outcome pair, e.g. 3,0
    #[arg(long)]
    outcome: Option<String>,
    /// Scan bound.
    #[arg(long)]
    tmax: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct TablesArgs {
    /// Directory receiving table1.csv and table2.csv.
    #[arg(long, default_value = ".")]
    outdir: PathBuf,
}

#[derive(Args)]
struct PaperCheckArgs {
    /// Also write the machine-readable report here.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Deliberately break a model reading (test harness): idle-noise
    #[arg(long, hide = true)]
    defect: Option<String>,
}

/// JSON config loaded from --config; flag values win over file values.
struct ConfigFile {
    values: Value,
}

impl ConfigFile {
    fn load(path: &Option<PathBuf>) -> Result<Self, CliFailure> {
        match path {
            None => Ok(ConfigFile {
                values: Value::Null,
            }),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliFailure {
                    exit_code: cli::EXIT_IO,
                    message: format!("cannot read {}: {e}", p.display()),
                })?;
                let values: Value = serde_json::from_str(&text).map_err(|e| CliFailure {
                    exit_code: cli::EXIT_IO,
                    message: format!("invalid JSON in {}: {e}", p.display()),
                })?;
                Ok(ConfigFile { values })
            }
        }
    }

    fn f64(&self, key: &str) -> Option<f64> {
        self.values.get(key).and_then(Value::as_f64)
    }

    fn string(&self, key: &str) -> Option<String> {
        self.values
            .get(key)
            .and_then(Value::as_str)
            .map(str::to_owned)
    }
}

fn parse_outcome(s: &str) -> Result<(usize, usize), CliFailure> {
    let parts: Vec<&str> = s.split(',').collect();
    let err = || CliFailure {
        exit_code: cli::EXIT_SOLVER,
        message: format!("outcome must be 'j1,j2' with digits 0..=3, got '{s}'"),
    };
    if parts.len() != 2 {
        return Err(err());
    }
    let j1: usize = parts[0].trim().parse().map_err(|_| err())?;
    let j2: usize = parts[1].trim().parse().map_err(|_| err())?;
    if j1 > 3 || j2 > 3 {
        return Err(err());
    }
    Ok((j1, j2))
}

const DEFAULT_GAMMA: f64 = 0.1;
const DEFAULT_T0: f64 = 10.0;
const DEFAULT_OMEGA0: f64 = 1.0;

fn run() -> Result<(), CliFailure> {
    let cli = Cli::parse();
    match cli.command {
        Command::Channel(args) => {
            let file = ConfigFile::load(&args.config)?;
            let kind_s = args
                .kind
                .or_else(|| file.string("kind"))
                .unwrap_or_else(|| "dephasing".into());
            let cfg = cli::ChannelConfig {
                kind: ChannelKind::parse(&kind_s)?,
                gamma: args
                    .gamma
                    .or_else(|| file.f64("gamma"))
                    .unwrap_or(DEFAULT_GAMMA),
                t_max: args.tmax.or_else(|| file.f64("tmax")).unwrap_or(10.0),
                dt: args.dt.or_else(|| file.f64("dt")).unwrap_or(0.05),
                out: args.out,
                dump_matrices: args.dump_matrices,
            };
            cli::cmd_channel(&cfg)
        }
        Command::Fidelity(args) => {
            let file = ConfigFile::load(&args.config)?;
            let channel_s = args
                .channel
                .or_else(|| file.string("channel"))
                .unwrap_or_else(|| "ideal".into());
            let alpha_s = args
                .alpha
                .or_else(|| file.string("alpha"))
                .unwrap_or_else(|| "p".into());
            let cfg = cli::FidelityConfig {
                channel: ChannelKind::parse(&channel_s)?,
                alpha: RecoveryKind::parse(&alpha_s)?,
                gamma: args
                    .gamma
                    .or_else(|| file.f64("gamma"))
                    .unwrap_or(DEFAULT_GAMMA),
                omega0: args
                    .omega0
                    .or_else(|| file.f64("omega0"))
                    .unwrap_or(DEFAULT_OMEGA0),
                t0: args.t0.or_else(|| file.f64("t0")).unwrap_or(DEFAULT_T0),
                t_max: args.tmax.or_else(|| file.f64("tmax")).unwrap_or(20.0),
                dt: args.dt.or_else(|| file.f64("dt")).unwrap_or(0.5),
                out: args.out,
            };
            cli::cmd_fidelity(&cfg)
        }
        Command::CriticalOmega(args) => {
            let file = ConfigFile::load(&args.config)?;
            let alpha_s = args
                .alpha
                .or_else(|| file.string("alpha"))
                .unwrap_or_else(|| "i".into());
            let cfg = cli::CriticalOmegaConfig {
                alpha: RecoveryKind::parse(&alpha_s)?,
                gamma: args
                    .gamma
                    .or_else(|| file.f64("gamma"))
                    .unwrap_or(DEFAULT_GAMMA),
                t0: args.t0.or_else(|| file.f64("t0")).unwrap_or(DEFAULT_T0),
                out: args.out,
            };
            cli::cmd_critical_omega(&cfg)
        }
        Command::Esd(args) => {
            let file = ConfigFile::load(&args.config)?;
            let mode_s = args
                .mode
                .or_else(|| file.string("mode"))
                .unwrap_or_else(|| "channel".into());
            let kind_s = args
                .kind
                .or_else(|| file.string("kind"))
                .unwrap_or_else(|| "combined".into());
            let alpha_s = args
                .alpha
                .or_else(|| file.string("alpha"))
                .unwrap_or_else(|| "d".into());
            let outcome_s = args
                .outcome
                .or_else(|| file.string("outcome"))
                .unwrap_or_else(|| "3,0".into());
            let mode = EsdMode::parse(&mode_s)?;
            let cfg = cli::EsdConfig {
                mode,
                kind: ChannelKind::parse(&kind_s)?,
                alpha: RecoveryKind::parse(&alpha_s)?,
                gamma: args
                    .gamma
                    .or_else(|| file.f64("gamma"))
                    .unwrap_or(DEFAULT_GAMMA),
                omega0: args
                    .omega0
                    .or_else(|| file.f64("omega0"))
                    .unwrap_or(DEFAULT_OMEGA0),
                theta: args
                    .theta
                    .or_else(|| file.f64("theta"))
                    .unwrap_or(std::f64::consts::FRAC_PI_4),
                t0: args.t0.or_else(|| file.f64("t0")).unwrap_or(DEFAULT_T0),
                outcome: parse_outcome(&outcome_s)?,
                t_max: args.tmax.or_else(|| file.f64("tmax")).unwrap_or(12.0),
                out: args.out,
            };
            cli::cmd_esd(&cfg)
        }
        Command::Tables(args) => cli::cmd_tables(&cli::TablesConfig {
            outdir: args.outdir,
        }),
        Command::PaperCheck(args) => cli::cmd_paper_check(&cli::PaperCheckConfig {
            json: args.json,
            defect: args.defect,
        }),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            if !failure.message.is_empty() {
                eprintln!("error: {}", failure.message);
            }
            ExitCode::from(failure.exit_code as u8)
        }
    }
}

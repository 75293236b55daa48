//! `coherence-qsl`: evolve qubit channels, report coherence speed limits,
//! write figure data and run the verification suites.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or config error,
//! 3 numerical failure.

mod config;

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use coherence_qsl::figures::{FigureId, FigureSpec};
use coherence_qsl::metric::{speed_profile, write_speed_csv};
use coherence_qsl::qsl::{tau_csl, QslReport};
use coherence_qsl::verify::{all_passed, format_report, run_suite, Suite, DEFAULT_SEED};
use serde::Serialize;

use config::{Angle, ChannelKind, Format, GammaSpec, RunConfig};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical { op: &'static str, source: coherence_qsl::Error },
    VerifyFailed,
}

impl CliError {
    fn numerical(op: &'static str) -> impl FnOnce(coherence_qsl::Error) -> Self {
        move |source| Self::Numerical { op, source }
    }

    fn exit_code(&self) -> u8 {
        match self {
            Self::VerifyFailed => 1,
            Self::Usage(_) => 2,
            Self::Numerical { .. } => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Usage(msg) => f.write_str(msg),
            Self::Numerical { op, source } => write!(f, "{op} failed: {source}"),
            Self::VerifyFailed => f.write_str("verification failed"),
        }
    }
}

#[derive(Parser)]
#[command(name = "coherence-qsl", version, about = "Coherence quantum speed limits for open qubit dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a qubit and write the trajectory.
    Evolve(RunArgs),
    /// Evolve a qubit and report the coherence speed-limit time.
    Qsl(RunArgs),
    /// Write the data behind one figure panel.
    Figure(FigureArgs),
    /// Run the oracle and property suites.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON file with RunConfig fields; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    channel: Option<ChannelKind>,
    /// `const:<g>` or `ohmic:k=<k>,wc=<w>`.
    #[arg(long)]
    gamma: Option<GammaSpec>,
    /// Preparation angle; accepts `pi/2`-style tokens.
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<Angle>,
    #[arg(long, allow_hyphen_values = true)]
    phase: Option<Angle>,
    #[arg(long, allow_hyphen_values = true)]
    omega0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<f64>,
    /// Grid steps; defaults to 4000 per unit time.
    #[arg(long)]
    steps: Option<usize>,
    /// Time origin of the rate; the state is evolved through [0, t0] first.
    #[arg(long, allow_hyphen_values = true)]
    t0: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Use the RK4 integrator instead of the closed-form solution.
    #[arg(long)]
    integrate: bool,
}

impl RunArgs {
    fn resolve(self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        macro_rules! overlay {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field {
                    cfg.$field = v;
                }
            )*};
        }
        overlay!(channel, gamma, theta, phase, omega0, tau, t0);
        if self.steps.is_some() {
            cfg.steps = self.steps;
        }
        if self.out.is_some() {
            cfg.out = self.out;
        }
        if self.format.is_some() {
            cfg.format = self.format;
        }
        cfg.integrate |= self.integrate;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct FigureArgs {
    /// fig2_left, fig2_right, fig3_left or fig3_right.
    id: FigureId,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    /// oracle, properties or all.
    suite: Suite,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => {
            std::fs::write(path, bytes).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
        }
        None => std::io::stdout().write_all(bytes).map_err(|e| CliError::Usage(format!("cannot write to stdout: {e}"))),
    }
}

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("report types serialize");
    bytes.push(b'\n');
    bytes
}

fn csv_bytes(write: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Vec<u8> {
    let mut buf = Vec::new();
    write(&mut buf).expect("writing to a Vec cannot fail");
    buf
}

#[derive(Serialize)]
struct TrajectoryDoc<'a> {
    version: &'static str,
    config: &'a RunConfig,
    t: &'a [f64],
    states: &'a [coherence_qsl::densmat::DensityMatrix],
    gamma_cum: &'a [f64],
}

fn cmd_evolve(cfg: RunConfig) -> Result<(), CliError> {
    let traj = cfg.scenario().trajectory(cfg.tau, cfg.steps()).map_err(CliError::numerical("evolve"))?;
    let bytes = match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            if traj.first().dim() != 2 {
                return Err(CliError::Usage("CSV trajectories are only defined for qubits".into()));
            }
            csv_bytes(|buf| traj.write_csv(buf))
        }
        Format::Json => to_json(&TrajectoryDoc {
            version: VERSION,
            config: &cfg,
            t: traj.times(),
            states: traj.states(),
            gamma_cum: traj.gamma_cum(),
        }),
    };
    emit(cfg.out.as_deref(), &bytes)
}

#[derive(Serialize)]
struct QslDoc<'a> {
    #[serde(flatten)]
    report: QslReport,
    config: &'a RunConfig,
    version: &'static str,
}

fn cmd_qsl(cfg: RunConfig) -> Result<(), CliError> {
    let traj = cfg.scenario().trajectory(cfg.tau, cfg.steps()).map_err(CliError::numerical("evolve"))?;
    let report = tau_csl(&traj).map_err(CliError::numerical("tau_csl"))?;
    let bytes = match cfg.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&QslDoc { report, config: &cfg, version: VERSION }),
        Format::Csv => {
            let samples = speed_profile(&traj).map_err(CliError::numerical("speed_profile"))?;
            csv_bytes(|buf| write_speed_csv(buf, &samples))
        }
    };
    let summary = format!("tau={} tau_csl={} ratio={}", report.tau, report.tau_csl, report.ratio);
    // Keep stdout machine-readable when the report itself goes there.
    if cfg.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    emit(cfg.out.as_deref(), &bytes)
}

#[derive(Serialize)]
struct FigureDoc<'a> {
    version: &'static str,
    figure: &'static str,
    header: &'a [&'a str],
    rows: &'a [Vec<f64>],
}

fn cmd_figure(args: FigureArgs) -> Result<(), CliError> {
    let table = FigureSpec::new(args.id).run().map_err(CliError::numerical("figure sweep"))?;
    let bytes = match args.format {
        Format::Csv => csv_bytes(|buf| table.write_csv(buf)),
        Format::Json => {
            to_json(&FigureDoc { version: VERSION, figure: args.id.name(), header: table.header, rows: &table.rows })
        }
    };
    emit(args.out.as_deref(), &bytes)
}

fn cmd_verify(args: VerifyArgs) -> Result<(), CliError> {
    let outcomes = run_suite(args.suite, args.seed);
    let bytes = match args.format {
        Some(Format::Json) => to_json(&outcomes),
        Some(Format::Csv) => return Err(CliError::Usage("verify reports are text or json".into())),
        None => format_report(&outcomes).into_bytes(),
    };
    emit(args.out.as_deref(), &bytes)?;
    if all_passed(&outcomes) {
        Ok(())
    } else {
        Err(CliError::VerifyFailed)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Evolve(args) => args.resolve().and_then(cmd_evolve),
        Command::Qsl(args) => args.resolve().and_then(cmd_qsl),
        Command::Figure(args) => cmd_figure(args),
        Command::Verify(args) => cmd_verify(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

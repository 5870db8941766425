//! `ccodes`: verification suites, capacity census, code export and simulated 2D experiments.

mod output;

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use coherent_codes::codes::counting::capacity;
use coherent_codes::codes::report::{verify_codes, CodesOptions};
use coherent_codes::codes::table::{verify_table, TableFixture};
use coherent_codes::codes::{build_code, CodeName};
use coherent_codes::nmr::report::verify_pulses;
use coherent_codes::nmr::spectrum::{CROSS_PEAK_MIN, PEAK_THRESHOLD, SUPPRESSION_MAX, SUPPRESSION_MIN_HZ};
use coherent_codes::nmr::{run_2d_experiment, ExperimentConfig, InitialState, SpinSystem};
use serde_json::json;

use output::{envelope, out_dir, resolve, write_atomic, write_json};

#[derive(Parser, Debug)]
#[command(name = "ccodes", version, about = "Quantum codes against coherent zz evolution")]
struct Cli {
    /// Directory for reports and spectra (default: $CCODES_OUT_DIR, else the working directory).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a verification suite and write its JSON report.
    Verify {
        #[command(subcommand)]
        suite: Suite,
    },
    /// Minimal ancilla count and error census for a maximum correctable order.
    Capacity {
        n_data: usize,
        m_max: usize,
        /// Take the census on this many spins instead of the minimal count.
        #[arg(long)]
        nspins: Option<usize>,
        #[arg(long, default_value = "capacity.json")]
        out: PathBuf,
    },
    /// Export a built code.
    Code {
        #[command(subcommand)]
        action: CodeAction,
    },
    /// Simulate the 2D experiment and write spectrum, peaks and the omega1 = 0 slice.
    Experiment(ExperimentArgs),
}

#[derive(Subcommand, Debug)]
enum Suite {
    /// Product-operator table against the gate-level pipeline.
    Table {
        /// Angles in radians, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, PI / 7.0, PI / 2.0, PI])]
        phi: Vec<f64>,
        /// Table fixture (default: the bundled one).
        #[arg(long)]
        fixture: Option<PathBuf>,
        #[arg(long, default_value = "verify_table.json")]
        out: PathBuf,
    },
    /// Round trip, Knill-Laflamme and recovery for each code.
    Codes {
        /// Codes to check (repeatable; default: all).
        #[arg(long = "code")]
        codes: Vec<String>,
        /// Random ancilla states for codes that accept any ancilla.
        #[arg(long, default_value_t = 0)]
        random_ancilla: usize,
        /// Random data states per declared error.
        #[arg(long, default_value_t = 5)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "verify_codes.json")]
        out: PathBuf,
    },
    /// Pulse sequences against the gate pipeline, preparation and refocusing.
    Pulses {
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, PI / 7.0, PI / 2.0, 2.0, PI])]
        phi: Vec<f64>,
        /// Refocusing periods in seconds.
        #[arg(long, value_delimiter = ',', default_values_t = [1e-3, 0.0123, 0.0369])]
        tau: Vec<f64>,
        /// Extra systems with random offsets and spectator couplings.
        #[arg(long, default_value_t = 5)]
        random_systems: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Spin-system fixture (default: bundled alanine).
        #[arg(long)]
        system: Option<PathBuf>,
        #[arg(long, default_value = "verify_pulses.json")]
        out: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum CodeAction {
    Build {
        /// fig1, fig3, fig4, fig5 or first6
        name: String,
        #[arg(long)]
        emit: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Initial {
    Sx1,
    Sx1sz2,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    initial: Initial,
    #[arg(long, conflicts_with = "uncorrected")]
    corrected: bool,
    /// The default.
    #[arg(long)]
    uncorrected: bool,
    /// Spin-system fixture (default: bundled alanine).
    #[arg(long)]
    system: Option<PathBuf>,
    /// File-name prefix (default: `<initial>_<corrected|uncorrected>`).
    #[arg(long)]
    prefix: Option<String>,
}

/// A required input file is absent: exit 2.
#[derive(Debug)]
struct MissingFixture(PathBuf);

impl std::fmt::Display for MissingFixture {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "fixture not found: {}", self.0.display())
    }
}

impl std::error::Error for MissingFixture {}

fn require(path: &Path) -> Result<()> {
    if !path.is_file() {
        return Err(MissingFixture(path.to_path_buf()).into());
    }
    Ok(())
}

fn load_system(path: Option<&Path>) -> Result<SpinSystem> {
    match path {
        None => Ok(SpinSystem::alanine()),
        Some(p) => {
            require(p)?;
            SpinSystem::load(p).with_context(|| format!("reading {}", p.display()))
        }
    }
}

fn status(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn run(cli: Cli) -> Result<bool> {
    let dir = out_dir(cli.out_dir.as_deref());
    match cli.command {
        Command::Verify { suite } => match suite {
            Suite::Table { phi, fixture, out } => {
                let fx = match &fixture {
                    Some(p) => {
                        require(p)?;
                        TableFixture::load(p).with_context(|| format!("reading {}", p.display()))?
                    }
                    None => TableFixture::bundled(),
                };
                let report = verify_table(&fx, &phi)?;
                let failing = report.failing_rows();
                let issues: Vec<String> =
                    report.transcription_issues().iter().map(|(r, c)| format!("{r}:{c:?}")).collect();
                let mut doc = envelope("verify table", &report)?;
                doc["failing_rows"] = json!(failing);
                write_json(&resolve(&dir, &out), &doc)?;
                println!("{} table: {} rows x {} phi", status(report.pass), fx.rows.len(), phi.len());
                if !issues.is_empty() {
                    println!("transcription issues: {}", issues.join(", "));
                }
                for row in &failing {
                    println!("failing row: {row}");
                }
                Ok(report.pass)
            }
            Suite::Codes {
                codes,
                random_ancilla,
                trials,
                seed,
                out,
            } => {
                let codes = if codes.is_empty() {
                    CodeName::ALL.to_vec()
                } else {
                    codes.iter().map(|c| c.parse()).collect::<Result<Vec<CodeName>, _>>()?
                };
                let report = verify_codes(&CodesOptions {
                    codes,
                    trials,
                    random_ancilla,
                    seed,
                })?;
                write_json(&resolve(&dir, &out), &envelope("verify codes", &report)?)?;
                for c in &report.codes {
                    println!(
                        "{} {}: roundtrip {:.1e}, min fidelity {:.12}, probe {} {}",
                        status(c.pass),
                        c.code,
                        c.roundtrip_deviation,
                        c.min_recovery_fidelity,
                        c.probe_error,
                        if c.kl_probe_fails { "uncorrectable" } else { "correctable" }
                    );
                }
                Ok(report.pass)
            }
            Suite::Pulses {
                phi,
                tau,
                random_systems,
                seed,
                system,
                out,
            } => {
                let sys = load_system(system.as_deref())?;
                let report = verify_pulses(&sys, &phi, &tau, random_systems, seed)?;
                write_json(&resolve(&dir, &out), &envelope("verify pulses", &report)?)?;
                println!(
                    "{} pulses: pulse vs gate {:.1e}, decode round trip {:.1e}, {} refocusing checks",
                    status(report.pass),
                    report.pulse_gate.max_deviation,
                    report.pulse_gate.decode_roundtrip_deviation,
                    report.refocusing.len()
                );
                Ok(report.pass)
            }
        },
        Command::Capacity {
            n_data,
            m_max,
            nspins,
            out,
        } => {
            let r = capacity(n_data, m_max, nspins)?;
            write_json(&resolve(&dir, &out), &envelope("capacity", &r)?)?;
            println!(
                "min_ancillae {} (N = {}), error_count {}, capacity {}",
                r.min_ancillae, r.nspins, r.error_count, r.capacity
            );
            Ok(true)
        }
        Command::Code {
            action: CodeAction::Build { name, emit },
        } => {
            let which: CodeName = name.parse()?;
            let record = build_code(which).record();
            let path = resolve(&dir, &emit);
            write_json(&path, &serde_json::to_value(&record)?)?;
            println!("wrote {}", path.display());
            Ok(true)
        }
        Command::Experiment(args) => experiment(&dir, args),
    }
}

fn experiment(dir: &Path, args: ExperimentArgs) -> Result<bool> {
    let sys = load_system(args.system.as_deref())?;
    let initial = match args.initial {
        Initial::Sx1 => InitialState::Sx1,
        Initial::Sx1sz2 => InitialState::Sx1Sz2,
    };
    let corrected = args.corrected;
    let mode = if corrected { "corrected" } else { "uncorrected" };
    let prefix = args.prefix.unwrap_or_else(|| format!("{initial}_{mode}"));
    if prefix.contains(['/', '\\']) {
        bail!("prefix must be a plain file-name stem");
    }
    let cfg = ExperimentConfig::new(&sys, initial, corrected);
    let exp = run_2d_experiment(&sys, &cfg)?;
    let summary = exp.summary(&sys);
    let slice = exp.spectrum.zero_slice();

    write_atomic(&dir.join(format!("{prefix}_spectrum.csv")), exp.spectrum.to_csv().as_bytes())?;
    write_atomic(&dir.join(format!("{prefix}_slice.csv")), slice.to_csv().as_bytes())?;
    let doc = json!({
        "schema": output::SCHEMA,
        "command": "experiment",
        "system": sys.name,
        "tolerances": {
            "peak_threshold": PEAK_THRESHOLD,
            "cross_peak_min": CROSS_PEAK_MIN,
            "suppression_max": SUPPRESSION_MAX,
            "suppression_min_hz": SUPPRESSION_MIN_HZ,
        },
        "config": exp.config,
        "summary": summary,
        "peaks": exp.peaks.peaks,
    });
    write_json(&dir.join(format!("{prefix}_peaks.json")), &doc)?;

    println!("{} {initial} {mode}", status(summary.pass));
    if let Some(p) = summary.main_peak {
        println!("main peak: omega1 {:.2} Hz, omega2 {:.2} Hz", p.omega1_hz, p.omega2_hz);
    }
    println!(
        "cross peaks at |omega1| = {:.1} Hz: {:.3} of main; band {:.3e}; beyond 10 Hz {:.3e}; slice doublet {:?}",
        summary.expected_cross_peak_hz,
        summary.cross_peak_relative,
        summary.band.relative_magnitude,
        summary.max_relative_beyond_10hz,
        summary.zero_slice_phase
    );
    Ok(summary.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

//! `cakecut`: run, audit and attack cake-cutting mechanisms from the shell.
//!
//! Exit codes: 0 success or confirmed, 1 not confirmed, 2 unreadable input
//! or unknown name, 3 failed precondition, 4 external-command protocol error.

#![allow(clippy::result_large_err)]

mod external;
mod generate;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cakecut::gadget::{run_gadget, verify_report, Verdict, DEFAULT_EPS};
use cakecut::strategy::{
    classify_deviation, evenpaz_counterexample, movingknife_counterexample,
    rotatingef_counterexample, sample_opponent_profiles, simpleef_counterexample,
    verify_certificate, Classification, Scenario,
};
use cakecut::{audit, Allocation, Error, MechanismId, ProfileFile, Rational};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use external::External;

#[derive(Parser)]
#[command(
    name = "cakecut",
    version,
    about = "Exact cake-cutting mechanisms and manipulation checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a mechanism on a profile and audit the result.
    Run {
        #[arg(long)]
        profile: PathBuf,
        #[arg(long)]
        mechanism: MechanismId,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Audit an allocation against a profile.
    Audit {
        #[arg(long)]
        profile: PathBuf,
        #[arg(long)]
        allocation: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify a misreport: a named generator or a scenario file.
    Attack(AttackArgs),
    /// Drive a two-agent mechanism through the six adaptive instances.
    Gadget {
        #[arg(
            long,
            required_unless_present = "external",
            conflicts_with = "external"
        )]
        mechanism: Option<MechanismId>,
        /// Command speaking the line-delimited JSON protocol.
        #[arg(long)]
        external: Option<String>,
        #[arg(long)]
        eps: Option<Rational>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a named instance as JSON.
    Gen {
        /// One of F1..F6, ell, rr, movingknife, evenpaz, simpleef, rotatingef.
        name: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        eps: Option<Rational>,
        /// For counterexample profiles, put the misreport in place of the truth.
        #[arg(long)]
        deviating: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct AttackArgs {
    /// movingknife, evenpaz, simpleef or rotatingef.
    #[arg(required_unless_present = "scenario", conflicts_with = "scenario")]
    generator: Option<String>,
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    eps: Option<Rational>,
    /// Extra sampled opponent tuples appended to the family.
    #[arg(long, default_value_t = 0)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Mechanism(_) => 4,
            _ => 3,
        };
        Failure::new(code, e.to_string())
    }
}

type Outcome = Result<bool, Failure>;

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::new(2, format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::new(2, format!("{}: {e}", path.display())))
}

fn read_profile(path: &Path) -> Result<ProfileFile, Failure> {
    let file: ProfileFile = read_json(path)?;
    if file.version != cakecut::profile::PROFILE_VERSION {
        return Err(Failure::new(
            2,
            format!("unsupported profile version {}", file.version),
        ));
    }
    Ok(file)
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), Failure> {
    write_text(&generate::json(value), out)
}

fn write_text(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::new(1, format!("{}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct RunOutput {
    mechanism: MechanismId,
    allocation: Allocation,
    audit: cakecut::AuditReport,
    guarantees_hold: bool,
}

fn cmd_run(profile: &Path, mechanism: MechanismId, out: Option<&Path>) -> Outcome {
    let profile = read_profile(profile)?;
    let allocation = mechanism.run(&profile.agents)?;
    let report = audit(&profile.agents, &allocation)?;
    let guarantees_hold = mechanism.guarantees_hold(&report);
    emit(
        &RunOutput {
            mechanism,
            allocation,
            audit: report,
            guarantees_hold,
        },
        out,
    )?;
    Ok(guarantees_hold)
}

fn cmd_audit(profile: &Path, allocation: &Path, out: Option<&Path>) -> Outcome {
    let profile = read_profile(profile)?;
    let allocation: Allocation = read_json(allocation)?;
    emit(&audit(&profile.agents, &allocation)?, out)?;
    Ok(true)
}

fn cmd_attack(args: &AttackArgs) -> Outcome {
    let eps = |p, q| args.eps.clone().unwrap_or_else(|| Rational::ratio(p, q));
    let (mut scenario, expected): (Scenario, Option<Classification>) = match &args.generator {
        Some(name) => match name.as_str() {
            "movingknife" => (
                movingknife_counterexample(args.n.unwrap_or(3))?,
                Some(Classification::WratViolation),
            ),
            "evenpaz" => (
                evenpaz_counterexample(&eps(1, 20))?,
                Some(Classification::WratViolation),
            ),
            "simpleef" => (
                simpleef_counterexample(args.n.unwrap_or(2))?,
                Some(Classification::WratViolation),
            ),
            "rotatingef" => (
                rotatingef_counterexample(args.n.unwrap_or(2), &eps(1, 100))?,
                Some(Classification::RatDeterred),
            ),
            other => return Err(Failure::new(2, format!("unknown generator {other:?}"))),
        },
        None => (
            read_json(args.scenario.as_deref().expect("clap enforces one source"))?,
            None,
        ),
    };
    if args.samples > 0 {
        let others = scenario.agents() - 1;
        scenario.extend_family(sample_opponent_profiles(others, args.samples, args.seed))?;
    }
    let cert = classify_deviation(&scenario)?;
    let verified = verify_certificate(&cert)?;
    emit(&cert, args.out.as_deref())?;
    Ok(verified && expected.is_none_or(|c| c == cert.classification))
}

fn cmd_gadget(
    mechanism: Option<MechanismId>,
    external: Option<&str>,
    eps: Option<Rational>,
    out: Option<&Path>,
) -> Outcome {
    let eps = eps.unwrap_or_else(|| Rational::ratio(DEFAULT_EPS.0, DEFAULT_EPS.1));
    let (report, verified) = match (mechanism, external) {
        (Some(id), _) => {
            let r = run_gadget(&id, &eps)?;
            let ok = verify_report(&id, &r)?;
            (r, ok)
        }
        (None, Some(cmd)) => {
            let m =
                External::parse(cmd).ok_or_else(|| Failure::new(2, "empty external command"))?;
            let r = run_gadget(&m, &eps)?;
            let ok = verify_report(&m, &r)?;
            (r, ok)
        }
        (None, None) => unreachable!("clap requires a mechanism"),
    };
    emit(&report, out)?;
    Ok(verified && report.verdict != Verdict::ForcedStateDiverged)
}

fn cmd_gen(name: &str, params: generate::Params, out: Option<&Path>) -> Outcome {
    let value = generate::generate(name, &params).ok_or_else(|| {
        Failure::new(
            2,
            format!(
                "unknown instance {name:?}; expected one of {}",
                generate::NAMES.join(", ")
            ),
        )
    })??;
    write_text(&value, out)?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run {
            profile,
            mechanism,
            out,
        } => cmd_run(&profile, mechanism, out.as_deref()),
        Command::Audit {
            profile,
            allocation,
            out,
        } => cmd_audit(&profile, &allocation, out.as_deref()),
        Command::Attack(args) => cmd_attack(&args),
        Command::Gadget {
            mechanism,
            external,
            eps,
            out,
        } => cmd_gadget(mechanism, external.as_deref(), eps, out.as_deref()),
        Command::Gen {
            name,
            n,
            eps,
            deviating,
            out,
        } => cmd_gen(
            &name,
            generate::Params { n, eps, deviating },
            out.as_deref(),
        ),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use num_traits::Signed;
use serde::Serialize;
use serde_json::{json, Value};

use capgame::error::{Error, ErrorKind, Result};
use capgame::formal_data::{parse_problem, ProblemSpec};
use capgame::game::{Payoff, PayoffMatrix};
use capgame::pipeline::{run_check, run_oracle, schedule_diagnostic, value_of};
use capgame::potential_arch::{green, EvalPoint};
use capgame::rational::{format_rational, parse_rational};
use capgame::scheduler::{build_schedule, check_bounds, weighted_floor};

#[derive(Parser)]
#[command(name = "capgame", version, about = "Capacity-game rationality criterion for formal power series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full verdict: game value, schedule diagnostic and oracle cross-check.
    Check { file: PathBuf },
    /// Assembled global matrix with its per-place parts.
    Matrix { file: PathBuf },
    /// Game value and optimal strategies.
    Value { file: PathBuf },
    /// Vanishing-order schedule for the weights `a` (default: a rational
    /// strategy at half the game value).
    Schedule {
        file: PathBuf,
        #[arg(long = "K")]
        k: usize,
        /// Comma-separated rational weights, one per point in id order.
        #[arg(long, value_delimiter = ',')]
        a: Option<Vec<String>>,
    },
    /// Green function of the real-place domain.
    Greens {
        file: PathBuf,
        /// Point id used as the pole.
        #[arg(long)]
        pole: u32,
        /// Evaluation point `x,y` or `inf`.
        #[arg(long)]
        at: String,
    },
    /// Rational reconstruction from the jets.
    Oracle {
        file: PathBuf,
        #[arg(long)]
        degree: Option<usize>,
    },
}

fn load(path: &Path) -> Result<ProblemSpec> {
    let bytes = std::fs::read(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    parse_problem(&bytes)
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

/// Rounds every float to 15 significant digits so reports are reproducible.
fn normalize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64");
            let rounded: f64 = format!("{x:.14e}").parse().expect("formatted float");
            let rounded = if rounded == 0.0 { 0.0 } else { rounded };
            serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number)
        }
        Value::Array(xs) => Value::Array(xs.into_iter().map(normalize).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, normalize(v))).collect()),
        other => other,
    }
}

fn parse_eval_point(text: &str) -> Result<EvalPoint> {
    let text = text.trim();
    if text.eq_ignore_ascii_case("inf") {
        return Ok(EvalPoint::Infinity);
    }
    let bad = || Error::field("at", format!("expected `x,y` or `inf`, got `{text}`"));
    let (x, y) = text.split_once(',').ok_or_else(bad)?;
    let x: f64 = x.trim().parse().map_err(|_| bad())?;
    let y: f64 = y.trim().parse().map_err(|_| bad())?;
    Ok(EvalPoint::Finite(Complex64::new(x, y)))
}

fn run(cmd: Command) -> Result<Value> {
    match cmd {
        Command::Check { file } => {
            let verdict = run_check(&load(&file)?)?;
            eprintln!(
                "V_G = {} ({}), criterion {}, oracle {}, agreement {}",
                verdict.v_g_exact,
                verdict.margin_flag,
                if verdict.criterion_holds { "holds" } else { "fails" },
                verdict.oracle_result.status,
                verdict.agreement.as_str()
            );
            Ok(to_value(&verdict))
        }
        Command::Matrix { file } => {
            let report = capgame::pipeline::assemble_spec(&load(&file)?)?.report();
            eprintln!("{0}x{0} matrix over places {1:?}", report.size, report.places.keys().collect::<Vec<_>>());
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            Ok(to_value(&report))
        }
        Command::Value { file } => {
            let (_, value) = value_of(&load(&file)?)?;
            eprintln!("V_G = {} ({})", value.value, value.margin_flag());
            Ok(to_value(&value.report()))
        }
        Command::Schedule { file, k, a } => {
            let spec = load(&file)?;
            let (assembly, value) = value_of(&spec)?;
            let g = PayoffMatrix::from_game_matrix(&assembly.matrix);
            let positive = match &value.value {
                Payoff::Finite(v) if v.is_positive() => Some(v.clone()),
                _ => None,
            };
            match a {
                None => {
                    let v = positive.ok_or_else(|| {
                        Error::Precondition(format!("default weights need a finite positive value, got {}", value.value))
                    })?;
                    let diag = schedule_diagnostic(&g, &v, &spec, k)?;
                    eprintln!("schedule of length {k}, bounds {}", if diag.bounds.verdict { "hold" } else { "fail" });
                    Ok(to_value(&diag))
                }
                Some(weights) => {
                    let a = weights.iter().map(|w| parse_rational(w)).collect::<Result<Vec<_>>>()?;
                    if a.len() != spec.points.len() {
                        return Err(Error::field("a", format!("{} weights for {} points", a.len(), spec.points.len())));
                    }
                    let schedule = build_schedule(&a, k)?;
                    let bounds = check_bounds(&schedule);
                    let floor = match &positive {
                        Some(v) => {
                            let v_prime = v / capgame::ExactRational::from_integer(2.into());
                            let f = weighted_floor(&schedule, &g, &v_prime)?;
                            json!({"v_prime": format_rational(&v_prime), "c": format_rational(&f.c), "diagnostic": f.diagnostic})
                        }
                        None => Value::Null,
                    };
                    eprintln!("schedule of length {k}, bounds {}", if bounds.verdict { "hold" } else { "fail" });
                    Ok(json!({
                        "schedule": to_value(&schedule.report(&spec.ids())),
                        "bounds": {
                            "max_dev": format_rational(&bounds.max_dev),
                            "min_dev": format_rational(&bounds.min_dev),
                            "verdict": bounds.verdict,
                        },
                        "weighted_floor": floor,
                    }))
                }
            }
        }
        Command::Greens { file, pole, at } => {
            let spec = load(&file)?;
            let z = parse_eval_point(&at)?;
            let assignment = spec
                .arch_places
                .first()
                .ok_or_else(|| Error::Precondition("problem has no real-place domain".into()))?;
            let idx = spec.index_of(pole).ok_or(Error::UnknownPoint(pole))?;
            let coord = &spec.points[idx].coordinate;
            let g = green(&assignment.domain, coord, z)?;
            eprintln!("g(pole {pole}, {at}) = {g}");
            Ok(json!({"pole": pole, "at": at, "value": g}))
        }
        Command::Oracle { file, degree } => {
            let spec = load(&file)?;
            let outcome = run_oracle(&spec, degree)?;
            match &outcome.function {
                Some(f) => eprintln!("rational: {f}"),
                None => eprintln!("no rational function within degrees {:?}", outcome.degrees_tried),
            }
            Ok(to_value(&outcome.report()))
        }
    }
}

fn exit_code(kind: ErrorKind) -> u8 {
    match kind {
        ErrorKind::Parse => 2,
        ErrorKind::Computation => 3,
        ErrorKind::Precondition => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(v) => {
            println!("{}", serde_json::to_string_pretty(&normalize(v)).expect("json"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            let code = exit_code(e.kind());
            let kind = match e.kind() {
                ErrorKind::Parse => "parse",
                ErrorKind::Computation => "computation",
                ErrorKind::Precondition => "precondition",
            };
            println!("{}", json!({"error": {"kind": kind, "message": e.to_string(), "exit_code": code}}));
            eprintln!("error: {e}");
            ExitCode::from(code)
        }
    }
}

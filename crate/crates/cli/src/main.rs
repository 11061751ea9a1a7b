//! `svf`: exact semivalues, counting reductions, and inverse search from
//! the command line. Every subcommand reads JSON, writes one line of JSON
//! to stdout, and keeps the exit-code contract: 0 for success/yes, 1 for
//! a clean no, 2 for errors.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};
use svf_core::game::WeightedGame;
use svf_core::inverse::{
    inverse_exact, inverse_nearest, iterative_banzhaf_heuristic, DistanceNorm, InverseInstance,
    InverseStatus, DEFAULT_INVERSE_BOUND,
};
use svf_core::khintchine::{khintchine, partition_probability, KhintchineMethod};
use svf_core::polytope::{
    optimize_over_polytope, verify_membership_certificate, CaratheodoryCertificate, OptimizeMode,
    DEFAULT_VERTEX_BOUND, VERTEX_ENUM_MAX_PLAYERS,
};
use svf_core::pvec::ProbabilityVector;
use svf_core::rational::Rational;
use svf_core::reduction::{
    build_khintchine_triple, check_pton_identities, check_triple_identities, pton_transform,
    run_rpartition_pipeline, RPartitionInstance,
};
use svf_core::selftest::{run_selftest, SelftestConfig, DEFAULT_SELFTEST_CAP};
use svf_core::semivalue::{semivalues_bruteforce, semivalues_pivot_dp, verify_semivalues};
use svf_core::{Error, DEFAULT_ENUM_CAP};

#[derive(Parser)]
#[command(name = "svf", version, about = "Exact semivalue toolkit for weighted voting games")]
struct Cli {
    /// Also write the JSON result to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Semivalues of a weighted voting game.
    Semivalues {
        /// Game file: {"weights": ["..."], "theta": "..."}.
        #[arg(long)]
        game: PathBuf,
        /// Scheme: banzhaf, shapley, banzhaf:N, shapley:N, or a JSON file.
        #[arg(long)]
        pvec: String,
        #[arg(long, value_enum, default_value_t = Method::Dp)]
        method: Method,
    },
    /// Expected |a.x| under the induced cube distribution.
    Khintchine {
        /// Vector file: a JSON array of rationals.
        #[arg(long)]
        vec: PathBuf,
        #[arg(long)]
        pvec: String,
        #[arg(long, value_enum, default_value_t = Method::Dp)]
        method: Method,
    },
    /// Probability that w.x = 0 under the induced cube distribution.
    PartitionProb {
        #[arg(long)]
        vec: PathBuf,
        #[arg(long)]
        pvec: String,
    },
    /// Run one reduction step and emit a trace with identity checks.
    Reduce {
        #[command(subcommand)]
        step: ReduceStep,
        /// Include wall-clock timing in the trace (breaks byte determinism).
        #[arg(long, global = true)]
        timing: bool,
    },
    /// Search the canonical game class for given target semivalues.
    Invert {
        /// Targets file: a JSON array or {"values": [...]}.
        #[arg(long)]
        targets: PathBuf,
        /// Threshold for weights normalized to sum 1.
        #[arg(long)]
        theta: String,
        #[arg(long)]
        pvec: String,
        #[arg(long, value_enum, default_value_t = InvertMode::Exact)]
        mode: InvertMode,
        /// Weight bound for the enumerated class.
        #[arg(long, default_value_t = DEFAULT_INVERSE_BOUND)]
        bound: u64,
        /// Distance for nearest mode.
        #[arg(long, value_enum, default_value_t = NormArg::L2)]
        norm: NormArg,
        /// Iteration budget for heuristic mode.
        #[arg(long, default_value_t = 64)]
        iterations: usize,
        /// Step size in (0, 1] for heuristic mode.
        #[arg(long, default_value = "1/2")]
        step: String,
    },
    /// Decide whether targets are exactly the game's semivalues.
    Verify {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        targets: PathBuf,
        #[arg(long)]
        pvec: String,
    },
    /// Check a convex-combination certificate against computed vertices.
    MembershipCert {
        /// Certificate file with point, vertices, witnesses, lambdas.
        #[arg(long)]
        cert: PathBuf,
        #[arg(long)]
        pvec: String,
    },
    /// Run the invariant suite and report per-check results.
    Selftest {
        /// Largest player count the invariants enumerate over.
        #[arg(long)]
        cap: Option<usize>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        trials: usize,
        /// Worker threads for the invariant table.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

#[derive(Subcommand)]
enum ReduceStep {
    /// Subset counting to zero-mass probability and back.
    Rpartition {
        /// Instance file: {"c": [..], "k": ..}.
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        pvec: String,
    },
    /// Perturbed triple whose spread isolates the zero mass.
    Khintchine {
        /// Special-form vector file.
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        pvec: String,
        /// Perturbation size, a rational in (0, 1/2).
        #[arg(long, default_value = "1/4")]
        y: String,
    },
    /// Maximum of a.c over the semivalue polytope.
    Optimize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        pvec: String,
        #[arg(long, value_enum, default_value_t = OptimizeArg::ClosedForm)]
        mode: OptimizeArg,
        #[arg(long, default_value_t = DEFAULT_VERTEX_BOUND)]
        bound: u64,
    },
    /// Transfer a special-form instance to one with positive weights.
    Pton {
        /// Instance file: {"weights": [..], "targets": [..]}.
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        pvec: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Brute,
    Dp,
}

#[derive(Clone, Copy, ValueEnum)]
enum InvertMode {
    Exact,
    Nearest,
    Heuristic,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormArg {
    L1,
    L2,
}

#[derive(Clone, Copy, ValueEnum)]
enum OptimizeArg {
    ClosedForm,
    VertexEnum,
}

/// A failed run, already shaped for the error object.
struct Failure {
    kind: &'static str,
    message: String,
}

impl Failure {
    fn new(kind: &'static str, message: impl Into<String>) -> Self {
        Self {
            kind,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let kind = match &e {
            Error::InvalidRational(_) => "invalid_rational",
            Error::ZeroDenominator => "zero_denominator",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::EmptyInstance => "empty_instance",
            Error::NegativeEntry { .. } => "negative_entry",
            Error::NotNormalized { .. } => "not_normalized",
            Error::UnknownPreset(_) => "unknown_preset",
            Error::InstanceTooLarge { .. } => "instance_too_large",
            Error::NegativeWeights => "negative_weights",
            Error::WeightRangeOverflow { .. } => "weight_range_overflow",
            Error::DegenerateDenominator => "degenerate_denominator",
            Error::NotSpecialForm(_) => "not_special_form",
            Error::InvalidPerturbation { .. } => "invalid_perturbation",
            Error::ArityMismatch { .. } => "arity_mismatch",
            Error::ZeroSemivalue { .. } => "zero_semivalue",
            Error::Precondition(_) => "precondition",
        };
        Failure::new(kind, e.to_string())
    }
}

type RunResult = Result<(Value, u8), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out.clone();
    let (value, code) = match run(cli) {
        Ok(pair) => pair,
        Err(f) => (json!({"error": {"kind": f.kind, "message": f.message}}), 2),
    };
    let mut line = value.to_string();
    line.push('\n');
    print!("{line}");
    if let Some(path) = out {
        if fs::write(&path, &line).is_err() {
            eprintln!("svf: cannot write {}", path.display());
            return ExitCode::from(2);
        }
    }
    ExitCode::from(code)
}

fn cap() -> usize {
    std::env::var("SVF_CAP")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_ENUM_CAP)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::new("io", format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::new("parse", format!("{}: {e}", path.display())))
}

/// Targets appear both bare and as semivalues output; accept either.
#[derive(Deserialize)]
#[serde(untagged)]
enum TargetsFile {
    Wrapped { values: Vec<Rational> },
    Bare(Vec<Rational>),
}

fn read_targets(path: &Path) -> Result<Vec<Rational>, Failure> {
    Ok(match read_json(path)? {
        TargetsFile::Wrapped { values } => values,
        TargetsFile::Bare(values) => values,
    })
}

fn parse_rational(text: &str, what: &str) -> Result<Rational, Failure> {
    text.parse::<Rational>()
        .map_err(|_| Failure::new("invalid_rational", format!("{what}: cannot parse {text:?}")))
}

/// Resolve a --pvec spec: preset name, preset:N, or a JSON file. Presets
/// without an explicit size take it from the companion input.
fn load_pvec(spec: &str, inferred_n: Option<usize>) -> Result<ProbabilityVector, Failure> {
    if spec.ends_with(".json") || Path::new(spec).is_file() {
        return read_json(Path::new(spec));
    }
    let (name, given_n) = match spec.split_once(':') {
        Some((name, suffix)) => {
            let n = suffix.parse::<usize>().map_err(|_| {
                Failure::new("usage", format!("bad player count in --pvec {spec:?}"))
            })?;
            (name, Some(n))
        }
        None => (spec, None),
    };
    let n = given_n.or(inferred_n).ok_or_else(|| {
        Failure::new(
            "usage",
            format!("--pvec {spec:?} needs :N when no input fixes the size"),
        )
    })?;
    match name {
        "banzhaf" => Ok(ProbabilityVector::banzhaf(n)?),
        "shapley" => Ok(ProbabilityVector::shapley(n)?),
        other => Err(Error::UnknownPreset(other.to_string()).into()),
    }
}

#[derive(serde::Serialize)]
struct ReductionTrace {
    step: &'static str,
    input: Value,
    output: Value,
    recovered: Option<Rational>,
    checks: BTreeMap<&'static str, bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timing_ms: Option<u128>,
}

impl ReductionTrace {
    fn finish(self, started: Option<Instant>) -> (Value, u8) {
        let code = u8::from(!self.checks.values().all(|&ok| ok));
        let mut trace = self;
        trace.timing_ms = started.map(|t| t.elapsed().as_millis());
        (serde_json::to_value(trace).expect("trace serializes"), code)
    }
}

fn run(cli: Cli) -> RunResult {
    match cli.command {
        Command::Semivalues { game, pvec, method } => {
            let game: WeightedGame = read_json(&game)?;
            let p = load_pvec(&pvec, Some(game.n()))?;
            let sv = match method {
                Method::Brute => semivalues_bruteforce(&game, &p, cap())?,
                Method::Dp => semivalues_pivot_dp(&game, &p)?,
            };
            Ok((serde_json::to_value(sv).expect("values serialize"), 0))
        }
        Command::Khintchine { vec, pvec, method } => {
            let a: Vec<Rational> = read_json(&vec)?;
            let p = load_pvec(&pvec, Some(a.len()))?;
            let method = match method {
                Method::Brute => KhintchineMethod::Brute,
                Method::Dp => KhintchineMethod::Dp,
            };
            let result = khintchine(&a, &p, method, cap())?;
            Ok((serde_json::to_value(result).expect("result serializes"), 0))
        }
        Command::PartitionProb { vec, pvec } => {
            let w: Vec<Rational> = read_json(&vec)?;
            let p = load_pvec(&pvec, Some(w.len()))?;
            let probability = partition_probability(&w, &p)?;
            Ok((json!({ "probability": probability }), 0))
        }
        Command::Reduce { step, timing } => {
            let started = timing.then(Instant::now);
            reduce(step, started)
        }
        Command::Invert {
            targets,
            theta,
            pvec,
            mode,
            bound,
            norm,
            iterations,
            step,
        } => {
            let targets = read_targets(&targets)?;
            let p = load_pvec(&pvec, Some(targets.len()))?;
            let theta = parse_rational(&theta, "--theta")?;
            let inst = InverseInstance::new(targets, theta, p)?;
            let result = match mode {
                InvertMode::Exact => inverse_exact(&inst, bound)?,
                InvertMode::Nearest => {
                    let norm = match norm {
                        NormArg::L1 => DistanceNorm::L1,
                        NormArg::L2 => DistanceNorm::L2,
                    };
                    inverse_nearest(&inst, bound, norm)?
                }
                InvertMode::Heuristic => {
                    let step = parse_rational(&step, "--step")?;
                    iterative_banzhaf_heuristic(&inst, iterations, &step, cap())?
                }
            };
            let code = u8::from(result.status == InverseStatus::NoSolutionInClass);
            Ok((serde_json::to_value(result).expect("result serializes"), code))
        }
        Command::Verify {
            game,
            targets,
            pvec,
        } => {
            let game: WeightedGame = read_json(&game)?;
            let targets = read_targets(&targets)?;
            let p = load_pvec(&pvec, Some(game.n()))?;
            let verified = verify_semivalues(&game, &p, &targets, cap())?;
            Ok((json!({ "verified": verified }), u8::from(!verified)))
        }
        Command::MembershipCert { cert, pvec } => {
            let cert: CaratheodoryCertificate = read_json(&cert)?;
            let p = load_pvec(&pvec, Some(cert.point.len()))?;
            let valid = verify_membership_certificate(&cert, &p, cap())?;
            Ok((json!({ "valid": valid }), u8::from(!valid)))
        }
        Command::Selftest {
            cap: cap_flag,
            seed,
            trials,
            jobs,
        } => {
            let config = SelftestConfig {
                cap: cap_flag
                    .or_else(|| std::env::var("SVF_CAP").ok().and_then(|s| s.parse().ok()))
                    .unwrap_or(DEFAULT_SELFTEST_CAP),
                seed,
                trials,
            };
            let report = run_selftest(&config, jobs.max(1));
            let code = u8::from(!report.all_passed());
            let value = json!({
                "all_passed": report.all_passed(),
                "outcomes": report.outcomes,
            });
            Ok((value, code))
        }
    }
}

fn reduce(step: ReduceStep, started: Option<Instant>) -> RunResult {
    match step {
        ReduceStep::Rpartition { input, pvec } => {
            let inst: RPartitionInstance = read_json(&input)?;
            let p = load_pvec(&pvec, Some(inst.n() + 2))?;
            let run = run_rpartition_pipeline(&inst, &p, cap())?;
            let mut checks = BTreeMap::new();
            checks.insert("promise_holds", run.promise.holds);
            checks.insert(
                "count_matches",
                run.recovered == Rational::from(run.promise.count),
            );
            Ok(ReductionTrace {
                step: "rpartition",
                input: serde_json::to_value(&inst).expect("instance serializes"),
                output: json!({ "vector": run.vector, "probability": run.probability }),
                recovered: Some(run.recovered),
                checks,
                timing_ms: None,
            }
            .finish(started))
        }
        ReduceStep::Khintchine { input, pvec, y } => {
            let a: Vec<Rational> = read_json(&input)?;
            let p = load_pvec(&pvec, Some(a.len()))?;
            let y = parse_rational(&y, "--y")?;
            let triple = build_khintchine_triple(&a, &y)?;
            let result = check_triple_identities(&triple, &p, cap())?;
            let mut checks = BTreeMap::new();
            checks.insert("pointwise", result.pointwise);
            checks.insert("aggregate", result.aggregate);
            checks.insert("partition_match", result.partition_match);
            Ok(ReductionTrace {
                step: "khintchine",
                input: serde_json::to_value(&a).expect("vector serializes"),
                output: serde_json::to_value(&triple).expect("triple serializes"),
                recovered: Some(result.recovered_probability),
                checks,
                timing_ms: None,
            }
            .finish(started))
        }
        ReduceStep::Optimize {
            input,
            pvec,
            mode,
            bound,
        } => {
            let a: Vec<Rational> = read_json(&input)?;
            let p = load_pvec(&pvec, Some(a.len()))?;
            let mode = match mode {
                OptimizeArg::ClosedForm => OptimizeMode::ClosedForm,
                OptimizeArg::VertexEnum => OptimizeMode::VertexEnum,
            };
            let outcome = optimize_over_polytope(&a, &p, mode, bound, cap())?;
            let witness_values = semivalues_bruteforce(&outcome.witness, &p, cap())?;
            let attained: Rational = a
                .iter()
                .zip(witness_values.values())
                .map(|(x, y)| x * y)
                .sum();
            let mut checks = BTreeMap::new();
            checks.insert("witness_attains", attained == outcome.value);
            if a.len() <= VERTEX_ENUM_MAX_PLAYERS {
                let other = match mode {
                    OptimizeMode::ClosedForm => OptimizeMode::VertexEnum,
                    OptimizeMode::VertexEnum => OptimizeMode::ClosedForm,
                };
                let cross = optimize_over_polytope(&a, &p, other, bound, cap())?;
                checks.insert("modes_agree", cross.value == outcome.value);
            }
            Ok(ReductionTrace {
                step: "optimize",
                input: serde_json::to_value(&a).expect("vector serializes"),
                output: serde_json::to_value(&outcome).expect("outcome serializes"),
                recovered: Some(outcome.value.clone()),
                checks,
                timing_ms: None,
            }
            .finish(started))
        }
        ReduceStep::Pton { input, pvec } => {
            #[derive(Deserialize, serde::Serialize)]
            struct PtonInput {
                weights: Vec<Rational>,
                targets: Vec<Rational>,
            }
            let inst: PtonInput = read_json(&input)?;
            let p = load_pvec(&pvec, Some(inst.weights.len()))?;
            let out = pton_transform(&inst.weights, &inst.targets, &p)?;
            let mut checks = BTreeMap::new();
            checks.insert("shift_identities", check_pton_identities(&inst.weights, &p, cap())?);
            let before = WeightedGame::new(inst.weights.clone(), Rational::zero())?;
            let after = WeightedGame::new(out.weights.clone(), out.theta.clone())?;
            let yes_before =
                semivalues_bruteforce(&before, &p, cap())?.into_values() == inst.targets;
            let yes_after = semivalues_bruteforce(&after, &p, cap())?.into_values() == out.targets;
            checks.insert("status_preserved", yes_before == yes_after);
            Ok(ReductionTrace {
                step: "pton",
                input: serde_json::to_value(&inst).expect("instance serializes"),
                output: serde_json::to_value(&out).expect("instance serializes"),
                recovered: None,
                checks,
                timing_ms: None,
            }
            .finish(started))
        }
    }
}

use std::fmt::Write as _;
use std::path::Path;

use cde_core::discrete_convex::{FairnessObjective, ObjectiveKind};
use cde_core::polyhedra::{
    ascending_greedy_vertex, submodularity_violation, support_function_violation,
    tight_closure_violation,
};
use cde_core::{
    check_exchange_axiom, check_mconvex_inequality, da, enumerate_r_alpha, min_sum_rate,
    parse_instance, sda, truncation_table, verify_recovery, EnumeratedRegion, Error, Instance,
    RateVector, SolverTrace,
};

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success = 0,
    InputError = 1,
    Infeasible = 2,
    VerificationFailed = 3,
}

/// Text to print plus the exit status of a subcommand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub status: Status,
    pub output: String,
}

impl Outcome {
    fn new(status: Status, output: String) -> Self {
        Outcome { status, output }
    }

    pub fn error(err: &Error) -> Self {
        let status = match err {
            Error::InfeasibleBudget { .. }
            | Error::InfeasibleRates { .. }
            | Error::EmptyRegion { .. } => Status::Infeasible,
            _ => Status::InputError,
        };
        Outcome::new(status, format!("error: {err}\n"))
    }

    fn input_error(message: impl std::fmt::Display) -> Self {
        Outcome::new(Status::InputError, format!("error: {message}\n"))
    }
}

macro_rules! attempt {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(err) => return Outcome::error(&err),
        }
    };
}

pub fn load_instance(path: &Path) -> Result<Instance, Outcome> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Outcome::input_error(format!("reading {}: {e}", path.display())))?;
    parse_instance(&text).map_err(|e| Outcome::error(&e))
}

pub fn guard(inst: &Instance, max_clients: usize) -> Result<(), Outcome> {
    if inst.num_clients() > max_clients {
        return Err(Outcome::error(&Error::Guard(format!(
            "{} clients exceeds CDE_MAX_K = {max_clients}",
            inst.num_clients()
        ))));
    }
    Ok(())
}

/// Parses `uniform`, `jain`, `proportional` or `weighted:w1,..,wK`.
pub fn parse_objective(spec: &str) -> Result<ObjectiveKind, String> {
    match spec {
        "uniform" => Ok(ObjectiveKind::Uniform),
        "jain" => Ok(ObjectiveKind::Jain),
        "proportional" => Ok(ObjectiveKind::Proportional),
        _ => {
            let weights = spec
                .strip_prefix("weighted:")
                .ok_or_else(|| format!("unknown objective `{spec}`"))?;
            let weights = weights
                .split(',')
                .map(|w| {
                    w.trim()
                        .parse::<f64>()
                        .map_err(|_| format!("invalid weight `{w}`"))
                })
                .collect::<Result<Vec<_>, _>>()?;
            if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
                return Err("weights must be finite and nonnegative".into());
            }
            Ok(ObjectiveKind::WeightedLinear(weights))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveArgs {
    pub alpha: Option<u32>,
    pub objective: ObjectiveKind,
    pub algorithm: cde_core::Algorithm,
    pub start: Option<RateVector>,
}

/// Runs one solver; the trace is returned for optional export.
pub fn solve(inst: &Instance, args: &SolveArgs) -> (Outcome, Option<SolverTrace>) {
    let alpha = args.alpha.unwrap_or_else(|| min_sum_rate(inst));
    let trace = match args.algorithm {
        cde_core::Algorithm::Sda => {
            let start = match &args.start {
                Some(s) => Ok(s.clone()),
                None => ascending_greedy_vertex(inst, alpha),
            };
            start.and_then(|s| sda(inst, alpha, &args.objective, s))
        }
        cde_core::Algorithm::Da => da(inst, alpha, &args.objective),
    };
    let trace = match trace {
        Ok(t) => t,
        Err(e) => return (Outcome::error(&e), None),
    };
    let mut out = String::new();
    writeln!(out, "algorithm: {}", trace.algorithm).unwrap();
    writeln!(out, "objective: {}", args.objective.name()).unwrap();
    writeln!(out, "alpha: {alpha}").unwrap();
    writeln!(out, "start: {}", trace.start()).unwrap();
    writeln!(out, "result: {}", trace.result()).unwrap();
    writeln!(out, "value: {:.6}", trace.objective()).unwrap();
    writeln!(out, "iterations: {}", trace.iterations).unwrap();
    writeln!(out, "oracle_calls: {}", trace.oracle_calls).unwrap();
    (Outcome::new(Status::Success, out), Some(trace))
}

pub fn min_sum_rate_report(inst: &Instance) -> Outcome {
    let alpha = min_sum_rate(inst);
    let witness = attempt!(ascending_greedy_vertex(inst, alpha));
    Outcome::new(
        Status::Success,
        format!("min_sum_rate: {alpha}\nwitness: {witness}\n"),
    )
}

/// Lists `R_α` as CSV.
pub fn enumerate(inst: &Instance, alpha: u32) -> (Outcome, Option<EnumeratedRegion>) {
    let region = match enumerate_r_alpha(inst, alpha) {
        Ok(r) => r,
        Err(e) => return (Outcome::error(&e), None),
    };
    if region.is_empty() {
        let err = Error::InfeasibleBudget {
            alpha,
            min_sum_rate: min_sum_rate(inst),
        };
        return (Outcome::error(&err), Some(region));
    }
    (Outcome::new(Status::Success, region.to_csv()), Some(region))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Property {
    Exchange,
    MConvex,
    TightClosure,
    SupportFunction,
    Submodular,
}

impl Property {
    pub const ALL: [Property; 5] = [
        Property::Exchange,
        Property::MConvex,
        Property::TightClosure,
        Property::SupportFunction,
        Property::Submodular,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::Exchange => "exc",
            Property::MConvex => "mconvex",
            Property::TightClosure => "lemma1",
            Property::SupportFunction => "supmap",
            Property::Submodular => "submod",
        }
    }

    pub fn parse(name: &str) -> Result<Self, String> {
        Property::ALL
            .into_iter()
            .find(|p| p.name() == name.trim())
            .ok_or_else(|| format!("unknown property `{name}`"))
    }
}

/// Runs the selected property checkers on `R_α`, or on `region` when given.
pub fn check(
    inst: &Instance,
    alpha: u32,
    properties: &[Property],
    region: Option<EnumeratedRegion>,
) -> Outcome {
    let region = match region {
        Some(r) => r,
        None => attempt!(enumerate_r_alpha(inst, alpha)),
    };
    if region.is_empty() {
        return Outcome::error(&Error::InfeasibleBudget {
            alpha,
            min_sum_rate: min_sum_rate(inst),
        });
    }
    let table = truncation_table(inst, alpha);
    let mut out = String::new();
    let mut all_hold = true;
    for &p in properties {
        let failure: Option<String> = match p {
            Property::Exchange => attempt!(check_exchange_axiom(&region))
                .witness
                .map(|w| format!("x={} y={} u={} has no repairing v", w.x, w.y, w.u + 1)),
            Property::MConvex => {
                let mut failure = None;
                for obj in [
                    FairnessObjective::uniform(alpha),
                    FairnessObjective::jain(alpha),
                ] {
                    if let Some(w) = attempt!(check_mconvex_inequality(&obj, &region)).witness {
                        failure = Some(format!(
                            "{}: x={} y={} u={}",
                            obj.kind.name(),
                            w.x,
                            w.y,
                            w.u + 1
                        ));
                        break;
                    }
                }
                failure
            }
            Property::TightClosure => match tight_closure_violation(inst, region.members()) {
                Ok(v) => v.map(|(r, x, y)| format!("r={r}: {x} and {y} tight, intersection not")),
                Err(e) => Some(e.to_string()),
            },
            Property::SupportFunction => {
                support_function_violation(&table, region.members()).map(|(s, sup, g)| {
                    let sup = sup.map_or("-".to_string(), |v| v.to_string());
                    format!("S={s}: max r(S)={sup} but g(S)={g}")
                })
            }
            Property::Submodular => {
                submodularity_violation(&table).map(|(x, y)| format!("X={x} Y={y}"))
            }
        };
        match failure {
            None => writeln!(out, "{}: pass", p.name()).unwrap(),
            Some(w) => {
                all_hold = false;
                writeln!(out, "{}: FAIL ({w})", p.name()).unwrap();
            }
        }
    }
    let status = if all_hold {
        Status::Success
    } else {
        Status::VerificationFailed
    };
    Outcome::new(status, out)
}

pub fn verify(inst: &Instance, rates: &RateVector, field: u64, trials: u32, seed: u64) -> Outcome {
    let report = attempt!(verify_recovery(inst, rates, field, seed, trials));
    let mut out = String::new();
    writeln!(out, "rates: {rates}").unwrap();
    writeln!(out, "field: {}", report.field_size).unwrap();
    writeln!(out, "trials: {}", report.trials).unwrap();
    writeln!(out, "failures: {}", report.failures).unwrap();
    for (j, rank) in report.per_client_rank.iter().enumerate() {
        writeln!(out, "client {}: rank {rank}/{}", j + 1, report.num_packets).unwrap();
    }
    if report.success {
        writeln!(out, "verdict: universal recovery").unwrap();
        Outcome::new(Status::Success, out)
    } else {
        writeln!(out, "verdict: recovery failed").unwrap();
        Outcome::new(Status::VerificationFailed, out)
    }
}

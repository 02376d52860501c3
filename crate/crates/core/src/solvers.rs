//! Steepest descent over `R_α` and the marginal-cost greedy over `P(g_α)`.

use std::fmt;

use crate::discrete_convex::{FairnessObjective, ObjectiveKind};
use crate::instance::Instance;
use crate::polyhedra::{
    in_p, in_r_alpha, infeasible, min_sum_rate, satisfies_cuts, OracleCounter, RateVector,
    TruncationTable,
};
use crate::{Error, Result, OBJECTIVE_TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Sda,
    Da,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Sda => "sda",
            Algorithm::Da => "da",
        })
    }
}

/// The iterate path of one solver run.
///
/// `objective_values` holds the separable cost of each iterate. SDA iterates
/// all lie in `R_α`, so these are `F_α` values; DA iterates before the last
/// lie in `P(g_α)` with sum below `α`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverTrace {
    pub algorithm: Algorithm,
    pub alpha: u32,
    pub iterates: Vec<RateVector>,
    pub objective_values: Vec<f64>,
    /// Cumulative oracle calls at the moment each iterate was accepted.
    pub cumulative_oracle_calls: Vec<u64>,
    /// Improving moves (SDA) or unit increments (DA).
    pub iterations: u64,
    /// Total feasibility checks over the run, including the final probe.
    pub oracle_calls: u64,
}

impl SolverTrace {
    fn new(algorithm: Algorithm, alpha: u32, start: RateVector, value: f64) -> Self {
        SolverTrace {
            algorithm,
            alpha,
            iterates: vec![start],
            objective_values: vec![value],
            cumulative_oracle_calls: vec![0],
            iterations: 0,
            oracle_calls: 0,
        }
    }

    fn push(&mut self, r: RateVector, value: f64, calls: &OracleCounter) {
        self.iterates.push(r);
        self.objective_values.push(value);
        self.cumulative_oracle_calls.push(calls.count());
        self.iterations += 1;
    }

    pub fn start(&self) -> &RateVector {
        &self.iterates[0]
    }

    pub fn result(&self) -> &RateVector {
        self.iterates.last().expect("trace holds the start")
    }

    pub fn objective(&self) -> f64 {
        *self.objective_values.last().expect("trace holds the start")
    }

    /// CSV rows `k,r_1..r_K,objective,cumulative_oracle_calls` with a header.
    pub fn to_csv(&self) -> String {
        let k = self.start().len();
        let mut out = String::from("k");
        for j in 1..=k {
            out.push_str(&format!(",r_{j}"));
        }
        out.push_str(",objective,cumulative_oracle_calls\n");
        for (i, r) in self.iterates.iter().enumerate() {
            out.push_str(&i.to_string());
            for x in r.as_slice() {
                out.push_str(&format!(",{x}"));
            }
            out.push_str(&format!(
                ",{},{}\n",
                self.objective_values[i], self.cumulative_oracle_calls[i]
            ));
        }
        out
    }
}

fn budget_error(inst: &Instance, alpha: u32) -> Error {
    Error::InfeasibleBudget {
        alpha,
        min_sum_rate: min_sum_rate(inst),
    }
}

fn check_weights(inst: &Instance, kind: &ObjectiveKind) -> Result<()> {
    match kind {
        ObjectiveKind::WeightedLinear(w) if w.len() != inst.num_clients() => {
            Err(Error::Dimension {
                expected: inst.num_clients(),
                got: w.len(),
            })
        }
        _ => Ok(()),
    }
}

/// Steepest descent from a feasible `start`.
///
/// Each step scans the ordered pairs `(u, v)` lexicographically, skipping
/// `r_u = 0` without an oracle call, and keeps the feasible exchange
/// `r − e_u + e_v` of least cost (first one on ties). The move is taken only
/// if it strictly lowers the cost.
pub fn sda(
    inst: &Instance,
    alpha: u32,
    kind: &ObjectiveKind,
    start: RateVector,
) -> Result<SolverTrace> {
    check_weights(inst, kind)?;
    if start.len() != inst.num_clients() {
        return Err(Error::Dimension {
            expected: inst.num_clients(),
            got: start.len(),
        });
    }
    if !satisfies_cuts(inst, alpha, &start) {
        return Err(if TruncationTable::new(inst, alpha).region_nonempty() {
            infeasible(&start)
        } else {
            budget_error(inst, alpha)
        });
    }

    let obj = FairnessObjective::new(kind.clone(), alpha);
    let k = inst.num_clients();
    let mut calls = OracleCounter::new();
    let mut current = start.clone();
    let mut current_value = obj.separable_value(&current);
    let mut trace = SolverTrace::new(Algorithm::Sda, alpha, start, current_value);

    loop {
        let mut best: Option<(f64, RateVector)> = None;
        for u in 0..k {
            if current[u] == 0 {
                continue;
            }
            for v in (0..k).filter(|&v| v != u) {
                let candidate = current.exchanged(u, v).expect("r_u > 0");
                if !in_r_alpha(inst, alpha, &candidate, &mut calls) {
                    continue;
                }
                let value = obj.separable_value(&candidate);
                let improves = match &best {
                    None => true,
                    Some((b, _)) => value < b - OBJECTIVE_TOLERANCE,
                };
                if improves {
                    best = Some((value, candidate));
                }
            }
        }
        match best {
            Some((value, next)) if value < current_value - OBJECTIVE_TOLERANCE => {
                trace.push(next.clone(), value, &calls);
                current = next;
                current_value = value;
            }
            _ => break,
        }
    }
    trace.oracle_calls = calls.count();
    Ok(trace)
}

/// Marginal-cost greedy from the zero vector over `P(g_α)`: `α` unit steps,
/// each adding to the feasible client of least marginal cost (smallest index
/// on ties).
pub fn da(inst: &Instance, alpha: u32, kind: &ObjectiveKind) -> Result<SolverTrace> {
    check_weights(inst, kind)?;
    let k = inst.num_clients();
    let table = TruncationTable::new(inst, alpha);
    let obj = FairnessObjective::new(kind.clone(), alpha);
    let mut calls = OracleCounter::new();
    let mut current = RateVector::zeros(k);
    let mut trace = SolverTrace::new(
        Algorithm::Da,
        alpha,
        current.clone(),
        obj.separable_value(&current),
    );

    for _ in 0..alpha {
        let mut best: Option<(f64, usize)> = None;
        for j in 0..k {
            if !in_p(&table, &current.incremented(j), &mut calls) {
                continue;
            }
            let marginal = obj.marginal(j, current[j]);
            let improves = match best {
                None => true,
                Some((b, _)) => marginal < b - OBJECTIVE_TOLERANCE,
            };
            if improves {
                best = Some((marginal, j));
            }
        }
        let Some((_, j)) = best else {
            return Err(budget_error(inst, alpha));
        };
        current = current.incremented(j);
        trace.push(current.clone(), obj.separable_value(&current), &calls);
    }
    trace.oracle_calls = calls.count();
    Ok(trace)
}

/// `min { wᵀr : r ∈ R_α }` by steepest descent.
pub fn weighted_min(
    inst: &Instance,
    alpha: u32,
    weights: &[f64],
    start: RateVector,
) -> Result<SolverTrace> {
    sda(
        inst,
        alpha,
        &ObjectiveKind::WeightedLinear(weights.to_vec()),
        start,
    )
}

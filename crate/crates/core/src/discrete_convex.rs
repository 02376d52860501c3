//! Fairness objectives, explicit enumeration of `R_α`, and exhaustive
//! checkers for the M-convex structure of the problem.

use crate::instance::Instance;
use crate::polyhedra::{infeasible, satisfies_cuts, RateVector};
use crate::{Error, Result, OBJECTIVE_TOLERANCE};

/// Compositions of `α` into `K` parts beyond which enumeration refuses to run.
pub const MAX_COMPOSITIONS: u128 = 5_000_000;

/// Per-client cost term of a separable fairness objective.
#[derive(Debug, Clone, PartialEq)]
pub enum ObjectiveKind {
    /// `r ln r`, with `0 ln 0 = 0`.
    Uniform,
    /// `r² / α²`.
    Jain,
    /// `−ln r`, infinite at `r = 0`.
    Proportional,
    /// `w_j r_j`.
    WeightedLinear(Vec<f64>),
}

impl ObjectiveKind {
    pub fn name(&self) -> &'static str {
        match self {
            ObjectiveKind::Uniform => "uniform",
            ObjectiveKind::Jain => "jain",
            ObjectiveKind::Proportional => "proportional",
            ObjectiveKind::WeightedLinear(_) => "weighted",
        }
    }
}

/// `F_α`: a separable objective restricted to `R_α`.
#[derive(Debug, Clone, PartialEq)]
pub struct FairnessObjective {
    pub kind: ObjectiveKind,
    pub alpha: u32,
}

impl FairnessObjective {
    pub fn new(kind: ObjectiveKind, alpha: u32) -> Self {
        FairnessObjective { kind, alpha }
    }

    pub fn uniform(alpha: u32) -> Self {
        Self::new(ObjectiveKind::Uniform, alpha)
    }

    pub fn jain(alpha: u32) -> Self {
        Self::new(ObjectiveKind::Jain, alpha)
    }

    /// `f_j(r_j)`.
    pub fn term(&self, client: usize, rate: u32) -> f64 {
        let r = f64::from(rate);
        match &self.kind {
            ObjectiveKind::Uniform if rate == 0 => 0.0,
            ObjectiveKind::Uniform => r * r.ln(),
            ObjectiveKind::Jain => {
                let a = f64::from(self.alpha);
                if self.alpha == 0 {
                    0.0
                } else {
                    r * r / (a * a)
                }
            }
            ObjectiveKind::Proportional if rate == 0 => f64::INFINITY,
            ObjectiveKind::Proportional => -r.ln(),
            ObjectiveKind::WeightedLinear(w) => w[client] * r,
        }
    }

    /// `f_j(r_j + 1) − f_j(r_j)`; `−∞` for proportional fairness at zero.
    pub fn marginal(&self, client: usize, rate: u32) -> f64 {
        if matches!(self.kind, ObjectiveKind::Proportional) && rate == 0 {
            return f64::NEG_INFINITY;
        }
        self.term(client, rate + 1) - self.term(client, rate)
    }

    /// `Σ_j f_j(r_j)` without the feasibility indicator.
    pub fn separable_value(&self, r: &RateVector) -> f64 {
        r.as_slice()
            .iter()
            .enumerate()
            .map(|(j, &rate)| self.term(j, rate))
            .sum()
    }

    fn check_dimension(&self, k: usize) -> Result<()> {
        match &self.kind {
            ObjectiveKind::WeightedLinear(w) if w.len() != k => Err(Error::Dimension {
                expected: k,
                got: w.len(),
            }),
            _ => Ok(()),
        }
    }
}

/// `F_α(r)`: the separable sum on `R_α`, `+∞` elsewhere.
pub fn evaluate(obj: &FairnessObjective, inst: &Instance, r: &RateVector) -> f64 {
    if obj.check_dimension(inst.num_clients()).is_err() || !satisfies_cuts(inst, obj.alpha, r) {
        return f64::INFINITY;
    }
    obj.separable_value(r)
}

/// `R_α` listed explicitly in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumeratedRegion {
    alpha: u32,
    members: Vec<RateVector>,
}

impl EnumeratedRegion {
    /// Wraps an arbitrary point list, e.g. one read from a region file.
    /// Sorts and deduplicates; the sum-rate is taken from the first member.
    pub fn from_members(mut members: Vec<RateVector>) -> Self {
        members.sort();
        members.dedup();
        let alpha = members.first().map_or(0, RateVector::sum_rate);
        EnumeratedRegion { alpha, members }
    }

    pub fn alpha(&self) -> u32 {
        self.alpha
    }

    pub fn members(&self) -> &[RateVector] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, r: &RateVector) -> bool {
        self.members.binary_search(r).is_ok()
    }

    /// CSV rows `r_1,...,r_K` with a header.
    pub fn to_csv(&self) -> String {
        let k = self.members.first().map_or(0, RateVector::len);
        let header: Vec<String> = (1..=k).map(|j| format!("r_{j}")).collect();
        let mut out = header.join(",");
        out.push('\n');
        for r in &self.members {
            let row: Vec<String> = r.as_slice().iter().map(u32::to_string).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Parses the CSV produced by [`EnumeratedRegion::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self> {
        let members = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('r') && !l.starts_with('#'))
            .map(str::parse::<RateVector>)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_members(members))
    }

    fn validate(&self) -> Result<usize> {
        let first = self
            .members
            .first()
            .ok_or_else(|| Error::MalformedRegion("region is empty".into()))?;
        let k = first.len();
        for r in &self.members {
            if r.len() != k {
                return Err(Error::MalformedRegion(format!(
                    "{r} has {} entries, expected {k}",
                    r.len()
                )));
            }
            if r.sum_rate() != self.alpha {
                return Err(Error::MalformedRegion(format!(
                    "{r} has sum {}, expected constant sum {}",
                    r.sum_rate(),
                    self.alpha
                )));
            }
        }
        Ok(k)
    }
}

fn compositions(alpha: u32, k: usize) -> u128 {
    // C(α + K − 1, K − 1)
    let n = u128::from(alpha) + k as u128 - 1;
    let mut c: u128 = 1;
    for i in 0..(k as u128 - 1) {
        c = c * (n - i) / (i + 1);
    }
    c
}

/// Every integer strategy with sum-rate `α` that satisfies all cut constraints.
pub fn enumerate_r_alpha(inst: &Instance, alpha: u32) -> Result<EnumeratedRegion> {
    let k = inst.num_clients();
    let count = compositions(alpha, k);
    if count > MAX_COMPOSITIONS {
        return Err(Error::Guard(format!(
            "{count} candidate vectors for K={k}, alpha={alpha} exceeds {MAX_COMPOSITIONS}"
        )));
    }
    let mut members = Vec::new();
    let mut current = vec![0u32; k];
    // Lexicographic order falls out of filling coordinates left to right.
    fn fill(
        inst: &Instance,
        alpha: u32,
        pos: usize,
        remaining: u32,
        current: &mut Vec<u32>,
        out: &mut Vec<RateVector>,
    ) {
        if pos + 1 == current.len() {
            current[pos] = remaining;
            let r = RateVector::new(current.clone());
            if satisfies_cuts(inst, alpha, &r) {
                out.push(r);
            }
            return;
        }
        for v in 0..=remaining {
            current[pos] = v;
            fill(inst, alpha, pos + 1, remaining - v, current, out);
        }
    }
    fill(inst, alpha, 0, alpha, &mut current, &mut members);
    Ok(EnumeratedRegion { alpha, members })
}

/// A violation of the exchange axiom: no `v` repairs `x − e_u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExchangeViolation {
    pub x: RateVector,
    pub y: RateVector,
    pub u: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExchangeReport {
    pub holds: bool,
    pub witness: Option<ExchangeViolation>,
}

/// Checks (EXC): for all `x, y` and `u ∈ supp⁺(x − y)` some `v ∈ supp⁻(x − y)`
/// has `x − e_u + e_v` in the region.
pub fn check_exchange_axiom(region: &EnumeratedRegion) -> Result<ExchangeReport> {
    let k = region.validate()?;
    for x in region.members() {
        for y in region.members() {
            for u in (0..k).filter(|&u| x[u] > y[u]) {
                let repaired = (0..k)
                    .filter(|&v| x[v] < y[v])
                    .filter_map(|v| x.exchanged(u, v))
                    .any(|z| region.contains(&z));
                if !repaired {
                    return Ok(ExchangeReport {
                        holds: false,
                        witness: Some(ExchangeViolation {
                            x: x.clone(),
                            y: y.clone(),
                            u,
                        }),
                    });
                }
            }
        }
    }
    Ok(ExchangeReport {
        holds: true,
        witness: None,
    })
}

/// A violation of the M-convex exchange inequality for the pair `(x, y)` and
/// coordinate `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct MConvexViolation {
    pub x: RateVector,
    pub y: RateVector,
    pub u: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MConvexReport {
    pub holds: bool,
    pub witness: Option<MConvexViolation>,
}

/// Checks `f(x) + f(y) ≥ f(x − e_u + e_v) + f(y + e_u − e_v)` for some
/// `v ∈ supp⁻(x − y)`, for every `x, y` in the region and `u ∈ supp⁺(x − y)`.
/// The objective is `+∞` off the region.
pub fn check_mconvex_inequality(
    obj: &FairnessObjective,
    region: &EnumeratedRegion,
) -> Result<MConvexReport> {
    let k = region.validate()?;
    obj.check_dimension(k)?;
    let value = |r: &RateVector| {
        if region.contains(r) {
            obj.separable_value(r)
        } else {
            f64::INFINITY
        }
    };
    for x in region.members() {
        let fx = value(x);
        for y in region.members() {
            let lhs = fx + value(y);
            for u in (0..k).filter(|&u| x[u] > y[u]) {
                let ok = (0..k).filter(|&v| x[v] < y[v]).any(|v| {
                    let x2 = x.exchanged(u, v).expect("x[u] > y[u] >= 0");
                    let y2 = y.exchanged(v, u).expect("y[v] > x[v] >= 0");
                    let rhs = value(&x2) + value(&y2);
                    rhs.is_finite() && lhs + OBJECTIVE_TOLERANCE >= rhs
                });
                if !ok {
                    return Ok(MConvexReport {
                        holds: false,
                        witness: Some(MConvexViolation {
                            x: x.clone(),
                            y: y.clone(),
                            u,
                        }),
                    });
                }
            }
        }
    }
    Ok(MConvexReport {
        holds: true,
        witness: None,
    })
}

/// Local optimality under single exchanges `r − e_u + e_v`, which for an
/// M-convex objective is equivalent to global optimality.
pub fn check_optimality(obj: &FairnessObjective, inst: &Instance, r: &RateVector) -> Result<bool> {
    obj.check_dimension(inst.num_clients())?;
    if !satisfies_cuts(inst, obj.alpha, r) {
        return Err(infeasible(r));
    }
    let fr = obj.separable_value(r);
    let k = inst.num_clients();
    for u in 0..k {
        for v in (0..k).filter(|&v| v != u) {
            let Some(next) = r.exchanged(u, v) else {
                continue;
            };
            if satisfies_cuts(inst, obj.alpha, &next)
                && obj.separable_value(&next) < fr - OBJECTIVE_TOLERANCE
            {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Exact minimizer set by exhaustive evaluation, ties within tolerance.
pub fn brute_force_argmin(
    obj: &FairnessObjective,
    region: &EnumeratedRegion,
) -> Result<Vec<RateVector>> {
    if region.is_empty() {
        return Err(Error::MalformedRegion("region is empty".into()));
    }
    if let Some(first) = region.members().first() {
        obj.check_dimension(first.len())?;
    }
    let values: Vec<f64> = region
        .members()
        .iter()
        .map(|r| obj.separable_value(r))
        .collect();
    let best = values.iter().copied().fold(f64::INFINITY, f64::min);
    if !best.is_finite() {
        return Err(Error::AllInfinite);
    }
    Ok(region
        .members()
        .iter()
        .zip(&values)
        .filter(|(_, &v)| v <= best + OBJECTIVE_TOLERANCE)
        .map(|(r, _)| r.clone())
        .collect())
}

/// `L_1(α)`: the largest pairwise l1 distance in the region.
pub fn l1_size(region: &EnumeratedRegion) -> u64 {
    let m = region.members();
    m.iter()
        .enumerate()
        .flat_map(|(i, x)| m[i + 1..].iter().map(move |y| x.l1_distance(y)))
        .max()
        .unwrap_or(0)
}

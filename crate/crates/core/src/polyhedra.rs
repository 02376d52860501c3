//! The submodular layer behind the feasible region.
//!
//! A strategy `r` with sum-rate `α` achieves universal recovery iff
//! `r(S) ≥ entry(S)` for every proper subset `S`. Complementing each cut
//! gives the upper-bound form `r(S) ≤ α − |⋂_{j∈S} H_j^c|`, a crossing
//! submodular function. Its partition truncation `g_α` is fully submodular
//! and the feasible strategies are exactly the integer points of the base
//! polyhedron `B(g_α)`, which is nonempty iff `g_α(C) = α`.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::instance::Instance;
use crate::subset::ClientSubset;
use crate::{Error, Result};

/// Integer transmission strategy: `r[j]` broadcasts by client `j`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RateVector(Vec<u32>);

impl RateVector {
    pub fn new(rates: Vec<u32>) -> Self {
        RateVector(rates)
    }

    pub fn zeros(k: usize) -> Self {
        RateVector(vec![0; k])
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<u32> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The sum-rate `α`.
    pub fn sum_rate(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `r(S)`.
    pub fn restricted_sum(&self, s: ClientSubset) -> u64 {
        s.clients().map(|j| u64::from(self.0[j])).sum()
    }

    /// `r(S)` for every subset, indexed by mask.
    pub fn subset_sums(&self) -> Vec<u64> {
        let mut sums = vec![0u64; 1 << self.0.len()];
        for s in 1..sums.len() {
            let low = s.trailing_zeros() as usize;
            sums[s] = sums[s & (s - 1)] + u64::from(self.0[low]);
        }
        sums
    }

    pub fn l1_distance(&self, other: &RateVector) -> u64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| u64::from(a.abs_diff(b)))
            .sum()
    }

    /// `r − e_from + e_to`, or `None` when `r[from] = 0`.
    pub fn exchanged(&self, from: usize, to: usize) -> Option<RateVector> {
        let mut next = self.0.clone();
        next[from] = next[from].checked_sub(1)?;
        next[to] += 1;
        Some(RateVector(next))
    }

    /// `r + e_j`.
    pub fn incremented(&self, j: usize) -> RateVector {
        let mut next = self.0.clone();
        next[j] += 1;
        RateVector(next)
    }
}

impl std::ops::Index<usize> for RateVector {
    type Output = u32;

    fn index(&self, j: usize) -> &u32 {
        &self.0[j]
    }
}

impl From<Vec<u32>> for RateVector {
    fn from(v: Vec<u32>) -> Self {
        RateVector(v)
    }
}

impl fmt::Display for RateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, r) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{r}")?;
        }
        f.write_str(")")
    }
}

/// Parses `2,1,1` (surrounding parentheses optional).
impl FromStr for RateVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        inner
            .split(',')
            .map(|t| {
                t.trim().parse::<u32>().map_err(|_| Error::Syntax {
                    line: 0,
                    message: format!("invalid rate `{}` in `{s}`", t.trim()),
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(RateVector)
    }
}

/// Counts feasibility-oracle invocations over a solver run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OracleCounter(u64);

impl OracleCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn tick(&mut self) {
        self.0 += 1;
    }

    pub fn count(&self) -> u64 {
        self.0
    }
}

/// `ǵ_α(S) = α − |⋂_{j∈S} H_j^c|` for nonempty `S`, and `0` for `S = ∅`.
pub fn crossing_value(inst: &Instance, alpha: u32, s: ClientSubset) -> i64 {
    if s.is_empty() {
        0
    } else {
        i64::from(alpha) - i64::from(inst.missing().missing_at_all(s))
    }
}

/// The crossing function and its partition truncation for one sum-rate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncationTable {
    alpha: u32,
    num_clients: usize,
    crossing: Vec<i64>,
    truncated: Vec<i64>,
}

impl TruncationTable {
    pub fn new(inst: &Instance, alpha: u32) -> Self {
        let k = inst.num_clients();
        let crossing: Vec<i64> = ClientSubset::all(k)
            .map(|s| crossing_value(inst, alpha, s))
            .collect();

        // g(S) = min over blocks T ∋ min(S) of ǵ(T) + g(S \ T).
        let mut truncated = vec![0i64; crossing.len()];
        for s in 1..crossing.len() {
            let low = s & s.wrapping_neg();
            let rest = s ^ low;
            let mut best = crossing[s];
            let mut sub = rest;
            loop {
                // Block T = sub ∪ {low}; the remainder is rest \ sub.
                let block = sub | low;
                if block != s {
                    best = best.min(crossing[block] + truncated[rest ^ sub]);
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
            truncated[s] = best;
        }

        TruncationTable {
            alpha,
            num_clients: k,
            crossing,
            truncated,
        }
    }

    pub fn alpha(&self) -> u32 {
        self.alpha
    }

    pub fn num_clients(&self) -> usize {
        self.num_clients
    }

    pub fn crossing(&self, s: ClientSubset) -> i64 {
        self.crossing[s.index()]
    }

    pub fn truncated(&self, s: ClientSubset) -> i64 {
        self.truncated[s.index()]
    }

    pub fn crossing_values(&self) -> &[i64] {
        &self.crossing
    }

    pub fn truncated_values(&self) -> &[i64] {
        &self.truncated
    }

    /// `g_α(C)`; the feasible region is nonempty iff this equals `α`.
    pub fn total(&self) -> i64 {
        *self
            .truncated
            .last()
            .expect("table has at least two entries")
    }

    pub fn region_nonempty(&self) -> bool {
        self.total() == i64::from(self.alpha)
    }

    /// `r ∈ P(g_α)`: `r(S) ≤ g_α(S)` for every subset.
    pub fn contains(&self, r: &RateVector) -> bool {
        r.len() == self.num_clients
            && r.subset_sums()
                .iter()
                .zip(&self.truncated)
                .all(|(&sum, &g)| sum as i64 <= g)
    }

    /// Edmonds greedy: `r[order[i]] = g(P_i) − g(P_{i−1})` over the prefixes
    /// `P_i` of `order`. Requires a nonempty region.
    pub fn greedy_vertex(&self, order: &[usize]) -> Result<RateVector> {
        check_order(order, self.num_clients)?;
        if !self.region_nonempty() {
            return Err(Error::EmptyRegion { alpha: self.alpha });
        }
        let mut rates = vec![0u32; self.num_clients];
        let mut prefix = ClientSubset::EMPTY;
        for &j in order {
            let next = prefix.union(ClientSubset::from_clients([j]));
            let step = self.truncated(next) - self.truncated(prefix);
            rates[j] =
                u32::try_from(step).expect("greedy increments of a feasible table are nonnegative");
            prefix = next;
        }
        Ok(RateVector(rates))
    }

    /// CSV rows `subset_mask,crossing,truncated` with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("subset_mask,crossing,truncated\n");
        for (mask, (c, t)) in self.crossing.iter().zip(&self.truncated).enumerate() {
            out.push_str(&format!("{mask},{c},{t}\n"));
        }
        out
    }
}

fn check_order(order: &[usize], k: usize) -> Result<()> {
    let mut seen = vec![false; k];
    if order.len() != k {
        return Err(Error::Dimension {
            expected: k,
            got: order.len(),
        });
    }
    for &j in order {
        if j >= k || std::mem::replace(&mut seen[j], true) {
            return Err(Error::InvalidInstance(format!(
                "{order:?} is not a permutation of the clients"
            )));
        }
    }
    Ok(())
}

pub fn truncation_table(inst: &Instance, alpha: u32) -> TruncationTable {
    TruncationTable::new(inst, alpha)
}

/// `r ∈ R_α`: sum-rate `α` and every cut constraint satisfied.
pub fn in_r_alpha(inst: &Instance, alpha: u32, r: &RateVector, calls: &mut OracleCounter) -> bool {
    calls.tick();
    satisfies_cuts(inst, alpha, r)
}

pub(crate) fn satisfies_cuts(inst: &Instance, alpha: u32, r: &RateVector) -> bool {
    if r.len() != inst.num_clients() || r.sum_rate() != alpha {
        return false;
    }
    let missing = inst.missing().values();
    let sums = r.subset_sums();
    let proper = sums.len() - 1;
    sums[..proper]
        .iter()
        .zip(&missing[..proper])
        .all(|(&sum, &m)| sum >= u64::from(m))
}

/// `r ∈ P(g_α)` using a prebuilt table for `(inst, α)`.
pub fn in_p(table: &TruncationTable, r: &RateVector, calls: &mut OracleCounter) -> bool {
    calls.tick();
    table.contains(r)
}

/// Proper subsets (including `∅`) whose cut constraint is tight at `r`.
pub fn tight_sets(inst: &Instance, r: &RateVector) -> Result<Vec<ClientSubset>> {
    if !satisfies_cuts(inst, r.sum_rate(), r) {
        return Err(infeasible(r));
    }
    let missing = inst.missing().values();
    let sums = r.subset_sums();
    Ok((0..sums.len() - 1)
        .filter(|&s| sums[s] == u64::from(missing[s]))
        .map(|s| ClientSubset(s as u32))
        .collect())
}

pub(crate) fn infeasible(r: &RateVector) -> Error {
    Error::InfeasibleRates {
        rates: r.to_string(),
        alpha: r.sum_rate(),
    }
}

/// Greedy vertex of `R_α` for the given client order.
pub fn greedy_vertex(inst: &Instance, alpha: u32, order: &[usize]) -> Result<RateVector> {
    let table = TruncationTable::new(inst, alpha);
    table.greedy_vertex(order).map_err(|e| match e {
        Error::EmptyRegion { alpha } => Error::InfeasibleBudget {
            alpha,
            min_sum_rate: min_sum_rate(inst),
        },
        other => other,
    })
}

/// Greedy vertex with ascending client order.
pub fn ascending_greedy_vertex(inst: &Instance, alpha: u32) -> Result<RateVector> {
    let order: Vec<usize> = (0..inst.num_clients()).collect();
    greedy_vertex(inst, alpha, &order)
}

/// A client order shuffled deterministically from `seed`.
pub fn seeded_order(k: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..k).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    order
}

/// Smallest `α` with `R_α` nonempty.
pub fn min_sum_rate(inst: &Instance) -> u32 {
    min_sum_rate_with_witness(inst).0
}

/// Minimum sum-rate together with the ascending greedy vertex of `R_α̂`.
pub fn min_sum_rate_with_witness(inst: &Instance) -> (u32, RateVector) {
    let order: Vec<usize> = (0..inst.num_clients()).collect();
    let mut alpha = inst.missing().max_requirement();
    loop {
        let table = TruncationTable::new(inst, alpha);
        if table.region_nonempty() {
            let witness = table
                .greedy_vertex(&order)
                .expect("nonempty region has a greedy vertex");
            debug_assert!(satisfies_cuts(inst, alpha, &witness));
            return (alpha, witness);
        }
        alpha += 1;
    }
}

/// First pair `(X, Y)` violating `g(X) + g(Y) ≥ g(X∩Y) + g(X∪Y)`.
pub fn submodularity_violation(table: &TruncationTable) -> Option<(ClientSubset, ClientSubset)> {
    let k = table.num_clients();
    let g = |s: ClientSubset| table.truncated(s);
    ClientSubset::all(k)
        .flat_map(|x| ClientSubset::all(k).map(move |y| (x, y)))
        .find(|&(x, y)| g(x) + g(y) < g(x.intersection(y)) + g(x.union(y)))
}

/// First crossing pair `(X, Y)` (`X∩Y ≠ ∅`, `X∪Y ≠ C`) violating
/// `entry(X) + entry(Y) ≤ entry(X∪Y) + entry(X∩Y)` on the cut table.
pub fn crossing_supermodularity_violation(inst: &Instance) -> Option<(ClientSubset, ClientSubset)> {
    let k = inst.num_clients();
    let full = inst.full_set();
    let m = inst.missing();
    ClientSubset::all(k)
        .flat_map(|x| ClientSubset::all(k).map(move |y| (x, y)))
        .filter(|&(x, y)| !x.intersection(y).is_empty() && x.union(y) != full)
        .find(|&(x, y)| m.get(x) + m.get(y) > m.get(x.union(y)) + m.get(x.intersection(y)))
}

/// A strategy with tight sets `X`, `Y` whose crossing intersection is not tight.
pub fn tight_closure_violation<'a, I>(
    inst: &Instance,
    strategies: I,
) -> Result<Option<(RateVector, ClientSubset, ClientSubset)>>
where
    I: IntoIterator<Item = &'a RateVector>,
{
    let full = inst.full_set();
    for r in strategies {
        let tight = tight_sets(inst, r)?;
        for &x in &tight {
            for &y in &tight {
                let meet = x.intersection(y);
                if !meet.is_empty() && x.union(y) != full && tight.binary_search(&meet).is_err() {
                    return Ok(Some((r.clone(), x, y)));
                }
            }
        }
    }
    Ok(None)
}

/// First subset where `max { r(S) : r ∈ members }` differs from `g_α(S)`,
/// with both values. `members` should list all of `R_α`.
pub fn support_function_violation(
    table: &TruncationTable,
    members: &[RateVector],
) -> Option<(ClientSubset, Option<u64>, i64)> {
    ClientSubset::all(table.num_clients())
        .map(|s| {
            (
                s,
                members.iter().map(|r| r.restricted_sum(s)).max(),
                table.truncated(s),
            )
        })
        .find(|&(_, sup, g)| sup.map(|v| v as i64) != Some(g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::parse_instance;

    pub(crate) fn three_clients() -> Instance {
        parse_instance(
            "cde v1\nclients 3\npackets 6\nhas 1: 1 2 3 4 5\nhas 2: 1 2 6\nhas 3: 3 4 6\n",
        )
        .unwrap()
    }

    fn subset(clients: &[usize]) -> ClientSubset {
        ClientSubset::from_clients(clients.iter().map(|j| j - 1))
    }

    fn rv(v: &[u32]) -> RateVector {
        RateVector::new(v.to_vec())
    }

    #[test]
    fn crossing_values() {
        let inst = three_clients();
        assert_eq!(crossing_value(&inst, 4, subset(&[1])), 3);
        assert_eq!(crossing_value(&inst, 4, subset(&[])), 0);
        assert_eq!(crossing_value(&inst, 4, subset(&[2, 3])), 3);
        assert_eq!(crossing_value(&inst, 4, subset(&[1, 2, 3])), 4);
    }

    #[test]
    fn truncation_of_three_client_example() {
        let table = truncation_table(&three_clients(), 4);
        let expected = [0, 3, 1, 4, 1, 4, 2, 4];
        assert_eq!(table.truncated_values(), &expected);
        assert_eq!(table.crossing(subset(&[2, 3])), 3);
        assert!(table.region_nonempty());
    }

    #[test]
    fn zero_budget_is_empty() {
        let table = truncation_table(&three_clients(), 0);
        assert!(table.total() < 0);
        assert!(!table.region_nonempty());
    }

    #[test]
    fn membership() {
        let inst = three_clients();
        let mut calls = OracleCounter::new();
        for r in [[2, 1, 1], [3, 0, 1], [3, 1, 0]] {
            assert!(in_r_alpha(&inst, 4, &rv(&r), &mut calls));
        }
        assert!(!in_r_alpha(&inst, 4, &rv(&[2, 2, 0]), &mut calls));
        assert!(!in_r_alpha(&inst, 5, &rv(&[2, 1, 1]), &mut calls));
        assert!(!in_r_alpha(&inst, 4, &rv(&[2, 1]), &mut calls));
        assert_eq!(calls.count(), 6);

        let table = truncation_table(&inst, 4);
        assert!(in_p(&table, &rv(&[1, 1, 1]), &mut calls));
        assert!(in_p(&table, &rv(&[2, 1, 1]), &mut calls));
        assert!(in_p(&table, &rv(&[0, 0, 0]), &mut calls));
        assert!(!in_p(&table, &rv(&[4, 0, 0]), &mut calls));
        assert_eq!(calls.count(), 10);
    }

    #[test]
    fn tight_families() {
        let inst = three_clients();
        let t = tight_sets(&inst, &rv(&[3, 1, 0])).unwrap();
        assert_eq!(
            t,
            vec![subset(&[]), subset(&[3]), subset(&[1, 3]), subset(&[2, 3])]
        );
        let t = tight_sets(&inst, &rv(&[2, 1, 1])).unwrap();
        assert_eq!(t, vec![subset(&[]), subset(&[1, 2]), subset(&[1, 3])]);
        let t = tight_sets(&inst, &rv(&[3, 2, 2])).unwrap();
        assert_eq!(t, vec![subset(&[])]);
        assert!(tight_sets(&inst, &rv(&[1, 1, 1])).is_err());
    }

    #[test]
    fn greedy_vertices() {
        let inst = three_clients();
        assert_eq!(greedy_vertex(&inst, 4, &[0, 1, 2]).unwrap(), rv(&[3, 1, 0]));
        let r = greedy_vertex(&inst, 4, &[2, 1, 0]).unwrap();
        assert!(satisfies_cuts(&inst, 4, &r));
        assert_eq!(
            greedy_vertex(&inst, 3, &[0, 1, 2]).unwrap_err(),
            Error::InfeasibleBudget {
                alpha: 3,
                min_sum_rate: 4
            }
        );
        assert!(greedy_vertex(&inst, 4, &[0, 0, 2]).is_err());
        let single = Instance::new(1, vec![vec![0]]).unwrap();
        assert_eq!(greedy_vertex(&single, 0, &[0]).unwrap(), rv(&[0]));
    }

    #[test]
    fn minimum_sum_rates() {
        assert_eq!(min_sum_rate(&three_clients()), 4);
        assert_eq!(min_sum_rate(&Instance::new(1, vec![vec![0]]).unwrap()), 0);
        assert_eq!(
            min_sum_rate(&Instance::new(2, vec![vec![0], vec![1]]).unwrap()),
            2
        );
    }

    #[test]
    fn rate_vector_text() {
        let r: RateVector = "2,1,1".parse().unwrap();
        assert_eq!(r, rv(&[2, 1, 1]));
        assert_eq!(r.to_string(), "(2,1,1)");
        assert_eq!("(3, 0,1)".parse::<RateVector>().unwrap(), rv(&[3, 0, 1]));
        assert!("2,x".parse::<RateVector>().is_err());
        assert_eq!(r.exchanged(1, 2), Some(rv(&[2, 0, 2])));
        assert_eq!(rv(&[0, 1]).exchanged(0, 1), None);
        assert_eq!(r.subset_sums(), vec![0, 2, 1, 3, 1, 3, 2, 4]);
    }

    #[test]
    fn property_checkers_on_three_client_example() {
        let inst = three_clients();
        let table = truncation_table(&inst, 4);
        assert_eq!(submodularity_violation(&table), None);
        assert_eq!(crossing_supermodularity_violation(&inst), None);
        let members = [rv(&[2, 1, 1]), rv(&[3, 0, 1]), rv(&[3, 1, 0])];
        assert_eq!(tight_closure_violation(&inst, &members).unwrap(), None);
        assert_eq!(support_function_violation(&table, &members), None);
        assert!(support_function_violation(&table, &members[1..]).is_some());
    }

    #[test]
    fn table_csv() {
        let csv = truncation_table(&three_clients(), 4).to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("subset_mask,crossing,truncated"));
        assert_eq!(lines.next(), Some("0,0,0"));
        assert_eq!(lines.nth(5), Some("6,3,2"));
    }
}

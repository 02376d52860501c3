//! Brute-force oracles computed straight from the has-sets, independent of
//! the table-driven library paths.

#![allow(dead_code)]

use std::collections::BTreeSet;

use cde_core::{Instance, RateVector};

pub fn three_clients() -> Instance {
    cde_core::parse_instance(
        "cde v1\nclients 3\npackets 6\nhas 1: 1 2 3 4 5\nhas 2: 1 2 6\nhas 3: 3 4 6\n",
    )
    .unwrap()
}

fn complement(inst: &Instance, j: usize) -> BTreeSet<usize> {
    let held: BTreeSet<usize> = inst.has_set(j).iter().copied().collect();
    (0..inst.num_packets())
        .filter(|p| !held.contains(p))
        .collect()
}

/// `|⋂_{j ∈ family} H_j^c|`, with the empty family giving the empty set.
pub fn missing_at_all(inst: &Instance, family: &[usize]) -> usize {
    let mut iter = family.iter();
    let Some(&first) = iter.next() else {
        return 0;
    };
    let mut acc = complement(inst, first);
    for &j in iter {
        let c = complement(inst, j);
        acc = acc.intersection(&c).copied().collect();
    }
    acc.len()
}

pub fn members(mask: u32, k: usize) -> Vec<usize> {
    (0..k).filter(|j| mask >> j & 1 == 1).collect()
}

/// Right-hand side of the cut constraint for `S` by direct set computation.
pub fn requirement(inst: &Instance, mask: u32) -> usize {
    let k = inst.num_clients();
    let outside: Vec<usize> = (0..k).filter(|j| mask >> j & 1 == 0).collect();
    missing_at_all(inst, &outside)
}

pub fn feasible(inst: &Instance, r: &[u32], alpha: u32) -> bool {
    let k = inst.num_clients();
    if r.iter().sum::<u32>() != alpha {
        return false;
    }
    (0..(1u32 << k) - 1).all(|mask| {
        let sum: u32 = members(mask, k).iter().map(|&j| r[j]).sum();
        sum as usize >= requirement(inst, mask)
    })
}

/// All integer vectors with sum `alpha`, in lexicographic order.
pub fn compositions(alpha: u32, k: usize) -> Vec<Vec<u32>> {
    if k == 1 {
        return vec![vec![alpha]];
    }
    let mut out = Vec::new();
    for first in 0..=alpha {
        for mut rest in compositions(alpha - first, k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

pub fn region(inst: &Instance, alpha: u32) -> Vec<RateVector> {
    compositions(alpha, inst.num_clients())
        .into_iter()
        .filter(|r| feasible(inst, r, alpha))
        .map(RateVector::new)
        .collect()
}

pub fn brute_min_sum_rate(inst: &Instance) -> u32 {
    (0..).find(|&a| !region(inst, a).is_empty()).unwrap()
}

/// Crossing function `α − |⋂_{j∈S} H_j^c|` from the has-sets.
pub fn crossing(inst: &Instance, alpha: u32, mask: u32) -> i64 {
    if mask == 0 {
        return 0;
    }
    i64::from(alpha) - missing_at_all(inst, &members(mask, inst.num_clients())) as i64
}

/// Set partitions of `items` by restricted-growth recursion.
pub fn partitions(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let Some((&first, rest)) = items.split_first() else {
        return vec![vec![]];
    };
    let mut out = Vec::new();
    for p in partitions(rest) {
        for i in 0..p.len() {
            let mut q = p.clone();
            q[i].push(first);
            out.push(q);
        }
        let mut q = p;
        q.push(vec![first]);
        out.push(q);
    }
    out
}

/// Partition truncation by explicit enumeration of every partition of `S`.
pub fn truncated(inst: &Instance, alpha: u32, mask: u32) -> i64 {
    let items = members(mask, inst.num_clients());
    partitions(&items)
        .into_iter()
        .map(|p| {
            p.iter()
                .map(|block| crossing(inst, alpha, block.iter().fold(0, |m, &j| m | 1 << j)))
                .sum::<i64>()
        })
        .min()
        .unwrap()
}

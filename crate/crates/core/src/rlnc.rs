//! Random linear network coding check of universal recovery.
//!
//! Client `j` broadcasts `r_j` random combinations of the packets it holds
//! over a prime field. Every client then stacks the unit vectors of its own
//! packets with everything broadcast by the others and decodes iff that
//! matrix has full rank `N`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::Instance;
use crate::polyhedra::RateVector;
use crate::{Error, Result};

/// Largest prime below 2^16.
pub const DEFAULT_FIELD: u64 = 65521;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecoveryReport {
    pub success: bool,
    /// Per-client decoding rank in the reported trial: the first failing
    /// trial if any, otherwise the last one.
    pub per_client_rank: Vec<usize>,
    pub num_packets: usize,
    pub field_size: u64,
    pub trials: u32,
    pub failures: u32,
}

pub fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= q {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn mul_mod(a: u64, b: u64, q: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(q)) as u64
}

fn inv_mod(a: u64, q: u64) -> u64 {
    // Fermat: a^(q-2)
    let (mut base, mut exp, mut acc) = (a % q, q - 2, 1u64);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, q);
        }
        base = mul_mod(base, base, q);
        exp >>= 1;
    }
    acc
}

/// Rank over `F_q` by forward elimination; the pivot is the first row with a
/// nonzero entry in the current column.
pub fn rank_mod(mut rows: Vec<Vec<u64>>, q: u64) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = inv_mod(rows[rank][col], q);
        for x in rows[rank][col..].iter_mut() {
            *x = mul_mod(*x, inv, q);
        }
        let (top, bottom) = rows.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        for row in bottom.iter_mut() {
            let factor = row[col];
            if factor == 0 {
                continue;
            }
            for (x, &p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x = (*x + q - mul_mod(factor, p, q)) % q;
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

fn run_trial(inst: &Instance, r: &RateVector, q: u64, seed: u64) -> Vec<usize> {
    let n = inst.num_packets();
    let k = inst.num_clients();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let broadcasts: Vec<Vec<Vec<u64>>> = (0..k)
        .map(|j| {
            (0..r[j])
                .map(|_| {
                    let mut row = vec![0u64; n];
                    for &p in inst.has_set(j) {
                        row[p] = rng.gen_range(0..q);
                    }
                    row
                })
                .collect()
        })
        .collect();

    (0..k)
        .map(|receiver| {
            let mut rows: Vec<Vec<u64>> = inst
                .has_set(receiver)
                .iter()
                .map(|&p| {
                    let mut unit = vec![0u64; n];
                    unit[p] = 1;
                    unit
                })
                .collect();
            for (sender, sent) in broadcasts.iter().enumerate() {
                if sender != receiver {
                    rows.extend(sent.iter().cloned());
                }
            }
            rank_mod(rows, q)
        })
        .collect()
}

/// Simulates `trials` independent coded exchanges with per-trial seeds
/// `seed + t`.
pub fn verify_recovery(
    inst: &Instance,
    r: &RateVector,
    q: u64,
    seed: u64,
    trials: u32,
) -> Result<RecoveryReport> {
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    if r.len() != inst.num_clients() {
        return Err(Error::Dimension {
            expected: inst.num_clients(),
            got: r.len(),
        });
    }
    let trials = trials.max(1);
    let n = inst.num_packets();
    let mut failures = 0;
    let mut reported: Option<Vec<usize>> = None;
    let mut last = Vec::new();
    for t in 0..trials {
        let ranks = run_trial(inst, r, q, seed.wrapping_add(u64::from(t)));
        if ranks.iter().any(|&rank| rank < n) {
            failures += 1;
            reported.get_or_insert_with(|| ranks.clone());
        }
        last = ranks;
    }
    Ok(RecoveryReport {
        success: failures == 0,
        per_client_rank: reported.unwrap_or(last),
        num_packets: n,
        field_size: q,
        trials,
        failures,
    })
}

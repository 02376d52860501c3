//! CDE instances and the cut-constraint table.
//!
//! Clients are numbered `0..K` and packets `0..N` internally. The instance
//! file format and every `Display` impl use 1-based labels:
//!
//! ```text
//! cde v1
//! clients 3
//! packets 6
//! has 1: 1 2 3 4 5
//! has 2: 1 2 6
//! has 3: 3 4 6
//! ```
//!
//! Lines starting with `#` and blank lines are ignored.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::subset::ClientSubset;
use crate::{Error, Result};

/// Largest client count the library builds `2^K` tables for.
pub const MAX_CLIENTS: usize = 16;

const HEADER: &str = "cde v1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    num_packets: usize,
    /// Sorted 0-based packet indices held by each client.
    has_sets: Vec<Vec<usize>>,
    /// For each packet, the mask of clients holding it.
    holders: Vec<u32>,
    missing: MissingTable,
}

impl Instance {
    /// Builds an instance from 0-based has-sets, validating coverage and ranges.
    pub fn new(num_packets: usize, has_sets: Vec<Vec<usize>>) -> Result<Self> {
        let k = has_sets.len();
        if k == 0 {
            return Err(Error::InvalidInstance(
                "at least one client is required".into(),
            ));
        }
        if k > MAX_CLIENTS {
            return Err(Error::Guard(format!(
                "{k} clients exceeds the limit of {MAX_CLIENTS}"
            )));
        }
        if num_packets == 0 {
            return Err(Error::InvalidInstance(
                "at least one packet is required".into(),
            ));
        }

        let mut holders = vec![0u32; num_packets];
        let mut sorted = Vec::with_capacity(k);
        for (j, set) in has_sets.into_iter().enumerate() {
            let mut set = set;
            set.sort_unstable();
            set.dedup();
            for &p in &set {
                if p >= num_packets {
                    return Err(Error::PacketOutOfRange {
                        client: j + 1,
                        packet: p + 1,
                        num_packets,
                    });
                }
                holders[p] |= 1 << j;
            }
            sorted.push(set);
        }

        let uncovered: Vec<usize> = holders
            .iter()
            .enumerate()
            .filter(|(_, &h)| h == 0)
            .map(|(p, _)| p + 1)
            .collect();
        if !uncovered.is_empty() {
            return Err(Error::Uncovered(uncovered));
        }

        let missing = MissingTable::from_holders(k, &holders);
        Ok(Instance {
            num_packets,
            has_sets: sorted,
            holders,
            missing,
        })
    }

    pub fn num_clients(&self) -> usize {
        self.has_sets.len()
    }

    pub fn num_packets(&self) -> usize {
        self.num_packets
    }

    /// 0-based packet indices held by `client`.
    pub fn has_set(&self, client: usize) -> &[usize] {
        &self.has_sets[client]
    }

    pub fn has_sets(&self) -> &[Vec<usize>] {
        &self.has_sets
    }

    /// Mask of the clients holding each packet.
    pub fn holders(&self) -> &[u32] {
        &self.holders
    }

    pub fn full_set(&self) -> ClientSubset {
        ClientSubset::full(self.num_clients())
    }

    /// The cut-constraint table, computed once at construction.
    pub fn missing(&self) -> &MissingTable {
        &self.missing
    }

    /// Serializes to the instance file format with sorted 1-based packet lists.
    pub fn to_file_string(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{HEADER}")?;
        writeln!(f, "clients {}", self.num_clients())?;
        writeln!(f, "packets {}", self.num_packets)?;
        for (j, set) in self.has_sets.iter().enumerate() {
            write!(f, "has {}:", j + 1)?;
            for p in set {
                write!(f, " {}", p + 1)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Instance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_instance(s)
    }
}

/// Parses the line-based instance format.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let syntax = |line: usize, message: String| Error::Syntax { line, message };

    let (ln, header) = lines
        .next()
        .ok_or_else(|| syntax(1, "empty instance file".into()))?;
    if header != HEADER {
        return Err(syntax(ln, format!("expected `{HEADER}`, found `{header}`")));
    }

    let mut keyword_value = |keyword: &str| -> Result<usize> {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| syntax(0, format!("missing `{keyword}` line")))?;
        let rest = line
            .strip_prefix(keyword)
            .filter(|r| r.starts_with(char::is_whitespace))
            .ok_or_else(|| syntax(ln, format!("expected `{keyword} <count>`")))?;
        let value: usize = rest
            .trim()
            .parse()
            .map_err(|_| syntax(ln, format!("invalid {keyword} count `{}`", rest.trim())))?;
        if value == 0 {
            return Err(syntax(ln, format!("{keyword} count must be positive")));
        }
        Ok(value)
    };
    let k = keyword_value("clients")?;
    let n = keyword_value("packets")?;
    if k > MAX_CLIENTS {
        return Err(Error::Guard(format!(
            "{k} clients exceeds the limit of {MAX_CLIENTS}"
        )));
    }

    let mut has_sets: Vec<Option<Vec<usize>>> = vec![None; k];
    let mut last_client = 0;
    for (ln, line) in lines {
        let rest = line
            .strip_prefix("has")
            .ok_or_else(|| syntax(ln, format!("expected `has j: ...`, found `{line}`")))?;
        let (client, packets) = rest
            .split_once(':')
            .ok_or_else(|| syntax(ln, "missing `:` after client index".into()))?;
        let client: usize = client
            .trim()
            .parse()
            .map_err(|_| syntax(ln, format!("invalid client index `{}`", client.trim())))?;
        if client == 0 || client > k {
            return Err(syntax(ln, format!("client index {client} outside 1..={k}")));
        }
        if has_sets[client - 1].is_some() {
            return Err(Error::DuplicateClient(client));
        }
        if client < last_client {
            return Err(syntax(
                ln,
                "has-lines must be in ascending client order".into(),
            ));
        }
        last_client = client;

        let mut set = Vec::new();
        for token in packets.split_whitespace() {
            let p: usize = token
                .parse()
                .map_err(|_| syntax(ln, format!("invalid packet index `{token}`")))?;
            if p == 0 || p > n {
                return Err(Error::PacketOutOfRange {
                    client,
                    packet: p,
                    num_packets: n,
                });
            }
            set.push(p - 1);
        }
        has_sets[client - 1] = Some(set);
    }

    let has_sets = has_sets
        .into_iter()
        .enumerate()
        .map(|(j, s)| s.ok_or_else(|| syntax(0, format!("missing has-line for client {}", j + 1))))
        .collect::<Result<Vec<_>>>()?;
    Instance::new(n, has_sets)
}

/// Draws a random instance: each packet goes to a uniformly random nonempty
/// subset of clients. If every packet landed on all clients, the last packet
/// is redrawn from the proper subsets so that some client misses something.
pub fn random_instance(seed: u64, k: usize, n: usize) -> Result<Instance> {
    if k < 2 || n < 1 {
        return Err(Error::InvalidInstance(format!(
            "random instances need K >= 2 and N >= 1, got K={k}, N={n}"
        )));
    }
    if k > MAX_CLIENTS {
        return Err(Error::Guard(format!(
            "{k} clients exceeds the limit of {MAX_CLIENTS}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let full = ClientSubset::full(k).mask();
    let mut masks: Vec<u32> = (0..n).map(|_| rng.gen_range(1..=full)).collect();
    if masks.iter().all(|&m| m == full) {
        masks[n - 1] = rng.gen_range(1..full);
    }
    let has_sets = (0..k)
        .map(|j| (0..n).filter(|&p| masks[p] >> j & 1 == 1).collect())
        .collect();
    Instance::new(n, has_sets)
}

/// `entry(S) = |⋂_{j ∉ S} H_j^c|`: the number of packets held only by
/// clients inside `S`. By convention `entry(C) = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MissingTable {
    num_clients: usize,
    values: Vec<u32>,
}

impl MissingTable {
    fn from_holders(k: usize, holders: &[u32]) -> Self {
        // Packets whose holder set is contained in S, by a subset-sum transform.
        let mut values = vec![0u32; 1 << k];
        for &h in holders {
            values[h as usize] += 1;
        }
        for bit in 0..k {
            for s in 0..values.len() {
                if s >> bit & 1 == 1 {
                    values[s] += values[s ^ (1 << bit)];
                }
            }
        }
        let last = values.len() - 1;
        values[last] = 0;
        MissingTable {
            num_clients: k,
            values,
        }
    }

    pub fn num_clients(&self) -> usize {
        self.num_clients
    }

    pub fn get(&self, s: ClientSubset) -> u32 {
        self.values[s.index()]
    }

    /// Entries indexed by subset mask.
    pub fn values(&self) -> &[u32] {
        &self.values
    }

    /// Number of packets missing at every client in `s` (`|⋂_{j∈S} H_j^c|`).
    /// Equal to `entry(C \ S)` for nonempty `s`.
    pub fn missing_at_all(&self, s: ClientSubset) -> u32 {
        debug_assert!(!s.is_empty());
        self.get(s.complement(self.num_clients))
    }

    /// The largest right-hand side over proper subsets, a lower bound on the
    /// minimum sum-rate.
    pub fn max_requirement(&self) -> u32 {
        self.values.iter().copied().max().unwrap_or(0)
    }
}

/// Computes the cut-constraint table of `inst`.
pub fn missing_table(inst: &Instance) -> MissingTable {
    inst.missing().clone()
}

//! SDA vs. DA comparison at the minimum sum-rate over random instances.

use std::io::Write;
use std::ops::RangeInclusive;

use anyhow::{ensure, Context, Result};
use cde_core::polyhedra::min_sum_rate_with_witness;
use cde_core::{da, random_instance, sda, ObjectiveKind};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub clients: RangeInclusive<usize>,
    pub packets: RangeInclusive<usize>,
    pub packet_step: usize,
    pub reps: u32,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn cells(&self) -> Vec<(usize, usize)> {
        let mut cells = Vec::new();
        for k in self.clients.clone() {
            for n in self.packets.clone().step_by(self.packet_step.max(1)) {
                cells.push((k, n));
            }
        }
        cells
    }
}

/// One (K, N, trial) run, serialized with this exact column order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRow {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub trial: u32,
    pub seed: u64,
    pub alpha_hat: u32,
    pub sda_iterations: u64,
    pub da_iterations: u64,
    pub sda_oracle_calls: u64,
    pub da_oracle_calls: u64,
    pub sda_objective: f64,
    pub da_objective: f64,
}

/// Per-cell averages, the data behind the iteration and complexity plots.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub reps: usize,
    pub mean_alpha_hat: f64,
    pub mean_sda_iterations: f64,
    pub mean_da_iterations: f64,
    pub mean_sda_oracle_calls: f64,
    pub mean_da_oracle_calls: f64,
}

pub fn trial_seed(base: u64, k: usize, n: usize, trial: u32) -> u64 {
    base.wrapping_add((k as u64) << 40 | (n as u64) << 20 | u64::from(trial))
}

fn run_trial(k: usize, n: usize, trial: u32, seed: u64) -> Result<ExperimentRow> {
    let inst = random_instance(seed, k, n)?;
    let (alpha_hat, start) = min_sum_rate_with_witness(&inst);
    let s = sda(&inst, alpha_hat, &ObjectiveKind::Uniform, start)?;
    // DA only learns the budget; the starting vertex is discarded.
    let d = da(&inst, alpha_hat, &ObjectiveKind::Uniform)?;
    Ok(ExperimentRow {
        k,
        n,
        trial,
        seed,
        alpha_hat,
        sda_iterations: s.iterations,
        da_iterations: d.iterations,
        sda_oracle_calls: s.oracle_calls,
        da_oracle_calls: d.oracle_calls,
        sda_objective: s.objective(),
        da_objective: d.objective(),
    })
}

/// Runs every trial in parallel; rows come back in (K, N, trial) order.
pub fn run_experiment(config: &ExperimentConfig, max_clients: usize) -> Result<Vec<ExperimentRow>> {
    ensure!(
        *config.clients.start() >= 2,
        "experiments need at least 2 clients"
    );
    ensure!(
        *config.clients.end() <= max_clients,
        "K up to {} exceeds the experiment guard of {max_clients} (set CDE_MAX_K to raise it)",
        config.clients.end()
    );
    ensure!(
        *config.packets.start() >= 1,
        "experiments need at least 1 packet"
    );
    let jobs: Vec<(usize, usize, u32)> = config
        .cells()
        .into_iter()
        .flat_map(|(k, n)| (0..config.reps).map(move |t| (k, n, t)))
        .collect();
    jobs.into_par_iter()
        .map(|(k, n, t)| run_trial(k, n, t, trial_seed(config.seed, k, n, t)))
        .collect()
}

pub fn summarize(rows: &[ExperimentRow]) -> Vec<CellSummary> {
    let mut out: Vec<CellSummary> = Vec::new();
    for chunk in rows.chunk_by(|a, b| (a.k, a.n) == (b.k, b.n)) {
        let len = chunk.len() as f64;
        let mean = |f: fn(&ExperimentRow) -> f64| chunk.iter().map(f).sum::<f64>() / len;
        out.push(CellSummary {
            k: chunk[0].k,
            n: chunk[0].n,
            reps: chunk.len(),
            mean_alpha_hat: mean(|r| f64::from(r.alpha_hat)),
            mean_sda_iterations: mean(|r| r.sda_iterations as f64),
            mean_da_iterations: mean(|r| r.da_iterations as f64),
            mean_sda_oracle_calls: mean(|r| r.sda_oracle_calls as f64),
            mean_da_oracle_calls: mean(|r| r.da_oracle_calls as f64),
        });
    }
    out
}

/// Writes rows as CSV with a header and LF line endings.
pub fn write_csv<W: Write, T: Serialize>(writer: W, rows: &[T]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    for row in rows {
        w.serialize(row).context("serializing CSV row")?;
    }
    w.flush()?;
    Ok(())
}

//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p cde-cli --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use cde_cli::experiment::{run_experiment, summarize, ExperimentConfig};
use cde_core::discrete_convex::{FairnessObjective, ObjectiveKind};
use cde_core::polyhedra::{
    ascending_greedy_vertex, crossing_supermodularity_violation, min_sum_rate_with_witness,
    support_function_violation, tight_closure_violation,
};
use cde_core::{
    brute_force_argmin, check_exchange_axiom, check_mconvex_inequality, da, enumerate_r_alpha,
    evaluate, min_sum_rate, parse_instance, random_instance, sda, truncation_table,
    verify_recovery, Instance, RateVector, DEFAULT_FIELD,
};

type Check = Result<String, String>;

fn three_clients() -> Instance {
    parse_instance(include_str!("data/three_clients.cde")).unwrap()
}

fn rvs(v: &[&[u32]]) -> Vec<RateVector> {
    v.iter().map(|r| RateVector::new(r.to_vec())).collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn golden_sets() -> Check {
    let inst = three_clients();
    let r4 = enumerate_r_alpha(&inst, 4).map_err(|e| e.to_string())?;
    let r5 = enumerate_r_alpha(&inst, 5).map_err(|e| e.to_string())?;
    let want4 = rvs(&[&[2, 1, 1], &[3, 0, 1], &[3, 1, 0]]);
    let want5 = rvs(&[
        &[1, 2, 2],
        &[2, 1, 2],
        &[2, 2, 1],
        &[3, 0, 2],
        &[3, 1, 1],
        &[3, 2, 0],
        &[4, 0, 1],
        &[4, 1, 0],
    ]);
    ensure(r4.members() == want4, || {
        format!("R_4 = {:?}", r4.members())
    })?;
    ensure(r5.members() == want5, || {
        format!("R_5 = {:?}", r5.members())
    })?;
    Ok("R_4 has 3 members, R_5 has 8".into())
}

fn golden_table() -> Check {
    let table = truncation_table(&three_clients(), 4);
    // g_4 over masks ∅,{1},{2},{1,2},{3},{1,3},{2,3},{1,2,3}
    let want = [0, 3, 1, 4, 1, 4, 2, 4];
    ensure(table.truncated_values() == want, || {
        format!("g_4 = {:?}", table.truncated_values())
    })?;
    Ok(format!("g_4 = {want:?}"))
}

fn minimum_sum_rate() -> Check {
    let a = min_sum_rate(&three_clients());
    ensure(a == 4, || format!("min sum-rate {a}"))?;
    Ok("min sum-rate 4".into())
}

fn solver_paths() -> Check {
    let inst = three_clients();
    let s = sda(
        &inst,
        4,
        &ObjectiveKind::Uniform,
        RateVector::new(vec![3, 1, 0]),
    )
    .map_err(|e| e.to_string())?;
    ensure(
        s.iterates == rvs(&[&[3, 1, 0], &[2, 1, 1]]) && s.iterations == 1,
        || format!("SDA path {:?}", s.iterates),
    )?;
    let d = da(&inst, 4, &ObjectiveKind::Uniform).map_err(|e| e.to_string())?;
    let want = rvs(&[&[0, 0, 0], &[1, 0, 0], &[1, 1, 0], &[1, 1, 1], &[2, 1, 1]]);
    ensure(d.iterates == want, || format!("DA path {:?}", d.iterates))?;
    Ok("SDA 1 step, DA 4 steps, both end at (2,1,1)".into())
}

fn iteration_counts() -> Check {
    let inst = three_clients();
    let mut summary = Vec::new();
    for (alpha, sda_expected) in [(4, 1), (5, 2), (6, 3)] {
        let d = da(&inst, alpha, &ObjectiveKind::Uniform).map_err(|e| e.to_string())?;
        ensure(d.iterations == u64::from(alpha), || {
            format!("DA took {} iterations at alpha={alpha}", d.iterations)
        })?;
        let start = ascending_greedy_vertex(&inst, alpha).map_err(|e| e.to_string())?;
        let s = sda(&inst, alpha, &ObjectiveKind::Uniform, start).map_err(|e| e.to_string())?;
        ensure(s.iterations == sda_expected, || {
            format!("SDA took {} iterations at alpha={alpha}", s.iterations)
        })?;
        summary.push(format!(
            "a={alpha}: SDA {} DA {}",
            s.iterations, d.iterations
        ));
    }
    Ok(summary.join(", "))
}

fn objective_values() -> Check {
    let inst = three_clients();
    let f4 = FairnessObjective::uniform(4);
    let v301 = evaluate(&f4, &inst, &RateVector::new(vec![3, 0, 1]));
    let v211 = evaluate(&f4, &inst, &RateVector::new(vec![2, 1, 1]));
    ensure((v301 - 3.2958).abs() <= 1e-3, || {
        format!("F_4(3,0,1) = {v301}")
    })?;
    ensure((v211 - 1.3863).abs() <= 1e-3, || {
        format!("F_4(2,1,1) = {v211}")
    })?;
    let r4 = enumerate_r_alpha(&inst, 4).map_err(|e| e.to_string())?;
    let r5 = enumerate_r_alpha(&inst, 5).map_err(|e| e.to_string())?;
    let m4 = brute_force_argmin(&f4, &r4).map_err(|e| e.to_string())?;
    let m5 = brute_force_argmin(&FairnessObjective::uniform(5), &r5).map_err(|e| e.to_string())?;
    ensure(m4 == rvs(&[&[2, 1, 1]]), || format!("argmin F_4 = {m4:?}"))?;
    ensure(m5 == rvs(&[&[1, 2, 2], &[2, 1, 2], &[2, 2, 1]]), || {
        format!("argmin F_5 = {m5:?}")
    })?;
    Ok(format!("F_4(3,0,1)={v301:.4}, F_4(2,1,1)={v211:.4}"))
}

/// The random sweep shared by the property and coding criteria.
fn sweep() -> Vec<Instance> {
    let mut out = Vec::new();
    for seed in 0..108u64 {
        let k = [3, 4, 5][(seed % 3) as usize];
        let n = [6, 8, 10][(seed / 3 % 3) as usize];
        out.push(random_instance(seed, k, n).unwrap());
    }
    out
}

struct SweepOutcome {
    minimizers: Vec<(usize, RateVector)>,
}

fn property_sweep(instances: &[Instance], outcome: &mut SweepOutcome) -> Check {
    let mut regions = 0;
    for (idx, inst) in instances.iter().enumerate() {
        let tag = |what: &str| format!("instance {idx}: {what}");
        ensure(crossing_supermodularity_violation(inst).is_none(), || {
            tag("cut-table crossing inequality violated")
        })?;
        let alpha_hat = min_sum_rate(inst);
        for alpha in [alpha_hat, alpha_hat + 1] {
            regions += 1;
            let region = enumerate_r_alpha(inst, alpha).map_err(|e| tag(&e.to_string()))?;
            ensure(!region.is_empty(), || {
                tag("empty region at or above the minimum sum-rate")
            })?;
            ensure(
                check_exchange_axiom(&region)
                    .map_err(|e| e.to_string())?
                    .holds,
                || tag(&format!("EXC fails at alpha={alpha}")),
            )?;
            for obj in [
                FairnessObjective::uniform(alpha),
                FairnessObjective::jain(alpha),
            ] {
                let report = check_mconvex_inequality(&obj, &region).map_err(|e| e.to_string())?;
                ensure(report.holds, || {
                    tag(&format!("{} not M-convex", obj.kind.name()))
                })?;
            }
            ensure(
                tight_closure_violation(inst, region.members())
                    .map_err(|e| e.to_string())?
                    .is_none(),
                || tag("tight sets not closed under crossing intersection"),
            )?;
            let table = truncation_table(inst, alpha);
            ensure(
                support_function_violation(&table, region.members()).is_none(),
                || tag("max r(S) over R_alpha differs from g_alpha(S)"),
            )?;

            let obj = FairnessObjective::uniform(alpha);
            let argmin = brute_force_argmin(&obj, &region).map_err(|e| e.to_string())?;
            let start = ascending_greedy_vertex(inst, alpha).map_err(|e| e.to_string())?;
            let s = sda(inst, alpha, &ObjectiveKind::Uniform, start).map_err(|e| e.to_string())?;
            ensure(argmin.contains(s.result()), || {
                tag(&format!(
                    "SDA result {} not a brute-force minimizer",
                    s.result()
                ))
            })?;
            let bound = s.start().l1_distance(s.result()).div_ceil(2);
            ensure(s.iterations <= bound, || {
                tag(&format!("SDA took {} > {bound} iterations", s.iterations))
            })?;
            let d = da(inst, alpha, &ObjectiveKind::Uniform).map_err(|e| e.to_string())?;
            ensure(d.iterations == u64::from(alpha), || {
                tag("DA iterations differ from alpha")
            })?;
            outcome
                .minimizers
                .extend(argmin.into_iter().map(|r| (idx, r)));
        }
    }
    Ok(format!("{} instances, {regions} regions", instances.len()))
}

fn experiment_trend() -> Check {
    let config = ExperimentConfig {
        clients: 3..=5,
        packets: 6..=30,
        packet_step: 6,
        reps: 20,
        seed: 0,
    };
    let rows = run_experiment(&config, 10).map_err(|e| e.to_string())?;
    let mut worst_ratio: f64 = 0.0;
    for cell in summarize(&rows) {
        ensure(cell.mean_sda_iterations < cell.mean_da_iterations, || {
            format!(
                "K={} N={}: mean SDA iterations {} >= DA {}",
                cell.k, cell.n, cell.mean_sda_iterations, cell.mean_da_iterations
            )
        })?;
        ensure(
            cell.mean_sda_oracle_calls <= 1.5 * cell.mean_da_oracle_calls,
            || {
                format!(
                    "K={} N={}: mean SDA oracle calls {} > 1.5 x DA {}",
                    cell.k, cell.n, cell.mean_sda_oracle_calls, cell.mean_da_oracle_calls
                )
            },
        )?;
        worst_ratio = worst_ratio.max(cell.mean_sda_oracle_calls / cell.mean_da_oracle_calls);
    }
    Ok(format!(
        "{} rows, worst SDA/DA oracle ratio {worst_ratio:.3}",
        rows.len()
    ))
}

fn coding_verification(instances: &[Instance], outcome: &SweepOutcome) -> Check {
    let mut reruns = 0;
    for (i, (idx, r)) in outcome.minimizers.iter().enumerate() {
        let inst = &instances[*idx];
        let seed = i as u64;
        let report =
            verify_recovery(inst, r, DEFAULT_FIELD, seed, 10).map_err(|e| e.to_string())?;
        if !report.success {
            // A feasible vector may fail with probability <= KN/q per trial.
            reruns += 1;
            let again = verify_recovery(inst, r, DEFAULT_FIELD, seed + 1_000_003, 10)
                .map_err(|e| e.to_string())?;
            ensure(again.success, || {
                format!("instance {idx}: minimizer {r} failed to decode twice")
            })?;
        }
    }
    for (idx, inst) in instances.iter().enumerate() {
        let (alpha_hat, vertex) = min_sum_rate_with_witness(inst);
        if alpha_hat == 0 {
            continue;
        }
        let mut short = vertex.into_inner();
        let j = (0..short.len()).rev().find(|&j| short[j] > 0).unwrap();
        short[j] -= 1;
        let short = RateVector::new(short);
        let report = verify_recovery(inst, &short, DEFAULT_FIELD, idx as u64, 10)
            .map_err(|e| e.to_string())?;
        ensure(report.failures == report.trials, || {
            format!("instance {idx}: {short} below the minimum sum-rate decoded")
        })?;
    }
    Ok(format!(
        "{} minimizers decoded ({reruns} reruns), {} short vectors failed",
        outcome.minimizers.len(),
        instances.len()
    ))
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |id: u32, name: &str, budget: Duration, run: &mut dyn FnMut() -> Check| {
        let started = Instant::now();
        let result = run();
        let elapsed = started.elapsed();
        let (ok, detail) = match result {
            Ok(d) if elapsed < budget => (true, d),
            Ok(d) => (false, format!("{d}; took {elapsed:?}, budget {budget:?}")),
            Err(e) => (false, e),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {id} [{}] {name}: {detail} ({elapsed:.2?})",
            if ok { "PASS" } else { "FAIL" }
        );
    };

    let ms = Duration::from_millis;
    report(1, "golden feasible sets", ms(1), &mut golden_sets);
    report(2, "golden truncation table", ms(1), &mut golden_table);
    report(3, "minimum sum-rate", ms(10), &mut minimum_sum_rate);
    report(4, "solver paths", ms(10), &mut solver_paths);
    report(5, "iteration counts", ms(100), &mut iteration_counts);
    report(
        6,
        "objective values and minimizers",
        Duration::MAX,
        &mut objective_values,
    );

    let instances = sweep();
    let mut outcome = SweepOutcome {
        minimizers: Vec::new(),
    };
    report(7, "property sweep", Duration::from_secs(60), &mut || {
        property_sweep(&instances, &mut outcome)
    });
    report(
        8,
        "experiment trend",
        Duration::from_secs(300),
        &mut experiment_trend,
    );
    report(9, "coded recovery", Duration::from_secs(60), &mut || {
        coding_verification(&instances, &outcome)
    });

    if failed == 0 {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}

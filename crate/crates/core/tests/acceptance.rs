// Copyright 2026 The Predtrans Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Acceptance suite. Each criterion prints one PASS or FAIL line; the
//! process exits non-zero if any criterion fails.

mod common;

use std::time::Instant;

use common::{Workload, Q5_ORDERS};
use predtrans::bench::{full_reducer_oracle, run_experiment};
use predtrans::costmodel::{predict_pred_transfer, predict_yannakakis, CostParams};
use predtrans::filter::{build_filter, measured_fpr, FilterKind, DEFAULT_SEED};
use predtrans::joinexec::{execute_query, Strategy};
use predtrans::planner::{build_join_graph, make_schedule, orient_transfer_graph};
use predtrans::semijoin::{build_join_tree, run_semijoin_phase};
use predtrans::transfer::{initial_selections, run_transfer_phase, SelectionMap, TransferStats};

type Outcome = Result<String, String>;
type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;

fn transfer(w: &Workload, kind: FilterKind) -> (SelectionMap, TransferStats) {
    let g = build_join_graph(&w.query).unwrap();
    let tg = orient_transfer_graph(&g, &w.catalog.cardinalities()).unwrap();
    let s = make_schedule(&tg).unwrap();
    let out = run_transfer_phase(&w.catalog, &w.query, &tg, &s, kind, DEFAULT_SEED).unwrap();
    (out.selections, out.stats)
}

fn semijoin(w: &Workload, seed: u64) -> (SelectionMap, TransferStats, usize) {
    let g = build_join_graph(&w.query).unwrap();
    let tree = build_join_tree(&g, seed).unwrap();
    let init = initial_selections(&w.catalog, &w.query).unwrap();
    let (sel, stats) = run_semijoin_phase(&w.catalog, init, &tree).unwrap();
    (sel, stats, tree.tree_edge_count())
}

fn total(sel: &SelectionMap) -> usize {
    sel.values().map(|s| s.cardinality()).sum()
}

fn oracle_equivalence(acyclic: &[Workload]) -> Outcome {
    for (i, w) in acyclic.iter().enumerate() {
        let oracle = full_reducer_oracle(&w.catalog, &w.query).map_err(|e| format!("{}: {e}", w.label))?;
        let (pt, _) = transfer(w, FilterKind::Exact);
        let (sj, _, _) = semijoin(w, i as u64);
        for (t, want) in &oracle.participating {
            if &pt[t] != want {
                return Err(format!("{}: transfer selection of {t} differs from oracle", w.label));
            }
            if &sj[t] != want {
                return Err(format!("{}: semi-join selection of {t} differs from oracle", w.label));
            }
        }
    }
    Ok(format!("{} acyclic workloads, exact set equality", acyclic.len()))
}

fn soundness(all: &[Workload]) -> Outcome {
    for w in all {
        let oracle = full_reducer_oracle(&w.catalog, &w.query).map_err(|e| format!("{}: {e}", w.label))?;
        for eps in [0.1, 0.01, 0.001] {
            let (sel, _) = transfer(w, FilterKind::Bloom { epsilon: eps });
            for (t, want) in &oracle.participating {
                if !want.is_subset_of(&sel[t]) {
                    return Err(format!("{}: eps={eps} dropped a contributing row of {t}", w.label));
                }
            }
        }
    }
    Ok(format!("{} workloads x 3 epsilons, no false negatives", all.len()))
}

fn strategies(seed: u64) -> Vec<Strategy> {
    vec![
        Strategy::none(),
        Strategy::bloom_join(0.01),
        Strategy::yannakakis(seed),
        Strategy::pred_trans(FilterKind::Bloom { epsilon: 0.01 }),
        Strategy::pred_trans(FilterKind::Exact),
    ]
}

fn result_equivalence(all: &[Workload]) -> Outcome {
    for (i, w) in all.iter().enumerate() {
        let r = run_experiment(&w.catalog, &w.query, &strategies(i as u64), 0).map_err(|e| e.to_string())?;
        if !r.checksums_agree() {
            let seen: Vec<_> = r.strategies.iter().map(|s| (s.strategy.clone(), s.result_rows, s.checksum)).collect();
            return Err(format!("{}: {seen:?}", w.label));
        }
    }
    Ok(format!("{} workloads, equal checksums and row counts", all.len()))
}

fn q5_reduction(q5: &Workload) -> Outcome {
    let region = q5.catalog.get("region").unwrap().row_count();
    let orders = q5.catalog.get("orders").unwrap().row_count();
    let init = initial_selections(&q5.catalog, &q5.query).unwrap();
    let (rs, os) = (
        init["region"].cardinality() as f64 / region as f64,
        init["orders"].cardinality() as f64 / orders as f64,
    );
    let none = execute_query(&q5.catalog, &q5.query, &Strategy::none()).unwrap();
    let pt = execute_query(
        &q5.catalog,
        &q5.query,
        &Strategy::pred_trans(FilterKind::Bloom { epsilon: 0.01 }),
    )
    .unwrap();
    let (a, b) = (pt.join_input_rows(), none.join_input_rows());
    let ratio = a as f64 / b as f64;
    let msg = format!(
        "region sel {rs:.2}, orders sel {os:.3}, HT+PR {a} vs {b} ({:.1}% reduction)",
        100.0 * (1.0 - ratio)
    );
    if (rs - 0.2).abs() < 1e-9 && (os - 0.05).abs() < 0.01 && ratio <= 0.10 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn cyclic_advantage(q5: &Workload) -> Outcome {
    let (pt, _) = transfer(q5, FilterKind::Exact);
    let pt_total = total(&pt);
    let mut lines = Vec::new();
    let mut ok = true;
    for seed in 0..8u64 {
        let (sj, _, _) = semijoin(q5, seed);
        let componentwise = sj.iter().all(|(t, s)| pt[t].cardinality() <= s.cardinality());
        ok &= pt_total <= total(&sj);
        lines.push(format!(
            "seed {seed}: {pt_total} <= {}{}",
            total(&sj),
            if componentwise { "" } else { " (not per table)" }
        ));
    }
    let msg = format!("pred_trans(exact) vs yannakakis surviving rows: {}", lines.join("; "));
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn phase_costs(all: &[Workload]) -> Outcome {
    for (i, w) in all.iter().enumerate() {
        for kind in [FilterKind::Exact, FilterKind::Bloom { epsilon: 0.01 }] {
            let (_, stats) = transfer(w, kind);
            if stats.hash_table_builds() != 0 {
                return Err(format!("{}: transfer built hash tables", w.label));
            }
        }
        let (_, stats, tree_edges) = semijoin(w, i as u64);
        if (stats.hash_table_builds() as usize) < 2 * tree_edges {
            return Err(format!(
                "{}: {} semi-join hash builds for {tree_edges} tree edges",
                w.label,
                stats.hash_table_builds()
            ));
        }
    }
    Ok(format!("{} workloads: 0 transfer hash builds, >= 2 per tree edge for semi-joins", all.len()))
}

fn bloom_fpr() -> Outcome {
    let f = build_filter(0..10_000i64, FilterKind::Bloom { epsilon: 0.01 }, DEFAULT_SEED).unwrap();
    let fpr = measured_fpr(&f, 1_000_000_000..1_000_100_000i64).unwrap();
    let msg = format!("measured fpr {fpr:.5} over 100000 absent keys");
    if (0.002..=0.02).contains(&fpr) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn cost_identities() -> Outcome {
    let p = CostParams {
        n: 1000.0,
        t: 3.0,
        out: 50.0,
        beta: 0.1,
        epsilon: 0.01,
        c_y: 2.0,
        c_p: 2.0,
    };
    let y = predict_yannakakis(&p).unwrap();
    let t = predict_pred_transfer(&p).unwrap();
    let zero = CostParams { epsilon: 0.0, ..p };
    let limit = predict_yannakakis(&zero).unwrap().join_phase == predict_pred_transfer(&zero).unwrap().join_phase;
    let msg = format!(
        "yannakakis ({}, {}), pred_trans ({}, {}), eps=0 join phases equal: {limit}",
        y.semijoin_phase, y.join_phase, t.transfer_phase, t.join_phase
    );
    let worked = (y.semijoin_phase, y.join_phase) == (3000.0, 150.0)
        && t.transfer_phase == 1200.0
        && (t.join_phase - 151.5).abs() < 1e-9;
    if worked && limit {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn order_robustness(q5: &Workload) -> Outcome {
    let mut checksums = Vec::new();
    let mut notes = Vec::new();
    for order in Q5_ORDERS {
        let q = q5
            .query
            .with_join_order(order.iter().map(|s| s.to_string()).collect())
            .map_err(|e| e.to_string())?;
        let r = run_experiment(&q5.catalog, &q, &strategies(1), 0).map_err(|e| e.to_string())?;
        let maxes: Vec<_> = r
            .strategies
            .iter()
            .map(|s| format!("{}={}", s.strategy, s.max_intermediate))
            .collect();
        notes.push(format!("{} [{}]", order[0], maxes.join(" ")));
        checksums.extend(r.strategies.iter().map(|s| (s.checksum, s.result_rows)));
    }
    let same = checksums.windows(2).all(|w| w[0] == w[1]);
    let msg = format!("3 orders x 5 strategies, max intermediates by first table: {}", notes.join("; "));
    if same {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn main() {
    // The first 50 workloads are acyclic, the last 20 cyclic.
    let all: Vec<Workload> = common::acyclic(50).into_iter().chain(common::cyclic(20)).collect();
    let acyclic = &all[..50];
    let q5 = common::q5mini();

    let criteria: Vec<(&str, Check)> = vec![
        ("oracle equivalence on acyclic workloads", Box::new(|| oracle_equivalence(acyclic))),
        ("bloom transfer soundness", Box::new(|| soundness(&all))),
        ("strategy result equivalence", Box::new(|| result_equivalence(&all))),
        ("q5mini join input reduction", Box::new(|| q5_reduction(&q5))),
        ("cyclic filtering advantage", Box::new(|| cyclic_advantage(&q5))),
        ("phase cost mechanism", Box::new(|| {
            phase_costs(&all)?;
            phase_costs(std::slice::from_ref(&q5)).map(|_| format!("{} workloads plus q5mini: 0 transfer hash builds, >= 2 per tree edge for semi-joins", all.len()))
        })),
        ("bloom false positive rate", Box::new(bloom_fpr)),
        ("cost model identities", Box::new(cost_identities)),
        ("join order robustness", Box::new(|| order_robustness(&q5))),
    ];

    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("criterion {} {name}: PASS ({secs:.2}s) {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({secs:.2}s) {msg}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}

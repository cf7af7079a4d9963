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

//! Cross-module properties over randomized workloads, checked against the
//! brute-force oracle.

mod common;

use predtrans::bench::fixtures::{two_sink_chain_catalog, two_sink_chain_query};
use predtrans::bench::{
    full_reducer_oracle, generate_dataset, random_acyclic, random_cyclic, render_report, run_experiment,
    DataGenConfig, ReportFormat,
};
use predtrans::filter::{FilterKind, DEFAULT_SEED};
use predtrans::joinexec::{execute_query, Strategy};
use predtrans::planner::{build_join_graph, make_schedule, orient_transfer_graph};
use predtrans::query::QuerySpec;
use predtrans::relstore::Catalog;
use predtrans::semijoin::{build_join_tree, build_join_tree_with_root, run_semijoin_phase};
use predtrans::transfer::{initial_selections, run_transfer_passes, run_transfer_phase, TransferOutcome};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn transfer(catalog: &Catalog, q: &QuerySpec, kind: FilterKind) -> TransferOutcome {
    let g = build_join_graph(q).unwrap();
    let tg = orient_transfer_graph(&g, &catalog.cardinalities()).unwrap();
    let s = make_schedule(&tg).unwrap();
    run_transfer_phase(catalog, q, &tg, &s, kind, DEFAULT_SEED).unwrap()
}

/// A random valid left-deep order: grow a connected prefix by picking any
/// table adjacent to it.
fn random_order(q: &QuerySpec, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order = vec![q.tables.choose(&mut rng).unwrap().name.clone()];
    while order.len() < q.tables.len() {
        let mut next: Vec<&str> = q
            .joins
            .iter()
            .flat_map(|e| [(&e.left, &e.right), (&e.right, &e.left)])
            .filter(|(a, b)| order.contains(&a.table) && !order.contains(&b.table))
            .map(|(_, b)| b.table.as_str())
            .collect();
        next.sort_unstable();
        next.dedup();
        order.push(next.choose(&mut rng).unwrap().to_string());
    }
    order
}

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 24,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn transfer_shrinks_monotonically(seed in any::<u64>(), cyclic in any::<bool>()) {
        let cfg = if cyclic { random_cyclic(seed) } else { random_acyclic(seed) };
        let (catalog, q) = generate_dataset(&cfg).unwrap();
        let initial = initial_selections(&catalog, &q).unwrap();
        for kind in [FilterKind::Exact, FilterKind::Bloom { epsilon: 0.05 }] {
            let out = transfer(&catalog, &q, kind);
            for (t, init) in &initial {
                prop_assert!(out.after_forward[t].is_subset_of(init));
                prop_assert!(out.selections[t].is_subset_of(&out.after_forward[t]));
            }
            for v in &out.stats.visits {
                prop_assert!(v.rows_out <= v.rows_in);
                prop_assert_eq!(v.hash_table_builds, 0);
            }
        }
    }

    #[test]
    fn bloom_refines_exact_and_covers_oracle(seed in any::<u64>(), cyclic in any::<bool>()) {
        let cfg = if cyclic { random_cyclic(seed) } else { random_acyclic(seed) };
        let (catalog, q) = generate_dataset(&cfg).unwrap();
        let oracle = full_reducer_oracle(&catalog, &q).unwrap();
        let exact = transfer(&catalog, &q, FilterKind::Exact);
        let bloom = transfer(&catalog, &q, FilterKind::Bloom { epsilon: 0.2 });
        for (t, want) in &oracle.participating {
            prop_assert!(want.is_subset_of(&exact.selections[t]));
            prop_assert!(exact.selections[t].is_subset_of(&bloom.selections[t]));
        }
    }

    #[test]
    fn semijoin_is_full_reducer_from_every_root(seed in any::<u64>()) {
        let (catalog, q) = generate_dataset(&random_acyclic(seed)).unwrap();
        let oracle = full_reducer_oracle(&catalog, &q).unwrap();
        let g = build_join_graph(&q).unwrap();
        for t in &q.tables {
            let tree = build_join_tree_with_root(&g, &t.name).unwrap();
            let (sel, _) = run_semijoin_phase(&catalog, initial_selections(&catalog, &q).unwrap(), &tree).unwrap();
            prop_assert_eq!(&sel, &oracle.participating, "root {}", t.name);
        }
    }

    #[test]
    fn semijoin_on_cycles_is_sound(seed in any::<u64>(), root_seed in any::<u64>()) {
        let (catalog, q) = generate_dataset(&random_cyclic(seed)).unwrap();
        let oracle = full_reducer_oracle(&catalog, &q).unwrap();
        let tree = build_join_tree(&build_join_graph(&q).unwrap(), root_seed).unwrap();
        prop_assert_eq!(tree.dropped_edges.len(), 1);
        let (sel, _) = run_semijoin_phase(&catalog, initial_selections(&catalog, &q).unwrap(), &tree).unwrap();
        for (t, want) in &oracle.participating {
            prop_assert!(want.is_subset_of(&sel[t]));
        }
    }

    #[test]
    fn semijoin_matches_transfer_over_tree_edges(seed in any::<u64>(), root_seed in any::<u64>(), cyclic in any::<bool>()) {
        let cfg = if cyclic { random_cyclic(seed) } else { random_acyclic(seed) };
        let (catalog, q) = generate_dataset(&cfg).unwrap();
        let tree = build_join_tree(&build_join_graph(&q).unwrap(), root_seed).unwrap();
        let init = initial_selections(&catalog, &q).unwrap();
        let (sj, _) = run_semijoin_phase(&catalog, init.clone(), &tree).unwrap();
        let (tg, schedule) = tree.as_transfer_plan().unwrap();
        let pt = run_transfer_passes(&catalog, init, &tg, &schedule, FilterKind::Exact, 1).unwrap();
        prop_assert_eq!(sj, pt.selections);
    }

    #[test]
    fn strategies_agree_and_prefiltering_dominates(seed in any::<u64>(), cyclic in any::<bool>()) {
        let cfg = if cyclic { random_cyclic(seed) } else { random_acyclic(seed) };
        let (catalog, q) = generate_dataset(&cfg).unwrap();
        let oracle = full_reducer_oracle(&catalog, &q).unwrap();
        let strategies = [
            Strategy::none(),
            Strategy::bloom_join(0.05),
            Strategy::yannakakis(seed),
            Strategy::pred_trans(FilterKind::Bloom { epsilon: 0.05 }),
            Strategy::pred_trans(FilterKind::Exact),
        ];
        let r = run_experiment(&catalog, &q, &strategies, 0).unwrap();
        prop_assert!(r.checksums_agree());
        prop_assert_eq!(r.strategies[0].result_rows, oracle.result_rows);
        let none = &r.strategies[0].join_steps;
        for s in &r.strategies[2..] {
            for (a, b) in s.join_steps.iter().zip(none) {
                prop_assert!(a.ht_rows.min(a.pr_rows) <= b.ht_rows.min(b.pr_rows));
                prop_assert!(a.ht_rows + a.pr_rows <= b.ht_rows + b.pr_rows);
                prop_assert!(a.out_rows <= a.ht_rows * a.pr_rows);
            }
        }
    }

    #[test]
    fn results_are_order_independent(seed in any::<u64>(), order_seed in any::<u64>(), cyclic in any::<bool>()) {
        let cfg = if cyclic { random_cyclic(seed) } else { random_acyclic(seed) };
        let (catalog, mut q) = generate_dataset(&cfg).unwrap();
        // Fix the projection so column order does not follow the join order.
        q.output = q
            .tables
            .iter()
            .flat_map(|t| catalog.get(&t.name).unwrap().schema().fields().iter().map(move |f| format!("{}.{}", t.name, f.name)))
            .collect();
        let reordered = q.with_join_order(random_order(&q, order_seed)).unwrap();
        for s in [Strategy::none(), Strategy::pred_trans(FilterKind::Exact), Strategy::yannakakis(seed)] {
            let a = run_experiment(&catalog, &q, &[s], 0).unwrap();
            let b = run_experiment(&catalog, &reordered, &[s], 0).unwrap();
            prop_assert_eq!(a.strategies[0].checksum, b.strategies[0].checksum);
            prop_assert_eq!(a.strategies[0].result_rows, b.strategies[0].result_rows);
        }
    }
}

#[test]
fn pred_trans_exact_matches_oracle_on_all_acyclic_workloads() {
    for w in common::acyclic(50) {
        let oracle = full_reducer_oracle(&w.catalog, &w.query).unwrap();
        let run = execute_query(&w.catalog, &w.query, &Strategy::pred_trans(FilterKind::Exact)).unwrap();
        for t in &run.table_rows {
            assert_eq!(
                t.rows_after_prefilter,
                oracle.participating[&t.table].cardinality() as u64,
                "{} table {}",
                w.label,
                t.table
            );
        }
    }
}

#[test]
fn workloads_are_not_degenerate() {
    let non_empty = common::acyclic(50)
        .into_iter()
        .chain(common::cyclic(20))
        .filter(|w| full_reducer_oracle(&w.catalog, &w.query).unwrap().result_rows > 0)
        .count();
    assert!(non_empty >= 50, "only {non_empty} of 70 workloads have results");
}

#[test]
fn two_sink_orientation_is_not_a_full_reducer() {
    let catalog = two_sink_chain_catalog();
    let q = two_sink_chain_query();
    let oracle = full_reducer_oracle(&catalog, &q).unwrap();
    let pt = transfer(&catalog, &q, FilterKind::Exact);
    assert_eq!(oracle.participating["B"].rows(), &[0]);
    assert_eq!(pt.selections["B"].rows(), &[0, 1]);
    for (t, want) in &oracle.participating {
        assert!(want.is_subset_of(&pt.selections[t]));
    }
    // The semi-join baseline still reduces fully, and results agree.
    let tree = build_join_tree(&build_join_graph(&q).unwrap(), 0).unwrap();
    let (sj, _) = run_semijoin_phase(&catalog, initial_selections(&catalog, &q).unwrap(), &tree).unwrap();
    assert_eq!(sj, oracle.participating);
    let a = run_experiment(&catalog, &q, &[Strategy::none(), Strategy::pred_trans(FilterKind::Exact)], 0).unwrap();
    assert!(a.checksums_agree());
}

#[test]
fn q5mini_exact_transfer_covers_oracle_and_beats_every_tree() {
    let w = common::q5mini();
    let oracle = full_reducer_oracle(&w.catalog, &w.query).unwrap();
    let run = execute_query(&w.catalog, &w.query, &Strategy::pred_trans(FilterKind::Exact)).unwrap();
    for t in &run.table_rows {
        assert!(t.rows_after_prefilter >= oracle.participating[&t.table].cardinality() as u64);
    }
    // The cycle means transfer is not a full reducer here.
    let total: u64 = run.table_rows.iter().map(|t| t.rows_after_prefilter).sum();
    let oracle_total: usize = oracle.participating.values().map(|s| s.cardinality()).sum();
    assert!(total > oracle_total as u64);
    assert_eq!(run.result.row_count() as u64, oracle.result_rows);
}

#[test]
fn q5mini_semijoin_matches_transfer_over_its_tree() {
    let w = common::q5mini();
    let g = build_join_graph(&w.query).unwrap();
    for seed in 0..6 {
        let tree = build_join_tree(&g, seed).unwrap();
        assert_eq!(tree.dropped_edges.len(), 2);
        let init = initial_selections(&w.catalog, &w.query).unwrap();
        let (sj, stats) = run_semijoin_phase(&w.catalog, init.clone(), &tree).unwrap();
        assert_eq!(stats.hash_table_builds(), 10);
        let (tg, schedule) = tree.as_transfer_plan().unwrap();
        let pt = run_transfer_passes(&w.catalog, init, &tg, &schedule, FilterKind::Exact, 5).unwrap();
        assert_eq!(sj, pt.selections, "seed {seed}");
    }
}

#[test]
fn q5mini_prefiltering_shrinks_every_join_step() {
    let w = common::q5mini();
    let none = execute_query(&w.catalog, &w.query, &Strategy::none()).unwrap();
    let pt = execute_query(&w.catalog, &w.query, &Strategy::pred_trans(FilterKind::Bloom { epsilon: 0.01 })).unwrap();
    assert_eq!(none.join_steps.len(), 5);
    for (a, b) in pt.join_steps.iter().zip(&none.join_steps) {
        assert!(a.ht_rows <= b.ht_rows && a.pr_rows <= b.pr_rows, "{a:?} vs {b:?}");
    }
}

#[test]
fn q5mini_seeded_reports_are_byte_identical() {
    let render = || {
        let (catalog, q) = generate_dataset(&DataGenConfig::q5mini(0.3, 4)).unwrap();
        let r = run_experiment(
            &catalog,
            &q,
            &[Strategy::none(), Strategy::yannakakis(2), Strategy::pred_trans(FilterKind::Bloom { epsilon: 0.01 })],
            0,
        )
        .unwrap();
        (
            render_report(&r, ReportFormat::Json).unwrap(),
            render_report(&r, ReportFormat::Markdown).unwrap(),
        )
    };
    assert_eq!(render(), render());
}

#[test]
fn q5mini_markdown_lists_five_join_steps() {
    let w = common::q5mini();
    let r = run_experiment(&w.catalog, &w.query, &[Strategy::none()], 0).unwrap();
    let md = render_report(&r, ReportFormat::Markdown).unwrap();
    let steps = md.lines().filter(|l| l.starts_with("| ") && l[2..].starts_with(char::is_numeric)).count();
    assert_eq!(steps, 5);
}

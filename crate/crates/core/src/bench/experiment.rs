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

//! Strategy comparison runs.

use serde::{Deserialize, Serialize};

use crate::costmodel::{fit_constants, FittedConstants};
use crate::error::Result;
use crate::hash::{hash_bytes, CHECKSUM_SEED};
use crate::joinexec::{execute_query, JoinStep, PhaseTimings, QueryRun, Strategy, StrategyKind, TableRows};
use crate::query::QuerySpec;
use crate::relstore::{Catalog, Table};
use crate::transfer::TransferStats;

/// Order-independent digest of a result: the wrapping sum of each row's
/// hash, where a row renders as its values joined by `|`.
pub fn result_checksum(table: &Table) -> u64 {
    let mut sum = 0u64;
    let mut buf = String::new();
    for row in 0..table.row_count() {
        buf.clear();
        for (i, c) in table.columns().iter().enumerate() {
            if i > 0 {
                buf.push('|');
            }
            use std::fmt::Write;
            write!(buf, "{}", c.value(row)).expect("write to String");
        }
        sum = sum.wrapping_add(hash_bytes(buf.as_bytes(), CHECKSUM_SEED));
    }
    sum
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyReport {
    pub strategy: String,
    pub kind: StrategyKind,
    /// Median phase times over the timed runs; absent with zero repeats.
    pub timings: Option<PhaseTimings>,
    pub join_steps: Vec<JoinStep>,
    pub transfer_stats: Option<TransferStats>,
    pub table_rows: Vec<TableRows>,
    pub result_rows: u64,
    pub checksum: u64,
    pub max_intermediate: u64,
    pub join_input_rows: u64,
    pub fitted: FittedConstants,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub query: String,
    pub join_order: Vec<String>,
    pub input_rows: u64,
    pub repeats: usize,
    pub strategies: Vec<StrategyReport>,
}

impl ExperimentReport {
    pub fn strategy(&self, kind: StrategyKind) -> Option<&StrategyReport> {
        self.strategies.iter().find(|s| s.kind == kind)
    }

    pub fn checksums_agree(&self) -> bool {
        self.strategies
            .windows(2)
            .all(|w| (w[0].checksum, w[0].result_rows) == (w[1].checksum, w[1].result_rows))
    }
}

fn median(mut v: Vec<u64>) -> u64 {
    v.sort_unstable();
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        // Mean of the middle pair, without overflow.
        v[n / 2 - 1] / 2 + v[n / 2] / 2 + (v[n / 2 - 1] % 2 + v[n / 2] % 2) / 2
    }
}

/// Per strategy: one warm-up run that also supplies every counter, then
/// `repeats` timed runs whose median phase times are reported.
pub fn run_experiment(
    catalog: &Catalog,
    query: &QuerySpec,
    strategies: &[Strategy],
    repeats: usize,
) -> Result<ExperimentReport> {
    let input_rows = query
        .tables
        .iter()
        .map(|t| Ok(catalog.get(&t.name)?.row_count() as u64))
        .sum::<Result<u64>>()?;
    let mut reports = Vec::with_capacity(strategies.len());
    for s in strategies {
        let warm = execute_query(catalog, query, s)?;
        let timings = if repeats == 0 {
            None
        } else {
            let mut pre = Vec::with_capacity(repeats);
            let mut join = Vec::with_capacity(repeats);
            for _ in 0..repeats {
                let t = execute_query(catalog, query, s)?.timings;
                pre.push(t.prefilter_ns);
                join.push(t.join_ns);
            }
            Some(PhaseTimings {
                prefilter_ns: median(pre),
                join_ns: median(join),
            })
        };
        reports.push(strategy_report(s, warm, timings, input_rows));
    }
    Ok(ExperimentReport {
        query: query.name.clone().unwrap_or_else(|| "query".into()),
        join_order: query.join_order.clone(),
        input_rows,
        repeats,
        strategies: reports,
    })
}

fn strategy_report(s: &Strategy, run: QueryRun, timings: Option<PhaseTimings>, n: u64) -> StrategyReport {
    let stats = run.transfer_stats.as_ref();
    let fitted = match s.kind {
        StrategyKind::Yannakakis => fit_constants(n, stats, None),
        StrategyKind::PredTrans => fit_constants(n, None, stats),
        _ => fit_constants(n, None, None),
    };
    StrategyReport {
        strategy: s.label(),
        kind: s.kind,
        timings,
        checksum: result_checksum(&run.result),
        result_rows: run.result.row_count() as u64,
        max_intermediate: run.max_intermediate(),
        join_input_rows: run.join_input_rows(),
        join_steps: run.join_steps,
        transfer_stats: run.transfer_stats,
        table_rows: run.table_rows,
        fitted,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::fixtures::{chain3_catalog, chain3_query};
    use crate::filter::FilterKind;

    fn all_strategies() -> Vec<Strategy> {
        vec![
            Strategy::none(),
            Strategy::bloom_join(0.01),
            Strategy::yannakakis(3),
            Strategy::pred_trans(FilterKind::Exact),
        ]
    }

    #[test]
    fn chain3_strategies_agree() {
        let r = run_experiment(&chain3_catalog(), &chain3_query(), &all_strategies(), 1).unwrap();
        assert_eq!(r.strategies.len(), 4);
        assert!(r.checksums_agree());
        assert!(r.strategies.iter().all(|s| s.result_rows == 1 && s.timings.is_some()));
        assert_eq!(r.input_rows, 6);
    }

    #[test]
    fn zero_repeats_has_no_timings() {
        let r = run_experiment(&chain3_catalog(), &chain3_query(), &all_strategies(), 0).unwrap();
        assert!(r.strategies.iter().all(|s| s.timings.is_none()));
        assert!(r.strategy(StrategyKind::PredTrans).unwrap().transfer_stats.is_some());
    }

    #[test]
    fn checksum_ignores_row_order() {
        use crate::relstore::{Column, ColumnType, Schema};
        let schema = Schema::of(&[("a", ColumnType::Int64), ("b", ColumnType::Utf8)]).unwrap();
        let t1 = Table::new(
            "x",
            schema.clone(),
            vec![Column::Int64(vec![1, 2]), Column::Utf8(vec!["p".into(), "q".into()])],
        )
        .unwrap();
        let t2 = Table::new(
            "x",
            schema,
            vec![Column::Int64(vec![2, 1]), Column::Utf8(vec!["q".into(), "p".into()])],
        )
        .unwrap();
        assert_eq!(result_checksum(&t1), result_checksum(&t2));
        let expected = hash_bytes(b"1|p", 0).wrapping_add(hash_bytes(b"2|q", 0));
        assert_eq!(result_checksum(&t1), expected);
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(vec![3, 1, 2]), 2);
        assert_eq!(median(vec![4, 1, 3, 2]), 2);
        assert_eq!(median(vec![u64::MAX, u64::MAX]), u64::MAX);
    }
}

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

//! Left-deep hash joins and strategy dispatch.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::{FilterBuilder, FilterKind, DEFAULT_SEED};
use crate::hash::derive_seed;
use crate::planner::{build_join_graph, make_schedule, orient_transfer_graph};
use crate::query::{JoinType, QuerySpec};
use crate::relstore::{Catalog, Column, Field, KeyAtom, RowSelection, Schema, Table};
use crate::semijoin::{build_join_tree, run_semijoin_phase};
use crate::transfer::{initial_selections, run_transfer_passes, SelectionMap, TransferStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    None,
    BloomJoin,
    Yannakakis,
    PredTrans,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 4] = [
        StrategyKind::None,
        StrategyKind::BloomJoin,
        StrategyKind::Yannakakis,
        StrategyKind::PredTrans,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            StrategyKind::None => "none",
            StrategyKind::BloomJoin => "bloom_join",
            StrategyKind::Yannakakis => "yannakakis",
            StrategyKind::PredTrans => "pred_trans",
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StrategyKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown strategy '{s}'")))
    }
}

/// How a query is executed. `filter_kind` drives the filters of both
/// `pred_trans` and `bloom_join`; `seed` drives filter hashing and the
/// Yannakakis root choice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Strategy {
    pub kind: StrategyKind,
    pub filter_kind: FilterKind,
    pub seed: u64,
}

impl Strategy {
    pub fn new(kind: StrategyKind, filter_kind: FilterKind, seed: u64) -> Self {
        Strategy {
            kind,
            filter_kind,
            seed,
        }
    }

    pub fn none() -> Self {
        Strategy::new(StrategyKind::None, FilterKind::Exact, DEFAULT_SEED)
    }

    pub fn bloom_join(epsilon: f64) -> Self {
        Strategy::new(StrategyKind::BloomJoin, FilterKind::Bloom { epsilon }, DEFAULT_SEED)
    }

    pub fn yannakakis(seed: u64) -> Self {
        Strategy::new(StrategyKind::Yannakakis, FilterKind::Exact, seed)
    }

    pub fn pred_trans(filter_kind: FilterKind) -> Self {
        Strategy::new(StrategyKind::PredTrans, filter_kind, DEFAULT_SEED)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Short label such as `pred_trans(bloom eps=0.01)`.
    pub fn label(&self) -> String {
        match self.kind {
            StrategyKind::None => "none".into(),
            StrategyKind::Yannakakis => format!("yannakakis(seed={})", self.seed),
            k => format!("{k}({})", self.filter_kind.label()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BuildSide {
    #[default]
    Auto,
    Left,
    Right,
}

#[derive(Debug, Clone, Copy)]
pub struct JoinInput<'a> {
    pub table: &'a Table,
    pub selection: &'a RowSelection,
}

impl<'a> JoinInput<'a> {
    pub fn new(table: &'a Table, selection: &'a RowSelection) -> Self {
        JoinInput { table, selection }
    }
}

/// Counters for one hash join.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JoinStep {
    pub step: usize,
    /// The table joined in at this step.
    pub table: String,
    pub build: BuildSide,
    pub ht_rows: u64,
    pub pr_rows: u64,
    pub out_rows: u64,
}

fn key_columns<'a>(
    input: &JoinInput<'a>,
    names: impl Iterator<Item = &'a str>,
) -> Result<Vec<crate::relstore::KeyColumn<'a>>> {
    names.map(|n| input.table.key_column(n)).collect()
}

fn tuple<'a>(cols: &[crate::relstore::KeyColumn<'a>], row: u32) -> Vec<KeyAtom<'a>> {
    cols.iter().map(|c| c.atom(row)).collect()
}

/// Inner equi-join on the conjunction of `keys` (left column, right column).
/// Output carries every column of both inputs under table-qualified names,
/// left first; rows come in probe order, then build insertion order.
pub fn hash_join(
    left: JoinInput<'_>,
    right: JoinInput<'_>,
    keys: &[(String, String)],
    build: BuildSide,
) -> Result<(Table, JoinStep)> {
    left.selection.check_table(left.table)?;
    right.selection.check_table(right.table)?;
    if keys.is_empty() {
        return Err(Error::InvalidQuery(format!(
            "join of {} and {} has no key pair",
            left.table.name(),
            right.table.name()
        )));
    }
    for (l, r) in keys {
        let (lt, rt) = (left.table.column_type(l)?, right.table.column_type(r)?);
        if lt != rt {
            return Err(Error::TypeMismatch(format!("{l} is {lt}, {r} is {rt}")));
        }
    }
    let side = match build {
        BuildSide::Auto if right.selection.cardinality() < left.selection.cardinality() => {
            BuildSide::Right
        }
        BuildSide::Auto => BuildSide::Left,
        s => s,
    };
    let lk = key_columns(&left, keys.iter().map(|(l, _)| l.as_str()))?;
    let rk = key_columns(&right, keys.iter().map(|(_, r)| r.as_str()))?;
    let (bsel, bkeys, psel, pkeys) = match side {
        BuildSide::Right => (right.selection, &rk, left.selection, &lk),
        _ => (left.selection, &lk, right.selection, &rk),
    };

    let mut table: HashMap<Vec<KeyAtom<'_>>, Vec<u32>> = HashMap::with_capacity(bsel.cardinality());
    for &r in bsel.rows() {
        table.entry(tuple(bkeys, r)).or_default().push(r);
    }
    let mut lrows = Vec::new();
    let mut rrows = Vec::new();
    for &p in psel.rows() {
        if let Some(matches) = table.get(&tuple(pkeys, p)) {
            for &b in matches {
                let (l, r) = if side == BuildSide::Right { (p, b) } else { (b, p) };
                lrows.push(l);
                rrows.push(r);
            }
        }
    }

    let mut fields = Vec::with_capacity(left.table.schema().len() + right.table.schema().len());
    let mut columns = Vec::with_capacity(fields.capacity());
    for (t, rows) in [(left.table, &lrows), (right.table, &rrows)] {
        for (i, f) in t.schema().fields().iter().enumerate() {
            fields.push(Field::new(t.qualified_name(i), f.ty));
            columns.push(t.columns()[i].gather(rows));
        }
    }
    let out = Table::new_qualified(
        format!("{}+{}", left.table.name(), right.table.name()),
        Schema::new(fields)?,
        columns,
    )?;
    let step = JoinStep {
        step: 0,
        table: right.table.name().to_string(),
        build: side,
        ht_rows: bsel.cardinality() as u64,
        pr_rows: psel.cardinality() as u64,
        out_rows: out.row_count() as u64,
    };
    Ok((out, step))
}

/// Reduces the probe side with a filter over the build side's selected keys,
/// one filter per key pair `(build column, probe column)`.
pub fn one_hop_bloom_prefilter(
    build: JoinInput<'_>,
    probe: JoinInput<'_>,
    keys: &[(String, String)],
    kind: FilterKind,
    seed: u64,
) -> Result<(RowSelection, TransferStats)> {
    build.selection.check_table(build.table)?;
    probe.selection.check_table(probe.table)?;
    let mut filters = Vec::with_capacity(keys.len());
    for (i, (bc, pc)) in keys.iter().enumerate() {
        let bk = build.table.key_column(bc)?;
        let pk = probe.table.key_column(pc)?;
        let mut b = FilterBuilder::new(kind, build.selection.cardinality(), derive_seed(seed, i as u64))?;
        for &r in build.selection.rows() {
            b.insert(bk.filter_key(r));
        }
        filters.push((pk, b.seal()));
    }
    let mut visit = crate::transfer::NodeVisit {
        table: probe.table.name().to_string(),
        rows_in: probe.selection.cardinality() as u64,
        filters_built: keys.len() as u64,
        filters_probed: keys.len() as u64,
        filter_inserts: (build.selection.cardinality() * keys.len()) as u64,
        column_scans: keys.len() as u64 * 2,
        ..Default::default()
    };
    let mut kept = Vec::new();
    'rows: for &r in probe.selection.rows() {
        for (pk, f) in &filters {
            visit.filter_probes += 1;
            if !f.probe(pk.filter_key(r)) {
                continue 'rows;
            }
        }
        kept.push(r);
    }
    visit.rows_out = kept.len() as u64;
    Ok((
        RowSelection::from_sorted(probe.table.name(), kept),
        TransferStats { visits: vec![visit] },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PhaseTimings {
    pub prefilter_ns: u64,
    pub join_ns: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRows {
    pub table: String,
    pub rows_before: u64,
    pub rows_after_prefilter: u64,
}

#[derive(Debug, Clone)]
pub struct QueryRun {
    pub result: Table,
    pub timings: PhaseTimings,
    pub join_steps: Vec<JoinStep>,
    /// Counters of the pre-filtering work, if the strategy does any.
    pub transfer_stats: Option<TransferStats>,
    pub table_rows: Vec<TableRows>,
}

impl QueryRun {
    pub fn max_intermediate(&self) -> u64 {
        self.join_steps.iter().map(|s| s.out_rows).max().unwrap_or(0)
    }

    /// Σ (ht_rows + pr_rows) over all join steps.
    pub fn join_input_rows(&self) -> u64 {
        self.join_steps.iter().map(|s| s.ht_rows + s.pr_rows).sum()
    }
}

fn elapsed_ns(start: Instant) -> u64 {
    start.elapsed().as_nanos().min(u64::MAX as u128) as u64
}

/// Computes the per-table selections handed to the join phase.
pub fn prefilter(
    catalog: &Catalog,
    query: &QuerySpec,
    strategy: &Strategy,
) -> Result<(SelectionMap, Option<TransferStats>)> {
    let initial = initial_selections(catalog, query)?;
    match strategy.kind {
        StrategyKind::None | StrategyKind::BloomJoin => Ok((initial, None)),
        StrategyKind::Yannakakis => {
            let graph = build_join_graph(query)?;
            let tree = build_join_tree(&graph, strategy.seed)?;
            let (sel, stats) = run_semijoin_phase(catalog, initial, &tree)?;
            Ok((sel, Some(stats)))
        }
        StrategyKind::PredTrans => {
            let graph = build_join_graph(query)?;
            let tg = orient_transfer_graph(&graph, &catalog.cardinalities())?;
            let schedule = make_schedule(&tg)?;
            let out = run_transfer_passes(
                catalog,
                initial,
                &tg,
                &schedule,
                strategy.filter_kind,
                strategy.seed,
            )?;
            Ok((out.selections, Some(out.stats)))
        }
    }
}

/// Runs the query under `strategy`: pre-filtering, then left-deep hash joins
/// in `query.join_order`, then projection onto `query.output`.
pub fn execute_query(catalog: &Catalog, query: &QuerySpec, strategy: &Strategy) -> Result<QueryRun> {
    query.validate()?;
    if let Some(e) = query.joins.iter().find(|e| e.join_type != JoinType::Inner) {
        return Err(Error::UnsupportedJoin(format!(
            "{e} is {:?}; only inner joins execute",
            e.join_type
        )));
    }
    strategy.filter_kind.validate()?;

    let start = Instant::now();
    let (selections, mut transfer_stats) = prefilter(catalog, query, strategy)?;
    let prefilter_ns = elapsed_ns(start);
    let table_rows = query
        .join_order
        .iter()
        .map(|t| {
            Ok(TableRows {
                table: t.clone(),
                rows_before: catalog.get(t)?.row_count() as u64,
                rows_after_prefilter: selections[t.as_str()].cardinality() as u64,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let start = Instant::now();
    let mut bloom_ns = 0;
    let first = &query.join_order[0];
    let mut acc = qualify(catalog.get(first)?, &selections[first.as_str()])?;
    let mut joined: HashSet<&str> = HashSet::from([first.as_str()]);
    let mut steps = Vec::with_capacity(query.join_order.len().saturating_sub(1));
    for (i, next) in query.join_order.iter().enumerate().skip(1) {
        let right = catalog.get(next)?;
        let keys: Vec<(String, String)> = query
            .joins
            .iter()
            .filter_map(|e| e.oriented_from(next))
            .filter(|(_, other)| joined.contains(other.table.as_str()))
            .map(|(mine, other)| (other.qualified(), mine.column.clone()))
            .collect();
        if keys.is_empty() {
            return Err(Error::DisconnectedJoinOrder(next.clone()));
        }
        let acc_all = RowSelection::all(&acc);
        let mut lsel = acc_all;
        let mut rsel = selections[next.as_str()].clone();
        let build = if rsel.cardinality() < lsel.cardinality() {
            BuildSide::Right
        } else {
            BuildSide::Left
        };
        if strategy.kind == StrategyKind::BloomJoin {
            let t = Instant::now();
            let seed = derive_seed(strategy.seed, i as u64);
            let stats = if build == BuildSide::Left {
                let (s, st) = one_hop_bloom_prefilter(
                    JoinInput::new(&acc, &lsel),
                    JoinInput::new(right, &rsel),
                    &keys,
                    strategy.filter_kind,
                    seed,
                )?;
                rsel = s;
                st
            } else {
                let flipped: Vec<_> = keys.iter().map(|(l, r)| (r.clone(), l.clone())).collect();
                let (s, st) = one_hop_bloom_prefilter(
                    JoinInput::new(right, &rsel),
                    JoinInput::new(&acc, &lsel),
                    &flipped,
                    strategy.filter_kind,
                    seed,
                )?;
                lsel = s;
                st
            };
            transfer_stats
                .get_or_insert_with(TransferStats::default)
                .visits
                .extend(stats.visits);
            bloom_ns += elapsed_ns(t);
        }
        let (out, mut step) = hash_join(
            JoinInput::new(&acc, &lsel),
            JoinInput::new(right, &rsel),
            &keys,
            build,
        )?;
        step.step = i;
        steps.push(step);
        joined.insert(next.as_str());
        acc = out;
    }
    let result = project(&acc, &query.output)?;
    let join_ns = elapsed_ns(start).saturating_sub(bloom_ns);
    Ok(QueryRun {
        result,
        timings: PhaseTimings {
            prefilter_ns: prefilter_ns + bloom_ns,
            join_ns,
        },
        join_steps: steps,
        transfer_stats,
        table_rows,
    })
}

fn qualify(table: &Table, selection: &RowSelection) -> Result<Table> {
    selection.check_table(table)?;
    let fields = table
        .schema()
        .fields()
        .iter()
        .enumerate()
        .map(|(i, f)| Field::new(table.qualified_name(i), f.ty))
        .collect();
    let columns: Vec<Column> = table.columns().iter().map(|c| c.gather(selection.rows())).collect();
    Table::new_qualified(table.name(), Schema::new(fields)?, columns)
}

fn project(table: &Table, output: &[String]) -> Result<Table> {
    if output.is_empty() {
        return Ok(table.clone());
    }
    let mut fields = Vec::with_capacity(output.len());
    let mut columns = Vec::with_capacity(output.len());
    for name in output {
        let i = table.column_index(name)?;
        fields.push(table.schema().fields()[i].clone());
        columns.push(table.columns()[i].clone());
    }
    Table::new_qualified(table.name(), Schema::new(fields)?, columns)
}

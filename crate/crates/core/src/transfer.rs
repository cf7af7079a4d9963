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

//! The predicate transfer phase.
//!
//! Each visited node runs a single scan over its selected rows: every
//! incoming filter is probed with that row's incoming key, and a row that
//! passes all of them is kept and its outgoing keys are inserted into the
//! outgoing filters. The forward pass visits nodes in schedule order and
//! follows edges `src -> dst`; the backward pass visits the reverse order,
//! follows every edge `dst -> src`, and rebuilds filters from the
//! post-forward selections.
//!
//! No hash table is ever built here. Only filters and selection vectors.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::{FilterBuilder, FilterKind, TransferFilter};
use crate::hash::derive_seed;
use crate::planner::{Pass, TransferGraph, TransferSchedule};
use crate::query::QuerySpec;
use crate::relstore::{apply_predicates, Catalog, RowSelection, Table};

pub type SelectionMap = BTreeMap<String, RowSelection>;

/// Counters for one node visit (transfer) or one semi-join (reduction).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeVisit {
    pub pass: Option<Pass>,
    pub table: String,
    pub rows_in: u64,
    pub rows_out: u64,
    pub filters_probed: u64,
    pub filters_built: u64,
    pub column_scans: u64,
    pub filter_probes: u64,
    pub filter_inserts: u64,
    pub hash_table_builds: u64,
    pub hash_inserts: u64,
    pub hash_probes: u64,
}

/// Instrumentation of a pre-filtering phase, either predicate transfer or
/// semi-join reduction.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransferStats {
    pub visits: Vec<NodeVisit>,
}

impl TransferStats {
    fn sum(&self, f: impl Fn(&NodeVisit) -> u64) -> u64 {
        self.visits.iter().map(f).sum()
    }

    pub fn hash_table_builds(&self) -> u64 {
        self.sum(|v| v.hash_table_builds)
    }

    pub fn filters_built(&self) -> u64 {
        self.sum(|v| v.filters_built)
    }

    pub fn filters_probed(&self) -> u64 {
        self.sum(|v| v.filters_probed)
    }

    pub fn column_scans(&self) -> u64 {
        self.sum(|v| v.column_scans)
    }

    /// Bloom/exact filter insertions plus probes.
    pub fn filter_ops(&self) -> u64 {
        self.sum(|v| v.filter_probes + v.filter_inserts)
    }

    /// Hash table insertions plus probes.
    pub fn hash_ops(&self) -> u64 {
        self.sum(|v| v.hash_inserts + v.hash_probes)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutgoingSpec<'a> {
    pub column: &'a str,
    pub kind: FilterKind,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct NodeOutput {
    pub selection: RowSelection,
    /// One filter per outgoing spec, in order.
    pub filters: Vec<TransferFilter>,
    pub visit: NodeVisit,
}

/// Filters one node by its incoming filters and emits its outgoing filters,
/// in one scan over the selected rows.
pub fn transfer_node(
    table: &Table,
    selection: &RowSelection,
    incoming: &[(&str, &TransferFilter)],
    outgoing: &[OutgoingSpec<'_>],
) -> Result<NodeOutput> {
    selection.check_table(table)?;
    let probes = incoming
        .iter()
        .map(|(col, f)| Ok((table.key_column(col)?, *f)))
        .collect::<Result<Vec<_>>>()?;
    let emits = outgoing
        .iter()
        .map(|o| table.key_column(o.column))
        .collect::<Result<Vec<_>>>()?;

    let mut visit = NodeVisit {
        table: table.name().to_string(),
        rows_in: selection.cardinality() as u64,
        filters_probed: incoming.len() as u64,
        filters_built: outgoing.len() as u64,
        ..Default::default()
    };
    if incoming.is_empty() && outgoing.is_empty() {
        visit.rows_out = visit.rows_in;
        return Ok(NodeOutput {
            selection: selection.clone(),
            filters: Vec::new(),
            visit,
        });
    }
    let touched: HashSet<&str> = incoming
        .iter()
        .map(|(c, _)| *c)
        .chain(outgoing.iter().map(|o| o.column))
        .collect();
    visit.column_scans = touched.len() as u64;

    // The input cardinality bounds the number of distinct outgoing keys.
    let mut builders = outgoing
        .iter()
        .map(|o| FilterBuilder::new(o.kind, selection.cardinality(), o.seed))
        .collect::<Result<Vec<_>>>()?;

    let mut kept = Vec::with_capacity(if incoming.is_empty() {
        selection.cardinality()
    } else {
        0
    });
    'rows: for &row in selection.rows() {
        for (keys, filter) in &probes {
            visit.filter_probes += 1;
            if !filter.probe(keys.filter_key(row)) {
                continue 'rows;
            }
        }
        kept.push(row);
        for (keys, b) in emits.iter().zip(builders.iter_mut()) {
            b.insert(keys.filter_key(row));
        }
    }
    visit.filter_inserts = kept.len() as u64 * outgoing.len() as u64;
    visit.rows_out = kept.len() as u64;
    Ok(NodeOutput {
        selection: RowSelection::from_sorted(table.name(), kept),
        filters: builders.into_iter().map(FilterBuilder::seal).collect(),
        visit,
    })
}

#[derive(Debug, Clone)]
pub struct TransferOutcome {
    pub selections: SelectionMap,
    pub after_forward: SelectionMap,
    pub stats: TransferStats,
}

/// Applies every table's local predicates.
pub fn initial_selections(catalog: &Catalog, query: &QuerySpec) -> Result<SelectionMap> {
    query
        .tables
        .iter()
        .map(|t| {
            let table = catalog.get(&t.name)?;
            Ok((t.name.clone(), apply_predicates(table, &t.predicates)?))
        })
        .collect()
}

/// Local predicates followed by the forward and backward transfer passes.
pub fn run_transfer_phase(
    catalog: &Catalog,
    query: &QuerySpec,
    tg: &TransferGraph,
    schedule: &TransferSchedule,
    kind: FilterKind,
    seed: u64,
) -> Result<TransferOutcome> {
    let initial = initial_selections(catalog, query)?;
    run_transfer_passes(catalog, initial, tg, schedule, kind, seed)
}

/// The two transfer passes over pre-filtered selections.
pub fn run_transfer_passes(
    catalog: &Catalog,
    initial: SelectionMap,
    tg: &TransferGraph,
    schedule: &TransferSchedule,
    kind: FilterKind,
    seed: u64,
) -> Result<TransferOutcome> {
    kind.validate()?;
    let mut selections = initial;
    for v in &tg.vertices {
        if !selections.contains_key(v) {
            selections.insert(v.clone(), RowSelection::all(catalog.get(v)?));
        }
    }
    let mut stats = TransferStats::default();
    run_pass(catalog, &mut selections, tg, &schedule.forward, Pass::Forward, kind, seed, &mut stats)?;
    let after_forward = selections.clone();
    run_pass(catalog, &mut selections, tg, &schedule.backward, Pass::Backward, kind, seed, &mut stats)?;
    Ok(TransferOutcome {
        selections,
        after_forward,
        stats,
    })
}

#[allow(clippy::too_many_arguments)]
fn run_pass(
    catalog: &Catalog,
    selections: &mut SelectionMap,
    tg: &TransferGraph,
    order: &[String],
    pass: Pass,
    kind: FilterKind,
    seed: u64,
    stats: &mut TransferStats,
) -> Result<()> {
    // (from, to) endpoints of each edge as traversed in this pass.
    let traversed: Vec<_> = tg
        .edges
        .iter()
        .enumerate()
        .filter(|(_, e)| e.passes.allows(pass))
        .map(|(i, e)| match pass {
            Pass::Forward => (i, &e.src, &e.dst),
            Pass::Backward => (i, &e.dst, &e.src),
        })
        .collect();
    let pass_tag: u64 = match pass {
        Pass::Forward => 1,
        Pass::Backward => 2,
    };

    // Filters in flight, keyed by edge index.
    let mut delivered: HashMap<usize, TransferFilter> = HashMap::new();
    for (pos, v) in order.iter().enumerate() {
        let table = catalog.get(v)?;
        let incoming_edges: Vec<_> = traversed.iter().filter(|(_, _, to)| &to.table == v).collect();
        let mut incoming = Vec::with_capacity(incoming_edges.len());
        for (i, _, to) in &incoming_edges {
            let f = delivered.get(i).ok_or_else(|| {
                Error::InvalidQuery(format!(
                    "schedule visits {v} before the source of edge {i} in the {pass:?} pass"
                ))
            })?;
            incoming.push((to.column.as_str(), f));
        }

        // One filter per distinct outgoing key column.
        let mut columns: Vec<&str> = Vec::new();
        let mut edge_slot = Vec::new();
        for (i, from, _) in traversed.iter().filter(|(_, from, _)| &from.table == v) {
            let slot = match columns.iter().position(|c| *c == from.column) {
                Some(s) => s,
                None => {
                    columns.push(from.column.as_str());
                    columns.len() - 1
                }
            };
            edge_slot.push((*i, slot));
        }
        let outgoing: Vec<OutgoingSpec<'_>> = columns
            .iter()
            .enumerate()
            .map(|(ci, c)| OutgoingSpec {
                column: c,
                kind,
                seed: derive_seed(seed, (pass_tag << 48) | ((pos as u64) << 16) | ci as u64),
            })
            .collect();

        let current = &selections[v.as_str()];
        let out = transfer_node(table, current, &incoming, &outgoing)?;
        for (i, slot) in edge_slot {
            delivered.insert(i, out.filters[slot].clone());
        }
        let mut visit = out.visit;
        visit.pass = Some(pass);
        stats.visits.push(visit);
        selections.insert(v.clone(), out.selection);
    }
    Ok(())
}

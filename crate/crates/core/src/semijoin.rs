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

//! Yannakakis semi-join reduction.
//!
//! A join tree is grown by BFS from a seeded random root; edges that would
//! close a cycle are dropped. Reduction runs bottom-up (each parent is
//! semi-joined with its children) and then top-down (each child with its
//! parent). Every semi-join builds one hash set of distinct source keys.

use std::collections::{BTreeMap, HashSet, VecDeque};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::planner::{JoinGraph, Pass, PassSet, TransferEdge, TransferGraph, TransferSchedule};
use crate::query::{ColumnRef, JoinEdge};
use crate::relstore::{Catalog, RowSelection, Table};
use crate::transfer::{NodeVisit, SelectionMap, TransferStats};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeLink {
    pub parent: String,
    pub child_column: String,
    pub parent_column: String,
    /// Index of the originating edge in the join graph.
    pub edge_index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoinTree {
    pub root: String,
    /// Vertices in BFS discovery order, root first.
    pub bfs_order: Vec<String>,
    pub parent: BTreeMap<String, TreeLink>,
    pub dropped_edges: Vec<JoinEdge>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParentEdge {
    pub child: ColumnRef,
    pub parent: ColumnRef,
}

/// Serializable form of a [`JoinTree`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JoinTreeDump {
    pub root: String,
    pub parent_edges: Vec<ParentEdge>,
    pub dropped_edges: Vec<JoinEdge>,
}

impl JoinTree {
    pub fn tree_edge_count(&self) -> usize {
        self.parent.len()
    }

    pub fn dump(&self) -> JoinTreeDump {
        let parent_edges = self.bfs_order[1..]
            .iter()
            .map(|child| {
                let l = &self.parent[child];
                ParentEdge {
                    child: ColumnRef::new(child.as_str(), l.child_column.as_str()),
                    parent: ColumnRef::new(l.parent.as_str(), l.parent_column.as_str()),
                }
            })
            .collect();
        JoinTreeDump {
            root: self.root.clone(),
            parent_edges,
            dropped_edges: self.dropped_edges.clone(),
        }
    }

    /// The transfer graph and schedule whose two passes perform exactly this
    /// tree's bottom-up and top-down reductions: every edge points from child
    /// to parent.
    pub fn as_transfer_plan(&self) -> Result<(TransferGraph, TransferSchedule)> {
        let forward: Vec<String> = self.bfs_order.iter().rev().cloned().collect();
        let edges = forward
            .iter()
            .filter_map(|child| self.parent.get(child).map(|l| (child, l)))
            .map(|(child, l)| TransferEdge {
                src: ColumnRef::new(child.as_str(), l.child_column.as_str()),
                dst: ColumnRef::new(l.parent.as_str(), l.parent_column.as_str()),
                passes: PassSet::BOTH,
                join_index: l.edge_index,
            })
            .collect();
        let tg = TransferGraph::new(forward.clone(), edges)?;
        let backward = self.bfs_order.clone();
        Ok((tg, TransferSchedule { forward, backward }))
    }
}

/// Picks the root uniformly from `seed`, then grows the tree by BFS.
pub fn build_join_tree(graph: &JoinGraph, seed: u64) -> Result<JoinTree> {
    if graph.vertices.is_empty() {
        return Err(Error::DisconnectedGraph("join graph has no tables".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let root = graph.vertices[rng.gen_range(0..graph.vertices.len())].clone();
    build_join_tree_with_root(graph, &root)
}

/// BFS from `root`; neighbors are visited in edge declaration order.
pub fn build_join_tree_with_root(graph: &JoinGraph, root: &str) -> Result<JoinTree> {
    if !graph.vertices.iter().any(|v| v == root) {
        return Err(Error::UnknownTable(root.to_string()));
    }
    let mut seen = HashSet::from([root.to_string()]);
    let mut tree_edges = HashSet::new();
    let mut bfs_order = vec![root.to_string()];
    let mut parent = BTreeMap::new();
    let mut queue = VecDeque::from([root.to_string()]);
    while let Some(v) = queue.pop_front() {
        for (i, e) in graph.edges.iter().enumerate() {
            let Some((mine, other)) = e.oriented_from(&v) else {
                continue;
            };
            if seen.insert(other.table.clone()) {
                tree_edges.insert(i);
                parent.insert(
                    other.table.clone(),
                    TreeLink {
                        parent: v.clone(),
                        child_column: other.column.clone(),
                        parent_column: mine.column.clone(),
                        edge_index: i,
                    },
                );
                bfs_order.push(other.table.clone());
                queue.push_back(other.table.clone());
            }
        }
    }
    if bfs_order.len() != graph.vertices.len() {
        let missing: Vec<_> = graph.vertices.iter().filter(|v| !seen.contains(*v)).cloned().collect();
        return Err(Error::DisconnectedGraph(format!(
            "unreachable from {root}: {}",
            missing.join(", ")
        )));
    }
    let dropped_edges = graph
        .edges
        .iter()
        .enumerate()
        .filter(|(i, _)| !tree_edges.contains(i))
        .map(|(_, e)| e.clone())
        .collect();
    Ok(JoinTree {
        root: root.to_string(),
        bfs_order,
        parent,
        dropped_edges,
    })
}

/// `target ⋉ source` on one key pair.
pub fn semi_join(
    target: (&Table, &RowSelection),
    source: (&Table, &RowSelection),
    target_column: &str,
    source_column: &str,
) -> Result<(RowSelection, NodeVisit)> {
    let (tt, ts) = target;
    let (st, ss) = source;
    ts.check_table(tt)?;
    ss.check_table(st)?;
    let tty = tt.column_type(target_column)?;
    let sty = st.column_type(source_column)?;
    if tty != sty {
        return Err(Error::TypeMismatch(format!(
            "{}.{target_column} is {tty}, {}.{source_column} is {sty}",
            tt.name(),
            st.name()
        )));
    }
    let tk = tt.key_column(target_column)?;
    let sk = st.key_column(source_column)?;
    let set: HashSet<_> = ss.rows().iter().map(|&r| sk.atom(r)).collect();
    let kept: Vec<u32> = ts.rows().iter().copied().filter(|&r| set.contains(&tk.atom(r))).collect();
    let visit = NodeVisit {
        pass: None,
        table: tt.name().to_string(),
        rows_in: ts.cardinality() as u64,
        rows_out: kept.len() as u64,
        column_scans: 2,
        hash_table_builds: 1,
        hash_inserts: ss.cardinality() as u64,
        hash_probes: ts.cardinality() as u64,
        ..Default::default()
    };
    Ok((RowSelection::from_sorted(tt.name(), kept), visit))
}

/// Bottom-up then top-down semi-join passes over `tree`.
pub fn run_semijoin_phase(
    catalog: &Catalog,
    initial: SelectionMap,
    tree: &JoinTree,
) -> Result<(SelectionMap, TransferStats)> {
    let mut sel = initial;
    for v in &tree.bfs_order {
        if !sel.contains_key(v) {
            sel.insert(v.clone(), RowSelection::all(catalog.get(v)?));
        }
    }
    let mut stats = TransferStats::default();
    let mut step = |sel: &mut SelectionMap, pass, target: &str, tcol: &str, source: &str, scol: &str| {
        let (out, mut visit) = semi_join(
            (catalog.get(target)?, &sel[target]),
            (catalog.get(source)?, &sel[source]),
            tcol,
            scol,
        )?;
        visit.pass = Some(pass);
        stats.visits.push(visit);
        sel.insert(target.to_string(), out);
        Ok::<_, Error>(())
    };
    for child in tree.bfs_order.iter().rev() {
        if let Some(l) = tree.parent.get(child) {
            step(&mut sel, Pass::Forward, &l.parent, &l.parent_column, child, &l.child_column)?;
        }
    }
    for child in &tree.bfs_order {
        if let Some(l) = tree.parent.get(child) {
            step(&mut sel, Pass::Backward, child, &l.child_column, &l.parent, &l.parent_column)?;
        }
    }
    Ok((sel, stats))
}

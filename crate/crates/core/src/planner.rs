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

//! Join graph construction and the transfer plan.
//!
//! The join graph has one vertex per table and one edge per equi-join. It
//! is oriented into a transfer graph by ranking vertices on
//! `(cardinality, name)` and pointing every edge from the lower rank to the
//! higher one. The rank is a strict total order, so the result is acyclic
//! and the rank order itself is a topological order.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::query::{ColumnRef, JoinEdge, JoinType, QuerySpec};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JoinGraph {
    pub vertices: Vec<String>,
    pub edges: Vec<JoinEdge>,
}

impl JoinGraph {
    pub fn neighbors<'a>(&'a self, table: &'a str) -> impl Iterator<Item = (usize, &'a str)> + 'a {
        self.edges.iter().enumerate().filter_map(move |(i, e)| {
            e.oriented_from(table).map(|(_, other)| (i, other.table.as_str()))
        })
    }

    pub fn is_connected(&self) -> bool {
        let Some(first) = self.vertices.first() else {
            return true;
        };
        let mut seen = HashSet::from([first.as_str()]);
        let mut stack = vec![first.as_str()];
        while let Some(v) = stack.pop() {
            for (_, n) in self.neighbors(v) {
                if seen.insert(n) {
                    stack.push(n);
                }
            }
        }
        seen.len() == self.vertices.len()
    }

    /// True when the graph is a forest: no cycles and no parallel edges.
    pub fn is_acyclic(&self) -> bool {
        let mut uf = UnionFind::new(self.vertices.len());
        let idx = self.vertex_index();
        self.edges
            .iter()
            .all(|e| uf.union(idx[e.left.table.as_str()], idx[e.right.table.as_str()]))
    }

    fn vertex_index(&self) -> HashMap<&str, usize> {
        self.vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.as_str(), i))
            .collect()
    }
}

/// One vertex per table and one edge per equi-join, in query order.
pub fn build_join_graph(query: &QuerySpec) -> Result<JoinGraph> {
    let mut vertices = Vec::with_capacity(query.tables.len());
    let mut seen = HashSet::new();
    for t in &query.tables {
        if !seen.insert(t.name.as_str()) {
            return Err(Error::InvalidQuery(format!("duplicate table '{}'", t.name)));
        }
        vertices.push(t.name.clone());
    }
    for e in &query.joins {
        if e.left.table == e.right.table {
            return Err(Error::InvalidQuery(format!("self-join edge {e}")));
        }
        let mut types = [None; 2];
        for (slot, side) in types.iter_mut().zip([&e.left, &e.right]) {
            let spec = query.table(&side.table)?;
            let idx = spec
                .schema
                .index_of(&side.column)
                .ok_or_else(|| Error::unknown_column(&side.table, &side.column))?;
            *slot = Some(spec.schema.fields()[idx].ty);
        }
        if types[0] != types[1] {
            return Err(Error::TypeMismatch(format!(
                "join {e} compares {} with {}",
                types[0].unwrap(),
                types[1].unwrap()
            )));
        }
    }
    Ok(JoinGraph {
        vertices,
        edges: query.joins.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pass {
    Forward,
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PassSet {
    pub forward: bool,
    pub backward: bool,
}

impl PassSet {
    pub const BOTH: PassSet = PassSet {
        forward: true,
        backward: true,
    };
    pub const FORWARD: PassSet = PassSet {
        forward: true,
        backward: false,
    };
    pub const BACKWARD: PassSet = PassSet {
        forward: false,
        backward: true,
    };

    pub fn allows(&self, pass: Pass) -> bool {
        match pass {
            Pass::Forward => self.forward,
            Pass::Backward => self.backward,
        }
    }
}

/// A join edge directed `src -> dst` for the forward pass; the backward
/// pass traverses it `dst -> src`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TransferEdge {
    pub src: ColumnRef,
    pub dst: ColumnRef,
    pub passes: PassSet,
    /// Index of the originating edge in the join graph.
    pub join_index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransferGraph {
    /// Vertices in rank order; used as the scheduling priority.
    pub vertices: Vec<String>,
    pub edges: Vec<TransferEdge>,
    /// Full outer joins, which cannot carry a transfer in either direction.
    pub excluded: Vec<JoinEdge>,
}

impl TransferGraph {
    /// A transfer graph with an explicit vertex priority order.
    pub fn new(vertices: Vec<String>, edges: Vec<TransferEdge>) -> Result<Self> {
        let known: HashSet<&str> = vertices.iter().map(String::as_str).collect();
        for e in &edges {
            for t in [&e.src.table, &e.dst.table] {
                if !known.contains(t.as_str()) {
                    return Err(Error::UnknownTable(t.clone()));
                }
            }
            if e.passes == (PassSet { forward: false, backward: false }) {
                return Err(Error::InvalidQuery(format!(
                    "transfer edge {} -> {} allows no pass",
                    e.src, e.dst
                )));
            }
        }
        Ok(TransferGraph {
            vertices,
            edges,
            excluded: Vec::new(),
        })
    }
}

/// Orients every edge from the smaller table to the larger one, ties broken
/// by table name. One-sided outer joins keep only the pass whose traversal
/// direction matches the preserved-to-null-supplying direction; full outer
/// joins are excluded and reported.
pub fn orient_transfer_graph(
    graph: &JoinGraph,
    cardinalities: &BTreeMap<String, usize>,
) -> Result<TransferGraph> {
    let mut ranked = Vec::with_capacity(graph.vertices.len());
    for v in &graph.vertices {
        let card = *cardinalities
            .get(v)
            .ok_or_else(|| Error::MissingCardinality(v.clone()))?;
        ranked.push((card, v.clone()));
    }
    ranked.sort();
    let rank: HashMap<&str, usize> = ranked
        .iter()
        .enumerate()
        .map(|(i, (_, v))| (v.as_str(), i))
        .collect();

    let mut edges = Vec::with_capacity(graph.edges.len());
    let mut excluded = Vec::new();
    for (i, e) in graph.edges.iter().enumerate() {
        let rl = rank
            .get(e.left.table.as_str())
            .ok_or_else(|| Error::UnknownTable(e.left.table.clone()))?;
        let rr = rank
            .get(e.right.table.as_str())
            .ok_or_else(|| Error::UnknownTable(e.right.table.clone()))?;
        let left_is_src = rl < rr;
        let (src, dst) = if left_is_src {
            (&e.left, &e.right)
        } else {
            (&e.right, &e.left)
        };
        // Which traversal direction the join type allows, expressed as
        // "does the filter flow from left to right".
        let passes = match e.join_type {
            JoinType::Inner => PassSet::BOTH,
            JoinType::LeftOuter if left_is_src => PassSet::FORWARD,
            JoinType::LeftOuter => PassSet::BACKWARD,
            JoinType::RightOuter if left_is_src => PassSet::BACKWARD,
            JoinType::RightOuter => PassSet::FORWARD,
            JoinType::FullOuter => {
                excluded.push(e.clone());
                continue;
            }
        };
        edges.push(TransferEdge {
            src: src.clone(),
            dst: dst.clone(),
            passes,
            join_index: i,
        });
    }
    Ok(TransferGraph {
        vertices: ranked.into_iter().map(|(_, v)| v).collect(),
        edges,
        excluded,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransferSchedule {
    pub forward: Vec<String>,
    pub backward: Vec<String>,
}

/// Topological order of the transfer graph, preferring the earliest vertex
/// in the graph's priority order whenever several are ready.
pub fn make_schedule(tg: &TransferGraph) -> Result<TransferSchedule> {
    let pos: HashMap<&str, usize> = tg
        .vertices
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_str(), i))
        .collect();
    let n = tg.vertices.len();
    let mut indegree = vec![0usize; n];
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in &tg.edges {
        let s = *pos
            .get(e.src.table.as_str())
            .ok_or_else(|| Error::UnknownTable(e.src.table.clone()))?;
        let d = *pos
            .get(e.dst.table.as_str())
            .ok_or_else(|| Error::UnknownTable(e.dst.table.clone()))?;
        out[s].push(d);
        indegree[d] += 1;
    }
    let mut ready: BinaryHeap<Reverse<usize>> = (0..n)
        .filter(|&v| indegree[v] == 0)
        .map(Reverse)
        .collect();
    let mut forward = Vec::with_capacity(n);
    while let Some(Reverse(v)) = ready.pop() {
        forward.push(tg.vertices[v].clone());
        for &d in &out[v] {
            indegree[d] -= 1;
            if indegree[d] == 0 {
                ready.push(Reverse(d));
            }
        }
    }
    if forward.len() != n {
        return Err(Error::CycleDetected);
    }
    let backward = forward.iter().rev().cloned().collect();
    Ok(TransferSchedule { forward, backward })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScheduleDump {
    pub forward: Vec<String>,
    pub backward: Vec<String>,
    pub edges: Vec<TransferEdge>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub excluded: Vec<JoinEdge>,
}

pub fn schedule_dump(tg: &TransferGraph, schedule: &TransferSchedule) -> ScheduleDump {
    ScheduleDump {
        forward: schedule.forward.clone(),
        backward: schedule.backward.clone(),
        edges: tg.edges.clone(),
        excluded: tg.excluded.clone(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorTransparency {
    Transparent,
    BlocksUpstream,
    BlocksDownstream,
    BlocksBoth,
}

/// An operator sitting on a join edge of the plan.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct OperatorDescriptor {
    pub kind: String,
    #[serde(default)]
    pub group_keys: Option<Vec<String>>,
    #[serde(default)]
    pub join_key: Vec<String>,
    #[serde(default)]
    pub invertible: Option<bool>,
}

impl OperatorDescriptor {
    pub fn new(kind: &str) -> Self {
        OperatorDescriptor {
            kind: kind.to_string(),
            ..Default::default()
        }
    }
}

/// Whether an operator lets filters pass through it.
///
/// Kinds: `filter`, `projection`, `sort`, `top_k` never block; `group_agg`
/// blocks both directions unless the join key is a subset of the group
/// key; `scalar_agg` and `full_outer_join` always block; `scalar_udf`
/// blocks the upstream direction unless it is invertible.
pub fn classify_operator_transparency(op: &OperatorDescriptor) -> Result<OperatorTransparency> {
    use OperatorTransparency::*;
    Ok(match op.kind.as_str() {
        "filter" | "projection" | "sort" | "top_k" => Transparent,
        "group_agg" => {
            let groups: HashSet<&str> = op
                .group_keys
                .iter()
                .flatten()
                .map(String::as_str)
                .collect();
            if !op.join_key.is_empty() && op.join_key.iter().all(|k| groups.contains(k.as_str())) {
                Transparent
            } else {
                BlocksBoth
            }
        }
        "scalar_agg" | "full_outer_join" => BlocksBoth,
        "scalar_udf" => {
            if op.invertible == Some(true) {
                Transparent
            } else {
                BlocksUpstream
            }
        }
        other => return Err(Error::UnknownOperatorKind(other.to_string())),
    })
}

/// Connected components of the graph after cutting every edge that is
/// blocked in both directions (annotated `BlocksBoth`, or a full outer
/// join). Components are ordered by their first vertex in graph order.
pub fn partition_eligible_subgraphs(
    graph: &JoinGraph,
    blocking: &[(usize, OperatorTransparency)],
) -> Result<Vec<JoinGraph>> {
    let mut cut = vec![false; graph.edges.len()];
    for &(edge, verdict) in blocking {
        let slot = cut.get_mut(edge).ok_or(Error::DanglingAnnotation(edge))?;
        *slot |= verdict == OperatorTransparency::BlocksBoth;
    }
    for (i, e) in graph.edges.iter().enumerate() {
        cut[i] |= e.join_type == JoinType::FullOuter;
    }

    let idx = graph.vertex_index();
    let mut uf = UnionFind::new(graph.vertices.len());
    for (i, e) in graph.edges.iter().enumerate() {
        if !cut[i] {
            uf.union(idx[e.left.table.as_str()], idx[e.right.table.as_str()]);
        }
    }

    let mut order: Vec<usize> = Vec::new();
    let mut members: HashMap<usize, JoinGraph> = HashMap::new();
    for (i, v) in graph.vertices.iter().enumerate() {
        let root = uf.find(i);
        members
            .entry(root)
            .or_insert_with(|| {
                order.push(root);
                JoinGraph {
                    vertices: Vec::new(),
                    edges: Vec::new(),
                }
            })
            .vertices
            .push(v.clone());
    }
    for (i, e) in graph.edges.iter().enumerate() {
        if !cut[i] {
            let root = uf.find(idx[e.left.table.as_str()]);
            members.get_mut(&root).unwrap().edges.push(e.clone());
        }
    }
    Ok(order
        .into_iter()
        .map(|r| members.remove(&r).unwrap())
        .collect())
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if `a` and `b` were already connected.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

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

//! Small hand-written datasets used by tests and examples.

use crate::query::{ColumnRef, JoinEdge, QuerySpec, TableSpec};
use crate::relstore::{Catalog, Column, ColumnType, Schema, Table};

fn ints(name: &str, cols: &[(&str, &[i64])]) -> Table {
    let fields: Vec<_> = cols.iter().map(|(c, _)| (*c, ColumnType::Int64)).collect();
    Table::new(
        name,
        Schema::of(&fields).expect("fixture schema"),
        cols.iter().map(|(_, v)| Column::Int64(v.to_vec())).collect(),
    )
    .expect("fixture table")
}

/// `R(a) = [1, 2]`, `S(a, b) = [(1, 10), (3, 20)]`, `T(b) = [10, 30]`.
pub fn chain3_catalog() -> Catalog {
    [
        ints("R", &[("a", &[1, 2])]),
        ints("S", &[("a", &[1, 3]), ("b", &[10, 20])]),
        ints("T", &[("b", &[10, 30])]),
    ]
    .into_iter()
    .collect()
}

/// `R.a = S.a` and `S.b = T.b`, joined left to right.
pub fn chain3_query() -> QuerySpec {
    query_over(
        &chain3_catalog(),
        &["R", "S", "T"],
        vec![
            JoinEdge::inner(ColumnRef::new("R", "a"), ColumnRef::new("S", "a")),
            JoinEdge::inner(ColumnRef::new("S", "b"), ColumnRef::new("T", "b")),
        ],
    )
}

/// A four-table chain whose small-to-large orientation has two sinks, so
/// two transfer passes cannot fully reduce it: `B` never learns about `D`.
pub fn two_sink_chain_catalog() -> Catalog {
    [
        ints("A", &[("x", &[1])]),
        ints("B", &[("x", &[1, 1, 9]), ("y", &[1, 2, 9])]),
        ints("C", &[("y", &[1, 2]), ("z", &[1, 2])]),
        ints("D", &[("z", &[1, 7, 8])]),
    ]
    .into_iter()
    .collect()
}

pub fn two_sink_chain_query() -> QuerySpec {
    query_over(
        &two_sink_chain_catalog(),
        &["A", "B", "C", "D"],
        vec![
            JoinEdge::inner(ColumnRef::new("A", "x"), ColumnRef::new("B", "x")),
            JoinEdge::inner(ColumnRef::new("B", "y"), ColumnRef::new("C", "y")),
            JoinEdge::inner(ColumnRef::new("C", "z"), ColumnRef::new("D", "z")),
        ],
    )
}

/// A query over `catalog` with no predicates, joined in `order`.
pub fn query_over(catalog: &Catalog, order: &[&str], joins: Vec<JoinEdge>) -> QuerySpec {
    QuerySpec {
        name: None,
        tables: order
            .iter()
            .map(|n| {
                let t = catalog.get(n).expect("fixture table");
                TableSpec {
                    name: n.to_string(),
                    csv: format!("{n}.csv"),
                    schema: t.schema().clone(),
                    predicates: Vec::new(),
                }
            })
            .collect(),
        joins,
        join_order: order.iter().map(|s| s.to_string()).collect(),
        output: Vec::new(),
    }
}

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

//! Brute-force full reducer.
//!
//! Enumerates the complete inner-join result as tuples of source row ids
//! and projects the distinct ids per table. The join loop is written
//! against [`Value`] directly and shares no code with the join executor.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::query::QuerySpec;
use crate::relstore::{apply_predicates, Catalog, RowSelection, Value};

pub const DEFAULT_ORACLE_BOUND: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    /// Rows of each table that appear in at least one result tuple.
    pub participating: BTreeMap<String, RowSelection>,
    pub result_rows: u64,
}

pub fn full_reducer_oracle(catalog: &Catalog, query: &QuerySpec) -> Result<OracleResult> {
    full_reducer_oracle_bounded(catalog, query, DEFAULT_ORACLE_BOUND)
}

/// As [`full_reducer_oracle`], failing once any partial result exceeds
/// `bound` tuples.
pub fn full_reducer_oracle_bounded(
    catalog: &Catalog,
    query: &QuerySpec,
    bound: usize,
) -> Result<OracleResult> {
    query.validate()?;
    let order = &query.join_order;
    let tables = order.iter().map(|t| catalog.get(t)).collect::<Result<Vec<_>>>()?;
    let mut candidates = Vec::with_capacity(order.len());
    for (t, table) in order.iter().zip(&tables) {
        candidates.push(apply_predicates(table, query.predicates_for(t))?);
    }

    // tuples[j][k] is the row of order[k] in partial result j.
    let mut tuples: Vec<Vec<u32>> = candidates[0].rows().iter().map(|&r| vec![r]).collect();
    for (pos, name) in order.iter().enumerate().skip(1) {
        let table = tables[pos];
        // (column of the new table, position of the earlier table, its column)
        let mut conds = Vec::new();
        for e in &query.joins {
            if let Some((mine, other)) = e.oriented_from(name) {
                if let Some(k) = order[..pos].iter().position(|t| *t == other.table) {
                    conds.push((
                        table.column_index(&mine.column)?,
                        k,
                        tables[k].column_index(&other.column)?,
                    ));
                }
            }
        }
        let mut index: HashMap<Vec<Value>, Vec<u32>> = HashMap::new();
        for &r in candidates[pos].rows() {
            let key = conds.iter().map(|&(c, _, _)| table.value(c, r as usize)).collect();
            index.entry(key).or_default().push(r);
        }
        let mut next = Vec::new();
        for tuple in &tuples {
            let key: Vec<Value> = conds
                .iter()
                .map(|&(_, k, c)| tables[k].value(c, tuple[k] as usize))
                .collect();
            if let Some(rows) = index.get(&key) {
                if next.len() + rows.len() > bound {
                    return Err(Error::OracleTooLarge { bound });
                }
                for &r in rows {
                    let mut t = tuple.clone();
                    t.push(r);
                    next.push(t);
                }
            }
        }
        tuples = next;
    }

    let mut sets: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); order.len()];
    for t in &tuples {
        for (k, &r) in t.iter().enumerate() {
            sets[k].insert(r);
        }
    }
    let participating = order
        .iter()
        .zip(sets)
        .map(|(name, s)| (name.clone(), RowSelection::from_sorted(name, s.into_iter().collect())))
        .collect();
    Ok(OracleResult {
        participating,
        result_rows: tuples.len() as u64,
    })
}

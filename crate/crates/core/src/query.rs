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

//! Query description: tables, local predicates, equi-joins and a left-deep
//! join order.
//!
//! On disk a query is a JSON document:
//!
//! ```json
//! {
//!   "tables": [{"name": "R", "csv": "r.csv", "schema": "r.schema.json",
//!               "predicates": [{"column": "a", "op": "ge", "value": 2}]}],
//!   "joins": [{"left": ["R", "a"], "right": ["S", "a"], "type": "inner"}],
//!   "join_order": ["R", "S"],
//!   "output": ["R.a"]
//! }
//! ```
//!
//! `schema` is either an inline field array or a path to a sidecar file,
//! resolved relative to the query file. `csv` paths are resolved the same way.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relstore::{load_table, Catalog, LocalPredicate, Schema};

/// `(table, column)`, serialized as a two-element array.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(String, String)", into = "(String, String)")]
pub struct ColumnRef {
    pub table: String,
    pub column: String,
}

impl ColumnRef {
    pub fn new(table: impl Into<String>, column: impl Into<String>) -> Self {
        ColumnRef {
            table: table.into(),
            column: column.into(),
        }
    }

    pub fn qualified(&self) -> String {
        format!("{}.{}", self.table, self.column)
    }
}

impl fmt::Display for ColumnRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.table, self.column)
    }
}

impl From<(String, String)> for ColumnRef {
    fn from((table, column): (String, String)) -> Self {
        ColumnRef { table, column }
    }
}

impl From<ColumnRef> for (String, String) {
    fn from(c: ColumnRef) -> Self {
        (c.table, c.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JoinType {
    #[default]
    Inner,
    LeftOuter,
    RightOuter,
    FullOuter,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JoinEdge {
    pub left: ColumnRef,
    pub right: ColumnRef,
    #[serde(rename = "type", default)]
    pub join_type: JoinType,
}

impl JoinEdge {
    pub fn inner(left: ColumnRef, right: ColumnRef) -> Self {
        JoinEdge {
            left,
            right,
            join_type: JoinType::Inner,
        }
    }

    pub fn touches(&self, table: &str) -> bool {
        self.left.table == table || self.right.table == table
    }

    /// The column on `table`'s side and the column on the other side.
    pub fn oriented_from(&self, table: &str) -> Option<(&ColumnRef, &ColumnRef)> {
        if self.left.table == table {
            Some((&self.left, &self.right))
        } else if self.right.table == table {
            Some((&self.right, &self.left))
        } else {
            None
        }
    }
}

impl fmt::Display for JoinEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.left, self.right)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableSpec {
    pub name: String,
    pub csv: String,
    pub schema: Schema,
    #[serde(default)]
    pub predicates: Vec<LocalPredicate>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuerySpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub tables: Vec<TableSpec>,
    #[serde(default)]
    pub joins: Vec<JoinEdge>,
    pub join_order: Vec<String>,
    #[serde(default)]
    pub output: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SchemaRef {
    Inline(Schema),
    Path(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableSpecFile {
    pub name: String,
    pub csv: String,
    pub schema: SchemaRef,
    #[serde(default)]
    pub predicates: Vec<LocalPredicate>,
}

/// The query document as written on disk, before schema paths are resolved.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuerySpecFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub tables: Vec<TableSpecFile>,
    #[serde(default)]
    pub joins: Vec<JoinEdge>,
    pub join_order: Vec<String>,
    #[serde(default)]
    pub output: Vec<String>,
}

impl QuerySpec {
    /// Reads a query document, resolving schema sidecars against its directory.
    /// Returns the query and that base directory.
    pub fn load(path: &Path) -> Result<(QuerySpec, PathBuf)> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let raw: QuerySpecFile =
            serde_json::from_reader(BufReader::new(file)).map_err(|e| Error::Json {
                path: path.display().to_string(),
                source: e,
            })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let tables = raw
            .tables
            .into_iter()
            .map(|t| {
                let schema = match t.schema {
                    SchemaRef::Inline(s) => s,
                    SchemaRef::Path(p) => Schema::load(&base.join(p))?,
                };
                Ok(TableSpec {
                    name: t.name,
                    csv: t.csv,
                    schema,
                    predicates: t.predicates,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let q = QuerySpec {
            name: raw.name,
            tables,
            joins: raw.joins,
            join_order: raw.join_order,
            output: raw.output,
        };
        q.validate()?;
        Ok((q, base))
    }

    /// Loads every table's CSV, resolved against `base`.
    pub fn load_catalog(&self, base: &Path) -> Result<Catalog> {
        self.tables
            .iter()
            .map(|t| load_table(&base.join(&t.csv), &t.schema, &t.name))
            .collect()
    }

    pub fn table(&self, name: &str) -> Result<&TableSpec> {
        self.tables
            .iter()
            .find(|t| t.name == name)
            .ok_or_else(|| Error::UnknownTable(name.to_string()))
    }

    pub fn predicates_for(&self, name: &str) -> &[LocalPredicate] {
        self.tables
            .iter()
            .find(|t| t.name == name)
            .map_or(&[], |t| t.predicates.as_slice())
    }

    /// Structural checks: unique table names, join endpoints exist, and the
    /// join order lists every table once with every prefix connected.
    pub fn validate(&self) -> Result<()> {
        let mut names = HashSet::new();
        for t in &self.tables {
            if !names.insert(t.name.as_str()) {
                return Err(Error::InvalidQuery(format!("duplicate table '{}'", t.name)));
            }
        }
        for e in &self.joins {
            for side in [&e.left, &e.right] {
                if !names.contains(side.table.as_str()) {
                    return Err(Error::UnknownTable(side.table.clone()));
                }
            }
        }
        self.check_join_order(&self.join_order)
    }

    fn check_join_order(&self, order: &[String]) -> Result<()> {
        let listed: BTreeSet<&str> = order.iter().map(String::as_str).collect();
        let tables: BTreeSet<&str> = self.tables.iter().map(|t| t.name.as_str()).collect();
        if listed.len() != order.len() || listed != tables {
            return Err(Error::InvalidQuery(format!(
                "join order {order:?} must list each of {tables:?} exactly once"
            )));
        }
        let mut prefix: HashSet<&str> = HashSet::new();
        for (i, t) in order.iter().enumerate() {
            let connected = self.joins.iter().any(|e| {
                e.oriented_from(t)
                    .is_some_and(|(_, other)| prefix.contains(other.table.as_str()))
            });
            if i > 0 && !connected {
                return Err(Error::DisconnectedJoinOrder(t.clone()));
            }
            prefix.insert(t);
        }
        Ok(())
    }

    /// A copy of this query with a different left-deep order.
    pub fn with_join_order(&self, order: Vec<String>) -> Result<QuerySpec> {
        self.check_join_order(&order)?;
        let mut q = self.clone();
        q.join_order = order;
        Ok(q)
    }

    /// The on-disk form with schemas referenced by sidecar path
    /// `<table>.schema.json`.
    pub fn to_file_form(&self) -> QuerySpecFile {
        QuerySpecFile {
            name: self.name.clone(),
            tables: self
                .tables
                .iter()
                .map(|t| TableSpecFile {
                    name: t.name.clone(),
                    csv: t.csv.clone(),
                    schema: SchemaRef::Path(format!("{}.schema.json", t.name)),
                    predicates: t.predicates.clone(),
                })
                .collect(),
            joins: self.joins.clone(),
            join_order: self.join_order.clone(),
            output: self.output.clone(),
        }
    }
}

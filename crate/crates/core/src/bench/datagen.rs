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

//! Deterministic synthetic datasets.
//!
//! Chain, star and cycle shapes name their tables `t0, t1, ...`. Join edge
//! `i` compares column `a{i}` on both endpoints, with values drawn
//! uniformly from `[0, key_domains[i])`. Every table also carries a payload
//! column `v` uniform in `[0, 1000)`; a table with selectivity `s < 1` gets
//! the local predicate `v < 1000 s`.
//!
//! The q5mini shape is a six-table order/lineitem schema with a region
//! filter and an order-date range.

use std::fs;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hash::derive_seed;
use crate::query::{ColumnRef, JoinEdge, QuerySpec, TableSpec};
use crate::relstore::{Catalog, Column, ColumnType, Comparator, LocalPredicate, Schema, Table, Value};

pub const PAYLOAD_DOMAIN: i64 = 1000;
pub const ORDER_DATE_DOMAIN: i64 = 2400;
pub const DEFAULT_ORDER_SELECTIVITY: f64 = 0.05;
pub const REGION_NAMES: [&str; 5] = ["AFRICA", "AMERICA", "ASIA", "EUROPE", "MIDDLE EAST"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Shape {
    Chain { tables: usize },
    Star { tables: usize },
    Cycle { tables: usize },
    Q5mini { scale: f64 },
}

impl Shape {
    fn table_count(&self) -> usize {
        match *self {
            Shape::Chain { tables } | Shape::Star { tables } | Shape::Cycle { tables } => tables,
            Shape::Q5mini { .. } => 6,
        }
    }

    fn edge_count(&self) -> usize {
        match *self {
            Shape::Chain { tables } | Shape::Star { tables } => tables.saturating_sub(1),
            Shape::Cycle { tables } => tables,
            Shape::Q5mini { .. } => 7,
        }
    }
}

/// Generator input. Empty vectors take defaults: 1000 rows per table, key
/// domains of 1000, and selectivity 0.1 on the first table only. For
/// q5mini, `rows` and `key_domains` must be empty and `selectivities` may
/// hold the order-date range selectivity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataGenConfig {
    pub shape: Shape,
    #[serde(default)]
    pub rows: Vec<usize>,
    #[serde(default)]
    pub key_domains: Vec<u64>,
    #[serde(default)]
    pub selectivities: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
}

impl DataGenConfig {
    pub fn for_shape(shape: Shape, seed: u64) -> Self {
        DataGenConfig {
            shape,
            rows: Vec::new(),
            key_domains: Vec::new(),
            selectivities: Vec::new(),
            seed,
        }
    }

    pub fn q5mini(scale: f64, seed: u64) -> Self {
        DataGenConfig::for_shape(Shape::Q5mini { scale }, seed)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        for &s in &self.selectivities {
            if !(0.0..=1.0).contains(&s) {
                return bad(format!("selectivity {s} outside [0, 1]"));
            }
        }
        match self.shape {
            Shape::Q5mini { scale } => {
                if !(scale.is_finite() && scale > 0.0) {
                    return bad(format!("q5mini scale {scale} must be positive"));
                }
                if !self.rows.is_empty() || !self.key_domains.is_empty() {
                    return bad("q5mini sizes come from the scale; rows and key_domains must be empty".into());
                }
                if self.selectivities.len() > 1 {
                    return bad("q5mini takes at most one selectivity (the order-date range)".into());
                }
            }
            shape => {
                let t = shape.table_count();
                let min = if matches!(shape, Shape::Cycle { .. }) { 3 } else { 1 };
                if t < min {
                    return bad(format!("{shape:?} needs at least {min} tables"));
                }
                if !self.rows.is_empty() && self.rows.len() != t {
                    return bad(format!("{} row counts for {t} tables", self.rows.len()));
                }
                if self.rows.iter().any(|&r| r > u32::MAX as usize) {
                    return bad("row count exceeds u32".into());
                }
                let e = shape.edge_count();
                if !self.key_domains.is_empty() && self.key_domains.len() != e {
                    return bad(format!("{} key domains for {e} edges", self.key_domains.len()));
                }
                if self.key_domains.iter().any(|&d| d == 0 || d > i64::MAX as u64) {
                    return bad("key domains must be in [1, i64::MAX]".into());
                }
                if !self.selectivities.is_empty() && self.selectivities.len() != t {
                    return bad(format!("{} selectivities for {t} tables", self.selectivities.len()));
                }
            }
        }
        Ok(())
    }
}

fn int_col(n: usize, rng: &mut ChaCha8Rng, hi: i64) -> Vec<i64> {
    (0..n).map(|_| rng.gen_range(0..hi)).collect()
}

fn table_spec(t: &Table, predicates: Vec<LocalPredicate>) -> TableSpec {
    TableSpec {
        name: t.name().to_string(),
        csv: format!("{}.csv", t.name()),
        schema: t.schema().clone(),
        predicates,
    }
}

/// Generates the tables and the query over them.
pub fn generate_dataset(cfg: &DataGenConfig) -> Result<(Catalog, QuerySpec)> {
    cfg.validate()?;
    match cfg.shape {
        Shape::Q5mini { scale } => generate_q5mini(cfg, scale),
        shape => generate_graph_shape(cfg, shape),
    }
}

fn generate_graph_shape(cfg: &DataGenConfig, shape: Shape) -> Result<(Catalog, QuerySpec)> {
    let t = shape.table_count();
    let names: Vec<String> = (0..t).map(|i| format!("t{i}")).collect();
    let endpoints: Vec<(usize, usize)> = match shape {
        Shape::Chain { .. } => (1..t).map(|i| (i - 1, i)).collect(),
        Shape::Star { .. } => (1..t).map(|i| (0, i)).collect(),
        Shape::Cycle { .. } => (1..t).map(|i| (i - 1, i)).chain([(t - 1, 0)]).collect(),
        Shape::Q5mini { .. } => unreachable!(),
    };
    let rows = |i: usize| cfg.rows.get(i).copied().unwrap_or(1000);
    let domain = |e: usize| cfg.key_domains.get(e).copied().unwrap_or(1000) as i64;
    let selectivity = |i: usize| {
        cfg.selectivities
            .get(i)
            .copied()
            .unwrap_or(if i == 0 { 0.1 } else { 1.0 })
    };

    let mut catalog = Catalog::new();
    let mut specs = Vec::with_capacity(t);
    for (i, name) in names.iter().enumerate() {
        // One stream per table keeps tables independent of each other's sizes.
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, i as u64));
        let n = rows(i);
        let mut fields = Vec::new();
        let mut cols = Vec::new();
        for (e, &(a, b)) in endpoints.iter().enumerate() {
            if a == i || b == i {
                fields.push((format!("a{e}"), ColumnType::Int64));
                cols.push(Column::Int64(int_col(n, &mut rng, domain(e))));
            }
        }
        fields.push(("v".to_string(), ColumnType::Int64));
        cols.push(Column::Int64(int_col(n, &mut rng, PAYLOAD_DOMAIN)));
        let f: Vec<(&str, ColumnType)> = fields.iter().map(|(n, t)| (n.as_str(), *t)).collect();
        let table = Table::new(name.as_str(), Schema::of(&f)?, cols)?;
        let s = selectivity(i);
        let predicates = if s < 1.0 {
            let bound = (s * PAYLOAD_DOMAIN as f64).round() as i64;
            vec![LocalPredicate::new("v", Comparator::Lt, bound)]
        } else {
            Vec::new()
        };
        specs.push(table_spec(&table, predicates));
        catalog.insert(table);
    }
    let joins = endpoints
        .iter()
        .enumerate()
        .map(|(e, &(a, b))| {
            let col = format!("a{e}");
            JoinEdge::inner(
                ColumnRef::new(names[a].as_str(), col.as_str()),
                ColumnRef::new(names[b].as_str(), col.as_str()),
            )
        })
        .collect();
    let kind = match shape {
        Shape::Chain { .. } => "chain",
        Shape::Star { .. } => "star",
        _ => "cycle",
    };
    let query = QuerySpec {
        name: Some(format!("{kind}{t}")),
        tables: specs,
        joins,
        join_order: names,
        output: Vec::new(),
    };
    query.validate()?;
    Ok((catalog, query))
}

/// Row counts of the q5mini tables at `scale`, in declaration order.
pub fn q5mini_sizes(scale: f64) -> [(&'static str, usize); 6] {
    let s = |base: f64| ((base * scale).round() as usize).max(1);
    [
        ("region", 5),
        ("nation", 25),
        ("supplier", s(100.0)),
        ("customer", s(1500.0)),
        ("orders", s(15000.0)),
        ("lineitem", s(60000.0)),
    ]
}

/// The order-date window `[lo, hi)` for a range selectivity.
pub fn order_date_window(selectivity: f64) -> (i64, i64) {
    let width = (selectivity * ORDER_DATE_DOMAIN as f64).round() as i64;
    let lo = ((ORDER_DATE_DOMAIN - width) / 4).max(0);
    (lo, lo + width)
}

fn generate_q5mini(cfg: &DataGenConfig, scale: f64) -> Result<(Catalog, QuerySpec)> {
    let sizes = q5mini_sizes(scale);
    let n = |i: usize| sizes[i].1;
    let rng = |tag: u64| ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, tag));
    let keys = |len: usize| (0..len as i64).collect::<Vec<_>>();
    let int = Column::Int64;
    let schema = |f: &[(&str, ColumnType)]| Schema::of(f);
    use ColumnType::{Int64, Utf8};

    let region = Table::new(
        "region",
        schema(&[("r_regionkey", Int64), ("r_name", Utf8)])?,
        vec![
            int(keys(5)),
            Column::Utf8(REGION_NAMES.iter().map(|s| s.to_string()).collect()),
        ],
    )?;
    let nation = Table::new(
        "nation",
        schema(&[("n_nationkey", Int64), ("n_regionkey", Int64)])?,
        vec![int(keys(25)), int((0..25).map(|i| i % 5).collect())],
    )?;
    let mut r = rng(2);
    let supplier = Table::new(
        "supplier",
        schema(&[("s_suppkey", Int64), ("s_nationkey", Int64)])?,
        vec![int(keys(n(2))), int(int_col(n(2), &mut r, 25))],
    )?;
    let mut r = rng(3);
    let customer = Table::new(
        "customer",
        schema(&[("c_custkey", Int64), ("c_nationkey", Int64)])?,
        vec![int(keys(n(3))), int(int_col(n(3), &mut r, 25))],
    )?;
    let mut r = rng(4);
    let o_custkey = int_col(n(4), &mut r, n(3) as i64);
    let o_orderdate = int_col(n(4), &mut r, ORDER_DATE_DOMAIN);
    let orders = Table::new(
        "orders",
        schema(&[("o_orderkey", Int64), ("o_custkey", Int64), ("o_orderdate", Int64)])?,
        vec![int(keys(n(4))), int(o_custkey), int(o_orderdate)],
    )?;
    let mut r = rng(5);
    let l_orderkey = int_col(n(5), &mut r, n(4) as i64);
    let l_suppkey = int_col(n(5), &mut r, n(2) as i64);
    let l_quantity = int_col(n(5), &mut r, 50);
    let lineitem = Table::new(
        "lineitem",
        schema(&[("l_orderkey", Int64), ("l_suppkey", Int64), ("l_quantity", Int64)])?,
        vec![int(l_orderkey), int(l_suppkey), int(l_quantity)],
    )?;

    let sel = cfg
        .selectivities
        .first()
        .copied()
        .unwrap_or(DEFAULT_ORDER_SELECTIVITY);
    let (lo, hi) = order_date_window(sel);
    let preds = |t: &Table| -> Vec<LocalPredicate> {
        match t.name() {
            "region" => vec![LocalPredicate::new("r_name", Comparator::Eq, Value::from("ASIA"))],
            "orders" => vec![
                LocalPredicate::new("o_orderdate", Comparator::Ge, lo),
                LocalPredicate::new("o_orderdate", Comparator::Lt, hi),
            ],
            _ => Vec::new(),
        }
    };
    let tables = [region, nation, supplier, customer, orders, lineitem];
    let specs = tables.iter().map(|t| table_spec(t, preds(t))).collect();
    let e = |a: &str, ac: &str, b: &str, bc: &str| JoinEdge::inner(ColumnRef::new(a, ac), ColumnRef::new(b, bc));
    let joins = vec![
        e("region", "r_regionkey", "nation", "n_regionkey"),
        e("nation", "n_nationkey", "supplier", "s_nationkey"),
        e("nation", "n_nationkey", "customer", "c_nationkey"),
        e("customer", "c_custkey", "orders", "o_custkey"),
        e("orders", "o_orderkey", "lineitem", "l_orderkey"),
        e("supplier", "s_suppkey", "lineitem", "l_suppkey"),
        e("customer", "c_nationkey", "supplier", "s_nationkey"),
    ];
    let join_order = ["lineitem", "supplier", "orders", "customer", "nation", "region"]
        .map(String::from)
        .to_vec();
    let query = QuerySpec {
        name: Some("q5mini".into()),
        tables: specs,
        joins,
        join_order,
        output: vec![
            "nation.n_nationkey".into(),
            "lineitem.l_orderkey".into(),
            "lineitem.l_quantity".into(),
        ],
    };
    query.validate()?;
    Ok((tables.into_iter().collect(), query))
}

/// Writes one CSV and one schema sidecar per table plus `query.json`.
pub fn write_dataset(catalog: &Catalog, query: &QuerySpec, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for spec in &query.tables {
        let table = catalog.get(&spec.name)?;
        table.write_csv(&dir.join(&spec.csv))?;
        table.schema().save(&dir.join(format!("{}.schema.json", spec.name)))?;
    }
    let path = dir.join("query.json");
    let json = serde_json::to_string_pretty(&query.to_file_form()).map_err(|e| Error::Json {
        path: path.display().to_string(),
        source: e,
    })?;
    fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))
}

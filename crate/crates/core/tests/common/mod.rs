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

//! Workload sets shared by the integration tests.

#![allow(dead_code)]

use predtrans::bench::{generate_dataset, random_acyclic, random_cyclic, DataGenConfig};
use predtrans::query::QuerySpec;
use predtrans::relstore::Catalog;

pub struct Workload {
    pub label: String,
    pub catalog: Catalog,
    pub query: QuerySpec,
}

fn build(label: String, cfg: &DataGenConfig) -> Workload {
    let (catalog, query) = generate_dataset(cfg).expect("workload generates");
    Workload {
        label,
        catalog,
        query,
    }
}

pub fn acyclic(count: u64) -> Vec<Workload> {
    (0..count)
        .map(|s| {
            let cfg = random_acyclic(s);
            build(format!("acyclic seed {s} ({:?})", cfg.shape), &cfg)
        })
        .collect()
}

pub fn cyclic(count: u64) -> Vec<Workload> {
    (0..count)
        .map(|s| {
            let cfg = random_cyclic(s);
            build(format!("cyclic seed {s} ({:?})", cfg.shape), &cfg)
        })
        .collect()
}

pub fn q5mini() -> Workload {
    build("q5mini".into(), &DataGenConfig::q5mini(1.0, 1))
}

/// Three valid left-deep orders over the q5mini tables.
pub const Q5_ORDERS: [[&str; 6]; 3] = [
    ["lineitem", "supplier", "orders", "customer", "nation", "region"],
    ["region", "nation", "customer", "orders", "lineitem", "supplier"],
    ["orders", "customer", "nation", "supplier", "lineitem", "region"],
];

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

//! An in-memory columnar join engine with predicate transfer.
//!
//! Tables are immutable column vectors filtered through sorted selection
//! vectors. Before the join phase a query can be reduced in one of three
//! ways: one-hop Bloom joins, Yannakakis semi-join reduction, or predicate
//! transfer, which pushes filters over a DAG orientation of the join graph
//! in a forward and a backward pass.
//!
//! ```
//! use predtrans::bench::{generate_dataset, DataGenConfig, Shape};
//! use predtrans::joinexec::{execute_query, Strategy};
//! use predtrans::filter::FilterKind;
//!
//! let cfg = DataGenConfig::for_shape(Shape::Chain { tables: 3 }, 7);
//! let (catalog, query) = generate_dataset(&cfg).unwrap();
//! let plain = execute_query(&catalog, &query, &Strategy::none()).unwrap();
//! let pt = execute_query(&catalog, &query, &Strategy::pred_trans(FilterKind::Exact)).unwrap();
//! assert_eq!(plain.result.row_count(), pt.result.row_count());
//! assert!(pt.join_input_rows() <= plain.join_input_rows());
//! ```

pub mod bench;
pub mod cli;
pub mod costmodel;
pub mod error;
pub mod filter;
pub mod hash;
pub mod joinexec;
pub mod planner;
pub mod query;
pub mod relstore;
pub mod semijoin;
pub mod transfer;

pub use error::{Error, Result};

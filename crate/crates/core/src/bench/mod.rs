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

//! Data generation, the correctness oracle, experiments and reports.

pub mod datagen;
pub mod experiment;
pub mod fixtures;
pub mod oracle;
pub mod report;
pub mod workloads;

pub use datagen::{generate_dataset, write_dataset, DataGenConfig, Shape};
pub use experiment::{result_checksum, run_experiment, ExperimentReport, StrategyReport};
pub use oracle::{full_reducer_oracle, full_reducer_oracle_bounded, OracleResult};
pub use report::{emit_report, render_report, ReportFormat};
pub use workloads::{random_acyclic, random_cyclic};

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


//! Runs the listings in `book/src` as doc-tests. mdbook cannot link against
//! workspace crates, so each chapter is included here as a module doc.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/storage.md")]
pub mod storage {}
#[doc = include_str!("../../../book/src/filters.md")]
pub mod filters {}
#[doc = include_str!("../../../book/src/planning.md")]
pub mod planning {}
#[doc = include_str!("../../../book/src/transfer.md")]
pub mod transfer {}
#[doc = include_str!("../../../book/src/semijoin.md")]
pub mod semijoin {}
#[doc = include_str!("../../../book/src/joins.md")]
pub mod joins {}
#[doc = include_str!("../../../book/src/cost-model.md")]
pub mod cost_model {}
#[doc = include_str!("../../../book/src/benchmarking.md")]
pub mod benchmarking {}

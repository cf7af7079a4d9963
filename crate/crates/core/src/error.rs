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
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised anywhere in the engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("schema mismatch in {path} at row {row}: {detail}")]
    SchemaMismatch {
        path: String,
        row: u64,
        detail: String,
    },

    #[error("invalid schema: {0}")]
    InvalidSchema(String),

    #[error("unknown table '{0}'")]
    UnknownTable(String),

    #[error("unknown column '{column}' in table '{table}'")]
    UnknownColumn { table: String, column: String },

    #[error("type mismatch: {0}")]
    TypeMismatch(String),

    #[error("selection belongs to table '{found}', expected '{expected}'")]
    SelectionMismatch { expected: String, found: String },

    #[error("invalid selection: {0}")]
    InvalidSelection(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("empty key stream")]
    EmptyStream,

    #[error("no cardinality for table '{0}'")]
    MissingCardinality(String),

    #[error("transfer graph contains a cycle")]
    CycleDetected,

    #[error("unknown operator kind '{0}'")]
    UnknownOperatorKind(String),

    #[error("annotation references edge {0}, which is not in the graph")]
    DanglingAnnotation(usize),

    #[error("join graph is not connected: {0}")]
    DisconnectedGraph(String),

    #[error("join order is not connected at table '{0}'")]
    DisconnectedJoinOrder(String),

    #[error("unsupported join: {0}")]
    UnsupportedJoin(String),

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("invalid cost parameters: {0}")]
    InvalidParams(String),

    #[error("oracle enumeration exceeded the bound of {bound} rows")]
    OracleTooLarge { bound: usize },

    #[error("malformed json in {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn unknown_column(table: &str, column: &str) -> Self {
        Error::UnknownColumn {
            table: table.to_string(),
            column: column.to_string(),
        }
    }

    /// Process exit code for the CLI: 2 for I/O failures, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 2,
            _ => 1,
        }
    }
}

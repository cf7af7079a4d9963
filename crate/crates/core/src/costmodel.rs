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

//! Analytic cost model.
//!
//! Scans, hash insertions and hash probes cost one unit per tuple; filter
//! insertions and probes cost `beta` per tuple. `c_y` and `c_p` are
//! workload constants bounding the Yannakakis intermediate hashing and the
//! transfer schedule's filter work, as multiples of `n`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transfer::TransferStats;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostParams {
    /// Total input tuples.
    pub n: f64,
    /// Number of tables.
    pub t: f64,
    /// Output tuples.
    pub out: f64,
    pub beta: f64,
    pub epsilon: f64,
    pub c_y: f64,
    pub c_p: f64,
}

impl CostParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("n", self.n),
            ("t", self.t),
            ("out", self.out),
            ("beta", self.beta),
            ("epsilon", self.epsilon),
            ("c_y", self.c_y),
            ("c_p", self.c_p),
        ];
        for (name, v) in fields {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParams(format!("{name} = {v} must be finite and >= 0")));
            }
        }
        if self.epsilon >= 1.0 {
            return Err(Error::InvalidParams(format!("epsilon = {} must be < 1", self.epsilon)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YannakakisCost {
    pub semijoin_phase: f64,
    pub join_phase: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredTransferCost {
    pub transfer_phase: f64,
    pub join_phase: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Inflation {
    pub exact: f64,
    pub linearized: f64,
    /// `(exact - linearized) / exact`.
    pub relative_gap: f64,
}

pub fn predict_yannakakis(p: &CostParams) -> Result<YannakakisCost> {
    p.validate()?;
    Ok(YannakakisCost {
        semijoin_phase: p.n + p.c_y * p.n,
        join_phase: p.t * p.out,
    })
}

pub fn predict_pred_transfer(p: &CostParams) -> Result<PredTransferCost> {
    p.validate()?;
    Ok(PredTransferCost {
        transfer_phase: p.n + p.beta * p.c_p * p.n,
        join_phase: p.t * p.out * (1.0 + p.epsilon),
    })
}

/// False positives compound across `t` joins: `(1+ε)^t` against its
/// first-order form `1+εt`.
pub fn inflation_approx(epsilon: f64, t: u32) -> Inflation {
    let exact = (1.0 + epsilon).powi(t as i32);
    let linearized = 1.0 + epsilon * t as f64;
    Inflation {
        exact,
        linearized,
        relative_gap: (exact - linearized) / exact,
    }
}

/// Constants recovered from measured counters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FittedConstants {
    /// Hash operations per input tuple.
    pub c_y: Option<f64>,
    /// Filter operations per input tuple.
    pub c_p: Option<f64>,
}

/// `c_y = hash ops / n` from a semi-join phase and `c_p = filter ops / n`
/// from a transfer phase.
pub fn fit_constants(
    n: u64,
    semijoin: Option<&TransferStats>,
    transfer: Option<&TransferStats>,
) -> FittedConstants {
    let per = |ops: u64| (n > 0).then(|| ops as f64 / n as f64);
    FittedConstants {
        c_y: semijoin.and_then(|s| per(s.hash_ops())),
        c_p: transfer.and_then(|s| per(s.filter_ops())),
    }
}

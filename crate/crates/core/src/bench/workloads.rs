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

//! Seeded random workload configurations.
//!
//! Acyclic workloads are shaped so that the small-to-large orientation is
//! an in-tree: a chain's row counts rise strictly toward one fact table,
//! and a star's center is strictly the largest table. Under that shape two
//! transfer passes with exact filters reduce every table fully.
//!
//! Each key domain is close to the row count of the edge's smaller
//! endpoint, much like a foreign key into that table. With unimodal row
//! counts the expected join size stays near the largest table, so results
//! are non-trivial yet small enough to enumerate.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::datagen::{DataGenConfig, Shape};

pub const MAX_ROWS: usize = 5000;
const MIN_ROWS: usize = 50;

fn distinct_counts(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (MIN_ROWS..=MAX_ROWS).collect();
    let (picked, _) = pool.partial_shuffle(rng, n);
    let mut v = picked.to_vec();
    v.sort_unstable();
    v
}

/// Places the ascending `counts` so they rise to a peak at `peak` and fall
/// after it; `counts[0]` goes first when `valley_first` is set.
fn unimodal(rng: &mut ChaCha8Rng, counts: &[usize], peak: usize, valley_first: bool) -> Vec<usize> {
    let t = counts.len();
    let skip = usize::from(valley_first);
    let mut rest: Vec<usize> = counts[skip..t - 1].to_vec();
    rest.shuffle(rng);
    let (left, right) = rest.split_at(peak - skip);
    let mut left = left.to_vec();
    let mut right = right.to_vec();
    left.sort_unstable();
    right.sort_unstable_by(|a, b| b.cmp(a));
    let mut rows = Vec::with_capacity(t);
    rows.extend(counts[..skip].iter().copied());
    rows.extend(left);
    rows.push(counts[t - 1]);
    rows.extend(right);
    rows
}

fn selectivities(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| {
            if rng.gen_bool(0.5) {
                (rng.gen_range(0.2..0.9f64) * 100.0).round() / 100.0
            } else {
                1.0
            }
        })
        .collect()
}

fn domains(rng: &mut ChaCha8Rng, rows: &[usize], edges: &[(usize, usize)]) -> Vec<u64> {
    edges
        .iter()
        .map(|&(a, b)| {
            let m = rows[a].min(rows[b]) as f64;
            rng.gen_range((0.8 * m)..=(1.6 * m)).round().max(1.0) as u64
        })
        .collect()
}

/// A chain or star with 3 to 8 tables and at most 5000 rows per table.
pub fn random_acyclic(seed: u64) -> DataGenConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = rng.gen_range(3..=8);
    let counts = distinct_counts(&mut rng, t);
    let (shape, rows, edges): (Shape, Vec<usize>, Vec<(usize, usize)>) = if rng.gen_bool(0.5) {
        let peak = rng.gen_range(0..t);
        let rows = unimodal(&mut rng, &counts, peak, false);
        (Shape::Chain { tables: t }, rows, (1..t).map(|i| (i - 1, i)).collect())
    } else {
        let mut rows = vec![counts[t - 1]];
        let mut leaves = counts[..t - 1].to_vec();
        leaves.shuffle(&mut rng);
        rows.extend(leaves);
        (Shape::Star { tables: t }, rows, (1..t).map(|i| (0, i)).collect())
    };
    let key_domains = domains(&mut rng, &rows, &edges);
    DataGenConfig {
        shape,
        selectivities: selectivities(&mut rng, t),
        rows,
        key_domains,
        seed,
    }
}

/// A simple cycle with 3 to 8 tables. Row counts rise from the smallest
/// table `t0` to a random peak and fall back toward `t0`, which also closes
/// the cycle.
pub fn random_cyclic(seed: u64) -> DataGenConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc1c1_e000);
    let t = rng.gen_range(3..=8);
    let counts = distinct_counts(&mut rng, t);
    let peak = rng.gen_range(1..t);
    let rows = unimodal(&mut rng, &counts, peak, true);
    let edges: Vec<_> = (1..t).map(|i| (i - 1, i)).chain([(t - 1, 0)]).collect();
    let key_domains = domains(&mut rng, &rows, &edges);
    DataGenConfig {
        shape: Shape::Cycle { tables: t },
        selectivities: selectivities(&mut rng, t),
        rows,
        key_domains,
        seed,
    }
}

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

//! Membership filters moved along transfer edges.
//!
//! Two representations share one interface: a Bloom filter sized for a
//! target false-positive rate, and an exact key set. Neither has false
//! negatives. A filter is written through a [`FilterBuilder`] and becomes
//! probe-only once sealed into a [`TransferFilter`].
//!
//! Bloom sizing for `n` expected keys and target rate `epsilon`:
//!
//! ```text
//! m = ceil(-n * ln(epsilon) / ln(2)^2)
//! k = max(1, round(m / n * ln(2)))
//! ```
//!
//! with `m = 8, k = 1` when `n = 0`. Bit positions use double hashing:
//! `h1 = hash_i64(key, seed)`, `h2 = hash_i64(key, seed ^ SECOND_HASH_SEED_OFFSET) | 1`,
//! and probe `i` tests bit `(h1 + i * h2) mod 2^64 mod m`.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hash::{hash_i64, SECOND_HASH_SEED_OFFSET};

/// Seed used when the caller does not pick one.
pub const DEFAULT_SEED: u64 = 0x5eed_c0ff_ee00_0001;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FilterKind {
    Bloom { epsilon: f64 },
    Exact,
}

impl FilterKind {
    pub fn bloom(epsilon: f64) -> Result<Self> {
        let k = FilterKind::Bloom { epsilon };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            FilterKind::Bloom { epsilon } if !(epsilon > 0.0 && epsilon < 1.0) => Err(
                Error::InvalidConfig(format!("bloom epsilon must lie in (0, 1), got {epsilon}")),
            ),
            _ => Ok(()),
        }
    }

    pub fn label(&self) -> String {
        match self {
            FilterKind::Bloom { epsilon } => format!("bloom(eps={epsilon})"),
            FilterKind::Exact => "exact".to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BloomParams {
    /// Number of bits, `m`.
    pub bits: u64,
    /// Number of hash probes, `k`.
    pub hashes: u32,
}

pub fn bloom_sizing(expected_keys: usize, epsilon: f64) -> Result<BloomParams> {
    FilterKind::Bloom { epsilon }.validate()?;
    if expected_keys == 0 {
        return Ok(BloomParams { bits: 8, hashes: 1 });
    }
    let n = expected_keys as f64;
    let ln2 = std::f64::consts::LN_2;
    let bits = (-n * epsilon.ln() / (ln2 * ln2)).ceil().max(1.0) as u64;
    let hashes = ((bits as f64 / n) * ln2).round().max(1.0) as u32;
    Ok(BloomParams { bits, hashes })
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Bloom {
    words: Vec<u64>,
    bits: u64,
    hashes: u32,
    seed: u64,
}

impl Bloom {
    fn new(params: BloomParams, seed: u64) -> Self {
        Bloom {
            words: vec![0; params.bits.div_ceil(64) as usize],
            bits: params.bits,
            hashes: params.hashes,
            seed,
        }
    }

    #[inline]
    fn positions(&self, key: i64) -> impl Iterator<Item = u64> + '_ {
        let h1 = hash_i64(key, self.seed);
        let h2 = hash_i64(key, self.seed ^ SECOND_HASH_SEED_OFFSET) | 1;
        (0..u64::from(self.hashes)).map(move |i| h1.wrapping_add(i.wrapping_mul(h2)) % self.bits)
    }

    fn insert(&mut self, key: i64) {
        let h1 = hash_i64(key, self.seed);
        let h2 = hash_i64(key, self.seed ^ SECOND_HASH_SEED_OFFSET) | 1;
        for i in 0..u64::from(self.hashes) {
            let pos = h1.wrapping_add(i.wrapping_mul(h2)) % self.bits;
            self.words[(pos / 64) as usize] |= 1 << (pos % 64);
        }
    }

    #[inline]
    fn contains(&self, key: i64) -> bool {
        self.positions(key)
            .all(|pos| self.words[(pos / 64) as usize] & (1 << (pos % 64)) != 0)
    }

    fn ones(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Repr {
    Bloom(Bloom),
    Exact(HashSet<i64>),
}

/// Write side of a filter.
#[derive(Debug, Clone)]
pub struct FilterBuilder {
    kind: FilterKind,
    repr: Repr,
    inserted: usize,
}

impl FilterBuilder {
    /// `expected_keys` sizes a Bloom filter; it may over-estimate.
    pub fn new(kind: FilterKind, expected_keys: usize, seed: u64) -> Result<Self> {
        let repr = match kind {
            FilterKind::Bloom { epsilon } => {
                Repr::Bloom(Bloom::new(bloom_sizing(expected_keys, epsilon)?, seed))
            }
            FilterKind::Exact => Repr::Exact(HashSet::with_capacity(expected_keys)),
        };
        Ok(FilterBuilder {
            kind,
            repr,
            inserted: 0,
        })
    }

    #[inline]
    pub fn insert(&mut self, key: i64) {
        self.inserted += 1;
        match &mut self.repr {
            Repr::Bloom(b) => b.insert(key),
            Repr::Exact(s) => {
                s.insert(key);
            }
        }
    }

    pub fn seal(self) -> TransferFilter {
        TransferFilter {
            kind: self.kind,
            repr: self.repr,
            inserted: self.inserted,
        }
    }
}

/// A sealed, probe-only membership filter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferFilter {
    kind: FilterKind,
    repr: Repr,
    inserted: usize,
}

// FilterKind holds an f64 but never NaN once validated.
impl Eq for FilterKind {}

impl TransferFilter {
    pub fn kind(&self) -> FilterKind {
        self.kind
    }

    /// Number of insert calls, duplicates included.
    pub fn inserted_count(&self) -> usize {
        self.inserted
    }

    pub fn bloom_params(&self) -> Option<BloomParams> {
        match &self.repr {
            Repr::Bloom(b) => Some(BloomParams {
                bits: b.bits,
                hashes: b.hashes,
            }),
            Repr::Exact(_) => None,
        }
    }

    #[inline]
    pub fn probe(&self, key: i64) -> bool {
        match &self.repr {
            Repr::Bloom(b) => b.contains(key),
            Repr::Exact(s) => s.contains(&key),
        }
    }

    /// Fraction of set bits. `None` for exact filters.
    pub fn fill_ratio(&self) -> Option<f64> {
        match &self.repr {
            Repr::Bloom(b) => Some(b.ones() as f64 / b.bits as f64),
            Repr::Exact(_) => None,
        }
    }

    /// Debug dump used to compare filters across implementations.
    ///
    /// Bloom: `bloom m=<bits> k=<hashes> seed=<hex> n=<inserted> bits=<hex>` where
    /// the bit array is written as little-endian 64-bit words, lowest word
    /// first, each as 16 hex digits. Exact: `exact n=<inserted> keys=<k1,k2,...>`
    /// with keys sorted ascending.
    pub fn hex_dump(&self) -> String {
        match &self.repr {
            Repr::Bloom(b) => {
                let mut s = format!(
                    "bloom m={} k={} seed={:016x} n={} bits=",
                    b.bits, b.hashes, b.seed, self.inserted
                );
                for w in &b.words {
                    write!(s, "{w:016x}").unwrap();
                }
                s
            }
            Repr::Exact(set) => {
                let mut keys: Vec<_> = set.iter().copied().collect();
                keys.sort_unstable();
                let keys: Vec<String> = keys.iter().map(i64::to_string).collect();
                format!("exact n={} keys={}", self.inserted, keys.join(","))
            }
        }
    }
}

/// Builds a filter over all `keys`; the key count sizes Bloom filters.
pub fn build_filter<I>(keys: I, kind: FilterKind, seed: u64) -> Result<TransferFilter>
where
    I: IntoIterator<Item = i64>,
{
    let keys: Vec<i64> = keys.into_iter().collect();
    let mut b = FilterBuilder::new(kind, keys.len(), seed)?;
    for k in keys {
        b.insert(k);
    }
    Ok(b.seal())
}

/// Fraction of `absent_keys` that the filter reports as present. The keys
/// must be disjoint from the inserted set.
pub fn measured_fpr<I>(filter: &TransferFilter, absent_keys: I) -> Result<f64>
where
    I: IntoIterator<Item = i64>,
{
    let (mut total, mut positive) = (0u64, 0u64);
    for k in absent_keys {
        total += 1;
        positive += u64::from(filter.probe(k));
    }
    if total == 0 {
        return Err(Error::EmptyStream);
    }
    Ok(positive as f64 / total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // Independent evaluation of the sizing formulas for n=1000, eps=0.01:
    // -1000 * ln(0.01) = 4605.170..., ln(2)^2 = 0.480453..., ratio 9585.06 -> 9586.
    // 9586 / 1000 * ln 2 = 6.6445 -> 7.
    #[test]
    fn sizing_worked_example() {
        assert_eq!(
            bloom_sizing(1000, 0.01).unwrap(),
            BloomParams {
                bits: 9586,
                hashes: 7
            }
        );
    }

    #[test]
    fn sizing_degenerate_and_invalid() {
        assert_eq!(
            bloom_sizing(0, 0.5).unwrap(),
            BloomParams { bits: 8, hashes: 1 }
        );
        for eps in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(matches!(bloom_sizing(10, eps), Err(Error::InvalidConfig(_))));
        }
        assert!(FilterKind::bloom(0.0).is_err());
    }

    #[test]
    fn exact_set_semantics() {
        let f = build_filter(vec![1, 3], FilterKind::Exact, 0).unwrap();
        assert!(f.probe(1));
        assert!(f.probe(3));
        assert!(!f.probe(2));
        let f = build_filter(vec![7], FilterKind::Exact, 0).unwrap();
        assert!(!f.probe(8));
    }

    #[test]
    fn empty_filters_reject_everything() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let exact = build_filter(Vec::new(), FilterKind::Exact, 0).unwrap();
        let bloom = build_filter(Vec::new(), FilterKind::Bloom { epsilon: 0.01 }, 0).unwrap();
        assert_eq!(bloom.bloom_params().unwrap().bits, 8);
        assert_eq!(bloom.fill_ratio(), Some(0.0));
        for _ in 0..10_000 {
            let k: i64 = rng.gen();
            assert!(!exact.probe(k));
            assert!(!bloom.probe(k));
        }
        assert_eq!(measured_fpr(&bloom, 0..100).unwrap(), 0.0);
    }

    #[test]
    fn fpr_within_band() {
        let f = build_filter(0..10_000i64, FilterKind::Bloom { epsilon: 0.01 }, DEFAULT_SEED)
            .unwrap();
        let fpr = measured_fpr(&f, 1_000_000..1_100_000i64).unwrap();
        assert!((0.005..=0.02).contains(&fpr), "fpr {fpr}");
        let exact = build_filter(0..10_000i64, FilterKind::Exact, 0).unwrap();
        assert_eq!(measured_fpr(&exact, 1_000_000..1_100_000i64).unwrap(), 0.0);
    }

    #[test]
    fn empty_absent_stream() {
        let f = build_filter(vec![1], FilterKind::Exact, 0).unwrap();
        assert!(matches!(
            measured_fpr(&f, std::iter::empty()),
            Err(Error::EmptyStream)
        ));
    }

    #[test]
    fn hex_dump_shape() {
        let f = build_filter(vec![5, -1, 5], FilterKind::Exact, 0).unwrap();
        assert_eq!(f.hex_dump(), "exact n=3 keys=-1,5");
        let b = build_filter(vec![1, 2], FilterKind::Bloom { epsilon: 0.1 }, 3).unwrap();
        let dump = b.hex_dump();
        assert!(dump.starts_with("bloom m=10 k=3 seed=0000000000000003 n=2 bits="));
        assert_eq!(dump.len(), dump.find("bits=").unwrap() + 5 + 16);
    }

    #[test]
    fn sizing_strictly_monotone_in_epsilon() {
        for n in [1usize, 10, 1000] {
            let mut prev = 0;
            for eps in [0.5, 0.2, 0.1, 0.05, 0.01, 0.001, 1e-6] {
                let m = bloom_sizing(n, eps).unwrap().bits;
                assert!(m > prev, "n={n} eps={eps}");
                prev = m;
            }
        }
    }

    proptest! {
        #[test]
        fn no_false_negatives(keys in prop::collection::vec(any::<i64>(), 0..300),
                              eps in 0.001f64..0.9, seed in any::<u64>()) {
            for kind in [FilterKind::Bloom { epsilon: eps }, FilterKind::Exact] {
                let f = build_filter(keys.iter().copied(), kind, seed).unwrap();
                for &k in &keys {
                    prop_assert!(f.probe(k));
                }
            }
        }

        #[test]
        fn utf8_keys_have_no_false_negatives(keys in prop::collection::vec(".{0,12}", 0..100)) {
            let hashed: Vec<i64> = keys.iter().map(|s| crate::hash::utf8_key(s)).collect();
            let f = build_filter(hashed.iter().copied(), FilterKind::Bloom { epsilon: 0.01 }, 9).unwrap();
            for s in &keys {
                prop_assert!(f.probe(crate::hash::utf8_key(s)));
            }
        }

        #[test]
        fn deterministic_build(keys in prop::collection::vec(any::<i64>(), 0..200), seed in any::<u64>()) {
            let kind = FilterKind::Bloom { epsilon: 0.05 };
            let a = build_filter(keys.iter().copied(), kind, seed).unwrap();
            let b = build_filter(keys.iter().copied(), kind, seed).unwrap();
            prop_assert_eq!(a.hex_dump(), b.hex_dump());
            prop_assert_eq!(a, b);
        }
    }
}

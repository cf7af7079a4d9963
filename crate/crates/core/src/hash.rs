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
//! Seeded 64-bit hashing shared by filters, utf8 key reduction and result
//! checksums.
//!
//! The scheme is fixed so that other implementations can reproduce filters
//! bit for bit:
//!
//! 1. FNV-1a over the input bytes, starting from `FNV_OFFSET_BASIS ^ seed`.
//! 2. The murmur3 `fmix64` finalizer applied to the FNV state.
//!
//! An `i64` key is hashed as its 8 little-endian bytes. A utf8 key is first
//! reduced to `hash_bytes(utf8, UTF8_KEY_SEED) as i64` and then treated like
//! any other `i64` key.

pub const FNV_OFFSET_BASIS: u64 = 0xcbf2_9ce4_8422_2325;
pub const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// XOR-ed into a filter seed to obtain the seed of the second hash function.
pub const SECOND_HASH_SEED_OFFSET: u64 = 0x9e37_79b9_7f4a_7c15;

/// Seed used to reduce utf8 values to 64-bit keys.
pub const UTF8_KEY_SEED: u64 = 0x5bd1_e995_5bd1_e995;

/// Seed used for row hashes inside result checksums.
pub const CHECKSUM_SEED: u64 = 0;

#[inline]
pub fn fmix64(mut h: u64) -> u64 {
    h ^= h >> 33;
    h = h.wrapping_mul(0xff51_afd7_ed55_8ccd);
    h ^= h >> 33;
    h = h.wrapping_mul(0xc4ce_b9fe_1a85_ec53);
    h ^= h >> 33;
    h
}

#[inline]
pub fn hash_bytes(bytes: &[u8], seed: u64) -> u64 {
    let mut h = FNV_OFFSET_BASIS ^ seed;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    fmix64(h)
}

#[inline]
pub fn hash_i64(key: i64, seed: u64) -> u64 {
    hash_bytes(&key.to_le_bytes(), seed)
}

/// Reduces a utf8 join key to the 64-bit key space used by filters.
#[inline]
pub fn utf8_key(value: &str) -> i64 {
    hash_bytes(value.as_bytes(), UTF8_KEY_SEED) as i64
}

/// Derives an independent seed for a sub-component (a pass, an edge, a step).
pub fn derive_seed(base: u64, tag: u64) -> u64 {
    fmix64(base ^ fmix64(tag.wrapping_add(SECOND_HASH_SEED_OFFSET)))
}

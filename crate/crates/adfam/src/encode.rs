//! Fixed encodings between composite objects and the naturals.
//!
//! Two encodings live here and are used everywhere a grid or a level
//! structure has to share the plain-naturals universe with set families:
//!
//! * a pairing bijection between pairs of naturals and naturals, walking
//!   the diagonals `n + j = 0, 1, 2, ...` and ordering each diagonal by
//!   the first coordinate, so `(0,0) -> 0`, `(0,1) -> 1`, `(1,0) -> 2`;
//! * a code for "k distinct bit strings of a common length", ordered by
//!   length and then lexicographically on the sorted tuple, with levels
//!   that hold fewer than k strings skipped.

use crate::error::Error;
use crate::Result;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// Pair encoding: diagonal `s = n + j`, position within the diagonal `n`.
pub fn encode_pair(n: u64, j: u64) -> u64 {
    let s = n + j;
    s * (s + 1) / 2 + n
}

/// Inverse of [`encode_pair`].
pub fn decode_pair(m: u64) -> (u64, u64) {
    // largest s with s(s+1)/2 <= m
    let mut s = (((8.0 * m as f64 + 1.0).sqrt() - 1.0) / 2.0) as u64;
    while s * (s + 1) / 2 > m {
        s -= 1;
    }
    while (s + 1) * (s + 2) / 2 <= m {
        s += 1;
    }
    let n = m - s * (s + 1) / 2;
    (n, s - n)
}

/// Binomial coefficient, saturating at `u64::MAX` (desk scales stay far below).
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// A binary string of fixed length, at most 63 bits.
///
/// Bits are read most significant first, so for equal lengths the numeric
/// order of `bits` is the lexicographic order of the strings.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BitStr {
    pub len: u32,
    pub bits: u64,
}

impl BitStr {
    pub fn new(len: u32, bits: u64) -> Self {
        assert!(len < 64, "bit strings are capped at 63 bits");
        BitStr {
            len,
            bits: bits & mask(len),
        }
    }

    /// Parse from a `0`/`1` text form, e.g. `"0110"`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut bits = 0u64;
        let mut len = 0u32;
        for c in text.chars() {
            let b = match c {
                '0' => 0,
                '1' => 1,
                _ => {
                    return Err(Error::invalid(
                        "bit string",
                        format!("unexpected character {c:?}"),
                    ))
                }
            };
            bits = (bits << 1) | b;
            len += 1;
            if len >= 64 {
                return Err(Error::invalid("bit string", "longer than 63 bits"));
            }
        }
        Ok(BitStr { len, bits })
    }

    /// The first `n` characters.
    pub fn prefix(&self, n: u32) -> BitStr {
        assert!(n <= self.len);
        BitStr {
            len: n,
            bits: self.bits >> (self.len - n),
        }
    }

    /// Length of the longest common prefix with `other`.
    pub fn split_level(&self, other: &BitStr) -> u32 {
        let common = self.len.min(other.len);
        for n in (0..=common).rev() {
            if self.prefix(n) == other.prefix(n) {
                return n;
            }
        }
        0
    }
}

impl fmt::Debug for BitStr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in (0..self.len).rev() {
            write!(f, "{}", (self.bits >> i) & 1)?;
        }
        if self.len == 0 {
            write!(f, "<empty>")?;
        }
        Ok(())
    }
}

fn mask(len: u32) -> u64 {
    if len == 0 {
        0
    } else {
        (!0u64) >> (64 - len)
    }
}

/// Rank of a strictly increasing tuple among all k-subsets of `{0..n-1}`,
/// in lexicographic order on sorted tuples.
fn subset_rank(n: u64, tuple: &[u64]) -> u64 {
    let k = tuple.len() as u64;
    let mut rank = 0u64;
    let mut prev: i128 = -1;
    for (i, &c) in tuple.iter().enumerate() {
        let remaining = k - i as u64 - 1;
        let mut x = (prev + 1) as u64;
        while x < c {
            rank += binomial(n - 1 - x, remaining);
            x += 1;
        }
        prev = c as i128;
    }
    rank
}

/// Inverse of [`subset_rank`].
fn subset_unrank(n: u64, k: u64, mut rank: u64) -> Vec<u64> {
    let mut tuple = Vec::with_capacity(k as usize);
    let mut x = 0u64;
    for i in 0..k {
        let remaining = k - i - 1;
        loop {
            let block = binomial(n - 1 - x, remaining);
            if rank < block {
                tuple.push(x);
                x += 1;
                break;
            }
            rank -= block;
            x += 1;
        }
    }
    tuple
}

/// Levels below `level` that can hold a k-set contribute their subset counts.
fn level_offset(k: u64, level: u32) -> u64 {
    let mut off = 0u64;
    for j in 0..level {
        let strings = 1u64 << j;
        if strings >= k {
            off += binomial(strings, k);
        }
    }
    off
}

/// Encode a set of `k` distinct bit strings of a common length as a natural.
///
/// Codes are ordered by level first, then lexicographically on the sorted
/// tuple of string values. Rejects duplicates, mixed lengths, and levels
/// too small to hold `k` distinct strings.
pub fn sk_encode(k: u64, level: u32, strings: &[BitStr]) -> Result<u64> {
    if strings.len() as u64 != k {
        return Err(Error::invalid(
            "level set",
            format!("expected {k} strings, got {}", strings.len()),
        ));
    }
    let capacity = 1u64 << level;
    if capacity < k {
        return Err(Error::LevelTooSmall {
            level,
            available: capacity,
            wanted: k,
        });
    }
    let mut values = Vec::with_capacity(strings.len());
    for s in strings {
        if s.len != level {
            return Err(Error::MixedStringLengths {
                expected: level,
                got: s.len,
            });
        }
        values.push(s.bits);
    }
    values.sort_unstable();
    if values.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::DuplicateString);
    }
    Ok(level_offset(k, level) + subset_rank(capacity, &values))
}

/// Decode a code produced by [`sk_encode`] back into its level and strings.
pub fn sk_decode(k: u64, code: u64) -> (u32, BTreeSet<BitStr>) {
    let mut level = 0u32;
    let mut rest = code;
    loop {
        let strings = 1u64 << level;
        if strings >= k {
            let count = binomial(strings, k);
            if rest < count {
                break;
            }
            rest -= count;
        }
        level += 1;
    }
    let tuple = subset_unrank(1u64 << level, k, rest);
    (
        level,
        tuple.into_iter().map(|v| BitStr::new(level, v)).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairing_base_cases() {
        assert_eq!(encode_pair(0, 0), 0);
        assert_eq!(encode_pair(0, 1), 1);
        assert_eq!(encode_pair(1, 0), 2);
    }

    #[test]
    fn pairing_matches_diagonal_enumeration() {
        // Independent oracle: walk the diagonals in order and record ranks.
        let mut expected = std::collections::BTreeMap::new();
        let mut next = 0u64;
        for s in 0..40u64 {
            for n in 0..=s {
                expected.insert((n, s - n), next);
                next += 1;
            }
        }
        for (&(n, j), &code) in &expected {
            assert_eq!(encode_pair(n, j), code, "encode({n},{j})");
            assert_eq!(decode_pair(code), (n, j), "decode({code})");
        }
    }

    #[test]
    fn pairing_round_trip() {
        assert_eq!(decode_pair(encode_pair(7, 5)), (7, 5));
        for m in 0..5000u64 {
            let (n, j) = decode_pair(m);
            assert_eq!(encode_pair(n, j), m);
        }
    }

    #[test]
    fn bitstr_prefix_and_split() {
        let f = BitStr::parse("0011").unwrap();
        let g = BitStr::parse("0010").unwrap();
        assert_eq!(f.split_level(&g), 3);
        assert_eq!(f.prefix(2), BitStr::parse("00").unwrap());
        assert_eq!(format!("{:?}", f.prefix(3)), "001");
    }

    #[test]
    fn sk_first_code_is_zero() {
        // k = 2, level 1, {0, 1}: least element under the documented order.
        let strings = [BitStr::parse("0").unwrap(), BitStr::parse("1").unwrap()];
        assert_eq!(sk_encode(2, 1, &strings).unwrap(), 0);
    }

    #[test]
    fn sk_level_two_pairs() {
        // Oracle: enumerate level-2 pairs lexicographically.
        let all: Vec<BitStr> = (0..4).map(|v| BitStr::new(2, v)).collect();
        let mut codes = Vec::new();
        for a in 0..4 {
            for b in (a + 1)..4 {
                codes.push(sk_encode(2, 2, &[all[a], all[b]]).unwrap());
            }
        }
        assert_eq!(codes, vec![1, 2, 3, 4, 5, 6]);
        let first = [BitStr::parse("00").unwrap(), BitStr::parse("01").unwrap()];
        assert_eq!(sk_encode(2, 2, &first).unwrap(), 1);
    }

    #[test]
    fn sk_rejects_bad_level_sets() {
        let dup = [BitStr::parse("01").unwrap(), BitStr::parse("01").unwrap()];
        assert!(matches!(sk_encode(2, 2, &dup), Err(Error::DuplicateString)));
        let mixed = [BitStr::parse("0").unwrap(), BitStr::parse("01").unwrap()];
        assert!(matches!(
            sk_encode(2, 1, &mixed),
            Err(Error::MixedStringLengths { .. })
        ));
        let crowded = [
            BitStr::parse("0").unwrap(),
            BitStr::parse("1").unwrap(),
            BitStr::parse("0").unwrap(),
        ];
        assert!(matches!(
            sk_encode(3, 1, &crowded),
            Err(Error::LevelTooSmall { .. })
        ));
    }

    #[test]
    fn sk_round_trip() {
        for k in 2..=3u64 {
            for code in 0..500u64 {
                let (level, strings) = sk_decode(k, code);
                let tuple: Vec<BitStr> = strings.into_iter().collect();
                assert_eq!(sk_encode(k, level, &tuple).unwrap(), code);
            }
        }
    }

    #[test]
    fn binomial_small_table() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(10, 0), 1);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(4096, 2), 4096 * 4095 / 2);
    }
}

//! Members of the k-linked level-set family: for a source bit string, the
//! set of all level-n k-subsets of strings that contain its length-n prefix.

use crate::encode::{sk_encode, BitStr};
use crate::error::Error;
use crate::Result;
use std::collections::BTreeSet;

/// The depth-`d` truncation of the member attached to source string `f`:
/// every k-set of level-n strings containing `f`'s prefix, for `n <= d`,
/// encoded on the code universe. Levels that cannot hold k distinct
/// strings are skipped.
pub fn hajnal_member(k: u64, f: &BitStr, depth: u32) -> Result<BTreeSet<u64>> {
    if f.len < depth {
        return Err(Error::StringTooShort { len: f.len, depth });
    }
    if k == 0 {
        return Err(Error::invalid("level-set member", "k must be positive"));
    }
    let mut out = BTreeSet::new();
    for n in 0..=depth {
        let capacity = 1u64 << n;
        if capacity < k {
            continue;
        }
        let prefix = f.prefix(n);
        // choose the k-1 companions among the other level-n strings
        let others = capacity - 1;
        let mut companion_idx: Vec<u64> = (0..k - 1).collect();
        loop {
            let mut strings: Vec<BitStr> = vec![prefix];
            for &idx in &companion_idx {
                let value = if idx < prefix.bits { idx } else { idx + 1 };
                strings.push(BitStr::new(n, value));
            }
            out.insert(sk_encode(k, n, &strings)?);
            // next combination of companions
            if k == 1 {
                break;
            }
            let width = (k - 1) as usize;
            let mut i = width;
            while i > 0 && companion_idx[i - 1] == i as u64 - 1 + others - width as u64 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            companion_idx[i - 1] += 1;
            for j in i..width {
                companion_idx[j] = companion_idx[j - 1] + 1;
            }
        }
    }
    Ok(out)
}

/// Count of level-`n` codes in a member: the k-sets at one level containing
/// a fixed string.
pub fn level_contribution(k: u64, level: u32) -> u64 {
    let capacity = 1u64 << level;
    if capacity < k {
        0
    } else {
        crate::encode::binomial(capacity - 1, k - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encode::sk_decode;

    /// Independent membership oracle: decode every code up to a cap and
    /// keep those whose string set contains the prefix of `f`.
    fn oracle_member(k: u64, f: &BitStr, depth: u32, code_cap: u64) -> BTreeSet<u64> {
        let mut out = BTreeSet::new();
        for code in 0..code_cap {
            let (level, strings) = sk_decode(k, code);
            if level <= depth && strings.contains(&f.prefix(level)) {
                out.insert(code);
            }
        }
        out
    }

    #[test]
    fn depth_two_member_matches_the_oracle() {
        let f = BitStr::parse("00").unwrap();
        let member = hajnal_member(2, &f, 2).unwrap();
        assert_eq!(member.len(), 4);
        assert_eq!(member, oracle_member(2, &f, 2, 100));
        // level 1 contributes {0,1}; level 2 the three pairs containing 00
        assert_eq!(member, BTreeSet::from([0, 1, 2, 3]));
    }

    #[test]
    fn level_contributions_count_fixed_string_supersets() {
        assert_eq!(level_contribution(2, 1), 1);
        assert_eq!(level_contribution(2, 3), 7);
        for n in 1..=6 {
            assert_eq!(level_contribution(2, n), (1u64 << n) - 1);
        }
        assert_eq!(level_contribution(3, 1), 0);
        assert_eq!(level_contribution(3, 2), 3);
    }

    #[test]
    fn member_size_is_the_sum_of_level_contributions() {
        let f = BitStr::parse("0110101").unwrap();
        for k in 1..=3u64 {
            let member = hajnal_member(k, &f, 7).unwrap();
            let expect: u64 = (0..=7).map(|n| level_contribution(k, n)).sum();
            assert_eq!(member.len() as u64, expect, "k = {k}");
        }
    }

    #[test]
    fn opposite_strings_meet_once_per_level() {
        // f = all zeros, g = all ones: the meet is exactly the pair codes
        // {f|n, g|n} for n = 1..=d, one per level
        let d = 9;
        let f = BitStr::new(d, 0);
        let g = BitStr::new(d, (1 << d) - 1);
        let ef = hajnal_member(2, &f, d).unwrap();
        let eg = hajnal_member(2, &g, d).unwrap();
        let meet: BTreeSet<u64> = ef.intersection(&eg).copied().collect();
        assert_eq!(meet.len() as u64, d as u64);
        for code in &meet {
            let (level, strings) = sk_decode(2, *code);
            assert!(level >= 1);
            assert!(strings.contains(&f.prefix(level)));
            assert!(strings.contains(&g.prefix(level)));
        }
    }

    #[test]
    fn short_strings_are_rejected() {
        let f = BitStr::parse("01").unwrap();
        assert!(matches!(
            hajnal_member(2, &f, 5),
            Err(Error::StringTooShort { len: 2, depth: 5 })
        ));
    }
}

//! The Luzin builder over k-linked domains: functions whose domains are
//! the depth-truncated level-set members of their source strings, agreeing
//! with every earlier member at freshly designated domain points.

use crate::constructions::hajnal::hajnal_member;
use crate::encode::{binomial, BitStr};
use crate::error::Error;
use crate::family::{FamilySnapshot, Member, MemberKind};
use crate::partial_fn::PartialFn;
use crate::Result;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Clone, Debug)]
pub struct LinkedLuzinConfig {
    pub depth: u32,
    pub value_horizon: u64,
    /// Designated agreement points per (member, earlier member) pair.
    pub pair_meet: u64,
    /// Seed for the optional shuffled enumeration of earlier members;
    /// increasing order when absent.
    pub shuffle_seed: Option<u64>,
}

/// One designated agreement: at `point`, the new member copies the earlier
/// member's value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Designation {
    pub alpha: u64,
    pub earlier: u64,
    pub point: u64,
    pub value: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LinkedLuzinLog {
    pub depth: u32,
    pub pair_meet: u64,
    pub strings: Vec<BitStr>,
    pub designations: Vec<Designation>,
}

/// Total number of codes at levels up to `depth`: a canonical universe
/// horizon for depth-truncated members.
pub fn code_horizon(k: u64, depth: u32) -> u64 {
    (0..=depth)
        .map(|n| {
            let strings = 1u64 << n;
            if strings >= k {
                binomial(strings, k)
            } else {
                0
            }
        })
        .sum()
}

/// Build the family: member `alpha` lives exactly on its domain set, takes
/// each earlier member's value at `pair_meet` designated points of their
/// shared domain, and fresh values everywhere else. Designated columns are
/// never reused across pairs, so all pairwise agreements are exactly the
/// designated sets and no point lies on three graphs.
pub fn build_linked_luzin(
    strings: &[BitStr],
    cfg: &LinkedLuzinConfig,
) -> Result<(FamilySnapshot, LinkedLuzinLog)> {
    for (i, f) in strings.iter().enumerate() {
        if f.len < cfg.depth {
            return Err(Error::StringTooShort {
                len: f.len,
                depth: cfg.depth,
            });
        }
        for g in &strings[i + 1..] {
            if f == g {
                return Err(Error::DuplicateString);
            }
            if f.split_level(g) >= cfg.depth {
                return Err(Error::invalid(
                    "source strings",
                    format!(
                        "strings {f:?} and {g:?} split at or past the depth {}",
                        cfg.depth
                    ),
                ));
            }
        }
    }
    let domains: Vec<BTreeSet<u64>> = strings
        .iter()
        .map(|f| hajnal_member(2, f, cfg.depth))
        .collect::<Result<_>>()?;
    let horizon = code_horizon(2, cfg.depth);
    let mut members: Vec<PartialFn> = Vec::new();
    let mut log = LinkedLuzinLog {
        depth: cfg.depth,
        pair_meet: cfg.pair_meet,
        strings: strings.to_vec(),
        designations: Vec::new(),
    };
    let mut used_designated: BTreeSet<u64> = BTreeSet::new();

    for alpha in 0..strings.len() {
        let mut order: Vec<usize> = (0..alpha).collect();
        if let Some(seed) = cfg.shuffle_seed {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(alpha as u64));
            order.shuffle(&mut rng);
        }
        let mut f = PartialFn::new(horizon);
        let mut excluded_domains: BTreeSet<u64> = BTreeSet::new();
        for (step, &earlier) in order.iter().enumerate() {
            // deepest shared codes first: designated agreements stay out
            // of every small box
            let pool: Vec<u64> = domains[alpha]
                .intersection(&domains[earlier])
                .filter(|&&p| {
                    p >= step as u64
                        && !excluded_domains.contains(&p)
                        && !used_designated.contains(&p)
                })
                .copied()
                .collect();
            let eligible: Vec<u64> = pool
                .iter()
                .rev()
                .take(cfg.pair_meet as usize)
                .copied()
                .collect();
            if (eligible.len() as u64) < cfg.pair_meet {
                return Err(Error::NoAgreementPoint {
                    member: alpha as u64,
                    earlier: earlier as u64,
                    step,
                });
            }
            for p in eligible {
                let value = members[earlier].get(p).expect("domains carry values");
                f.insert(p, value)?;
                used_designated.insert(p);
                log.designations.push(Designation {
                    alpha: alpha as u64,
                    earlier: earlier as u64,
                    point: p,
                    value,
                });
            }
            excluded_domains.extend(domains[earlier].iter().copied());
        }
        for &p in &domains[alpha] {
            if f.get(p).is_some() {
                continue;
            }
            let taken: BTreeSet<u64> = members.iter().filter_map(|g| g.get(p)).collect();
            let v = (0..)
                .find(|v| !taken.contains(v))
                .expect("values are unbounded");
            if v >= cfg.value_horizon {
                return Err(Error::HorizonExhausted {
                    horizon: cfg.value_horizon,
                    need: format!("fresh value at point {p}"),
                });
            }
            f.insert(p, v)?;
        }
        members.push(f);
    }

    let mut family = FamilySnapshot::new(MemberKind::Functions, horizon);
    for (i, f) in members.iter().enumerate() {
        family.push(i as u64, Member::Fn(f.clone()))?;
    }
    Ok((family, log))
}

/// The prefix classes of the source strings as index parts, for the k-wise
/// meet check.
pub fn prefix_class_parts(strings: &[BitStr], classes: usize) -> Result<Vec<BTreeSet<u64>>> {
    let members: Vec<(BitStr, BTreeSet<u64>)> =
        strings.iter().map(|&f| (f, BTreeSet::new())).collect();
    let split = crate::checkers::accumulation_split(&members, classes - 1)?;
    Ok(split
        .classes
        .iter()
        .map(|class| class.iter().map(|&i| i as u64).collect())
        .collect())
}

//! The JSON interchange formats for families, members, and trees.
//!
//! Member: `{"kind":"fn"|"set","horizon":N,"entries":...}` where entries
//! are `[[i,v],...]` for functions and `[i,...]` for sets.
//! Family: `{"kind":...,"universe_horizon":N,"members":[{"index":k,
//! "entries":...},...]}`.
//! Tree: `{"parents":[[node, parent-or-null],...]}`.

use crate::error::Error;
use crate::family::{FamilySnapshot, Member, MemberKind};
use crate::partial_fn::PartialFn;
use crate::tree::TreeOrder;
use crate::Result;
use serde_json::{json, Value};
use std::collections::BTreeSet;

fn kind_str(kind: MemberKind) -> &'static str {
    match kind {
        MemberKind::Sets => "set",
        MemberKind::Functions => "fn",
    }
}

fn kind_of(v: &Value) -> Result<MemberKind> {
    match v.as_str() {
        Some("set") => Ok(MemberKind::Sets),
        Some("fn") => Ok(MemberKind::Functions),
        _ => Err(Error::invalid("wire", "kind must be \"fn\" or \"set\"")),
    }
}

fn entries_value(member: &Member) -> Value {
    match member {
        Member::Set(s) => json!(s.iter().copied().collect::<Vec<u64>>()),
        Member::Fn(f) => json!(f.points().map(|(i, v)| [i, v]).collect::<Vec<[u64; 2]>>()),
    }
}

fn member_of(kind: MemberKind, horizon: u64, entries: &Value) -> Result<Member> {
    let list = entries
        .as_array()
        .ok_or_else(|| Error::invalid("wire", "entries must be an array"))?;
    match kind {
        MemberKind::Sets => {
            let mut set = BTreeSet::new();
            for e in list {
                set.insert(
                    e.as_u64()
                        .ok_or_else(|| Error::invalid("wire", "set entries must be naturals"))?,
                );
            }
            Ok(Member::Set(set))
        }
        MemberKind::Functions => {
            let mut f = PartialFn::new(horizon);
            for e in list {
                let pair = e
                    .as_array()
                    .filter(|p| p.len() == 2)
                    .ok_or_else(|| Error::invalid("wire", "fn entries must be [i,v] pairs"))?;
                let (i, v) = (pair[0].as_u64(), pair[1].as_u64());
                match (i, v) {
                    (Some(i), Some(v)) => f.insert(i, v)?,
                    _ => return Err(Error::invalid("wire", "fn entries must be naturals")),
                }
            }
            Ok(Member::Fn(f))
        }
    }
}

/// One member in the standalone wire format.
pub fn member_to_json(member: &Member, horizon: u64) -> Value {
    json!({
        "kind": kind_str(member.kind()),
        "horizon": horizon,
        "entries": entries_value(member),
    })
}

pub fn member_from_json(v: &Value) -> Result<(Member, u64)> {
    let kind = kind_of(&v["kind"])?;
    let horizon = v["horizon"]
        .as_u64()
        .ok_or_else(|| Error::invalid("wire", "horizon must be a natural"))?;
    Ok((member_of(kind, horizon, &v["entries"])?, horizon))
}

/// A family snapshot in the wire format.
pub fn family_to_json(fam: &FamilySnapshot) -> Value {
    json!({
        "kind": kind_str(fam.kind),
        "universe_horizon": fam.universe_horizon,
        "members": fam
            .members
            .iter()
            .map(|(i, m)| json!({"index": i, "entries": entries_value(m)}))
            .collect::<Vec<Value>>(),
    })
}

pub fn family_from_json(v: &Value) -> Result<FamilySnapshot> {
    let kind = kind_of(&v["kind"])?;
    let horizon = v["universe_horizon"]
        .as_u64()
        .ok_or_else(|| Error::invalid("wire", "universe_horizon must be a natural"))?;
    let members = v["members"]
        .as_array()
        .ok_or_else(|| Error::invalid("wire", "members must be an array"))?;
    let mut fam = FamilySnapshot::new(kind, horizon);
    for m in members {
        let index = m["index"]
            .as_u64()
            .ok_or_else(|| Error::invalid("wire", "member index must be a natural"))?;
        fam.push(index, member_of(kind, horizon, &m["entries"])?)?;
    }
    Ok(fam)
}

/// A tree order in the wire format.
pub fn tree_to_json(tree: &TreeOrder) -> Value {
    json!({
        "parents": tree
            .parent
            .iter()
            .map(|(&n, &p)| json!([n, p]))
            .collect::<Vec<Value>>(),
    })
}

pub fn tree_from_json(v: &Value) -> Result<TreeOrder> {
    let pairs = v["parents"]
        .as_array()
        .ok_or_else(|| Error::invalid("wire", "parents must be an array"))?;
    let mut parsed = Vec::new();
    for pair in pairs {
        let arr = pair
            .as_array()
            .filter(|p| p.len() == 2)
            .ok_or_else(|| Error::invalid("wire", "parents entries must be pairs"))?;
        let node = arr[0]
            .as_u64()
            .ok_or_else(|| Error::invalid("wire", "tree nodes must be naturals"))?;
        let parent = if arr[1].is_null() {
            None
        } else {
            Some(
                arr[1]
                    .as_u64()
                    .ok_or_else(|| Error::invalid("wire", "parents must be naturals or null"))?,
            )
        };
        parsed.push((node, parent));
    }
    TreeOrder::from_parents(parsed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_round_trip() {
        let mut fam = FamilySnapshot::new(MemberKind::Functions, 6);
        fam.push(0, Member::Fn(PartialFn::total(6, |i| 2 * i)))
            .unwrap();
        fam.push(3, Member::Fn(PartialFn::from_entries(6, [(1, 5)]).unwrap()))
            .unwrap();
        let v = family_to_json(&fam);
        assert_eq!(v["kind"], "fn");
        assert_eq!(v["members"][1]["index"], 3);
        assert_eq!(v["members"][1]["entries"][0][0], 1);
        let back = family_from_json(&v).unwrap();
        assert_eq!(back, fam);
    }

    #[test]
    fn set_member_round_trip() {
        let m = Member::Set([4, 7, 9].into());
        let v = member_to_json(&m, 10);
        assert_eq!(v["entries"], json!([4, 7, 9]));
        let (back, horizon) = member_from_json(&v).unwrap();
        assert_eq!(back, m);
        assert_eq!(horizon, 10);
    }

    #[test]
    fn tree_round_trip() {
        let tree = TreeOrder::binary(2);
        let back = tree_from_json(&tree_to_json(&tree)).unwrap();
        assert_eq!(back, tree);
    }

    #[test]
    fn malformed_input_is_rejected() {
        assert!(family_from_json(&json!({"kind":"graph"})).is_err());
        assert!(tree_from_json(&json!({"parents":[[1, 2]]})).is_err());
        assert!(member_from_json(&json!({"kind":"fn","horizon":3,"entries":[[1]]})).is_err());
    }
}

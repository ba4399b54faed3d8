//! `adfam force`: run a dense-rule chain over one of the posets and write
//! the chain log plus the extracted artifact.

use crate::util::{parse_parts, parse_u64_list, read_json, write_json, EXIT_EXHAUSTED, EXIT_OK};
use adfam::forcing::{
    compatibility_probe, frozen_meets_hold, rs_run, tail_of_branch_check, BranchPoset, DenseRule,
    FilterChain, HiddenTreePoset, LuzinPoset, PkPoset, Poset, RunError, Schedule,
};
use adfam::wire;
use anyhow::{anyhow, Context, Result};
use clap::Args;
use serde_json::{json, Value};
use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

#[derive(Args, Debug)]
pub struct ForceArgs {
    /// Poset: luzin | hiddentree | branch | pk
    pub poset: String,

    /// Family file (luzin, hiddentree: members; pk: domains)
    #[arg(long)]
    pub family: Option<PathBuf>,

    /// Chain log output path
    #[arg(long, default_value = "chain.json")]
    pub chain_out: PathBuf,

    /// Extracted artifact output path
    #[arg(long, default_value = "extract.json")]
    pub extract_out: PathBuf,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Reach-index rule count (luzin)
    #[arg(long, default_value_t = 4)]
    pub steps: u64,

    /// Compatibility probe sample count (luzin); skipped when zero
    #[arg(long, default_value_t = 0)]
    pub probe_samples: usize,

    /// Condition size for the probe (luzin)
    #[arg(long, default_value_t = 2)]
    pub probe_size: usize,

    /// Reach rules per member cover n < max-n (hiddentree)
    #[arg(long, default_value_t = 5)]
    pub max_n: u64,

    /// Coherent-set file from `construct coherent` (branch)
    #[arg(long)]
    pub coherent: Option<PathBuf>,

    /// Branch nodes, comma separated (branch)
    #[arg(long, default_value = "")]
    pub branch: String,

    /// Foe tree files, comma separated (branch)
    #[arg(long, default_value = "")]
    pub foes: String,

    /// Points to commit via size rules (branch)
    #[arg(long, default_value_t = 8)]
    pub points: u64,

    /// Incomparable-pair rules for n below this bound (branch)
    #[arg(long, default_value_t = 3)]
    pub incomparable_past: u64,

    /// Witness rounds (pk)
    #[arg(long, default_value_t = 10)]
    pub rounds: usize,

    /// Position groups `a,b;c,d` (pk)
    #[arg(long, default_value = "")]
    pub parts: String,

    /// Domain points per covered function (pk)
    #[arg(long, default_value_t = 8)]
    pub domain_size: usize,
}

fn chain_json<C: serde::Serialize>(
    poset: &str,
    seed: u64,
    chain: &FilterChain<C>,
) -> Result<Value> {
    Ok(json!({
        "poset": poset,
        "seed": seed,
        "steps": serde_json::to_value(&chain.steps)?,
    }))
}

fn exhausted<C: serde::Serialize>(args: &ForceArgs, err: &RunError<C>) -> Result<i32> {
    let log = json!({
        "poset": args.poset,
        "seed": args.seed,
        "failed_rule": err.rule,
        "error": err.source.to_string(),
        "steps": serde_json::to_value(&err.chain.steps)?,
    });
    write_json(&args.chain_out, &log)?;
    eprintln!("rule {} exhausted: {}", err.rule, err.source);
    Ok(EXIT_EXHAUSTED)
}

pub fn run(args: &ForceArgs) -> Result<i32> {
    match args.poset.as_str() {
        "luzin" => {
            let path = args
                .family
                .as_ref()
                .ok_or_else(|| anyhow!("luzin needs --family"))?;
            let fam = wire::family_from_json(&read_json(path)?)?;
            let poset = LuzinPoset::new(&fam);
            let rules: Vec<DenseRule<LuzinPoset>> =
                (0..args.steps).map(|d| poset.reach_rule(d)).collect();
            let chain = match rs_run(
                &poset,
                &rules,
                poset.root(),
                Schedule::RoundRobin { rounds: 1 },
            ) {
                Ok(c) => c,
                Err(e) => return exhausted(args, &e),
            };
            write_json(&args.chain_out, &chain_json("luzin", args.seed, &chain)?)?;
            let mut extract = json!({
                "indices": chain.last().iter().copied().collect::<Vec<u64>>(),
            });
            if args.probe_samples > 0 {
                let probe =
                    compatibility_probe(&poset, args.probe_samples, args.probe_size, args.seed)?;
                extract["compatibility_probe"] = serde_json::to_value(&probe)?;
            }
            write_json(&args.extract_out, &extract)?;
            Ok(EXIT_OK)
        }
        "hiddentree" => {
            let path = args
                .family
                .as_ref()
                .ok_or_else(|| anyhow!("hiddentree needs --family"))?;
            let fam = wire::family_from_json(&read_json(path)?)?;
            let poset = HiddenTreePoset::new(&fam);
            let mut rules = Vec::new();
            for (i, _) in &fam.members {
                rules.push(poset.cover_rule(*i));
            }
            for (i, _) in &fam.members {
                for n in 0..args.max_n {
                    rules.push(poset.reach_rule(*i, n));
                }
            }
            let chain = match rs_run(
                &poset,
                &rules,
                poset.root(),
                Schedule::RoundRobin { rounds: 1 },
            ) {
                Ok(c) => c,
                Err(e) => return exhausted(args, &e),
            };
            write_json(
                &args.chain_out,
                &chain_json("hiddentree", args.seed, &chain)?,
            )?;
            let last = chain.last();
            let tail = tail_of_branch_check(&fam, &last.tree, &last.floors);
            write_json(
                &args.extract_out,
                &json!({
                    "tree": wire::tree_to_json(&last.tree),
                    "floors": last.floors,
                    "tail_of_branch": match &tail {
                        Ok(()) => json!("pass"),
                        Err(msg) => json!({"fail": msg}),
                    },
                }),
            )?;
            tail.map_err(|m| anyhow!("extracted tree failed the tail check: {m}"))?;
            Ok(EXIT_OK)
        }
        "branch" => {
            let coherent_path = args
                .coherent
                .as_ref()
                .ok_or_else(|| anyhow!("branch needs --coherent"))?;
            let artifact = read_json(coherent_path)?;
            let horizon = artifact["horizon"]
                .as_u64()
                .ok_or_else(|| anyhow!("coherent artifact lacks a horizon"))?;
            let mut coherent: BTreeMap<u64, BTreeSet<u64>> = BTreeMap::new();
            for pair in artifact["sets"]
                .as_array()
                .ok_or_else(|| anyhow!("coherent artifact lacks sets"))?
            {
                let node = pair[0].as_u64().ok_or_else(|| anyhow!("bad node"))?;
                let set: BTreeSet<u64> = pair[1]
                    .as_array()
                    .ok_or_else(|| anyhow!("bad set"))?
                    .iter()
                    .filter_map(|x| x.as_u64())
                    .collect();
                coherent.insert(node, set);
            }
            let branch: BTreeSet<u64> = parse_u64_list(&args.branch)?.into_iter().collect();
            if branch.is_empty() {
                return Err(anyhow!("branch needs --branch nodes"));
            }
            let mut foes = Vec::new();
            for path in args.foes.split(',').filter(|s| !s.trim().is_empty()) {
                foes.push(wire::tree_from_json(&read_json(
                    PathBuf::from(path.trim()).as_path(),
                )?)?);
            }
            let poset = BranchPoset::new(coherent, branch.clone(), horizon)?;
            let mut rules = Vec::new();
            for &s in &branch {
                rules.push(poset.node_rule(s));
            }
            for n in 0..args.points as usize {
                rules.push(poset.size_rule(n));
            }
            for (fi, foe) in foes.iter().enumerate() {
                for n in 0..args.incomparable_past {
                    rules.push(poset.incomparable_rule(foe, &format!("foe{fi}"), n));
                }
            }
            let chain = match rs_run(
                &poset,
                &rules,
                poset.root(),
                Schedule::RoundRobin { rounds: 1 },
            ) {
                Ok(c) => c,
                Err(e) => return exhausted(args, &e),
            };
            write_json(&args.chain_out, &chain_json("branch", args.seed, &chain)?)?;
            let last = chain.last();
            write_json(
                &args.extract_out,
                &json!({
                    "points": last.points.iter().copied().collect::<Vec<u64>>(),
                    "nodes": last.nodes.iter().copied().collect::<Vec<u64>>(),
                }),
            )?;
            Ok(EXIT_OK)
        }
        "pk" => {
            let path = args
                .family
                .as_ref()
                .ok_or_else(|| anyhow!("pk needs --family"))?;
            let fam = wire::family_from_json(&read_json(path)?)?;
            let domains: Vec<BTreeSet<u64>> =
                fam.members.iter().map(|(_, m)| m.point_set()).collect();
            let parts_sets = parse_parts(&args.parts)?;
            if parts_sets.len() < 2 {
                return Err(anyhow!("pk needs --parts with at least two groups"));
            }
            let parts: Vec<Vec<usize>> = parts_sets
                .iter()
                .map(|g| g.iter().map(|&i| i as usize).collect())
                .collect();
            let poset = PkPoset::new(domains, fam.universe_horizon);
            let mut rules = Vec::new();
            for r in (1..=args.rounds).rev() {
                rules.push(poset.witness_rule(parts.clone(), r));
            }
            for e in 0..poset.domains.len() {
                rules.push(poset.domain_rule(e, args.domain_size));
            }
            let chain = match rs_run(
                &poset,
                &rules,
                poset.root(),
                Schedule::RoundRobin { rounds: 1 },
            ) {
                Ok(c) => c,
                Err(e) => return exhausted(args, &e),
            };
            write_json(&args.chain_out, &chain_json("pk", args.seed, &chain)?)?;
            frozen_meets_hold(&chain)
                .map_err(|m| anyhow!("frozen-meet invariant violated: {m}"))?;
            let extracted = poset.extract(&chain)?;
            write_json(&args.extract_out, &wire::family_to_json(&extracted))
                .context("writing the extracted family")?;
            Ok(EXIT_OK)
        }
        other => Err(anyhow!("unknown poset {other:?}")),
    }
}

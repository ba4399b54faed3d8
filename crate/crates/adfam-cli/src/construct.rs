//! `adfam construct`: build a family and write it with a replayable log.

use crate::util::{random_strings, read_json, write_json, EXIT_EXHAUSTED, EXIT_OK};
use adfam::constructions::{
    build_linked_luzin, build_luzin_basic, build_registry_family, build_staged_family,
    coherent_sequence, hajnal_member, Enumeration, LinkedLuzinConfig, StagedFamilyConfig,
};
use adfam::family::{FamilySnapshot, Member, MemberKind, SubsetAssignment};
use adfam::wire;
use anyhow::{anyhow, Context, Result};
use clap::Args;
use serde_json::{json, Value};
use std::path::PathBuf;

#[derive(Args, Debug)]
pub struct ConstructArgs {
    /// Family kind: luzin-basic | thm07 | thm32 | hajnal | thm59 | coherent
    pub kind: String,

    /// Output path for the family (or node-set map for coherent)
    #[arg(long, default_value = "family.json")]
    pub out: PathBuf,

    /// Output path for the replayable construction log
    #[arg(long, default_value = "log.json")]
    pub log: PathBuf,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Member count (luzin-basic, thm07, thm32)
    #[arg(long, default_value_t = 6)]
    pub count: u64,

    /// Stage budget per member (thm07, thm32)
    #[arg(long, default_value_t = 8)]
    pub stages: usize,

    /// Frequency threshold for the skeletons (thm07, thm32)
    #[arg(long, default_value_t = 2)]
    pub tau: u64,

    /// Column universe (luzin-basic, thm07, thm32) or coherent ground size
    #[arg(long, default_value_t = 400)]
    pub horizon: u64,

    /// Designated meet block width (luzin-basic)
    #[arg(long, default_value_t = 4)]
    pub meet_budget: u64,

    /// Linkage parameter (hajnal)
    #[arg(long, default_value_t = 2)]
    pub k: u64,

    /// Number of source strings (hajnal, thm59)
    #[arg(long, default_value_t = 16)]
    pub strings: usize,

    /// Level-set depth (hajnal, thm59)
    #[arg(long, default_value_t = 12)]
    pub depth: u32,

    /// Value universe bound (thm59)
    #[arg(long, default_value_t = 1000)]
    pub value_horizon: u64,

    /// Designated agreements per member pair (thm59)
    #[arg(long, default_value_t = 1)]
    pub pair_meet: u64,

    /// Meet-set tuple length budget (thm32)
    #[arg(long, default_value_t = 2)]
    pub tuple_depth: u32,

    /// Subset assignment file; prefix pattern when absent (thm07, thm32)
    #[arg(long)]
    pub assign: Option<PathBuf>,

    /// Shuffle the predecessor enumeration with this seed (thm07, thm32, thm59)
    #[arg(long)]
    pub shuffle: Option<u64>,

    /// Tree file (coherent); a complete binary tree of --tree-depth when absent
    #[arg(long)]
    pub tree: Option<PathBuf>,

    /// Depth of the default binary tree (coherent)
    #[arg(long, default_value_t = 4)]
    pub tree_depth: u32,
}

fn load_assign(args: &ConstructArgs) -> Result<SubsetAssignment> {
    match &args.assign {
        Some(path) => {
            let v = read_json(path)?;
            let assign: SubsetAssignment =
                serde_json::from_value(v).context("parsing the assignment file")?;
            Ok(assign)
        }
        None => Ok(SubsetAssignment::prefixes(args.count)),
    }
}

fn staged_config(args: &ConstructArgs) -> StagedFamilyConfig {
    StagedFamilyConfig {
        count: args.count,
        stages: args.stages,
        tau: args.tau,
        col_horizon: args.horizon,
        enumeration: match args.shuffle {
            Some(seed) => Enumeration::Shuffled(seed),
            None => Enumeration::Increasing,
        },
    }
}

fn params_echo(args: &ConstructArgs) -> Value {
    json!({
        "kind": args.kind,
        "seed": args.seed,
        "count": args.count,
        "stages": args.stages,
        "tau": args.tau,
        "horizon": args.horizon,
        "meet_budget": args.meet_budget,
        "k": args.k,
        "strings": args.strings,
        "depth": args.depth,
        "value_horizon": args.value_horizon,
        "pair_meet": args.pair_meet,
        "tuple_depth": args.tuple_depth,
        "shuffle": args.shuffle,
    })
}

pub fn run(args: &ConstructArgs) -> Result<i32> {
    let params = params_echo(args);
    let built: Result<(Value, Value), adfam::Error> = match args.kind.as_str() {
        "luzin-basic" => {
            build_luzin_basic(args.count, args.meet_budget, args.horizon).map(|(family, log)| {
                (
                    wire::family_to_json(&family),
                    json!({"params": params, "log": log}),
                )
            })
        }
        "thm07" => {
            let assign = load_assign(args)?;
            build_staged_family(&staged_config(args), &assign).map(|out| {
                (
                    wire::family_to_json(&out.family),
                    json!({
                        "params": params,
                        "assign": assign,
                        "report": out.report,
                        "traces": out.traces,
                    }),
                )
            })
        }
        "thm32" => {
            let assign = load_assign(args)?;
            build_registry_family(&staged_config(args), &assign, args.tuple_depth).map(
                |(out, registry)| {
                    (
                        wire::family_to_json(&out.family),
                        json!({
                            "params": params,
                            "assign": assign,
                            "report": out.report,
                            "registry": registry,
                            "traces": out.traces,
                        }),
                    )
                },
            )
        }
        "hajnal" => {
            let strings = random_strings(args.strings, args.depth, args.seed)?;
            let horizon = adfam::constructions::code_horizon(args.k, args.depth);
            let mut family = FamilySnapshot::new(MemberKind::Sets, horizon);
            let mut err = None;
            for (i, f) in strings.iter().enumerate() {
                match hajnal_member(args.k, f, args.depth) {
                    Ok(set) => family.push(i as u64, Member::Set(set))?,
                    Err(e) => {
                        err = Some(e);
                        break;
                    }
                }
            }
            match err {
                Some(e) => Err(e),
                None => Ok((
                    wire::family_to_json(&family),
                    json!({
                        "params": params,
                        "strings": strings.iter().map(|s| format!("{s:?}")).collect::<Vec<_>>(),
                    }),
                )),
            }
        }
        "thm59" => {
            let strings = random_strings(args.strings, args.depth, args.seed)?;
            let cfg = LinkedLuzinConfig {
                depth: args.depth,
                value_horizon: args.value_horizon,
                pair_meet: args.pair_meet,
                shuffle_seed: args.shuffle,
            };
            build_linked_luzin(&strings, &cfg).map(|(family, log)| {
                (
                    wire::family_to_json(&family),
                    json!({"params": params, "log": log}),
                )
            })
        }
        "coherent" => {
            let tree = match &args.tree {
                Some(path) => wire::tree_from_json(&read_json(path)?)?,
                None => adfam::TreeOrder::binary(args.tree_depth),
            };
            coherent_sequence(&tree, args.horizon).map(|sets| {
                let sets_json: Vec<Value> = sets
                    .iter()
                    .map(|(n, s)| json!([n, s.iter().copied().collect::<Vec<u64>>()]))
                    .collect();
                (
                    json!({"horizon": args.horizon, "sets": sets_json}),
                    json!({"params": params, "tree": wire::tree_to_json(&tree)}),
                )
            })
        }
        other => return Err(anyhow!("unknown construction kind {other:?}")),
    };

    match built {
        Ok((artifact, log)) => {
            write_json(&args.out, &artifact)?;
            write_json(&args.log, &log)?;
            log::info!("construct {}: wrote {}", args.kind, args.out.display());
            Ok(EXIT_OK)
        }
        Err(e) => {
            // partial log: the parameters and the blocking condition
            write_json(
                &args.log,
                &json!({"params": params, "error": e.to_string()}),
            )?;
            eprintln!("construction exhausted: {e}");
            Ok(EXIT_EXHAUSTED)
        }
    }
}

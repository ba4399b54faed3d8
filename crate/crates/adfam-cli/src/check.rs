//! `adfam check`: run budgeted checkers over a family file.

use crate::util::{
    parse_parts, parse_u64_list, read_json, render_report, verdict_exit, write_json, EXIT_FAIL,
    EXIT_INCONCLUSIVE, EXIT_OK,
};
use adfam::checkers::{
    almost_disjoint_check, anti_luzin_search, delta_system_refine, k_near_luzin_check,
    linkage_check, luzin_witness_check, tree_family_search, tree_family_verify, weak_tree_verify,
};
use adfam::report::{CheckReport, Verdict, Witness};
use adfam::wire;
use anyhow::{anyhow, Context, Result};
use clap::Args;
use serde_json::Value;
use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

#[derive(Args, Debug, Clone)]
pub struct CheckArgs {
    /// Check name, or a comma list to run several:
    /// ad | luzin | knear | antiluzin | tree | treesearch | weaktree | linkage | delta
    pub check: String,

    /// Family file to check
    #[arg(long)]
    pub family: PathBuf,

    /// Report output path; stdout when absent (suffixed per check for lists)
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, default_value = "json")]
    pub format: String,

    /// Worker threads for comma-list runs
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,

    /// Pairwise intersection bound (ad)
    #[arg(long, default_value_t = 0)]
    pub bound: u64,

    /// Test-set sizes, comma separated (luzin)
    #[arg(long, default_value = "0,2,4")]
    pub boxes: String,

    /// Earlier-member count budget (luzin)
    #[arg(long, default_value_t = 0)]
    pub count_budget: u64,

    /// Index groups `a,b;c,d` (knear)
    #[arg(long, default_value = "")]
    pub parts: String,

    /// Meet threshold (knear)
    #[arg(long, default_value_t = 1)]
    pub threshold: u64,

    /// Exhaustive bipartition limit (antiluzin)
    #[arg(long, default_value_t = 12)]
    pub exhaustive_limit: usize,

    /// Tree file (tree, weaktree)
    #[arg(long)]
    pub tree: Option<PathBuf>,

    /// Branch map file `{"index": leaf, ...}` (weaktree)
    #[arg(long)]
    pub phi: Option<PathBuf>,

    /// Allowed stray points (tree, treesearch, weaktree)
    #[arg(long, default_value_t = 0)]
    pub exceptions: u64,

    /// Node budget (treesearch)
    #[arg(long, default_value_t = 12)]
    pub node_limit: usize,

    /// Wise-ness: part count for knear, linkage parameter for linkage
    #[arg(long, default_value_t = 2)]
    pub k: usize,

    /// k-wise meet floor (linkage)
    #[arg(long, default_value_t = 1)]
    pub t_inf: u64,

    /// (k+1)-wise meet ceiling (linkage)
    #[arg(long, default_value_t = 10)]
    pub t_fin: u64,

    /// Petal count to extract (delta)
    #[arg(long, default_value_t = 3)]
    pub want: usize,
}

fn run_one(args: &CheckArgs, check: &str, family: &Value) -> Result<CheckReport> {
    let fam = wire::family_from_json(family)?;
    match check {
        "ad" => Ok(almost_disjoint_check(&fam, args.bound)),
        "luzin" => {
            let boxes = parse_u64_list(&args.boxes)?;
            Ok(luzin_witness_check(&fam, &boxes, args.count_budget)?)
        }
        "knear" => {
            let parts = parse_parts(&args.parts)?;
            if parts.is_empty() {
                return Err(anyhow!("knear needs --parts"));
            }
            if parts.len() != args.k {
                return Err(anyhow!(
                    "knear got {} parts but --k {}",
                    parts.len(),
                    args.k
                ));
            }
            Ok(k_near_luzin_check(&fam, &parts, args.threshold)?)
        }
        "antiluzin" => Ok(anti_luzin_search(&fam, args.bound, args.exhaustive_limit)),
        "tree" => {
            let path = args
                .tree
                .as_ref()
                .ok_or_else(|| anyhow!("tree check needs --tree"))?;
            let tree = wire::tree_from_json(&read_json(path)?)?;
            Ok(tree_family_verify(&fam, &tree, args.exceptions)?)
        }
        "treesearch" => match tree_family_search(&fam, args.node_limit, args.exceptions) {
            Ok(tree) => Ok(CheckReport::new(Verdict::Pass)
                .budget("exceptions", args.exceptions)
                .budget("node_limit", args.node_limit as u64)
                .witness(Witness::note(format!(
                    "witnessing order found on {} nodes",
                    tree.len()
                )))),
            Err(adfam::Error::TreeSearchRefuted { exceptions }) => {
                Ok(CheckReport::new(Verdict::Fail)
                    .budget("exceptions", exceptions)
                    .budget("node_limit", args.node_limit as u64)
                    .witness(Witness::note("exhaustive refutation at this node scale")))
            }
            Err(e) => Err(e.into()),
        },
        "weaktree" => {
            let tree_path = args
                .tree
                .as_ref()
                .ok_or_else(|| anyhow!("weaktree needs --tree"))?;
            let phi_path = args
                .phi
                .as_ref()
                .ok_or_else(|| anyhow!("weaktree needs --phi"))?;
            let tree = wire::tree_from_json(&read_json(tree_path)?)?;
            let phi_raw: BTreeMap<String, u64> =
                serde_json::from_value(read_json(phi_path)?).context("parsing the branch map")?;
            let mut phi = BTreeMap::new();
            for (k, v) in phi_raw {
                phi.insert(k.parse::<u64>().context("branch map keys")?, v);
            }
            Ok(weak_tree_verify(&fam, &tree, &phi, args.exceptions)?)
        }
        "linkage" => {
            let sets: Vec<BTreeSet<u64>> = fam.members.iter().map(|(_, m)| m.point_set()).collect();
            Ok(linkage_check(&sets, args.k, args.t_inf, args.t_fin)?)
        }
        "delta" => {
            let sets: Vec<BTreeSet<u64>> = fam.members.iter().map(|(_, m)| m.point_set()).collect();
            match delta_system_refine(&sets, args.want) {
                Ok(ds) => Ok(CheckReport::new(Verdict::Pass)
                    .budget("want", args.want as u64)
                    .witness(Witness::points(&ds.root))
                    .witness(Witness::indices(ds.positions.iter().map(|&p| p as u64)))),
                Err(adfam::Error::NoSunflower { want, searched }) => {
                    Ok(CheckReport::new(Verdict::Fail)
                        .budget("want", want as u64)
                        .budget("roots_searched", searched as u64)
                        .witness(Witness::note("no sunflower of the wanted size")))
                }
                Err(e) => Err(e.into()),
            }
        }
        other => Err(anyhow!("unknown check {other:?}")),
    }
}

pub fn run(args: &CheckArgs) -> Result<i32> {
    let family = read_json(&args.family)?;
    let checks: Vec<String> = args
        .check
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().to_string())
        .collect();
    if checks.is_empty() {
        return Err(anyhow!("no check named"));
    }

    let results: Vec<(String, Result<CheckReport>)> = if args.jobs > 1 && checks.len() > 1 {
        std::thread::scope(|scope| {
            let handles: Vec<_> = checks
                .iter()
                .map(|check| {
                    let family = &family;
                    let check = check.clone();
                    scope.spawn(move || {
                        let r = run_one(args, &check, family);
                        (check, r)
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        })
    } else {
        checks
            .iter()
            .map(|check| (check.clone(), run_one(args, check, &family)))
            .collect()
    };

    let mut worst = EXIT_OK;
    for (check, result) in results {
        let report = result?;
        let rendered = render_report(&report, &check, &args.format)?;
        match &args.out {
            Some(path) => {
                let target = if checks.len() == 1 {
                    path.clone()
                } else {
                    path.with_file_name(format!(
                        "{}.{check}.json",
                        path.file_stem()
                            .and_then(|s| s.to_str())
                            .unwrap_or("report")
                    ))
                };
                if args.format == "json" {
                    write_json(&target, &serde_json::to_value(&report)?)?;
                } else {
                    std::fs::write(&target, rendered)?;
                }
            }
            None => print!("{rendered}"),
        }
        let code = verdict_exit(&report);
        worst = match (worst, code) {
            (EXIT_FAIL, _) | (_, EXIT_FAIL) => EXIT_FAIL,
            (EXIT_INCONCLUSIVE, _) | (_, EXIT_INCONCLUSIVE) => EXIT_INCONCLUSIVE,
            _ => EXIT_OK,
        };
    }
    Ok(worst)
}

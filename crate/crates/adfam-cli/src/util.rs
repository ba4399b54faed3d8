//! Shared CLI plumbing: atomic file output, parsers, exit codes.

use adfam::encode::BitStr;
use anyhow::{anyhow, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_BAD_CONFIG: i32 = 1;
pub const EXIT_EXHAUSTED: i32 = 2;
pub const EXIT_FAIL: i32 = 3;
pub const EXIT_INCONCLUSIVE: i32 = 4;

/// Write JSON atomically: temp file in the target directory, then rename.
pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    let tmp: PathBuf = path.with_extension("tmp");
    fs::write(&tmp, &bytes).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Comma-separated naturals: `"0,2,4"`.
pub fn parse_u64_list(text: &str) -> Result<Vec<u64>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<u64>().map_err(|e| anyhow!("{s:?}: {e}")))
        .collect()
}

/// Semicolon-separated index groups: `"0,1,2;3,4,5"`.
pub fn parse_parts(text: &str) -> Result<Vec<BTreeSet<u64>>> {
    text.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|group| Ok(parse_u64_list(group)?.into_iter().collect()))
        .collect()
}

/// `count` distinct random bit strings of the given length.
pub fn random_strings(count: usize, len: u32, seed: u64) -> Result<Vec<BitStr>> {
    if len >= 64 {
        return Err(anyhow!("string length is capped at 63"));
    }
    if (count as u128) > (1u128 << len) {
        return Err(anyhow!(
            "cannot draw {count} distinct strings of length {len}"
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: BTreeSet<BitStr> = BTreeSet::new();
    while out.len() < count {
        out.insert(BitStr::new(len, rng.gen::<u64>()));
    }
    Ok(out.into_iter().collect())
}

/// Render a report in the chosen format.
pub fn render_report(report: &adfam::CheckReport, check: &str, format: &str) -> Result<String> {
    match format {
        "json" => Ok(serde_json::to_string_pretty(report)? + "\n"),
        "csv" => Ok(report.to_csv(check)),
        "text" => Ok(report.to_text(check)),
        other => Err(anyhow!("unknown format {other:?} (json|csv|text)")),
    }
}

pub fn verdict_exit(report: &adfam::CheckReport) -> i32 {
    match report.verdict {
        adfam::Verdict::Pass => EXIT_OK,
        adfam::Verdict::Fail => EXIT_FAIL,
        adfam::Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

//! `key = value` experiment configuration files. `#` starts a comment.

use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};

use crate::experiments::{canonical, Params, DEFAULT_SEED, IDS};

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    /// Canonical ids in run order.
    pub experiments: Vec<&'static str>,
    pub params: Params,
    /// Output directory for CSV files and the index.
    pub output: Option<PathBuf>,
}

pub fn parse_ids(s: &str) -> Result<Vec<&'static str>> {
    if s.trim().eq_ignore_ascii_case("all") {
        return Ok(IDS.to_vec());
    }
    let mut out = Vec::new();
    for part in s.split(',') {
        let id = canonical(part)?;
        if !out.contains(&id) {
            out.push(id);
        }
    }
    Ok(out)
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut experiments = None;
    let mut params = Params { seed: DEFAULT_SEED, ..Params::default() };
    let mut output = None;
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let ctx = || format!("line {}: `{}`", no + 1, raw.trim());
        let (k, v) = line.split_once('=').ok_or_else(|| anyhow!("expected key = value")).with_context(ctx)?;
        let (k, v) = (k.trim(), v.trim());
        if v.is_empty() {
            return Err(anyhow!("empty value for `{k}`")).with_context(ctx);
        }
        match k {
            "experiment" | "experiments" => experiments = Some(parse_ids(v).with_context(ctx)?),
            "seed" => params.seed = v.parse().with_context(ctx)?,
            "cohort" | "points" => {
                let n: usize = v.parse().with_context(ctx)?;
                if n == 0 {
                    return Err(anyhow!("cohort must be positive")).with_context(ctx);
                }
                params.cohort = Some(n);
            }
            "max_cells" => {
                let n: u64 = v.parse().with_context(ctx)?;
                if n == 0 {
                    return Err(anyhow!("max_cells must be positive")).with_context(ctx);
                }
                params.max_cells = Some(n);
            }
            "output" => output = Some(PathBuf::from(v)),
            _ => return Err(anyhow!("unknown key `{k}`")).with_context(ctx),
        }
    }
    let Some(experiments) = experiments else { bail!("missing `experiment` key") };
    Ok(ExperimentConfig { experiments, params, output })
}

//! Input loading: rule files, inline-or-file domain specs, survivor lists.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context, Result};
use bpdev_core::choice::{parse_domain, parse_rule, Alternatives, Domain, Profile, Rule};

pub fn load_rule(path: &str) -> Result<Rule> {
    let text = fs::read_to_string(path).with_context(|| format!("reading rule file `{path}`"))?;
    parse_rule(&text).map_err(|e| anyhow!("{path}: {e}"))
}

/// A domain flag accepts the inline keyword forms (`universal`,
/// `singlepeaked a < b < c < d`) or a path to a DOMAIN file.
pub fn load_domain(spec: &str, alts: &Alternatives) -> Result<Domain> {
    let trimmed = spec.trim();
    if trimmed == "universal" || trimmed.starts_with("singlepeaked") {
        return parse_domain(trimmed, alts).map_err(|e| anyhow!("domain `{spec}`: {e}"));
    }
    if Path::new(trimmed).exists() {
        let text = fs::read_to_string(trimmed)
            .with_context(|| format!("reading domain file `{trimmed}`"))?;
        return parse_domain(&text, alts).map_err(|e| anyhow!("{trimmed}: {e}"));
    }
    Err(anyhow!("domain `{spec}` is neither an inline form nor a readable file"))
}

/// Survivor files list one report profile per line; `#` starts a comment.
pub fn load_survivors(path: &str, alts: &Alternatives) -> Result<Vec<Profile>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading survivor file `{path}`"))?;
    let mut rows = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let line = line.strip_prefix("profile:").unwrap_or(line);
        let profile = Profile::parse(line, alts)
            .map_err(|e| anyhow!("{path}:{}: {e}", lineno + 1))?;
        rows.push(profile);
    }
    Ok(rows)
}

//! Resolute social choice rules and the RULE text format.

use std::collections::BTreeMap;

use crate::choice::domain::Domain;
use crate::choice::order::{display_axis, Alternatives, LinearOrder, Profile};
use crate::choice::ChoiceError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuleKind {
    /// Top-vote counting with a fixed tie-breaking order over alternatives.
    Plurality { tiebreak: Vec<u8> },
    /// Median of reported peaks along a fixed axis; requires an odd number
    /// of agents.
    MedianOnAxis { axis: Vec<u8> },
    /// The named agent's reported top wins.
    Dictatorship { agent: usize },
    Constant { alt: u8 },
    /// Fully listed report table.
    Table { rows: BTreeMap<Profile, u8> },
}

/// A rule plus an optional overlay of extra off-domain rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub alternatives: Alternatives,
    pub kind: RuleKind,
    pub overlay: Option<BTreeMap<Profile, u8>>,
}

impl Rule {
    pub fn new(alternatives: Alternatives, kind: RuleKind) -> Rule {
        Rule { alternatives, kind, overlay: None }
    }

    pub fn with_overlay(mut self, overlay: BTreeMap<Profile, u8>) -> Result<Rule, ChoiceError> {
        if let RuleKind::Table { rows } = &self.kind {
            if let Some(p) = overlay.keys().find(|p| rows.contains_key(*p)) {
                return Err(ChoiceError::OverlayOverlap(p.to_string()));
            }
        }
        self.overlay = Some(overlay);
        Ok(self)
    }

    pub fn m(&self) -> usize {
        self.alternatives.len()
    }

    /// Applies the rule; overlay rows take precedence over the base rule.
    pub fn apply(&self, report: &Profile) -> Result<u8, ChoiceError> {
        if let Some(overlay) = &self.overlay {
            if let Some(&alt) = overlay.get(report) {
                return Ok(alt);
            }
        }
        self.apply_base(report)
    }

    /// Applies the base rule, ignoring any overlay.
    pub fn apply_base(&self, report: &Profile) -> Result<u8, ChoiceError> {
        match &self.kind {
            RuleKind::Plurality { tiebreak } => {
                let mut votes = vec![0usize; self.m()];
                for order in report.orders() {
                    votes[order.top() as usize] += 1;
                }
                let best = *votes.iter().max().expect("non-empty alternatives");
                tiebreak
                    .iter()
                    .copied()
                    .find(|&x| votes[x as usize] == best)
                    .ok_or_else(|| ChoiceError::InvalidRule("tiebreak incomplete".into()))
            }
            RuleKind::MedianOnAxis { axis } => {
                if report.len() % 2 == 0 {
                    return Err(ChoiceError::InvalidRule(
                        "median rule requires an odd agent count".into(),
                    ));
                }
                let mut pos = vec![0usize; self.m()];
                for (i, &x) in axis.iter().enumerate() {
                    pos[x as usize] = i;
                }
                let mut peaks: Vec<u8> = report.orders().iter().map(|o| o.top()).collect();
                peaks.sort_by_key(|&x| pos[x as usize]);
                Ok(peaks[peaks.len() / 2])
            }
            RuleKind::Dictatorship { agent } => {
                if *agent == 0 || *agent > report.len() {
                    return Err(ChoiceError::InvalidRule(format!(
                        "dictator {agent} out of range for {} agents",
                        report.len()
                    )));
                }
                Ok(report.order(*agent).top())
            }
            RuleKind::Constant { alt } => Ok(*alt),
            RuleKind::Table { rows } => rows
                .get(report)
                .copied()
                .ok_or_else(|| ChoiceError::OffDomainReport(report.to_string())),
        }
    }

    /// Overlay rows beyond a base report domain, in table order.
    pub fn extension_rows(&self) -> Vec<(Profile, u8)> {
        self.overlay
            .as_ref()
            .map(|o| o.iter().map(|(p, &a)| (p.clone(), a)).collect())
            .unwrap_or_default()
    }

    /// Short descriptor used in audit report columns.
    pub fn descriptor(&self) -> String {
        let base = match &self.kind {
            RuleKind::Plurality { tiebreak } => {
                let names: Vec<&str> =
                    tiebreak.iter().map(|&x| self.alternatives.name(x)).collect();
                format!("plurality:{}", names.join(">"))
            }
            RuleKind::MedianOnAxis { axis } => {
                format!("median:{}", display_axis(axis, &self.alternatives).replace(' ', ""))
            }
            RuleKind::Dictatorship { agent } => format!("dictator:{agent}"),
            RuleKind::Constant { alt } => {
                format!("constant:{}", self.alternatives.name(*alt))
            }
            RuleKind::Table { rows } => format!("table:{}", rows.len()),
        };
        match &self.overlay {
            Some(o) => format!("{base}+overlay:{}", o.len()),
            None => base,
        }
    }
}

/// Parses the RULE text format: a `rule ...` header, optional `row` lines for
/// tables, and an optional `extend` section of overlay rows. Rules whose
/// header does not list every alternative need a leading `alternatives:` line.
pub fn parse_rule(text: &str) -> Result<Rule, ChoiceError> {
    let mut alternatives: Option<Alternatives> = None;
    let mut rule: Option<Rule> = None;
    let mut in_extension = false;
    let mut table_rows: BTreeMap<Profile, u8> = BTreeMap::new();
    let mut overlay_rows: BTreeMap<Profile, u8> = BTreeMap::new();
    let mut is_table = false;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| ChoiceError::Parse { line: lineno + 1, message };
        if let Some(rest) = line.strip_prefix("alternatives:") {
            if alternatives.is_some() || rule.is_some() {
                return Err(err("`alternatives:` must come first, once".into()));
            }
            alternatives = Some(Alternatives::new(
                rest.split_whitespace().map(str::to_string).collect(),
            )?);
        } else if let Some(rest) = line.strip_prefix("rule ") {
            if rule.is_some() {
                return Err(err("duplicate `rule` line".into()));
            }
            let rest = rest.trim();
            if let Some(spec) = rest.strip_prefix("plurality") {
                let spec = spec.trim();
                let list = spec
                    .strip_prefix("tiebreak")
                    .ok_or_else(|| err("expected `plurality tiebreak <order>`".into()))?;
                let alts = match &alternatives {
                    Some(a) => a.clone(),
                    None => Alternatives::new(
                        list.split('>').map(|s| s.trim().to_string()).collect(),
                    )?,
                };
                let tiebreak = LinearOrder::parse(list, &alts)?.ranking().to_vec();
                rule = Some(Rule::new(alts, RuleKind::Plurality { tiebreak }));
            } else if let Some(spec) = rest.strip_prefix("median") {
                let spec = spec.trim();
                let list = spec
                    .strip_prefix("axis")
                    .ok_or_else(|| err("expected `median axis <axis>`".into()))?;
                let alts = match &alternatives {
                    Some(a) => a.clone(),
                    None => Alternatives::new(
                        list.split('<').map(|s| s.trim().to_string()).collect(),
                    )?,
                };
                let axis = crate::choice::order::parse_axis(list, &alts)?;
                rule = Some(Rule::new(alts, RuleKind::MedianOnAxis { axis }));
            } else if let Some(spec) = rest.strip_prefix("dictator") {
                let alts = alternatives
                    .clone()
                    .ok_or_else(|| err("`rule dictator` needs `alternatives:`".into()))?;
                let agent: usize = spec
                    .trim()
                    .parse()
                    .map_err(|_| err(format!("bad agent `{}`", spec.trim())))?;
                rule = Some(Rule::new(alts, RuleKind::Dictatorship { agent }));
            } else if let Some(spec) = rest.strip_prefix("constant") {
                let alts = alternatives
                    .clone()
                    .ok_or_else(|| err("`rule constant` needs `alternatives:`".into()))?;
                let alt = alts.index_of(spec.trim())?;
                rule = Some(Rule::new(alts, RuleKind::Constant { alt }));
            } else if rest == "table" {
                let alts = alternatives
                    .clone()
                    .ok_or_else(|| err("`rule table` needs `alternatives:`".into()))?;
                is_table = true;
                rule = Some(Rule::new(alts, RuleKind::Table { rows: BTreeMap::new() }));
            } else {
                return Err(err(format!("unknown rule form `{rest}`")));
            }
        } else if line == "extend" {
            if rule.is_none() {
                return Err(err("`extend` before `rule`".into()));
            }
            if in_extension {
                return Err(err("duplicate `extend` line".into()));
            }
            in_extension = true;
        } else if let Some(rest) = line.strip_prefix("row ") {
            let rule_ref = rule.as_ref().ok_or_else(|| err("`row` before `rule`".into()))?;
            if !in_extension && !is_table {
                return Err(err("`row` lines only belong to tables or `extend`".into()));
            }
            let (profile_text, alt_text) = rest
                .rsplit_once("->")
                .ok_or_else(|| err("expected `row <profile> -> <alt>`".into()))?;
            let profile = Profile::parse(profile_text.trim(), &rule_ref.alternatives)?;
            let alt = rule_ref.alternatives.index_of(alt_text.trim())?;
            let bucket = if in_extension { &mut overlay_rows } else { &mut table_rows };
            if bucket.insert(profile, alt).is_some() {
                return Err(err("duplicate row".into()));
            }
        } else {
            return Err(err(format!("unrecognized line `{line}`")));
        }
    }

    let mut rule = rule.ok_or(ChoiceError::Parse { line: 0, message: "missing `rule` line".into() })?;
    if is_table {
        rule.kind = RuleKind::Table { rows: table_rows };
    }
    if !overlay_rows.is_empty() {
        rule = rule.with_overlay(overlay_rows)?;
    }
    Ok(rule)
}

/// Parses the DOMAIN text format, either the inline keyword forms
/// (`universal`, `singlepeaked <axis>`) or the block forms (`domain list` with
/// `profile:` lines, `domain product` with `agent <i>:` lines).
pub fn parse_domain(text: &str, alts: &Alternatives) -> Result<Domain, ChoiceError> {
    let trimmed = text.trim();
    if trimmed == "universal" || trimmed == "domain universal" {
        return Ok(Domain::Universal);
    }
    let inline = trimmed.strip_prefix("domain ").unwrap_or(trimmed);
    if let Some(axis_text) = inline.strip_prefix("singlepeaked") {
        if !axis_text.trim().is_empty() && !axis_text.contains('\n') {
            let axis = crate::choice::order::parse_axis(axis_text.trim(), alts)?;
            return Ok(Domain::SinglePeaked { axis });
        }
    }
    let mut kind: Option<&str> = None;
    let mut rows: Vec<Profile> = Vec::new();
    let mut sets: BTreeMap<usize, Vec<LinearOrder>> = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| ChoiceError::Parse { line: lineno + 1, message };
        if let Some(rest) = line.strip_prefix("domain") {
            if kind.is_some() {
                return Err(err("duplicate `domain` line".into()));
            }
            match rest.trim() {
                "list" => kind = Some("list"),
                "product" => kind = Some("product"),
                other => return Err(err(format!("unknown domain form `{other}`"))),
            }
        } else if let Some(rest) = line.strip_prefix("profile:") {
            if kind != Some("list") {
                return Err(err("`profile:` lines belong to `domain list`".into()));
            }
            rows.push(Profile::parse(rest, alts)?);
        } else if let Some(rest) = line.strip_prefix("agent ") {
            if kind != Some("product") {
                return Err(err("`agent` lines belong to `domain product`".into()));
            }
            let (idx_text, orders_text) = rest
                .split_once(':')
                .ok_or_else(|| err("expected `agent <i>: <orders>`".into()))?;
            let agent: usize = idx_text
                .trim()
                .parse()
                .map_err(|_| err(format!("bad agent `{}`", idx_text.trim())))?;
            let orders = orders_text
                .split(';')
                .map(|o| LinearOrder::parse(o, alts))
                .collect::<Result<Vec<_>, _>>()?;
            if orders.is_empty() {
                return Err(err("empty per-agent report set".into()));
            }
            if sets.insert(agent, orders).is_some() {
                return Err(err(format!("duplicate `agent {agent}` line")));
            }
        } else {
            return Err(err(format!("unrecognized line `{line}`")));
        }
    }
    match kind {
        Some("list") => Ok(Domain::ProfileList { rows }),
        Some("product") => {
            let n = *sets.keys().max().unwrap_or(&0);
            let mut out = Vec::with_capacity(n);
            for i in 1..=n {
                out.push(sets.remove(&i).ok_or(ChoiceError::Parse {
                    line: 0,
                    message: format!("missing `agent {i}` line"),
                })?);
            }
            Ok(Domain::PerAgentProduct { sets: out })
        }
        _ => Err(ChoiceError::Parse { line: 0, message: "missing `domain` line".into() }),
    }
}

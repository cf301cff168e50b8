//! Typed finite certificates for pure coalition-modal formulas.
//!
//! A certificate submits final relation tables, a formula closure, and a
//! truth type per state. The verifier re-checks every row in a fixed order:
//! Boolean types, equivalence of each relation, empty-label identity and
//! inclusion, exact union-composition in both directions (the reverse
//! direction always re-scans all midpoints, whatever factor pointers say),
//! box and diamond truth rows as equivalences, supplied pointers, and the
//! root claim. The first failing row is reported.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::coalition::Coalition;
use crate::formula::{parse_formula, Formula};
use crate::frame::LabelledFrame;
use crate::model::ExplicitModel;

#[derive(Debug, Error)]
pub enum CertificateError {
    #[error("certificate syntax error at line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("dangling reference at line {line}: {message}")]
    Dangling { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiamondPointer {
    pub state: u32,
    pub formula: usize,
    pub successor: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorPointer {
    pub state: u32,
    pub first: Coalition,
    pub second: Coalition,
    pub target: u32,
    pub midpoint: u32,
}

#[derive(Debug, Clone)]
pub struct Certificate {
    pub states: Vec<String>,
    pub root: u32,
    pub labels: Vec<Coalition>,
    pub formula: usize,
    pub closure: Vec<Formula>,
    /// Per state, the closure indices claimed true there.
    pub types: Vec<BTreeSet<usize>>,
    /// Sorted non-loop pairs per label; self-loops are implied.
    pub relations: BTreeMap<Coalition, Vec<(u32, u32)>>,
    pub diamonds: Vec<DiamondPointer>,
    pub factors: Vec<FactorPointer>,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    TypeRow,
    FrameRow,
    UnionRow,
    BoxRow,
    DiamondRow,
    PointerRow,
    RootRow,
}

impl fmt::Display for RowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            RowKind::TypeRow => "type-row",
            RowKind::FrameRow => "frame-row",
            RowKind::UnionRow => "union-row",
            RowKind::BoxRow => "box-row",
            RowKind::DiamondRow => "diamond-row",
            RowKind::PointerRow => "pointer-row",
            RowKind::RootRow => "root-row",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone)]
pub struct VerifyFailure {
    pub row: RowKind,
    pub location: String,
    pub reason: String,
}

impl fmt::Display for VerifyFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {}", self.row, self.location, self.reason)
    }
}

#[derive(Debug, Clone)]
pub struct VerifyResult {
    pub accepted: bool,
    pub failure: Option<VerifyFailure>,
}

impl VerifyResult {
    fn accept() -> VerifyResult {
        VerifyResult { accepted: true, failure: None }
    }

    fn reject(row: RowKind, location: String, reason: String) -> VerifyResult {
        VerifyResult { accepted: false, failure: Some(VerifyFailure { row, location, reason }) }
    }
}

/// Splits on a separator character at brace/paren depth zero.
fn split_top_level(text: &str, sep: char) -> Vec<String> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut current = String::new();
    for ch in text.chars() {
        match ch {
            '{' | '(' => depth += 1,
            '}' | ')' => depth -= 1,
            _ => {}
        }
        if ch == sep && depth == 0 {
            parts.push(current.clone());
            current.clear();
        } else {
            current.push(ch);
        }
    }
    parts.push(current);
    parts
}

/// Finds the first `->` at brace/paren depth zero.
fn split_top_level_arrow(text: &str) -> Option<(&str, &str)> {
    let bytes = text.as_bytes();
    let mut depth = 0i32;
    for i in 0..bytes.len().saturating_sub(1) {
        match bytes[i] {
            b'{' | b'(' => depth += 1,
            b'}' | b')' => depth -= 1,
            b'-' if depth == 0 && bytes[i + 1] == b'>' => {
                return Some((&text[..i], &text[i + 2..]));
            }
            _ => {}
        }
    }
    None
}

struct RawLine {
    line: usize,
    text: String,
}

/// Parses the line-based CERTIFICATE format; unknown keys are rejected.
pub fn parse_certificate(text: &str) -> Result<Certificate, CertificateError> {
    let mut states_line: Option<RawLine> = None;
    let mut root_line: Option<RawLine> = None;
    let mut labels_line: Option<RawLine> = None;
    let mut formula_line: Option<RawLine> = None;
    let mut closure_line: Option<RawLine> = None;
    let mut type_lines: Vec<RawLine> = Vec::new();
    let mut relation_lines: Vec<RawLine> = Vec::new();
    let mut diamond_lines: Vec<RawLine> = Vec::new();
    let mut factor_lines: Vec<RawLine> = Vec::new();

    let syntax = |line: usize, message: String| CertificateError::Syntax { line, message };
    let dangling = |line: usize, message: String| CertificateError::Dangling { line, message };

    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let store = |slot: &mut Option<RawLine>, key: &str, rest: &str| {
            if slot.is_some() {
                return Err(syntax(lineno, format!("duplicate `{key}:` line")));
            }
            *slot = Some(RawLine { line: lineno, text: rest.trim().to_string() });
            Ok(())
        };
        if let Some(rest) = line.strip_prefix("states:") {
            store(&mut states_line, "states", rest)?;
        } else if let Some(rest) = line.strip_prefix("root:") {
            store(&mut root_line, "root", rest)?;
        } else if let Some(rest) = line.strip_prefix("labels:") {
            store(&mut labels_line, "labels", rest)?;
        } else if let Some(rest) = line.strip_prefix("formula:") {
            store(&mut formula_line, "formula", rest)?;
        } else if let Some(rest) = line.strip_prefix("closure:") {
            store(&mut closure_line, "closure", rest)?;
        } else if let Some(rest) = line.strip_prefix("types:") {
            type_lines.push(RawLine { line: lineno, text: rest.trim().to_string() });
        } else if let Some(rest) = line.strip_prefix("relations") {
            relation_lines.push(RawLine { line: lineno, text: rest.trim().to_string() });
        } else if let Some(rest) = line.strip_prefix("diamonds:") {
            diamond_lines.push(RawLine { line: lineno, text: rest.trim().to_string() });
        } else if let Some(rest) = line.strip_prefix("factors:") {
            factor_lines.push(RawLine { line: lineno, text: rest.trim().to_string() });
        } else {
            return Err(syntax(lineno, format!("unknown key in line `{line}`")));
        }
    }

    let states_line =
        states_line.ok_or_else(|| syntax(0, "missing `states:` line".to_string()))?;
    let states: Vec<String> =
        states_line.text.split_whitespace().map(str::to_string).collect();
    if states.is_empty() {
        return Err(syntax(states_line.line, "empty state list".to_string()));
    }
    let mut state_index: BTreeMap<&str, u32> = BTreeMap::new();
    for (i, s) in states.iter().enumerate() {
        if state_index.insert(s.as_str(), i as u32).is_some() {
            return Err(syntax(states_line.line, format!("duplicate state `{s}`")));
        }
    }

    let labels_line =
        labels_line.ok_or_else(|| syntax(0, "missing `labels:` line".to_string()))?;
    let mut labels: Vec<Coalition> = Vec::new();
    let mut max_agent = 0usize;
    for tok in labels_line.text.split_whitespace() {
        let c = Coalition::parse(tok, crate::coalition::MAX_AGENTS)
            .map_err(|e| syntax(labels_line.line, e.to_string()))?;
        max_agent = max_agent.max(c.max_member());
        if labels.contains(&c) {
            return Err(syntax(labels_line.line, format!("duplicate label {c}")));
        }
        labels.push(c);
    }
    let n = max_agent;
    // The signature is fixed before input: the label family must be the full
    // powerset of {1..n}, which in particular contains empty and grand.
    let expected = Coalition::all(n);
    let mut sorted = labels.clone();
    sorted.sort();
    if sorted != expected {
        return Err(syntax(
            labels_line.line,
            format!("labels must be every coalition over {{1..{n}}}"),
        ));
    }

    let root_line = root_line.ok_or_else(|| syntax(0, "missing `root:` line".to_string()))?;
    let root = *state_index
        .get(root_line.text.as_str())
        .ok_or_else(|| dangling(root_line.line, format!("unknown root `{}`", root_line.text)))?;

    let parse_phi = |text: &str, line: usize| -> Result<Formula, CertificateError> {
        parse_formula(text, n, &[]).map_err(|e| syntax(line, e.to_string()))
    };

    let closure_line =
        closure_line.ok_or_else(|| syntax(0, "missing `closure:` line".to_string()))?;
    let mut closure: Vec<Formula> = Vec::new();
    for part in split_top_level(&closure_line.text, ';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let phi = parse_phi(part, closure_line.line)?;
        if closure.contains(&phi) {
            return Err(syntax(closure_line.line, format!("duplicate closure formula `{phi}`")));
        }
        closure.push(phi);
    }
    if closure.is_empty() {
        return Err(syntax(closure_line.line, "empty closure".to_string()));
    }
    for phi in &closure {
        if let Some(c) = phi.modal_labels().iter().find(|c| !labels.contains(c)) {
            return Err(dangling(
                closure_line.line,
                format!("modal label {c} is not declared"),
            ));
        }
    }

    let formula_line =
        formula_line.ok_or_else(|| syntax(0, "missing `formula:` line".to_string()))?;
    let root_formula = parse_phi(&formula_line.text, formula_line.line)?;
    let formula = closure
        .iter()
        .position(|f| *f == root_formula)
        .ok_or_else(|| dangling(formula_line.line, "formula is not in the closure".to_string()))?;

    let mut types: Vec<Option<BTreeSet<usize>>> = vec![None; states.len()];
    for raw in &type_lines {
        let (state_text, rest) = raw
            .text
            .split_once('=')
            .ok_or_else(|| syntax(raw.line, "expected `types: <state> = ...`".to_string()))?;
        let state = *state_index
            .get(state_text.trim())
            .ok_or_else(|| dangling(raw.line, format!("unknown state `{}`", state_text.trim())))?;
        if types[state as usize].is_some() {
            return Err(syntax(raw.line, format!("duplicate types line for `{}`", state_text.trim())));
        }
        let mut set = BTreeSet::new();
        for part in split_top_level(rest, ',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let phi = parse_phi(part, raw.line)?;
            let idx = closure.iter().position(|f| *f == phi).ok_or_else(|| {
                dangling(raw.line, format!("type formula `{phi}` is not in the closure"))
            })?;
            set.insert(idx);
        }
        types[state as usize] = Some(set);
    }
    let types: Vec<BTreeSet<usize>> = types
        .into_iter()
        .enumerate()
        .map(|(i, t)| t.ok_or_else(|| syntax(0, format!("missing types line for `{}`", states[i]))))
        .collect::<Result<_, _>>()?;

    let mut relations: BTreeMap<Coalition, Vec<(u32, u32)>> = BTreeMap::new();
    for raw in &relation_lines {
        let (label_text, rest) = raw
            .text
            .split_once(':')
            .ok_or_else(|| syntax(raw.line, "expected `relations <label>: ...`".to_string()))?;
        let label = Coalition::parse(label_text.trim(), n)
            .map_err(|e| syntax(raw.line, e.to_string()))?;
        if !labels.contains(&label) {
            return Err(dangling(raw.line, format!("relation label {label} is not declared")));
        }
        if relations.contains_key(&label) {
            return Err(syntax(raw.line, format!("duplicate relations line for {label}")));
        }
        let mut pairs = Vec::new();
        for tok in rest.split_whitespace() {
            let inner = tok
                .strip_prefix('(')
                .and_then(|s| s.strip_suffix(')'))
                .ok_or_else(|| syntax(raw.line, format!("bad pair `{tok}`")))?;
            let (a, b) = inner
                .split_once(',')
                .ok_or_else(|| syntax(raw.line, format!("bad pair `{tok}`")))?;
            let ai = *state_index
                .get(a.trim())
                .ok_or_else(|| dangling(raw.line, format!("unknown state `{}`", a.trim())))?;
            let bi = *state_index
                .get(b.trim())
                .ok_or_else(|| dangling(raw.line, format!("unknown state `{}`", b.trim())))?;
            if ai != bi {
                pairs.push((ai, bi));
            }
        }
        pairs.sort_unstable();
        pairs.dedup();
        relations.insert(label, pairs);
    }
    for &label in &labels {
        relations.entry(label).or_default();
    }

    let mut diamonds = Vec::new();
    for raw in &diamond_lines {
        let (state_text, rest) = raw
            .text
            .split_once(char::is_whitespace)
            .ok_or_else(|| syntax(raw.line, "expected `diamonds: <state> <phi> -> <state>`".to_string()))?;
        let state = *state_index
            .get(state_text.trim())
            .ok_or_else(|| dangling(raw.line, format!("unknown state `{}`", state_text.trim())))?;
        let (phi_text, succ_text) = split_top_level_arrow(rest)
            .ok_or_else(|| syntax(raw.line, "missing `->` in diamond pointer".to_string()))?;
        let phi = parse_phi(phi_text.trim(), raw.line)?;
        if !matches!(phi, Formula::Diamond(..)) {
            return Err(syntax(raw.line, format!("pointer formula `{phi}` is not a diamond")));
        }
        let formula = closure.iter().position(|f| *f == phi).ok_or_else(|| {
            dangling(raw.line, format!("pointer formula `{phi}` is not in the closure"))
        })?;
        let successor = *state_index
            .get(succ_text.trim())
            .ok_or_else(|| dangling(raw.line, format!("unknown state `{}`", succ_text.trim())))?;
        diamonds.push(DiamondPointer { state, formula, successor });
    }

    let mut factors = Vec::new();
    for raw in &factor_lines {
        let (state_text, rest) = raw
            .text
            .split_once(char::is_whitespace)
            .ok_or_else(|| syntax(raw.line, "expected `factors: <state> {C}{D} <state> -> <state>`".to_string()))?;
        let state = *state_index
            .get(state_text.trim())
            .ok_or_else(|| dangling(raw.line, format!("unknown state `{}`", state_text.trim())))?;
        let rest = rest.trim();
        let first_close = rest
            .find('}')
            .ok_or_else(|| syntax(raw.line, "missing coalition pair".to_string()))?;
        let first = Coalition::parse(&rest[..=first_close], n)
            .map_err(|e| syntax(raw.line, e.to_string()))?;
        let rest2 = rest[first_close + 1..].trim_start();
        let second_close = rest2
            .find('}')
            .ok_or_else(|| syntax(raw.line, "missing second coalition".to_string()))?;
        let second = Coalition::parse(&rest2[..=second_close], n)
            .map_err(|e| syntax(raw.line, e.to_string()))?;
        if !labels.contains(&first) || !labels.contains(&second) {
            return Err(dangling(raw.line, "factor label is not declared".to_string()));
        }
        let tail = rest2[second_close + 1..].trim();
        let (target_text, mid_text) = split_top_level_arrow(tail)
            .ok_or_else(|| syntax(raw.line, "missing `->` in factor pointer".to_string()))?;
        let target = *state_index
            .get(target_text.trim())
            .ok_or_else(|| dangling(raw.line, format!("unknown state `{}`", target_text.trim())))?;
        let midpoint = *state_index
            .get(mid_text.trim())
            .ok_or_else(|| dangling(raw.line, format!("unknown state `{}`", mid_text.trim())))?;
        factors.push(FactorPointer { state, first, second, target, midpoint });
    }

    Ok(Certificate {
        states,
        root,
        labels,
        formula,
        closure,
        types,
        relations,
        diamonds,
        factors,
        n,
    })
}

impl Certificate {
    fn related(&self, label: Coalition, s: u32, t: u32) -> bool {
        s == t || self.relations[&label].binary_search(&(s, t)).is_ok()
    }

    fn successors(&self, label: Coalition, s: u32) -> Vec<u32> {
        let mut out = vec![s];
        out.extend(
            self.relations[&label].iter().filter(|&&(a, _)| a == s).map(|&(_, b)| b),
        );
        out.sort_unstable();
        out.dedup();
        out
    }

    fn claims(&self, state: u32, formula_idx: usize) -> bool {
        self.types[state as usize].contains(&formula_idx)
    }

    fn closure_index(&self, phi: &Formula) -> Option<usize> {
        self.closure.iter().position(|f| f == phi)
    }
}

/// Executes the eight verification steps in order, reporting the first
/// failing row.
pub fn verify_certificate(cert: &Certificate) -> VerifyResult {
    let state_name = |s: u32| cert.states[s as usize].clone();

    // Step 1: Boolean type coherence over the closure.
    for (t, _) in cert.states.iter().enumerate() {
        let t = t as u32;
        for (i, chi) in cert.closure.iter().enumerate() {
            let claimed = cert.claims(t, i);
            let locate = || format!("state={} formula={chi}", state_name(t));
            match chi {
                Formula::Not(inner) => {
                    if let Some(j) = cert.closure_index(inner) {
                        if claimed == cert.claims(t, j) {
                            return VerifyResult::reject(
                                RowKind::TypeRow,
                                locate(),
                                "exactly one of a negation and its operand must be claimed"
                                    .to_string(),
                            );
                        }
                    }
                }
                Formula::And(l, r) => {
                    if let (Some(li), Some(ri)) =
                        (cert.closure_index(l), cert.closure_index(r))
                    {
                        let actual = cert.claims(t, li) && cert.claims(t, ri);
                        if claimed != actual {
                            return VerifyResult::reject(
                                RowKind::TypeRow,
                                locate(),
                                "conjunction claim disagrees with its conjuncts".to_string(),
                            );
                        }
                    }
                }
                Formula::Or(l, r) => {
                    if let (Some(li), Some(ri)) =
                        (cert.closure_index(l), cert.closure_index(r))
                    {
                        let actual = cert.claims(t, li) || cert.claims(t, ri);
                        if claimed != actual {
                            return VerifyResult::reject(
                                RowKind::TypeRow,
                                locate(),
                                "disjunction claim disagrees with its disjuncts".to_string(),
                            );
                        }
                    }
                }
                Formula::Implies(l, r) => {
                    if let (Some(li), Some(ri)) =
                        (cert.closure_index(l), cert.closure_index(r))
                    {
                        let actual = !cert.claims(t, li) || cert.claims(t, ri);
                        if claimed != actual {
                            return VerifyResult::reject(
                                RowKind::TypeRow,
                                locate(),
                                "implication claim disagrees with its parts".to_string(),
                            );
                        }
                    }
                }
                _ => {}
            }
        }
    }

    // Step 2: every relation an equivalence.
    let dim = cert.states.len();
    let matrices: BTreeMap<Coalition, crate::bits::BitMatrix> = cert
        .labels
        .iter()
        .map(|&label| {
            let mut m = crate::bits::BitMatrix::identity(dim);
            for &(a, b) in &cert.relations[&label] {
                m.set(a as usize, b as usize);
            }
            (label, m)
        })
        .collect();
    for &label in &cert.labels {
        let m = &matrices[&label];
        if let Some(&(a, b)) = cert.relations[&label]
            .iter()
            .find(|&&(a, b)| !m.get(b as usize, a as usize))
        {
            return VerifyResult::reject(
                RowKind::FrameRow,
                format!("label={label} pair=({},{})", state_name(a), state_name(b)),
                "relation is not symmetric".to_string(),
            );
        }
        for a in 0..dim {
            let row_a = m.row(a);
            for b in m.row_bits(a) {
                let row_b = m.row(b);
                let contained = row_b.iter().zip(row_a).all(|(&wb, &wa)| wb & !wa == 0);
                if contained {
                    continue;
                }
                let c = m
                    .row_bits(b)
                    .find(|&c| row_a[c / 64] & (1 << (c % 64)) == 0)
                    .expect("superset bit exists");
                return VerifyResult::reject(
                    RowKind::FrameRow,
                    format!(
                        "label={label} chain=({},{},{})",
                        state_name(a as u32),
                        state_name(b as u32),
                        state_name(c as u32)
                    ),
                    "relation is not transitive".to_string(),
                );
            }
        }
    }

    // Step 3: empty-label identity and monotone inclusion.
    if let Some(&(a, b)) = cert.relations[&Coalition::EMPTY].first() {
        return VerifyResult::reject(
            RowKind::FrameRow,
            format!("label={{}} pair=({},{})", state_name(a), state_name(b)),
            "the empty label must be the identity relation".to_string(),
        );
    }
    for &c in &cert.labels {
        for &d in &cert.labels {
            if c == d || !c.is_subset(d) {
                continue;
            }
            if let Some(&(a, b)) =
                cert.relations[&c].iter().find(|&&(a, b)| !cert.related(d, a, b))
            {
                return VerifyResult::reject(
                    RowKind::FrameRow,
                    format!("labels={c}⊆{d} pair=({},{})", state_name(a), state_name(b)),
                    "inclusion monotonicity fails".to_string(),
                );
            }
        }
    }

    // Step 4: exact union-composition, both directions, full midpoint scan.
    for &c in &cert.labels {
        for &d in &cert.labels {
            let union = c.union(d);
            let composite = crate::bits::compose(&matrices[&c], &matrices[&d]);
            let direct = &matrices[&union];
            for s in 0..dim {
                for v in 0..dim {
                    let comp = composite.get(s, v);
                    let dir = direct.get(s, v);
                    if comp == dir {
                        continue;
                    }
                    let location = format!(
                        "C={c} D={d} pair=({},{})",
                        state_name(s as u32),
                        state_name(v as u32)
                    );
                    let reason = if comp {
                        "composite pair is missing from the union relation"
                    } else {
                        "union pair has no midpoint"
                    };
                    return VerifyResult::reject(RowKind::UnionRow, location, reason.to_string());
                }
            }
        }
    }

    // Steps 5 and 6: box and diamond truth rows as equivalences.
    for (i, chi) in cert.closure.iter().enumerate() {
        match chi {
            Formula::Box(c, inner) => {
                let j = match cert.closure_index(inner) {
                    Some(j) => j,
                    None => {
                        return VerifyResult::reject(
                            RowKind::BoxRow,
                            format!("formula={chi}"),
                            "box operand is missing from the closure".to_string(),
                        )
                    }
                };
                for t in 0..dim as u32 {
                    let actual = cert.successors(*c, t).into_iter().all(|u| cert.claims(u, j));
                    if cert.claims(t, i) != actual {
                        return VerifyResult::reject(
                            RowKind::BoxRow,
                            format!("state={} formula={chi}", state_name(t)),
                            "box claim disagrees with the successor scan".to_string(),
                        );
                    }
                }
            }
            Formula::Diamond(c, inner) => {
                let j = match cert.closure_index(inner) {
                    Some(j) => j,
                    None => {
                        return VerifyResult::reject(
                            RowKind::DiamondRow,
                            format!("formula={chi}"),
                            "diamond operand is missing from the closure".to_string(),
                        )
                    }
                };
                for t in 0..dim as u32 {
                    let actual = cert.successors(*c, t).into_iter().any(|u| cert.claims(u, j));
                    if cert.claims(t, i) != actual {
                        return VerifyResult::reject(
                            RowKind::DiamondRow,
                            format!("state={} formula={chi}", state_name(t)),
                            "diamond claim disagrees with the successor scan".to_string(),
                        );
                    }
                }
            }
            _ => {}
        }
    }

    // Step 7: supplied pointers must name genuine witnesses.
    for ptr in &cert.diamonds {
        let chi = &cert.closure[ptr.formula];
        let (c, inner) = match chi {
            Formula::Diamond(c, inner) => (*c, inner),
            _ => unreachable!("parser admits only diamond pointers"),
        };
        let j = cert.closure_index(inner).expect("operand checked in step 6");
        let locate = || {
            format!(
                "state={} formula={chi} -> {}",
                state_name(ptr.state),
                state_name(ptr.successor)
            )
        };
        if !cert.claims(ptr.state, ptr.formula) {
            return VerifyResult::reject(
                RowKind::PointerRow,
                locate(),
                "pointer attached to a diamond that is not claimed".to_string(),
            );
        }
        if !cert.related(c, ptr.state, ptr.successor) || !cert.claims(ptr.successor, j) {
            return VerifyResult::reject(
                RowKind::PointerRow,
                locate(),
                "pointer does not name a genuine witness".to_string(),
            );
        }
    }
    for ptr in &cert.factors {
        let locate = || {
            format!(
                "state={} {}{} {} -> {}",
                state_name(ptr.state),
                ptr.first,
                ptr.second,
                state_name(ptr.target),
                state_name(ptr.midpoint)
            )
        };
        if !cert.related(ptr.first.union(ptr.second), ptr.state, ptr.target) {
            return VerifyResult::reject(
                RowKind::PointerRow,
                locate(),
                "factor pointer targets a pair outside the union relation".to_string(),
            );
        }
        if !cert.related(ptr.first, ptr.state, ptr.midpoint)
            || !cert.related(ptr.second, ptr.midpoint, ptr.target)
        {
            return VerifyResult::reject(
                RowKind::PointerRow,
                locate(),
                "factor pointer does not name a genuine midpoint".to_string(),
            );
        }
    }

    // Step 8: the root claim.
    if !cert.claims(cert.root, cert.formula) {
        return VerifyResult::reject(
            RowKind::RootRow,
            format!("state={}", state_name(cert.root)),
            "root formula is not claimed at the root state".to_string(),
        );
    }
    VerifyResult::accept()
}

/// Rebuilds an accepted certificate as an explicit model whose valuation is
/// the atoms of each type; the soundness cross-check evaluates every closure
/// formula against it.
pub fn certificate_model(cert: &Certificate) -> Result<ExplicitModel, crate::frame::FrameError> {
    let relations: BTreeMap<Coalition, Vec<(String, String)>> = cert
        .relations
        .iter()
        .map(|(&label, pairs)| {
            let named = pairs
                .iter()
                .map(|&(a, b)| {
                    (cert.states[a as usize].clone(), cert.states[b as usize].clone())
                })
                .collect();
            (label, named)
        })
        .collect();
    let frame = LabelledFrame::new(cert.n.max(1), cert.states.clone(), relations)?;
    let mut universe = BTreeSet::new();
    for phi in &cert.closure {
        universe.extend(phi.atoms());
    }
    let valuation: Vec<BTreeSet<crate::formula::Atom>> = cert
        .types
        .iter()
        .map(|set| {
            set.iter()
                .filter_map(|&i| match &cert.closure[i] {
                    Formula::Atom(a) => Some(a.clone()),
                    _ => None,
                })
                .collect()
        })
        .collect();
    Ok(ExplicitModel::new(frame, valuation, universe).expect("valuation drawn from closure atoms"))
}

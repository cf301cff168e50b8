//! Finite coalition-labelled frames and the deviation-law checker.
//!
//! A [`LabelledFrame`] carries one binary relation per coalition label over a
//! fixed agent set. Self-loops are implied for every label and never stored;
//! the empty label defaults to the identity relation, and every other label is
//! the submitter's claim under audit. The checker tests the four deviation
//! laws: each label an equivalence (D1), empty-label identity (D2), inclusion
//! monotonicity (D3), and exact union-composition (D4).

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::bits::{compose, BitMatrix};
use crate::coalition::{Coalition, CoalitionError, MAX_AGENTS};

#[derive(Debug, Error)]
pub enum FrameError {
    #[error("malformed frame: {0}")]
    MalformedFrame(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("frame violates the deviation laws: {0}")]
    NotDevFrame(String),
    #[error("states `{0}` and `{1}` are not grand-coalition connected")]
    NotConnected(String, String),
    #[error("component is not coordinate separated: counterexample ({0},{1})")]
    NotSeparated(String, String),
    #[error("state set is not a single grand-coalition class: {0}")]
    NotAComponent(String),
    #[error("frame parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Coalition(#[from] CoalitionError),
}

/// The seven checkable law clauses, in reporting order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DevLaw {
    D1Reflexive,
    D1Symmetric,
    D1Transitive,
    D2Identity,
    D3Inclusion,
    D4Forward,
    D4Reverse,
}

impl fmt::Display for DevLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            DevLaw::D1Reflexive => "D1-reflexive",
            DevLaw::D1Symmetric => "D1-symmetric",
            DevLaw::D1Transitive => "D1-transitive",
            DevLaw::D2Identity => "D2-identity",
            DevLaw::D3Inclusion => "D3-inclusion",
            DevLaw::D4Forward => "D4-forward",
            DevLaw::D4Reverse => "D4-reverse",
        };
        f.write_str(name)
    }
}

/// One failing law instance with its smallest offending tuple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DevViolation {
    pub law: DevLaw,
    pub labels: Vec<Coalition>,
    pub states: Vec<String>,
}

impl fmt::Display for DevViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.labels.iter().map(|c| c.to_string()).collect();
        write!(f, "{} {} ({})", self.law, labels.join(" "), self.states.join(","))
    }
}

#[derive(Debug, Clone)]
pub struct DevReport {
    pub passed: bool,
    pub violations: Vec<DevViolation>,
}

/// Quotient coordinates and embedding of a separated component.
#[derive(Debug, Clone)]
pub struct ProductRepresentation {
    /// For each agent, the component's classes under the co-singleton label.
    pub coordinate_sets: Vec<Vec<Vec<String>>>,
    /// Per component state, the tuple of class indices.
    pub embedding: BTreeMap<String, Vec<usize>>,
}

#[derive(Debug, Clone)]
pub struct SeparationVerdict {
    pub separated: bool,
    pub counterexample: Option<(String, String)>,
}

#[derive(Debug, Clone)]
pub struct FactorClosureVerdict {
    pub closed: bool,
    /// First missing quadruple `(s, C, D, t)` in scan order.
    pub missing: Option<(String, Coalition, Coalition, String)>,
}

/// A finite frame: ordered states plus one pair set per supplied label.
#[derive(Debug, Clone)]
pub struct LabelledFrame {
    n: usize,
    states: Vec<String>,
    index: HashMap<String, u32>,
    /// Sorted non-loop pairs per label; missing labels are identity-only.
    relations: BTreeMap<Coalition, Vec<(u32, u32)>>,
}

impl LabelledFrame {
    /// Builds a frame, validating that every pair references a declared state.
    pub fn new(
        n: usize,
        states: Vec<String>,
        relations: BTreeMap<Coalition, Vec<(String, String)>>,
    ) -> Result<LabelledFrame, FrameError> {
        if n > MAX_AGENTS {
            return Err(FrameError::Coalition(CoalitionError::TooManyAgents(n)));
        }
        let mut index = HashMap::new();
        for (i, s) in states.iter().enumerate() {
            if index.insert(s.clone(), i as u32).is_some() {
                return Err(FrameError::MalformedFrame(format!("duplicate state `{s}`")));
            }
        }
        let mut rels = BTreeMap::new();
        for (label, pairs) in relations {
            if !label.is_subset(Coalition::grand(n)) {
                return Err(FrameError::MalformedFrame(format!(
                    "label {label} exceeds the agent set {{1..{n}}}"
                )));
            }
            let mut out = Vec::with_capacity(pairs.len());
            for (a, b) in pairs {
                let ai = *index.get(&a).ok_or_else(|| {
                    FrameError::MalformedFrame(format!("pair references unknown state `{a}`"))
                })?;
                let bi = *index.get(&b).ok_or_else(|| {
                    FrameError::MalformedFrame(format!("pair references unknown state `{b}`"))
                })?;
                if ai != bi {
                    out.push((ai, bi));
                }
            }
            out.sort_unstable();
            out.dedup();
            rels.insert(label, out);
        }
        Ok(LabelledFrame { n, states, index, relations: rels })
    }

    /// Index-level constructor for programmatic builders.
    pub fn from_indexed(
        n: usize,
        states: Vec<String>,
        relations: BTreeMap<Coalition, Vec<(u32, u32)>>,
    ) -> Result<LabelledFrame, FrameError> {
        let named = relations
            .into_iter()
            .map(|(c, pairs)| {
                let named_pairs = pairs
                    .into_iter()
                    .map(|(a, b)| (states[a as usize].clone(), states[b as usize].clone()))
                    .collect();
                (c, named_pairs)
            })
            .collect();
        LabelledFrame::new(n, states, named)
    }

    pub fn agent_count(&self) -> usize {
        self.n
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state_index(&self, name: &str) -> Option<u32> {
        self.index.get(name).copied()
    }

    pub fn state_name(&self, idx: u32) -> &str {
        &self.states[idx as usize]
    }

    /// Non-loop pairs stored for a label (empty when the label is implied).
    pub fn relation_pairs(&self, label: Coalition) -> &[(u32, u32)] {
        self.relations.get(&label).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn stored_labels(&self) -> impl Iterator<Item = Coalition> + '_ {
        self.relations.keys().copied()
    }

    /// Membership with the implied self-loop.
    pub fn related(&self, label: Coalition, s: u32, t: u32) -> bool {
        s == t || self.relation_pairs(label).binary_search(&(s, t)).is_ok()
    }

    /// Successors of `s` under a label, `s` itself first.
    pub fn successors(&self, label: Coalition, s: u32) -> Vec<u32> {
        let pairs = self.relation_pairs(label);
        let lo = pairs.partition_point(|&(a, _)| a < s);
        let hi = pairs.partition_point(|&(a, _)| a <= s);
        let mut out = Vec::with_capacity(hi - lo + 1);
        out.push(s);
        out.extend(pairs[lo..hi].iter().map(|&(_, b)| b));
        out.sort_unstable();
        out.dedup();
        out
    }

    fn matrix(&self, label: Coalition) -> BitMatrix {
        let mut m = BitMatrix::identity(self.state_count());
        for &(a, b) in self.relation_pairs(label) {
            m.set(a as usize, b as usize);
        }
        m
    }

    /// Grand-coalition equivalence classes in declared-order of first member.
    pub fn components(&self) -> Vec<Vec<u32>> {
        let grand = Coalition::grand(self.n);
        let mut seen = vec![false; self.state_count()];
        let mut out = Vec::new();
        for s in 0..self.state_count() as u32 {
            if seen[s as usize] {
                continue;
            }
            // E_N is scanned as a raw relation; closure is not taken, so this
            // partitions into genuine classes only on law-passing frames.
            let mut class: Vec<u32> = (0..self.state_count() as u32)
                .filter(|&t| self.related(grand, s, t))
                .collect();
            class.sort_unstable();
            for &t in &class {
                seen[t as usize] = true;
            }
            out.push(class);
        }
        out
    }
}

type RawViolation = (DevLaw, Vec<Coalition>, Vec<u32>);

/// Checks the deviation laws, reporting every failing law instance with its
/// smallest offending tuple under the declared state order.
pub fn check_dev_laws(frame: &LabelledFrame) -> DevReport {
    let labels = Coalition::all(frame.n);
    let matrices: BTreeMap<Coalition, BitMatrix> =
        labels.iter().map(|&c| (c, frame.matrix(c))).collect();
    let mut raw: Vec<RawViolation> = Vec::new();

    // D2: the empty label must be identity.
    if let Some(&(a, b)) = frame.relation_pairs(Coalition::EMPTY).first() {
        raw.push((DevLaw::D2Identity, vec![Coalition::EMPTY], vec![a, b]));
    }

    // D1 per label: symmetry and transitivity over the stored pairs.
    for &c in &labels {
        let m = &matrices[&c];
        if let Some(&(a, b)) = frame
            .relation_pairs(c)
            .iter()
            .find(|&&(a, b)| !m.get(b as usize, a as usize))
        {
            raw.push((DevLaw::D1Symmetric, vec![c], vec![a, b]));
        }
        'trans: for s in 0..frame.state_count() {
            for t in m.row_bits(s) {
                for u in m.row_bits(t) {
                    if !m.get(s, u) {
                        raw.push((
                            DevLaw::D1Transitive,
                            vec![c],
                            vec![s as u32, t as u32, u as u32],
                        ));
                        break 'trans;
                    }
                }
            }
        }
    }

    // D3: inclusion monotonicity over every subset pair.
    for &c in &labels {
        for &d in &labels {
            if c == d || !c.is_subset(d) {
                continue;
            }
            let md = &matrices[&d];
            if let Some(&(a, b)) = frame
                .relation_pairs(c)
                .iter()
                .find(|&&(a, b)| !md.get(a as usize, b as usize))
            {
                raw.push((DevLaw::D3Inclusion, vec![c, d], vec![a, b]));
            }
        }
    }

    // D4: exact union-composition, both directions, over all label pairs.
    // Parallel evaluation pays off only past a size threshold; the merged
    // violation list is sorted either way, so chunking never shows.
    let pairs: Vec<(Coalition, Coalition)> =
        labels.iter().flat_map(|&c| labels.iter().map(move |&d| (c, d))).collect();
    let d4_check = |&(c, d): &(Coalition, Coalition)| -> Vec<RawViolation> {
        let mc = &matrices[&c];
        let md = &matrices[&d];
        let mu = &matrices[&c.union(d)];
        let comp = compose(mc, md);
        let mut found = Vec::new();
        'fwd: for s in 0..comp.dim {
            for t in comp.row_bits(s) {
                if !mu.get(s, t) {
                    let mid = (0..comp.dim)
                        .find(|&u| mc.get(s, u) && md.get(u, t))
                        .expect("composite pair has a midpoint");
                    found.push((
                        DevLaw::D4Forward,
                        vec![c, d],
                        vec![s as u32, mid as u32, t as u32],
                    ));
                    break 'fwd;
                }
            }
        }
        'rev: for s in 0..comp.dim {
            for t in mu.row_bits(s) {
                if !comp.get(s, t) {
                    found.push((DevLaw::D4Reverse, vec![c, d], vec![s as u32, t as u32]));
                    break 'rev;
                }
            }
        }
        found
    };
    let d4: Vec<RawViolation> = if frame.state_count() >= 64 {
        pairs.par_iter().flat_map_iter(d4_check).collect()
    } else {
        pairs.iter().flat_map(d4_check).collect()
    };
    raw.extend(d4);

    raw.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)).then_with(|| a.2.cmp(&b.2)));
    let violations: Vec<DevViolation> = raw
        .into_iter()
        .map(|(law, labels, states)| DevViolation {
            law,
            labels,
            states: states.iter().map(|&i| frame.state_name(i).to_string()).collect(),
        })
        .collect();
    DevReport { passed: violations.is_empty(), violations }
}

fn require_dev(frame: &LabelledFrame) -> Result<(), FrameError> {
    let report = check_dev_laws(frame);
    if report.passed {
        Ok(())
    } else {
        Err(FrameError::NotDevFrame(report.violations[0].to_string()))
    }
}

/// First state `u` (declared order) with `u E_C s` and `u E_{N\C} t`.
pub fn rectangular_mixing_witness(
    frame: &LabelledFrame,
    s: &str,
    t: &str,
    c: Coalition,
) -> Result<String, FrameError> {
    let si = frame.state_index(s).ok_or_else(|| FrameError::UnknownState(s.to_string()))?;
    let ti = frame.state_index(t).ok_or_else(|| FrameError::UnknownState(t.to_string()))?;
    require_dev(frame)?;
    let grand = Coalition::grand(frame.n);
    if !frame.related(grand, si, ti) {
        return Err(FrameError::NotConnected(s.to_string(), t.to_string()));
    }
    let rest = c.complement(frame.n);
    for u in 0..frame.state_count() as u32 {
        if frame.related(c, u, si) && frame.related(rest, u, ti) {
            return Ok(frame.state_name(u).to_string());
        }
    }
    // Guaranteed to exist on a law-passing frame by exact composition.
    unreachable!("mixing witness must exist in a law-passing frame")
}

fn resolve_component(frame: &LabelledFrame, component: &[String]) -> Result<Vec<u32>, FrameError> {
    let mut idxs = Vec::with_capacity(component.len());
    for name in component {
        idxs.push(
            frame.state_index(name).ok_or_else(|| FrameError::UnknownState(name.clone()))?,
        );
    }
    idxs.sort_unstable();
    idxs.dedup();
    if idxs.is_empty() {
        return Err(FrameError::NotAComponent("empty component".to_string()));
    }
    let grand = Coalition::grand(frame.n);
    let class: Vec<u32> = (0..frame.state_count() as u32)
        .filter(|&t| frame.related(grand, idxs[0], t))
        .collect();
    if class != idxs {
        return Err(FrameError::NotAComponent(format!(
            "given set differs from the class of `{}`",
            frame.state_name(idxs[0])
        )));
    }
    Ok(idxs)
}

/// Tests coordinate separation on one grand-coalition class.
pub fn coordinate_separation_check(
    frame: &LabelledFrame,
    component: &[String],
) -> Result<SeparationVerdict, FrameError> {
    require_dev(frame)?;
    let idxs = resolve_component(frame, component)?;
    let co_singletons: Vec<Coalition> =
        (1..=frame.n).map(|i| Coalition::singleton(i).complement(frame.n)).collect();
    for (k, &s) in idxs.iter().enumerate() {
        for &t in &idxs[k + 1..] {
            if co_singletons.iter().all(|&c| frame.related(c, s, t)) {
                return Ok(SeparationVerdict {
                    separated: false,
                    counterexample: Some((
                        frame.state_name(s).to_string(),
                        frame.state_name(t).to_string(),
                    )),
                });
            }
        }
    }
    Ok(SeparationVerdict { separated: true, counterexample: None })
}

/// Recovers report coordinates for a separated component via the
/// co-singleton quotients; the result is re-verified before returning.
pub fn product_representation(
    frame: &LabelledFrame,
    component: &[String],
) -> Result<ProductRepresentation, FrameError> {
    let verdict = coordinate_separation_check(frame, component)?;
    if let Some((a, b)) = verdict.counterexample {
        return Err(FrameError::NotSeparated(a, b));
    }
    let idxs = resolve_component(frame, component)?;
    let n = frame.n;
    let mut coordinate_sets: Vec<Vec<Vec<String>>> = Vec::with_capacity(n);
    let mut class_of: Vec<HashMap<u32, usize>> = Vec::with_capacity(n);
    for i in 1..=n {
        let label = Coalition::singleton(i).complement(n);
        let mut classes: Vec<Vec<u32>> = Vec::new();
        let mut assign: HashMap<u32, usize> = HashMap::new();
        for &s in &idxs {
            if assign.contains_key(&s) {
                continue;
            }
            let id = classes.len();
            let members: Vec<u32> =
                idxs.iter().copied().filter(|&t| frame.related(label, s, t)).collect();
            for &t in &members {
                assign.insert(t, id);
            }
            classes.push(members);
        }
        coordinate_sets.push(
            classes
                .iter()
                .map(|cl| cl.iter().map(|&s| frame.state_name(s).to_string()).collect())
                .collect(),
        );
        class_of.push(assign);
    }
    let mut embedding: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    let mut images: HashMap<Vec<usize>, u32> = HashMap::new();
    for &s in &idxs {
        let tuple: Vec<usize> = class_of.iter().map(|a| a[&s]).collect();
        assert!(
            images.insert(tuple.clone(), s).is_none(),
            "embedding must be injective on a separated component"
        );
        embedding.insert(frame.state_name(s).to_string(), tuple);
    }
    let product_size: usize = coordinate_sets.iter().map(|cs| cs.len()).product();
    assert_eq!(idxs.len(), product_size, "embedding must be onto the full product");
    // Relation preservation and reflection in both directions.
    for &c in Coalition::all(n).iter() {
        for &s in &idxs {
            for &t in &idxs {
                let rel = frame.related(c, s, t);
                let agree = (1..=n)
                    .filter(|&i| !c.contains(i))
                    .all(|i| class_of[i - 1][&s] == class_of[i - 1][&t]);
                assert_eq!(rel, agree, "embedding must preserve and reflect every label");
            }
        }
    }
    Ok(ProductRepresentation { coordinate_sets, embedding })
}

/// Induced subframe on the survivors; no law checking is performed.
pub fn restrict_frame(
    frame: &LabelledFrame,
    survivors: &[String],
) -> Result<LabelledFrame, FrameError> {
    let mut keep = vec![false; frame.state_count()];
    for name in survivors {
        let i = frame.state_index(name).ok_or_else(|| FrameError::UnknownState(name.clone()))?;
        keep[i as usize] = true;
    }
    let states: Vec<String> =
        frame.states.iter().filter(|s| keep[frame.index[*s] as usize]).cloned().collect();
    let relations: BTreeMap<Coalition, Vec<(String, String)>> = frame
        .relations
        .iter()
        .map(|(&c, pairs)| {
            let kept = pairs
                .iter()
                .filter(|&&(a, b)| keep[a as usize] && keep[b as usize])
                .map(|&(a, b)| {
                    (frame.state_name(a).to_string(), frame.state_name(b).to_string())
                })
                .collect();
            (c, kept)
        })
        .collect();
    LabelledFrame::new(frame.n, states, relations)
}

/// Closure scan without the law precondition: first surviving union edge
/// with no surviving midpoint, state pair first, then label pair.
pub(crate) fn closure_scan(
    frame: &LabelledFrame,
    idxs: &[u32],
) -> Option<(u32, Coalition, Coalition, u32)> {
    let labels = Coalition::all(frame.n);
    for &s in idxs {
        for &t in idxs {
            for &c in &labels {
                for &d in &labels {
                    if !frame.related(c.union(d), s, t) {
                        continue;
                    }
                    let has_mid =
                        idxs.iter().any(|&u| frame.related(c, s, u) && frame.related(d, u, t));
                    if !has_mid {
                        return Some((s, c, d, t));
                    }
                }
            }
        }
    }
    None
}

pub(crate) fn resolve_survivors(
    frame: &LabelledFrame,
    survivors: &[String],
) -> Result<Vec<u32>, FrameError> {
    let mut idxs = Vec::with_capacity(survivors.len());
    for name in survivors {
        idxs.push(
            frame.state_index(name).ok_or_else(|| FrameError::UnknownState(name.clone()))?,
        );
    }
    idxs.sort_unstable();
    idxs.dedup();
    Ok(idxs)
}

/// Factor closure of a survivor set: every surviving union edge must keep a
/// surviving midpoint. Scan order is state-pair first, then label pair.
pub fn factor_closure_check(
    frame: &LabelledFrame,
    survivors: &[String],
) -> Result<FactorClosureVerdict, FrameError> {
    require_dev(frame)?;
    let idxs = resolve_survivors(frame, survivors)?;
    match closure_scan(frame, &idxs) {
        Some((s, c, d, t)) => Ok(FactorClosureVerdict {
            closed: false,
            missing: Some((
                frame.state_name(s).to_string(),
                c,
                d,
                frame.state_name(t).to_string(),
            )),
        }),
        None => Ok(FactorClosureVerdict { closed: true, missing: None }),
    }
}

fn valid_state_id(id: &str) -> bool {
    !id.is_empty()
        && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.' || c == '-')
}

/// Parses the line-based FRAME format.
pub fn parse_frame(text: &str) -> Result<LabelledFrame, FrameError> {
    let mut n: Option<usize> = None;
    let mut states: Option<Vec<String>> = None;
    let mut relations: BTreeMap<Coalition, Vec<(String, String)>> = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| FrameError::Parse { line: lineno + 1, message };
        if let Some(rest) = line.strip_prefix("agents:") {
            if n.is_some() {
                return Err(err("duplicate `agents:` line".to_string()));
            }
            let v: usize =
                rest.trim().parse().map_err(|_| err(format!("bad agent count `{rest}`")))?;
            if v == 0 || v > MAX_AGENTS {
                return Err(err(format!("agent count must be 1..={MAX_AGENTS}")));
            }
            n = Some(v);
        } else if let Some(rest) = line.strip_prefix("states:") {
            if states.is_some() {
                return Err(err("duplicate `states:` line".to_string()));
            }
            let ids: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
            for id in &ids {
                if !valid_state_id(id) {
                    return Err(err(format!("bad state id `{id}`")));
                }
            }
            states = Some(ids);
        } else if let Some(rest) = line.strip_prefix("rel") {
            let n = n.ok_or_else(|| err("`rel` before `agents:`".to_string()))?;
            if states.is_none() {
                return Err(err("`rel` before `states:`".to_string()));
            }
            let (label_text, tail) = rest
                .split_once(':')
                .ok_or_else(|| err("missing `:` after relation label".to_string()))?;
            let label = Coalition::parse(label_text.trim(), n)
                .map_err(|e| err(format!("bad label: {e}")))?;
            if label.is_empty() {
                return Err(err("`rel {}:` is forbidden; identity is implied".to_string()));
            }
            if relations.contains_key(&label) {
                return Err(err(format!("duplicate relation line for {label}")));
            }
            let mut pairs = Vec::new();
            for tok in tail.split_whitespace() {
                let inner = tok
                    .strip_prefix('(')
                    .and_then(|s| s.strip_suffix(')'))
                    .ok_or_else(|| err(format!("bad pair `{tok}`")))?;
                let (a, b) =
                    inner.split_once(',').ok_or_else(|| err(format!("bad pair `{tok}`")))?;
                pairs.push((a.trim().to_string(), b.trim().to_string()));
            }
            relations.insert(label, pairs);
        } else {
            return Err(err(format!("unrecognized line `{line}`")));
        }
    }
    let n = n.ok_or(FrameError::Parse { line: 0, message: "missing `agents:` line".into() })?;
    let states =
        states.ok_or(FrameError::Parse { line: 0, message: "missing `states:` line".into() })?;
    for c in Coalition::all(n) {
        if !c.is_empty() && !relations.contains_key(&c) {
            return Err(FrameError::Parse {
                line: 0,
                message: format!("missing relation line for non-empty label {c}"),
            });
        }
    }
    LabelledFrame::new(n, states, relations)
}

/// Prints a frame in the FRAME format with sorted pair lists.
pub fn format_frame(frame: &LabelledFrame) -> String {
    let mut out = String::new();
    out.push_str(&format!("agents: {}\n", frame.n));
    out.push_str(&format!("states: {}\n", frame.states.join(" ")));
    for c in Coalition::all(frame.n) {
        if c.is_empty() {
            continue;
        }
        let pairs: Vec<String> = frame
            .relation_pairs(c)
            .iter()
            .map(|&(a, b)| format!("({},{})", frame.state_name(a), frame.state_name(b)))
            .collect();
        out.push_str(&format!("rel {c}: {}\n", pairs.join(" ")));
    }
    out
}

/// The concrete 2x2 report square used throughout the tests: states named by
/// coordinates, relations by coordinate agreement.
#[cfg(test)]
pub(crate) fn report_square() -> LabelledFrame {
    crate::frame::parse_frame(
        "agents: 2\n\
         states: s00 s10 s01 s11\n\
         rel {1}: (s00,s10) (s10,s00) (s01,s11) (s11,s01)\n\
         rel {2}: (s00,s01) (s01,s00) (s10,s11) (s11,s10)\n\
         rel {1,2}: (s00,s10) (s10,s00) (s01,s11) (s11,s01) (s00,s01) (s01,s00) (s10,s11) (s11,s10) (s00,s11) (s11,s00) (s10,s01) (s01,s10)\n",
    )
    .unwrap()
}

#[cfg(test)]
pub(crate) fn two_state_universal() -> LabelledFrame {
    crate::frame::parse_frame(
        "agents: 2\n\
         states: a b\n\
         rel {1}: (a,b) (b,a)\n\
         rel {2}: (a,b) (b,a)\n\
         rel {1,2}: (a,b) (b,a)\n",
    )
    .unwrap()
}

//! Witness records, typed replay, boundary-row extension audits, and
//! update-safety audits over public deletions.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::choice::domain::Domain;
use crate::choice::order::{Alternatives, Profile};
use crate::choice::rule::Rule;
use crate::choice::ChoiceError;
use crate::coalition::Coalition;
use crate::frame::FrameError;

/// Row guard for materialized survivor scans.
pub const SURVIVOR_BUDGET: usize = 2_048;

#[derive(Debug, Error)]
pub enum AuditError {
    #[error("malformed witness: {0}")]
    MalformedWitness(String),
    #[error("not an extension: {0}")]
    NotAnExtension(String),
    #[error("survivor scan over {rows} rows exceeds the budget of {budget}")]
    StateBudgetExceeded { rows: usize, budget: usize },
    #[error("survivor row `{0}` is not admissible in the report domain")]
    SurvivorOffDomain(String),
    #[error("witness parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Choice(#[from] ChoiceError),
    #[error(transparent)]
    Frame(#[from] FrameError),
}

/// A stored strategic event: the tuple (R, P, C, Q, x, y) plus the free-form
/// input-mode string. Agreement outside the coalition is enforced at
/// construction, as is coalition non-emptiness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessRecord {
    pub true_profile: Profile,
    pub current: Profile,
    pub coalition: Coalition,
    pub deviated: Profile,
    pub current_outcome: u8,
    pub deviated_outcome: u8,
    pub mode: String,
}

impl WitnessRecord {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        true_profile: Profile,
        current: Profile,
        coalition: Coalition,
        deviated: Profile,
        current_outcome: u8,
        deviated_outcome: u8,
        mode: impl Into<String>,
    ) -> Result<WitnessRecord, AuditError> {
        let n = true_profile.len();
        if coalition.is_empty() {
            return Err(AuditError::MalformedWitness("coalition is empty".into()));
        }
        if current.len() != n || deviated.len() != n {
            return Err(AuditError::MalformedWitness("profile lengths disagree".into()));
        }
        if !coalition.is_subset(Coalition::grand(n)) {
            return Err(AuditError::MalformedWitness(format!(
                "coalition {coalition} exceeds the agent set {{1..{n}}}"
            )));
        }
        if !deviated.agrees_outside(&current, coalition) {
            return Err(AuditError::MalformedWitness(
                "deviated report changes coordinates outside the coalition".into(),
            ));
        }
        Ok(WitnessRecord {
            true_profile,
            current,
            coalition,
            deviated,
            current_outcome,
            deviated_outcome,
            mode: mode.into(),
        })
    }

    pub fn agent_count(&self) -> usize {
        self.true_profile.len()
    }
}

/// The seven canonical replay statuses, in pseudocode test order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReplayStatus {
    WelfareOutsideDomain,
    EdgeDeleted,
    RuleValueChanged,
    SuccessorNotAdmitted,
    WelfareComparisonChanged,
    UnsafeUpdate,
    SameManipulationWitness,
}

impl fmt::Display for ReplayStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ReplayStatus::WelfareOutsideDomain => "welfare-outside-domain",
            ReplayStatus::EdgeDeleted => "edge-deleted",
            ReplayStatus::RuleValueChanged => "rule-value-changed",
            ReplayStatus::SuccessorNotAdmitted => "successor-not-admitted",
            ReplayStatus::WelfareComparisonChanged => "welfare-comparison-changed",
            ReplayStatus::UnsafeUpdate => "unsafe-update",
            ReplayStatus::SameManipulationWitness => "same-manipulation-witness",
        };
        f.write_str(name)
    }
}

/// Missing factor midpoint found by an update-safety scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MissingMidpoint {
    pub from: Profile,
    pub first: Coalition,
    pub second: Coalition,
    pub to: Profile,
}

#[derive(Debug, Clone)]
pub struct ReplayOutcome {
    pub status: ReplayStatus,
    /// True when the deviated report lies in the declared extension rows;
    /// meaningful only on `SameManipulationWitness`.
    pub boundary_flag: bool,
    pub missing: Option<MissingMidpoint>,
}

impl ReplayOutcome {
    fn status_only(status: ReplayStatus) -> ReplayOutcome {
        ReplayOutcome { status, boundary_flag: false, missing: None }
    }

    /// Human-facing status label; the boundary success case prints as
    /// `boundary-witness` while the machine status stays canonical.
    pub fn human_label(&self) -> String {
        if self.status == ReplayStatus::SameManipulationWitness && self.boundary_flag {
            "boundary-witness".to_string()
        } else {
            self.status.to_string()
        }
    }
}

/// The environment a witness is replayed against.
#[derive(Debug, Clone)]
pub struct AuditEnv<'a> {
    pub rule: &'a Rule,
    pub true_domain: &'a Domain,
    pub report_domain: &'a Domain,
    /// Listed public survivor set; absent means no deletion is in play.
    pub survivors: Option<&'a [Profile]>,
    pub n: usize,
}

impl AuditEnv<'_> {
    fn in_overlay(&self, p: &Profile) -> bool {
        self.rule.overlay.as_ref().is_some_and(|o| o.contains_key(p))
    }

    /// Admissible report rows: the report domain plus declared extension
    /// rows, intersected with the survivor set when one is declared.
    fn admissible_report(&self, p: &Profile) -> bool {
        let base = self.report_domain.contains(p, self.rule.m()) || self.in_overlay(p);
        base && self.survivors.map_or(true, |s| s.contains(p))
    }
}

/// Weak-improvement-for-all plus strict-for-some, judged at the true profile.
pub fn improves(r: &Profile, c: Coalition, x: u8, y: u8, all_strict: bool) -> bool {
    if x == y {
        return false;
    }
    let members = c.members();
    if all_strict {
        members.iter().all(|&i| r.order(i).prefers(y, x))
    } else {
        members.iter().all(|&i| r.order(i).prefers(y, x) || y == x)
            && members.iter().any(|&i| r.order(i).prefers(y, x))
    }
}

/// Replays a stored witness against an environment, returning the first
/// triggered status in pseudocode order.
pub fn replay_witness(w: &WitnessRecord, env: &AuditEnv) -> Result<ReplayOutcome, AuditError> {
    if w.agent_count() != env.n {
        return Err(AuditError::MalformedWitness(format!(
            "witness has {} agents, environment has {}",
            w.agent_count(),
            env.n
        )));
    }
    // 1. Welfare profile admissible?
    if !env.true_domain.contains(&w.true_profile, env.rule.m()) {
        return Ok(ReplayOutcome::status_only(ReplayStatus::WelfareOutsideDomain));
    }
    // 2. Both report rows admissible?
    if !env.admissible_report(&w.current) || !env.admissible_report(&w.deviated) {
        return Ok(ReplayOutcome::status_only(ReplayStatus::EdgeDeleted));
    }
    // 3-4. Recompute both rule values.
    let x = env.rule.apply(&w.current)?;
    let y = env.rule.apply(&w.deviated)?;
    if x != w.current_outcome || y != w.deviated_outcome {
        return Ok(ReplayOutcome::status_only(ReplayStatus::RuleValueChanged));
    }
    // 5. The labelled successor edge itself.
    if !w.deviated.agrees_outside(&w.current, w.coalition) {
        return Ok(ReplayOutcome::status_only(ReplayStatus::SuccessorNotAdmitted));
    }
    // 6. Improvement at the unchanged true profile.
    if !improves(&w.true_profile, w.coalition, x, y, false) {
        return Ok(ReplayOutcome::status_only(ReplayStatus::WelfareComparisonChanged));
    }
    // 7. Factor closure of the surviving fibre, when a deletion is declared.
    if let Some(survivors) = env.survivors {
        let rows: Vec<Profile> = dedup_rows(survivors);
        let scan_rows = if rows.len() > SURVIVOR_BUDGET {
            // Fallback scope: the corner hull of the witness edge.
            corner_hull(&w.current, &w.deviated)
                .into_iter()
                .filter(|p| rows.contains(p))
                .collect()
        } else {
            rows
        };
        if let Some(missing) = fibre_closure_scan(&scan_rows, env.n) {
            return Ok(ReplayOutcome {
                status: ReplayStatus::UnsafeUpdate,
                boundary_flag: false,
                missing: Some(missing),
            });
        }
    }
    // 8. The witness replays; flag boundary rows of a declared extension.
    Ok(ReplayOutcome {
        status: ReplayStatus::SameManipulationWitness,
        boundary_flag: env.in_overlay(&w.deviated),
        missing: None,
    })
}

fn dedup_rows(rows: &[Profile]) -> Vec<Profile> {
    let mut out: Vec<Profile> = Vec::with_capacity(rows.len());
    for r in rows {
        if !out.contains(r) {
            out.push(r.clone());
        }
    }
    out
}

/// All coordinate mixes of two reports (the corner hull of the edge).
pub fn corner_hull(p: &Profile, q: &Profile) -> Vec<Profile> {
    let diff = p.diff(q).members();
    let mut out = Vec::with_capacity(1 << diff.len());
    for bits in 0..(1u32 << diff.len()) {
        let mut row = p.clone();
        for (k, &agent) in diff.iter().enumerate() {
            if bits >> k & 1 == 1 {
                row = row.with_order(agent, q.order(agent).clone());
            }
        }
        out.push(row);
    }
    out
}

/// Exact-composition scan over a listed survivor fibre. Only the reverse
/// composition row can fail on a coordinate-agreement fibre, so the scan
/// looks for a surviving union edge with no surviving midpoint, state pair
/// first, then label pair in size-then-lex order.
pub fn fibre_closure_scan(rows: &[Profile], n: usize) -> Option<MissingMidpoint> {
    let labels = Coalition::all(n);
    let diffs: Vec<Vec<Coalition>> =
        rows.iter().map(|a| rows.iter().map(|b| a.diff(b)).collect()).collect();
    for (i, a) in rows.iter().enumerate() {
        for (j, b) in rows.iter().enumerate() {
            for &c in &labels {
                for &d in &labels {
                    if !diffs[i][j].is_subset(c.union(d)) {
                        continue;
                    }
                    let has_mid = (0..rows.len())
                        .any(|k| diffs[i][k].is_subset(c) && diffs[k][j].is_subset(d));
                    if !has_mid {
                        return Some(MissingMidpoint {
                            from: a.clone(),
                            first: c,
                            second: d,
                            to: b.clone(),
                        });
                    }
                }
            }
        }
    }
    None
}

#[derive(Debug, Clone)]
pub struct UpdateSafetyVerdict {
    pub safe: bool,
    pub missing: Option<MissingMidpoint>,
}

/// Update-safety audit for a public deletion: the restriction of the report
/// fibre to the survivors must itself satisfy the deviation laws.
pub fn update_safety_audit(
    rule: &Rule,
    true_profile: &Profile,
    report_domain: &Domain,
    survivors: &[Profile],
    corners: Option<&[Profile]>,
) -> Result<UpdateSafetyVerdict, AuditError> {
    let n = true_profile.len();
    let m = rule.m();
    for row in survivors {
        let admissible = report_domain.contains(row, m)
            || rule.overlay.as_ref().is_some_and(|o| o.contains_key(row));
        if !admissible {
            return Err(AuditError::SurvivorOffDomain(row.to_string()));
        }
    }
    let rows = dedup_rows(survivors);
    let scan_rows = if rows.len() > SURVIVOR_BUDGET {
        match corners {
            Some(cs) => cs.iter().filter(|p| rows.contains(p)).cloned().collect(),
            None => {
                return Err(AuditError::StateBudgetExceeded {
                    rows: rows.len(),
                    budget: SURVIVOR_BUDGET,
                })
            }
        }
    } else {
        rows
    };
    let missing = fibre_closure_scan(&scan_rows, n);
    Ok(UpdateSafetyVerdict { safe: missing.is_none(), missing })
}

/// One failing boundary row: (R, R, C, Q, f(R), g(Q)).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryRecord {
    pub true_profile: Profile,
    pub coalition: Coalition,
    pub deviated: Profile,
    pub f_of_r: u8,
    pub g_of_q: u8,
}

impl BoundaryRecord {
    /// Normalized key for set comparisons.
    pub fn key(&self) -> (Profile, Coalition, Profile) {
        (self.true_profile.clone(), self.coalition, self.deviated.clone())
    }
}

fn extension_extras(
    ext: &Rule,
    report_domain: &Domain,
    report_domain_prime: Option<&Domain>,
    n: usize,
) -> Result<Vec<(Profile, u8)>, AuditError> {
    let m = ext.m();
    if let Some(prime) = report_domain_prime {
        let all = prime.enumerate(n, m)?;
        let mut extras = Vec::new();
        for p in all {
            if !report_domain.contains(&p, m) {
                let a = ext.apply(&p)?;
                extras.push((p, a));
            }
        }
        return Ok(extras);
    }
    if ext.overlay.is_some() {
        let extras = ext.extension_rows();
        if let Some((p, _)) = extras.iter().find(|(p, _)| report_domain.contains(p, m)) {
            return Err(AuditError::NotAnExtension(format!(
                "overlay row `{p}` lies inside the base report domain"
            )));
        }
        return Ok(extras);
    }
    if let crate::choice::rule::RuleKind::Table { rows } = &ext.kind {
        return Ok(rows
            .iter()
            .filter(|(p, _)| !report_domain.contains(p, m))
            .map(|(p, &a)| (p.clone(), a))
            .collect());
    }
    // A formula rule with no overlay and no declared larger domain adds
    // no rows: the extension coincides with the base.
    Ok(Vec::new())
}

/// Scans only extension rows that are one-coalition deviations from some
/// sincere true profile, emitting one record per failing (R, C, Q) triple.
/// The extended report domain defaults to the base domain plus the
/// extension's own overlay or table rows; pass it explicitly when the
/// extension is a total formula rule over a larger declared domain.
pub fn boundary_audit(
    base: &Rule,
    ext: &Rule,
    true_domain: &Domain,
    report_domain: &Domain,
    report_domain_prime: Option<&Domain>,
    n: usize,
    max_coalition: Option<usize>,
) -> Result<Vec<BoundaryRecord>, AuditError> {
    let m = base.m();
    if base.alternatives != ext.alternatives {
        return Err(AuditError::NotAnExtension("alternative universes differ".into()));
    }
    if !true_domain.subset_of(report_domain, n, m)? {
        return Err(AuditError::Choice(ChoiceError::TruthNotAdmissible));
    }
    // Extension check: the two rules must agree on the base report domain
    // (on all of it when enumerable, on the sincere rows otherwise).
    let check_rows = match report_domain.enumerate(n, m) {
        Ok(rows) => rows,
        Err(ChoiceError::StateBudgetExceeded { .. }) => true_domain.enumerate(n, m)?,
        Err(e) => return Err(e.into()),
    };
    for p in &check_rows {
        if base.apply(p)? != ext.apply(p)? {
            return Err(AuditError::NotAnExtension(format!(
                "rules disagree at on-domain row `{p}`"
            )));
        }
    }

    let extras = extension_extras(ext, report_domain, report_domain_prime, n)?;
    let true_rows = true_domain.enumerate(n, m)?;
    let max = max_coalition.unwrap_or(n);
    let mut records = Vec::new();
    let mut seen: BTreeMap<(Profile, Coalition, Profile), ()> = BTreeMap::new();
    for r in &true_rows {
        let x = base.apply(r)?;
        for c in Coalition::all(n) {
            if c.is_empty() || c.len() > max {
                continue;
            }
            for (q, y) in &extras {
                if !q.agrees_outside(r, c) {
                    continue;
                }
                if improves(r, c, x, *y, false)
                    && seen.insert((r.clone(), c, q.clone()), ()).is_none()
                {
                    records.push(BoundaryRecord {
                        true_profile: r.clone(),
                        coalition: c,
                        deviated: q.clone(),
                        f_of_r: x,
                        g_of_q: *y,
                    });
                }
            }
        }
    }
    Ok(records)
}

/// Parses the WITNESS block format.
pub fn parse_witness(
    text: &str,
    alts: &Alternatives,
) -> Result<WitnessRecord, AuditError> {
    let mut fields: BTreeMap<&str, (usize, String)> = BTreeMap::new();
    let mut saw_header = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line == "witness" {
            if saw_header {
                return Err(AuditError::Parse {
                    line: lineno + 1,
                    message: "duplicate `witness` header".into(),
                });
            }
            saw_header = true;
            continue;
        }
        let (key, value) = line.split_once(':').ok_or(AuditError::Parse {
            line: lineno + 1,
            message: format!("expected `key: value`, got `{line}`"),
        })?;
        let key = key.trim();
        if !["true", "current", "coalition", "deviated", "x", "y", "mode"].contains(&key) {
            return Err(AuditError::Parse {
                line: lineno + 1,
                message: format!("unknown key `{key}`"),
            });
        }
        if fields.insert(key, (lineno + 1, value.trim().to_string())).is_some() {
            return Err(AuditError::Parse {
                line: lineno + 1,
                message: format!("duplicate key `{key}`"),
            });
        }
    }
    if !saw_header {
        return Err(AuditError::Parse { line: 0, message: "missing `witness` header".into() });
    }
    let take = |key: &str| -> Result<(usize, String), AuditError> {
        fields
            .get(key)
            .cloned()
            .ok_or(AuditError::Parse { line: 0, message: format!("missing `{key}:` line") })
    };
    let parse_profile = |key: &str| -> Result<Profile, AuditError> {
        let (line, value) = take(key)?;
        Profile::parse(&value, alts)
            .map_err(|e| AuditError::Parse { line, message: e.to_string() })
    };
    let true_profile = parse_profile("true")?;
    let current = parse_profile("current")?;
    let deviated = parse_profile("deviated")?;
    let n = true_profile.len();
    let (cl, cv) = take("coalition")?;
    let coalition = Coalition::parse(&cv, n)
        .map_err(|e| AuditError::Parse { line: cl, message: e.to_string() })?;
    let (xl, xv) = take("x")?;
    let x = alts.index_of(&xv).map_err(|e| AuditError::Parse { line: xl, message: e.to_string() })?;
    let (yl, yv) = take("y")?;
    let y = alts.index_of(&yv).map_err(|e| AuditError::Parse { line: yl, message: e.to_string() })?;
    let mode = fields.get("mode").map(|(_, v)| v.clone()).unwrap_or_default();
    WitnessRecord::new(true_profile, current, coalition, deviated, x, y, mode)
}

pub fn format_witness(w: &WitnessRecord, alts: &Alternatives) -> String {
    format!(
        "witness\ntrue: {}\ncurrent: {}\ncoalition: {}\ndeviated: {}\nx: {}\ny: {}\nmode: {}\n",
        w.true_profile.display(alts),
        w.current.display(alts),
        w.coalition,
        w.deviated.display(alts),
        alts.name(w.current_outcome),
        alts.name(w.deviated_outcome),
        w.mode,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::choice::domain::generate_single_peaked;
    use crate::choice::order::LinearOrder;
    use crate::choice::rule::parse_rule;

    /// The five-agent median instance: axis a<b<c<d, sincere peaks
    /// (a, b, b, c, d), the off-axis report for agent 5, and the two single
    /// moves that span the deleted mixed corner.
    pub(crate) struct MedianCase {
        pub rule: Rule,
        pub sp: Domain,
        pub r: Profile,
        pub q: Profile,
        pub corner_b: Profile,
        pub corner_d: Profile,
        pub witness: WitnessRecord,
    }

    pub(crate) fn median_case() -> MedianCase {
        let rule = parse_rule("rule median axis a < b < c < d").unwrap();
        let alts = rule.alternatives.clone();
        let sp = Domain::SinglePeaked { axis: vec![0, 1, 2, 3] };
        let r = Profile::parse(
            "a > b > c > d; b > a > c > d; b > c > a > d; c > b > d > a; d > c > b > a",
            &alts,
        )
        .unwrap();
        let q5 = LinearOrder::parse("d > b > c > a", &alts).unwrap();
        let q4 = LinearOrder::parse("d > c > b > a", &alts).unwrap();
        let q = r.with_order(5, q5.clone());
        let corner_b = r.with_order(4, q4.clone());
        let corner_d = corner_b.with_order(5, q5);
        let b = alts.index_of("b").unwrap();
        let c = alts.index_of("c").unwrap();
        let mut overlay = BTreeMap::new();
        overlay.insert(q.clone(), c);
        let extended = rule.clone().with_overlay(overlay).unwrap();
        let witness =
            WitnessRecord::new(r.clone(), r.clone(), Coalition::singleton(5), q.clone(), b, c, "case-study")
                .unwrap();
        MedianCase { rule: extended, sp, r, q, corner_b, corner_d, witness }
    }

    #[test]
    fn sincere_profile_is_single_peaked_and_q_is_not() {
        let case = median_case();
        assert!(case.sp.contains(&case.r, 4));
        assert!(!case.sp.contains(&case.q, 4));
        assert!(case.sp.contains(&case.corner_b, 4));
        assert!(!case.sp.contains(&case.corner_d, 4));
        assert_eq!(generate_single_peaked(&[0, 1, 2, 3]).len(), 8);
    }

    #[test]
    fn restricted_replay_is_edge_deleted() {
        let case = median_case();
        let base = parse_rule("rule median axis a < b < c < d").unwrap();
        let env = AuditEnv {
            rule: &base,
            true_domain: &case.sp,
            report_domain: &case.sp,
            survivors: None,
            n: 5,
        };
        let outcome = replay_witness(&case.witness, &env).unwrap();
        assert_eq!(outcome.status, ReplayStatus::EdgeDeleted);
    }

    #[test]
    fn boundary_replay_flags_the_extension_row() {
        let case = median_case();
        let env = AuditEnv {
            rule: &case.rule,
            true_domain: &case.sp,
            report_domain: &case.sp,
            survivors: None,
            n: 5,
        };
        let outcome = replay_witness(&case.witness, &env).unwrap();
        assert_eq!(outcome.status, ReplayStatus::SameManipulationWitness);
        assert!(outcome.boundary_flag);
        assert_eq!(outcome.human_label(), "boundary-witness");
    }

    #[test]
    fn deletion_replay_is_unsafe_update() {
        let case = median_case();
        let survivors = vec![case.r.clone(), case.corner_b.clone(), case.q.clone()];
        let env = AuditEnv {
            rule: &case.rule,
            true_domain: &case.sp,
            report_domain: &case.sp,
            survivors: Some(&survivors),
            n: 5,
        };
        let outcome = replay_witness(&case.witness, &env).unwrap();
        assert_eq!(outcome.status, ReplayStatus::UnsafeUpdate);
        let missing = outcome.missing.unwrap();
        assert_eq!(missing.from, case.corner_b);
        assert_eq!(missing.first.members(), vec![5]);
        assert_eq!(missing.second.members(), vec![4]);
        assert_eq!(missing.to, case.q);
    }

    #[test]
    fn tampered_outcome_is_rule_value_changed() {
        let case = median_case();
        let mut tampered = case.witness.clone();
        tampered.deviated_outcome = case.rule.alternatives.index_of("d").unwrap();
        let env = AuditEnv {
            rule: &case.rule,
            true_domain: &case.sp,
            report_domain: &case.sp,
            survivors: None,
            n: 5,
        };
        let outcome = replay_witness(&tampered, &env).unwrap();
        assert_eq!(outcome.status, ReplayStatus::RuleValueChanged);
    }

    #[test]
    fn update_safety_finds_the_deleted_midpoint() {
        let case = median_case();
        // The public image lives in the extended row universe, where all
        // four corners are admissible.
        let ambient = Domain::Universal;
        let survivors = vec![case.r.clone(), case.corner_b.clone(), case.q.clone()];
        let verdict =
            update_safety_audit(&case.rule, &case.r, &ambient, &survivors, None).unwrap();
        assert!(!verdict.safe);
        let missing = verdict.missing.unwrap();
        assert_eq!(
            (missing.from, missing.first, missing.second, missing.to),
            (
                case.corner_b.clone(),
                Coalition::singleton(5),
                Coalition::singleton(4),
                case.q.clone()
            )
        );
        // Restoring the mixed corner repairs closure.
        let repaired = vec![case.r.clone(), case.corner_b.clone(), case.q.clone(), case.corner_d.clone()];
        assert!(update_safety_audit(&case.rule, &case.r, &ambient, &repaired, None)
            .unwrap()
            .safe);
    }

    #[test]
    fn update_safety_safe_cases() {
        let case = median_case();
        let alts = case.rule.alternatives.clone();
        // A full line: fix all reports but agent 1's.
        let sp_orders = generate_single_peaked(&[0, 1, 2, 3]);
        let line: Vec<Profile> =
            sp_orders.iter().map(|o| case.r.with_order(1, o.clone())).collect();
        let verdict =
            update_safety_audit(&case.rule, &case.r, &case.sp, &line, None).unwrap();
        assert!(verdict.safe);
        // Off-domain survivors are rejected up front.
        let off = Profile::parse(
            "d > b > c > a; d > b > c > a; d > b > c > a; d > b > c > a; d > b > c > a",
            &alts,
        )
        .unwrap();
        let err = update_safety_audit(&case.rule, &case.r, &case.sp, &[off], None).unwrap_err();
        assert!(matches!(err, AuditError::SurvivorOffDomain(_)));
    }

    #[test]
    fn boundary_audit_golden_record() {
        let case = median_case();
        let base = parse_rule("rule median axis a < b < c < d").unwrap();
        let d_listed = Domain::ProfileList { rows: vec![case.r.clone()] };
        let records =
            boundary_audit(&base, &case.rule, &d_listed, &case.sp, None, 5, Some(1)).unwrap();
        assert_eq!(records.len(), 1);
        let rec = &records[0];
        assert_eq!(rec.true_profile, case.r);
        assert_eq!(rec.coalition, Coalition::singleton(5));
        assert_eq!(rec.deviated, case.q);
        assert_eq!(rec.f_of_r, case.rule.alternatives.index_of("b").unwrap());
        assert_eq!(rec.g_of_q, case.rule.alternatives.index_of("c").unwrap());
    }

    #[test]
    fn boundary_audit_trivial_cases() {
        let case = median_case();
        let base = parse_rule("rule median axis a < b < c < d").unwrap();
        let d_listed = Domain::ProfileList { rows: vec![case.r.clone()] };
        // No extension rows: empty record list.
        let records = boundary_audit(&base, &base, &d_listed, &case.sp, None, 5, None).unwrap();
        assert!(records.is_empty());
        // Overlay whose outcome never beats the base outcome: empty list.
        let alts = base.alternatives.clone();
        let mut overlay = BTreeMap::new();
        overlay.insert(case.q.clone(), alts.index_of("b").unwrap());
        let harmless = base.clone().with_overlay(overlay).unwrap();
        let records =
            boundary_audit(&base, &harmless, &d_listed, &case.sp, None, 5, None).unwrap();
        assert!(records.is_empty());
    }

    #[test]
    fn not_an_extension_is_rejected() {
        let alts = Alternatives::from_strs(&["a", "b"]);
        let rows: Vec<Profile> = vec![Profile::parse("a > b; a > b", &alts).unwrap()];
        let m = Domain::ProfileList { rows: rows.clone() };
        let base = parse_rule("alternatives: a b\nrule constant a").unwrap();
        let other = parse_rule("alternatives: a b\nrule constant b").unwrap();
        let d = Domain::ProfileList { rows };
        let err = boundary_audit(&base, &other, &d, &m, None, 2, None).unwrap_err();
        assert!(matches!(err, AuditError::NotAnExtension(_)));
    }

    #[test]
    fn witness_text_round_trips() {
        let case = median_case();
        let alts = case.rule.alternatives.clone();
        let text = format_witness(&case.witness, &alts);
        let parsed = parse_witness(&text, &alts).unwrap();
        assert_eq!(parsed, case.witness);
        assert!(parse_witness("true: a > b; b > a\n", &alts).is_err());
    }

    #[test]
    fn malformed_witnesses_are_rejected() {
        let case = median_case();
        let alts = case.rule.alternatives.clone();
        // Deviation outside the coalition.
        let err = WitnessRecord::new(
            case.r.clone(),
            case.r.clone(),
            Coalition::singleton(4),
            case.q.clone(),
            0,
            1,
            "",
        )
        .unwrap_err();
        assert!(matches!(err, AuditError::MalformedWitness(_)));
        // Empty coalition.
        let err = WitnessRecord::new(
            case.r.clone(),
            case.r.clone(),
            Coalition::EMPTY,
            case.r.clone(),
            0,
            1,
            "",
        )
        .unwrap_err();
        assert!(matches!(err, AuditError::MalformedWitness(_)));
        let _ = alts;
    }

    #[test]
    fn corner_hull_spans_changed_coordinates() {
        let case = median_case();
        let hull = corner_hull(&case.corner_b, &case.q);
        assert_eq!(hull.len(), 4);
        assert!(hull.contains(&case.r));
        assert!(hull.contains(&case.corner_d));
    }
}

//! Enumeration-based strategy-proofness and group strategy-proofness checks.
//!
//! Scan order is fixed for reproducible first witnesses: true profiles in
//! lexicographic order of per-agent order indices, agents ascending (then
//! coalitions by size then lexicographically), reports in generator order.
//! The true-profile space is chunked across workers; the returned witness is
//! the globally first in scan order regardless of chunking.

use rayon::prelude::*;

use crate::audit::{improves, WitnessRecord};
use crate::choice::biprofile::successors_in;
use crate::choice::domain::Domain;
use crate::choice::order::Profile;
use crate::choice::rule::Rule;
use crate::choice::ChoiceError;
use crate::coalition::Coalition;

/// Cap on rule applications for a group scan without an explicit coalition
/// size bound.
pub const GROUP_SCAN_BUDGET: u128 = 50_000_000;

fn unilateral_reports(
    domain: &Domain,
    base: &Profile,
    agent: usize,
    m: usize,
) -> Result<Vec<Profile>, ChoiceError> {
    successors_in(domain, base, Coalition::singleton(agent), m)
}

/// Scans sincere states for a profitable unilateral misreport and returns
/// the first witness in scan order, if any.
pub fn check_strategy_proofness(
    rule: &Rule,
    true_domain: &Domain,
    report_domain: &Domain,
    n: usize,
) -> Result<Option<WitnessRecord>, ChoiceError> {
    let m = rule.m();
    if !true_domain.subset_of(report_domain, n, m)? {
        return Err(ChoiceError::TruthNotAdmissible);
    }
    let true_rows = true_domain.enumerate(n, m)?;
    true_rows
        .par_iter()
        .map(|r| witness_at(rule, report_domain, r, n))
        .find_map_first(|res| res.transpose())
        .transpose()
}

fn witness_at(
    rule: &Rule,
    report_domain: &Domain,
    r: &Profile,
    n: usize,
) -> Result<Option<WitnessRecord>, ChoiceError> {
    let m = rule.m();
    let x = rule.apply(r)?;
    for agent in 1..=n {
        for q in unilateral_reports(report_domain, r, agent, m)? {
            let y = rule.apply(&q)?;
            if y != x && r.order(agent).prefers(y, x) {
                let w = WitnessRecord::new(
                    r.clone(),
                    r.clone(),
                    Coalition::singleton(agent),
                    q,
                    x,
                    y,
                    "sp-enumeration",
                )
                .expect("scan emits well-formed witnesses");
                return Ok(Some(w));
            }
        }
    }
    Ok(None)
}

fn joint_count(domain: &Domain, c: Coalition, m: usize) -> u128 {
    match domain {
        Domain::ProfileList { rows } => rows.len() as u128,
        _ => c
            .members()
            .iter()
            .map(|&i| {
                domain.agent_reports(i, m).map(|s| s.len() as u128).unwrap_or(0)
            })
            .product(),
    }
    .max(1)
}

/// Scans sincere states for a profitable joint misreport over non-empty
/// coalitions up to the size bound. The default improvement convention is
/// weak-for-all plus strict-for-some; `all_strict` switches every member to
/// a strict improvement.
pub fn check_group_strategy_proofness(
    rule: &Rule,
    true_domain: &Domain,
    report_domain: &Domain,
    n: usize,
    max_coalition: Option<usize>,
    all_strict: bool,
) -> Result<Option<WitnessRecord>, ChoiceError> {
    let m = rule.m();
    if !true_domain.subset_of(report_domain, n, m)? {
        return Err(ChoiceError::TruthNotAdmissible);
    }
    let max = max_coalition.unwrap_or(n);
    let coalitions: Vec<Coalition> = Coalition::all(n)
        .into_iter()
        .filter(|c| !c.is_empty() && c.len() <= max)
        .collect();
    let true_count = true_domain.row_count(n, m);
    let per_profile: u128 =
        coalitions.iter().map(|&c| joint_count(report_domain, c, m)).sum();
    let work = true_count.saturating_mul(per_profile);
    if work > GROUP_SCAN_BUDGET {
        return Err(ChoiceError::CoalitionBudgetExceeded { needed: work, budget: GROUP_SCAN_BUDGET });
    }
    let true_rows = true_domain.enumerate(n, m)?;
    true_rows
        .par_iter()
        .map(|r| group_witness_at(rule, report_domain, r, &coalitions, all_strict))
        .find_map_first(|res| res.transpose())
        .transpose()
}

fn group_witness_at(
    rule: &Rule,
    report_domain: &Domain,
    r: &Profile,
    coalitions: &[Coalition],
    all_strict: bool,
) -> Result<Option<WitnessRecord>, ChoiceError> {
    let m = rule.m();
    let x = rule.apply(r)?;
    for &c in coalitions {
        for q in successors_in(report_domain, r, c, m)? {
            let y = rule.apply(&q)?;
            if improves(r, c, x, y, all_strict) {
                let w = WitnessRecord::new(
                    r.clone(),
                    r.clone(),
                    c,
                    q,
                    x,
                    y,
                    "group-enumeration",
                )
                .expect("scan emits well-formed witnesses");
                return Ok(Some(w));
            }
        }
    }
    Ok(None)
}

/// Exhaustively lists every group manipulation witness on small instances,
/// in scan order. This is the oracle side of the boundary-row comparisons.
pub fn enumerate_all_group_witnesses(
    rule: &Rule,
    true_domain: &Domain,
    report_domain: &Domain,
    n: usize,
    max_coalition: Option<usize>,
) -> Result<Vec<WitnessRecord>, ChoiceError> {
    let m = rule.m();
    if !true_domain.subset_of(report_domain, n, m)? {
        return Err(ChoiceError::TruthNotAdmissible);
    }
    let max = max_coalition.unwrap_or(n);
    let mut out = Vec::new();
    for r in true_domain.enumerate(n, m)? {
        let x = rule.apply(&r)?;
        for c in Coalition::all(n) {
            if c.is_empty() || c.len() > max {
                continue;
            }
            for q in successors_in(report_domain, &r, c, m)? {
                let y = rule.apply(&q)?;
                if improves(&r, c, x, y, false) {
                    out.push(
                        WitnessRecord::new(
                            r.clone(),
                            r.clone(),
                            c,
                            q,
                            x,
                            y,
                            "group-enumeration",
                        )
                        .expect("scan emits well-formed witnesses"),
                    );
                }
            }
        }
    }
    Ok(out)
}

/// The three classical conditions evaluated for one rule over the universal
/// domain: strategy-proofness, surjectivity, and per-agent non-dictatorship.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GsConditionReport {
    pub sp_holds: bool,
    pub onto_holds: bool,
    /// Per agent (1-based at index 0): true when the agent is NOT a dictator.
    pub non_dict_holds: Vec<bool>,
}

impl GsConditionReport {
    pub fn all_three_hold(&self) -> bool {
        self.sp_holds && self.onto_holds && self.non_dict_holds.iter().all(|&b| b)
    }
}

pub fn gs_condition_report(rule: &Rule, n: usize) -> Result<GsConditionReport, ChoiceError> {
    let m = rule.m();
    let rows = Domain::Universal.enumerate(n, m)?;
    let mut reached = vec![false; m];
    let mut dictator = vec![true; n];
    for row in &rows {
        let out = rule.apply(row)?;
        reached[out as usize] = true;
        for i in 1..=n {
            if row.order(i).top() != out {
                dictator[i - 1] = false;
            }
        }
    }
    let sp_holds =
        check_strategy_proofness(rule, &Domain::Universal, &Domain::Universal, n)?.is_none();
    Ok(GsConditionReport {
        sp_holds,
        onto_holds: reached.iter().all(|&b| b),
        non_dict_holds: dictator.into_iter().map(|d| !d).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::choice::rule::parse_rule;

    fn plurality() -> Rule {
        parse_rule("rule plurality tiebreak a > b > c").unwrap()
    }

    #[test]
    fn plurality_has_a_unilateral_witness() {
        let rule = plurality();
        let w = check_strategy_proofness(&rule, &Domain::Universal, &Domain::Universal, 3)
            .unwrap()
            .expect("plurality is manipulable");
        // Every reported witness must replay all of its fields.
        assert_eq!(rule.apply(&w.current).unwrap(), w.current_outcome);
        assert_eq!(rule.apply(&w.deviated).unwrap(), w.deviated_outcome);
        assert!(w
            .true_profile
            .order(w.coalition.members()[0])
            .prefers(w.deviated_outcome, w.current_outcome));
        // The classic one-vote-each tie manipulation is among all witnesses.
        let alts = rule.alternatives.clone();
        let r = Profile::parse("b > a > c; a > b > c; c > b > a", &alts).unwrap();
        let q = r.with_order(
            3,
            crate::choice::order::LinearOrder::parse("b > a > c", &alts).unwrap(),
        );
        let all = enumerate_all_group_witnesses(
            &rule,
            &Domain::Universal,
            &Domain::Universal,
            3,
            Some(1),
        )
        .unwrap();
        assert!(all.iter().any(|w| w.true_profile == r
            && w.deviated == q
            && w.coalition == Coalition::singleton(3)));
    }

    #[test]
    fn median_is_strategy_proof_on_single_peaked_reports() {
        let rule = parse_rule("rule median axis a < b < c").unwrap();
        let sp = Domain::SinglePeaked { axis: vec![0, 1, 2] };
        let w = check_strategy_proofness(&rule, &sp, &sp, 3).unwrap();
        assert!(w.is_none());
    }

    #[test]
    fn dictatorship_is_strategy_proof() {
        let rule = parse_rule("alternatives: a b c\nrule dictator 1").unwrap();
        let w = check_strategy_proofness(&rule, &Domain::Universal, &Domain::Universal, 2)
            .unwrap();
        assert!(w.is_none());
        let gw = check_group_strategy_proofness(
            &rule,
            &Domain::Universal,
            &Domain::Universal,
            2,
            None,
            false,
        )
        .unwrap();
        assert!(gw.is_none());
    }

    #[test]
    fn plurality_group_scan_finds_a_witness() {
        let rule = plurality();
        let w = check_group_strategy_proofness(
            &rule,
            &Domain::Universal,
            &Domain::Universal,
            3,
            None,
            false,
        )
        .unwrap();
        assert!(w.is_some());
    }

    #[test]
    fn median_group_scan_is_clean_on_small_instance() {
        let rule = parse_rule("rule median axis a < b < c").unwrap();
        let sp = Domain::SinglePeaked { axis: vec![0, 1, 2] };
        let w = check_group_strategy_proofness(&rule, &sp, &sp, 3, None, false).unwrap();
        assert!(w.is_none());
    }

    #[test]
    fn truth_not_admissible_is_refused() {
        let rule = parse_rule("rule median axis a < b < c").unwrap();
        let sp = Domain::SinglePeaked { axis: vec![0, 1, 2] };
        let err = check_strategy_proofness(&rule, &Domain::Universal, &sp, 3).unwrap_err();
        assert!(matches!(err, ChoiceError::TruthNotAdmissible));
    }

    #[test]
    fn gs_reports_for_the_three_reference_rules() {
        let plurality = plurality();
        let report = gs_condition_report(&plurality, 3).unwrap();
        assert!(!report.sp_holds);
        assert!(report.onto_holds);
        assert!(report.non_dict_holds.iter().all(|&b| b));
        assert!(!report.all_three_hold());

        let dict = parse_rule("alternatives: a b c\nrule dictator 1").unwrap();
        let report = gs_condition_report(&dict, 2).unwrap();
        assert!(report.sp_holds);
        assert!(report.onto_holds);
        assert!(!report.non_dict_holds[0]);
        assert!(report.non_dict_holds[1]);

        let constant = parse_rule("alternatives: a b c\nrule constant a").unwrap();
        let report = gs_condition_report(&constant, 2).unwrap();
        assert!(report.sp_holds);
        assert!(!report.onto_holds);
    }

    #[test]
    fn witness_equals_first_in_scan_order() {
        // The parallel scan must return the same witness as a sequential one.
        let rule = plurality();
        let sequential = Domain::Universal
            .enumerate(3, 3)
            .unwrap()
            .iter()
            .find_map(|r| witness_at(&rule, &Domain::Universal, r, 3).unwrap());
        let parallel =
            check_strategy_proofness(&rule, &Domain::Universal, &Domain::Universal, 3)
                .unwrap();
        assert_eq!(sequential, parallel);
    }
}

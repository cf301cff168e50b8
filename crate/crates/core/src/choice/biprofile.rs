//! Biprofile model construction: states are (true profile, report profile)
//! pairs, outcome atoms read the report coordinate, welfare atoms read the
//! true coordinate, and a coalition edge replaces only coalition reports.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::choice::domain::Domain;
use crate::choice::order::{Alternatives, Profile};
use crate::choice::rule::Rule;
use crate::choice::ChoiceError;
use crate::coalition::Coalition;
use crate::formula::{Atom, Formula};
use crate::frame::LabelledFrame;
use crate::model::{EvalError, ExplicitModel};

pub const DEFAULT_STATE_BUDGET: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuildMode {
    Explicit,
    Lazy,
}

#[derive(Debug)]
pub enum BiprofileModel {
    Explicit(ExplicitBiprofile),
    Lazy(LazyBiprofile),
}

impl BiprofileModel {
    pub fn state_count(&self) -> u128 {
        match self {
            BiprofileModel::Explicit(e) => e.model.frame().state_count() as u128,
            BiprofileModel::Lazy(l) => l.state_count(),
        }
    }
}

/// Fully materialized model with a state index (true-major, then report).
#[derive(Debug)]
pub struct ExplicitBiprofile {
    pub model: ExplicitModel,
    pub true_rows: Vec<Profile>,
    pub report_rows: Vec<Profile>,
    report_index: HashMap<Profile, usize>,
}

impl ExplicitBiprofile {
    pub fn state_index(&self, r: usize, p: usize) -> u32 {
        (r * self.report_rows.len() + p) as u32
    }

    pub fn state_of(&self, true_profile: &Profile, report: &Profile) -> Option<u32> {
        let r = self.true_rows.iter().position(|t| t == true_profile)?;
        let p = *self.report_index.get(report)?;
        Some(self.state_index(r, p))
    }

    /// Sincere states (R,R) for every true row admissible as a report.
    pub fn sincere_states(&self) -> Vec<u32> {
        self.true_rows
            .iter()
            .enumerate()
            .filter_map(|(r, t)| self.report_index.get(t).map(|&p| self.state_index(r, p)))
            .collect()
    }
}

/// Same successor contract as the explicit model, without materialization.
#[derive(Debug, Clone)]
pub struct LazyBiprofile {
    pub rule: Rule,
    pub true_domain: Domain,
    pub report_domain: Domain,
    pub n: usize,
}

impl LazyBiprofile {
    pub fn alternatives(&self) -> &Alternatives {
        &self.rule.alternatives
    }

    pub fn state_count(&self) -> u128 {
        let m = self.rule.m();
        self.true_domain.row_count(self.n, m) * self.report_domain.row_count(self.n, m)
    }

    pub fn contains_state(&self, true_profile: &Profile, report: &Profile) -> bool {
        let m = self.rule.m();
        self.true_domain.contains(true_profile, m) && self.report_domain.contains(report, m)
    }

    /// Admissible one-step report replacements for the coalition, in
    /// generator order. The true profile never changes.
    pub fn successors(&self, report: &Profile, c: Coalition) -> Result<Vec<Profile>, ChoiceError> {
        successors_in(&self.report_domain, report, c, self.rule.m())
    }

    /// Top-down evaluation at one state, memoized per (report, subformula).
    pub fn eval_at(
        &self,
        true_profile: &Profile,
        report: &Profile,
        formula: &Formula,
    ) -> Result<bool, ChoiceError> {
        let mut memo: HashMap<(Profile, Formula), bool> = HashMap::new();
        self.eval_rec(true_profile, report, formula, &mut memo)
    }

    fn eval_rec(
        &self,
        r: &Profile,
        p: &Profile,
        formula: &Formula,
        memo: &mut HashMap<(Profile, Formula), bool>,
    ) -> Result<bool, ChoiceError> {
        if let Some(&hit) = memo.get(&(p.clone(), formula.clone())) {
            return Ok(hit);
        }
        let value = match formula {
            Formula::Atom(a) => self.atom_at(r, p, a)?,
            Formula::Not(inner) => !self.eval_rec(r, p, inner, memo)?,
            Formula::And(l, rr) => {
                self.eval_rec(r, p, l, memo)? && self.eval_rec(r, p, rr, memo)?
            }
            Formula::Or(l, rr) => {
                self.eval_rec(r, p, l, memo)? || self.eval_rec(r, p, rr, memo)?
            }
            Formula::Implies(l, rr) => {
                !self.eval_rec(r, p, l, memo)? || self.eval_rec(r, p, rr, memo)?
            }
            Formula::Diamond(c, inner) => {
                let mut found = false;
                for q in self.successors(p, *c)? {
                    if self.eval_rec(r, &q, inner, memo)? {
                        found = true;
                        break;
                    }
                }
                found
            }
            Formula::Box(c, inner) => {
                let mut all = true;
                for q in self.successors(p, *c)? {
                    if !self.eval_rec(r, &q, inner, memo)? {
                        all = false;
                        break;
                    }
                }
                all
            }
        };
        memo.insert((p.clone(), formula.clone()), value);
        Ok(value)
    }

    fn atom_at(&self, r: &Profile, p: &Profile, atom: &Atom) -> Result<bool, ChoiceError> {
        let alts = self.alternatives();
        let unknown = || ChoiceError::Eval(EvalError::UnknownAtom(atom.clone()));
        match atom {
            Atom::Outcome(x) => {
                let xi = alts.index_of(x).map_err(|_| unknown())?;
                Ok(self.rule.apply(p)? == xi)
            }
            Atom::Pref(i, x, y) => {
                if *i == 0 || *i > self.n {
                    return Err(unknown());
                }
                let xi = alts.index_of(x).map_err(|_| unknown())?;
                let yi = alts.index_of(y).map_err(|_| unknown())?;
                Ok(r.order(*i).prefers(xi, yi))
            }
            Atom::Top(i, x) => {
                if *i == 0 || *i > self.n {
                    return Err(unknown());
                }
                let xi = alts.index_of(x).map_err(|_| unknown())?;
                Ok(r.order(*i).top() == xi)
            }
            Atom::Letter(_) => Err(unknown()),
        }
    }
}

/// Admissible coalition deviations from a report within a domain.
pub fn successors_in(
    domain: &Domain,
    report: &Profile,
    c: Coalition,
    m: usize,
) -> Result<Vec<Profile>, ChoiceError> {
    if c.is_empty() {
        return Ok(vec![report.clone()]);
    }
    match domain {
        Domain::ProfileList { rows } => Ok(rows
            .iter()
            .filter(|q| q.agrees_outside(report, c))
            .cloned()
            .collect()),
        _ => {
            let members = c.members();
            let lists: Vec<_> = members
                .iter()
                .map(|&i| {
                    domain.agent_reports(i, m).ok_or_else(|| {
                        ChoiceError::InvalidDomain(format!("no report set for agent {i}"))
                    })
                })
                .collect::<Result<_, _>>()?;
            let mut out = Vec::new();
            let mut idx = vec![0usize; members.len()];
            loop {
                let mut q = report.clone();
                for (k, &agent) in members.iter().enumerate() {
                    q = q.with_order(agent, lists[k][idx[k]].clone());
                }
                out.push(q);
                let mut k = members.len();
                loop {
                    if k == 0 {
                        return Ok(out);
                    }
                    k -= 1;
                    idx[k] += 1;
                    if idx[k] < lists[k].len() {
                        break;
                    }
                    idx[k] = 0;
                }
            }
        }
    }
}

/// The full atom universe of a biprofile model over `n` agents.
pub fn biprofile_universe(alts: &Alternatives, n: usize) -> BTreeSet<Atom> {
    let mut universe = BTreeSet::new();
    for x in alts.names() {
        universe.insert(Atom::Outcome(x.clone()));
        for i in 1..=n {
            universe.insert(Atom::Top(i, x.clone()));
            for y in alts.names() {
                if x != y {
                    universe.insert(Atom::Pref(i, x.clone(), y.clone()));
                }
            }
        }
    }
    universe
}

/// Builds the biprofile model for a rule and domain pair. Truthful reporting
/// must be admissible; explicit mode is refused above the state budget.
pub fn build_biprofile_model(
    rule: &Rule,
    true_domain: &Domain,
    report_domain: &Domain,
    n: usize,
    mode: BuildMode,
    state_budget: u128,
) -> Result<BiprofileModel, ChoiceError> {
    let m = rule.m();
    if !true_domain.subset_of(report_domain, n, m)? {
        return Err(ChoiceError::TruthNotAdmissible);
    }
    match mode {
        BuildMode::Lazy => Ok(BiprofileModel::Lazy(LazyBiprofile {
            rule: rule.clone(),
            true_domain: true_domain.clone(),
            report_domain: report_domain.clone(),
            n,
        })),
        BuildMode::Explicit => {
            let count = true_domain.row_count(n, m) * report_domain.row_count(n, m);
            if count > state_budget {
                return Err(ChoiceError::StateBudgetExceeded {
                    needed: count,
                    budget: state_budget,
                });
            }
            Ok(BiprofileModel::Explicit(build_explicit(
                rule,
                true_domain,
                report_domain,
                n,
            )?))
        }
    }
}

fn build_explicit(
    rule: &Rule,
    true_domain: &Domain,
    report_domain: &Domain,
    n: usize,
) -> Result<ExplicitBiprofile, ChoiceError> {
    let m = rule.m();
    let alts = &rule.alternatives;
    let true_rows = true_domain.enumerate(n, m)?;
    let report_rows = report_domain.enumerate(n, m)?;
    let report_index: HashMap<Profile, usize> =
        report_rows.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();

    let state_count = true_rows.len() * report_rows.len();
    let states: Vec<String> = (0..true_rows.len())
        .flat_map(|r| (0..report_rows.len()).map(move |p| format!("r{r}_p{p}")))
        .collect();

    let mut valuation: Vec<BTreeSet<Atom>> = Vec::with_capacity(state_count);
    let mut outcome_of: Vec<u8> = Vec::with_capacity(report_rows.len());
    for p in &report_rows {
        outcome_of.push(rule.apply(p)?);
    }
    for r in &true_rows {
        let mut welfare = BTreeSet::new();
        for i in 1..=n {
            let order = r.order(i);
            welfare.insert(Atom::Top(i, alts.name(order.top()).to_string()));
            for &x in order.ranking() {
                for &y in order.ranking() {
                    if x != y && order.prefers(x, y) {
                        welfare.insert(Atom::Pref(
                            i,
                            alts.name(x).to_string(),
                            alts.name(y).to_string(),
                        ));
                    }
                }
            }
        }
        for p in 0..report_rows.len() {
            let mut atoms = welfare.clone();
            atoms.insert(Atom::Outcome(alts.name(outcome_of[p]).to_string()));
            valuation.push(atoms);
        }
    }

    // One relation per non-empty label; a pair relates reports that differ
    // only inside the label, within one true-profile fibre.
    let mut relations: BTreeMap<Coalition, Vec<(u32, u32)>> = BTreeMap::new();
    for c in Coalition::all(n) {
        if c.is_empty() {
            continue;
        }
        let mut pairs = Vec::new();
        for r in 0..true_rows.len() {
            let mut groups: HashMap<Vec<&crate::choice::order::LinearOrder>, Vec<u32>> =
                HashMap::new();
            for (p, row) in report_rows.iter().enumerate() {
                let key: Vec<_> = (1..=n)
                    .filter(|&i| !c.contains(i))
                    .map(|i| row.order(i))
                    .collect();
                groups
                    .entry(key)
                    .or_default()
                    .push((r * report_rows.len() + p) as u32);
            }
            for group in groups.values() {
                for &a in group {
                    for &b in group {
                        if a != b {
                            pairs.push((a, b));
                        }
                    }
                }
            }
        }
        relations.insert(c, pairs);
    }

    let frame = LabelledFrame::from_indexed(n, states, relations)
        .map_err(|e| ChoiceError::InvalidDomain(e.to_string()))?;
    let model = ExplicitModel::new(frame, valuation, biprofile_universe(alts, n))
        .map_err(ChoiceError::Eval)?;
    Ok(ExplicitBiprofile { model, true_rows, report_rows, report_index })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::choice::rule::parse_rule;
    use crate::formula::parse_formula;
    use crate::model::evaluate;

    fn plurality() -> Rule {
        parse_rule("rule plurality tiebreak a > b > c").unwrap()
    }

    #[test]
    fn universal_state_count_is_l_to_the_2n() {
        let rule = plurality();
        let model = build_biprofile_model(
            &rule,
            &Domain::Universal,
            &Domain::Universal,
            3,
            BuildMode::Lazy,
            DEFAULT_STATE_BUDGET,
        )
        .unwrap();
        assert_eq!(model.state_count(), 46_656);
    }

    #[test]
    fn single_peaked_report_rows_for_the_median_instance() {
        let rule = parse_rule("rule median axis a < b < c < d").unwrap();
        let sp = Domain::SinglePeaked { axis: vec![0, 1, 2, 3] };
        assert_eq!(sp.row_count(5, 4), 32_768);
        let model =
            build_biprofile_model(&rule, &sp, &sp, 5, BuildMode::Lazy, DEFAULT_STATE_BUDGET)
                .unwrap();
        assert_eq!(model.state_count(), 32_768u128 * 32_768);
    }

    #[test]
    fn empty_coalition_successor_is_the_state_itself() {
        let rule = plurality();
        let lazy = LazyBiprofile {
            rule: rule.clone(),
            true_domain: Domain::Universal,
            report_domain: Domain::Universal,
            n: 2,
        };
        let p = Profile::parse("a > b > c; b > a > c", &rule.alternatives).unwrap();
        let succ = lazy.successors(&p, Coalition::EMPTY).unwrap();
        assert_eq!(succ, vec![p.clone()]);
        let one = lazy.successors(&p, Coalition::singleton(1)).unwrap();
        assert_eq!(one.len(), 6);
        assert!(one.iter().all(|q| q.agrees_outside(&p, Coalition::singleton(1))));
    }

    #[test]
    fn truth_must_be_admissible() {
        let rule = plurality();
        let list = Domain::ProfileList { rows: vec![] };
        let err = build_biprofile_model(
            &rule,
            &Domain::Universal,
            &list,
            2,
            BuildMode::Lazy,
            DEFAULT_STATE_BUDGET,
        )
        .unwrap_err();
        assert!(matches!(err, ChoiceError::TruthNotAdmissible));
    }

    #[test]
    fn explicit_mode_respects_the_budget() {
        let rule = plurality();
        let err = build_biprofile_model(
            &rule,
            &Domain::Universal,
            &Domain::Universal,
            3,
            BuildMode::Explicit,
            1000,
        )
        .unwrap_err();
        assert!(matches!(err, ChoiceError::StateBudgetExceeded { .. }));
    }

    #[test]
    fn explicit_and_lazy_agree_on_a_small_instance() {
        let rule = plurality();
        let explicit = match build_biprofile_model(
            &rule,
            &Domain::Universal,
            &Domain::Universal,
            2,
            BuildMode::Explicit,
            DEFAULT_STATE_BUDGET,
        )
        .unwrap()
        {
            BiprofileModel::Explicit(e) => e,
            _ => unreachable!(),
        };
        let lazy = LazyBiprofile {
            rule: rule.clone(),
            true_domain: Domain::Universal,
            report_domain: Domain::Universal,
            n: 2,
        };
        let phi =
            parse_formula("(o_a & <{2}>(o_b & p_2_b_a))", 2, rule.alternatives.names())
                .unwrap();
        let truth = evaluate(&explicit.model, &phi).unwrap();
        for (r, rp) in explicit.true_rows.iter().enumerate() {
            for (p, pp) in explicit.report_rows.iter().enumerate() {
                let idx = explicit.state_index(r, p);
                let lazy_val = lazy.eval_at(rp, pp, &phi).unwrap();
                assert_eq!(truth.contains(&idx), lazy_val, "state r{r}_p{p}");
            }
        }
    }

    #[test]
    fn explicit_relations_satisfy_the_report_algebra() {
        let rule = parse_rule("rule plurality tiebreak a > b").unwrap();
        let explicit = match build_biprofile_model(
            &rule,
            &Domain::Universal,
            &Domain::Universal,
            3,
            BuildMode::Explicit,
            DEFAULT_STATE_BUDGET,
        )
        .unwrap()
        {
            BiprofileModel::Explicit(e) => e,
            _ => unreachable!(),
        };
        let report = crate::frame::check_dev_laws(explicit.model.frame());
        assert!(report.passed, "violations: {:?}", report.violations);
    }
}

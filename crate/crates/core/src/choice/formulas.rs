//! Manipulation and axiom formula builders over a concrete alternative list.

use crate::choice::order::Alternatives;
use crate::choice::ChoiceError;
use crate::coalition::Coalition;
use crate::formula::{Atom, Formula};

fn strict_pref(agent: usize, y: &str, x: &str) -> Formula {
    Formula::Atom(Atom::Pref(agent, y.to_string(), x.to_string()))
}

/// The improvement condition for a deviation to `y` from `x`, judged at the
/// true profile: weakly better for every member and strictly better for at
/// least one. With alternatives concrete and `x != y`, weak preference
/// compiles to the strict atom, so no weak atom exists in the AST.
pub fn improvement_formula(
    c: Coalition,
    y: &str,
    x: &str,
    all_strict: bool,
) -> Result<Formula, ChoiceError> {
    if c.is_empty() {
        return Err(ChoiceError::EmptyCoalition);
    }
    let members = c.members();
    let weak: Vec<Formula> = members.iter().map(|&i| strict_pref(i, y, x)).collect();
    if all_strict || members.len() == 1 {
        return Ok(Formula::conjoin(weak));
    }
    let strict: Vec<Formula> = members.iter().map(|&i| strict_pref(i, y, x)).collect();
    Ok(Formula::conjoin(weak).and(Formula::disjoin(strict)))
}

/// The coalitional manipulation formula: a disjunction over ordered pairs
/// `x != y` of (current outcome `x`) and (improvement to `y`) and (`y`
/// reachable by changing only the coalition's reports).
pub fn build_manipulation_formula(
    c: Coalition,
    alts: &Alternatives,
) -> Result<Formula, ChoiceError> {
    build_manipulation_formula_with(c, alts, false)
}

pub fn build_manipulation_formula_with(
    c: Coalition,
    alts: &Alternatives,
    all_strict: bool,
) -> Result<Formula, ChoiceError> {
    if c.is_empty() {
        return Err(ChoiceError::EmptyCoalition);
    }
    let mut disjuncts = Vec::new();
    for x in alts.names() {
        for y in alts.names() {
            if x == y {
                continue;
            }
            let imp = improvement_formula(c, y, x, all_strict)?;
            let here = Formula::Atom(Atom::Outcome(x.clone()));
            let there = Formula::diamond(c, Formula::Atom(Atom::Outcome(y.clone())));
            disjuncts.push(here.and(imp.and(there)));
        }
    }
    Ok(Formula::disjoin(disjuncts))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxiomKind {
    /// No unanimously dominated alternative is chosen.
    Par,
    /// Every alternative is reachable by some joint report.
    Onto,
    /// The named agent's true top is always chosen (1-based).
    Dict(usize),
}

/// Literal transcriptions of the Pareto, surjectivity, and dictatorship
/// schemes over a concrete alternative list.
pub fn build_axiom_formula(kind: AxiomKind, alts: &Alternatives, n: usize) -> Formula {
    match kind {
        AxiomKind::Par => {
            let mut conjuncts = Vec::new();
            for x in alts.names() {
                for y in alts.names() {
                    if x == y {
                        continue;
                    }
                    let dominated =
                        Formula::conjoin((1..=n).map(|i| strict_pref(i, y, x)).collect());
                    let excluded = Formula::Atom(Atom::Outcome(x.clone())).not();
                    conjuncts.push(dominated.implies(excluded));
                }
            }
            Formula::conjoin(conjuncts)
        }
        AxiomKind::Onto => Formula::conjoin(
            alts.names()
                .iter()
                .map(|x| {
                    Formula::diamond(
                        Coalition::grand(n),
                        Formula::Atom(Atom::Outcome(x.clone())),
                    )
                })
                .collect(),
        ),
        AxiomKind::Dict(agent) => Formula::conjoin(
            alts.names()
                .iter()
                .map(|x| {
                    Formula::Atom(Atom::Top(agent, x.clone()))
                        .implies(Formula::Atom(Atom::Outcome(x.clone())))
                })
                .collect(),
        ),
    }
}

//! Explicit Kripke models over labelled frames and bottom-up evaluation.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::formula::{Atom, Formula};
use crate::frame::LabelledFrame;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("atom `{0}` is not interpretable in this model")]
    UnknownAtom(Atom),
    #[error("valuation shape does not match the frame: {0}")]
    BadValuation(String),
}

/// A frame plus a per-state set of true atoms drawn from a declared universe.
#[derive(Debug, Clone)]
pub struct ExplicitModel {
    frame: LabelledFrame,
    valuation: Vec<BTreeSet<Atom>>,
    universe: BTreeSet<Atom>,
}

impl ExplicitModel {
    pub fn new(
        frame: LabelledFrame,
        valuation: Vec<BTreeSet<Atom>>,
        universe: BTreeSet<Atom>,
    ) -> Result<ExplicitModel, EvalError> {
        if valuation.len() != frame.state_count() {
            return Err(EvalError::BadValuation(format!(
                "{} valuation rows for {} states",
                valuation.len(),
                frame.state_count()
            )));
        }
        for (i, atoms) in valuation.iter().enumerate() {
            if let Some(a) = atoms.iter().find(|a| !universe.contains(a)) {
                return Err(EvalError::BadValuation(format!(
                    "state `{}` claims atom `{a}` outside the declared universe",
                    frame.state_name(i as u32)
                )));
            }
        }
        Ok(ExplicitModel { frame, valuation, universe })
    }

    /// Model whose universe is exactly the letters mentioned in the valuation
    /// plus any extra letters supplied.
    pub fn with_letters(
        frame: LabelledFrame,
        valuation: Vec<BTreeSet<Atom>>,
        extra: &[String],
    ) -> Result<ExplicitModel, EvalError> {
        let mut universe: BTreeSet<Atom> = valuation.iter().flatten().cloned().collect();
        universe.extend(extra.iter().map(|l| Atom::Letter(l.clone())));
        ExplicitModel::new(frame, valuation, universe)
    }

    pub fn frame(&self) -> &LabelledFrame {
        &self.frame
    }

    pub fn universe(&self) -> &BTreeSet<Atom> {
        &self.universe
    }

    pub fn atoms_at(&self, state: u32) -> &BTreeSet<Atom> {
        &self.valuation[state as usize]
    }

    pub fn holds_at(&self, state: u32, atom: &Atom) -> bool {
        self.valuation[state as usize].contains(atom)
    }
}

/// Bottom-up truth-set computation, memoized per subformula for one call.
pub fn evaluate(model: &ExplicitModel, formula: &Formula) -> Result<BTreeSet<u32>, EvalError> {
    let mut memo: HashMap<Formula, BTreeSet<u32>> = HashMap::new();
    eval_rec(model, formula, &mut memo)
}

fn eval_rec(
    model: &ExplicitModel,
    formula: &Formula,
    memo: &mut HashMap<Formula, BTreeSet<u32>>,
) -> Result<BTreeSet<u32>, EvalError> {
    if let Some(hit) = memo.get(formula) {
        return Ok(hit.clone());
    }
    let states = 0..model.frame.state_count() as u32;
    let set: BTreeSet<u32> = match formula {
        Formula::Atom(a) => {
            if !model.universe.contains(a) {
                return Err(EvalError::UnknownAtom(a.clone()));
            }
            states.filter(|&s| model.holds_at(s, a)).collect()
        }
        Formula::Not(inner) => {
            let sub = eval_rec(model, inner, memo)?;
            states.filter(|s| !sub.contains(s)).collect()
        }
        Formula::And(l, r) => {
            let ls = eval_rec(model, l, memo)?;
            let rs = eval_rec(model, r, memo)?;
            ls.intersection(&rs).copied().collect()
        }
        Formula::Or(l, r) => {
            let ls = eval_rec(model, l, memo)?;
            let rs = eval_rec(model, r, memo)?;
            ls.union(&rs).copied().collect()
        }
        Formula::Implies(l, r) => {
            let ls = eval_rec(model, l, memo)?;
            let rs = eval_rec(model, r, memo)?;
            states.filter(|s| !ls.contains(s) || rs.contains(s)).collect()
        }
        Formula::Diamond(c, inner) => {
            let sub = eval_rec(model, inner, memo)?;
            states
                .filter(|&s| model.frame.successors(*c, s).iter().any(|t| sub.contains(t)))
                .collect()
        }
        Formula::Box(c, inner) => {
            let sub = eval_rec(model, inner, memo)?;
            states
                .filter(|&s| model.frame.successors(*c, s).iter().all(|t| sub.contains(t)))
                .collect()
        }
    };
    memo.insert(formula.clone(), set.clone());
    Ok(set)
}

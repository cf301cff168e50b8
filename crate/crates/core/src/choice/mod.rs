//! Linear orders, profiles, rules, domains, biprofile models, formula
//! builders, and enumeration-based manipulation checks.

pub mod biprofile;
pub mod domain;
pub mod formulas;
pub mod order;
pub mod rule;
pub mod sp;

use thiserror::Error;

pub use biprofile::{
    build_biprofile_model, BiprofileModel, BuildMode, ExplicitBiprofile, LazyBiprofile,
    DEFAULT_STATE_BUDGET,
};
pub use domain::{generate_single_peaked, is_single_peaked, Domain};
pub use formulas::{build_axiom_formula, build_manipulation_formula, AxiomKind};
pub use order::{all_orders, Alternatives, LinearOrder, Profile};
pub use rule::{parse_domain, parse_rule, Rule, RuleKind};
pub use sp::{
    check_group_strategy_proofness, check_strategy_proofness, enumerate_all_group_witnesses,
    gs_condition_report, GsConditionReport,
};

#[derive(Debug, Error)]
pub enum ChoiceError {
    #[error("report `{0}` is outside the rule's report domain")]
    OffDomainReport(String),
    #[error("truthful reporting is not admissible: the true domain is not contained in the report domain")]
    TruthNotAdmissible,
    #[error("state space of {needed} rows exceeds the budget of {budget}")]
    StateBudgetExceeded { needed: u128, budget: u128 },
    #[error("group scan of {needed} rule applications exceeds the budget of {budget}")]
    CoalitionBudgetExceeded { needed: u128, budget: u128 },
    #[error("the coalition must be non-empty")]
    EmptyCoalition,
    #[error("overlay row `{0}` collides with the base table")]
    OverlayOverlap(String),
    #[error("unknown alternative `{0}`")]
    UnknownAlternative(String),
    #[error("invalid order: {0}")]
    InvalidOrder(String),
    #[error("invalid rule: {0}")]
    InvalidRule(String),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Eval(#[from] crate::model::EvalError),
}

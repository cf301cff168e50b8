//! Finite audit layer for report-replacement deviation logic: labelled
//! frames with the deviation laws, a coalition-modal model checker,
//! social-choice manipulation audits, witness replay, typed-certificate
//! verification, and bounded scenario search.

mod bits;

pub mod audit;
pub mod certificate;
pub mod choice;
pub mod coalition;
pub mod formula;
pub mod frame;
pub mod model;
pub mod search;

pub use coalition::Coalition;
pub use formula::{Atom, Formula};
pub use frame::{DevLaw, DevReport, DevViolation, LabelledFrame};
pub use model::ExplicitModel;

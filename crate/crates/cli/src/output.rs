//! Report rendering: human, TSV, and JSON-lines forms of audit records.
//!
//! TSV is the audit-pipeline default: one record per line, a fixed status
//! column first, then the reproducibility fields (rule representation,
//! domains, generator, relation mode), then the record fields.

use bpdev_core::audit::{BoundaryRecord, MissingMidpoint, ReplayOutcome, WitnessRecord};
use bpdev_core::choice::{Alternatives, Domain, Rule};
use serde_json::json;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Human,
    Tsv,
    JsonLines,
}

impl Format {
    pub fn parse(text: &str) -> Option<Format> {
        match text {
            "human" => Some(Format::Human),
            "tsv" => Some(Format::Tsv),
            "json-lines" => Some(Format::JsonLines),
            _ => None,
        }
    }
}

/// The reproducibility columns every audit line carries.
pub struct AuditContext<'a> {
    pub rule: &'a Rule,
    pub true_domain: &'a Domain,
    pub report_domain: &'a Domain,
}

impl AuditContext<'_> {
    fn columns(&self) -> (String, String, String, String, String) {
        let alts = &self.rule.alternatives;
        (
            self.rule.descriptor(),
            self.true_domain.descriptor(alts),
            self.report_domain.descriptor(alts),
            self.report_domain.generator().to_string(),
            "on-demand".to_string(),
        )
    }
}

pub fn witness_line(
    format: Format,
    ctx: &AuditContext,
    witness: Option<&WitnessRecord>,
) -> String {
    let alts = &ctx.rule.alternatives;
    let (rule, true_dom, report_dom, generator, relations) = ctx.columns();
    match (format, witness) {
        (Format::Human, Some(w)) => format!(
            "witness found: coalition {} deviates from true profile [{}] via [{}], moving the outcome from {} to {}",
            w.coalition,
            w.true_profile.display(alts),
            w.deviated.display(alts),
            alts.name(w.current_outcome),
            alts.name(w.deviated_outcome),
        ),
        (Format::Human, None) => "no manipulation witness found".to_string(),
        (Format::Tsv, Some(w)) => format!(
            "witness\t{rule}\t{true_dom}\t{report_dom}\t{generator}\t{relations}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            w.true_profile.compact(alts),
            w.current.compact(alts),
            w.coalition,
            w.deviated.compact(alts),
            alts.name(w.current_outcome),
            alts.name(w.deviated_outcome),
            w.mode,
        ),
        (Format::Tsv, None) => format!(
            "none\t{rule}\t{true_dom}\t{report_dom}\t{generator}\t{relations}"
        ),
        (Format::JsonLines, w) => json!({
            "kind": if w.is_some() { "witness" } else { "none" },
            "rule": rule,
            "true_domain": true_dom,
            "report_domain": report_dom,
            "generator": generator,
            "relations": relations,
            "witness": w.map(|w| json!({
                "true": w.true_profile.compact(alts),
                "current": w.current.compact(alts),
                "coalition": w.coalition.to_string(),
                "deviated": w.deviated.compact(alts),
                "x": alts.name(w.current_outcome),
                "y": alts.name(w.deviated_outcome),
                "mode": w.mode,
            })),
        })
        .to_string(),
    }
}

fn missing_field(missing: &MissingMidpoint, alts: &Alternatives) -> String {
    format!(
        "({}|{}|{}|{})",
        missing.from.compact(alts),
        missing.first,
        missing.second,
        missing.to.compact(alts)
    )
}

pub fn replay_line(
    format: Format,
    ctx: &AuditContext,
    witness: &WitnessRecord,
    outcome: &ReplayOutcome,
) -> String {
    let alts = &ctx.rule.alternatives;
    let (rule, true_dom, report_dom, generator, relations) = ctx.columns();
    match format {
        Format::Human => match &outcome.missing {
            Some(m) => format!(
                "{}: midpoint between [{}] and [{}] via {} then {} has been deleted",
                outcome.human_label(),
                m.from.display(alts),
                m.to.display(alts),
                m.first,
                m.second,
            ),
            None => outcome.human_label(),
        },
        Format::Tsv => {
            let detail = outcome
                .missing
                .as_ref()
                .map(|m| missing_field(m, alts))
                .unwrap_or_else(|| "-".to_string());
            format!(
                "{}\t{rule}\t{true_dom}\t{report_dom}\t{generator}\t{relations}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                outcome.status,
                if outcome.boundary_flag { "boundary" } else { "-" },
                witness.true_profile.compact(alts),
                witness.current.compact(alts),
                witness.coalition,
                witness.deviated.compact(alts),
                alts.name(witness.current_outcome),
                alts.name(witness.deviated_outcome),
                detail,
            )
        }
        Format::JsonLines => json!({
            "kind": "replay",
            "status": outcome.status.to_string(),
            "boundary": outcome.boundary_flag,
            "label": outcome.human_label(),
            "rule": rule,
            "true_domain": true_dom,
            "report_domain": report_dom,
            "generator": generator,
            "relations": relations,
            "missing": outcome.missing.as_ref().map(|m| missing_field(m, alts)),
        })
        .to_string(),
    }
}

pub fn boundary_line(format: Format, ctx: &AuditContext, record: &BoundaryRecord) -> String {
    let alts = &ctx.rule.alternatives;
    let (rule, true_dom, report_dom, generator, relations) = ctx.columns();
    match format {
        Format::Human => format!(
            "boundary witness: coalition {} reaches row [{}] from sincere [{}]; outcome moves {} -> {}",
            record.coalition,
            record.deviated.display(alts),
            record.true_profile.display(alts),
            alts.name(record.f_of_r),
            alts.name(record.g_of_q),
        ),
        Format::Tsv => format!(
            "boundary-witness\t{rule}\t{true_dom}\t{report_dom}\t{generator}\t{relations}\t{}\t{}\t{}\t{}\t{}\t{}",
            record.true_profile.compact(alts),
            record.true_profile.compact(alts),
            record.coalition,
            record.deviated.compact(alts),
            alts.name(record.f_of_r),
            alts.name(record.g_of_q),
        ),
        Format::JsonLines => json!({
            "kind": "boundary-witness",
            "rule": rule,
            "true_domain": true_dom,
            "report_domain": report_dom,
            "generator": generator,
            "relations": relations,
            "true": record.true_profile.compact(alts),
            "coalition": record.coalition.to_string(),
            "deviated": record.deviated.compact(alts),
            "f_of_r": alts.name(record.f_of_r),
            "g_of_q": alts.name(record.g_of_q),
        })
        .to_string(),
    }
}

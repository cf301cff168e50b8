//! Command-line audit surface: deterministic reports, stable exit codes.
//!
//! Exit codes: 0 clean/accept, 1 input or verification rejection, 2 audit
//! found witnesses or an unsafe update.

mod inputs;
mod output;

use std::fs;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};

use bpdev_core::audit::{
    boundary_audit, parse_witness, replay_witness, update_safety_audit, AuditEnv, ReplayStatus,
};
use bpdev_core::certificate::{parse_certificate, verify_certificate};
use bpdev_core::choice::{
    check_group_strategy_proofness, check_strategy_proofness, generate_single_peaked,
    gs_condition_report, Alternatives, Domain, LazyBiprofile, Profile,
};
use bpdev_core::formula::parse_formula;
use bpdev_core::frame::{check_dev_laws, format_frame, parse_frame};
use bpdev_core::search::{
    run_scenario, Instance, Scenario, ScenarioKind, SearchOptions, SearchStatus,
};

use inputs::{load_domain, load_rule, load_survivors};
use output::{boundary_line, replay_line, witness_line, AuditContext, Format};

const EXIT_CLEAN: u8 = 0;
const EXIT_REJECT: u8 = 1;
const EXIT_FOUND: u8 = 2;

#[derive(Parser)]
#[command(
    name = "bpdev",
    about = "Deviation-frame checks, manipulation audits, witness replay, and certificate verification",
    disable_help_subcommand = true
)]
struct Cli {
    /// Output format for audit reports: human, tsv, or json-lines.
    #[arg(long, global = true)]
    format: Option<String>,

    /// Worker threads for parallel scans (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// State budget for explicit model materialization.
    #[arg(long, global = true, default_value_t = 1_000_000u128)]
    budget_states: u128,

    /// Reserved for randomized property-test helpers; core commands take no
    /// randomness.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct DomainArgs {
    /// Rule file.
    #[arg(long)]
    rule: String,
    /// Sets both the true and report domain.
    #[arg(long)]
    domain: Option<String>,
    /// True-profile domain (overrides --domain).
    #[arg(long)]
    true_domain: Option<String>,
    /// Report-profile domain (overrides --domain).
    #[arg(long)]
    report_domain: Option<String>,
    /// Number of agents.
    #[arg(long)]
    agents: usize,
}

impl DomainArgs {
    fn resolve(&self) -> Result<(bpdev_core::choice::Rule, Domain, Domain)> {
        let rule = load_rule(&self.rule)?;
        let alts = rule.alternatives.clone();
        let both = self.domain.as_deref();
        let true_spec = self
            .true_domain
            .as_deref()
            .or(both)
            .ok_or_else(|| anyhow!("missing --domain or --true-domain"))?;
        let report_spec = self
            .report_domain
            .as_deref()
            .or(both)
            .ok_or_else(|| anyhow!("missing --domain or --report-domain"))?;
        let true_domain = load_domain(true_spec, &alts)?;
        let report_domain = load_domain(report_spec, &alts)?;
        Ok((rule, true_domain, report_domain))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check the deviation laws of a frame file.
    CheckFrame { frame: String },
    /// Evaluate a formula at one biprofile state.
    ModelCheck {
        #[command(flatten)]
        domains: DomainArgs,
        /// Formula in the concrete grammar.
        #[arg(long)]
        formula: String,
        /// True profile of the state.
        #[arg(long, value_name = "PROFILE")]
        r#true: String,
        /// Report profile of the state (defaults to the true profile).
        #[arg(long)]
        report: Option<String>,
        /// Materialize the full model (bounded by --budget-states) instead
        /// of the on-demand successor view.
        #[arg(long)]
        explicit: bool,
    },
    /// Exhaustive unilateral manipulation audit over sincere states.
    AuditSp {
        #[command(flatten)]
        domains: DomainArgs,
    },
    /// Exhaustive coalition manipulation audit over sincere states.
    AuditGroupSp {
        #[command(flatten)]
        domains: DomainArgs,
        /// Cap on coalition size.
        #[arg(long)]
        max_coalition: Option<usize>,
        /// Require a strict improvement for every coalition member.
        #[arg(long)]
        all_strict: bool,
    },
    /// Replay a stored witness against an environment.
    Replay {
        #[command(flatten)]
        domains: DomainArgs,
        /// Witness file.
        #[arg(long)]
        witness: String,
        /// Listed public survivor set (one profile per line).
        #[arg(long)]
        survivors: Option<String>,
    },
    /// Scan extension rows for newly created manipulation witnesses.
    BoundaryAudit {
        #[command(flatten)]
        domains: DomainArgs,
        /// Extension rule file (base rule plus `extend` rows, or a larger
        /// table).
        #[arg(long)]
        extension: String,
        /// Explicit extended report domain for formula-rule extensions.
        #[arg(long)]
        report_domain_prime: Option<String>,
        #[arg(long)]
        max_coalition: Option<usize>,
    },
    /// Factor-closure audit of a public deletion.
    UpdateSafety {
        /// Rule file.
        #[arg(long)]
        rule: String,
        /// True profile of the audited fibre.
        #[arg(long, value_name = "PROFILE")]
        r#true: String,
        /// Report domain.
        #[arg(long)]
        report_domain: String,
        /// Listed survivor set (one profile per line).
        #[arg(long)]
        survivors: String,
    },
    /// Verify a typed finite certificate.
    VerifyCert { certificate: String },
    /// Generate all single-peaked orders on an axis.
    GenSp {
        /// Axis literal, e.g. `a < b < c < d`.
        #[arg(long)]
        axis: String,
    },
    /// Run a bounded search scenario.
    Search {
        /// Scenario kind, e.g. `unsafe-public-deletion`.
        kind: String,
        /// Exact (or maximum, for counterexample checks) state count.
        #[arg(long)]
        states: Option<usize>,
        /// Minimum state count (defaults to the scenario's own bound).
        #[arg(long)]
        min_states: Option<usize>,
        #[arg(long)]
        agents: Option<usize>,
        /// Report-row bound for the micro rule scenarios.
        #[arg(long)]
        reports: Option<usize>,
        /// Prune frames sharing a per-label degree signature.
        #[arg(long)]
        prune: bool,
    },
    /// Evaluate the three classical conditions for one rule.
    GsReport {
        #[arg(long)]
        rule: String,
        #[arg(long)]
        agents: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{err}");
                return ExitCode::from(EXIT_CLEAN);
            }
            eprintln!("usage: bpdev <subcommand> [flags]; see `bpdev --help`");
            eprintln!("{err}");
            return ExitCode::from(EXIT_REJECT);
        }
    };
    if let Some(jobs) = cli.jobs {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global();
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(EXIT_REJECT)
        }
    }
}

fn pick_format(cli: &Cli, default: Format) -> Result<Format> {
    match &cli.format {
        None => Ok(default),
        Some(text) => Format::parse(text).ok_or_else(|| anyhow!("unknown format `{text}`")),
    }
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::CheckFrame { frame } => {
            let format = pick_format(cli, Format::Tsv)?;
            let text = fs::read_to_string(frame)
                .with_context(|| format!("reading frame file `{frame}`"))?;
            let parsed = parse_frame(&text).map_err(|e| anyhow!("{frame}: {e}"))?;
            let report = check_dev_laws(&parsed);
            if report.passed {
                match format {
                    Format::Human => println!("all deviation laws hold"),
                    Format::Tsv => println!("pass"),
                    Format::JsonLines => {
                        println!("{}", serde_json::json!({"kind": "pass"}))
                    }
                }
                return Ok(EXIT_CLEAN);
            }
            for v in &report.violations {
                match format {
                    Format::Human => println!("violation: {v}"),
                    Format::Tsv => {
                        let labels: Vec<String> =
                            v.labels.iter().map(|c| c.to_string()).collect();
                        println!(
                            "violation\t{}\t{}\t{}",
                            v.law,
                            labels.join(" "),
                            v.states.join(",")
                        );
                    }
                    Format::JsonLines => println!(
                        "{}",
                        serde_json::json!({
                            "kind": "violation",
                            "law": v.law.to_string(),
                            "labels": v.labels.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                            "states": v.states,
                        })
                    ),
                }
            }
            Ok(EXIT_REJECT)
        }
        Command::ModelCheck { domains, formula, r#true, report, explicit } => {
            let (rule, true_domain, report_domain) = domains.resolve()?;
            let alts = rule.alternatives.clone();
            let n = domains.agents;
            let phi =
                parse_formula(formula, n, alts.names()).map_err(|e| anyhow!("formula: {e}"))?;
            let true_profile = Profile::parse(r#true, &alts)?;
            let report_profile = match report {
                Some(text) => Profile::parse(text, &alts)?,
                None => true_profile.clone(),
            };
            let value = if *explicit {
                let model = bpdev_core::choice::build_biprofile_model(
                    &rule,
                    &true_domain,
                    &report_domain,
                    n,
                    bpdev_core::choice::BuildMode::Explicit,
                    cli.budget_states,
                )?;
                let explicit_model = match model {
                    bpdev_core::choice::BiprofileModel::Explicit(e) => e,
                    _ => unreachable!("explicit mode requested"),
                };
                let state = explicit_model
                    .state_of(&true_profile, &report_profile)
                    .ok_or_else(|| anyhow!("state is outside the declared domains"))?;
                let truth = bpdev_core::model::evaluate(&explicit_model.model, &phi)?;
                truth.contains(&state)
            } else {
                let lazy = LazyBiprofile { rule, true_domain, report_domain, n };
                if !lazy.contains_state(&true_profile, &report_profile) {
                    return Err(anyhow!("state is outside the declared domains"));
                }
                lazy.eval_at(&true_profile, &report_profile, &phi)?
            };
            println!("{value}");
            Ok(EXIT_CLEAN)
        }
        Command::AuditSp { domains } => {
            let format = pick_format(cli, Format::Tsv)?;
            let (rule, true_domain, report_domain) = domains.resolve()?;
            let witness =
                check_strategy_proofness(&rule, &true_domain, &report_domain, domains.agents)?;
            let ctx = AuditContext {
                rule: &rule,
                true_domain: &true_domain,
                report_domain: &report_domain,
            };
            println!("{}", witness_line(format, &ctx, witness.as_ref()));
            Ok(if witness.is_some() { EXIT_FOUND } else { EXIT_CLEAN })
        }
        Command::AuditGroupSp { domains, max_coalition, all_strict } => {
            let format = pick_format(cli, Format::Tsv)?;
            let (rule, true_domain, report_domain) = domains.resolve()?;
            let witness = check_group_strategy_proofness(
                &rule,
                &true_domain,
                &report_domain,
                domains.agents,
                *max_coalition,
                *all_strict,
            )?;
            let ctx = AuditContext {
                rule: &rule,
                true_domain: &true_domain,
                report_domain: &report_domain,
            };
            println!("{}", witness_line(format, &ctx, witness.as_ref()));
            Ok(if witness.is_some() { EXIT_FOUND } else { EXIT_CLEAN })
        }
        Command::Replay { domains, witness, survivors } => {
            let format = pick_format(cli, Format::Tsv)?;
            let (rule, true_domain, report_domain) = domains.resolve()?;
            let alts = rule.alternatives.clone();
            let text = fs::read_to_string(witness)
                .with_context(|| format!("reading witness file `{witness}`"))?;
            let record = parse_witness(&text, &alts).map_err(|e| anyhow!("{witness}: {e}"))?;
            let survivor_rows = match survivors {
                Some(path) => Some(load_survivors(path, &alts)?),
                None => None,
            };
            let env = AuditEnv {
                rule: &rule,
                true_domain: &true_domain,
                report_domain: &report_domain,
                survivors: survivor_rows.as_deref(),
                n: domains.agents,
            };
            let outcome = replay_witness(&record, &env)?;
            let ctx = AuditContext {
                rule: &rule,
                true_domain: &true_domain,
                report_domain: &report_domain,
            };
            println!("{}", replay_line(format, &ctx, &record, &outcome));
            let live = matches!(
                outcome.status,
                ReplayStatus::SameManipulationWitness | ReplayStatus::UnsafeUpdate
            );
            Ok(if live { EXIT_FOUND } else { EXIT_CLEAN })
        }
        Command::BoundaryAudit { domains, extension, report_domain_prime, max_coalition } => {
            let format = pick_format(cli, Format::Tsv)?;
            let (rule, true_domain, report_domain) = domains.resolve()?;
            let ext = load_rule(extension)?;
            let prime = match report_domain_prime {
                Some(spec) => Some(load_domain(spec, &rule.alternatives)?),
                None => None,
            };
            let records = boundary_audit(
                &rule,
                &ext,
                &true_domain,
                &report_domain,
                prime.as_ref(),
                domains.agents,
                *max_coalition,
            )?;
            let ctx = AuditContext {
                rule: &ext,
                true_domain: &true_domain,
                report_domain: &report_domain,
            };
            if records.is_empty() {
                match format {
                    Format::Human => println!("extension is boundary-clean"),
                    Format::Tsv => println!("clean"),
                    Format::JsonLines => {
                        println!("{}", serde_json::json!({"kind": "clean"}))
                    }
                }
                return Ok(EXIT_CLEAN);
            }
            for record in &records {
                println!("{}", boundary_line(format, &ctx, record));
            }
            Ok(EXIT_FOUND)
        }
        Command::UpdateSafety { rule, r#true, report_domain, survivors } => {
            let format = pick_format(cli, Format::Tsv)?;
            let rule = load_rule(rule)?;
            let alts = rule.alternatives.clone();
            let true_profile = Profile::parse(r#true, &alts)?;
            let domain = load_domain(report_domain, &alts)?;
            let rows = load_survivors(survivors, &alts)?;
            let verdict = update_safety_audit(&rule, &true_profile, &domain, &rows, None)?;
            match (&verdict.missing, format) {
                (None, Format::Human) => {
                    println!("safe: the public restriction keeps the deviation laws")
                }
                (None, Format::Tsv) => println!("safe"),
                (None, Format::JsonLines) => {
                    println!("{}", serde_json::json!({"kind": "safe"}))
                }
                (Some(m), Format::Human) => println!(
                    "unsafe-update: edge from [{}] to [{}] has no surviving midpoint via {} then {}",
                    m.from.display(&alts),
                    m.to.display(&alts),
                    m.first,
                    m.second,
                ),
                (Some(m), Format::Tsv) => println!(
                    "unsafe-update\t{}\t{}\t{}\t{}",
                    m.from.compact(&alts),
                    m.first,
                    m.second,
                    m.to.compact(&alts),
                ),
                (Some(m), Format::JsonLines) => println!(
                    "{}",
                    serde_json::json!({
                        "kind": "unsafe-update",
                        "from": m.from.compact(&alts),
                        "first": m.first.to_string(),
                        "second": m.second.to_string(),
                        "to": m.to.compact(&alts),
                    })
                ),
            }
            Ok(if verdict.safe { EXIT_CLEAN } else { EXIT_FOUND })
        }
        Command::VerifyCert { certificate } => {
            let text = fs::read_to_string(certificate)
                .with_context(|| format!("reading certificate `{certificate}`"))?;
            let cert = match parse_certificate(&text) {
                Ok(cert) => cert,
                Err(e) => {
                    eprintln!("parse error: {e}");
                    return Ok(EXIT_REJECT);
                }
            };
            let result = verify_certificate(&cert);
            if result.accepted {
                println!("ACCEPT");
                Ok(EXIT_CLEAN)
            } else {
                let failure = result.failure.expect("rejection carries a failure");
                println!("REJECT");
                eprintln!("reject: {failure}");
                Ok(EXIT_REJECT)
            }
        }
        Command::GenSp { axis } => {
            // The axis names double as the alternative universe.
            let names: Vec<String> = axis.split('<').map(|s| s.trim().to_string()).collect();
            let alts = Alternatives::new(names)?;
            let axis_idx = bpdev_core::choice::order::parse_axis(axis, &alts)?;
            for order in generate_single_peaked(&axis_idx) {
                println!("{}", order.display(&alts));
            }
            Ok(EXIT_CLEAN)
        }
        Command::Search { kind, states, min_states, agents, reports, prune } => {
            let kind = ScenarioKind::parse(kind)?;
            let mut bounds = kind.default_bounds();
            if let Some(k) = states {
                bounds.max_states = *k;
                // Counterexample checks keep scanning from one state up;
                // instance searches run at the exact count unless told.
                bounds.min_states = match kind {
                    ScenarioKind::DevImpliesMixing
                    | ScenarioKind::FactorClosureCharacterizes
                    | ScenarioKind::MissingCornerInDev => 1,
                    _ => *k,
                };
            }
            if let Some(min) = min_states {
                bounds.min_states = *min;
            }
            if let Some(a) = agents {
                bounds.agents = *a;
            }
            if let Some(r) = reports {
                bounds.max_report_rows = *r;
            }
            let scenario = Scenario { kind, bounds };
            let options = SearchOptions { isomorphism_pruning: *prune };
            let result = run_scenario(&scenario, options)?;
            match result.status {
                SearchStatus::Unsat => {
                    if kind.is_frame_scenario() {
                        println!(
                            "UNSAT within states {}..={} agents {}",
                            result.bounds.min_states,
                            result.bounds.max_states,
                            result.bounds.agents
                        );
                    } else {
                        println!(
                            "UNSAT within {} report rows",
                            result.bounds.max_report_rows
                        );
                    }
                }
                SearchStatus::Sat => {
                    println!("SAT");
                    match result.instance.expect("satisfying instance") {
                        Instance::Frame(f) => {
                            print!("{}", format_frame(&f.frame));
                            for (key, value) in &f.annotations {
                                println!("{key}: {value}");
                            }
                        }
                        Instance::Micro(m) => {
                            let alts = &m.alternatives;
                            for p in &m.true_rows {
                                println!("true-profile: {}", p.display(alts));
                            }
                            for (p, a) in &m.base_rows {
                                println!("base-row: {} -> {}", p.display(alts), alts.name(*a));
                            }
                            for (p, a) in &m.extra_rows {
                                println!(
                                    "extension-row: {} -> {}",
                                    p.display(alts),
                                    alts.name(*a)
                                );
                            }
                            for r in &m.records {
                                println!(
                                    "record: ({}, {}, {}, {}, {}, {})",
                                    r.true_profile.display(alts),
                                    r.true_profile.display(alts),
                                    r.coalition,
                                    r.deviated.display(alts),
                                    alts.name(r.f_of_r),
                                    alts.name(r.g_of_q),
                                );
                            }
                        }
                    }
                }
            }
            Ok(EXIT_CLEAN)
        }
        Command::GsReport { rule, agents } => {
            let format = pick_format(cli, Format::Tsv)?;
            let rule = load_rule(rule)?;
            let report = gs_condition_report(&rule, *agents)?;
            let nondict: Vec<String> = report
                .non_dict_holds
                .iter()
                .enumerate()
                .map(|(i, &b)| format!("{}:{b}", i + 1))
                .collect();
            match format {
                Format::Human => println!(
                    "strategy-proof: {}; onto: {}; non-dictatorship per agent: {}",
                    report.sp_holds,
                    report.onto_holds,
                    nondict.join(", ")
                ),
                Format::Tsv => println!(
                    "gs-report\tsp={}\tonto={}\tnondict={}",
                    report.sp_holds,
                    report.onto_holds,
                    nondict.join(",")
                ),
                Format::JsonLines => println!(
                    "{}",
                    serde_json::json!({
                        "kind": "gs-report",
                        "sp": report.sp_holds,
                        "onto": report.onto_holds,
                        "non_dict": report.non_dict_holds,
                    })
                ),
            }
            Ok(EXIT_CLEAN)
        }
    }
}

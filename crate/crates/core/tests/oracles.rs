//! Oracle-driven invariants: every clever path is checked against a direct
//! restatement (law checks on restrictions, exhaustive witness enumeration,
//! relation-set equality on materialized models).

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bpdev_core::audit::{boundary_audit, replay_witness, AuditEnv, ReplayStatus};
use bpdev_core::choice::{
    all_orders, build_biprofile_model, build_manipulation_formula, check_strategy_proofness,
    enumerate_all_group_witnesses, parse_rule, Alternatives, BiprofileModel, BuildMode, Domain,
    LazyBiprofile, Profile, Rule, RuleKind, DEFAULT_STATE_BUDGET,
};
use bpdev_core::coalition::Coalition;
use bpdev_core::formula::Formula;
use bpdev_core::frame::{
    check_dev_laws, factor_closure_check, product_representation, rectangular_mixing_witness,
    restrict_frame,
};
use bpdev_core::model::evaluate;
use bpdev_core::search::enumerate_dev_frames;

fn subsets(names: &[String]) -> Vec<Vec<String>> {
    (0..(1u32 << names.len()))
        .map(|mask| {
            names
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, s)| s.clone())
                .collect()
        })
        .collect()
}

#[test]
fn factor_closure_matches_restriction_laws_up_to_four_states() {
    for k in 1..=4 {
        for frame in enumerate_dev_frames(k, 2).unwrap() {
            for survivors in subsets(frame.states()) {
                let closed = factor_closure_check(&frame, &survivors).unwrap().closed;
                let restricted = restrict_frame(&frame, &survivors).unwrap();
                assert_eq!(
                    closed,
                    check_dev_laws(&restricted).passed,
                    "frame {:?} survivors {survivors:?}",
                    frame.states()
                );
            }
        }
    }
}

#[test]
fn mixing_witness_exists_on_every_enumerated_frame() {
    for k in 1..=4 {
        for frame in enumerate_dev_frames(k, 2).unwrap() {
            let grand = Coalition::grand(2);
            for s in frame.states() {
                for t in frame.states() {
                    let si = frame.state_index(s).unwrap();
                    let ti = frame.state_index(t).unwrap();
                    if !frame.related(grand, si, ti) {
                        continue;
                    }
                    for c in Coalition::all(2) {
                        let u = rectangular_mixing_witness(&frame, s, t, c).unwrap();
                        let ui = frame.state_index(&u).unwrap();
                        assert!(frame.related(c, ui, si));
                        assert!(frame.related(c.complement(2), ui, ti));
                    }
                }
            }
        }
    }
}

#[test]
fn product_representation_reflects_every_label() {
    // Exhaustive over enumerated frames: every separated component embeds
    // into its quotient product, with agreement outside the label.
    for k in 1..=4 {
        for frame in enumerate_dev_frames(k, 2).unwrap() {
            for component in frame.components() {
                let names: Vec<String> = component
                    .iter()
                    .map(|&s| frame.state_name(s).to_string())
                    .collect();
                let rep = match product_representation(&frame, &names) {
                    Ok(rep) => rep,
                    Err(_) => continue,
                };
                let sizes: Vec<usize> = rep.coordinate_sets.iter().map(|c| c.len()).collect();
                assert_eq!(component.len(), sizes.iter().product::<usize>());
                for s in &names {
                    for t in &names {
                        let si = frame.state_index(s).unwrap();
                        let ti = frame.state_index(t).unwrap();
                        for c in Coalition::all(2) {
                            let agree = (1..=2)
                                .filter(|&i| !c.contains(i))
                                .all(|i| rep.embedding[s][i - 1] == rep.embedding[t][i - 1]);
                            assert_eq!(frame.related(c, si, ti), agree);
                        }
                    }
                }
            }
        }
    }
}

fn explicit_model(rule: &Rule, d: &Domain, m: &Domain, n: usize) -> bpdev_core::choice::ExplicitBiprofile {
    match build_biprofile_model(rule, d, m, n, BuildMode::Explicit, DEFAULT_STATE_BUDGET).unwrap()
    {
        BiprofileModel::Explicit(e) => e,
        _ => unreachable!(),
    }
}

#[test]
fn report_algebra_holds_as_exact_set_equality() {
    // Composition of relation tables on materialized models, label by label.
    let cases: Vec<(Rule, usize)> = vec![
        (parse_rule("rule plurality tiebreak a > b").unwrap(), 3),
        (parse_rule("rule plurality tiebreak a > b > c").unwrap(), 2),
    ];
    for (rule, n) in cases {
        let explicit = explicit_model(&rule, &Domain::Universal, &Domain::Universal, n);
        let frame = explicit.model.frame();
        let labels = Coalition::all(n);
        let all_pairs = |c: Coalition| -> BTreeSet<(u32, u32)> {
            let mut set: BTreeSet<(u32, u32)> =
                frame.relation_pairs(c).iter().copied().collect();
            for s in 0..frame.state_count() as u32 {
                set.insert((s, s));
            }
            set
        };
        for &c in &labels {
            for &d in &labels {
                let rc = all_pairs(c);
                let rd = all_pairs(d);
                let mut composed = BTreeSet::new();
                for &(s, u) in &rc {
                    for &(u2, t) in rd.iter().filter(|&&(x, _)| x == u) {
                        let _ = u2;
                        composed.insert((s, t));
                    }
                }
                assert_eq!(composed, all_pairs(c.union(d)), "labels {c} {d}");
            }
        }
    }
}

#[test]
fn diamond_composition_matches_union_diamond() {
    let rule = parse_rule("rule plurality tiebreak a > b > c").unwrap();
    let explicit = explicit_model(&rule, &Domain::Universal, &Domain::Universal, 2);
    let sampled = [
        Formula::Atom(bpdev_core::formula::Atom::Outcome("b".into())),
        Formula::Atom(bpdev_core::formula::Atom::Pref(1, "a".into(), "c".into())),
        Formula::Atom(bpdev_core::formula::Atom::Outcome("a".into()))
            .and(Formula::Atom(bpdev_core::formula::Atom::Top(2, "c".into()))),
    ];
    let c1 = Coalition::singleton(1);
    let c2 = Coalition::singleton(2);
    for phi in sampled {
        let nested = Formula::diamond(c1, Formula::diamond(c2, phi.clone()));
        let flat = Formula::diamond(c1.union(c2), phi.clone());
        assert_eq!(
            evaluate(&explicit.model, &nested).unwrap(),
            evaluate(&explicit.model, &flat).unwrap(),
            "composition collapse for {phi}"
        );
        // Monotonicity in the coalition label on the built model.
        let labels = Coalition::all(2);
        for &c in &labels {
            for &d in &labels {
                if !c.is_subset(d) {
                    continue;
                }
                let small =
                    evaluate(&explicit.model, &Formula::diamond(c, phi.clone())).unwrap();
                let large =
                    evaluate(&explicit.model, &Formula::diamond(d, phi.clone())).unwrap();
                assert!(small.is_subset(&large), "monotonicity {c} into {d}");
            }
        }
    }
}

#[test]
fn witness_scan_matches_modal_evaluation_both_directions() {
    // A rule is clean under the scan exactly when the no-manipulation
    // conjunction holds at every sincere state of the materialized model.
    let cases: Vec<(Rule, usize, Domain)> = vec![
        (
            parse_rule("rule plurality tiebreak a > b > c").unwrap(),
            2,
            Domain::Universal,
        ),
        (
            parse_rule("alternatives: a b c\nrule dictator 1").unwrap(),
            2,
            Domain::Universal,
        ),
        (
            parse_rule("alternatives: a b c\nrule constant b").unwrap(),
            2,
            Domain::Universal,
        ),
        (
            parse_rule("rule median axis a < b < c").unwrap(),
            3,
            Domain::SinglePeaked { axis: vec![0, 1, 2] },
        ),
    ];
    for (rule, n, domain) in cases {
        let witness = check_strategy_proofness(&rule, &domain, &domain, n).unwrap();
        let explicit = explicit_model(&rule, &domain, &domain, n);
        let clean = Formula::conjoin(
            (1..=n)
                .map(|i| {
                    build_manipulation_formula(Coalition::singleton(i), &rule.alternatives)
                        .unwrap()
                        .not()
                })
                .collect(),
        );
        let truth = evaluate(&explicit.model, &clean).unwrap();
        let sincere = explicit.sincere_states();
        let all_clean = sincere.iter().all(|s| truth.contains(s));
        assert_eq!(all_clean, witness.is_none(), "rule {}", rule.descriptor());
        // And when a witness exists, it replays in its own environment.
        if let Some(w) = witness {
            let env = AuditEnv {
                rule: &rule,
                true_domain: &domain,
                report_domain: &domain,
                survivors: None,
                n,
            };
            let outcome = replay_witness(&w, &env).unwrap();
            assert_eq!(outcome.status, ReplayStatus::SameManipulationWitness);
            assert!(!outcome.boundary_flag);
        }
    }
}

#[test]
fn replay_status_ignores_unrelated_environment_fields() {
    let rule = parse_rule("rule plurality tiebreak a > b > c").unwrap();
    let w = check_strategy_proofness(&rule, &Domain::Universal, &Domain::Universal, 3)
        .unwrap()
        .unwrap();
    let env = AuditEnv {
        rule: &rule,
        true_domain: &Domain::Universal,
        report_domain: &Domain::Universal,
        survivors: None,
        n: 3,
    };
    let base = replay_witness(&w, &env).unwrap();
    // Adding an unrelated overlay row must not change the status.
    let alts = rule.alternatives.clone();
    let unrelated = Profile::parse("c > a > b; c > a > b; c > a > b", &alts).unwrap();
    let mut overlay = BTreeMap::new();
    overlay.insert(unrelated, 0u8);
    let extended = rule.clone().with_overlay(overlay).unwrap();
    let env2 = AuditEnv { rule: &extended, ..env };
    let with_overlay = replay_witness(&w, &env2).unwrap();
    assert_eq!(base.status, with_overlay.status);
    assert_eq!(base.boundary_flag, with_overlay.boundary_flag);
}

fn random_micro_instance(
    rng: &mut ChaCha8Rng,
    alts: &Alternatives,
    n: usize,
) -> (Rule, Rule, Domain, Domain, Domain) {
    let m = alts.len();
    let orders = all_orders(m);
    let mut universe = Vec::new();
    fn rec(
        orders: &[bpdev_core::choice::LinearOrder],
        n: usize,
        current: &mut Vec<bpdev_core::choice::LinearOrder>,
        out: &mut Vec<Profile>,
    ) {
        if current.len() == n {
            out.push(Profile::new(current.clone()));
            return;
        }
        for o in orders {
            current.push(o.clone());
            rec(orders, n, current, out);
            current.pop();
        }
    }
    rec(&orders, n, &mut Vec::new(), &mut universe);
    universe.shuffle(rng);
    let m_size = rng.gen_range(1..=universe.len().min(6));
    let extra_size = rng.gen_range(1..=universe.len().saturating_sub(m_size).max(1).min(4));
    let m_rows: Vec<Profile> = universe[..m_size].to_vec();
    let extra_rows: Vec<Profile> =
        universe[m_size..(m_size + extra_size).min(universe.len())].to_vec();
    let d_size = rng.gen_range(1..=m_rows.len());
    let d_rows: Vec<Profile> = m_rows[..d_size].to_vec();

    let mut f_table = BTreeMap::new();
    for p in &m_rows {
        f_table.insert(p.clone(), rng.gen_range(0..m as u8));
    }
    let mut g_table = f_table.clone();
    for p in &extra_rows {
        g_table.insert(p.clone(), rng.gen_range(0..m as u8));
    }
    let base = Rule::new(alts.clone(), RuleKind::Table { rows: f_table });
    let ext = Rule::new(alts.clone(), RuleKind::Table { rows: g_table });
    let mut all_rows = m_rows.clone();
    all_rows.extend(extra_rows);
    (
        base,
        ext,
        Domain::ProfileList { rows: d_rows },
        Domain::ProfileList { rows: m_rows },
        Domain::ProfileList { rows: all_rows },
    )
}

#[test]
fn expansion_monotonicity_on_random_instances() {
    // Every witness found on the restricted report domain replays as a
    // witness of the extension on the expanded domain.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let alts = Alternatives::from_strs(&["a", "b", "c"]);
    for _ in 0..120 {
        let (base, ext, d, m, m_prime) = random_micro_instance(&mut rng, &alts, 2);
        let old = enumerate_all_group_witnesses(&base, &d, &m, 2, None).unwrap();
        let new = enumerate_all_group_witnesses(&ext, &d, &m_prime, 2, None).unwrap();
        let new_keys: BTreeSet<_> = new
            .iter()
            .map(|w| (w.true_profile.clone(), w.coalition, w.deviated.clone()))
            .collect();
        for w in &old {
            assert!(
                new_keys.contains(&(w.true_profile.clone(), w.coalition, w.deviated.clone())),
                "witness lost under report-domain expansion"
            );
        }
    }
}

#[test]
fn boundary_audit_equals_fresh_witness_set_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let alts = Alternatives::from_strs(&["a", "b", "c"]);
    for round in 0..80 {
        let (base, ext, d, m, m_prime) = random_micro_instance(&mut rng, &alts, 2);
        let records = boundary_audit(&base, &ext, &d, &m, None, 2, None).unwrap();
        let old: BTreeSet<_> = enumerate_all_group_witnesses(&base, &d, &m, 2, None)
            .unwrap()
            .into_iter()
            .map(|w| (w.true_profile, w.coalition, w.deviated))
            .collect();
        let fresh: BTreeSet<_> = enumerate_all_group_witnesses(&ext, &d, &m_prime, 2, None)
            .unwrap()
            .into_iter()
            .map(|w| (w.true_profile, w.coalition, w.deviated))
            .filter(|k| !old.contains(k))
            .collect();
        let record_keys: BTreeSet<_> = records.into_iter().map(|r| r.key()).collect();
        assert_eq!(record_keys, fresh, "round {round}");
    }
}

#[test]
fn lazy_and_explicit_successors_agree() {
    let rule = parse_rule("rule plurality tiebreak a > b").unwrap();
    let lazy = LazyBiprofile {
        rule: rule.clone(),
        true_domain: Domain::Universal,
        report_domain: Domain::Universal,
        n: 2,
    };
    let explicit = explicit_model(&rule, &Domain::Universal, &Domain::Universal, 2);
    let frame = explicit.model.frame();
    for (ri, r) in explicit.true_rows.iter().enumerate() {
        for (pi, p) in explicit.report_rows.iter().enumerate() {
            let state = explicit.state_index(ri, pi);
            for c in Coalition::all(2) {
                let from_frame: BTreeSet<u32> =
                    frame.successors(c, state).into_iter().collect();
                let from_lazy: BTreeSet<u32> = lazy
                    .successors(p, c)
                    .unwrap()
                    .iter()
                    .map(|q| explicit.state_of(r, q).unwrap())
                    .collect();
                assert_eq!(from_frame, from_lazy);
            }
        }
    }
}

#[test]
fn built_manipulation_formula_holds_at_the_case_study_state() {
    let rule = parse_rule("rule plurality tiebreak a > b > c").unwrap();
    let alts = rule.alternatives.clone();
    let r = Profile::parse("b > a > c; a > b > c; c > b > a", &alts).unwrap();
    let mu3 = build_manipulation_formula(Coalition::singleton(3), &alts).unwrap();
    let lazy = LazyBiprofile {
        rule,
        true_domain: Domain::Universal,
        report_domain: Domain::Universal,
        n: 3,
    };
    assert!(lazy.eval_at(&r, &r, &mu3).unwrap());
}

#[test]
fn axiom_formulas_evaluate_as_expected() {
    use bpdev_core::choice::{build_axiom_formula, AxiomKind};

    // Surjectivity holds at every state of the plurality model.
    let plurality = parse_rule("rule plurality tiebreak a > b > c").unwrap();
    let explicit = explicit_model(&plurality, &Domain::Universal, &Domain::Universal, 2);
    let onto = build_axiom_formula(AxiomKind::Onto, &plurality.alternatives, 2);
    let truth = evaluate(&explicit.model, &onto).unwrap();
    assert_eq!(truth.len(), explicit.model.frame().state_count());

    // The dictator formula holds at every sincere state of a dictatorship.
    let dict_rule = parse_rule("alternatives: a b c\nrule dictator 1").unwrap();
    let explicit = explicit_model(&dict_rule, &Domain::Universal, &Domain::Universal, 2);
    let dict = build_axiom_formula(AxiomKind::Dict(1), &dict_rule.alternatives, 2);
    let truth = evaluate(&explicit.model, &dict).unwrap();
    for s in explicit.sincere_states() {
        assert!(truth.contains(&s));
    }

    // A constant rule picks a unanimously dominated alternative somewhere.
    let constant = parse_rule("alternatives: a b c\nrule constant a").unwrap();
    let explicit = explicit_model(&constant, &Domain::Universal, &Domain::Universal, 2);
    let par = build_axiom_formula(AxiomKind::Par, &constant.alternatives, 2);
    let truth = evaluate(&explicit.model, &par).unwrap();
    let fails_somewhere =
        explicit.sincere_states().iter().any(|s| !truth.contains(s));
    assert!(fails_somewhere, "constant(a) cannot be Pareto efficient");
}

#[test]
fn update_safety_matches_the_materialized_fibre_oracle() {
    use bpdev_core::audit::update_safety_audit;
    use bpdev_core::coalition::Coalition as C;
    use std::collections::BTreeMap;

    // Materialize the fibre over a small single-peaked report product and
    // compare the audit verdict with the law check on the restriction, for
    // every survivor subset.
    let rule = parse_rule("rule median axis a < b < c").unwrap();
    let sp = Domain::SinglePeaked { axis: vec![0, 1, 2] };
    let n = 2usize;
    let rows = sp.enumerate(n, 3).unwrap();
    assert_eq!(rows.len(), 16);
    let r = rows[0].clone();

    // Fibre frame: states are report rows, relations by coordinate change.
    let states: Vec<String> = (0..rows.len()).map(|i| format!("x{i}")).collect();
    let mut relations: BTreeMap<C, Vec<(u32, u32)>> = BTreeMap::new();
    for c in C::all(n) {
        if c.is_empty() {
            continue;
        }
        let mut pairs = Vec::new();
        for (i, a) in rows.iter().enumerate() {
            for (j, b) in rows.iter().enumerate() {
                if i != j && a.diff(b).is_subset(c) {
                    pairs.push((i as u32, j as u32));
                }
            }
        }
        relations.insert(c, pairs);
    }
    let fibre =
        bpdev_core::frame::LabelledFrame::from_indexed(n, states.clone(), relations).unwrap();
    assert!(check_dev_laws(&fibre).passed);

    // All 2^16 subsets would be slow; sweep a deterministic sample.
    for mask in (0u32..(1 << rows.len())).step_by(97) {
        let survivors: Vec<Profile> = rows
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, p)| p.clone())
            .collect();
        let names: Vec<String> = states
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, s)| s.clone())
            .collect();
        let verdict = update_safety_audit(&rule, &r, &sp, &survivors, None).unwrap();
        let restricted = restrict_frame(&fibre, &names).unwrap();
        assert_eq!(verdict.safe, check_dev_laws(&restricted).passed, "mask {mask:#x}");
    }
}

//! Certificate verifier checks that need synthetic inputs: polynomial
//! scaling of the union rows and the model-checker soundness cross-check on
//! a multi-state accepted certificate.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use bpdev_core::certificate::{certificate_model, parse_certificate, verify_certificate};
use bpdev_core::formula::parse_formula;
use bpdev_core::model::evaluate;

/// A dense accepting certificate: every non-empty relation universal over
/// `p` states, closure a single letter claimed everywhere.
fn dense_certificate(p: usize) -> String {
    let mut text = String::new();
    let names: Vec<String> = (0..p).map(|i| format!("s{i}")).collect();
    writeln!(text, "states: {}", names.join(" ")).unwrap();
    writeln!(text, "root: s0").unwrap();
    writeln!(text, "labels: {{}} {{1}} {{2}} {{1,2}}").unwrap();
    writeln!(text, "formula: p").unwrap();
    writeln!(text, "closure: p").unwrap();
    for name in &names {
        writeln!(text, "types: {name} = p").unwrap();
    }
    let mut pairs = String::new();
    for a in &names {
        for b in &names {
            if a != b {
                write!(pairs, " ({a},{b})").unwrap();
            }
        }
    }
    writeln!(text, "relations {{}}:").unwrap();
    writeln!(text, "relations {{1}}:{pairs}").unwrap();
    writeln!(text, "relations {{2}}:{pairs}").unwrap();
    writeln!(text, "relations {{1,2}}:{pairs}").unwrap();
    text
}

fn min_verify_time(text: &str, reps: usize) -> Duration {
    let cert = parse_certificate(text).unwrap();
    let mut best = Duration::MAX;
    for _ in 0..reps {
        let start = Instant::now();
        let result = verify_certificate(&cert);
        assert!(result.accepted);
        best = best.min(start.elapsed());
    }
    best
}

#[test]
fn union_row_time_scales_at_most_cubically() {
    // Doubling the state count on a dense certificate must cost at most
    // the cubic factor of eight.
    let small = dense_certificate(192);
    let large = dense_certificate(384);
    // Warm-up pass so allocator effects do not skew the first measurement.
    let _ = min_verify_time(&small, 1);
    let t_small = min_verify_time(&small, 5);
    let t_large = min_verify_time(&large, 5);
    let ratio = t_large.as_secs_f64() / t_small.as_secs_f64();
    println!("verify time {t_small:?} -> {t_large:?}, ratio {ratio:.2}");
    assert!(ratio <= 8.0, "doubling states must scale at most 8x, got {ratio:.2}");
}

#[test]
fn accepted_multi_state_certificate_matches_the_model_checker() {
    // A two-block frame: {1} moves inside blocks, {2} is identity, and the
    // grand label equals {1}'s relation; the closure exercises every
    // connective over the relation tables.
    let text = "\
states: s0 s1 s2
root: s0
labels: {} {1} {2} {1,2}
formula: <{1}>p
closure: p ; q ; ~p ; (p & q) ; (p | q) ; (p -> q) ; <{1}>p ; [{1}]p ; <{2}>q ; [{1,2}]~p
types: s0 = p, (p | q), <{1}>p
types: s1 = q, ~p, (p -> q), (p | q), <{1}>p, <{2}>q
types: s2 = ~p, (p -> q), [{1,2}]~p
relations {}:
relations {1}: (s0,s1) (s1,s0)
relations {2}:
relations {1,2}: (s0,s1) (s1,s0)
diamonds: s0 <{1}>p -> s0
diamonds: s1 <{1}>p -> s0
factors: s0 {1}{2} s1 -> s1
";
    let cert = parse_certificate(text).unwrap();
    let result = verify_certificate(&cert);
    assert!(result.accepted, "{:?}", result.failure);
    let model = certificate_model(&cert).unwrap();
    for (i, chi) in cert.closure.iter().enumerate() {
        let truth = evaluate(&model, chi).unwrap();
        for t in 0..cert.states.len() as u32 {
            assert_eq!(
                truth.contains(&t),
                cert.types[t as usize].contains(&i),
                "formula {chi} at state s{t}"
            );
        }
    }
    // The claimed formula round-trips through the grammar used by files.
    let reparsed = parse_formula("<{1}>p", 2, &[]).unwrap();
    assert_eq!(&cert.closure[cert.formula], &reparsed);
}

//! Report serialization, replay and thread-count independence.

use serde_json::Value;

use cotlar_core::cotlar::{counterexample_report, default_l_plus, verify_cotlar_with, verify_lemma23};
use cotlar_core::ncfourier::{format_alg_elem, parse_alg_elem, random_element, trace_commutator_gap, AlgElem};
use cotlar_core::psl2::enumerate;
use cotlar_core::quadring::RingParam;
use cotlar_core::replay::replay_document;
use cotlar_core::report::ReportDocument;
use cotlar_core::rng::stream_rng;
use cotlar_core::symbol::verify_theorem_b;

#[test]
fn documents_round_trip_through_json() {
    let rep = verify_cotlar_with(RingParam::full(3).unwrap(), 1, 5_000, 1_000, 9).unwrap();
    let doc = rep.to_document(serde_json::json!({ "seed": 9 }));
    let text = serde_json::to_string(&doc).unwrap();
    let back: ReportDocument = serde_json::from_str(&text).unwrap();
    assert_eq!(back, doc);
    let v: Value = serde_json::from_str(&text).unwrap();
    for key in ["check", "config", "total_checked", "violations", "witness", "elapsed_ms", "version"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert!(back.total_checked >= back.violations.len() as u64);
}

#[test]
fn every_stored_entry_replays() {
    let docs = [
        verify_theorem_b(RingParam::maximal(3).unwrap(), 2).to_document(Value::Null),
        counterexample_report(RingParam::maximal(11).unwrap(), 2).unwrap().to_document(Value::Null),
        verify_lemma23(&[default_l_plus()], 100, 1, 1e-9).to_document(Value::Null),
    ];
    assert!(docs[0].violation_count > 0);
    for doc in &docs {
        let text = serde_json::to_string(doc).unwrap();
        let back: ReportDocument = serde_json::from_str(&text).unwrap();
        for outcome in replay_document(&back) {
            let o = outcome.unwrap();
            assert!(o.matches(), "{}: {:?}", back.check, o);
        }
    }
}

#[test]
fn same_seed_same_report_for_any_pool() {
    let run = || {
        let rep = verify_cotlar_with(RingParam::full(5).unwrap(), 2, 50_000, 20_000, 3).unwrap();
        let mut v = serde_json::to_value(rep.to_document(Value::Null)).unwrap();
        v.as_object_mut().unwrap().remove("elapsed_ms");
        v
    };
    let outputs: Vec<Value> = [1, 3, 8]
        .into_iter()
        .map(|t| rayon::ThreadPoolBuilder::new().num_threads(t).build().unwrap().install(run))
        .collect();
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn algebra_trace_and_adjoint_laws() {
    let ring = RingParam::full(2).unwrap();
    let pool = enumerate(ring, 1);
    let mut rng = stream_rng(21, 0);
    for _ in 0..20 {
        let x = random_element(ring, &pool, 15, &mut rng).unwrap();
        let y = random_element(ring, &pool, 15, &mut rng).unwrap();
        let scale = x.l2_sqr().re.sqrt() * y.l2_sqr().re.sqrt();
        assert!(trace_commutator_gap(&x, &y).unwrap() <= 1e-12 * scale);
        let lhs = x.convolve(&y).unwrap().adjoint();
        let rhs = y.adjoint().convolve(&x.adjoint()).unwrap();
        for g in lhs.terms().keys().chain(rhs.terms().keys()) {
            assert!((lhs.coeff(g) - rhs.coeff(g)).norm() <= 1e-12 * scale);
        }
        assert_eq!(parse_alg_elem(&format_alg_elem(&x)).unwrap(), x);
    }
    assert!(AlgElem::<num_complex::Complex64>::zero(ring).is_zero());
}

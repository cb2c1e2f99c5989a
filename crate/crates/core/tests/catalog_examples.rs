use std::sync::Arc;

use goldie::algebra::{abelian_group_module, make_builtin, regular_module, RingFamily};
use goldie::harness::{
    check_statement, generate_corpus, run_suite, search_counterexamples, Corpus, CorpusCaps, Hypothesis, Outcome,
    SearchError, StatementId,
};
use goldie::instance::{parse_submodule, Instance};

fn regular(family: RingFamily) -> Instance {
    let r = Arc::new(make_builtin(&family).unwrap());
    Instance::new(&family.to_string(), "regular", Arc::new(regular_module(&r)))
}

fn single(inst: Instance) -> Corpus {
    Corpus::from_instances(vec![inst], &CorpusCaps::default())
}

#[test]
fn nesl_on_z6_passes() {
    let corpus = single(regular(RingFamily::Zn(6)));
    let report = check_statement(StatementId::CorNesl, &corpus.entries[0], None, None);
    assert_eq!(report.outcome, Outcome::Pass);
    assert!(corpus.entries[0].radical().unwrap().prime_radical.is_zero());
}

#[test]
fn main_theorem_on_the_triangular_radical_passes() {
    let corpus = single(regular(RingFamily::TriangularRing(2, 2)));
    let entry = &corpus.entries[0];
    let j = parse_submodule(entry.module(), "<e12>").unwrap();
    let report = check_statement(StatementId::ThmMain, entry, Some(&j), None);
    assert_eq!(report.outcome, Outcome::Pass, "{}", report.line());
    assert_eq!(report.cases, 1);
    assert_eq!(goldie::product::nilpotency_index(&entry.ctx, &j), Some(2));
}

#[test]
fn finitely_generated_nilpotency_needs_local_nilpotency() {
    let corpus = single(regular(RingFamily::Zn(6)));
    let entry = &corpus.entries[0];
    let n = parse_submodule(entry.module(), "<2>").unwrap();
    let report = check_statement(StatementId::LemFgnilp, entry, Some(&n), None);
    assert_eq!(report.outcome, Outcome::HypothesisNotMet(Hypothesis::LocallyNilpotent));
}

#[test]
fn empty_corpus_gives_an_empty_summary() {
    let corpus = Corpus::from_instances(vec![], &CorpusCaps::default());
    let summary = run_suite(&corpus, StatementId::ALL, 2);
    assert!(summary.reports.is_empty());
    assert_eq!(summary.fail_count(), 0);
}

#[test]
fn single_instance_and_single_statement_give_one_report() {
    let corpus = single(regular(RingFamily::Zn(4)));
    let summary = run_suite(&corpus, &[StatementId::ExZpn], 1);
    assert_eq!(summary.reports.len(), 1);
    assert_eq!(summary.reports[0].outcome, Outcome::Pass);
}

#[test]
fn every_statement_passes_or_is_gated_on_the_anchors() {
    let corpus = Corpus::from_instances(goldie::harness::anchor_instances(), &CorpusCaps::default());
    let summary = run_suite(&corpus, StatementId::ALL, 4);
    assert_eq!(summary.fail_count(), 0, "{}", summary.text());
}

#[test]
fn search_without_dropping_matches_the_plain_check() {
    let corpus = generate_corpus(3, 12);
    for id in [StatementId::CorNesl, StatementId::LemProddirsumm, StatementId::LemDccannr] {
        let found = search_counterexamples(id, None, &corpus, 2).unwrap();
        assert_eq!(found.len(), corpus.len());
        for (r, e) in found.iter().zip(&corpus.entries) {
            assert_eq!(r.outcome, check_statement(id, e, None, None).outcome);
        }
    }
}

#[test]
fn search_rejects_hypotheses_the_statement_does_not_have() {
    let corpus = generate_corpus(0, 2);
    let err = search_counterexamples(StatementId::LemDccannr, Some(Hypothesis::QuasiProjective), &corpus, 1).unwrap_err();
    assert!(matches!(err, SearchError::NotAHypothesis { .. }));
}

#[test]
fn nesl_without_projectivity_on_z2_plus_z4() {
    // Z/2 ⊕ Z/4 is not quasi-projective, yet its prime radical is still 𝔏(M).
    let inst = Instance::new("Z4", "Z2+Z4", abelian_group_module(&[2, 4]).unwrap());
    let corpus = single(inst);
    let entry = &corpus.entries[0];
    assert!(!entry.profile.is_quasi_projective);
    let report = check_statement(StatementId::CorNesl, entry, None, Some(Hypothesis::QuasiProjective));
    assert_eq!(report.outcome, Outcome::Pass);
    let rad = entry.radical().unwrap();
    assert_eq!(rad.prime_radical, rad.ell);
}

#[test]
fn nesl_without_projectivity_fails_on_z2_plus_z8() {
    let inst = Instance::new("Z8", "Z2+Z8", abelian_group_module(&[2, 8]).unwrap());
    let corpus = single(inst);
    let entry = &corpus.entries[0];
    let report = check_statement(StatementId::CorNesl, entry, None, Some(Hypothesis::QuasiProjective));
    assert!(report.is_fail(), "{}", report.line());
    assert_eq!(entry.radical().unwrap().prime_radical, parse_submodule(entry.module(), "<2*x1>").unwrap());
    assert_eq!(entry.radical().unwrap().ell, parse_submodule(entry.module(), "<x0, 2*x1>").unwrap());
}

#[test]
fn main_theorem_without_full_invariance_sees_non_invariant_nil_submodules() {
    let r = Arc::new(make_builtin(&RingFamily::Zn(4)).unwrap());
    let corpus = single(Instance::new("Z4", "free2", goldie::algebra::free_module(&r, 2)));
    let found = search_counterexamples(StatementId::ThmMain, Some(Hypothesis::FullyInvariant), &corpus, 1).unwrap();
    assert_eq!(found.len(), 1);
    assert!(found[0].cases > 0 && !found[0].is_fail(), "{}", found[0].line());
}

//! Behaviour of the right annihilator on a module that is not
//! quasi-projective, recomputed from scratch with the brute-force oracle.
//!
//! `M = T2(F2) ⊕ T2(F2)/J` where `J = F2·e12`. Here `ann^r(X)`, the sum of all
//! `K` with `X_M K = 0`, need not satisfy `X_M ann^r(X) = 0`, and the identity
//! `l_N(K) = ann(ann^r(l_N(K))) ∩ N` fails.

use std::sync::Arc;

use goldie::algebra::{direct_sum, make_builtin, quotient_module, regular_module, RingFamily};
use goldie::context::ModuleContext;
use goldie::harness::corpus::{generate_corpus, Corpus, CorpusCaps};
use goldie::harness::{check_statement, Outcome, StatementId};
use goldie::instance::{parse_submodule, Instance};
use goldie::lattice::Submodule;
use goldie::oracle::{ElementSet, Oracle, OracleBudget};
use goldie::product::product;
use goldie::radical::{ann_left, ann_right, l_rel};

fn instance() -> Instance {
    let r = Arc::new(make_builtin(&RingFamily::TriangularRing(2, 2)).unwrap());
    let t = Arc::new(regular_module(&r));
    let j = Submodule::from_generators(&t, &[vec![0, 1, 0]]);
    let (q, _) = quotient_module(&t, &j);
    let m = direct_sum(&t, &q).unwrap().module;
    Instance::new("T2(Z2)", "(regular)+((regular)/<e12>)", m)
}

struct Brute {
    oracle: Oracle,
    lattice: Vec<ElementSet>,
}

impl Brute {
    fn new(inst: &Instance) -> Self {
        let oracle = Oracle::new(&inst.module, OracleBudget::default()).unwrap();
        let lattice = oracle.brute_all_submodules().unwrap();
        Brute { oracle, lattice }
    }

    fn sum(&self, sets: &[&ElementSet]) -> ElementSet {
        let gens: Vec<Vec<i64>> = sets.iter().flat_map(|s| s.iter()).map(|i| self.oracle.element(i).to_vec()).collect();
        self.oracle.generated(&gens)
    }

    /// Sum of all `L` with `L_M X = 0`.
    fn ann_left(&self, x: &ElementSet) -> ElementSet {
        let zero = self.oracle.zero();
        let ls: Vec<&ElementSet> = self.lattice.iter().filter(|l| self.oracle.brute_product(l, x) == zero).collect();
        self.sum(&ls)
    }

    /// Sum of all `K` with `X_M K = 0`.
    fn ann_right(&self, x: &ElementSet) -> ElementSet {
        let zero = self.oracle.zero();
        let ks: Vec<&ElementSet> = self.lattice.iter().filter(|k| self.oracle.brute_product(x, k) == zero).collect();
        self.sum(&ks)
    }
}

#[test]
fn instance_is_not_quasi_projective() {
    let ctx = ModuleContext::new(instance().module).unwrap();
    assert!(!ctx.is_quasi_projective().unwrap());
}

#[test]
fn annihilators_match_the_oracle_on_every_submodule() {
    let inst = instance();
    let ctx = ModuleContext::new(inst.module.clone()).unwrap();
    let brute = Brute::new(&inst);
    for x in ctx.lattice().unwrap().members() {
        let xs = brute.oracle.element_set(x);
        assert_eq!(brute.oracle.element_set(&ann_left(&ctx, x)), brute.ann_left(&xs), "ann of {x}");
        assert_eq!(brute.oracle.element_set(&ann_right(&ctx, x)), brute.ann_right(&xs), "ann^r of {x}");
    }
}

#[test]
fn right_annihilator_need_not_annihilate() {
    let inst = instance();
    let ctx = ModuleContext::new(inst.module.clone()).unwrap();
    let brute = Brute::new(&inst);
    let zero = brute.oracle.zero();
    let offenders: Vec<&ElementSet> =
        brute.lattice.iter().filter(|x| brute.oracle.brute_product(x, &brute.ann_right(x)) != zero).collect();
    assert!(!offenders.is_empty());
    // the library agrees on which submodules misbehave
    let mine = ctx
        .lattice()
        .unwrap()
        .members()
        .iter()
        .filter(|x| !product(&ctx, x, &ann_right(&ctx, x)).is_zero())
        .count();
    assert_eq!(mine, offenders.len());
}

#[test]
fn left_relative_annihilator_identity_fails() {
    let inst = instance();
    let m = &inst.module;
    let ctx = ModuleContext::new(m.clone()).unwrap();
    let n = parse_submodule(m, "<e11_0+x1_1, e12_0+x1_1, x0_1>").unwrap();
    let k = parse_submodule(m, "<e11_0+x1_1>").unwrap();

    let brute = Brute::new(&inst);
    let ns = brute.oracle.element_set(&n);
    let l = brute.ann_left(&brute.oracle.element_set(&k)).intersection(&ns);
    let back = brute.ann_left(&brute.ann_right(&l)).intersection(&ns);
    assert_ne!(l, back);
    assert!(back.is_subset_of(&l));

    let lib = l_rel(&ctx, &n, &k).unwrap();
    assert_eq!(brute.oracle.element_set(&lib), l);
    assert_eq!(lib.order(), 2);
}

#[test]
fn catalog_reports_the_failure() {
    let corpus = Corpus::from_instances(vec![instance()], &CorpusCaps::default());
    let n = parse_submodule(corpus.entries[0].module(), "<e11_0+x1_1, e12_0+x1_1, x0_1>").unwrap();
    let report = check_statement(StatementId::CorDccrn, &corpus.entries[0], Some(&n), None);
    assert!(matches!(report.outcome, Outcome::Fail(_)), "{}", report.line());
}

#[test]
fn default_corpus_of_one_hundred_has_no_failures() {
    let corpus = generate_corpus(0, 100);
    let summary = goldie::harness::run_suite(&corpus, StatementId::ALL, 2);
    assert_eq!(summary.fail_count(), 0, "{}", summary.text());
}

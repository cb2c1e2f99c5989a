//! Executable statement catalog, seeded corpora and counterexample search.
//!
//! Every statement has a list of [`Hypothesis`] values that are evaluated
//! before its conclusion, so a pass where the hypotheses never held is
//! reported as [`Outcome::HypothesisNotMet`] rather than as a pass.
//! Hypotheses that hold for every finite module (acc on annihilators,
//! Noetherian, Goldie) are not listed.

mod checks;
pub mod corpus;
pub mod endring;

use std::fmt;
use std::io;
use std::path::Path;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::instance::serialize_instance;
use crate::lattice::Submodule;

pub use corpus::{anchor_instances, generate_corpus, generate_corpus_with, Corpus, CorpusCaps, CorpusEntry, Derived};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Hypothesis {
    QuasiProjective,
    Retractable,
    FullyInvariant,
    Nil,
    LocallyNilpotent,
    Nilpotent,
    /// The submodule under test is not all of `M`.
    Proper,
    /// `M` has a decomposition into two nonzero summands.
    Decomposable,
    /// The additive group of `M` is cyclic of prime power order.
    CyclicPrimePower,
    /// `M` is the regular module of its ring.
    Regular,
}

impl Hypothesis {
    pub const ALL: [Hypothesis; 10] = [
        Hypothesis::QuasiProjective,
        Hypothesis::Retractable,
        Hypothesis::FullyInvariant,
        Hypothesis::Nil,
        Hypothesis::LocallyNilpotent,
        Hypothesis::Nilpotent,
        Hypothesis::Proper,
        Hypothesis::Decomposable,
        Hypothesis::CyclicPrimePower,
        Hypothesis::Regular,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Hypothesis::QuasiProjective => "quasi-projective",
            Hypothesis::Retractable => "retractable",
            Hypothesis::FullyInvariant => "fully-invariant",
            Hypothesis::Nil => "nil",
            Hypothesis::LocallyNilpotent => "locally-nilpotent",
            Hypothesis::Nilpotent => "nilpotent",
            Hypothesis::Proper => "proper",
            Hypothesis::Decomposable => "decomposable",
            Hypothesis::CyclicPrimePower => "cyclic-prime-power",
            Hypothesis::Regular => "regular",
        }
    }

    pub fn parse(s: &str) -> Option<Hypothesis> {
        Hypothesis::ALL.into_iter().find(|h| h.code().eq_ignore_ascii_case(s.trim()))
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

macro_rules! statements {
    ($( $variant:ident => $code:literal, [$($h:ident),*], $what:literal; )*) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
        pub enum StatementId { $($variant),* }

        impl StatementId {
            pub const ALL: &'static [StatementId] = &[$(StatementId::$variant),*];

            pub fn code(self) -> &'static str {
                match self { $(StatementId::$variant => $code),* }
            }

            pub fn hypotheses(self) -> &'static [Hypothesis] {
                match self { $(StatementId::$variant => &[$(Hypothesis::$h),*]),* }
            }

            /// The conclusion being checked.
            pub fn conclusion(self) -> &'static str {
                match self { $(StatementId::$variant => $what),* }
            }
        }
    };
}

statements! {
    LemProddirsumm => "LEM-PRODDIRSUMM", [], "K_M L ⊆ K_N L for K, L ≤ N, with equality when N is a direct summand";
    LemFprod => "LEM-FPROD", [QuasiProjective], "f(A_M B) = A_M f(B) and f(A)_M B ⊆ A_M B";
    LemEpiproduct => "LEM-EPIPRODUCT", [QuasiProjective, FullyInvariant], "π(N_M N) = π(N)_{M/K} π(N)";
    LemFactornil => "LEM-FACTORNIL", [QuasiProjective, Nil], "(N+K)/K is nil in M/K";
    RemLocnilNil => "REM-LOCNIL-NIL", [], "locally nilpotent implies nil, nilpotent implies locally nilpotent";
    LemFgnilp => "LEM-FGNILP", [QuasiProjective, LocallyNilpotent], "N is nilpotent";
    RemFinsumNilp => "REM-FINSUM-NILP", [QuasiProjective, Nilpotent], "N + L is nilpotent";
    LemSumlocnil => "LEM-SUMLOCNIL", [QuasiProjective, LocallyNilpotent], "N + L is locally nilpotent";
    PropLfiyrad => "PROP-LFIYRAD", [QuasiProjective], "𝔏(M) is fully invariant and 𝔏(M/𝔏(M)) = 0";
    CorLsp => "COR-LSP", [QuasiProjective], "𝔏(M) is a semiprime submodule";
    CorNesl => "COR-NESL", [QuasiProjective], "the prime radical equals 𝔏(M)";
    CorPrnilnet => "COR-PRNILNET", [QuasiProjective], "the prime radical is nilpotent";
    ExZpn => "EX-ZPN", [CyclicPrimePower], "𝔏(Z/p^n) = pM with nilpotency index n, and M is quasi-projective";
    LemLsumas => "LEM-LSUMAS", [QuasiProjective, Decomposable], "𝔏(A ⊕ B) = 𝔏(A) ⊕ 𝔏(B)";
    PropSemiprimeDirsum => "PROP-SEMIPRIME-DIRSUM", [QuasiProjective, Decomposable], "A ⊕ B is semiprime iff A and B are";
    CorRsp => "COR-RSP", [Regular], "R is semiprime iff R^1 and R^2 are semiprime, on both sides";
    CorFreeNilp => "COR-FREE-NILP", [Regular], "the prime radical of R is nilpotent iff that of R^2 is, on both sides";
    PropMaccsacc => "PROP-MACCSACC", [], "End(M) satisfies acc on right annihilators";
    LemNilpsubnil => "LEM-NILPSUBNIL", [QuasiProjective, FullyInvariant, Nil], "N/K contains a nonzero nilpotent submodule";
    PropAccnillocnil => "PROP-ACCNILLOCNIL", [QuasiProjective, FullyInvariant, Nil], "N is locally nilpotent";
    LemRannintersection => "LEM-RANNINTERSECTION", [], "⋂ ann^r(N_i) = ann^r(Σ N_i)";
    LemDccannr => "LEM-DCCANNR", [], "ann^r(ann(ann^r(N))) = ann^r(N)";
    LemDccl => "LEM-DCCL", [QuasiProjective], "l_S(⋂_{l_S(X)} Ker f) = l_S(X), the dual kernel identity, and annihilators match left annihilators";
    PropFactorrightacc => "PROP-FACTORRIGHTACC", [QuasiProjective], "M/ann^r(N) satisfies acc on annihilators";
    CorDccrn => "COR-DCCRN", [], "l_N(K) = ann(ann^r(l_N(K))) ∩ N and r_N(K) = ann^r(ann(r_N(K))) ∩ N";
    LemRannncero => "LEM-RANNNCERO", [QuasiProjective, FullyInvariant, Nil, Proper], "r_N(N) ≠ 0";
    PropSubm => "PROP-SUBM", [QuasiProjective, FullyInvariant, Nil, Proper], "the hypotheses are vacuous and the construction follows its recursion";
    LemAccmoduloann => "LEM-ACCMODULOANN", [QuasiProjective], "M/N satisfies acc on annihilators for N the common kernel of an ideal";
    LemFmret => "LEM-FMRET", [QuasiProjective, Retractable], "M/ann^r(N) and M/ann(N) are retractable";
    LemMgolsgol => "LEM-MGOLSGOL", [QuasiProjective, Retractable], "End(M) is a right Goldie ring";
    ThmMain => "THM-MAIN", [QuasiProjective, Retractable, FullyInvariant, Nil, Proper], "N is nilpotent";
    CorPrimenilgoldie => "COR-PRIMENILGOLDIE", [QuasiProjective, Retractable], "the prime radical is nilpotent";
}

impl StatementId {
    pub fn parse(s: &str) -> Option<StatementId> {
        StatementId::ALL.iter().copied().find(|id| id.code().eq_ignore_ascii_case(s.trim()))
    }

    fn ordinal(self) -> usize {
        StatementId::ALL.iter().position(|&x| x == self).expect("listed")
    }
}

impl fmt::Display for StatementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// Data needed to reproduce a failure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub message: String,
    pub data: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Outcome {
    Pass,
    Fail(Witness),
    HypothesisNotMet(Hypothesis),
    Skipped(String),
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Pass => write!(f, "PASS"),
            Outcome::Fail(w) => write!(f, "FAIL({})", w.message),
            Outcome::HypothesisNotMet(h) => write!(f, "HYPOTHESIS-NOT-MET({h})"),
            Outcome::Skipped(why) => write!(f, "SKIPPED({why})"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub statement: StatementId,
    pub instance_index: usize,
    pub instance: String,
    pub outcome: Outcome,
    /// Number of (instance, data) cases where the conclusion was evaluated.
    pub cases: usize,
    /// Cases of the strict kind a statement singles out, such as `K != 0`
    /// for LEM-NILPSUBNIL or a proper summand for LEM-PRODDIRSUMM.
    pub strict_cases: usize,
    /// Hypothesis left out of the evaluation, if any.
    pub dropped: Option<Hypothesis>,
    pub micros: u128,
}

impl VerificationReport {
    pub fn is_fail(&self) -> bool {
        matches!(self.outcome, Outcome::Fail(_))
    }

    /// One line without timing, used in summaries.
    pub fn line(&self) -> String {
        format!("{}\t#{} {}\t{}\tcases={}\tstrict={}", self.statement, self.instance_index, self.instance, self.outcome, self.cases, self.strict_cases)
    }
}

/// Seed for the data drawn when checking `id` on `entry`.
fn check_seed(id: StatementId, entry: &CorpusEntry) -> u64 {
    0x9e37_79b9_7f4a_7c15u64.wrapping_mul(entry.index as u64 + 1) ^ ((id.ordinal() as u64) << 40)
}

/// Evaluates `id` on `entry`. With `focus`, the submodule under test is that
/// submodule instead of a sample. With `dropped`, only cases violating that
/// hypothesis (and satisfying the others) are evaluated.
pub fn check_statement(
    id: StatementId,
    entry: &CorpusEntry,
    focus: Option<&Submodule>,
    dropped: Option<Hypothesis>,
) -> VerificationReport {
    let start = Instant::now();
    let rng = ChaCha8Rng::seed_from_u64(check_seed(id, entry));
    let mut check = checks::Check::new(entry, focus.cloned(), dropped, rng);
    let outcome = check.run(id);
    VerificationReport {
        statement: id,
        instance_index: entry.index,
        instance: entry.name(),
        outcome,
        cases: check.cases,
        strict_cases: check.strict_cases,
        dropped,
        micros: start.elapsed().as_micros(),
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct StatementTally {
    pub pass: usize,
    pub fail: usize,
    pub not_met: usize,
    pub skipped: usize,
    pub cases: usize,
    pub strict_cases: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteSummary {
    pub seed: u64,
    pub instances: usize,
    pub reports: Vec<VerificationReport>,
}

impl SuiteSummary {
    pub fn fail_count(&self) -> usize {
        self.reports.iter().filter(|r| r.is_fail()).count()
    }

    pub fn tally(&self) -> Vec<(StatementId, StatementTally)> {
        let mut out: Vec<(StatementId, StatementTally)> = Vec::new();
        for r in &self.reports {
            let pos = match out.iter().position(|(id, _)| *id == r.statement) {
                Some(p) => p,
                None => {
                    out.push((r.statement, StatementTally::default()));
                    out.len() - 1
                }
            };
            let t = &mut out[pos].1;
            match r.outcome {
                Outcome::Pass => t.pass += 1,
                Outcome::Fail(_) => t.fail += 1,
                Outcome::HypothesisNotMet(_) => t.not_met += 1,
                Outcome::Skipped(_) => t.skipped += 1,
            }
            t.cases += r.cases;
            t.strict_cases += r.strict_cases;
        }
        out.sort_by_key(|(id, _)| *id);
        out
    }

    /// Deterministic text: one line per report, then per-statement totals.
    pub fn text(&self) -> String {
        let mut s = format!("seed={} instances={} reports={}\n", self.seed, self.instances, self.reports.len());
        for r in &self.reports {
            s.push_str(&r.line());
            s.push('\n');
        }
        s.push_str("# totals\n");
        for (id, t) in self.tally() {
            s.push_str(&format!(
                "{id}\tpass={}\tfail={}\tnot_met={}\tskipped={}\tcases={}\tstrict={}\n",
                t.pass, t.fail, t.not_met, t.skipped, t.cases, t.strict_cases
            ));
        }
        s.push_str(&format!("fail_total={}\n", self.fail_count()));
        s
    }

    /// Writes one file per failing report; each file is a valid instance
    /// file with the witness in comment lines.
    pub fn write_witnesses(&self, corpus: &Corpus, dir: &Path) -> io::Result<usize> {
        let mut written = 0;
        for r in self.reports.iter().filter(|r| r.is_fail()) {
            let Outcome::Fail(w) = &r.outcome else { continue };
            let entry = &corpus.entries[r.instance_index];
            std::fs::create_dir_all(dir)?;
            let path = dir.join(format!("{}__{}.txt", r.statement, r.instance_index));
            std::fs::write(path, witness_file(r, w, entry))?;
            written += 1;
        }
        Ok(written)
    }
}

fn witness_file(r: &VerificationReport, w: &Witness, entry: &CorpusEntry) -> String {
    let mut s = format!("# statement {}\n# instance {}\n# {}\n", r.statement, r.instance, w.message);
    if let Some(h) = r.dropped {
        s.push_str(&format!("# dropped {h}\n"));
    }
    for (k, v) in &w.data {
        s.push_str(&format!("# {k} = {v}\n"));
    }
    s.push_str(&serialize_instance(&entry.instance));
    s
}

/// Runs `ids` on every corpus entry using `jobs` worker threads. The report
/// order is (instance, statement) regardless of `jobs`.
pub fn run_suite(corpus: &Corpus, ids: &[StatementId], jobs: usize) -> SuiteSummary {
    let work: Vec<(usize, StatementId)> = (0..corpus.len()).flat_map(|i| ids.iter().map(move |&id| (i, id))).collect();
    let run = || -> Vec<VerificationReport> {
        work.par_iter().map(|&(i, id)| check_statement(id, &corpus.entries[i], None, None)).collect()
    };
    let reports = match rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build() {
        Ok(pool) => pool.install(run),
        Err(_) => work.iter().map(|&(i, id)| check_statement(id, &corpus.entries[i], None, None)).collect(),
    };
    SuiteSummary { seed: corpus.seed, instances: corpus.len(), reports }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SearchError {
    #[error("{id} has no hypothesis `{h}`")]
    NotAHypothesis { id: StatementId, h: Hypothesis },
}

/// Evaluates the conclusion of `id` where exactly `dropped` fails. Failing
/// reports are findings about the necessity of the hypothesis.
pub fn search_counterexamples(
    id: StatementId,
    dropped: Option<Hypothesis>,
    corpus: &Corpus,
    jobs: usize,
) -> Result<Vec<VerificationReport>, SearchError> {
    if let Some(h) = dropped {
        if !id.hypotheses().contains(&h) {
            return Err(SearchError::NotAHypothesis { id, h });
        }
    }
    let run = || -> Vec<VerificationReport> {
        corpus.entries.par_iter().map(|e| check_statement(id, e, None, dropped)).collect()
    };
    let reports = match rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build() {
        Ok(pool) => pool.install(run),
        Err(_) => corpus.entries.iter().map(|e| check_statement(id, e, None, dropped)).collect(),
    };
    Ok(reports.into_iter().filter(|r| dropped.is_none() || !matches!(r.outcome, Outcome::HypothesisNotMet(_))).collect())
}

pub use checks::{
    end_ring_checks, free_module_values, oracle_agreement, product_associativity, subm_contract_check, EndRingEvidence,
    OracleAgreement,
};

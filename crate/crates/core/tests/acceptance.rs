//! Acceptance criteria 1 to 9. Runs as a plain binary and prints one line
//! per criterion; the process fails if any criterion fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use goldie::algebra::{make_builtin, regular_module, RingFamily};
use goldie::context::ModuleContext;
use goldie::harness::corpus::{generate_corpus, Corpus, CorpusEntry};
use goldie::harness::{
    end_ring_checks, free_module_values, oracle_agreement, product_associativity, run_suite,
    subm_contract_check, Outcome, StatementId,
};
use goldie::homspace::hom_group;
use goldie::lattice::{is_fully_invariant, Submodule};
use goldie::oracle::{brute_hom_group, Oracle, OracleBudget};
use goldie::product::{is_nil_submodule, nilpotency_index, product};
use goldie::radical::ell;

const CORPUS_SEED: u64 = 0;
const CORPUS_SIZE: usize = 120;

type Verdict = Result<String, String>;

fn regular_ctx(family: &RingFamily) -> ModuleContext {
    let r = Arc::new(make_builtin(family).expect("builtin ring"));
    ModuleContext::new(Arc::new(regular_module(&r))).expect("small module")
}

fn criterion_1() -> Verdict {
    let mut checked = 0;
    for p in [2u64, 3] {
        for n in 1..=4u32 {
            let ctx = regular_ctx(&RingFamily::Zn(p.pow(n)));
            let m = ctx.module();
            let pm = Submodule::from_generators(m, &[vec![p as i64]]);
            let l = ell(&ctx);
            if l != pm {
                return Err(format!("Z/{}: L = {} but pM = {}", p.pow(n), l, pm));
            }
            let index = nilpotency_index(&ctx, &l);
            if index != Some(n as usize) {
                return Err(format!("Z/{}: nilpotency index {index:?}, expected {n}", p.pow(n)));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} modules Z/p^n"))
}

fn fi_nil_proper(ctx: &ModuleContext) -> Vec<Submodule> {
    ctx.fully_invariant().iter().filter(|n| !n.is_full() && is_nil_submodule(ctx, n).is_nil).cloned().collect()
}

fn criterion_2(corpus: &Corpus) -> Verdict {
    let (mut instances, mut submodules) = (0, 0);
    for e in &corpus.entries {
        if !(e.profile.is_quasi_projective && e.profile.is_retractable) {
            continue;
        }
        instances += 1;
        for n in fi_nil_proper(&e.ctx) {
            submodules += 1;
            if nilpotency_index(&e.ctx, &n).is_none() {
                return Err(format!("{}: {} is fully invariant and nil but not nilpotent", e.name(), n));
            }
        }
        let rad = e.radical().ok_or_else(|| format!("{}: radical over caps", e.name()))?;
        if rad.nilpotency_of_radical.is_none() {
            return Err(format!("{}: prime radical {} is not nilpotent", e.name(), rad.prime_radical));
        }
    }
    if instances == 0 {
        return Err("no quasi-projective retractable instance".into());
    }
    Ok(format!("{} instances, {instances} quasi-projective retractable, {submodules} submodules", corpus.len()))
}

fn criterion_3(corpus: &Corpus) -> Verdict {
    let mut count = 0;
    for e in corpus.entries.iter().filter(|e| e.profile.is_quasi_projective) {
        let rad = e.radical().ok_or_else(|| format!("{}: radical over caps", e.name()))?;
        if rad.prime_radical != rad.ell {
            return Err(format!("{}: prime radical {} but L = {}", e.name(), rad.prime_radical, rad.ell));
        }
        count += 1;
    }
    Ok(format!("{count} quasi-projective instances"))
}

/// Every pair of submodules when the lattice is small, otherwise a sample.
const ALL_PAIRS_UP_TO: usize = 40;

fn criterion_4(corpus: &Corpus) -> Verdict {
    let budget = OracleBudget::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut instances, mut homs, mut products, mut lattices) = (0, 0, 0, 0);
    for e in corpus.entries.iter().filter(|e| e.module().order() <= 256) {
        // Hom(M, M), lattice, sampled products, L and the prime radical
        let agreement = oracle_agreement(e, &mut rng, 0).map_err(|w| format!("{}: {w}", e.name()))?;
        if agreement.over_budget {
            continue;
        }
        instances += 1;
        lattices += 1;
        homs += agreement.hom_pairs;
        let (h, p) = exhaustive_pairs(e, &budget)?;
        homs += h;
        products += p;
    }
    Ok(format!("{instances} instances, {lattices} lattices, {homs} Hom groups, {products} products"))
}

/// Hom into every submodule and products of all pairs, or a deterministic
/// stride through them for large lattices.
fn exhaustive_pairs(e: &CorpusEntry, budget: &OracleBudget) -> Result<(usize, usize), String> {
    let ctx = &e.ctx;
    let m = ctx.module();
    let oracle = Oracle::new(m, *budget).map_err(|x| x.to_string())?;
    let members = ctx.lattice().map_err(|x| x.to_string())?.members();
    let stride = if members.len() <= ALL_PAIRS_UP_TO { 1 } else { members.len() / ALL_PAIRS_UP_TO + 1 };
    let picked: Vec<&Submodule> = members.iter().step_by(stride).collect();
    let mut homs = 0;
    for k in &picked {
        let Some(d) = e.submodule(k) else { continue };
        let km = d.ctx.module();
        let main = hom_group(m, km).map_err(|x| x.to_string())?;
        let Ok(brute) = brute_hom_group(m, km, budget) else { continue };
        let Ok(elems) = main.elements(budget.max_hom_enumeration) else { continue };
        let mut mine: Vec<_> = elems.iter().map(|f| f.matrix().clone()).collect();
        mine.sort();
        if mine != brute {
            return Err(format!("{}: Hom(M, {k}) has {} maps, oracle {}", e.name(), mine.len(), brute.len()));
        }
        homs += 1;
    }
    let mut products = 0;
    for n in &picked {
        let ns = oracle.element_set(n);
        for k in &picked {
            let main = oracle.element_set(&product(ctx, n, k));
            if main != oracle.brute_product(&ns, &oracle.element_set(k)) {
                return Err(format!("{}: N_M K differs for N = {n}, K = {k}", e.name()));
            }
            products += 1;
        }
    }
    Ok((homs, products))
}

const IDENTITY_DRAWS: usize = 500;

fn criterion_5() -> Verdict {
    use StatementId::*;
    let ids = [LemFprod, LemEpiproduct, LemProddirsumm, LemRannintersection, LemDccannr, LemDccl, LemLsumas];
    let mut cases: BTreeMap<StatementId, usize> = BTreeMap::new();
    let mut summand_equalities = 0;
    let mut associativity = 0;
    let mut seed = CORPUS_SEED;
    while (ids.iter().any(|id| cases.get(id).copied().unwrap_or(0) < IDENTITY_DRAWS) || associativity < IDENTITY_DRAWS)
        && seed < CORPUS_SEED + 20
    {
        let corpus = generate_corpus(seed, CORPUS_SIZE);
        let summary = run_suite(&corpus, &ids, 1);
        for r in &summary.reports {
            if let Outcome::Fail(w) = &r.outcome {
                return Err(format!("{} on {}: {}", r.statement, r.instance, w.message));
            }
            *cases.entry(r.statement).or_default() += r.cases;
            if r.statement == LemProddirsumm {
                summand_equalities += r.strict_cases;
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for e in corpus.entries.iter().filter(|e| e.profile.is_quasi_projective) {
            associativity += product_associativity(&e.ctx, &mut rng, 8).map_err(|w| format!("{}: {}", e.name(), w.message))?;
        }
        seed += 1;
    }
    let short: Vec<String> = ids
        .iter()
        .filter(|id| cases.get(id).copied().unwrap_or(0) < IDENTITY_DRAWS)
        .map(|id| format!("{id}={}", cases.get(id).copied().unwrap_or(0)))
        .collect();
    if !short.is_empty() || associativity < IDENTITY_DRAWS {
        return Err(format!("too few draws: {} associativity={associativity}", short.join(" ")));
    }
    if summand_equalities == 0 {
        return Err("no proper direct-summand case of LEM-PRODDIRSUMM".into());
    }
    let counts: Vec<String> = cases.iter().map(|(id, c)| format!("{id}={c}")).collect();
    Ok(format!("{} associativity={associativity} summand_equalities={summand_equalities}", counts.join(" ")))
}

fn criterion_6(corpus: &Corpus) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut instances, mut max_udim) = (0, 0);
    for e in &corpus.entries {
        let ev = end_ring_checks(&e.ctx, &mut rng, 6, true).map_err(|w| format!("{}: {}", e.name(), w.message))?;
        let udim = ev.right_uniform_dimension.ok_or_else(|| format!("{}: End(M) of order {} over caps", e.name(), ev.end_order))?;
        max_udim = max_udim.max(udim);
        instances += 1;
    }
    Ok(format!("{instances} endomorphism rings, largest right uniform dimension {max_udim}"))
}

fn criterion_7() -> Verdict {
    use RingFamily::*;
    let cases = [(Zn(4), false), (Zn(6), true), (TriangularRing(2, 2), false), (MatrixRing(2, 2), true)];
    for (family, semiprime) in cases {
        let ring = Arc::new(make_builtin(&family).expect("builtin ring"));
        for radical in [false, true] {
            let values = free_module_values(&ring, radical).ok_or_else(|| format!("{family}: free module over caps"))?;
            if values.iter().any(|(_, v)| *v != values[0].1) {
                return Err(format!("{family}: {values:?}"));
            }
            if !radical && values[0].1 != semiprime {
                return Err(format!("{family}: semiprime = {}, expected {semiprime}", values[0].1));
            }
            if radical && !values[0].1 {
                return Err(format!("{family}: prime radical of R is not nilpotent"));
            }
        }
    }
    Ok("Z4, Z6, T2(Z2), M2(Z2) with R, R^2 and their opposites".into())
}

fn criterion_8(corpus: &Corpus) -> Verdict {
    let (mut instances, mut submodules) = (0, 0);
    for e in &corpus.entries {
        let ctx = &e.ctx;
        let targets: Vec<Submodule> = ctx
            .fully_invariant()
            .iter()
            .filter(|n| !n.is_zero() && is_fully_invariant(ctx, n) && is_nil_submodule(ctx, n).is_nil)
            .cloned()
            .collect();
        if !targets.is_empty() {
            instances += 1;
        }
        for n in targets {
            match subm_contract_check(ctx, &n) {
                Ok(None) => submodules += 1,
                Ok(Some(w)) => return Err(format!("{}: N = {n}: {}", e.name(), w.message)),
                Err(why) => return Err(format!("{}: N = {n}: {why}", e.name())),
            }
        }
    }
    Ok(format!("{submodules} fully invariant nil submodules in {instances} instances"))
}

fn criterion_9() -> Verdict {
    let first = run_suite(&generate_corpus(CORPUS_SEED, CORPUS_SIZE), StatementId::ALL, 4).text();
    let second = run_suite(&generate_corpus(CORPUS_SEED, CORPUS_SIZE), StatementId::ALL, 1).text();
    if first != second {
        return Err("summaries differ between runs".into());
    }
    let fails = first.lines().last().unwrap_or_default().to_string();
    Ok(format!("{} bytes identical ({fails})", first.len()))
}

fn main() -> ExitCode {
    let corpus = generate_corpus(CORPUS_SEED, CORPUS_SIZE);
    let criteria: Vec<(u32, &str, Duration, Box<dyn Fn() -> Verdict + '_>)> = vec![
        (1, "L(Z/p^n) = pM with nilpotency index n", Duration::from_secs(1), Box::new(criterion_1)),
        (2, "fully invariant nil submodules and prime radical are nilpotent", Duration::from_secs(300), Box::new(|| criterion_2(&corpus))),
        (3, "prime radical equals L on quasi-projective instances", Duration::from_secs(120), Box::new(|| criterion_3(&corpus))),
        (4, "main computations agree with the brute-force oracle", Duration::from_secs(300), Box::new(|| criterion_4(&corpus))),
        (5, "lemma identities on random draws", Duration::from_secs(300), Box::new(criterion_5)),
        (6, "End(M) annihilator identities and right Goldie", Duration::from_secs(180), Box::new(|| criterion_6(&corpus))),
        (7, "free-module ring corollaries", Duration::from_secs(120), Box::new(criterion_7)),
        (8, "subm construction contracts", Duration::from_secs(60), Box::new(|| criterion_8(&corpus))),
        (9, "seeded verify summary is deterministic", Duration::MAX, Box::new(criterion_9)),
    ];
    let mut failed = 0;
    for (n, what, limit, run) in criteria {
        let start = Instant::now();
        let verdict = run();
        let took = start.elapsed();
        let line = match verdict {
            Ok(detail) if took <= limit => format!("PASS criterion {n}: {what} [{detail}] ({:.2}s)", took.as_secs_f64()),
            Ok(detail) => format!("FAIL criterion {n}: {what} took {:.2}s, limit {}s [{detail}]", took.as_secs_f64(), limit.as_secs()),
            Err(why) => format!("FAIL criterion {n}: {what}: {why} ({:.2}s)", took.as_secs_f64()),
        };
        if line.starts_with("FAIL") {
            failed += 1;
        }
        println!("{line}");
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

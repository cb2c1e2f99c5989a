//! Command-line front end for the `goldie` library.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};

use goldie::algebra::{submodule_module, FiniteModule};
use goldie::context::{ContextError, ModuleContext};
use goldie::harness::corpus::generate_corpus;
use goldie::harness::{run_suite, search_counterexamples, Hypothesis, Outcome, StatementId};
use goldie::homspace::{hom_group, HomError, Homomorphism};
use goldie::instance::{parse_instance, parse_submodule, Instance};
use goldie::lattice::{format_element, is_goldie, LatticeError, Submodule};
use goldie::oracle::{brute_hom_group, Oracle, OracleBudget, OracleError};
use goldie::product::{power_trace, product, Terminal};
use goldie::radical::prime_radical;

#[derive(Parser)]
#[command(name = "goldie", version, about = "Submodule products, radicals and Goldie predicates of finite modules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate an instance file and print its predicate profile.
    Validate { file: PathBuf },
    /// Hom(M, K) for a submodule K of M.
    Hom {
        file: PathBuf,
        #[arg(long)]
        target: String,
    },
    /// The product N_M K.
    Product {
        file: PathBuf,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// Powers of N up to the first zero or repetition.
    Power {
        file: PathBuf,
        #[arg(long)]
        sub: String,
        /// Also print N^1 .. N^MAX.
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=10_000))]
        max: Option<u32>,
    },
    /// 𝔏(M), the prime radical and the prime submodules.
    Radical { file: PathBuf },
    /// Quasi-projectivity, retractability, Goldie data.
    Predicates { file: PathBuf },
    /// Run the statement catalog on a seeded corpus.
    Verify {
        #[arg(long, default_value_t = 0)]
        corpus_seed: u64,
        /// Number of corpus instances.
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..=5000))]
        budget: u64,
        /// Comma-separated statement ids.
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..=256))]
        jobs: u64,
        #[arg(long)]
        witness_dir: Option<PathBuf>,
        /// Also write the reports as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Evaluate a statement where one of its hypotheses fails.
    Search {
        #[arg(long)]
        statement: String,
        #[arg(long)]
        drop: String,
        #[arg(long, default_value_t = 0)]
        corpus_seed: u64,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..=5000))]
        budget: u64,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..=256))]
        jobs: u64,
    },
    /// Brute-force computations only.
    Oracle {
        file: PathBuf,
        #[arg(long, value_enum)]
        op: OracleOp,
        /// Target submodule for `hom` (default: M).
        #[arg(long)]
        target: Option<String>,
        #[arg(long)]
        left: Option<String>,
        #[arg(long)]
        right: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleOp {
    Hom,
    Product,
    Radical,
}

enum Failure {
    Usage(String),
    Validation(String),
    Budget(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Validation(_) => 3,
            Failure::Budget(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Validation(m) | Failure::Budget(m) => m,
        }
    }
}

impl From<ContextError> for Failure {
    fn from(e: ContextError) -> Self {
        Failure::Budget(e.to_string())
    }
}

impl From<LatticeError> for Failure {
    fn from(e: LatticeError) -> Self {
        Failure::Budget(e.to_string())
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        Failure::Budget(e.to_string())
    }
}

impl From<HomError> for Failure {
    fn from(e: HomError) -> Self {
        match e {
            HomError::CapExceeded { .. } => Failure::Budget(e.to_string()),
            other => Failure::Validation(other.to_string()),
        }
    }
}

/// What a successful command prints, and whether a `Fail` was found.
struct Done {
    text: String,
    found_fail: bool,
}

impl Done {
    fn ok(text: String) -> Self {
        Done { text, found_fail: false }
    }
}

fn load(path: &Path) -> Result<Instance, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    parse_instance(&text).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))
}

fn context(inst: &Instance) -> Result<ModuleContext, Failure> {
    Ok(ModuleContext::new(inst.module.clone())?)
}

fn sub(module: &Arc<FiniteModule>, text: &str) -> Result<Submodule, Failure> {
    parse_submodule(module, text).map_err(Failure::Usage)
}

fn statement(text: &str) -> Result<StatementId, Failure> {
    StatementId::parse(text).ok_or_else(|| {
        let known: Vec<&str> = StatementId::ALL.iter().map(|s| s.code()).collect();
        Failure::Usage(format!("unknown statement `{text}`; known: {}", known.join(", ")))
    })
}

/// A map out of `M`, written as the images of the basis.
fn show_map(f: &Homomorphism, into: &FiniteModule) -> String {
    let src = f.source();
    let parts: Vec<String> = (0..src.dim())
        .map(|j| format!("{} -> {}", src.labels()[j], format_element(into, &f.apply(&src.basis(j)))))
        .collect();
    parts.join(", ")
}

fn validate(file: &Path) -> Result<Done, Failure> {
    let inst = load(file)?;
    let mut out = String::new();
    writeln!(out, "instance = {}", inst.describe()).unwrap();
    writeln!(out, "ring_order = {}", inst.ring.order()).unwrap();
    writeln!(out, "ring_commutative = {}", inst.ring.is_commutative()).unwrap();
    writeln!(out, "module_order = {}", inst.module.order()).unwrap();
    writeln!(out, "inv_factors = {:?}", inst.module.inv_factors()).unwrap();
    out.push_str(&predicates_text(&inst)?);
    Ok(Done::ok(out))
}

fn predicates_text(inst: &Instance) -> Result<String, Failure> {
    let ctx = context(inst)?;
    let p = is_goldie(&ctx)?;
    let mut out = String::new();
    writeln!(out, "end_order = {}", ctx.end().order()).unwrap();
    writeln!(out, "lattice_size = {}", p.lattice_size).unwrap();
    writeln!(out, "fully_invariant = {}", ctx.fully_invariant().len()).unwrap();
    writeln!(out, "quasi_projective = {}", p.is_quasi_projective).unwrap();
    writeln!(out, "retractable = {}", p.is_retractable).unwrap();
    writeln!(out, "goldie = {}", p.is_goldie).unwrap();
    writeln!(out, "uniform_dim = {}", p.uniform_dim).unwrap();
    writeln!(out, "acc_annihilators = {}", p.satisfies_acc_annihilators).unwrap();
    writeln!(out, "annihilators = {}", p.annihilator_count).unwrap();
    writeln!(out, "noetherian = {}", p.is_noetherian).unwrap();
    Ok(out)
}

fn hom(file: &Path, target: &str) -> Result<Done, Failure> {
    let inst = load(file)?;
    let m = &inst.module;
    let k = sub(m, target)?;
    let (km, incl) = submodule_module(m, &k);
    let g = hom_group(m, &km)?;
    let mut out = String::new();
    writeln!(out, "target = {}", k.display()).unwrap();
    let inv: Vec<String> = g.group_invariants().iter().map(|d| d.to_string()).collect();
    writeln!(out, "invariants = [{}]", inv.join(", ")).unwrap();
    match g.order() {
        Some(o) => writeln!(out, "order = {o}").unwrap(),
        None => writeln!(out, "order = overflow").unwrap(),
    }
    for (i, f) in g.generators().iter().enumerate() {
        writeln!(out, "gen {i}: {}", show_map(&incl.compose_after(f), m)).unwrap();
    }
    Ok(Done::ok(out))
}

fn product_cmd(file: &Path, left: &str, right: &str) -> Result<Done, Failure> {
    let inst = load(file)?;
    let ctx = context(&inst)?;
    let n = sub(&inst.module, left)?;
    let k = sub(&inst.module, right)?;
    Ok(Done::ok(format!("{}\n", product(&ctx, &n, &k).display())))
}

fn power(file: &Path, sub_text: &str, max: Option<u32>) -> Result<Done, Failure> {
    let inst = load(file)?;
    let ctx = context(&inst)?;
    let n = sub(&inst.module, sub_text)?;
    let t = power_trace(&ctx, &n);
    let mut out = String::new();
    for (i, p) in t.chain.iter().enumerate() {
        writeln!(out, "N^{} = {}", i + 1, p.display()).unwrap();
    }
    match t.terminal {
        Terminal::Zero(i) => writeln!(out, "nilpotency_index = {i}").unwrap(),
        Terminal::Cycle { start, period } => writeln!(out, "cycle start = {start} period = {period}").unwrap(),
    }
    match t.divergence {
        Some(d) => writeln!(out, "right_nesting_differs_at = {d}").unwrap(),
        None => writeln!(out, "right_nesting_agrees = true").unwrap(),
    }
    if let Some(max) = max {
        for l in 1..=max as usize {
            writeln!(out, "power {l} = {}", t.power(l).display()).unwrap();
        }
    }
    Ok(Done::ok(out))
}

fn radical(file: &Path) -> Result<Done, Failure> {
    let inst = load(file)?;
    let ctx = context(&inst)?;
    let r = prime_radical(&ctx).map_err(|e| Failure::Budget(e.to_string()))?;
    let mut out = String::new();
    writeln!(out, "L = {}", r.ell.display()).unwrap();
    writeln!(out, "prime_radical = {}", r.prime_radical.display()).unwrap();
    match r.nilpotency_of_radical {
        Some(i) => writeln!(out, "nilpotency_index = {i}").unwrap(),
        None => writeln!(out, "nilpotency_index = none").unwrap(),
    }
    let primes: Vec<String> = r.primes.iter().map(|p| p.display()).collect();
    writeln!(out, "primes = [{}]", primes.join(", ")).unwrap();
    let semiprimes: Vec<String> = r.semiprimes.iter().map(|p| p.display()).collect();
    writeln!(out, "semiprimes = [{}]", semiprimes.join(", ")).unwrap();
    if let Some(b) = r.ell_locally_nilpotent {
        writeln!(out, "L_locally_nilpotent = {b}").unwrap();
    }
    Ok(Done::ok(out))
}

fn verify(
    seed: u64,
    budget: u64,
    only: &[String],
    jobs: u64,
    witness_dir: Option<&Path>,
    json: Option<&Path>,
) -> Result<Done, Failure> {
    let ids: Vec<StatementId> = if only.is_empty() {
        StatementId::ALL.to_vec()
    } else {
        only.iter().map(|s| statement(s.trim())).collect::<Result<_, _>>()?
    };
    let corpus = generate_corpus(seed, budget as usize);
    let summary = run_suite(&corpus, &ids, jobs as usize);
    if let Some(dir) = witness_dir {
        summary.write_witnesses(&corpus, dir).map_err(|e| Failure::Usage(format!("{}: {e}", dir.display())))?;
    }
    if let Some(path) = json {
        let text = serde_json::to_string_pretty(&summary).expect("reports serialize");
        std::fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    }
    Ok(Done { text: summary.text(), found_fail: summary.fail_count() > 0 })
}

fn search(id: &str, drop: &str, seed: u64, budget: u64, jobs: u64) -> Result<Done, Failure> {
    let id = statement(id)?;
    let dropped = match drop {
        "none" => None,
        h => Some(Hypothesis::parse(h).ok_or_else(|| {
            let known: Vec<&str> = id.hypotheses().iter().map(|h| h.code()).collect();
            Failure::Usage(format!("unknown hypothesis `{h}`; {id} has: none, {}", known.join(", ")))
        })?),
    };
    let corpus = generate_corpus(seed, budget as usize);
    let reports = search_counterexamples(id, dropped, &corpus, jobs as usize).map_err(|e| Failure::Usage(e.to_string()))?;
    let mut out = format!("statement={id} dropped={} seed={seed} instances={}\n", drop, corpus.len());
    for r in &reports {
        out.push_str(&r.line());
        out.push('\n');
        if let Outcome::Fail(w) = &r.outcome {
            for (k, v) in &w.data {
                writeln!(out, "\t{k} = {v}").unwrap();
            }
        }
    }
    let fails = reports.iter().filter(|r| r.is_fail()).count();
    let exercised = reports.iter().filter(|r| r.cases > 0).count();
    writeln!(out, "evaluated={exercised} counterexamples={fails}").unwrap();
    Ok(Done { text: out, found_fail: fails > 0 })
}

fn oracle(file: &Path, op: OracleOp, target: Option<&str>, left: Option<&str>, right: Option<&str>) -> Result<Done, Failure> {
    let inst = load(file)?;
    let m = &inst.module;
    let budget = OracleBudget::default();
    let o = Oracle::new(m, budget)?;
    let as_sub = |set: &goldie::oracle::ElementSet| {
        let gens: Vec<Vec<i64>> = set.iter().map(|i| o.element(i).to_vec()).collect();
        Submodule::from_generators(m, &gens).display()
    };
    let mut out = String::new();
    match op {
        OracleOp::Hom => {
            let k = match target {
                Some(t) => sub(m, t)?,
                None => Submodule::full(m),
            };
            let (km, incl) = submodule_module(m, &k);
            let maps = brute_hom_group(m, &km, &budget)?;
            writeln!(out, "target = {}", k.display()).unwrap();
            writeln!(out, "order = {}", maps.len()).unwrap();
            for (i, mat) in maps.iter().enumerate() {
                let f = Homomorphism::from_matrix(m.clone(), km.clone(), mat.clone())?;
                writeln!(out, "map {i}: {}", show_map(&incl.compose_after(&f), m)).unwrap();
            }
        }
        OracleOp::Product => {
            let (Some(l), Some(r)) = (left, right) else {
                return Err(Failure::Usage("--op product needs --left and --right".into()));
            };
            let n = o.element_set(&sub(m, l)?);
            let k = o.element_set(&sub(m, r)?);
            writeln!(out, "{}", as_sub(&o.brute_product(&n, &k))).unwrap();
        }
        OracleOp::Radical => {
            writeln!(out, "L = {}", as_sub(&o.brute_ell()?)).unwrap();
            writeln!(out, "prime_radical = {}", as_sub(&o.brute_prime_radical()?)).unwrap();
        }
    }
    Ok(Done::ok(out))
}

fn run(cli: Cli) -> Result<Done, Failure> {
    match cli.command {
        Command::Validate { file } => validate(&file),
        Command::Hom { file, target } => hom(&file, &target),
        Command::Product { file, left, right } => product_cmd(&file, &left, &right),
        Command::Power { file, sub, max } => power(&file, &sub, max),
        Command::Radical { file } => radical(&file),
        Command::Predicates { file } => {
            let inst = load(&file)?;
            predicates_text(&inst).map(Done::ok)
        }
        Command::Verify { corpus_seed, budget, only, jobs, witness_dir, json } => {
            verify(corpus_seed, budget, &only, jobs, witness_dir.as_deref(), json.as_deref())
        }
        Command::Search { statement, drop, corpus_seed, budget, jobs } => search(&statement, &drop, corpus_seed, budget, jobs),
        Command::Oracle { file, op, target, left, right } => {
            oracle(&file, op, target.as_deref(), left.as_deref(), right.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(done) => {
            print!("{}", done.text);
            ExitCode::from(if done.found_fail { 1 } else { 0 })
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

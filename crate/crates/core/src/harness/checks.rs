//! Hypothesis gating and conclusion checkers for every catalog statement.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::corpus::{derived_caps, CorpusEntry};
use super::endring::{annihilator_of, ring_annihilator, two_sided_ideal, Side};
use super::{Hypothesis, Outcome, StatementId, Witness};
use crate::algebra::{free_module, opposite_ring, regular_module, FiniteModule, FiniteRing};
use crate::context::ModuleContext;
use crate::homspace::{endos_mapping_into, hom_group, lift_through, Homomorphism};
use crate::intlat::SubgroupForm;
use crate::lattice::{
    annihilator_lattice, common_kernel, is_fully_invariant, is_retractable, left_annihilator_in_end, uniform_dimension,
    Submodule,
};
use crate::oracle::{brute_hom_group, Oracle, OracleBudget, OracleError};
use crate::product::{is_locally_nilpotent_definitional, is_nil_submodule, nilpotency_index, product};
use crate::radical::{
    ann_left, ann_right, annihilator_chain_index, chain_product, ell, is_semiprime_submodule, l_rel, prime_radical,
    r_rel, subm_prefix, subm_sequence, SubmDiagnostic,
};

pub(crate) enum Stop {
    Fail(Witness),
    NotMet(Hypothesis),
    Skip(String),
}

type Step = Result<(), Stop>;

const PRODUCT_SET_CAP: usize = 5000;

pub(crate) struct Check<'a> {
    entry: &'a CorpusEntry,
    ctx: &'a ModuleContext,
    focus: Option<Submodule>,
    dropped: Option<Hypothesis>,
    rng: ChaCha8Rng,
    pub cases: usize,
    pub strict_cases: usize,
    skipped: usize,
    rejected: Option<Hypothesis>,
}

fn fail(message: impl Into<String>, data: &[(&str, String)]) -> Stop {
    Stop::Fail(Witness { message: message.into(), data: data.iter().map(|(k, v)| (k.to_string(), v.clone())).collect() })
}

fn show(s: &Submodule) -> String {
    s.display()
}

fn is_regular(m: &FiniteModule) -> bool {
    let reg = regular_module(m.ring());
    reg.inv_factors() == m.inv_factors() && reg.actions() == m.actions()
}

fn prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let p = (2..=n).find(|d| n % d == 0)?;
    let mut k = 0;
    let mut m = n;
    while m % p == 0 {
        m /= p;
        k += 1;
    }
    (m == 1).then_some((p, k))
}

/// Pairs `(A, B)` of nonzero submodules with `A ⊕ B = M`, each listed once.
fn decompositions(members: &[Submodule]) -> Vec<(Submodule, Submodule)> {
    let mut out = Vec::new();
    for (i, a) in members.iter().enumerate() {
        if a.is_zero() || a.is_full() {
            continue;
        }
        for b in &members[i + 1..] {
            if !b.is_zero() && a.intersection(b).is_zero() && a.sum(b).is_full() {
                out.push((a.clone(), b.clone()));
            }
        }
    }
    out
}

fn is_semiprime_module(ctx: &ModuleContext) -> bool {
    !ctx.module().is_zero_module() && is_semiprime_submodule(ctx, &ctx.zero()).map(|v| v.holds).unwrap_or(false)
}

impl<'a> Check<'a> {
    pub fn new(entry: &'a CorpusEntry, focus: Option<Submodule>, dropped: Option<Hypothesis>, rng: ChaCha8Rng) -> Self {
        Check { entry, ctx: &entry.ctx, focus, dropped, rng, cases: 0, strict_cases: 0, skipped: 0, rejected: None }
    }

    pub fn run(&mut self, id: StatementId) -> Outcome {
        use StatementId::*;
        let step = match id {
            LemProddirsumm => self.proddirsumm(),
            LemFprod => self.fprod(),
            LemEpiproduct => self.epiproduct(),
            LemFactornil => self.factornil(),
            RemLocnilNil => self.locnil_nil(),
            LemFgnilp => self.fgnilp(),
            RemFinsumNilp => self.finsum_nilp(),
            LemSumlocnil => self.sumlocnil(),
            PropLfiyrad => self.lfiyrad(),
            CorLsp => self.lsp(),
            CorNesl => self.nesl(),
            CorPrnilnet => self.prnilnet(),
            ExZpn => self.ex_zpn(),
            LemLsumas => self.lsumas(),
            PropSemiprimeDirsum => self.semiprime_dirsum(),
            CorRsp => self.free_modules(false),
            CorFreeNilp => self.free_modules(true),
            PropMaccsacc => self.maccsacc(),
            LemNilpsubnil => self.nilpsubnil(),
            PropAccnillocnil => self.accnillocnil(),
            LemRannintersection => self.rannintersection(),
            LemDccannr => self.dccannr(),
            LemDccl => self.dccl(),
            PropFactorrightacc => self.factorrightacc(),
            CorDccrn => self.dccrn(),
            LemRannncero => self.rannncero(),
            PropSubm => self.subm(),
            LemAccmoduloann => self.accmoduloann(),
            LemFmret => self.fmret(),
            LemMgolsgol => self.mgolsgol(),
            ThmMain => self.thm_main(),
            CorPrimenilgoldie => self.primenilgoldie(),
        };
        match step {
            Err(Stop::Fail(w)) => Outcome::Fail(w),
            Err(Stop::NotMet(h)) => Outcome::HypothesisNotMet(h),
            Err(Stop::Skip(why)) => Outcome::Skipped(why),
            Ok(()) if self.cases > 0 => Outcome::Pass,
            Ok(()) => match self.rejected {
                Some(h) => Outcome::HypothesisNotMet(h),
                None if self.skipped > 0 => Outcome::Skipped("every case exceeded a cap".into()),
                None => Outcome::Pass,
            },
        }
    }

    // ---- gating -------------------------------------------------------

    /// Whether a case whose hypothesis `h` evaluates to `holds` is in scope:
    /// normally it must hold; when `h` is dropped it must fail.
    fn admits(&mut self, h: Hypothesis, holds: bool) -> bool {
        let ok = holds != (self.dropped == Some(h));
        if !ok {
            self.rejected = Some(h);
        }
        ok
    }

    fn require(&mut self, h: Hypothesis) -> Step {
        let holds = match h {
            Hypothesis::QuasiProjective => self.entry.profile.is_quasi_projective,
            Hypothesis::Retractable => self.entry.profile.is_retractable,
            Hypothesis::Regular => is_regular(self.ctx.module()),
            Hypothesis::CyclicPrimePower => {
                let d = self.ctx.module().inv_factors();
                d.len() == 1 && prime_power(d[0]).is_some()
            }
            Hypothesis::Decomposable => !decompositions(self.members()).is_empty(),
            other => unreachable!("{other} is a property of a submodule"),
        };
        if self.admits(h, holds) {
            Ok(())
        } else {
            Err(Stop::NotMet(h))
        }
    }

    fn fi(&mut self, n: &Submodule) -> bool {
        let holds = is_fully_invariant(self.ctx, n);
        self.admits(Hypothesis::FullyInvariant, holds)
    }

    fn nil(&mut self, n: &Submodule) -> bool {
        let holds = is_nil_submodule(self.ctx, n).is_nil;
        self.admits(Hypothesis::Nil, holds)
    }

    fn proper(&mut self, n: &Submodule) -> bool {
        self.admits(Hypothesis::Proper, !n.is_full())
    }

    fn nilpotent(&mut self, n: &Submodule) -> bool {
        let holds = nilpotency_index(self.ctx, n).is_some();
        self.admits(Hypothesis::Nilpotent, holds)
    }

    fn locally_nilpotent(&mut self, n: &Submodule) -> Option<bool> {
        match is_locally_nilpotent_definitional(self.ctx, n, PRODUCT_SET_CAP) {
            Ok(holds) => Some(self.admits(Hypothesis::LocallyNilpotent, holds)),
            Err(_) => {
                self.skipped += 1;
                None
            }
        }
    }

    // ---- sampling -----------------------------------------------------

    fn members(&self) -> &'a [Submodule] {
        self.ctx.lattice().expect("corpus entries have a lattice").members()
    }

    fn sample<T: Clone>(&mut self, items: &[T], k: usize) -> Vec<T> {
        if items.len() <= k {
            return items.to_vec();
        }
        let mut idx = sample(&mut self.rng, items.len(), k).into_vec();
        idx.sort_unstable();
        idx.into_iter().map(|i| items[i].clone()).collect()
    }

    /// Submodules in the main role: the focus if given, otherwise a sample,
    /// drawn from the fully invariant ones when the role requires it.
    fn subjects(&mut self, k: usize, fully_invariant_role: bool) -> Vec<Submodule> {
        if let Some(f) = &self.focus {
            return vec![f.clone()];
        }
        let pool: &[Submodule] = if fully_invariant_role && self.dropped != Some(Hypothesis::FullyInvariant) {
            self.ctx.fully_invariant()
        } else {
            self.members()
        };
        self.sample(pool, k)
    }

    fn any_member(&mut self) -> Submodule {
        let m = self.members();
        m[self.rng.gen_range(0..m.len())].clone()
    }

    fn members_inside(&mut self, n: &Submodule, k: usize) -> Vec<Submodule> {
        let inside: Vec<Submodule> = self.members().iter().filter(|s| s.is_subset_of(n)).cloned().collect();
        self.sample(&inside, k)
    }

    fn random_endo(&mut self) -> Homomorphism {
        random_endo_of(self.ctx, &mut self.rng)
    }

    // ---- statements ---------------------------------------------------

    fn proddirsumm(&mut self) -> Step {
        let members = self.members();
        for n in self.subjects(4, false) {
            if n.is_zero() {
                continue;
            }
            let Some(d) = self.entry.submodule(&n) else {
                self.skipped += 1;
                continue;
            };
            let summand = members.iter().any(|c| c.intersection(&n).is_zero() && c.sum(&n).is_full());
            let inside = self.members_inside(&n, 4);
            for (i, k) in inside.iter().enumerate() {
                let l = &inside[(i + 1) % inside.len()];
                let in_m = product(self.ctx, k, l);
                let in_n = d.map.image_of(&product(&d.ctx, &d.map.preimage(k), &d.map.preimage(l)));
                self.cases += 1;
                if !in_m.is_subset_of(&in_n) {
                    return Err(fail("K_M L is not inside K_N L", &[("N", show(&n)), ("K", show(k)), ("L", show(l))]));
                }
                if summand {
                    if !n.is_full() {
                        self.strict_cases += 1;
                    }
                    if in_m != in_n {
                        return Err(fail(
                            "K_M L differs from K_N L for a direct summand N",
                            &[("N", show(&n)), ("K", show(k)), ("L", show(l)), ("K_M L", show(&in_m)), ("K_N L", show(&in_n))],
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    fn fprod(&mut self) -> Step {
        self.require(Hypothesis::QuasiProjective)?;
        for a in self.subjects(6, false) {
            let b = self.any_member();
            let f = self.random_endo();
            let ab = product(self.ctx, &a, &b);
            let lhs = f.image_of(&ab);
            let rhs = product(self.ctx, &a, &f.image_of(&b));
            self.cases += 1;
            if lhs != rhs {
                return Err(fail("f(A_M B) != A_M f(B)", &[("A", show(&a)), ("B", show(&b)), ("f", format!("{:?}", f.matrix().to_rows()))]));
            }
            if !product(self.ctx, &f.image_of(&a), &b).is_subset_of(&ab) {
                return Err(fail("f(A)_M B is not inside A_M B", &[("A", show(&a)), ("B", show(&b)), ("f", format!("{:?}", f.matrix().to_rows()))]));
            }
            if !f.is_zero() {
                self.strict_cases += 1;
            }
        }
        Ok(())
    }

    fn epiproduct(&mut self) -> Step {
        self.require(Hypothesis::QuasiProjective)?;
        for k in self.subjects(4, true) {
            if !self.fi(&k) {
                continue;
            }
            let Some(d) = self.entry.quotient(&k) else {
                self.skipped += 1;
                continue;
            };
            for n in self.sample(self.members(), 4) {
                let lhs = d.map.image_of(&product(self.ctx, &n, &n));
                let pn = d.map.image_of(&n);
                let rhs = product(&d.ctx, &pn, &pn);
                self.cases += 1;
                if !k.is_zero() && !k.is_full() {
                    self.strict_cases += 1;
                }
                if lhs != rhs {
                    return Err(fail("π(N_M N) != π(N)_{M/K} π(N)", &[("K", show(&k)), ("N", show(&n))]));
                }
            }
        }
        Ok(())
    }

    fn factornil(&mut self) -> Step {
        self.require(Hypothesis::QuasiProjective)?;
        let mut used = 0;
        for n in self.subjects(12, false) {
            if used == 4 || !self.nil(&n) {
                continue;
            }
            used += 1;
            for k in self.sample(self.members(), 3) {
                let Some(d) = self.entry.quotient(&k) else {
                    self.skipped += 1;
                    continue;
                };
                let image = d.map.image_of(&n);
                self.cases += 1;
                if !image.is_zero() {
                    self.strict_cases += 1;
                }
                if !is_nil_submodule(&d.ctx, &image).is_nil {
                    return Err(fail("(N+K)/K is not nil in M/K", &[("N", show(&n)), ("K", show(&k))]));
                }
            }
        }
        Ok(())
    }

    fn locnil_nil(&mut self) -> Step {
        for n in self.subjects(6, false) {
            let Ok(ln) = is_locally_nilpotent_definitional(self.ctx, &n, PRODUCT_SET_CAP) else {
                self.skipped += 1;
                continue;
            };
            let nil = is_nil_submodule(self.ctx, &n).is_nil;
            let nilpotent = nilpotency_index(self.ctx, &n).is_some();
            self.cases += 1;
            if ln && !n.is_zero() {
                self.strict_cases += 1;
            }
            if ln && !nil {
                return Err(fail("locally nilpotent but not nil", &[("N", show(&n))]));
            }
            if nilpotent && !ln {
                return Err(fail("nilpotent but not locally nilpotent", &[("N", show(&n))]));
            }
        }
        Ok(())
    }

    fn fgnilp(&mut self) -> Step {
        self.require(Hypothesis::QuasiProjective)?;
        for n in self.subjects(8, false) {
            if self.locally_nilpotent(&n) != Some(true) {
                continue;
            }
            self.cases += 1;
            if !n.is_zero() {
                self.strict_cases += 1;
            }
            if nilpotency_index(self.ctx, &n).is_none() {
                return Err(fail("locally nilpotent submodule is not nilpotent", &[("N", show(&n))]));
            }
        }
        Ok(())
    }

    fn finsum_nilp(&mut self) -> Step {
        self.require(Hypothesis::QuasiProjective)?;
        let pool: Vec<Submodule> = self.subjects(10, false).into_iter().filter(|n| self.nilpotent(n)).take(4).collect();
        let others: Vec<Submodule> = self.sample(self.members(), 10).into_iter().filter(|n| self.nilpotent(n)).take(4).collect();
        for n in &pool {
            for l in &others {
                let s = n.sum(l);
                self.cases += 1;
                if !n.is_subset_of(l) && !l.is_subset_of(n) {
                    self.strict_cases += 1;
                }
                if nilpotency_index(self.ctx, &s).is_none() {
                    return Err(fail("sum of nilpotent submodules is not nilpotent", &[("N", show(n)), ("L", show(l))]));
                }
            }
        }
        Ok(())
    }

    fn sumlocnil(&mut self) -> Step {
        self.require(Hypothesis::QuasiProjective)?;
        let mut pool = Vec::new();
        for n in self.subjects(8, false) {
            if pool.len() < 3 && self.locally_nilpotent(&n) == Some(true) {
                pool.push(n);
            }
        }
        let mut others = Vec::new();
        for n in self.sample(self.members(), 8) {
            if others.len() < 3 && self.locally_nilpotent(&n) == Some(true) {
                others.push(n);
            }
        }
        for n in &pool {
            for l in &others {
                let Ok(ln) = is_locally_nilpotent_definitional(self.ctx, &n.sum(l), PRODUCT_SET_CAP) else {
                    self.skipped += 1;
                    continue;
                };
                self.cases += 1;
                if !n.is_subset_of(l) && !l.is_subset_of(n) {
                    self.strict_cases += 1;
                }
                if !ln {
                    return Err(fail("sum of locally nilpotent submodules is not locally nilpotent", &[("N", show(n)), ("L", show(l))]));
                }
            }
        }
        Ok(())
    }

    fn lfiyrad(&mut self) -> Step {
        self.require(Hypothesis::QuasiProjective)?;
        let l = ell(self.ctx);
        if !is_fully_invariant(self.ctx, &l) {
            return Err(fail("𝔏(M) is not fully invariant", &[("L", show(&l))]));
        }
        let Some(d) = self.entry.quotient(&l) else {
            return Err(Stop::Skip("M/𝔏(M) over caps".into()));
        };
        self.cases += 1;
        if !l.is_zero() {
            self.strict_cases += 1;
        }
        let lq = ell(&d.ctx);
        if !lq.is_zero() {
            return Err(fail("𝔏(M/𝔏(M)) != 0", &[("L", show(&l)), ("L(M/L)", show(&lq))]));
        }
        Ok(())
    }

    fn lsp(&mut self) -> Step {
        self.require(Hypothesis::QuasiProjective)?;
        if self.ctx.module().is_zero_module() {
            return Ok(());
        }
        let l = ell(self.ctx);
        self.cases += 1;
        if !l.is_zero() {
            self.strict_cases += 1;
        }
        if l.is_full() {
            return Err(fail("𝔏(M) = M", &[("L", show(&l))]));
        }
        let v = is_semiprime_submodule(self.ctx, &l).map_err(|e| Stop::Skip(e.to_string()))?;
        if !v.holds {
            let (n, _) = v.witness.expect("a failing semiprime test has a witness");
            return Err(fail("𝔏(M) is not semiprime", &[("L", show(&l)), ("N", show(&n))]));
        }
        Ok(())
    }

    fn radical_profile(&self) -> Result<&'a crate::radical::RadicalProfile, Stop> {
        self.entry.radical().ok_or_else(|| Stop::Skip("radical computation over caps".into()))
    }

    fn nesl(&mut self) -> Step {
        self.require(Hypothesis::QuasiProjective)?;
        let rad = self.radical_profile()?;
        self.cases += 1;
        if !rad.ell.is_zero() {
            self.strict_cases += 1;
        }
        if rad.prime_radical != rad.ell {
            return Err(fail("prime radical differs from 𝔏(M)", &[("prime_radical", show(&rad.prime_radical)), ("L", show(&rad.ell))]));
        }
        Ok(())
    }

    fn prnilnet(&mut self) -> Step {
        self.require(Hypothesis::QuasiProjective)?;
        self.radical_nilpotent()
    }

    fn radical_nilpotent(&mut self) -> Step {
        let rad = self.radical_profile()?;
        self.cases += 1;
        if !rad.prime_radical.is_zero() {
            self.strict_cases += 1;
        }
        if rad.nilpotency_of_radical.is_none() {
            return Err(fail("prime radical is not nilpotent", &[("prime_radical", show(&rad.prime_radical))]));
        }
        Ok(())
    }

    fn ex_zpn(&mut self) -> Step {
        self.require(Hypothesis::CyclicPrimePower)?;
        let m = self.ctx.module();
        let (p, n) = prime_power(m.inv_factors()[0]).expect("checked by the hypothesis");
        let pm = Submodule::from_generators(m, &[m.scale(p as i64, &m.basis(0))]);
        let l = ell(self.ctx);
        let index = nilpotency_index(self.ctx, &l);
        self.cases += 1;
        if n >= 2 {
            self.strict_cases += 1;
        }
        if l != pm || index != Some(n as usize) || !self.entry.profile.is_quasi_projective {
            return Err(fail(
                "𝔏(Z/p^n) is not pM with index n",
                &[("L", show(&l)), ("pM", show(&pm)), ("index", format!("{index:?}")), ("n", n.to_string())],
            ));
        }
        Ok(())
    }

    fn decompositions_sample(&mut self) -> Vec<(Submodule, Submodule)> {
        let all = decompositions(self.members());
        self.sample(&all, 3)
    }

    fn lsumas(&mut self) -> Step {
        self.require(Hypothesis::QuasiProjective)?;
        self.require(Hypothesis::Decomposable)?;
        let l = ell(self.ctx);
        for (a, b) in self.decompositions_sample() {
            let (Some(da), Some(db)) = (self.entry.submodule(&a), self.entry.submodule(&b)) else {
                self.skipped += 1;
                continue;
            };
            let la = da.map.image_of(&ell(&da.ctx));
            let lb = db.map.image_of(&ell(&db.ctx));
            self.cases += 1;
            self.strict_cases += 1;
            if l != la.sum(&lb) {
                return Err(fail(
                    "𝔏(A ⊕ B) != 𝔏(A) ⊕ 𝔏(B)",
                    &[("A", show(&a)), ("B", show(&b)), ("L(M)", show(&l)), ("L(A)", show(&la)), ("L(B)", show(&lb))],
                ));
            }
        }
        Ok(())
    }

    fn semiprime_dirsum(&mut self) -> Step {
        self.require(Hypothesis::QuasiProjective)?;
        self.require(Hypothesis::Decomposable)?;
        let whole = is_semiprime_module(self.ctx);
        for (a, b) in self.decompositions_sample() {
            let (Some(da), Some(db)) = (self.entry.submodule(&a), self.entry.submodule(&b)) else {
                self.skipped += 1;
                continue;
            };
            let parts = is_semiprime_module(&da.ctx) && is_semiprime_module(&db.ctx);
            self.cases += 1;
            if whole {
                self.strict_cases += 1;
            }
            if whole != parts {
                return Err(fail(
                    "semiprimeness of A ⊕ B differs from that of the summands",
                    &[("A", show(&a)), ("B", show(&b)), ("M semiprime", whole.to_string()), ("summands semiprime", parts.to_string())],
                ));
            }
        }
        Ok(())
    }

    /// Semiprimeness (or nilpotency of the prime radical) of `R^1`, `R^2`
    /// and of the same free modules over the opposite ring.
    fn free_modules(&mut self, radical: bool) -> Step {
        self.require(Hypothesis::Regular)?;
        let ring = self.ctx.module().ring().clone();
        let values = free_module_values(&ring, radical).ok_or_else(|| Stop::Skip("free module over caps".into()))?;
        self.cases += 1;
        if values.iter().any(|(_, v)| !v) {
            self.strict_cases += 1;
        }
        if values.iter().any(|(_, v)| *v != values[0].1) {
            let what = if radical { "nilpotency of the prime radical" } else { "semiprimeness" };
            return Err(fail(
                format!("{what} is not the same for R and its free modules"),
                &values.iter().map(|(k, v)| (*k, v.to_string())).collect::<Vec<_>>(),
            ));
        }
        Ok(())
    }

    fn maccsacc(&mut self) -> Step {
        let ev = end_ring_checks(self.ctx, &mut self.rng, 4, false).map_err(Stop::Fail)?;
        self.cases += ev.draws;
        self.strict_cases += ev.right_annihilators_seen.saturating_sub(1);
        Ok(())
    }

    fn nilpsubnil(&mut self) -> Step {
        self.require(Hypothesis::QuasiProjective)?;
        for n in self.subjects(6, true) {
            if !self.fi(&n) || !self.nil(&n) {
                continue;
            }
            let pool: Vec<Submodule> = if self.dropped == Some(Hypothesis::FullyInvariant) {
                self.members().to_vec()
            } else {
                self.ctx.fully_invariant().to_vec()
            };
            let inside: Vec<Submodule> = pool.into_iter().filter(|k| k.is_subset_of(&n) && *k != n).collect();
            for k in self.sample(&inside, 3) {
                if !self.fi(&k) {
                    continue;
                }
                let Some(d) = self.entry.quotient(&k) else {
                    self.skipped += 1;
                    continue;
                };
                let image = d.map.image_of(&n);
                let found = d.ctx.cyclics_in(&image).into_iter().find(|c| !c.is_zero() && nilpotency_index(&d.ctx, c).is_some());
                self.cases += 1;
                if !k.is_zero() {
                    self.strict_cases += 1;
                }
                if found.is_none() {
                    return Err(fail("N/K has no nonzero nilpotent submodule", &[("N", show(&n)), ("K", show(&k))]));
                }
            }
        }
        Ok(())
    }

    fn accnillocnil(&mut self) -> Step {
        self.require(Hypothesis::QuasiProjective)?;
        for n in self.subjects(8, true) {
            if !self.fi(&n) || !self.nil(&n) {
                continue;
            }
            let Ok(ln) = is_locally_nilpotent_definitional(self.ctx, &n, PRODUCT_SET_CAP) else {
                self.skipped += 1;
                continue;
            };
            self.cases += 1;
            if !n.is_zero() {
                self.strict_cases += 1;
            }
            if !ln {
                return Err(fail("fully invariant nil submodule is not locally nilpotent", &[("N", show(&n))]));
            }
        }
        Ok(())
    }

    fn rannintersection(&mut self) -> Step {
        for first in self.subjects(4, false) {
            let size = self.rng.gen_range(1..=2);
            let mut family = vec![first];
            for _ in 0..size {
                family.push(self.any_member());
            }
            let meet = family.iter().map(|n| ann_right(self.ctx, n)).reduce(|a, b| a.intersection(&b)).expect("nonempty");
            let total = family.iter().cloned().reduce(|a, b| a.sum(&b)).expect("nonempty");
            let rhs = ann_right(self.ctx, &total);
            self.cases += 1;
            if !meet.is_full() {
                self.strict_cases += 1;
            }
            if meet != rhs {
                let mut data: Vec<(&str, String)> = family.iter().map(|n| ("N_i", show(n))).collect();
                data.push(("intersection", show(&meet)));
                data.push(("ann^r(sum)", show(&rhs)));
                return Err(fail("⋂ ann^r(N_i) != ann^r(Σ N_i)", &data));
            }
        }
        Ok(())
    }

    fn dccannr(&mut self) -> Step {
        for n in self.subjects(6, false) {
            let a = ann_right(self.ctx, &n);
            let back = ann_right(self.ctx, &ann_left(self.ctx, &a));
            self.cases += 1;
            if !a.is_full() && !a.is_zero() {
                self.strict_cases += 1;
            }
            if back != a {
                return Err(fail("ann^r(ann(ann^r(N))) != ann^r(N)", &[("N", show(&n)), ("ann^r(N)", show(&a)), ("result", show(&back))]));
            }
        }
        Ok(())
    }

    fn dccl(&mut self) -> Step {
        self.require(Hypothesis::QuasiProjective)?;
        for x in self.subjects(4, false) {
            let l = left_annihilator_in_end(self.ctx, &x);
            let k = common_kernel(self.ctx, &l);
            self.cases += 1;
            if left_annihilator_in_end(self.ctx, &k) != l {
                return Err(fail("l_S(⋂_{l_S(X)} Ker f) != l_S(X)", &[("X", show(&x)), ("kernel", show(&k))]));
            }
        }
        for _ in 0..3 {
            let ys: Vec<Homomorphism> = (0..self.rng.gen_range(1..=2)).map(|_| self.random_endo()).collect();
            let k = ys.iter().fold(self.ctx.full(), |acc, y| acc.intersection(&y.kernel()));
            let back = common_kernel(self.ctx, &left_annihilator_in_end(self.ctx, &k));
            self.cases += 1;
            if back != k {
                return Err(fail("⋂_Y Ker f != ⋂ Ker over l_S of it", &[("kernel", show(&k)), ("result", show(&back))]));
            }
        }
        match annihilator_lattice(self.ctx, self.ctx.caps().max_lattice) {
            Ok(anns) => {
                let lefts: BTreeSet<SubgroupForm> = anns.iter().map(|a| left_annihilator_in_end(self.ctx, a)).collect();
                self.cases += 1;
                self.strict_cases += anns.len().saturating_sub(2);
                if lefts.len() != anns.len() {
                    return Err(fail(
                        "annihilators and left annihilators in End(M) are not in bijection",
                        &[("annihilators", anns.len().to_string()), ("left annihilators", lefts.len().to_string())],
                    ));
                }
            }
            Err(_) => self.skipped += 1,
        }
        Ok(())
    }

    fn factorrightacc(&mut self) -> Step {
        self.require(Hypothesis::QuasiProjective)?;
        let end = self.ctx.end();
        for n in self.subjects(4, false) {
            let a = ann_right(self.ctx, &n);
            for _ in 0..2 {
                let x = a.sum(&self.any_member());
                let lifted = endos_mapping_into(end, &x, &a);
                let direct = left_annihilator_in_end(self.ctx, &product(self.ctx, &n, &x));
                self.cases += 1;
                if lifted != direct {
                    return Err(fail(
                        "{f : f(X) ⊆ ann^r(N)} != l_S(N_M X)",
                        &[("N", show(&n)), ("X", show(&x)), ("ann^r(N)", show(&a))],
                    ));
                }
            }
            if let Some(d) = self.entry.quotient(&a) {
                if annihilator_lattice(&d.ctx, d.ctx.caps().max_lattice).is_ok() && !a.is_zero() {
                    self.strict_cases += 1;
                }
            }
        }
        Ok(())
    }

    fn dccrn(&mut self) -> Step {
        for n in self.subjects(4, false) {
            for k in self.members_inside(&n, 2) {
                let l = l_rel(self.ctx, &n, &k).map_err(|e| Stop::Skip(e.to_string()))?;
                let l_back = ann_left(self.ctx, &ann_right(self.ctx, &l)).intersection(&n);
                let r = r_rel(self.ctx, &n, &k).map_err(|e| Stop::Skip(e.to_string()))?;
                let r_back = ann_right(self.ctx, &ann_left(self.ctx, &r)).intersection(&n);
                self.cases += 1;
                if !k.is_zero() && k != n {
                    self.strict_cases += 1;
                }
                if l != l_back {
                    return Err(fail("l_N(K) != ann(ann^r(l_N(K))) ∩ N", &[("N", show(&n)), ("K", show(&k)), ("l_N(K)", show(&l)), ("result", show(&l_back))]));
                }
                if r != r_back {
                    return Err(fail("r_N(K) != ann^r(ann(r_N(K))) ∩ N", &[("N", show(&n)), ("K", show(&k)), ("r_N(K)", show(&r)), ("result", show(&r_back))]));
                }
            }
        }
        Ok(())
    }

    /// Fully invariant, nil, proper and nonzero subjects, gated in that order.
    fn fi_nil_proper(&mut self, k: usize) -> Vec<Submodule> {
        let mut out = Vec::new();
        for n in self.subjects(k, true) {
            if n.is_zero() {
                continue;
            }
            if self.fi(&n) && self.proper(&n) && self.nil(&n) {
                out.push(n);
            }
        }
        out
    }

    fn rannncero(&mut self) -> Step {
        self.require(Hypothesis::QuasiProjective)?;
        for n in self.fi_nil_proper(8) {
            let r = r_rel(self.ctx, &n, &n).map_err(|e| Stop::Skip(e.to_string()))?;
            self.cases += 1;
            self.strict_cases += 1;
            if r.is_zero() {
                return Err(fail("r_N(N) = 0", &[("N", show(&n))]));
            }
        }
        Ok(())
    }

    fn subm(&mut self) -> Step {
        self.require(Hypothesis::QuasiProjective)?;
        for n in self.fi_nil_proper(8) {
            self.cases += 1;
            if let Some(w) = subm_contracts(self.ctx, &n)? {
                return Err(Stop::Fail(w));
            }
            self.strict_cases += 1;
        }
        Ok(())
    }

    fn accmoduloann(&mut self) -> Step {
        self.require(Hypothesis::QuasiProjective)?;
        let end = self.ctx.end();
        let s = end.as_ring().clone();
        for _ in 0..3 {
            let g: Vec<i64> = s.add_orders().iter().map(|&o| self.rng.gen_range(0..o as i64)).collect();
            let ideal = two_sided_ideal(&s, &[g]);
            let ideal_maps: Vec<Homomorphism> = ideal.generators().iter().map(|c| end.element(c)).collect();
            let n = common_kernel(self.ctx, &ideal);
            if !is_fully_invariant(self.ctx, &n) {
                return Err(fail("common kernel of an ideal is not fully invariant", &[("N", show(&n))]));
            }
            let Some(d) = self.entry.quotient(&n) else {
                self.skipped += 1;
                continue;
            };
            let qend = d.ctx.end();
            let bars: Vec<Homomorphism> = (0..self.rng.gen_range(1..=2)).map(|_| random_endo_of(&d.ctx, &mut self.rng)).collect();
            let kernel_bar = bars.iter().fold(d.ctx.full(), |acc, f| acc.intersection(&f.kernel()));
            let a = d.map.preimage(&kernel_bar);
            let mut through = self.ctx.full();
            for fb in &bars {
                let h = fb.compose_after(&d.map);
                let Some(f) = lift_through(end, &d.map, &h) else {
                    return Err(fail("an endomorphism of M/N does not lift", &[("N", show(&n)), ("map", format!("{:?}", fb.matrix().to_rows()))]));
                };
                for g in &ideal_maps {
                    through = through.intersection(&g.compose_after(&f).kernel());
                }
            }
            self.cases += 1;
            if !n.is_zero() && !n.is_full() {
                self.strict_cases += 1;
            }
            if through != a {
                return Err(fail(
                    "preimage of an annihilator of M/N is not the matching annihilator of M",
                    &[("N", show(&n)), ("preimage", show(&a)), ("kernel of the products", show(&through))],
                ));
            }
            if annihilator_lattice(&d.ctx, qend.order().min(u64::from(u32::MAX)) as usize + d.ctx.caps().max_lattice).is_err() {
                self.skipped += 1;
            }
        }
        Ok(())
    }

    fn fmret(&mut self) -> Step {
        self.require(Hypothesis::QuasiProjective)?;
        self.require(Hypothesis::Retractable)?;
        for n in self.subjects(4, false) {
            for (name, a) in [("ann^r(N)", ann_right(self.ctx, &n)), ("ann(N)", ann_left(self.ctx, &n))] {
                let Some(d) = self.entry.quotient(&a) else {
                    self.skipped += 1;
                    continue;
                };
                self.cases += 1;
                if !a.is_zero() && !a.is_full() {
                    self.strict_cases += 1;
                }
                if !is_retractable(&d.ctx) {
                    return Err(fail(format!("M/{name} is not retractable"), &[("N", show(&n)), (name, show(&a))]));
                }
            }
        }
        Ok(())
    }

    fn mgolsgol(&mut self) -> Step {
        self.require(Hypothesis::QuasiProjective)?;
        self.require(Hypothesis::Retractable)?;
        let ev = end_ring_checks(self.ctx, &mut self.rng, 4, true).map_err(Stop::Fail)?;
        if ev.right_uniform_dimension.is_none() {
            return Err(Stop::Skip("End(M) too large for its right regular module".into()));
        }
        self.cases += ev.draws;
        self.strict_cases += 1;
        Ok(())
    }

    fn thm_main(&mut self) -> Step {
        self.require(Hypothesis::QuasiProjective)?;
        self.require(Hypothesis::Retractable)?;
        for n in self.fi_nil_proper(16) {
            self.cases += 1;
            self.strict_cases += 1;
            if nilpotency_index(self.ctx, &n).is_none() {
                return Err(fail("fully invariant nil submodule is not nilpotent", &[("N", show(&n))]));
            }
            if annihilator_chain_index(self.ctx, &n).is_none() {
                return Err(fail("ann(N^k) never stabilizes", &[("N", show(&n))]));
            }
        }
        Ok(())
    }

    fn primenilgoldie(&mut self) -> Step {
        self.require(Hypothesis::QuasiProjective)?;
        self.require(Hypothesis::Retractable)?;
        self.radical_nilpotent()
    }
}

fn random_endo_of(ctx: &ModuleContext, rng: &mut ChaCha8Rng) -> Homomorphism {
    let end = ctx.end();
    let coords: Vec<i64> = end.hom_group().group_invariants().iter().map(|&o| rng.gen_range(0..o as i64)).collect();
    end.element(&coords)
}

/// Runs the constructor checks for a fully invariant nil `n != 0`: the
/// construction must stop with a violated hypothesis, `N^(l-1)` must be a
/// nonzero part of `l_N(N)`, and each prefix term must follow the recursion.
/// `Ok(None)` when all of that holds.
pub fn subm_contract_check(ctx: &ModuleContext, n: &Submodule) -> Result<Option<Witness>, String> {
    subm_contracts(ctx, n).map_err(|e| match e {
        Stop::Skip(why) => why,
        Stop::Fail(w) => w.message,
        Stop::NotMet(h) => h.to_string(),
    })
}

fn subm_contracts(ctx: &ModuleContext, n: &Submodule) -> Result<Option<Witness>, Stop> {
    let w = |m: &str| Some(Witness { message: m.to_string(), data: vec![("N".into(), show(n))] });
    let seq = subm_sequence(ctx, n, 4).map_err(|e| Stop::Skip(e.to_string()))?;
    if !matches!(seq.diagnostics, SubmDiagnostic::HypothesisViolated(_)) {
        return Ok(w("the construction did not report a violated hypothesis"));
    }
    let Some(l) = nilpotency_index(ctx, n) else {
        return Ok(w("nil fully invariant submodule is not nilpotent"));
    };
    let top = crate::product::power(ctx, n, l - 1);
    let left = l_rel(ctx, n, n).map_err(|e| Stop::Skip(e.to_string()))?;
    if top.is_zero() || !top.is_subset_of(&left) {
        return Ok(w("N^(l-1) is not a nonzero part of l_N(N)"));
    }
    let (a, feeds) = subm_prefix(ctx, n, 3);
    let a1 = r_rel(ctx, n, n).map_err(|e| Stop::Skip(e.to_string()))?;
    if a[0] != a1 || a1.is_zero() || !product(ctx, &a1, &a1).is_zero() {
        return Ok(w("A_1 is not a nonzero r_N(N) with A_1 M A_1 = 0"));
    }
    for i in 1..a.len() {
        let feed = chain_product(ctx, &a[..i], Some(n));
        let expected = r_rel(ctx, n, &feed).map_err(|e| Stop::Skip(e.to_string()))?;
        if feeds[i] != feed || a[i] != expected {
            return Ok(w("A_{i+1} differs from r_N(A_1 M ... M A_i M N)"));
        }
    }
    Ok(None)
}

/// Semiprimeness or nilpotency of the prime radical for `R`, `R^2`, `R^op`
/// and `(R^op)^2`; `None` when a free module exceeds the caps.
pub fn free_module_values(ring: &Arc<FiniteRing>, radical: bool) -> Option<Vec<(&'static str, bool)>> {
    let op = Arc::new(opposite_ring(ring));
    let mut out = Vec::new();
    for (name, r, k) in [("R", ring, 1), ("R^2", ring, 2), ("R^op", &op, 1), ("(R^op)^2", &op, 2)] {
        let ctx = ModuleContext::with_caps(free_module(r, k), derived_caps()).ok()?;
        let v = if radical {
            prime_radical(&ctx).ok()?.nilpotency_of_radical.is_some()
        } else {
            is_semiprime_module(&ctx)
        };
        out.push((name, v));
    }
    Some(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct EndRingEvidence {
    pub end_order: u64,
    pub draws: usize,
    /// Distinct right annihilators met in the draws; all lie in a finite poset.
    pub right_annihilators_seen: usize,
    /// Uniform dimension of `End(M)` as a right module over itself.
    pub right_uniform_dimension: Option<usize>,
}

/// Right-annihilator and right-Goldie checks on `S = End(M)`: for random
/// `Y ⊆ S`, `ann^l_S(Y) = l_S(⋂_{f ∈ ann^l_S(Y)} Ker f)` and
/// `ann^r(ann^l(ann^r(Y))) = ann^r(Y)`. With `udim`, also the uniform
/// dimension of `S_S`, computed on the regular module of `S^op`.
pub fn end_ring_checks(ctx: &ModuleContext, rng: &mut ChaCha8Rng, draws: usize, udim: bool) -> Result<EndRingEvidence, Witness> {
    let end = ctx.end();
    let s = end.as_ring();
    let mut rights = BTreeSet::new();
    for _ in 0..draws {
        let ys: Vec<Vec<i64>> = (0..rng.gen_range(1..=2))
            .map(|_| s.add_orders().iter().map(|&o| rng.gen_range(0..o as i64)).collect())
            .collect();
        let left = ring_annihilator(s, &ys, Side::Left);
        let k = common_kernel(ctx, &left);
        if left_annihilator_in_end(ctx, &k) != left {
            return Err(Witness {
                message: "ann^l_S(Y) != l_S(⋂ Ker f over ann^l_S(Y))".into(),
                data: vec![("Y".into(), format!("{ys:?}")), ("kernel".into(), show(&k))],
            });
        }
        let right = ring_annihilator(s, &ys, Side::Right);
        let back = annihilator_of(s, &annihilator_of(s, &right, Side::Left), Side::Right);
        if back != right {
            return Err(Witness { message: "ann^r(ann^l(ann^r(Y))) != ann^r(Y)".into(), data: vec![("Y".into(), format!("{ys:?}"))] });
        }
        rights.insert(right);
    }
    let right_uniform_dimension = if udim {
        let op = Arc::new(opposite_ring(s));
        ModuleContext::with_caps(Arc::new(regular_module(&op)), derived_caps()).ok().map(|c| uniform_dimension(&c))
    } else {
        None
    };
    Ok(EndRingEvidence { end_order: end.order(), draws, right_annihilators_seen: rights.len(), right_uniform_dimension })
}

/// Quasi-projective associativity `(A_M B)_M C = A_M (B_M C)` on `draws`
/// random triples; returns the number checked or a witness.
pub fn product_associativity(ctx: &ModuleContext, rng: &mut ChaCha8Rng, draws: usize) -> Result<usize, Witness> {
    let members = ctx.lattice().map_err(|e| Witness { message: e.to_string(), data: vec![] })?.members();
    let mut pick = || members[rng.gen_range(0..members.len())].clone();
    for _ in 0..draws {
        let (a, b, c) = (pick(), pick(), pick());
        let left = product(ctx, &product(ctx, &a, &b), &c);
        let right = product(ctx, &a, &product(ctx, &b, &c));
        if left != right {
            return Err(Witness {
                message: "(A_M B)_M C != A_M (B_M C)".into(),
                data: vec![("A".into(), show(&a)), ("B".into(), show(&b)), ("C".into(), show(&c))],
            });
        }
    }
    Ok(draws)
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct OracleAgreement {
    pub hom_pairs: usize,
    pub products: usize,
    pub submodules: usize,
    /// Set when the oracle budget was exceeded; nothing was compared.
    pub over_budget: bool,
}

fn sorted_matrices(hs: Vec<Homomorphism>) -> Vec<crate::intlat::Matrix> {
    let mut v: Vec<_> = hs.into_iter().map(|h| h.matrix().clone()).collect();
    v.sort();
    v
}

/// Compares the main computations with the brute-force oracle: Hom groups
/// (End, into and out of sampled submodules), the lattice, sampled products,
/// 𝔏 and the prime radical.
pub fn oracle_agreement(entry: &CorpusEntry, rng: &mut ChaCha8Rng, product_draws: usize) -> Result<OracleAgreement, String> {
    let ctx = &entry.ctx;
    let m = ctx.module();
    let budget = OracleBudget::default();
    let oracle = match Oracle::new(m, budget) {
        Ok(o) => o,
        Err(OracleError::BudgetExceeded { .. }) => return Ok(OracleAgreement { over_budget: true, ..Default::default() }),
    };
    let mut out = OracleAgreement::default();
    let members = ctx.lattice().map_err(|e| e.to_string())?.members();

    let mut pairs: Vec<(Arc<FiniteModule>, Arc<FiniteModule>)> = vec![(m.clone(), m.clone())];
    for _ in 0..2 {
        let k = &members[rng.gen_range(0..members.len())];
        if let Some(d) = entry.submodule(k) {
            pairs.push((m.clone(), d.ctx.module().clone()));
            pairs.push((d.ctx.module().clone(), m.clone()));
        }
    }
    for (a, b) in pairs {
        let main = hom_group(&a, &b).map_err(|e| e.to_string())?;
        let Ok(brute) = brute_hom_group(&a, &b, &budget) else { continue };
        let Ok(elems) = main.elements(budget.max_hom_enumeration) else { continue };
        if sorted_matrices(elems) != brute {
            return Err(format!("Hom groups differ for {} -> {}", a.order(), b.order()));
        }
        out.hom_pairs += 1;
    }

    let brute_lattice = oracle.brute_all_submodules().map_err(|e| e.to_string())?;
    let mut mine: Vec<_> = members.iter().map(|s| oracle.element_set(s)).collect();
    let mut theirs = brute_lattice;
    mine.sort();
    theirs.sort();
    if mine != theirs {
        return Err(format!("lattices differ: {} vs {} members", mine.len(), theirs.len()));
    }
    out.submodules = members.len();

    for _ in 0..product_draws {
        let n = &members[rng.gen_range(0..members.len())];
        let k = &members[rng.gen_range(0..members.len())];
        let main = oracle.element_set(&product(ctx, n, k));
        let brute = oracle.brute_product(&oracle.element_set(n), &oracle.element_set(k));
        if main != brute {
            return Err(format!("products differ for N = {} and K = {}", n.display(), k.display()));
        }
        out.products += 1;
    }

    let l = ell(ctx);
    if oracle.element_set(&l) != oracle.brute_ell().map_err(|e| e.to_string())? {
        return Err(format!("𝔏(M) differs: main {}", l.display()));
    }
    let rad = entry.radical().ok_or("prime radical over caps")?;
    if oracle.element_set(&rad.prime_radical) != oracle.brute_prime_radical().map_err(|e| e.to_string())? {
        return Err(format!("prime radicals differ: main {}", rad.prime_radical.display()));
    }
    Ok(out)
}

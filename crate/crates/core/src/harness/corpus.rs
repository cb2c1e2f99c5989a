//! Seeded instance corpora.
//!
//! A corpus starts with a fixed list of anchor instances and is topped up
//! with random draws from several families. Every instance is screened
//! against [`CorpusCaps`] and carries its predicate profile plus caches of
//! the quotient and submodule contexts the checks ask for.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{
    abelian_group_module, direct_sum, make_builtin, quotient_module, regular_module, submodule_module, FiniteModule,
    RingFamily,
};
use crate::context::{ContextCaps, ModuleContext};
use crate::homspace::Homomorphism;
use crate::instance::Instance;
use crate::intlat::SubgroupForm;
use crate::lattice::{is_goldie, PredicateProfile, Submodule};
use crate::radical::{prime_radical, RadicalProfile};

/// Size limits for corpus members.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CorpusCaps {
    pub max_module_order: u64,
    pub max_end_order: u64,
    pub max_lattice: usize,
}

impl Default for CorpusCaps {
    fn default() -> Self {
        CorpusCaps { max_module_order: 256, max_end_order: 4096, max_lattice: 2000 }
    }
}

impl CorpusCaps {
    fn context_caps(&self) -> ContextCaps {
        ContextCaps { max_module_order: self.max_module_order, max_end_order: self.max_end_order, max_lattice: self.max_lattice }
    }
}

/// Caps for quotients, submodules and free modules built during checks.
pub(crate) fn derived_caps() -> ContextCaps {
    ContextCaps { max_module_order: 4096, max_end_order: 1 << 20, max_lattice: 5000 }
}

/// A module built from a corpus member, with the map relating it to the
/// member: the projection for a quotient, the inclusion for a submodule.
#[derive(Debug)]
pub struct Derived {
    pub ctx: Arc<ModuleContext>,
    pub map: Homomorphism,
}

#[derive(Debug)]
pub struct CorpusEntry {
    pub index: usize,
    pub instance: Instance,
    pub ctx: Arc<ModuleContext>,
    pub profile: PredicateProfile,
    radical: OnceLock<Option<RadicalProfile>>,
    quotients: Mutex<HashMap<SubgroupForm, Option<Arc<Derived>>>>,
    submodules: Mutex<HashMap<SubgroupForm, Option<Arc<Derived>>>>,
}

impl CorpusEntry {
    /// Screens `instance` against `caps`; `None` when any cap is exceeded.
    pub fn build(index: usize, instance: Instance, caps: &CorpusCaps) -> Option<CorpusEntry> {
        let ctx = ModuleContext::with_caps(instance.module.clone(), caps.context_caps()).ok()?;
        let profile = is_goldie(&ctx).ok()?;
        Some(CorpusEntry {
            index,
            instance,
            ctx: Arc::new(ctx),
            profile,
            radical: OnceLock::new(),
            quotients: Mutex::new(HashMap::new()),
            submodules: Mutex::new(HashMap::new()),
        })
    }

    pub fn name(&self) -> String {
        self.instance.describe()
    }

    pub fn module(&self) -> &Arc<FiniteModule> {
        self.ctx.module()
    }

    pub fn radical(&self) -> Option<&RadicalProfile> {
        self.radical.get_or_init(|| prime_radical(&self.ctx).ok()).as_ref()
    }

    /// `M/K` with its projection, or `None` when it exceeds the derived caps.
    pub fn quotient(&self, k: &Submodule) -> Option<Arc<Derived>> {
        if let Some(d) = self.quotients.lock().expect("poisoned").get(k.form()) {
            return d.clone();
        }
        let (q, p) = quotient_module(self.module(), k);
        let d = ModuleContext::with_caps(q, derived_caps()).ok().map(|ctx| Arc::new(Derived { ctx: Arc::new(ctx), map: p }));
        self.quotients.lock().expect("poisoned").insert(k.form().clone(), d.clone());
        d
    }

    /// `K` as a module in its own right, with its inclusion into `M`.
    pub fn submodule(&self, k: &Submodule) -> Option<Arc<Derived>> {
        if let Some(d) = self.submodules.lock().expect("poisoned").get(k.form()) {
            return d.clone();
        }
        let (s, i) = submodule_module(self.module(), k);
        let d = ModuleContext::with_caps(s, derived_caps()).ok().map(|ctx| Arc::new(Derived { ctx: Arc::new(ctx), map: i }));
        self.submodules.lock().expect("poisoned").insert(k.form().clone(), d.clone());
        d
    }
}

#[derive(Debug)]
pub struct Corpus {
    pub seed: u64,
    pub entries: Vec<Arc<CorpusEntry>>,
}

impl Corpus {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn from_instances(instances: Vec<Instance>, caps: &CorpusCaps) -> Corpus {
        let entries = instances
            .into_iter()
            .filter_map(|inst| CorpusEntry::build(0, inst, caps))
            .enumerate()
            .map(|(i, mut e)| {
                e.index = i;
                Arc::new(e)
            })
            .collect();
        Corpus { seed: 0, entries }
    }
}

fn ring(family: &RingFamily) -> Option<Arc<crate::algebra::FiniteRing>> {
    make_builtin(family).ok().map(Arc::new)
}

fn regular(family: &RingFamily) -> Option<Instance> {
    let r = ring(family)?;
    Some(Instance::new(&family.to_string(), "regular", Arc::new(regular_module(&r))))
}

fn group_name(orders: &[u64]) -> String {
    orders.iter().map(|o| format!("Z{o}")).collect::<Vec<_>>().join("+")
}

/// A finite abelian group as a module over `Z/exponent`.
fn abelian(orders: &[u64]) -> Option<Instance> {
    let m = abelian_group_module(orders).ok()?;
    let e = m.exponent();
    Some(Instance::new(&format!("Z{e}"), &group_name(orders), m))
}

fn sum_of(a: &Instance, b: &Instance) -> Option<Instance> {
    let s = direct_sum(&a.module, &b.module).ok()?;
    Some(Instance::new(&a.ring_name, &format!("({})+({})", a.module_name, b.module_name), s.module))
}

fn quotient_of(base: &Instance, k: &Submodule) -> Instance {
    let (q, _) = quotient_module(&base.module, k);
    Instance::new(&base.ring_name, &format!("({})/{}", base.module_name, k.display()), q)
}

fn submodule_of(base: &Instance, k: &Submodule) -> Instance {
    let (s, _) = submodule_module(&base.module, k);
    Instance::new(&base.ring_name, &format!("{} in ({})", k.display(), base.module_name), s)
}

/// The fixed instances every corpus starts with.
pub fn anchor_instances() -> Vec<Instance> {
    use RingFamily::*;
    let mut out = Vec::new();
    let mut push = |i: Option<Instance>| out.extend(i);
    push(regular(&Zn(4)));
    push(regular(&Zn(6)));
    push(regular(&TriangularRing(2, 2)));
    push(abelian(&[2, 4]));
    push(regular(&MatrixRing(2, 2)));
    push(abelian(&[2, 2]));
    for p in [2u64, 3] {
        for n in 1..=4 {
            push(regular(&Zn(p.pow(n))));
        }
    }
    push(regular(&Zn(12)));
    push(regular(&TriangularRing(2, 3)));
    push(regular(&ProductRing(vec![Zn(2), Zn(4)])));
    push(abelian(&[2, 8]));
    push(abelian(&[3, 9]));
    if let Some(z4) = regular(&Zn(4)) {
        push(sum_of(&z4, &z4));
    }
    if let Some(t) = regular(&TriangularRing(2, 2)) {
        // the simple left ideal spanned by e12, and the projective R e22
        let j = Submodule::from_generators(&t.module, &[vec![0, 1, 0]]);
        push(Some(submodule_of(&t, &j)));
        let e22 = Submodule::from_generators(&t.module, &[vec![0, 0, 1]]);
        push(Some(quotient_of(&t, &e22)));
    }
    out
}

fn random_instance(rng: &mut ChaCha8Rng) -> Option<Instance> {
    use RingFamily::*;
    let small_rings = [Zn(2), Zn(3), Zn(4), Zn(8), Zn(9), TriangularRing(2, 2), MatrixRing(2, 2), TriangularRing(2, 3)];
    match rng.gen_range(0..8) {
        0 => regular(&Zn(rng.gen_range(2..=64))),
        1 => {
            let k = rng.gen_range(1..=3);
            let p = *[2u64, 3].choose(rng).expect("nonempty");
            if rng.gen_bool(0.5) {
                regular(&MatrixRing(k, p))
            } else {
                regular(&TriangularRing(k, p))
            }
        }
        2 => {
            let a = small_rings.choose(rng).expect("nonempty").clone();
            let b = small_rings.choose(rng).expect("nonempty").clone();
            regular(&ProductRing(vec![a, b]))
        }
        3 => {
            let p = *[2u64, 3, 5].choose(rng).expect("nonempty");
            let parts = rng.gen_range(1..=3);
            let mut orders: Vec<u64> = (0..parts).map(|_| p.pow(rng.gen_range(1..=3))).collect();
            orders.sort_unstable();
            abelian(&orders)
        }
        4 | 5 => {
            let base = if rng.gen_bool(0.5) {
                regular(small_rings.choose(rng).expect("nonempty"))?
            } else {
                let p = *[2u64, 3].choose(rng).expect("nonempty");
                abelian(&[p, p.pow(rng.gen_range(1..=3))])?
            };
            let ctx = ModuleContext::with_caps(base.module.clone(), CorpusCaps::default().context_caps()).ok()?;
            let members = ctx.lattice().ok()?.members().to_vec();
            let proper: Vec<&Submodule> = members.iter().filter(|s| !s.is_zero() && !s.is_full()).collect();
            let k = proper.choose(rng)?;
            if rng.gen_bool(0.6) {
                Some(quotient_of(&base, k))
            } else {
                Some(submodule_of(&base, k))
            }
        }
        _ => {
            let r = small_rings.choose(rng).expect("nonempty");
            let a = regular(r)?;
            let ctx = ModuleContext::with_caps(a.module.clone(), CorpusCaps::default().context_caps()).ok()?;
            let members = ctx.lattice().ok()?.members().to_vec();
            let k = members.iter().filter(|s| !s.is_full()).collect::<Vec<_>>().choose(rng).copied()?;
            let b = if k.is_zero() { a.clone() } else { quotient_of(&a, k) };
            sum_of(&a, &b)
        }
    }
}

/// Anchors first, then seeded random draws, deduplicated by name, until
/// `count` instances pass the caps.
pub fn generate_corpus(seed: u64, count: usize) -> Corpus {
    generate_corpus_with(seed, count, &CorpusCaps::default())
}

pub fn generate_corpus_with(seed: u64, count: usize, caps: &CorpusCaps) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut names = BTreeSet::new();
    let mut entries: Vec<Arc<CorpusEntry>> = Vec::new();
    let mut admit = |inst: Instance, entries: &mut Vec<Arc<CorpusEntry>>| {
        if entries.len() >= count || !names.insert(inst.describe()) {
            return;
        }
        if let Some(e) = CorpusEntry::build(entries.len(), inst, caps) {
            entries.push(Arc::new(e));
        }
    };
    for inst in anchor_instances() {
        admit(inst, &mut entries);
    }
    let mut attempts = 0;
    while entries.len() < count && attempts < 200 * count.max(1) {
        attempts += 1;
        if let Some(inst) = random_instance(&mut rng) {
            admit(inst, &mut entries);
        }
    }
    Corpus { seed, entries }
}

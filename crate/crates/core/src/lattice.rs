//! Submodules, the submodule lattice and the module predicates built on it.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::FiniteModule;
use crate::context::ModuleContext;
use crate::homspace::{endos_mapping_into, hom_group, HomError, Homomorphism};
use crate::intlat::{Matrix, SubgroupForm};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("lattice enumeration stopped after {partial} members (cap {cap})")]
    CapExceeded { partial: usize, cap: usize },
    #[error(transparent)]
    Hom(#[from] HomError),
}

/// An action-closed subgroup of a module, stored in canonical form.
#[derive(Clone, Debug)]
pub struct Submodule {
    module: Arc<FiniteModule>,
    form: SubgroupForm,
}

impl PartialEq for Submodule {
    fn eq(&self, other: &Self) -> bool {
        self.form == other.form && (Arc::ptr_eq(&self.module, &other.module) || self.module == other.module)
    }
}

impl Eq for Submodule {}

impl Hash for Submodule {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.form.hash(state);
    }
}

impl PartialOrd for Submodule {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Submodule {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order().cmp(&other.order()).then_with(|| self.form.cmp(&other.form))
    }
}

/// Smallest subgroup containing `gens` and closed under every matrix in `ops`.
pub(crate) fn closure(moduli: &[u64], gens: &[Vec<i64>], ops: &[&Matrix]) -> SubgroupForm {
    let mut form = SubgroupForm::from_generators(moduli, gens.iter().map(|g| g.as_slice()));
    loop {
        let current = form.generators();
        let mut next = form.clone();
        for g in &current {
            for op in ops {
                let img = op.apply_mod(g, moduli);
                if !next.contains(&img) {
                    next.insert(&img);
                }
            }
        }
        if next == form {
            return form;
        }
        form = next;
    }
}

impl Submodule {
    /// Submodule generated by `gens`.
    pub fn from_generators(module: &Arc<FiniteModule>, gens: &[Vec<i64>]) -> Self {
        let d = module.inv_factors();
        let mut all: Vec<Vec<i64>> = Vec::with_capacity(gens.len() * module.actions().len());
        for g in gens {
            for a in module.actions() {
                all.push(a.apply_mod(g, d));
            }
        }
        Submodule { module: module.clone(), form: SubgroupForm::from_generators(d, all.iter().map(|g| g.as_slice())) }
    }

    /// Wraps a subgroup that is already known to be action closed.
    pub(crate) fn from_form(module: &Arc<FiniteModule>, form: SubgroupForm) -> Self {
        debug_assert!(module.actions().iter().all(|a| form.generators().iter().all(|g| form.contains(&a.apply_mod(g, module.inv_factors())))));
        Submodule { module: module.clone(), form }
    }

    /// Checks action closure of an arbitrary subgroup.
    pub fn try_from_form(module: &Arc<FiniteModule>, form: SubgroupForm) -> Option<Self> {
        let d = module.inv_factors();
        let closed = module.actions().iter().all(|a| form.generators().iter().all(|g| form.contains(&a.apply_mod(g, d))));
        closed.then(|| Submodule { module: module.clone(), form })
    }

    pub fn zero(module: &Arc<FiniteModule>) -> Self {
        Submodule { module: module.clone(), form: SubgroupForm::zero(module.inv_factors()) }
    }

    pub fn full(module: &Arc<FiniteModule>) -> Self {
        Submodule { module: module.clone(), form: SubgroupForm::full(module.inv_factors()) }
    }

    pub fn module(&self) -> &Arc<FiniteModule> {
        &self.module
    }

    pub fn form(&self) -> &SubgroupForm {
        &self.form
    }

    /// Canonical basis: the nonzero Hermite rows.
    pub fn generators(&self) -> Vec<Vec<i64>> {
        self.form.generators()
    }

    pub fn basis(&self) -> crate::intlat::IntMatrix {
        let g = self.generators();
        crate::intlat::IntMatrix::from_i64_rows(g.len(), self.module.dim(), &g)
    }

    pub fn order(&self) -> u64 {
        self.form.order()
    }

    pub fn is_zero(&self) -> bool {
        self.form.is_zero()
    }

    pub fn is_full(&self) -> bool {
        self.form.is_full()
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        self.form.contains(x)
    }

    pub fn is_subset_of(&self, other: &Submodule) -> bool {
        self.form.is_subgroup_of(&other.form)
    }

    pub fn sum(&self, other: &Submodule) -> Submodule {
        Submodule { module: self.module.clone(), form: self.form.sum(&other.form) }
    }

    pub fn intersection(&self, other: &Submodule) -> Submodule {
        Submodule { module: self.module.clone(), form: self.form.intersection(&other.form) }
    }

    pub fn elements(&self) -> Vec<Vec<i64>> {
        self.form.elements()
    }

    pub fn is_stable_under(&self, f: &Homomorphism) -> bool {
        self.generators().iter().all(|g| self.contains(&f.apply(g)))
    }

    /// Generators as `<...>` using the module labels.
    pub fn display(&self) -> String {
        let gens = self.generators();
        if gens.is_empty() {
            return "<0>".into();
        }
        let parts: Vec<String> = gens.iter().map(|g| format_element(&self.module, g)).collect();
        format!("<{}>", parts.join(", "))
    }
}

impl fmt::Display for Submodule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display())
    }
}

impl Serialize for Submodule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.display())
    }
}

/// An element written with the module labels, or as a bare integer in rank one.
pub fn format_element(module: &FiniteModule, x: &[i64]) -> String {
    if module.dim() == 1 {
        return x[0].to_string();
    }
    let terms: Vec<String> = x
        .iter()
        .zip(module.labels())
        .filter(|(&c, _)| c != 0)
        .map(|(&c, l)| if c == 1 { l.clone() } else { format!("{c}*{l}") })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join("+")
    }
}

pub fn cyclic_submodule(module: &Arc<FiniteModule>, x: &[i64]) -> Submodule {
    Submodule::from_generators(module, &[module.reduce(x)])
}

/// Every submodule, ordered by (order, canonical basis).
#[derive(Clone, Debug)]
pub struct SubmoduleLattice {
    module: Arc<FiniteModule>,
    members: Vec<Submodule>,
    index: HashMap<SubgroupForm, usize>,
}

impl SubmoduleLattice {
    pub fn members(&self) -> &[Submodule] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn module(&self) -> &Arc<FiniteModule> {
        &self.module
    }

    pub fn index_of(&self, s: &Submodule) -> Option<usize> {
        self.index.get(s.form()).copied()
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.members[i].is_subset_of(&self.members[j])
    }

    pub fn join(&self, i: usize, j: usize) -> usize {
        self.index[self.members[i].sum(&self.members[j]).form()]
    }

    pub fn meet(&self, i: usize, j: usize) -> usize {
        self.index[self.members[i].intersection(&self.members[j]).form()]
    }
}

/// Breadth-first closure of `{0}` under adding members of `atoms`.
pub(crate) fn sums_of(module: &Arc<FiniteModule>, pieces: &[Submodule], cap: usize) -> Result<Vec<Submodule>, LatticeError> {
    let zero = Submodule::zero(module);
    let mut seen: HashSet<SubgroupForm> = HashSet::new();
    seen.insert(zero.form.clone());
    let mut out = vec![zero.clone()];
    let mut queue = VecDeque::from([zero]);
    while let Some(s) = queue.pop_front() {
        for c in pieces {
            if c.is_subset_of(&s) {
                continue;
            }
            let t = s.sum(c);
            if seen.insert(t.form.clone()) {
                if out.len() >= cap {
                    return Err(LatticeError::CapExceeded { partial: out.len(), cap });
                }
                out.push(t.clone());
                queue.push_back(t);
            }
        }
    }
    out.sort();
    Ok(out)
}

pub fn all_submodules(ctx: &ModuleContext) -> Result<&SubmoduleLattice, LatticeError> {
    ctx.lattice()
}

pub(crate) fn build_lattice(ctx: &ModuleContext, cap: usize) -> Result<SubmoduleLattice, LatticeError> {
    let members = sums_of(ctx.module(), ctx.cyclics(), cap)?;
    let index = members.iter().enumerate().map(|(i, s)| (s.form.clone(), i)).collect();
    Ok(SubmoduleLattice { module: ctx.module().clone(), members, index })
}

pub fn fully_invariant_submodules(ctx: &ModuleContext) -> &[Submodule] {
    ctx.fully_invariant()
}

pub fn is_fully_invariant(ctx: &ModuleContext, s: &Submodule) -> bool {
    ctx.end().gens_as_homs().iter().all(|g| s.is_stable_under(g))
}

/// Simple submodules, in lattice order.
pub fn atoms(ctx: &ModuleContext) -> Vec<Submodule> {
    let nonzero: Vec<&Submodule> = ctx.cyclics().iter().filter(|c| !c.is_zero()).collect();
    nonzero
        .iter()
        .filter(|c| !nonzero.iter().any(|d| d.order() < c.order() && d.is_subset_of(c)))
        .map(|c| (*c).clone())
        .collect()
}

pub fn socle(ctx: &ModuleContext) -> Submodule {
    atoms(ctx).iter().fold(ctx.zero(), |acc, a| acc.sum(a))
}

/// Number of simple summands of the socle.
pub fn uniform_dimension(ctx: &ModuleContext) -> usize {
    let mut acc = ctx.zero();
    let mut count = 0;
    for a in atoms(ctx) {
        if acc.intersection(&a).is_zero() {
            acc = acc.sum(&a);
            count += 1;
        }
    }
    count
}

/// `l_S(X) = {f ∈ End(M) : f(X) = 0}` in End coordinates.
pub fn left_annihilator_in_end(ctx: &ModuleContext, x: &Submodule) -> SubgroupForm {
    endos_mapping_into(ctx.end(), x, &ctx.zero())
}

/// `⋂ Ker f` over a set of endomorphisms given by End coordinates.
pub fn common_kernel(ctx: &ModuleContext, fs: &SubgroupForm) -> Submodule {
    fs.generators().iter().fold(ctx.full(), |acc, c| acc.intersection(&ctx.end().element(c).kernel()))
}

/// Smallest annihilator submodule containing `x`: the common kernel of
/// `l_S(x)`.
pub fn annihilator_closure(ctx: &ModuleContext, x: &Submodule) -> Submodule {
    common_kernel(ctx, &left_annihilator_in_end(ctx, x))
}

/// `{⋂_{f ∈ X} Ker f : X ⊆ End(M)}`, sorted. These are the fixed points of
/// [`annihilator_closure`]; each is reached from `0` by repeatedly adding a
/// cyclic submodule and closing. Fails when more than `cap` are found.
pub fn annihilator_lattice(ctx: &ModuleContext, cap: usize) -> Result<Vec<Submodule>, LatticeError> {
    let start = annihilator_closure(ctx, &ctx.zero());
    let mut seen: BTreeSet<Submodule> = BTreeSet::new();
    seen.insert(start.clone());
    let mut queue = VecDeque::from([start]);
    while let Some(a) = queue.pop_front() {
        for c in ctx.cyclics() {
            if c.is_subset_of(&a) {
                continue;
            }
            let b = annihilator_closure(ctx, &a.sum(c));
            if !seen.contains(&b) {
                if seen.len() >= cap {
                    return Err(LatticeError::CapExceeded { partial: seen.len(), cap });
                }
                seen.insert(b.clone());
                queue.push_back(b);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

/// `Hom(M, K) != 0` for every nonzero submodule `K`. Monotonicity in `K`
/// reduces the check to the simple submodules.
pub fn is_retractable(ctx: &ModuleContext) -> bool {
    retractable_witness(ctx).is_none()
}

pub fn retractable_witness(ctx: &ModuleContext) -> Option<Submodule> {
    atoms(ctx).into_iter().find(|a| ctx.hom_into_form(a).is_zero())
}

/// `End(M) -> Hom(M, M/K)` is onto for every submodule `K`; on failure the
/// offending `K` is returned.
pub fn quasi_projective_witness(ctx: &ModuleContext) -> Result<Option<Submodule>, LatticeError> {
    let lattice = ctx.lattice()?;
    let m = ctx.module();
    let gens = ctx.end().gens_as_homs();
    for k in lattice.members() {
        if k.is_zero() || k.is_full() {
            continue;
        }
        let (q, proj) = crate::algebra::quotient_module(m, k);
        let hom = hom_group(m, &q)?;
        let images: Vec<Homomorphism> = gens.iter().map(|g| proj.compose_after(g)).collect();
        let full = hom.order().expect("bounded by the module caps");
        if hom.span_order(&images) != full {
            return Ok(Some(k.clone()));
        }
    }
    Ok(None)
}

pub fn is_quasi_projective(ctx: &ModuleContext) -> Result<bool, LatticeError> {
    ctx.is_quasi_projective()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PredicateProfile {
    pub is_quasi_projective: bool,
    pub is_retractable: bool,
    pub is_goldie: bool,
    pub uniform_dim: usize,
    pub satisfies_acc_annihilators: bool,
    pub is_noetherian: bool,
    /// Size of the annihilator poset witnessing the chain condition.
    pub annihilator_count: usize,
    pub lattice_size: usize,
}

pub fn is_goldie(ctx: &ModuleContext) -> Result<PredicateProfile, LatticeError> {
    let anns = annihilator_lattice(ctx, ctx.caps().max_lattice)?;
    Ok(PredicateProfile {
        is_quasi_projective: ctx.is_quasi_projective()?,
        is_retractable: is_retractable(ctx),
        // a finite poset satisfies acc and the socle has finite length
        is_goldie: true,
        uniform_dim: uniform_dimension(ctx),
        satisfies_acc_annihilators: true,
        is_noetherian: true,
        annihilator_count: anns.len(),
        lattice_size: ctx.lattice()?.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{abelian_group_module, make_builtin, regular_module, validate_module, ModuleSpec, RingFamily};

    fn regular(f: RingFamily) -> ModuleContext {
        let r = Arc::new(make_builtin(&f).unwrap());
        ModuleContext::new(Arc::new(regular_module(&r))).unwrap()
    }

    fn z2_z4() -> ModuleContext {
        let r = Arc::new(make_builtin(&RingFamily::Zn(4)).unwrap());
        let m = validate_module(&r, &ModuleSpec { inv_factors: vec![2, 4], actions: vec![vec![vec![1, 0], vec![0, 1]]], labels: None }).unwrap();
        ModuleContext::new(Arc::new(m)).unwrap()
    }

    #[test]
    fn cyclics() {
        let ctx = regular(RingFamily::Zn(4));
        assert!(cyclic_submodule(ctx.module(), &[0]).is_zero());
        assert_eq!(cyclic_submodule(ctx.module(), &[2]).elements(), vec![vec![0], vec![2]]);
        let t = regular(RingFamily::TriangularRing(2, 2));
        let c = cyclic_submodule(t.module(), &[0, 1, 0]);
        assert_eq!(c.order(), 2);
        assert!(c.contains(&[0, 1, 0]));
    }

    #[test]
    fn lattice_sizes() {
        assert_eq!(regular(RingFamily::Zn(6)).lattice().unwrap().len(), 4);
        assert_eq!(regular(RingFamily::Zn(4)).lattice().unwrap().len(), 3);
        let f2sq = ModuleContext::new(abelian_group_module(&[2, 2]).unwrap()).unwrap();
        assert_eq!(f2sq.lattice().unwrap().len(), 5);
    }

    #[test]
    fn lattice_cap() {
        let big = ModuleContext::new(abelian_group_module(&[2, 2, 2, 2]).unwrap()).unwrap().with_lattice_cap(50);
        assert!(matches!(big.lattice(), Err(LatticeError::CapExceeded { cap: 50, .. })));
        let ok = ModuleContext::new(abelian_group_module(&[2, 2, 2, 2]).unwrap()).unwrap();
        assert_eq!(ok.lattice().unwrap().len(), 67);
    }

    #[test]
    fn fully_invariant_members() {
        assert_eq!(regular(RingFamily::Zn(4)).fully_invariant().len(), 3);
        assert_eq!(regular(RingFamily::MatrixRing(2, 2)).fully_invariant().len(), 2);
        assert_eq!(regular(RingFamily::TriangularRing(2, 2)).fully_invariant().len(), 5);
    }

    #[test]
    fn socle_and_udim() {
        let z4 = regular(RingFamily::Zn(4));
        assert_eq!(uniform_dimension(&z4), 1);
        assert_eq!(socle(&z4).order(), 2);
        let z6 = regular(RingFamily::Zn(6));
        assert_eq!(uniform_dimension(&z6), 2);
        assert!(socle(&z6).is_full());
        let r = Arc::new(make_builtin(&RingFamily::Zn(4)).unwrap());
        let zero = ModuleContext::new(Arc::new(crate::algebra::zero_module(&r))).unwrap();
        assert_eq!(uniform_dimension(&zero), 0);
    }

    #[test]
    fn annihilators() {
        assert_eq!(annihilator_lattice(&regular(RingFamily::Zn(4)), 1000).unwrap().len(), 3);
        assert_eq!(annihilator_lattice(&regular(RingFamily::Zn(6)), 1000).unwrap().len(), 4);
        assert_eq!(annihilator_lattice(&regular(RingFamily::Zn(5)), 1000).unwrap().len(), 2);
    }

    #[test]
    fn predicates() {
        let z4 = regular(RingFamily::Zn(4));
        assert!(is_retractable(&z4));
        assert!(z4.is_quasi_projective().unwrap());
        let p = is_goldie(&z4).unwrap();
        assert!(p.is_goldie && p.is_retractable && p.is_quasi_projective);
        assert_eq!(p.uniform_dim, 1);
        let bad = z2_z4();
        assert!(!bad.is_quasi_projective().unwrap());
        let p = is_goldie(&bad).unwrap();
        assert!(p.is_goldie && !p.is_quasi_projective);
        assert!(regular(RingFamily::TriangularRing(2, 2)).is_quasi_projective().unwrap());
    }
}

//! Brute-force reference implementations over explicit element tables.
//!
//! Nothing here calls the lattice, Hom or product code of the main path: the
//! tables are built from the raw action matrices with separate loops, Hom sets
//! are enumerated candidate by candidate, and submodules are plain bitsets.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::Arc;

use thiserror::Error;

use crate::algebra::FiniteModule;
use crate::intlat::Matrix;
use crate::lattice::Submodule;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_module_order: u64,
    pub max_hom_enumeration: u64,
    pub max_lattice: usize,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget { max_module_order: 256, max_hom_enumeration: 65536, max_lattice: 2000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{what} needs {size}, above the budget {cap}")]
    BudgetExceeded { what: &'static str, size: u64, cap: u64 },
}

fn over(what: &'static str, size: u64, cap: u64) -> Result<(), OracleError> {
    if size > cap {
        Err(OracleError::BudgetExceeded { what, size, cap })
    } else {
        Ok(())
    }
}

/// A set of elements of a module, indexed by the oracle's element table.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementSet {
    bits: Vec<u64>,
}

impl ElementSet {
    fn empty(n: usize) -> Self {
        ElementSet { bits: vec![0; n.div_ceil(64)] }
    }

    fn insert(&mut self, i: usize) -> bool {
        let (w, b) = (i / 64, 1u64 << (i % 64));
        let fresh = self.bits[w] & b == 0;
        self.bits[w] |= b;
        fresh
    }

    pub fn contains(&self, i: usize) -> bool {
        self.bits[i / 64] & (1u64 << (i % 64)) != 0
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn is_subset_of(&self, other: &ElementSet) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    pub fn intersection(&self, other: &ElementSet) -> ElementSet {
        ElementSet { bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a & b).collect() }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().flat_map(|(w, &word)| {
            (0..64).filter(move |b| word & (1u64 << b) != 0).map(move |b| w * 64 + b)
        })
    }
}

/// Element table of a module: coordinates, addition and the ring action.
struct Table {
    moduli: Vec<u64>,
    elems: Vec<Vec<i64>>,
    add: Vec<u32>,
    act: Vec<Vec<u32>>,
}

fn encode(moduli: &[u64], x: &[i64]) -> usize {
    let mut idx = 0usize;
    let mut stride = 1usize;
    for (v, &m) in x.iter().zip(moduli) {
        idx += (v.rem_euclid(m as i64) as usize) * stride;
        stride *= m as usize;
    }
    idx
}

fn decode(moduli: &[u64], mut idx: usize) -> Vec<i64> {
    moduli
        .iter()
        .map(|&m| {
            let v = idx % m as usize;
            idx /= m as usize;
            v as i64
        })
        .collect()
}

/// `A·x` with row `k` reduced modulo `moduli[k]`.
fn mat_vec(a: &Matrix, x: &[i64], moduli: &[u64]) -> Vec<i64> {
    (0..a.rows())
        .map(|k| {
            let mut acc: i128 = 0;
            for (j, &xj) in x.iter().enumerate() {
                acc += a.get(k, j) as i128 * xj as i128;
            }
            acc.rem_euclid(moduli[k] as i128) as i64
        })
        .collect()
}

impl Table {
    fn new(m: &FiniteModule) -> Table {
        let moduli = m.inv_factors().to_vec();
        let n = m.order() as usize;
        let elems: Vec<Vec<i64>> = (0..n).map(|i| decode(&moduli, i)).collect();
        let mut add = vec![0u32; n * n];
        for i in 0..n {
            for j in 0..n {
                let s: Vec<i64> = elems[i].iter().zip(&elems[j]).zip(&moduli).map(|((a, b), &d)| (a + b) % d as i64).collect();
                add[i * n + j] = encode(&moduli, &s) as u32;
            }
        }
        let act = m
            .actions()
            .iter()
            .map(|a| elems.iter().map(|x| encode(&moduli, &mat_vec(a, x, &moduli)) as u32).collect())
            .collect();
        Table { moduli, elems, add, act }
    }

    fn len(&self) -> usize {
        self.elems.len()
    }

    fn add(&self, i: usize, j: usize) -> usize {
        self.add[i * self.len() + j] as usize
    }

    /// Additive subgroup generated by `gens`.
    fn span(&self, start: &ElementSet, gens: &[usize]) -> ElementSet {
        let mut set = start.clone();
        let mut queue: VecDeque<usize> = set.iter().collect();
        if set.insert(0) {
            queue.push_back(0);
        }
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.add(x, g);
                if set.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        set
    }

    /// Submodule generated by `gens`.
    fn r_span(&self, start: &ElementSet, gens: &[usize]) -> ElementSet {
        let mut all: Vec<usize> = gens.to_vec();
        for &g in gens {
            for a in &self.act {
                all.push(a[g] as usize);
            }
        }
        all.sort_unstable();
        all.dedup();
        let mut set = self.span(start, &all);
        // the span of the b_k·x is already closed under the action, this loop
        // only matters for a non-submodule `start`
        loop {
            let extra: Vec<usize> =
                set.iter().flat_map(|x| self.act.iter().map(move |a| a[x] as usize)).filter(|y| !set.contains(*y)).collect();
            if extra.is_empty() {
                return set;
            }
            set = self.span(&set, &extra);
        }
    }
}

/// Every homomorphism `M -> N`, as `dim N × dim M` matrices with row `k`
/// reduced modulo the `k`-th invariant factor of `N`. Sorted.
pub fn brute_hom_group(m: &FiniteModule, n: &FiniteModule, budget: &OracleBudget) -> Result<Vec<Matrix>, OracleError> {
    over("source order", m.order(), budget.max_module_order)?;
    over("target order", n.order(), budget.max_module_order)?;
    let src = Table::new(m);
    let tgt = Table::new(n);
    let s = m.dim();
    let t = n.dim();
    let d = m.inv_factors();
    let e = n.inv_factors();

    let killed_by = |y: &[i64], k: u64| y.iter().zip(e).all(|(&v, &ek)| (v as i128 * k as i128) % ek as i128 == 0);
    let candidates: Vec<Vec<usize>> =
        (0..s).map(|j| (0..tgt.len()).filter(|&y| killed_by(&tgt.elems[y], d[j])).collect()).collect();
    let additive_count = candidates.iter().fold(1u64, |acc, c| acc.saturating_mul(c.len() as u64));

    let is_hom = |cols: &[Vec<i64>]| -> bool {
        let f = Matrix::from_columns(t, cols);
        m.actions().iter().zip(n.actions()).all(|(a, b)| {
            (0..s).all(|j| {
                let lhs = mat_vec(&f, &mat_vec(a, &unit(s, j), d), e);
                let rhs = mat_vec(b, &cols[j], e);
                lhs == rhs
            })
        })
    };

    let mut out = BTreeSet::new();
    if additive_count <= budget.max_hom_enumeration {
        let mut idx = vec![0usize; s];
        loop {
            let cols: Vec<Vec<i64>> = (0..s).map(|j| tgt.elems[candidates[j][idx[j]]].clone()).collect();
            if is_hom(&cols) {
                out.insert(Matrix::from_columns(t, &cols));
            }
            if !advance(&mut idx, &candidates.iter().map(|c| c.len()).collect::<Vec<_>>()) {
                break;
            }
        }
        return Ok(out.into_iter().collect());
    }

    // Fall back on images of a generating set of M as an R-module.
    let gens = r_generators(&src);
    let gen_count = (tgt.len() as u64).saturating_pow(gens.len() as u32);
    over("Hom candidates", additive_count.min(gen_count), budget.max_hom_enumeration)?;
    let ring = m.ring();
    let r_orders = ring.add_orders().to_vec();
    let r_size = ring.order();
    let tuples = r_size.saturating_pow(gens.len() as u32);
    over("ring tuples", tuples, budget.max_hom_enumeration)?;
    // express each basis vector e_j as Σ r_i·x_i
    let ring_act = |tab: &Table, r: &[i64], x: usize| -> usize {
        let mut acc = 0usize;
        for (k, &c) in r.iter().enumerate() {
            for _ in 0..c {
                acc = tab.add(acc, tab.act[k][x] as usize);
            }
        }
        acc
    };
    let mut expr: Vec<Option<Vec<Vec<i64>>>> = vec![None; s];
    let ring_elems: Vec<Vec<i64>> = (0..r_size as usize).map(|i| decode(&r_orders, i)).collect();
    let mut idx = vec![0usize; gens.len()];
    let lens = vec![ring_elems.len(); gens.len()];
    loop {
        let mut v = 0usize;
        for (g, &i) in gens.iter().zip(&idx) {
            v = src.add(v, ring_act(&src, &ring_elems[i], *g));
        }
        for j in 0..s {
            if expr[j].is_none() && v == encode(d, &unit(s, j)) {
                expr[j] = Some(idx.iter().map(|&i| ring_elems[i].clone()).collect());
            }
        }
        if expr.iter().all(|x| x.is_some()) || !advance(&mut idx, &lens) {
            break;
        }
    }
    let expr: Vec<Vec<Vec<i64>>> = expr.into_iter().map(|x| x.expect("generators span M")).collect();
    let mut idx = vec![0usize; gens.len()];
    let lens = vec![tgt.len(); gens.len()];
    loop {
        let cols: Vec<Vec<i64>> = (0..s)
            .map(|j| {
                let mut acc = 0usize;
                for (r, &y) in expr[j].iter().zip(&idx) {
                    acc = tgt.add(acc, ring_act(&tgt, r, y));
                }
                tgt.elems[acc].clone()
            })
            .collect();
        let well_defined = (0..s).all(|j| killed_by(&cols[j], d[j]));
        if well_defined && is_hom(&cols) {
            let f = Matrix::from_columns(t, &cols);
            let images_match =
                gens.iter().zip(&idx).all(|(&g, &y)| encode(e, &mat_vec(&f, &src.elems[g], e)) == y);
            if images_match {
                out.insert(f);
            }
        }
        if !advance(&mut idx, &lens) {
            break;
        }
    }
    Ok(out.into_iter().collect())
}

fn unit(s: usize, j: usize) -> Vec<i64> {
    let mut v = vec![0; s];
    v[j] = 1;
    v
}

/// Odometer step over `idx < lens`; false once every combination was seen.
fn advance(idx: &mut [usize], lens: &[usize]) -> bool {
    for (i, l) in idx.iter_mut().zip(lens) {
        *i += 1;
        if *i < *l {
            return true;
        }
        *i = 0;
    }
    false
}

/// Greedy generating set of a module: repeatedly add the element whose cyclic
/// submodule enlarges the current span the most.
fn r_generators(tab: &Table) -> Vec<usize> {
    let mut gens = Vec::new();
    let mut current = tab.r_span(&ElementSet::empty(tab.len()), &[]);
    while current.len() < tab.len() {
        let best = (0..tab.len())
            .filter(|&x| !current.contains(x))
            .max_by_key(|&x| (tab.r_span(&current, &[x]).len(), std::cmp::Reverse(x)))
            .expect("some element is missing");
        current = tab.r_span(&current, &[best]);
        gens.push(best);
    }
    gens
}

/// Brute-force evaluator for one module.
pub struct Oracle {
    module: Arc<FiniteModule>,
    budget: OracleBudget,
    tab: Table,
    /// Every endomorphism as a map on element indices.
    end: Vec<Vec<u32>>,
    /// Basis vector indices.
    basis: Vec<usize>,
    hom_cache: RefCell<HashMap<ElementSet, Vec<usize>>>,
    product_cache: RefCell<HashMap<(ElementSet, ElementSet), ElementSet>>,
}

/// A submodule together with a set of module generators.
#[derive(Clone, Debug)]
struct Member {
    set: ElementSet,
    gens: Vec<usize>,
}

impl Oracle {
    pub fn new(module: &Arc<FiniteModule>, budget: OracleBudget) -> Result<Oracle, OracleError> {
        over("module order", module.order(), budget.max_module_order)?;
        let tab = Table::new(module);
        let maps = brute_hom_group(module, module, &budget)?;
        let end = maps
            .iter()
            .map(|f| tab.elems.iter().map(|x| encode(&tab.moduli, &mat_vec(f, x, &tab.moduli)) as u32).collect())
            .collect();
        let basis = (0..module.dim()).map(|j| encode(&tab.moduli, &unit(module.dim(), j))).collect();
        Ok(Oracle {
            module: module.clone(),
            budget,
            tab,
            end,
            basis,
            hom_cache: RefCell::new(HashMap::new()),
            product_cache: RefCell::new(HashMap::new()),
        })
    }

    pub fn module(&self) -> &Arc<FiniteModule> {
        &self.module
    }

    pub fn end_order(&self) -> usize {
        self.end.len()
    }

    /// Elements of a main-path submodule, via membership tests only.
    pub fn element_set(&self, sub: &Submodule) -> ElementSet {
        let mut set = ElementSet::empty(self.tab.len());
        for (i, x) in self.tab.elems.iter().enumerate() {
            if sub.contains(x) {
                set.insert(i);
            }
        }
        set
    }

    pub fn element(&self, i: usize) -> &[i64] {
        &self.tab.elems[i]
    }

    pub fn zero(&self) -> ElementSet {
        let mut s = ElementSet::empty(self.tab.len());
        s.insert(0);
        s
    }

    pub fn full(&self) -> ElementSet {
        let mut s = ElementSet::empty(self.tab.len());
        for i in 0..self.tab.len() {
            s.insert(i);
        }
        s
    }

    /// Submodule generated by the given elements.
    pub fn generated(&self, gens: &[Vec<i64>]) -> ElementSet {
        let idx: Vec<usize> = gens.iter().map(|g| encode(&self.tab.moduli, g)).collect();
        self.tab.r_span(&ElementSet::empty(self.tab.len()), &idx)
    }

    /// Endomorphisms with image inside `k`, by index.
    fn hom_into(&self, k: &ElementSet) -> Vec<usize> {
        if let Some(v) = self.hom_cache.borrow().get(k) {
            return v.clone();
        }
        let v: Vec<usize> =
            (0..self.end.len()).filter(|&f| self.basis.iter().all(|&b| k.contains(self.end[f][b] as usize))).collect();
        self.hom_cache.borrow_mut().insert(k.clone(), v.clone());
        v
    }

    /// `N_M K`, summing `f(n)` over every map and every element.
    pub fn brute_product(&self, n: &ElementSet, k: &ElementSet) -> ElementSet {
        let key = (n.clone(), k.clone());
        if let Some(p) = self.product_cache.borrow().get(&key) {
            return p.clone();
        }
        let mut images = ElementSet::empty(self.tab.len());
        for f in self.hom_into(k) {
            for x in n.iter() {
                images.insert(self.end[f][x] as usize);
            }
        }
        let gens: Vec<usize> = images.iter().collect();
        let p = self.tab.span(&ElementSet::empty(self.tab.len()), &gens);
        self.product_cache.borrow_mut().insert(key, p.clone());
        p
    }

    fn cyclic_members(&self) -> Vec<Member> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for x in 0..self.tab.len() {
            let set = self.tab.r_span(&ElementSet::empty(self.tab.len()), &[x]);
            if seen.insert(set.clone()) {
                out.push(Member { set, gens: vec![x] });
            }
        }
        out
    }

    fn members(&self) -> Result<Vec<Member>, OracleError> {
        let cyclics = self.cyclic_members();
        let mut seen: HashSet<ElementSet> = cyclics.iter().map(|c| c.set.clone()).collect();
        let mut all = cyclics.clone();
        let mut queue: VecDeque<usize> = (0..all.len()).collect();
        while let Some(i) = queue.pop_front() {
            for c in &cyclics {
                if c.set.is_subset_of(&all[i].set) {
                    continue;
                }
                let set = self.tab.r_span(&all[i].set, &c.gens);
                if seen.insert(set.clone()) {
                    over("lattice size", seen.len() as u64, self.budget.max_lattice as u64)?;
                    let mut gens = all[i].gens.clone();
                    gens.extend(&c.gens);
                    all.push(Member { set, gens });
                    queue.push_back(all.len() - 1);
                }
            }
        }
        over("lattice size", all.len() as u64, self.budget.max_lattice as u64)?;
        Ok(all)
    }

    /// Every submodule, sorted by size and then by bitset.
    pub fn brute_all_submodules(&self) -> Result<Vec<ElementSet>, OracleError> {
        let mut sets: Vec<ElementSet> = self.members()?.into_iter().map(|m| m.set).collect();
        sets.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        Ok(sets)
    }

    fn fully_invariant_members(&self) -> Result<Vec<Member>, OracleError> {
        Ok(self
            .members()?
            .into_iter()
            .filter(|m| self.end.iter().all(|f| m.gens.iter().all(|&g| m.set.contains(f[g] as usize))))
            .collect())
    }

    pub fn brute_fully_invariant(&self) -> Result<Vec<ElementSet>, OracleError> {
        let mut sets: Vec<ElementSet> = self.fully_invariant_members()?.into_iter().map(|m| m.set).collect();
        sets.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        Ok(sets)
    }

    /// Intersection of the proper prime submodules; `M` when there are none.
    pub fn brute_prime_radical(&self) -> Result<ElementSet, OracleError> {
        let fi = self.brute_fully_invariant()?;
        let full = self.full();
        let mut radical = full.clone();
        for p in fi.iter().filter(|p| **p != full) {
            let prime = fi.iter().all(|a| {
                fi.iter().all(|b| a.is_subset_of(p) || b.is_subset_of(p) || !self.brute_product(a, b).is_subset_of(p))
            });
            if prime {
                radical = radical.intersection(p);
            }
        }
        Ok(radical)
    }

    /// Local nilpotency by the definition: iterate the sets of left-nested
    /// products of cyclic submodules of `n` until they vanish or repeat.
    pub fn brute_locally_nilpotent(&self, n: &ElementSet) -> bool {
        let base: Vec<ElementSet> = n
            .iter()
            .map(|x| self.tab.r_span(&ElementSet::empty(self.tab.len()), &[x]))
            .filter(|c| c.len() > 1)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let mut current: BTreeSet<ElementSet> = base.iter().cloned().collect();
        let mut seen = HashSet::new();
        loop {
            current.retain(|x| x.len() > 1);
            if current.is_empty() {
                return true;
            }
            if !seen.insert(current.clone()) {
                return false;
            }
            current = current.iter().flat_map(|x| base.iter().map(move |c| self.brute_product(x, c))).collect();
        }
    }

    /// Sum of every locally nilpotent submodule.
    pub fn brute_ell(&self) -> Result<ElementSet, OracleError> {
        let mut members = self.members()?;
        members.sort_by_key(|m| std::cmp::Reverse(m.set.len()));
        let mut acc = self.zero();
        for m in &members {
            if m.set.is_subset_of(&acc) {
                continue;
            }
            if self.brute_locally_nilpotent(&m.set) {
                acc = self.tab.r_span(&acc, &m.gens);
            }
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{make_builtin, regular_module, submodule_module, RingFamily};
    use crate::lattice::cyclic_submodule;

    fn zn(n: u64) -> Arc<FiniteModule> {
        let r = Arc::new(make_builtin(&RingFamily::Zn(n)).unwrap());
        Arc::new(regular_module(&r))
    }

    #[test]
    fn hom_examples() {
        let m = zn(4);
        let two = cyclic_submodule(&m, &[2]);
        let (sub, _) = submodule_module(&m, &two);
        let homs = brute_hom_group(&m, &sub, &OracleBudget::default()).unwrap();
        assert_eq!(homs.len(), 2);
        let m6 = zn(6);
        let (a, _) = submodule_module(&m6, &cyclic_submodule(&m6, &[2]));
        let (b, _) = submodule_module(&m6, &cyclic_submodule(&m6, &[3]));
        let homs = brute_hom_group(&a, &b, &OracleBudget::default()).unwrap();
        assert_eq!(homs.len(), 1);
        assert!(homs[0].is_zero());
    }

    #[test]
    fn products_and_radicals() {
        let o = Oracle::new(&zn(4), OracleBudget::default()).unwrap();
        let two = o.generated(&[vec![2]]);
        assert_eq!(o.brute_product(&two, &two), o.zero());
        assert_eq!(o.brute_product(&two, &o.full()), two);
        assert_eq!(o.brute_all_submodules().unwrap().len(), 3);
        assert_eq!(o.brute_ell().unwrap(), two);
        assert_eq!(o.brute_prime_radical().unwrap(), two);

        let o = Oracle::new(&zn(6), OracleBudget::default()).unwrap();
        assert_eq!(o.brute_all_submodules().unwrap().len(), 4);
        assert_eq!(o.brute_prime_radical().unwrap(), o.zero());
        assert_eq!(o.brute_ell().unwrap(), o.zero());
        let (two, three) = (o.generated(&[vec![2]]), o.generated(&[vec![3]]));
        assert_eq!(o.brute_product(&two, &three), o.zero());
    }

    #[test]
    fn budget_is_enforced() {
        let small = OracleBudget { max_module_order: 4, ..OracleBudget::default() };
        assert!(matches!(Oracle::new(&zn(8), small), Err(OracleError::BudgetExceeded { .. })));
    }
}

//! The submodule product `N_M K = Σ{f(N) : f ∈ Hom(M, K)}`, its powers and the
//! nil and locally nilpotent tests.

use std::collections::{BTreeSet, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::context::ModuleContext;
use crate::homspace::{is_nilpotent_endo, Homomorphism};
use crate::intlat::SubgroupForm;
use crate::lattice::{cyclic_submodule, Submodule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProductError {
    #[error("{what} exceeded the cap {cap}")]
    CapExceeded { what: &'static str, cap: usize },
}

/// `N_M K`.
pub fn product(ctx: &ModuleContext, n: &Submodule, k: &Submodule) -> Submodule {
    if n.is_zero() || k.is_zero() {
        return ctx.zero();
    }
    if let Some(p) = ctx.cached_product(n, k) {
        return p;
    }
    let homs = ctx.hom_into(k);
    let m = ctx.module();
    let mut form = SubgroupForm::zero(m.inv_factors());
    for x in n.generators() {
        for f in &homs {
            let y = f.apply(&x);
            if !form.contains(&y) {
                form.insert(&y);
            }
        }
    }
    let p = Submodule::from_form(m, form);
    ctx.store_product(n, k, &p);
    p
}

/// Left-nested power `N^l`, with `N^1 = N` and `N^{l+1} = N^l_M N`.
pub fn power(ctx: &ModuleContext, n: &Submodule, l: usize) -> Submodule {
    assert!(l >= 1, "powers start at 1");
    let mut p = n.clone();
    for _ in 1..l {
        if p.is_zero() {
            break;
        }
        p = product(ctx, &p, n);
    }
    p
}

/// Right-nested power, `N_M(N_M(...))`.
pub fn power_right(ctx: &ModuleContext, n: &Submodule, l: usize) -> Submodule {
    assert!(l >= 1, "powers start at 1");
    let mut p = n.clone();
    for _ in 1..l {
        if p.is_zero() {
            break;
        }
        p = product(ctx, n, &p);
    }
    p
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Terminal {
    /// `N^index = 0` and no earlier power vanishes.
    Zero(usize),
    /// `N^{start + period} = N^start` with every power up to there nonzero.
    Cycle { start: usize, period: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct PowerTrace {
    pub base: Submodule,
    /// `N^1, N^2, ...` up to the first zero or the first repetition.
    pub chain: Vec<Submodule>,
    pub terminal: Terminal,
    /// Right-nested powers over the same range of exponents.
    pub right_chain: Vec<Submodule>,
    /// First exponent where the two nestings differ.
    pub divergence: Option<usize>,
}

pub fn power_trace(ctx: &ModuleContext, n: &Submodule) -> PowerTrace {
    let mut chain = vec![n.clone()];
    let mut seen: Vec<SubgroupForm> = vec![n.form().clone()];
    let terminal = loop {
        let last = chain.last().expect("nonempty");
        if last.is_zero() {
            break Terminal::Zero(chain.len());
        }
        let next = product(ctx, last, n);
        if let Some(pos) = seen.iter().position(|f| f == next.form()) {
            break Terminal::Cycle { start: pos + 1, period: chain.len() - pos };
        }
        seen.push(next.form().clone());
        chain.push(next);
    };
    let mut right_chain = vec![n.clone()];
    while right_chain.len() < chain.len() {
        let last = right_chain.last().expect("nonempty");
        right_chain.push(product(ctx, n, last));
    }
    let divergence = chain.iter().zip(&right_chain).position(|(a, b)| a != b).map(|i| i + 1);
    PowerTrace { base: n.clone(), chain, terminal, right_chain, divergence }
}

impl PowerTrace {
    /// `N^l` for any `l >= 1`, read off the trace.
    pub fn power(&self, l: usize) -> Submodule {
        assert!(l >= 1);
        match self.terminal {
            Terminal::Zero(i) if l >= i => self.chain[i - 1].clone(),
            Terminal::Cycle { start, period } if l > self.chain.len() => {
                self.chain[start - 1 + (l - start) % period].clone()
            }
            _ => self.chain[l - 1].clone(),
        }
    }
}

/// Least `l` with `N^l = 0`.
pub fn nilpotency_index(ctx: &ModuleContext, n: &Submodule) -> Option<usize> {
    match power_trace(ctx, n).terminal {
        Terminal::Zero(i) => Some(i),
        Terminal::Cycle { .. } => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum NilMethod {
    /// Every element of each `Hom(M, Rn)` was tested.
    Enumerated,
    /// Some `Hom(M, Rn)` was too large to enumerate. Its generators and their
    /// products up to the composition length were tested. A finite ring is
    /// right Artinian, so a nil right ideal is nilpotent and the test of
    /// the ideal powers is still exact.
    IdealPowers,
}

#[derive(Clone, Debug, Serialize)]
pub struct NilVerdict {
    pub is_nil: bool,
    pub method: NilMethod,
    /// `(n, f)` with `f ∈ Hom(M, Rn)` not nilpotent.
    #[serde(skip)]
    pub witness: Option<(Vec<i64>, Homomorphism)>,
}

/// Cyclic submodules of `N` that are maximal among cyclic submodules of `N`,
/// each with a generating element.
pub fn maximal_cyclics(ctx: &ModuleContext, n: &Submodule) -> Vec<(Vec<i64>, Submodule)> {
    let inside = ctx.cyclics_in(n);
    let maximal: Vec<&Submodule> = inside
        .iter()
        .filter(|c| !c.is_zero() && !inside.iter().any(|d| d.order() > c.order() && c.is_subset_of(d)))
        .collect();
    maximal.into_iter().map(|c| (cyclic_generator(ctx, c), c.clone())).collect()
}

/// Some `x` with `Rx = C`.
pub fn cyclic_generator(ctx: &ModuleContext, c: &Submodule) -> Vec<i64> {
    c.elements()
        .into_iter()
        .find(|x| cyclic_submodule(ctx.module(), x) == *c)
        .expect("cyclic submodules have a generator")
}

/// Every `f ∈ Hom(M, Rn)`, `n ∈ N`, is nilpotent.
pub fn is_nil_submodule(ctx: &ModuleContext, n: &Submodule) -> NilVerdict {
    is_nil_submodule_with_cap(ctx, n, 4096)
}

pub fn is_nil_submodule_with_cap(ctx: &ModuleContext, n: &Submodule, cap: u64) -> NilVerdict {
    let mut method = NilMethod::Enumerated;
    for (x, c) in maximal_cyclics(ctx, n) {
        match ctx.hom_into_elements(&c, cap) {
            Some(elems) => {
                if let Some(f) = elems.into_iter().find(|f| is_nilpotent_endo(f).is_none()) {
                    return NilVerdict { is_nil: false, method, witness: Some((x, f)) };
                }
            }
            None => {
                method = NilMethod::IdealPowers;
                if let Some(w) = ideal_not_nilpotent(ctx, &c) {
                    return NilVerdict { is_nil: false, method, witness: w.map(|f| (x, f)) };
                }
            }
        }
    }
    NilVerdict { is_nil: true, method, witness: None }
}

/// `None` when the right ideal `Hom(M, C)` of End(M) is nilpotent; otherwise
/// `Some` with a non-nilpotent generator or generator product if one exists.
fn ideal_not_nilpotent(ctx: &ModuleContext, c: &Submodule) -> Option<Option<Homomorphism>> {
    let end = ctx.end();
    let orders = end.as_ring().add_orders().to_vec();
    let gens = ctx.hom_into(c);
    let ring = end.as_ring();
    let gen_coords: Vec<Vec<i64>> = gens.iter().map(|g| end.coordinates(g)).collect();
    let mut power = SubgroupForm::from_generators(&orders, gen_coords.iter().map(|g| g.as_slice()));
    let bound = ctx.module().composition_bound().max(1);
    for _ in 0..bound {
        if power.is_zero() {
            return None;
        }
        let mut next = SubgroupForm::zero(&orders);
        for p in power.generators() {
            for g in &gen_coords {
                next.insert(&ring.mul(&p, g));
            }
        }
        power = next;
    }
    if power.is_zero() {
        return None;
    }
    let mut candidates: Vec<Homomorphism> = gens.clone();
    for a in &gens {
        for b in &gens {
            candidates.push(a.compose_after(b));
            candidates.push(a.add(b));
        }
    }
    Some(candidates.into_iter().find(|f| is_nilpotent_endo(f).is_none()))
}

/// Locally nilpotent: some length `l` kills every left-nested product
/// `Rn_1 M Rn_2 M ... M Rn_l` with `n_i ∈ N`.
///
/// When M is quasi-projective this is equivalent to `N` being nilpotent.
/// Otherwise the sets `P_1 = {Rn : n ∈ N}` and `P_{k+1} = {X_M C : X ∈ P_k,
/// C ∈ P_1}` are iterated until `P_l = {0}` or a set repeats. Taking every
/// element of `N` at once covers every finite subset.
pub fn is_locally_nilpotent(ctx: &ModuleContext, n: &Submodule, subset_cap: usize) -> Result<bool, ProductError> {
    if n.is_zero() {
        return Ok(true);
    }
    if let Ok(true) = ctx.is_quasi_projective() {
        return Ok(nilpotency_index(ctx, n).is_some());
    }
    is_locally_nilpotent_definitional(ctx, n, subset_cap)
}

pub fn is_locally_nilpotent_definitional(ctx: &ModuleContext, n: &Submodule, subset_cap: usize) -> Result<bool, ProductError> {
    let base: Vec<Submodule> = ctx.cyclics_in(n).into_iter().filter(|c| !c.is_zero()).collect();
    if base.is_empty() {
        return Ok(true);
    }
    let mut current: BTreeSet<Submodule> = base.iter().cloned().collect();
    let mut seen: HashSet<Vec<SubgroupForm>> = HashSet::new();
    loop {
        current.retain(|x| !x.is_zero());
        if current.is_empty() {
            return Ok(true);
        }
        let key: Vec<SubgroupForm> = current.iter().map(|x| x.form().clone()).collect();
        if !seen.insert(key) {
            return Ok(false);
        }
        let mut next = BTreeSet::new();
        for x in &current {
            for c in &base {
                next.insert(product(ctx, x, c));
                if next.len() > subset_cap {
                    return Err(ProductError::CapExceeded { what: "product set", cap: subset_cap });
                }
            }
        }
        current = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{make_builtin, regular_module, RingFamily};
    use std::sync::Arc;

    fn zn(n: u64) -> ModuleContext {
        let r = Arc::new(make_builtin(&RingFamily::Zn(n)).unwrap());
        ModuleContext::new(Arc::new(regular_module(&r))).unwrap()
    }

    fn sub(ctx: &ModuleContext, x: i64) -> Submodule {
        cyclic_submodule(ctx.module(), &[x])
    }

    #[test]
    fn products_in_z4() {
        let c = zn(4);
        let two = sub(&c, 2);
        assert!(product(&c, &c.zero(), &two).is_zero());
        assert!(product(&c, &two, &c.zero()).is_zero());
        assert!(product(&c, &two, &two).is_zero());
        assert_eq!(product(&c, &two, &c.full()), two);
    }

    #[test]
    fn powers_in_z8_and_z6() {
        let c = zn(8);
        let two = sub(&c, 2);
        assert_eq!(power(&c, &two, 1), two);
        assert_eq!(power(&c, &two, 2), sub(&c, 4));
        assert!(power(&c, &two, 3).is_zero());
        assert_eq!(nilpotency_index(&c, &two), Some(3));
        assert_eq!(nilpotency_index(&c, &c.zero()), Some(1));

        let c = zn(6);
        let two = sub(&c, 2);
        for k in 1..5 {
            assert_eq!(power(&c, &two, k), two);
        }
        let t = power_trace(&c, &two);
        assert_eq!(t.terminal, Terminal::Cycle { start: 1, period: 1 });
        assert_eq!(nilpotency_index(&c, &two), None);
    }

    #[test]
    fn nil_tests() {
        let c = zn(4);
        assert!(is_nil_submodule(&c, &c.zero()).is_nil);
        assert!(is_nil_submodule(&c, &sub(&c, 2)).is_nil);
        let c6 = zn(6);
        let v = is_nil_submodule(&c6, &sub(&c6, 2));
        assert!(!v.is_nil);
        let (_, f) = v.witness.unwrap();
        assert_eq!(is_nilpotent_endo(&f), None);
        let v = is_nil_submodule_with_cap(&c6, &sub(&c6, 2), 1);
        assert!(!v.is_nil);
        assert_eq!(v.method, NilMethod::IdealPowers);
        assert!(is_nil_submodule_with_cap(&c, &sub(&c, 2), 1).is_nil);
    }

    #[test]
    fn local_nilpotency() {
        let c = zn(4);
        assert!(is_locally_nilpotent(&c, &sub(&c, 2), 100).unwrap());
        assert!(is_locally_nilpotent_definitional(&c, &sub(&c, 2), 100).unwrap());
        assert!(is_locally_nilpotent(&c, &c.zero(), 100).unwrap());
        let c6 = zn(6);
        assert!(!is_locally_nilpotent(&c6, &sub(&c6, 2), 100).unwrap());
        assert!(!is_locally_nilpotent_definitional(&c6, &sub(&c6, 2), 100).unwrap());
    }
}

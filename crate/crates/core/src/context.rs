//! Per-module cache of the data every computation needs: the endomorphism
//! ring, the distinct cyclic submodules, the fully invariant submodules, the
//! lattice, and memoized products and Hom-into subgroups.

use std::collections::{HashMap, HashSet};
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

use crate::algebra::FiniteModule;
use crate::homspace::{end_ring_with_cap, hom_into_submodule, EndRing, HomError, Homomorphism};
use crate::intlat::{Matrix, SubgroupForm};
use crate::lattice::{build_lattice, closure, sums_of, LatticeError, Submodule, SubmoduleLattice};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ContextCaps {
    pub max_module_order: u64,
    pub max_end_order: u64,
    pub max_lattice: usize,
}

impl Default for ContextCaps {
    fn default() -> Self {
        ContextCaps { max_module_order: 4096, max_end_order: 1 << 20, max_lattice: 5000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContextError {
    #[error("module has {0} elements, above the cap {1}")]
    ModuleTooLarge(u64, u64),
    #[error(transparent)]
    Hom(#[from] HomError),
}

pub struct ModuleContext {
    module: Arc<FiniteModule>,
    caps: ContextCaps,
    end: EndRing,
    cyclics: OnceLock<Vec<Submodule>>,
    fully_invariant: OnceLock<Vec<Submodule>>,
    lattice: OnceLock<Result<SubmoduleLattice, LatticeError>>,
    quasi_projective: OnceLock<Result<bool, LatticeError>>,
    hom_into: Mutex<HashMap<SubgroupForm, Arc<SubgroupForm>>>,
    products: Mutex<HashMap<(SubgroupForm, SubgroupForm), SubgroupForm>>,
}

impl std::fmt::Debug for ModuleContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ModuleContext").field("module", &self.module).finish_non_exhaustive()
    }
}

impl ModuleContext {
    pub fn new(module: Arc<FiniteModule>) -> Result<Self, ContextError> {
        Self::with_caps(module, ContextCaps::default())
    }

    pub fn with_caps(module: Arc<FiniteModule>, caps: ContextCaps) -> Result<Self, ContextError> {
        if module.order() > caps.max_module_order {
            return Err(ContextError::ModuleTooLarge(module.order(), caps.max_module_order));
        }
        let end = end_ring_with_cap(&module, caps.max_end_order)?;
        Ok(ModuleContext {
            module,
            caps,
            end,
            cyclics: OnceLock::new(),
            fully_invariant: OnceLock::new(),
            lattice: OnceLock::new(),
            quasi_projective: OnceLock::new(),
            hom_into: Mutex::new(HashMap::new()),
            products: Mutex::new(HashMap::new()),
        })
    }

    /// Same module with a different lattice cap; caches start empty.
    pub fn with_lattice_cap(self, cap: usize) -> Self {
        let caps = ContextCaps { max_lattice: cap, ..self.caps };
        ModuleContext { caps, lattice: OnceLock::new(), quasi_projective: OnceLock::new(), ..self }
    }

    pub fn module(&self) -> &Arc<FiniteModule> {
        &self.module
    }

    pub fn caps(&self) -> ContextCaps {
        self.caps
    }

    pub fn end(&self) -> &EndRing {
        &self.end
    }

    pub fn zero(&self) -> Submodule {
        Submodule::zero(&self.module)
    }

    pub fn full(&self) -> Submodule {
        Submodule::full(&self.module)
    }

    /// Distinct cyclic submodules `Rx`, sorted, starting with `0`.
    pub fn cyclics(&self) -> &[Submodule] {
        self.cyclics.get_or_init(|| {
            let mut seen = HashSet::new();
            let mut out = Vec::new();
            for x in self.module.elements() {
                let c = Submodule::from_generators(&self.module, &[x]);
                if seen.insert(c.form().clone()) {
                    out.push(c);
                }
            }
            out.sort();
            out
        })
    }

    /// Cyclic submodules contained in `n`.
    pub fn cyclics_in(&self, n: &Submodule) -> Vec<Submodule> {
        self.cyclics().iter().filter(|c| c.is_subset_of(n)).cloned().collect()
    }

    /// Smallest fully invariant submodule containing `gens`.
    pub fn fully_invariant_closure(&self, gens: &[Vec<i64>]) -> Submodule {
        let mut ops: Vec<&Matrix> = self.module.actions().iter().collect();
        ops.extend(self.end.gens_as_homs().iter().map(|h| h.matrix()));
        let form = closure(self.module.inv_factors(), gens, &ops);
        Submodule::from_form(&self.module, form)
    }

    pub fn fully_invariant(&self) -> &[Submodule] {
        self.fully_invariant.get_or_init(|| {
            let mut seen = HashSet::new();
            let mut pieces = Vec::new();
            for c in self.cyclics() {
                let gens = c.generators();
                let fi = self.fully_invariant_closure(&gens);
                if seen.insert(fi.form().clone()) {
                    pieces.push(fi);
                }
            }
            sums_of(&self.module, &pieces, usize::MAX).expect("no cap")
        })
    }

    pub fn lattice(&self) -> Result<&SubmoduleLattice, LatticeError> {
        self.lattice.get_or_init(|| build_lattice(self, self.caps.max_lattice)).as_ref().map_err(|e| e.clone())
    }

    pub fn is_quasi_projective(&self) -> Result<bool, LatticeError> {
        self.quasi_projective
            .get_or_init(|| crate::lattice::quasi_projective_witness(self).map(|w| w.is_none()))
            .clone()
    }

    /// `Hom(M, K)` as a subgroup of End(M) in End coordinates.
    pub fn hom_into_form(&self, k: &Submodule) -> Arc<SubgroupForm> {
        if let Some(f) = self.hom_into.lock().expect("poisoned").get(k.form()) {
            return f.clone();
        }
        let f = Arc::new(hom_into_submodule(&self.end, k));
        self.hom_into.lock().expect("poisoned").insert(k.form().clone(), f.clone());
        f
    }

    /// Generators of `Hom(M, K)` as endomorphisms of `M`.
    pub fn hom_into(&self, k: &Submodule) -> Vec<Homomorphism> {
        self.hom_into_form(k).generators().iter().map(|a| self.end.element(a)).collect()
    }

    /// Every element of `Hom(M, K)`, failing above `cap`.
    pub fn hom_into_elements(&self, k: &Submodule, cap: u64) -> Option<Vec<Homomorphism>> {
        let form = self.hom_into_form(k);
        if form.order() > cap {
            return None;
        }
        Some(form.elements().iter().map(|a| self.end.element(a)).collect())
    }

    pub(crate) fn cached_product(&self, n: &Submodule, k: &Submodule) -> Option<Submodule> {
        let key = (n.form().clone(), k.form().clone());
        self.products.lock().expect("poisoned").get(&key).map(|f| Submodule::from_form(&self.module, f.clone()))
    }

    pub(crate) fn store_product(&self, n: &Submodule, k: &Submodule, p: &Submodule) {
        let key = (n.form().clone(), k.form().clone());
        self.products.lock().expect("poisoned").insert(key, p.form().clone());
    }
}

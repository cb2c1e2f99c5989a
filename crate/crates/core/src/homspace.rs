//! Homomorphism groups between finite modules and endomorphism rings.
//!
//! A homomorphism `M -> N` is a `t x s` matrix `T` (column `j` is the image of
//! the generator `e_j` of `M`) with row `k` reduced modulo the target order
//! `e_k`. It must send a generator of order `d_j` to an element whose order
//! divides `d_j` and commute with every action matrix: `T A_i = B_i T`.
//!
//! The order condition is built into the variables: `T[k][j] = c_kj * y_kj`
//! with `g_kj = gcd(e_k, d_j)`, `c_kj = e_k / g_kj` and `y_kj` in `Z/g_kj`.
//! The commutation conditions are then a homogeneous congruence system in the
//! `y` variables.

use std::sync::Arc;

use thiserror::Error;

use crate::algebra::{AlgebraError, FiniteModule, FiniteRing, ModuleElement};
use crate::intlat::{gcd, reduce, solve_congruences, InvariantBasis, IntlatError, Matrix, SubgroupForm};
use crate::lattice::Submodule;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomError {
    #[error("modules are over different rings")]
    DifferentRings,
    #[error("shape or parent mismatch: {0}")]
    Mismatch(String),
    #[error("matrix is not a module homomorphism: {0}")]
    NotHomomorphism(String),
    #[error("homomorphism does not preserve the submodule")]
    NotPreserved,
    #[error("group has more than {cap} elements")]
    CapExceeded { cap: u64 },
    #[error(transparent)]
    Lattice(#[from] IntlatError),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Homomorphism {
    source: Arc<FiniteModule>,
    target: Arc<FiniteModule>,
    matrix: Matrix,
}

impl Homomorphism {
    /// Builds a homomorphism after checking the order and commutation conditions.
    pub fn from_matrix(source: Arc<FiniteModule>, target: Arc<FiniteModule>, matrix: Matrix) -> Result<Self, HomError> {
        if source.ring() != target.ring() {
            return Err(HomError::DifferentRings);
        }
        if matrix.rows() != target.dim() || matrix.cols() != source.dim() {
            return Err(HomError::Mismatch(format!(
                "{}x{} matrix for a map from rank {} to rank {}",
                matrix.rows(),
                matrix.cols(),
                source.dim(),
                target.dim()
            )));
        }
        let mut matrix = matrix;
        matrix.reduce_rows(target.inv_factors());
        let (d, e) = (source.inv_factors(), target.inv_factors());
        for k in 0..e.len() {
            for j in 0..d.len() {
                if (d[j] as i128 * matrix.get(k, j) as i128) % e[k] as i128 != 0 {
                    return Err(HomError::NotHomomorphism(format!("generator {j} is sent to an element of larger order")));
                }
            }
        }
        for (i, (a, b)) in source.actions().iter().zip(target.actions()).enumerate() {
            if matrix.mul_mod_rows(a, e) != b.mul_mod_rows(&matrix, e) {
                return Err(HomError::NotHomomorphism(format!("does not commute with ring basis element {i}")));
            }
        }
        Ok(Homomorphism { source, target, matrix })
    }

    pub(crate) fn from_matrix_unchecked(source: Arc<FiniteModule>, target: Arc<FiniteModule>, matrix: Matrix) -> Self {
        debug_assert_eq!(matrix.rows(), target.dim());
        debug_assert_eq!(matrix.cols(), source.dim());
        Homomorphism { source, target, matrix }
    }

    pub fn identity(m: &Arc<FiniteModule>) -> Self {
        Homomorphism { source: m.clone(), target: m.clone(), matrix: Matrix::identity(m.dim()) }
    }

    pub fn zero(source: &Arc<FiniteModule>, target: &Arc<FiniteModule>) -> Self {
        Homomorphism { source: source.clone(), target: target.clone(), matrix: Matrix::zeros(target.dim(), source.dim()) }
    }

    /// Multiplication by a central ring element given as an integer.
    pub fn scalar(m: &Arc<FiniteModule>, c: i64) -> Self {
        let mut matrix = Matrix::identity(m.dim());
        for k in 0..m.dim() {
            matrix.set(k, k, c.rem_euclid(m.inv_factors()[k] as i64));
        }
        Homomorphism { source: m.clone(), target: m.clone(), matrix }
    }

    pub fn source(&self) -> &Arc<FiniteModule> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteModule> {
        &self.target
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    pub fn apply(&self, x: &[i64]) -> Vec<i64> {
        self.matrix.apply_mod(x, self.target.inv_factors())
    }

    pub fn apply_element(&self, x: &ModuleElement) -> Result<ModuleElement, HomError> {
        if *x.module != *self.source {
            return Err(HomError::Mismatch("element is not in the source".into()));
        }
        Ok(ModuleElement { module: self.target.clone(), coeffs: self.apply(&x.coeffs) })
    }

    /// `self ∘ g`.
    pub fn compose_after(&self, g: &Homomorphism) -> Homomorphism {
        debug_assert_eq!(*g.target, *self.source);
        Homomorphism {
            source: g.source.clone(),
            target: self.target.clone(),
            matrix: self.matrix.mul_mod_rows(&g.matrix, self.target.inv_factors()),
        }
    }

    pub fn add(&self, other: &Homomorphism) -> Homomorphism {
        let e = self.target.inv_factors();
        let mut m = self.matrix.clone();
        for k in 0..m.rows() {
            for j in 0..m.cols() {
                m.set(k, j, (m.get(k, j) + other.matrix.get(k, j)).rem_euclid(e[k] as i64));
            }
        }
        Homomorphism { source: self.source.clone(), target: self.target.clone(), matrix: m }
    }

    pub fn image(&self) -> Submodule {
        let cols: Vec<Vec<i64>> = (0..self.matrix.cols()).map(|j| self.matrix.column(j)).collect();
        Submodule::from_generators(&self.target, &cols)
    }

    pub fn kernel(&self) -> Submodule {
        let form = solve_congruences(&self.matrix, self.target.inv_factors(), self.source.inv_factors())
            .expect("homomorphism matrices define well-posed systems");
        Submodule::from_form(&self.source, form)
    }

    /// Image of a submodule of the source.
    pub fn image_of(&self, sub: &Submodule) -> Submodule {
        let gens: Vec<Vec<i64>> = sub.generators().iter().map(|g| self.apply(g)).collect();
        Submodule::from_generators(&self.target, &gens)
    }

    /// Preimage of a submodule of the target.
    pub fn preimage(&self, sub: &Submodule) -> Submodule {
        let q = sub.form().quotient_map();
        let t = q.invariants().len();
        let s = self.source.dim();
        let mut sys = Matrix::zeros(t, s);
        for j in 0..s {
            let col = q.project(&self.matrix.column(j));
            for k in 0..t {
                sys.set(k, j, col[k]);
            }
        }
        let form = solve_congruences(&sys, q.invariants(), self.source.inv_factors()).expect("well-posed");
        Submodule::from_form(&self.source, form)
    }
}

/// `f ∘ g`, checking that the maps are composable.
pub fn compose(f: &Homomorphism, g: &Homomorphism) -> Result<Homomorphism, HomError> {
    if *g.target != *f.source {
        return Err(HomError::Mismatch("target of the inner map is not the source of the outer map".into()));
    }
    Ok(f.compose_after(g))
}

pub fn apply(f: &Homomorphism, x: &ModuleElement) -> Result<ModuleElement, HomError> {
    f.apply_element(x)
}

pub fn image(f: &Homomorphism) -> Submodule {
    f.image()
}

pub fn kernel(f: &Homomorphism) -> Submodule {
    f.kernel()
}

/// `Hom_R(M, N)` with an invariant-factor generating set.
#[derive(Clone, Debug)]
pub struct HomGroup {
    source: Arc<FiniteModule>,
    target: Arc<FiniteModule>,
    /// `(k, j, c_kj)` for each variable, in row-major order of `(k, j)`.
    vars: Vec<(usize, usize, i64)>,
    var_moduli: Vec<u64>,
    form: SubgroupForm,
    basis: InvariantBasis,
    generators: Vec<Homomorphism>,
}

pub fn hom_group(m: &Arc<FiniteModule>, n: &Arc<FiniteModule>) -> Result<HomGroup, HomError> {
    if m.ring() != n.ring() {
        return Err(HomError::DifferentRings);
    }
    let (d, e) = (m.inv_factors(), n.inv_factors());
    let (s, t) = (d.len(), e.len());
    let mut vars = Vec::new();
    let mut var_moduli = Vec::new();
    let mut var_index = vec![None; t * s];
    for k in 0..t {
        for j in 0..s {
            let g = gcd(e[k] as i64, d[j] as i64);
            if g > 1 {
                var_index[k * s + j] = Some(vars.len());
                vars.push((k, j, e[k] as i64 / g));
                var_moduli.push(g as u64);
            }
        }
    }
    let nv = vars.len();
    let r = m.ring().rank();
    let mut rows = Vec::new();
    let mut row_moduli = Vec::new();
    for i in 0..r {
        let (a, b) = (&m.actions()[i], &n.actions()[i]);
        for k in 0..t {
            for j in 0..s {
                let mut row = vec![0i128; nv];
                // (T A)[k][j] = sum_l T[k][l] A[l][j]
                for l in 0..s {
                    if let Some(v) = var_index[k * s + l] {
                        row[v] += vars[v].2 as i128 * a.get(l, j) as i128;
                    }
                }
                // (B T)[k][j] = sum_l B[k][l] T[l][j]
                for l in 0..t {
                    if let Some(v) = var_index[l * s + j] {
                        row[v] -= b.get(k, l) as i128 * vars[v].2 as i128;
                    }
                }
                let row: Vec<i64> = row.iter().map(|&x| reduce(x, e[k] as i64)).collect();
                if row.iter().any(|&x| x != 0) {
                    rows.push(row);
                    row_moduli.push(e[k]);
                }
            }
        }
    }
    let sys = Matrix::from_rows(rows.len(), nv, rows);
    let form = solve_congruences(&sys, &row_moduli, &var_moduli)?;
    Ok(HomGroup::from_form(m.clone(), n.clone(), vars, var_moduli, form))
}

impl HomGroup {
    fn from_form(
        source: Arc<FiniteModule>,
        target: Arc<FiniteModule>,
        vars: Vec<(usize, usize, i64)>,
        var_moduli: Vec<u64>,
        form: SubgroupForm,
    ) -> Self {
        let basis = form.invariant_basis();
        let mut hg = HomGroup { source, target, vars, var_moduli, form, basis, generators: vec![] };
        hg.generators = hg.basis.generators().iter().map(|y| hg.from_vars(y)).collect();
        hg
    }

    fn from_vars(&self, y: &[i64]) -> Homomorphism {
        let (s, t) = (self.source.dim(), self.target.dim());
        let mut m = Matrix::zeros(t, s);
        for (v, &(k, j, c)) in self.vars.iter().enumerate() {
            m.set(k, j, reduce(c as i128 * y[v] as i128, self.target.inv_factors()[k] as i64));
        }
        Homomorphism { source: self.source.clone(), target: self.target.clone(), matrix: m }
    }

    fn to_vars(&self, f: &Homomorphism) -> Vec<i64> {
        self.vars
            .iter()
            .zip(&self.var_moduli)
            .map(|(&(k, j, c), &g)| (f.matrix.get(k, j) / c).rem_euclid(g as i64))
            .collect()
    }

    pub fn source(&self) -> &Arc<FiniteModule> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteModule> {
        &self.target
    }

    pub fn generators(&self) -> &[Homomorphism] {
        &self.generators
    }

    /// Abelian invariant factors, ascending along a divisibility chain.
    pub fn group_invariants(&self) -> &[u64] {
        self.basis.invariants()
    }

    /// Group order, or `None` when it does not fit in a `u64`.
    pub fn order(&self) -> Option<u64> {
        self.group_invariants().iter().try_fold(1u64, |acc, &o| acc.checked_mul(o))
    }

    pub fn is_zero(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn contains(&self, f: &Homomorphism) -> bool {
        // the order condition is not encoded in the variables, check it separately
        let rebuilt = self.from_vars(&self.to_vars(f));
        rebuilt.matrix == f.matrix && self.form.contains(&self.to_vars(f))
    }

    /// Coefficients of `f` in [`Self::generators`].
    pub fn coordinates(&self, f: &Homomorphism) -> Vec<i64> {
        self.basis.coordinates(&self.to_vars(f))
    }

    pub fn element(&self, coeffs: &[i64]) -> Homomorphism {
        self.from_vars(&self.basis.combine(coeffs))
    }

    /// Every element, failing when there are more than `cap`.
    pub fn elements(&self, cap: u64) -> Result<Vec<Homomorphism>, HomError> {
        match self.order() {
            Some(o) if o <= cap => Ok(self.form.elements().iter().map(|y| self.from_vars(y)).collect()),
            _ => Err(HomError::CapExceeded { cap }),
        }
    }

    /// Order of the subgroup generated by `maps`, which must lie in this group.
    pub fn span_order(&self, maps: &[Homomorphism]) -> u64 {
        let ys: Vec<Vec<i64>> = maps.iter().map(|f| self.to_vars(f)).collect();
        SubgroupForm::from_generators(&self.var_moduli, ys.iter().map(|y| y.as_slice())).order()
    }
}

/// `End_R(M)` as a finite ring.
#[derive(Clone, Debug)]
pub struct EndRing {
    module: Arc<FiniteModule>,
    hom: HomGroup,
    as_ring: Arc<FiniteRing>,
}

impl EndRing {
    pub fn module(&self) -> &Arc<FiniteModule> {
        &self.module
    }

    /// Composition `(fg)(x) = f(g(x))` as multiplication.
    pub fn as_ring(&self) -> &Arc<FiniteRing> {
        &self.as_ring
    }

    /// Homomorphisms aligned with the basis of [`Self::as_ring`].
    pub fn gens_as_homs(&self) -> &[Homomorphism] {
        self.hom.generators()
    }

    pub fn hom_group(&self) -> &HomGroup {
        &self.hom
    }

    pub fn order(&self) -> u64 {
        self.as_ring.order()
    }

    pub fn coordinates(&self, f: &Homomorphism) -> Vec<i64> {
        self.hom.coordinates(f)
    }

    pub fn element(&self, coeffs: &[i64]) -> Homomorphism {
        self.hom.element(coeffs)
    }
}

pub fn end_ring(m: &Arc<FiniteModule>) -> Result<EndRing, HomError> {
    end_ring_with_cap(m, u64::MAX)
}

pub fn end_ring_with_cap(m: &Arc<FiniteModule>, cap: u64) -> Result<EndRing, HomError> {
    let hom = hom_group(m, m)?;
    match hom.order() {
        Some(o) if o <= cap => {}
        _ => return Err(HomError::CapExceeded { cap }),
    }
    let gens = hom.generators();
    let r = gens.len();
    let mut consts = Vec::with_capacity(r);
    for gi in gens {
        consts.push(gens.iter().map(|gj| hom.coordinates(&gi.compose_after(gj))).collect::<Vec<_>>());
    }
    let unit = if m.dim() == 0 { vec![] } else { hom.coordinates(&Homomorphism::identity(m)) };
    let spec = crate::algebra::RingSpec {
        add_orders: hom.group_invariants().to_vec(),
        struct_consts: consts,
        unit,
        labels: Some((0..r).map(|i| format!("f{i}")).collect()),
    };
    let ring = crate::algebra::validate_ring(&spec).map_err(|e: AlgebraError| HomError::Mismatch(e.to_string()))?;
    Ok(EndRing { module: m.clone(), hom, as_ring: Arc::new(ring) })
}

/// Least `k <= c` with `f^k = 0`, where `c` is the composition length bound of
/// the source; `None` when `f^c != 0`.
pub fn is_nilpotent_endo(f: &Homomorphism) -> Option<usize> {
    debug_assert_eq!(*f.source, *f.target);
    if f.is_zero() {
        return Some(1);
    }
    let c = f.source.composition_bound();
    let mut p = f.clone();
    for k in 2..=c {
        p = f.compose_after(&p);
        if p.is_zero() {
            return Some(k);
        }
    }
    None
}

/// The map `M/K -> M/K` induced by an endomorphism `f` with `f(K) ⊆ K`.
pub fn induced_hom_on_quotient(f: &Homomorphism, k: &Submodule) -> Result<Homomorphism, HomError> {
    if *f.source != *f.target || **k.module() != *f.source {
        return Err(HomError::Mismatch("expected an endomorphism of the module containing K".into()));
    }
    if !f.image_of(k).is_subset_of(k) {
        return Err(HomError::NotPreserved);
    }
    let (quotient, proj) = crate::algebra::quotient_module(&f.source, k);
    let q = k.form().quotient_map();
    let cols: Vec<Vec<i64>> = q.lifts().iter().map(|l| proj.apply(&f.apply(l))).collect();
    Ok(Homomorphism::from_matrix_unchecked(quotient.clone(), quotient.clone(), Matrix::from_columns(quotient.dim(), &cols)))
}

/// The endomorphisms of `M` with image inside `K`, as a subgroup of End(M)
/// written in End coordinates.
pub(crate) fn hom_into_submodule(end: &EndRing, k: &Submodule) -> SubgroupForm {
    if k.is_full() {
        return SubgroupForm::full(end.hom.group_invariants());
    }
    let m = end.module();
    let basis: Vec<Vec<i64>> = (0..m.dim()).map(|j| m.basis(j)).collect();
    maps_into(end, &basis, k)
}

/// `{f ∈ End(M) : f(X) ⊆ A}` in End coordinates.
pub fn endos_mapping_into(end: &EndRing, x: &Submodule, a: &Submodule) -> SubgroupForm {
    maps_into(end, &x.generators(), a)
}

fn maps_into(end: &EndRing, xs: &[Vec<i64>], a: &Submodule) -> SubgroupForm {
    let orders = end.hom.group_invariants();
    let q = a.form().quotient_map();
    let qi = q.invariants();
    let gens = end.gens_as_homs();
    let mut sys = Matrix::zeros(qi.len() * xs.len(), gens.len());
    let mut row_moduli = Vec::with_capacity(qi.len() * xs.len());
    for _ in xs {
        row_moduli.extend_from_slice(qi);
    }
    for (g, h) in gens.iter().enumerate() {
        for (j, x) in xs.iter().enumerate() {
            let img = q.project(&h.apply(x));
            for kk in 0..qi.len() {
                sys.set(j * qi.len() + kk, g, img[kk]);
            }
        }
    }
    solve_congruences(&sys, &row_moduli, orders).expect("well-posed")
}

/// Some `f ∈ End(M)` with `p ∘ f = h`, where `p, h : M -> Q`.
pub fn lift_through(end: &EndRing, p: &Homomorphism, h: &Homomorphism) -> Option<Homomorphism> {
    let m = end.module();
    let q = p.target();
    assert!(**p.source() == **m && **h.source() == **m && **h.target() == **q, "maps must share source M and target Q");
    let e = q.exponent().max(1);
    let gens = end.gens_as_homs();
    let (s, t) = (m.dim(), q.dim());
    let mut sys = Matrix::zeros(s * t, gens.len() + 1);
    let mut row_moduli = Vec::with_capacity(s * t);
    for j in 0..s {
        row_moduli.extend_from_slice(q.inv_factors());
        for k in 0..t {
            let row = j * t + k;
            sys.set(row, 0, reduce(-(h.matrix.get(k, j) as i128), q.inv_factors()[k] as i64));
        }
    }
    for (g, gh) in gens.iter().enumerate() {
        let pg = p.compose_after(gh);
        for j in 0..s {
            for k in 0..t {
                sys.set(j * t + k, g + 1, pg.matrix.get(k, j));
            }
        }
    }
    let mut col_moduli = vec![e];
    col_moduli.extend_from_slice(end.hom.group_invariants());
    let sol = solve_congruences(&sys, &row_moduli, &col_moduli).expect("well-posed");
    if sol.pivot(0) != 1 {
        return None;
    }
    let f = end.element(&sol.hnf_row(0)[1..]);
    debug_assert_eq!(p.compose_after(&f).matrix, h.matrix);
    Some(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{abelian_group_module, make_builtin, regular_module, validate_module, ModuleSpec, RingFamily};

    fn zn(n: u64) -> (Arc<FiniteRing>, Arc<FiniteModule>) {
        let r = Arc::new(make_builtin(&RingFamily::Zn(n)).unwrap());
        let m = Arc::new(regular_module(&r));
        (r, m)
    }

    fn cyclic_over(r: &Arc<FiniteRing>, d: u64) -> Arc<FiniteModule> {
        Arc::new(validate_module(r, &ModuleSpec { inv_factors: vec![d], actions: vec![vec![vec![1]]], labels: None }).unwrap())
    }

    #[test]
    fn end_of_z4() {
        let (_, m) = zn(4);
        let h = hom_group(&m, &m).unwrap();
        assert_eq!(h.group_invariants(), &[4]);
        let e = end_ring(&m).unwrap();
        assert_eq!(e.as_ring().order(), 4);
        assert!(e.as_ring().is_commutative());
    }

    #[test]
    fn hom_into_two_z4() {
        // 2Z/4 as a module of order 2
        let (r, m) = zn(4);
        let two = cyclic_over(&r, 2);
        let h = hom_group(&m, &two).unwrap();
        assert_eq!(h.group_invariants(), &[2]);
        assert_eq!(h.generators()[0].matrix().get(0, 0), 1);
    }

    #[test]
    fn hom_between_coprime_parts_is_zero() {
        let (r, _) = zn(6);
        let a = cyclic_over(&r, 3);
        let b = cyclic_over(&r, 2);
        assert!(hom_group(&a, &b).unwrap().is_zero());
    }

    #[test]
    fn end_of_f2_squared_is_matrix_ring() {
        let m = abelian_group_module(&[2, 2]).unwrap();
        let e = end_ring(&m).unwrap();
        assert_eq!(e.order(), 16);
        assert!(!e.as_ring().is_commutative());
    }

    #[test]
    fn end_of_zero_module() {
        let (r, _) = zn(4);
        let z = Arc::new(crate::algebra::zero_module(&r));
        let e = end_ring(&z).unwrap();
        assert_eq!(e.as_ring().rank(), 0);
        assert_eq!(e.order(), 1);
    }

    #[test]
    fn kernels_images_and_composition() {
        let (_, m) = zn(4);
        let id = Homomorphism::identity(&m);
        assert!(id.kernel().is_zero());
        assert!(id.image().is_full());
        let two = Homomorphism::scalar(&m, 2);
        assert_eq!(two.kernel().order(), 2);
        assert_eq!(two.kernel(), two.image());
        assert!(compose(&two, &two).unwrap().is_zero());
    }

    #[test]
    fn nilpotency_of_endomorphisms() {
        let (_, m4) = zn(4);
        assert_eq!(is_nilpotent_endo(&Homomorphism::zero(&m4, &m4)), Some(1));
        assert_eq!(is_nilpotent_endo(&Homomorphism::scalar(&m4, 2)), Some(2));
        let (_, m6) = zn(6);
        assert_eq!(is_nilpotent_endo(&Homomorphism::scalar(&m6, 4)), None);
    }

    #[test]
    fn induced_maps() {
        let (_, m8) = zn(8);
        let k = Submodule::from_generators(&m8, &[vec![4]]);
        let f = Homomorphism::scalar(&m8, 2);
        let g = induced_hom_on_quotient(&f, &k).unwrap();
        assert_eq!(g.source().inv_factors(), &[4]);
        assert_eq!(g.matrix().get(0, 0), 2);
        let id = induced_hom_on_quotient(&Homomorphism::identity(&m8), &k).unwrap();
        assert_eq!(id.matrix(), &Matrix::identity(1));

        let m = abelian_group_module(&[2, 2]).unwrap();
        let line = Submodule::from_generators(&m, &[vec![1, 0]]);
        let swap = Homomorphism::from_matrix(m.clone(), m.clone(), Matrix::from_rows(2, 2, vec![vec![0, 1], vec![1, 0]])).unwrap();
        assert_eq!(induced_hom_on_quotient(&swap, &line), Err(HomError::NotPreserved));
    }

    #[test]
    fn rejects_non_homomorphisms() {
        let (r, m) = zn(4);
        let two = cyclic_over(&r, 2);
        // Z/2 -> Z/4 sending 1 to 1 breaks the order condition
        assert!(Homomorphism::from_matrix(two, m.clone(), Matrix::from_rows(1, 1, vec![vec![1]])).is_err());
    }

    #[test]
    fn maps_into_and_lifts() {
        let (_, m8) = zn(8);
        let e = end_ring(&m8).unwrap();
        let two = Submodule::from_generators(&m8, &[vec![2]]);
        let four = Submodule::from_generators(&m8, &[vec![4]]);
        // f(2M) ⊆ 4M iff f(1) ∈ 2M
        assert_eq!(endos_mapping_into(&e, &two, &four).order(), 4);
        assert_eq!(endos_mapping_into(&e, &Submodule::full(&m8), &four).order(), 2);
        assert_eq!(endos_mapping_into(&e, &Submodule::zero(&m8), &Submodule::zero(&m8)).order(), 8);

        let (_, p) = crate::algebra::quotient_module(&m8, &four);
        let h = p.compose_after(&Homomorphism::scalar(&m8, 3));
        let f = lift_through(&e, &p, &h).unwrap();
        assert_eq!(p.compose_after(&f), h);

        // Z/2 ⊕ Z/4 over Z/4 is not quasi-projective: the map onto the
        // quotient by <(0,2)> sending (1,0) to (1,0) and (0,1) to 0 has no lift.
        let m = abelian_group_module(&[2, 4]).unwrap();
        let e = end_ring(&m).unwrap();
        let k = Submodule::from_generators(&m, &[vec![0, 2]]);
        let (q, p) = crate::algebra::quotient_module(&m, &k);
        let hg = hom_group(&m, &q).unwrap();
        let lifts = hg.elements(1 << 10).unwrap().iter().filter(|h| lift_through(&e, &p, h).is_some()).count();
        assert!(lifts < hg.order().unwrap() as usize);
    }
}

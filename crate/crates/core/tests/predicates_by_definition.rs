//! Module predicates recomputed from their definitions. Every Hom set here
//! comes from exhaustive enumeration of additive maps.

use std::sync::Arc;

use goldie::algebra::{
    abelian_group_module, direct_sum, free_module, make_builtin, quotient_module, regular_module, submodule_module,
    validate_module, FiniteModule, ModuleSpec, RingFamily,
};
use goldie::context::ModuleContext;
use goldie::intlat::Matrix;
use goldie::lattice::{is_retractable, uniform_dimension, Submodule};
use goldie::oracle::{brute_hom_group, OracleBudget};

fn regular(family: RingFamily) -> Arc<FiniteModule> {
    Arc::new(regular_module(&Arc::new(make_builtin(&family).unwrap())))
}

fn shelf() -> Vec<(&'static str, Arc<FiniteModule>)> {
    let t2 = regular(RingFamily::TriangularRing(2, 2));
    let j = Submodule::from_generators(&t2, &[vec![0, 1, 0]]);
    let e11 = Submodule::from_generators(&t2, &[vec![1, 0, 0]]);
    let z4 = Arc::new(make_builtin(&RingFamily::Zn(4)).unwrap());
    let f2 = Arc::new(make_builtin(&RingFamily::Zn(2)).unwrap());
    vec![
        ("Z4", regular(RingFamily::Zn(4))),
        ("Z8", regular(RingFamily::Zn(8))),
        ("Z6", regular(RingFamily::Zn(6))),
        ("Z2+Z4", abelian_group_module(&[2, 4]).unwrap()),
        ("Z2+Z8", abelian_group_module(&[2, 8]).unwrap()),
        ("Z2 over Z4", Arc::new(
            validate_module(&z4, &ModuleSpec { inv_factors: vec![2], actions: vec![vec![vec![1]]], labels: None }).unwrap(),
        )),
        ("F2^2", free_module(&f2, 2)),
        ("Z4^2", free_module(&z4, 2)),
        ("T2", t2.clone()),
        ("T2/J", quotient_module(&t2, &j).0),
        ("T2/e11", quotient_module(&t2, &e11).0),
        ("J in T2", submodule_module(&t2, &j).0),
        ("T2+T2/J", direct_sum(&t2, &quotient_module(&t2, &j).0).unwrap().module),
        ("M2", regular(RingFamily::MatrixRing(2, 2))),
    ]
}

fn budget() -> OracleBudget {
    OracleBudget::default()
}

fn apply(f: &Matrix, x: &[i64], target: &FiniteModule) -> Vec<i64> {
    f.apply_mod(x, target.inv_factors())
}

/// Every map `M -> M/K` factors through the projection.
fn quasi_projective_by_definition(m: &Arc<FiniteModule>, lattice: &[Submodule]) -> bool {
    let ends = brute_hom_group(m, m, &budget()).unwrap();
    lattice.iter().filter(|k| !k.is_zero() && !k.is_full()).all(|k| {
        let (q, proj) = quotient_module(m, k);
        let lifted: Vec<Vec<Vec<i64>>> = ends
            .iter()
            .map(|g| (0..m.dim()).map(|j| proj.apply(&apply(g, &m.basis(j), m))).collect())
            .collect();
        brute_hom_group(m, &q, &budget()).unwrap().iter().all(|h| {
            let cols: Vec<Vec<i64>> = (0..m.dim()).map(|j| apply(h, &m.basis(j), &q)).collect();
            lifted.contains(&cols)
        })
    })
}

fn retractable_by_definition(m: &Arc<FiniteModule>, lattice: &[Submodule]) -> bool {
    lattice.iter().filter(|k| !k.is_zero()).all(|k| {
        let (km, _) = submodule_module(m, k);
        brute_hom_group(m, &km, &budget()).unwrap().iter().any(|f| !f.is_zero())
    })
}

/// Largest family of nonzero submodules whose sum is direct.
fn udim_by_definition(lattice: &[Submodule]) -> usize {
    fn grow(nonzero: &[&Submodule], from: usize, acc: &Submodule, size: usize) -> usize {
        let mut best = size;
        for i in from..nonzero.len() {
            let s = nonzero[i];
            if acc.intersection(s).is_zero() {
                best = best.max(grow(nonzero, i + 1, &acc.sum(s), size + 1));
            }
        }
        best
    }
    let nonzero: Vec<&Submodule> = lattice.iter().filter(|s| !s.is_zero()).collect();
    let Some(first) = lattice.iter().find(|s| s.is_zero()) else { return 0 };
    grow(&nonzero, 0, first, 0)
}

#[test]
fn quasi_projectivity_matches_the_definition() {
    for (name, m) in shelf() {
        let ctx = ModuleContext::new(m.clone()).unwrap();
        let lattice = ctx.lattice().unwrap().members().to_vec();
        assert_eq!(ctx.is_quasi_projective().unwrap(), quasi_projective_by_definition(&m, &lattice), "{name}");
    }
}

#[test]
fn known_quasi_projectivity_values() {
    let expected = [("Z4", true), ("Z8", true), ("Z6", true), ("Z2+Z4", false), ("Z2+Z8", false), ("T2", true), ("M2", true)];
    let shelf = shelf();
    for (name, qp) in expected {
        let m = &shelf.iter().find(|(n, _)| *n == name).unwrap().1;
        assert_eq!(ModuleContext::new(m.clone()).unwrap().is_quasi_projective().unwrap(), qp, "{name}");
    }
}

#[test]
fn retractability_matches_the_definition() {
    let mut seen_false = false;
    for (name, m) in shelf() {
        let ctx = ModuleContext::new(m.clone()).unwrap();
        let lattice = ctx.lattice().unwrap().members().to_vec();
        let want = retractable_by_definition(&m, &lattice);
        seen_false |= !want;
        assert_eq!(is_retractable(&ctx), want, "{name}");
    }
    assert!(seen_false, "the shelf should contain a non-retractable module");
}

#[test]
fn uniform_dimension_matches_the_definition() {
    for (name, m) in shelf() {
        let ctx = ModuleContext::new(m.clone()).unwrap();
        let lattice = ctx.lattice().unwrap().members().to_vec();
        if lattice.len() > 64 {
            continue;
        }
        assert_eq!(uniform_dimension(&ctx), udim_by_definition(&lattice), "{name}");
    }
}

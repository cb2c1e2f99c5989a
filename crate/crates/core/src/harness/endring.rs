//! One-sided annihilators and two-sided ideals of a finite ring, with
//! elements and subsets written as coordinate vectors over the ring basis.

use crate::algebra::FiniteRing;
use crate::intlat::{solve_congruences, Matrix, SubgroupForm};
use crate::lattice::closure;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `{s : s y = 0 for all y}`.
    Left,
    /// `{s : y s = 0 for all y}`.
    Right,
}

/// Annihilator of the elements `ys` on the given side.
pub fn ring_annihilator(ring: &FiniteRing, ys: &[Vec<i64>], side: Side) -> SubgroupForm {
    let orders = ring.add_orders();
    let r = ring.rank();
    let mut sys = Matrix::zeros(ys.len() * r, r);
    let mut row_moduli = Vec::with_capacity(ys.len() * r);
    for (t, y) in ys.iter().enumerate() {
        row_moduli.extend_from_slice(orders);
        for i in 0..r {
            let b = ring.basis(i);
            let p = match side {
                Side::Left => ring.mul(&b, y),
                Side::Right => ring.mul(y, &b),
            };
            for (k, &v) in p.iter().enumerate() {
                sys.set(t * r + k, i, v);
            }
        }
    }
    solve_congruences(&sys, &row_moduli, orders).expect("well-posed")
}

/// Annihilator of a whole subgroup, through its generators.
pub fn annihilator_of(ring: &FiniteRing, set: &SubgroupForm, side: Side) -> SubgroupForm {
    ring_annihilator(ring, &set.generators(), side)
}

/// Two-sided ideal generated by `gens`.
pub fn two_sided_ideal(ring: &FiniteRing, gens: &[Vec<i64>]) -> SubgroupForm {
    let r = ring.rank();
    let mut ops = Vec::with_capacity(2 * r);
    for i in 0..r {
        let b = ring.basis(i);
        let left: Vec<Vec<i64>> = (0..r).map(|j| ring.mul(&b, &ring.basis(j))).collect();
        let right: Vec<Vec<i64>> = (0..r).map(|j| ring.mul(&ring.basis(j), &b)).collect();
        ops.push(Matrix::from_columns(r, &left));
        ops.push(Matrix::from_columns(r, &right));
    }
    let refs: Vec<&Matrix> = ops.iter().collect();
    closure(ring.add_orders(), gens, &refs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{make_builtin, RingFamily};

    #[test]
    fn annihilators_in_z12() {
        let r = make_builtin(&RingFamily::Zn(12)).unwrap();
        assert_eq!(ring_annihilator(&r, &[vec![4]], Side::Left).order(), 4);
        assert_eq!(ring_annihilator(&r, &[vec![4], vec![6]], Side::Right).order(), 2);
        assert_eq!(ring_annihilator(&r, &[], Side::Left).order(), 12);
    }

    #[test]
    fn triangular_annihilators_are_one_sided() {
        // T2(F2) with basis e11, e12, e22
        let r = make_builtin(&RingFamily::TriangularRing(2, 2)).unwrap();
        let e12 = vec![0, 1, 0];
        // s e12 = 0 iff the e11 coefficient vanishes
        assert_eq!(ring_annihilator(&r, &[e12.clone()], Side::Left).order(), 4);
        // e12 s = 0 iff the e22 coefficient vanishes
        assert_eq!(ring_annihilator(&r, &[e12.clone()], Side::Right).order(), 4);
        assert_ne!(ring_annihilator(&r, &[e12.clone()], Side::Left), ring_annihilator(&r, &[e12.clone()], Side::Right));
        assert_eq!(two_sided_ideal(&r, &[e12]).order(), 2);
        assert_eq!(two_sided_ideal(&r, &[vec![1, 0, 0]]).order(), 4);
    }
}

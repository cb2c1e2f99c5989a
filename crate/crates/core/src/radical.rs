//! Annihilators, the locally nilpotent radical 𝔏(M), prime and semiprime
//! submodules, the prime radical, and the `A_1, A_2, ...` sequence attached to
//! a fully invariant nil submodule.
//!
//! 𝔏(M) is computed as the sum of the nilpotent cyclic submodules. A locally
//! nilpotent `N` has every `Rn` nilpotent (take the finite subset `{n}`), so
//! `N` is a sum of nilpotent cyclics. Conversely a nilpotent `Rx` is locally
//! nilpotent, because the left-nested products of copies of `Rx` are its
//! powers. Both sums therefore agree for every finite module.

use serde::Serialize;
use thiserror::Error;

use crate::context::ModuleContext;
use crate::homspace::Homomorphism;
use crate::lattice::{is_fully_invariant, LatticeError, Submodule};
use crate::product::{
    is_locally_nilpotent, is_nil_submodule, nilpotency_index, power_trace, product, ProductError, Terminal,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RadicalError {
    #[error("submodule {0} is not fully invariant")]
    NotFullyInvariant(String),
    #[error("prime and semiprime submodules must be proper")]
    NotProper,
    #[error("{inner} is not contained in {outer}")]
    NotContained { inner: String, outer: String },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Product(#[from] ProductError),
}

/// `ann_M(N)`: the intersection of the kernels of all maps `M -> N`.
pub fn ann_left(ctx: &ModuleContext, n: &Submodule) -> Submodule {
    ctx.hom_into(n).iter().fold(ctx.full(), |acc, f| acc.intersection(&f.kernel()))
}

/// `ann^r_M(N)`: the sum of the cyclic `Rx` with `N_M Rx = 0`.
pub fn ann_right(ctx: &ModuleContext, n: &Submodule) -> Submodule {
    ctx.cyclics()
        .iter()
        .filter(|c| product(ctx, n, c).is_zero())
        .fold(ctx.zero(), |acc, c| acc.sum(c))
}

/// `ann^r_M(N)` as the sum over every lattice member `K` with `N_M K = 0`.
pub fn ann_right_definitional(ctx: &ModuleContext, n: &Submodule) -> Result<Submodule, RadicalError> {
    let lattice = ctx.lattice()?;
    Ok(lattice
        .members()
        .iter()
        .filter(|k| product(ctx, n, k).is_zero())
        .fold(ctx.zero(), |acc, k| acc.sum(k)))
}

fn check_contained(k: &Submodule, n: &Submodule) -> Result<(), RadicalError> {
    if k.is_subset_of(n) {
        Ok(())
    } else {
        Err(RadicalError::NotContained { inner: k.display(), outer: n.display() })
    }
}

/// `l_N(K) = ann_M(K) ∩ N`.
pub fn l_rel(ctx: &ModuleContext, n: &Submodule, k: &Submodule) -> Result<Submodule, RadicalError> {
    check_contained(k, n)?;
    Ok(ann_left(ctx, k).intersection(n))
}

/// `r_N(K) = ann^r_M(K) ∩ N`.
pub fn r_rel(ctx: &ModuleContext, n: &Submodule, k: &Submodule) -> Result<Submodule, RadicalError> {
    check_contained(k, n)?;
    Ok(ann_right(ctx, k).intersection(n))
}

/// 𝔏(M).
pub fn ell(ctx: &ModuleContext) -> Submodule {
    ctx.cyclics()
        .iter()
        .filter(|c| !c.is_zero() && nilpotency_index(ctx, c).is_some())
        .fold(ctx.zero(), |acc, c| acc.sum(c))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeVerdict {
    pub holds: bool,
    /// `(N, K)` fully invariant with `N_M K ⊆ P`, `N ⊄ P` and `K ⊄ P`.
    pub witness: Option<(Submodule, Submodule)>,
}

fn check_candidate(ctx: &ModuleContext, p: &Submodule) -> Result<(), RadicalError> {
    if p.is_full() {
        return Err(RadicalError::NotProper);
    }
    if !is_fully_invariant(ctx, p) {
        return Err(RadicalError::NotFullyInvariant(p.display()));
    }
    Ok(())
}

pub fn is_prime_submodule(ctx: &ModuleContext, p: &Submodule) -> Result<PrimeVerdict, RadicalError> {
    check_candidate(ctx, p)?;
    Ok(prime_test(ctx, p, false))
}

pub fn is_semiprime_submodule(ctx: &ModuleContext, p: &Submodule) -> Result<PrimeVerdict, RadicalError> {
    check_candidate(ctx, p)?;
    Ok(prime_test(ctx, p, true))
}

fn prime_test(ctx: &ModuleContext, p: &Submodule, diagonal_only: bool) -> PrimeVerdict {
    let outside: Vec<&Submodule> = ctx.fully_invariant().iter().filter(|x| !x.is_subset_of(p)).collect();
    for (i, a) in outside.iter().enumerate() {
        let partners: &[&Submodule] = if diagonal_only { &outside[i..=i] } else { &outside };
        for b in partners {
            if product(ctx, a, b).is_subset_of(p) {
                return PrimeVerdict { holds: false, witness: Some(((*a).clone(), (*b).clone())) };
            }
        }
    }
    PrimeVerdict { holds: true, witness: None }
}

#[derive(Clone, Debug, Serialize)]
pub struct RadicalProfile {
    pub ell: Submodule,
    pub prime_radical: Submodule,
    pub primes: Vec<Submodule>,
    pub semiprimes: Vec<Submodule>,
    pub nilpotency_of_radical: Option<usize>,
    /// No proper prime exists; the radical is then `M`.
    pub no_primes: bool,
    /// Whether 𝔏(M) is itself locally nilpotent. Quasi-projectivity makes
    /// this automatic; without it the answer is only observed.
    pub ell_locally_nilpotent: Option<bool>,
}

pub fn prime_radical(ctx: &ModuleContext) -> Result<RadicalProfile, RadicalError> {
    let mut primes = Vec::new();
    let mut semiprimes = Vec::new();
    for p in ctx.fully_invariant() {
        if p.is_full() {
            continue;
        }
        if prime_test(ctx, p, true).holds {
            semiprimes.push(p.clone());
            if prime_test(ctx, p, false).holds {
                primes.push(p.clone());
            }
        }
    }
    let radical = primes.iter().fold(ctx.full(), |acc, p| acc.intersection(p));
    let l = ell(ctx);
    let ell_ln = match is_locally_nilpotent(ctx, &l, 10_000) {
        Ok(b) => Some(b),
        Err(ProductError::CapExceeded { .. }) => None,
    };
    Ok(RadicalProfile {
        nilpotency_of_radical: nilpotency_index(ctx, &radical),
        no_primes: primes.is_empty(),
        ell: l,
        prime_radical: radical,
        primes,
        semiprimes,
        ell_locally_nilpotent: ell_ln,
    })
}

#[derive(Clone, Debug, Serialize)]
pub enum SubmViolation {
    /// Some `Hom(M, Rn)` with `n ∈ N` contains a non-nilpotent map.
    NotNil {
        element: Vec<i64>,
        #[serde(skip)]
        map: Option<Homomorphism>,
    },
    /// `l_N(N^power) != 0`.
    AnnihilatorNonzero { power: usize, left_annihilator: Submodule },
}

#[derive(Clone, Debug, Serialize)]
pub enum SubmDiagnostic {
    Complete(usize),
    HypothesisViolated(SubmViolation),
    CapReached,
    /// Property (1) or (2) failed at this step even though the hypotheses held.
    ContractBroken(usize),
}

#[derive(Clone, Debug, Serialize)]
pub struct SubmSequence {
    pub modules_a: Vec<Submodule>,
    pub diagnostics: SubmDiagnostic,
}

/// `A_1 = r_N(N)` and `A_{i+1} = r_N(A_1 M ... M A_i M N)`, with no hypothesis
/// checks. Also returns the products `A_1 M ... M A_i M N`.
pub fn subm_prefix(ctx: &ModuleContext, n: &Submodule, k: usize) -> (Vec<Submodule>, Vec<Submodule>) {
    let mut a = Vec::with_capacity(k);
    let mut feeds = Vec::with_capacity(k);
    let mut feed = n.clone();
    for _ in 0..k {
        feeds.push(feed.clone());
        let next = ann_right(ctx, &feed).intersection(n);
        a.push(next);
        feed = chain_product(ctx, &a, Some(n));
    }
    (a, feeds)
}

/// Left-nested product `A_1 M A_2 M ... M A_i`, optionally followed by `M tail`.
pub fn chain_product(ctx: &ModuleContext, a: &[Submodule], tail: Option<&Submodule>) -> Submodule {
    let mut it = a.iter().chain(tail);
    let first = it.next().expect("nonempty chain").clone();
    it.fold(first, |acc, x| product(ctx, &acc, x))
}

/// First step `i` (1-based) where property (1) or (2) fails for `A_1..A_i`.
pub fn subm_contract_failure(ctx: &ModuleContext, a: &[Submodule]) -> Option<usize> {
    for i in 1..=a.len() {
        if chain_product(ctx, &a[..i], None).is_zero() {
            return Some(i);
        }
        let prefix = chain_product(ctx, &a[..i], None);
        if (0..i).any(|j| !product(ctx, &prefix, &a[j]).is_zero()) {
            return Some(i);
        }
    }
    None
}

pub fn subm_sequence(ctx: &ModuleContext, n: &Submodule, max_k: usize) -> Result<SubmSequence, RadicalError> {
    if !is_fully_invariant(ctx, n) {
        return Err(RadicalError::NotFullyInvariant(n.display()));
    }
    if n.is_zero() {
        return Ok(SubmSequence { modules_a: vec![], diagnostics: SubmDiagnostic::Complete(0) });
    }
    let nil = is_nil_submodule(ctx, n);
    if !nil.is_nil {
        let (element, map) = match nil.witness {
            Some((x, f)) => (x, Some(f)),
            None => (vec![], None),
        };
        return Ok(SubmSequence {
            modules_a: vec![],
            diagnostics: SubmDiagnostic::HypothesisViolated(SubmViolation::NotNil { element, map }),
        });
    }
    let trace = power_trace(ctx, n);
    for (j, p) in trace.chain.iter().enumerate() {
        let l = ann_left(ctx, p).intersection(n);
        if !l.is_zero() {
            return Ok(SubmSequence {
                modules_a: vec![],
                diagnostics: SubmDiagnostic::HypothesisViolated(SubmViolation::AnnihilatorNonzero {
                    power: j + 1,
                    left_annihilator: l,
                }),
            });
        }
    }
    let (a, _) = subm_prefix(ctx, n, max_k);
    let diagnostics = match subm_contract_failure(ctx, &a) {
        Some(i) => SubmDiagnostic::ContractBroken(i),
        None => SubmDiagnostic::CapReached,
    };
    Ok(SubmSequence { modules_a: a, diagnostics })
}

/// Least `k` with `ann_M(N^j)` constant for all `j >= k`; `None` when the
/// annihilators keep cycling.
pub fn annihilator_chain_index(ctx: &ModuleContext, n: &Submodule) -> Option<usize> {
    let trace = power_trace(ctx, n);
    let anns: Vec<Submodule> = trace.chain.iter().map(|p| ann_left(ctx, p)).collect();
    let tail_start = match trace.terminal {
        Terminal::Zero(i) => i,
        Terminal::Cycle { start, period } => {
            let cycle = &anns[start - 1..start - 1 + period];
            if cycle.iter().any(|x| *x != cycle[0]) {
                return None;
            }
            start
        }
    };
    let stable = &anns[tail_start - 1];
    let mut k = tail_start;
    while k > 1 && anns[k - 2] == *stable {
        k -= 1;
    }
    Some(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{make_builtin, regular_module, RingFamily};
    use crate::lattice::cyclic_submodule;
    use std::sync::Arc;

    fn regular(f: RingFamily) -> ModuleContext {
        let r = Arc::new(make_builtin(&f).unwrap());
        ModuleContext::new(Arc::new(regular_module(&r))).unwrap()
    }

    fn sub(ctx: &ModuleContext, x: &[i64]) -> Submodule {
        cyclic_submodule(ctx.module(), x)
    }

    #[test]
    fn annihilators_of_cyclic_groups() {
        let c = regular(RingFamily::Zn(4));
        let two = sub(&c, &[2]);
        assert_eq!(ann_left(&c, &c.zero()), c.full());
        assert!(ann_left(&c, &c.full()).is_zero());
        assert_eq!(ann_left(&c, &two), two);
        assert_eq!(ann_right(&c, &c.zero()), c.full());
        assert_eq!(ann_right(&c, &two), two);
        assert_eq!(ann_right_definitional(&c, &two).unwrap(), two);
        assert_eq!(r_rel(&c, &two, &two).unwrap(), two);
        assert_eq!(l_rel(&c, &two, &two).unwrap(), two);
        assert_eq!(l_rel(&c, &two, &c.zero()).unwrap(), two);
        assert!(l_rel(&c, &two, &c.full()).is_err());

        let c = regular(RingFamily::Zn(6));
        assert_eq!(ann_right(&c, &sub(&c, &[2])), sub(&c, &[3]));
    }

    #[test]
    fn ell_examples() {
        let c = regular(RingFamily::Zn(4));
        assert_eq!(ell(&c), sub(&c, &[2]));
        assert!(ell(&regular(RingFamily::Zn(6))).is_zero());
        assert!(ell(&regular(RingFamily::MatrixRing(2, 2))).is_zero());
    }

    #[test]
    fn prime_tests() {
        let c = regular(RingFamily::Zn(4));
        assert!(is_prime_submodule(&c, &sub(&c, &[2])).unwrap().holds);
        let v = is_semiprime_submodule(&c, &c.zero()).unwrap();
        assert!(!v.holds);
        assert_eq!(v.witness.unwrap().0, sub(&c, &[2]));
        assert_eq!(is_prime_submodule(&c, &c.full()), Err(RadicalError::NotProper));

        let c = regular(RingFamily::Zn(6));
        assert!(is_semiprime_submodule(&c, &c.zero()).unwrap().holds);
        let v = is_prime_submodule(&c, &c.zero()).unwrap();
        assert!(!v.holds);
        let (a, b) = v.witness.unwrap();
        assert!(product(&c, &a, &b).is_zero());
    }

    #[test]
    fn prime_radicals() {
        let c = regular(RingFamily::Zn(4));
        let p = prime_radical(&c).unwrap();
        assert_eq!(p.prime_radical, sub(&c, &[2]));
        assert_eq!(p.ell, p.prime_radical);
        assert_eq!(p.nilpotency_of_radical, Some(2));

        let c = regular(RingFamily::Zn(6));
        let p = prime_radical(&c).unwrap();
        assert!(p.prime_radical.is_zero());
        assert_eq!(p.primes, vec![sub(&c, &[3]), sub(&c, &[2])]);

        let c = regular(RingFamily::TriangularRing(2, 2));
        let p = prime_radical(&c).unwrap();
        assert_eq!(p.primes.len(), 2);
        assert_eq!(p.prime_radical.order(), 2);
        assert_eq!(p.nilpotency_of_radical, Some(2));
        assert_eq!(p.prime_radical, p.ell);
    }

    #[test]
    fn subm_examples() {
        let c = regular(RingFamily::Zn(4));
        let s = subm_sequence(&c, &c.zero(), 5).unwrap();
        assert!(matches!(s.diagnostics, SubmDiagnostic::Complete(0)));
        let s = subm_sequence(&c, &sub(&c, &[2]), 5).unwrap();
        match s.diagnostics {
            SubmDiagnostic::HypothesisViolated(SubmViolation::AnnihilatorNonzero { power, left_annihilator }) => {
                assert_eq!(power, 1);
                assert_eq!(left_annihilator, sub(&c, &[2]));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn annihilator_chain() {
        let c = regular(RingFamily::Zn(4));
        assert_eq!(annihilator_chain_index(&c, &c.zero()), Some(1));
        assert_eq!(annihilator_chain_index(&c, &sub(&c, &[2])), Some(2));
        let c = regular(RingFamily::Zn(6));
        assert_eq!(annihilator_chain_index(&c, &sub(&c, &[2])), Some(1));
    }
}

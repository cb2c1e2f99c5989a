//! Finite rings given by structure constants and finite left modules given by
//! action matrices.
//!
//! A ring of rank `r` has an additive basis `b_0..b_{r-1}` with orders
//! `m_0 | m_1 | ... | m_{r-1}` and products `b_i b_j = sum_k c_{ijk} b_k`.
//! A module has generators `e_0..e_{s-1}` of orders `d_0 | ... | d_{s-1}` and
//! one `s x s` matrix per ring basis element whose column `j` holds the
//! coordinates of `b_i e_j`.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::homspace::Homomorphism;
use crate::intlat::{lcm, reduce, Matrix, SubgroupForm};
use crate::lattice::Submodule;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("malformed ring or module data: {0}")]
    Malformed(String),
    #[error("multiplication is not associative on basis triple ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("unit does not act as identity on basis element {0}")]
    NoUnit(usize),
    #[error("structure constant c[{0}][{1}][{2}] is incompatible with the additive orders")]
    OrderIncompatible(usize, usize, usize),
    #[error("the unit does not act as the identity")]
    UnitNotIdentity,
    #[error("action of basis elements {i} and {j} is incompatible with the multiplication on generator {generator}")]
    ActionIncompatible { i: usize, j: usize, generator: usize },
    #[error("order violation: {0}")]
    OrderViolation(String),
    #[error("{what} has {size} elements, above the cap {cap}")]
    CapExceeded { what: String, size: u64, cap: u64 },
    #[error("mismatched parents: {0}")]
    Mismatch(String),
}

/// Size limits for rings and modules.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    pub max_ring_order: u64,
    pub max_module_order: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { max_ring_order: 256, max_module_order: 4096 }
    }
}

/// Unvalidated ring data, as read from an instance file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingSpec {
    pub add_orders: Vec<u64>,
    /// `struct_consts[i][j]` is the coefficient vector of `b_i b_j`.
    pub struct_consts: Vec<Vec<Vec<i64>>>,
    pub unit: Vec<i64>,
    pub labels: Option<Vec<String>>,
}

/// Unvalidated module data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleSpec {
    pub inv_factors: Vec<u64>,
    /// One matrix per ring basis element, given by rows.
    pub actions: Vec<Vec<Vec<i64>>>,
    pub labels: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteRing {
    add_orders: Vec<u64>,
    struct_consts: Vec<Vec<i64>>,
    unit: Vec<i64>,
    labels: Vec<String>,
}

fn check_chain(orders: &[u64], what: &str) -> Result<(), AlgebraError> {
    for (i, &m) in orders.iter().enumerate() {
        if m < 2 {
            return Err(AlgebraError::Malformed(format!("{what} entry {i} is {m}, expected at least 2")));
        }
        if m > crate::intlat::MAX_MODULUS {
            return Err(AlgebraError::Malformed(format!("{what} entry {i} is too large")));
        }
        if i > 0 && m % orders[i - 1] != 0 {
            return Err(AlgebraError::Malformed(format!("{what} is not a divisibility chain")));
        }
    }
    Ok(())
}

fn default_labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

fn check_labels(labels: &[String], n: usize) -> Result<(), AlgebraError> {
    if labels.len() != n {
        return Err(AlgebraError::Malformed(format!("expected {n} labels, got {}", labels.len())));
    }
    for (i, l) in labels.iter().enumerate() {
        if l.is_empty() || !l.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') || l.chars().all(|c| c.is_ascii_digit()) {
            return Err(AlgebraError::Malformed(format!("label {l:?} is not an identifier")));
        }
        if labels[..i].contains(l) {
            return Err(AlgebraError::Malformed(format!("duplicate label {l:?}")));
        }
    }
    Ok(())
}

pub fn validate_ring(spec: &RingSpec) -> Result<FiniteRing, AlgebraError> {
    let r = spec.add_orders.len();
    check_chain(&spec.add_orders, "orders")?;
    if spec.unit.len() != r {
        return Err(AlgebraError::Malformed(format!("unit has length {}, expected {r}", spec.unit.len())));
    }
    if spec.struct_consts.len() != r || spec.struct_consts.iter().any(|row| row.len() != r) {
        return Err(AlgebraError::Malformed("structure constant table has the wrong shape".into()));
    }
    let mut consts = Vec::with_capacity(r * r);
    for i in 0..r {
        for j in 0..r {
            let c = &spec.struct_consts[i][j];
            if c.len() != r {
                return Err(AlgebraError::Malformed(format!("product {i} {j} has length {}, expected {r}", c.len())));
            }
            consts.push(c.iter().zip(&spec.add_orders).map(|(&x, &m)| x.rem_euclid(m as i64)).collect::<Vec<_>>());
        }
    }
    let labels = match &spec.labels {
        Some(l) => {
            check_labels(l, r)?;
            l.clone()
        }
        None => default_labels("b", r),
    };
    let unit = spec.unit.iter().zip(&spec.add_orders).map(|(&x, &m)| x.rem_euclid(m as i64)).collect();
    let ring = FiniteRing { add_orders: spec.add_orders.clone(), struct_consts: consts, unit, labels };
    ring.check_axioms()?;
    Ok(ring)
}

impl FiniteRing {
    fn check_axioms(&self) -> Result<(), AlgebraError> {
        let r = self.rank();
        let m = &self.add_orders;
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    let c = self.struct_consts[i * r + j][k] as i128;
                    if (m[i] as i128 * c) % m[k] as i128 != 0 || (m[j] as i128 * c) % m[k] as i128 != 0 {
                        return Err(AlgebraError::OrderIncompatible(i, j, k));
                    }
                }
            }
        }
        for i in 0..r {
            let bi = self.basis(i);
            for j in 0..r {
                let bij = self.mul(&bi, &self.basis(j));
                for k in 0..r {
                    let bk = self.basis(k);
                    if self.mul(&bij, &bk) != self.mul(&bi, &self.mul(&self.basis(j), &bk)) {
                        return Err(AlgebraError::NotAssociative(i, j, k));
                    }
                }
            }
        }
        for i in 0..r {
            let bi = self.basis(i);
            if self.mul(&self.unit, &bi) != bi || self.mul(&bi, &self.unit) != bi {
                return Err(AlgebraError::NoUnit(i));
            }
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.add_orders.len()
    }

    pub fn add_orders(&self) -> &[u64] {
        &self.add_orders
    }

    pub fn unit(&self) -> &[i64] {
        &self.unit
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Coefficients of `b_i b_j`.
    pub fn struct_const(&self, i: usize, j: usize) -> &[i64] {
        &self.struct_consts[i * self.rank() + j]
    }

    pub fn order(&self) -> u64 {
        self.add_orders.iter().product()
    }

    pub fn basis(&self, i: usize) -> Vec<i64> {
        let mut v = vec![0; self.rank()];
        v[i] = 1;
        v
    }

    pub fn zero(&self) -> Vec<i64> {
        vec![0; self.rank()]
    }

    pub fn is_commutative(&self) -> bool {
        let r = self.rank();
        (0..r).all(|i| (0..r).all(|j| self.struct_const(i, j) == self.struct_const(j, i)))
    }

    pub fn reduce(&self, a: &[i64]) -> Vec<i64> {
        a.iter().zip(&self.add_orders).map(|(&x, &m)| x.rem_euclid(m as i64)).collect()
    }

    pub fn add(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        a.iter().zip(b).zip(&self.add_orders).map(|((&x, &y), &m)| (x + y).rem_euclid(m as i64)).collect()
    }

    pub fn neg(&self, a: &[i64]) -> Vec<i64> {
        a.iter().zip(&self.add_orders).map(|(&x, &m)| (-x).rem_euclid(m as i64)).collect()
    }

    pub fn mul(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        let r = self.rank();
        let mut acc = vec![0i128; r];
        for i in 0..r {
            if a[i] == 0 {
                continue;
            }
            for j in 0..r {
                if b[j] == 0 {
                    continue;
                }
                let ab = a[i] as i128 * b[j] as i128;
                for (k, &c) in self.struct_consts[i * r + j].iter().enumerate() {
                    acc[k] += ab * c as i128;
                }
            }
        }
        acc.iter().zip(&self.add_orders).map(|(&x, &m)| reduce(x, m as i64)).collect()
    }

    /// All elements in mixed-radix order, first coordinate fastest.
    pub fn elements(&self) -> Vec<Vec<i64>> {
        mixed_radix(&self.add_orders)
    }

    pub fn spec(&self) -> RingSpec {
        let r = self.rank();
        RingSpec {
            add_orders: self.add_orders.clone(),
            struct_consts: (0..r).map(|i| (0..r).map(|j| self.struct_const(i, j).to_vec()).collect()).collect(),
            unit: self.unit.clone(),
            labels: Some(self.labels.clone()),
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, AlgebraError> {
        check_labels(&labels, self.rank())?;
        self.labels = labels;
        Ok(self)
    }
}

/// All vectors `x` with `0 <= x_j < orders[j]`, first coordinate fastest.
pub fn mixed_radix(orders: &[u64]) -> Vec<Vec<i64>> {
    let total: u64 = orders.iter().product();
    let mut out = Vec::with_capacity(total as usize);
    let mut c = vec![0i64; orders.len()];
    for _ in 0..total {
        out.push(c.clone());
        for (x, &m) in c.iter_mut().zip(orders) {
            *x += 1;
            if (*x as u64) < m {
                break;
            }
            *x = 0;
        }
    }
    out
}

/// Builtin ring families.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RingFamily {
    /// `Z/n`.
    Zn(u64),
    /// `k x k` matrices over `Z/n`.
    MatrixRing(usize, u64),
    /// Upper triangular `k x k` matrices over `Z/n`.
    TriangularRing(usize, u64),
    ProductRing(Vec<RingFamily>),
}

impl fmt::Display for RingFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingFamily::Zn(n) => write!(f, "Z{n}"),
            RingFamily::MatrixRing(k, n) => write!(f, "M{k}(Z{n})"),
            RingFamily::TriangularRing(k, n) => write!(f, "T{k}(Z{n})"),
            RingFamily::ProductRing(parts) => {
                write!(f, "Prod(")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, ")")
            }
        }
    }
}

pub fn make_builtin(family: &RingFamily) -> Result<FiniteRing, AlgebraError> {
    make_builtin_with(family, &Caps::default())
}

pub fn make_builtin_with(family: &RingFamily, caps: &Caps) -> Result<FiniteRing, AlgebraError> {
    let ring = build_family(family)?;
    if ring.order() > caps.max_ring_order {
        return Err(AlgebraError::CapExceeded { what: format!("ring {family}"), size: ring.order(), cap: caps.max_ring_order });
    }
    Ok(ring)
}

fn matrix_units(k: usize, n: u64, upper_only: bool) -> Result<FiniteRing, AlgebraError> {
    if k == 0 || n < 2 {
        return Err(AlgebraError::Malformed("matrix rings need k >= 1 and n >= 2".into()));
    }
    let pairs: Vec<(usize, usize)> =
        (0..k).flat_map(|a| (0..k).map(move |b| (a, b))).filter(|&(a, b)| !upper_only || a <= b).collect();
    let total = (n as f64).powi(pairs.len() as i32);
    if total > 1e15 {
        return Err(AlgebraError::CapExceeded { what: "matrix ring".into(), size: u64::MAX, cap: 0 });
    }
    let r = pairs.len();
    let idx = |p: (usize, usize)| pairs.iter().position(|&q| q == p);
    let mut consts = vec![vec![vec![0i64; r]; r]; r];
    for (i, &(a, b)) in pairs.iter().enumerate() {
        for (j, &(c, d)) in pairs.iter().enumerate() {
            if b == c {
                let t = idx((a, d)).expect("closed under products");
                consts[i][j][t] = 1;
            }
        }
    }
    let mut unit = vec![0i64; r];
    for a in 0..k {
        unit[idx((a, a)).expect("diagonal present")] = 1;
    }
    let labels = if k <= 9 {
        Some(pairs.iter().map(|&(a, b)| format!("e{}{}", a + 1, b + 1)).collect())
    } else {
        None
    };
    validate_ring(&RingSpec { add_orders: vec![n; r], struct_consts: consts, unit, labels })
}

fn build_family(family: &RingFamily) -> Result<FiniteRing, AlgebraError> {
    match family {
        RingFamily::Zn(n) => {
            if *n < 2 {
                return Err(AlgebraError::Malformed("Zn needs n >= 2".into()));
            }
            validate_ring(&RingSpec { add_orders: vec![*n], struct_consts: vec![vec![vec![1]]], unit: vec![1], labels: None })
        }
        RingFamily::MatrixRing(k, n) => matrix_units(*k, *n, false),
        RingFamily::TriangularRing(k, n) => matrix_units(*k, *n, true),
        RingFamily::ProductRing(parts) => {
            let rings = parts.iter().map(build_family).collect::<Result<Vec<_>, _>>()?;
            Ok(product_ring(&rings))
        }
    }
}

/// Direct product of rings, renormalized to invariant-factor form.
pub fn product_ring(rings: &[FiniteRing]) -> FiniteRing {
    let mut orders = Vec::new();
    let mut offsets = Vec::new();
    let mut labels = Vec::new();
    for (t, r) in rings.iter().enumerate() {
        offsets.push(orders.len());
        orders.extend_from_slice(&r.add_orders);
        labels.extend(r.labels.iter().map(|l| if rings.len() > 1 { format!("{l}_{t}") } else { l.clone() }));
    }
    let n = orders.len();
    let mut consts = vec![vec![0i64; n]; n * n];
    let mut unit = vec![0i64; n];
    for (t, r) in rings.iter().enumerate() {
        let o = offsets[t];
        for i in 0..r.rank() {
            for j in 0..r.rank() {
                for (k, &c) in r.struct_const(i, j).iter().enumerate() {
                    consts[(o + i) * n + (o + j)][o + k] = c;
                }
            }
            unit[o + i] = r.unit[i];
        }
    }
    let raw = RawRing { orders, consts, unit, labels };
    raw.normalize()
}

/// Ring data over an arbitrary (not necessarily chain) additive presentation.
struct RawRing {
    orders: Vec<u64>,
    consts: Vec<Vec<i64>>,
    unit: Vec<i64>,
    labels: Vec<String>,
}

impl RawRing {
    fn mul(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        let n = self.orders.len();
        let mut acc = vec![0i128; n];
        for i in 0..n {
            for j in 0..n {
                let ab = a[i] as i128 * b[j] as i128;
                if ab == 0 {
                    continue;
                }
                for k in 0..n {
                    acc[k] += ab * self.consts[i * n + j][k] as i128;
                }
            }
        }
        acc.iter().zip(&self.orders).map(|(&x, &m)| reduce(x, m as i64)).collect()
    }

    fn normalize(self) -> FiniteRing {
        let basis = AdditiveChange::new(&self.orders);
        let r = basis.new_orders.len();
        let gens = basis.new_generators();
        let mut consts = Vec::with_capacity(r * r);
        for i in 0..r {
            for j in 0..r {
                consts.push(basis.to_new(&self.mul(&gens[i], &gens[j])));
            }
        }
        let labels = match &basis.permutation {
            Some(p) => p.iter().map(|&k| self.labels[k].clone()).collect(),
            None => default_labels("b", r),
        };
        let ring = FiniteRing { add_orders: basis.new_orders.clone(), struct_consts: consts, unit: basis.to_new(&self.unit), labels };
        debug_assert!(ring.check_axioms().is_ok());
        ring
    }
}

/// Change of generators from `prod Z/orders[j]` to an invariant-factor chain.
///
/// When sorting the generators by order already yields a chain of orders
/// `>= 2`, the change is a permutation (order-1 generators are dropped);
/// otherwise it comes from the Smith form of the relation matrix.
pub(crate) struct AdditiveChange {
    old_orders: Vec<u64>,
    pub new_orders: Vec<u64>,
    /// Column `k` holds the old coordinates of new generator `k`.
    to_old: Matrix,
    /// Column `j` holds the new coordinates of old generator `j`.
    to_new: Matrix,
    pub permutation: Option<Vec<usize>>,
}

impl AdditiveChange {
    pub fn new(orders: &[u64]) -> Self {
        let n = orders.len();
        let mut perm: Vec<usize> = (0..n).filter(|&j| orders[j] > 1).collect();
        perm.sort_by_key(|&j| orders[j]);
        let sorted: Vec<u64> = perm.iter().map(|&j| orders[j]).collect();
        if sorted.windows(2).all(|w| w[1] % w[0] == 0) {
            let r = perm.len();
            let mut to_old = Matrix::zeros(n, r);
            let mut to_new = Matrix::zeros(r, n);
            for (k, &j) in perm.iter().enumerate() {
                to_old.set(j, k, 1);
                to_new.set(k, j, 1);
            }
            return AdditiveChange { old_orders: orders.to_vec(), new_orders: sorted, to_old, to_new, permutation: Some(perm) };
        }
        let ib = SubgroupForm::full(orders).invariant_basis();
        let new_orders = ib.invariants().to_vec();
        let r = new_orders.len();
        let to_old = Matrix::from_columns(n, ib.generators());
        let cols: Vec<Vec<i64>> = (0..n)
            .map(|j| {
                let mut e = vec![0; n];
                e[j] = 1;
                ib.coordinates(&e)
            })
            .collect();
        let to_new = Matrix::from_columns(r, &cols);
        AdditiveChange { old_orders: orders.to_vec(), new_orders, to_old, to_new, permutation: None }
    }

    pub fn to_new(&self, x: &[i64]) -> Vec<i64> {
        self.to_new.apply_mod(x, &self.new_orders)
    }

    pub fn to_old(&self, y: &[i64]) -> Vec<i64> {
        self.to_old.apply_mod(y, &self.old_orders)
    }

    pub fn new_generators(&self) -> Vec<Vec<i64>> {
        (0..self.new_orders.len()).map(|k| self.to_old.column(k)).collect()
    }
}

/// `R^op`, with `c^op_{ijk} = c_{jik}`.
pub fn opposite_ring(ring: &FiniteRing) -> FiniteRing {
    let r = ring.rank();
    let mut consts = Vec::with_capacity(r * r);
    for i in 0..r {
        for j in 0..r {
            consts.push(ring.struct_const(j, i).to_vec());
        }
    }
    FiniteRing { add_orders: ring.add_orders.clone(), struct_consts: consts, unit: ring.unit.clone(), labels: ring.labels.clone() }
}

/// Trivial ring of rank zero.
pub fn zero_ring() -> FiniteRing {
    FiniteRing { add_orders: vec![], struct_consts: vec![], unit: vec![], labels: vec![] }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteModule {
    ring: Arc<FiniteRing>,
    inv_factors: Vec<u64>,
    actions: Vec<Matrix>,
    labels: Vec<String>,
}

pub fn validate_module(ring: &Arc<FiniteRing>, spec: &ModuleSpec) -> Result<FiniteModule, AlgebraError> {
    let s = spec.inv_factors.len();
    check_chain(&spec.inv_factors, "inv_factors")?;
    if spec.actions.len() != ring.rank() {
        return Err(AlgebraError::Malformed(format!(
            "{} action matrices for a ring of rank {}",
            spec.actions.len(),
            ring.rank()
        )));
    }
    let mut actions = Vec::with_capacity(ring.rank());
    for (i, a) in spec.actions.iter().enumerate() {
        if a.len() != s || a.iter().any(|row| row.len() != s) {
            return Err(AlgebraError::Malformed(format!("action {i} is not {s}x{s}")));
        }
        let mut m = Matrix::from_rows(s, s, a.clone());
        m.reduce_rows(&spec.inv_factors);
        actions.push(m);
    }
    let labels = match &spec.labels {
        Some(l) => {
            check_labels(l, s)?;
            l.clone()
        }
        None => default_labels("x", s),
    };
    let module = FiniteModule { ring: ring.clone(), inv_factors: spec.inv_factors.clone(), actions, labels };
    module.check_axioms()?;
    Ok(module)
}

impl FiniteModule {
    fn check_axioms(&self) -> Result<(), AlgebraError> {
        let d = &self.inv_factors;
        let s = d.len();
        let r = self.ring.rank();
        for (i, a) in self.actions.iter().enumerate() {
            let m = self.ring.add_orders[i] as i128;
            for k in 0..s {
                for j in 0..s {
                    let x = a.get(k, j) as i128;
                    if (d[j] as i128 * x) % d[k] as i128 != 0 {
                        return Err(AlgebraError::OrderViolation(format!(
                            "basis element {i} sends generator {j} of order {} to an element of larger order",
                            d[j]
                        )));
                    }
                    if (m * x) % d[k] as i128 != 0 {
                        return Err(AlgebraError::OrderViolation(format!(
                            "basis element {i} has additive order {m} but {m} times its action is nonzero"
                        )));
                    }
                }
            }
        }
        if self.action_matrix(self.ring.unit()) != Matrix::identity(s) {
            return Err(AlgebraError::UnitNotIdentity);
        }
        for i in 0..r {
            for j in 0..r {
                let lhs = self.actions[i].mul_mod_rows(&self.actions[j], d);
                let rhs = self.action_matrix(self.ring.struct_const(i, j));
                if lhs != rhs {
                    let generator = (0..s).find(|&g| lhs.column(g) != rhs.column(g)).unwrap_or(0);
                    return Err(AlgebraError::ActionIncompatible { i, j, generator });
                }
            }
        }
        Ok(())
    }

    pub fn ring(&self) -> &Arc<FiniteRing> {
        &self.ring
    }

    pub fn inv_factors(&self) -> &[u64] {
        &self.inv_factors
    }

    pub fn actions(&self) -> &[Matrix] {
        &self.actions
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Number of additive generators `s`.
    pub fn dim(&self) -> usize {
        self.inv_factors.len()
    }

    pub fn order(&self) -> u64 {
        self.inv_factors.iter().product()
    }

    pub fn exponent(&self) -> u64 {
        self.inv_factors.last().copied().unwrap_or(1)
    }

    /// Composition length bound `sum_j Omega(d_j)`.
    pub fn composition_bound(&self) -> usize {
        self.inv_factors.iter().map(|&d| big_omega(d)).sum()
    }

    pub fn zero(&self) -> Vec<i64> {
        vec![0; self.dim()]
    }

    pub fn basis(&self, j: usize) -> Vec<i64> {
        let mut v = self.zero();
        v[j] = 1;
        v
    }

    pub fn reduce(&self, x: &[i64]) -> Vec<i64> {
        x.iter().zip(&self.inv_factors).map(|(&a, &m)| a.rem_euclid(m as i64)).collect()
    }

    pub fn add(&self, x: &[i64], y: &[i64]) -> Vec<i64> {
        x.iter().zip(y).zip(&self.inv_factors).map(|((&a, &b), &m)| (a + b).rem_euclid(m as i64)).collect()
    }

    pub fn neg(&self, x: &[i64]) -> Vec<i64> {
        x.iter().zip(&self.inv_factors).map(|(&a, &m)| (-a).rem_euclid(m as i64)).collect()
    }

    pub fn scale(&self, c: i64, x: &[i64]) -> Vec<i64> {
        x.iter().zip(&self.inv_factors).map(|(&a, &m)| reduce(c as i128 * a as i128, m as i64)).collect()
    }

    /// Matrix of the action of `sum r_i b_i`.
    pub fn action_matrix(&self, r: &[i64]) -> Matrix {
        let s = self.dim();
        let mut m = Matrix::zeros(s, s);
        for k in 0..s {
            for j in 0..s {
                let acc: i128 = r.iter().zip(&self.actions).map(|(&c, a)| c as i128 * a.get(k, j) as i128).sum();
                m.set(k, j, reduce(acc, self.inv_factors[k] as i64));
            }
        }
        m
    }

    pub fn act(&self, r: &[i64], x: &[i64]) -> Vec<i64> {
        let s = self.dim();
        let mut acc = vec![0i128; s];
        for (i, a) in self.actions.iter().enumerate() {
            if r[i] == 0 {
                continue;
            }
            for k in 0..s {
                let row: i128 = (0..s).map(|j| a.get(k, j) as i128 * x[j] as i128).sum();
                acc[k] += r[i] as i128 * row;
            }
        }
        acc.iter().zip(&self.inv_factors).map(|(&v, &m)| reduce(v, m as i64)).collect()
    }

    /// All elements in mixed-radix order, first coordinate fastest.
    pub fn elements(&self) -> Vec<Vec<i64>> {
        mixed_radix(&self.inv_factors)
    }

    /// Position of `x` in [`Self::elements`].
    pub fn index_of(&self, x: &[i64]) -> usize {
        let mut idx = 0usize;
        let mut stride = 1usize;
        for (&a, &m) in x.iter().zip(&self.inv_factors) {
            idx += a.rem_euclid(m as i64) as usize * stride;
            stride *= m as usize;
        }
        idx
    }

    pub fn element_at(&self, mut idx: usize) -> Vec<i64> {
        self.inv_factors
            .iter()
            .map(|&m| {
                let a = (idx % m as usize) as i64;
                idx /= m as usize;
                a
            })
            .collect()
    }

    pub fn spec(&self) -> ModuleSpec {
        ModuleSpec {
            inv_factors: self.inv_factors.clone(),
            actions: self.actions.iter().map(|a| a.to_rows()).collect(),
            labels: Some(self.labels.clone()),
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, AlgebraError> {
        check_labels(&labels, self.dim())?;
        self.labels = labels;
        Ok(self)
    }

    pub fn is_zero_module(&self) -> bool {
        self.inv_factors.is_empty()
    }
}

pub fn big_omega(mut n: u64) -> usize {
    let mut count = 0;
    let mut p = 2;
    while p * p <= n {
        while n % p == 0 {
            n /= p;
            count += 1;
        }
        p += 1;
    }
    if n > 1 {
        count += 1;
    }
    count
}

/// `_R R`, acting by left multiplication.
pub fn regular_module(ring: &Arc<FiniteRing>) -> FiniteModule {
    let r = ring.rank();
    let actions = (0..r)
        .map(|i| {
            let cols: Vec<Vec<i64>> = (0..r).map(|j| ring.struct_const(i, j).to_vec()).collect();
            Matrix::from_columns(r, &cols)
        })
        .collect();
    FiniteModule { ring: ring.clone(), inv_factors: ring.add_orders.clone(), actions, labels: ring.labels.clone() }
}

/// The zero module over `ring`.
pub fn zero_module(ring: &Arc<FiniteRing>) -> FiniteModule {
    FiniteModule { ring: ring.clone(), inv_factors: vec![], actions: vec![Matrix::zeros(0, 0); ring.rank()], labels: vec![] }
}

/// Module data over an arbitrary additive presentation, brought to
/// invariant-factor form. Returns the module together with the coordinate
/// change (old to new and new to old).
pub(crate) fn normalize_module(
    ring: &Arc<FiniteRing>,
    orders: &[u64],
    actions: &[Matrix],
    labels: &[String],
) -> (FiniteModule, AdditiveChange) {
    let change = AdditiveChange::new(orders);
    let gens = change.new_generators();
    let s = change.new_orders.len();
    let new_actions = actions
        .iter()
        .map(|a| {
            let cols: Vec<Vec<i64>> = gens.iter().map(|g| change.to_new(&a.apply_mod(g, orders))).collect();
            Matrix::from_columns(s, &cols)
        })
        .collect();
    let labels = match &change.permutation {
        Some(p) => p.iter().map(|&k| labels[k].clone()).collect(),
        None => default_labels("x", s),
    };
    let module = FiniteModule { ring: ring.clone(), inv_factors: change.new_orders.clone(), actions: new_actions, labels };
    debug_assert!(module.check_axioms().is_ok());
    (module, change)
}

/// `M/S` together with the canonical projection.
pub fn quotient_module(m: &Arc<FiniteModule>, sub: &Submodule) -> (Arc<FiniteModule>, Homomorphism) {
    let q = sub.form().quotient_map();
    let t = q.invariants().len();
    let actions = m
        .actions
        .iter()
        .map(|a| {
            let cols: Vec<Vec<i64>> = q.lifts().iter().map(|l| q.project(&a.apply_mod(l, &m.inv_factors))).collect();
            Matrix::from_columns(t, &cols)
        })
        .collect();
    let quotient = Arc::new(FiniteModule {
        ring: m.ring.clone(),
        inv_factors: q.invariants().to_vec(),
        actions,
        labels: default_labels("x", t),
    });
    debug_assert!(quotient.check_axioms().is_ok());
    let cols: Vec<Vec<i64>> = (0..m.dim()).map(|j| q.project(&m.basis(j))).collect();
    let proj = Homomorphism::from_matrix_unchecked(m.clone(), quotient.clone(), Matrix::from_columns(t, &cols));
    (quotient, proj)
}

/// `S` as a module in its own right, with the inclusion `S -> M`.
pub fn submodule_module(m: &Arc<FiniteModule>, sub: &Submodule) -> (Arc<FiniteModule>, Homomorphism) {
    let ib = sub.form().invariant_basis();
    let t = ib.invariants().len();
    let actions = m
        .actions
        .iter()
        .map(|a| {
            let cols: Vec<Vec<i64>> = ib.generators().iter().map(|g| ib.coordinates(&a.apply_mod(g, &m.inv_factors))).collect();
            Matrix::from_columns(t, &cols)
        })
        .collect();
    let module = Arc::new(FiniteModule {
        ring: m.ring.clone(),
        inv_factors: ib.invariants().to_vec(),
        actions,
        labels: default_labels("y", t),
    });
    debug_assert!(module.check_axioms().is_ok());
    let incl = Homomorphism::from_matrix_unchecked(module.clone(), m.clone(), Matrix::from_columns(m.dim(), ib.generators()));
    (module, incl)
}

/// Direct sum data: the module, the injections and the projections.
pub struct DirectSum {
    pub module: Arc<FiniteModule>,
    pub injections: Vec<Homomorphism>,
    pub projections: Vec<Homomorphism>,
}

pub fn direct_sum(a: &Arc<FiniteModule>, b: &Arc<FiniteModule>) -> Result<DirectSum, AlgebraError> {
    direct_sum_many(&[a.clone(), b.clone()])
}

pub fn direct_sum_many(parts: &[Arc<FiniteModule>]) -> Result<DirectSum, AlgebraError> {
    let Some(first) = parts.first() else {
        return Err(AlgebraError::Malformed("empty direct sum".into()));
    };
    let ring = first.ring.clone();
    if parts.iter().any(|p| p.ring != ring) {
        return Err(AlgebraError::Mismatch("direct sum of modules over different rings".into()));
    }
    let mut orders = Vec::new();
    let mut offsets = Vec::new();
    let mut labels = Vec::new();
    for (t, p) in parts.iter().enumerate() {
        offsets.push(orders.len());
        orders.extend_from_slice(&p.inv_factors);
        labels.extend(p.labels.iter().map(|l| if parts.len() > 1 { format!("{l}_{t}") } else { l.clone() }));
    }
    let n = orders.len();
    let actions: Vec<Matrix> = (0..ring.rank())
        .map(|i| {
            let mut m = Matrix::zeros(n, n);
            for (t, p) in parts.iter().enumerate() {
                let o = offsets[t];
                for k in 0..p.dim() {
                    for j in 0..p.dim() {
                        m.set(o + k, o + j, p.actions[i].get(k, j));
                    }
                }
            }
            m
        })
        .collect();
    let (module, change) = normalize_module(&ring, &orders, &actions, &labels);
    let module = Arc::new(module);
    let mut injections = Vec::new();
    let mut projections = Vec::new();
    for (t, p) in parts.iter().enumerate() {
        let o = offsets[t];
        let cols: Vec<Vec<i64>> = (0..p.dim())
            .map(|j| {
                let mut e = vec![0; n];
                e[o + j] = 1;
                change.to_new(&e)
            })
            .collect();
        injections.push(Homomorphism::from_matrix_unchecked(p.clone(), module.clone(), Matrix::from_columns(module.dim(), &cols)));
        let cols: Vec<Vec<i64>> = (0..module.dim())
            .map(|k| {
                let old = change.to_old(&module.basis(k));
                p.reduce(&old[o..o + p.dim()])
            })
            .collect();
        projections.push(Homomorphism::from_matrix_unchecked(module.clone(), p.clone(), Matrix::from_columns(p.dim(), &cols)));
    }
    Ok(DirectSum { module, injections, projections })
}

/// `R^k` as a left module.
pub fn free_module(ring: &Arc<FiniteRing>, k: usize) -> Arc<FiniteModule> {
    if k == 0 {
        return Arc::new(zero_module(ring));
    }
    let r = Arc::new(regular_module(ring));
    if k == 1 {
        return r;
    }
    direct_sum_many(&vec![r; k]).expect("same ring").module
}

/// The abelian group `prod Z/orders[j]` as a module over `Z/e`, `e` its exponent.
pub fn abelian_group_module(orders: &[u64]) -> Result<Arc<FiniteModule>, AlgebraError> {
    let e = orders.iter().fold(1i64, |acc, &d| lcm(acc, d as i64)) as u64;
    if e < 2 {
        return Err(AlgebraError::Malformed("the group must be nonzero".into()));
    }
    let ring = Arc::new(make_builtin(&RingFamily::Zn(e))?);
    let n = orders.len();
    let (m, _) = normalize_module(&ring, orders, &[Matrix::identity(n)], &default_labels("x", n));
    Ok(Arc::new(m))
}

/// A ring element bound to its ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingElement {
    pub ring: Arc<FiniteRing>,
    pub coeffs: Vec<i64>,
}

/// A module element bound to its module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleElement {
    pub module: Arc<FiniteModule>,
    pub coeffs: Vec<i64>,
}

impl RingElement {
    pub fn new(ring: &Arc<FiniteRing>, coeffs: &[i64]) -> Result<Self, AlgebraError> {
        if coeffs.len() != ring.rank() {
            return Err(AlgebraError::Malformed("ring element of the wrong length".into()));
        }
        Ok(RingElement { ring: ring.clone(), coeffs: ring.reduce(coeffs) })
    }

    pub fn mul(&self, other: &RingElement) -> Result<RingElement, AlgebraError> {
        if self.ring != other.ring {
            return Err(AlgebraError::Mismatch("elements of different rings".into()));
        }
        Ok(RingElement { ring: self.ring.clone(), coeffs: self.ring.mul(&self.coeffs, &other.coeffs) })
    }

    pub fn add(&self, other: &RingElement) -> Result<RingElement, AlgebraError> {
        if self.ring != other.ring {
            return Err(AlgebraError::Mismatch("elements of different rings".into()));
        }
        Ok(RingElement { ring: self.ring.clone(), coeffs: self.ring.add(&self.coeffs, &other.coeffs) })
    }
}

impl ModuleElement {
    pub fn new(module: &Arc<FiniteModule>, coeffs: &[i64]) -> Result<Self, AlgebraError> {
        if coeffs.len() != module.dim() {
            return Err(AlgebraError::Malformed("module element of the wrong length".into()));
        }
        Ok(ModuleElement { module: module.clone(), coeffs: module.reduce(coeffs) })
    }

    pub fn add(&self, other: &ModuleElement) -> Result<ModuleElement, AlgebraError> {
        if self.module != other.module {
            return Err(AlgebraError::Mismatch("elements of different modules".into()));
        }
        Ok(ModuleElement { module: self.module.clone(), coeffs: self.module.add(&self.coeffs, &other.coeffs) })
    }

    pub fn neg(&self) -> ModuleElement {
        ModuleElement { module: self.module.clone(), coeffs: self.module.neg(&self.coeffs) }
    }
}

pub fn act(r: &RingElement, x: &ModuleElement) -> Result<ModuleElement, AlgebraError> {
    if *r.ring != **x.module.ring() {
        return Err(AlgebraError::Mismatch("ring element and module over different rings".into()));
    }
    Ok(ModuleElement { module: x.module.clone(), coeffs: x.module.act(&r.coeffs, &x.coeffs) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: u64) -> Arc<FiniteRing> {
        Arc::new(make_builtin(&RingFamily::Zn(n)).unwrap())
    }

    #[test]
    fn z4_is_valid() {
        let spec = RingSpec { add_orders: vec![4], struct_consts: vec![vec![vec![1]]], unit: vec![1], labels: None };
        assert!(validate_ring(&spec).is_ok());
    }

    #[test]
    fn zero_unit_is_rejected() {
        let spec = RingSpec { add_orders: vec![4], struct_consts: vec![vec![vec![1]]], unit: vec![0], labels: None };
        assert_eq!(validate_ring(&spec), Err(AlgebraError::NoUnit(0)));
    }

    #[test]
    fn non_associative_is_rejected() {
        // b0 = 1, b1 with b1*b1 = b0 + b1 and mixed terms breaking associativity
        let spec = RingSpec {
            add_orders: vec![2, 2],
            struct_consts: vec![vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1], vec![1, 1]]],
            unit: vec![1, 0],
            labels: None,
        };
        // this one is F_4, associative
        assert!(validate_ring(&spec).is_ok());
        let bad = RingSpec {
            add_orders: vec![2, 2, 2],
            struct_consts: vec![
                vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]],
                vec![vec![0, 1, 0], vec![0, 0, 1], vec![0, 0, 0]],
                vec![vec![0, 0, 1], vec![0, 1, 0], vec![0, 0, 0]],
            ],
            unit: vec![1, 0, 0],
            labels: None,
        };
        assert!(matches!(validate_ring(&bad), Err(AlgebraError::NotAssociative(..))));
    }

    #[test]
    fn order_incompatible_is_rejected() {
        // Z/2 x Z/4 with b0 b1 = b1 has order trouble: 2 * c = 2 != 0 mod 4
        let spec = RingSpec {
            add_orders: vec![2, 4],
            struct_consts: vec![vec![vec![0, 1], vec![0, 1]], vec![vec![0, 1], vec![0, 1]]],
            unit: vec![0, 1],
            labels: None,
        };
        assert!(matches!(validate_ring(&spec), Err(AlgebraError::OrderIncompatible(..))));
    }

    #[test]
    fn builtin_orders() {
        assert_eq!(make_builtin(&RingFamily::Zn(6)).unwrap().order(), 6);
        let m = make_builtin(&RingFamily::MatrixRing(2, 2)).unwrap();
        assert_eq!((m.rank(), m.order()), (4, 16));
        let t = make_builtin(&RingFamily::TriangularRing(2, 2)).unwrap();
        assert_eq!((t.rank(), t.order()), (3, 8));
        assert_eq!(t.labels(), &["e11", "e12", "e22"]);
        assert!(matches!(make_builtin(&RingFamily::MatrixRing(3, 2)), Err(AlgebraError::CapExceeded { .. })));
        let p = make_builtin(&RingFamily::ProductRing(vec![RingFamily::Zn(2), RingFamily::Zn(3)])).unwrap();
        assert_eq!(p.add_orders(), &[6]);
        assert!(p.is_commutative());
    }

    #[test]
    fn opposite_is_an_involution() {
        let t = make_builtin(&RingFamily::TriangularRing(2, 2)).unwrap();
        let op = opposite_ring(&t);
        assert_ne!(op, t);
        assert_eq!(opposite_ring(&op), t);
        assert!(validate_ring(&op.spec()).is_ok());
        let z4 = make_builtin(&RingFamily::Zn(4)).unwrap();
        assert_eq!(opposite_ring(&z4), z4);
        let m = make_builtin(&RingFamily::MatrixRing(2, 2)).unwrap();
        assert!(validate_ring(&opposite_ring(&m).spec()).is_ok());
    }

    #[test]
    fn module_validation() {
        let r = z(4);
        let reg = regular_module(&r);
        assert!(validate_module(&r, &reg.spec()).is_ok());
        let half = ModuleSpec { inv_factors: vec![2], actions: vec![vec![vec![1]]], labels: None };
        assert!(validate_module(&r, &half).is_ok());
        // Z/4 over Z/2: the ring element 2 = 0 would have to act as 2
        let bad = ModuleSpec { inv_factors: vec![4], actions: vec![vec![vec![1]]], labels: None };
        assert!(matches!(validate_module(&z(2), &bad), Err(AlgebraError::OrderViolation(_))));
        let bad_unit = ModuleSpec { inv_factors: vec![4], actions: vec![vec![vec![3]]], labels: None };
        assert!(matches!(validate_module(&r, &bad_unit), Err(AlgebraError::UnitNotIdentity)));
    }

    #[test]
    fn actions_on_elements() {
        let r = z(4);
        let m = Arc::new(regular_module(&r));
        let two = RingElement::new(&r, &[2]).unwrap();
        let three = ModuleElement::new(&m, &[3]).unwrap();
        assert_eq!(act(&two, &three).unwrap().coeffs, vec![2]);
        let one = RingElement::new(&r, &[1]).unwrap();
        assert_eq!(act(&one, &three).unwrap(), three);

        let t = Arc::new(make_builtin(&RingFamily::TriangularRing(2, 2)).unwrap());
        let reg = regular_module(&t);
        assert_eq!(reg.act(&[1, 0, 0], &[0, 1, 0]), vec![0, 1, 0]);
        assert_eq!(reg.act(&[0, 0, 1], &[0, 1, 0]), vec![0, 0, 0]);
        assert_eq!(reg.order(), 8);
    }

    #[test]
    fn direct_sums_normalize() {
        let r = z(4);
        let half = Arc::new(validate_module(&r, &ModuleSpec { inv_factors: vec![2], actions: vec![vec![vec![1]]], labels: None }).unwrap());
        let reg = Arc::new(regular_module(&r));
        let ds = direct_sum(&half, &reg).unwrap();
        assert_eq!(ds.module.inv_factors(), &[2, 4]);
        let ds = direct_sum(&reg, &half).unwrap();
        assert_eq!(ds.module.inv_factors(), &[2, 4]);
        for (i, inj) in ds.injections.iter().enumerate() {
            for (j, proj) in ds.projections.iter().enumerate() {
                let c = proj.compose_after(inj);
                assert_eq!(c.is_zero(), i != j);
            }
        }
        let zero = Arc::new(zero_module(&r));
        assert_eq!(direct_sum(&reg, &zero).unwrap().module.spec().inv_factors, vec![4]);
        assert_eq!(free_module(&r, 2).inv_factors(), &[4, 4]);

        let z6 = z(6);
        let a = abelian_group_module(&[2, 3]).unwrap();
        assert_eq!(a.inv_factors(), &[6]);
        assert_eq!(**a.ring(), *z6);
    }

    #[test]
    fn big_omega_values() {
        assert_eq!(big_omega(1), 0);
        assert_eq!(big_omega(8), 3);
        assert_eq!(big_omega(12), 3);
        assert_eq!(big_omega(97), 1);
    }
}

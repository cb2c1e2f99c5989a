//! Exact integer and modular linear algebra.
//!
//! Two layers live here. [`IntMatrix`] and [`snf`] work over the integers with
//! arbitrary precision. Everything that describes a subgroup of a finite abelian
//! group `Z/d_1 x ... x Z/d_s` works with machine words instead: every entry is
//! kept reduced modulo a modulus that is bounded by [`MAX_MODULUS`], and every
//! product is formed in `i128` before reduction.
//!
//! The central type is [`SubgroupForm`], the row Hermite normal form of the
//! lattice spanned by a set of generators together with the relations
//! `d_j e_j`. Because that lattice has full rank the form is a square upper
//! triangular matrix, and two generator sets span the same subgroup exactly when
//! their forms are equal.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Largest modulus accepted by the word-sized routines.
pub const MAX_MODULUS: u64 = 1 << 40;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntlatError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("modulus {0} is outside 1..={MAX_MODULUS}")]
    BadModulus(u64),
    #[error("system is not well defined on the column moduli (row {row}, column {col})")]
    IllDefined { row: usize, col: usize },
}

// ---------------------------------------------------------------------------
// scalar helpers

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

pub fn lcm(a: i64, b: i64) -> i64 {
    if a == 0 || b == 0 {
        return 0;
    }
    (a / gcd(a, b)) * b
}

/// Extended gcd of non-negative `a`, `b`: returns `(g, s, t)` with `s*a + t*b = g`.
///
/// When `a` divides `b` the result is `(a, 1, 0)`, so an elimination step with
/// it leaves the pivot row untouched.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if a != 0 && b % a == 0 {
        return (a.abs(), a.signum(), 0);
    }
    let (mut r0, mut r1) = (a as i128, b as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (r0, s0, t0) = (-r0, -s0, -t0);
    }
    (r0 as i64, s0 as i64, t0 as i64)
}

#[inline]
pub fn reduce(a: i128, m: i64) -> i64 {
    a.rem_euclid(m as i128) as i64
}

#[inline]
pub fn mul_mod(a: i64, b: i64, m: i64) -> i64 {
    reduce(a as i128 * b as i128, m)
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: i64, m: i64) -> Option<i64> {
    if m == 1 {
        return Some(0);
    }
    let a = a.rem_euclid(m);
    let (g, s, _) = ext_gcd(a, m);
    (g == 1).then(|| s.rem_euclid(m))
}

pub(crate) fn check_modulus(m: u64) -> Result<i64, IntlatError> {
    if m == 0 || m > MAX_MODULUS {
        return Err(IntlatError::BadModulus(m));
    }
    Ok(m as i64)
}

fn lcm_all(moduli: impl IntoIterator<Item = u64>) -> Result<i64, IntlatError> {
    let mut n = 1i64;
    for m in moduli {
        let m = check_modulus(m)?;
        n = lcm(n, m);
        if n as u64 > MAX_MODULUS {
            return Err(IntlatError::BadModulus(n as u64));
        }
    }
    Ok(n)
}

// ---------------------------------------------------------------------------
// word matrices

/// Dense row-major matrix of machine integers.
///
/// Used for action matrices and homomorphisms, where each row is reduced
/// modulo the order of the corresponding target generator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, entries: Vec<Vec<i64>>) -> Self {
        assert_eq!(entries.len(), rows, "row count");
        let mut data = Vec::with_capacity(rows * cols);
        for r in entries {
            assert_eq!(r.len(), cols, "column count");
            data.extend(r);
        }
        Matrix { rows, cols, data }
    }

    pub fn from_columns(rows: usize, columns: &[Vec<i64>]) -> Self {
        let mut m = Matrix::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, &x) in c.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: i64) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    /// Product `self * other` with row `i` reduced modulo `row_moduli[i]`.
    pub fn mul_mod_rows(&self, other: &Matrix, row_moduli: &[u64]) -> Matrix {
        assert_eq!(self.cols, other.rows, "inner dimensions");
        assert_eq!(row_moduli.len(), self.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let m = row_moduli[i] as i64;
            for j in 0..other.cols {
                let mut acc: i128 = 0;
                for l in 0..self.cols {
                    acc += self.get(i, l) as i128 * other.get(l, j) as i128;
                }
                out.set(i, j, reduce(acc, m));
            }
        }
        out
    }

    /// `self * v` with entry `i` reduced modulo `row_moduli[i]`.
    pub fn apply_mod(&self, v: &[i64], row_moduli: &[u64]) -> Vec<i64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let acc: i128 = self.row(i).iter().zip(v).map(|(&a, &b)| a as i128 * b as i128).sum();
                reduce(acc, row_moduli[i] as i64)
            })
            .collect()
    }

    pub fn reduce_rows(&mut self, row_moduli: &[u64]) {
        for i in 0..self.rows {
            let m = row_moduli[i] as i64;
            for j in 0..self.cols {
                let x = self.get(i, j);
                self.set(i, j, x.rem_euclid(m));
            }
        }
    }

    pub fn to_int_matrix(&self) -> IntMatrix {
        IntMatrix { rows: self.rows, cols: self.cols, entries: self.data.iter().map(|&x| BigInt::from(x)).collect() }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// rows (a, b) <- (s a + t b, u a + v b) modulo `n`
    fn row_combine(&mut self, a: usize, b: usize, [s, t, u, v]: [i64; 4], n: i64) {
        for j in 0..self.cols {
            let x = self.get(a, j) as i128;
            let y = self.get(b, j) as i128;
            self.set(a, j, reduce(s as i128 * x + t as i128 * y, n));
            self.set(b, j, reduce(u as i128 * x + v as i128 * y, n));
        }
    }

    /// columns (a, b) <- (s a + t b, u a + v b) modulo `n`
    fn col_combine(&mut self, a: usize, b: usize, [s, t, u, v]: [i64; 4], n: i64) {
        for i in 0..self.rows {
            let x = self.get(i, a) as i128;
            let y = self.get(i, b) as i128;
            self.set(i, a, reduce(s as i128 * x + t as i128 * y, n));
            self.set(i, b, reduce(u as i128 * x + v as i128 * y, n));
        }
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

// ---------------------------------------------------------------------------
// arbitrary precision matrices

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, entries: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_i64_rows(rows: usize, cols: usize, entries: &[Vec<i64>]) -> Self {
        assert_eq!(entries.len(), rows);
        let mut m = IntMatrix::zeros(rows, cols);
        for (i, r) in entries.iter().enumerate() {
            assert_eq!(r.len(), cols);
            for (j, &x) in r.iter().enumerate() {
                m.set(i, j, BigInt::from(x));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: BigInt) {
        self.entries[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "inner dimensions");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = BigInt::zero();
                for l in 0..self.cols {
                    acc += self.get(i, l) * other.get(l, j);
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    /// Diagonal entries `D[i,i]` for `i < min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i).clone()).collect()
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.entries.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k * n + k].is_zero() {
                match (k + 1..n).find(|&i| !a[i * n + k].is_zero()) {
                    Some(i) => {
                        for j in 0..n {
                            a.swap(k * n + j, i * n + j);
                        }
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j]) / &prev;
                    a[i * n + j] = v;
                }
            }
            prev = a[k * n + k].clone();
        }
        sign * &a[n * n - 1]
    }

    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows).map(|i| self.row(i).iter().map(|x| x.to_i64()).collect()).collect()
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// `U * A * V = D` with `U`, `V` unimodular and `D` in Smith form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SnfDecomposition {
    /// Nonzero diagonal entries of `D`.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.d.diagonal().into_iter().filter(|x| !x.is_zero()).collect()
    }
}

struct SnfWork {
    a: Vec<Vec<BigInt>>,
    u: Vec<Vec<BigInt>>,
    v: Vec<Vec<BigInt>>,
    v_inv: Vec<Vec<BigInt>>,
}

impl SnfWork {
    fn row_op(&mut self, p: usize, q: usize, [s, t, x, y]: [&BigInt; 4]) {
        for mat in [&mut self.a, &mut self.u] {
            for j in 0..mat[p].len() {
                let (ap, aq) = (mat[p][j].clone(), mat[q][j].clone());
                mat[p][j] = s * &ap + t * &aq;
                mat[q][j] = x * &ap + y * &aq;
            }
        }
    }

    /// columns (p, q) <- (s p + t q, x p + y q); the inverse is tracked on `v_inv`
    fn col_op(&mut self, p: usize, q: usize, [s, t, x, y]: [&BigInt; 4]) {
        for mat in [&mut self.a, &mut self.v] {
            for row in mat.iter_mut() {
                let (ap, aq) = (row[p].clone(), row[q].clone());
                row[p] = s * &ap + t * &aq;
                row[q] = x * &ap + y * &aq;
            }
        }
        // E = [[s, x], [t, y]] acting on columns; rows of v_inv get E^{-1} = det^{-1}[[y, -x], [-t, s]]
        let det = s * y - t * x;
        let n = self.v_inv[p].len();
        for j in 0..n {
            let (rp, rq) = (self.v_inv[p][j].clone(), self.v_inv[q][j].clone());
            self.v_inv[p][j] = (y * &rp - x * &rq) * &det;
            self.v_inv[q][j] = (-t * &rp + s * &rq) * &det;
        }
    }

    fn swap_rows(&mut self, p: usize, q: usize) {
        self.a.swap(p, q);
        self.u.swap(p, q);
    }

    fn swap_cols(&mut self, p: usize, q: usize) {
        for row in self.a.iter_mut().chain(self.v.iter_mut()) {
            row.swap(p, q);
        }
        self.v_inv.swap(p, q);
    }
}

fn to_rows(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    (0..m.rows).map(|i| m.row(i).to_vec()).collect()
}

fn from_rows(rows: usize, cols: usize, v: Vec<Vec<BigInt>>) -> IntMatrix {
    IntMatrix { rows, cols, entries: v.into_iter().flatten().collect() }
}

/// Smith normal form with transforms.
///
/// Pivots are chosen deterministically: the nonzero entry of least absolute
/// value in the remaining block, ties broken by row index and then by column
/// index.
pub fn snf(a: &IntMatrix) -> SnfDecomposition {
    let (d, u, v, _) = snf_with_inverse(a);
    SnfDecomposition { u, d, v }
}

/// Like [`snf`], additionally returning `V^{-1}`.
pub(crate) fn snf_with_inverse(a: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix, IntMatrix) {
    let (m, n) = (a.rows, a.cols);
    let mut w = SnfWork {
        a: to_rows(a),
        u: to_rows(&IntMatrix::identity(m)),
        v: to_rows(&IntMatrix::identity(n)),
        v_inv: to_rows(&IntMatrix::identity(n)),
    };
    let one = BigInt::one();
    let zero = BigInt::zero();
    let mut k = 0;
    while k < m.min(n) {
        // smallest nonzero |entry| in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in k..m {
            for j in k..n {
                if !w.a[i][j].is_zero() && best.is_none_or(|(bi, bj)| w.a[i][j].abs() < w.a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        w.swap_rows(k, pi);
        w.swap_cols(k, pj);
        loop {
            let mut dirty = false;
            for i in k + 1..m {
                if w.a[i][k].is_zero() {
                    continue;
                }
                let (q, r) = w.a[i][k].div_mod_floor(&w.a[k][k]);
                let nq = -q;
                w.row_op(k, i, [&one, &zero, &nq, &one]);
                if !r.is_zero() {
                    w.swap_rows(k, i);
                    dirty = true;
                }
            }
            for j in k + 1..n {
                if w.a[k][j].is_zero() {
                    continue;
                }
                let (q, r) = w.a[k][j].div_mod_floor(&w.a[k][k]);
                let nq = -q;
                w.col_op(k, j, [&one, &zero, &nq, &one]);
                if !r.is_zero() {
                    w.swap_cols(k, j);
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // divisibility of the trailing block by the pivot
            let mut offender = None;
            'scan: for i in k + 1..m {
                for j in k + 1..n {
                    if !w.a[i][j].is_multiple_of(&w.a[k][k]) {
                        offender = Some(i);
                        break 'scan;
                    }
                }
            }
            match offender {
                Some(i) => {
                    w.row_op(k, i, [&one, &one, &zero, &one]);
                }
                None => break,
            }
        }
        if w.a[k][k].is_negative() {
            let neg = -BigInt::one();
            for j in 0..n {
                w.a[k][j] = -&w.a[k][j];
            }
            for j in 0..m {
                w.u[k][j] = &w.u[k][j] * &neg;
            }
        }
        k += 1;
    }
    (from_rows(m, n, w.a), from_rows(m, m, w.u), from_rows(n, n, w.v), from_rows(n, n, w.v_inv))
}

// ---------------------------------------------------------------------------
// diagonalization over Z/N

/// `U A V = diag(g)` over `Z/N` with `V` and `V^{-1}` tracked.
///
/// Every `g_k` is a divisor of `N` (a zero diagonal entry is stored as `N`) and
/// `g_{k+1} | g_k`.
pub(crate) struct ModDiagonalization {
    pub diag: Vec<i64>,
    pub v: Matrix,
    pub v_inv: Matrix,
}

pub(crate) fn diagonalize_mod(a: &Matrix, n_mod: i64) -> ModDiagonalization {
    let (m, n) = (a.rows, a.cols);
    let mut a = a.clone();
    a.reduce_rows(&vec![n_mod as u64; m]);
    let mut v = Matrix::identity(n);
    let mut v_inv = Matrix::identity(n);
    // V' = V E, V_inv' = E^{-1} V_inv for a column operation E on (p, q)
    let col_op = |a: &mut Matrix, v: &mut Matrix, v_inv: &mut Matrix, p: usize, q: usize, e: [i64; 4], e_inv: [i64; 4]| {
        a.col_combine(p, q, e, n_mod);
        v.col_combine(p, q, e, n_mod);
        v_inv.row_combine(p, q, e_inv, n_mod);
    };
    let r = m.min(n);
    let mut done = r;
    for k in 0..r {
        let mut best: Option<(i64, usize, usize)> = None;
        for i in k..m {
            for j in k..n {
                let x = a.get(i, j);
                if x != 0 {
                    let g = gcd(x, n_mod);
                    if best.is_none_or(|(bg, _, _)| g < bg) {
                        best = Some((g, i, j));
                    }
                }
            }
        }
        let Some((_, pi, pj)) = best else {
            done = k;
            break;
        };
        a.swap_rows(k, pi);
        a.swap_cols(k, pj);
        v.swap_cols(k, pj);
        v_inv.swap_rows(k, pj);
        loop {
            for i in k + 1..m {
                let e = a.get(i, k);
                if e == 0 {
                    continue;
                }
                let p = a.get(k, k);
                let (g, s, t) = ext_gcd(p, e);
                a.row_combine(k, i, [s, t, -(e / g), p / g], n_mod);
            }
            for j in k + 1..n {
                let e = a.get(k, j);
                if e == 0 {
                    continue;
                }
                let p = a.get(k, k);
                let (g, s, t) = ext_gcd(p, e);
                // new col k = s col_k + t col_j, new col j = -(e/g) col_k + (p/g) col_j
                col_op(&mut a, &mut v, &mut v_inv, k, j, [s, t, -(e / g), p / g], [p / g, e / g, -t, s]);
            }
            if (k + 1..m).all(|i| a.get(i, k) == 0) {
                break;
            }
        }
    }
    let mut diag: Vec<i64> = (0..r).map(|k| if k < done { a.get(k, k) } else { 0 }).collect();
    // normalize every diagonal entry to gcd(entry, N) by a unit column scaling
    for k in 0..r {
        let x = diag[k];
        if x == 0 {
            diag[k] = n_mod;
            continue;
        }
        let g = gcd(x, n_mod);
        if g == x {
            continue;
        }
        let step = n_mod / g;
        let t = x / g;
        let mut u = t;
        while gcd(u, n_mod) != 1 {
            u += step;
        }
        let u_inv = inv_mod(u, n_mod).expect("unit");
        for i in 0..n {
            let y = v.get(i, k);
            v.set(i, k, mul_mod(y, u_inv, n_mod));
        }
        for j in 0..n {
            let y = v_inv.get(k, j);
            v_inv.set(k, j, mul_mod(y, u, n_mod));
        }
        diag[k] = g;
    }
    // divisibility chain, largest first
    for i in 0..r {
        for j in i + 1..r {
            let (x, y) = (diag[i], diag[j]);
            if x % y == 0 {
                continue;
            }
            let (g, s, t) = ext_gcd(x, y);
            let (e, e_inv) = ([s, t, -(y / g), x / g], [x / g, y / g, -t, s]);
            v.col_combine(i, j, e, n_mod);
            v_inv.row_combine(i, j, e_inv, n_mod);
            v.swap_cols(i, j);
            v_inv.swap_rows(i, j);
            diag[i] = lcm(x, y);
            diag[j] = g;
        }
    }
    ModDiagonalization { diag, v, v_inv }
}

/// Generators of `{x in (Z/N)^n : A x = 0 mod N}`.
pub(crate) fn kernel_mod(a: &Matrix, n_mod: i64) -> Vec<Vec<i64>> {
    let d = diagonalize_mod(a, n_mod);
    let n = a.cols;
    (0..n)
        .map(|k| {
            let factor = if k < d.diag.len() { n_mod / d.diag[k] } else { 1 };
            (0..n).map(|i| mul_mod(d.v.get(i, k), factor, n_mod)).collect()
        })
        .collect()
}

// ---------------------------------------------------------------------------
// canonical subgroup forms

/// Canonical form of a subgroup of `Z/d_1 x ... x Z/d_s`.
///
/// Stores the row Hermite normal form `H` of the full-rank lattice generated by
/// lifts of the subgroup generators and the relations `d_j e_j`: `H` is upper
/// triangular, `H[j][j]` divides `d_j`, and entries above a pivot lie in
/// `[0, H[j][j])`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct SubgroupForm {
    moduli: Vec<u64>,
    rows: Vec<i64>,
}

impl SubgroupForm {
    /// The zero subgroup.
    pub fn zero(moduli: &[u64]) -> Self {
        let s = moduli.len();
        let mut rows = vec![0; s * s];
        for j in 0..s {
            rows[j * s + j] = moduli[j] as i64;
        }
        SubgroupForm { moduli: moduli.to_vec(), rows }
    }

    /// The whole group.
    pub fn full(moduli: &[u64]) -> Self {
        let s = moduli.len();
        let mut rows = vec![0; s * s];
        for j in 0..s {
            rows[j * s + j] = 1;
        }
        SubgroupForm { moduli: moduli.to_vec(), rows }
    }

    pub fn from_generators<'a, I>(moduli: &[u64], gens: I) -> Self
    where
        I: IntoIterator<Item = &'a [i64]>,
    {
        let mut f = SubgroupForm::zero(moduli);
        for g in gens {
            f.insert_raw(g);
        }
        f.normalize();
        f
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    /// Number of cyclic coordinates `s`.
    pub fn dim(&self) -> usize {
        self.moduli.len()
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> i64 {
        self.rows[i * self.moduli.len() + j]
    }

    pub fn hnf_row(&self, i: usize) -> &[i64] {
        let s = self.moduli.len();
        &self.rows[i * s..(i + 1) * s]
    }

    pub fn pivot(&self, j: usize) -> i64 {
        self.at(j, j)
    }

    fn insert_raw(&mut self, v: &[i64]) {
        let s = self.moduli.len();
        assert_eq!(v.len(), s, "vector length");
        let mut v: Vec<i64> = v.iter().zip(&self.moduli).map(|(&x, &m)| x.rem_euclid(m as i64)).collect();
        for j in 0..s {
            let vj = v[j];
            if vj == 0 {
                continue;
            }
            let p = self.at(j, j);
            let (g, a, b) = ext_gcd(p, vj);
            let (pg, vg) = ((p / g) as i128, (vj / g) as i128);
            for k in j..s {
                let m = self.moduli[k] as i64;
                let r = self.rows[j * s + k] as i128;
                let x = v[k] as i128;
                let nr = reduce(a as i128 * r + b as i128 * x, m);
                let nv = reduce(pg * x - vg * r, m);
                self.rows[j * s + k] = nr;
                v[k] = nv;
            }
            self.rows[j * s + j] = g;
        }
    }

    fn normalize(&mut self) {
        let s = self.moduli.len();
        for j in 0..s {
            let p = self.rows[j * s + j];
            for i in 0..j {
                let x = self.rows[i * s + j];
                let q = x.div_euclid(p);
                if q != 0 {
                    for k in j..s {
                        let m = self.moduli[k] as i64;
                        let y = self.rows[i * s + k] as i128 - q as i128 * self.rows[j * s + k] as i128;
                        self.rows[i * s + k] = reduce(y, m);
                    }
                }
            }
        }
    }

    pub fn insert(&mut self, v: &[i64]) {
        self.insert_raw(v);
        self.normalize();
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        let s = self.moduli.len();
        assert_eq!(v.len(), s, "vector length");
        let mut v: Vec<i64> = v.iter().zip(&self.moduli).map(|(&x, &m)| x.rem_euclid(m as i64)).collect();
        for j in 0..s {
            let p = self.at(j, j);
            if v[j] % p != 0 {
                return false;
            }
            let q = v[j] / p;
            if q != 0 {
                for k in j..s {
                    let m = self.moduli[k] as i64;
                    v[k] = reduce(v[k] as i128 - q as i128 * self.at(j, k) as i128, m);
                }
            }
        }
        true
    }

    pub fn order(&self) -> u64 {
        (0..self.moduli.len()).map(|j| self.moduli[j] / self.at(j, j) as u64).product()
    }

    pub fn is_zero(&self) -> bool {
        (0..self.moduli.len()).all(|j| self.at(j, j) as u64 == self.moduli[j])
    }

    pub fn is_full(&self) -> bool {
        (0..self.moduli.len()).all(|j| self.at(j, j) == 1)
    }

    /// Nonzero HNF rows reduced modulo the moduli; they generate the subgroup.
    pub fn generators(&self) -> Vec<Vec<i64>> {
        let s = self.moduli.len();
        (0..s)
            .map(|i| (0..s).map(|k| self.at(i, k).rem_euclid(self.moduli[k] as i64)).collect::<Vec<_>>())
            .filter(|r| r.iter().any(|&x| x != 0))
            .collect()
    }

    pub fn is_subgroup_of(&self, other: &SubgroupForm) -> bool {
        debug_assert_eq!(self.moduli, other.moduli);
        self.generators().iter().all(|g| other.contains(g))
    }

    pub fn sum(&self, other: &SubgroupForm) -> SubgroupForm {
        debug_assert_eq!(self.moduli, other.moduli);
        let mut f = self.clone();
        for g in other.generators() {
            f.insert_raw(&g);
        }
        f.normalize();
        f
    }

    pub fn intersection(&self, other: &SubgroupForm) -> SubgroupForm {
        debug_assert_eq!(self.moduli, other.moduli);
        let s = self.moduli.len();
        let mut doubled = self.moduli.clone();
        doubled.extend_from_slice(&self.moduli);
        let mut big = SubgroupForm::zero(&doubled);
        for g in self.generators() {
            let mut r = g.clone();
            r.extend_from_slice(&g);
            big.insert_raw(&r);
        }
        for g in other.generators() {
            let mut r = g;
            r.extend(std::iter::repeat(0).take(s));
            big.insert_raw(&r);
        }
        big.normalize();
        let mut rows = Vec::with_capacity(s * s);
        for i in s..2 * s {
            rows.extend_from_slice(&big.hnf_row(i)[s..]);
        }
        SubgroupForm { moduli: self.moduli.clone(), rows }
    }

    /// All elements, in mixed-radix order of the HNF coefficients.
    pub fn elements(&self) -> Vec<Vec<i64>> {
        let s = self.moduli.len();
        let ranges: Vec<i64> = (0..s).map(|j| self.moduli[j] as i64 / self.at(j, j)).collect();
        let mut out = Vec::with_capacity(self.order() as usize);
        let mut c = vec![0i64; s];
        loop {
            let mut v = vec![0i128; s];
            for (i, &ci) in c.iter().enumerate() {
                if ci != 0 {
                    for k in i..s {
                        v[k] += ci as i128 * self.at(i, k) as i128;
                    }
                }
            }
            out.push(v.iter().zip(&self.moduli).map(|(&x, &m)| reduce(x, m as i64)).collect());
            let mut idx = 0;
            loop {
                if idx == s {
                    return out;
                }
                c[idx] += 1;
                if c[idx] < ranges[idx] {
                    break;
                }
                c[idx] = 0;
                idx += 1;
            }
        }
    }

    pub fn basis_matrix(&self) -> IntMatrix {
        let s = self.moduli.len();
        let rows: Vec<Vec<i64>> = (0..s).map(|i| self.hnf_row(i).to_vec()).collect();
        IntMatrix::from_i64_rows(s, s, &rows)
    }

    /// Invariant-factor decomposition of the subgroup.
    pub fn invariant_basis(&self) -> InvariantBasis {
        let s = self.moduli.len();
        let n = lcm_all(self.moduli.iter().copied()).expect("moduli were validated");
        // embed Z/d_j into Z/N by multiplication with N/d_j
        let scale: Vec<i64> = self.moduli.iter().map(|&d| n / d as i64).collect();
        let mut scaled = Matrix::zeros(s, s);
        for i in 0..s {
            for j in 0..s {
                scaled.set(i, j, mul_mod(self.at(i, j), scale[j], n));
            }
        }
        let diag = diagonalize_mod(&scaled, n);
        let mut invariants = Vec::new();
        let mut generators = Vec::new();
        let mut keep = Vec::new();
        for k in 0..diag.diag.len() {
            let g = diag.diag[k];
            if g == n {
                continue;
            }
            keep.push(k);
            invariants.push((n / g) as u64);
            let gen: Vec<i64> = (0..s).map(|j| mul_mod(diag.v_inv.get(k, j), g, n) / scale[j]).collect();
            generators.push(gen);
        }
        InvariantBasis { moduli: self.moduli.clone(), n, scale, invariants, generators, keep, v: diag.v, diag: diag.diag }
    }

    /// Presentation of the quotient group by this subgroup.
    pub fn quotient_map(&self) -> QuotientMap {
        let s = self.moduli.len();
        let n = lcm_all(self.moduli.iter().copied()).expect("moduli were validated");
        let mut h = Matrix::zeros(s, s);
        for i in 0..s {
            for j in 0..s {
                h.set(i, j, self.at(i, j).rem_euclid(n));
            }
        }
        let diag = diagonalize_mod(&h, n);
        // coordinates: x -> (x V)_k mod g_k, ascending invariants
        let mut invariants = Vec::new();
        let mut cols = Vec::new();
        let mut lifts = Vec::new();
        for k in (0..diag.diag.len()).rev() {
            let g = diag.diag[k];
            if g == 1 {
                continue;
            }
            invariants.push(g as u64);
            cols.push(k);
            lifts.push((0..s).map(|j| diag.v_inv.get(k, j).rem_euclid(self.moduli[j] as i64)).collect());
        }
        let mut proj = Matrix::zeros(s, cols.len());
        for (c, &k) in cols.iter().enumerate() {
            let g = invariants[c] as i64;
            for j in 0..s {
                proj.set(j, c, diag.v.get(j, k).rem_euclid(g));
            }
        }
        QuotientMap { moduli: self.moduli.clone(), invariants, proj, lifts }
    }
}

/// A subgroup written as `Z/o_1 x ... x Z/o_r` with `o_1 | o_2 | ... | o_r`.
#[derive(Clone, Debug)]
pub struct InvariantBasis {
    moduli: Vec<u64>,
    n: i64,
    scale: Vec<i64>,
    invariants: Vec<u64>,
    generators: Vec<Vec<i64>>,
    keep: Vec<usize>,
    v: Matrix,
    diag: Vec<i64>,
}

impl InvariantBasis {
    pub fn invariants(&self) -> &[u64] {
        &self.invariants
    }

    /// Generators as vectors of the ambient group, aligned with [`Self::invariants`].
    pub fn generators(&self) -> &[Vec<i64>] {
        &self.generators
    }

    /// Coefficients of `v` in the generators, each reduced modulo its order.
    /// `v` must lie in the subgroup.
    pub fn coordinates(&self, v: &[i64]) -> Vec<i64> {
        let s = self.moduli.len();
        let n = self.n;
        let scaled: Vec<i64> = (0..s).map(|j| mul_mod(v[j], self.scale[j], n)).collect();
        self.keep
            .iter()
            .zip(&self.invariants)
            .map(|(&k, &o)| {
                let acc: i128 = (0..s).map(|j| scaled[j] as i128 * self.v.get(j, k) as i128).sum();
                let w = reduce(acc, n);
                let g = self.diag[k];
                debug_assert_eq!(w % g, 0, "vector outside the subgroup");
                (w / g).rem_euclid(o as i64)
            })
            .collect()
    }

    /// `sum c_k gen_k` reduced in the ambient group.
    pub fn combine(&self, coeffs: &[i64]) -> Vec<i64> {
        let s = self.moduli.len();
        let mut v = vec![0i128; s];
        for (c, g) in coeffs.iter().zip(&self.generators) {
            for j in 0..s {
                v[j] += *c as i128 * g[j] as i128;
            }
        }
        v.iter().zip(&self.moduli).map(|(&x, &m)| reduce(x, m as i64)).collect()
    }
}

/// The projection `Z/d_1 x ... x Z/d_s -> (Z/d)/K` onto an invariant-factor presentation.
#[derive(Clone, Debug)]
pub struct QuotientMap {
    moduli: Vec<u64>,
    invariants: Vec<u64>,
    proj: Matrix,
    lifts: Vec<Vec<i64>>,
}

impl QuotientMap {
    pub fn invariants(&self) -> &[u64] {
        &self.invariants
    }

    pub fn project(&self, v: &[i64]) -> Vec<i64> {
        let s = self.moduli.len();
        (0..self.invariants.len())
            .map(|c| {
                let acc: i128 = (0..s).map(|j| v[j] as i128 * self.proj.get(j, c) as i128).sum();
                reduce(acc, self.invariants[c] as i64)
            })
            .collect()
    }

    /// Lifts of the quotient generators to the ambient group.
    pub fn lifts(&self) -> &[Vec<i64>] {
        &self.lifts
    }

    pub fn lift(&self, coords: &[i64]) -> Vec<i64> {
        let s = self.moduli.len();
        let mut v = vec![0i128; s];
        for (c, l) in coords.iter().zip(&self.lifts) {
            for j in 0..s {
                v[j] += *c as i128 * l[j] as i128;
            }
        }
        v.iter().zip(&self.moduli).map(|(&x, &m)| reduce(x, m as i64)).collect()
    }
}

/// Canonical basis of the subgroup of `prod Z/moduli[j]` generated by the rows.
///
/// The rows are the Hermite form of the generators stacked on `diag(moduli)`,
/// reduced modulo the moduli, with the rows that vanish dropped. Equal
/// subgroups give identical matrices and the zero subgroup gives an empty one.
pub fn hnf_canonical(generators: &IntMatrix, moduli: &[u64]) -> Result<IntMatrix, IntlatError> {
    if generators.cols != moduli.len() {
        return Err(IntlatError::DimensionMismatch(format!(
            "{} columns against {} moduli",
            generators.cols,
            moduli.len()
        )));
    }
    for &m in moduli {
        check_modulus(m)?;
    }
    let rows: Vec<Vec<i64>> = (0..generators.rows)
        .map(|i| {
            generators
                .row(i)
                .iter()
                .zip(moduli)
                .map(|(x, &m)| x.mod_floor(&BigInt::from(m)).to_i64().expect("reduced"))
                .collect()
        })
        .collect();
    let form = SubgroupForm::from_generators(moduli, rows.iter().map(|r| r.as_slice()));
    let gens = form.generators();
    Ok(IntMatrix::from_i64_rows(gens.len(), moduli.len(), &gens))
}

/// Solution set of a congruence system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CongruenceSolutionSet {
    /// Always `None` for homogeneous systems.
    pub particular: Option<Vec<BigInt>>,
    /// Canonical generators (nonzero Hermite rows) of the solution group.
    pub lattice_basis: IntMatrix,
    pub moduli: Vec<u64>,
}

impl CongruenceSolutionSet {
    pub fn form(&self) -> SubgroupForm {
        let rows = self.lattice_basis.to_i64_rows().expect("reduced entries");
        SubgroupForm::from_generators(&self.moduli, rows.iter().map(|r| r.as_slice()))
    }

    pub fn order(&self) -> u64 {
        self.form().order()
    }
}

/// `{x in prod Z/col_moduli[j] : A x = 0 mod row_moduli[i] for every row i}`.
///
/// Each coefficient must satisfy `A[i][j] * col_moduli[j] = 0 mod row_moduli[i]`,
/// otherwise the system does not descend to the finite group and
/// [`IntlatError::IllDefined`] is returned.
pub fn solve_homogeneous_congruences(
    a: &IntMatrix,
    row_moduli: &[u64],
    col_moduli: &[u64],
) -> Result<CongruenceSolutionSet, IntlatError> {
    if a.rows != row_moduli.len() || a.cols != col_moduli.len() {
        return Err(IntlatError::DimensionMismatch(format!(
            "{}x{} system against {} row and {} column moduli",
            a.rows,
            a.cols,
            row_moduli.len(),
            col_moduli.len()
        )));
    }
    for &m in row_moduli {
        check_modulus(m)?;
    }
    let mut w = Matrix::zeros(a.rows, a.cols);
    for i in 0..a.rows {
        let m = BigInt::from(row_moduli[i]);
        for j in 0..a.cols {
            w.set(i, j, a.get(i, j).mod_floor(&m).to_i64().expect("reduced"));
        }
    }
    let form = solve_congruences(&w, row_moduli, col_moduli)?;
    let gens = form.generators();
    Ok(CongruenceSolutionSet {
        particular: None,
        lattice_basis: IntMatrix::from_i64_rows(gens.len(), col_moduli.len(), &gens),
        moduli: col_moduli.to_vec(),
    })
}

/// Word-sized core of [`solve_homogeneous_congruences`].
pub fn solve_congruences(a: &Matrix, row_moduli: &[u64], col_moduli: &[u64]) -> Result<SubgroupForm, IntlatError> {
    if a.rows != row_moduli.len() || a.cols != col_moduli.len() {
        return Err(IntlatError::DimensionMismatch(format!(
            "{}x{} system against {} row and {} column moduli",
            a.rows,
            a.cols,
            row_moduli.len(),
            col_moduli.len()
        )));
    }
    let n = lcm_all(row_moduli.iter().chain(col_moduli).copied())?;
    let cols = a.cols;
    let mut rows_form = SubgroupForm::zero(&vec![n as u64; cols]);
    for i in 0..a.rows {
        let r = row_moduli[i] as i64;
        let scale = n / r;
        let mut row = Vec::with_capacity(cols);
        for j in 0..cols {
            let x = a.get(i, j).rem_euclid(r);
            if mul_mod(x, col_moduli[j] as i64, r) != 0 {
                return Err(IntlatError::IllDefined { row: i, col: j });
            }
            row.push(x * scale);
        }
        if row.iter().any(|&x| x != 0) {
            rows_form.insert_raw(&row);
        }
    }
    rows_form.normalize();
    let mut h = Matrix::zeros(cols, cols);
    for i in 0..cols {
        for j in 0..cols {
            h.set(i, j, rows_form.at(i, j).rem_euclid(n));
        }
    }
    let kernel = kernel_mod(&h, n);
    let mut out = SubgroupForm::zero(col_moduli);
    for g in &kernel {
        out.insert_raw(g);
    }
    out.normalize();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_subgroup(moduli: &[u64], gens: &[Vec<i64>]) -> std::collections::BTreeSet<Vec<i64>> {
        let mut set = std::collections::BTreeSet::new();
        set.insert(vec![0; moduli.len()]);
        loop {
            let mut next = set.clone();
            for x in &set {
                for g in gens {
                    let y: Vec<i64> = x.iter().zip(g).zip(moduli).map(|((a, b), &m)| (a + b).rem_euclid(m as i64)).collect();
                    next.insert(y);
                }
            }
            if next.len() == set.len() {
                return set;
            }
            set = next;
        }
    }

    #[test]
    fn snf_identity() {
        let a = IntMatrix::identity(2);
        let s = snf(&a);
        assert_eq!(s.d, IntMatrix::identity(2));
        assert_eq!(s.u, IntMatrix::identity(2));
        assert_eq!(s.v, IntMatrix::identity(2));
    }

    #[test]
    fn snf_two_by_two() {
        let a = IntMatrix::from_i64_rows(2, 2, &[vec![2, 4], vec![6, 8]]);
        let s = snf(&a);
        assert_eq!(s.d.diagonal(), vec![BigInt::from(2), BigInt::from(4)]);
        assert_eq!(s.u.mul(&a).mul(&s.v), s.d);
    }

    #[test]
    fn snf_zero_row() {
        let a = IntMatrix::zeros(1, 3);
        let s = snf(&a);
        assert_eq!(s.d, IntMatrix::zeros(1, 3));
        assert_eq!(s.u.mul(&a).mul(&s.v), s.d);
    }

    #[test]
    fn snf_empty() {
        let a = IntMatrix::zeros(0, 2);
        let s = snf(&a);
        assert_eq!(s.v, IntMatrix::identity(2));
    }

    #[test]
    fn snf_inverse_is_tracked() {
        let a = IntMatrix::from_i64_rows(3, 3, &[vec![3, 5, 7], vec![2, 8, 4], vec![6, 1, 9]]);
        let (d, u, v, v_inv) = snf_with_inverse(&a);
        assert_eq!(u.mul(&a).mul(&v), d);
        assert_eq!(v.mul(&v_inv), IntMatrix::identity(3));
    }

    #[test]
    fn congruence_two_x() {
        let a = IntMatrix::from_i64_rows(1, 1, &[vec![2]]);
        let sol = solve_homogeneous_congruences(&a, &[4], &[4]).unwrap();
        assert_eq!(sol.lattice_basis, IntMatrix::from_i64_rows(1, 1, &[vec![2]]));
        assert_eq!(sol.order(), 2);
    }

    #[test]
    fn congruence_empty_system() {
        let a = IntMatrix::zeros(0, 1);
        let sol = solve_homogeneous_congruences(&a, &[], &[6]).unwrap();
        assert_eq!(sol.lattice_basis, IntMatrix::from_i64_rows(1, 1, &[vec![1]]));
    }

    #[test]
    fn congruence_dimension_mismatch() {
        let a = IntMatrix::zeros(2, 1);
        assert!(matches!(
            solve_homogeneous_congruences(&a, &[4], &[4]),
            Err(IntlatError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn congruence_ill_defined() {
        // x in Z/3 with x = 0 mod 2 does not descend
        let a = IntMatrix::from_i64_rows(1, 1, &[vec![1]]);
        assert!(matches!(solve_homogeneous_congruences(&a, &[2], &[3]), Err(IntlatError::IllDefined { .. })));
    }

    #[test]
    fn hnf_examples() {
        let g = IntMatrix::from_i64_rows(1, 1, &[vec![2]]);
        assert_eq!(hnf_canonical(&g, &[4]).unwrap(), IntMatrix::from_i64_rows(1, 1, &[vec![2]]));
        let g = IntMatrix::from_i64_rows(2, 1, &[vec![2], vec![3]]);
        assert_eq!(hnf_canonical(&g, &[6]).unwrap(), IntMatrix::from_i64_rows(1, 1, &[vec![1]]));
        let g = IntMatrix::zeros(0, 1);
        let zero = hnf_canonical(&g, &[6]).unwrap();
        assert!(SubgroupForm::from_generators(&[6], std::iter::empty()).is_zero());
        assert_eq!(zero, IntMatrix::zeros(0, 1));
    }

    #[test]
    fn intersection_of_lines() {
        let m = [2u64, 4];
        let a = SubgroupForm::from_generators(&m, [&[1i64, 1][..]]);
        let b = SubgroupForm::from_generators(&m, [&[0i64, 1][..]]);
        let c = a.intersection(&b);
        assert_eq!(c.order(), 2);
        assert!(c.contains(&[0, 2]));
    }

    #[test]
    fn quotient_and_invariants() {
        let m = [2u64, 4];
        let k = SubgroupForm::from_generators(&m, [&[1i64, 2][..]]);
        let q = k.quotient_map();
        assert_eq!(q.invariants(), &[4]);
        let ib = SubgroupForm::full(&m).invariant_basis();
        assert_eq!(ib.invariants(), &[2, 4]);
        let ib = SubgroupForm::full(&[2, 6]).invariant_basis();
        assert_eq!(ib.invariants(), &[2, 6]);
    }

    #[test]
    fn invariants_of_coprime_parts() {
        // Z/6 x Z/6 restricted to 3Z/6 x 2Z/6 is Z/2 x Z/3 = Z/6
        let f = SubgroupForm::from_generators(&[6, 6], [&[3i64, 0][..], &[0i64, 2][..]]);
        let ib = f.invariant_basis();
        assert_eq!(ib.invariants(), &[6]);
        let g = &ib.generators()[0];
        assert!(f.contains(g));
        assert_eq!(ib.coordinates(g), vec![1]);
    }

    #[test]
    fn elements_match_brute_force() {
        let m = [2u64, 4, 8];
        let gens = vec![vec![1, 2, 4], vec![0, 1, 6]];
        let f = SubgroupForm::from_generators(&m, gens.iter().map(|g| g.as_slice()));
        let brute = brute_subgroup(&m, &gens);
        let mine: std::collections::BTreeSet<_> = f.elements().into_iter().collect();
        assert_eq!(mine, brute);
        assert_eq!(f.order() as usize, brute.len());
    }
}

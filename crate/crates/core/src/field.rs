//! Exact linear algebra over prime fields.
//!
//! Matrices store reduced residues as `u32` in row-major order. All routines
//! are deterministic: pivots are the first nonzero entry in column order and
//! free variables are set to zero.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("modulus {0} is not prime")]
    NotPrime(u32),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("moduli differ ({0} vs {1})")]
    ModulusMismatch(u32, u32),
    #[error("inner span is not contained in the outer span")]
    NotASubspace,
    #[error("matrix is singular")]
    Singular,
}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut i = 2u32;
    while (i as u64) * (i as u64) <= p as u64 {
        if p % i == 0 {
            return false;
        }
        i += 1;
    }
    true
}

/// A prime field `F_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fp {
    p: u32,
}

impl Fp {
    pub fn new(p: u32) -> Result<Self, FieldError> {
        if is_prime(p) {
            Ok(Fp { p })
        } else {
            Err(FieldError::NotPrime(p))
        }
    }

    #[inline]
    pub fn modulus(self) -> u32 {
        self.p
    }

    #[inline]
    pub fn reduce(self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.p as u64) as u32
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.p as u64 - b as u64) % self.p as u64) as u32
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1 % self.p;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn inv(self, a: u32) -> Result<u32, FieldError> {
        let a = a % self.p;
        if a == 0 {
            return Err(FieldError::ZeroInverse);
        }
        Ok(self.pow(a, self.p as u64 - 2))
    }

    pub fn element(self, v: i64) -> FpElement {
        FpElement {
            value: self.reduce(v),
            field: self,
        }
    }
}

/// A single field element carrying its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FpElement {
    value: u32,
    field: Fp,
}

impl FpElement {
    pub fn value(self) -> u32 {
        self.value
    }

    pub fn field(self) -> Fp {
        self.field
    }

    pub fn inverse(self) -> Result<FpElement, FieldError> {
        Ok(FpElement {
            value: self.field.inv(self.value)?,
            field: self.field,
        })
    }
}

impl std::ops::Add for FpElement {
    type Output = FpElement;
    fn add(self, rhs: FpElement) -> FpElement {
        debug_assert_eq!(self.field, rhs.field);
        FpElement {
            value: self.field.add(self.value, rhs.value),
            field: self.field,
        }
    }
}

impl std::ops::Mul for FpElement {
    type Output = FpElement;
    fn mul(self, rhs: FpElement) -> FpElement {
        debug_assert_eq!(self.field, rhs.field);
        FpElement {
            value: self.field.mul(self.value, rhs.value),
            field: self.field,
        }
    }
}

/// Multiplicative inverse of a nonzero element.
pub fn field_inverse(a: FpElement) -> Result<FpElement, FieldError> {
    a.inverse()
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FpMatrix {
    field: Fp,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "FpMatrix[{}x{} mod {}]",
            self.rows, self.cols, self.field.p
        )?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

/// Result of row reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub reduced: FpMatrix,
    pub pivot_columns: Vec<usize>,
    pub rank: usize,
}

impl FpMatrix {
    pub fn zeros(field: Fp, rows: usize, cols: usize) -> Self {
        FpMatrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: Fp, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from signed integer rows, reducing every entry.
    pub fn from_rows(field: Fp, rows: &[Vec<i64>]) -> Result<Self, FieldError> {
        let c = rows.first().map_or(0, |row| row.len());
        Self::from_rows_with_cols(field, rows, c)
    }

    /// Like [`FpMatrix::from_rows`] but with an explicit column count, so that
    /// `m x 0` matrices can be expressed.
    pub fn from_rows_with_cols(
        field: Fp,
        rows: &[Vec<i64>],
        cols: usize,
    ) -> Result<Self, FieldError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(FieldError::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            data.extend(row.iter().map(|&v| field.reduce(v)));
        }
        Ok(FpMatrix {
            field,
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_columns(field: Fp, rows: usize, columns: &[Vec<u32>]) -> Self {
        let mut m = Self::zeros(field, rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (i, &v) in col.iter().enumerate() {
                m.set(i, j, v % field.p);
            }
        }
        m
    }

    pub fn column_vector(field: Fp, v: &[u32]) -> Self {
        Self::from_columns(field, v.len(), &[v.to_vec()])
    }

    #[inline]
    pub fn field(&self) -> Fp {
        self.field
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
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v % self.field.p;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<u32>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> FpMatrix {
        let mut t = FpMatrix::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    fn check_same_field(&self, other: &FpMatrix) -> Result<(), FieldError> {
        if self.field != other.field {
            Err(FieldError::ModulusMismatch(self.field.p, other.field.p))
        } else {
            Ok(())
        }
    }

    pub fn mul(&self, other: &FpMatrix) -> Result<FpMatrix, FieldError> {
        self.check_same_field(other)?;
        if self.cols != other.rows {
            return Err(FieldError::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let p = self.field.p as u64;
        let mut out = FpMatrix::zeros(self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k) as u64;
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * out.cols + j;
                    out.data[idx] =
                        ((out.data[idx] as u64 + a * other.get(k, j) as u64) % p) as u32;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[u32]) -> Result<Vec<u32>, FieldError> {
        if v.len() != self.cols {
            return Err(FieldError::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        let p = self.field.p as u64;
        Ok((0..self.rows)
            .map(|r| {
                let s = self
                    .row(r)
                    .iter()
                    .zip(v)
                    .fold(0u64, |acc, (&a, &b)| (acc + a as u64 * b as u64) % p);
                s as u32
            })
            .collect())
    }

    pub fn add(&self, other: &FpMatrix) -> Result<FpMatrix, FieldError> {
        self.check_same_field(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(FieldError::DimensionMismatch("add".into()));
        }
        let mut out = self.clone();
        for (o, &b) in out.data.iter_mut().zip(&other.data) {
            *o = self.field.add(*o, b);
        }
        Ok(out)
    }

    /// Horizontal concatenation `[self, other]`.
    pub fn hcat(&self, other: &FpMatrix) -> Result<FpMatrix, FieldError> {
        self.check_same_field(other)?;
        if self.rows != other.rows {
            return Err(FieldError::DimensionMismatch(format!(
                "hcat of {} and {} rows",
                self.rows, other.rows
            )));
        }
        let mut out = FpMatrix::zeros(self.field, self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c));
            }
            for c in 0..other.cols {
                out.set(r, self.cols + c, other.get(r, c));
            }
        }
        Ok(out)
    }

    pub fn hcat_all(field: Fp, rows: usize, blocks: &[&FpMatrix]) -> Result<FpMatrix, FieldError> {
        let mut out = FpMatrix::zeros(field, rows, 0);
        for b in blocks {
            out = out.hcat(b)?;
        }
        Ok(out)
    }

    pub fn select_columns(&self, idx: &[usize]) -> FpMatrix {
        let cols: Vec<Vec<u32>> = idx.iter().map(|&c| self.column(c)).collect();
        FpMatrix::from_columns(self.field, self.rows, &cols)
    }

    pub fn column_range(&self, start: usize, len: usize) -> FpMatrix {
        let idx: Vec<usize> = (start..start + len).collect();
        self.select_columns(&idx)
    }

    pub fn rref(&self) -> Rref {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(pr) = (row..m.rows).find(|&r| m.get(r, col) != 0) else {
                continue;
            };
            if pr != row {
                for c in 0..m.cols {
                    m.data.swap(pr * m.cols + c, row * m.cols + c);
                }
            }
            let inv = f.inv(m.get(row, col)).expect("pivot is nonzero");
            for c in col..m.cols {
                let v = f.mul(m.get(row, c), inv);
                m.set(row, c, v);
            }
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let factor = m.get(r, col);
                if factor == 0 {
                    continue;
                }
                for c in col..m.cols {
                    let v = f.sub(m.get(r, c), f.mul(factor, m.get(row, c)));
                    m.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        let rank = pivots.len();
        Rref {
            reduced: m,
            pivot_columns: pivots,
            rank,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    pub fn has_full_column_rank(&self) -> bool {
        self.rank() == self.cols
    }

    /// Basis of the right null space, one column per free variable.
    pub fn null_space(&self) -> FpMatrix {
        let f = self.field;
        let Rref {
            reduced,
            pivot_columns,
            ..
        } = self.rref();
        let free: Vec<usize> = (0..self.cols)
            .filter(|c| !pivot_columns.contains(c))
            .collect();
        let mut basis = Vec::with_capacity(free.len());
        for &fc in &free {
            let mut v = vec![0u32; self.cols];
            v[fc] = 1;
            for (i, &pc) in pivot_columns.iter().enumerate() {
                v[pc] = f.neg(reduced.get(i, fc));
            }
            basis.push(v);
        }
        FpMatrix::from_columns(f, self.cols, &basis)
    }

    pub fn inverse(&self) -> Result<FpMatrix, FieldError> {
        if self.rows != self.cols {
            return Err(FieldError::DimensionMismatch(
                "inverse of non-square matrix".into(),
            ));
        }
        let n = self.rows;
        let aug = self.hcat(&FpMatrix::identity(self.field, n))?;
        let r = aug.rref();
        if r.pivot_columns.iter().take(n).any(|&c| c >= n) || r.pivot_columns.len() < n {
            return Err(FieldError::Singular);
        }
        Ok(r.reduced.column_range(n, n))
    }

    /// Canonical basis of the column space: the rref of the transpose, read
    /// back as columns.
    pub fn column_basis(&self) -> FpMatrix {
        let r = self.transpose().rref();
        let cols: Vec<Vec<u32>> = (0..r.rank).map(|i| r.reduced.row(i).to_vec()).collect();
        FpMatrix::from_columns(self.field, self.rows, &cols)
    }

    /// Columns of `self` at its pivot positions (an independent subset
    /// spanning the same space).
    pub fn independent_columns(&self) -> FpMatrix {
        let r = self.rref();
        self.select_columns(&r.pivot_columns)
    }
}

/// Solve `A x = b` for a single right-hand column. Free variables are zero.
pub fn solve_linear(a: &FpMatrix, b: &[u32]) -> Result<Option<Vec<u32>>, FieldError> {
    if a.rows() != b.len() {
        return Err(FieldError::DimensionMismatch(format!(
            "A has {} rows but b has {} entries",
            a.rows(),
            b.len()
        )));
    }
    let f = a.field();
    let aug = a.hcat(&FpMatrix::column_vector(f, b))?;
    let r = aug.rref();
    if r.pivot_columns.last() == Some(&a.cols()) {
        return Ok(None);
    }
    let mut x = vec![0u32; a.cols()];
    for (i, &pc) in r.pivot_columns.iter().enumerate() {
        x[pc] = r.reduced.get(i, a.cols());
    }
    Ok(Some(x))
}

/// Solve `A X = B` column by column.
pub fn solve_matrix(a: &FpMatrix, b: &FpMatrix) -> Result<Option<FpMatrix>, FieldError> {
    let mut cols = Vec::with_capacity(b.cols());
    for c in 0..b.cols() {
        match solve_linear(a, &b.column(c))? {
            Some(x) => cols.push(x),
            None => return Ok(None),
        }
    }
    Ok(Some(FpMatrix::from_columns(a.field(), a.cols(), &cols)))
}

/// Basis of `colspace(A) ∩ colspace(B)`, in canonical (reduced) form.
pub fn column_space_intersection(a: &FpMatrix, b: &FpMatrix) -> Result<FpMatrix, FieldError> {
    a.check_same_field(b)?;
    if a.rows() != b.rows() {
        return Err(FieldError::DimensionMismatch(format!(
            "intersection of spaces in F^{} and F^{}",
            a.rows(),
            b.rows()
        )));
    }
    let f = a.field();
    let ab = a.independent_columns();
    let bb = b.independent_columns();
    // [ab, -bb] (x; y) = 0  <=>  ab x = bb y
    let mut neg_b = bb.clone();
    for r in 0..neg_b.rows() {
        for c in 0..neg_b.cols() {
            let v = f.neg(neg_b.get(r, c));
            neg_b.set(r, c, v);
        }
    }
    let kernel = ab.hcat(&neg_b)?.null_space();
    let mut vecs = Vec::with_capacity(kernel.cols());
    for c in 0..kernel.cols() {
        let k = kernel.column(c);
        vecs.push(ab.mul_vec(&k[..ab.cols()])?);
    }
    let span = FpMatrix::from_columns(f, a.rows(), &vecs);
    Ok(span.column_basis())
}

/// Columns extending `inner` to a basis of `colspace(outer)`, chosen greedily
/// from the columns of `outer` in order.
pub fn basis_extension(inner: &FpMatrix, outer: &FpMatrix) -> Result<FpMatrix, FieldError> {
    inner.check_same_field(outer)?;
    if inner.rows() != outer.rows() {
        return Err(FieldError::DimensionMismatch(
            "basis extension row counts".into(),
        ));
    }
    let joint = inner.hcat(outer)?;
    if joint.rank() != outer.rank() {
        return Err(FieldError::NotASubspace);
    }
    let inner_rank = inner.rank();
    let r = joint.rref();
    let picked: Vec<usize> = r
        .pivot_columns
        .iter()
        .filter(|&&c| c >= inner.cols())
        .map(|&c| c - inner.cols())
        .collect();
    debug_assert_eq!(picked.len(), outer.rank() - inner_rank);
    Ok(outer.select_columns(&picked))
}

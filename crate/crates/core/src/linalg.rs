//! Matrices over GF(q).
//!
//! Binary matrices with at most 64 columns store each row in one `u64`,
//! MSB-aligned (column `j` is bit `63 - j`), so comparing packed rows as
//! integers is the same as comparing them lexicographically. Everything else
//! uses a dense row-major `Vec<u32>` of field indices.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use rand::Rng;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::gf::Field;

pub(crate) type Rows = SmallVec<[u64; 8]>;

#[derive(Clone, PartialEq, Eq, Hash)]
enum Storage {
    Bits(Rows),
    Dense(Vec<u32>),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Storage,
}

/// Indicator of the pivot columns of an RREF matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PivotVector {
    bits: Vec<bool>,
}

impl PivotVector {
    pub fn from_columns(len: usize, cols: &[usize]) -> Self {
        let mut bits = vec![false; len];
        for &c in cols {
            bits[c] = true;
        }
        PivotVector { bits }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn weight(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn columns(&self) -> Vec<usize> {
        (0..self.bits.len()).filter(|&i| self.bits[i]).collect()
    }

    pub fn hamming(&self, other: &PivotVector) -> usize {
        self.bits
            .iter()
            .zip(&other.bits)
            .filter(|(a, b)| a != b)
            .count()
    }
}

impl fmt::Display for PivotVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            write!(f, "{}", b as u8)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Rref {
    /// Reduced row echelon form with the zero rows removed.
    pub matrix: Matrix,
    pub pivots: PivotVector,
    pub rank: usize,
}

#[inline]
pub(crate) fn bit(col: usize) -> u64 {
    1u64 << (63 - col)
}

/// In-place RREF of packed binary rows. Returns the rank; the first `rank`
/// rows hold the reduced basis in pivot order.
pub(crate) fn rref_bits(rows: &mut [u64]) -> usize {
    let n = rows.len();
    let mut rank = 0;
    while rank < n {
        let (mut best, mut best_lz) = (rank, 64);
        for (i, &r) in rows.iter().enumerate().skip(rank) {
            let lz = r.leading_zeros();
            if lz < best_lz {
                best_lz = lz;
                best = i;
            }
        }
        if best_lz == 64 {
            break;
        }
        rows.swap(rank, best);
        let piv = rows[rank];
        let mask = 1u64 << (63 - best_lz);
        for (i, r) in rows.iter_mut().enumerate() {
            if i != rank && *r & mask != 0 {
                *r ^= piv;
            }
        }
        rank += 1;
    }
    rank
}

/// Rank of packed binary rows, destroying them.
#[inline]
pub(crate) fn rank_bits(rows: &mut [u64]) -> usize {
    let n = rows.len();
    let mut rank = 0;
    while rank < n {
        let (mut best, mut best_lz) = (rank, 64);
        for (i, &r) in rows.iter().enumerate().skip(rank) {
            let lz = r.leading_zeros();
            if lz < best_lz {
                best_lz = lz;
                best = i;
            }
        }
        if best_lz == 64 {
            break;
        }
        rows.swap(rank, best);
        let piv = rows[rank];
        let mask = 1u64 << (63 - best_lz);
        for r in rows[rank + 1..].iter_mut() {
            if *r & mask != 0 {
                *r ^= piv;
            }
        }
        rank += 1;
    }
    rank
}

/// In-place RREF of a dense row-major block. Returns the pivot columns.
pub(crate) fn rref_dense(f: Field, a: &mut [u32], rows: usize, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(i) = (r..rows).find(|&i| a[i * cols + c] != 0) else {
            continue;
        };
        if i != r {
            for j in 0..cols {
                a.swap(i * cols + j, r * cols + j);
            }
        }
        let lead = a[r * cols + c];
        if lead != 1 {
            let inv = f.inv(lead).expect("nonzero pivot");
            for j in c..cols {
                a[r * cols + j] = f.mul(a[r * cols + j], inv);
            }
        }
        for i in 0..rows {
            let factor = a[i * cols + c];
            if i == r || factor == 0 {
                continue;
            }
            let neg = f.neg(factor);
            for j in c..cols {
                let v = a[r * cols + j];
                if v != 0 {
                    a[i * cols + j] = f.add(a[i * cols + j], f.mul(neg, v));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Rank of a dense block, destroying it (forward elimination only).
pub(crate) fn rank_dense(f: Field, a: &mut [u32], rows: usize, cols: usize) -> usize {
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(i) = (r..rows).find(|&i| a[i * cols + c] != 0) else {
            continue;
        };
        if i != r {
            for j in c..cols {
                a.swap(i * cols + j, r * cols + j);
            }
        }
        let inv = f.inv(a[r * cols + c]).expect("nonzero pivot");
        for i in r + 1..rows {
            let factor = a[i * cols + c];
            if factor == 0 {
                continue;
            }
            let m = f.neg(f.mul(factor, inv));
            for j in c..cols {
                let v = a[r * cols + j];
                if v != 0 {
                    a[i * cols + j] = f.add(a[i * cols + j], f.mul(m, v));
                }
            }
        }
        r += 1;
    }
    r
}

thread_local! {
    static SCRATCH: RefCell<Vec<u32>> = const { RefCell::new(Vec::new()) };
}

/// Runs `body` on a worker-local buffer of at least `len` entries.
pub(crate) fn with_scratch<R>(len: usize, body: impl FnOnce(&mut [u32]) -> R) -> R {
    SCRATCH.with(|cell| {
        let mut buf = cell.borrow_mut();
        if buf.len() < len {
            buf.resize(len, 0);
        }
        body(&mut buf[..len])
    })
}

impl Matrix {
    fn packs(field: Field, cols: usize) -> bool {
        field.q() == 2 && cols <= 64
    }

    pub fn zeros(field: Field, rows: usize, cols: usize) -> Matrix {
        let data = if Self::packs(field, cols) {
            Storage::Bits(SmallVec::from_elem(0, rows))
        } else {
            Storage::Dense(vec![0; rows * cols])
        };
        Matrix {
            field,
            rows,
            cols,
            data,
        }
    }

    pub fn identity(field: Field, n: usize) -> Matrix {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(field: Field, rows: &[Vec<u32>]) -> Result<Matrix> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        if rows.iter().flatten().any(|&v| v >= field.q()) {
            return Err(Error::pre(format!("entry outside GF({})", field.q())));
        }
        let mut m = Self::zeros(field, rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    pub fn from_fn(
        field: Field,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> u32,
    ) -> Matrix {
        let mut m = Self::zeros(field, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Binary matrix from MSB-aligned packed rows.
    pub(crate) fn from_bits(field: Field, cols: usize, rows: &[u64]) -> Matrix {
        debug_assert!(Self::packs(field, cols));
        Matrix {
            field,
            rows: rows.len(),
            cols,
            data: Storage::Bits(SmallVec::from_slice(rows)),
        }
    }

    pub(crate) fn from_dense(field: Field, rows: usize, cols: usize, data: Vec<u32>) -> Matrix {
        debug_assert_eq!(data.len(), rows * cols);
        if Self::packs(field, cols) {
            return Self::from_fn(field, rows, cols, |i, j| data[i * cols + j]);
        }
        Matrix {
            field,
            rows,
            cols,
            data: Storage::Dense(data),
        }
    }

    pub fn random<R: Rng + ?Sized>(field: Field, rows: usize, cols: usize, rng: &mut R) -> Matrix {
        Self::from_fn(field, rows, cols, |_, _| rng.gen_range(0..field.q()))
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        match &self.data {
            Storage::Bits(r) => ((r[i] >> (63 - j)) & 1) as u32,
            Storage::Dense(d) => d[i * self.cols + j],
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        match &mut self.data {
            Storage::Bits(r) => {
                if v & 1 == 1 {
                    r[i] |= bit(j);
                } else {
                    r[i] &= !bit(j);
                }
            }
            Storage::Dense(d) => d[i * self.cols + j] = v,
        }
    }

    pub fn row(&self, i: usize) -> Vec<u32> {
        (0..self.cols).map(|j| self.get(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    /// Packed rows when the matrix is binary with at most 64 columns.
    pub fn packed(&self) -> Option<&[u64]> {
        match &self.data {
            Storage::Bits(r) => Some(r),
            Storage::Dense(_) => None,
        }
    }

    pub(crate) fn dense_data(&self) -> Vec<u32> {
        match &self.data {
            Storage::Dense(d) => d.clone(),
            Storage::Bits(_) => (0..self.rows).flat_map(|i| self.row(i)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.data {
            Storage::Bits(r) => r.iter().all(|&x| x == 0),
            Storage::Dense(d) => d.iter().all(|&x| x == 0),
        }
    }

    pub fn rref(&self) -> Rref {
        match &self.data {
            Storage::Bits(r) => {
                let mut rows: Rows = r.clone();
                let rank = rref_bits(&mut rows);
                rows.truncate(rank);
                let pivots: Vec<usize> = rows.iter().map(|x| x.leading_zeros() as usize).collect();
                Rref {
                    matrix: Matrix::from_bits(self.field, self.cols, &rows),
                    pivots: PivotVector::from_columns(self.cols, &pivots),
                    rank,
                }
            }
            Storage::Dense(d) => {
                let mut a = d.clone();
                let piv = rref_dense(self.field, &mut a, self.rows, self.cols);
                let rank = piv.len();
                a.truncate(rank * self.cols);
                Rref {
                    matrix: Matrix::from_dense(self.field, rank, self.cols, a),
                    pivots: PivotVector::from_columns(self.cols, &piv),
                    rank,
                }
            }
        }
    }

    pub fn rank(&self) -> usize {
        match &self.data {
            Storage::Bits(r) => {
                let mut rows: Rows = r.clone();
                rank_bits(&mut rows)
            }
            Storage::Dense(d) => with_scratch(d.len(), |buf| {
                buf.copy_from_slice(d);
                rank_dense(self.field, buf, self.rows, self.cols)
            }),
        }
    }

    fn check_field(&self, other: &Matrix) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    pub fn hstack(&self, other: &Matrix) -> Result<Matrix> {
        self.check_field(other)?;
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "hstack of {} and {} rows",
                self.rows, other.rows
            )));
        }
        let cols = self.cols + other.cols;
        if let (Storage::Bits(a), Storage::Bits(b)) = (&self.data, &other.data) {
            if cols <= 64 {
                let rows: Rows = a
                    .iter()
                    .zip(b)
                    .map(|(&x, &y)| x | y.checked_shr(self.cols as u32).unwrap_or(0))
                    .collect();
                return Ok(Matrix::from_bits(self.field, cols, &rows));
            }
        }
        Ok(Self::from_fn(self.field, self.rows, cols, |i, j| {
            if j < self.cols {
                self.get(i, j)
            } else {
                other.get(i, j - self.cols)
            }
        }))
    }

    pub fn vstack(&self, other: &Matrix) -> Result<Matrix> {
        self.check_field(other)?;
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "vstack of {} and {} columns",
                self.cols, other.cols
            )));
        }
        let data = match (&self.data, &other.data) {
            (Storage::Bits(a), Storage::Bits(b)) => {
                Storage::Bits(a.iter().chain(b).copied().collect())
            }
            (Storage::Dense(a), Storage::Dense(b)) => Storage::Dense([a.as_slice(), b].concat()),
            _ => unreachable!("storage follows (field, cols)"),
        };
        Ok(Matrix {
            field: self.field,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = self.field;
        if let (Storage::Bits(a), Storage::Bits(b)) = (&self.data, &other.data) {
            let rows: Rows = a
                .iter()
                .map(|&x| {
                    (0..self.cols)
                        .filter(|&k| x & bit(k) != 0)
                        .fold(0u64, |acc, k| acc ^ b[k])
                })
                .collect();
            return Ok(Matrix::from_bits(f, other.cols, &rows));
        }
        let mut out = Self::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = f.add(out.get(i, j), f.mul(a, other.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Matrix {
        Self::from_fn(self.field, self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.check_field(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch("matrix sum".into()));
        }
        if let (Storage::Bits(a), Storage::Bits(b)) = (&self.data, &other.data) {
            let rows: Rows = a.iter().zip(b).map(|(x, y)| x ^ y).collect();
            return Ok(Matrix::from_bits(self.field, self.cols, &rows));
        }
        let f = self.field;
        Ok(Self::from_fn(f, self.rows, self.cols, |i, j| {
            f.add(self.get(i, j), other.get(i, j))
        }))
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Matrix {
        if self.field.p() == 2 {
            return self.clone();
        }
        let f = self.field;
        Self::from_fn(f, self.rows, self.cols, |i, j| f.neg(self.get(i, j)))
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(
                "inverse of a non-square matrix".into(),
            ));
        }
        let n = self.rows;
        let aug = self.hstack(&Matrix::identity(self.field, n))?;
        let r = aug.rref();
        if r.rank < n || (0..n).any(|i| r.matrix.get(i, i) != 1) {
            return Err(Error::pre("matrix is singular"));
        }
        Ok(Self::from_fn(self.field, n, n, |i, j| {
            r.matrix.get(i, n + j)
        }))
    }

    /// Columns `start..end` as a new matrix.
    pub fn columns(&self, start: usize, end: usize) -> Matrix {
        Self::from_fn(self.field, self.rows, end - start, |i, j| {
            self.get(i, start + j)
        })
    }

    /// Rows `start..end` as a new matrix.
    pub fn row_range(&self, start: usize, end: usize) -> Matrix {
        match &self.data {
            Storage::Bits(r) => Matrix::from_bits(self.field, self.cols, &r[start..end]),
            Storage::Dense(d) => Matrix::from_dense(
                self.field,
                end - start,
                self.cols,
                d[start * self.cols..end * self.cols].to_vec(),
            ),
        }
    }
}

impl PartialOrd for Matrix {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Row-major lexicographic order on entries after shape.
impl Ord for Matrix {
    fn cmp(&self, other: &Self) -> Ordering {
        let shape =
            (self.field.q(), self.rows, self.cols).cmp(&(other.field.q(), other.rows, other.cols));
        if shape != Ordering::Equal {
            return shape;
        }
        match (&self.data, &other.data) {
            (Storage::Bits(a), Storage::Bits(b)) => a.cmp(b),
            (Storage::Dense(a), Storage::Dense(b)) => a.cmp(b),
            _ => self.dense_data().cmp(&other.dense_data()),
        }
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Matrix<GF({})>{}x{}[",
            self.field.q(),
            self.rows,
            self.cols
        )?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(u32::to_string).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

/// Number of k-subspaces of GF(q)^n.
pub fn gaussian_binomial(n: u32, k: u32, q: u64) -> BigUint {
    if k > n {
        return BigUint::default();
    }
    let q = BigUint::from(q);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..k {
        num *= q.pow(n - i) - 1u32;
        den *= q.pow(k - i) - 1u32;
    }
    num / den
}

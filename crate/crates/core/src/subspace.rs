//! Subspaces of GF(q)^n in canonical form and the subspace distance.

use std::fmt;

use crate::error::{Error, Result};
use crate::gf::Field;
use crate::linalg::{self, Matrix, PivotVector, Rows};

/// A subspace stored as its unique RREF generator matrix.
///
/// Equality, hashing and ordering all go through the generator, so two
/// values are equal exactly when they span the same space.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    gen: Matrix,
}

impl Subspace {
    /// Row space of `m`.
    pub fn from_matrix(m: &Matrix) -> Result<Subspace> {
        let r = m.rref();
        if r.rank == 0 {
            return Err(Error::EmptySubspace);
        }
        Ok(Subspace { gen: r.matrix })
    }

    pub fn from_rows(field: Field, rows: &[Vec<u32>]) -> Result<Subspace> {
        Self::from_matrix(&Matrix::from_rows(field, rows)?)
    }

    /// Wraps a matrix the caller guarantees is already in RREF with full row rank.
    pub(crate) fn from_rref_unchecked(gen: Matrix) -> Subspace {
        debug_assert_eq!(gen.rref().matrix, gen);
        Subspace { gen }
    }

    /// Packed binary generator; the rows are reduced here.
    pub(crate) fn from_bits(field: Field, n: usize, rows: &mut [u64]) -> Subspace {
        let rank = linalg::rref_bits(rows);
        Subspace {
            gen: Matrix::from_bits(field, n, &rows[..rank]),
        }
    }

    pub fn zero(field: Field, n: usize) -> Subspace {
        Subspace {
            gen: Matrix::zeros(field, 0, n),
        }
    }

    pub fn full(field: Field, n: usize) -> Subspace {
        Subspace {
            gen: Matrix::identity(field, n),
        }
    }

    /// Span of the unit vectors `e_i` for `i` in `coords`.
    pub fn coordinate(field: Field, n: usize, coords: impl IntoIterator<Item = usize>) -> Subspace {
        let mut cs: Vec<usize> = coords.into_iter().collect();
        cs.sort_unstable();
        cs.dedup();
        let gen = Matrix::from_fn(field, cs.len(), n, |i, j| (cs[i] == j) as u32);
        Subspace { gen }
    }

    pub fn field(&self) -> Field {
        self.gen.field()
    }

    /// Ambient dimension.
    pub fn n(&self) -> usize {
        self.gen.cols()
    }

    /// Dimension.
    pub fn k(&self) -> usize {
        self.gen.rows()
    }

    /// The RREF generator τ(U).
    pub fn generator(&self) -> &Matrix {
        &self.gen
    }

    pub fn pivots(&self) -> PivotVector {
        let cols: Vec<usize> = (0..self.k())
            .map(|i| {
                (0..self.n())
                    .find(|&j| self.gen.get(i, j) != 0)
                    .expect("full rank")
            })
            .collect();
        PivotVector::from_columns(self.n(), &cols)
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.field() != other.field() {
            return Err(Error::FieldMismatch);
        }
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch(format!(
                "ambient dimensions {} and {}",
                self.n(),
                other.n()
            )));
        }
        Ok(())
    }

    /// dim(U + U').
    pub(crate) fn sum_dim_unchecked(&self, other: &Subspace) -> usize {
        if let (Some(u), Some(v)) = (self.gen.packed(), other.gen.packed()) {
            // reduce V against the pivots of U, then eliminate what is left
            let mut rest: Rows = v
                .iter()
                .map(|&row| {
                    u.iter().fold(row, |acc, &ur| {
                        let p = 1u64 << (63 - ur.leading_zeros());
                        if acc & p != 0 {
                            acc ^ ur
                        } else {
                            acc
                        }
                    })
                })
                .collect();
            return u.len() + linalg::rank_bits(&mut rest);
        }
        let (f, n) = (self.field(), self.n());
        let (a, b) = (self.k(), other.k());
        let (da, db) = (self.gen.dense_data(), other.gen.dense_data());
        linalg::with_scratch((a + b) * n, |buf| {
            buf[..a * n].copy_from_slice(&da);
            buf[a * n..].copy_from_slice(&db);
            linalg::rank_dense(f, buf, a + b, n)
        })
    }

    /// Subspace distance 2·dim(U+U') − dim U − dim U'.
    pub fn distance(&self, other: &Subspace) -> Result<usize> {
        self.check_ambient(other)?;
        Ok(self.distance_unchecked(other))
    }

    /// [`Subspace::distance`] without the field and ambient checks.
    #[inline]
    pub fn distance_unchecked(&self, other: &Subspace) -> usize {
        2 * self.sum_dim_unchecked(other) - self.k() - other.k()
    }

    /// Hamming distance of the pivot vectors, a lower bound on the distance.
    pub fn pivot_distance_bound(&self, other: &Subspace) -> Result<usize> {
        self.check_ambient(other)?;
        Ok(self.pivots().hamming(&other.pivots()))
    }

    pub fn intersection_dim(&self, other: &Subspace) -> Result<usize> {
        self.check_ambient(other)?;
        Ok(self.k() + other.k() - self.sum_dim_unchecked(other))
    }

    pub fn is_disjoint(&self, other: &Subspace) -> Result<bool> {
        Ok(self.intersection_dim(other)? == 0)
    }

    pub fn span(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        let r = self.gen.vstack(&other.gen)?.rref();
        Ok(Subspace { gen: r.matrix })
    }

    /// Whether `v` (length n) lies in the subspace.
    pub fn contains_vector(&self, v: &[u32]) -> Result<bool> {
        if v.len() != self.n() {
            return Err(Error::DimensionMismatch("vector length".into()));
        }
        let row = Matrix::from_rows(self.field(), &[v.to_vec()])?;
        Ok(self.gen.vstack(&row)?.rank() == self.k())
    }

    pub fn contains(&self, other: &Subspace) -> Result<bool> {
        Ok(self.intersection_dim(other)? == other.k())
    }

    /// U^⊥ under Σ u_i v_i.
    pub fn orthogonal_complement(&self) -> Subspace {
        let (f, n, k) = (self.field(), self.n(), self.k());
        let pivots = self.pivots().columns();
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        let gen = Matrix::from_fn(f, free.len(), n, |r, j| {
            let fc = free[r];
            if j == fc {
                1
            } else if let Some(i) = pivots.iter().position(|&p| p == j) {
                debug_assert!(i < k);
                f.neg(self.gen.get(i, fc))
            } else {
                0
            }
        });
        // the kernel basis is indexed by free columns; reduce to canonical form
        let r = gen.rref();
        Subspace { gen: r.matrix }
    }

    /// Places the subspace in `n_total` coordinates starting at `offset`.
    pub fn embed(&self, n_total: usize, offset: usize) -> Subspace {
        let (k, n) = (self.k(), self.n());
        if let Some(rows) = self.gen.packed() {
            if n_total <= 64 {
                let shifted: Rows = rows.iter().map(|&r| r >> offset).collect();
                return Subspace {
                    gen: Matrix::from_bits(self.field(), n_total, &shifted),
                };
            }
        }
        let gen = Matrix::from_fn(self.field(), k, n_total, |i, j| {
            if j >= offset && j < offset + n {
                self.gen.get(i, j - offset)
            } else {
                0
            }
        });
        Subspace { gen }
    }

    /// Span of subspaces living in the same ambient space.
    pub fn span_all<'a>(parts: impl IntoIterator<Item = &'a Subspace>) -> Result<Subspace> {
        let mut iter = parts.into_iter();
        let first = iter.next().ok_or(Error::EmptySubspace)?;
        let mut m = first.gen.clone();
        for p in iter {
            first.check_ambient(p)?;
            m = m.vstack(&p.gen)?;
        }
        Ok(Subspace {
            gen: m.rref().matrix,
        })
    }

    /// Canonical text form: rows of τ(U) as digit strings joined by `|`;
    /// for q > 10 each row is a comma-separated list of decimal indices.
    pub fn serialize(&self) -> String {
        let q = self.field().q();
        let mut out = String::with_capacity(self.k() * (self.n() + 1));
        for i in 0..self.k() {
            if i > 0 {
                out.push('|');
            }
            for j in 0..self.n() {
                let v = self.gen.get(i, j);
                if q > 10 {
                    if j > 0 {
                        out.push(',');
                    }
                    out.push_str(&v.to_string());
                } else {
                    out.push(char::from_digit(v, 10).expect("digit"));
                }
            }
        }
        out
    }

    /// Parses [`Subspace::serialize`] output. The rows need not be reduced.
    pub fn parse(field: Field, s: &str) -> Result<Subspace> {
        let q = field.q();
        let bad = || Error::pre(format!("malformed codeword `{s}`"));
        let rows: Vec<Vec<u32>> = s
            .split('|')
            .map(|row| {
                if q > 10 {
                    row.split(',')
                        .map(|t| t.trim().parse::<u32>().map_err(|_| bad()))
                        .collect()
                } else {
                    row.chars()
                        .map(|c| c.to_digit(10).ok_or_else(bad))
                        .collect()
                }
            })
            .collect::<Result<_>>()?;
        Self::from_rows(field, &rows)
    }

    /// Whether the serialized generator is already reduced.
    pub fn is_canonical_rows(field: Field, rows: &[Vec<u32>]) -> Result<bool> {
        let m = Matrix::from_rows(field, rows)?;
        let r = m.rref();
        Ok(r.rank == rows.len() && r.matrix == m)
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Subspace(q={}, n={}, k={}, {})",
            self.field().q(),
            self.n(),
            self.k(),
            self
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf2() -> Field {
        Field::prime(2).unwrap()
    }

    #[test]
    fn worked_example() {
        let u = Subspace::from_rows(gf2(), &[vec![1, 0, 1, 0], vec![1, 1, 0, 1]]).unwrap();
        assert_eq!(u.serialize(), "1010|0111");
        assert_eq!(u.pivots().to_string(), "1100");
    }

    #[test]
    fn zero_matrix_is_rejected() {
        let z = Matrix::zeros(gf2(), 2, 4);
        assert!(matches!(
            Subspace::from_matrix(&z),
            Err(Error::EmptySubspace)
        ));
    }

    #[test]
    fn distances() {
        let f = gf2();
        let u = Subspace::from_rows(f, &[vec![1, 0, 1, 0], vec![0, 1, 1, 1]]).unwrap();
        let w = Subspace::from_rows(f, &[vec![0, 0, 1, 0], vec![0, 0, 0, 1]]).unwrap();
        assert_eq!(u.distance(&u).unwrap(), 0);
        assert_eq!(u.distance(&w).unwrap(), 4);
        let e12 = Subspace::coordinate(f, 4, [0, 1]);
        let e34 = Subspace::coordinate(f, 4, [2, 3]);
        assert_eq!(e12.distance(&e34).unwrap(), 4);
        assert_eq!(e12.pivot_distance_bound(&e34).unwrap(), 4);
        let other = Subspace::full(f, 5);
        assert!(u.distance(&other).is_err());
    }

    #[test]
    fn complement_of_coordinate_space() {
        for q in [2, 3, 4] {
            let f = Field::of_order(q).unwrap();
            let u = Subspace::coordinate(f, 5, 0..2);
            assert_eq!(u.orthogonal_complement(), Subspace::coordinate(f, 5, 2..5));
            assert_eq!(u.intersection_dim(&u).unwrap(), 2);
        }
    }

    #[test]
    fn serialization_round_trip_large_q() {
        let f = Field::of_order(11).unwrap();
        let u = Subspace::from_rows(f, &[vec![1, 0, 10, 3], vec![0, 1, 4, 7]]).unwrap();
        let s = u.serialize();
        assert_eq!(s, "1,0,10,3|0,1,4,7");
        assert_eq!(Subspace::parse(f, &s).unwrap(), u);
    }

    #[test]
    fn embedding_keeps_distances() {
        let f = gf2();
        let u = Subspace::from_rows(f, &[vec![1, 0, 1, 0], vec![0, 1, 1, 1]]).unwrap();
        let w = Subspace::coordinate(f, 4, [2, 3]);
        let (ue, we) = (u.embed(10, 3), w.embed(10, 3));
        assert_eq!(ue.distance(&we).unwrap(), u.distance(&w).unwrap());
        assert_eq!(ue.serialize(), "0001010000|0000111000");
    }
}

//! Rank-metric codes: Gabidulin MRD codes and views onto them.
//!
//! A Gabidulin code over GF(q^N), N = max(m, n), consists of the linearized
//! polynomials `f = Σ_{i<t} f_i x^{q^i}` evaluated at the first `min(m, n)`
//! power-basis elements. Each evaluation is expanded into its N coordinates,
//! giving a `min × max` matrix; shapes with `m > n` are transposed on output.
//!
//! Codewords are addressed by an index whose base-`q^N` digits are
//! `f_0, f_1, ...`, least significant first. A nested subcode is therefore a
//! prefix of the index range, and each coset of it is a contiguous block.

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::gf::{ExtField, Field};
use crate::linalg::{gaussian_binomial, Matrix};

/// Size of an MRD code, `q^(max(m,n)·(min(m,n) − d_r + 1))`.
pub fn mrd_size(q: u64, m: usize, n: usize, d_r: usize) -> Result<BigUint> {
    let (lo, hi) = (m.min(n), m.max(n));
    if d_r == 0 || d_r > lo {
        return Err(Error::pre(format!("rank distance {d_r} outside 1..={lo}")));
    }
    Ok(BigUint::from(q).pow((hi * (lo - d_r + 1)) as u32))
}

/// Number of rank-`r` codewords in an additive MRD code with these parameters.
/// Ranks below `d_r` give 1 for `r = 0` and 0 otherwise.
pub fn rank_distribution(q: u64, m: usize, n: usize, d_r: usize, r: usize) -> Result<BigUint> {
    let (lo, hi) = (m.min(n), m.max(n));
    if d_r == 0 || d_r > lo {
        return Err(Error::pre(format!("rank distance {d_r} outside 1..={lo}")));
    }
    if r > lo {
        return Err(Error::pre(format!("rank {r} exceeds {lo}")));
    }
    if r < d_r {
        return Ok(if r == 0 {
            BigUint::one()
        } else {
            BigUint::zero()
        });
    }
    let qb = BigInt::from(q);
    let mut sum = BigInt::zero();
    for s in 0..=(r - d_r) {
        let sign = if s % 2 == 0 {
            BigInt::one()
        } else {
            -BigInt::one()
        };
        let qs = qb.pow((s * s.saturating_sub(1) / 2) as u32);
        let gb = BigInt::from(gaussian_binomial(r as u32, s as u32, q));
        let tail = qb.pow((hi * (r - d_r - s + 1)) as u32) - 1;
        sum += sign * qs * gb * tail;
    }
    let total = BigInt::from(gaussian_binomial(lo as u32, r as u32, q)) * sum;
    Ok(total.to_biguint().expect("rank counts are nonnegative"))
}

/// A linearized polynomial `Σ c_i x^{q^i}` over an extension field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearizedPoly {
    coeffs: Vec<u32>,
}

impl LinearizedPoly {
    pub fn new(coeffs: Vec<u32>) -> Self {
        LinearizedPoly { coeffs }
    }

    pub fn coefficients(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn eval(&self, ext: &ExtField, x: u32) -> u32 {
        let f = ext.field();
        let q = ext.base().q() as u64;
        let mut acc = 0;
        let mut xp = x;
        for &c in &self.coeffs {
            acc = f.add(acc, f.mul(c, xp));
            xp = f.pow(xp, q);
        }
        acc
    }
}

/// The underlying full Gabidulin code shared by all views.
pub struct Gabidulin {
    base: Field,
    ext: ExtField,
    m: usize,
    n: usize,
    short: usize,
    long: usize,
    transposed: bool,
    /// Coefficients of the outermost code.
    t: usize,
    /// `frob[i * short + j] = g_j^(q^i)`.
    frob: Vec<u32>,
    /// Inverse of the square Moore matrix, over GF(q^N).
    moore_inv: Matrix,
    q_ext: u64,
}

impl fmt::Debug for Gabidulin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Gabidulin(q={}, {}x{}, t={})",
            self.base.q(),
            self.m,
            self.n,
            self.t
        )
    }
}

impl Gabidulin {
    fn new(base: Field, m: usize, n: usize, d_r: usize) -> Result<Gabidulin> {
        let (short, long) = (m.min(n), m.max(n));
        if m == 0 || n == 0 || d_r == 0 || d_r > short {
            return Err(Error::pre(format!("no ({m}x{n},{d_r}) MRD code")));
        }
        let ext = ExtField::new(base, long)?;
        let f = ext.field();
        let q = base.q() as u64;
        let g = &ext.basis()[..short];
        let mut frob = vec![0u32; short * short];
        for (j, &gj) in g.iter().enumerate() {
            let mut x = gj;
            for i in 0..short {
                frob[i * short + j] = x;
                x = f.pow(x, q);
            }
        }
        let moore = Matrix::from_fn(f, short, short, |i, j| frob[i * short + j]);
        let moore_inv = moore.inverse()?;
        Ok(Gabidulin {
            base,
            q_ext: f.q() as u64,
            ext,
            m,
            n,
            short,
            long,
            transposed: m > n,
            t: short - d_r + 1,
            frob,
            moore_inv,
        })
    }

    /// Evaluations `f(g_j)` for the given coefficients.
    fn evaluate(&self, coeffs: &[u32]) -> SmallVec<[u32; 16]> {
        let f = self.ext.field();
        (0..self.short)
            .map(|j| {
                coeffs.iter().enumerate().fold(0u32, |acc, (i, &c)| {
                    if c == 0 {
                        acc
                    } else {
                        f.add(acc, f.mul(c, self.frob[i * self.short + j]))
                    }
                })
            })
            .collect()
    }

    fn to_matrix(&self, values: &[u32]) -> Matrix {
        let base = self.base;
        if base.q() == 2 && !self.transposed && self.long <= 64 {
            let rows: SmallVec<[u64; 8]> =
                values.iter().map(|&y| (y as u64).reverse_bits()).collect();
            return Matrix::from_bits(base, self.long, &rows);
        }
        if self.transposed {
            Matrix::from_fn(base, self.m, self.n, |c, j| {
                self.ext.coordinate(values[j], c)
            })
        } else {
            Matrix::from_fn(base, self.m, self.n, |j, c| {
                self.ext.coordinate(values[j], c)
            })
        }
    }

    /// Coefficients of the polynomial whose codeword is `mat`, if any.
    fn coefficients_of(&self, mat: &Matrix) -> Option<Vec<u32>> {
        if mat.field() != self.base || mat.rows() != self.m || mat.cols() != self.n {
            return None;
        }
        let y: Vec<u32> = (0..self.short)
            .map(|j| {
                let v: Vec<u32> = (0..self.long)
                    .map(|c| {
                        if self.transposed {
                            mat.get(c, j)
                        } else {
                            mat.get(j, c)
                        }
                    })
                    .collect();
                self.ext.vector_to_element(&v)
            })
            .collect();
        let f = self.ext.field();
        // y = coeffs · Moore, so coeffs = y · Moore^{-1}
        let coeffs: Vec<u32> = (0..self.short)
            .map(|i| {
                (0..self.short).fold(0, |acc, j| {
                    f.add(acc, f.mul(y[j], self.moore_inv.get(j, i)))
                })
            })
            .collect();
        Some(coeffs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RankCodeKind {
    Mrd,
    NestedSubcode { d_r: usize },
    Coset { index: u64 },
    RankFiltered { max_rank: usize },
}

struct RankFilter {
    max_rank: usize,
    indices: OnceLock<Vec<u64>>,
}

/// A deterministic, randomly addressable view onto a Gabidulin code.
#[derive(Clone)]
pub struct RankCodeHandle {
    code: Arc<Gabidulin>,
    d_r: usize,
    /// Number of low coefficients that range freely.
    free: usize,
    /// Fixed coefficients at positions `free..`.
    fixed: Vec<u32>,
    kind: RankCodeKind,
    filter: Option<Arc<RankFilter>>,
}

impl fmt::Debug for RankCodeHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "RankCode(q={}, {}x{}, d_r={}, {:?})",
            self.code.base.q(),
            self.code.m,
            self.code.n,
            self.d_r,
            self.kind
        )
    }
}

/// Largest code scanned codeword by codeword when filtering by rank.
pub const RANK_FILTER_SCAN_CAP: u64 = 1 << 28;

/// The linear `(m × n, d_r)_q` Gabidulin MRD code.
pub fn gabidulin_mrd(field: Field, m: usize, n: usize, d_r: usize) -> Result<RankCodeHandle> {
    let code = Arc::new(Gabidulin::new(field, m, n, d_r)?);
    Ok(RankCodeHandle {
        free: code.t,
        d_r,
        fixed: Vec::new(),
        kind: RankCodeKind::Mrd,
        filter: None,
        code,
    })
}

impl RankCodeHandle {
    pub fn field(&self) -> Field {
        self.code.base
    }

    /// Requested shape `(m, n)`.
    pub fn shape(&self) -> (usize, usize) {
        (self.code.m, self.code.n)
    }

    /// Designed minimum rank distance.
    pub fn d_r(&self) -> usize {
        self.d_r
    }

    pub fn kind(&self) -> &RankCodeKind {
        &self.kind
    }

    /// Whether the view is a linear subspace of the matrix space.
    pub fn is_linear(&self) -> bool {
        self.filter.is_none() && self.fixed.iter().all(|&c| c == 0)
    }

    fn unfiltered_len(&self) -> BigUint {
        BigUint::from(self.code.q_ext).pow(self.free as u32)
    }

    fn unfiltered_len_u64(&self) -> Option<u64> {
        self.code.q_ext.checked_pow(self.free as u32)
    }

    fn filtered(&self) -> Option<&[u64]> {
        let filt = self.filter.as_ref()?;
        Some(filt.indices.get_or_init(|| {
            let total = self
                .unfiltered_len_u64()
                .expect("filtered codes are enumerable");
            (0..total)
                .into_par_iter()
                .filter(|&i| self.raw_matrix(i).rank() <= filt.max_rank)
                .collect()
        }))
    }

    pub fn len(&self) -> BigUint {
        match self.filtered() {
            Some(ix) => BigUint::from(ix.len()),
            None => self.unfiltered_len(),
        }
    }

    /// Size as `u64`, when it fits.
    pub fn len_u64(&self) -> Option<u64> {
        match self.filtered() {
            Some(ix) => Some(ix.len() as u64),
            None => self.unfiltered_len_u64(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len().is_zero()
    }

    fn coefficients(&self, raw: u64) -> SmallVec<[u32; 16]> {
        let mut out = SmallVec::new();
        let mut x = raw;
        for _ in 0..self.free {
            out.push((x % self.code.q_ext) as u32);
            x /= self.code.q_ext;
        }
        out.extend_from_slice(&self.fixed);
        out
    }

    fn raw_matrix(&self, raw: u64) -> Matrix {
        let coeffs = self.coefficients(raw);
        self.code.to_matrix(&self.code.evaluate(&coeffs))
    }

    /// The linearized polynomial behind codeword `idx`.
    pub fn polynomial(&self, idx: u64) -> LinearizedPoly {
        let raw = self.filtered().map_or(idx, |ix| ix[idx as usize]);
        LinearizedPoly::new(self.coefficients(raw).to_vec())
    }

    /// Codeword `idx` in enumeration order.
    pub fn matrix(&self, idx: u64) -> Matrix {
        match self.filtered() {
            Some(ix) => self.raw_matrix(ix[idx as usize]),
            None => self.raw_matrix(idx),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Matrix> + '_ {
        let n = self.len_u64().expect("enumerable code");
        (0..n).map(move |i| self.matrix(i))
    }

    /// Position of `mat` in this view.
    pub fn index_of(&self, mat: &Matrix) -> Option<u64> {
        let coeffs = self.code.coefficients_of(mat)?;
        if coeffs[self.free..self.free + self.fixed.len()] != self.fixed[..]
            || coeffs[self.free + self.fixed.len()..]
                .iter()
                .any(|&c| c != 0)
        {
            return None;
        }
        let raw = coeffs[..self.free].iter().rev().try_fold(0u64, |acc, &c| {
            acc.checked_mul(self.code.q_ext)?.checked_add(c as u64)
        })?;
        match self.filtered() {
            Some(ix) => ix.binary_search(&raw).ok().map(|p| p as u64),
            None => Some(raw),
        }
    }

    pub fn contains(&self, mat: &Matrix) -> bool {
        self.index_of(mat).is_some()
    }

    /// The nested Gabidulin subcode with larger distance `d2`.
    pub fn nested_subcode(&self, d2: usize) -> Result<RankCodeHandle> {
        if d2 <= self.d_r {
            return Err(Error::pre(format!(
                "nested distance {d2} must exceed {}",
                self.d_r
            )));
        }
        if d2 > self.code.short {
            return Err(Error::pre(format!("no MRD code with rank distance {d2}")));
        }
        if !self.is_linear() {
            return Err(Error::pre("nested subcodes need a linear parent"));
        }
        let free = self.code.short - d2 + 1;
        // coefficients above `free` are implicitly zero
        Ok(RankCodeHandle {
            code: Arc::clone(&self.code),
            d_r: d2,
            free,
            fixed: Vec::new(),
            kind: RankCodeKind::NestedSubcode { d_r: d2 },
            filter: None,
        })
    }

    fn check_nested(&self, sub: &RankCodeHandle) -> Result<()> {
        if !Arc::ptr_eq(&self.code, &sub.code)
            || sub.free > self.free
            || !self.is_linear()
            || !sub.is_linear()
        {
            return Err(Error::pre(
                "coset partition needs a linear nested subcode of the same code",
            ));
        }
        Ok(())
    }

    /// Number of cosets of `sub` in `self`.
    pub fn coset_count(&self, sub: &RankCodeHandle) -> Result<BigUint> {
        self.check_nested(sub)?;
        Ok(BigUint::from(self.code.q_ext).pow((self.free - sub.free) as u32))
    }

    /// Coset `j` of the nested subcode `sub`.
    pub fn coset(&self, sub: &RankCodeHandle, j: u64) -> Result<RankCodeHandle> {
        self.check_nested(sub)?;
        let width = self.free - sub.free;
        if let Some(count) = self.code.q_ext.checked_pow(width as u32) {
            if j >= count {
                return Err(Error::pre(format!("coset index {j} out of range")));
            }
        }
        let mut fixed = Vec::with_capacity(width);
        let mut x = j;
        for _ in 0..width {
            fixed.push((x % self.code.q_ext) as u32);
            x /= self.code.q_ext;
        }
        Ok(RankCodeHandle {
            code: Arc::clone(&self.code),
            d_r: sub.d_r,
            free: sub.free,
            fixed,
            kind: RankCodeKind::Coset { index: j },
            filter: None,
        })
    }

    /// All cosets of `sub`, in index order.
    pub fn coset_partition(&self, sub: &RankCodeHandle) -> Result<Vec<RankCodeHandle>> {
        let count = self
            .coset_count(sub)?
            .to_u64()
            .filter(|&c| c <= 1 << 24)
            .ok_or_else(|| Error::CapExceeded {
                what: "coset partition".into(),
                size: self
                    .coset_count(sub)
                    .map(|c| c.to_string())
                    .unwrap_or_default(),
                cap: 1 << 24,
            })?;
        (0..count).map(|j| self.coset(sub, j)).collect()
    }

    /// The codewords of rank at most `t`, enumerated lazily on first use.
    pub fn rank_filtered(&self, t: usize) -> Result<RankCodeHandle> {
        if t > self.code.short {
            return Err(Error::pre(format!(
                "rank bound {t} exceeds {}",
                self.code.short
            )));
        }
        if self.filter.is_some() {
            return Err(Error::pre("view is already rank filtered"));
        }
        if self
            .unfiltered_len_u64()
            .is_none_or(|n| n > RANK_FILTER_SCAN_CAP)
        {
            return Err(Error::CapExceeded {
                what: "rank-filtered enumeration".into(),
                size: self.unfiltered_len().to_string(),
                cap: RANK_FILTER_SCAN_CAP,
            });
        }
        Ok(RankCodeHandle {
            code: Arc::clone(&self.code),
            d_r: self.d_r,
            free: self.free,
            fixed: self.fixed.clone(),
            kind: RankCodeKind::RankFiltered { max_rank: t },
            filter: Some(Arc::new(RankFilter {
                max_rank: t,
                indices: OnceLock::new(),
            })),
        })
    }
}

/// Counts codewords by rank; entry `r` is the number of rank-`r` codewords.
pub fn rank_histogram(h: &RankCodeHandle) -> Vec<u64> {
    let (m, n) = h.shape();
    let mut hist = vec![0u64; m.min(n) + 1];
    for mat in h.iter() {
        hist[mat.rank()] += 1;
    }
    hist
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(q: u64) -> Field {
        Field::of_order(q).unwrap()
    }

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn sizes() {
        assert_eq!(mrd_size(2, 3, 4, 2).unwrap(), big(256));
        assert_eq!(mrd_size(2, 4, 4, 2).unwrap(), big(4096));
        assert_eq!(mrd_size(3, 2, 5, 2).unwrap(), big(243));
        assert!(mrd_size(2, 3, 3, 4).is_err());
        assert!(mrd_size(2, 3, 3, 0).is_err());
    }

    #[test]
    fn distribution_values() {
        assert_eq!(rank_distribution(2, 3, 3, 2, 2).unwrap(), big(49));
        assert_eq!(rank_distribution(2, 3, 3, 2, 3).unwrap(), big(14));
        assert_eq!(rank_distribution(2, 2, 2, 1, 1).unwrap(), big(9));
        assert_eq!(rank_distribution(2, 3, 3, 2, 1).unwrap(), big(0));
        assert_eq!(rank_distribution(2, 3, 3, 2, 0).unwrap(), big(1));
        assert!(rank_distribution(2, 3, 3, 2, 4).is_err());
    }

    #[test]
    fn distribution_sums_to_size() {
        for q in [2, 3] {
            for m in 1..=4 {
                for n in 1..=4 {
                    for d in 1..=m.min(n) {
                        let total: BigUint = (0..=m.min(n))
                            .map(|r| rank_distribution(q, m, n, d, r).unwrap())
                            .sum();
                        assert_eq!(total, mrd_size(q, m, n, d).unwrap(), "q={q} {m}x{n} d={d}");
                    }
                }
            }
        }
    }

    #[test]
    fn enumerated_histograms_match_formula() {
        for (q, m, n, d) in [
            (2, 3, 3, 2),
            (2, 3, 3, 3),
            (2, 4, 4, 3),
            (3, 2, 2, 2),
            (2, 2, 3, 2),
            (2, 3, 2, 2),
            (4, 2, 2, 1),
        ] {
            let h = gabidulin_mrd(gf(q), m, n, d).unwrap();
            let hist = rank_histogram(&h);
            for (r, &count) in hist.iter().enumerate() {
                assert_eq!(
                    big(count),
                    rank_distribution(q, m, n, d, r).unwrap(),
                    "q={q} {m}x{n} d={d} r={r}"
                );
            }
        }
    }

    #[test]
    fn full_space_when_distance_is_one() {
        let h = gabidulin_mrd(gf(2), 2, 3, 1).unwrap();
        assert_eq!(h.len(), big(64));
        let mut all: Vec<Matrix> = h.iter().collect();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), 64);
    }

    #[test]
    fn membership_round_trip() {
        let h = gabidulin_mrd(gf(2), 3, 4, 2).unwrap();
        for i in 0..h.len_u64().unwrap() {
            assert_eq!(h.index_of(&h.matrix(i)), Some(i));
        }
        let t = gabidulin_mrd(gf(3), 3, 2, 2).unwrap();
        for i in 0..t.len_u64().unwrap() {
            assert_eq!(t.index_of(&t.matrix(i)), Some(i));
        }
    }

    #[test]
    fn nested_subcode_is_a_prefix() {
        let h = gabidulin_mrd(gf(2), 3, 3, 2).unwrap();
        let sub = h.nested_subcode(3).unwrap();
        assert_eq!(sub.len(), big(8));
        for m in sub.iter() {
            assert!(h.contains(&m));
            assert!(m.is_zero() || m.rank() == 3);
        }
        assert!(h.nested_subcode(2).is_err());
    }

    #[test]
    fn cosets_partition_the_code() {
        let h = gabidulin_mrd(gf(2), 3, 3, 1).unwrap();
        let sub = h.nested_subcode(3).unwrap();
        let cosets = h.coset_partition(&sub).unwrap();
        assert_eq!(cosets.len(), 64);
        let mut all: Vec<Matrix> = cosets
            .iter()
            .flat_map(|c| c.iter().collect::<Vec<_>>())
            .collect();
        assert_eq!(all.len(), 512);
        all.sort();
        all.dedup();
        assert_eq!(all.len(), 512);
        let single = h.coset_partition(&h).unwrap();
        assert_eq!(single.len(), 1);
    }

    #[test]
    fn rank_filtered_counts() {
        let h = gabidulin_mrd(gf(2), 4, 4, 2).unwrap();
        let f = h.rank_filtered(2).unwrap();
        let expect = big(1) + rank_distribution(2, 4, 4, 2, 2).unwrap();
        assert_eq!(f.len(), expect);
        assert!(f.iter().all(|m| m.rank() <= 2));
        assert_eq!(h.rank_filtered(0).unwrap().len(), big(1));
        assert_eq!(h.rank_filtered(4).unwrap().len(), big(4096));
    }

    #[test]
    fn linearized_evaluation_matches_codeword() {
        let f2 = gf(2);
        let h = gabidulin_mrd(f2, 3, 3, 2).unwrap();
        let ext = ExtField::new(f2, 3).unwrap();
        let p = h.polynomial(37);
        let mat = h.matrix(37);
        for j in 0..3 {
            let y = p.eval(&ext, ext.basis()[j]);
            assert_eq!(ext.element_to_vector(y), mat.row(j));
        }
    }
}

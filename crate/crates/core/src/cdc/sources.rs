//! Generic codeword sources.

use std::sync::Arc;

use super::{Cdc, CodewordSource};
use crate::subspace::Subspace;

pub(crate) struct VecSource(pub(crate) Arc<Vec<Subspace>>);

impl CodewordSource for VecSource {
    fn len(&self) -> u64 {
        self.0.len() as u64
    }

    fn get(&self, idx: u64) -> Subspace {
        self.0[idx as usize].clone()
    }
}

/// Concatenation of several codes, in order.
pub struct UnionSource {
    parts: Vec<Arc<dyn CodewordSource>>,
    starts: Vec<u64>,
    len: u64,
}

impl UnionSource {
    pub fn new(parts: &[&Cdc]) -> Self {
        let mut starts = Vec::with_capacity(parts.len());
        let mut len = 0;
        for p in parts {
            starts.push(len);
            len += p.len();
        }
        UnionSource {
            parts: parts.iter().map(|p| p.source()).collect(),
            starts,
            len,
        }
    }

    /// Offset of part `i` in the union.
    pub fn start(&self, i: usize) -> u64 {
        self.starts[i]
    }
}

impl CodewordSource for UnionSource {
    fn len(&self) -> u64 {
        self.len
    }

    fn get(&self, idx: u64) -> Subspace {
        let part = self.starts.partition_point(|&s| s <= idx) - 1;
        self.parts[part].get(idx - self.starts[part])
    }
}

/// A code with some positions removed; the rest keep their relative order.
pub struct ExcludeSource {
    inner: Arc<dyn CodewordSource>,
    /// Sorted, distinct.
    excluded: Vec<u64>,
}

impl ExcludeSource {
    pub fn new(inner: &Cdc, mut excluded: Vec<u64>) -> Self {
        excluded.sort_unstable();
        excluded.dedup();
        ExcludeSource {
            inner: inner.source(),
            excluded,
        }
    }

    /// Position in the inner code of the `idx`-th surviving codeword.
    pub fn select(&self, idx: u64) -> u64 {
        // smallest x with x - #{excluded <= x} == idx and x not excluded
        let (mut lo, mut hi) = (idx, idx + self.excluded.len() as u64);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            let kept = mid + 1 - self.excluded.partition_point(|&e| e <= mid) as u64;
            if kept > idx {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        lo
    }

    /// Position among the survivors of inner position `pos`, if kept.
    pub fn rank(&self, pos: u64) -> Option<u64> {
        if self.excluded.binary_search(&pos).is_ok() {
            return None;
        }
        Some(pos - self.excluded.partition_point(|&e| e < pos) as u64)
    }
}

impl CodewordSource for ExcludeSource {
    fn len(&self) -> u64 {
        self.inner.len() - self.excluded.len() as u64
    }

    fn get(&self, idx: u64) -> Subspace {
        self.inner.get(self.select(idx))
    }
}

/// A source backed by a closure.
pub struct FnSource<F> {
    len: u64,
    f: F,
}

impl<F: Fn(u64) -> Subspace + Send + Sync> FnSource<F> {
    pub fn new(len: u64, f: F) -> Self {
        FnSource { len, f }
    }
}

impl<F: Fn(u64) -> Subspace + Send + Sync> CodewordSource for FnSource<F> {
    fn len(&self) -> u64 {
        self.len
    }

    fn get(&self, idx: u64) -> Subspace {
        (self.f)(idx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cdc::{lifted_mrd, Provenance};
    use crate::gf::Field;

    #[test]
    fn exclude_select_and_rank() {
        let c = lifted_mrd(Field::prime(2).unwrap(), 6, 3, 4).unwrap();
        let ex = ExcludeSource::new(&c, vec![0, 5, 6, 63]);
        assert_eq!(ex.len(), 60);
        let kept: Vec<u64> = (0..ex.len()).map(|i| ex.select(i)).collect();
        let expect: Vec<u64> = (0..64).filter(|i| ![0, 5, 6, 63].contains(i)).collect();
        assert_eq!(kept, expect);
        for (i, &p) in expect.iter().enumerate() {
            assert_eq!(ex.rank(p), Some(i as u64));
        }
        assert_eq!(ex.rank(5), None);
    }

    #[test]
    fn union_offsets() {
        let f = Field::prime(2).unwrap();
        let a = lifted_mrd(f, 6, 3, 6).unwrap();
        let b = Cdc::from_codewords(
            f,
            6,
            3,
            6,
            vec![Subspace::coordinate(f, 6, 0..3)],
            Provenance::tag("x"),
        )
        .unwrap();
        let u = UnionSource::new(&[&a, &b]);
        assert_eq!(u.len(), 9);
        assert_eq!(u.get(8), Subspace::coordinate(f, 6, 0..3));
        assert_eq!(u.get(3), a.get(3));
    }
}

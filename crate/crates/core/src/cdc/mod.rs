//! Constant-dimension code containers and the basic code families.

mod sources;
mod spreads;

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gf::Field;
use crate::linalg::{bit, Matrix, Rows};
use crate::rankmetric::{gabidulin_mrd, mrd_size, RankCodeHandle};
use crate::subspace::Subspace;

pub use sources::{ExcludeSource, FnSource, UnionSource};
pub use spreads::{
    disjoint_2spreads_of_f_q8, parallelism_2_of_f_q4, parallelism_from_spreads, spread,
    SpreadFamily,
};

/// Default size limit for materializing a code in memory.
pub const MATERIALIZE_CAP: u64 = 100_000;

/// A deterministic, randomly addressable sequence of codewords.
pub trait CodewordSource: Send + Sync {
    fn len(&self) -> u64;
    fn get(&self, idx: u64) -> Subspace;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone)]
pub enum Codewords {
    Materialized(Arc<Vec<Subspace>>),
    Streaming(Arc<dyn CodewordSource>),
}

/// A lifted MRD subcode `{R(I_k | M)}` sitting at `offset..offset + |handle|`.
#[derive(Clone, Debug)]
pub struct LmrdPart {
    pub offset: u64,
    pub handle: RankCodeHandle,
}

/// Linkage block `i` occupies codeword indices `ranges[i]`; its coordinates
/// are `sigma[i]..sigma[i + 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockLayout {
    pub sigma: Vec<usize>,
    pub ranges: Vec<(u64, u64)>,
}

#[derive(Clone, Debug, Default)]
pub struct Provenance {
    pub recipe: String,
    pub lmrd: Option<LmrdPart>,
    /// Codewords disjoint from each other and from the LMRD part.
    pub extra_disjoint: Vec<u64>,
    /// An explicitly known partial-spread subcode.
    pub partial_spread: Option<Vec<u64>>,
    pub blocks: Option<BlockLayout>,
}

impl Provenance {
    pub fn tag(recipe: impl Into<String>) -> Self {
        Provenance {
            recipe: recipe.into(),
            ..Default::default()
        }
    }
}

#[derive(Clone)]
pub struct Cdc {
    field: Field,
    n: usize,
    k: usize,
    d_claim: usize,
    words: Codewords,
    provenance: Provenance,
}

impl fmt::Debug for Cdc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Cdc(q={}, n={}, k={}, d={}, len={}, {})",
            self.field.q(),
            self.n,
            self.k,
            self.d_claim,
            self.len(),
            self.provenance.recipe
        )
    }
}

impl Cdc {
    /// A materialized code; rejects wrong dimensions and duplicates.
    pub fn from_codewords(
        field: Field,
        n: usize,
        k: usize,
        d_claim: usize,
        words: Vec<Subspace>,
        provenance: Provenance,
    ) -> Result<Cdc> {
        let mut seen = HashSet::with_capacity(words.len());
        for w in &words {
            if w.field() != field {
                return Err(Error::FieldMismatch);
            }
            if w.n() != n || w.k() != k {
                return Err(Error::DimensionMismatch(format!(
                    "codeword of dimension {} in F^{}, expected {k} in F^{n}",
                    w.k(),
                    w.n()
                )));
            }
            if !seen.insert(w) {
                return Err(Error::pre(format!("duplicate codeword {w}")));
            }
        }
        Ok(Cdc {
            field,
            n,
            k,
            d_claim,
            words: Codewords::Materialized(Arc::new(words)),
            provenance,
        })
    }

    /// Like [`Cdc::from_codewords`] without the checks.
    pub(crate) fn from_trusted(
        field: Field,
        n: usize,
        k: usize,
        d_claim: usize,
        words: Vec<Subspace>,
        provenance: Provenance,
    ) -> Cdc {
        Cdc {
            field,
            n,
            k,
            d_claim,
            words: Codewords::Materialized(Arc::new(words)),
            provenance,
        }
    }

    pub fn streaming(
        field: Field,
        n: usize,
        k: usize,
        d_claim: usize,
        source: Arc<dyn CodewordSource>,
        provenance: Provenance,
    ) -> Cdc {
        Cdc {
            field,
            n,
            k,
            d_claim,
            words: Codewords::Streaming(source),
            provenance,
        }
    }

    pub fn empty(field: Field, n: usize, k: usize, d_claim: usize, recipe: &str) -> Cdc {
        Self::from_trusted(field, n, k, d_claim, Vec::new(), Provenance::tag(recipe))
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d_claim(&self) -> usize {
        self.d_claim
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Cdc {
        self.provenance = provenance;
        self
    }

    pub fn with_d_claim(mut self, d: usize) -> Cdc {
        self.d_claim = d;
        self
    }

    pub fn len(&self) -> u64 {
        match &self.words {
            Codewords::Materialized(v) => v.len() as u64,
            Codewords::Streaming(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_materialized(&self) -> bool {
        matches!(self.words, Codewords::Materialized(_))
    }

    pub fn get(&self, idx: u64) -> Subspace {
        match &self.words {
            Codewords::Materialized(v) => v[idx as usize].clone(),
            Codewords::Streaming(s) => s.get(idx),
        }
    }

    /// Materialized codewords, if held in memory.
    pub fn codewords(&self) -> Option<&[Subspace]> {
        match &self.words {
            Codewords::Materialized(v) => Some(v),
            Codewords::Streaming(_) => None,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Subspace> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }

    /// The code as a random-access source.
    pub fn source(&self) -> Arc<dyn CodewordSource> {
        match &self.words {
            Codewords::Streaming(s) => Arc::clone(s),
            Codewords::Materialized(v) => Arc::new(sources::VecSource(Arc::clone(v))),
        }
    }

    /// Loads every codeword into memory, checking for duplicates.
    pub fn materialize(&self) -> Result<Cdc> {
        self.materialize_with_cap(MATERIALIZE_CAP)
    }

    pub fn materialize_with_cap(&self, cap: u64) -> Result<Cdc> {
        if self.is_materialized() {
            return Ok(self.clone());
        }
        if self.len() > cap {
            return Err(Error::CapExceeded {
                what: "code".into(),
                size: self.len().to_string(),
                cap,
            });
        }
        let words: Vec<Subspace> = self.iter().collect();
        let mut seen = HashSet::with_capacity(words.len());
        for w in &words {
            if !seen.insert(w) {
                return Err(Error::pre(format!(
                    "duplicate codeword {w} in {}",
                    self.provenance.recipe
                )));
            }
        }
        Ok(Cdc {
            words: Codewords::Materialized(Arc::new(words)),
            ..self.clone()
        })
    }

    /// Codewords in canonical (serialized RREF) order.
    pub fn canonical_sorted(&self) -> Vec<Subspace> {
        let mut v: Vec<Subspace> = self.iter().collect();
        v.sort();
        v
    }

    /// Codewords at the given positions, as a new materialized code.
    pub fn subcode(&self, indices: &[u64], d_claim: usize, recipe: &str) -> Result<Cdc> {
        let words = indices.iter().map(|&i| self.get(i)).collect();
        Cdc::from_codewords(
            self.field,
            self.n,
            self.k,
            d_claim,
            words,
            Provenance::tag(recipe),
        )
    }

    /// Position of `u` in generation order, by linear scan.
    pub fn position(&self, u: &Subspace) -> Option<u64> {
        (0..self.len()).find(|&i| &self.get(i) == u)
    }
}

/// Builds `R(I_k | M)`, which is already in RREF.
pub(crate) fn lift(k: usize, m: &Matrix) -> Subspace {
    let n = k + m.cols();
    if let Some(rows) = m.packed() {
        if n <= 64 {
            let lifted: Rows = rows
                .iter()
                .enumerate()
                .map(|(i, &r)| bit(i) | (r >> k))
                .collect();
            return Subspace::from_rref_unchecked(Matrix::from_bits(m.field(), n, &lifted));
        }
    }
    let id = Matrix::identity(m.field(), k);
    Subspace::from_rref_unchecked(id.hstack(m).expect("row counts agree"))
}

struct LiftedSource {
    k: usize,
    handle: RankCodeHandle,
    len: u64,
}

impl CodewordSource for LiftedSource {
    fn len(&self) -> u64 {
        self.len
    }

    fn get(&self, idx: u64) -> Subspace {
        lift(self.k, &self.handle.matrix(idx))
    }
}

fn check_lmrd_params(n: usize, k: usize, d: usize) -> Result<()> {
    if k == 0 || k >= n {
        return Err(Error::pre(format!("need 1 <= k < n, got k={k}, n={n}")));
    }
    if d == 0 || !d.is_multiple_of(2) || d / 2 > k.min(n - k) {
        return Err(Error::pre(format!(
            "subspace distance {d} must be even with d/2 <= min(k, n-k) = {}",
            k.min(n - k)
        )));
    }
    Ok(())
}

/// The lifted MRD code `{R(I_k | M) : M ∈ (k × (n−k), d/2) Gabidulin}`.
pub fn lifted_mrd(field: Field, n: usize, k: usize, d: usize) -> Result<Cdc> {
    check_lmrd_params(n, k, d)?;
    let handle = gabidulin_mrd(field, k, n - k, d / 2)?;
    lifted_from_handle(field, n, k, d, handle)
}

/// Lifts an arbitrary rank-metric view with `k` rows.
pub fn lifted_from_handle(
    field: Field,
    n: usize,
    k: usize,
    d: usize,
    handle: RankCodeHandle,
) -> Result<Cdc> {
    if handle.shape() != (k, n - k) {
        return Err(Error::DimensionMismatch(format!(
            "rank code shape {:?} for k={k}, n={n}",
            handle.shape()
        )));
    }
    let len = handle.len_u64().ok_or_else(|| Error::CapExceeded {
        what: "lifted MRD code".into(),
        size: handle.len().to_string(),
        cap: u64::MAX,
    })?;
    let prov = Provenance {
        recipe: format!("lifted_mrd(q={},n={n},k={k},d={d})", field.q()),
        lmrd: Some(LmrdPart {
            offset: 0,
            handle: handle.clone(),
        }),
        ..Default::default()
    };
    let src = Arc::new(LiftedSource { k, handle, len });
    Ok(Cdc::streaming(field, n, k, d, src, prov))
}

/// Expected size of a lifted MRD code.
pub fn lifted_mrd_size(q: u64, n: usize, k: usize, d: usize) -> Result<BigUint> {
    check_lmrd_params(n, k, d)?;
    mrd_size(q, k, n - k, d / 2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubcodeStrategy {
    /// Use the lifted MRD nesting recorded in the provenance.
    LmrdNested,
    /// Deterministic greedy scan; the seed rotates the start.
    Greedy(u64),
}

/// Indices of a partial-spread subcode (pairwise distance 2k) of `c`.
pub fn partial_spread_indices(c: &Cdc, strategy: SubcodeStrategy) -> Result<Vec<u64>> {
    let k = c.k();
    if c.d_claim() == 2 * k {
        return Ok((0..c.len()).collect());
    }
    match strategy {
        SubcodeStrategy::LmrdNested => {
            let prov = c.provenance();
            if let Some(ps) = &prov.partial_spread {
                return Ok(ps.clone());
            }
            let part = prov
                .lmrd
                .as_ref()
                .ok_or_else(|| Error::pre("code carries no lifted MRD subcode metadata"))?;
            let (rows, cols) = part.handle.shape();
            if k > cols || rows != k {
                return Err(Error::pre("lifted MRD part has no spread-distance subcode"));
            }
            let nested = if part.handle.d_r() == k {
                part.handle.clone()
            } else {
                part.handle.nested_subcode(k)?
            };
            let len = nested
                .len_u64()
                .ok_or_else(|| Error::pre("nested subcode too large"))?;
            let mut out: Vec<u64> = (0..len)
                .map(|i| {
                    let m = nested.matrix(i);
                    part.offset
                        + part
                            .handle
                            .index_of(&m)
                            .expect("nested codeword lies in the parent")
                })
                .collect();
            out.extend(prov.extra_disjoint.iter().copied());
            Ok(out)
        }
        SubcodeStrategy::Greedy(seed) => {
            let mut order: Vec<(Subspace, u64)> = (0..c.len()).map(|i| (c.get(i), i)).collect();
            order.sort();
            if !order.is_empty() {
                let shift = (seed % order.len() as u64) as usize;
                order.rotate_left(shift);
            }
            let mut chosen: Vec<(Subspace, u64)> = Vec::new();
            for (u, i) in order {
                if chosen
                    .iter()
                    .all(|(w, _)| w.distance_unchecked(&u) == 2 * k)
                {
                    chosen.push((u, i));
                }
            }
            Ok(chosen.into_iter().map(|(_, i)| i).collect())
        }
    }
}

/// A partial-spread subcode of `c` as its own code.
pub fn partial_spread_subcode(c: &Cdc, strategy: SubcodeStrategy) -> Result<Cdc> {
    if c.d_claim() == 2 * c.k() {
        return Ok(c.clone());
    }
    let idx = partial_spread_indices(c, strategy)?;
    let sub = c.subcode(
        &idx,
        2 * c.k(),
        &format!("partial_spread_subcode({})", c.provenance().recipe),
    )?;
    Ok(sub)
}

/// A random sample of `count` codewords drawn without replacement.
pub fn random_subset(c: &Cdc, count: usize, seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = c.len();
    if (count as u64) >= len {
        return (0..len).collect();
    }
    if len <= 1 << 24 {
        let mut all: Vec<u64> = (0..len).collect();
        all.partial_shuffle(&mut rng, count);
        let mut out = all[..count].to_vec();
        out.sort_unstable();
        return out;
    }
    let mut set = std::collections::BTreeSet::new();
    while set.len() < count {
        set.insert(rand::Rng::gen_range(&mut rng, 0..len));
    }
    set.into_iter().collect()
}

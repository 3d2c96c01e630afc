use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use super::{concat_columns, CompositionProfile};
use crate::cdc::{random_subset, BlockLayout, Cdc, CodewordSource, LmrdPart, Provenance};
use crate::error::{Error, Result};
use crate::gf::Field;
use crate::linalg::Matrix;
use crate::rankmetric::{mrd_size, rank_distribution, RankCodeHandle};
use crate::subspace::Subspace;

enum Component {
    Code(Arc<dyn CodewordSource>),
    Rank(RankCodeHandle),
    Zero(Matrix),
}

impl Component {
    fn len(&self) -> u64 {
        match self {
            Component::Code(s) => s.len(),
            Component::Rank(h) => h.len_u64().expect("checked when building"),
            Component::Zero(_) => 1,
        }
    }

    fn matrix(&self, idx: u64) -> Matrix {
        match self {
            Component::Code(s) => s.get(idx).generator().clone(),
            Component::Rank(h) => h.matrix(idx),
            Component::Zero(m) => m.clone(),
        }
    }
}

struct Block {
    start: u64,
    len: u64,
    comps: Vec<Arc<Component>>,
}

struct LinkageSource {
    field: Field,
    n: usize,
    sigma: Vec<usize>,
    blocks: Vec<Block>,
    len: u64,
}

impl CodewordSource for LinkageSource {
    fn len(&self) -> u64 {
        self.len
    }

    fn get(&self, idx: u64) -> Subspace {
        let b = self.blocks.partition_point(|b| b.start <= idx) - 1;
        let block = &self.blocks[b];
        let mut rem = idx - block.start;
        let mut mats: Vec<Matrix> = vec![Matrix::zeros(self.field, 0, 0); block.comps.len()];
        for (j, c) in block.comps.iter().enumerate().rev() {
            let r = c.len();
            mats[j] = c.matrix(rem % r);
            rem /= r;
        }
        let parts: Vec<(usize, &Matrix)> = mats
            .iter()
            .enumerate()
            .map(|(j, m)| (self.sigma[j], m))
            .collect();
        concat_columns(self.field, self.n, &parts)
    }
}

fn to_u64(x: &BigUint, what: &str) -> Result<u64> {
    x.to_u64().ok_or_else(|| Error::CapExceeded {
        what: what.into(),
        size: x.to_string(),
        cap: u64::MAX,
    })
}

/// The multi-block linkage code `∪_i C^i` with
/// `C^i = {R(M_1|…|M_{i−1}|τ(U_i)|M_{i+1}|…|M_l)}`, where the `M_j` before
/// block `i` have rank at most `k − d/2`.
///
/// Codewords are enumerated block by block; inside a block the component
/// tuple is read as a mixed-radix number with the last component least
/// significant.
pub fn multiblock_linkage(
    profile: &CompositionProfile,
    codes: &[Cdc],
    mrd: &[RankCodeHandle],
) -> Result<Cdc> {
    let (field, k, d, l) = (profile.field, profile.k, profile.d, profile.l());
    if codes.len() != l || mrd.len() != l {
        return Err(Error::pre(format!(
            "need {l} codes and {l} rank-metric codes"
        )));
    }
    for (i, (c, m)) in codes.iter().zip(mrd).enumerate() {
        if c.field() != field || m.field() != field {
            return Err(Error::FieldMismatch);
        }
        if c.n() != profile.nbar[i] || c.k() != k || c.d_claim() < d {
            return Err(Error::DimensionMismatch(format!(
                "block {i}: code ({}, {}; {}) does not fit n_i={}, d={d}, k={k}",
                c.n(),
                c.d_claim(),
                c.k(),
                profile.nbar[i]
            )));
        }
        if m.shape() != (k, profile.nbar[i]) || m.d_r() < d / 2 {
            return Err(Error::DimensionMismatch(format!(
                "block {i}: rank-metric code {:?} needs shape {k}x{} and distance >= {}",
                m,
                profile.nbar[i],
                d / 2
            )));
        }
    }
    let t = k - d / 2;
    let full: Vec<Arc<Component>> = mrd
        .iter()
        .map(|m| Arc::new(Component::Rank(m.clone())))
        .collect();
    let mut low: Vec<Arc<Component>> = Vec::with_capacity(l);
    for (j, m) in mrd.iter().enumerate().take(l - 1) {
        let comp = if t < m.d_r() {
            Component::Zero(Matrix::zeros(field, k, profile.nbar[j]))
        } else {
            let f = m.rank_filtered(t)?;
            f.len_u64()
                .ok_or_else(|| Error::pre("rank filter overflow"))?;
            Component::Rank(f)
        };
        low.push(Arc::new(comp));
    }
    for m in mrd {
        m.len_u64().ok_or_else(|| Error::CapExceeded {
            what: "rank-metric component".into(),
            size: m.len().to_string(),
            cap: u64::MAX,
        })?;
    }
    let mut blocks = Vec::with_capacity(l);
    let mut start = 0u64;
    for i in 0..l {
        let mut comps = Vec::with_capacity(l);
        for j in 0..l {
            comps.push(match j.cmp(&i) {
                std::cmp::Ordering::Less => Arc::clone(&low[j]),
                std::cmp::Ordering::Equal => Arc::new(Component::Code(codes[i].source())),
                std::cmp::Ordering::Greater => Arc::clone(&full[j]),
            });
        }
        let size = comps.iter().fold(BigUint::one(), |acc, c| acc * c.len());
        let len = to_u64(&size, "linkage block")?;
        blocks.push(Block { start, len, comps });
        start = start
            .checked_add(len)
            .ok_or_else(|| Error::pre("linkage code size exceeds u64"))?;
    }
    let sigma = profile.sigma();
    let ranges: Vec<(u64, u64)> = blocks.iter().map(|b| (b.start, b.start + b.len)).collect();
    let single_full = |c: &Cdc| c.len() == 1 && c.n() == k;
    let mut prov = Provenance {
        recipe: format!(
            "multiblock_linkage(q={},nbar={:?},k={k},d={d})",
            field.q(),
            profile.nbar
        ),
        blocks: Some(BlockLayout {
            sigma: sigma.clone(),
            ranges: ranges.clone(),
        }),
        ..Default::default()
    };
    if l == 2 && single_full(&codes[0]) {
        prov.lmrd = Some(LmrdPart {
            offset: 0,
            handle: mrd[1].clone(),
        });
        if single_full(&codes[1]) {
            // zero matrix first in the filtered order: R(0 | I_k)
            prov.extra_disjoint = vec![ranges[1].0];
        }
    }
    let src = LinkageSource {
        field,
        n: profile.n(),
        sigma,
        blocks,
        len: start,
    };
    Ok(Cdc::streaming(
        field,
        profile.n(),
        k,
        d,
        Arc::new(src),
        prov,
    ))
}

/// Lower bound from the linkage construction with block codes of sizes `a_values`.
pub fn cor1_bound(
    q: u64,
    k: usize,
    d: usize,
    nbar: &[usize],
    a_values: &[BigUint],
) -> Result<BigUint> {
    if nbar.len() != a_values.len() || nbar.len() < 2 {
        return Err(Error::pre(
            "need one A value per block and at least two blocks",
        ));
    }
    if d == 0 || !d.is_multiple_of(2) || d > 2 * k {
        return Err(Error::pre(format!("invalid subspace distance {d}")));
    }
    let low = |nj: usize| -> Result<BigUint> {
        let mut s = BigUint::one();
        for r in d / 2..=(k - d / 2) {
            s += rank_distribution(q, k, nj, d / 2, r)?;
        }
        Ok(s)
    };
    let mut total = BigUint::default();
    for i in 0..nbar.len() {
        let mut term = a_values[i].clone();
        for &nj in &nbar[..i] {
            term *= low(nj)?;
        }
        for &nj in &nbar[i + 1..] {
            term *= mrd_size(q, k, nj, d / 2)?;
        }
        total += term;
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubstructureReport {
    pub checked: u64,
    pub violations_total: u64,
    /// First few offending codeword indices.
    pub violations: Vec<u64>,
}

impl SubstructureReport {
    pub fn passed(&self) -> bool {
        self.violations_total == 0
    }
}

fn meets_hole(u: &Subspace, lo: usize, hi: usize) -> bool {
    u.generator().columns(lo, hi).rank() < u.k()
}

fn substructure_over(c: &Cdc, indices: impl Iterator<Item = u64>) -> Result<SubstructureReport> {
    let layout = c
        .provenance()
        .blocks
        .as_ref()
        .ok_or_else(|| Error::pre("code carries no linkage block layout"))?;
    let mut rep = SubstructureReport {
        checked: 0,
        violations_total: 0,
        violations: Vec::new(),
    };
    for idx in indices {
        let Some(b) = layout.ranges.iter().position(|&(s, e)| s <= idx && idx < e) else {
            continue;
        };
        rep.checked += 1;
        if meets_hole(&c.get(idx), layout.sigma[b], layout.sigma[b + 1]) {
            rep.violations_total += 1;
            if rep.violations.len() < 64 {
                rep.violations.push(idx);
            }
        }
    }
    Ok(rep)
}

/// Checks that every codeword of block `i` meets `E_i` (block `i`'s
/// coordinates zeroed) trivially.
pub fn check_special_substructure(c: &Cdc) -> Result<SubstructureReport> {
    substructure_over(c, 0..c.len())
}

/// [`check_special_substructure`] on `count` seeded random codewords.
pub fn check_special_substructure_sampled(
    c: &Cdc,
    count: usize,
    seed: u64,
) -> Result<SubstructureReport> {
    substructure_over(c, random_subset(c, count, seed).into_iter())
}

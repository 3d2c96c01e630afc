use std::sync::Arc;

use super::{block_diagonal, concat_columns};
use crate::cdc::{BlockLayout, Cdc, CodewordSource, LmrdPart, Provenance};
use crate::error::{Error, Result};
use crate::gf::Field;
use crate::rankmetric::{gabidulin_mrd, RankCodeHandle};
use crate::subspace::Subspace;

struct PairingSource {
    field: Field,
    n: usize,
    n1: usize,
    c0: Arc<dyn CodewordSource>,
    mrd: RankCodeHandle,
    mrd_len: u64,
    lifted: u64,
    pairs: Vec<Subspace>,
}

impl CodewordSource for PairingSource {
    fn len(&self) -> u64 {
        self.lifted + self.pairs.len() as u64
    }

    fn get(&self, idx: u64) -> Subspace {
        if idx >= self.lifted {
            return self.pairs[(idx - self.lifted) as usize].clone();
        }
        let u = self.c0.get(idx / self.mrd_len);
        let m = self.mrd.matrix(idx % self.mrd_len);
        concat_columns(self.field, self.n, &[(0, u.generator()), (self.n1, &m)])
    }
}

/// `{R(τ(U) | M) : U ∈ C_0, M ∈ M_0} ∪ {U_1^i × U_2^i : i < s}` where `M_0`
/// is a `(k × n_2, d/2)` MRD code and the `s = min(#C_1, #C_2)` pairs match
/// the codewords of `C_1` and `C_2` in canonical order.
pub fn pairing_construction(
    nbar: (usize, usize),
    abar: (usize, usize),
    bbar: (usize, usize),
    d: usize,
    c0: &Cdc,
    c1: &Cdc,
    c2: &Cdc,
) -> Result<Cdc> {
    let (n1, n2) = nbar;
    let (a1, a2) = abar;
    let (b1, b2) = bbar;
    let (field, k) = (c0.field(), c0.k());
    if c1.field() != field || c2.field() != field {
        return Err(Error::FieldMismatch);
    }
    if d == 0 || !d.is_multiple_of(2) || d > 2 * k || d / 2 > n2 {
        return Err(Error::pre(format!(
            "invalid distance {d} for k={k}, n_2={n2}"
        )));
    }
    if a1 + a2 != k || a1 > k - d / 2 || b1 + b2 != k - d / 2 || b1 > a1 || b2 > a2 {
        return Err(Error::pre(format!(
            "need a_1 + a_2 = k, a_1 <= k - d/2, b_1 + b_2 = k - d/2 (abar={abar:?}, bbar={bbar:?}, k={k}, d={d})"
        )));
    }
    let checks = [
        (c0, n1, k, d, "C_0"),
        (c1, n1, a1, 2 * a1 - 2 * b1, "C_1"),
        (c2, n2, a2, 2 * a2 - 2 * b2, "C_2"),
    ];
    for (c, n, dim, dist, name) in checks {
        if !c.is_empty() && (c.n() != n || c.k() != dim || c.d_claim() < dist) {
            return Err(Error::DimensionMismatch(format!(
                "{name} is ({}, *, {}; {}), need ({n}, *, {dist}; {dim})",
                c.n(),
                c.d_claim(),
                c.k()
            )));
        }
    }
    let n = n1 + n2;
    let mrd = gabidulin_mrd(field, k, n2, d / 2)?;
    let mrd_len = mrd
        .len_u64()
        .ok_or_else(|| Error::pre("MRD code too large to enumerate"))?;
    let lifted = c0
        .len()
        .checked_mul(mrd_len)
        .ok_or_else(|| Error::pre("lifted part exceeds u64"))?;
    let (u1, u2) = (c1.canonical_sorted(), c2.canonical_sorted());
    let pairs: Vec<Subspace> = u1
        .iter()
        .zip(&u2)
        .map(|(x, y)| block_diagonal(field, n, &[(0, x), (n1, y)]))
        .collect();
    let mut prov = Provenance {
        recipe: format!(
            "pairing(q={},nbar={nbar:?},abar={abar:?},bbar={bbar:?},d={d})",
            field.q()
        ),
        blocks: Some(BlockLayout {
            sigma: vec![0, n1, n],
            ranges: vec![(0, lifted)],
        }),
        ..Default::default()
    };
    if c0.len() == 1 && n1 == k {
        prov.lmrd = Some(LmrdPart {
            offset: 0,
            handle: mrd.clone(),
        });
    }
    let src = PairingSource {
        field,
        n,
        n1,
        c0: c0.source(),
        mrd,
        mrd_len,
        lifted,
        pairs,
    };
    Ok(Cdc::streaming(field, n, k, d, Arc::new(src), prov))
}

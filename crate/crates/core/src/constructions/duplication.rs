use std::collections::HashSet;
use std::sync::Arc;

use crate::cdc::{
    lifted_mrd, partial_spread_indices, Cdc, CodewordSource, ExcludeSource, Provenance,
    SubcodeStrategy, MATERIALIZE_CAP,
};
use crate::error::{Error, Result};
use crate::gf::Field;
use crate::linalg::{Matrix, Rows};
use crate::rankmetric::RankCodeHandle;
use crate::subspace::Subspace;
use crate::verify::full_pairwise_check;

/// A codeword `U` of a code together with a complementary subspace `S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub codeword: Subspace,
    pub subspace: Subspace,
}

/// Codes `(D_0, …, D_r)`, `r = k − d/2`, where every member of `D_i` meets
/// the witness subspace of `D_i` in dimension at most `i`.
#[derive(Clone, Debug)]
pub struct NdkSequence {
    pub members: Vec<Cdc>,
    pub witnesses: Vec<Witness>,
}

impl NdkSequence {
    pub fn new(members: Vec<Cdc>, witnesses: Vec<Witness>) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| Error::pre("empty sequence"))?;
        let (n, k, d) = (first.n(), first.k(), first.d_claim());
        if members.len() != k - d / 2 + 1 || witnesses.len() != members.len() {
            return Err(Error::pre(format!(
                "an ({n},{d},{k})-sequence has {} members, each with a witness",
                k - d / 2 + 1
            )));
        }
        if members
            .iter()
            .any(|m| m.n() != n || m.k() != k || m.d_claim() < d || m.field() != first.field())
        {
            return Err(Error::pre("sequence members must share field, n, k and d"));
        }
        let seq = NdkSequence { members, witnesses };
        seq.verify()?;
        Ok(seq)
    }

    /// Every member the lifted MRD code, witnessed by `R(I|0)` and `R(0|I)`.
    pub fn lmrd(field: Field, n: usize, k: usize, d: usize) -> Result<Self> {
        let c = lifted_mrd(field, n, k, d)?;
        let w = Witness {
            codeword: Subspace::coordinate(field, n, 0..k),
            subspace: Subspace::coordinate(field, n, k..n),
        };
        let r = k - d / 2;
        Self::new(vec![c; r + 1], vec![w; r + 1])
    }

    pub fn r(&self) -> usize {
        self.members.len() - 1
    }

    pub fn n(&self) -> usize {
        self.members[0].n()
    }

    pub fn k(&self) -> usize {
        self.members[0].k()
    }

    pub fn d(&self) -> usize {
        self.members[0].d_claim()
    }

    /// Full scan of the witness conditions.
    pub fn verify(&self) -> Result<()> {
        let (n, k) = (self.n(), self.k());
        for (i, (m, w)) in self.members.iter().zip(&self.witnesses).enumerate() {
            if w.subspace.n() != n
                || w.subspace.k() != n - k
                || !w.codeword.is_disjoint(&w.subspace)?
            {
                return Err(Error::Verification(format!(
                    "D_{i}: witness subspace must be an ({})-space disjoint from the witness codeword",
                    n - k
                )));
            }
            if standard_lifting(m, w).is_some() {
                continue;
            }
            let mut found = false;
            for u in m.iter() {
                found |= u == w.codeword;
                if u.intersection_dim(&w.subspace)? > i {
                    return Err(Error::Verification(format!(
                        "D_{i}: codeword {u} meets the witness subspace in dimension > {i}"
                    )));
                }
            }
            if !found {
                return Err(Error::Verification(format!(
                    "D_{i}: witness codeword is not in the code"
                )));
            }
        }
        Ok(())
    }
}

/// A partition `(C_0, …, C_r)` of a code in which `C_0 ∪ … ∪ C_i` has
/// distance at least `2k − 2i`. Parts below `r` are explicit index lists;
/// `C_r` is everything else.
#[derive(Clone, Debug)]
pub struct DistancePartition {
    pub parent: Cdc,
    low: Vec<Vec<u64>>,
}

impl DistancePartition {
    pub fn new(parent: Cdc, low: Vec<Vec<u64>>) -> Result<Self> {
        let (k, d) = (parent.k(), parent.d_claim());
        let r = k - d / 2;
        if low.len() != r {
            return Err(Error::pre(format!(
                "need {r} explicit parts below the last"
            )));
        }
        let mut seen = HashSet::new();
        let mut low = low;
        for part in &mut low {
            part.sort_unstable();
            for &i in part.iter() {
                if i >= parent.len() || !seen.insert(i) {
                    return Err(Error::pre(format!(
                        "index {i} out of range or in two parts"
                    )));
                }
            }
        }
        Ok(DistancePartition { parent, low })
    }

    /// `(∅, …, ∅, C)`.
    pub fn trivial(parent: Cdc) -> Result<Self> {
        let r = parent.k() - parent.d_claim() / 2;
        Self::new(parent, vec![Vec::new(); r])
    }

    /// `(C', ∅, …, ∅, C ∖ C')` for a partial-spread subcode `C'`.
    pub fn from_partial_spread(parent: Cdc, indices: Vec<u64>) -> Result<Self> {
        let r = parent.k() - parent.d_claim() / 2;
        if r == 0 {
            return Self::new(parent, Vec::new());
        }
        let mut low = vec![Vec::new(); r];
        low[0] = indices;
        Self::new(parent, low)
    }

    pub fn r(&self) -> usize {
        self.low.len()
    }

    pub fn part_len(&self, i: usize) -> u64 {
        if i < self.r() {
            self.low[i].len() as u64
        } else {
            self.parent.len() - self.low.iter().map(|p| p.len() as u64).sum::<u64>()
        }
    }

    pub fn part(&self, i: usize) -> Option<&[u64]> {
        self.low.get(i).map(Vec::as_slice)
    }

    /// Checks the distance condition on the explicit parts.
    pub fn verify(&self, cap: u64) -> Result<()> {
        let k = self.parent.k();
        let mut acc: Vec<u64> = Vec::new();
        for (i, part) in self.low.iter().enumerate() {
            acc.extend(part);
            if acc.len() < 2 {
                continue;
            }
            let sub = self
                .parent
                .subcode(&acc, 2 * k - 2 * i, "distance-partition prefix")?;
            let rep = full_pairwise_check(&sub, cap)?;
            if !rep.passed() {
                return Err(Error::Verification(format!(
                    "C_0..C_{i} has distance {:?} < {}",
                    rep.min_distance_found,
                    2 * k - 2 * i
                )));
            }
        }
        Ok(())
    }
}

/// A sequence member re-expressed in the basis (witness codeword, witness subspace).
enum Frame {
    /// `G B^{-1} = [X | Y]` per codeword, `X` being `k × k`.
    Explicit {
        member: Arc<dyn CodewordSource>,
        binv: Matrix,
        k: usize,
    },
    /// A lifted MRD code with witnesses `R(I|0)`, `R(0|I)`: `X = I`, `Y = M`.
    Lifted(RankCodeHandle),
}

/// The rank-metric code behind `m` when `m` is exactly its lifting and `w`
/// is the standard witness pair.
fn standard_lifting(m: &Cdc, w: &Witness) -> Option<RankCodeHandle> {
    let (n, k) = (m.n(), m.k());
    let part = m.provenance().lmrd.as_ref()?;
    let full = part.offset == 0
        && part.handle.len_u64() == Some(m.len())
        && part.handle.shape().0 == k
        && part.handle.is_linear();
    let std_w = w.codeword == Subspace::coordinate(m.field(), n, 0..k)
        && w.subspace == Subspace::coordinate(m.field(), n, k..n);
    (full && std_w).then(|| part.handle.clone())
}

impl Frame {
    fn new(m: &Cdc, w: &Witness) -> Result<Frame> {
        if let Some(h) = standard_lifting(m, w) {
            return Ok(Frame::Lifted(h));
        }
        let b = w.codeword.generator().vstack(w.subspace.generator())?;
        Ok(Frame::Explicit {
            member: m.source(),
            binv: b.inverse()?,
            k: m.k(),
        })
    }

    fn len(&self) -> u64 {
        match self {
            Frame::Explicit { member, .. } => member.len(),
            Frame::Lifted(h) => h.len_u64().expect("checked on construction"),
        }
    }
}

struct DuplicationSource {
    field: Field,
    /// Ambient of the parent code, `k + t`.
    nc: usize,
    n: usize,
    parent: Arc<dyn CodewordSource>,
    low: Vec<Vec<u64>>,
    rest: ExcludeSource,
    /// `frames[i]` describes `D_{r−i}`, used for part `i`.
    frames: Vec<Arc<Frame>>,
    starts: Vec<u64>,
    a: Arc<dyn CodewordSource>,
    len: u64,
}

impl DuplicationSource {
    /// `R([X·τ(U) | Y])`, with `X = None` meaning the identity.
    fn embed(&self, u: &Subspace, x: Option<&Matrix>, y: &Matrix) -> Subspace {
        let tu = u.generator();
        if self.n <= 64 {
            if let (Some(rows), Some(yb)) = (tu.packed(), y.packed()) {
                let mut out: Rows = Rows::with_capacity(rows.len());
                match x.map(Matrix::packed) {
                    None => {
                        for (r, yr) in rows.iter().zip(yb) {
                            out.push(r | (yr >> self.nc));
                        }
                    }
                    Some(Some(xb)) => {
                        for (xr, yr) in xb.iter().zip(yb) {
                            let mut v = 0u64;
                            for (c, r) in rows.iter().enumerate() {
                                if xr & (1 << (63 - c)) != 0 {
                                    v ^= r;
                                }
                            }
                            out.push(v | (yr >> self.nc));
                        }
                    }
                    Some(None) => unreachable!("binary matrices are packed"),
                }
                return Subspace::from_bits(self.field, self.n, &mut out);
            }
        }
        match x {
            None => super::concat_columns(self.field, self.n, &[(0, tu), (self.nc, y)]),
            Some(x) => {
                let xu = x.matmul(tu).expect("shapes agree");
                super::concat_columns(self.field, self.n, &[(0, &xu), (self.nc, y)])
            }
        }
    }
}

impl CodewordSource for DuplicationSource {
    fn len(&self) -> u64 {
        self.len
    }

    fn get(&self, idx: u64) -> Subspace {
        let part = self.starts.partition_point(|&s| s <= idx) - 1;
        let off = idx - self.starts[part];
        if part == self.frames.len() {
            return self.a.get(off).embed(self.n, self.nc);
        }
        let frame = &self.frames[part];
        let dl = frame.len();
        let (ci, di) = (off / dl, off % dl);
        let pos = if part < self.low.len() {
            self.low[part][ci as usize]
        } else {
            self.rest.select(ci)
        };
        let u = self.parent.get(pos);
        match frame.as_ref() {
            Frame::Explicit { member, binv, k } => {
                let g = member
                    .get(di)
                    .generator()
                    .matmul(binv)
                    .expect("shapes agree");
                self.embed(&u, Some(&g.columns(0, *k)), &g.columns(*k, g.cols()))
            }
            Frame::Lifted(h) => self.embed(&u, None, &h.matrix(di)),
        }
    }
}

/// Cap on the size of a recorded partial-spread subcode.
const PARTIAL_SPREAD_RECORD_CAP: u64 = 1 << 22;

/// The code `A ∪ ⋃_i ⋃_{U ∈ C_i} φ_U(D_{r−i})` in `F_q^{k+s+t}`, where the
/// parent code lives on the first `k + t` coordinates, `S` is spanned by the
/// last `s`, and `φ_U` maps the witness codeword of `D_{r−i}` onto `U` and its
/// witness subspace onto `S`.
///
/// Codewords are ordered by part, then parent codeword, then `D` codeword,
/// with the embedded `A` last.
pub fn duplication(partition: &DistancePartition, seq: &NdkSequence, a: &Cdc) -> Result<Cdc> {
    let c = &partition.parent;
    let (field, k) = (c.field(), c.k());
    let d = seq.d();
    let r = seq.r();
    if seq.k() != k || c.field() != seq.members[0].field() {
        return Err(Error::DimensionMismatch(
            "parent and sequence must share field and k".into(),
        ));
    }
    if partition.r() != r || c.d_claim() < d {
        return Err(Error::DimensionMismatch(format!(
            "partition of a code with distance {} does not match the sequence (d = {d})",
            c.d_claim()
        )));
    }
    let s = seq.n() - k;
    let nc = c.n();
    let n = nc + s;
    if !a.is_empty() && (a.n() != s || a.k() != k || a.d_claim() < d || a.field() != field) {
        return Err(Error::DimensionMismatch(format!(
            "A must be an ({s}, *, {d}; {k}) code"
        )));
    }
    seq.verify()?;
    let mut frames: Vec<Arc<Frame>> = Vec::with_capacity(r + 1);
    let mut built: Vec<Option<Arc<Frame>>> = vec![None; r + 1];
    for i in 0..=r {
        let di = r - i;
        let reuse = (0..=r).find(|&j| {
            built[j].is_some()
                && same_storage(&seq.members[j], &seq.members[di])
                && seq.witnesses[j] == seq.witnesses[di]
        });
        let f = match reuse {
            Some(j) => Arc::clone(built[j].as_ref().expect("checked")),
            None => Arc::new(Frame::new(&seq.members[di], &seq.witnesses[di])?),
        };
        built[di] = Some(Arc::clone(&f));
        frames.push(f);
    }
    let mut starts = Vec::with_capacity(r + 2);
    let mut len = 0u64;
    for (i, f) in frames.iter().enumerate() {
        starts.push(len);
        let size = partition
            .part_len(i)
            .checked_mul(f.len())
            .ok_or_else(|| Error::pre("duplication size exceeds u64"))?;
        len = len
            .checked_add(size)
            .ok_or_else(|| Error::pre("duplication size exceeds u64"))?;
    }
    starts.push(len);
    len += a.len();
    let all_low: Vec<u64> = partition.low.iter().flatten().copied().collect();
    let prov = Provenance {
        recipe: format!(
            "duplication(q={},n={n},k={k},d={d},parent={})",
            field.q(),
            c.provenance().recipe
        ),
        partial_spread: induced_partial_spread(partition, seq, a, &frames, &starts),
        ..Default::default()
    };
    let src = DuplicationSource {
        field,
        nc,
        n,
        parent: c.source(),
        low: partition.low.clone(),
        rest: ExcludeSource::new(c, all_low),
        frames,
        starts,
        a: a.source(),
        len,
    };
    Ok(Cdc::streaming(field, n, k, d, Arc::new(src), prov))
}

/// Partial spread `φ_U(P)` for `U ∈ C_0` plus the embedded `P'`, where `P`
/// is the part of a partial-spread subcode of `D_r` disjoint from its
/// witness subspace and `P'` a partial-spread subcode of `A`.
fn induced_partial_spread(
    partition: &DistancePartition,
    seq: &NdkSequence,
    a: &Cdc,
    frames: &[Arc<Frame>],
    starts: &[u64],
) -> Option<Vec<u64>> {
    let r = seq.r();
    let dr = &seq.members[r];
    let s_d = &seq.witnesses[r].subspace;
    let p: Vec<u64> = partial_spread_indices(dr, SubcodeStrategy::LmrdNested)
        .ok()?
        .into_iter()
        .filter(|&i| dr.get(i).is_disjoint(s_d).unwrap_or(false))
        .collect();
    let pa: Vec<u64> = if a.len() <= 1 {
        (0..a.len()).collect()
    } else {
        partial_spread_indices(a, SubcodeStrategy::LmrdNested).ok()?
    };
    let c0 = partition.part_len(0);
    if c0.saturating_mul(p.len() as u64) > PARTIAL_SPREAD_RECORD_CAP {
        return None;
    }
    let dl = frames[0].len();
    let mut out = Vec::with_capacity(c0 as usize * p.len() + pa.len());
    for ci in 0..c0 {
        out.extend(p.iter().map(|&j| starts[0] + ci * dl + j));
    }
    out.extend(pa.iter().map(|&j| starts[r + 1] + j));
    Some(out)
}

fn same_storage(a: &Cdc, b: &Cdc) -> bool {
    match (a.codewords(), b.codewords()) {
        (Some(x), Some(y)) => std::ptr::eq(x, y),
        _ => false,
    }
}

/// Removes from `c` the canonically smallest codeword `S` that is disjoint
/// from another codeword; the canonically smallest such partner `U` and `S`
/// witness `dim(U' ∩ S) ≤ k − d/2` for the rest. Needs `n = 2k`.
pub fn remove_from_disjoint_pair(c: &Cdc) -> Result<(Cdc, Witness)> {
    let (n, k) = (c.n(), c.k());
    if n != 2 * k {
        return Err(Error::pre(format!("need n = 2k, got n={n}, k={k}")));
    }
    let c = c.materialize_with_cap(MATERIALIZE_CAP * 10)?;
    let words = c.codewords().expect("materialized");
    let mut order: Vec<usize> = (0..words.len()).collect();
    order.sort_by(|&x, &y| words[x].cmp(&words[y]));
    let mut found = None;
    'outer: for &si in &order {
        for &ui in &order {
            if ui != si && words[ui].is_disjoint(&words[si])? {
                found = Some((si, ui));
                break 'outer;
            }
        }
    }
    let (si, ui) = found.ok_or_else(|| Error::pre("no pair of disjoint codewords"))?;
    let witness = Witness {
        codeword: words[ui].clone(),
        subspace: words[si].clone(),
    };
    let rest: Vec<Subspace> = words
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != si)
        .map(|(_, w)| w.clone())
        .collect();
    let si = si as u64;
    let partial = partial_spread_indices(&c, SubcodeStrategy::LmrdNested)
        .ok()
        .map(|ps| {
            ps.into_iter()
                .filter(|&i| i != si)
                .map(|i| if i > si { i - 1 } else { i })
                .collect()
        });
    let prov = Provenance {
        recipe: format!("remove_from_disjoint_pair({})", c.provenance().recipe),
        partial_spread: partial,
        ..Default::default()
    };
    let d = Cdc::from_codewords(c.field(), n, k, c.d_claim(), rest, prov)?;
    Ok((d, witness))
}

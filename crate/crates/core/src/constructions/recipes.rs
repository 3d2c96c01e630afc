use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::addon::{coset_addon, mixed_abar_addons, product_addon, xi_extension, CrossCheck};
use super::duplication::{
    duplication, remove_from_disjoint_pair, DistancePartition, NdkSequence, Witness,
};
use super::linkage::{cor1_bound, multiblock_linkage};
use super::pairing::pairing_construction;
use super::profile::CompositionProfile;
use crate::cdc::{
    disjoint_2spreads_of_f_q8, lifted_mrd, parallelism_2_of_f_q4, partial_spread_indices, spread,
    BlockLayout, Cdc, ExcludeSource, Provenance, SubcodeStrategy, UnionSource,
};
use crate::error::{Error, Result};
use crate::gf::Field;
use crate::rankmetric::{gabidulin_mrd, rank_distribution, RANK_FILTER_SCAN_CAP};
use crate::subspace::Subspace;

/// External codes keyed by import slot.
pub type Imports = BTreeMap<String, Cdc>;

/// A named construction: its exact target size and, when buildable, the code.
#[derive(Clone, Debug)]
pub struct RecipeOutput {
    pub name: String,
    pub q: u64,
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub expected_size: BigUint,
    pub code: Option<Cdc>,
    pub notes: Vec<String>,
}

impl RecipeOutput {
    fn new(name: &str, q: u64, (n, k, d): (usize, usize, usize), expected: BigUint) -> Self {
        RecipeOutput {
            name: name.to_string(),
            q,
            n,
            k,
            d,
            expected_size: expected,
            code: None,
            notes: Vec::new(),
        }
    }

    fn with_code(mut self, c: Cdc) -> Self {
        if BigUint::from(c.len()) != self.expected_size {
            self.notes.push(format!(
                "generated size {} differs from the target {}",
                c.len(),
                self.expected_size
            ));
        }
        self.code = Some(c);
        self
    }

    fn note(mut self, s: impl Into<String>) -> Self {
        self.notes.push(s.into());
        self
    }

    /// Generated size when a code was emitted.
    pub fn size(&self) -> Option<u64> {
        self.code.as_ref().map(Cdc::len)
    }
}

/// An import slot: name, `(n, k, d)`, and the required size as a function of `q`, if fixed.
#[derive(Clone, Copy, Debug)]
pub struct ImportSlot {
    pub name: &'static str,
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub required: bool,
    pub size: Option<fn(u64) -> BigUint>,
}

const NAMES: &[&str] = &[
    "8_4_4",
    "12_4_4_cor",
    "12_4_4_thm",
    "12_6_6",
    "10_4_5",
    "4k_2k_2k",
    "12_8_6",
    "3k_4_k",
    "16_4_4",
    "6k_2k_2k",
    "9_4_3",
    "10_4_3",
    "9_4_3_lmrd",
];

pub fn recipe_names() -> &'static [&'static str] {
    NAMES
}

fn size_6_4_3(q: u64) -> BigUint {
    poly(q, &[(6, 1), (2, 2), (1, 2), (0, 1)])
}

fn size_7_4_3(q: u64) -> BigUint {
    poly(q, &[(8, 1), (5, 1), (4, 1), (2, 1), (1, -1)])
}

/// Import slots for a recipe; `k` matters only for the parametric families.
pub fn import_slots(name: &str, k: Option<usize>) -> Vec<ImportSlot> {
    let slot = |name, n, k, d, required, size| ImportSlot {
        name,
        n,
        k,
        d,
        required,
        size,
    };
    match name {
        "12_4_4_cor" => vec![slot("a_8_4_4", 8, 4, 4, false, None)],
        "3k_4_k" => {
            let k = k.unwrap_or(5);
            vec![slot("base", 2 * k, k, 4, true, None)]
        }
        "9_4_3" => vec![slot("c_6_4_3", 6, 3, 4, true, Some(size_6_4_3))],
        "10_4_3" => vec![
            slot("c_6_4_3", 6, 3, 4, true, Some(size_6_4_3)),
            slot("c_7_4_3", 7, 3, 4, true, Some(size_7_4_3)),
        ],
        _ => Vec::new(),
    }
}

/// Builds the named recipe over `F_q`.
pub fn recipe(name: &str, q: u64, k: Option<usize>, imports: &Imports) -> Result<RecipeOutput> {
    for slot in import_slots(name, k) {
        match imports.get(slot.name) {
            None if slot.required => return Err(Error::MissingImport(slot.name.into())),
            None => {}
            Some(c) => {
                if c.field().q() as u64 != q
                    || c.n() != slot.n
                    || c.k() != slot.k
                    || c.d_claim() < slot.d
                {
                    return Err(Error::DimensionMismatch(format!(
                        "import `{}` must be a ({}, *, {}; {})_{q} code, got {c:?}",
                        slot.name, slot.n, slot.d, slot.k
                    )));
                }
                if let Some(f) = slot.size {
                    if BigUint::from(c.len()) != f(q) {
                        return Err(Error::DimensionMismatch(format!(
                            "import `{}` must have {} codewords, got {}",
                            slot.name,
                            f(q),
                            c.len()
                        )));
                    }
                }
            }
        }
    }
    for key in imports.keys() {
        if !import_slots(name, k).iter().any(|s| s.name == key) && NAMES.contains(&name) {
            return Err(Error::pre(format!(
                "recipe {name} has no import slot `{key}`"
            )));
        }
    }
    let need_k = || k.ok_or_else(|| Error::pre(format!("recipe {name} needs k")));
    match name {
        "8_4_4" => recipe_8_4_4(q),
        "12_4_4_cor" => recipe_12_4_4_cor(q, imports.get("a_8_4_4")),
        "12_4_4_thm" => recipe_12_4_4_thm(q),
        "12_6_6" => recipe_12_6_6(q),
        "10_4_5" => recipe_10_4_5(q),
        "4k_2k_2k" => recipe_4k_2k_2k(q, need_k()?),
        "12_8_6" => recipe_12_8_6(q),
        "3k_4_k" => recipe_3k_4_k(q, need_k()?, &imports["base"]),
        "16_4_4" => recipe_16_4_4(q),
        "6k_2k_2k" => recipe_6k_2k_2k(q, need_k()?),
        "9_4_3" => recipe_9_4_3(q, &imports["c_6_4_3"]),
        "10_4_3" => recipe_10_4_3(q, &imports["c_7_4_3"], &imports["c_6_4_3"]),
        "9_4_3_lmrd" => recipe_9_4_3_lmrd(q),
        _ => Err(Error::UnknownRecipe(name.into())),
    }
}

fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

fn pow(q: u64, e: usize) -> BigUint {
    big(q).pow(e as u32)
}

/// `Σ c·q^e` for nonnegative totals.
fn poly(q: u64, terms: &[(usize, i64)]) -> BigUint {
    let mut acc = BigInt::zero();
    for &(e, c) in terms {
        acc += BigInt::from(c) * BigInt::from(pow(q, e));
    }
    acc.to_biguint().expect("polynomial is positive")
}

fn field(q: u64) -> Result<Field> {
    Field::of_order(q)
}

fn single(f: Field, n: usize, d: usize) -> Result<Cdc> {
    Cdc::from_codewords(
        f,
        n,
        n,
        d,
        vec![Subspace::full(f, n)],
        Provenance::tag(format!("F^{n}")),
    )
}

/// `q^12 + q^2 (q^2+1)^2 (q^2+q+1) + 1`.
pub fn size_8_4_4(q: u64) -> BigUint {
    let q2 = pow(q, 2);
    pow(q, 12) + &q2 * (&q2 + 1u32).pow(2) * (&q2 + big(q) + 1u32) + 1u32
}

/// Linkage with `n̄ = (4,4)`, trivial block codes and Gabidulin `(4×4, 2)`
/// codes, plus the parallelism add-on with `ā = (2,2)`, `b̄ = (1,1)`.
pub fn recipe_8_4_4(q: u64) -> Result<RecipeOutput> {
    let out = RecipeOutput::new("8_4_4", q, (8, 4, 4), size_8_4_4(q));
    let f = field(q)?;
    let profile = CompositionProfile::new(f, &[4, 4], 4, 4)?;
    let full = single(f, 4, 8)?;
    let gab = gabidulin_mrd(f, 4, 4, 2)?;
    let link = multiblock_linkage(&profile, &[full.clone(), full], &[gab.clone(), gab])?;
    let par = parallelism_2_of_f_q4(f)?;
    let addon = product_addon(
        &profile.with_addon(&[2, 2], &[1, 1])?,
        vec![par.members.clone(), par.members],
        CrossCheck::Verify { cap: 1 << 20 },
    )?;
    let union = UnionSource::new(&[&link, &addon.code]);
    let prov = Provenance {
        recipe: format!("8_4_4(q={q})"),
        ..link.provenance().clone()
    };
    let c = Cdc::streaming(f, 8, 4, 4, Arc::new(union), prov);
    Ok(out.with_code(c))
}

/// Two-block linkage `n̄ = (8,4)` over an `(8,*,4;4)` code plus the add-on
/// from pairwise disjoint 2-spreads of `F_q^8` and a 2-parallelism of `F_q^4`.
pub fn recipe_12_4_4_cor(q: u64, base: Option<&Cdc>) -> Result<RecipeOutput> {
    let f = field(q)?;
    let base = match base {
        Some(c) => c.clone(),
        None => recipe_8_4_4(q)?.code.expect("8_4_4 always builds"),
    };
    let q2 = pow(q, 2);
    let addon_size = (&q2 + big(q) + 1u32) * (pow(q, 8) - 1u32) / (&q2 - 1u32) * (&q2 + 1u32);
    let lb = cor1_bound(q, 4, 4, &[8, 4], &[big(base.len()), BigUint::one()])?;
    let mut out = RecipeOutput::new("12_4_4_cor", q, (12, 4, 4), lb + addon_size)
        .note(format!("block code of size {}", base.len()));
    let scan = pow(q, 24);
    if scan > big(RANK_FILTER_SCAN_CAP) {
        out.notes.push(format!(
            "rank filter over {scan} matrices exceeds the scan cap; bound only"
        ));
        return Ok(out);
    }
    let profile = CompositionProfile::new(f, &[8, 4], 4, 4)?;
    let link = multiblock_linkage(
        &profile,
        &[base, single(f, 4, 8)?],
        &[gabidulin_mrd(f, 4, 8, 2)?, gabidulin_mrd(f, 4, 4, 2)?],
    )?;
    let par = parallelism_2_of_f_q4(f)?;
    let wide = disjoint_2spreads_of_f_q8(&par)?;
    let addon = product_addon(
        &profile.with_addon(&[2, 2], &[1, 1])?,
        vec![wide.members, par.members],
        CrossCheck::Verify { cap: 1 << 20 },
    )?;
    let union = UnionSource::new(&[&link, &addon.code]);
    let prov = Provenance {
        recipe: format!("12_4_4_cor(q={q})"),
        ..link.provenance().clone()
    };
    out = out.with_code(Cdc::streaming(f, 12, 4, 4, Arc::new(union), prov));
    Ok(out)
}

/// `1 + (q^k+1)(Λ−1) + (Λ−q^k−1) q^{e}` with `e` the LMRD exponent.
fn duplication_size(q: u64, k: usize, lambda: &BigUint, lmrd_exp: usize) -> BigUint {
    let ps = pow(q, k) + 1u32;
    BigUint::one() + &ps * (lambda - 1u32) + (lambda - &ps) * pow(q, lmrd_exp)
}

/// Duplication of a `(2k,*,4;k)` code with LMRD subcode and a disjoint extra
/// codeword: `C_0` its partial spread, `D_0 = D_1` lifted MRD, `D_2` the code
/// minus one codeword of a disjoint pair, and `A` a single `k`-space.
fn double_up(c: &Cdc, ps_target: usize) -> Result<(Cdc, usize)> {
    let (f, n, k) = (c.field(), c.n(), c.k());
    let mut ps = partial_spread_indices(c, SubcodeStrategy::LmrdNested)
        .or_else(|_| partial_spread_indices(c, SubcodeStrategy::Greedy(0)))?;
    ps.truncate(ps_target);
    let got = ps.len();
    let part = DistancePartition::from_partial_spread(c.clone(), ps)?;
    let (d2, w) = remove_from_disjoint_pair(c)?;
    let lmrd = lifted_mrd(f, n, k, 4)?;
    let std_w = Witness {
        codeword: Subspace::coordinate(f, n, 0..k),
        subspace: Subspace::coordinate(f, n, k..n),
    };
    let r = k - 2;
    let mut members = vec![lmrd; r];
    members.push(d2);
    let mut witnesses = vec![std_w; r];
    witnesses.push(w);
    let seq = NdkSequence::new(members, witnesses)?;
    let a = single(f, k, 4)?;
    Ok((duplication(&part, &seq, &a)?, got))
}

pub fn size_12_4_4_thm(q: u64) -> BigUint {
    duplication_size(q, 4, &size_8_4_4(q), 12)
}

pub fn recipe_12_4_4_thm(q: u64) -> Result<RecipeOutput> {
    let c = recipe_8_4_4(q)?
        .code
        .expect("8_4_4 always builds")
        .materialize_with_cap(1 << 21)?;
    let out = RecipeOutput::new("12_4_4_thm", q, (12, 4, 4), size_12_4_4_thm(q));
    let (code, _) = double_up(&c, usize::MAX)?;
    let prov = Provenance {
        recipe: format!("12_4_4_thm(q={q})"),
        ..code.provenance().clone()
    };
    Ok(out.with_code(code.with_provenance(prov)))
}

pub fn size_16_4_4(q: u64) -> BigUint {
    let a = size_8_4_4(q);
    let c0 = pow(q, 8) + pow(q, 4) + 1u32;
    BigUint::one() + &c0 * (&a - 1u32) + (size_12_4_4_thm(q) - &c0) * pow(q, 12)
}

/// The same duplication applied to the streaming `(12,*,4;4)` code, whose
/// partial spread has `q^8 + q^4 + 1` members.
pub fn recipe_16_4_4(q: u64) -> Result<RecipeOutput> {
    let f = field(q)?;
    let out = RecipeOutput::new("16_4_4", q, (16, 4, 4), size_16_4_4(q));
    let base = recipe_8_4_4(q)?
        .code
        .expect("8_4_4 always builds")
        .materialize_with_cap(1 << 21)?;
    let thm = recipe_12_4_4_thm(q)?.code.expect("built above");
    let ps = thm
        .provenance()
        .partial_spread
        .clone()
        .ok_or_else(|| Error::pre("no partial spread recorded"))?;
    let part = DistancePartition::from_partial_spread(thm, ps)?;
    let (d2, w) = remove_from_disjoint_pair(&base)?;
    let lmrd = lifted_mrd(f, 8, 4, 4)?;
    let std_w = Witness {
        codeword: Subspace::coordinate(f, 8, 0..4),
        subspace: Subspace::coordinate(f, 8, 4..8),
    };
    let seq = NdkSequence::new(vec![lmrd.clone(), lmrd, d2], vec![std_w.clone(), std_w, w])?;
    let code = duplication(&part, &seq, &single(f, 4, 4)?)?;
    let prov = Provenance {
        recipe: format!("16_4_4(q={q})"),
        ..code.provenance().clone()
    };
    Ok(out.with_code(code.with_provenance(prov)))
}

pub fn size_12_6_6(q: u64) -> BigUint {
    poly(
        q,
        &[
            (24, 1),
            (15, 1),
            (14, 1),
            (13, 2),
            (12, 3),
            (11, 3),
            (10, 3),
            (9, 3),
            (8, 1),
            (7, -1),
            (6, -2),
            (5, -3),
            (4, -3),
            (3, -1),
            (2, -2),
            (1, -1),
            (0, -1),
        ],
    )
}

/// Linkage `n̄ = (6,6)` without `R(0|I_6)`, the coset add-on `ā = (3,3)`,
/// `b̄ = (1,2)`, and its `F_1 ∪ F_2` extension.
pub fn recipe_12_6_6(q: u64) -> Result<RecipeOutput> {
    let f = field(q)?;
    let mut out = RecipeOutput::new("12_6_6", q, (12, 6, 6), size_12_6_6(q));
    let scan = pow(q, 24);
    if scan > big(RANK_FILTER_SCAN_CAP) {
        out.notes.push(format!(
            "rank filter over {scan} matrices exceeds the scan cap; bound only"
        ));
        return Ok(out);
    }
    let profile = CompositionProfile::new(f, &[6, 6], 6, 6)?;
    let full = single(f, 6, 12)?;
    let gab = gabidulin_mrd(f, 6, 6, 3)?;
    let link = multiblock_linkage(&profile, &[full.clone(), full], &[gab.clone(), gab])?;
    let layout = link
        .provenance()
        .blocks
        .clone()
        .expect("linkage records blocks");
    let block2 = layout.ranges[1].0;
    let blocks = BlockLayout {
        sigma: layout.sigma,
        ranges: vec![layout.ranges[0], (block2, layout.ranges[1].1 - 1)],
    };
    let trimmed = Cdc::streaming(
        f,
        12,
        6,
        6,
        Arc::new(ExcludeSource::new(&link, vec![block2])),
        Provenance {
            recipe: "linkage(6,6) without R(0|I)".into(),
            lmrd: link.provenance().lmrd.clone(),
            blocks: Some(blocks),
            ..Default::default()
        },
    );
    let addon = coset_addon(&profile.with_addon(&[3, 3], &[1, 2])?)?;
    let xi = xi_extension(&addon)?;
    let union = UnionSource::new(&[&trimmed, &addon.code, &xi]);
    let prov = Provenance {
        recipe: format!("12_6_6(q={q})"),
        lmrd: trimmed.provenance().lmrd.clone(),
        blocks: trimmed.provenance().blocks.clone(),
        ..Default::default()
    };
    out = out
        .note("R(0|I_6) omitted from the linkage part")
        .with_code(Cdc::streaming(f, 12, 6, 6, Arc::new(union), prov));
    Ok(out)
}

pub fn size_10_4_5(q: u64) -> BigUint {
    poly(
        q,
        &[
            (20, 1),
            (16, 1),
            (15, 1),
            (14, 2),
            (13, 1),
            (11, -2),
            (10, -3),
            (9, -2),
            (8, -2),
            (6, 1),
            (5, 3),
            (4, 2),
            (3, 1),
        ],
    )
}

/// Linkage `n̄ = (5,5)` plus coset add-ons for `ā = (2,3)` and `ā = (3,2)`.
/// The two add-ons are checked against each other exhaustively; members of
/// the second closer than 4 to the first are dropped.
pub fn recipe_10_4_5(q: u64) -> Result<RecipeOutput> {
    let f = field(q)?;
    let mut out = RecipeOutput::new("10_4_5", q, (10, 5, 4), size_10_4_5(q));
    let scan = pow(q, 20);
    if scan > big(RANK_FILTER_SCAN_CAP) {
        out.notes.push(format!(
            "rank filter over {scan} matrices exceeds the scan cap; bound only"
        ));
        return Ok(out);
    }
    let profile = CompositionProfile::new(f, &[5, 5], 5, 4)?;
    let full = single(f, 5, 10)?;
    let gab = gabidulin_mrd(f, 5, 5, 2)?;
    let link = multiblock_linkage(&profile, &[full.clone(), full], &[gab.clone(), gab])?;
    let p23 = profile.clone().with_addon(&[2, 3], &[1, 2])?;
    let p32 = profile.with_addon(&[3, 2], &[2, 1])?;
    let addons = match mixed_abar_addons(
        &[p23.clone(), p32.clone()],
        CrossCheck::Verify { cap: 1 << 20 },
    ) {
        Ok(c) => c,
        Err(Error::Verification(msg)) => {
            let first = coset_addon(&p23)?.code;
            let second = coset_addon(&p32)?.code;
            let keep = conflict_free(&second, &first, 4)?;
            out.notes.push(format!(
                "{msg}; kept the {} codewords of the second add-on at distance >= 4 from the first",
                keep.len()
            ));
            let kept = second.subcode(&keep, 4, "conflict-free part of the (3,2) add-on")?;
            Cdc::streaming(
                f,
                10,
                5,
                4,
                Arc::new(UnionSource::new(&[&first, &kept])),
                Provenance::tag("coset add-ons (2,3) and part of (3,2)"),
            )
        }
        Err(e) => return Err(e),
    };
    let union = UnionSource::new(&[&link, &addons]);
    let prov = Provenance {
        recipe: format!("10_4_5(q={q})"),
        ..link.provenance().clone()
    };
    out = out.with_code(Cdc::streaming(f, 10, 5, 4, Arc::new(union), prov));
    Ok(out)
}

/// Indices of the members of `b` at distance at least `d` from all of `a`.
fn conflict_free(b: &Cdc, a: &Cdc, d: usize) -> Result<Vec<u64>> {
    let a = a.materialize_with_cap(1 << 20)?;
    let b = b.materialize_with_cap(1 << 20)?;
    let aw = a.codewords().expect("materialized");
    let bw = b.codewords().expect("materialized");
    Ok(bw
        .par_iter()
        .enumerate()
        .filter(|(_, w)| aw.iter().all(|u| u.distance_unchecked(w) >= d))
        .map(|(i, _)| i as u64)
        .collect())
}

fn check_even_k(k: usize) -> Result<()> {
    if k < 4 || !k.is_multiple_of(2) {
        return Err(Error::pre(format!(
            "k must be even and at least 4, got {k}"
        )));
    }
    Ok(())
}

/// `q^{2k(k+1)} + a(q,2k,2k,k,k) + q^{k(k/2+2)} + 2q^k + 1`.
pub fn size_4k_2k_2k(q: u64, k: usize) -> Result<BigUint> {
    check_even_k(k)?;
    Ok(pow(q, 2 * k * (k + 1))
        + rank_distribution(q, 2 * k, 2 * k, k, k)?
        + pow(q, k * (k / 2 + 2))
        + big(2) * pow(q, k)
        + 1u32)
}

pub fn recipe_4k_2k_2k(q: u64, k: usize) -> Result<RecipeOutput> {
    let out = RecipeOutput::new("4k_2k_2k", q, (4 * k, 2 * k, 2 * k), size_4k_2k_2k(q, k)?);
    Ok(out.note(format!(
        "rank filter over q^{} matrices exceeds the scan cap; bound only",
        2 * k * (k + 1)
    )))
}

pub fn size_6k_2k_2k(q: u64, k: usize) -> Result<BigUint> {
    let c = size_4k_2k_2k(q, k)?;
    Ok(duplication_size(q, 2 * k, &c, 2 * k * (k + 1)))
}

pub fn recipe_6k_2k_2k(q: u64, k: usize) -> Result<RecipeOutput> {
    let out = RecipeOutput::new("6k_2k_2k", q, (6 * k, 2 * k, 2 * k), size_6k_2k_2k(q, k)?);
    Ok(out.note("needs the (4k,*,2k;2k) code, which is bound only"))
}

/// Pairing with `n̄ = (6,6)`, `ā = (2,4)`, `b̄ = (0,2)`: `C_1` a line spread
/// of `F_q^6` and `C_2` the dual spread.
pub fn recipe_12_8_6(q: u64) -> Result<RecipeOutput> {
    let f = field(q)?;
    let out = RecipeOutput::new(
        "12_8_6",
        q,
        (12, 6, 8),
        poly(q, &[(18, 1), (4, 1), (2, 1), (0, 1)]),
    );
    let lines = spread(f, 6, 2)?;
    let duals: Vec<Subspace> = lines.iter().map(|u| u.orthogonal_complement()).collect();
    let duals = Cdc::from_codewords(
        f,
        6,
        4,
        4,
        duals,
        Provenance::tag("dual line spread of F^6"),
    )?;
    let c = pairing_construction(
        (6, 6),
        (2, 4),
        (0, 2),
        8,
        &single(f, 6, 12)?,
        &lines,
        &duals,
    )?;
    Ok(out.with_code(c))
}

pub fn size_3k_4_k(q: u64, k: usize, lambda: &BigUint) -> BigUint {
    duplication_size(q, k, lambda, k * (k - 1))
}

/// Duplication over an imported `(2k,Λ,4;k)` code.
pub fn recipe_3k_4_k(q: u64, k: usize, base: &Cdc) -> Result<RecipeOutput> {
    if k < 5 {
        return Err(Error::pre(format!("k must be at least 5, got {k}")));
    }
    let lambda = big(base.len());
    let out = RecipeOutput::new("3k_4_k", q, (3 * k, k, 4), size_3k_4_k(q, k, &lambda));
    let target = (q as usize).pow(k as u32) + 1;
    let (code, got) = double_up(base, target)?;
    let out = if got < target {
        out.note(format!(
            "partial-spread subcode has {got} members, short of {target}"
        ))
    } else {
        out
    };
    Ok(out.with_code(code))
}

/// `C` the imported code, `C_0` a partial spread of size `c0_target`,
/// `D_0` lifted MRD, `D_1` the `(6,*,4;3)` code minus one codeword of a
/// disjoint pair, `A` a single plane.
fn duplication_4_3(name: &str, c: &Cdc, c6: &Cdc, c0_target: usize) -> Result<(Cdc, Vec<String>)> {
    let f = c.field();
    let mut ps = partial_spread_indices(c, SubcodeStrategy::LmrdNested)
        .or_else(|_| partial_spread_indices(c, SubcodeStrategy::Greedy(0)))?;
    let mut notes = Vec::new();
    if ps.len() < c0_target {
        notes.push(format!(
            "{name}: partial-spread subcode has {} members, short of {c0_target}",
            ps.len()
        ));
    }
    ps.truncate(c0_target);
    let part = DistancePartition::from_partial_spread(c.clone(), ps)?;
    let (d1, w) = remove_from_disjoint_pair(c6)?;
    let std_w = Witness {
        codeword: Subspace::coordinate(f, 6, 0..3),
        subspace: Subspace::coordinate(f, 6, 3..6),
    };
    let seq = NdkSequence::new(vec![lifted_mrd(f, 6, 3, 4)?, d1], vec![std_w, w])?;
    let code = duplication(&part, &seq, &single(f, 3, 4)?)?;
    Ok((code, notes))
}

pub fn size_9_4_3(q: u64) -> BigUint {
    poly(
        q,
        &[
            (12, 1),
            (8, 2),
            (7, 2),
            (6, 1),
            (5, 2),
            (4, 2),
            (2, -2),
            (1, -2),
            (0, 1),
        ],
    )
}

pub fn recipe_9_4_3(q: u64, c6: &Cdc) -> Result<RecipeOutput> {
    let mut out = RecipeOutput::new("9_4_3", q, (9, 3, 4), size_9_4_3(q));
    let (code, notes) = duplication_4_3("9_4_3", c6, c6, (q as usize).pow(3) - 1)?;
    out.notes.extend(notes);
    Ok(out.with_code(code))
}

pub fn size_10_4_3(q: u64) -> BigUint {
    poly(
        q,
        &[
            (14, 1),
            (11, 1),
            (10, 1),
            (8, 1),
            (7, -1),
            (6, 2),
            (5, 2),
            (0, 1),
        ],
    )
}

pub fn recipe_10_4_3(q: u64, c7: &Cdc, c6: &Cdc) -> Result<RecipeOutput> {
    let mut out = RecipeOutput::new("10_4_3", q, (10, 3, 4), size_10_4_3(q));
    let (code, notes) = duplication_4_3("10_4_3", c7, c6, (q as usize).pow(4))?;
    out.notes.extend(notes);
    Ok(out.with_code(code))
}

/// Self-contained duplication: `C = D_0 = D_1` the lifted MRD `(6,q^6,4;3)`
/// code, `C_0` its nested partial spread, `A` a single plane.
pub fn recipe_9_4_3_lmrd(q: u64) -> Result<RecipeOutput> {
    let f = field(q)?;
    let q3 = pow(q, 3);
    let expected = BigUint::one() + &q3 * pow(q, 6) + (pow(q, 6) - &q3) * pow(q, 6);
    let out = RecipeOutput::new("9_4_3_lmrd", q, (9, 3, 4), expected);
    let c = lifted_mrd(f, 6, 3, 4)?;
    let ps = partial_spread_indices(&c, SubcodeStrategy::LmrdNested)?;
    let part = DistancePartition::from_partial_spread(c, ps)?;
    let seq = NdkSequence::lmrd(f, 6, 3, 4)?;
    Ok(out.with_code(duplication(&part, &seq, &single(f, 3, 4)?)?))
}

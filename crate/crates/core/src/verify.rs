//! Brute-force oracles: subspace enumeration, pairwise distance checks,
//! seeded pair sampling and spread coverage.

use std::collections::HashMap;
use std::time::Instant;

use num_traits::ToPrimitive;
use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cdc::{Cdc, SpreadFamily};
use crate::error::{Error, Result};
use crate::gf::Field;
use crate::linalg::{gaussian_binomial, Matrix};
use crate::subspace::Subspace;

pub const ENUMERATION_CAP: u64 = 1_000_000;
pub const FULL_CHECK_CAP: u64 = 100_000;
/// Violations kept verbatim in a report; the total is always counted.
pub const MAX_LISTED_VIOLATIONS: usize = 64;

/// Every k-subspace of GF(q)^n, in canonical order.
pub fn enumerate_subspaces(field: Field, n: usize, k: usize, cap: u64) -> Result<Vec<Subspace>> {
    let count = gaussian_binomial(n as u32, k as u32, field.q() as u64);
    match count.to_u64() {
        Some(c) if c <= cap => {}
        _ => {
            return Err(Error::CapExceeded {
                what: format!("Grassmannian G_{}({n},{k})", field.q()),
                size: count.to_string(),
                cap,
            })
        }
    }
    if k > n {
        return Ok(Vec::new());
    }
    if k == 0 {
        return Ok(vec![Subspace::zero(field, n)]);
    }
    let q = field.q();
    let mut out = Vec::with_capacity(count.to_usize().unwrap_or(0));
    let mut pivots: Vec<usize> = (0..k).collect();
    loop {
        let free: Vec<(usize, usize)> = (0..k)
            .flat_map(|i| {
                let pv = pivots.clone();
                ((pivots[i] + 1)..n)
                    .filter(move |c| !pv.contains(c))
                    .map(move |c| (i, c))
            })
            .collect();
        let total = (q as u64).pow(free.len() as u32);
        for x in 0..total {
            let mut m = Matrix::zeros(field, k, n);
            for (i, &p) in pivots.iter().enumerate() {
                m.set(i, p, 1);
            }
            let mut r = x;
            for &(i, c) in &free {
                m.set(i, c, (r % q as u64) as u32);
                r /= q as u64;
            }
            out.push(Subspace::from_rref_unchecked(m));
        }
        // next combination
        let mut i = k;
        loop {
            if i == 0 {
                out.sort();
                return Ok(out);
            }
            i -= 1;
            if pivots[i] < n - k + i {
                pivots[i] += 1;
                for j in i + 1..k {
                    pivots[j] = pivots[j - 1] + 1;
                }
                break;
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub i: u64,
    pub j: u64,
    pub a: String,
    pub b: String,
    pub distance: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub mode: String,
    pub code: String,
    pub codewords: u64,
    pub d_claim: usize,
    pub pairs_checked: u64,
    /// `None` when no pair was examined.
    pub min_distance_found: Option<usize>,
    pub violations_total: u64,
    pub violations: Vec<Violation>,
    pub seed: Option<u64>,
    /// Excluded from the JSON form so that reports are reproducible byte for byte.
    #[serde(skip)]
    pub wall_time_ms: u128,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.violations_total == 0
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Commutative summary of a batch of pairs.
#[derive(Clone, Debug, Default)]
struct Tally {
    pairs: u64,
    min: Option<usize>,
    total_bad: u64,
    bad: Vec<(u64, u64, usize)>,
}

impl Tally {
    fn record(&mut self, i: u64, j: u64, d: usize, claim: usize) {
        self.pairs += 1;
        self.min = Some(self.min.map_or(d, |m| m.min(d)));
        if d < claim {
            self.total_bad += 1;
            if self.bad.len() < MAX_LISTED_VIOLATIONS {
                self.bad.push((i, j, d));
            }
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.pairs += other.pairs;
        self.min = match (self.min, other.min) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self.total_bad += other.total_bad;
        self.bad.extend(other.bad);
        self.bad.truncate(MAX_LISTED_VIOLATIONS);
        self
    }

    fn into_report(
        self,
        mode: &str,
        c: &Cdc,
        seed: Option<u64>,
        start: Instant,
        words: impl Fn(u64) -> Subspace,
    ) -> VerificationReport {
        let violations = self
            .bad
            .iter()
            .map(|&(i, j, d)| Violation {
                i,
                j,
                a: words(i).serialize(),
                b: words(j).serialize(),
                distance: d,
            })
            .collect();
        VerificationReport {
            mode: mode.into(),
            code: c.provenance().recipe.clone(),
            codewords: c.len(),
            d_claim: c.d_claim(),
            pairs_checked: self.pairs,
            min_distance_found: self.min,
            violations_total: self.total_bad,
            violations,
            seed,
            wall_time_ms: start.elapsed().as_millis(),
        }
    }
}

/// Exact minimum distance over all pairs. Codes above `cap` are refused.
pub fn full_pairwise_check(c: &Cdc, cap: u64) -> Result<VerificationReport> {
    let start = Instant::now();
    if c.len() > cap {
        return Err(Error::CapExceeded {
            what: "full pairwise check".into(),
            size: c.len().to_string(),
            cap,
        });
    }
    let owned;
    let words: &[Subspace] = match c.codewords() {
        Some(w) => w,
        None => {
            owned = c.iter().collect::<Vec<_>>();
            &owned
        }
    };
    let claim = c.d_claim();
    let tally = (0..words.len())
        .into_par_iter()
        .with_min_len(16)
        .map(|i| {
            let mut t = Tally::default();
            let u = &words[i];
            for (j, w) in words.iter().enumerate().skip(i + 1) {
                t.record(i as u64, j as u64, u.distance_unchecked(w), claim);
            }
            t
        })
        .reduce(Tally::default, Tally::merge);
    Ok(tally.into_report("full", c, None, start, |i| words[i as usize].clone()))
}

/// `(i, j)` with `i != j`, both below `n`, for pair number `t` of the stream.
///
/// Each pair reads its own 128-bit block of a ChaCha8 keystream, so any
/// range of pairs can be regenerated independently.
pub fn sample_pair(rng: &mut ChaCha8Rng, t: u64, n: u64) -> (u64, u64) {
    rng.set_word_pos(4 * t as u128);
    let (x, y) = (rng.next_u64(), rng.next_u64());
    let i = ((x as u128 * n as u128) >> 64) as u64;
    let j = ((y as u128 * (n - 1) as u128) >> 64) as u64;
    (i, if j >= i { j + 1 } else { j })
}

const SAMPLE_CHUNK: u64 = 4096;

/// Distances of `pairs` seeded pseudo-random pairs of distinct codewords.
pub fn sampled_check(c: &Cdc, pairs: u64, seed: u64) -> Result<VerificationReport> {
    let start = Instant::now();
    let n = c.len();
    let pairs = if n < 2 { 0 } else { pairs };
    let claim = c.d_claim();
    let chunks = pairs.div_ceil(SAMPLE_CHUNK);
    let base = ChaCha8Rng::seed_from_u64(seed);
    let tally = (0..chunks)
        .into_par_iter()
        .map(|ch| {
            let mut rng = base.clone();
            let mut t = Tally::default();
            for p in ch * SAMPLE_CHUNK..((ch + 1) * SAMPLE_CHUNK).min(pairs) {
                let (i, j) = sample_pair(&mut rng, p, n);
                let (i, j) = (i.min(j), i.max(j));
                t.record(i, j, c.get(i).distance_unchecked(&c.get(j)), claim);
            }
            t
        })
        .reduce(Tally::default, Tally::merge);
    Ok(tally.into_report("sampled", c, Some(seed), start, |i| c.get(i)))
}

/// Every distance between a member of `a` and a member of `b`.
pub fn cross_check(a: &Cdc, b: &Cdc, claim: usize) -> VerificationReport {
    let start = Instant::now();
    let bw: Vec<Subspace> = b.iter().collect();
    let tally = (0..a.len())
        .into_par_iter()
        .map(|i| {
            let u = a.get(i);
            let mut t = Tally::default();
            for (j, w) in bw.iter().enumerate() {
                t.record(i, j as u64, u.distance_unchecked(w), claim);
            }
            t
        })
        .reduce(Tally::default, Tally::merge);
    let mut r = tally.into_report("cross", a, None, start, |i| a.get(i));
    r.d_claim = claim;
    for v in &mut r.violations {
        v.b = bw[v.j as usize].serialize();
    }
    r
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageReport {
    /// Number of objects that must be covered.
    pub universe: u64,
    pub covered_once: u64,
    pub uncovered: u64,
    pub multiply_covered: u64,
}

impl CoverageReport {
    pub fn exact(&self) -> bool {
        self.uncovered == 0 && self.multiply_covered == 0 && self.covered_once == self.universe
    }
}

fn points_of(u: &Subspace) -> Vec<Vec<u32>> {
    let f = u.field();
    let q = f.q() as u64;
    let (k, n) = (u.k(), u.n());
    let g = u.generator();
    let mut out = Vec::new();
    for x in 1..q.pow(k as u32) {
        let coeffs: Vec<u32> = (0..k).map(|i| ((x / q.pow(i as u32)) % q) as u32).collect();
        // keep one representative per point: leading coefficient 1
        if coeffs.iter().rev().find(|&&c| c != 0) != Some(&1) {
            continue;
        }
        let v: Vec<u32> = (0..n)
            .map(|j| (0..k).fold(0, |acc, i| f.add(acc, f.mul(coeffs[i], g.get(i, j)))))
            .collect();
        out.push(v);
    }
    out
}

/// Multiplicity with which the codewords of `c` cover the points of PG(n−1, q).
pub fn coverage_check(c: &Cdc) -> CoverageReport {
    let q = c.field().q() as u64;
    let universe = (q.pow(c.n() as u32) - 1) / (q - 1);
    let mut counts: HashMap<Vec<u32>, u64> = HashMap::new();
    for u in c.iter() {
        for p in points_of(&u) {
            *counts.entry(p).or_default() += 1;
        }
    }
    let once = counts.values().filter(|&&m| m == 1).count() as u64;
    let multi = counts.values().filter(|&&m| m > 1).count() as u64;
    CoverageReport {
        universe,
        covered_once: once,
        uncovered: universe - counts.len() as u64,
        multiply_covered: multi,
    }
}

/// Multiplicity with which a family covers all k-subspaces of F_q^n.
pub fn family_coverage_check(family: &SpreadFamily) -> Result<CoverageReport> {
    let first = family
        .members
        .first()
        .ok_or_else(|| Error::pre("empty family"))?;
    let all = enumerate_subspaces(first.field(), first.n(), first.k(), ENUMERATION_CAP)?;
    let mut counts: HashMap<Subspace, u64> = all.iter().map(|u| (u.clone(), 0)).collect();
    for m in &family.members {
        for u in m.iter() {
            *counts
                .get_mut(&u)
                .ok_or_else(|| Error::pre("member outside the Grassmannian"))? += 1;
        }
    }
    Ok(CoverageReport {
        universe: all.len() as u64,
        covered_once: counts.values().filter(|&&m| m == 1).count() as u64,
        uncovered: counts.values().filter(|&&m| m == 0).count() as u64,
        multiply_covered: counts.values().filter(|&&m| m > 1).count() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cdc::{lifted_mrd, spread, Provenance};

    fn gf(q: u64) -> Field {
        Field::of_order(q).unwrap()
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(
            enumerate_subspaces(gf(2), 4, 2, ENUMERATION_CAP)
                .unwrap()
                .len(),
            35
        );
        assert_eq!(
            enumerate_subspaces(gf(2), 5, 2, ENUMERATION_CAP)
                .unwrap()
                .len(),
            155
        );
        assert_eq!(
            enumerate_subspaces(gf(3), 4, 0, ENUMERATION_CAP)
                .unwrap()
                .len(),
            1
        );
        assert!(enumerate_subspaces(gf(2), 12, 6, ENUMERATION_CAP).is_err());
        let all = enumerate_subspaces(gf(3), 4, 2, ENUMERATION_CAP).unwrap();
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn full_check_on_lifted_code() {
        let c = lifted_mrd(gf(2), 6, 3, 4).unwrap();
        let r = full_pairwise_check(&c, FULL_CHECK_CAP).unwrap();
        assert_eq!(
            (r.min_distance_found, r.pairs_checked, r.violations_total),
            (Some(4), 2016, 0)
        );
        assert!(full_pairwise_check(&c, 10).is_err());
    }

    #[test]
    fn single_codeword_and_duplicates() {
        let f = gf(2);
        let u = Subspace::coordinate(f, 4, [0, 1]);
        let one = Cdc::from_codewords(f, 4, 2, 4, vec![u.clone()], Provenance::tag("one")).unwrap();
        let r = full_pairwise_check(&one, FULL_CHECK_CAP).unwrap();
        assert_eq!((r.min_distance_found, r.pairs_checked), (None, 0));
        let bad = Cdc::from_trusted(f, 4, 2, 4, vec![u.clone(), u], Provenance::tag("dup"));
        let r = full_pairwise_check(&bad, FULL_CHECK_CAP).unwrap();
        assert_eq!(r.min_distance_found, Some(0));
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].distance, 0);
    }

    #[test]
    fn sampling_is_reproducible() {
        let c = lifted_mrd(gf(2), 8, 4, 4).unwrap();
        let a = sampled_check(&c, 10_000, 42).unwrap();
        let b = sampled_check(&c, 10_000, 42).unwrap();
        assert_eq!(a.to_json_line(), b.to_json_line());
        assert_eq!(a.pairs_checked, 10_000);
        assert!(a.passed());
        let empty = sampled_check(&c, 0, 1).unwrap();
        assert_eq!((empty.pairs_checked, empty.min_distance_found), (0, None));
    }

    #[test]
    fn sampled_pairs_are_distinct_and_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for t in 0..10_000 {
            let (i, j) = sample_pair(&mut rng, t, 7);
            assert!(i < 7 && j < 7 && i != j);
        }
        assert_eq!(
            sample_pair(&mut rng, 5, 1000),
            sample_pair(&mut rng.clone(), 5, 1000)
        );
    }

    #[test]
    fn coverage() {
        let s = spread(gf(2), 8, 4).unwrap();
        let r = coverage_check(&s);
        assert_eq!(r.universe, 255);
        assert!(r.exact());
        let dropped = Cdc::from_trusted(
            gf(2),
            8,
            4,
            8,
            s.iter().skip(1).collect(),
            Provenance::tag("drop"),
        );
        let r = coverage_check(&dropped);
        assert_eq!(r.uncovered, 15);
        assert!(!r.exact());
    }
}

//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

mod support;

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use cdc_core::bounds::{
    exact_registry, johnson_upper, lower_bound_registry, singleton_like_upper, BoundKind,
};
use cdc_core::cdc::{parallelism_2_of_f_q4, random_subset, spread, Cdc};
use cdc_core::constructions::recipes::{
    recipe_12_4_4_thm, recipe_12_6_6, recipe_12_8_6, recipe_8_4_4, recipe_9_4_3_lmrd,
};
use cdc_core::constructions::{
    check_special_substructure, cor1_bound, coset_addon, multiblock_linkage, xi_extension,
    CompositionProfile,
};
use cdc_core::rankmetric::{gabidulin_mrd, rank_distribution};
use cdc_core::subspace::Subspace;
use cdc_core::verify::{cross_check, full_pairwise_check, sampled_check, FULL_CHECK_CAP};
use num_bigint::BigUint;
use support::{ensure, gf, points, rank_gf2, Check};

fn within(start: Instant, limit: Duration, what: &str) -> Check {
    let t = start.elapsed();
    ensure!(t < limit, "{what} took {t:?}, limit {limit:?}");
    Ok(())
}

fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

/// Every nonzero vector of F_q^n lies in exactly one member, by enumeration.
fn covers_once(c: &Cdc) -> Check {
    let q = c.field().q() as usize;
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    for u in c.iter() {
        for v in points(&u) {
            if v.iter().any(|&x| x != 0) {
                ensure!(seen.insert(v), "a vector is covered twice");
            }
        }
    }
    let total = q.pow(c.n() as u32) - 1;
    ensure!(
        seen.len() == total,
        "{} of {total} vectors covered",
        seen.len()
    );
    Ok(())
}

fn c1_rank_distribution() -> Check {
    let start = Instant::now();
    let h = gabidulin_mrd(gf(2), 3, 3, 2).map_err(|e| e.to_string())?;
    let mut hist = [0u64; 4];
    let mut n = 0;
    for m in h.iter() {
        hist[rank_gf2(&m.to_rows())] += 1;
        n += 1;
    }
    ensure!(n == 64, "code has {n} codewords");
    ensure!(hist == [1, 0, 49, 14], "histogram {hist:?}");
    for (r, &count) in hist.iter().enumerate() {
        let formula = rank_distribution(2, 3, 3, 2, r).map_err(|e| e.to_string())?;
        ensure!(
            formula == big(count),
            "rank {r}: formula {formula}, enumeration {count}"
        );
    }
    within(start, Duration::from_secs(1), "rank histogram")
}

fn c2_spread_instance() -> Check {
    let start = Instant::now();
    let f = gf(2);
    let profile = CompositionProfile::new(f, &[4, 4], 2, 4).map_err(|e| e.to_string())?;
    let s = spread(f, 4, 2).map_err(|e| e.to_string())?;
    let m = gabidulin_mrd(f, 2, 4, 2).map_err(|e| e.to_string())?;
    let c = multiblock_linkage(&profile, &[s.clone(), s], &[m.clone(), m])
        .map_err(|e| e.to_string())?;
    ensure!(c.len() == 85, "{} lines", c.len());
    ensure!(
        c.iter().all(|u| u.k() == 2 && u.n() == 8),
        "not all lines of F_2^8"
    );
    covers_once(&c)?;
    let words: Vec<Subspace> = c.iter().collect();
    for (i, a) in words.iter().enumerate() {
        let pa = points(a);
        for b in &words[i + 1..] {
            ensure!(pa.intersection(&points(b)).count() == 1, "two lines meet");
        }
    }
    ensure!(
        check_special_substructure(&c)
            .map_err(|e| e.to_string())?
            .passed(),
        "special substructure"
    );
    within(start, Duration::from_secs(1), "spread instance")
}

fn c3_recipe_8_4_4() -> Check {
    let start = Instant::now();
    let out = recipe_8_4_4(2).map_err(|e| e.to_string())?;
    let q: u64 = 2;
    let formula = q.pow(12) + q.pow(2) * (q * q + 1).pow(2) * (q * q + q + 1) + 1;
    ensure!(
        formula == 4797 && out.expected_size == big(formula),
        "expected size {}",
        out.expected_size
    );
    let c = out
        .code
        .ok_or("no code")?
        .materialize()
        .map_err(|e| e.to_string())?;
    ensure!(c.len() == 4797, "{} codewords", c.len());
    let r = full_pairwise_check(&c, FULL_CHECK_CAP).map_err(|e| e.to_string())?;
    ensure!(
        r.min_distance_found == Some(4),
        "min distance {:?}",
        r.min_distance_found
    );
    ensure!(
        r.pairs_checked == 4797 * 4796 / 2,
        "{} pairs",
        r.pairs_checked
    );
    ensure!(r.passed(), "{} violations", r.violations_total);
    let distinct: HashSet<&Subspace> = c.codewords().unwrap().iter().collect();
    ensure!(distinct.len() == 4797, "duplicate codewords");
    within(start, Duration::from_secs(120), "8_4_4 full check")
}

fn c4_parallelisms() -> Check {
    let start = Instant::now();
    for (q, spreads, lines) in [(2u64, 7usize, 5u64), (3, 13, 10)] {
        let fam = parallelism_2_of_f_q4(gf(q)).map_err(|e| e.to_string())?;
        ensure!(
            fam.members.len() == spreads,
            "q={q}: {} spreads",
            fam.members.len()
        );
        let mut all: HashSet<Subspace> = HashSet::new();
        for m in &fam.members {
            ensure!(m.len() == lines, "q={q}: spread with {} lines", m.len());
            covers_once(m).map_err(|e| format!("q={q}: {e}"))?;
            for u in m.iter() {
                ensure!(u.k() == 2 && u.n() == 4, "q={q}: not a line");
                ensure!(all.insert(u), "q={q}: a line in two spreads");
            }
        }
        let want = support::gaussian_binomial_u128(4, 2, q) as usize;
        ensure!(all.len() == want, "q={q}: {} of {want} lines", all.len());
    }
    within(start, Duration::from_secs(30), "parallelisms")
}

fn c5_formulas() -> Check {
    let one = || big(1);
    let a = cor1_bound(2, 4, 4, &[4, 4, 4], &[one(), one(), one()]).map_err(|e| e.to_string())?;
    ensure!(a == big(19_208_388), "nbar=(4,4,4): {a}");
    let b = cor1_bound(2, 4, 4, &[8, 4], &[big(4801), one()]).map_err(|e| e.to_string())?;
    ensure!(b == big(19_673_822), "nbar=(8,4): {b}");
    let reg = lower_bound_registry(2, 12, 4, 4);
    ensure!(
        reg.iter().any(|r| r.value == big(19_676_797)),
        "registry lacks 19,676,797"
    );
    ensure!(
        reg.iter().any(|r| r.value == big(19_673_822)),
        "registry lacks 19,673,822"
    );
    Ok(())
}

fn c6_12_4_4_thm() -> Check {
    let start = Instant::now();
    let out = recipe_12_4_4_thm(2).map_err(|e| e.to_string())?;
    // 1 + (q^4+1)(L-1) + (L-q^4-1) q^12 with L = A(8,4;4) = 4797
    let (q, l): (u64, u64) = (2, 4797);
    let formula = 1 + (q.pow(4) + 1) * (l - 1) + (l - q.pow(4) - 1) * q.pow(12);
    ensure!(
        formula == 19_660_413 && out.expected_size == big(formula),
        "expected size {}",
        out.expected_size
    );
    let c = out.code.ok_or("no code")?;
    let streamed = c.iter().count() as u64;
    ensure!(streamed == 19_660_413, "streamed {streamed}");
    ensure!(c.len() == streamed, "len {} differs from stream", c.len());
    let r = sampled_check(&c, 1_000_000, 42).map_err(|e| e.to_string())?;
    ensure!(
        r.pairs_checked == 1_000_000 && r.passed(),
        "{} violations",
        r.violations_total
    );
    ensure!(
        r.min_distance_found.is_some_and(|d| d >= 4),
        "min {:?}",
        r.min_distance_found
    );
    within(start, Duration::from_secs(15 * 60), "12_4_4_thm")
}

fn c7_12_6_6() -> Check {
    let start = Instant::now();
    let f = gf(2);
    let out = recipe_12_6_6(2).map_err(|e| e.to_string())?;
    ensure!(
        out.expected_size == big(16_865_629),
        "expected size {}",
        out.expected_size
    );
    let c = out.code.ok_or("no code")?;
    let streamed = c.iter().count() as u64;
    ensure!(streamed == 16_865_629, "streamed {streamed}");
    // the extension is the last 2q^3 codewords
    let profile = CompositionProfile::new(f, &[6, 6], 6, 6).map_err(|e| e.to_string())?;
    let addon = coset_addon(
        &profile
            .with_addon(&[3, 3], &[1, 2])
            .map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    let xi = xi_extension(&addon).map_err(|e| e.to_string())?;
    ensure!(xi.len() == 16, "extension has {} codewords", xi.len());
    let tail: Vec<Subspace> = (streamed - 16..streamed).map(|i| c.get(i)).collect();
    let xi_words: Vec<Subspace> = xi.iter().collect();
    ensure!(
        tail == xi_words,
        "extension codewords missing from the stream"
    );
    let r = sampled_check(&c, 1_000_000, 42).map_err(|e| e.to_string())?;
    ensure!(r.passed(), "{} violations in sample", r.violations_total);
    let idx = random_subset(&c, 10_000, 7);
    let sub = c.subcode(&idx, 6, "sample").map_err(|e| e.to_string())?;
    let x = cross_check(&xi, &sub, 6);
    ensure!(
        x.passed(),
        "extension meets the code at distance {:?}",
        x.min_distance_found
    );
    within(start, Duration::from_secs(15 * 60), "12_6_6")
}

fn c8_duplication() -> Check {
    let start = Instant::now();
    let out = recipe_9_4_3_lmrd(2).map_err(|e| e.to_string())?;
    let c = out.code.ok_or("no code")?;
    ensure!(c.len() == 4097, "{} codewords", c.len());
    let r = full_pairwise_check(&c, FULL_CHECK_CAP).map_err(|e| e.to_string())?;
    ensure!(
        r.min_distance_found.is_some_and(|d| d >= 4),
        "min {:?}",
        r.min_distance_found
    );
    ensure!(
        r.pairs_checked == 4097 * 4096 / 2,
        "{} pairs",
        r.pairs_checked
    );
    within(start, Duration::from_secs(60), "duplication instance")
}

fn c9_pairing() -> Check {
    let start = Instant::now();
    let out = recipe_12_8_6(2).map_err(|e| e.to_string())?;
    let c = out.code.ok_or("no code")?;
    ensure!(c.len() == 262_165, "{} codewords", c.len());
    let r = sampled_check(&c, 1_000_000, 42).map_err(|e| e.to_string())?;
    ensure!(r.passed(), "{} violations in sample", r.violations_total);
    ensure!(
        r.min_distance_found.is_some_and(|d| d >= 8),
        "min {:?}",
        r.min_distance_found
    );
    let f = gf(2);
    let lifted_pivots = Subspace::coordinate(f, 12, 0..6).pivots();
    let lifted_len = 1u64 << 18;
    let mut extra = Vec::new();
    for i in 0..c.len() {
        let u = c.get(i);
        let lifted = u.pivots() == lifted_pivots;
        ensure!(lifted == (i < lifted_len), "codeword {i} out of place");
        if !lifted {
            extra.push(u);
        }
    }
    ensure!(extra.len() == 21, "{} non-lifted codewords", extra.len());
    let extra =
        Cdc::from_codewords(f, 12, 6, 8, extra, Default::default()).map_err(|e| e.to_string())?;
    let own = full_pairwise_check(&extra, FULL_CHECK_CAP).map_err(|e| e.to_string())?;
    ensure!(own.passed(), "non-lifted codewords meet each other");
    let idx: Vec<u64> = random_subset(&c, 10_000, 9)
        .into_iter()
        .filter(|&i| i < lifted_len)
        .collect();
    ensure!(idx.len() >= 9_990, "subset too small");
    let sub = c
        .subcode(&idx, 8, "lifted sample")
        .map_err(|e| e.to_string())?;
    let x = cross_check(&extra, &sub, 8);
    ensure!(
        x.passed() && x.pairs_checked == 21 * idx.len() as u64,
        "{} violations",
        x.violations_total
    );
    within(start, Duration::from_secs(300), "pairing")
}

fn c10_bounds() -> Check {
    let e = exact_registry(2, 6, 4, 3).ok_or("no exact entry")?;
    let j = johnson_upper(2, 6, 4, 3).map_err(|e| e.to_string())?;
    let s = singleton_like_upper(2, 6, 4, 3).map_err(|e| e.to_string())?;
    ensure!(
        e.kind == BoundKind::Exact && e.value == big(77),
        "exact {}",
        e.value
    );
    ensure!(j.value == big(81), "johnson {}", j.value);
    ensure!(s.value == big(93), "singleton {}", s.value);
    ensure!(e.value <= j.value && j.value <= s.value, "ordering");
    Ok(())
}

fn c11_properties() -> Check {
    let start = Instant::now();
    for q in support::SMALL_ORDERS {
        support::field_axioms(q)?;
    }
    for seed in 0..1000 {
        support::rref_trial(seed)?;
    }
    for seed in 0..500 {
        support::metric_trial(seed)?;
    }
    support::duality_exhaustive()?;
    for q in [2, 3] {
        for n in 0..=6 {
            for k in 0..=3.min(n) {
                support::enumeration_matches(q, n, k)?;
            }
        }
    }
    within(start, Duration::from_secs(300), "property suites")
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 11] = [
        (
            "rank distribution of the (3x3,2)_2 Gabidulin code",
            c1_rank_distribution,
        ),
        ("linkage line spread of F_2^8", c2_spread_instance),
        ("recipe 8_4_4 at q=2, full check", c3_recipe_8_4_4),
        ("parallelisms of PG(3,2) and PG(3,3)", c4_parallelisms),
        ("cor1 and registry values", c5_formulas),
        (
            "recipe 12_4_4_thm at q=2, streamed and sampled",
            c6_12_4_4_thm,
        ),
        ("recipe 12_6_6 at q=2, streamed and sampled", c7_12_6_6),
        ("duplication instance (9,4;3)_2", c8_duplication),
        ("pairing construction (12,8;6)_2", c9_pairing),
        ("bounds table for (2,6,4,3)", c10_bounds),
        ("property suites", c11_properties),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let t = start.elapsed().as_secs_f64();
        match result {
            Ok(()) => println!("PASS {:>2} {name} ({t:.2}s)", i + 1),
            Err(e) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({t:.2}s): {e}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

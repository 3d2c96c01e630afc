//! Brute-force oracles and property checks shared by the integration tests.
//! Nothing here calls the library's rank, span or distance routines.

#![allow(dead_code)]

use std::collections::HashSet;

use cdc_core::gf::Field;
use cdc_core::linalg::Matrix;
use cdc_core::subspace::Subspace;
use cdc_core::verify::enumerate_subspaces;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)*) => {
        if !$cond {
            return Err(format!($($fmt)*));
        }
    };
}
#[allow(unused_imports)]
pub(crate) use ensure;

pub const SMALL_ORDERS: [u64; 10] = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16];

pub fn gf(q: u64) -> Field {
    Field::of_order(q).unwrap()
}

/// Product of two index-encoded elements by schoolbook polynomial
/// multiplication and long division by the field modulus.
pub fn naive_mul(f: Field, a: u32, b: u32) -> u32 {
    let p = f.p();
    let e = f.e() as usize;
    let digits = |mut x: u32| {
        let mut d = vec![0u32; e];
        for slot in d.iter_mut() {
            *slot = x % p;
            x /= p;
        }
        d
    };
    let (da, db) = (digits(a), digits(b));
    let mut prod = vec![0u32; 2 * e];
    for i in 0..e {
        for j in 0..e {
            prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
        }
    }
    let m = f.modulus();
    for deg in (e..2 * e).rev() {
        let c = prod[deg];
        if c == 0 {
            continue;
        }
        // modulus is monic of degree e
        for (t, &mt) in m.iter().enumerate().take(e) {
            let idx = deg - e + t;
            prod[idx] = (prod[idx] + p * p - (c * mt) % p) % p;
        }
        prod[deg] = 0;
    }
    prod[..e].iter().rev().fold(0, |acc, &d| acc * p + d)
}

pub fn field_axioms(q: u64) -> Check {
    let f = gf(q);
    let n = q as u32;
    for a in 0..n {
        ensure!(
            f.add(a, 0) == a && f.mul(a, 1) == a,
            "identity fails at {a} in GF({q})"
        );
        ensure!(
            f.add(a, f.neg(a)) == 0,
            "additive inverse fails at {a} in GF({q})"
        );
        if a != 0 {
            let inv = f.inv(a).map_err(|e| e.to_string())?;
            ensure!(
                f.mul(a, inv) == 1,
                "multiplicative inverse fails at {a} in GF({q})"
            );
        }
        for b in 0..n {
            ensure!(
                f.add(a, b) == f.add(b, a),
                "addition not commutative in GF({q})"
            );
            ensure!(
                f.mul(a, b) == f.mul(b, a),
                "multiplication not commutative in GF({q})"
            );
            ensure!(
                f.mul(a, b) == naive_mul(f, a, b),
                "{a}*{b} disagrees with polynomial oracle in GF({q})"
            );
            for c in 0..n {
                ensure!(
                    f.add(f.add(a, b), c) == f.add(a, f.add(b, c)),
                    "addition not associative in GF({q})"
                );
                ensure!(
                    f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c)),
                    "multiplication not associative in GF({q})"
                );
                ensure!(
                    f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c)),
                    "distributivity fails in GF({q})"
                );
            }
        }
    }
    ensure!(f.inv(0).is_err(), "inverse of zero accepted in GF({q})");
    Ok(())
}

/// All vectors in the row space of `rows`, by enumerating coefficient tuples.
pub fn span_set(f: Field, n: usize, rows: &[Vec<u32>]) -> HashSet<Vec<u32>> {
    let q = f.q() as u64;
    let mut out = HashSet::new();
    for x in 0..q.pow(rows.len() as u32) {
        let mut v = vec![0u32; n];
        let mut x = x;
        for r in rows {
            let c = (x % q) as u32;
            x /= q;
            for (vj, &rj) in v.iter_mut().zip(r) {
                *vj = f.add(*vj, f.mul(c, rj));
            }
        }
        out.insert(v);
    }
    out
}

pub fn points(u: &Subspace) -> HashSet<Vec<u32>> {
    span_set(u.field(), u.n(), &u.generator().to_rows())
}

/// `log_q |S|` for a set known to have prime-power size.
pub fn log_q(q: u64, size: usize) -> usize {
    let mut d = 0;
    let mut s = 1usize;
    while s < size {
        s *= q as usize;
        d += 1;
    }
    assert_eq!(s, size, "{size} is not a power of {q}");
    d
}

/// Subspace distance from the sizes of the enumerated spaces.
pub fn naive_distance(a: &Subspace, b: &Subspace) -> usize {
    let q = a.field().q() as u64;
    let (sa, sb) = (points(a), points(b));
    let inter = sa.intersection(&sb).count();
    a.k() + b.k() - 2 * log_q(q, inter)
}

/// Rank over GF(2) of a matrix with at most 32 columns, by XOR basis.
pub fn rank_gf2(rows: &[Vec<u32>]) -> usize {
    let mut basis: Vec<u32> = Vec::new();
    for r in rows {
        let mut v = r.iter().fold(0u32, |acc, &b| (acc << 1) | b);
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

pub fn gaussian_binomial_u128(n: u32, k: u32, q: u64) -> u128 {
    if k > n {
        return 0;
    }
    let q = q as u128;
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..k {
        num *= q.pow(n - i) - 1;
        den *= q.pow(i + 1) - 1;
    }
    num / den
}

fn random_full_rank(f: Field, k: usize, n: usize, rng: &mut ChaCha8Rng) -> Matrix {
    loop {
        let m = Matrix::random(f, k, n, rng);
        if m.rank() == k {
            return m;
        }
    }
}

/// Checks that `r` is in reduced row echelon form, independently of the library.
fn is_rref(r: &Matrix) -> bool {
    let rows = r.to_rows();
    let mut last: Option<usize> = None;
    for (i, row) in rows.iter().enumerate() {
        let Some(p) = row.iter().position(|&x| x != 0) else {
            return false;
        };
        if row[p] != 1 || last.is_some_and(|l| p <= l) {
            return false;
        }
        if rows
            .iter()
            .enumerate()
            .any(|(j, other)| j != i && other[p] != 0)
        {
            return false;
        }
        last = Some(p);
    }
    true
}

/// RREF shape, idempotence, invariance under row operations, and agreement
/// of the row space with enumeration.
pub fn rref_trial(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = [2u64, 3, 4, 5][rng.gen_range(0..4)];
    let f = gf(q);
    let rows = rng.gen_range(1..=5);
    let cols = rng.gen_range(1..=if q == 2 { 70 } else { 7 });
    let m = Matrix::random(f, rows, cols, &mut rng);
    let r = m.rref();
    ensure!(is_rref(&r.matrix), "seed {seed}: output not in RREF");
    ensure!(
        r.rank == r.matrix.rows() && r.rank == r.pivots.weight(),
        "seed {seed}: rank bookkeeping"
    );
    ensure!(
        r.matrix.rref().matrix == r.matrix,
        "seed {seed}: not idempotent"
    );
    let p = random_full_rank(f, rows, rows, &mut rng);
    let pm = p.matmul(&m).map_err(|e| e.to_string())?;
    ensure!(
        pm.rref().matrix == r.matrix,
        "seed {seed}: changed by invertible row operation"
    );
    if q == 2 && cols <= 32 {
        ensure!(
            rank_gf2(&m.to_rows()) == r.rank,
            "seed {seed}: rank differs from XOR oracle"
        );
    }
    if (q as f64).powi(rows as i32) <= 4096.0 {
        let a = span_set(f, cols, &m.to_rows());
        let b = span_set(f, cols, &r.matrix.to_rows());
        ensure!(a == b, "seed {seed}: row space changed");
    }
    Ok(())
}

/// Identity, symmetry, triangle inequality and the brute-force formula on a
/// seeded triple of subspaces.
pub fn metric_trial(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = [2u64, 3][rng.gen_range(0..2)];
    let f = gf(q);
    let n = rng.gen_range(2..=if q == 2 { 7 } else { 5 });
    let k = rng.gen_range(1..n);
    let mut sub = || Subspace::from_matrix(&random_full_rank(f, k, n, &mut rng)).unwrap();
    let (a, b, c) = (sub(), sub(), sub());
    let d = |x: &Subspace, y: &Subspace| x.distance(y).unwrap();
    ensure!(d(&a, &a) == 0, "seed {seed}: d(U,U) != 0");
    ensure!(d(&a, &b) == d(&b, &a), "seed {seed}: asymmetric");
    ensure!(
        d(&a, &c) <= d(&a, &b) + d(&b, &c),
        "seed {seed}: triangle inequality"
    );
    ensure!(
        d(&a, &b) % 2 == 0 && d(&a, &b) <= 2 * k,
        "seed {seed}: distance out of range"
    );
    ensure!(
        (d(&a, &b) == 0) == (a == b),
        "seed {seed}: zero distance for distinct spaces"
    );
    for (x, y) in [(&a, &b), (&b, &c), (&a, &c)] {
        ensure!(
            d(x, y) == naive_distance(x, y),
            "seed {seed}: differs from enumeration oracle"
        );
    }
    Ok(())
}

/// `d(U^⊥, V^⊥) = d(U, V)` over all pairs of 2-subspaces of F_2^4.
pub fn duality_exhaustive() -> Check {
    let f = gf(2);
    let all = enumerate_subspaces(f, 4, 2, 1_000).map_err(|e| e.to_string())?;
    ensure!(all.len() == 35, "expected 35 lines, got {}", all.len());
    for u in &all {
        let uc = u.orthogonal_complement();
        ensure!(
            uc.orthogonal_complement() == *u,
            "double complement differs"
        );
        // every vector of U is orthogonal to every vector of U^⊥
        for x in points(u) {
            for y in points(&uc) {
                let dot = x
                    .iter()
                    .zip(&y)
                    .fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)));
                ensure!(dot == 0, "complement not orthogonal");
            }
        }
        for v in &all {
            let vc = v.orthogonal_complement();
            ensure!(
                u.distance(v).unwrap() == uc.distance(&vc).unwrap(),
                "duality changes a distance"
            );
        }
    }
    Ok(())
}

/// Enumeration yields every k-subspace exactly once, in sorted order.
pub fn enumeration_matches(q: u64, n: usize, k: usize) -> Check {
    let all = enumerate_subspaces(gf(q), n, k, 1_000_000).map_err(|e| e.to_string())?;
    let want = gaussian_binomial_u128(n as u32, k as u32, q);
    ensure!(
        all.len() as u128 == want,
        "({q},{n},{k}): {} subspaces, expected {want}",
        all.len()
    );
    ensure!(
        all.windows(2).all(|w| w[0] < w[1]),
        "({q},{n},{k}): not strictly increasing"
    );
    ensure!(
        all.iter().all(|u| u.k() == k && u.n() == n),
        "({q},{n},{k}): wrong dimension"
    );
    if k > 0 {
        let spans: HashSet<Vec<Vec<u32>>> = all
            .iter()
            .map(|u| {
                let mut s: Vec<Vec<u32>> = points(u).into_iter().collect();
                s.sort();
                s
            })
            .collect();
        ensure!(
            spans.len() == all.len(),
            "({q},{n},{k}): two entries span the same space"
        );
    }
    Ok(())
}

//! Spreads, 2-parallelisms of F_q^4 and disjoint 2-spreads of F_q^8.

use crate::error::{Error, Result};
use crate::gf::{ExtField, Field};
use crate::linalg::Matrix;
use crate::subspace::Subspace;
use crate::verify::enumerate_subspaces;

use super::{Cdc, Provenance};

/// A list of (partial) spreads, pairwise without common members when
/// `disjoint` is set.
#[derive(Clone, Debug)]
pub struct SpreadFamily {
    pub members: Vec<Cdc>,
    pub disjoint: bool,
}

impl SpreadFamily {
    pub fn total_len(&self) -> u64 {
        self.members.iter().map(Cdc::len).sum()
    }
}

/// The k-spread of F_q^n obtained by field reduction: the points of
/// PG(n/k − 1, q^k) read as k-subspaces over GF(q).
pub fn spread(field: Field, n: usize, k: usize) -> Result<Cdc> {
    if k == 0 || n == 0 || !n.is_multiple_of(k) {
        return Err(Error::pre(format!("k={k} does not divide n={n}")));
    }
    let t = n / k;
    let ext = ExtField::new(field, k)?;
    let big = ext.field();
    let qk = big.q();
    let mut words = Vec::new();
    for lead in 0..t {
        let tail = t - lead - 1;
        let count = (qk as u64).pow(tail as u32);
        for x in 0..count {
            // normalized representative: zeros, a one at `lead`, free tail
            let mut v = vec![0u32; t];
            v[lead] = 1;
            let mut r = x;
            for slot in v.iter_mut().skip(lead + 1) {
                *slot = (r % qk as u64) as u32;
                r /= qk as u64;
            }
            let gen = Matrix::from_fn(field, k, n, |i, j| {
                let comp = big.mul(ext.basis()[i], v[j / k]);
                ext.coordinate(comp, j % k)
            });
            words.push(Subspace::from_matrix(&gen)?);
        }
    }
    Ok(Cdc::from_trusted(
        field,
        n,
        k,
        2 * k,
        words,
        Provenance::tag(format!("spread(q={},n={n},k={k})", field.q())),
    ))
}

type LineSet = [u64; 4];

fn set_bit(s: &mut LineSet, i: usize) {
    s[i / 64] |= 1 << (i % 64);
}

fn has_bit(s: &LineSet, i: usize) -> bool {
    s[i / 64] & (1 << (i % 64)) != 0
}

fn meets(a: &LineSet, b: &LineSet) -> bool {
    a.iter().zip(b).any(|(x, y)| x & y != 0)
}

/// Every line spread of PG(3, q), each as sorted line indices.
fn all_line_spreads(lines: &[Subspace], points: &[Subspace]) -> Result<Vec<Vec<usize>>> {
    let np = points.len();
    let incidence: Vec<u128> = lines
        .iter()
        .map(|l| {
            points
                .iter()
                .enumerate()
                .filter(|(_, p)| l.contains(p).expect("same ambient"))
                .fold(0u128, |acc, (i, _)| acc | (1u128 << i))
        })
        .collect();
    let full: u128 = if np == 128 {
        u128::MAX
    } else {
        (1u128 << np) - 1
    };
    let mut by_point: Vec<Vec<usize>> = vec![Vec::new(); np];
    for (li, &mask) in incidence.iter().enumerate() {
        for (p, slot) in by_point.iter_mut().enumerate() {
            if mask & (1 << p) != 0 {
                slot.push(li);
            }
        }
    }
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    fn rec(
        covered: u128,
        full: u128,
        incidence: &[u128],
        by_point: &[Vec<usize>],
        chosen: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if covered == full {
            let mut s = chosen.clone();
            s.sort_unstable();
            out.push(s);
            return;
        }
        let p = (!covered).trailing_zeros() as usize;
        for &l in &by_point[p] {
            if incidence[l] & covered == 0 {
                chosen.push(l);
                rec(
                    covered | incidence[l],
                    full,
                    incidence,
                    by_point,
                    chosen,
                    out,
                );
                chosen.pop();
            }
        }
    }
    rec(0, full, &incidence, &by_point, &mut chosen, &mut out);
    out.sort();
    Ok(out)
}

/// Exact cover of all lines by spreads (Algorithm X with the
/// fewest-candidates heuristic). Returns chosen spread indices.
fn cover_lines(
    num_lines: usize,
    spreads: &[LineSet],
    by_line: &[Vec<usize>],
    need: usize,
) -> Option<Vec<usize>> {
    fn rec(
        covered: &mut LineSet,
        num_lines: usize,
        spreads: &[LineSet],
        by_line: &[Vec<usize>],
        chosen: &mut Vec<usize>,
        need: usize,
        budget: &mut u64,
    ) -> bool {
        if chosen.len() == need {
            return (0..num_lines).all(|l| has_bit(covered, l));
        }
        if *budget == 0 {
            return false;
        }
        *budget -= 1;
        let mut best: Option<(usize, usize)> = None;
        for l in 0..num_lines {
            if has_bit(covered, l) {
                continue;
            }
            let c = by_line[l]
                .iter()
                .filter(|&&s| !meets(&spreads[s], covered))
                .count();
            if best.is_none_or(|(_, bc)| c < bc) {
                best = Some((l, c));
                if c == 0 {
                    return false;
                }
            }
        }
        let Some((line, _)) = best else {
            return false;
        };
        for &s in &by_line[line] {
            if meets(&spreads[s], covered) {
                continue;
            }
            for (w, x) in covered.iter_mut().zip(&spreads[s]) {
                *w |= x;
            }
            chosen.push(s);
            if rec(covered, num_lines, spreads, by_line, chosen, need, budget) {
                return true;
            }
            chosen.pop();
            for (w, x) in covered.iter_mut().zip(&spreads[s]) {
                *w &= !x;
            }
        }
        false
    }
    let mut covered = [0u64; 4];
    let mut chosen = Vec::new();
    let mut budget = 50_000_000u64;
    rec(
        &mut covered,
        num_lines,
        spreads,
        by_line,
        &mut chosen,
        need,
        &mut budget,
    )
    .then_some(chosen)
}

/// A 2-parallelism of F_q^4: q²+q+1 pairwise disjoint line spreads that
/// together contain every line once. Found by exact search for q ∈ {2, 3};
/// other fields need an imported parallelism.
pub fn parallelism_2_of_f_q4(field: Field) -> Result<SpreadFamily> {
    let q = field.q();
    if q > 3 {
        return Err(Error::Unsupported(
            q,
            "2-parallelisms are searched only for q in {2, 3}; import one instead".into(),
        ));
    }
    let lines = enumerate_subspaces(field, 4, 2, 1_000_000)?;
    let points = enumerate_subspaces(field, 4, 1, 1_000_000)?;
    let spreads = all_line_spreads(&lines, &points)?;
    let sets: Vec<LineSet> = spreads
        .iter()
        .map(|s| {
            let mut set = [0u64; 4];
            for &l in s {
                set_bit(&mut set, l);
            }
            set
        })
        .collect();
    let mut by_line: Vec<Vec<usize>> = vec![Vec::new(); lines.len()];
    for (si, s) in spreads.iter().enumerate() {
        for &l in s {
            by_line[l].push(si);
        }
    }
    let need = (q * q + q + 1) as usize;
    let chosen = cover_lines(lines.len(), &sets, &by_line, need)
        .ok_or_else(|| Error::Verification(format!("no 2-parallelism of F_{q}^4 found")))?;
    let mut members: Vec<Vec<Subspace>> = chosen
        .iter()
        .map(|&s| spreads[s].iter().map(|&l| lines[l].clone()).collect())
        .collect();
    members.sort();
    let members = members
        .into_iter()
        .enumerate()
        .map(|(j, words)| {
            Cdc::from_trusted(
                field,
                4,
                2,
                4,
                words,
                Provenance::tag(format!("parallelism_2_of_F_q4(q={q})[{j}]")),
            )
        })
        .collect();
    Ok(SpreadFamily {
        members,
        disjoint: true,
    })
}

/// Validates an externally supplied 2-parallelism of F_q^4.
pub fn parallelism_from_spreads(field: Field, spreads: Vec<Cdc>) -> Result<SpreadFamily> {
    let q = field.q() as u64;
    if spreads.len() as u64 != q * q + q + 1 {
        return Err(Error::Verification(format!(
            "a 2-parallelism of F_{q}^4 has {} spreads, got {}",
            q * q + q + 1,
            spreads.len()
        )));
    }
    let mut seen = std::collections::HashSet::new();
    for s in &spreads {
        if s.n() != 4 || s.k() != 2 || s.len() != q * q + 1 {
            return Err(Error::Verification(
                "member is not a line spread of F_q^4".into(),
            ));
        }
        let words: Vec<Subspace> = s.iter().collect();
        for i in 0..words.len() {
            for j in i + 1..words.len() {
                if !words[i].is_disjoint(&words[j])? {
                    return Err(Error::Verification("spread lines meet".into()));
                }
            }
        }
        for w in words {
            if !seen.insert(w) {
                return Err(Error::Verification("spreads share a line".into()));
            }
        }
    }
    Ok(SpreadFamily {
        members: spreads,
        disjoint: true,
    })
}

/// q²+q+1 pairwise disjoint 2-spreads of F_q^8: a 2-parallelism laid inside
/// every solid of a 4-spread, grouping the j-th spreads together.
pub fn disjoint_2spreads_of_f_q8(parallelism: &SpreadFamily) -> Result<SpreadFamily> {
    let field = parallelism
        .members
        .first()
        .map(Cdc::field)
        .ok_or_else(|| Error::pre("empty parallelism"))?;
    let solids = spread(field, 8, 4)?;
    let mut members = Vec::with_capacity(parallelism.members.len());
    for (j, par) in parallelism.members.iter().enumerate() {
        let mut words = Vec::new();
        for w in solids.iter() {
            let basis = w.generator();
            for line in par.iter() {
                words.push(Subspace::from_matrix(&line.generator().matmul(basis)?)?);
            }
        }
        members.push(Cdc::from_trusted(
            field,
            8,
            2,
            4,
            words,
            Provenance::tag(format!("disjoint_2spreads_of_F_q8(q={})[{j}]", field.q())),
        ));
    }
    Ok(SpreadFamily {
        members,
        disjoint: true,
    })
}

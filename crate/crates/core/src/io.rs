//! Text format for codes and spread families.
//!
//! ```text
//! #Q=2
//! #P=2
//! #E=1
//! #MOD=0,1
//! #N=6
//! #K=3
//! #D=4
//! #COUNT=64
//! #ORDER=canonical
//! #PROV=lifted_mrd(q=2,n=6,k=3,d=4)
//! 100000|010000|001000
//! ...
//! ```
//!
//! Header keys appear once each; `Q`, `N`, `K`, `D` and `COUNT` are
//! required. Lines starting with `#` that are not `KEY=VALUE` are comments.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use num_bigint::BigUint;
use thiserror::Error;

use crate::cdc::{Cdc, Provenance, SpreadFamily};
use crate::error::{Error, Result};
use crate::gf::Field;
use crate::subspace::Subspace;
use crate::verify::full_pairwise_check;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("line {line}: duplicate codeword {codeword}")]
    DuplicateCodeword { line: usize, codeword: String },
    #[error("line {line}: {msg}")]
    DimensionMismatch { line: usize, msg: String },
    #[error("header declares {header} codewords, body has {body}")]
    CountMismatch { header: u64, body: u64 },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    /// Lexicographic on the serialized codewords.
    Canonical,
    /// Enumeration order of the generator.
    Generation,
}

impl Order {
    fn as_str(self) -> &'static str {
        match self {
            Order::Canonical => "canonical",
            Order::Generation => "generation",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeHeader {
    pub field: Field,
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub count: u64,
    pub order: Order,
    pub provenance: String,
}

pub(crate) fn ser_big<S: serde::Serializer>(
    v: &BigUint,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn write_header<W: Write>(w: &mut W, h: &CodeHeader) -> Result<()> {
    let f = h.field;
    let modulus: Vec<String> = f.modulus().iter().map(u32::to_string).collect();
    writeln!(w, "#Q={}", f.q())?;
    writeln!(w, "#P={}", f.p())?;
    writeln!(w, "#E={}", f.e())?;
    writeln!(w, "#MOD={}", modulus.join(","))?;
    writeln!(w, "#N={}", h.n)?;
    writeln!(w, "#K={}", h.k)?;
    writeln!(w, "#D={}", h.d)?;
    writeln!(w, "#COUNT={}", h.count)?;
    writeln!(w, "#ORDER={}", h.order.as_str())?;
    writeln!(w, "#PROV={}", h.provenance.replace(['\n', '\r'], " "))?;
    Ok(())
}

fn header_of(c: &Cdc, order: Order) -> CodeHeader {
    CodeHeader {
        field: c.field(),
        n: c.n(),
        k: c.k(),
        d: c.d_claim(),
        count: c.len(),
        order,
        provenance: c.provenance().recipe.clone(),
    }
}

/// Writes `c`; canonical order needs the code in memory, generation order streams.
pub fn write_code<W: Write>(c: &Cdc, order: Order, w: W) -> Result<()> {
    let mut w = BufWriter::new(w);
    write_header(&mut w, &header_of(c, order))?;
    match order {
        Order::Canonical => {
            let mut lines: Vec<String> = c.iter().map(|u| u.serialize()).collect();
            lines.sort_unstable();
            for l in lines {
                writeln!(w, "{l}")?;
            }
        }
        Order::Generation => {
            for u in c.iter() {
                writeln!(w, "{u}")?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn export(c: &Cdc, path: impl AsRef<Path>, order: Order) -> Result<()> {
    write_code(c, order, File::create(path)?)
}

fn malformed(s: impl Into<String>) -> Error {
    FormatError::MalformedHeader(s.into()).into()
}

#[derive(Default)]
struct RawHeader {
    q: Option<u64>,
    p: Option<u64>,
    e: Option<u32>,
    modulus: Option<Vec<u32>>,
    n: Option<usize>,
    k: Option<usize>,
    d: Option<usize>,
    count: Option<u64>,
    order: Option<Order>,
    prov: Option<String>,
    families: Vec<usize>,
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| malformed(format!("{key}={v} is not a number")))
}

fn set<T>(slot: &mut Option<T>, key: &str, v: T) -> Result<()> {
    if slot.replace(v).is_some() {
        return Err(malformed(format!("duplicate key {key}")));
    }
    Ok(())
}

impl RawHeader {
    /// Returns `Ok(false)` for comment lines.
    fn absorb(&mut self, line: &str, body_seen: usize) -> Result<bool> {
        let Some((key, v)) = line[1..].split_once('=') else {
            return Ok(false);
        };
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_uppercase()) {
            return Ok(false);
        }
        match key {
            "Q" => set(&mut self.q, key, num(key, v)?)?,
            "P" => set(&mut self.p, key, num(key, v)?)?,
            "E" => set(&mut self.e, key, num(key, v)?)?,
            "MOD" => {
                let coeffs = v
                    .split(',')
                    .map(|t| num::<u32>(key, t))
                    .collect::<Result<Vec<_>>>()?;
                set(&mut self.modulus, key, coeffs)?
            }
            "N" => set(&mut self.n, key, num(key, v)?)?,
            "K" => set(&mut self.k, key, num(key, v)?)?,
            "D" => set(&mut self.d, key, num(key, v)?)?,
            "COUNT" => set(&mut self.count, key, num(key, v)?)?,
            "ORDER" => {
                let o = match v.trim() {
                    "canonical" => Order::Canonical,
                    "generation" => Order::Generation,
                    other => return Err(malformed(format!("unknown order `{other}`"))),
                };
                set(&mut self.order, key, o)?
            }
            "PROV" => set(&mut self.prov, key, v.to_string())?,
            "FAMILY" => self.families.push(body_seen),
            other => return Err(malformed(format!("unknown key {other}"))),
        }
        Ok(true)
    }

    fn finish(self) -> Result<(CodeHeader, Vec<usize>)> {
        let need =
            |o: Option<usize>, key: &str| o.ok_or_else(|| malformed(format!("missing {key}")));
        let q = self.q.ok_or_else(|| malformed("missing Q"))?;
        let field = match (&self.modulus, self.p) {
            (Some(m), Some(p)) => {
                Field::with_modulus(p, m).map_err(|e| malformed(e.to_string()))?
            }
            (Some(_), None) => return Err(malformed("MOD needs P")),
            _ => Field::of_order(q).map_err(|e| malformed(e.to_string()))?,
        };
        if field.q() as u64 != q
            || self.p.is_some_and(|p| p != field.p() as u64)
            || self.e.is_some_and(|e| e != field.e())
        {
            return Err(malformed(format!(
                "Q={q} disagrees with P={:?}, E={:?}, MOD={:?}",
                self.p, self.e, self.modulus
            )));
        }
        let (n, k, d) = (need(self.n, "N")?, need(self.k, "K")?, need(self.d, "D")?);
        if k > n || d % 2 != 0 {
            return Err(malformed(format!("invalid parameters N={n}, K={k}, D={d}")));
        }
        let count = self.count.ok_or_else(|| malformed("missing COUNT"))?;
        let h = CodeHeader {
            field,
            n,
            k,
            d,
            count,
            order: self.order.unwrap_or(Order::Generation),
            provenance: self.prov.unwrap_or_default(),
        };
        Ok((h, self.families))
    }
}

fn read_body<R: BufRead>(r: R) -> Result<(CodeHeader, Vec<Subspace>, Vec<usize>)> {
    let mut raw = RawHeader::default();
    let mut body: Vec<(usize, String)> = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        if t.starts_with('#') {
            raw.absorb(t, body.len())?;
            continue;
        }
        body.push((i + 1, t.to_string()));
    }
    let (h, families) = raw.finish()?;
    if body.len() as u64 != h.count {
        return Err(FormatError::CountMismatch {
            header: h.count,
            body: body.len() as u64,
        }
        .into());
    }
    let mut seen = HashSet::with_capacity(body.len());
    let mut words = Vec::with_capacity(body.len());
    for (line, text) in body {
        let u = Subspace::parse(h.field, &text).map_err(|e| match e {
            Error::EmptySubspace | Error::DimensionMismatch(_) => FormatError::DimensionMismatch {
                line,
                msg: e.to_string(),
            },
            other => FormatError::Parse {
                line,
                msg: other.to_string(),
            },
        })?;
        if u.n() != h.n || u.k() != h.k {
            return Err(FormatError::DimensionMismatch {
                line,
                msg: format!(
                    "codeword has n={}, k={}; header says N={}, K={}",
                    u.n(),
                    u.k(),
                    h.n,
                    h.k
                ),
            }
            .into());
        }
        if !seen.insert(u.clone()) {
            return Err(FormatError::DuplicateCodeword {
                line,
                codeword: text,
            }
            .into());
        }
        words.push(u);
    }
    Ok((h, words, families))
}

pub fn read_code<R: BufRead>(r: R) -> Result<Cdc> {
    let (h, words, _) = read_body(r)?;
    Cdc::from_codewords(h.field, h.n, h.k, h.d, words, Provenance::tag(h.provenance))
}

pub fn import(path: impl AsRef<Path>) -> Result<Cdc> {
    read_code(BufReader::new(File::open(path)?))
}

/// Reads a code and a subcode; the subcode's indices are recorded as the
/// code's partial spread when its distance is `2k`.
pub fn import_with_subcode(
    path: impl AsRef<Path>,
    subcode_path: impl AsRef<Path>,
) -> Result<(Cdc, Cdc)> {
    let c = import(path)?;
    let sub = import(subcode_path)?;
    if sub.is_empty() {
        return Ok((c, sub));
    }
    if sub.field() != c.field() || sub.n() != c.n() || sub.k() != c.k() {
        return Err(Error::DimensionMismatch(
            "subcode lives in a different Grassmannian".into(),
        ));
    }
    let mut idx = Vec::with_capacity(sub.len() as usize);
    for u in sub.iter() {
        idx.push(
            c.position(&u)
                .ok_or_else(|| Error::pre(format!("subcode codeword {u} is not in the code")))?,
        );
    }
    let rep = full_pairwise_check(&sub, crate::verify::FULL_CHECK_CAP)?;
    if !rep.passed() {
        return Err(Error::Verification(format!(
            "subcode distance {:?} below its claim {}",
            rep.min_distance_found,
            sub.d_claim()
        )));
    }
    let c = if sub.d_claim() == 2 * c.k() {
        let mut prov = c.provenance().clone();
        prov.partial_spread = Some(idx);
        c.with_provenance(prov)
    } else {
        c
    };
    Ok((c, sub))
}

/// Writes the members of a spread family, each introduced by `#FAMILY=j`.
pub fn write_family<W: Write>(fam: &SpreadFamily, w: W) -> Result<()> {
    let first = fam
        .members
        .first()
        .ok_or_else(|| Error::pre("empty family"))?;
    let mut w = BufWriter::new(w);
    let h = CodeHeader {
        count: fam.total_len(),
        provenance: "spread family".into(),
        ..header_of(first, Order::Generation)
    };
    write_header(&mut w, &h)?;
    for (j, m) in fam.members.iter().enumerate() {
        writeln!(w, "#FAMILY={j}")?;
        for u in m.iter() {
            writeln!(w, "{u}")?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_family<R: BufRead>(r: R) -> Result<SpreadFamily> {
    let (h, words, mut starts) = read_body(r)?;
    if starts.first() != Some(&0) {
        return Err(malformed("family file must open with #FAMILY"));
    }
    starts.push(words.len());
    let mut members = Vec::with_capacity(starts.len() - 1);
    for (j, w) in starts.windows(2).enumerate() {
        let part = words[w[0]..w[1]].to_vec();
        members.push(Cdc::from_codewords(
            h.field,
            h.n,
            h.k,
            h.d,
            part,
            Provenance::tag(format!("family member {j}")),
        )?);
    }
    let disjoint = members.iter().all(|m| m.d_claim() == 2 * m.k());
    Ok(SpreadFamily { members, disjoint })
}

//! Arithmetic in GF(p^e).
//!
//! An element is an integer index in `[0, q)` whose base-`p` digits are the
//! polynomial coefficients, constant term first. Fields are interned: a
//! [`Field`] is a `Copy` handle to an immutable, process-wide [`FieldSpec`],
//! so matrices and subspaces can carry their field without reference counting
//! in the hot loops.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};

/// Largest supported field order. Multiplication always goes through
/// log/antilog tables, so the tables bound the order.
pub const MAX_ORDER: u64 = 1 << 16;

/// Addition tables are precomputed for odd characteristic up to this order.
const ADD_TABLE_MAX: u32 = 256;

pub struct FieldSpec {
    p: u32,
    e: u32,
    q: u32,
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    add: Option<Vec<u32>>,
    neg: Vec<u32>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coeffs: Vec<String> = self.modulus.iter().map(u32::to_string).collect();
        write!(f, "GF p={} e={} mod={}", self.p, self.e, coeffs.join(","))
    }
}

/// Handle to an interned field.
#[derive(Clone, Copy)]
pub struct Field(&'static FieldSpec);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.0, other.0)
    }
}

impl Eq for Field {}

impl std::hash::Hash for Field {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.q.hash(state);
    }
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::ops::Deref for Field {
    type Target = FieldSpec;

    fn deref(&self) -> &FieldSpec {
        self.0
    }
}

type Registry = Mutex<HashMap<(u32, u32, Vec<u32>), &'static FieldSpec>>;

fn registry() -> &'static Registry {
    static REG: OnceLock<Registry> = OnceLock::new();
    REG.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Default moduli, keyed by (p, e), so repeated `Field::new` calls skip the search.
fn default_moduli() -> &'static Mutex<HashMap<(u32, u32), Field>> {
    static DEF: OnceLock<Mutex<HashMap<(u32, u32), Field>>> = OnceLock::new();
    DEF.get_or_init(|| Mutex::new(HashMap::new()))
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn check_order(p: u64, e: u32) -> Result<u32> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if e == 0 {
        return Err(Error::pre("extension degree must be at least 1"));
    }
    let mut q: u64 = 1;
    for _ in 0..e {
        q = q.saturating_mul(p);
        if q > MAX_ORDER {
            return Err(Error::FieldTooLarge { p, e });
        }
    }
    Ok(q as u32)
}

impl Field {
    /// GF(p^e) with the lexicographically smallest monic irreducible modulus,
    /// comparing coefficient tuples from the constant term up.
    pub fn new(p: u64, e: u32) -> Result<Field> {
        check_order(p, e)?;
        let key = (p as u32, e);
        if let Some(f) = default_moduli().lock().unwrap().get(&key) {
            return Ok(*f);
        }
        let modulus = smallest_irreducible(p as u32, e);
        let f = Self::with_modulus(p, &modulus)?;
        default_moduli().lock().unwrap().insert(key, f);
        Ok(f)
    }

    /// GF(p) for prime `p`.
    pub fn prime(p: u64) -> Result<Field> {
        Self::new(p, 1)
    }

    /// Field of order `q`, which must be a prime power.
    pub fn of_order(q: u64) -> Result<Field> {
        let (p, e) = prime_power(q).ok_or(Error::NotPrime(q))?;
        Self::new(p, e)
    }

    /// GF(p^e) with a caller-supplied modulus (constant term first, monic,
    /// degree e). Interoperates with Conway-polynomial conventions.
    pub fn with_modulus(p: u64, modulus: &[u32]) -> Result<Field> {
        if modulus.len() < 2 {
            return Err(Error::BadModulus(0));
        }
        let e = (modulus.len() - 1) as u32;
        check_order(p, e)?;
        let p = p as u32;
        if *modulus.last().unwrap() != 1
            || modulus.iter().any(|&c| c >= p)
            || !is_irreducible(p, modulus)
        {
            return Err(Error::BadModulus(e));
        }
        let key = (p, e, modulus.to_vec());
        let mut reg = registry().lock().unwrap();
        if let Some(spec) = reg.get(&key) {
            return Ok(Field(spec));
        }
        let spec: &'static FieldSpec = Box::leak(Box::new(FieldSpec::build(p, modulus)));
        reg.insert(key, spec);
        Ok(Field(spec))
    }

    pub fn spec(&self) -> &'static FieldSpec {
        self.0
    }
}

/// Splits `q` into `(p, e)` when it is a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while !q.is_multiple_of(p) {
        p += 1;
    }
    let (mut rest, mut e) = (q, 0u32);
    while rest % p == 0 {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

impl FieldSpec {
    fn build(p: u32, modulus: &[u32]) -> FieldSpec {
        let e = (modulus.len() - 1) as u32;
        let q = p.pow(e);
        let slow = |a: u32, b: u32| slow_mul(p, modulus, a, b);
        let order = q - 1;
        let prime_factors = factorize(order as u64);
        let generator = (1..q)
            .find(|&g| {
                order == 1
                    || prime_factors
                        .iter()
                        .all(|&r| slow_pow(p, modulus, g, (order as u64) / r) != 1)
            })
            .expect("multiplicative group is cyclic");
        let mut exp = vec![0u32; 2 * order.max(1) as usize];
        let mut log = vec![0u32; q as usize];
        let mut x = 1u32;
        for i in 0..order as usize {
            exp[i] = x;
            exp[i + order as usize] = x;
            log[x as usize] = i as u32;
            x = slow(x, generator);
        }
        if order == 1 {
            exp[0] = 1;
            exp[1] = 1;
        }
        let digit_add = |a: u32, b: u32| -> u32 {
            let (mut a, mut b, mut out, mut place) = (a, b, 0u32, 1u32);
            for _ in 0..e {
                out += ((a % p + b % p) % p) * place;
                a /= p;
                b /= p;
                place *= p;
            }
            out
        };
        let neg = (0..q)
            .map(|a| {
                let (mut a, mut out, mut place) = (a, 0u32, 1u32);
                for _ in 0..e {
                    out += ((p - a % p) % p) * place;
                    a /= p;
                    place *= p;
                }
                out
            })
            .collect();
        let add = (p != 2 && q <= ADD_TABLE_MAX).then(|| {
            let mut t = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    t[(a * q + b) as usize] = digit_add(a, b);
                }
            }
            t
        });
        FieldSpec {
            p,
            e,
            q,
            modulus: modulus.to_vec(),
            exp,
            log,
            add,
            neg,
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Modulus coefficients, constant term first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn is_binary(&self) -> bool {
        self.q == 2
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        match &self.add {
            Some(t) => t[(a * self.q + b) as usize],
            None => {
                let (mut a, mut b, mut out, mut place) = (a, b, 0u32, 1u32);
                for _ in 0..self.e {
                    out += ((a % self.p + b % self.p) % self.p) * place;
                    a /= self.p;
                    b /= self.p;
                    place *= self.p;
                }
                out
            }
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        self.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
    }

    pub fn inv(&self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        let order = self.q - 1;
        Ok(self.exp[((order - self.log[a as usize]) % order.max(1)) as usize])
    }

    pub fn div(&self, a: u32, b: u32) -> Result<u32> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: u32, n: u64) -> u32 {
        if n == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let order = (self.q - 1) as u64;
        let l = (self.log[a as usize] as u64 * (n % order)) % order;
        self.exp[l as usize]
    }

    /// `a^(p^i)`.
    pub fn frobenius(&self, a: u32, i: u32) -> u32 {
        self.pow(a, (self.p as u64).pow(i % self.e.max(1)))
    }

    /// Base-p digits of `a`, constant coefficient first.
    pub fn coefficients(&self, a: u32) -> Vec<u32> {
        let mut a = a;
        (0..self.e)
            .map(|_| {
                let d = a % self.p;
                a /= self.p;
                d
            })
            .collect()
    }

    pub fn from_coefficients(&self, coeffs: &[u32]) -> u32 {
        coeffs.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }
}

impl FromStr for Field {
    type Err = Error;

    /// Parses `GF p=<p> e=<e> mod=<c_0,...,c_e>`.
    fn from_str(s: &str) -> Result<Field> {
        let bad = || Error::pre(format!("malformed field line `{s}`"));
        let mut parts = s.split_whitespace();
        if parts.next() != Some("GF") {
            return Err(bad());
        }
        let (mut p, mut e, mut m) = (None, None, None);
        for part in parts {
            let (k, v) = part.split_once('=').ok_or_else(bad)?;
            match k {
                "p" => p = Some(v.parse::<u64>().map_err(|_| bad())?),
                "e" => e = Some(v.parse::<u32>().map_err(|_| bad())?),
                "mod" => {
                    m = Some(
                        v.split(',')
                            .map(|c| c.parse::<u32>())
                            .collect::<std::result::Result<Vec<_>, _>>()
                            .map_err(|_| bad())?,
                    )
                }
                _ => return Err(bad()),
            }
        }
        let (p, e, m) = (p.ok_or_else(bad)?, e.ok_or_else(bad)?, m.ok_or_else(bad)?);
        if m.len() != e as usize + 1 {
            return Err(bad());
        }
        Field::with_modulus(p, &m)
    }
}

fn factorize(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Polynomials over GF(p) as coefficient vectors, constant term first.

fn trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
    a
}

fn poly_rem(p: u32, a: &[u32], m: &[u32]) -> Vec<u32> {
    let mut r = trim(a.to_vec());
    let dm = m.len() - 1;
    let lead_inv = mod_inv(m[dm], p);
    while r.len() > dm && !(r.len() == 1 && r[0] == 0) {
        let shift = r.len() - 1 - dm;
        let c = (r[r.len() - 1] as u64 * lead_inv as u64 % p as u64) as u32;
        for (i, &mi) in m.iter().enumerate() {
            let idx = i + shift;
            r[idx] = ((r[idx] as u64 + (p - c) as u64 * mi as u64) % p as u64) as u32;
        }
        r = trim(r);
    }
    r
}

fn mod_inv(a: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let (mut b, mut n) = (a as u64 % p as u64, p as u64 - 2);
    while n > 0 {
        if n & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        n >>= 1;
    }
    r as u32
}

fn is_irreducible(p: u32, m: &[u32]) -> bool {
    let deg = m.len() - 1;
    if deg == 1 {
        return true;
    }
    for d in 1..=deg / 2 {
        // all monic polynomials of degree d
        for low in 0..(p as u64).pow(d as u32) {
            let mut cand = Vec::with_capacity(d + 1);
            let mut x = low;
            for _ in 0..d {
                cand.push((x % p as u64) as u32);
                x /= p as u64;
            }
            cand.push(1);
            let r = poly_rem(p, m, &cand);
            if r.iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn smallest_irreducible(p: u32, e: u32) -> Vec<u32> {
    let count = (p as u64).pow(e);
    for n in 0..count {
        // c_0 is the most significant digit of n
        let mut coeffs = vec![0u32; e as usize + 1];
        let mut x = n;
        for i in (0..e as usize).rev() {
            coeffs[i] = (x % p as u64) as u32;
            x /= p as u64;
        }
        coeffs[e as usize] = 1;
        if is_irreducible(p, &coeffs) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn slow_mul(p: u32, modulus: &[u32], a: u32, b: u32) -> u32 {
    let e = modulus.len() - 1;
    let digits = |mut x: u32| -> Vec<u32> {
        (0..e)
            .map(|_| {
                let d = x % p;
                x /= p;
                d
            })
            .collect()
    };
    let (da, db) = (digits(a), digits(b));
    let mut prod = vec![0u32; 2 * e];
    for (i, &x) in da.iter().enumerate() {
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % p as u64) as u32;
        }
    }
    let mut r = poly_rem(p, &prod, modulus);
    r.resize(e, 0);
    r.iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn slow_pow(p: u32, modulus: &[u32], a: u32, mut n: u64) -> u32 {
    let (mut acc, mut base) = (1u32, a);
    while n > 0 {
        if n & 1 == 1 {
            acc = slow_mul(p, modulus, acc, base);
        }
        base = slow_mul(p, modulus, base, base);
        n >>= 1;
    }
    acc
}

/// GF(q^M) viewed as an M-dimensional vector space over GF(q), with the
/// power basis `1, θ, ..., θ^(M-1)` where θ is the element with index `p`
/// (the class of `x`).
#[derive(Clone)]
pub struct ExtField {
    base: Field,
    degree: usize,
    field: Field,
    basis: Vec<u32>,
    /// `embed[c]` is the image of base element `c`.
    embed: Vec<u32>,
    /// Coordinates of every element, `degree` entries each. Empty when the
    /// base is a prime field (coordinates are then the base-p digits).
    to_vec: Vec<u32>,
    /// Element for each coordinate vector, indexed by base-q digits.
    from_vec: Vec<u32>,
}

impl fmt::Debug for ExtField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ExtField(q={}, M={}, {})",
            self.base.q(),
            self.degree,
            self.field
        )
    }
}

impl ExtField {
    pub fn new(base: Field, degree: usize) -> Result<ExtField> {
        if degree == 0 {
            return Err(Error::pre("extension degree must be at least 1"));
        }
        let p = base.p() as u64;
        let total = base.e() as usize * degree;
        let field = Field::new(p, total as u32)?;
        let theta = if total == 1 { 1 } else { p as u32 };
        let basis: Vec<u32> = (0..degree).map(|i| field.pow(theta, i as u64)).collect();
        if base.e() == 1 {
            return Ok(ExtField {
                base,
                degree,
                field,
                embed: (0..base.q()).collect(),
                basis,
                to_vec: Vec::new(),
                from_vec: Vec::new(),
            });
        }
        // locate a root of the base modulus to embed GF(q)
        let m = base.modulus();
        let gamma = (0..field.q())
            .find(|&x| {
                let mut acc = 0u32;
                for &c in m.iter().rev() {
                    acc = field.add(field.mul(acc, x), c);
                }
                acc == 0
            })
            .expect("GF(q) embeds in GF(q^M)");
        let embed: Vec<u32> = (0..base.q())
            .map(|c| {
                base.coefficients(c)
                    .iter()
                    .enumerate()
                    .fold(0, |acc, (i, &d)| {
                        field.add(acc, field.mul(d, field.pow(gamma, i as u64)))
                    })
            })
            .collect();
        let q = base.q() as usize;
        let size = field.q() as usize;
        let mut from_vec = vec![0u32; size];
        let mut to_vec = vec![u32::MAX; size * degree];
        for (idx, slot) in from_vec.iter_mut().enumerate() {
            let mut x = idx;
            let mut elem = 0u32;
            let mut coords = Vec::with_capacity(degree);
            for b in &basis {
                let c = x % q;
                x /= q;
                coords.push(c as u32);
                elem = field.add(elem, field.mul(embed[c], *b));
            }
            *slot = elem;
            if to_vec[elem as usize * degree] != u32::MAX {
                return Err(Error::pre("extension basis is not independent"));
            }
            to_vec[elem as usize * degree..(elem as usize + 1) * degree].copy_from_slice(&coords);
        }
        Ok(ExtField {
            base,
            degree,
            field,
            basis,
            embed,
            to_vec,
            from_vec,
        })
    }

    pub fn base(&self) -> Field {
        self.base
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// The extension as a field in its own right.
    pub fn field(&self) -> Field {
        self.field
    }

    pub fn basis(&self) -> &[u32] {
        &self.basis
    }

    pub fn embed(&self, c: u32) -> u32 {
        self.embed[c as usize]
    }

    /// Coordinate `i` of `a` in the power basis.
    #[inline]
    pub fn coordinate(&self, a: u32, i: usize) -> u32 {
        if self.to_vec.is_empty() {
            let p = self.base.p();
            (a / p.pow(i as u32)) % p
        } else {
            self.to_vec[a as usize * self.degree + i]
        }
    }

    pub fn element_to_vector(&self, a: u32) -> Vec<u32> {
        (0..self.degree).map(|i| self.coordinate(a, i)).collect()
    }

    pub fn vector_to_element(&self, v: &[u32]) -> u32 {
        debug_assert_eq!(v.len(), self.degree);
        let q = self.base.q();
        let idx = v.iter().rev().fold(0u32, |acc, &c| acc * q + c);
        if self.from_vec.is_empty() {
            idx
        } else {
            self.from_vec[idx as usize]
        }
    }
}

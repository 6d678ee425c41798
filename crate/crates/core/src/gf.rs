//! Arithmetic in the tower `F_{q^n} / F_q` with `q = p^e`.
//!
//! The whole tower is realised as one extension `F_p[w] / (m(w))` of degree
//! `e·n`. An element is its coordinate vector in the basis `1, w, ..., w^{en-1}`,
//! packed into a `u32` so that integer order coincides with the
//! coordinate-lexicographic order of the least-degree-first vector. The
//! subfield `F_q` is the fixed set of `x ↦ x^q`.
//!
//! Multiplication runs through discrete log tables that are built at
//! construction from the schoolbook kernel ([`FieldCtx::mul_schoolbook`]).
//! Frobenius powers use precomputed images of the basis.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU32, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::poly;

/// Largest supported extension degree over the prime field.
pub const MAX_DEGREE: usize = 24;
/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 24;

static NEXT_CTX: AtomicU32 = AtomicU32::new(1);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CtxId(u32);

/// A field element. Equality is equality of coordinate vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem {
    ctx: CtxId,
    idx: u32,
}

impl Elem {
    /// Position of the element in the canonical enumeration.
    pub fn index(self) -> u64 {
        u64::from(self.idx)
    }

    pub fn ctx_id(self) -> CtxId {
        self.ctx
    }

    pub fn is_zero(self) -> bool {
        self.idx == 0
    }
}

/// Quadratic character class of an element of a field of odd order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ResidueClass {
    Zero,
    /// Nonzero squares, the subgroup generated by the square of a primitive element.
    D0,
    /// Non-squares.
    D1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

type Coords = [u64; MAX_DEGREE];

/// Immutable description of `F_{q^n}` over `F_q`.
pub struct FieldCtx {
    id: CtxId,
    p: u32,
    e: u32,
    n: u32,
    m: usize,
    q: u64,
    order: u64,
    modulus: Vec<u32>,
    default_modulus: bool,
    generator: Elem,
    exp: Vec<u32>,
    log: Vec<u32>,
    /// `frob[(j * m + i) * m + t]`: coordinate `t` of `(w^i)^{q^j}`.
    frob: Vec<u32>,
    subfield: Vec<Elem>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("id", &self.id)
            .field("p", &self.p)
            .field("e", &self.e)
            .field("n", &self.n)
            .field("modulus", &self.modulus)
            .finish_non_exhaustive()
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn prime_factors(mut v: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= v {
        if v.is_multiple_of(d) {
            out.push(d);
            while v.is_multiple_of(d) {
                v /= d;
            }
        }
        d += 1;
    }
    if v > 1 {
        out.push(v);
    }
    out
}

fn inv_mod_p(a: u64, p: u64) -> u64 {
    let mut r = 1u64;
    let mut b = a % p;
    let mut k = p - 2;
    while k > 0 {
        if k & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        k >>= 1;
    }
    r
}

/// Construct `F_{q^n}` with `q = p^e`.
///
/// Without an explicit modulus the lexicographically-first monic irreducible
/// of degree `e·n` is used (see [`poly::irreducible_first`]).
pub fn make_field(p: u64, e: u32, n: u32, modulus: Option<&[u64]>) -> Result<Arc<FieldCtx>> {
    FieldCtx::new(p, e, n, modulus).map(Arc::new)
}

impl FieldCtx {
    pub fn new(p: u64, e: u32, n: u32, modulus: Option<&[u64]>) -> Result<FieldCtx> {
        if e == 0 || n == 0 {
            return Err(Error::BadDegree { e, n });
        }
        if !is_prime(p) {
            return Err(Error::NonPrimeP(p));
        }
        let m = (e as usize) * (n as usize);
        let order = (p as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
        if order > u128::from(MAX_ORDER) {
            return Err(Error::OrderTooLarge { order, max: MAX_ORDER });
        }
        let order = order as u64;
        let q = p.pow(e);

        let (modulus, default_modulus) = match modulus {
            Some(coeffs) => {
                let mut c: Vec<u64> = coeffs.to_vec();
                while c.last() == Some(&0) {
                    c.pop();
                }
                if c.len() != m + 1 {
                    return Err(Error::DegreeMismatch { expected: m, got: c.len().saturating_sub(1) });
                }
                if let Some(&bad) = c.iter().find(|&&v| v >= p) {
                    return Err(Error::BadCoordinate { value: bad, p });
                }
                let lead_inv = inv_mod_p(c[m], p);
                let monic: Vec<u32> = c.iter().map(|&v| (v * lead_inv % p) as u32).collect();
                if m > 1 && !poly::is_irreducible_over_prime(p, &monic)? {
                    return Err(Error::ReducibleModulus(p));
                }
                let is_default = m == 1 && monic[0] == 0 || m > 1 && poly::irreducible_first_coeffs(p, m)? == monic;
                (monic, is_default)
            }
            None if m == 1 => (vec![0, 1], true),
            None => (poly::irreducible_first_coeffs(p, m)?, true),
        };

        let id = CtxId(NEXT_CTX.fetch_add(1, Ordering::Relaxed));
        let mut ctx = FieldCtx {
            id,
            p: p as u32,
            e,
            n,
            m,
            q,
            order,
            modulus,
            default_modulus,
            generator: Elem { ctx: id, idx: 0 },
            exp: Vec::new(),
            log: Vec::new(),
            frob: Vec::new(),
            subfield: Vec::new(),
        };
        ctx.generator = ctx.search_primitive();
        ctx.build_log_tables();
        ctx.build_frobenius_tables();
        ctx.build_subfield();
        Ok(ctx)
    }

    /// Prime field `F_p`.
    pub fn prime(p: u64) -> Result<FieldCtx> {
        FieldCtx::new(p, 1, 1, None)
    }

    // ---- coordinate kernel ----

    fn decode(&self, mut idx: u64) -> Coords {
        let mut c = [0u64; MAX_DEGREE];
        let p = u64::from(self.p);
        for i in (0..self.m).rev() {
            c[i] = idx % p;
            idx /= p;
        }
        c
    }

    fn encode(&self, c: &Coords) -> u32 {
        let p = u64::from(self.p);
        let mut acc = 0u64;
        for &ci in &c[..self.m] {
            acc = acc * p + ci;
        }
        acc as u32
    }

    fn kernel_mul(&self, a: &Coords, b: &Coords) -> Coords {
        let m = self.m;
        let p = u64::from(self.p);
        let mut prod = [0u64; 2 * MAX_DEGREE];
        for i in 0..m {
            if a[i] == 0 {
                continue;
            }
            for j in 0..m {
                prod[i + j] = (prod[i + j] + a[i] * b[j]) % p;
            }
        }
        for d in (m..2 * m - 1).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            for j in 0..m {
                let mj = u64::from(self.modulus[j]);
                prod[d - m + j] = (prod[d - m + j] + c * (p - mj)) % p;
            }
        }
        let mut out = [0u64; MAX_DEGREE];
        out[..m].copy_from_slice(&prod[..m]);
        out
    }

    fn kernel_pow(&self, base: &Coords, mut k: u64) -> Coords {
        let mut result = [0u64; MAX_DEGREE];
        result[0] = 1;
        let mut b = *base;
        while k > 0 {
            if k & 1 == 1 {
                result = self.kernel_mul(&result, &b);
            }
            b = self.kernel_mul(&b, &b);
            k >>= 1;
        }
        result
    }

    fn search_primitive(&self) -> Elem {
        let group = self.order - 1;
        if group == 1 {
            return self.one();
        }
        let factors = prime_factors(group);
        let mut one = [0u64; MAX_DEGREE];
        one[0] = 1;
        for idx in 1..self.order {
            let c = self.decode(idx);
            let primitive = factors.iter().all(|&r| self.kernel_pow(&c, group / r) != one);
            if primitive {
                return Elem { ctx: self.id, idx: idx as u32 };
            }
        }
        unreachable!("finite field without primitive element")
    }

    fn build_log_tables(&mut self) {
        let group = (self.order - 1) as usize;
        let mut exp = Vec::with_capacity(group);
        let mut log = vec![0u32; self.order as usize];
        let g = self.decode(self.generator.index());
        let mut cur = [0u64; MAX_DEGREE];
        cur[0] = 1;
        for i in 0..group {
            let idx = self.encode(&cur);
            exp.push(idx);
            log[idx as usize] = i as u32;
            cur = self.kernel_mul(&cur, &g);
        }
        self.exp = exp;
        self.log = log;
    }

    fn build_frobenius_tables(&mut self) {
        let (m, n) = (self.m, self.n as usize);
        let mut frob = vec![0u32; n * m * m];
        for j in 0..n {
            let exponent = self.q.pow(j as u32);
            for i in 0..m {
                let mut basis = [0u64; MAX_DEGREE];
                basis[i] = 1;
                let img = self.kernel_pow(&basis, exponent);
                for t in 0..m {
                    frob[(j * m + i) * m + t] = img[t] as u32;
                }
            }
        }
        self.frob = frob;
    }

    fn build_subfield(&mut self) {
        let mut sub = vec![self.zero()];
        if self.n == 1 {
            sub = self.elements().collect();
        } else {
            let step = (self.order - 1) / (self.q - 1);
            for j in 0..self.q - 1 {
                sub.push(self.pow(self.generator, j * step));
            }
            sub.sort();
        }
        self.subfield = sub;
    }

    // ---- accessors ----

    pub fn id(&self) -> CtxId {
        self.id
    }
    pub fn p(&self) -> u64 {
        u64::from(self.p)
    }
    pub fn e(&self) -> u32 {
        self.e
    }
    /// Tower degree of `F_{q^n}` over `F_q`.
    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn q(&self) -> u64 {
        self.q
    }
    /// Degree `e·n` over the prime field.
    pub fn degree(&self) -> usize {
        self.m
    }
    pub fn order(&self) -> u64 {
        self.order
    }
    /// Modulus coefficients over `F_p`, constant term first, monic.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }
    pub fn has_default_modulus(&self) -> bool {
        self.default_modulus
    }
    pub fn generator(&self) -> Elem {
        self.generator
    }

    /// Smallest element, in enumeration order, of multiplicative order `q^n - 1`.
    pub fn find_primitive(&self) -> Elem {
        self.generator
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec {
            p: self.p(),
            e: self.e,
            n: self.n,
            modulus: (!self.default_modulus).then(|| self.modulus.iter().map(|&c| u64::from(c)).collect()),
        }
    }

    // ---- element construction ----

    pub fn zero(&self) -> Elem {
        Elem { ctx: self.id, idx: 0 }
    }

    pub fn one(&self) -> Elem {
        self.from_prime(1)
    }

    /// The prime-field constant `c mod p`.
    pub fn from_prime(&self, c: u64) -> Elem {
        let mut coords = [0u64; MAX_DEGREE];
        coords[0] = c % self.p();
        Elem { ctx: self.id, idx: self.encode(&coords) }
    }

    /// Element from least-degree-first coordinates; missing trailing coordinates are zero.
    pub fn from_coords(&self, coords: &[u64]) -> Result<Elem> {
        if coords.len() > self.m {
            return Err(Error::CoordinateLength { expected: self.m, got: coords.len() });
        }
        let mut c = [0u64; MAX_DEGREE];
        for (slot, &v) in c.iter_mut().zip(coords) {
            if v >= self.p() {
                return Err(Error::BadCoordinate { value: v, p: self.p() });
            }
            *slot = v;
        }
        Ok(Elem { ctx: self.id, idx: self.encode(&c) })
    }

    pub fn coords(&self, x: Elem) -> Vec<u64> {
        self.decode(x.index())[..self.m].to_vec()
    }

    /// Element at position `idx` of the canonical enumeration.
    pub fn elem_at(&self, idx: u64) -> Option<Elem> {
        (idx < self.order).then_some(Elem { ctx: self.id, idx: idx as u32 })
    }

    pub fn owns(&self, x: Elem) -> bool {
        x.ctx == self.id
    }

    pub fn check(&self, x: Elem) -> Result<()> {
        if self.owns(x) {
            Ok(())
        } else {
            Err(Error::CtxMismatch)
        }
    }

    /// All `q^n` elements in coordinate-lexicographic order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.order).map(move |i| Elem { ctx: self.id, idx: i as u32 })
    }

    // ---- arithmetic ----

    #[inline]
    fn mk(&self, idx: u32) -> Elem {
        Elem { ctx: self.id, idx }
    }

    pub fn add(&self, x: Elem, y: Elem) -> Elem {
        debug_assert!(self.owns(x) && self.owns(y), "element from a different field");
        if self.p == 2 {
            return self.mk(x.idx ^ y.idx);
        }
        let p = self.p;
        let (mut a, mut b) = (x.idx, y.idx);
        let (mut out, mut place) = (0u32, 1u32);
        for _ in 0..self.m {
            let mut s = a % p + b % p;
            if s >= p {
                s -= p;
            }
            out += s * place;
            place = place.wrapping_mul(p);
            a /= p;
            b /= p;
        }
        self.mk(out)
    }

    pub fn neg(&self, x: Elem) -> Elem {
        debug_assert!(self.owns(x), "element from a different field");
        if self.p == 2 {
            return x;
        }
        let p = self.p;
        let mut a = x.idx;
        let (mut out, mut place) = (0u32, 1u32);
        for _ in 0..self.m {
            let d = a % p;
            if d != 0 {
                out += (p - d) * place;
            }
            place = place.wrapping_mul(p);
            a /= p;
        }
        self.mk(out)
    }

    pub fn sub(&self, x: Elem, y: Elem) -> Elem {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: Elem, y: Elem) -> Elem {
        debug_assert!(self.owns(x) && self.owns(y), "element from a different field");
        if x.idx == 0 || y.idx == 0 {
            return self.zero();
        }
        let group = self.order - 1;
        let s = (u64::from(self.log[x.idx as usize]) + u64::from(self.log[y.idx as usize])) % group;
        self.mk(self.exp[s as usize])
    }

    /// Multiplication by reduction modulo the defining polynomial, without tables.
    pub fn mul_schoolbook(&self, x: Elem, y: Elem) -> Elem {
        let c = self.kernel_mul(&self.decode(x.index()), &self.decode(y.index()));
        self.mk(self.encode(&c))
    }

    pub fn inv(&self, x: Elem) -> Result<Elem> {
        self.check(x)?;
        if x.idx == 0 {
            return Err(Error::DivisionByZero);
        }
        let group = self.order - 1;
        let l = u64::from(self.log[x.idx as usize]);
        Ok(self.mk(self.exp[((group - l) % group) as usize]))
    }

    pub fn div(&self, x: Elem, y: Elem) -> Result<Elem> {
        self.check(x)?;
        Ok(self.mul(x, self.inv(y)?))
    }

    pub fn checked_add(&self, x: Elem, y: Elem) -> Result<Elem> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.add(x, y))
    }

    pub fn checked_sub(&self, x: Elem, y: Elem) -> Result<Elem> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.sub(x, y))
    }

    pub fn checked_mul(&self, x: Elem, y: Elem) -> Result<Elem> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.mul(x, y))
    }

    /// Square-and-multiply; `0^0 = 1`, and the exponent is reduced modulo
    /// `q^n - 1` for nonzero bases.
    pub fn pow(&self, x: Elem, k: u64) -> Elem {
        if k == 0 {
            return self.one();
        }
        if x.is_zero() {
            return self.zero();
        }
        let mut k = k % (self.order - 1);
        let mut result = self.one();
        let mut base = x;
        while k > 0 {
            if k & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        result
    }

    /// `x^k` for an exponent that may exceed 64 bits.
    pub fn pow_wide(&self, x: Elem, k: u128) -> Elem {
        if k == 0 {
            return self.one();
        }
        if x.is_zero() {
            return self.zero();
        }
        let group = u128::from(self.order - 1);
        let r = (k % group) as u64;
        if r == 0 {
            self.one()
        } else {
            self.pow(x, r)
        }
    }

    /// Multiplication by a prime-field constant.
    pub fn scale(&self, c: u64, x: Elem) -> Elem {
        self.mul(self.from_prime(c), x)
    }

    /// `x ↦ x^{q^j}` through the precomputed basis images.
    pub fn frobenius(&self, x: Elem, j: u64) -> Elem {
        let j = (j % u64::from(self.n)) as usize;
        if j == 0 || x.is_zero() {
            return x;
        }
        let m = self.m;
        let p = u64::from(self.p);
        let c = self.decode(x.index());
        let mut acc = [0u64; MAX_DEGREE];
        for (i, &ci) in c[..m].iter().enumerate() {
            if ci == 0 {
                continue;
            }
            let row = &self.frob[(j * m + i) * m..(j * m + i + 1) * m];
            for (slot, &r) in acc.iter_mut().zip(row) {
                *slot += ci * u64::from(r);
            }
        }
        for slot in acc[..m].iter_mut() {
            *slot %= p;
        }
        self.mk(self.encode(&acc))
    }

    /// `x^{q^j}` by exponentiation; agrees with [`FieldCtx::frobenius`].
    pub fn frobenius_by_pow(&self, x: Elem, j: u64) -> Elem {
        let j = (j % u64::from(self.n)) as u32;
        self.pow(x, self.q.pow(j))
    }

    /// Trace from `F_{q^n}` to `F_q`.
    pub fn trace(&self, x: Elem) -> Elem {
        (0..u64::from(self.n)).fold(self.zero(), |acc, i| self.add(acc, self.frobenius(x, i)))
    }

    /// Norm from `F_{q^n}` to `F_q`, `x^{(q^n-1)/(q-1)}`.
    pub fn norm(&self, x: Elem) -> Elem {
        self.pow(x, (self.order - 1) / (self.q - 1))
    }

    pub fn residue_class(&self, x: Elem) -> Result<ResidueClass> {
        self.check(x)?;
        if self.p == 2 {
            return Err(Error::EvenCharacteristic);
        }
        if x.is_zero() {
            return Ok(ResidueClass::Zero);
        }
        if self.pow(x, (self.order - 1) / 2) == self.one() {
            Ok(ResidueClass::D0)
        } else {
            Ok(ResidueClass::D1)
        }
    }

    /// `k` with `g^k = x` for the context generator `g`.
    pub fn discrete_log(&self, x: Elem) -> Option<u64> {
        (!x.is_zero()).then(|| u64::from(self.log[x.idx as usize]))
    }

    pub fn multiplicative_order(&self, x: Elem) -> Option<u64> {
        if x.is_zero() {
            return None;
        }
        let group = self.order - 1;
        let mut ord = group;
        for r in prime_factors(group) {
            while ord.is_multiple_of(r) && self.pow(x, ord / r) == self.one() {
                ord /= r;
            }
        }
        Some(ord)
    }

    /// Whether `x` lies in `F_q`.
    pub fn in_subfield(&self, x: Elem) -> bool {
        self.frobenius(x, 1) == x
    }

    /// Whether `x` lies in `F_{q^k}`, i.e. `x^{q^k} = x`.
    pub fn in_subfield_of_degree(&self, x: Elem, k: u32) -> bool {
        self.frobenius(x, u64::from(k)) == x
    }

    /// The elements of `F_q`, in enumeration order.
    pub fn subfield_elements(&self) -> &[Elem] {
        &self.subfield
    }

    /// All `x` with `x^{q^k} = ±x`, by exhaustive scan.
    pub fn kernel_of_frob_plus_identity(&self, k: u32, sign: Sign) -> Vec<Elem> {
        self.elements()
            .filter(|&x| {
                let fx = self.frobenius(x, u64::from(k));
                match sign {
                    Sign::Plus => fx == x,
                    Sign::Minus => fx == self.neg(x),
                }
            })
            .collect()
    }

    // ---- text ----

    /// Canonical text: a decimal for prime-field constants, otherwise
    /// `c0;c1;...` with trailing zero coordinates dropped.
    pub fn format_elem(&self, x: Elem) -> String {
        let mut c = self.coords(x);
        while c.len() > 1 && c.last() == Some(&0) {
            c.pop();
        }
        c.iter().map(u64::to_string).collect::<Vec<_>>().join(";")
    }

    /// Parse `c`, `c0;c1;...` or `g^k` (power of the generator).
    pub fn parse_elem(&self, s: &str) -> Result<Elem> {
        let s = s.trim();
        let bad = |message: String| Error::Parse { position: 0, message };
        if let Some(k) = s.strip_prefix("g^") {
            let k: u64 = k.trim().parse().map_err(|_| bad(format!("bad generator exponent in `{s}`")))?;
            return Ok(self.pow(self.generator, k));
        }
        let mut coords = Vec::new();
        for (i, part) in s.split(';').enumerate() {
            let v: u64 = part
                .trim()
                .parse()
                .map_err(|_| Error::Parse { position: i, message: format!("bad coordinate `{part}` in `{s}`") })?;
            coords.push(v);
        }
        self.from_coords(&coords)
    }
}

/// Textual field description `p^e:n[:mod=c0,c1,...,1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSpec {
    pub p: u64,
    pub e: u32,
    pub n: u32,
    pub modulus: Option<Vec<u64>>,
}

impl FieldSpec {
    pub fn build(&self) -> Result<Arc<FieldCtx>> {
        make_field(self.p, self.e, self.n, self.modulus.as_deref())
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}:{}", self.p, self.e, self.n)?;
        if let Some(m) = &self.modulus {
            let parts: Vec<String> = m.iter().map(u64::to_string).collect();
            write!(f, ":mod={}", parts.join(","))?;
        }
        Ok(())
    }
}

struct Cursor<'a> {
    s: &'a str,
    pos: usize,
}

impl Cursor<'_> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse { position: self.pos, message: message.into() }
    }

    fn number(&mut self) -> Result<u64> {
        let rest = &self.s[self.pos..];
        let len = rest.bytes().take_while(u8::is_ascii_digit).count();
        if len == 0 {
            return Err(self.err("expected a decimal number"));
        }
        let v = rest[..len].parse().map_err(|_| self.err("number out of range"))?;
        self.pos += len;
        Ok(v)
    }

    fn expect(&mut self, lit: &str) -> Result<()> {
        if self.s[self.pos..].starts_with(lit) {
            self.pos += lit.len();
            Ok(())
        } else {
            Err(self.err(format!("expected `{lit}`")))
        }
    }

    fn done(&self) -> bool {
        self.pos == self.s.len()
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut c = Cursor { s, pos: 0 };
        let p = c.number()?;
        c.expect("^")?;
        let e_pos = c.pos;
        let e = c.number()?;
        c.expect(":")?;
        let n_pos = c.pos;
        let n = c.number()?;
        let e = u32::try_from(e).map_err(|_| Error::Parse { position: e_pos, message: "e too large".into() })?;
        let n = u32::try_from(n).map_err(|_| Error::Parse { position: n_pos, message: "n too large".into() })?;
        let mut modulus = None;
        if !c.done() {
            c.expect(":mod=")?;
            let mut coeffs = vec![c.number()?];
            while !c.done() {
                c.expect(",")?;
                coeffs.push(c.number()?);
            }
            modulus = Some(coeffs);
        }
        Ok(FieldSpec { p, e, n, modulus })
    }
}

//! Dense univariate polynomials over a [`FieldCtx`].

use crate::error::{Error, Result};
use crate::gf::{CtxId, Elem, FieldCtx};
use crate::linearized::LinPoly;

/// Coefficients constant-term first, without trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    ctx: CtxId,
    coeffs: Vec<Elem>,
}

impl Poly {
    pub fn zero(ctx: &FieldCtx) -> Poly {
        Poly { ctx: ctx.id(), coeffs: Vec::new() }
    }

    pub fn one(ctx: &FieldCtx) -> Poly {
        Poly::constant(ctx, ctx.one())
    }

    pub fn x(ctx: &FieldCtx) -> Poly {
        Poly::monomial(ctx, ctx.one(), 1)
    }

    pub fn constant(ctx: &FieldCtx, c: Elem) -> Poly {
        Poly::normalized(ctx.id(), vec![c])
    }

    /// `c·x^k`.
    pub fn monomial(ctx: &FieldCtx, c: Elem, k: usize) -> Poly {
        let mut coeffs = vec![ctx.zero(); k + 1];
        coeffs[k] = c;
        Poly::normalized(ctx.id(), coeffs)
    }

    pub fn from_coeffs(ctx: &FieldCtx, coeffs: Vec<Elem>) -> Result<Poly> {
        for &c in &coeffs {
            ctx.check(c)?;
        }
        Ok(Poly::normalized(ctx.id(), coeffs))
    }

    /// Coefficients given as prime-field constants.
    pub fn from_prime_coeffs(ctx: &FieldCtx, coeffs: &[u64]) -> Poly {
        Poly::normalized(ctx.id(), coeffs.iter().map(|&c| ctx.from_prime(c)).collect())
    }

    fn normalized(ctx: CtxId, mut coeffs: Vec<Elem>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { ctx, coeffs }
    }

    pub fn ctx_id(&self) -> CtxId {
        self.ctx
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<Elem> {
        self.coeffs.last().copied()
    }

    pub fn coeff(&self, i: usize) -> Option<Elem> {
        self.coeffs.get(i).copied()
    }

    fn check(&self, ctx: &FieldCtx) -> Result<()> {
        if self.ctx == ctx.id() {
            Ok(())
        } else {
            Err(Error::CtxMismatch)
        }
    }

    /// Horner evaluation.
    pub fn eval(&self, ctx: &FieldCtx, x: Elem) -> Result<Elem> {
        self.check(ctx)?;
        ctx.check(x)?;
        Ok(self.eval_in(ctx, x))
    }

    /// Horner evaluation without context checks; callers guarantee both
    /// the polynomial and `x` belong to `ctx`.
    pub(crate) fn eval_in(&self, ctx: &FieldCtx, x: Elem) -> Elem {
        self.coeffs.iter().rev().fold(ctx.zero(), |acc, &c| ctx.add(ctx.mul(acc, x), c))
    }

    pub fn add(&self, other: &Poly, ctx: &FieldCtx) -> Result<Poly> {
        self.check(ctx)?;
        other.check(ctx)?;
        Ok(self.add_in(other, ctx))
    }

    fn add_in(&self, other: &Poly, ctx: &FieldCtx) -> Poly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(ctx.zero());
                let b = other.coeffs.get(i).copied().unwrap_or(ctx.zero());
                ctx.add(a, b)
            })
            .collect();
        Poly::normalized(self.ctx, coeffs)
    }

    pub fn neg(&self, ctx: &FieldCtx) -> Result<Poly> {
        self.check(ctx)?;
        Ok(self.neg_in(ctx))
    }

    fn neg_in(&self, ctx: &FieldCtx) -> Poly {
        Poly { ctx: self.ctx, coeffs: self.coeffs.iter().map(|&c| ctx.neg(c)).collect() }
    }

    pub fn sub(&self, other: &Poly, ctx: &FieldCtx) -> Result<Poly> {
        self.check(ctx)?;
        other.check(ctx)?;
        Ok(self.add_in(&other.neg_in(ctx), ctx))
    }

    pub fn mul(&self, other: &Poly, ctx: &FieldCtx) -> Result<Poly> {
        self.check(ctx)?;
        other.check(ctx)?;
        Ok(self.mul_in(other, ctx))
    }

    fn mul_in(&self, other: &Poly, ctx: &FieldCtx) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly { ctx: self.ctx, coeffs: Vec::new() };
        }
        let mut out = vec![ctx.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = ctx.add(out[i + j], ctx.mul(a, b));
            }
        }
        Poly::normalized(self.ctx, out)
    }

    pub fn scale(&self, c: Elem, ctx: &FieldCtx) -> Result<Poly> {
        self.check(ctx)?;
        ctx.check(c)?;
        Ok(Poly::normalized(self.ctx, self.coeffs.iter().map(|&a| ctx.mul(a, c)).collect()))
    }

    /// Quotient and remainder with `deg r < deg divisor`.
    pub fn div_rem(&self, divisor: &Poly, ctx: &FieldCtx) -> Result<(Poly, Poly)> {
        self.check(ctx)?;
        divisor.check(ctx)?;
        self.div_rem_in(divisor, ctx)
    }

    fn div_rem_in(&self, divisor: &Poly, ctx: &FieldCtx) -> Result<(Poly, Poly)> {
        let lead = divisor.leading().ok_or(Error::DivisionByZero)?;
        let lead_inv = ctx.inv(lead)?;
        let dd = divisor.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Poly { ctx: self.ctx, coeffs: Vec::new() }, self.clone()));
        }
        let mut quot = vec![ctx.zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = ctx.mul(rem[k + dd], lead_inv);
            quot[k] = c;
            if c.is_zero() {
                continue;
            }
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = ctx.sub(rem[k + j], ctx.mul(c, d));
            }
        }
        rem.truncate(dd);
        Ok((Poly::normalized(self.ctx, quot), Poly::normalized(self.ctx, rem)))
    }

    pub fn rem(&self, divisor: &Poly, ctx: &FieldCtx) -> Result<Poly> {
        Ok(self.div_rem(divisor, ctx)?.1)
    }

    /// Scaled to leading coefficient one; zero stays zero.
    pub fn monic(&self, ctx: &FieldCtx) -> Result<Poly> {
        match self.leading() {
            None => Ok(self.clone()),
            Some(l) => self.scale(ctx.inv(l)?, ctx),
        }
    }

    /// `self^k mod modulus` by square-and-multiply.
    pub fn pow_mod(&self, k: u64, modulus: &Poly, ctx: &FieldCtx) -> Result<Poly> {
        self.check(ctx)?;
        modulus.check(ctx)?;
        let mut result = Poly::one(ctx).div_rem_in(modulus, ctx)?.1;
        let mut base = self.div_rem_in(modulus, ctx)?.1;
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul_in(&base, ctx).div_rem_in(modulus, ctx)?.1;
            }
            base = base.mul_in(&base, ctx).div_rem_in(modulus, ctx)?.1;
            k >>= 1;
        }
        Ok(result)
    }
}

/// Monic gcd; `gcd(0, 0) = 0`.
pub fn gcd(f: &Poly, g: &Poly, ctx: &FieldCtx) -> Result<Poly> {
    f.check(ctx)?;
    g.check(ctx)?;
    let (mut a, mut b) = (f.clone(), g.clone());
    while !b.is_zero() {
        let r = a.div_rem_in(&b, ctx)?.1;
        a = b;
        b = r;
    }
    a.monic(ctx)
}

/// Ben-Or irreducibility test over the prime field `fp`.
pub fn is_irreducible(f: &Poly, fp: &FieldCtx) -> Result<bool> {
    f.check(fp)?;
    let d = match f.degree() {
        None | Some(0) => return Ok(false),
        Some(1) => return Ok(true),
        Some(d) => d,
    };
    if f.coeffs[0].is_zero() {
        return Ok(false);
    }
    let x = Poly::x(fp);
    let mut u = x.clone();
    for _ in 0..d / 2 {
        u = u.pow_mod(fp.q(), f, fp)?;
        let g = gcd(&u.sub(&x, fp)?, f, fp)?;
        if g.degree() != Some(0) {
            return Ok(false);
        }
    }
    Ok(true)
}

pub(crate) fn is_irreducible_over_prime(p: u64, coeffs: &[u32]) -> Result<bool> {
    let fp = FieldCtx::prime(p)?;
    let coeffs: Vec<u64> = coeffs.iter().map(|&c| u64::from(c)).collect();
    is_irreducible(&Poly::from_prime_coeffs(&fp, &coeffs), &fp)
}

/// First monic irreducible of degree `d` over the prime field `fp`, where
/// candidates are ordered lexicographically by `(c_0, c_1, ..., c_{d-1})`.
pub fn irreducible_first(fp: &FieldCtx, d: usize) -> Result<Poly> {
    if fp.degree() != 1 {
        return Err(Error::BadParameter("irreducible_first needs a prime field".into()));
    }
    if d == 0 {
        return Err(Error::BadParameter("degree must be positive".into()));
    }
    let p = fp.p();
    let total = (p as u128).pow(d as u32);
    // Candidates with c_0 = 0 are divisible by x.
    let start = if d == 1 { 0 } else { total / u128::from(p) };
    for idx in start..total {
        let mut coeffs = vec![0u64; d + 1];
        let mut v = idx;
        for i in (0..d).rev() {
            coeffs[i] = (v % u128::from(p)) as u64;
            v /= u128::from(p);
        }
        coeffs[d] = 1;
        let f = Poly::from_prime_coeffs(fp, &coeffs);
        if is_irreducible(&f, fp)? {
            return Ok(f);
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

pub(crate) fn irreducible_first_coeffs(p: u64, d: usize) -> Result<Vec<u32>> {
    let fp = FieldCtx::prime(p)?;
    let f = irreducible_first(&fp, d)?;
    Ok(f.coeffs().iter().map(|&c| fp.coords(c)[0] as u32).collect())
}

/// The linearized `q`-associate `Σ a_i x^{q^i}` of `l(x) = Σ a_i x^i`.
/// Exponents are folded modulo `n` since `x^{q^n} = x` on `F_{q^n}`.
pub fn to_linearized(l: &Poly, ctx: &FieldCtx) -> Result<LinPoly> {
    l.check(ctx)?;
    let n = ctx.n() as usize;
    let mut a = vec![ctx.zero(); n];
    for (i, &c) in l.coeffs.iter().enumerate() {
        if !ctx.in_subfield(c) {
            return Err(Error::CoefficientOutsideSubfield { index: i });
        }
        a[i % n] = ctx.add(a[i % n], c);
    }
    LinPoly::new(ctx, a)
}

/// The conventional `q`-associate of `L`.
pub fn from_linearized(lin: &LinPoly, ctx: &FieldCtx) -> Result<Poly> {
    Poly::from_coeffs(ctx, lin.coeffs().to_vec())
}

/// Text form `c0,c1,...`; each coefficient is a decimal prime-field constant
/// or a `;`-separated coordinate vector.
pub fn parse_poly(ctx: &FieldCtx, s: &str) -> Result<Poly> {
    let mut coeffs = Vec::new();
    let mut offset = 0;
    for part in s.split(',') {
        let c = ctx.parse_elem(part).map_err(|e| match e {
            Error::Parse { message, .. } => Error::Parse { position: offset, message },
            other => other,
        })?;
        coeffs.push(c);
        offset += part.len() + 1;
    }
    Poly::from_coeffs(ctx, coeffs)
}

pub fn format_poly(ctx: &FieldCtx, f: &Poly) -> String {
    if f.is_zero() {
        return "0".into();
    }
    f.coeffs.iter().map(|&c| ctx.format_elem(c)).collect::<Vec<_>>().join(",")
}

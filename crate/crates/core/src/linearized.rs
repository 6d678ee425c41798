//! `q`-polynomials `L(x) = Σ_{i<n} a_i x^{q^i}` on `F_{q^n}` and the two
//! algebraic permutation criteria for them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gf::{CtxId, Elem, FieldCtx};
use crate::poly::{self, Poly};

/// Number of random coefficient vectors tried before falling back to the identity.
pub const RANDOM_PP_DRAWS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinPoly {
    ctx: CtxId,
    a: Vec<Elem>,
    subfield: bool,
}

impl LinPoly {
    /// Coefficients `a_0, a_1, ...`, zero-padded to length `n`.
    pub fn new(ctx: &FieldCtx, mut a: Vec<Elem>) -> Result<LinPoly> {
        let n = ctx.n() as usize;
        if a.len() > n {
            return Err(Error::LinPolyLength { expected: n, got: a.len() });
        }
        for &c in &a {
            ctx.check(c)?;
        }
        a.resize(n, ctx.zero());
        let subfield = a.iter().all(|&c| ctx.in_subfield(c));
        Ok(LinPoly { ctx: ctx.id(), a, subfield })
    }

    pub fn zero(ctx: &FieldCtx) -> LinPoly {
        Self::new(ctx, Vec::new()).expect("empty coefficient vector")
    }

    /// `c·x^{q^j}`.
    pub fn monomial(ctx: &FieldCtx, c: Elem, j: usize) -> Result<LinPoly> {
        let n = ctx.n() as usize;
        let mut a = vec![ctx.zero(); n];
        a[j % n] = c;
        Self::new(ctx, a)
    }

    pub fn identity(ctx: &FieldCtx) -> LinPoly {
        Self::monomial(ctx, ctx.one(), 0).expect("identity")
    }

    /// `x^{q^j}`.
    pub fn frobenius(ctx: &FieldCtx, j: usize) -> LinPoly {
        Self::monomial(ctx, ctx.one(), j).expect("frobenius")
    }

    pub fn trace(ctx: &FieldCtx) -> LinPoly {
        Self::new(ctx, vec![ctx.one(); ctx.n() as usize]).expect("trace")
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.a
    }

    /// Whether every coefficient lies in `F_q`.
    pub fn is_subfield(&self) -> bool {
        self.subfield
    }

    /// Whether every coefficient lies in `F_{q^k}`.
    pub fn coefficients_in_degree(&self, ctx: &FieldCtx, k: u32) -> bool {
        self.a.iter().all(|&c| ctx.in_subfield_of_degree(c, k))
    }

    pub fn apply(&self, ctx: &FieldCtx, x: Elem) -> Elem {
        debug_assert_eq!(self.ctx, ctx.id());
        self.a.iter().enumerate().fold(ctx.zero(), |acc, (i, &c)| {
            if c.is_zero() {
                acc
            } else {
                ctx.add(acc, ctx.mul(c, ctx.frobenius(x, i as u64)))
            }
        })
    }

    pub fn add(&self, other: &LinPoly, ctx: &FieldCtx) -> LinPoly {
        let a = self.a.iter().zip(&other.a).map(|(&x, &y)| ctx.add(x, y)).collect();
        Self::new(ctx, a).expect("same length")
    }

    /// The `n × n` matrix whose row `r` is `(a_{(c - r) mod n})^{q^r}`.
    pub fn circulant_matrix(&self, ctx: &FieldCtx) -> Vec<Vec<Elem>> {
        let n = self.a.len();
        (0..n).map(|r| (0..n).map(|c| ctx.frobenius(self.a[(c + n - r) % n], r as u64)).collect()).collect()
    }

    pub fn circulant_det(&self, ctx: &FieldCtx) -> Elem {
        determinant(ctx, self.circulant_matrix(ctx))
    }

    pub fn circulant_det_is_nonzero(&self, ctx: &FieldCtx) -> bool {
        !self.circulant_det(ctx).is_zero()
    }

    /// The conventional associate `l(x) = Σ a_i x^i`.
    pub fn associate(&self, ctx: &FieldCtx) -> Poly {
        poly::from_linearized(self, ctx).expect("coefficients share the context")
    }

    /// `gcd(l(x), x^n - 1) = 1` for subfield coefficients.
    pub fn gcd_criterion_is_pp(&self, ctx: &FieldCtx) -> Result<bool> {
        if !self.subfield {
            return Err(Error::NotSubfieldCoefficients);
        }
        let g = poly::gcd(&self.associate(ctx), &x_n_minus_one(ctx), ctx)?;
        Ok(g == Poly::one(ctx))
    }

    /// Checks `L(Tr(α)) = Tr(L(α)) = (Σ a_i)·Tr(α)` for every `α`.
    pub fn trace_commutation_check(&self, ctx: &FieldCtx) -> Result<bool> {
        if !self.subfield {
            return Err(Error::NotSubfieldCoefficients);
        }
        let sum = self.a.iter().fold(ctx.zero(), |acc, &c| ctx.add(acc, c));
        Ok(ctx.elements().all(|x| {
            let tr = ctx.trace(x);
            let lhs = self.apply(ctx, tr);
            lhs == ctx.trace(self.apply(ctx, x)) && lhs == ctx.mul(sum, tr)
        }))
    }

    /// `self ∘ inner` from `Σ_{i,j} a_i b_j^{q^i} x^{q^{i+j}}`.
    pub fn compose(&self, inner: &LinPoly, ctx: &FieldCtx) -> LinPoly {
        let n = self.a.len();
        let mut c = vec![ctx.zero(); n];
        for (i, &ai) in self.a.iter().enumerate() {
            for (j, &bj) in inner.a.iter().enumerate() {
                let term = ctx.mul(ai, ctx.frobenius(bj, i as u64));
                c[(i + j) % n] = ctx.add(c[(i + j) % n], term);
            }
        }
        Self::new(ctx, c).expect("same length")
    }

    /// Composition through `l_1(x)·l_2(x) mod (x^n - 1)`; subfield coefficients only.
    pub fn compose_via_associates(&self, inner: &LinPoly, ctx: &FieldCtx) -> Result<LinPoly> {
        if !self.subfield || !inner.subfield {
            return Err(Error::NotSubfieldCoefficients);
        }
        let prod = self.associate(ctx).mul(&inner.associate(ctx), ctx)?;
        poly::to_linearized(&prod.rem(&x_n_minus_one(ctx), ctx)?, ctx)
    }

    /// Roots of `L` in `F_{q^n}`, by exhaustive scan.
    pub fn kernel(&self, ctx: &FieldCtx) -> Vec<Elem> {
        ctx.elements().filter(|&x| self.apply(ctx, x).is_zero()).collect()
    }
}

fn x_n_minus_one(ctx: &FieldCtx) -> Poly {
    let n = ctx.n() as usize;
    let mut c = vec![ctx.zero(); n + 1];
    c[0] = ctx.neg(ctx.one());
    c[n] = ctx.one();
    Poly::from_coeffs(ctx, c).expect("own context")
}

/// Gaussian elimination over the field.
pub fn determinant(ctx: &FieldCtx, mut m: Vec<Vec<Elem>>) -> Elem {
    let n = m.len();
    let mut det = ctx.one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return ctx.zero();
        };
        if pivot != col {
            m.swap(pivot, col);
            det = ctx.neg(det);
        }
        let pv = m[col][col];
        det = ctx.mul(det, pv);
        let inv = ctx.inv(pv).expect("nonzero pivot");
        let (top, below) = m.split_at_mut(col + 1);
        let pivot_row = &top[col];
        for row in below.iter_mut() {
            let factor = ctx.mul(row[col], inv);
            if factor.is_zero() {
                continue;
            }
            for (x, &p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x = ctx.sub(*x, ctx.mul(factor, p));
            }
        }
    }
    det
}

/// Deterministic linearized permutation polynomial with coefficients in `F_q`.
pub fn random_linearized_pp(ctx: &FieldCtx, seed: u64) -> LinPoly {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sub = ctx.subfield_elements();
    for _ in 0..RANDOM_PP_DRAWS {
        let a: Vec<Elem> = (0..ctx.n()).map(|_| sub[rng.random_range(0..sub.len())]).collect();
        let cand = LinPoly::new(ctx, a).expect("subfield coefficients");
        if cand.gcd_criterion_is_pp(ctx).unwrap_or(false) {
            return cand;
        }
    }
    LinPoly::identity(ctx)
}

fn format_coeff(ctx: &FieldCtx, c: Elem) -> String {
    let coords = ctx.coords(c);
    if coords[1..].iter().all(|&v| v == 0) {
        coords[0].to_string()
    } else {
        format!("g^{}", ctx.discrete_log(c).expect("nonzero"))
    }
}

/// `lin:a0;a1;...` with each coefficient a prime-field constant or `g^k`.
pub fn format_linpoly(ctx: &FieldCtx, l: &LinPoly) -> String {
    let parts: Vec<String> = l.a.iter().map(|&c| format_coeff(ctx, c)).collect();
    format!("lin:{}", parts.join(";"))
}

/// Accepts `lin:a0;a1;...` and the names `identity`, `frob`, `frob:j`,
/// `trace`, `random` (using `default_seed`) and `random:seed`.
pub fn parse_linpoly(ctx: &FieldCtx, s: &str, default_seed: u64) -> Result<LinPoly> {
    let s = s.trim();
    let bad = |position: usize, message: String| Error::Parse { position, message };
    match s {
        "identity" => return Ok(LinPoly::identity(ctx)),
        "frob" => return Ok(LinPoly::frobenius(ctx, 1)),
        "trace" => return Ok(LinPoly::trace(ctx)),
        "random" => return Ok(random_linearized_pp(ctx, default_seed)),
        _ => {}
    }
    if let Some(j) = s.strip_prefix("frob:") {
        let j: usize = j.parse().map_err(|_| bad(5, format!("bad Frobenius power in `{s}`")))?;
        return Ok(LinPoly::frobenius(ctx, j));
    }
    if let Some(seed) = s.strip_prefix("random:") {
        let seed: u64 = seed.parse().map_err(|_| bad(7, format!("bad seed in `{s}`")))?;
        return Ok(random_linearized_pp(ctx, seed));
    }
    let body = s.strip_prefix("lin:").ok_or_else(|| bad(0, format!("unknown linearized polynomial `{s}`")))?;
    let mut a = Vec::new();
    let mut pos = 4;
    for part in body.split(';') {
        let c = ctx.parse_elem(part).map_err(|e| match e {
            Error::Parse { message, .. } => bad(pos, message),
            other => other,
        })?;
        a.push(c);
        pos += part.len() + 1;
    }
    LinPoly::new(ctx, a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    fn field(p: u64, n: u32) -> FieldCtx {
        FieldCtx::new(p, 1, n, None).unwrap()
    }

    #[test]
    fn apply_examples() {
        let k = field(3, 2);
        let frob = LinPoly::frobenius(&k, 1);
        let tr = LinPoly::trace(&k);
        for x in k.elements() {
            assert_eq!(frob.apply(&k, x), k.pow(x, 3));
            assert_eq!(tr.apply(&k, x), k.trace(x));
            for y in k.elements() {
                assert_eq!(frob.apply(&k, k.add(x, y)), k.add(frob.apply(&k, x), frob.apply(&k, y)));
            }
        }
    }

    #[test]
    fn circulant_examples() {
        let k = field(3, 3);
        assert!(LinPoly::identity(&k).circulant_det_is_nonzero(&k));
        assert!(!LinPoly::trace(&k).circulant_det_is_nonzero(&k));
        let k81 = field(3, 4);
        let frob = LinPoly::frobenius(&k81, 1);
        assert!(frob.circulant_det_is_nonzero(&k81));
        assert!(oracle::is_bijective(&k81, |x| frob.apply(&k81, x)));
    }

    #[test]
    fn circulant_over_extension_coefficients() {
        // a_0 = g, a_1 = 1 on F_9: L(x) = x^3 + g x, bijective iff -g is not a (q-1)-th power
        let k = field(3, 2);
        let g = k.generator();
        for a0 in k.elements() {
            for a1 in k.elements() {
                let l = LinPoly::new(&k, vec![a0, a1]).unwrap();
                assert_eq!(l.circulant_det_is_nonzero(&k), oracle::is_bijective(&k, |x| l.apply(&k, x)));
            }
        }
        assert!(!LinPoly::new(&k, vec![g, k.one()]).unwrap().is_subfield());
    }

    #[test]
    fn gcd_criterion_examples() {
        let k = field(3, 4);
        assert!(LinPoly::frobenius(&k, 1).gcd_criterion_is_pp(&k).unwrap());
        assert!(!LinPoly::trace(&k).gcd_criterion_is_pp(&k).unwrap());
        let ext = LinPoly::monomial(&k, k.generator(), 0).unwrap();
        assert_eq!(ext.gcd_criterion_is_pp(&k).unwrap_err(), Error::NotSubfieldCoefficients);
        // random subfield L over F_81: criterion agrees with the bijection oracle
        let mut checked = 0;
        for seed in 0..40u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a: Vec<Elem> = (0..4).map(|_| k.from_prime(rng.random_range(0..3))).collect();
            let l = LinPoly::new(&k, a).unwrap();
            assert_eq!(l.gcd_criterion_is_pp(&k).unwrap(), oracle::is_bijective(&k, |x| l.apply(&k, x)));
            checked += 1;
        }
        assert_eq!(checked, 40);
    }

    #[test]
    fn trace_commutation() {
        let k = field(3, 2);
        assert!(LinPoly::identity(&k).trace_commutation_check(&k).unwrap());
        assert!(LinPoly::trace(&k).trace_commutation_check(&k).unwrap());
        let two_frob = LinPoly::monomial(&k, k.from_prime(2), 1).unwrap();
        assert!(two_frob.trace_commutation_check(&k).unwrap());
        let ext = LinPoly::monomial(&k, k.generator(), 1).unwrap();
        assert!(ext.trace_commutation_check(&k).is_err());
    }

    #[test]
    fn random_pp_is_pp() {
        let k = field(3, 4);
        for seed in 0..10 {
            let l = random_linearized_pp(&k, seed);
            assert!(l.is_subfield());
            assert!(l.gcd_criterion_is_pp(&k).unwrap());
            assert!(l.circulant_det_is_nonzero(&k));
            assert!(oracle::is_bijective(&k, |x| l.apply(&k, x)));
        }
        assert_eq!(random_linearized_pp(&k, 7), random_linearized_pp(&k, 7));
    }

    #[test]
    fn composition_routes_agree_on_f27() {
        let k = field(3, 3);
        let all: Vec<LinPoly> = (0..27u64)
            .map(|v| LinPoly::new(&k, vec![k.from_prime(v % 3), k.from_prime(v / 3 % 3), k.from_prime(v / 9)]).unwrap())
            .collect();
        for (i, l1) in all.iter().enumerate().step_by(4) {
            for l2 in all.iter().skip(i % 3).step_by(5) {
                let direct = l1.compose(l2, &k);
                assert_eq!(direct, l1.compose_via_associates(l2, &k).unwrap());
                for x in k.elements() {
                    assert_eq!(direct.apply(&k, x), l1.apply(&k, l2.apply(&k, x)));
                }
            }
        }
    }

    #[test]
    fn text_forms() {
        let k = field(3, 2);
        let l = parse_linpoly(&k, "lin:1;2", 0).unwrap();
        assert_eq!(l.coeffs(), &[k.one(), k.from_prime(2)]);
        assert_eq!(format_linpoly(&k, &l), "lin:1;2");
        let ext = parse_linpoly(&k, "lin:g^1;0", 0).unwrap();
        assert_eq!(ext.coeffs()[0], k.generator());
        assert_eq!(parse_linpoly(&k, &format_linpoly(&k, &ext), 0).unwrap(), ext);
        assert_eq!(parse_linpoly(&k, "trace", 0).unwrap(), LinPoly::trace(&k));
        assert_eq!(parse_linpoly(&k, "frob", 0).unwrap(), LinPoly::frobenius(&k, 1));
        assert!(parse_linpoly(&k, "lin:1;1;1", 0).is_err());
        assert!(matches!(parse_linpoly(&k, "lin:1;x", 0), Err(Error::Parse { position: 6, .. })));
    }
}

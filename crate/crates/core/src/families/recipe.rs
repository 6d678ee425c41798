//! Constructions of `g` with `g(x)^q = g(x)` or `g(x)^q = -g(x)` on all of `F_{q^n}`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::ElemFn;
use crate::error::{Error, Result};
use crate::gf::{Elem, FieldCtx};
use crate::poly::{format_poly, parse_poly};

/// A recipe for `g`. Polynomials `h` use the `c0,c1,...` text form and are
/// parsed against the field at build time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GRecipe {
    Zero,
    /// `Tr(h(x))`.
    TraceOfH {
        h: String,
    },
    /// `h(x)^{s(q^n-1)/(q-1)}`.
    NormPower {
        h: String,
        s: u64,
    },
    /// `Σ_{j<d} h(x)^{M q^j}` with `M = 1 + q^d + ... + q^{(k-1)d}`, `n = kd`, `1 < d < n`.
    MSum {
        h: String,
        d: usize,
    },
    Product {
        left: Box<GRecipe>,
        right: Box<GRecipe>,
    },
    Sum {
        left: Box<GRecipe>,
        right: Box<GRecipe>,
    },
    /// `Σ_{j odd} h^{q^j} - Σ_{j even} h^{q^j}` over `j < n`, `n` even.
    AntiSym2k {
        h: String,
    },
    /// `a·g(x)` for `a^q = -a ≠ 0` and a symmetric inner `g`.
    AScaled {
        a: String,
        inner: Box<GRecipe>,
    },
    /// `Σ_{j<2d} (-1)^j h(x)^{M q^j}` with `M = 1 + q^{2d} + ... + q^{2(k-1)d}`, `n = 2kd`.
    AntiMSum {
        h: String,
        d: usize,
    },
}

/// The symmetry a recipe promises.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Contract {
    /// `g^q = g`.
    Symmetric,
    /// `g^q = -g`.
    Anti,
    /// Only the zero map has both.
    Both,
}

impl Contract {
    pub fn satisfies(self, want: Contract) -> bool {
        self == Contract::Both || self == want
    }

    fn times(self, other: Contract) -> Contract {
        use Contract::*;
        match (self, other) {
            (Both, _) | (_, Both) => Both,
            (a, b) if a == b => Symmetric,
            _ => Anti,
        }
    }
}

impl GRecipe {
    pub fn trace(h: &str) -> GRecipe {
        GRecipe::TraceOfH { h: h.into() }
    }

    pub fn norm(h: &str, s: u64) -> GRecipe {
        GRecipe::NormPower { h: h.into(), s }
    }

    pub fn msum(h: &str, d: usize) -> GRecipe {
        GRecipe::MSum { h: h.into(), d }
    }

    pub fn anti2k(h: &str) -> GRecipe {
        GRecipe::AntiSym2k { h: h.into() }
    }

    pub fn anti_msum(h: &str, d: usize) -> GRecipe {
        GRecipe::AntiMSum { h: h.into(), d }
    }

    pub fn scaled(a: &str, inner: GRecipe) -> GRecipe {
        GRecipe::AScaled { a: a.into(), inner: Box::new(inner) }
    }

    pub fn product(left: GRecipe, right: GRecipe) -> GRecipe {
        GRecipe::Product { left: Box::new(left), right: Box::new(right) }
    }

    pub fn sum(left: GRecipe, right: GRecipe) -> GRecipe {
        GRecipe::Sum { left: Box::new(left), right: Box::new(right) }
    }

    /// The contract the construction is meant to satisfy. Sums of a
    /// symmetric and an anti-symmetric part have none.
    pub fn contract(&self) -> Result<Contract> {
        use GRecipe::*;
        Ok(match self {
            Zero => Contract::Both,
            TraceOfH { .. } | NormPower { .. } | MSum { .. } => Contract::Symmetric,
            AntiSym2k { .. } | AntiMSum { .. } => Contract::Anti,
            AScaled { inner, .. } => match inner.contract()? {
                Contract::Both => Contract::Both,
                Contract::Symmetric => Contract::Anti,
                Contract::Anti => return Err(self.violation("scaled inner recipe must be symmetric")),
            },
            Product { left, right } => left.contract()?.times(right.contract()?),
            Sum { left, right } => match (left.contract()?, right.contract()?) {
                (Contract::Both, c) | (c, Contract::Both) => c,
                (a, b) if a == b => a,
                _ => return Err(self.violation("summands have different symmetry")),
            },
        })
    }

    fn violation(&self, why: &str) -> Error {
        Error::RecipeContractViolated(format!("{self}: {why}"))
    }

    fn uses_anti(&self) -> bool {
        use GRecipe::*;
        match self {
            AntiSym2k { .. } | AntiMSum { .. } | AScaled { .. } => true,
            Product { left, right } | Sum { left, right } => left.uses_anti() || right.uses_anti(),
            _ => false,
        }
    }

    /// Builds the map without checking the contract.
    pub fn compile(&self, ctx: &Arc<FieldCtx>) -> Result<ElemFn> {
        use GRecipe::*;
        let n = ctx.n() as usize;
        let poly = |h: &str| -> Result<ElemFn> {
            let f = parse_poly(ctx, h)?;
            let c = ctx.clone();
            Ok(Arc::new(move |x| f.eval_in(&c, x)))
        };
        let c = ctx.clone();
        Ok(match self {
            Zero => Arc::new(move |_| c.zero()),
            TraceOfH { h } => {
                let h = poly(h)?;
                Arc::new(move |x| c.trace(h(x)))
            }
            NormPower { h, s } => {
                let h = poly(h)?;
                let e = u128::from(*s) * u128::from((ctx.order() - 1) / (ctx.q() - 1));
                Arc::new(move |x| c.pow_wide(h(x), e))
            }
            MSum { h, d } => {
                let d = *d;
                if d <= 1 || d >= n || !n.is_multiple_of(d) {
                    return Err(Error::BadDivisor { d, n: ctx.n() });
                }
                let h = poly(h)?;
                Arc::new(move |x| {
                    let hm = m_power(&c, h(x), d, n / d);
                    (0..d).fold(c.zero(), |acc, j| c.add(acc, c.frobenius(hm, j as u64)))
                })
            }
            AntiSym2k { h } => {
                if !n.is_multiple_of(2) {
                    return Err(Error::BadDivisor { d: n / 2, n: ctx.n() });
                }
                let h = poly(h)?;
                Arc::new(move |x| alternating(&c, h(x), n, true))
            }
            AntiMSum { h, d } => {
                let d = *d;
                if d == 0 || !n.is_multiple_of(2 * d) {
                    return Err(Error::BadDivisor { d, n: ctx.n() });
                }
                let h = poly(h)?;
                Arc::new(move |x| {
                    let hm = m_power(&c, h(x), 2 * d, n / (2 * d));
                    alternating(&c, hm, 2 * d, false)
                })
            }
            AScaled { a, inner } => {
                let a = ctx.parse_elem(a)?;
                let g = inner.compile(ctx)?;
                Arc::new(move |x| c.mul(a, g(x)))
            }
            Product { left, right } => {
                let (l, r) = (left.compile(ctx)?, right.compile(ctx)?);
                Arc::new(move |x| c.mul(l(x), r(x)))
            }
            Sum { left, right } => {
                let (l, r) = (left.compile(ctx)?, right.compile(ctx)?);
                Arc::new(move |x| c.add(l(x), r(x)))
            }
        })
    }

    /// Builds the map and verifies its contract on every field element.
    pub fn build(&self, ctx: &Arc<FieldCtx>) -> Result<ElemFn> {
        if self.uses_anti() && ctx.p() == 2 {
            return Err(Error::EvenCharacteristicForAnti);
        }
        let contract = self.contract()?;
        let g = self.compile(ctx)?;
        if let Some(x) = contract_counterexample(ctx, &g, contract) {
            return Err(self.violation(&format!("fails at {}", ctx.format_elem(x))));
        }
        Ok(g)
    }
}

/// `y^M` for `M = Σ_{i<k} q^{i·step}`, as a product of Frobenius images.
fn m_power(ctx: &FieldCtx, y: Elem, step: usize, k: usize) -> Elem {
    (0..k).fold(ctx.one(), |acc, i| ctx.mul(acc, ctx.frobenius(y, (i * step) as u64)))
}

/// `Σ_{j<len} ±y^{q^j}`, odd `j` positive when `odd_positive`.
fn alternating(ctx: &FieldCtx, y: Elem, len: usize, odd_positive: bool) -> Elem {
    (0..len).fold(ctx.zero(), |acc, j| {
        let t = ctx.frobenius(y, j as u64);
        if (j % 2 == 1) == odd_positive {
            ctx.add(acc, t)
        } else {
            ctx.sub(acc, t)
        }
    })
}

/// First `x` at which `g(x)^q` differs from `±g(x)` as the contract requires.
pub fn contract_counterexample(ctx: &FieldCtx, g: &ElemFn, contract: Contract) -> Option<Elem> {
    ctx.elements().find(|&x| {
        let y = g(x);
        let yq = ctx.frobenius(y, 1);
        match contract {
            Contract::Symmetric => yq != y,
            Contract::Anti => yq != ctx.neg(y),
            Contract::Both => !y.is_zero(),
        }
    })
}

impl fmt::Display for GRecipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use GRecipe::*;
        match self {
            Zero => f.write_str("zero"),
            TraceOfH { h } => write!(f, "trace({h})"),
            NormPower { h, s } => write!(f, "norm({h};s={s})"),
            MSum { h, d } => write!(f, "msum({h};d={d})"),
            AntiSym2k { h } => write!(f, "anti2k({h})"),
            AntiMSum { h, d } => write!(f, "antimsum({h};d={d})"),
            AScaled { a, inner } => write!(f, "scaled({a};{inner})"),
            Product { left, right } => write!(f, "mul({left};{right})"),
            Sum { left, right } => write!(f, "add({left};{right})"),
        }
    }
}

/// Re-renders the polynomial texts of a recipe in canonical form.
pub(crate) fn canonical(recipe: &GRecipe, ctx: &FieldCtx) -> Result<GRecipe> {
    use GRecipe::*;
    let p = |h: &str| -> Result<String> { Ok(format_poly(ctx, &parse_poly(ctx, h)?)) };
    Ok(match recipe {
        Zero => Zero,
        TraceOfH { h } => TraceOfH { h: p(h)? },
        NormPower { h, s } => NormPower { h: p(h)?, s: *s },
        MSum { h, d } => MSum { h: p(h)?, d: *d },
        AntiSym2k { h } => AntiSym2k { h: p(h)? },
        AntiMSum { h, d } => AntiMSum { h: p(h)?, d: *d },
        AScaled { a, inner } => {
            AScaled { a: ctx.format_elem(ctx.parse_elem(a)?), inner: Box::new(canonical(inner, ctx)?) }
        }
        Product { left, right } => {
            Product { left: Box::new(canonical(left, ctx)?), right: Box::new(canonical(right, ctx)?) }
        }
        Sum { left, right } => Sum { left: Box::new(canonical(left, ctx)?), right: Box::new(canonical(right, ctx)?) },
    })
}

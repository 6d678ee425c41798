//! Permutation-polynomial families with their predicted verdicts.
//!
//! Every family is built by [`build`] from named parameters. Each family
//! records its stated preconditions as a hypothesis checklist and exposes
//! the commutative diagram `ψ̄ ∘ f = h ∘ ψ` that its proof goes through.
//! `predicted_pp` comes from the theorem's condition and never from a scan.

pub mod grid;
pub mod recipe;
pub mod spec;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::gf::{Elem, FieldCtx, ResidueClass};
use crate::linearized::{format_linpoly, LinPoly};
use crate::poly::{format_poly, Poly};

pub use grid::{default_grid, instantiate_grid, GridEntry, GridOptions};
pub use recipe::{Contract, GRecipe};
pub use spec::{GridSpec, InstanceSpec, SCHEMA_VERSION};

pub type ElemFn = Arc<dyn Fn(Elem) -> Elem + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyId {
    /// A bare q-polynomial `L(x)`.
    Linearized,
    AdditiveG,
    EvenT,
    TraceGamma,
    AlphaBeta,
    AlphaBetaGamma,
    AntiG,
    N4k,
    Q6,
    GenericL,
    HalfPower,
}

impl FamilyId {
    pub const ALL: [FamilyId; 11] = [
        FamilyId::Linearized,
        FamilyId::AdditiveG,
        FamilyId::EvenT,
        FamilyId::TraceGamma,
        FamilyId::AlphaBeta,
        FamilyId::AlphaBetaGamma,
        FamilyId::AntiG,
        FamilyId::N4k,
        FamilyId::Q6,
        FamilyId::GenericL,
        FamilyId::HalfPower,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FamilyId::Linearized => "linearized",
            FamilyId::AdditiveG => "additive_g",
            FamilyId::EvenT => "even_t",
            FamilyId::TraceGamma => "trace_gamma",
            FamilyId::AlphaBeta => "alpha_beta",
            FamilyId::AlphaBetaGamma => "alpha_beta_gamma",
            FamilyId::AntiG => "anti_g",
            FamilyId::N4k => "n4k",
            FamilyId::Q6 => "q6",
            FamilyId::GenericL => "generic_l",
            FamilyId::HalfPower => "half_power",
        }
    }

    /// Parameter names and kinds, in grid enumeration order.
    pub fn schema(self) -> &'static [(&'static str, ParamKind)] {
        use ParamKind::*;
        match self {
            FamilyId::Linearized => &[("l", Lin)],
            FamilyId::AdditiveG => &[("g", Recipe), ("l", Lin), ("delta", Elem)],
            FamilyId::EvenT => &[("t", Int), ("delta", Elem), ("l", Lin)],
            FamilyId::TraceGamma => &[("t", Int), ("delta", Elem), ("beta", Elem), ("gamma", Elem), ("s", Int)],
            FamilyId::AlphaBeta => &[("t", Int), ("delta", Elem), ("alpha", Elem), ("beta", Elem), ("l", Lin)],
            FamilyId::AlphaBetaGamma => {
                &[("t", Int), ("delta", Elem), ("alpha", Elem), ("beta", Elem), ("gamma", Elem), ("s", Int)]
            }
            FamilyId::AntiG => &[("g", Recipe), ("beta", Elem), ("delta", Elem), ("l", Lin)],
            FamilyId::N4k => &[("variant", Variant(&["plain", "qtwist"])), ("a", Elem), ("delta", Elem)],
            FamilyId::Q6 => {
                &[("variant", Variant(&["minus", "plus", "plus_uniform"])), ("h", Poly), ("l", Lin), ("delta", Elem)]
            }
            FamilyId::GenericL => &[("l", Lin), ("a", Elem), ("h", Recipe), ("l1", Lin), ("delta", Elem)],
            FamilyId::HalfPower => &[("k", Int), ("a", Elem), ("b", Elem), ("delta", Elem)],
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FamilyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<FamilyId> {
        FamilyId::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::Schema(format!("unknown family `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    Int,
    Elem,
    Lin,
    Poly,
    Recipe,
    Variant(&'static [&'static str]),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParamValue {
    Int(i64),
    Elem(Elem),
    Lin(LinPoly),
    Poly(Poly),
    Recipe(GRecipe),
    Variant(&'static str),
}

impl ParamValue {
    fn fits(&self, kind: ParamKind) -> bool {
        matches!(
            (self, kind),
            (ParamValue::Int(_), ParamKind::Int)
                | (ParamValue::Elem(_), ParamKind::Elem)
                | (ParamValue::Lin(_), ParamKind::Lin)
                | (ParamValue::Poly(_), ParamKind::Poly)
                | (ParamValue::Recipe(_), ParamKind::Recipe)
        ) || matches!((self, kind), (ParamValue::Variant(v), ParamKind::Variant(all)) if all.contains(v))
    }

    fn check_ctx(&self, ctx: &FieldCtx) -> Result<()> {
        match self {
            ParamValue::Elem(x) => ctx.check(*x),
            ParamValue::Lin(l) => l.coeffs().iter().try_for_each(|&c| ctx.check(c)),
            ParamValue::Poly(p) if !p.is_zero() && p.ctx_id() != ctx.id() => Err(Error::CtxMismatch),
            _ => Ok(()),
        }
    }

    pub fn to_json(&self, ctx: &FieldCtx) -> Value {
        match self {
            ParamValue::Int(v) => Value::from(*v),
            ParamValue::Recipe(r) => {
                let r = recipe::canonical(r, ctx).unwrap_or_else(|_| r.clone());
                serde_json::to_value(r).expect("recipe serializes")
            }
            other => Value::String(other.to_text(ctx)),
        }
    }

    pub fn to_text(&self, ctx: &FieldCtx) -> String {
        match self {
            ParamValue::Int(v) => v.to_string(),
            ParamValue::Elem(x) => ctx.format_elem(*x),
            ParamValue::Lin(l) => format_linpoly(ctx, l),
            ParamValue::Poly(p) => format_poly(ctx, p),
            ParamValue::Recipe(r) => recipe::canonical(r, ctx).unwrap_or_else(|_| r.clone()).to_string(),
            ParamValue::Variant(v) => (*v).to_string(),
        }
    }
}

pub type Params = Vec<(&'static str, ParamValue)>;

/// A stated precondition and whether the instance meets it.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypothesis {
    pub name: String,
    pub satisfied: bool,
    violation: Option<Error>,
}

impl Hypothesis {
    /// The error a strict constructor raises when this is unsatisfied.
    pub fn violation(&self) -> Option<&Error> {
        self.violation.as_ref()
    }
}

/// The maps `ψ: A → S` and `ψ̄: A → S̄` of the family's diagram, and
/// the decomposition `f = u + v` when the main theorem applies.
#[derive(Clone)]
pub struct Diagram {
    pub name: &'static str,
    pub psi: ElemFn,
    pub psibar: ElemFn,
    pub split: Option<(ElemFn, ElemFn)>,
}

#[derive(Clone)]
pub struct FamilyInstance {
    pub family: FamilyId,
    pub ctx: Arc<FieldCtx>,
    pub params: Params,
    pub evaluator: ElemFn,
    pub predicted_pp: bool,
    pub hypotheses: Vec<Hypothesis>,
    pub diagram: Diagram,
}

impl fmt::Debug for FamilyInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FamilyInstance")
            .field("label", &self.label())
            .field("predicted_pp", &self.predicted_pp)
            .field("hypotheses", &self.hypotheses)
            .finish()
    }
}

impl FamilyInstance {
    pub fn eval(&self, x: Elem) -> Elem {
        (self.evaluator)(x)
    }

    pub fn param(&self, name: &str) -> Option<&ParamValue> {
        self.params.iter().find(|(k, _)| *k == name).map(|(_, v)| v)
    }

    pub fn param_texts(&self) -> Vec<(String, String)> {
        self.params.iter().map(|(k, v)| (k.to_string(), v.to_text(&self.ctx))).collect()
    }

    pub fn spec(&self) -> InstanceSpec {
        InstanceSpec {
            schema_version: SCHEMA_VERSION,
            family: self.family,
            field: self.ctx.spec().to_string(),
            params: self.params.iter().map(|(k, v)| (k.to_string(), v.to_json(&self.ctx))).collect(),
        }
    }

    pub fn label(&self) -> String {
        label(self.family, &self.ctx.spec().to_string(), &self.param_texts())
    }

    /// Fails with the first unsatisfied hypothesis.
    pub fn strict(self) -> Result<FamilyInstance> {
        match self.hypotheses.iter().find(|h| !h.satisfied) {
            Some(h) => Err(h.violation.clone().unwrap_or_else(|| Error::HypothesisViolated(h.name.clone()))),
            None => Ok(self),
        }
    }
}

pub(crate) fn label(family: FamilyId, field: &str, params: &[(String, String)]) -> String {
    let mut out = format!("{family} {field}");
    for (k, v) in params {
        out.push_str(&format!(" {k}={v}"));
    }
    out
}

/// Builds an instance, failing on the first unsatisfied hypothesis.
pub fn build(family: FamilyId, ctx: &Arc<FieldCtx>, params: Params) -> Result<FamilyInstance> {
    build_lenient(family, ctx, params)?.strict()
}

/// Builds an instance and records unsatisfied hypotheses instead of failing.
/// Structural problems (wrong parameters, impossible recipes, negative
/// exponents) are still errors.
pub fn build_lenient(family: FamilyId, ctx: &Arc<FieldCtx>, params: Params) -> Result<FamilyInstance> {
    let schema = family.schema();
    if params.len() != schema.len() {
        return Err(Error::Schema(format!("{family} takes parameters {:?}", names(schema))));
    }
    for ((name, value), (want, kind)) in params.iter().zip(schema) {
        if name != want || !value.fits(*kind) {
            return Err(Error::Schema(format!(
                "{family}: expected parameter `{want}` of kind {kind:?} in position of `{name}`"
            )));
        }
        value.check_ctx(ctx)?;
    }
    let b = Builder { ctx: ctx.clone(), params: &params, checks: Vec::new() };
    let (evaluator, predicted_pp, diagram, hypotheses) = match family {
        FamilyId::Linearized => b.linearized()?,
        FamilyId::AdditiveG => b.additive_g()?,
        FamilyId::EvenT => b.even_t()?,
        FamilyId::TraceGamma => b.trace_gamma()?,
        FamilyId::AlphaBeta => b.alpha_beta(false)?,
        FamilyId::AlphaBetaGamma => b.alpha_beta(true)?,
        FamilyId::AntiG => b.anti_g()?,
        FamilyId::N4k => b.n4k()?,
        FamilyId::Q6 => b.q6()?,
        FamilyId::GenericL => b.generic_l()?,
        FamilyId::HalfPower => b.half_power()?,
    };
    Ok(FamilyInstance { family, ctx: ctx.clone(), params, evaluator, predicted_pp, hypotheses, diagram })
}

fn names(schema: &[(&'static str, ParamKind)]) -> Vec<&'static str> {
    schema.iter().map(|(n, _)| *n).collect()
}

/// `L` permutes the field: the circulant criterion, cross-checked against
/// the gcd criterion when the coefficients lie in `F_q`.
pub fn predict_linear(ctx: &FieldCtx, l: &LinPoly) -> Result<bool> {
    let det = l.circulant_det_is_nonzero(ctx);
    if l.is_subfield() && l.gcd_criterion_is_pp(ctx)? != det {
        return Err(Error::HypothesisViolated("gcd and circulant criteria agree".into()));
    }
    Ok(det)
}

type Built = (ElemFn, bool, Diagram, Vec<Hypothesis>);

struct Builder<'a> {
    ctx: Arc<FieldCtx>,
    params: &'a Params,
    checks: Vec<Hypothesis>,
}

fn func(f: impl Fn(Elem) -> Elem + Send + Sync + 'static) -> ElemFn {
    Arc::new(f)
}

impl Builder<'_> {
    fn get(&self, name: &str) -> &ParamValue {
        &self.params.iter().find(|(k, _)| *k == name).expect("validated against schema").1
    }

    fn int(&self, name: &'static str) -> i64 {
        match self.get(name) {
            ParamValue::Int(v) => *v,
            _ => unreachable!("validated against schema"),
        }
    }

    fn nonneg(&self, name: &'static str) -> Result<u64> {
        let v = self.int(name);
        u64::try_from(v).map_err(|_| Error::NegativeExponent { name, value: v })
    }

    fn elem(&self, name: &str) -> Elem {
        match self.get(name) {
            ParamValue::Elem(x) => *x,
            _ => unreachable!("validated against schema"),
        }
    }

    fn lin(&self, name: &str) -> LinPoly {
        match self.get(name) {
            ParamValue::Lin(l) => l.clone(),
            _ => unreachable!("validated against schema"),
        }
    }

    fn recipe(&self, name: &str) -> GRecipe {
        match self.get(name) {
            ParamValue::Recipe(r) => r.clone(),
            _ => unreachable!("validated against schema"),
        }
    }

    fn check(&mut self, name: &str, ok: bool, err: Error) {
        self.checks.push(Hypothesis { name: name.into(), satisfied: ok, violation: (!ok).then_some(err) });
    }

    fn finish(self, f: ElemFn, predicted: bool, diagram: Diagram) -> Result<Built> {
        Ok((f, predicted, diagram, self.checks))
    }

    fn half_degree(&mut self) -> u64 {
        let n = self.ctx.n();
        self.check("n = 2k", n.is_multiple_of(2), Error::BadN { n, need: "n = 2k" });
        u64::from(n / 2)
    }

    fn even_t_check(&mut self) -> Result<u64> {
        let t = self.int("t");
        let tu = self.nonneg("t")?;
        self.check("t even", t % 2 == 0, Error::OddT(t));
        Ok(tu)
    }

    fn anti_delta_check(&mut self, k: u64) -> Elem {
        let c = self.ctx.clone();
        let delta = self.elem("delta");
        self.check(
            "delta^(q^k) = -delta",
            c.frobenius(delta, k) == c.neg(delta),
            Error::BadDelta("delta^(q^k) = -delta"),
        );
        delta
    }

    fn lin_over(&mut self, name: &str, l: &LinPoly, k: u64) {
        self.check(
            &format!("{name} over F_(q^{k})"),
            l.coefficients_in_degree(&self.ctx, k as u32),
            Error::BadParameter(format!("{name} must have coefficients in F_(q^{k})")),
        );
    }

    fn subfield_lin(&mut self, name: &str, l: &LinPoly) {
        self.check(&format!("{name} over F_q"), l.is_subfield(), Error::NotSubfieldCoefficients);
    }

    fn linearized(self) -> Result<Built> {
        let c = self.ctx.clone();
        let l = self.lin("l");
        let predicted = predict_linear(&c, &l)?;
        let lf = l.clone();
        let f = func(move |x| lf.apply(&c, x));
        let diagram = if l.is_subfield() {
            let c = self.ctx.clone();
            let tr = func(move |x| c.trace(x));
            Diagram { name: "Tr / Tr", psi: tr.clone(), psibar: tr, split: None }
        } else {
            identity_diagram()
        };
        self.finish(f, predicted, diagram)
    }

    fn additive_g(mut self) -> Result<Built> {
        let c = self.ctx.clone();
        let recipe = self.recipe("g");
        let l = self.lin("l");
        let delta = self.elem("delta");
        let g = recipe.compile(&c)?;
        let holds = recipe::contract_counterexample(&c, &g, Contract::Symmetric).is_none();
        self.check("g^q = g", holds, Error::RecipeContractViolated(recipe.to_string()));
        self.subfield_lin("L", &l);
        let predicted = predict_linear(&c, &l)?;
        let (lc, cc) = (l.clone(), c.clone());
        let u = func(move |x| lc.apply(&cc, x));
        let cc = c.clone();
        let v = func(move |x| g(cc.add(cc.sub(cc.frobenius(x, 1), x), delta)));
        let diagram = shifted_diagram(
            &c,
            "x^q - x + delta / x^q - x",
            move |c, x| c.sub(c.frobenius(x, 1), x),
            delta,
            Some((u, v)),
        );
        let f = sum_fn(&c, &diagram);
        self.finish(f, predicted, diagram)
    }

    fn even_t(mut self) -> Result<Built> {
        let c = self.ctx.clone();
        let t = self.even_t_check()?;
        let k = self.half_degree();
        let delta = self.anti_delta_check(k);
        let l = self.lin("l");
        self.lin_over("L", &l, k);
        let predicted = predict_linear(&c, &l)?;
        let (lc, cc) = (l.clone(), c.clone());
        let u = func(move |x| lc.apply(&cc, x));
        let v = power_of_shift(&c, k, delta, t);
        let diagram = frob_k_diagram(&c, k, Sign::Minus, Some((u, v)));
        let f = sum_fn(&c, &diagram);
        self.finish(f, predicted, diagram)
    }

    fn trace_gamma(mut self) -> Result<Built> {
        let c = self.ctx.clone();
        let t = self.even_t_check()?;
        let s = self.nonneg("s")?;
        let k = self.half_degree();
        let delta = self.anti_delta_check(k);
        let beta = self.elem("beta");
        let gamma = self.elem("gamma");
        self.check(
            "beta in F_(q^k)",
            c.in_subfield_of_degree(beta, k as u32),
            Error::BadParameter("beta must lie in F_(q^k)".into()),
        );
        self.check("gamma in F_q*", !gamma.is_zero() && c.in_subfield(gamma), Error::GammaZero);
        let predicted = match c.inv(gamma) {
            Ok(gi) => !c.add(c.trace(c.mul(beta, gi)), c.one()).is_zero(),
            Err(_) => false,
        };
        let cc = c.clone();
        let u = func(move |x| cc.add(cc.mul(beta, cc.trace(x)), cc.mul(gamma, cc.frobenius(x, s))));
        let v = power_of_shift(&c, k, delta, t);
        let diagram = frob_k_diagram(&c, k, Sign::Minus, Some((u, v)));
        let f = sum_fn(&c, &diagram);
        self.finish(f, predicted, diagram)
    }

    fn alpha_beta(mut self, corollary: bool) -> Result<Built> {
        let c = self.ctx.clone();
        let t = self.nonneg("t")?;
        self.check("q odd", c.p() != 2, Error::EvenCharacteristic);
        let k = self.half_degree();
        let delta = self.elem("delta");
        let (alpha, beta) = (self.elem("alpha"), self.elem("beta"));
        self.check("delta in F_(q^k)", c.in_subfield_of_degree(delta, k as u32), Error::BadDelta("delta in F_(q^k)"));
        let anti = |x: Elem| c.frobenius(x, k) == c.neg(x);
        self.check("alpha^(q^k) = -alpha, beta^(q^k) = -beta", anti(alpha) && anti(beta), Error::BadAlphaBeta);
        let (u, predicted): (ElemFn, bool) = if corollary {
            let gamma = self.elem("gamma");
            let s = self.nonneg("s")?;
            self.check(
                "gamma in F_(q^k)",
                c.in_subfield_of_degree(gamma, k as u32),
                Error::BadParameter("gamma must lie in F_(q^k)".into()),
            );
            let cc = c.clone();
            (func(move |x| cc.mul(gamma, cc.frobenius(x, s))), !gamma.is_zero())
        } else {
            let l = self.lin("l");
            self.lin_over("L", &l, k);
            let predicted = predict_linear(&c, &l)?;
            let cc = c.clone();
            (func(move |x| l.apply(&cc, x)), predicted)
        };
        let cc = c.clone();
        let v = func(move |x| {
            let w = cc.add(cc.add(cc.frobenius(x, k), x), delta);
            cc.add(cc.mul(alpha, cc.pow(w, t)), cc.mul(beta, cc.trace(x)))
        });
        let diagram = frob_k_diagram(&c, k, Sign::Plus, Some((u, v)));
        let f = sum_fn(&c, &diagram);
        self.finish(f, predicted, diagram)
    }

    fn anti_g(mut self) -> Result<Built> {
        let c = self.ctx.clone();
        let recipe = self.recipe("g");
        let (beta, delta) = (self.elem("beta"), self.elem("delta"));
        let l = self.lin("l");
        self.check("q odd", c.p() != 2, Error::EvenCharacteristic);
        let g = recipe.compile(&c)?;
        let holds = recipe::contract_counterexample(&c, &g, Contract::Anti).is_none();
        self.check("g^q = -g", holds, Error::RecipeContractViolated(recipe.to_string()));
        self.check("beta^q = -beta", c.frobenius(beta, 1) == c.neg(beta), Error::BadBeta);
        self.subfield_lin("L", &l);
        let predicted = predict_linear(&c, &l)?;
        let (lc, cc) = (l.clone(), c.clone());
        let u = func(move |x| lc.apply(&cc, x));
        let cc = c.clone();
        let v = func(move |x| {
            let w = cc.add(cc.add(cc.frobenius(x, 1), x), delta);
            cc.add(g(w), cc.mul(beta, cc.trace(x)))
        });
        let diagram = shifted_diagram(
            &c,
            "x^q + x + delta / x^q + x",
            move |c, x| c.add(c.frobenius(x, 1), x),
            delta,
            Some((u, v)),
        );
        let f = sum_fn(&c, &diagram);
        self.finish(f, predicted, diagram)
    }

    fn n4k(mut self) -> Result<Built> {
        let c = self.ctx.clone();
        let n = c.n();
        let twist = matches!(self.get("variant"), ParamValue::Variant("qtwist"));
        let (a, delta) = (self.elem("a"), self.elem("delta"));
        self.check("n = 4k", n.is_multiple_of(4), Error::BadN { n, need: "n = 4k" });
        self.check("a in F_q*", !a.is_zero() && c.in_subfield(a), Error::ZeroA);
        let k = u64::from(n / 4);
        let offset = u64::from(twist);
        let tr = c.trace(delta);
        let predicted = if twist { tr != c.neg(a) } else { tr != a };
        let cc = c.clone();
        let f = func(move |x| {
            let w = cc.add(cc.sub(cc.frobenius(x, 1), x), delta);
            // plain: Σ_{i<k} w^{q^{2i} + q^{2i+2k}}; twisted: exponents shifted by one,
            // i.e. the plain sum raised to q. Raising once more would give back the
            // plain map, since g^{q^2} = g.
            let g = (0..k).fold(cc.zero(), |acc, i| {
                let j = 2 * i + offset;
                cc.add(acc, cc.mul(cc.frobenius(w, j), cc.frobenius(w, j + 2 * k)))
            });
            cc.add(g, cc.mul(a, x))
        });
        let diagram =
            shifted_diagram(&c, "x^q - x + delta / x^q - x", move |c, x| c.sub(c.frobenius(x, 1), x), delta, None);
        self.finish(f, predicted, diagram)
    }

    fn q6(mut self) -> Result<Built> {
        let c = self.ctx.clone();
        let n = c.n();
        let variant = match self.get("variant") {
            ParamValue::Variant(v) => *v,
            _ => unreachable!("validated against schema"),
        };
        let h = match self.get("h") {
            ParamValue::Poly(p) => p.clone(),
            _ => unreachable!("validated against schema"),
        };
        let l = self.lin("l");
        let delta = self.elem("delta");
        self.check("n = 6", n == 6, Error::BadN { n, need: "n = 6" });
        self.subfield_lin("L", &l);
        let predicted = predict_linear(&c, &l)?;
        let (lc, cc) = (l.clone(), c.clone());
        let u = func(move |x| lc.apply(&cc, x));
        let cc = c.clone();
        let plus = variant != "minus";
        let v = func(move |x| {
            let (x1, x2) = (cc.frobenius(x, 1), cc.frobenius(x, 2));
            let wm = cc.add(cc.add(cc.sub(x2, x1), x), delta);
            let wp = cc.add(cc.add(cc.add(x2, x1), x), delta);
            match variant {
                "minus" => {
                    let hm = h.eval_in(&cc, wm);
                    let t = cc.add(cc.frobenius(hm, 4), cc.frobenius(hm, 3));
                    cc.sub(t, cc.add(cc.frobenius(hm, 1), hm))
                }
                "plus" => {
                    // as printed: only the q^4 and q^3 terms see x^{q^2}+x^q+x+δ
                    let (hp, hm) = (h.eval_in(&cc, wp), h.eval_in(&cc, wm));
                    let t = cc.sub(cc.frobenius(hp, 4), cc.frobenius(hp, 3));
                    cc.add(t, cc.sub(cc.frobenius(hm, 1), hm))
                }
                _ => {
                    // every term at x^{q^2}+x^q+x+δ: (1+x+x^2)(x^4-x^3+x-1) = x^6-1
                    let hp = h.eval_in(&cc, wp);
                    let t = cc.sub(cc.frobenius(hp, 4), cc.frobenius(hp, 3));
                    cc.add(t, cc.sub(cc.frobenius(hp, 1), hp))
                }
            }
        });
        let diagram = if plus {
            shifted_diagram(
                &c,
                "x^(q^2) + x^q + x + delta / x^(q^2) + x^q + x",
                |c, x| c.add(c.add(c.frobenius(x, 2), c.frobenius(x, 1)), x),
                delta,
                Some((u, v)),
            )
        } else {
            shifted_diagram(
                &c,
                "x^(q^2) - x^q + x + delta / x^(q^2) - x^q + x",
                |c, x| c.add(c.sub(c.frobenius(x, 2), c.frobenius(x, 1)), x),
                delta,
                Some((u, v)),
            )
        };
        let f = sum_fn(&c, &diagram);
        self.finish(f, predicted, diagram)
    }

    fn generic_l(mut self) -> Result<Built> {
        let c = self.ctx.clone();
        let l = self.lin("l");
        let a = self.elem("a");
        let recipe = self.recipe("h");
        let l1 = self.lin("l1");
        let delta = self.elem("delta");
        let l_pp = predict_linear(&c, &l)?;
        self.check("L has a nonzero root", !l_pp, Error::TrivialKernel);
        self.check("a != 0, L(a) = 0", !a.is_zero() && l.apply(&c, a).is_zero(), Error::BadKernelElement);
        let h = recipe.compile(&c)?;
        let holds = recipe::contract_counterexample(&c, &h, Contract::Symmetric).is_none();
        self.check("h^q = h", holds, Error::HContractViolated);
        self.subfield_lin("L1", &l1);
        let predicted = predict_linear(&c, &l1)?;
        let (l1c, cc) = (l1.clone(), c.clone());
        let u = func(move |x| l1c.apply(&cc, x));
        let (lc, cc) = (l.clone(), c.clone());
        let v = func(move |x| cc.mul(a, h(cc.add(lc.apply(&cc, x), delta))));
        let lc = l.clone();
        let diagram = shifted_diagram(&c, "L(x) + delta / L(x)", move |c, x| lc.apply(c, x), delta, Some((u, v)));
        let f = sum_fn(&c, &diagram);
        self.finish(f, predicted, diagram)
    }

    fn half_power(mut self) -> Result<Built> {
        let c = self.ctx.clone();
        let k = self.int("k");
        if k < 1 {
            return Err(Error::BadParameter(format!("k={k} must be positive")));
        }
        let k = k as u64;
        let (a, b, delta) = (self.elem("a"), self.elem("b"), self.elem("delta"));
        self.check("q odd", c.p() != 2, Error::EvenCharacteristic);
        self.check("ab != 0", !a.is_zero() && !b.is_zero(), Error::ZeroCoefficient);
        let predicted = c.residue_class(c.mul(a, b)).map(|r| r == ResidueClass::D0).unwrap_or(false);
        let e = c.order().div_ceil(2);
        let cc = c.clone();
        let f = func(move |x| {
            let ax = cc.mul(a, cc.frobenius(x, k));
            let bx = cc.mul(b, x);
            cc.add(cc.pow(cc.add(cc.sub(ax, bx), delta), e), cc.add(ax, bx))
        });
        self.finish(f, predicted, identity_diagram())
    }
}

#[derive(Clone, Copy)]
enum Sign {
    Plus,
    Minus,
}

fn identity_diagram() -> Diagram {
    let id = func(|x| x);
    Diagram { name: "identity", psi: id.clone(), psibar: id, split: None }
}

/// `ψ = ψ̄ = x^{q^k} ∓ x`.
fn frob_k_diagram(c: &Arc<FieldCtx>, k: u64, sign: Sign, split: Option<(ElemFn, ElemFn)>) -> Diagram {
    let cc = c.clone();
    let (name, psi): (&'static str, ElemFn) = match sign {
        Sign::Minus => ("x^(q^k) - x", func(move |x| cc.sub(cc.frobenius(x, k), x))),
        Sign::Plus => ("x^(q^k) + x", func(move |x| cc.add(cc.frobenius(x, k), x))),
    };
    Diagram { name, psi: psi.clone(), psibar: psi, split }
}

/// `ψ = ψ̄ + δ` for an additive `ψ̄`.
fn shifted_diagram(
    c: &Arc<FieldCtx>,
    name: &'static str,
    psibar: impl Fn(&FieldCtx, Elem) -> Elem + Send + Sync + 'static,
    delta: Elem,
    split: Option<(ElemFn, ElemFn)>,
) -> Diagram {
    let psibar = Arc::new(psibar);
    let (c1, p1) = (c.clone(), psibar.clone());
    let (c2, p2) = (c.clone(), psibar);
    Diagram { name, psi: func(move |x| c1.add(p1(&c1, x), delta)), psibar: func(move |x| p2(&c2, x)), split }
}

/// `x ↦ (x^{q^k} - x + δ)^t`.
fn power_of_shift(c: &Arc<FieldCtx>, k: u64, delta: Elem, t: u64) -> ElemFn {
    let cc = c.clone();
    func(move |x| cc.pow(cc.add(cc.sub(cc.frobenius(x, k), x), delta), t))
}

fn sum_fn(c: &Arc<FieldCtx>, d: &Diagram) -> ElemFn {
    let (u, v) = d.split.clone().expect("diagram with split");
    let cc = c.clone();
    func(move |x| cc.add(u(x), v(x)))
}

// Typed constructors.

pub fn linearized(ctx: &Arc<FieldCtx>, l: &LinPoly) -> Result<FamilyInstance> {
    build(FamilyId::Linearized, ctx, vec![("l", ParamValue::Lin(l.clone()))])
}

/// `g(x^q - x + δ) + L(x)`.
pub fn additive_g(ctx: &Arc<FieldCtx>, g: &GRecipe, l: &LinPoly, delta: Elem) -> Result<FamilyInstance> {
    build(
        FamilyId::AdditiveG,
        ctx,
        vec![
            ("g", ParamValue::Recipe(g.clone())),
            ("l", ParamValue::Lin(l.clone())),
            ("delta", ParamValue::Elem(delta)),
        ],
    )
}

/// `(x^{q^k} - x + δ)^t + L(x)` with `n = 2k`.
pub fn even_t(ctx: &Arc<FieldCtx>, t: i64, delta: Elem, l: &LinPoly) -> Result<FamilyInstance> {
    build(
        FamilyId::EvenT,
        ctx,
        vec![("t", ParamValue::Int(t)), ("delta", ParamValue::Elem(delta)), ("l", ParamValue::Lin(l.clone()))],
    )
}

/// `(x^{q^k} - x + δ)^t + β·Tr(x) + γ·x^{q^s}`.
pub fn trace_gamma(
    ctx: &Arc<FieldCtx>,
    t: i64,
    delta: Elem,
    beta: Elem,
    gamma: Elem,
    s: i64,
) -> Result<FamilyInstance> {
    build(
        FamilyId::TraceGamma,
        ctx,
        vec![
            ("t", ParamValue::Int(t)),
            ("delta", ParamValue::Elem(delta)),
            ("beta", ParamValue::Elem(beta)),
            ("gamma", ParamValue::Elem(gamma)),
            ("s", ParamValue::Int(s)),
        ],
    )
}

/// `α(x^{q^k} + x + δ)^t + β·Tr(x) + L(x)`.
pub fn alpha_beta(
    ctx: &Arc<FieldCtx>,
    t: i64,
    delta: Elem,
    alpha: Elem,
    beta: Elem,
    l: &LinPoly,
) -> Result<FamilyInstance> {
    build(
        FamilyId::AlphaBeta,
        ctx,
        vec![
            ("t", ParamValue::Int(t)),
            ("delta", ParamValue::Elem(delta)),
            ("alpha", ParamValue::Elem(alpha)),
            ("beta", ParamValue::Elem(beta)),
            ("l", ParamValue::Lin(l.clone())),
        ],
    )
}

/// The `L = γ·x^{q^s}` specialization of [`alpha_beta`].
pub fn alpha_beta_gamma(
    ctx: &Arc<FieldCtx>,
    t: i64,
    delta: Elem,
    alpha: Elem,
    beta: Elem,
    gamma: Elem,
    s: i64,
) -> Result<FamilyInstance> {
    build(
        FamilyId::AlphaBetaGamma,
        ctx,
        vec![
            ("t", ParamValue::Int(t)),
            ("delta", ParamValue::Elem(delta)),
            ("alpha", ParamValue::Elem(alpha)),
            ("beta", ParamValue::Elem(beta)),
            ("gamma", ParamValue::Elem(gamma)),
            ("s", ParamValue::Int(s)),
        ],
    )
}

/// `g(x^q + x + δ) + β·Tr(x) + L(x)` with `g^q = -g`.
pub fn anti_g(ctx: &Arc<FieldCtx>, g: &GRecipe, beta: Elem, delta: Elem, l: &LinPoly) -> Result<FamilyInstance> {
    build(
        FamilyId::AntiG,
        ctx,
        vec![
            ("g", ParamValue::Recipe(g.clone())),
            ("beta", ParamValue::Elem(beta)),
            ("delta", ParamValue::Elem(delta)),
            ("l", ParamValue::Lin(l.clone())),
        ],
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum N4kVariant {
    Plain,
    QTwist,
}

/// `g(x^q - x + δ) + ax` (plain) or `g(x^q - x + δ)^q + ax` (twisted), `n = 4k`.
pub fn n4k(ctx: &Arc<FieldCtx>, variant: N4kVariant, a: Elem, delta: Elem) -> Result<FamilyInstance> {
    let v = match variant {
        N4kVariant::Plain => "plain",
        N4kVariant::QTwist => "qtwist",
    };
    build(
        FamilyId::N4k,
        ctx,
        vec![("variant", ParamValue::Variant(v)), ("a", ParamValue::Elem(a)), ("delta", ParamValue::Elem(delta))],
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Q6Variant {
    Minus,
    /// The second theorem exactly as printed.
    Plus,
    /// The second theorem with every `h` term at `x^{q^2}+x^q+x+δ`.
    PlusUniform,
}

pub fn q6(ctx: &Arc<FieldCtx>, variant: Q6Variant, h: &Poly, l: &LinPoly, delta: Elem) -> Result<FamilyInstance> {
    let v = match variant {
        Q6Variant::Minus => "minus",
        Q6Variant::Plus => "plus",
        Q6Variant::PlusUniform => "plus_uniform",
    };
    build(
        FamilyId::Q6,
        ctx,
        vec![
            ("variant", ParamValue::Variant(v)),
            ("h", ParamValue::Poly(h.clone())),
            ("l", ParamValue::Lin(l.clone())),
            ("delta", ParamValue::Elem(delta)),
        ],
    )
}

/// `a·h(L(x) + δ) + L1(x)` with `L(a) = 0`.
pub fn generic_l(
    ctx: &Arc<FieldCtx>,
    l: &LinPoly,
    a: Elem,
    h: &GRecipe,
    l1: &LinPoly,
    delta: Elem,
) -> Result<FamilyInstance> {
    build(
        FamilyId::GenericL,
        ctx,
        vec![
            ("l", ParamValue::Lin(l.clone())),
            ("a", ParamValue::Elem(a)),
            ("h", ParamValue::Recipe(h.clone())),
            ("l1", ParamValue::Lin(l1.clone())),
            ("delta", ParamValue::Elem(delta)),
        ],
    )
}

/// `(a x^{q^k} - b x + δ)^{(q^n+1)/2} + a x^{q^k} + b x`.
pub fn half_power(ctx: &Arc<FieldCtx>, k: i64, a: Elem, b: Elem, delta: Elem) -> Result<FamilyInstance> {
    build(
        FamilyId::HalfPower,
        ctx,
        vec![
            ("k", ParamValue::Int(k)),
            ("a", ParamValue::Elem(a)),
            ("b", ParamValue::Elem(b)),
            ("delta", ParamValue::Elem(delta)),
        ],
    )
}

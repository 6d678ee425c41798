//! Deterministic expansion of parameter grids into instances.
//!
//! Grid values are a literal, an array, or a keyword. Element keywords:
//! `all`, `nonzero`, `subfield` (`F_q`), `subfield_nonzero`, `sub_k`
//! (`F_{q^k}`, `k = n/2`), `anti_k` / `anti_k_nonzero` (`x^{q^k} = -x`),
//! `anti_q` (`x^q = -x`), `kernel_nonzero` (nonzero roots of the
//! parameter `l`) and `sample:N` (N distinct elements drawn with the grid
//! seed). `subfield_all` lists every q-polynomial over `F_q`; `all` lists
//! every variant.

use std::collections::HashSet;
use std::sync::Arc;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::spec::{parse_field, parse_param};
use super::{build_lenient, label, FamilyId, FamilyInstance, GridSpec, ParamKind, ParamValue, Params, SCHEMA_VERSION};
use crate::error::{Error, Result};
use crate::gf::{Elem, FieldCtx, Sign};
use crate::linearized::LinPoly;

#[derive(Debug, Clone)]
pub struct GridOptions {
    /// Seed for `random` q-polynomials and `sample:N`.
    pub seed: u64,
    /// Instances past this many evaluator calls on one field are skipped.
    pub max_calls_per_field: u64,
    pub max_entries: usize,
}

impl Default for GridOptions {
    fn default() -> Self {
        GridOptions { seed: 0, max_calls_per_field: 10_000_000, max_entries: 2_000_000 }
    }
}

#[derive(Debug, Clone)]
pub enum GridEntry {
    Instance(FamilyInstance),
    Skipped { family: FamilyId, field: String, params: Vec<(String, String)>, reason: String },
}

impl GridEntry {
    pub fn label(&self) -> String {
        match self {
            GridEntry::Instance(i) => i.label(),
            GridEntry::Skipped { family, field, params, .. } => label(*family, field, params),
        }
    }

    pub fn instance(&self) -> Option<&FamilyInstance> {
        match self {
            GridEntry::Instance(i) => Some(i),
            GridEntry::Skipped { .. } => None,
        }
    }
}

/// Expands the grid field by field, parameters nested in schema order.
pub fn instantiate_grid(spec: &GridSpec, opts: &GridOptions) -> Result<Vec<GridEntry>> {
    let mut out = Vec::new();
    for field in &spec.fields {
        let ctx = parse_field(field)?;
        let mut calls = 0u64;
        let mut emit = |params: Params| -> Result<()> {
            if out.len() >= opts.max_entries {
                return Err(Error::Schema(format!("grid exceeds {} entries", opts.max_entries)));
            }
            let texts = || params.iter().map(|(k, v)| (k.to_string(), v.to_text(&ctx))).collect();
            let skip = |reason: String| GridEntry::Skipped {
                family: spec.family,
                field: field.clone(),
                params: texts(),
                reason,
            };
            if calls + ctx.order() > opts.max_calls_per_field {
                out.push(skip(format!("evaluator budget of {} calls per field exhausted", opts.max_calls_per_field)));
                return Ok(());
            }
            let entry = match build_lenient(spec.family, &ctx, params.clone()) {
                Ok(inst) => match inst.hypotheses.iter().find(|h| !h.satisfied) {
                    Some(h) => skip(format!("hypothesis unsatisfied: {}", h.name)),
                    None => {
                        calls += ctx.order();
                        GridEntry::Instance(inst)
                    }
                },
                Err(e) => skip(e.to_string()),
            };
            out.push(entry);
            Ok(())
        };
        expand(spec, &ctx, 0, &mut Vec::new(), opts, &mut emit)?;
    }
    Ok(out)
}

fn expand(
    spec: &GridSpec,
    ctx: &Arc<FieldCtx>,
    idx: usize,
    chosen: &mut Params,
    opts: &GridOptions,
    emit: &mut dyn FnMut(Params) -> Result<()>,
) -> Result<()> {
    let schema = spec.family.schema();
    if idx == schema.len() {
        return emit(chosen.clone());
    }
    let (name, kind) = schema[idx];
    let value = &spec.params[name];
    for v in resolve(ctx, name, kind, value, chosen, opts)? {
        chosen.push((name, v));
        expand(spec, ctx, idx + 1, chosen, opts, emit)?;
        chosen.pop();
    }
    Ok(())
}

fn resolve(
    ctx: &FieldCtx,
    name: &str,
    kind: ParamKind,
    value: &Value,
    chosen: &Params,
    opts: &GridOptions,
) -> Result<Vec<ParamValue>> {
    let Value::Array(items) = value else {
        return resolve_one(ctx, name, kind, value, chosen, opts);
    };
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for item in items {
        for v in resolve_one(ctx, name, kind, item, chosen, opts)? {
            if seen.insert(v.to_text(ctx)) {
                out.push(v);
            }
        }
    }
    Ok(out)
}

fn resolve_one(
    ctx: &FieldCtx,
    name: &str,
    kind: ParamKind,
    value: &Value,
    chosen: &Params,
    opts: &GridOptions,
) -> Result<Vec<ParamValue>> {
    let elems = |v: Vec<Elem>| Ok(v.into_iter().map(ParamValue::Elem).collect());
    let half = || -> Result<u32> {
        if ctx.n().is_multiple_of(2) {
            Ok(ctx.n() / 2)
        } else {
            Err(Error::Schema(format!("parameter `{name}`: keyword needs an even field degree")))
        }
    };
    let Value::String(s) = value else {
        return Ok(vec![parse_param(ctx, name, kind, value, opts.seed)?]);
    };
    match (kind, s.as_str()) {
        (ParamKind::Elem, "all") => elems(ctx.elements().collect()),
        (ParamKind::Elem, "nonzero") => elems(ctx.elements().skip(1).collect()),
        (ParamKind::Elem, "subfield") => elems(ctx.subfield_elements().to_vec()),
        (ParamKind::Elem, "subfield_nonzero") => elems(ctx.subfield_elements()[1..].to_vec()),
        (ParamKind::Elem, "sub_k") => elems(ctx.kernel_of_frob_plus_identity(half()?, Sign::Plus)),
        (ParamKind::Elem, "anti_k") => elems(ctx.kernel_of_frob_plus_identity(half()?, Sign::Minus)),
        (ParamKind::Elem, "anti_k_nonzero") => {
            elems(ctx.kernel_of_frob_plus_identity(half()?, Sign::Minus).into_iter().filter(|x| !x.is_zero()).collect())
        }
        (ParamKind::Elem, "anti_q") => elems(ctx.kernel_of_frob_plus_identity(1, Sign::Minus)),
        (ParamKind::Elem, "kernel_nonzero") => {
            let l = chosen.iter().find_map(|(k, v)| match (k, v) {
                (&"l", ParamValue::Lin(l)) => Some(l),
                _ => None,
            });
            let l =
                l.ok_or_else(|| Error::Schema(format!("parameter `{name}`: `kernel_nonzero` needs a preceding `l`")))?;
            elems(l.kernel(ctx).into_iter().filter(|x| !x.is_zero()).collect())
        }
        (ParamKind::Elem, s) if s.starts_with("sample:") => {
            let count: usize =
                s[7..].parse().map_err(|_| Error::Schema(format!("parameter `{name}`: bad sample size in `{s}`")))?;
            let order = ctx.order() as usize;
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            let mut idx = sample(&mut rng, order, count.min(order)).into_vec();
            idx.sort_unstable();
            elems(idx.into_iter().map(|i| ctx.elem_at(i as u64).expect("index below order")).collect())
        }
        (ParamKind::Lin, "subfield_all") => {
            all_subfield_linpolys(ctx).map(|v| v.into_iter().map(ParamValue::Lin).collect())
        }
        (ParamKind::Variant(all), "all") => Ok(all.iter().map(|v| ParamValue::Variant(v)).collect()),
        _ => Ok(vec![parse_param(ctx, name, kind, value, opts.seed)?]),
    }
}

const MAX_LINPOLY_ENUMERATION: u64 = 1 << 16;

/// Every coefficient vector over `F_q`, `a_0` varying slowest.
pub fn all_subfield_linpolys(ctx: &FieldCtx) -> Result<Vec<LinPoly>> {
    let sub = ctx.subfield_elements();
    let n = ctx.n() as usize;
    let count = (sub.len() as u64).checked_pow(n as u32).filter(|&c| c <= MAX_LINPOLY_ENUMERATION);
    let count =
        count.ok_or_else(|| Error::Schema(format!("more than {MAX_LINPOLY_ENUMERATION} q-polynomials over F_q")))?;
    let q = sub.len() as u64;
    (0..count)
        .map(|mut i| {
            let mut a = vec![ctx.zero(); n];
            for slot in a.iter_mut().rev() {
                *slot = sub[(i % q) as usize];
                i /= q;
            }
            LinPoly::new(ctx, a)
        })
        .collect()
}

/// The grids that drive the acceptance suite, one per family.
pub fn default_grid(family: FamilyId) -> GridSpec {
    let sym = |h: &str| {
        vec![
            json!({"kind": "trace_of_h", "h": h}),
            json!({"kind": "norm_power", "h": h, "s": 1}),
            json!({"kind": "m_sum", "h": h, "d": 2}),
            json!({"kind": "product", "left": {"kind": "trace_of_h", "h": h}, "right": {"kind": "norm_power", "h": h, "s": 1}}),
            json!({"kind": "sum", "left": {"kind": "trace_of_h", "h": h}, "right": {"kind": "norm_power", "h": h, "s": 2}}),
        ]
    };
    // w = 0;1 satisfies w^3 = -w in F_3[w]/(w^2+1)
    let anti = |h: &str| {
        vec![
            json!({"kind": "anti_m_sum", "h": h, "d": 1}),
            json!({"kind": "anti_sym2k", "h": h}),
            json!({"kind": "anti_m_sum", "h": h, "d": 2}),
            json!({"kind": "product", "left": {"kind": "trace_of_h", "h": h}, "right": {"kind": "anti_sym2k", "h": h}}),
            json!({"kind": "sum", "left": {"kind": "anti_sym2k", "h": h},
                   "right": {"kind": "a_scaled", "a": "0;1", "inner": {"kind": "norm_power", "h": h, "s": 1}}}),
        ]
    };
    // seed 1 draws a PP distinct from the named ones over both F_9 and F_25
    let four_l = json!(["identity", "frob", "trace", "random:1"]);
    let three_l = json!(["identity", "frob", "trace"]);
    let (fields, params): (&[&str], Value) = match family {
        FamilyId::Linearized => (&["3^1:3"], json!({"l": "subfield_all"})),
        FamilyId::AdditiveG => {
            let g: Vec<Value> = ["0,1", "0,0,1", "1,1"].iter().flat_map(|h| sym(h)).collect();
            (&["3^1:2", "5^1:2"], json!({"g": g, "l": four_l, "delta": "all"}))
        }
        FamilyId::EvenT => (&["3^1:2"], json!({"t": [0, 2, 4], "delta": "anti_k", "l": four_l})),
        FamilyId::TraceGamma => {
            (&["3^1:2"], json!({"t": [0, 2, 4], "delta": "anti_k", "beta": "sub_k", "gamma": [1, 2], "s": [0, 1]}))
        }
        FamilyId::AlphaBeta => (
            &["3^1:2", "5^1:2"],
            json!({"t": [1, 2, 3], "delta": "sub_k", "alpha": "anti_k", "beta": "anti_k", "l": four_l}),
        ),
        FamilyId::AlphaBetaGamma => (
            &["3^1:2", "5^1:2"],
            json!({"t": [1, 2, 3], "delta": "sub_k", "alpha": "anti_k", "beta": "anti_k", "gamma": "sub_k", "s": [0, 1]}),
        ),
        FamilyId::AntiG => {
            let g: Vec<Value> = ["0,1", "0,0,1"].iter().flat_map(|h| anti(h)).collect();
            (&["3^1:2"], json!({"g": g, "beta": "anti_q", "delta": "all", "l": three_l}))
        }
        FamilyId::N4k => (&["3^1:4"], json!({"variant": "all", "a": [1, 2], "delta": "all"})),
        FamilyId::Q6 => (
            &["2^1:6"],
            json!({"variant": "all", "h": ["0,1", "0,1,1"], "l": ["identity", "trace", "frob"], "delta": "sample:8"}),
        ),
        FamilyId::GenericL => (
            &["3^1:2"],
            json!({
                "l": "trace",
                "a": "kernel_nonzero",
                "h": [
                    {"kind": "trace_of_h", "h": "0,1"},
                    {"kind": "trace_of_h", "h": "0,0,1"},
                    {"kind": "norm_power", "h": "0,1", "s": 1},
                    {"kind": "product", "left": {"kind": "trace_of_h", "h": "0,1"}, "right": {"kind": "norm_power", "h": "1,1", "s": 1}},
                ],
                "l1": three_l,
                "delta": "all",
            }),
        ),
        FamilyId::HalfPower => (&["3^1:2", "5^1:2"], json!({"k": [1], "a": "nonzero", "b": "nonzero", "delta": "all"})),
    };
    GridSpec {
        schema_version: SCHEMA_VERSION,
        family,
        fields: fields.iter().map(|s| s.to_string()).collect(),
        params: params.as_object().expect("object literal").clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(family: FamilyId) -> (usize, usize) {
        let entries = instantiate_grid(&default_grid(family), &GridOptions::default()).unwrap();
        let inst = entries.iter().filter(|e| e.instance().is_some()).count();
        (inst, entries.len() - inst)
    }

    #[test]
    fn default_grids_parse_and_round_trip() {
        for f in FamilyId::ALL {
            let g = default_grid(f);
            let back = GridSpec::from_value(g.to_value()).unwrap();
            assert_eq!(back, g);
        }
    }

    #[test]
    fn grid_sizes() {
        assert_eq!(count(FamilyId::Linearized), (27, 0));
        assert_eq!(count(FamilyId::HalfPower), (8 * 8 * 9 + 24 * 24 * 25, 0));
        assert_eq!(count(FamilyId::TraceGamma), (108, 0));
        assert_eq!(count(FamilyId::N4k), (2 * 2 * 81, 0));
        assert_eq!(count(FamilyId::Q6), (3 * 2 * 3 * 8, 0));
        assert_eq!(count(FamilyId::GenericL), (2 * 4 * 3 * 9, 0));
    }

    #[test]
    fn empty_grid_is_empty() {
        let mut g = default_grid(FamilyId::HalfPower);
        g.fields.clear();
        assert!(instantiate_grid(&g, &GridOptions::default()).unwrap().is_empty());
        let mut g = default_grid(FamilyId::HalfPower);
        g.params.insert("a".into(), json!([]));
        assert!(instantiate_grid(&g, &GridOptions::default()).unwrap().is_empty());
    }

    #[test]
    fn budget_skips_are_tagged() {
        let opts = GridOptions { max_calls_per_field: 9 * 10, ..GridOptions::default() };
        let mut g = default_grid(FamilyId::HalfPower);
        g.fields.truncate(1);
        let entries = instantiate_grid(&g, &opts).unwrap();
        assert_eq!(entries.len(), 576);
        assert_eq!(entries.iter().filter(|e| e.instance().is_some()).count(), 10);
        assert!(matches!(&entries[10], GridEntry::Skipped { reason, .. } if reason.contains("budget")));
    }

    #[test]
    fn hypothesis_failures_become_skips() {
        let mut g = default_grid(FamilyId::EvenT);
        g.params.insert("t".into(), json!([1, 2]));
        g.params.insert("delta".into(), json!("all"));
        let entries = instantiate_grid(&g, &GridOptions::default()).unwrap();
        let ok = entries.iter().filter(|e| e.instance().is_some()).count();
        // t = 2 with the three anti-symmetric deltas, four choices of L
        assert_eq!(ok, 3 * 4);
        assert!(entries.iter().all(|e| match e {
            GridEntry::Skipped { reason, .. } => reason.starts_with("hypothesis unsatisfied"),
            GridEntry::Instance(_) => true,
        }));
    }

    #[test]
    fn sample_is_seeded_and_sorted() {
        let ctx = parse_field("2^1:6").unwrap();
        let pick = |seed| {
            resolve_one(
                &ctx,
                "delta",
                ParamKind::Elem,
                &json!("sample:8"),
                &Vec::new(),
                &GridOptions { seed, ..GridOptions::default() },
            )
            .unwrap()
        };
        let a = pick(0);
        assert_eq!(a.len(), 8);
        assert_eq!(a, pick(0));
        assert_ne!(a, pick(1));
        let idx: Vec<u64> = a
            .iter()
            .map(|v| match v {
                ParamValue::Elem(x) => x.index(),
                _ => unreachable!(),
            })
            .collect();
        assert!(idx.windows(2).all(|w| w[0] < w[1]));
    }
}

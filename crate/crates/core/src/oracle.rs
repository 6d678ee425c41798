//! Exhaustive bijection checks over a whole field.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::{FamilyInstance, InstanceSpec};
use crate::gf::{Elem, FieldCtx};

/// Default upper bound on the field order accepted by a scan.
pub const DEFAULT_CAP: u64 = 1 << 20;

/// Image tables are computed in parallel from this field order upward.
const PARALLEL_FROM: u64 = 1 << 14;

/// Cycle lengths of a permutation as `length -> multiplicity`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct CycleType(pub BTreeMap<usize, usize>);

impl CycleType {
    /// Sum of all cycle lengths.
    pub fn total(&self) -> usize {
        self.0.iter().map(|(len, count)| len * count).sum()
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(len, count)| format!("{len}^{count}")).collect();
        f.write_str(&parts.join(" "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub bijective: bool,
    /// First `x2` in enumeration order whose image was already hit, with that earlier preimage.
    pub collision: Option<(Elem, Elem)>,
    /// First element in enumeration order without a preimage.
    pub missed: Option<Elem>,
    pub cycle_type: Option<CycleType>,
}

/// Images of every element, indexed by enumeration position.
pub fn image_table<F>(ctx: &FieldCtx, f: F) -> Vec<u32>
where
    F: Fn(Elem) -> Elem + Sync,
{
    let eval = |i: u64| {
        let x = ctx.elem_at(i).expect("index below order");
        f(x).index() as u32
    };
    if ctx.order() >= PARALLEL_FROM {
        (0..ctx.order()).into_par_iter().map(eval).collect()
    } else {
        (0..ctx.order()).map(eval).collect()
    }
}

fn cycles_of(table: &[u32]) -> CycleType {
    let mut seen = vec![false; table.len()];
    let mut out = BTreeMap::new();
    for start in 0..table.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut cur = start;
        while !seen[cur] {
            seen[cur] = true;
            cur = table[cur] as usize;
            len += 1;
        }
        *out.entry(len).or_insert(0) += 1;
    }
    CycleType(out)
}

fn verdict_from_table(ctx: &FieldCtx, table: &[u32]) -> Verdict {
    let elem = |i: usize| ctx.elem_at(i as u64).expect("index below order");
    let mut first = vec![u32::MAX; table.len()];
    let mut collision = None;
    for (x, &img) in table.iter().enumerate() {
        let slot = &mut first[img as usize];
        if *slot == u32::MAX {
            *slot = x as u32;
        } else if collision.is_none() {
            collision = Some((elem(*slot as usize), elem(x)));
        }
    }
    let missed = first.iter().position(|&v| v == u32::MAX).map(elem);
    let bijective = collision.is_none();
    debug_assert_eq!(bijective, missed.is_none());
    let cycle_type = bijective.then(|| {
        let mut counts = vec![0u32; table.len()];
        for &img in table {
            counts[img as usize] += 1;
        }
        assert!(counts.iter().all(|&c| c == 1), "presence table recount failed");
        cycles_of(table)
    });
    Verdict { bijective, collision, missed, cycle_type }
}

/// Checks whether `f` permutes the field.
pub fn check_bijective<F>(ctx: &FieldCtx, f: F, cap: u64) -> Result<Verdict>
where
    F: Fn(Elem) -> Elem + Sync,
{
    if ctx.order() > cap {
        return Err(Error::FieldTooLarge { order: ctx.order(), cap });
    }
    Ok(verdict_from_table(ctx, &image_table(ctx, f)))
}

/// Shorthand for [`check_bijective`] with the default cap.
pub fn is_bijective<F>(ctx: &FieldCtx, f: F) -> bool
where
    F: Fn(Elem) -> Elem + Sync,
{
    check_bijective(ctx, f, DEFAULT_CAP).expect("field within default cap").bijective
}

pub fn cycle_structure<F>(ctx: &FieldCtx, f: F, cap: u64) -> Result<CycleType>
where
    F: Fn(Elem) -> Elem + Sync,
{
    check_bijective(ctx, f, cap)?.cycle_type.ok_or(Error::NotBijective)
}

/// A theorem prediction set against the exhaustive verdict.
#[derive(Debug, Clone)]
pub struct Agreement {
    pub predicted: bool,
    pub observed: bool,
    pub agree: bool,
    pub verdict: Verdict,
    /// Present on disagreement.
    pub reproducer: Option<InstanceSpec>,
}

pub fn check_iff(instance: &FamilyInstance, cap: u64) -> Result<Agreement> {
    if let Some(h) = instance.hypotheses.iter().find(|h| !h.satisfied) {
        return Err(Error::HypothesisUnsatisfied(h.name.clone()));
    }
    let ctx = &instance.ctx;
    let verdict = check_bijective(ctx, |x| instance.eval(x), cap)?;
    let observed = verdict.bijective;
    let agree = observed == instance.predicted_pp;
    Ok(Agreement {
        predicted: instance.predicted_pp,
        observed,
        agree,
        verdict,
        reproducer: (!agree).then(|| instance.spec()),
    })
}

//! Concrete checks of the commutative-diagram permutation criterion.
//!
//! For surjections `ψ: A → S`, `ψ̄: A → S̄` with `|S| = |S̄|` and maps
//! `f: A → A`, `h: S → S̄` satisfying `ψ̄ ∘ f = h ∘ ψ`, the map `f` is
//! bijective exactly when `h` is bijective and `f` is injective on every
//! fiber `ψ^{-1}(s)`. Everything here works on explicit finite tables.

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::families::FamilyInstance;
use crate::gf::{Elem, FieldCtx};

/// Pairs beyond which additivity is sampled instead of checked exhaustively.
pub const EXHAUSTIVE_ADDITIVITY_MAX: usize = 256;
pub const SAMPLED_ADDITIVITY_PAIRS: usize = 10_000;

/// A map given by its table on an ordered domain.
#[derive(Debug, Clone)]
pub struct FiniteMap<T> {
    domain: Vec<T>,
    images: Vec<T>,
    index: HashMap<T, usize>,
}

impl<T: Copy + Eq + Hash + Debug> FiniteMap<T> {
    pub fn from_fn(domain: Vec<T>, f: impl Fn(T) -> T) -> Result<FiniteMap<T>> {
        let images = domain.iter().map(|&x| f(x)).collect();
        Self::from_table(domain, images)
    }

    pub fn from_table(domain: Vec<T>, images: Vec<T>) -> Result<FiniteMap<T>> {
        if domain.len() != images.len() {
            return Err(Error::BadParameter("domain and image tables differ in length".into()));
        }
        let mut index = HashMap::with_capacity(domain.len());
        for (i, &x) in domain.iter().enumerate() {
            if index.insert(x, i).is_some() {
                return Err(Error::BadParameter(format!("domain point {x:?} listed twice")));
            }
        }
        Ok(FiniteMap { domain, images, index })
    }

    pub fn domain(&self) -> &[T] {
        &self.domain
    }

    pub fn get(&self, x: T) -> Option<T> {
        self.index.get(&x).map(|&i| self.images[i])
    }

    fn at(&self, x: T) -> Result<T> {
        self.get(x).ok_or_else(|| Error::OutsideDomain(format!("{x:?}")))
    }

    /// Distinct images in first-seen order.
    pub fn image(&self) -> Vec<T> {
        let mut seen = HashMap::new();
        let mut out = Vec::new();
        for &y in &self.images {
            if seen.insert(y, ()).is_none() {
                out.push(y);
            }
        }
        out
    }

    /// First pair of domain points with equal images.
    pub fn first_collision(&self) -> Option<(T, T)> {
        let mut seen: HashMap<T, T> = HashMap::new();
        for (&x, &y) in self.domain.iter().zip(&self.images) {
            if let Some(&prev) = seen.get(&y) {
                return Some((prev, x));
            }
            seen.insert(y, x);
        }
        None
    }
}

fn same_set<T: Copy + Eq + Hash>(a: &[T], b: &[T]) -> bool {
    let sa: HashMap<T, ()> = a.iter().map(|&x| (x, ())).collect();
    let sb: HashMap<T, ()> = b.iter().map(|&x| (x, ())).collect();
    sa.len() == sb.len() && sa.keys().all(|k| sb.contains_key(k))
}

/// The data of the diagram `ψ̄ ∘ f = h ∘ ψ`.
#[derive(Debug, Clone)]
pub struct AgwInstance<T> {
    pub a: Vec<T>,
    pub s: Vec<T>,
    pub sbar: Vec<T>,
    pub psi: FiniteMap<T>,
    pub psibar: FiniteMap<T>,
    pub f: FiniteMap<T>,
    pub h: FiniteMap<T>,
}

impl<T: Copy + Eq + Hash + Debug> AgwInstance<T> {
    /// Validates cardinalities, surjectivity and commutativity. When `h` is
    /// omitted it is induced as `h(s) = ψ̄(f(a))` for `a ∈ ψ^{-1}(s)` and
    /// checked to be well defined on every fiber.
    pub fn new(
        s: Vec<T>,
        sbar: Vec<T>,
        psi: FiniteMap<T>,
        psibar: FiniteMap<T>,
        f: FiniteMap<T>,
        h: Option<FiniteMap<T>>,
    ) -> Result<AgwInstance<T>> {
        let a = psi.domain().to_vec();
        if s.len() != sbar.len() {
            return Err(Error::SizeMismatch { s: s.len(), sbar: sbar.len() });
        }
        if !same_set(psibar.domain(), &a) || !same_set(f.domain(), &a) {
            return Err(Error::BadParameter("psi, psibar and f must share the domain A".into()));
        }
        if !same_set(&psi.image(), &s) {
            return Err(Error::NotSurjective("S"));
        }
        if !same_set(&psibar.image(), &sbar) {
            return Err(Error::NotSurjective("S_bar"));
        }
        let h = match h {
            Some(h) => {
                for &x in &a {
                    let lhs = psibar.at(f.at(x)?)?;
                    if h.at(psi.at(x)?)? != lhs {
                        return Err(Error::NotCommuting(format!("{x:?}")));
                    }
                }
                h
            }
            None => {
                let mut induced: HashMap<T, T> = HashMap::new();
                for &x in &a {
                    let sx = psi.at(x)?;
                    let val = psibar.at(f.at(x)?)?;
                    match induced.get(&sx) {
                        Some(&prev) if prev != val => return Err(Error::NotCommuting(format!("{sx:?}"))),
                        _ => {
                            induced.insert(sx, val);
                        }
                    }
                }
                let images = s.iter().map(|p| induced[p]).collect();
                FiniteMap::from_table(s.clone(), images)?
            }
        };
        Ok(AgwInstance { a, s, sbar, psi, psibar, f, h })
    }

    /// Builds `S` and `S̄` as the images of `ψ` and `ψ̄`.
    pub fn from_fns(
        a: Vec<T>,
        psi: impl Fn(T) -> T,
        psibar: impl Fn(T) -> T,
        f: impl Fn(T) -> T,
        h: Option<&dyn Fn(T) -> T>,
    ) -> Result<AgwInstance<T>> {
        let psi = FiniteMap::from_fn(a.clone(), psi)?;
        let psibar = FiniteMap::from_fn(a.clone(), psibar)?;
        let f = FiniteMap::from_fn(a, f)?;
        let s = psi.image();
        let sbar = psibar.image();
        let h = match h {
            Some(h) => Some(FiniteMap::from_fn(s.clone(), h)?),
            None => None,
        };
        Self::new(s, sbar, psi, psibar, f, h)
    }

    /// The fibers `ψ^{-1}(s)` in the order of `S`.
    pub fn fibers(&self) -> Vec<(T, Vec<T>)> {
        let mut pos: HashMap<T, usize> = self.s.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let mut out: Vec<(T, Vec<T>)> = self.s.iter().map(|&s| (s, Vec::new())).collect();
        for &x in &self.a {
            let sx = self.psi.get(x).expect("validated domain");
            let i = *pos.entry(sx).or_insert(0);
            out[i].1.push(x);
        }
        out
    }
}

/// A fiber on which `f` fails to be injective.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberCollision<T> {
    pub s: T,
    pub x1: T,
    pub x2: T,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaReport<T> {
    pub f_bijective: bool,
    pub h_bijective: bool,
    pub fibers_injective: bool,
    pub f_collision: Option<(T, T)>,
    pub h_collision: Option<(T, T)>,
    pub fiber_collision: Option<FiberCollision<T>>,
    /// `f_bijective == (h_bijective && fibers_injective)`.
    pub equivalence_holds: bool,
}

fn injective_on_fibers<T: Copy + Eq + Hash + Debug>(
    inst: &AgwInstance<T>,
    map: impl Fn(T) -> T,
) -> Option<FiberCollision<T>> {
    for (s, fiber) in inst.fibers() {
        let mut seen: HashMap<T, T> = HashMap::new();
        for x in fiber {
            let y = map(x);
            if let Some(&prev) = seen.get(&y) {
                return Some(FiberCollision { s, x1: prev, x2: x });
            }
            seen.insert(y, x);
        }
    }
    None
}

fn bijective_onto<T: Copy + Eq + Hash + Debug>(m: &FiniteMap<T>, target: &[T]) -> (bool, Option<(T, T)>) {
    let collision = m.first_collision();
    let onto = collision.is_none() && m.domain().len() == target.len() && same_set(&m.image(), target);
    (onto, collision)
}

pub fn check_lemma<T: Copy + Eq + Hash + Debug>(inst: &AgwInstance<T>) -> LemmaReport<T> {
    let (f_bijective, f_collision) = bijective_onto(&inst.f, &inst.a);
    let (h_bijective, h_collision) = bijective_onto(&inst.h, &inst.sbar);
    let fiber_collision = injective_on_fibers(inst, |x| inst.f.get(x).expect("validated domain"));
    let fibers_injective = fiber_collision.is_none();
    LemmaReport {
        f_bijective,
        h_bijective,
        fibers_injective,
        f_collision,
        h_collision,
        fiber_collision,
        equivalence_holds: f_bijective == (h_bijective && fibers_injective),
    }
}

/// Verifies `ψ̄(x + y) = ψ̄(x) + ψ̄(y)`, exhaustively on small domains and
/// on a fixed pseudo-random sample otherwise. Returns the first failing pair.
pub fn check_additive(ctx: &FieldCtx, a: &[Elem], psibar: impl Fn(Elem) -> Elem) -> Option<(Elem, Elem)> {
    let holds = |x: Elem, y: Elem| psibar(ctx.add(x, y)) == ctx.add(psibar(x), psibar(y));
    if a.len() <= EXHAUSTIVE_ADDITIVITY_MAX {
        for &x in a {
            for &y in a {
                if !holds(x, y) {
                    return Some((x, y));
                }
            }
        }
        None
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        (0..SAMPLED_ADDITIVITY_PAIRS)
            .map(|_| (a[rng.random_range(0..a.len())], a[rng.random_range(0..a.len())]))
            .find(|&(x, y)| !holds(x, y))
    }
}

fn constant_on_fibers(a: &[Elem], psi: &dyn Fn(Elem) -> Elem, v: &dyn Fn(Elem) -> Elem) -> bool {
    let mut value: HashMap<Elem, Elem> = HashMap::new();
    a.iter().all(|&x| *value.entry(psi(x)).or_insert_with(|| v(x)) == v(x))
}

fn hypothesis(name: &str, ok: bool) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::HypothesisViolated(name.into()))
    }
}

fn diagram(
    a: &[Elem],
    psi: &dyn Fn(Elem) -> Elem,
    psibar: &dyn Fn(Elem) -> Elem,
    f: &dyn Fn(Elem) -> Elem,
    h: Option<&dyn Fn(Elem) -> Elem>,
) -> Result<AgwInstance<Elem>> {
    AgwInstance::from_fns(a.to_vec(), psi, psibar, f, h).map_err(|e| match e {
        Error::NotCommuting(at) => Error::HypothesisViolated(format!("diagram commutes (fails at {at})")),
        Error::SizeMismatch { .. } => Error::HypothesisViolated("|S| = |S_bar|".into()),
        other => other,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MainTheoremReport {
    pub sum_bijective: bool,
    pub u_bijective: bool,
    /// `sum_bijective == u_bijective`.
    pub equivalent: bool,
    pub lemma: LemmaReport<Elem>,
}

/// `f = u + v` permutes `A` iff `u` does, given `ψ̄` additive, `ψ̄ ∘ v = 0`,
/// `v` constant on the fibers of `ψ` and a commuting diagram for `u + v`.
pub fn check_main_theorem(
    ctx: &FieldCtx,
    a: &[Elem],
    psi: &dyn Fn(Elem) -> Elem,
    psibar: &dyn Fn(Elem) -> Elem,
    u: &dyn Fn(Elem) -> Elem,
    v: &dyn Fn(Elem) -> Elem,
    h: Option<&dyn Fn(Elem) -> Elem>,
) -> Result<MainTheoremReport> {
    hypothesis("psibar additive", check_additive(ctx, a, psibar).is_none())?;
    hypothesis("psibar(v) = 0", a.iter().all(|&x| psibar(v(x)).is_zero()))?;
    hypothesis("v constant on fibers", constant_on_fibers(a, psi, v))?;
    let sum = |x: Elem| ctx.add(u(x), v(x));
    let inst = diagram(a, psi, psibar, &sum, h)?;
    let lemma = check_lemma(&inst);
    let u_map = FiniteMap::from_fn(a.to_vec(), u)?;
    let (u_bijective, _) = bijective_onto(&u_map, a);
    Ok(MainTheoremReport {
        sum_bijective: lemma.f_bijective,
        u_bijective,
        equivalent: lemma.f_bijective == u_bijective,
        lemma,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorizationReport {
    pub p_bijective: bool,
    pub f_bijective: bool,
    pub h_bijective: bool,
    pub fibers_injective: bool,
    /// Bijectivity of `s ↦ h(s) + ψ̄(g(s))`, the map induced by `p`.
    pub shifted_h_bijective: bool,
    /// `p_bijective == (shifted_h_bijective && fibers_injective)`.
    pub equivalent: bool,
    /// `p_bijective == (h_bijective && fibers_injective)`.
    pub unshifted_form_holds: bool,
    /// Set when `ψ̄ ∘ g ∘ ψ = 0`: whether `p_bijective == f_bijective`.
    pub kernel_case: Option<bool>,
}

/// `p(x) = f(x) + g(ψ(x))` against the diagram of `f`.
pub fn check_additive_factorization(
    ctx: &FieldCtx,
    a: &[Elem],
    psi: &dyn Fn(Elem) -> Elem,
    psibar: &dyn Fn(Elem) -> Elem,
    f: &dyn Fn(Elem) -> Elem,
    g_of_s: &dyn Fn(Elem) -> Elem,
    h: Option<&dyn Fn(Elem) -> Elem>,
) -> Result<FactorizationReport> {
    hypothesis("psibar additive", check_additive(ctx, a, psibar).is_none())?;
    let inst = diagram(a, psi, psibar, f, h)?;
    let lemma = check_lemma(&inst);
    let p = FiniteMap::from_fn(a.to_vec(), |x| ctx.add(f(x), g_of_s(psi(x))))?;
    let (p_bijective, _) = bijective_onto(&p, a);
    let shifted =
        FiniteMap::from_fn(inst.s.clone(), |s| ctx.add(inst.h.get(s).expect("h defined on S"), psibar(g_of_s(s))))?;
    let (shifted_h_bijective, _) = bijective_onto(&shifted, &inst.sbar);
    let kernel = a.iter().all(|&x| psibar(g_of_s(psi(x))).is_zero());
    Ok(FactorizationReport {
        p_bijective,
        f_bijective: lemma.f_bijective,
        h_bijective: lemma.h_bijective,
        fibers_injective: lemma.fibers_injective,
        shifted_h_bijective,
        equivalent: p_bijective == (shifted_h_bijective && lemma.fibers_injective),
        unshifted_form_holds: p_bijective == (lemma.h_bijective && lemma.fibers_injective),
        kernel_case: kernel.then_some(p_bijective == lemma.f_bijective),
    })
}

/// The lemma (and, when the family splits as `u + v`, the main theorem)
/// evaluated on a family's own diagram with `h` induced from `f`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceReport {
    pub diagram: &'static str,
    pub s_size: usize,
    pub lemma: LemmaReport<Elem>,
    pub main_theorem: Option<MainTheoremReport>,
    /// The lemma's verdict on `f` matches the instance's prediction.
    pub matches_prediction: bool,
}

impl InstanceReport {
    /// No counterexample to any checked statement.
    pub fn holds(&self) -> bool {
        self.lemma.equivalence_holds && self.main_theorem.as_ref().is_none_or(|m| m.equivalent)
    }
}

pub fn check_instance(inst: &FamilyInstance) -> Result<InstanceReport> {
    let ctx = &inst.ctx;
    let a: Vec<Elem> = ctx.elements().collect();
    let d = &inst.diagram;
    let (psi, psibar) = (&*d.psi, &*d.psibar);
    let f = |x: Elem| inst.eval(x);
    let agw = diagram(&a, psi, psibar, &f, None)?;
    let lemma = check_lemma(&agw);
    let main_theorem = match &d.split {
        Some((u, v)) => Some(check_main_theorem(ctx, &a, psi, psibar, &**u, &**v, None)?),
        None => None,
    };
    Ok(InstanceReport {
        diagram: d.name,
        s_size: agw.s.len(),
        matches_prediction: lemma.f_bijective == inst.predicted_pp,
        lemma,
        main_theorem,
    })
}

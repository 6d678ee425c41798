use std::sync::Arc;

use ppforge::agw::check_instance;
use ppforge::families::recipe::{contract_counterexample, Contract};
use ppforge::families::{
    self, build_lenient, default_grid, instantiate_grid, FamilyId, FamilyInstance, GRecipe, GridOptions, N4kVariant,
    ParamValue, Q6Variant,
};
use ppforge::oracle::{check_bijective, check_iff, DEFAULT_CAP};
use ppforge::{make_field, Elem, Error, FieldCtx, LinPoly, Poly};

fn f9() -> Arc<FieldCtx> {
    make_field(3, 1, 2, None).unwrap()
}

/// `w` with `w^2 = -1`, so `w^3 = -w`.
fn w(k: &FieldCtx) -> Elem {
    k.parse_elem("0;1").unwrap()
}

fn agrees(inst: &FamilyInstance) -> bool {
    let a = check_iff(inst, DEFAULT_CAP).unwrap();
    assert!(a.agree, "{}: predicted {}, observed {}", inst.label(), a.predicted, a.observed);
    a.observed
}

fn recipe(v: serde_json::Value) -> GRecipe {
    serde_json::from_value(v).unwrap()
}

#[test]
fn additive_g_examples() {
    let k = f9();
    let g = recipe(serde_json::json!({"kind": "trace_of_h", "h": "0,0,1"}));
    let delta = k.generator();
    let pp = families::additive_g(&k, &g, &LinPoly::frobenius(&k, 1), delta).unwrap();
    assert!(pp.predicted_pp && agrees(&pp));
    let not = families::additive_g(&k, &g, &LinPoly::trace(&k), delta).unwrap();
    assert!(!not.predicted_pp && !agrees(&not));
}

#[test]
fn m_sum_at_n4() {
    let k = make_field(3, 1, 4, None).unwrap();
    for h in ["0,1", "0,0,1", "1,1"] {
        let g = recipe(serde_json::json!({"kind": "m_sum", "h": h, "d": 2}));
        let f = g.build(&k).unwrap();
        assert_eq!(contract_counterexample(&k, &f, Contract::Symmetric), None);
        for l in [LinPoly::identity(&k), LinPoly::trace(&k)] {
            for delta in k.elements().step_by(7) {
                agrees(&families::additive_g(&k, &g, &l, delta).unwrap());
            }
        }
    }
    // no proper divisor structure at n = 2
    assert_eq!(
        recipe(serde_json::json!({"kind": "m_sum", "h": "0,1", "d": 2})).build(&f9()).err().unwrap(),
        Error::BadDivisor { d: 2, n: 2 }
    );
}

#[test]
fn even_t_examples() {
    let k = f9();
    let delta = w(&k);
    let pp = families::even_t(&k, 2, delta, &LinPoly::identity(&k)).unwrap();
    assert!(pp.predicted_pp && agrees(&pp));
    let not = families::even_t(&k, 2, delta, &LinPoly::trace(&k)).unwrap();
    assert!(!not.predicted_pp && !agrees(&not));
    assert_eq!(families::even_t(&k, 3, delta, &LinPoly::identity(&k)).unwrap_err(), Error::OddT(3));
    assert!(families::even_t(&k, -2, delta, &LinPoly::identity(&k)).is_err());
    assert!(families::even_t(&k, 0, delta, &LinPoly::identity(&k)).is_ok());
}

#[test]
fn trace_gamma_both_sides() {
    let k = f9();
    let (one, two) = (k.from_prime(1), k.from_prime(2));
    let pp = families::trace_gamma(&k, 2, w(&k), k.zero(), one, 1).unwrap();
    assert!(pp.predicted_pp && agrees(&pp));
    // Tr(β) = 2β over F_9, so β = 1, γ = 1 sits on the boundary
    let not = families::trace_gamma(&k, 2, w(&k), one, one, 1).unwrap();
    assert!(!not.predicted_pp && !agrees(&not));
    let not = families::trace_gamma(&k, 0, w(&k), two, two, 0).unwrap();
    assert!(!not.predicted_pp && !agrees(&not));
    assert_eq!(families::trace_gamma(&k, 2, w(&k), one, k.zero(), 1).unwrap_err(), Error::GammaZero);
}

#[test]
fn alpha_beta_examples() {
    let k = f9();
    let pp = families::alpha_beta(&k, 1, k.zero(), w(&k), k.zero(), &LinPoly::identity(&k)).unwrap();
    assert!(pp.predicted_pp && agrees(&pp));
    let not = families::alpha_beta(&k, 1, k.one(), w(&k), w(&k), &LinPoly::trace(&k)).unwrap();
    assert!(!not.predicted_pp && !agrees(&not));
    assert_eq!(
        families::alpha_beta(&k, 1, k.zero(), k.one(), k.zero(), &LinPoly::identity(&k)).unwrap_err(),
        Error::BadAlphaBeta
    );
    let two = k.from_prime(2);
    let g = families::alpha_beta_gamma(&k, 2, k.one(), w(&k), w(&k), two, 1).unwrap();
    assert!(g.predicted_pp && agrees(&g));
    let z = families::alpha_beta_gamma(&k, 2, k.one(), w(&k), w(&k), k.zero(), 1).unwrap();
    assert!(!z.predicted_pp && !agrees(&z));
}

#[test]
fn anti_g_examples() {
    let k = f9();
    let g = recipe(serde_json::json!({"kind": "anti_sym2k", "h": "0,0,1"}));
    assert_eq!(contract_counterexample(&k, &g.build(&k).unwrap(), Contract::Anti), None);
    let pp = families::anti_g(&k, &g, w(&k), k.one(), &LinPoly::frobenius(&k, 1)).unwrap();
    assert!(pp.predicted_pp && agrees(&pp));
    let not = families::anti_g(&k, &g, w(&k), k.one(), &LinPoly::trace(&k)).unwrap();
    assert!(!not.predicted_pp && !agrees(&not));
    // a symmetric recipe breaks the contract
    let sym = recipe(serde_json::json!({"kind": "trace_of_h", "h": "0,1"}));
    assert!(families::anti_g(&k, &sym, w(&k), k.one(), &LinPoly::identity(&k)).is_err());
    let f4 = make_field(2, 1, 2, None).unwrap();
    assert!(families::anti_g(&f4, &g, f4.zero(), f4.zero(), &LinPoly::identity(&f4)).is_err());
}

#[test]
fn n4k_examples() {
    let k = make_field(3, 1, 4, None).unwrap();
    let a = k.one();
    let on = k.elements().find(|&d| k.trace(d) == a).unwrap();
    let inst = families::n4k(&k, N4kVariant::Plain, a, on).unwrap();
    assert!(!inst.predicted_pp);
    let v = check_bijective(&k, |x| inst.eval(x), DEFAULT_CAP).unwrap();
    assert!(!v.bijective && v.collision.is_some());
    let inst = families::n4k(&k, N4kVariant::Plain, a, k.zero()).unwrap();
    assert!(inst.predicted_pp && agrees(&inst));
    let neg = k.elements().find(|&d| k.trace(d) == k.neg(a)).unwrap();
    let tw = families::n4k(&k, N4kVariant::QTwist, a, neg).unwrap();
    assert!(!tw.predicted_pp && !agrees(&tw));
    assert!(families::n4k(&f9(), N4kVariant::Plain, k.one(), k.zero()).is_err());
}

/// Raising the twisted sum to `q` once more reproduces the plain map.
#[test]
fn n4k_literal_outer_power_is_the_plain_map() {
    let k = make_field(3, 1, 4, None).unwrap();
    let a = k.from_prime(2);
    for delta in k.elements().step_by(5) {
        let plain = families::n4k(&k, N4kVariant::Plain, a, delta).unwrap();
        let tw = families::n4k(&k, N4kVariant::QTwist, a, delta).unwrap();
        for x in k.elements() {
            let ax = k.mul(a, x);
            let twisted_g = k.sub(tw.eval(x), ax);
            assert_eq!(k.add(k.frobenius(twisted_g, 1), ax), plain.eval(x));
        }
    }
}

#[test]
fn q6_examples() {
    let k = make_field(2, 1, 6, None).unwrap();
    let h = Poly::x(&k);
    let pp = families::q6(&k, Q6Variant::Minus, &h, &LinPoly::identity(&k), k.generator()).unwrap();
    assert!(pp.predicted_pp && agrees(&pp));
    let not = families::q6(&k, Q6Variant::Minus, &h, &LinPoly::trace(&k), k.generator()).unwrap();
    assert!(!not.predicted_pp && !agrees(&not));
    // −1 = 1 in characteristic 2: all three forms are the same map
    let h2 = ppforge::poly::parse_poly(&k, "0,1,1").unwrap();
    let l = LinPoly::frobenius(&k, 1);
    let maps: Vec<FamilyInstance> = [Q6Variant::Minus, Q6Variant::Plus, Q6Variant::PlusUniform]
        .into_iter()
        .map(|v| families::q6(&k, v, &h2, &l, k.one()).unwrap())
        .collect();
    assert!(k.elements().all(|x| maps[0].eval(x) == maps[1].eval(x) && maps[1].eval(x) == maps[2].eval(x)));
}

#[test]
fn q6_printed_plus_breaks_at_odd_q() {
    let k = make_field(3, 1, 6, None).unwrap();
    let h = Poly::x(&k);
    let delta = k.generator();
    let printed = families::q6(&k, Q6Variant::Plus, &h, &LinPoly::identity(&k), delta).unwrap();
    assert!(matches!(check_instance(&printed), Err(Error::HypothesisViolated(_))));
    let uniform = families::q6(&k, Q6Variant::PlusUniform, &h, &LinPoly::identity(&k), delta).unwrap();
    let r = check_instance(&uniform).unwrap();
    assert!(r.holds() && r.matches_prediction);
    assert!(agrees(&uniform));
}

#[test]
fn generic_l_examples() {
    let k = f9();
    let l = LinPoly::trace(&k);
    let a = w(&k);
    assert!(l.apply(&k, a).is_zero());
    let h = recipe(serde_json::json!({"kind": "trace_of_h", "h": "0,0,1"}));
    let pp = families::generic_l(&k, &l, a, &h, &LinPoly::identity(&k), k.one()).unwrap();
    assert!(pp.predicted_pp && agrees(&pp));
    let not = families::generic_l(&k, &l, a, &h, &LinPoly::trace(&k), k.one()).unwrap();
    assert!(!not.predicted_pp && !agrees(&not));
    assert!(families::generic_l(&k, &LinPoly::identity(&k), a, &h, &LinPoly::identity(&k), k.one()).is_err());
    assert!(families::generic_l(&k, &l, k.one(), &h, &LinPoly::identity(&k), k.one()).is_err());
}

#[test]
fn half_power_examples() {
    let k = f9();
    let one = k.one();
    let pp = families::half_power(&k, 1, one, one, k.zero()).unwrap();
    assert!(pp.predicted_pp && agrees(&pp));
    let g = k.generator();
    let not = families::half_power(&k, 1, one, g, k.zero()).unwrap();
    assert!(!not.predicted_pp);
    let v = check_bijective(&k, |x| not.eval(x), DEFAULT_CAP).unwrap();
    // some value is hit twice and another is never hit
    assert!(!v.bijective && v.collision.is_some() && v.missed.is_some());
    for (a, b) in [(one, one), (one, g), (g, g), (k.from_prime(2), g)] {
        let verdicts: Vec<bool> = k
            .elements()
            .map(|d| check_iff(&families::half_power(&k, 1, a, b, d).unwrap(), DEFAULT_CAP).unwrap().observed)
            .collect();
        assert!(verdicts.iter().all(|&v| v == verdicts[0]));
    }
    assert!(matches!(families::half_power(&k, 0, one, one, k.zero()), Err(Error::BadParameter(_))));
    assert_eq!(families::half_power(&k, 1, k.zero(), one, k.zero()).unwrap_err(), Error::ZeroCoefficient);
}

#[test]
fn violated_hypothesis_is_reported_by_check_iff() {
    let k = f9();
    let params = vec![
        ("t", ParamValue::Int(3)),
        ("delta", ParamValue::Elem(w(&k))),
        ("l", ParamValue::Lin(LinPoly::identity(&k))),
    ];
    let inst = build_lenient(FamilyId::EvenT, &k, params).unwrap();
    assert!(matches!(check_iff(&inst, DEFAULT_CAP), Err(Error::HypothesisUnsatisfied(_))));
    let id = families::linearized(&k, &LinPoly::identity(&k)).unwrap();
    let a = check_iff(&id, DEFAULT_CAP).unwrap();
    assert!(a.predicted && a.observed && a.agree && a.reproducer.is_none());
}

#[test]
fn symmetric_recipes_hold_their_contract() {
    for field in ["3^1:2", "5^1:2"] {
        let k: Arc<FieldCtx> = field.parse::<ppforge::FieldSpec>().unwrap().build().unwrap();
        for g in default_grid(FamilyId::AdditiveG).params["g"].as_array().unwrap() {
            let g = recipe(g.clone());
            if let Ok(f) = g.compile(&k) {
                assert_eq!(contract_counterexample(&k, &f, Contract::Symmetric), None, "{g} over {field}");
            }
        }
    }
}

/// The fiber-constancy hypothesis of the main theorem holds on every
/// additive instance (the check raises otherwise).
#[test]
fn additive_splits_satisfy_the_main_theorem() {
    for family in [FamilyId::AdditiveG, FamilyId::EvenT, FamilyId::AlphaBeta, FamilyId::GenericL] {
        let mut grid = default_grid(family);
        grid.fields.truncate(1);
        for e in instantiate_grid(&grid, &GridOptions::default()).unwrap().iter().step_by(11) {
            let Some(inst) = e.instance() else { continue };
            let r = check_instance(inst).unwrap();
            let m = r.main_theorem.clone().expect("additive families split");
            assert!(m.equivalent && r.holds(), "{}", inst.label());
            assert_eq!(m.u_bijective, inst.predicted_pp, "{}", inst.label());
        }
    }
}

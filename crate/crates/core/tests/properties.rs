use std::sync::Arc;

use proptest::prelude::*;

use ppforge::families::{self, InstanceSpec};
use ppforge::linearized::random_linearized_pp;
use ppforge::oracle::{check_bijective, DEFAULT_CAP};
use ppforge::{make_field, Elem, FieldCtx, LinPoly, Poly};

const FIELDS: [(u64, u32, u32); 6] = [(2, 1, 3), (2, 2, 2), (3, 1, 2), (3, 1, 4), (5, 1, 2), (7, 1, 1)];

fn field() -> impl Strategy<Value = Arc<FieldCtx>> {
    (0..FIELDS.len()).prop_map(|i| {
        let (p, e, n) = FIELDS[i];
        make_field(p, e, n, None).unwrap()
    })
}

fn elem(k: &FieldCtx, i: u64) -> Elem {
    k.elem_at(i % k.order()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn field_axioms(k in field(), a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (x, y, z) = (elem(&k, a), elem(&k, b), elem(&k, c));
        prop_assert_eq!(k.add(x, y), k.add(y, x));
        prop_assert_eq!(k.mul(x, y), k.mul(y, x));
        prop_assert_eq!(k.mul(k.mul(x, y), z), k.mul(x, k.mul(y, z)));
        prop_assert_eq!(k.mul(x, k.add(y, z)), k.add(k.mul(x, y), k.mul(x, z)));
        prop_assert_eq!(k.mul(x, y), k.mul_schoolbook(x, y));
        prop_assert_eq!(k.add(x, k.neg(x)), k.zero());
        if !x.is_zero() {
            prop_assert_eq!(k.mul(x, k.inv(x).unwrap()), k.one());
        }
        prop_assert_eq!(k.pow(x, k.order()), x);
    }

    #[test]
    fn frobenius_is_a_field_automorphism(k in field(), a in any::<u64>(), b in any::<u64>(), j in 0u64..8) {
        let (x, y) = (elem(&k, a), elem(&k, b));
        prop_assert_eq!(k.frobenius(k.add(x, y), j), k.add(k.frobenius(x, j), k.frobenius(y, j)));
        prop_assert_eq!(k.frobenius(k.mul(x, y), j), k.mul(k.frobenius(x, j), k.frobenius(y, j)));
        prop_assert_eq!(k.frobenius(x, j), k.frobenius_by_pow(x, j));
        prop_assert!(k.in_subfield(k.trace(x)));
        prop_assert!(k.in_subfield(k.norm(x)));
    }

    #[test]
    fn elem_text_round_trips(k in field(), a in any::<u64>()) {
        let x = elem(&k, a);
        prop_assert_eq!(k.parse_elem(&k.format_elem(x)).unwrap(), x);
    }

    #[test]
    fn euclidean_division(k in field(), f in prop::collection::vec(any::<u64>(), 0..8), g in prop::collection::vec(any::<u64>(), 1..5)) {
        let f = Poly::from_coeffs(&k, f.iter().map(|&i| elem(&k, i)).collect()).unwrap();
        let g = Poly::from_coeffs(&k, g.iter().map(|&i| elem(&k, i)).collect()).unwrap();
        prop_assume!(!g.is_zero());
        let (q, r) = f.div_rem(&g, &k).unwrap();
        prop_assert_eq!(q.mul(&g, &k).unwrap().add(&r, &k).unwrap(), f);
        prop_assert!(r.is_zero() || r.degree() < g.degree());
    }

    #[test]
    fn q_polynomials_are_additive(k in field(), coeffs in prop::collection::vec(any::<u64>(), 1..5), a in any::<u64>(), b in any::<u64>()) {
        let l = LinPoly::new(&k, coeffs.iter().take(k.n() as usize).map(|&i| elem(&k, i)).collect()).unwrap();
        let (x, y) = (elem(&k, a), elem(&k, b));
        prop_assert_eq!(l.apply(&k, k.add(x, y)), k.add(l.apply(&k, x), l.apply(&k, y)));
    }

    /// The circulant criterion on arbitrary coefficients, and the gcd
    /// criterion on subfield coefficients, both match the oracle.
    #[test]
    fn criteria_match_the_oracle(k in field(), coeffs in prop::collection::vec(any::<u64>(), 1..5), subfield in any::<bool>()) {
        let sub = k.subfield_elements().to_vec();
        let a: Vec<Elem> = coeffs
            .iter()
            .take(k.n() as usize)
            .map(|&i| if subfield { sub[(i % sub.len() as u64) as usize] } else { elem(&k, i) })
            .collect();
        let l = LinPoly::new(&k, a).unwrap();
        let oracle = check_bijective(&k, |x| l.apply(&k, x), DEFAULT_CAP).unwrap().bijective;
        prop_assert_eq!(l.circulant_det_is_nonzero(&k), oracle);
        if l.is_subfield() {
            prop_assert_eq!(l.gcd_criterion_is_pp(&k).unwrap(), oracle);
        }
    }

    #[test]
    fn random_pp_is_a_permutation(k in field(), seed in any::<u64>()) {
        let l = random_linearized_pp(&k, seed);
        prop_assert!(l.gcd_criterion_is_pp(&k).unwrap());
        prop_assert!(check_bijective(&k, |x| l.apply(&k, x), DEFAULT_CAP).unwrap().bijective);
        prop_assert_eq!(random_linearized_pp(&k, seed), l);
    }

    #[test]
    fn verdict_invariants(k in field(), scale in any::<u64>(), shift in any::<u64>()) {
        let c = elem(&k, scale);
        let d = elem(&k, shift);
        let f = |x: Elem| k.add(k.mul(c, x), d);
        let v = check_bijective(&k, f, DEFAULT_CAP).unwrap();
        prop_assert_eq!(v.bijective, !c.is_zero());
        prop_assert_eq!(v.bijective, v.collision.is_none());
        prop_assert_eq!(v.bijective, v.missed.is_none());
        if let Some(ct) = &v.cycle_type {
            prop_assert_eq!(ct.total() as u64, k.order());
        }
        if let Some((x1, x2)) = v.collision {
            prop_assert!(x1.index() < x2.index());
            prop_assert_eq!(f(x1), f(x2));
        }
        prop_assert_eq!(check_bijective(&k, f, DEFAULT_CAP).unwrap(), v);
    }

    #[test]
    fn half_power_specs_round_trip(a in 1u64..25, b in 1u64..25, d in 0u64..25) {
        let k = make_field(5, 1, 2, None).unwrap();
        let inst = families::half_power(&k, 1, elem(&k, a), elem(&k, b), elem(&k, d)).unwrap();
        let text = serde_json::to_string(&inst.spec()).unwrap();
        let back = InstanceSpec::parse(&text).unwrap().instantiate(0).unwrap();
        prop_assert_eq!(back.label(), inst.label());
        prop_assert_eq!(back.predicted_pp, inst.predicted_pp);
    }
}

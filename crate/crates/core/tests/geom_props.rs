use dirac_quant::exactalg::{rat, Expr, Poly, Scalar, Var};
use dirac_quant::geom::MixedMultivector;
use proptest::prelude::*;

const M: usize = 3;
const K: usize = 2;

fn coeff_strategy() -> impl Strategy<Value = Poly> {
    let vars = [Var::X(1), Var::X(2), Var::X(3), Var::B(1), Var::B(2)];
    prop::collection::vec((-3i64..=3, prop::collection::vec(0usize..5, 0..3)), 1..3).prop_map(move |ts| {
        let mut p = Poly::zero();
        for (c, vs) in ts {
            let mut t = Poly::constant(rat(c));
            for v in vs {
                t = &t * &Poly::var(vars[v]);
            }
            p = &p + &t;
        }
        p
    })
}

/// Homogeneous element of bidegree (p, q).
fn element(p: usize, q: usize) -> impl Strategy<Value = MixedMultivector> {
    prop::collection::vec(
        (coeff_strategy(), prop::sample::subsequence(vec![1, 2, 3], p), prop::sample::subsequence(vec![1, 2], q)),
        1..3,
    )
    .prop_map(|ts| {
        let mut out = MixedMultivector::zero(M, K, 0);
        for (c, tm, db) in ts {
            let t = MixedMultivector::term(M, K, Scalar::from_expr(Expr::from(c), 0), &tm, &db).unwrap();
            out = out.add(&t).unwrap();
        }
        out
    })
}

fn any_element() -> impl Strategy<Value = (MixedMultivector, i32)> {
    (0usize..=3, 0usize..=2).prop_flat_map(|(p, q)| element(p, q).prop_map(move |e| (e, p as i32 - 1 + q as i32)))
}

fn sign(n: i32) -> i32 {
    if n.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

fn sc(e: &MixedMultivector, s: i32) -> MixedMultivector {
    if s > 0 {
        e.clone()
    } else {
        e.neg()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn graded_antisymmetry((a, da) in any_element(), (b, db) in any_element()) {
        let lhs = a.schouten(&b).unwrap();
        let rhs = sc(&b.schouten(&a).unwrap(), -sign(da * db));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn graded_jacobi((a, da) in any_element(), (b, db) in any_element(), (c, _) in any_element()) {
        let lhs = a.schouten(&b.schouten(&c).unwrap()).unwrap();
        let r1 = a.schouten(&b).unwrap().schouten(&c).unwrap();
        let r2 = sc(&b.schouten(&a.schouten(&c).unwrap()).unwrap(), sign(da * db));
        prop_assert_eq!(lhs, r1.add(&r2).unwrap());
    }

    #[test]
    fn differential_squares_to_zero((a, _) in any_element()) {
        prop_assert!(a.d_b().d_b().is_zero());
    }

    #[test]
    fn differential_is_a_derivation((a, da) in any_element(), (b, _) in any_element()) {
        let lhs = a.schouten(&b).unwrap().d_b();
        let rhs = a.d_b().schouten(&b).unwrap().add(&sc(&a.schouten(&b.d_b()).unwrap(), sign(da))).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn wedge_is_associative((a, _) in any_element(), (b, _) in any_element(), (c, _) in any_element()) {
        let l = a.wedge(&b).unwrap().wedge(&c).unwrap();
        let r = a.wedge(&b.wedge(&c).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }
}

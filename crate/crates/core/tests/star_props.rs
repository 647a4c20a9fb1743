use dirac_quant::exactalg::{rat, Expr, Monomial, Poly, Scalar, Var};
use dirac_quant::star::PolyDiffOp;
use proptest::prelude::*;

fn coeff() -> impl Strategy<Value = Scalar> {
    prop::collection::vec((-2i64..=2, 0u32..=2, 0u32..=1), 1..3).prop_map(|ts| {
        let mut p = Poly::zero();
        for (c, e1, e2) in ts {
            let t = &(&Poly::constant(rat(c)) * &Poly::var(Var::X(1)).pow(e1)) * &Poly::var(Var::X(2)).pow(e2);
            p = &p + &t;
        }
        Scalar::from_expr(Expr::from(p), 0)
    })
}

fn multi_index() -> impl Strategy<Value = Monomial> {
    (0u32..=2, 0u32..=1).prop_filter("order <= 2", |(a, b)| a + b <= 2).prop_map(|(a, b)| {
        Monomial::var_pow(Var::X(1), a).mul(&Monomial::var_pow(Var::X(2), b))
    })
}

fn operator() -> impl Strategy<Value = (PolyDiffOp, i64)> {
    (0usize..=2).prop_flat_map(|arity| {
        prop::collection::vec((coeff(), prop::collection::vec(multi_index(), arity)), 1..3).prop_map(move |ts| {
            let mut p = PolyDiffOp::zero(arity, 0);
            for (c, slots) in ts {
                p.add_term(slots, c);
            }
            (p, arity as i64 - 1)
        })
    })
}

fn signed(p: PolyDiffOp, n: i64) -> PolyDiffOp {
    if n.rem_euclid(2) == 0 {
        p
    } else {
        p.neg()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn graded_jacobi((p, dp) in operator(), (q, dq) in operator(), (r, dr) in operator()) {
        // brackets of two functions land in degree -2, which is zero
        prop_assume!(dp + dq >= -1 && dq + dr >= -1 && dp + dr >= -1);
        let lhs = p.gerstenhaber(&q.gerstenhaber(&r));
        let rhs = p.gerstenhaber(&q).gerstenhaber(&r).add(&signed(q.gerstenhaber(&p.gerstenhaber(&r)), dp * dq)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn graded_antisymmetry((p, dp) in operator(), (q, dq) in operator()) {
        prop_assert_eq!(p.gerstenhaber(&q), signed(q.gerstenhaber(&p), dp * dq + 1));
    }

    #[test]
    fn hochschild_squares_to_zero((p, _) in operator()) {
        prop_assert!(p.hochschild_d().hochschild_d().is_zero());
    }
}

#[test]
fn product_is_associative_as_cochain() {
    let m = PolyDiffOp::product(0);
    assert!(m.gerstenhaber(&m).is_zero());
}

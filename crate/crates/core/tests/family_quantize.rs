use dirac_quant::exactalg::{parse_scalar, Scalar, Var};
use dirac_quant::family::{mc4_check, quantize_family, QuantizeBounds};
use dirac_quant::geom::{HamiltonianFamily, MixedMultivector};
use dirac_quant::star::PolyDiffOp;
use dirac_quant::Error;

fn mv(m: usize, k: usize, o: usize, terms: &[(&str, &[usize], &[usize])]) -> MixedMultivector {
    let mut out = MixedMultivector::zero(m, k, o);
    for (c, tm, db) in terms {
        out = out.add(&MixedMultivector::term(m, k, parse_scalar(c, o).unwrap(), tm, db).unwrap()).unwrap();
    }
    out
}

fn quantize(sigma: MixedMultivector) -> dirac_quant::family::Quantized {
    let q = quantize_family(&HamiltonianFamily::new(sigma).unwrap(), None).unwrap();
    assert!(mc4_check(&q.family).all_zero());
    q
}

#[test]
fn cubic_hamiltonian_generator_gets_third_order_correction() {
    let q = quantize(mv(2, 1, 3, &[("h", &[1, 2], &[]), ("h*x1^2", &[2], &[1])]));
    assert_eq!(q.total_corrections(), 1);
    // ad⋆(x1³/3)/1 for Moyal: h x1²∂2 + (h³/12)∂2³
    let mut expect = PolyDiffOp::vector_field(&[(Var::X(2), parse_scalar("h*x1^2", 3).unwrap())], 3);
    expect.add_term(
        vec![dirac_quant::exactalg::Monomial::var_pow(Var::X(2), 3)],
        parse_scalar("h^3/12", 3).unwrap(),
    );
    assert_eq!(q.family.tau1[0], expect);
}

#[test]
fn curved_family_with_two_generators() {
    let q = quantize(mv(
        2,
        2,
        3,
        &[("h", &[1, 2], &[]), ("h*x1^2", &[2], &[1]), ("h*x2^2", &[1], &[2]), ("h*x1^2*x2^2", &[], &[1, 2])],
    ));
    assert_eq!(q.total_corrections(), 2);
}

#[test]
fn rational_function_family() {
    let q = quantize(mv(2, 1, 2, &[("h + h^2*b1/(1+b1)", &[1, 2], &[]), ("h*x1/(1+b1)^2", &[1], &[1])]));
    assert!(!q.family.is_polynomial());
}

#[test]
fn linear_poisson_families() {
    quantize(mv(3, 1, 2, &[("h*x3", &[1, 2], &[])]));
    quantize(mv(3, 0, 2, &[("h*x3", &[1, 2], &[]), ("h*x1", &[2, 3], &[]), ("h*x2", &[3, 1], &[])]));
}

#[test]
fn bounds_too_small_report_obstruction() {
    let sigma = mv(2, 1, 3, &[("h", &[1, 2], &[]), ("h*x1^2", &[2], &[1])]);
    let r = quantize_family(&HamiltonianFamily::new(sigma).unwrap(), Some(QuantizeBounds { degree: 2, order: 2 }));
    match r {
        Err(Error::Obstruction { at_order, .. }) => assert_eq!(at_order, 3),
        other => panic!("expected obstruction, got {other:?}"),
    }
}

#[test]
fn quantization_is_deterministic() {
    let sigma = mv(2, 1, 3, &[("h", &[1, 2], &[]), ("h*x1^2", &[2], &[1])]);
    let a = quantize(sigma.clone());
    let b = quantize(sigma);
    assert_eq!(a.family, b.family);
}

#[test]
fn first_order_commutator_is_the_poisson_bracket() {
    let q = quantize(mv(3, 0, 2, &[("h*x3", &[1, 2], &[]), ("h*x1", &[2, 3], &[]), ("h*x2", &[3, 1], &[])]));
    let star = q.family.star();
    let pi = mv(3, 0, 2, &[("h*x3", &[1, 2], &[]), ("h*x1", &[2, 3], &[]), ("h*x2", &[3, 1], &[])]);
    for i in 1..=3 {
        for j in 1..=3 {
            let (f, g) = (Scalar::var(Var::X(i), 2), Scalar::var(Var::X(j), 2));
            let c = star.commutator(&f, &g);
            let pb = dirac_quant::star::poisson_bracket(&pi, &f, &g).unwrap();
            assert_eq!(c.coeff(1), pb.coeff(1));
        }
    }
}

use std::collections::BTreeMap;

use dirac_quant::exactalg::{parse_scalar, ratio, Poly, Rational, Scalar, Var};
use dirac_quant::family::{gauge_family, quantize_family, Generator, TightFamily};
use dirac_quant::geom::{HamiltonianFamily, MixedMultivector};
use dirac_quant::holonomy::*;
use dirac_quant::star::{moyal, PolyDiffOp, StarProduct};
use dirac_quant::Error;

fn s(src: &str, o: usize) -> Scalar {
    parse_scalar(src, o).unwrap()
}

fn p(src: &str) -> Poly {
    dirac_quant::exactalg::parse_expr(src).unwrap().as_poly().unwrap().clone()
}

fn mv(m: usize, k: usize, o: usize, terms: &[(&str, &[usize], &[usize])]) -> MixedMultivector {
    let mut out = MixedMultivector::zero(m, k, o);
    for (c, tm, db) in terms {
        out = out.add(&MixedMultivector::term(m, k, s(c, o), tm, db).unwrap()).unwrap();
    }
    out
}

fn moyal2(o: usize) -> StarProduct {
    moyal(&mv(2, 0, o, &[("h", &[1, 2], &[])])).unwrap()
}

fn inner_family(o: usize) -> TightFamily {
    let gens = vec![Generator::Inner(s("x1 + h*b2*x1^2", o)), Generator::Inner(s("x2 + h*b1*x1*x2", o))];
    gauge_family(&moyal2(o), 2, 2, gens, None).unwrap()
}

fn quantized_curved() -> TightFamily {
    let sigma = mv(
        2,
        2,
        2,
        &[("h", &[1, 2], &[]), ("h*x1^2", &[2], &[1]), ("h*x2^2", &[1], &[2]), ("h*x1^2*x2^2", &[], &[1, 2])],
    );
    quantize_family(&HamiltonianFamily::new(sigma).unwrap(), None).unwrap().family
}

fn scalar_curvature(o: usize, f: &str) -> TightFamily {
    let mut t2 = BTreeMap::new();
    t2.insert((1, 2), s(f, o));
    TightFamily::new(2, 2, moyal2(o).correction().clone(), vec![PolyDiffOp::zero(1, o); 2], t2).unwrap()
}

fn skew_disk() -> DiskB {
    DiskB::new(vec![p("s + u/3 - 1/2"), p("u + s*u")]).unwrap()
}

fn all_relations(fam: &TightFamily, d: &DiskB) {
    let r1 = relation1_check(fam, d).unwrap();
    assert!(r1.ok(), "relation 1: {}", r1.residual);
    let r2 = relation2_check(fam, d, &d.squeezed()).unwrap();
    assert!(r2.ok(), "relation 2: {r2}");
    let r3 = relation3_check(fam, d, &ratio(1, 3)).unwrap();
    assert!(r3.ok(), "relation 3: {r3}");
    let nat = naturality_check(fam, d).unwrap();
    assert!(nat.ok(), "naturality: {nat}");
}

#[test]
fn transport_shift_closed_form() {
    let d = PolyDiffOp::vector_field(&[(Var::X(2), s("h", 4))], 4);
    let fam = TightFamily::new(2, 1, moyal2(4).correction().clone(), vec![d], BTreeMap::new()).unwrap();
    let line = PathB::new(vec![p("t")]).unwrap();
    let t = transport(&fam, &line).unwrap();
    // exp(−h∂₂) on x₂³
    assert_eq!(t.apply(&s("x2^3", 4)), s("(x2 - h)^3", 4));
    let pairs = vec![(s("x1", 4), s("x2", 4)), (s("x2^2", 4), s("x1*x2", 4))];
    assert!(transport_iso_check(&fam, &line, &pairs).unwrap().ok());
}

#[test]
fn transport_is_functorial_and_reparameterization_invariant() {
    let fam = quantized_curved();
    let gamma = PathB::new(vec![p("t^2 - t/2"), p("1 - 2*t^3")]).unwrap();
    let whole = transport(&fam, &gamma).unwrap();
    let c = ratio(1, 3);
    let first = transport(&fam, &gamma.restrict(&Rational::from_integer(0.into()), &c)).unwrap();
    let second = transport(&fam, &gamma.restrict(&c, &Rational::from_integer(1.into()))).unwrap();
    assert_eq!(first.then(&second).unwrap(), whole);
    for phi in ["t^2", "3*t^2 - 2*t^3"] {
        let t2 = transport(&fam, &gamma.reparameterize(&p(phi)).unwrap()).unwrap();
        assert_eq!(t2, whole);
    }
    let back = transport(&fam, &gamma.reversed()).unwrap();
    assert!(whole.then(&back).unwrap().is_identity());
    let pairs = vec![(s("x1", 2), s("x2", 2)), (s("x1^2", 2), s("x2^2 + x1", 2))];
    assert!(transport_iso_check(&fam, &gamma, &pairs).unwrap().ok());
}

#[test]
fn corrupted_connection_breaks_multiplicativity() {
    let bad = PolyDiffOp::vector_field(&[(Var::X(1), s("h*x1", 2))], 2);
    let fam = TightFamily::new(2, 1, moyal2(2).correction().clone(), vec![bad], BTreeMap::new()).unwrap();
    let line = PathB::new(vec![p("t")]).unwrap();
    let r = transport_iso_check(&fam, &line, &[(s("x1", 2), s("x2", 2))]).unwrap();
    assert_eq!(r.failures.len(), 1);
    assert!(r.to_string().starts_with("pair 0"));
}

#[test]
fn scalar_curvature_closed_forms() {
    let d = DiskB::unit_square();
    assert_eq!(disk_holonomy(&scalar_curvature(2, "1"), &d).unwrap().lambda, ratio(1, 1));
    assert_eq!(disk_holonomy(&scalar_curvature(2, "b1"), &d).unwrap().lambda, ratio(1, 2));
    // ∫∫ (s² + h u) = 1/3 with unital part 1 + h/2 + h²/8
    let a = disk_holonomy(&scalar_curvature(2, "b1^2 + h*b2"), &d).unwrap();
    assert_eq!(a.lambda, ratio(1, 3));
    assert_eq!(a.unital, s("1 + h/2 + h^2/8", 2));
    for f in ["1", "b1", "b1^2 + h*b2"] {
        all_relations(&scalar_curvature(2, f), &d);
    }
}

#[test]
fn halves_add_up() {
    let fam = scalar_curvature(2, "1");
    let d = DiskB::unit_square();
    let (d1, d2) = d.split(&ratio(1, 2));
    assert_eq!(disk_holonomy(&fam, &d1).unwrap().lambda, ratio(1, 2));
    assert_eq!(disk_holonomy(&fam, &d2).unwrap().lambda, ratio(1, 2));
    let r = concatenation_check(&fam, &d1, &d2, &d).unwrap();
    assert!(r.ok());
    assert_eq!(r.rhs.lambda, ratio(1, 1));
}

#[test]
fn inner_family_relations() {
    let fam = inner_family(3);
    all_relations(&fam, &DiskB::unit_square());
    all_relations(&fam, &skew_disk());
}

#[test]
fn quantized_family_relations() {
    let fam = quantized_curved();
    all_relations(&fam, &DiskB::unit_square());
    all_relations(&fam, &skew_disk());
}

#[test]
fn corrupted_curvature_breaks_relation1() {
    let mut fam = inner_family(2);
    let f = fam.curvature(1, 2);
    fam.tau2.insert((1, 2), &f + &s("h*x1", 2));
    let r = relation1_check(&fam, &DiskB::unit_square()).unwrap();
    assert!(!r.ok());
    assert!(!r.on(&s("x2", 2)).is_zero());
}

#[test]
fn boundary_mismatch_and_bad_data() {
    let fam = scalar_curvature(2, "1");
    let d = DiskB::unit_square();
    let other = DiskB::new(vec![p("s"), p("u^2")]).unwrap();
    assert!(matches!(relation2_check(&fam, &d, &other), Err(Error::IncompatibleBoundaries(_))));
    assert!(matches!(disk_holonomy(&scalar_curvature(2, "x1"), &d), Err(Error::NonCentralCurvature(_))));
    let sigma = mv(2, 2, 2, &[("h", &[1, 2], &[]), ("1/(1+b1)", &[], &[1, 2])]);
    let rational = quantize_family(&HamiltonianFamily::new(sigma).unwrap(), None).unwrap().family;
    assert!(matches!(disk_holonomy(&rational, &d), Err(Error::NonPolynomial(_))));
}

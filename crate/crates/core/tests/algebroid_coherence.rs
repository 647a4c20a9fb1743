use dirac_quant::algebroid::*;
use dirac_quant::exactalg::{parse_expr, parse_scalar, rat, ratio, Poly, Rational, Var};
use dirac_quant::geom::{HamiltonianFamily, MixedMultivector};
use dirac_quant::Error;

fn p(src: &str) -> Poly {
    parse_expr(src).unwrap().as_poly().unwrap().clone()
}

fn chart(terms: &[(&str, &[usize], &[usize])]) -> FoliatedChart {
    let mut sigma = MixedMultivector::zero(2, 2, 2);
    for (c, tm, db) in terms {
        sigma = sigma.add(&MixedMultivector::term(2, 2, parse_scalar(c, 2).unwrap(), tm, db).unwrap()).unwrap();
    }
    FoliatedChart::new(HamiltonianFamily::new(sigma).unwrap(), ChartBox::symmetric(2, 2, rat(8))).unwrap()
}

fn abelian() -> FoliatedChart {
    chart(&[("h", &[1, 2], &[]), ("1 + b1", &[], &[1, 2])])
}

fn curved() -> FoliatedChart {
    chart(&[("h", &[1, 2], &[]), ("h*x1^2", &[2], &[1]), ("h*x2^2", &[1], &[2]), ("h*x1^2*x2^2", &[], &[1, 2])])
}

fn shifts() -> FoliatedChart {
    chart(&[("h", &[1, 2], &[]), ("h", &[2], &[1]), ("h", &[1], &[2])])
}

fn sec(a: &str, b: &str) -> CrossSection {
    CrossSection::new(vec![p(a), p(b)]).unwrap()
}

fn bulged(h: &SectionHomotopy, bump: &str) -> SectionHomotopy {
    let c = h.components();
    SectionHomotopy::new(vec![c[0].clone(), &c[1] + &(&p("t*(1-t)") * &p(bump))]).unwrap()
}

/// `∫∫ g(F) det ∂F/∂(t,s)` over the unit square, by polynomial integration.
fn area_integral(g: &Poly, sq: &HomotopySquare) -> Rational {
    let f = sq.components();
    let subs = [(Var::B(1), f[0].clone()), (Var::B(2), f[1].clone())];
    let jac = &(&f[0].derivative(Var::T) * &f[1].derivative(Var::S)) - &(&f[1].derivative(Var::T) * &f[0].derivative(Var::S));
    let integrand = &g.substitute_many(&subs) * &jac;
    integrand.integrate_unit(Var::T).integrate_unit(Var::S).as_constant().unwrap()
}

#[test]
fn endpoint_coherence() {
    for (c, x, y) in [
        (abelian(), sec("0", "0"), sec("1", "0")),
        (curved(), sec("0", "0"), sec("1", "-1")),
        (curved(), sec("x1/2", "0"), sec("x1/2 + 1", "x2/3")),
        (shifts(), sec("x2", "x1"), sec("1", "x1*x2")),
    ] {
        let h = SectionHomotopy::straight(&x, &y).unwrap();
        let hom = hom_build(&c, &x, &y, &h, None).unwrap();
        assert_eq!(hom.coherence_failures(2), Vec::<String>::new());
        let back = hom_build(&c, &y, &x, &h.reversed(), None).unwrap();
        assert_eq!(hom.then(&back).unwrap(), dirac_quant::star::PolyDiffOp::identity(2));
    }
}

#[test]
fn shift_isomorphism() {
    let c = chart(&[("h", &[1, 2], &[]), ("h", &[2], &[1])]);
    let (x, y) = (sec("0", "0"), sec("1", "0"));
    let hom = hom_build(&c, &x, &y, &SectionHomotopy::straight(&x, &y).unwrap(), None).unwrap();
    assert_eq!(hom.iso.apply(&parse_scalar("x2^2", 2).unwrap()), parse_scalar("(x2 - h)^2", 2).unwrap());
}

#[test]
fn quantized_sections() {
    let heis = {
        let t = MixedMultivector::term(3, 1, parse_scalar("h*x3", 2).unwrap(), &[1, 2], &[]).unwrap();
        FoliatedChart::new(HamiltonianFamily::new(t).unwrap(), ChartBox::symmetric(3, 1, rat(2))).unwrap()
    };
    let s = quantize_section(&heis, &CrossSection::new(vec![p("x1")]).unwrap(), None).unwrap();
    let f = parse_scalar("x1", 2).unwrap();
    let g = parse_scalar("x2", 2).unwrap();
    assert_eq!(s.commutator(&f, &g), parse_scalar("h*x3", 2).unwrap());
    let zero = FoliatedChart::new(HamiltonianFamily::new(MixedMultivector::zero(2, 1, 2)).unwrap(), ChartBox::symmetric(2, 1, rat(1)))
        .unwrap();
    assert!(quantize_section(&zero, &CrossSection::new(vec![p("x1")]).unwrap(), None).unwrap().correction().is_zero());
}

#[test]
fn abelian_identification_is_an_area() {
    let c = abelian();
    let (x, y) = (sec("0", "0"), sec("1", "0"));
    let h1 = SectionHomotopy::straight(&x, &y).unwrap();
    let h2 = bulged(&h1, "1");
    let sq = HomotopySquare::blend(&h1, &h2, &p("s")).unwrap();
    let id = hom_identify(&c, &x, &y, &sq, None).unwrap();
    assert_eq!(id.element.lambda, area_integral(&p("1 + b1"), &sq));
    assert_eq!(id.element.lambda, ratio(1, 4));
    assert_eq!(id.element.unital, parse_scalar("1", 2).unwrap());
    let trivial = HomotopySquare::blend(&h1, &h1, &p("s")).unwrap();
    let id = hom_identify(&c, &x, &y, &trivial, None).unwrap();
    assert_eq!(id.element.lambda, ratio(0, 1));
}

#[test]
fn identification_is_independent_of_filling() {
    let cases = [
        (abelian(), sec("0", "0"), sec("1", "0"), "1"),
        (curved(), sec("0", "0"), sec("1", "0"), "1"),
        (curved(), sec("x1/2", "0"), sec("x1/2 + 1", "x2/3"), "x1"),
        (shifts(), sec("x1/2", "0"), sec("x1/2 + 1", "x2/3"), "x1"),
    ];
    for (c, x, y, bump) in cases {
        let h1 = SectionHomotopy::straight(&x, &y).unwrap();
        let h2 = bulged(&h1, bump);
        let a = hom_identify(&c, &x, &y, &HomotopySquare::blend(&h1, &h2, &p("s")).unwrap(), None).unwrap();
        let b = hom_identify(&c, &x, &y, &HomotopySquare::blend(&h1, &h2, &p("s^2")).unwrap(), None).unwrap();
        assert!(a.relation1.ok() && b.relation1.ok());
        assert_eq!(a.element, b.element);
    }
}

#[test]
fn triple_nesting() {
    let v = ChartBox::new(vec![(rat(-1), rat(1)); 2], vec![(rat(-2), rat(2)); 2]).unwrap();
    let u = ChartBox::new(vec![(rat(-1), rat(1)); 2], vec![(rat(-3), rat(3)); 2]).unwrap();
    let w = ChartBox::new(vec![(rat(-2), rat(2)); 2], vec![(rat(-4), rat(4)); 2]).unwrap();
    for c in [curved(), shifts()] {
        let r = triple_coherence(&c, &v, &u, &w, &sec("x1/2", "0"), &sec("1", "x2"), &sec("x1*x2", "2"), None).unwrap();
        assert!(r.ok(), "{r}");
    }
}

#[test]
fn restriction_edge_cases() {
    let c = curved();
    let v = ChartBox::new(vec![(rat(-1), rat(1)); 2], vec![(rat(-2), rat(2)); 2]).unwrap();
    let x = sec("x1/2", "0");
    assert!(restriction_hom(&c, &v, &v, &x, &x, None).unwrap().iso.is_identity());
    let flat = chart(&[("h", &[1, 2], &[])]);
    let hom = restriction_hom(&flat, &v, &v, &sec("0", "0"), &sec("1", "1"), None).unwrap();
    assert!(hom.iso.is_identity());
    let small = ChartBox::new(vec![(rat(-1), rat(1)); 2], vec![(rat(-1), rat(1)); 2]).unwrap();
    let err = restriction_hom(&c, &small, &small, &sec("0", "0"), &sec("x1 + x2", "0"), None);
    assert!(matches!(err, Err(Error::NotContained(_))));
}

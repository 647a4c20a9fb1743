//! Seeded check suites, one per acceptance criterion.
//!
//! Every case is exact; a criterion passes when all of its cases have zero
//! residual. Random cases come from a ChaCha stream keyed by the seed and the
//! criterion number, so criteria can run concurrently without changing output.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebroid::{
    hom_build, hom_identify, triple_coherence, ChartBox, CrossSection, FoliatedChart, HomotopySquare, SectionHomotopy,
};
use crate::dirac::{courant, lemma1_equivalence, pairing, GenSection};
use crate::error::Result;
use crate::exactalg::{parse_expr, parse_scalar, rat, ratio, Expr, Monomial, Poly, Rational, Scalar, Var};
use crate::family::{gauge_family, mc4_check, quantize_family, Generator, TightFamily};
use crate::geom::{HamiltonianFamily, MixedMultivector};
use crate::holonomy::{
    disk_holonomy, naturality_check, relation1_check, relation2_check, relation3_check, transport, transport_iso_check,
    DiskB, PathB,
};
use crate::star::{assoc_residual, kontsevich2, moyal, poisson_bracket, PolyDiffOp, StarProduct};

pub const DEFAULT_SEED: u64 = 20240601;

pub const TITLES: [&str; 8] = [
    "bracket identities",
    "lemma 1 equivalence",
    "star products",
    "tight-family equations",
    "transport",
    "holonomy relations",
    "algebroid coherence",
    "determinism",
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: String,
    pub passed: bool,
    pub cases: usize,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub criteria: Vec<CriterionOutcome>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }
}

#[derive(Default)]
struct Tally {
    cases: usize,
    failures: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(msg());
        }
    }

    /// Unwraps a result, counting an error as a failed case.
    fn take<T>(&mut self, label: &str, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.cases += 1;
                self.failures.push(format!("{label}: {e}"));
                None
            }
        }
    }

    fn finish(self, id: u8) -> CriterionOutcome {
        CriterionOutcome {
            id,
            title: TITLES[id as usize - 1].to_string(),
            passed: self.failures.is_empty() && self.cases > 0,
            cases: self.cases,
            failures: self.failures,
        }
    }
}

fn rng_for(seed: u64, id: u8) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (u64::from(id) << 56))
}

fn s(src: &str, o: usize) -> Scalar {
    parse_scalar(src, o).expect("built-in literal")
}

fn p(src: &str) -> Poly {
    parse_expr(src).expect("built-in literal").as_poly().expect("polynomial literal").clone()
}

type Terms<'a> = &'a [(&'a str, &'a [usize], &'a [usize])];

fn mv(m: usize, k: usize, o: usize, terms: Terms) -> MixedMultivector {
    let mut out = MixedMultivector::zero(m, k, o);
    for (c, tm, db) in terms {
        out = out.add(&MixedMultivector::term(m, k, s(c, o), tm, db).expect("valid legs")).expect("same dims");
    }
    out
}

fn random_poly(rng: &mut ChaCha8Rng, vars: &[Var], max_deg: u32, max_terms: usize) -> Poly {
    let mut out = Poly::zero();
    for _ in 0..rng.gen_range(1..=max_terms) {
        let mut mono = Monomial::one();
        for _ in 0..rng.gen_range(0..=max_deg) {
            mono = mono.mul(&Monomial::var(vars[rng.gen_range(0..vars.len())]));
        }
        let c = rng.gen_range(-3i64..=3);
        out = &out + &Poly::term(rat(c), mono);
    }
    out
}

fn all_vars(m: usize, k: usize) -> Vec<Var> {
    (1..=m).map(Var::X).chain((1..=k).map(Var::B)).collect()
}

/// Up to two terms of degree at most 2 per component.
pub fn random_section(rng: &mut ChaCha8Rng, m: usize, k: usize) -> GenSection {
    let vars = all_vars(m, k);
    let mut comp = || Scalar::from_poly(random_poly(rng, &vars, 2, 2), 0);
    let v: Vec<Scalar> = (0..m + k).map(|_| comp()).collect();
    let c: Vec<Scalar> = (0..m + k).map(|_| comp()).collect();
    GenSection::new(m, k, v, c).expect("sized")
}

fn monomials(m: usize, d: u32, o: usize) -> Vec<Scalar> {
    crate::algebroid::test_monomials(m, d, o)
}

// 1 ------------------------------------------------------------------------

fn bracket_identities(seed: u64) -> CriterionOutcome {
    let mut rng = rng_for(seed, 1);
    let mut t = Tally::default();
    let half = ratio(1, 2);
    for case in 0..100 {
        let m = rng.gen_range(1..=3);
        let k = rng.gen_range(0..=4 - m);
        let (a, b, c) = (random_section(&mut rng, m, k), random_section(&mut rng, m, k), random_section(&mut rng, m, k));
        let leibniz = (|| -> Result<bool> {
            let lhs = courant(&a, &courant(&b, &c)?)?;
            let rhs = courant(&courant(&a, &b)?, &c)?.add(&courant(&b, &courant(&a, &c)?)?)?;
            Ok(lhs == rhs)
        })();
        if let Some(ok) = t.take(&format!("case {case} leibniz"), leibniz) {
            t.check(ok, || format!("case {case} (m={m}, k={k}): left Leibniz fails"));
        }
        let selfb = (|| -> Result<bool> {
            let lhs = courant(&a, &a)?;
            let rhs = GenSection::differential(m, k, &pairing(&a, &a)?).scale(&Scalar::from_expr(Expr::constant(half.clone()), 0));
            Ok(lhs == rhs)
        })();
        if let Some(ok) = t.take(&format!("case {case} self-bracket"), selfb) {
            t.check(ok, || format!("case {case} (m={m}, k={k}): [[a,a]] != d<a,a>/2"));
        }
    }
    t.finish(1)
}

// 2 ------------------------------------------------------------------------

fn curated_solutions() -> Vec<(String, MixedMultivector, Option<Vec<(Var, Rational, Rational)>>)> {
    let unit = |m: usize, k: usize| -> Vec<(Var, Rational, Rational)> {
        all_vars(m, k).into_iter().map(|v| (v, rat(-1), rat(1))).collect()
    };
    let mut rational_box = unit(2, 1);
    rational_box[2] = (Var::B(1), rat(0), rat(1));
    vec![
        ("moyal".into(), mv(2, 0, 1, &[("h", &[1, 2], &[])]), None),
        ("heisenberg".into(), mv(3, 0, 1, &[("h*x3", &[1, 2], &[])]), None),
        ("sl2".into(), mv(3, 0, 1, &[("2*h*x2", &[1, 2], &[]), ("-2*h*x3", &[1, 3], &[]), ("h*x1", &[2, 3], &[])]), None),
        ("constant pi + g(b)".into(), mv(2, 2, 1, &[("h", &[1, 2], &[]), ("b1^2 + 3*b2", &[], &[1, 2])]), None),
        (
            "rational compensated".into(),
            mv(2, 1, 0, &[("1 + b1", &[1, 2], &[]), ("x1/(1+b1)", &[1], &[1])]),
            Some(rational_box),
        ),
        ("shift".into(), mv(2, 1, 1, &[("h", &[1, 2], &[]), ("h", &[2], &[1])]), None),
        (
            "curved".into(),
            mv(2, 2, 1, &[("h", &[1, 2], &[]), ("h*x1^2", &[2], &[1]), ("h*x2^2", &[1], &[2]), ("h*x1^2*x2^2", &[], &[1, 2])]),
            None,
        ),
        ("cubic generator".into(), mv(2, 1, 1, &[("h", &[1, 2], &[]), ("h*x1^2", &[2], &[1])]), None),
        ("leafwise form".into(), mv(1, 2, 0, &[("b1 + b2^2", &[], &[1, 2])]), None),
        ("exact form k=3".into(), mv(1, 3, 0, &[("b2", &[], &[1, 3]), ("b1", &[], &[2, 3])]), None),
        ("heisenberg x1".into(), mv(3, 1, 1, &[("h*x1", &[2, 3], &[])]), None),
        ("hamiltonian x2 d1".into(), mv(2, 1, 1, &[("h", &[1, 2], &[]), ("h*x2", &[1], &[1])]), None),
    ]
}

fn random_sigma(rng: &mut ChaCha8Rng) -> MixedMultivector {
    let m = rng.gen_range(2..=3);
    let k = rng.gen_range(1..=2);
    let vars = all_vars(m, k);
    let mut sigma = MixedMultivector::zero(m, k, 1);
    for _ in 0..rng.gen_range(1..=3) {
        let c = Scalar::from_poly(random_poly(rng, &vars, 2, 2), 1);
        let (tm, db): (Vec<usize>, Vec<usize>) = match rng.gen_range(0..3) {
            0 => {
                let i = rng.gen_range(1..m);
                (vec![i, rng.gen_range(i + 1..=m)], vec![])
            }
            1 => (vec![rng.gen_range(1..=m)], vec![rng.gen_range(1..=k)]),
            _ if k >= 2 => (vec![], vec![1, 2]),
            _ => (vec![rng.gen_range(1..=m)], vec![1]),
        };
        let term = MixedMultivector::term(m, k, c, &tm, &db).expect("valid legs");
        sigma = sigma.add(&term).expect("same dims");
    }
    sigma
}

fn lemma1_suite(seed: u64) -> CriterionOutcome {
    let mut rng = rng_for(seed, 2);
    let mut t = Tally::default();
    for (name, sigma, domain) in curated_solutions() {
        let Some(mc) = t.take(&name, sigma.mc_residual()) else { continue };
        t.check(mc.is_zero(), || format!("curated {name} is not MC: {mc}"));
        if let Some(r) = t.take(&name, lemma1_equivalence(&sigma, domain, 4)) {
            t.check(r.agree() && r.graph_is_dirac, || format!("curated {name}: {r:?}"));
        }
    }
    let mut non_solutions = 0;
    let mut attempts = 0;
    while non_solutions < 24 && attempts < 200 {
        attempts += 1;
        let sigma = random_sigma(&mut rng);
        let label = format!("random #{attempts}");
        if let Some(r) = t.take(&label, lemma1_equivalence(&sigma, None, 4)) {
            if !r.mc_residual_zero {
                non_solutions += 1;
            }
            t.check(r.agree(), || format!("{label} {sigma}: {r:?}"));
        }
    }
    t.check(non_solutions >= 20, || format!("only {non_solutions} random non-solutions generated"));
    t.finish(2)
}

// 3 ------------------------------------------------------------------------

fn star_suite(_seed: u64) -> CriterionOutcome {
    let mut t = Tally::default();
    let moyal4 = mv(2, 0, 4, &[("h", &[1, 2], &[])]);
    if let Some(star) = t.take("moyal", moyal(&moyal4)) {
        associativity_cases(&mut t, "moyal H=4", &star, &monomials(2, 3, 4));
        bracket_cases(&mut t, "moyal", &star, &moyal4, 2);
    }
    let linear = [
        ("heisenberg", mv(3, 0, 2, &[("h*x3", &[1, 2], &[])])),
        ("sl2", mv(3, 0, 2, &[("2*h*x2", &[1, 2], &[]), ("-2*h*x3", &[1, 3], &[]), ("h*x1", &[2, 3], &[])])),
    ];
    for (name, pi) in linear {
        if let Some(star) = t.take(name, kontsevich2(&pi)) {
            associativity_cases(&mut t, name, &star, &monomials(3, 2, 2));
            bracket_cases(&mut t, name, &star, &pi, 3);
        }
    }
    t.finish(3)
}

fn associativity_cases(t: &mut Tally, name: &str, star: &StarProduct, monos: &[Scalar]) {
    let triples: Vec<(Scalar, Scalar, Scalar)> = monos
        .iter()
        .flat_map(|f| monos.iter().flat_map(move |g| monos.iter().map(move |h| (f.clone(), g.clone(), h.clone()))))
        .collect();
    let residuals: Vec<Scalar> = triples.par_chunks(64).flat_map_iter(|c| assoc_residual(star, c)).collect();
    for ((f, g, h), r) in triples.iter().zip(residuals) {
        t.check(r.is_zero(), || format!("{name}: associator({f}, {g}, {h}) = {r}"));
    }
}

fn bracket_cases(t: &mut Tally, name: &str, star: &StarProduct, pi: &MixedMultivector, m: usize) {
    for i in 1..=m {
        for j in 1..=m {
            let (f, g) = (Scalar::var(Var::X(i), star.order()), Scalar::var(Var::X(j), star.order()));
            let Some(pb) = t.take(name, poisson_bracket(pi, &f, &g)) else { continue };
            let c = star.commutator(&f, &g);
            t.check(c.coeff(1) == pb.coeff(1), || format!("{name}: [x{i}, x{j}] at order h is {}, bracket {}", c.coeff(1), pb.coeff(1)));
        }
    }
}

// 4 ------------------------------------------------------------------------

/// A Hamiltonian family on (ℝ², ∂₁∧∂₂) over ℝ² generated by `H₁, H₂`.
fn hamiltonian_pair(h1: &Poly, h2: &Poly, o: usize) -> MixedMultivector {
    let (x1, x2) = (Var::X(1), Var::X(2));
    let hs = |q: Poly| &Scalar::hbar(o) * &Scalar::from_poly(q, o);
    let mut sigma = mv(2, 2, o, &[("h", &[1, 2], &[])]);
    for (a, ha) in [(1usize, h1), (2, h2)] {
        for (i, c) in [(1usize, ha.derivative(x2).scale(&rat(-1))), (2, ha.derivative(x1))] {
            if !c.is_zero() {
                sigma = sigma.add(&MixedMultivector::term(2, 2, hs(c), &[i], &[a]).expect("legs")).expect("dims");
            }
        }
    }
    let bracket = &(&h1.derivative(x1) * &h2.derivative(x2)) - &(&h1.derivative(x2) * &h2.derivative(x1));
    if !bracket.is_zero() {
        let term = MixedMultivector::term(2, 2, hs(bracket.scale(&rat(-1))), &[], &[1, 2]).expect("legs");
        sigma = sigma.add(&term).expect("dims");
    }
    sigma
}

fn random_hamiltonians(seed: u64, n: usize) -> Vec<(Poly, Poly)> {
    let mut rng = rng_for(seed, 4);
    let vars = [Var::X(1), Var::X(2)];
    (0..n).map(|_| (random_poly(&mut rng, &vars, 3, 2), random_poly(&mut rng, &vars, 3, 2))).collect()
}

struct NamedFamily {
    name: String,
    family: TightFamily,
}

fn quantized(t: &mut Tally, name: &str, sigma: MixedMultivector) -> Option<NamedFamily> {
    let ham = t.take(name, HamiltonianFamily::new(sigma))?;
    let q = t.take(name, quantize_family(&ham, None))?;
    Some(NamedFamily { name: name.to_string(), family: q.family })
}

fn gauged(t: &mut Tally, name: &str, o: usize, k: usize, potentials: &[&str]) -> Option<NamedFamily> {
    let star = moyal(&mv(2, 0, o, &[("h", &[1, 2], &[])])).expect("constant");
    let gens = potentials.iter().map(|a| Generator::Inner(s(a, o))).collect();
    let family = t.take(name, gauge_family(&star, 2, k, gens, None))?;
    Some(NamedFamily { name: name.to_string(), family })
}

fn family_suite(seed: u64, t: &mut Tally) -> Vec<NamedFamily> {
    let mut out = Vec::new();
    let quant: Vec<(&str, MixedMultivector)> = vec![
        ("cubic generator", mv(2, 1, 2, &[("h", &[1, 2], &[]), ("h*x1^2", &[2], &[1])])),
        (
            "curved",
            mv(2, 2, 2, &[("h", &[1, 2], &[]), ("h*x1^2", &[2], &[1]), ("h*x2^2", &[1], &[2]), ("h*x1^2*x2^2", &[], &[1, 2])]),
        ),
        ("rational compensated", mv(2, 1, 2, &[("h + h^2*b1/(1+b1)", &[1, 2], &[]), ("h*x1/(1+b1)^2", &[1], &[1])])),
        ("heisenberg over a line", mv(3, 1, 2, &[("h*x3", &[1, 2], &[])])),
        ("sl2", mv(3, 0, 2, &[("2*h*x2", &[1, 2], &[]), ("-2*h*x3", &[1, 3], &[]), ("h*x1", &[2, 3], &[])])),
        ("constant pi + g(b), H=3", mv(2, 2, 3, &[("h", &[1, 2], &[]), ("b1^2 + 3*b2", &[], &[1, 2])])),
        ("shift, H=3", mv(2, 1, 3, &[("h", &[1, 2], &[]), ("h", &[2], &[1])])),
        ("two shifts, H=3", mv(2, 2, 3, &[("h", &[1, 2], &[]), ("h", &[2], &[1]), ("h", &[1], &[2])])),
    ];
    for (name, sigma) in quant {
        out.extend(quantized(t, name, sigma));
    }
    for (i, (h1, h2)) in random_hamiltonians(seed, 3).into_iter().enumerate() {
        out.extend(quantized(t, &format!("random hamiltonian pair #{i} ({h1}; {h2})"), hamiltonian_pair(&h1, &h2, 2)));
    }
    out.extend(gauged(t, "inner x1", 2, 1, &["x1"]));
    out.extend(gauged(t, "inner x1, x2", 2, 2, &["x1", "x2"]));
    out.extend(gauged(t, "inner b-dependent, H=3", 3, 2, &["x1 + h*b2*x1^2", "x2 + h*b1*x1*x2"]));
    out
}

fn mc4_suite(seed: u64) -> CriterionOutcome {
    let mut t = Tally::default();
    for nf in family_suite(seed, &mut t) {
        let r = mc4_check(&nf.family);
        t.check(r.all_zero(), || format!("{}: {}", nf.name, r.first_failure().unwrap_or_default()));
    }
    t.finish(4)
}

// 5 ------------------------------------------------------------------------

fn random_path(rng: &mut ChaCha8Rng, k: usize) -> PathB {
    let mut comps = Vec::with_capacity(k);
    for _ in 0..k {
        let c: Vec<Rational> = (0..3).map(|_| ratio(rng.gen_range(-3i64..=3), rng.gen_range(1i64..=3))).collect();
        let q = Poly::from_terms([
            (Monomial::one(), c[0].clone()),
            (Monomial::var(Var::T), c[1].clone()),
            (Monomial::var_pow(Var::T, 2), c[2].clone()),
        ]);
        comps.push(q);
    }
    PathB::new(comps).expect("t only")
}

fn transport_suite(seed: u64) -> CriterionOutcome {
    let mut rng = rng_for(seed, 5);
    let mut t = Tally::default();
    let shift = quantized(&mut t, "shift", mv(2, 1, 3, &[("h", &[1, 2], &[]), ("h", &[2], &[1])]));
    if let Some(nf) = shift {
        let line = PathB::new(vec![Poly::var(Var::T)]).expect("t only");
        if let Some(tr) = t.take("shift", transport(&nf.family, &line)) {
            for (f, want) in [("x2", "x2 - h"), ("x2^2", "(x2 - h)^2"), ("x1*x2", "x1*x2 - h*x1")] {
                let got = tr.apply(&s(f, 3));
                t.check(got == s(want, 3), || format!("shift: T({f}) = {got}, expected {want}"));
            }
        }
    }
    let mut fams = Vec::new();
    let mut scratch = Tally::default();
    for nf in family_suite(seed, &mut scratch) {
        let (_, k) = nf.family.dims();
        if k > 0 && nf.family.is_polynomial() {
            fams.push(nf);
        }
    }
    let pieces = [ratio(1, 3), ratio(1, 2), ratio(3, 4)];
    let jobs: Vec<(NamedFamily, PathB, Rational)> = fams
        .into_iter()
        .map(|nf| {
            let k = nf.family.dims().1;
            let path = random_path(&mut rng, k);
            let c = pieces[rng.gen_range(0..pieces.len())].clone();
            (nf, path, c)
        })
        .collect();
    let results: Vec<Tally> = jobs.par_iter().map(|(nf, path, c)| transport_cases(nf, path, c)).collect();
    for r in results {
        t.cases += r.cases;
        t.failures.extend(r.failures);
    }
    t.finish(5)
}

fn transport_cases(nf: &NamedFamily, path: &PathB, c: &Rational) -> Tally {
    let mut t = Tally::default();
    let fam = &nf.family;
    let name = &nf.name;
    let Some(whole) = t.take(name, transport(fam, path)) else { return t };
    let split = (|| -> Result<bool> {
        let a = transport(fam, &path.restrict(&rat(0), c))?;
        let b = transport(fam, &path.restrict(c, &rat(1)))?;
        Ok(a.then(&b)? == whole)
    })();
    if let Some(ok) = t.take(name, split) {
        t.check(ok, || format!("{name}: functoriality fails at split {c}"));
    }
    if let Some(back) = t.take(name, transport(fam, &path.reversed())) {
        let ok = whole.then(&back).map(|x| x.is_identity()).unwrap_or(false);
        t.check(ok, || format!("{name}: inverse path does not give the identity"));
    }
    for phi in ["t^2", "3*t^2 - 2*t^3", "t^3"] {
        let r = path.reparameterize(&p(phi)).and_then(|q| transport(fam, &q));
        if let Some(tr) = t.take(name, r) {
            t.check(tr == whole, || format!("{name}: reparameterization {phi} changes transport"));
        }
    }
    let (m, _) = fam.dims();
    let monos = monomials(m, 2, fam.order());
    let pairs: Vec<(Scalar, Scalar)> =
        monos.iter().flat_map(|f| monos.iter().map(move |g| (f.clone(), g.clone()))).collect();
    if let Some(r) = t.take(name, transport_iso_check(fam, path, &pairs)) {
        t.cases += pairs.len() - 1;
        t.check(r.ok(), || format!("{name}: {r}"));
    }
    t
}

// 6 ------------------------------------------------------------------------

fn scalar_curvature(f: &str, o: usize) -> TightFamily {
    let star = moyal(&mv(2, 0, o, &[("h", &[1, 2], &[])])).expect("constant");
    let mut t2 = BTreeMap::new();
    t2.insert((1, 2), s(f, o));
    TightFamily::new(2, 2, star.correction().clone(), vec![PolyDiffOp::zero(1, o); 2], t2).expect("valid")
}

fn holonomy_suite(seed: u64) -> CriterionOutcome {
    let mut t = Tally::default();
    let square = DiskB::unit_square();
    let closed = [("1", rat(1), "1"), ("b1", ratio(1, 2), "1"), ("b1^2 + h*b2", ratio(1, 3), "1 + h/2 + h^2/8")];
    let mut fams: Vec<NamedFamily> = Vec::new();
    for (f, lambda, unital) in closed {
        let fam = scalar_curvature(f, 2);
        if let Some(a) = t.take(f, disk_holonomy(&fam, &square)) {
            t.check(a.lambda == lambda && a.unital == s(unital, 2), || format!("tau2 = {f}: got {a}, expected exp({lambda}) * ({unital})"));
        }
        fams.push(NamedFamily { name: format!("tau2 = {f}"), family: fam });
    }
    fams.extend(gauged(&mut t, "inner b-dependent, H=3", 3, 2, &["x1 + h*b2*x1^2", "x2 + h*b1*x1*x2"]));
    fams.extend(quantized(
        &mut t,
        "curved",
        mv(2, 2, 2, &[("h", &[1, 2], &[]), ("h*x1^2", &[2], &[1]), ("h*x2^2", &[1], &[2]), ("h*x1^2*x2^2", &[], &[1, 2])]),
    ));
    if let Some((h1, h2)) = random_hamiltonians(seed, 1).pop() {
        fams.extend(quantized(&mut t, &format!("random hamiltonian pair ({h1}; {h2})"), hamiltonian_pair(&h1, &h2, 2)));
    }
    let skew = DiskB::new(vec![p("s + u/3 - 1/2"), p("u + s*u")]).expect("s, u only");
    let jobs: Vec<(&NamedFamily, &DiskB)> = fams.iter().flat_map(|nf| [(nf, &square), (nf, &skew)]).collect();
    let results: Vec<Tally> = jobs.par_iter().map(|(nf, d)| relation_cases(nf, d)).collect();
    for r in results {
        t.cases += r.cases;
        t.failures.extend(r.failures);
    }
    t.finish(6)
}

fn relation_cases(nf: &NamedFamily, d: &DiskB) -> Tally {
    let mut t = Tally::default();
    let (fam, name) = (&nf.family, &nf.name);
    if let Some(r) = t.take(name, relation1_check(fam, d)) {
        t.check(r.ok(), || format!("{name}: relation 1 residual {}", r.residual));
    }
    if let Some(r) = t.take(name, relation2_check(fam, d, &d.squeezed())) {
        t.check(r.ok(), || format!("{name}: relation 2: {r}"));
    }
    if let Some(r) = t.take(name, relation3_check(fam, d, &ratio(1, 3))) {
        t.check(r.ok(), || format!("{name}: relation 3: {r}"));
    }
    if let Some(r) = t.take(name, naturality_check(fam, d)) {
        t.check(r.ok(), || format!("{name}: naturality: {r}"));
    }
    t
}

// 7 ------------------------------------------------------------------------

fn chart(terms: Terms) -> FoliatedChart {
    let sigma = mv(2, 2, 2, terms);
    FoliatedChart::new(HamiltonianFamily::new(sigma).expect("family"), ChartBox::symmetric(2, 2, rat(8))).expect("chart")
}

fn sec(a: &str, b: &str) -> CrossSection {
    CrossSection::new(vec![p(a), p(b)]).expect("y only")
}

fn algebroid_suite(_seed: u64) -> CriterionOutcome {
    let mut t = Tally::default();
    let abelian = chart(&[("h", &[1, 2], &[]), ("1 + b1", &[], &[1, 2])]);
    let curved = chart(&[("h", &[1, 2], &[]), ("h*x1^2", &[2], &[1]), ("h*x2^2", &[1], &[2]), ("h*x1^2*x2^2", &[], &[1, 2])]);
    let shifts = chart(&[("h", &[1, 2], &[]), ("h", &[2], &[1]), ("h", &[1], &[2])]);

    let ends = [
        ("abelian", &abelian, sec("0", "0"), sec("1", "0")),
        ("curved", &curved, sec("0", "0"), sec("1", "-1")),
        ("curved, y-dependent", &curved, sec("x1/2", "0"), sec("x1/2 + 1", "x2/3")),
        ("shifts, y-dependent", &shifts, sec("x2", "x1"), sec("1", "x1*x2")),
    ];
    for (name, c, x, y) in &ends {
        let r = SectionHomotopy::straight(x, y).and_then(|h| hom_build(c, x, y, &h, None));
        if let Some(hom) = t.take(name, r) {
            let fails = hom.coherence_failures(2);
            t.check(fails.is_empty(), || format!("{name}: {}", fails.join("; ")));
        }
    }

    let fillings = [
        ("abelian", &abelian, sec("0", "0"), sec("1", "0"), "1"),
        ("curved", &curved, sec("0", "0"), sec("1", "0"), "1"),
        ("curved, y-dependent", &curved, sec("x1/2", "0"), sec("x1/2 + 1", "x2/3"), "x1"),
        ("shifts, y-dependent", &shifts, sec("x1/2", "0"), sec("x1/2 + 1", "x2/3"), "x1"),
    ];
    for (name, c, x, y, bump) in &fillings {
        let r = (|| -> Result<bool> {
            let h1 = SectionHomotopy::straight(x, y)?;
            let comps = h1.components();
            let h2 = SectionHomotopy::new(vec![comps[0].clone(), &comps[1] + &(&p("t*(1-t)") * &p(bump))])?;
            let a = hom_identify(c, x, y, &HomotopySquare::blend(&h1, &h2, &p("s"))?, None)?;
            let b = hom_identify(c, x, y, &HomotopySquare::blend(&h1, &h2, &p("s^2"))?, None)?;
            Ok(a.element == b.element && a.relation1.ok() && b.relation1.ok())
        })();
        if let Some(ok) = t.take(name, r) {
            t.check(ok, || format!("{name}: identification depends on the filling"));
        }
    }

    let iv = |a: i64, b: i64| (rat(a), rat(b));
    let v = ChartBox::new(vec![iv(-1, 1); 2], vec![iv(-2, 2); 2]).expect("box");
    let u = ChartBox::new(vec![iv(-1, 1); 2], vec![iv(-3, 3); 2]).expect("box");
    let w = ChartBox::new(vec![iv(-2, 2); 2], vec![iv(-4, 4); 2]).expect("box");
    for (name, c) in [("curved", &curved), ("shifts", &shifts)] {
        let r = triple_coherence(c, &v, &u, &w, &sec("x1/2", "0"), &sec("1", "x2"), &sec("x1*x2", "2"), None);
        if let Some(rep) = t.take(name, r) {
            t.check(rep.ok(), || format!("{name} triple: {rep}"));
        }
    }
    t.finish(7)
}

// --------------------------------------------------------------------------

/// Runs criterion `id` (1–7).
pub fn criterion(id: u8, seed: u64) -> CriterionOutcome {
    match id {
        1 => bracket_identities(seed),
        2 => lemma1_suite(seed),
        3 => star_suite(seed),
        4 => mc4_suite(seed),
        5 => transport_suite(seed),
        6 => holonomy_suite(seed),
        7 => algebroid_suite(seed),
        _ => panic!("criterion {id} is not a standalone suite"),
    }
}

/// Criteria 1–7.
pub fn run_suite(seed: u64) -> SuiteReport {
    let criteria = (1u8..=7).into_par_iter().map(|id| criterion(id, seed)).collect();
    SuiteReport { seed, criteria }
}

/// Criterion 8 from two independent runs.
pub fn determinism(a: &SuiteReport, b: &SuiteReport) -> CriterionOutcome {
    let (ja, jb) = (a.to_json(), b.to_json());
    let mut t = Tally::default();
    t.check(ja == jb, || {
        let line = ja.lines().zip(jb.lines()).position(|(x, y)| x != y).unwrap_or(0);
        format!("reports differ first at line {}", line + 1)
    });
    t.finish(8)
}

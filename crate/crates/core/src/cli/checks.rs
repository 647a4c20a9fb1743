//! One function per check kind. Each returns a verdict plus the exact
//! residual text when something is nonzero.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::scenario::{CheckSpec, Scenario};
use crate::algebroid::{hom_build, hom_identify, test_monomials, HomotopySquare, SectionHomotopy};
use crate::dirac::{courant, is_dirac, lemma1_equivalence, lemma2_degree_check, pairing, DiracVerdict, GenSection};
use crate::error::Result;
use crate::exactalg::{parse_expr, ratio, Expr, Rational, Scalar};
use crate::family::{mc4_check, quantize_family, TightFamily};
use crate::geom::HamiltonianFamily;
use crate::holonomy::{
    disk_holonomy, naturality_check, relation1_check, relation2_check, relation3_check, transport, transport_iso_check,
    DiskB, PathB,
};
use crate::suites::random_section;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail(String),
    Error(String),
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub verdict: Verdict,
    /// Computed value worth reporting even on success.
    pub value: Option<String>,
}

/// Accumulates residual lines of one check.
#[derive(Default)]
struct Residuals(Vec<String>);

impl Residuals {
    fn push_if(&mut self, bad: bool, msg: impl FnOnce() -> String) {
        if bad {
            self.0.push(msg());
        }
    }

    fn outcome(self, value: Option<String>) -> Outcome {
        let verdict = if self.0.is_empty() { Verdict::Pass } else { Verdict::Fail(self.0.join("\n")) };
        Outcome { verdict, value }
    }
}

pub fn run_check(sc: &Scenario, spec: &CheckSpec, seed: u64) -> Outcome {
    match dispatch(sc, spec, seed) {
        Ok(o) => o,
        Err(e) => Outcome { verdict: Verdict::Error(e.to_string()), value: None },
    }
}

fn dispatch(sc: &Scenario, spec: &CheckSpec, seed: u64) -> Result<Outcome> {
    use CheckSpec::*;
    match spec {
        CourantIdentities { sections, random, frame, expect_dirac, .. } => {
            courant_identities(sc, sections, *random, frame.as_deref(), expect_dirac.unwrap_or(true), seed)
        }
        Lemma1 { sigma, .. } => {
            let r = lemma1_equivalence(&sc.sigmas[sigma], Some(sc.domain.clone()), sc.grid)?;
            let mut res = Residuals::default();
            res.push_if(!r.agree(), || {
                format!("MC residual zero: {}, graph Dirac: {}", r.mc_residual_zero, r.graph_is_dirac)
            });
            Ok(res.outcome(Some(format!("maurer-cartan: {}", r.mc_residual_zero))))
        }
        Lemma2 { sigma, .. } => {
            let r = lemma2_degree_check(&sc.sigmas[sigma])?;
            let mut res = Residuals(r.violations.clone());
            res.push_if(!r.leaves_along_b, || "h^0 leaves are not the fibers {x} x B".into());
            res.push_if(!r.leafwise_dirac, || "h^0 graph is not Courant-closed".into());
            Ok(res.outcome(None))
        }
        Mc { sigma, .. } => {
            let r = sc.sigmas[sigma].mc_residual()?;
            let mut res = Residuals::default();
            res.push_if(!r.is_zero(), || r.to_string());
            Ok(res.outcome(None))
        }
        Mc4 { family, .. } => Ok(mc4_outcome(sc.family(family)?)),
        Quantize { sigma, .. } => {
            let s = &sc.sigmas[sigma];
            let q = quantize_family(&HamiltonianFamily::new(s.clone())?, sc.bounds_for(s))?;
            let mut o = mc4_outcome(&q.family);
            o.value = Some(format!("{} correction terms", q.total_corrections()));
            Ok(o)
        }
        Transport { family, path, expect, .. } => {
            let fam = sc.family(family)?;
            let gamma = &sc.paths[path];
            let mut res = transport_cases(fam, gamma)?;
            let t = transport(fam, gamma)?;
            for (f, want) in expect {
                let got = t.apply(&sc.scalar(f));
                let want_s = sc.scalar(want);
                res.push_if(got != want_s, || format!("T({f}) = {got}, expected {want}"));
            }
            Ok(res.outcome(None))
        }
        Holonomy { family, disk, expect_lambda, expect_unital, .. } => {
            let fam = sc.family(family)?;
            let d = &sc.disks[disk];
            let a = disk_holonomy(fam, d)?;
            let mut res = Residuals::default();
            if let Some(l) = expect_lambda {
                let l = sc.rational(l);
                res.push_if(a.lambda != l, || format!("lambda = {}, expected {l}", a.lambda));
            }
            if let Some(u) = expect_unital {
                let u = sc.scalar(u);
                res.push_if(a.unital != u, || format!("unital part {} - expected = {}", a.unital, &a.unital - &u));
            }
            let r1 = relation1_check(fam, d)?;
            res.push_if(!r1.ok(), || format!("boundary transport minus conjugation: {}", r1.residual));
            Ok(res.outcome(Some(a.to_string())))
        }
        Relations { family, disk, .. } => relations(sc.family(family)?, &sc.disks[disk]),
        AlgebroidCoherence { chart, source, target, filling, .. } => {
            let chart = sc.chart(chart)?;
            let (x, y) = (&sc.transversals[source], &sc.transversals[target]);
            let bounds = sc.bounds_for(chart.family().sigma());
            let h = SectionHomotopy::straight(x, y)?;
            let hom = hom_build(chart, x, y, &h, bounds)?;
            let mut res = Residuals(hom.coherence_failures(2));
            let back = hom_build(chart, y, x, &h.reversed(), bounds)?;
            let round = hom.then(&back)?;
            let (m0, _) = chart.dims();
            for f in test_monomials(m0, 2, chart.order()) {
                let g = round.apply(std::slice::from_ref(&f))?;
                res.push_if(g != f, || format!("round trip moves {f} to {g}"));
            }
            let mut value = None;
            if let Some(bump) = filling {
                let comps = h.components();
                let mut bent = comps.to_vec();
                bent[0] = &bent[0] + &(&sc.poly("t*(1-t)") * &sc.poly(bump));
                let h2 = SectionHomotopy::new(bent)?;
                let a = hom_identify(chart, x, y, &HomotopySquare::blend(&h, &h2, &sc.poly("s"))?, bounds)?;
                let b = hom_identify(chart, x, y, &HomotopySquare::blend(&h, &h2, &sc.poly("s^2"))?, bounds)?;
                res.push_if(a.element != b.element, || {
                    format!("identification depends on the filling: {} vs {}", a.element, b.element)
                });
                res.push_if(!a.relation1.ok(), || format!("relation 1 on the filling: {}", a.relation1.residual));
                value = Some(a.element.to_string());
            }
            Ok(res.outcome(value))
        }
    }
}

fn mc4_outcome(fam: &TightFamily) -> Outcome {
    let r = mc4_check(fam);
    let mut res = Residuals::default();
    if let Some(f) = r.first_failure() {
        res.0.push(f);
    }
    res.outcome(None)
}

fn courant_identities(
    sc: &Scenario,
    names: &[String],
    random: usize,
    frame: Option<&str>,
    expect_dirac: bool,
    seed: u64,
) -> Result<Outcome> {
    let mut res = Residuals::default();
    let mut named: Vec<(String, GenSection)> = names.iter().map(|n| (n.clone(), sc.sections[n].clone())).collect();
    if named.is_empty() && random == 0 && frame.is_none() {
        named = sc.sections.iter().map(|(n, s)| (n.clone(), s.clone())).collect();
    }
    let mut triples: Vec<[(String, GenSection); 3]> = Vec::new();
    for a in &named {
        for b in &named {
            for c in &named {
                triples.push([a.clone(), b.clone(), c.clone()]);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..random {
        let mut next = |tag: &str| (format!("random{i}{tag}"), random_section(&mut rng, sc.m, sc.k));
        triples.push([next("a"), next("b"), next("c")]);
    }
    for [(na, a), (nb, b), (nc, c)] in &triples {
        let lhs = courant(a, &courant(b, c)?)?;
        let rhs = courant(&courant(a, b)?, c)?.add(&courant(b, &courant(a, c)?)?)?;
        let diff = lhs.add(&rhs.scale(&Scalar::from_expr(Expr::int(-1), sc.order)))?;
        res.push_if(!diff.is_zero(), || format!("leibniz({na}, {nb}, {nc}) residual {diff}"));
    }
    let singles = named.iter().cloned().chain(triples.iter().skip(named.len().pow(3)).map(|t| t[0].clone()));
    for (n, a) in singles {
        let half = Scalar::from_expr(Expr::constant(ratio(1, 2)), sc.order);
        let rhs = GenSection::differential(sc.m, sc.k, &pairing(&a, &a)?).scale(&half);
        let diff = courant(&a, &a)?.add(&rhs.scale(&Scalar::from_expr(Expr::int(-1), sc.order)))?;
        res.push_if(!diff.is_zero(), || format!("[[{n}, {n}]] - d<{n}, {n}>/2 = {diff}"));
    }
    let mut value = None;
    if let Some(f) = frame {
        let verdict = is_dirac(&sc.frames[f], sc.grid)?;
        value = Some(format!("dirac: {}", verdict.is_dirac()));
        if verdict.is_dirac() != expect_dirac {
            res.0.push(match verdict {
                DiracVerdict::Dirac => format!("frame {f} is Dirac, expected otherwise"),
                DiracVerdict::NotDirac(w) => {
                    format!("<[[e{}, e{}]], e{}> = {}", w.i + 1, w.j + 1, w.k + 1, w.value)
                }
            });
        }
    }
    Ok(res.outcome(value))
}

fn transport_cases(fam: &TightFamily, gamma: &PathB) -> Result<Residuals> {
    let mut res = Residuals::default();
    let whole = transport(fam, gamma)?;
    let half = ratio(1, 2);
    let a = transport(fam, &gamma.restrict(&Rational::from_integer(0.into()), &half))?;
    let b = transport(fam, &gamma.restrict(&half, &Rational::from_integer(1.into())))?;
    res.push_if(a.then(&b)? != whole, || "splitting the path at t = 1/2 changes the transport".into());
    let back = transport(fam, &gamma.reversed())?;
    res.push_if(!whole.then(&back)?.is_identity(), || "transport along the reversed path is not the inverse".into());
    let phi = parse_expr("3*t^2 - 2*t^3")?.as_poly().expect("polynomial").clone();
    let re = transport(fam, &gamma.reparameterize(&phi)?)?;
    res.push_if(re != whole, || "reparameterization by 3t^2 - 2t^3 changes the transport".into());
    let (m, _) = fam.dims();
    let monos = test_monomials(m, 2, fam.order());
    let pairs: Vec<(Scalar, Scalar)> = monos.iter().flat_map(|f| monos.iter().map(move |g| (f.clone(), g.clone()))).collect();
    let iso = transport_iso_check(fam, gamma, &pairs)?;
    res.push_if(!iso.ok(), || iso.to_string());
    Ok(res)
}

fn relations(fam: &TightFamily, d: &DiskB) -> Result<Outcome> {
    let mut res = Residuals::default();
    let r1 = relation1_check(fam, d)?;
    res.push_if(!r1.ok(), || format!("relation 1: {}", r1.residual));
    let r2 = relation2_check(fam, d, &d.squeezed())?;
    res.push_if(!r2.ok(), || format!("relation 2: {r2}"));
    let r3 = relation3_check(fam, d, &ratio(1, 3))?;
    res.push_if(!r3.ok(), || format!("relation 3: {r3}"));
    let nat = naturality_check(fam, d)?;
    res.push_if(!nat.ok(), || format!("naturality: {nat}"));
    Ok(res.outcome(Some(r1.element.to_string())))
}

//! Parallel transport along paths in B and holonomy over disks.
//!
//! Flat sections satisfy `∂_a F = −D_a F`, so transport along `γ` is the
//! ordered exponential of `−∫ τ¹(γ′)`. Disks are parameterized by `(s, u)`
//! on the unit square with base corner `(0, 0)`; the boundary is traversed
//! counterclockwise: bottom, right, top, left.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactalg::{Poly, Rational, Scalar, Var};
use crate::family::TightFamily;
use crate::star::{PolyDiffOp, StarProduct};

fn unit_integral(c: &Scalar, v: Var) -> Result<Scalar> {
    c.integrate(v)?.substitute_many(&[(v, Poly::one())])
}

fn eval_point(comps: &[Poly], subs: &[(Var, Rational)]) -> Vec<Rational> {
    comps
        .iter()
        .map(|p| p.eval_partial(subs).as_constant().expect("fully evaluated"))
        .collect()
}

fn require_only(comps: &[Poly], allowed: &[Var], what: &str) -> Result<()> {
    for (a, p) in comps.iter().enumerate() {
        if p.depends_on_any(|v| !allowed.contains(&v)) {
            return Err(Error::Invalid(format!("{what} component {} = {p} uses variables other than {allowed:?}", a + 1)));
        }
    }
    Ok(())
}

/// A polynomial path `t ↦ γ(t)`, `t ∈ [0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PathB {
    comps: Vec<Poly>,
}

impl PathB {
    pub fn new(comps: Vec<Poly>) -> Result<Self> {
        require_only(&comps, &[Var::T], "path")?;
        Ok(PathB { comps })
    }

    /// The straight segment from `a` to `b`.
    pub fn segment(a: &[Rational], b: &[Rational]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch(format!("segment endpoints {} vs {}", a.len(), b.len())));
        }
        let comps = a
            .iter()
            .zip(b)
            .map(|(x, y)| &Poly::constant(x.clone()) + &Poly::var(Var::T).scale(&(y - x)))
            .collect();
        Ok(PathB { comps })
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn components(&self) -> &[Poly] {
        &self.comps
    }

    pub fn at(&self, t: &Rational) -> Vec<Rational> {
        eval_point(&self.comps, &[(Var::T, t.clone())])
    }

    pub fn start(&self) -> Vec<Rational> {
        self.at(&Rational::zero())
    }

    pub fn end(&self) -> Vec<Rational> {
        self.at(&Rational::one())
    }

    /// `t ↦ γ(1 − t)`.
    pub fn reversed(&self) -> Self {
        let flip = &Poly::one() - &Poly::var(Var::T);
        self.compose(&flip)
    }

    /// `t ↦ γ(φ(t))`; `φ` must fix 0 and 1.
    pub fn reparameterize(&self, phi: &Poly) -> Result<Self> {
        require_only(std::slice::from_ref(phi), &[Var::T], "reparameterization")?;
        let at = |t: i64| phi.eval_partial(&[(Var::T, Rational::from_integer(t.into()))]).constant_term();
        if !at(0).is_zero() || !at(1).is_one() {
            return Err(Error::Invalid(format!("reparameterization {phi} must fix 0 and 1")));
        }
        Ok(self.compose(phi))
    }

    /// The piece over `[a, b]`, rescaled to `[0, 1]`.
    pub fn restrict(&self, a: &Rational, b: &Rational) -> Self {
        let phi = &Poly::constant(a.clone()) + &Poly::var(Var::T).scale(&(b - a));
        self.compose(&phi)
    }

    fn compose(&self, phi: &Poly) -> Self {
        PathB { comps: self.comps.iter().map(|p| p.substitute(Var::T, phi)).collect() }
    }
}

/// A polynomial disk `(s, u) ↦ D(s, u)` with base point `D(0, 0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiskB {
    comps: Vec<Poly>,
}

impl DiskB {
    pub fn new(comps: Vec<Poly>) -> Result<Self> {
        require_only(&comps, &[Var::S, Var::U], "disk")?;
        Ok(DiskB { comps })
    }

    /// `D(s, u) = (s, u)` in a two-dimensional B.
    pub fn unit_square() -> Self {
        DiskB { comps: vec![Poly::var(Var::S), Poly::var(Var::U)] }
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn components(&self) -> &[Poly] {
        &self.comps
    }

    pub fn at(&self, s: &Rational, u: &Rational) -> Vec<Rational> {
        eval_point(&self.comps, &[(Var::S, s.clone()), (Var::U, u.clone())])
    }

    pub fn base(&self) -> Vec<Rational> {
        self.at(&Rational::zero(), &Rational::zero())
    }

    /// `D(σ(s,u), υ(s,u))`.
    pub fn compose(&self, sigma: &Poly, upsilon: &Poly) -> Self {
        let subs = [(Var::S, sigma.clone()), (Var::U, upsilon.clone())];
        DiskB { comps: self.comps.iter().map(|p| p.substitute_many(&subs)).collect() }
    }

    fn curve(&self, s: Poly, u: Poly) -> Vec<Poly> {
        self.compose(&s, &u).comps
    }

    /// Boundary edges in traversal order, each as a path in `t`.
    pub fn edges(&self) -> [PathB; 4] {
        let t = Poly::var(Var::T);
        let one_minus_t = &Poly::one() - &t;
        let mk = |s: Poly, u: Poly| PathB { comps: self.curve(s, u) };
        [
            mk(t.clone(), Poly::zero()),
            mk(Poly::one(), t.clone()),
            mk(one_minus_t.clone(), Poly::one()),
            mk(Poly::zero(), one_minus_t),
        ]
    }

    /// The bottom edge from `D(0,0)` to `D(1,0)`.
    pub fn bottom(&self) -> PathB {
        let [b, ..] = self.edges();
        b
    }

    /// The same disk based at `D(1, 0)`: `(s, u) ↦ D(1 − u, s)`.
    pub fn rebased(&self) -> Self {
        self.compose(&(&Poly::one() - &Poly::var(Var::U)), &Poly::var(Var::S))
    }

    /// Halves along `s` at `c`: `D(c s, u)` and `D(c + (1 − c) s, u)`.
    pub fn split(&self, c: &Rational) -> (Self, Self) {
        let s = Poly::var(Var::S);
        let u = Poly::var(Var::U);
        let left = self.compose(&s.scale(c), &u);
        let right = self.compose(&(&Poly::constant(c.clone()) + &s.scale(&(Rational::one() - c))), &u);
        (left, right)
    }

    /// Interior reparameterization that is `s ↦ s²` on the middle line
    /// `u = ½` and the identity on the boundary.
    pub fn squeezed(&self) -> Self {
        let s = Poly::var(Var::S);
        let u = Poly::var(Var::U);
        let bump = (&u * &(&Poly::one() - &u)).scale(&Rational::from_integer(4.into()));
        let sigma = &s + &(&bump * &(&(&s * &s) - &s));
        self.compose(&sigma, &u)
    }
}

/// Truncated Dyson series of `−τ¹(γ′)` along polynomial curve data.
/// The curve is parameterized by `t`; other parameters ride along.
fn dyson(fam: &TightFamily, comps: &[Poly]) -> Result<PolyDiffOp> {
    let h = fam.order();
    let (_, k) = fam.dims();
    if comps.len() != k {
        return Err(Error::DimensionMismatch(format!("path lives in R^{}, B has dimension {k}", comps.len())));
    }
    let subs: Vec<(Var, Poly)> = (1..=k).map(|a| (Var::B(a), comps[a - 1].clone())).collect();
    let mut d = PolyDiffOp::zero(1, h);
    for a in 1..=k {
        let vel = comps[a - 1].derivative(Var::T);
        if vel.is_zero() || fam.connection(a).is_zero() {
            continue;
        }
        let op = fam.connection(a).substitute(&subs)?.scale_by(&Scalar::from_poly(vel, h));
        d = d.add(&op)?;
    }
    let mut total = PolyDiffOp::identity(h);
    let mut kn = PolyDiffOp::identity(h);
    for n in 1..=h {
        let prod = d.then_apply(&kn)?;
        if prod.is_zero() {
            break;
        }
        kn = prod.try_map_coeffs(|c| c.integrate(Var::T))?;
        let at1 = kn.substitute(&[(Var::T, Poly::one())])?;
        total = if n % 2 == 1 { total.sub(&at1)? } else { total.add(&at1)? };
    }
    Ok(total)
}

/// The star product of the fiber over a point of B.
pub fn star_at(fam: &TightFamily, point: &[Rational]) -> Result<StarProduct> {
    let subs: Vec<(Var, Poly)> =
        point.iter().enumerate().map(|(a, r)| (Var::B(a + 1), Poly::constant(r.clone()))).collect();
    StarProduct::new(fam.tau0.substitute(&subs)?)
}

/// A transport isomorphism `A_{from} → A_{to}` as a differential operator.
#[derive(Clone, Debug, PartialEq)]
pub struct Transport {
    pub op: PolyDiffOp,
    pub from: Vec<Rational>,
    pub to: Vec<Rational>,
}

impl Transport {
    pub fn apply(&self, f: &Scalar) -> Scalar {
        self.op.apply(std::slice::from_ref(f)).expect("arity 1")
    }

    /// `next ∘ self`; the endpoints must match.
    pub fn then(&self, next: &Transport) -> Result<Transport> {
        if self.to != next.from {
            return Err(Error::Invalid("transports do not concatenate".into()));
        }
        Ok(Transport { op: next.op.then_apply(&self.op)?, from: self.from.clone(), to: next.to.clone() })
    }

    pub fn is_identity(&self) -> bool {
        self.op == PolyDiffOp::identity(self.op.order())
    }
}

pub fn transport(fam: &TightFamily, gamma: &PathB) -> Result<Transport> {
    Ok(Transport { op: dyson(fam, gamma.components())?, from: gamma.start(), to: gamma.end() })
}

/// Residuals `T(f ⋆ g) − Tf ⋆ Tg`; only nonzero ones are kept.
#[derive(Clone, Debug)]
pub struct IsoReport {
    pub failures: Vec<(usize, Scalar, Scalar, Scalar)>,
}

impl IsoReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for IsoReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            return write!(f, "transport is multiplicative on all pairs");
        }
        for (i, a, b, r) in &self.failures {
            writeln!(f, "pair {i} ({a}, {b}): residual {r}")?;
        }
        Ok(())
    }
}

pub fn transport_iso_check(fam: &TightFamily, gamma: &PathB, pairs: &[(Scalar, Scalar)]) -> Result<IsoReport> {
    let t = transport(fam, gamma)?;
    let s1 = star_at(fam, &t.from)?;
    let s2 = star_at(fam, &t.to)?;
    let mut failures = Vec::new();
    for (i, (f, g)) in pairs.iter().enumerate() {
        let r = &t.apply(&s1.apply(f, g)) - &s2.apply(&t.apply(f), &t.apply(g));
        if !r.is_zero() {
            failures.push((i, f.clone(), g.clone(), r));
        }
    }
    Ok(IsoReport { failures })
}

/// `a = e^λ · unital`, with `unital` invertible of leading coefficient 1.
#[derive(Clone, Debug, PartialEq)]
pub struct HolonomyElement {
    pub lambda: Rational,
    pub unital: Scalar,
}

impl HolonomyElement {
    pub fn trivial(order: usize) -> Self {
        HolonomyElement { lambda: Rational::zero(), unital: Scalar::one(order) }
    }

    pub fn mul(&self, other: &Self, star: &StarProduct) -> Self {
        HolonomyElement { lambda: &self.lambda + &other.lambda, unital: star.apply(&self.unital, &other.unital) }
    }

    /// Transport of the element to another fiber; `λ` is unchanged.
    pub fn transported(&self, t: &Transport) -> Self {
        HolonomyElement { lambda: self.lambda.clone(), unital: t.apply(&self.unital) }
    }
}

impl fmt::Display for HolonomyElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "exp({}) * ({})", self.lambda, self.unital)
    }
}

/// `τ²(∂_s D, ∂_u D)` at `D(s, u)`.
fn pulled_curvature(fam: &TightFamily, disk: &DiskB) -> Result<Scalar> {
    let h = fam.order();
    let (_, k) = fam.dims();
    let c = disk.components();
    let subs: Vec<(Var, Poly)> = (1..=k).map(|a| (Var::B(a), c[a - 1].clone())).collect();
    let mut out = Scalar::zero(h);
    for ((a, b), f) in &fam.tau2 {
        let (a, b) = (*a, *b);
        let jac = &(&c[a - 1].derivative(Var::S) * &c[b - 1].derivative(Var::U))
            - &(&c[b - 1].derivative(Var::S) * &c[a - 1].derivative(Var::U));
        if jac.is_zero() {
            continue;
        }
        out = &out + &(&f.substitute_many(&subs)? * &Scalar::from_poly(jac, h));
    }
    Ok(out)
}

pub fn disk_holonomy(fam: &TightFamily, disk: &DiskB) -> Result<HolonomyElement> {
    let h = fam.order();
    let (_, k) = fam.dims();
    if disk.dim() != k {
        return Err(Error::DimensionMismatch(format!("disk lives in R^{}, B has dimension {k}", disk.dim())));
    }
    if !fam.is_polynomial() {
        return Err(Error::NonPolynomial("holonomy needs polynomial family data".into()));
    }
    let fsu = pulled_curvature(fam, disk)?;
    if fsu.coeff(0).depends_on_any(Var::is_x) {
        return Err(Error::NonCentralCurvature(format!("h^0 curvature {} depends on x", fsu.coeff(0))));
    }
    let (s, u, t) = (Poly::var(Var::S), Poly::var(Var::U), Poly::var(Var::T));
    let back = &Poly::one() - &t;
    // Φ⁻¹: back down the vertical leg, then back along the bottom.
    let w_vert = dyson(fam, &disk.curve(s.clone(), &back * &u))?;
    let w_hor = dyson(fam, &disk.curve(&back * &s, Poly::zero()))?;
    let g = w_hor.apply(&[w_vert.apply(&[fsu])?])?;
    let c = unit_integral(&g, Var::U)?;
    let c0 = c.coeff(0).clone();
    let lambda = unit_integral(&Scalar::from_expr(c0.clone(), h), Var::S)?
        .coeff(0)
        .as_constant()
        .ok_or_else(|| Error::NonCentralCurvature(format!("curvature integral {c0} is not constant")))?;
    let cplus = &c - &Scalar::from_expr(c0, h);
    let star = star_at(fam, &disk.base())?;
    // u′ = u ⋆ c₊, u(0) = 1
    let one = Scalar::one(h);
    let mut unital = one.clone();
    for _ in 0..h {
        let next = &one + &star.apply(&unital, &cplus).integrate(Var::S)?;
        if next == unital {
            break;
        }
        unital = next;
    }
    let unital = unital.substitute_many(&[(Var::S, Poly::one())])?;
    Ok(HolonomyElement { lambda, unital })
}

/// Transport around `∂D` from the base corner.
pub fn boundary_transport(fam: &TightFamily, disk: &DiskB) -> Result<Transport> {
    let [e0, e1, e2, e3] = disk.edges();
    let mut t = transport(fam, &e0)?;
    for e in [e1, e2, e3] {
        t = t.then(&transport(fam, &e)?)?;
    }
    Ok(t)
}

/// `f ↦ a ⋆ f ⋆ a⁻¹`.
pub fn conjugation(star: &StarProduct, a: &Scalar) -> Result<PolyDiffOp> {
    let mu = star.operator();
    let left = mu.insert(0, &PolyDiffOp::function(a.clone()));
    let right = mu.insert(1, &PolyDiffOp::function(star.inverse(a)?));
    left.then_apply(&right)
}

#[derive(Clone, Debug)]
pub struct Relation1Report {
    pub element: HolonomyElement,
    /// `T_{∂D} − Ad(u)` as an operator.
    pub residual: PolyDiffOp,
}

impl Relation1Report {
    pub fn ok(&self) -> bool {
        self.residual.is_zero()
    }

    pub fn on(&self, f: &Scalar) -> Scalar {
        self.residual.apply(std::slice::from_ref(f)).expect("arity 1")
    }
}

pub fn relation1_check(fam: &TightFamily, disk: &DiskB) -> Result<Relation1Report> {
    let element = disk_holonomy(fam, disk)?;
    let loop_t = boundary_transport(fam, disk)?;
    let star = star_at(fam, &disk.base())?;
    let residual = loop_t.op.sub(&conjugation(&star, &element.unital)?)?;
    Ok(Relation1Report { element, residual })
}

/// Two holonomy elements that should agree.
#[derive(Clone, Debug)]
pub struct PairReport {
    pub lhs: HolonomyElement,
    pub rhs: HolonomyElement,
}

impl PairReport {
    pub fn ok(&self) -> bool {
        self.lhs == self.rhs
    }

    pub fn unital_residual(&self) -> Scalar {
        &self.lhs.unital - &self.rhs.unital
    }
}

impl fmt::Display for PairReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} vs {}", self.lhs, self.rhs)
    }
}

/// Homotopy invariance rel boundary; `D` and `D′` must have identical edges.
pub fn relation2_check(fam: &TightFamily, d: &DiskB, d2: &DiskB) -> Result<PairReport> {
    for (i, (e, e2)) in d.edges().iter().zip(d2.edges().iter()).enumerate() {
        if e != e2 {
            return Err(Error::IncompatibleBoundaries(format!("edge {i}: {:?} vs {:?}", e.components(), e2.components())));
        }
    }
    Ok(PairReport { lhs: disk_holonomy(fam, d)?, rhs: disk_holonomy(fam, d2)? })
}

/// Multiplicativity over `D = D₁ ∪ D₂` with `D₁, D₂` the halves at `c`:
/// `a_D = a_{D₁} · T_{γ}⁻¹ a_{D₂}`, `γ` the bottom edge of `D₁`.
pub fn relation3_check(fam: &TightFamily, d: &DiskB, c: &Rational) -> Result<PairReport> {
    if !(c > &Rational::zero() && c < &Rational::one()) {
        return Err(Error::Invalid(format!("split point {c} must lie in (0, 1)")));
    }
    let (d1, d2) = d.split(c);
    let lhs = disk_holonomy(fam, d)?;
    let a1 = disk_holonomy(fam, &d1)?;
    let a2 = disk_holonomy(fam, &d2)?;
    let back = transport(fam, &d1.bottom().reversed())?;
    let star = star_at(fam, &d.base())?;
    Ok(PairReport { lhs, rhs: a1.mul(&a2.transported(&back), &star) })
}

/// Concatenation of two disks that share an edge (`D₁(1, ·) = D₂(0, ·)`).
pub fn concatenation_check(fam: &TightFamily, d1: &DiskB, d2: &DiskB, union: &DiskB) -> Result<PairReport> {
    let (one, zero) = (Poly::one(), Poly::zero());
    let u = Poly::var(Var::U);
    if d1.curve(one.clone(), u.clone()) != d2.curve(zero.clone(), u.clone()) {
        return Err(Error::IncompatibleBoundaries("right edge of D1 differs from left edge of D2".into()));
    }
    let half = Rational::new(1.into(), 2.into());
    let (h1, h2) = union.split(&half);
    if &h1 != d1 || &h2 != d2 {
        return Err(Error::IncompatibleBoundaries("union is not the concatenation of D1 and D2".into()));
    }
    relation3_check(fam, union, &half)
}

/// Naturality `a_{D, b₂} = T_γ a_{D, b₁}` for the base moved along the bottom edge.
pub fn naturality_check(fam: &TightFamily, d: &DiskB) -> Result<PairReport> {
    let a1 = disk_holonomy(fam, d)?;
    let t = transport(fam, &d.bottom())?;
    let a2 = disk_holonomy(fam, &d.rebased())?;
    Ok(PairReport { lhs: a2, rhs: a1.transported(&t) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{parse_scalar, ratio};
    use crate::family::{gauge_family, Generator};
    use crate::geom::MixedMultivector;
    use crate::star::moyal;
    use std::collections::BTreeMap;

    fn s(src: &str, o: usize) -> Scalar {
        parse_scalar(src, o).unwrap()
    }

    fn moyal2(o: usize) -> StarProduct {
        let pi = MixedMultivector::term(2, 0, s("h", o), &[1, 2], &[]).unwrap();
        moyal(&pi).unwrap()
    }

    fn shift_family(o: usize) -> TightFamily {
        let d = PolyDiffOp::vector_field(&[(Var::X(2), s("h", o))], o);
        TightFamily::new(2, 1, moyal2(o).correction().clone(), vec![d], BTreeMap::new()).unwrap()
    }

    fn line() -> PathB {
        PathB::new(vec![Poly::var(Var::T)]).unwrap()
    }

    fn curvature_family(o: usize, f: &str) -> TightFamily {
        let mut t2 = BTreeMap::new();
        t2.insert((1, 2), s(f, o));
        TightFamily::new(2, 2, moyal2(o).correction().clone(), vec![PolyDiffOp::zero(1, o); 2], t2).unwrap()
    }

    #[test]
    fn shift_transport() {
        let fam = shift_family(3);
        let t = transport(&fam, &line()).unwrap();
        assert_eq!(t.apply(&s("x2", 3)), s("x2 - h", 3));
        assert_eq!(t.apply(&s("x2^2", 3)), s("x2^2 - 2*h*x2 + h^2", 3));
        let back = transport(&fam, &line().reversed()).unwrap();
        assert!(t.then(&back).unwrap().is_identity());
    }

    #[test]
    fn holonomy_closed_forms() {
        let a = disk_holonomy(&curvature_family(2, "1"), &DiskB::unit_square()).unwrap();
        assert_eq!(a, HolonomyElement { lambda: Rational::one(), unital: Scalar::one(2) });
        let a = disk_holonomy(&curvature_family(2, "b1"), &DiskB::unit_square()).unwrap();
        assert_eq!(a.lambda, ratio(1, 2));
        let err = disk_holonomy(&curvature_family(2, "x1"), &DiskB::unit_square());
        assert!(matches!(err, Err(Error::NonCentralCurvature(_))));
    }

    #[test]
    fn inner_relation1() {
        let star = moyal2(2);
        let fam = gauge_family(&star, 2, 2, vec![Generator::Inner(s("x1 + h*b2*x1^2", 2)), Generator::Inner(s("x2", 2))], None)
            .unwrap();
        assert!(!fam.tau2.is_empty());
        let r = relation1_check(&fam, &DiskB::unit_square()).unwrap();
        assert!(r.ok(), "{}", r.residual);
        assert!(!r.element.unital.is_zero());
    }
}

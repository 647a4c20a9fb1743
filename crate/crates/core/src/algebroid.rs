//! Cross-sections of a foliated chart `N = M₀ × ℝᵏ` and the algebroid they span.
//!
//! Leaves are the fibers `{y} × ℝᵏ`. The chart carries a Hamiltonian family
//! on `M₀` over `B = ℝᵏ`. Sections are graphs `b = φ(y)`; families of them
//! are graph-type maps `(y, p) ↦ (y, φ_p(y))` whose parameters `p` become the
//! `b` coordinates of the pulled-back family.

use std::fmt;

use num_traits::{One, Zero};

use crate::dirac::{lemma2_degree_check, DomainBox};
use crate::error::{Error, Result};
use crate::exactalg::{check_denominator_on_grid, Poly, Rational, Scalar, Var};
use crate::family::{quantize_family, QuantizeBounds, TightFamily};
use crate::geom::{HamiltonianFamily, MixedMultivector};
use crate::holonomy::{
    conjugation, disk_holonomy, relation1_check, star_at, transport, DiskB, HolonomyElement, PathB, Relation1Report,
    Transport,
};
use crate::star::{PolyDiffOp, StarProduct};

pub type Interval = (Rational, Rational);

/// A rational box in `N`: intervals for `y` and for `b`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartBox {
    pub y: Vec<Interval>,
    pub b: Vec<Interval>,
}

impl ChartBox {
    pub fn new(y: Vec<Interval>, b: Vec<Interval>) -> Result<Self> {
        if let Some((lo, hi)) = y.iter().chain(&b).find(|(lo, hi)| lo > hi) {
            return Err(Error::Invalid(format!("empty interval [{lo}, {hi}]")));
        }
        Ok(ChartBox { y, b })
    }

    /// `[-r, r]` in every coordinate.
    pub fn symmetric(m0: usize, k: usize, r: Rational) -> Self {
        let iv = (-r.clone(), r);
        ChartBox { y: vec![iv.clone(); m0], b: vec![iv; k] }
    }

    pub fn contains(&self, other: &ChartBox) -> bool {
        let inside = |a: &[Interval], b: &[Interval]| {
            a.len() == b.len() && a.iter().zip(b).all(|((lo, hi), (lo2, hi2))| lo <= lo2 && hi2 <= hi)
        };
        inside(&self.y, &other.y) && inside(&self.b, &other.b)
    }

    fn y_domain(&self) -> DomainBox {
        self.y.iter().enumerate().map(|(i, (lo, hi))| (Var::X(i + 1), lo.clone(), hi.clone())).collect()
    }
}

#[derive(Clone, Debug)]
pub struct FoliatedChart {
    family: HamiltonianFamily,
    pub domain: ChartBox,
    /// Grid resolution for the denominator guard.
    pub grid: usize,
}

impl FoliatedChart {
    pub fn new(family: HamiltonianFamily, domain: ChartBox) -> Result<Self> {
        let (m0, k) = family.dims();
        if domain.y.len() != m0 || domain.b.len() != k {
            return Err(Error::DimensionMismatch(format!(
                "chart box has {}+{} intervals, family needs {m0}+{k}",
                domain.y.len(),
                domain.b.len()
            )));
        }
        let report = lemma2_degree_check(family.sigma())?;
        if !report.ok() {
            return Err(Error::DegreeViolation(report.violations.join("; ")));
        }
        if !family.is_maurer_cartan()? {
            return Err(Error::NotMaurerCartan(family.sigma().mc_residual()?.to_string()));
        }
        Ok(FoliatedChart { family, domain, grid: 4 })
    }

    pub fn family(&self) -> &HamiltonianFamily {
        &self.family
    }

    /// `(m₀, k)`.
    pub fn dims(&self) -> (usize, usize) {
        self.family.dims()
    }

    pub fn order(&self) -> usize {
        self.family.order()
    }

    /// The same chart over a smaller box.
    pub fn restricted(&self, domain: &ChartBox) -> Result<Self> {
        if !self.domain.contains(domain) {
            return Err(Error::NotContained("box is not inside the chart".into()));
        }
        Ok(FoliatedChart { family: self.family.clone(), domain: domain.clone(), grid: self.grid })
    }
}

fn require_vars(comps: &[Poly], ok: impl Fn(Var) -> bool + Copy, what: &str) -> Result<()> {
    for (a, p) in comps.iter().enumerate() {
        if p.depends_on_any(|v| !ok(v)) {
            return Err(Error::NonGraph(format!("{what} component {} = {p} has unexpected variables", a + 1)));
        }
    }
    Ok(())
}

/// The graph `b = φ(y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossSection {
    phi: Vec<Poly>,
}

impl CrossSection {
    pub fn new(phi: Vec<Poly>) -> Result<Self> {
        require_vars(&phi, Var::is_x, "cross-section")?;
        Ok(CrossSection { phi })
    }

    pub fn components(&self) -> &[Poly] {
        &self.phi
    }

    /// Whether the graph over the `y`-box of `bx` stays inside its `b`-box.
    pub fn is_inside(&self, bx: &ChartBox) -> bool {
        inside(&self.phi, &bx.y_domain(), &bx.b)
    }
}

fn inside(phi: &[Poly], dom: &DomainBox, b: &[Interval]) -> bool {
    phi.len() == b.len()
        && phi.iter().zip(b).all(|(p, (lo, hi))| {
            let (plo, phi_) = p.range_bound(dom);
            lo <= &plo && &phi_ <= hi
        })
}

/// A leafwise homotopy `φ_t(y)`, `t ∈ [0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SectionHomotopy {
    phi: Vec<Poly>,
}

impl SectionHomotopy {
    pub fn new(phi: Vec<Poly>) -> Result<Self> {
        require_vars(&phi, |v| v.is_x() || v == Var::T, "homotopy")?;
        Ok(SectionHomotopy { phi })
    }

    /// `(1 − t) φ_X + t φ_Y`.
    pub fn straight(x: &CrossSection, y: &CrossSection) -> Result<Self> {
        if x.phi.len() != y.phi.len() {
            return Err(Error::DimensionMismatch("sections of different charts".into()));
        }
        let t = Poly::var(Var::T);
        let phi = x.phi.iter().zip(&y.phi).map(|(a, b)| a + &(&t * &(b - a))).collect();
        Ok(SectionHomotopy { phi })
    }

    pub fn components(&self) -> &[Poly] {
        &self.phi
    }

    fn at(&self, t: i64) -> CrossSection {
        let tv = Poly::int(t);
        CrossSection { phi: self.phi.iter().map(|p| p.substitute(Var::T, &tv)).collect() }
    }

    pub fn start(&self) -> CrossSection {
        self.at(0)
    }

    pub fn end(&self) -> CrossSection {
        self.at(1)
    }

    pub fn reversed(&self) -> Self {
        let flip = &Poly::one() - &Poly::var(Var::T);
        SectionHomotopy { phi: self.phi.iter().map(|p| p.substitute(Var::T, &flip)).collect() }
    }

    fn as_params(&self) -> Vec<Poly> {
        self.phi.iter().map(|p| p.rename(|v| if v == Var::T { Var::B(1) } else { v })).collect()
    }
}

/// A two-parameter family `φ_{s,t}(y)`: `s = 0, 1` give two homotopies and
/// `t = 0, 1` the endpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct HomotopySquare {
    phi: Vec<Poly>,
}

impl HomotopySquare {
    pub fn new(phi: Vec<Poly>) -> Result<Self> {
        require_vars(&phi, |v| v.is_x() || v == Var::T || v == Var::S, "homotopy square")?;
        Ok(HomotopySquare { phi })
    }

    /// `(1 − w(s)) h₁ + w(s) h₂`.
    pub fn blend(h1: &SectionHomotopy, h2: &SectionHomotopy, w: &Poly) -> Result<Self> {
        require_vars(std::slice::from_ref(w), |v| v == Var::S, "blend weight")?;
        let phi = h1.phi.iter().zip(&h2.phi).map(|(a, b)| a + &(w * &(b - a))).collect();
        Self::new(phi)
    }

    /// The square spanned by `X → Y → Z` and `X → Z`: bottom `X→Y`, right
    /// `Y→Z`, top `X→Z`, left constant at `X`.
    pub fn triangle(x: &CrossSection, y: &CrossSection, z: &CrossSection) -> Result<Self> {
        let (s, t) = (Poly::var(Var::S), Poly::var(Var::T));
        let one_s = &Poly::one() - &s;
        let phi = (0..x.phi.len())
            .map(|a| {
                let (px, py, pz) = (&x.phi[a], &y.phi[a], &z.phi[a]);
                px + &(&t * &(&(&one_s * &(py - px)) + &(&s * &(pz - px))))
            })
            .collect();
        Self::new(phi)
    }

    pub fn components(&self) -> &[Poly] {
        &self.phi
    }

    /// The edge `s = c` as a homotopy in `t`.
    pub fn edge(&self, c: i64) -> SectionHomotopy {
        let cv = Poly::int(c);
        SectionHomotopy { phi: self.phi.iter().map(|p| p.substitute(Var::S, &cv)).collect() }
    }

    fn as_params(&self) -> Vec<Poly> {
        let map = |v| match v {
            Var::T => Var::B(1),
            Var::S => Var::B(2),
            v => v,
        };
        self.phi.iter().map(|p| p.rename(map)).collect()
    }
}

type Mat = Vec<Vec<Scalar>>;

fn zeros(r: usize, c: usize, o: usize) -> Mat {
    vec![vec![Scalar::zero(o); c]; r]
}

fn mat_mul(a: &Mat, b: &Mat, o: usize) -> Mat {
    let n = b.first().map_or(0, Vec::len);
    let mut out = zeros(a.len(), n, o);
    for (i, row) in a.iter().enumerate() {
        for (l, x) in row.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[l][j].is_zero() {
                    out[i][j] = &out[i][j] + &(x * &b[l][j]);
                }
            }
        }
    }
    out
}

fn mat_add(a: &Mat, b: &Mat) -> Mat {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect()).collect()
}

/// Inverse of a matrix whose `h⁰` part is unipotent upper block-triangular
/// (`[[I, X], [0, I]]`), by a terminating Neumann series.
fn unipotent_inverse(a: &Mat, split: usize, o: usize) -> Result<Mat> {
    let n = a.len();
    let mut a0 = zeros(n, n, o);
    for i in 0..n {
        for j in 0..n {
            let c = Scalar::from_expr(a[i][j].coeff(0).clone(), o);
            let want_identity = i == j;
            let ok = if i >= split && j < split {
                c.is_zero()
            } else if (i < split) == (j < split) {
                c == if want_identity { Scalar::one(o) } else { Scalar::zero(o) }
            } else {
                true
            };
            if !ok {
                return Err(Error::Invalid(format!("backward image is not a graph at entry ({i}, {j})")));
            }
            a0[i][j] = c;
        }
    }
    // [[I, X], [0, I]]⁻¹ = [[I, −X], [0, I]]
    let mut a0inv = a0.clone();
    for row in a0inv.iter_mut().take(split) {
        for x in row.iter_mut().skip(split) {
            *x = -&*x;
        }
    }
    let nil: Mat = a.iter().zip(&a0).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x - y).collect()).collect();
    let step: Mat = mat_mul(&a0inv, &nil, o).into_iter().map(|r| r.into_iter().map(|x| -&x).collect()).collect();
    let mut term = a0inv.clone();
    let mut acc = a0inv.clone();
    for _ in 0..o {
        term = mat_mul(&step, &term, o);
        if term.iter().all(|r| r.iter().all(Scalar::is_zero)) {
            break;
        }
        acc = mat_add(&acc, &term);
    }
    Ok(acc)
}

/// Backward image of the chart's graph Dirac family along the graph-type map
/// `(y, p) ↦ (y, φ(y, p))`, with `p = (b₁, …, b_{k′})` of the result.
pub fn pullback_family(chart: &FoliatedChart, phi: &[Poly], kp: usize) -> Result<HamiltonianFamily> {
    let (m0, k) = chart.dims();
    let o = chart.order();
    if phi.len() != k {
        return Err(Error::DimensionMismatch(format!("map has {} components, B has dimension {k}", phi.len())));
    }
    require_vars(phi, |v| matches!(v, Var::X(i) if i <= m0) || matches!(v, Var::B(j) if j <= kp), "map")?;
    let sigma = chart.family.sigma();
    let subs: Vec<(Var, Poly)> = (1..=k).map(|a| (Var::B(a), phi[a - 1].clone())).collect();
    let pull = |tm: &[usize], db: &[usize]| sigma.coeff_at(tm, db).substitute_many(&subs);
    let sc = |p: Poly| Scalar::from_poly(p, o);

    let mut pi = zeros(m0, m0, o);
    for i in 1..=m0 {
        for l in i + 1..=m0 {
            let c = pull(&[i, l], &[])?;
            pi[l - 1][i - 1] = -&c;
            pi[i - 1][l - 1] = c;
        }
    }
    let mut fi = zeros(m0, k, o);
    for i in 1..=m0 {
        for a in 1..=k {
            fi[i - 1][a - 1] = pull(&[i], &[a])?;
        }
    }
    let mut om = zeros(k, k, o);
    for a in 1..=k {
        for c in a + 1..=k {
            let v = pull(&[], &[a, c])?;
            om[c - 1][a - 1] = -&v;
            om[a - 1][c - 1] = v;
        }
    }
    let jy: Mat = phi.iter().map(|p| (1..=m0).map(|i| sc(p.derivative(Var::X(i)))).collect()).collect();
    let jp: Mat = phi.iter().map(|p| (1..=kp).map(|j| sc(p.derivative(Var::B(j)))).collect()).collect();
    let tr = |m: &Mat, r: usize, c: usize| -> Mat { (0..c).map(|j| (0..r).map(|i| m[i][j].clone()).collect()).collect() };
    let jyt = tr(&jy, k, m0);
    let fit = tr(&fi, m0, k);

    // Unknowns (ξ, v): ξ′ = ξ + Jyᵀ(−Φᵀξ + Ωv), v = Jy(−Πξ + Φv) + Jp w.
    let n = m0 + k;
    let mut a = zeros(n, n, o);
    let jfit = mat_mul(&jyt, &fit, o);
    let jom = mat_mul(&jyt, &om, o);
    let jpi = mat_mul(&jy, &pi, o);
    let jfi = mat_mul(&jy, &fi, o);
    for i in 0..m0 {
        for l in 0..m0 {
            a[i][l] = if i == l { &Scalar::one(o) - &jfit[i][l] } else { -&jfit[i][l] };
        }
        for c in 0..k {
            a[i][m0 + c] = jom[i][c].clone();
        }
    }
    for r in 0..k {
        for l in 0..m0 {
            a[m0 + r][l] = jpi[r][l].clone();
        }
        for c in 0..k {
            a[m0 + r][m0 + c] = if r == c { &Scalar::one(o) - &jfi[r][c] } else { -&jfi[r][c] };
        }
    }
    let ainv = unipotent_inverse(&a, m0, o)?;

    // Right-hand sides: unit ξ′ vectors, then Jp columns.
    let mut rhs = zeros(n, m0 + kp, o);
    for l in 0..m0 {
        rhs[l][l] = Scalar::one(o);
    }
    for j in 0..kp {
        for r in 0..k {
            rhs[m0 + r][m0 + j] = jp[r][j].clone();
        }
    }
    let z = mat_mul(&ainv, &rhs, o);
    let xi: Mat = z[..m0].to_vec();
    let v: Mat = z[m0..].to_vec();
    let neg = |m: Mat| -> Mat { m.into_iter().map(|r| r.into_iter().map(|x| -&x).collect()).collect() };
    let wy = mat_add(&neg(mat_mul(&pi, &xi, o)), &mat_mul(&fi, &v, o));
    let cov_b = mat_add(&neg(mat_mul(&fit, &xi, o)), &mat_mul(&om, &v, o));
    let cov = mat_mul(&tr(&jp, k, kp), &cov_b, o);

    let mut out = MixedMultivector::zero(m0, kp, o);
    let mut add = |c: &Scalar, tm: &[usize], db: &[usize]| -> Result<()> {
        if !c.is_zero() {
            out = out.add(&MixedMultivector::term(m0, kp, c.clone(), tm, db)?)?;
        }
        Ok(())
    };
    for i in 0..m0 {
        for l in 0..m0 {
            if wy[i][l] != -&wy[l][i] {
                return Err(Error::Invalid(format!("pulled-back bivector is not antisymmetric at ({}, {})", i + 1, l + 1)));
            }
            if i < l {
                add(&-&wy[i][l], &[i + 1, l + 1], &[])?;
            }
        }
        for j in 0..kp {
            let phi_ij = &wy[i][m0 + j];
            if cov[j][i] != -phi_ij {
                return Err(Error::Invalid(format!("pulled-back mixed part is inconsistent at ({}, {})", i + 1, j + 1)));
            }
            add(phi_ij, &[i + 1], &[j + 1])?;
        }
    }
    for j in 0..kp {
        for c in 0..kp {
            if cov[j][m0 + c] != -&cov[c][m0 + j] {
                return Err(Error::Invalid(format!("pulled-back 2-form is not antisymmetric at ({}, {})", j + 1, c + 1)));
            }
            if j < c {
                add(&cov[j][m0 + c], &[], &[j + 1, c + 1])?;
            }
        }
    }

    let mut dom = chart.domain.y_domain();
    dom.extend((1..=kp).map(|j| (Var::B(j), Rational::zero(), Rational::one())));
    for (_, c) in out.terms() {
        for e in c.coeffs() {
            check_denominator_on_grid(&e.denominator(), &dom, chart.grid)?;
        }
    }
    let fam = HamiltonianFamily::new(out)?;
    let report = lemma2_degree_check(fam.sigma())?;
    if !report.ok() {
        return Err(Error::DegreeViolation(report.violations.join("; ")));
    }
    if !fam.is_maurer_cartan()? {
        return Err(Error::NotMaurerCartan(fam.sigma().mc_residual()?.to_string()));
    }
    Ok(fam)
}

fn quantize_over(chart: &FoliatedChart, phi: &[Poly], kp: usize, bounds: Option<QuantizeBounds>) -> Result<TightFamily> {
    Ok(quantize_family(&pullback_family(chart, phi, kp)?, bounds)?.family)
}

/// The quantized function algebra of a cross-section.
pub fn quantize_section(chart: &FoliatedChart, x: &CrossSection, bounds: Option<QuantizeBounds>) -> Result<StarProduct> {
    Ok(quantize_over(chart, &x.phi, 0, bounds)?.star())
}

/// All monomials in `x₁..x_m` of total degree `≤ d`, as scalars.
pub fn test_monomials(m: usize, d: u32, o: usize) -> Vec<Scalar> {
    let mut out = vec![crate::exactalg::Monomial::one()];
    for i in 1..=m {
        let mut next = Vec::new();
        for mono in &out {
            for e in 0..=d - mono.degree() {
                next.push(mono.mul(&crate::exactalg::Monomial::var_pow(Var::X(i), e)));
            }
        }
        out = next;
    }
    out.sort();
    out.into_iter().map(|mono| Scalar::from_poly(Poly::term(Rational::one(), mono), o)).collect()
}

/// `Hom(X, Y)`, the graph of the transport isomorphism along a homotopy.
#[derive(Clone, Debug)]
pub struct HomDatum {
    pub source: CrossSection,
    pub target: CrossSection,
    pub homotopy: SectionHomotopy,
    pub family: TightFamily,
    pub iso: Transport,
    pub source_star: StarProduct,
    pub target_star: StarProduct,
}

impl HomDatum {
    /// The composite `Hom(X, Y) × Hom(Y, Z) → Hom(X, Z)` as an operator.
    pub fn then(&self, next: &HomDatum) -> Result<PolyDiffOp> {
        if self.target != next.source {
            return Err(Error::IncompatibleBoundaries("homs do not compose".into()));
        }
        next.iso.op.then_apply(&self.iso.op)
    }

    /// Failures of endpoint coherence: the family's end fibers against the
    /// sections' own quantizations, and multiplicativity on monomial pairs.
    pub fn coherence_failures(&self, degree: u32) -> Vec<String> {
        let mut out = Vec::new();
        let s0 = star_at(&self.family, &[Rational::zero()]).expect("validated family");
        let s1 = star_at(&self.family, &[Rational::one()]).expect("validated family");
        if s0.correction() != self.source_star.correction() {
            out.push("fiber at t=0 differs from the source quantization".to_string());
        }
        if s1.correction() != self.target_star.correction() {
            out.push("fiber at t=1 differs from the target quantization".to_string());
        }
        let (m0, _) = self.family.dims();
        let monos = test_monomials(m0, degree, self.family.order());
        for f in &monos {
            for g in &monos {
                let lhs = self.iso.apply(&self.source_star.apply(f, g));
                let rhs = self.target_star.apply(&self.iso.apply(f), &self.iso.apply(g));
                if lhs != rhs {
                    out.push(format!("T({f} * {g}) - T({f}) * T({g}) = {}", &lhs - &rhs));
                }
            }
        }
        out
    }
}

pub fn hom_build(
    chart: &FoliatedChart,
    x: &CrossSection,
    y: &CrossSection,
    h: &SectionHomotopy,
    bounds: Option<QuantizeBounds>,
) -> Result<HomDatum> {
    if &h.start() != x || &h.end() != y {
        return Err(Error::IncompatibleBoundaries("homotopy endpoints differ from the sections".into()));
    }
    let family = quantize_over(chart, &h.as_params(), 1, bounds)?;
    let iso = transport(&family, &PathB::new(vec![Poly::var(Var::T)])?)?;
    Ok(HomDatum {
        source: x.clone(),
        target: y.clone(),
        homotopy: h.clone(),
        family,
        iso,
        source_star: quantize_section(chart, x, bounds)?,
        target_star: quantize_section(chart, y, bounds)?,
    })
}

/// Holonomy over a homotopy square, with its relation-1 certificate.
#[derive(Clone, Debug)]
pub struct Identification {
    pub family: TightFamily,
    pub element: HolonomyElement,
    pub relation1: Relation1Report,
}

fn square_holonomy(chart: &FoliatedChart, sq: &HomotopySquare, bounds: Option<QuantizeBounds>) -> Result<Identification> {
    let family = quantize_over(chart, &sq.as_params(), 2, bounds)?;
    let disk = DiskB::unit_square();
    let element = disk_holonomy(&family, &disk)?;
    let relation1 = relation1_check(&family, &disk)?;
    Ok(Identification { family, element, relation1 })
}

/// The element of `Hom(X, X)` identifying the two `Hom(X, Y)` built from
/// the edges `s = 0, 1` of the square.
pub fn hom_identify(
    chart: &FoliatedChart,
    x: &CrossSection,
    y: &CrossSection,
    sq: &HomotopySquare,
    bounds: Option<QuantizeBounds>,
) -> Result<Identification> {
    let t = Poly::var(Var::T);
    let (s0, s1) = (Poly::zero(), Poly::one());
    let at = |s: &Poly, tt: &Poly| -> Vec<Poly> {
        sq.phi.iter().map(|p| p.substitute_many(&[(Var::S, s.clone()), (Var::T, tt.clone())])).collect()
    };
    let s = Poly::var(Var::S);
    if at(&s, &s0) != x.phi || at(&s, &s1) != y.phi {
        return Err(Error::IncompatibleBoundaries("square is not constant on its t = 0, 1 edges".into()));
    }
    if sq.edge(0).start() != *x || sq.edge(1).end() != *y || at(&s0, &t).len() != x.phi.len() {
        return Err(Error::IncompatibleBoundaries("square edges do not join X to Y".into()));
    }
    square_holonomy(chart, sq, bounds)
}

/// Restriction from `U` to `V ⊂ U`: the straight leafwise homotopy from `X`
/// (over `V`) to `Y` (over `U`), over the `y`-box of `V`.
pub fn restriction_hom(
    chart: &FoliatedChart,
    v: &ChartBox,
    u: &ChartBox,
    x: &CrossSection,
    y: &CrossSection,
    bounds: Option<QuantizeBounds>,
) -> Result<HomDatum> {
    if !chart.domain.contains(u) || !u.contains(v) {
        return Err(Error::NotContained("boxes must be nested V ⊂ U ⊂ chart".into()));
    }
    if !x.is_inside(v) {
        return Err(Error::NotContained("X leaves V".into()));
    }
    if !y.is_inside(u) {
        return Err(Error::NotContained("Y leaves U".into()));
    }
    let h = SectionHomotopy::straight(x, y)?;
    let mut dom = v.y_domain();
    dom.push((Var::T, Rational::zero(), Rational::one()));
    if !inside(&h.phi, &dom, &u.b) {
        return Err(Error::NotContained("homotopy not contained in U".into()));
    }
    let local = chart.restricted(&ChartBox { y: v.y.clone(), b: u.b.clone() })?;
    hom_build(&local, x, y, &h, bounds)
}

/// Coherence over `V ⊂ U ⊂ W` with sections `X, Y, Z`.
#[derive(Clone, Debug)]
pub struct TripleReport {
    pub xy: HomDatum,
    pub yz: HomDatum,
    pub xz: HomDatum,
    pub identification: Identification,
    /// `T_{YZ} T_{XY} − T_{XZ} Ad(u)`.
    pub residual: PolyDiffOp,
}

impl TripleReport {
    pub fn ok(&self) -> bool {
        self.residual.is_zero() && self.identification.relation1.ok()
    }
}

impl fmt::Display for TripleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            write!(f, "composite equals direct up to Ad({})", self.identification.element.unital)
        } else {
            write!(f, "residual {}", self.residual)
        }
    }
}

#[allow(clippy::too_many_arguments)]
pub fn triple_coherence(
    chart: &FoliatedChart,
    v: &ChartBox,
    u: &ChartBox,
    w: &ChartBox,
    x: &CrossSection,
    y: &CrossSection,
    z: &CrossSection,
    bounds: Option<QuantizeBounds>,
) -> Result<TripleReport> {
    if !w.contains(u) {
        return Err(Error::NotContained("boxes must be nested U ⊂ W".into()));
    }
    let xy = restriction_hom(chart, v, u, x, y, bounds)?;
    let yz = restriction_hom(chart, v, w, y, z, bounds)?;
    let xz = restriction_hom(chart, v, w, x, z, bounds)?;
    let local = chart.restricted(&ChartBox { y: v.y.clone(), b: w.b.clone() })?;
    let identification = square_holonomy(&local, &HomotopySquare::triangle(x, y, z)?, bounds)?;
    let composite = xy.then(&yz)?;
    let ad = conjugation(&xy.source_star, &identification.element.unital)?;
    let residual = composite.sub(&xz.iso.op.then_apply(&ad)?)?;
    Ok(TripleReport { xy, yz, xz, identification, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{parse_expr, parse_scalar, rat};

    fn p(src: &str) -> Poly {
        parse_expr(src).unwrap().as_poly().unwrap().clone()
    }

    fn chart(m0: usize, k: usize, o: usize, terms: &[(&str, &[usize], &[usize])]) -> FoliatedChart {
        let mut sigma = MixedMultivector::zero(m0, k, o);
        for (c, tm, db) in terms {
            let t = MixedMultivector::term(m0, k, parse_scalar(c, o).unwrap(), tm, db).unwrap();
            sigma = sigma.add(&t).unwrap();
        }
        FoliatedChart::new(HamiltonianFamily::new(sigma).unwrap(), ChartBox::symmetric(m0, k, rat(4))).unwrap()
    }

    #[test]
    fn point_pullback_is_substitution() {
        let c = chart(2, 1, 2, &[("h + h^2*b1/(1+b1)", &[1, 2], &[]), ("h*x1/(1+b1)^2", &[1], &[1])]);
        let x = CrossSection::new(vec![p("1")]).unwrap();
        let f = pullback_family(&c, x.components(), 0).unwrap();
        assert_eq!(f.sigma().coeff_at(&[1, 2], &[]), parse_scalar("h + h^2/2", 2).unwrap());
        let c = chart(2, 2, 2, &[("h", &[1, 2], &[]), ("b1^2 + b2", &[], &[1, 2])]);
        let y = CrossSection::new(vec![p("x1"), p("0")]).unwrap();
        let f = pullback_family(&c, y.components(), 0).unwrap();
        assert_eq!(f.sigma().coeff_at(&[1, 2], &[]), parse_scalar("h", 2).unwrap());
    }

    #[test]
    fn shift_hom() {
        let c = chart(2, 1, 2, &[("h", &[1, 2], &[]), ("h", &[2], &[1])]);
        let x = CrossSection::new(vec![p("0")]).unwrap();
        let y = CrossSection::new(vec![p("1")]).unwrap();
        let hom = hom_build(&c, &x, &y, &SectionHomotopy::straight(&x, &y).unwrap(), None).unwrap();
        assert_eq!(hom.iso.apply(&parse_scalar("x2", 2).unwrap()), parse_scalar("x2 - h", 2).unwrap());
        assert!(hom.coherence_failures(2).is_empty());
        let constant = SectionHomotopy::straight(&x, &x).unwrap();
        assert!(hom_build(&c, &x, &x, &constant, None).unwrap().iso.is_identity());
    }

    #[test]
    fn pullback_rejects_non_graph_maps() {
        let c = chart(2, 1, 2, &[("h", &[1, 2], &[])]);
        assert!(matches!(pullback_family(&c, &[p("b1 + b2")], 1), Err(Error::NonGraph(_))));
        assert!(matches!(CrossSection::new(vec![p("t")]), Err(Error::NonGraph(_))));
    }
}

//! Linear Dirac geometry on a coordinate chart `N = ℝ^m × ℝ^k`, and the
//! correspondence between Maurer–Cartan elements and Dirac structures.
//!
//! Coordinates are ordered `x_1 … x_m, b_1 … b_k`; a [`GenSection`] stores
//! its vector part and covector part in that order.

use std::fmt;

use crate::error::{Error, Result};
use crate::exactalg::{check_denominator_on_grid, linalg, rat, ratio, Rational, Scalar, Var};
use crate::geom::MixedMultivector;

/// A section `(u, α)` of `(T ⊕ T*)N`.
#[derive(Clone, PartialEq, Eq)]
pub struct GenSection {
    m: usize,
    k: usize,
    pub vector: Vec<Scalar>,
    pub covector: Vec<Scalar>,
}

pub(crate) fn coord(m: usize, i: usize) -> Var {
    if i < m {
        Var::X(i + 1)
    } else {
        Var::B(i - m + 1)
    }
}

impl GenSection {
    pub fn zero(m: usize, k: usize, order: usize) -> Self {
        let z = vec![Scalar::zero(order); m + k];
        GenSection { m, k, vector: z.clone(), covector: z }
    }

    pub fn new(m: usize, k: usize, vector: Vec<Scalar>, covector: Vec<Scalar>) -> Result<Self> {
        if vector.len() != m + k || covector.len() != m + k {
            return Err(Error::DimensionMismatch(format!(
                "section needs {} vector and covector entries, got {} and {}",
                m + k,
                vector.len(),
                covector.len()
            )));
        }
        Ok(GenSection { m, k, vector, covector })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.m, self.k)
    }

    pub fn order(&self) -> usize {
        self.vector.iter().chain(&self.covector).map(Scalar::order).min().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.vector.iter().chain(&self.covector).all(Scalar::is_zero)
    }

    fn n(&self) -> usize {
        self.m + self.k
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", self.dims(), other.dims())));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let zip = |a: &[Scalar], b: &[Scalar]| a.iter().zip(b).map(|(x, y)| x + y).collect();
        Ok(GenSection {
            m: self.m,
            k: self.k,
            vector: zip(&self.vector, &other.vector),
            covector: zip(&self.covector, &other.covector),
        })
    }

    pub fn scale(&self, f: &Scalar) -> Self {
        GenSection {
            m: self.m,
            k: self.k,
            vector: self.vector.iter().map(|c| c * f).collect(),
            covector: self.covector.iter().map(|c| c * f).collect(),
        }
    }

    /// The exact 1-form `df` as a section `(0, df)`.
    pub fn differential(m: usize, k: usize, f: &Scalar) -> Self {
        let mut out = GenSection::zero(m, k, f.order());
        for j in 0..m + k {
            out.covector[j] = f.derivative(coord(m, j));
        }
        out
    }
}

impl fmt::Display for GenSection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: &[Scalar], pre: &str| -> String {
            let parts: Vec<String> = v
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| {
                    let name = coord(self.m, i).to_string();
                    format!("({c})*{pre}{name}")
                })
                .collect();
            if parts.is_empty() {
                "0".into()
            } else {
                parts.join(" + ")
            }
        };
        write!(f, "({}, {})", show(&self.vector, "d/d"), show(&self.covector, "d"))
    }
}

impl fmt::Debug for GenSection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `⟨(u, α), (v, β)⟩ = α(v) + β(u)`.
pub fn pairing(a: &GenSection, b: &GenSection) -> Result<Scalar> {
    a.check(b)?;
    let mut acc = Scalar::zero(a.order().min(b.order()));
    for j in 0..a.n() {
        acc = &acc + &(&a.covector[j] * &b.vector[j]);
        acc = &acc + &(&b.covector[j] * &a.vector[j]);
    }
    Ok(acc)
}

/// `[[(u, α), (v, β)]] = ([u, v], L_u β − i_v dα)`.
pub fn courant(a: &GenSection, b: &GenSection) -> Result<GenSection> {
    a.check(b)?;
    let (m, n) = (a.m, a.n());
    let mut out = GenSection::zero(a.m, a.k, a.order().min(b.order()));
    let d = |f: &Scalar, i: usize| f.derivative(coord(m, i));
    for j in 0..n {
        let mut vj = Scalar::zero(out.order());
        let mut cj = Scalar::zero(out.order());
        for i in 0..n {
            vj = &vj + &(&a.vector[i] * &d(&b.vector[j], i));
            vj = &vj - &(&b.vector[i] * &d(&a.vector[j], i));
            cj = &cj + &(&a.vector[i] * &d(&b.covector[j], i));
            cj = &cj + &(&b.covector[i] * &d(&a.vector[i], j));
            let curl = &d(&a.covector[j], i) - &d(&a.covector[i], j);
            cj = &cj - &(&b.vector[i] * &curl);
        }
        out.vector[j] = vj;
        out.covector[j] = cj;
    }
    Ok(out)
}

/// A rational box `[lo, hi]` per chart coordinate.
pub type DomainBox = Vec<(Var, Rational, Rational)>;

/// `[-1, 1]` in every coordinate of the chart.
pub fn unit_box(m: usize, k: usize) -> DomainBox {
    (0..m + k).map(|i| (coord(m, i), rat(-1), rat(1))).collect()
}

/// Candidate frame of a maximal isotropic subbundle.
#[derive(Clone, Debug, PartialEq)]
pub struct DiracFrame {
    m: usize,
    k: usize,
    pub sections: Vec<GenSection>,
    pub domain: DomainBox,
}

impl DiracFrame {
    pub fn new(m: usize, k: usize, sections: Vec<GenSection>) -> Result<Self> {
        Self::with_domain(m, k, sections, unit_box(m, k))
    }

    pub fn with_domain(m: usize, k: usize, sections: Vec<GenSection>, domain: DomainBox) -> Result<Self> {
        if sections.len() != m + k {
            return Err(Error::DimensionMismatch(format!(
                "a frame on a {}-dimensional chart needs {} sections, got {}",
                m + k,
                m + k,
                sections.len()
            )));
        }
        for s in &sections {
            if s.dims() != (m, k) {
                return Err(Error::DimensionMismatch(format!("section on chart {:?}, frame on {:?}", s.dims(), (m, k))));
            }
        }
        Ok(DiracFrame { m, k, sections, domain })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.m, self.k)
    }

    /// First pair with nonzero pairing, if any.
    pub fn isotropy_defect(&self) -> Result<Option<(usize, usize, Scalar)>> {
        for i in 0..self.sections.len() {
            for j in i..self.sections.len() {
                let p = pairing(&self.sections[i], &self.sections[j])?;
                if !p.is_zero() {
                    return Ok(Some((i, j, p)));
                }
            }
        }
        Ok(None)
    }

    /// Checks denominators and the rank of the h^0 frame on the regular
    /// `(grid+1)^n` grid over the domain box.
    pub fn check_rank_on_grid(&self, grid: usize) -> Result<()> {
        let n = self.m + self.k;
        for s in &self.sections {
            for c in s.vector.iter().chain(&s.covector) {
                for e in c.coeffs() {
                    check_denominator_on_grid(&e.denominator(), &self.domain, grid)?;
                }
            }
        }
        let g = grid.max(1);
        let dims = self.domain.len();
        let mut idx = vec![0usize; dims];
        loop {
            let point: Vec<(Var, Rational)> = self
                .domain
                .iter()
                .zip(&idx)
                .map(|((v, lo, hi), &i)| (*v, lo + (hi - lo) * ratio(i as i64, g as i64)))
                .collect();
            let at = |v: Var| point.iter().find(|(w, _)| *w == v).map(|(_, r)| r.clone()).unwrap_or_else(|| rat(0));
            let mut rows = Vec::with_capacity(n);
            for s in &self.sections {
                let mut row = Vec::with_capacity(2 * n);
                for c in s.vector.iter().chain(&s.covector) {
                    row.push(c.coeff(0).eval(&at).map_err(|_| {
                        Error::DenominatorGuard(format!("coefficient {c} undefined at {point:?}"))
                    })?);
                }
                rows.push(row);
            }
            let r = linalg::rank(rows);
            if r < n {
                return Err(Error::DegenerateFrame(format!("rank {r} < {n} at {point:?}")));
            }
            let mut t = 0;
            loop {
                if t == dims {
                    return Ok(());
                }
                idx[t] += 1;
                if idx[t] <= g {
                    break;
                }
                idx[t] = 0;
                t += 1;
            }
        }
    }
}

/// Witness that a frame is not Courant-closed: `⟨[[e_i, e_j]], e_k⟩ ≠ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiracResidual {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub bracket: GenSection,
    pub value: Scalar,
}

#[derive(Clone, Debug, PartialEq)]
pub enum DiracVerdict {
    Dirac,
    NotDirac(DiracResidual),
}

impl DiracVerdict {
    pub fn is_dirac(&self) -> bool {
        matches!(self, DiracVerdict::Dirac)
    }
}

/// Courant closure of an isotropic frame of full rank.
///
/// A maximal isotropic `L` equals its orthogonal, so `[[e_i, e_j]] ∈ L`
/// iff `⟨[[e_i, e_j]], e_k⟩ = 0` for every `k`. For isotropic frames the
/// bracket is skew on frame elements, so pairs `i < j` suffice.
pub fn is_dirac(frame: &DiracFrame, grid: usize) -> Result<DiracVerdict> {
    if let Some((i, j, p)) = frame.isotropy_defect()? {
        return Err(Error::Invalid(format!("frame is not isotropic: <e{}, e{}> = {p}", i + 1, j + 1)));
    }
    frame.check_rank_on_grid(grid)?;
    closure_verdict(frame)
}

fn closure_verdict(frame: &DiracFrame) -> Result<DiracVerdict> {
    let s = &frame.sections;
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            let br = courant(&s[i], &s[j])?;
            for (k, e) in s.iter().enumerate() {
                let v = pairing(&br, e)?;
                if !v.is_zero() {
                    return Ok(DiracVerdict::NotDirac(DiracResidual { i, j, k, bracket: br, value: v }));
                }
            }
        }
    }
    Ok(DiracVerdict::Dirac)
}

/// Graph of `σ = π + φ + ω` over `T*M ⊕ TB`.
///
/// Writing `Π^{ij}`, `Φ^i_a`, `Ω_{ab}` for the coefficients of `∂_i∧∂_j`,
/// `db_a∧∂_i`, `db_a∧db_b`, the section over `(ξ, v)` is
/// `(−Π^{ij} ξ_j + Φ^i_a v^a, ξ; v, −Φ^i_a ξ_i + Ω_{ab} v^b)`.
pub fn sigma_to_graph(sigma: &MixedMultivector) -> Result<DiracFrame> {
    let (m, k) = sigma.dims();
    for (l, _) in sigma.terms() {
        if l.p() + l.q() != 2 {
            return Err(Error::DegreeViolation(format!(
                "bidegree ({}, {}) term in a degree-1 element",
                l.p(),
                l.q()
            )));
        }
    }
    let o = sigma.order();
    let pi = |i: usize, j: usize| -> Scalar {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Less => sigma.coeff_at(&[i, j], &[]),
            Greater => -&sigma.coeff_at(&[j, i], &[]),
            Equal => Scalar::zero(o),
        }
    };
    let phi = |i: usize, a: usize| sigma.coeff_at(&[i], &[a]);
    let omega = |a: usize, b: usize| -> Scalar {
        use std::cmp::Ordering::*;
        match a.cmp(&b) {
            Less => sigma.coeff_at(&[], &[a, b]),
            Greater => -&sigma.coeff_at(&[], &[b, a]),
            Equal => Scalar::zero(o),
        }
    };
    let mut sections = Vec::with_capacity(m + k);
    for l in 1..=m {
        let mut s = GenSection::zero(m, k, o);
        for i in 1..=m {
            s.vector[i - 1] = -&pi(i, l);
        }
        s.covector[l - 1] = Scalar::one(o);
        for a in 1..=k {
            s.covector[m + a - 1] = -&phi(l, a);
        }
        sections.push(s);
    }
    for c in 1..=k {
        let mut s = GenSection::zero(m, k, o);
        for i in 1..=m {
            s.vector[i - 1] = phi(i, c);
        }
        s.vector[m + c - 1] = Scalar::one(o);
        for a in 1..=k {
            s.covector[m + a - 1] = omega(a, c);
        }
        sections.push(s);
    }
    let frame = DiracFrame::new(m, k, sections)?;
    debug_assert!(frame.isotropy_defect().ok().flatten().is_none());
    Ok(frame)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lemma1Report {
    pub mc_residual_zero: bool,
    pub graph_is_dirac: bool,
}

impl Lemma1Report {
    pub fn agree(&self) -> bool {
        self.mc_residual_zero == self.graph_is_dirac
    }
}

/// Computes both sides of the MC ↔ Dirac correspondence independently.
pub fn lemma1_equivalence(sigma: &MixedMultivector, domain: Option<DomainBox>, grid: usize) -> Result<Lemma1Report> {
    let mc = sigma.mc_residual()?.is_zero();
    let mut frame = sigma_to_graph(sigma)?;
    if let Some(d) = domain {
        frame.domain = d;
    }
    let dirac = is_dirac(&frame, grid)?.is_dirac();
    Ok(Lemma1Report { mc_residual_zero: mc, graph_is_dirac: dirac })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lemma2Report {
    pub violations: Vec<String>,
    /// The h^0 part of σ, a leafwise 2-form along B.
    pub leafwise_form: MixedMultivector,
    /// The h^0 graph has vector parts only along B, so its leaves are `{x} × B`.
    pub leaves_along_b: bool,
    /// The h^0 graph is Courant-closed.
    pub leafwise_dirac: bool,
}

impl Lemma2Report {
    pub fn ok(&self) -> bool {
        self.violations.is_empty() && self.leaves_along_b && self.leafwise_dirac
    }
}

/// Degree conditions of the h-weighted DGLA and the shape of `C(0)`.
pub fn lemma2_degree_check(sigma: &MixedMultivector) -> Result<Lemma2Report> {
    let mut violations = Vec::new();
    for (l, c) in sigma.terms() {
        let (p, q) = (l.p(), l.q());
        let legs: Vec<String> = l
            .db_indices()
            .iter()
            .map(|a| format!("db{a}"))
            .chain(l.tm_indices().iter().map(|i| format!("D{i}")))
            .collect();
        let name = legs.join("^");
        if p + q != 2 {
            violations.push(format!("term {name} has bidegree ({p},{q})"));
        } else if p > 0 && !c.coeff(0).is_zero() {
            violations.push(format!("({p},{q}) term {name} has h^0 coefficient {}", c.coeff(0)));
        }
    }
    let zeroth = sigma.hbar_coeff(0);
    let leafwise_form = zeroth.component(0, 2);
    if !violations.is_empty() {
        return Ok(Lemma2Report { violations, leafwise_form, leaves_along_b: false, leafwise_dirac: false });
    }
    let frame = sigma_to_graph(&zeroth)?;
    let m = frame.m;
    let leaves_along_b = frame.sections.iter().all(|s| s.vector[..m].iter().all(Scalar::is_zero));
    let leafwise_dirac = closure_verdict(&frame)?.is_dirac();
    if !leafwise_dirac {
        violations.push(format!("h^0 part {leafwise_form} is not closed along B"));
    }
    Ok(Lemma2Report { violations, leafwise_form, leaves_along_b, leafwise_dirac })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::parse_scalar;

    fn s(src: &str) -> Scalar {
        parse_scalar(src, 0).unwrap()
    }

    fn sec(m: usize, vector: &[&str], covector: &[&str]) -> GenSection {
        let k = vector.len() - m;
        GenSection::new(m, k, vector.iter().map(|c| s(c)).collect(), covector.iter().map(|c| s(c)).collect()).unwrap()
    }

    fn mv(m: usize, k: usize, order: usize, terms: &[(&str, &[usize], &[usize])]) -> MixedMultivector {
        let mut out = MixedMultivector::zero(m, k, order);
        for (c, tm, db) in terms {
            let t = MixedMultivector::term(m, k, parse_scalar(c, order).unwrap(), tm, db).unwrap();
            out = out.add(&t).unwrap();
        }
        out
    }

    #[test]
    fn pairing_examples() {
        let a = sec(2, &["1", "0"], &["0", "0"]);
        let b = sec(2, &["0", "1"], &["0", "0"]);
        assert!(pairing(&a, &b).unwrap().is_zero());
        let a = sec(2, &["1", "0"], &["0", "1"]);
        let b = sec(2, &["0", "1"], &["1", "0"]);
        assert_eq!(pairing(&a, &b).unwrap(), s("2"));
        let a = sec(1, &["x1"], &["1"]);
        assert_eq!(pairing(&a, &a).unwrap(), s("2*x1"));
    }

    #[test]
    fn courant_examples() {
        let a = sec(2, &["1", "0"], &["0", "0"]);
        let b = sec(2, &["0", "x1"], &["0", "0"]);
        assert_eq!(courant(&a, &b).unwrap(), sec(2, &["0", "1"], &["0", "0"]));
        let a = sec(2, &["0", "0"], &["1", "0"]);
        let b = sec(2, &["0", "0"], &["0", "1"]);
        assert!(courant(&a, &b).unwrap().is_zero());
        let a = sec(2, &["1", "0"], &["0", "0"]);
        let b = sec(2, &["0", "0"], &["0", "x1"]);
        assert_eq!(courant(&a, &b).unwrap(), sec(2, &["0", "0"], &["0", "1"]));
    }

    #[test]
    fn graph_examples() {
        let zero = MixedMultivector::zero(2, 1, 0);
        let f = sigma_to_graph(&zero).unwrap();
        assert_eq!(f.sections[0], sec(2, &["0", "0", "0"], &["1", "0", "0"]));
        assert_eq!(f.sections[2], sec(2, &["0", "0", "1"], &["0", "0", "0"]));

        let pi = mv(2, 0, 0, &[("1", &[1, 2], &[])]);
        let f = sigma_to_graph(&pi).unwrap();
        assert_eq!(f.sections[0], sec(2, &["0", "1"], &["1", "0"]));
        assert_eq!(f.sections[1], sec(2, &["-1", "0"], &["0", "1"]));

        let om = mv(0, 2, 0, &[("1", &[], &[1, 2])]);
        let f = sigma_to_graph(&om).unwrap();
        assert_eq!(f.sections[0], sec(0, &["1", "0"], &["0", "-1"]));
        assert_eq!(f.sections[1], sec(0, &["0", "1"], &["1", "0"]));
    }

    #[test]
    fn dirac_examples() {
        let pi = mv(2, 0, 0, &[("3", &[1, 2], &[])]);
        assert!(is_dirac(&sigma_to_graph(&pi).unwrap(), 2).unwrap().is_dirac());
        let tn: Vec<GenSection> = (0..3)
            .map(|i| {
                let mut g = GenSection::zero(3, 0, 0);
                g.vector[i] = Scalar::one(0);
                g
            })
            .collect();
        assert!(is_dirac(&DiracFrame::new(3, 0, tn).unwrap(), 2).unwrap().is_dirac());
        let bad = mv(3, 0, 0, &[("x3", &[1, 2], &[]), ("x2", &[2, 3], &[])]);
        match is_dirac(&sigma_to_graph(&bad).unwrap(), 2).unwrap() {
            DiracVerdict::NotDirac(r) => assert!(!r.value.is_zero()),
            DiracVerdict::Dirac => panic!("non-Poisson bivector accepted"),
        }
    }

    #[test]
    fn degenerate_frame_is_reported() {
        let mut a = GenSection::zero(2, 0, 0);
        a.vector[0] = s("x1");
        let mut b = GenSection::zero(2, 0, 0);
        b.vector[1] = Scalar::one(0);
        let f = DiracFrame::new(2, 0, vec![a, b]).unwrap();
        assert!(matches!(is_dirac(&f, 2), Err(Error::DegenerateFrame(_))));
    }

    #[test]
    fn lemma1_examples() {
        let good = mv(2, 2, 2, &[("h", &[1, 2], &[]), ("b1^2 + b2", &[], &[1, 2])]);
        let r = lemma1_equivalence(&good, None, 2).unwrap();
        assert!(r.mc_residual_zero && r.graph_is_dirac);
        let bad = mv(3, 0, 2, &[("h*x3", &[1, 2], &[]), ("h*x2", &[2, 3], &[])]);
        let r = lemma1_equivalence(&bad, None, 2).unwrap();
        assert!(!r.mc_residual_zero && !r.graph_is_dirac);
        let r = lemma1_equivalence(&MixedMultivector::zero(2, 1, 2), None, 2).unwrap();
        assert!(r.mc_residual_zero && r.graph_is_dirac);
    }

    #[test]
    fn lemma2_examples() {
        let ok = mv(2, 1, 2, &[("h", &[1, 2], &[])]);
        assert!(lemma2_degree_check(&ok).unwrap().ok());
        let bad = mv(2, 1, 2, &[("1 + h", &[1, 2], &[])]);
        let r = lemma2_degree_check(&bad).unwrap();
        assert!(!r.ok());
        assert!(r.violations[0].contains("D1^D2"));
        let leafy = mv(2, 2, 2, &[("b1*x1 + x2^2", &[], &[1, 2]), ("h*x1", &[1, 2], &[])]);
        let r = lemma2_degree_check(&leafy).unwrap();
        assert!(r.ok());
        assert_eq!(r.leafwise_form, mv(2, 2, 0, &[("b1*x1 + x2^2", &[], &[1, 2])]));
    }
}

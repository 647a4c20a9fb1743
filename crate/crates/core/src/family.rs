//! Tight families of star products over `B = ℝ^k`: the data `(τ⁰, τ¹, τ²)`,
//! the four component Maurer–Cartan equations, and an order-by-order
//! quantizer for Hamiltonian families.
//!
//! With `μ = m + τ⁰`, `D_a` the coefficient of `db_a` in `τ¹` and `F_ab`
//! the coefficient of `db_a∧db_b` in `τ²`, the equations read
//!
//! ```text
//! ½[μ, μ] = 0
//! ∂_a τ⁰ − [μ, D_a] = 0
//! ∂_a D_b − ∂_b D_a + [D_a, D_b] + [μ, F_ab] = 0              (a < b)
//! Σ_cyc ∂_c F_ab + D_c(F_ab) = 0                               (c < a < b)
//! ```
//!
//! where `[μ, D](f, g) = μ(Df, g) + μ(f, Dg) − D(μ(f, g))` and
//! `[μ, F](g) = F⋆g − g⋆F`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::exactalg::linalg::{SparseRow, SparseSolver};
use crate::exactalg::{Expr, Monomial, Poly, Rational, Scalar, Var};
use crate::geom::{HamiltonianFamily, MixedMultivector};
use crate::star::{kontsevich2, PolyDiffOp, StarProduct};

#[derive(Clone, PartialEq)]
pub struct TightFamily {
    m: usize,
    k: usize,
    order: usize,
    pub tau0: PolyDiffOp,
    pub tau1: Vec<PolyDiffOp>,
    /// `F_ab` for `a < b` (1-based).
    pub tau2: BTreeMap<(usize, usize), Scalar>,
}

impl fmt::Debug for TightFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "TightFamily[m={}, k={}, H={}]", self.m, self.k, self.order)?;
        writeln!(f, "  tau0 = {}", self.tau0)?;
        for (a, d) in self.tau1.iter().enumerate() {
            writeln!(f, "  tau1[db{}] = {d}", a + 1)?;
        }
        for ((a, b), c) in &self.tau2 {
            writeln!(f, "  tau2[db{a}^db{b}] = {c}")?;
        }
        Ok(())
    }
}

impl TightFamily {
    pub fn new(
        m: usize,
        k: usize,
        tau0: PolyDiffOp,
        tau1: Vec<PolyDiffOp>,
        tau2: BTreeMap<(usize, usize), Scalar>,
    ) -> Result<Self> {
        let order = tau0.order();
        if tau0.arity() != 2 {
            return Err(Error::ArityMismatch { expected: 2, got: tau0.arity() });
        }
        if tau1.len() != k {
            return Err(Error::DimensionMismatch(format!("tau1 needs {k} components, got {}", tau1.len())));
        }
        StarProduct::new(tau0.clone())?;
        for (a, d) in tau1.iter().enumerate() {
            if d.arity() != 1 {
                return Err(Error::ArityMismatch { expected: 1, got: d.arity() });
            }
            if let Some((_, c)) = d.terms().find(|(_, c)| !c.coeff(0).is_zero()) {
                return Err(Error::DegreeViolation(format!("tau1[db{}] has h^0 coefficient {}", a + 1, c.coeff(0))));
            }
        }
        let mut clean = BTreeMap::new();
        for ((a, b), c) in tau2 {
            if !(a < b && b <= k && a >= 1) {
                return Err(Error::DimensionMismatch(format!("tau2 index ({a},{b}) must satisfy 1 <= a < b <= {k}")));
            }
            if !c.is_zero() {
                clean.insert((a, b), c);
            }
        }
        let order = tau1.iter().map(PolyDiffOp::order).chain(clean.values().map(Scalar::order)).fold(order, usize::min);
        Ok(TightFamily {
            m,
            k,
            order,
            tau0: tau0.with_order(order),
            tau1: tau1.into_iter().map(|d| d.with_order(order)).collect(),
            tau2: clean.into_iter().map(|(i, c)| (i, c.with_order(order))).collect(),
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.m, self.k)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn star(&self) -> StarProduct {
        StarProduct::new(self.tau0.clone()).expect("validated at construction")
    }

    /// `F_ab` with antisymmetry.
    pub fn curvature(&self, a: usize, b: usize) -> Scalar {
        use std::cmp::Ordering::*;
        let z = || Scalar::zero(self.order);
        match a.cmp(&b) {
            Less => self.tau2.get(&(a, b)).cloned().unwrap_or_else(z),
            Greater => -&self.tau2.get(&(b, a)).cloned().unwrap_or_else(z),
            Equal => z(),
        }
    }

    pub fn connection(&self, a: usize) -> &PolyDiffOp {
        &self.tau1[a - 1]
    }

    /// Substitute the B coordinates, e.g. to pull the family back along a map.
    pub fn substitute(&self, subs: &[(Var, Poly)]) -> Result<Self> {
        Ok(TightFamily {
            m: self.m,
            k: self.k,
            order: self.order,
            tau0: self.tau0.substitute(subs)?,
            tau1: self.tau1.iter().map(|d| d.substitute(subs)).collect::<Result<_>>()?,
            tau2: self.tau2.iter().map(|(i, c)| Ok((*i, c.substitute_many(subs)?))).collect::<Result<_>>()?,
        })
    }

    pub fn is_polynomial(&self) -> bool {
        self.tau0.is_polynomial() && self.tau1.iter().all(PolyDiffOp::is_polynomial) && self.tau2.values().all(Scalar::is_polynomial)
    }
}

/// Residuals of the four component equations.
#[derive(Clone, Debug, PartialEq)]
pub struct Mc4Report {
    pub associativity: PolyDiffOp,
    pub compatibility: Vec<PolyDiffOp>,
    pub curvature: BTreeMap<(usize, usize), PolyDiffOp>,
    pub bianchi: BTreeMap<(usize, usize, usize), Scalar>,
}

impl Mc4Report {
    pub fn eq_zero(&self) -> [bool; 4] {
        [
            self.associativity.is_zero(),
            self.compatibility.iter().all(PolyDiffOp::is_zero),
            self.curvature.values().all(PolyDiffOp::is_zero),
            self.bianchi.values().all(Scalar::is_zero),
        ]
    }

    pub fn all_zero(&self) -> bool {
        self.eq_zero().iter().all(|z| *z)
    }

    /// Human-readable description of the first nonzero residual.
    pub fn first_failure(&self) -> Option<String> {
        if !self.associativity.is_zero() {
            return Some(format!("associativity: {}", self.associativity));
        }
        for (a, r) in self.compatibility.iter().enumerate() {
            if !r.is_zero() {
                return Some(format!("compatibility[db{}]: {r}", a + 1));
            }
        }
        for ((a, b), r) in &self.curvature {
            if !r.is_zero() {
                return Some(format!("curvature[db{a}^db{b}]: {r}"));
            }
        }
        for ((a, b, c), r) in &self.bianchi {
            if !r.is_zero() {
                return Some(format!("bianchi[db{a}^db{b}^db{c}]: {r}"));
            }
        }
        None
    }
}

fn inner(mu: &PolyDiffOp, f: &Scalar) -> PolyDiffOp {
    mu.gerstenhaber(&PolyDiffOp::function(f.clone()))
}

/// Evaluates the four equations exactly mod `h^{H+1}`.
pub fn mc4_check(t: &TightFamily) -> Mc4Report {
    let h = t.order;
    let mu = PolyDiffOp::product(h).add(&t.tau0).expect("arity 2");
    let half = crate::exactalg::ratio(1, 2);
    let associativity = mu.gerstenhaber(&mu).scale(&half);
    let compatibility = (1..=t.k)
        .map(|a| {
            t.tau0.derivative_coeffs(Var::B(a)).sub(&mu.gerstenhaber(t.connection(a))).expect("arity 2")
        })
        .collect();
    let mut curvature = BTreeMap::new();
    for a in 1..=t.k {
        for b in a + 1..=t.k {
            let (da, db) = (t.connection(a), t.connection(b));
            let r = da
                .derivative_coeffs(Var::B(b))
                .neg()
                .add(&db.derivative_coeffs(Var::B(a)))
                .and_then(|r| r.add(&da.gerstenhaber(db)))
                .and_then(|r| r.add(&inner(&mu, &t.curvature(a, b))))
                .expect("arity 1");
            curvature.insert((a, b), r);
        }
    }
    let mut bianchi = BTreeMap::new();
    for c in 1..=t.k {
        for a in c + 1..=t.k {
            for b in a + 1..=t.k {
                let mut acc = Scalar::zero(h);
                for (x, y, z) in [(c, a, b), (a, b, c), (b, c, a)] {
                    let f = t.curvature(y, z);
                    acc = &acc + &f.derivative(Var::B(x));
                    acc = &acc + &t.connection(x).apply(&[f]).expect("arity 1");
                }
                bianchi.insert((c, a, b), acc);
            }
        }
    }
    Mc4Report { associativity, compatibility, curvature, bianchi }
}

/// Candidate-space bounds for the corrector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuantizeBounds {
    pub degree: u32,
    pub order: u32,
}

impl QuantizeBounds {
    /// `(input degree + 2H, 2H)`.
    pub fn default_for(sigma: &MixedMultivector, h: usize) -> Self {
        let deg = sigma
            .terms()
            .flat_map(|(_, c)| c.coeffs().iter().map(|e| e.numerator().total_degree()))
            .max()
            .unwrap_or(0);
        QuantizeBounds { degree: deg + 2 * h as u32, order: 2 * h as u32 }
    }
}

/// Bookkeeping of one corrector step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrectionStep {
    pub order: usize,
    pub degree_bound: u32,
    pub derivative_bound: u32,
    pub unknowns: usize,
    pub nonzero: usize,
}

#[derive(Clone, Debug)]
pub struct Quantized {
    pub family: TightFamily,
    pub steps: Vec<CorrectionStep>,
}

impl Quantized {
    pub fn total_corrections(&self) -> usize {
        self.steps.iter().map(|s| s.nonzero).sum()
    }
}

fn vector_part(sigma: &MixedMultivector, a: usize, order: usize) -> PolyDiffOp {
    let mut d = PolyDiffOp::zero(1, order);
    for (l, c) in sigma.terms() {
        if l.p() == 1 && l.db_indices() == [a] {
            d.add_term(vec![Monomial::var(Var::X(l.tm_indices()[0]))], c.clone());
        }
    }
    d
}

/// Deformation quantization of a Hamiltonian family, truncated at the
/// family's h-order.
pub fn quantize_family(sigma: &HamiltonianFamily, bounds: Option<QuantizeBounds>) -> Result<Quantized> {
    let s = sigma.sigma();
    let h = s.order();
    let (m, k) = s.dims();
    let report = crate::dirac::lemma2_degree_check(s)?;
    if !report.violations.is_empty() {
        return Err(Error::DegreeViolation(report.violations.join("; ")));
    }
    let res = s.mc_residual()?;
    if !res.is_zero() {
        return Err(Error::NotMaurerCartan(res.to_string()));
    }
    let bounds = bounds.unwrap_or_else(|| QuantizeBounds::default_for(s, h));
    let tau0 = kontsevich2(&s.component(2, 0))?.correction().clone();
    let tau1 = (1..=k).map(|a| vector_part(s, a, h)).collect();
    let mut tau2 = BTreeMap::new();
    for a in 1..=k {
        for b in a + 1..=k {
            tau2.insert((a, b), s.coeff_at(&[], &[a, b]));
        }
    }
    let mut fam = TightFamily::new(m, k, tau0, tau1, tau2)?;
    let mut steps = Vec::new();
    for n in 1..=h + 1 {
        if let Some(step) = correct_order(&mut fam, n, bounds)? {
            steps.push(step);
        }
    }
    let fin = mc4_check(&fam);
    if let Some(msg) = fin.first_failure() {
        return Err(Error::ResidualFailure(msg));
    }
    Ok(Quantized { family: fam, steps })
}

/// Row keys: which equation and which operator term.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum RowKey {
    Assoc(Vec<Monomial>),
    Compat(usize, Vec<Monomial>),
    Curv(usize, usize, Vec<Monomial>),
    Bianchi(usize, usize, usize),
}

#[derive(Clone, Debug)]
enum Unknown {
    Tau0(Vec<Monomial>),
    Tau1(usize, Monomial),
    Tau2(usize, usize),
}

type Image = Vec<(RowKey, Expr)>;

fn op_entries(op: &PolyDiffOp, key: impl Fn(Vec<Monomial>) -> RowKey, out: &mut Image) {
    for (s, c) in op.terms() {
        out.push((key(s.clone()), c.coeff(0).clone()));
    }
}

fn monomials_upto(vars: &[Var], d: u32) -> Vec<Monomial> {
    let mut out = vec![Monomial::one()];
    let mut frontier = vec![Monomial::one()];
    for _ in 0..d {
        let mut next = Vec::new();
        for mono in &frontier {
            // only multiply by variables at or after the last one used, to avoid repeats
            let last = vars.iter().rposition(|v| mono.exp(*v) > 0).unwrap_or(0);
            for v in &vars[last..] {
                next.push(mono.mul(&Monomial::var(*v)));
            }
        }
        out.extend(next.iter().copied());
        frontier = next;
    }
    out
}

fn derivative_indices(m: usize, r: u32) -> Vec<Monomial> {
    let xs: Vec<Var> = (1..=m).map(Var::X).collect();
    monomials_upto(&xs, r).into_iter().filter(|a| !a.is_one()).collect()
}

/// Solve for the order-`n` corrections; `None` if nothing needed fixing.
fn correct_order(fam: &mut TightFamily, n: usize, bounds: QuantizeBounds) -> Result<Option<CorrectionStep>> {
    let h = fam.order;
    let (m, k) = (fam.m, fam.k);
    let rep = mc4_check(fam);
    // residual entries at the orders handled by this step
    let mut residual: Image = Vec::new();
    if n <= h {
        op_entries(&rep.associativity.hbar_coeff(n), RowKey::Assoc, &mut residual);
        for (a, r) in rep.compatibility.iter().enumerate() {
            op_entries(&r.hbar_coeff(n), |s| RowKey::Compat(a + 1, s), &mut residual);
        }
        for ((a, b), r) in &rep.curvature {
            op_entries(&r.hbar_coeff(n), |s| RowKey::Curv(*a, *b, s), &mut residual);
        }
    }
    for ((c, a, b), r) in &rep.bianchi {
        let e = r.coeff(n - 1);
        if !e.is_zero() {
            residual.push((RowKey::Bianchi(*c, *a, *b), e.clone()));
        }
    }
    if residual.is_empty() {
        return Ok(None);
    }
    if n <= h {
        let e1 = rep.associativity.hbar_coeff(n);
        if !e1.hochschild_d().is_zero() {
            return Err(Error::ClosednessFailed(format!("associativity residual at order {n} is not a cocycle: {e1}")));
        }
    }

    let dres = residual.iter().map(|(_, e)| e.numerator().total_degree()).max().unwrap_or(0);
    let rres = residual
        .iter()
        .filter_map(|(key, _)| match key {
            RowKey::Assoc(s) | RowKey::Compat(_, s) | RowKey::Curv(_, _, s) => s.iter().map(Monomial::degree).max(),
            RowKey::Bianchi(..) => None,
        })
        .max()
        .unwrap_or(1)
        .max(1);
    let mut ladder = vec![
        (dres.min(bounds.degree), rres.min(bounds.order)),
        ((dres + 1).min(bounds.degree), (rres + 1).min(bounds.order)),
        (bounds.degree, bounds.order),
    ];
    ladder.dedup();

    let mu1 = fam.tau0.hbar_coeff(1);
    let f0: BTreeMap<(usize, usize), Scalar> =
        fam.tau2.iter().map(|(i, c)| (*i, Scalar::from_expr(c.coeff(0).clone(), 0))).collect();
    let den = Expr::common_denominator(residual.iter().map(|(_, e)| e));
    let mut last_residual = String::new();
    for (d, r) in ladder {
        let mut xb: Vec<Var> = (1..=m).map(Var::X).collect();
        xb.extend((1..=k).map(Var::B));
        let monos = monomials_upto(&xb, d);
        let coeff_of = |mono: &Monomial| Expr::from_parts(Poly::term(Rational::from_integer(1.into()), *mono), den.clone());
        let mut unknowns: Vec<(Unknown, Expr, Image)> = Vec::new();
        // functions first, then first-order-and-up operators, then bidifferential ones
        for a in 1..=k {
            for b in a + 1..=k {
                for mono in &monos {
                    let c = coeff_of(mono);
                    let f = Scalar::from_expr(c.clone(), 0);
                    let mut img = Vec::new();
                    if n <= h {
                        op_entries(&inner(&mu1, &f), |s| RowKey::Curv(a, b, s), &mut img);
                    }
                    for cc in 1..=k {
                        for aa in cc + 1..=k {
                            for bb in aa + 1..=k {
                                for (x, y, z) in [(cc, aa, bb), (aa, bb, cc), (bb, cc, aa)] {
                                    let sgn = if (y, z) == (a, b) {
                                        1
                                    } else if (y, z) == (b, a) {
                                        -1
                                    } else {
                                        continue;
                                    };
                                    let dv = c.derivative(Var::B(x));
                                    let dv = if sgn > 0 { dv } else { -&dv };
                                    img.push((RowKey::Bianchi(cc, aa, bb), dv));
                                }
                            }
                        }
                    }
                    unknowns.push((Unknown::Tau2(a, b), c, img));
                }
            }
        }
        if n <= h {
            for alpha in derivative_indices(m, r) {
                for mono in &monos {
                    for a in 1..=k {
                        let c = coeff_of(mono);
                        let op = PolyDiffOp::single(vec![alpha], Scalar::from_expr(c.clone(), 0));
                        let mut img = Vec::new();
                        op_entries(&op.hochschild_d().neg(), |s| RowKey::Compat(a, s), &mut img);
                        for b in 1..=k {
                            if b == a {
                                continue;
                            }
                            let dop = op.derivative_coeffs(Var::B(b));
                            if a < b {
                                op_entries(&dop.neg(), |s| RowKey::Curv(a, b, s), &mut img);
                            } else {
                                op_entries(&dop, |s| RowKey::Curv(b, a, s), &mut img);
                            }
                        }
                        unknowns.push((Unknown::Tau1(a, alpha), c, img));
                    }
                }
            }
            if n >= 3 {
                let idx = derivative_indices(m, r);
                for a1 in &idx {
                    for a2 in &idx {
                        if a1.degree() + a2.degree() > r {
                            continue;
                        }
                        for mono in &monos {
                            let c = coeff_of(mono);
                            let op = PolyDiffOp::single(vec![*a1, *a2], Scalar::from_expr(c.clone(), 0));
                            let mut img = Vec::new();
                            op_entries(&op.hochschild_d(), RowKey::Assoc, &mut img);
                            for a in 1..=k {
                                op_entries(&op.derivative_coeffs(Var::B(a)), |s| RowKey::Compat(a, s), &mut img);
                            }
                            for ((a, b), f) in &f0 {
                                op_entries(&inner(&op, f), |s| RowKey::Curv(*a, *b, s), &mut img);
                            }
                            unknowns.push((Unknown::Tau0(vec![*a1, *a2]), c, img));
                        }
                    }
                }
            }
        }

        // group by row key and clear denominators per key
        let mut by_key: BTreeMap<RowKey, (Vec<(usize, Expr)>, Expr)> = BTreeMap::new();
        for (key, e) in &residual {
            let ent = by_key.entry(key.clone()).or_insert_with(|| (Vec::new(), Expr::zero()));
            ent.1 = &ent.1 + e;
        }
        for (j, (_, _, img)) in unknowns.iter().enumerate() {
            for (key, e) in img {
                if e.is_zero() {
                    continue;
                }
                by_key.entry(key.clone()).or_insert_with(|| (Vec::new(), Expr::zero())).0.push((j, e.clone()));
            }
        }
        let mut solver = SparseSolver::new();
        for (cols, rhs) in by_key.values() {
            let common = Expr::common_denominator(cols.iter().map(|(_, e)| e).chain(std::iter::once(rhs)));
            let mut rows: BTreeMap<Monomial, (SparseRow, Rational)> = BTreeMap::new();
            for (j, e) in cols {
                for (mono, c) in e.numerator_over(&common).terms() {
                    let ent = rows.entry(*mono).or_default();
                    let v = ent.0.entry(*j).or_insert_with(|| Rational::from_integer(0.into()));
                    *v += c;
                }
            }
            for (mono, c) in rhs.numerator_over(&common).terms() {
                rows.entry(*mono).or_default().1 -= c;
            }
            for (_, (row, b)) in rows {
                solver.push(row, b);
            }
        }
        let Some(sol) = solver.solve() else {
            last_residual = residual
                .iter()
                .map(|(k, e)| format!("{k:?}: {e}"))
                .next()
                .unwrap_or_default();
            continue;
        };
        let nonzero = sol.len();
        for (j, x) in &sol {
            let (u, c, _) = &unknowns[*j];
            let coef = Scalar::monomial(c.scale(x), n, h);
            match u {
                Unknown::Tau0(slots) => fam.tau0.add_term(slots.clone(), coef),
                Unknown::Tau1(a, alpha) => fam.tau1[a - 1].add_term(vec![*alpha], coef),
                Unknown::Tau2(a, b) => {
                    let e = fam.tau2.entry((*a, *b)).or_insert_with(|| Scalar::zero(h));
                    *e = e.add(&Scalar::monomial(c.scale(x), n - 1, h));
                }
            }
        }
        fam.tau2.retain(|_, c| !c.is_zero());
        return Ok(Some(CorrectionStep { order: n, degree_bound: d, derivative_bound: r, unknowns: unknowns.len(), nonzero }));
    }
    Err(Error::Obstruction { degree: bounds.degree, order: bounds.order, at_order: n, residual: last_residual })
}

/// A generator of the connection 1-form.
#[derive(Clone, Debug)]
pub enum Generator {
    /// An explicit 1-ary operator.
    Operator(PolyDiffOp),
    /// The inner derivation `f ↦ a⋆f − f⋆a`.
    Inner(Scalar),
}

/// Assembles a family with b-independent `τ⁰ = S` from a connection 1-form.
///
/// If every generator is inner, `τ²` is solved from the curvature equation
/// (and set to zero when the curvature is central); otherwise it must be
/// supplied, defaulting to zero.
pub fn gauge_family(
    star: &StarProduct,
    m: usize,
    k: usize,
    generators: Vec<Generator>,
    tau2: Option<BTreeMap<(usize, usize), Scalar>>,
) -> Result<TightFamily> {
    let h = star.order();
    if star.correction().terms().any(|(_, c)| c.depends_on_any(|v| matches!(v, Var::B(_)))) {
        return Err(Error::Invalid("gauge_family needs a b-independent star product".into()));
    }
    if generators.len() != k {
        return Err(Error::DimensionMismatch(format!("need {k} generators, got {}", generators.len())));
    }
    let mu = star.operator();
    let mut ops = Vec::with_capacity(k);
    let mut potentials = Vec::with_capacity(k);
    for (a, g) in generators.iter().enumerate() {
        let op = match g {
            Generator::Operator(d) => d.clone(),
            Generator::Inner(x) => {
                potentials.push(x.clone());
                inner(&mu, x)
            }
        };
        let r = mu.gerstenhaber(&op);
        if !r.is_zero() {
            return Err(Error::ResidualFailure(format!("generator for db{} is not a star derivation: {r}", a + 1)));
        }
        ops.push(op);
    }
    let tau2 = match tau2 {
        Some(t) => t,
        None if potentials.len() == k => {
            let mut f = BTreeMap::new();
            for a in 1..=k {
                for b in a + 1..=k {
                    let (xa, xb) = (&potentials[a - 1], &potentials[b - 1]);
                    let curv = &(&xb.derivative(Var::B(a)) - &xa.derivative(Var::B(b))) + &star.commutator(xa, xb);
                    f.insert((a, b), -&curv);
                }
            }
            if f.values().all(|c| !c.depends_on_any(|v| v.is_x())) {
                BTreeMap::new()
            } else {
                f
            }
        }
        None => BTreeMap::new(),
    };
    let fam = TightFamily::new(m, k, star.correction().with_order(h), ops, tau2)?;
    if let Some(msg) = mc4_check(&fam).first_failure() {
        return Err(Error::ResidualFailure(msg));
    }
    Ok(fam)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::parse_scalar;
    use crate::star::moyal;

    fn s(src: &str, o: usize) -> Scalar {
        parse_scalar(src, o).unwrap()
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

    #[test]
    fn mc4_examples() {
        let star = moyal2(2);
        let mut t2 = BTreeMap::new();
        t2.insert((1, 2), s("b1^2 + b2", 2));
        let fam = TightFamily::new(2, 2, star.correction().clone(), vec![PolyDiffOp::zero(1, 2); 2], t2).unwrap();
        assert!(mc4_check(&fam).all_zero());

        let d = PolyDiffOp::vector_field(&[(Var::X(2), s("h", 2))], 2);
        let fam = TightFamily::new(2, 1, star.correction().clone(), vec![d], BTreeMap::new()).unwrap();
        assert!(mc4_check(&fam).all_zero());

        let d = PolyDiffOp::vector_field(&[(Var::X(1), s("h*x1", 2))], 2);
        let fam = TightFamily::new(2, 1, star.correction().clone(), vec![d], BTreeMap::new()).unwrap();
        let r = mc4_check(&fam);
        assert_eq!(r.eq_zero(), [true, false, true, true]);
    }

    #[test]
    fn quantize_constant_case_needs_no_corrections() {
        let sigma = mv(2, 2, 2, &[("h", &[1, 2], &[]), ("b1^2 + 3*b2", &[], &[1, 2])]);
        let q = quantize_family(&HamiltonianFamily::new(sigma).unwrap(), None).unwrap();
        assert_eq!(q.total_corrections(), 0);
        assert_eq!(q.family.tau0, moyal2(2).correction().clone());
        let sigma = mv(2, 1, 2, &[("h", &[1, 2], &[]), ("h", &[2], &[1])]);
        let q = quantize_family(&HamiltonianFamily::new(sigma).unwrap(), None).unwrap();
        assert_eq!(q.total_corrections(), 0);
        assert_eq!(q.family.tau1[0], PolyDiffOp::vector_field(&[(Var::X(2), s("h", 2))], 2));
    }

    #[test]
    fn quantize_rejects_non_mc() {
        let sigma = mv(2, 1, 2, &[("h*b1", &[1, 2], &[])]);
        assert!(matches!(
            quantize_family(&HamiltonianFamily::new(sigma).unwrap(), None),
            Err(Error::NotMaurerCartan(_))
        ));
    }

    #[test]
    fn gauge_examples() {
        let star = moyal2(2);
        let fam = gauge_family(&star, 2, 1, vec![Generator::Inner(s("x1", 2))], None).unwrap();
        assert_eq!(fam.tau1[0], PolyDiffOp::vector_field(&[(Var::X(2), s("h", 2))], 2));
        assert!(fam.tau2.is_empty());
        let fam = gauge_family(&star, 2, 1, vec![Generator::Operator(PolyDiffOp::zero(1, 2))], None).unwrap();
        assert!(fam.tau1[0].is_zero());
        let fam = gauge_family(&star, 2, 2, vec![Generator::Inner(s("x1", 2)), Generator::Inner(s("x2", 2))], None).unwrap();
        assert!(fam.tau2.is_empty());
        let bad = PolyDiffOp::vector_field(&[(Var::X(1), s("h*x1", 2))], 2);
        assert!(matches!(gauge_family(&star, 2, 1, vec![Generator::Operator(bad)], None), Err(Error::ResidualFailure(_))));
    }
}

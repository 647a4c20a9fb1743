//! Polydifferential operators, the Gerstenhaber bracket, and explicit
//! star products (Moyal and the second-order Kontsevich expansion).

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::exactalg::{rat, Expr, Monomial, Rational, Scalar, Var};
use crate::geom::{Legs, MixedMultivector};

/// `∂^α f` for a multi-index `α`.
pub fn diff_multi(f: &Scalar, alpha: &Monomial) -> Scalar {
    let mut out = f.clone();
    for (v, e) in alpha.support() {
        for _ in 0..e {
            if out.is_zero() {
                return out;
            }
            out = out.derivative(v);
        }
    }
    out
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// All ways of writing `α = γ_0 + … + γ_{parts-1}`, with multinomial weights.
fn split_multi(alpha: &Monomial, parts: usize) -> Vec<(Rational, Vec<Monomial>)> {
    let mut acc: Vec<(Rational, Vec<Monomial>)> = vec![(rat(1), vec![Monomial::one(); parts])];
    for (v, e) in alpha.support() {
        let mut next = Vec::new();
        for comp in compositions(e, parts) {
            let mut w = Rational::from_integer(factorial(e));
            for &c in &comp {
                w /= Rational::from_integer(factorial(c));
            }
            for (c0, ms) in &acc {
                let ms2: Vec<Monomial> =
                    ms.iter().zip(&comp).map(|(m, &c)| m.mul(&Monomial::var_pow(v, c))).collect();
                next.push((c0 * &w, ms2));
            }
        }
        acc = next;
    }
    acc
}

fn compositions(e: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 1 {
        return vec![vec![e]];
    }
    let mut out = Vec::new();
    for first in 0..=e {
        for mut rest in compositions(e - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn sign(n: i64) -> i32 {
    if n.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// A polydifferential operator: a sum of `c · ∂^{α_1} ⊗ … ⊗ ∂^{α_p}`.
#[derive(Clone, PartialEq, Eq)]
pub struct PolyDiffOp {
    arity: usize,
    order: usize,
    terms: BTreeMap<Vec<Monomial>, Scalar>,
}

impl PolyDiffOp {
    pub fn zero(arity: usize, order: usize) -> Self {
        PolyDiffOp { arity, order, terms: BTreeMap::new() }
    }

    /// The 0-ary operator given by a function.
    pub fn function(f: Scalar) -> Self {
        let mut out = Self::zero(0, f.order());
        out.add_term(vec![], f);
        out
    }

    /// The commutative product `m(f, g) = fg`.
    pub fn product(order: usize) -> Self {
        Self::single(vec![Monomial::one(), Monomial::one()], Scalar::one(order))
    }

    pub fn identity(order: usize) -> Self {
        Self::single(vec![Monomial::one()], Scalar::one(order))
    }

    pub fn single(slots: Vec<Monomial>, c: Scalar) -> Self {
        let mut out = Self::zero(slots.len(), c.order());
        out.add_term(slots, c);
        out
    }

    /// First-order 1-ary operator `Σ v_i ∂_{x_i}`.
    pub fn vector_field(coeffs: &[(Var, Scalar)], order: usize) -> Self {
        let mut out = Self::zero(1, order);
        for (v, c) in coeffs {
            out.add_term(vec![Monomial::var(*v)], c.clone());
        }
        out
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Monomial>, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, slots: &[Monomial]) -> Scalar {
        self.terms.get(slots).cloned().unwrap_or_else(|| Scalar::zero(self.order))
    }

    pub fn add_term(&mut self, slots: Vec<Monomial>, c: Scalar) {
        debug_assert_eq!(slots.len(), self.arity);
        let c = c.with_order(self.order.min(c.order()));
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&slots) {
            Some(e) => {
                *e = &*e + &c;
                if e.is_zero() {
                    self.terms.remove(&slots);
                }
            }
            None => {
                self.terms.insert(slots, c);
            }
        }
    }

    fn check_arity(&self, other: &Self) -> Result<()> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch { expected: self.arity, got: other.arity });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let mut out = Self::zero(self.arity, self.order.min(other.order));
        for (s, c) in self.terms.iter().chain(&other.terms) {
            out.add_term(s.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| -c)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        self.map_coeffs(|c| c.scale(r))
    }

    /// Multiply every coefficient by a function (on the left).
    pub fn scale_by(&self, f: &Scalar) -> Self {
        self.map_coeffs(|c| f * c)
    }

    pub fn map_coeffs(&self, f: impl Fn(&Scalar) -> Scalar) -> Self {
        let mut out = Self::zero(self.arity, self.order);
        for (s, c) in &self.terms {
            out.add_term(s.clone(), f(c));
        }
        out
    }

    pub fn try_map_coeffs(&self, f: impl Fn(&Scalar) -> Result<Scalar>) -> Result<Self> {
        let mut out = Self::zero(self.arity, self.order);
        for (s, c) in &self.terms {
            out.add_term(s.clone(), f(c)?);
        }
        Ok(out)
    }

    pub fn with_order(&self, order: usize) -> Self {
        let mut out = Self::zero(self.arity, order);
        for (s, c) in &self.terms {
            out.add_term(s.clone(), c.with_order(order));
        }
        out
    }

    /// The h^n part as an order-0 operator.
    pub fn hbar_coeff(&self, n: usize) -> Self {
        let mut out = Self::zero(self.arity, 0);
        for (s, c) in &self.terms {
            if n <= c.order() {
                out.add_term(s.clone(), Scalar::from_expr(c.coeff(n).clone(), 0));
            }
        }
        out
    }

    /// Multiply by `h^k` (dropping what falls past the order).
    pub fn shift(&self, k: usize) -> Self {
        self.map_coeffs(|c| c.shift(k))
    }

    pub fn derivative_coeffs(&self, v: Var) -> Self {
        self.map_coeffs(|c| c.derivative(v))
    }

    pub fn apply(&self, args: &[Scalar]) -> Result<Scalar> {
        if args.len() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, got: args.len() });
        }
        let order = args.iter().map(Scalar::order).fold(self.order, usize::min);
        let mut acc = Scalar::zero(order);
        for (slots, c) in &self.terms {
            let mut t = c.with_order(order);
            for (a, alpha) in args.iter().zip(slots) {
                if t.is_zero() {
                    break;
                }
                t = &t * &diff_multi(a, alpha);
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// `P ∘_i Q`: insert `Q` into slot `i` (0-based).
    pub fn insert(&self, i: usize, q: &Self) -> Self {
        let arity = self.arity + q.arity - 1;
        let mut out = Self::zero(arity, self.order.min(q.order));
        for (ps, pc) in &self.terms {
            for (qs, qc) in &q.terms {
                for (w, parts) in split_multi(&ps[i], q.arity + 1) {
                    let dq = diff_multi(qc, &parts[0]);
                    if dq.is_zero() {
                        continue;
                    }
                    let mut slots = Vec::with_capacity(arity);
                    slots.extend_from_slice(&ps[..i]);
                    for (j, b) in qs.iter().enumerate() {
                        slots.push(b.mul(&parts[j + 1]));
                    }
                    slots.extend_from_slice(&ps[i + 1..]);
                    out.add_term(slots, (pc * &dq).scale(&w));
                }
            }
        }
        out
    }

    /// Gerstenhaber composition `P ∘ Q = Σ_i (−1)^{i(q−1)} P ∘_i Q`.
    pub fn compose(&self, q: &Self) -> Self {
        let mut out = Self::zero((self.arity + q.arity).saturating_sub(1), self.order.min(q.order));
        for i in 0..self.arity {
            let s = sign(i as i64 * (q.arity as i64 - 1));
            let t = self.insert(i, q);
            out = out.add(&if s > 0 { t } else { t.neg() }).expect("same arity");
        }
        out
    }

    /// `[P, Q] = P ∘ Q − (−1)^{(p−1)(q−1)} Q ∘ P`.
    pub fn gerstenhaber(&self, q: &Self) -> Self {
        let a = self.compose(q);
        let b = q.compose(self);
        let s = sign((self.arity as i64 - 1) * (q.arity as i64 - 1));
        if s > 0 {
            a.sub(&b).expect("same arity")
        } else {
            a.add(&b).expect("same arity")
        }
    }

    /// Hochschild differential `[m, P]`.
    pub fn hochschild_d(&self) -> Self {
        PolyDiffOp::product(self.order).gerstenhaber(self)
    }

    /// Composition of 1-ary operators, `(P·Q)(f) = P(Q(f))`.
    pub fn then_apply(&self, q: &Self) -> Result<Self> {
        if self.arity != 1 {
            return Err(Error::ArityMismatch { expected: 1, got: self.arity });
        }
        Ok(self.insert(0, q))
    }

    pub fn is_polynomial(&self) -> bool {
        self.terms.values().all(Scalar::is_polynomial)
    }

    /// Largest derivative order appearing in any slot.
    pub fn max_derivative_order(&self) -> u32 {
        self.terms.keys().flat_map(|s| s.iter().map(Monomial::degree)).max().unwrap_or(0)
    }

    pub fn substitute(&self, subs: &[(Var, crate::exactalg::Poly)]) -> Result<Self> {
        self.try_map_coeffs(|c| c.substitute_many(subs))
    }

    pub fn rename(&self, map: impl Fn(Var) -> Var + Copy) -> Self {
        let mut out = Self::zero(self.arity, self.order);
        for (s, c) in &self.terms {
            let slots = s
                .iter()
                .map(|m| m.support().fold(Monomial::one(), |acc, (v, e)| acc.mul(&Monomial::var_pow(map(v), e))))
                .collect();
            out.add_term(slots, c.rename(map));
        }
        out
    }
}

impl fmt::Display for PolyDiffOp {
    /// `(c)*[α_1 | … | α_p]`, with `1` for an underived slot.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (s, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            let slots: Vec<String> = s.iter().map(|m| format!("d{m}")).collect();
            write!(f, "({c})")?;
            if !slots.is_empty() {
                write!(f, "*[{}]", slots.join(" | "))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for PolyDiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyDiffOp[{}]({self})", self.arity)
    }
}

/// Antisymmetrization `u_1∧…∧u_p ↦ (1/p!) Σ sign(σ) u_σ(1) ⊗ … ⊗ u_σ(p)`
/// for coordinate multivectors.
pub fn hkr(a: &MixedMultivector) -> Result<PolyDiffOp> {
    let p = match a.terms().next() {
        None => return Ok(PolyDiffOp::zero(0, a.order())),
        Some((l, _)) => l.p() as usize,
    };
    let mut out = PolyDiffOp::zero(p, a.order());
    for (l, c) in a.terms() {
        if l.q() != 0 {
            return Err(Error::WrongDegree("hkr needs a pure multivector (no db legs)".into()));
        }
        if l.p() as usize != p {
            return Err(Error::WrongDegree("hkr needs a homogeneous multivector".into()));
        }
        let idx = l.tm_indices();
        let w = Rational::new(BigInt::one(), factorial(p as u32));
        for (perm, s) in permutations(p) {
            let slots = perm.iter().map(|&j| Monomial::var(Var::X(idx[j]))).collect();
            let c = c.scale(&w);
            out.add_term(slots, if s > 0 { c } else { -&c });
        }
    }
    Ok(out)
}

fn permutations(n: usize) -> Vec<(Vec<usize>, i32)> {
    if n == 0 {
        return vec![(vec![], 1)];
    }
    let mut out = Vec::new();
    for (perm, s) in permutations(n - 1) {
        // insert n-1 at position k: passes n-1-k elements
        for k in 0..=perm.len() {
            let mut p = perm.clone();
            p.insert(k, n - 1);
            let passes = (perm.len() - k) as i64;
            out.push((p, s * sign(passes)));
        }
    }
    out
}

/// `f ⋆ g = fg + C(f, g)` with `C ∈ h·PD²[[h]]` annihilating constants.
#[derive(Clone, Debug, PartialEq)]
pub struct StarProduct {
    correction: PolyDiffOp,
}

impl StarProduct {
    pub fn new(correction: PolyDiffOp) -> Result<Self> {
        if correction.arity() != 2 {
            return Err(Error::ArityMismatch { expected: 2, got: correction.arity() });
        }
        for (s, c) in correction.terms() {
            if s.iter().any(Monomial::is_one) {
                return Err(Error::Invalid(format!(
                    "star-product correction term ({c})*[{} | {}] does not annihilate constants",
                    s[0], s[1]
                )));
            }
            if !c.coeff(0).is_zero() {
                return Err(Error::DegreeViolation(format!("correction term has h^0 coefficient {}", c.coeff(0))));
            }
        }
        Ok(StarProduct { correction })
    }

    pub fn commutative(order: usize) -> Self {
        StarProduct { correction: PolyDiffOp::zero(2, order) }
    }

    pub fn order(&self) -> usize {
        self.correction.order()
    }

    pub fn correction(&self) -> &PolyDiffOp {
        &self.correction
    }

    /// `m + C` as a single operator.
    pub fn operator(&self) -> PolyDiffOp {
        PolyDiffOp::product(self.order()).add(&self.correction).expect("arity 2")
    }

    pub fn apply(&self, f: &Scalar, g: &Scalar) -> Scalar {
        let fg = f * g;
        &fg + &self.correction.apply(&[f.clone(), g.clone()]).expect("arity 2")
    }

    pub fn commutator(&self, f: &Scalar, g: &Scalar) -> Scalar {
        &self.apply(f, g) - &self.apply(g, f)
    }

    /// `(f⋆g)⋆h − f⋆(g⋆h)`.
    pub fn associator(&self, f: &Scalar, g: &Scalar, h: &Scalar) -> Scalar {
        &self.apply(&self.apply(f, g), h) - &self.apply(f, &self.apply(g, h))
    }

    /// Operator-level residual `½[m+C, m+C]`.
    pub fn operator_residual(&self) -> PolyDiffOp {
        let mu = self.operator();
        mu.gerstenhaber(&mu).scale(&crate::exactalg::ratio(1, 2))
    }

    /// Inverse of a unit `a` (nonzero constant h^0 part) for this product.
    pub fn inverse(&self, a: &Scalar) -> Result<Scalar> {
        let a0 = a.coeff(0).as_constant().filter(|c| !num_traits::Zero::is_zero(c)).ok_or_else(|| {
            Error::NonUnital(a.coeff(0).to_string())
        })?;
        let inv0 = Scalar::from_expr(Expr::constant(Rational::one() / a0), a.order());
        // b ← b + b0 ⋆ (1 − a ⋆ b), order by order
        let mut b = inv0.clone();
        for _ in 0..=a.order() {
            let r = &Scalar::one(a.order()) - &self.apply(a, &b);
            if r.is_zero() {
                break;
            }
            b = &b + &self.apply(&inv0, &r);
        }
        Ok(b)
    }
}

/// Bivector coefficients `π^{ij}` (full antisymmetric matrix, 1-based).
fn bivector_matrix(pi: &MixedMultivector) -> Result<Vec<Vec<Scalar>>> {
    let (m, _) = pi.dims();
    let o = pi.order();
    let mut mat = vec![vec![Scalar::zero(o); m + 1]; m + 1];
    for (l, c) in pi.terms() {
        if l.q() != 0 || l.p() != 2 {
            return Err(Error::WrongDegree(format!("expected a bivector, found legs {l:?}")));
        }
        let idx = l.tm_indices();
        mat[idx[0]][idx[1]] = c.clone();
        mat[idx[1]][idx[0]] = -c;
    }
    Ok(mat)
}

fn index_tuples(m: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out.into_iter().flat_map(|t| (1..=m).map(move |i| {
            let mut t2 = t.clone();
            t2.push(i);
            t2
        })).collect();
    }
    out
}

fn multi(idx: &[usize]) -> Monomial {
    idx.iter().fold(Monomial::one(), |acc, &i| acc.mul(&Monomial::var(Var::X(i))))
}

/// Graph-order-`n` exponential terms `(1/n! 2ⁿ) Π π^{i_k j_k} ∂_I ⊗ ∂_J`.
fn exponential_terms(mat: &[Vec<Scalar>], m: usize, n: usize, order: usize, out: &mut PolyDiffOp) {
    let w = Rational::new(BigInt::one(), factorial(n as u32) * BigInt::from(2u32).pow(n as u32));
    for is in index_tuples(m, n) {
        for js in index_tuples(m, n) {
            let mut c = Scalar::one(order);
            for (i, j) in is.iter().zip(&js) {
                c = &c * &mat[*i][*j];
                if c.is_zero() {
                    break;
                }
            }
            if !c.is_zero() {
                out.add_term(vec![multi(&is), multi(&js)], c.scale(&w));
            }
        }
    }
}

fn require_hbar_divisible(pi: &MixedMultivector) -> Result<()> {
    for (l, c) in pi.terms() {
        if !c.coeff(0).is_zero() {
            return Err(Error::DegreeViolation(format!("bivector coefficient of {l:?} is not O(h)")));
        }
    }
    Ok(())
}

/// Moyal product of a constant bivector, truncated at `h^{H+1}` where `H`
/// is the bivector's order.
pub fn moyal(pi: &MixedMultivector) -> Result<StarProduct> {
    for (l, c) in pi.terms() {
        if c.depends_on_any(|v| v.is_x()) {
            return Err(Error::XDependent(format!("coefficient of {l:?} is {c}")));
        }
    }
    require_hbar_divisible(pi)?;
    let (m, _) = pi.dims();
    let h = pi.order();
    let mat = bivector_matrix(pi)?;
    let mut out = PolyDiffOp::zero(2, h);
    for n in 1..=h {
        exponential_terms(&mat, m, n, h, &mut out);
    }
    StarProduct::new(out)
}

/// Second-order Kontsevich expansion. Graph orders `n ≥ 3` contribute their
/// exponential (Moyal-type) terms only, so the result agrees with [`moyal`]
/// for constant bivectors at every order.
pub fn kontsevich2(pi: &MixedMultivector) -> Result<StarProduct> {
    require_hbar_divisible(pi)?;
    let jac = pi.schouten(pi)?;
    if !jac.is_zero() {
        return Err(Error::NonPoisson(jac.to_string()));
    }
    let (m, _) = pi.dims();
    let h = pi.order();
    let mat = bivector_matrix(pi)?;
    let mut out = PolyDiffOp::zero(2, h);
    for n in 1..=h {
        exponential_terms(&mat, m, n, h, &mut out);
    }
    // (1/12) π^{ij} ∂_j π^{kl} (∂_i∂_k ⊗ ∂_l − ∂_k ⊗ ∂_i∂_l)
    let w = crate::exactalg::ratio(1, 12);
    for i in 1..=m {
        for j in 1..=m {
            if mat[i][j].is_zero() {
                continue;
            }
            for k in 1..=m {
                for l in 1..=m {
                    let d = mat[k][l].derivative(Var::X(j));
                    if d.is_zero() {
                        continue;
                    }
                    let c = (&mat[i][j] * &d).scale(&w);
                    out.add_term(vec![multi(&[i, k]), multi(&[l])], c.clone());
                    out.add_term(vec![multi(&[k]), multi(&[i, l])], -&c);
                }
            }
        }
    }
    StarProduct::new(out)
}

/// Associators on the supplied triples.
pub fn assoc_residual(s: &StarProduct, triples: &[(Scalar, Scalar, Scalar)]) -> Vec<Scalar> {
    triples.iter().map(|(f, g, h)| s.associator(f, g, h)).collect()
}

/// The bivector of a star product's first-order skew part is recovered by
/// `f⋆g − g⋆f = h·{f,g} + O(h²)`; this returns `π(df, dg)` from `π`.
pub fn poisson_bracket(pi: &MixedMultivector, f: &Scalar, g: &Scalar) -> Result<Scalar> {
    let (m, _) = pi.dims();
    let mat = bivector_matrix(pi)?;
    let mut acc = Scalar::zero(pi.order().min(f.order()).min(g.order()));
    for i in 1..=m {
        for j in 1..=m {
            if !mat[i][j].is_zero() {
                acc = &acc + &(&mat[i][j] * &(&f.derivative(Var::X(i)) * &g.derivative(Var::X(j))));
            }
        }
    }
    Ok(acc)
}

/// Tangent-leg pattern helper for callers building bivectors by index.
pub fn bivector_legs(i: usize, j: usize) -> Legs {
    Legs::new(&[i, j], &[])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{parse_scalar, ratio};

    fn s(src: &str, o: usize) -> Scalar {
        parse_scalar(src, o).unwrap()
    }

    fn dx(i: usize) -> Monomial {
        Monomial::var(Var::X(i))
    }

    fn bivector(m: usize, o: usize, terms: &[(&str, usize, usize)]) -> MixedMultivector {
        let mut out = MixedMultivector::zero(m, 0, o);
        for (c, i, j) in terms {
            out = out.add(&MixedMultivector::term(m, 0, s(c, o), &[*i, *j], &[]).unwrap()).unwrap();
        }
        out
    }

    #[test]
    fn apply_examples() {
        let p = PolyDiffOp::single(vec![dx(1), dx(2)], Scalar::one(0));
        assert_eq!(p.apply(&[s("x1^2", 0), s("x2", 0)]).unwrap(), s("2*x1", 0));
        assert_eq!(PolyDiffOp::identity(0).apply(&[s("x1*x2 + 3", 0)]).unwrap(), s("x1*x2 + 3", 0));
        assert_eq!(PolyDiffOp::product(0).apply(&[s("x1", 0), s("x2", 0)]).unwrap(), s("x1*x2", 0));
        assert!(matches!(p.apply(&[s("x1", 0)]), Err(Error::ArityMismatch { .. })));
    }

    #[test]
    fn insertion_matches_evaluation() {
        let p = PolyDiffOp::single(vec![Monomial::var_pow(Var::X(1), 2), dx(2)], s("x2", 0));
        let q = PolyDiffOp::single(vec![dx(1), Monomial::one()], s("x1^2", 0));
        let (f, g, h) = (s("x1^3*x2", 0), s("x1*x2^2", 0), s("x1^2 + x2", 0));
        let direct = p.apply(&[q.apply(&[f.clone(), g.clone()]).unwrap(), h.clone()]).unwrap();
        assert_eq!(p.insert(0, &q).apply(&[f, g, h]).unwrap(), direct);
    }

    #[test]
    fn hochschild_examples() {
        let m = PolyDiffOp::product(0);
        assert!(m.gerstenhaber(&m).is_zero());
        let f = PolyDiffOp::function(s("x1^2 + x2", 0));
        assert!(m.gerstenhaber(&f).is_zero());
        let v = PolyDiffOp::vector_field(&[(Var::X(1), s("x2", 0)), (Var::X(2), s("x1^2", 0))], 0);
        assert!(v.hochschild_d().is_zero());
        // biderivations are cocycles
        assert!(PolyDiffOp::single(vec![dx(1), dx(1)], Scalar::one(0)).hochschild_d().is_zero());
        let p = PolyDiffOp::single(vec![Monomial::var_pow(Var::X(1), 2), dx(1)], Scalar::one(0));
        let dp = p.hochschild_d();
        assert!(!dp.is_zero());
        // oracle: (δP)(f,g,h) = fP(g,h) − P(fg,h) + P(f,gh) − P(f,g)h, and [m,P] = −δP
        let (f, g, h) = (s("x1^2", 0), s("x1*x2", 0), s("x1^3", 0));
        let ap = |a: &Scalar, b: &Scalar| p.apply(&[a.clone(), b.clone()]).unwrap();
        let delta = &(&(&(&f * &ap(&g, &h)) - &ap(&(&f * &g), &h)) + &ap(&f, &(&g * &h))) - &(&ap(&f, &g) * &h);
        assert_eq!(dp.apply(&[f, g, h]).unwrap(), -&delta);
        assert!(dp.hochschild_d().is_zero());
    }

    #[test]
    fn hkr_examples() {
        let pi = bivector(2, 0, &[("1", 1, 2)]);
        let mut expect = PolyDiffOp::zero(2, 0);
        expect.add_term(vec![dx(1), dx(2)], Scalar::from_expr(Expr::constant(ratio(1, 2)), 0));
        expect.add_term(vec![dx(2), dx(1)], Scalar::from_expr(Expr::constant(ratio(-1, 2)), 0));
        assert_eq!(hkr(&pi).unwrap(), expect);
        let f = MixedMultivector::function(2, 0, s("x1", 0));
        assert_eq!(hkr(&f).unwrap(), PolyDiffOp::function(s("x1", 0)));
        let v = MixedMultivector::term(2, 0, s("x2", 0), &[1], &[]).unwrap();
        assert_eq!(hkr(&v).unwrap(), PolyDiffOp::vector_field(&[(Var::X(1), s("x2", 0))], 0));
        let bad = MixedMultivector::term(2, 1, s("1", 0), &[1], &[1]).unwrap();
        assert!(hkr(&bad).is_err());
    }

    #[test]
    fn moyal_examples() {
        let star = moyal(&bivector(2, 4, &[("h", 1, 2)])).unwrap();
        let (x1, x2) = (s("x1", 4), s("x2", 4));
        assert_eq!(star.apply(&x1, &x2), s("x1*x2 + h/2", 4));
        assert_eq!(star.apply(&x2, &x1), s("x1*x2 - h/2", 4));
        assert_eq!(star.commutator(&x1, &x2), s("h", 4));
        assert_eq!(star.apply(&s("x1^2*x2", 4), &Scalar::one(4)), s("x1^2*x2", 4));
        assert!(star.associator(&x1, &x2, &s("x1*x2", 4)).is_zero());
        let zero = moyal(&MixedMultivector::zero(2, 0, 4)).unwrap();
        assert_eq!(zero.apply(&x1, &x2), s("x1*x2", 4));
        assert!(matches!(moyal(&bivector(2, 2, &[("h*x1", 1, 2)])), Err(Error::XDependent(_))));
    }

    #[test]
    fn kontsevich_examples() {
        let heis = bivector(3, 2, &[("h*x3", 1, 2)]);
        let star = kontsevich2(&heis).unwrap();
        assert_eq!(star.commutator(&s("x1", 2), &s("x2", 2)), s("h*x3", 2));
        let c = bivector(2, 2, &[("h + 2*h^2", 1, 2)]);
        assert_eq!(kontsevich2(&c).unwrap(), moyal(&c).unwrap());
        let z = kontsevich2(&MixedMultivector::zero(2, 0, 2)).unwrap();
        assert!(z.correction().is_zero());
        let bad = bivector(3, 2, &[("h*x3", 1, 2), ("h*x2", 2, 3)]);
        assert!(matches!(kontsevich2(&bad), Err(Error::NonPoisson(_))));
    }

    #[test]
    fn assoc_residual_examples() {
        let heis = kontsevich2(&bivector(3, 2, &[("h*x3", 1, 2)])).unwrap();
        let r = assoc_residual(&heis, &[(s("x1*x3", 2), s("x2^2", 2), s("x1*x2", 2))]);
        assert!(r[0].is_zero());
        let mut c = PolyDiffOp::zero(2, 2);
        c.add_term(vec![dx(1), dx(1)], s("h", 2));
        let bad = StarProduct::new(c).unwrap();
        assert!(!bad.associator(&s("x1", 2), &s("x1", 2), &s("x1^2", 2)).is_zero());
        assert!(!bad.operator_residual().is_zero());
        assert!(heis.operator_residual().is_zero());
    }

    #[test]
    fn unitality_is_enforced() {
        let mut c = PolyDiffOp::zero(2, 1);
        c.add_term(vec![Monomial::one(), dx(1)], s("h", 1));
        assert!(StarProduct::new(c).is_err());
    }

    #[test]
    fn star_inverse() {
        let star = moyal(&bivector(2, 3, &[("h", 1, 2)])).unwrap();
        let a = s("1 + h*x1 + h^2*x2", 3);
        let b = star.inverse(&a).unwrap();
        assert_eq!(star.apply(&a, &b), Scalar::one(3));
        assert_eq!(star.apply(&b, &a), Scalar::one(3));
    }
}

//! Multivector fields on M tensored with forms on B, as a differential
//! graded Lie algebra.
//!
//! # Conventions
//!
//! A term `(tm = I, db = J)` with coefficient `c` stands for
//! `c · db_J ∧ ∂_I` (form legs to the left). Internally every leg is an odd
//! generator: `ε_a ↔ db_a`, `θ_i ↔ ∂_i`, ordered `ε_1 < … < ε_k < θ_1 < … < θ_m`.
//!
//! * wedge: the graded-commutative product of the odd generators;
//! * `d_B = Σ_a ε_a ∂/∂b_a`, acting from the left;
//! * bracket: `[P, Q] = φ(⟦φP, φQ⟧)` where
//!   `⟦P, Q⟧ = Σ_i (P ∂⃖/∂θ_i)(∂Q/∂x_i) − (∂P/∂x_i)(∂⃗/∂θ_i Q)` and
//!   `φ` multiplies a term with `p` tangent legs by `(−1)^{p(p−1)/2}`.
//!
//! With these choices `[∂₁, x₁∂₂] = ∂₂`, `[∂₁∧∂₂, x₁] = ∂₂`, graded Jacobi
//! and the graded Leibniz rule for `d_B` hold for the shifted degree
//! `(p − 1) + q`, and the graph correspondence in [`crate::dirac`] matches
//! Maurer–Cartan elements with Dirac structures.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::exactalg::{rat, Expr, Rational, Scalar, Var};

/// Leg pattern of a term: bitmasks over the tangent indices (`tm`, bit
/// `i-1` for `∂_i`) and the form indices (`db`, bit `a-1` for `db_a`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Legs {
    pub db: u16,
    pub tm: u16,
}

impl Legs {
    pub fn new(tm: &[usize], db: &[usize]) -> Self {
        let mut l = Legs { db: 0, tm: 0 };
        for &i in tm {
            l.tm |= 1 << (i - 1);
        }
        for &a in db {
            l.db |= 1 << (a - 1);
        }
        l
    }

    pub fn p(&self) -> u32 {
        self.tm.count_ones()
    }

    pub fn q(&self) -> u32 {
        self.db.count_ones()
    }

    pub fn tm_indices(&self) -> Vec<usize> {
        bits(self.tm)
    }

    pub fn db_indices(&self) -> Vec<usize> {
        bits(self.db)
    }
}

pub(crate) fn bits(mask: u16) -> Vec<usize> {
    (0..16).filter(|i| mask & (1 << i) != 0).map(|i| i + 1).collect()
}

/// Sign of concatenating two sorted odd words `a` then `b` into sorted
/// order; `None` if they share a generator.
pub(crate) fn merge_sign(a: u16, b: u16) -> Option<i32> {
    if a & b != 0 {
        return None;
    }
    let mut inv = 0u32;
    for j in 0..16 {
        if b & (1 << j) != 0 {
            inv += (a >> (j + 1)).count_ones();
        }
    }
    Some(if inv % 2 == 0 { 1 } else { -1 })
}

/// Product of two super monomials `ε_J θ_I · ε_L θ_K`.
fn super_mul(x: Legs, y: Legs) -> Option<(i32, Legs)> {
    // move ε_L left past θ_I
    let s0 = if (x.p() * y.q()) % 2 == 0 { 1 } else { -1 };
    let s1 = merge_sign(x.db, y.db)?;
    let s2 = merge_sign(x.tm, y.tm)?;
    Some((s0 * s1 * s2, Legs { db: x.db | y.db, tm: x.tm | y.tm }))
}

fn left_deriv_theta(l: Legs, i: usize) -> Option<(i32, Legs)> {
    let bit = 1u16 << (i - 1);
    if l.tm & bit == 0 {
        return None;
    }
    let before = (l.tm & (bit - 1)).count_ones() + l.q();
    Some((if before % 2 == 0 { 1 } else { -1 }, Legs { db: l.db, tm: l.tm & !bit }))
}

fn right_deriv_theta(l: Legs, i: usize) -> Option<(i32, Legs)> {
    let bit = 1u16 << (i - 1);
    if l.tm & bit == 0 {
        return None;
    }
    let after = (l.tm & !((bit << 1) - 1)).count_ones();
    Some((if after % 2 == 0 { 1 } else { -1 }, Legs { db: l.db, tm: l.tm & !bit }))
}

fn twist_sign(l: Legs) -> i32 {
    let p = l.p();
    if (p * p.saturating_sub(1) / 2) % 2 == 0 {
        1
    } else {
        -1
    }
}

fn signed(c: &Scalar, s: i32) -> Scalar {
    if s > 0 {
        c.clone()
    } else {
        -c
    }
}

/// Element of Γ(⋀TM) ⊗ Ω(B) on a coordinate chart `M = ℝ^m`, `B = ℝ^k`.
#[derive(Clone, PartialEq, Eq)]
pub struct MixedMultivector {
    m: usize,
    k: usize,
    order: usize,
    terms: BTreeMap<Legs, Scalar>,
}

impl MixedMultivector {
    pub fn zero(m: usize, k: usize, order: usize) -> Self {
        assert!(m <= crate::exactalg::MAX_DIM && k <= crate::exactalg::MAX_DIM);
        MixedMultivector { m, k, order, terms: BTreeMap::new() }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.m, self.k)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Single term `c · db_J ∧ ∂_I`; the index lists may be unsorted, the
    /// permutation sign is absorbed into the coefficient.
    pub fn term(m: usize, k: usize, c: Scalar, tm: &[usize], db: &[usize]) -> Result<Self> {
        let order = c.order();
        let mut out = Self::zero(m, k, order);
        let mut sign = 1;
        let mut tmask = 0u16;
        for &i in tm {
            if i == 0 || i > m {
                return Err(Error::DimensionMismatch(format!("tangent index {i} outside 1..={m}")));
            }
            match merge_sign(tmask, 1 << (i - 1)) {
                Some(s) => sign *= s,
                None => return Ok(out),
            }
            tmask |= 1 << (i - 1);
        }
        let mut dmask = 0u16;
        for &a in db {
            if a == 0 || a > k {
                return Err(Error::DimensionMismatch(format!("form index {a} outside 1..={k}")));
            }
            match merge_sign(dmask, 1 << (a - 1)) {
                Some(s) => sign *= s,
                None => return Ok(out),
            }
            dmask |= 1 << (a - 1);
        }
        out.add_term(Legs { db: dmask, tm: tmask }, signed(&c, sign));
        Ok(out)
    }

    /// A function (bidegree (0,0)).
    pub fn function(m: usize, k: usize, c: Scalar) -> Self {
        let mut out = Self::zero(m, k, c.order());
        out.add_term(Legs { db: 0, tm: 0 }, c);
        out
    }

    pub fn add_term(&mut self, legs: Legs, c: Scalar) {
        let c = c.with_order(self.order.min(c.order()));
        let entry = self.terms.entry(legs).or_insert_with(|| Scalar::zero(c.order()));
        *entry = &*entry + &c;
        if entry.is_zero() {
            self.terms.remove(&legs);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Legs, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, legs: Legs) -> Scalar {
        self.terms.get(&legs).cloned().unwrap_or_else(|| Scalar::zero(self.order))
    }

    /// Coefficient of `db_J ∧ ∂_I` for the given (sorted) indices.
    pub fn coeff_at(&self, tm: &[usize], db: &[usize]) -> Scalar {
        self.coeff(Legs::new(tm, db))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_dims(&self, other: &Self) -> Result<()> {
        if self.m != other.m || self.k != other.k {
            return Err(Error::DimensionMismatch(format!(
                "({}, {}) vs ({}, {})",
                self.m, self.k, other.m, other.k
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        let mut out = self.clone();
        out.order = self.order.min(other.order);
        for (l, c) in &other.terms {
            out.add_term(*l, c.clone());
        }
        out.retruncate();
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

    pub fn scale_by(&self, s: &Scalar) -> Self {
        self.map_coeffs(|c| c * s)
    }

    pub fn map_coeffs(&self, f: impl Fn(&Scalar) -> Scalar) -> Self {
        let mut out = Self::zero(self.m, self.k, self.order);
        for (l, c) in &self.terms {
            out.add_term(*l, f(c));
        }
        out
    }

    pub fn try_map_coeffs(&self, f: impl Fn(&Scalar) -> Result<Scalar>) -> Result<Self> {
        let mut out = Self::zero(self.m, self.k, self.order);
        for (l, c) in &self.terms {
            out.add_term(*l, f(c)?);
        }
        Ok(out)
    }

    fn retruncate(&mut self) {
        let o = self.order;
        let old = std::mem::take(&mut self.terms);
        for (l, c) in old {
            let c = c.with_order(o);
            if !c.is_zero() {
                self.terms.insert(l, c);
            }
        }
    }

    /// Keep only terms of bidegree `(p, q)`.
    pub fn component(&self, p: u32, q: u32) -> Self {
        self.filter(|l| l.p() == p && l.q() == q)
    }

    pub fn filter(&self, pred: impl Fn(&Legs) -> bool) -> Self {
        let mut out = Self::zero(self.m, self.k, self.order);
        for (l, c) in &self.terms {
            if pred(l) {
                out.add_term(*l, c.clone());
            }
        }
        out
    }

    /// Shifted DGLA degree `(p − 1) + q`, if homogeneous.
    pub fn degree(&self) -> Option<i32> {
        let mut it = self.terms.keys().map(|l| l.p() as i32 - 1 + l.q() as i32);
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        let mut out = Self::zero(self.m, self.k, self.order.min(other.order));
        for (l1, c1) in &self.terms {
            for (l2, c2) in &other.terms {
                if let Some((s, l)) = super_mul(*l1, *l2) {
                    out.add_term(l, signed(&(c1 * c2), s));
                }
            }
        }
        Ok(out)
    }

    fn twisted(&self) -> Self {
        let mut out = Self::zero(self.m, self.k, self.order);
        for (l, c) in &self.terms {
            out.add_term(*l, signed(c, twist_sign(*l)));
        }
        out
    }

    fn canonical_bracket(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.m, self.k, self.order.min(other.order));
        for (l1, c1) in &self.terms {
            for (l2, c2) in &other.terms {
                for i in 1..=self.m {
                    let xi = Var::X(i);
                    if let Some((s1, r1)) = right_deriv_theta(*l1, i) {
                        let dc2 = c2.derivative(xi);
                        if !dc2.is_zero() {
                            if let Some((s2, l)) = super_mul(r1, *l2) {
                                out.add_term(l, signed(&(c1 * &dc2), s1 * s2));
                            }
                        }
                    }
                    if let Some((s1, r2)) = left_deriv_theta(*l2, i) {
                        let dc1 = c1.derivative(xi);
                        if !dc1.is_zero() {
                            if let Some((s2, l)) = super_mul(*l1, r2) {
                                out.add_term(l, signed(&(&dc1 * c2), -s1 * s2));
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Schouten bracket extended to Γ(⋀TM) ⊗ Ω(B) (the DGLA bracket).
    pub fn schouten(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        Ok(self.twisted().canonical_bracket(&other.twisted()).twisted())
    }

    /// Alias for [`Self::schouten`]: the bracket of the tensor DGLA.
    pub fn dgla_bracket(&self, other: &Self) -> Result<Self> {
        self.schouten(other)
    }

    /// de Rham differential in the B directions.
    pub fn d_b(&self) -> Self {
        let mut out = Self::zero(self.m, self.k, self.order);
        for (l, c) in &self.terms {
            for a in 1..=self.k {
                let dc = c.derivative(Var::B(a));
                if dc.is_zero() {
                    continue;
                }
                let eps = Legs { db: 1 << (a - 1), tm: 0 };
                if let Some((s, nl)) = super_mul(eps, *l) {
                    out.add_term(nl, signed(&dc, s));
                }
            }
        }
        out
    }

    /// `d_B σ + ½[σ, σ]` for a total-degree-1 element.
    pub fn mc_residual(&self) -> Result<Self> {
        if !self.is_zero() && self.degree() != Some(1) {
            return Err(Error::WrongDegree(format!("expected total degree 1, got {:?}", self.degree())));
        }
        let half = crate::exactalg::ratio(1, 2);
        self.d_b().add(&self.schouten(self)?.scale(&half))
    }

    /// Substitute the ring variables in every coefficient.
    pub fn substitute(&self, subs: &[(Var, crate::exactalg::Poly)]) -> Result<Self> {
        self.try_map_coeffs(|c| c.substitute_many(subs))
    }

    /// Same element viewed on a chart with more B directions.
    pub fn with_dims(&self, m: usize, k: usize) -> Result<Self> {
        if m < self.m || k < self.k {
            return Err(Error::DimensionMismatch("cannot shrink chart".into()));
        }
        Ok(MixedMultivector { m, k, order: self.order, terms: self.terms.clone() })
    }

    pub fn with_order(&self, order: usize) -> Self {
        let mut out = Self::zero(self.m, self.k, order);
        for (l, c) in &self.terms {
            out.add_term(*l, c.with_order(order));
        }
        out
    }

    /// Coefficient-wise h-order `n` part, as an order-0 element.
    pub fn hbar_coeff(&self, n: usize) -> Self {
        let mut out = Self::zero(self.m, self.k, 0);
        for (l, c) in &self.terms {
            if n <= c.order() {
                out.add_term(*l, Scalar::from_expr(c.coeff(n).clone(), 0));
            }
        }
        out
    }

    pub fn is_polynomial(&self) -> bool {
        self.terms.values().all(Scalar::is_polynomial)
    }

    /// Evaluate h at a rational value, giving an order-0 element.
    pub fn eval_hbar(&self, h: &Rational) -> Self {
        let mut out = Self::zero(self.m, self.k, 0);
        for (l, c) in &self.terms {
            let mut acc = Expr::zero();
            let mut pw = rat(1);
            for n in 0..=c.order() {
                acc = &acc + &c.coeff(n).scale(&pw);
                pw = &pw * h;
            }
            out.add_term(*l, Scalar::from_expr(acc, 0));
        }
        out
    }
}

impl fmt::Display for MixedMultivector {
    /// `(coeff)*db1^db2^D1^D2 + …` with `D_i` for `∂/∂x_i`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (l, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})")?;
            let legs: Vec<String> = l
                .db_indices()
                .iter()
                .map(|a| format!("db{a}"))
                .chain(l.tm_indices().iter().map(|i| format!("D{i}")))
                .collect();
            if !legs.is_empty() {
                write!(f, "*{}", legs.join("^"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MixedMultivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MixedMultivector[m={}, k={}]({self})", self.m, self.k)
    }
}

/// A Maurer–Cartan element of the h-weighted DGLA: bidegrees (2,0), (1,1)
/// and (0,2) only, with the (2,0) and (1,1) parts divisible by h.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianFamily {
    sigma: MixedMultivector,
}

impl HamiltonianFamily {
    /// Checks the bidegree support and h-divisibility; the MC residual is
    /// checked separately by [`crate::dirac::lemma2_degree_check`] and
    /// [`MixedMultivector::mc_residual`].
    pub fn new(sigma: MixedMultivector) -> Result<Self> {
        for (l, c) in sigma.terms() {
            let (p, q) = (l.p(), l.q());
            if p + q != 2 {
                return Err(Error::WrongDegree(format!("term of bidegree ({p},{q}) in a Hamiltonian family")));
            }
            if p > 0 && !c.coeff(0).is_zero() {
                return Err(Error::DegreeViolation(format!(
                    "bidegree ({p},{q}) term {l:?} has h^0 coefficient {}",
                    c.coeff(0)
                )));
            }
        }
        Ok(HamiltonianFamily { sigma })
    }

    pub fn sigma(&self) -> &MixedMultivector {
        &self.sigma
    }

    pub fn dims(&self) -> (usize, usize) {
        self.sigma.dims()
    }

    pub fn order(&self) -> usize {
        self.sigma.order()
    }

    /// The (2,0) part: the family of formal Poisson structures on M.
    pub fn poisson(&self) -> MixedMultivector {
        self.sigma.component(2, 0)
    }

    pub fn connection(&self) -> MixedMultivector {
        self.sigma.component(1, 1)
    }

    pub fn curvature_form(&self) -> MixedMultivector {
        self.sigma.component(0, 2)
    }

    pub fn is_maurer_cartan(&self) -> Result<bool> {
        Ok(self.sigma.mc_residual()?.is_zero())
    }
}

/// Convenience: `c · h^n` as a scalar of the given order.
pub fn hpow(c: Expr, n: usize, order: usize) -> Scalar {
    Scalar::monomial(c, n, order)
}

/// Convenience: integer constant as a scalar.
pub fn sconst(n: i64, order: usize) -> Scalar {
    Scalar::from_expr(Expr::constant(rat(n)), order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{parse_scalar, ratio};

    fn s(src: &str) -> Scalar {
        parse_scalar(src, 2).unwrap()
    }

    fn mv(m: usize, k: usize, terms: &[(&str, &[usize], &[usize])]) -> MixedMultivector {
        let mut out = MixedMultivector::zero(m, k, 2);
        for (c, tm, db) in terms {
            out = out.add(&MixedMultivector::term(m, k, s(c), tm, db).unwrap()).unwrap();
        }
        out
    }

    #[test]
    fn wedge_examples() {
        let d1 = mv(2, 1, &[("1", &[1], &[])]);
        let d2 = mv(2, 1, &[("1", &[2], &[])]);
        assert_eq!(d1.wedge(&d2).unwrap(), mv(2, 1, &[("1", &[1, 2], &[])]));
        assert!(d1.wedge(&d1).unwrap().is_zero());
        // (x1 db1^D1) ^ D2 = x1 db1^D1^D2: the tangent legs are already ordered
        let a = mv(2, 1, &[("x1", &[1], &[1])]);
        assert_eq!(a.wedge(&d2).unwrap(), mv(2, 1, &[("x1", &[1, 2], &[1])]));
        // D2 ^ (x1 db1^D1): moving db1 past D2 and reordering D2 D1 gives +1
        assert_eq!(d2.wedge(&a).unwrap(), mv(2, 1, &[("x1", &[1, 2], &[1])]));
    }

    #[test]
    fn term_sorts_indices() {
        let a = mv(2, 0, &[("1", &[2, 1], &[])]);
        assert_eq!(a, mv(2, 0, &[("-1", &[1, 2], &[])]));
    }

    #[test]
    fn schouten_examples() {
        let d1 = mv(2, 0, &[("1", &[1], &[])]);
        let x1d2 = mv(2, 0, &[("x1", &[2], &[])]);
        let d2 = mv(2, 0, &[("1", &[2], &[])]);
        assert_eq!(d1.schouten(&x1d2).unwrap(), d2);
        let pi = mv(2, 0, &[("1", &[1, 2], &[])]);
        let x1 = mv(2, 0, &[("x1", &[], &[])]);
        assert_eq!(pi.schouten(&x1).unwrap(), d2);
        assert!(pi.schouten(&pi).unwrap().is_zero());
    }

    #[test]
    fn d_b_examples() {
        let a = mv(2, 1, &[("b1", &[1, 2], &[])]);
        assert_eq!(a.d_b(), mv(2, 1, &[("1", &[1, 2], &[1])]));
        assert!(mv(2, 1, &[("x1", &[1], &[])]).d_b().is_zero());
        let c = mv(0, 2, &[("b2", &[], &[1])]);
        assert_eq!(c.d_b(), mv(0, 2, &[("-1", &[], &[1, 2])]));
    }

    #[test]
    fn mc_examples() {
        let sigma = mv(2, 0, &[("h", &[1, 2], &[])]);
        assert!(sigma.mc_residual().unwrap().is_zero());
        let sigma = mv(2, 2, &[("h", &[1, 2], &[]), ("b1^2 + 3*b2", &[], &[1, 2])]);
        assert!(sigma.mc_residual().unwrap().is_zero());
        let sigma = mv(2, 1, &[("h*b1", &[1, 2], &[])]);
        assert_eq!(sigma.mc_residual().unwrap(), mv(2, 1, &[("h", &[1, 2], &[1])]));
        let bad = mv(2, 0, &[("1", &[1], &[])]);
        assert!(matches!(bad.mc_residual(), Err(Error::WrongDegree(_))));
    }

    #[test]
    fn hamiltonian_family_degree_constraints() {
        let ok = mv(2, 1, &[("h", &[1, 2], &[]), ("h*x1", &[1], &[1])]);
        assert!(HamiltonianFamily::new(ok).is_ok());
        let bad = mv(2, 1, &[("1 + h", &[1, 2], &[])]);
        assert!(matches!(HamiltonianFamily::new(bad), Err(Error::DegreeViolation(_))));
    }

    #[test]
    fn half_is_exact() {
        let sigma = mv(2, 0, &[("h*x1", &[1, 2], &[])]);
        let r = sigma.schouten(&sigma).unwrap().scale(&ratio(1, 2));
        assert!(r.is_zero());
    }
}

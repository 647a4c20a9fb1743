use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::var::{Monomial, Var};
use super::Rational;

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Terms are kept in a `BTreeMap` keyed by [`Monomial`], zero coefficients
/// are never stored, so structural equality is value equality.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(c, Monomial::one())
    }

    pub fn int(n: i64) -> Self {
        Self::constant(rat(n))
    }

    pub fn var(v: Var) -> Self {
        Self::term(Rational::one(), Monomial::var(v))
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn from_terms(iter: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Poly::zero();
        for (m, c) in iter {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    /// The constant value, if the polynomial has no variables.
    pub fn as_constant(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        if self.is_constant() {
            return self.terms.get(&Monomial::one()).cloned();
        }
        None
    }

    pub fn constant_term(&self) -> Rational {
        self.terms.get(&Monomial::one()).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exp(v)).max().unwrap_or(0)
    }

    pub fn depends_on(&self, v: Var) -> bool {
        self.terms.keys().any(|m| m.exp(v) > 0)
    }

    pub fn depends_on_any(&self, pred: impl Fn(Var) -> bool + Copy) -> bool {
        self.terms.keys().any(|m| m.involves(pred))
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, a)| (*m, a * c)).collect() }
    }

    pub fn mul_monomial(&self, mono: &Monomial, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, a)| (m.mul(mono), a * c)).collect() }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn derivative(&self, v: Var) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.exp(v);
            if e > 0 {
                out.add_term(m.with_exp(v, e - 1), c * rat(e as i64));
            }
        }
        out
    }

    /// Antiderivative in `v` vanishing at `v = 0`.
    pub fn integrate(&self, v: Var) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.exp(v);
            out.add_term(m.with_exp(v, e + 1), c / rat(e as i64 + 1));
        }
        out
    }

    /// Definite integral over `v ∈ [0, 1]`.
    pub fn integrate_unit(&self, v: Var) -> Poly {
        self.integrate(v).substitute(v, &Poly::one())
    }

    /// Substitute `v := q`.
    pub fn substitute(&self, v: Var, q: &Poly) -> Poly {
        if !self.depends_on(v) {
            return self.clone();
        }
        let maxe = self.degree_in(v);
        let mut powers = vec![Poly::one()];
        for i in 1..=maxe as usize {
            let next = &powers[i - 1] * q;
            powers.push(next);
        }
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.exp(v) as usize;
            let rest = m.with_exp(v, 0);
            out = &out + &powers[e].mul_monomial(&rest, c);
        }
        out
    }

    /// Simultaneous substitution of several variables.
    pub fn substitute_many(&self, subs: &[(Var, Poly)]) -> Poly {
        if subs.is_empty() {
            return self.clone();
        }
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut rest = *m;
            let mut factor = Poly::constant(c.clone());
            for (v, q) in subs {
                let e = m.exp(*v);
                if e > 0 {
                    rest = rest.with_exp(*v, 0);
                    factor = &factor * &q.pow(e);
                }
            }
            out = &out + &factor.mul_monomial(&rest, &Rational::one());
        }
        out
    }

    /// Evaluate the variables listed in `point`, leaving the others symbolic.
    pub fn eval_partial(&self, point: &[(Var, Rational)]) -> Poly {
        let subs: Vec<(Var, Poly)> =
            point.iter().map(|(v, r)| (*v, Poly::constant(r.clone()))).collect();
        self.substitute_many(&subs)
    }

    /// Rename variables (a permutation or injective relabelling).
    pub fn rename(&self, map: impl Fn(Var) -> Var) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut nm = Monomial::one();
            for (v, e) in m.support() {
                let w = map(v);
                nm = nm.with_exp(w, nm.exp(w) + e);
            }
            out.add_term(nm, c.clone());
        }
        out
    }

    /// Exact division, `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (lm, lc) = d.leading()?;
        let (lm, lc) = (*lm, lc.clone());
        let mut rem = self.clone();
        let mut q = Poly::zero();
        while let Some((m, c)) = rem.leading() {
            if !lm.divides(m) {
                return None;
            }
            let qm = lm.quotient_of(m);
            let qc = c / &lc;
            rem = &rem - &d.mul_monomial(&qm, &qc);
            q.add_term(qm, qc);
        }
        Some(q)
    }

    /// Divide by the leading coefficient.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            Some((_, c)) => {
                let inv = c.recip();
                self.scale(&inv)
            }
            None => Poly::zero(),
        }
    }

    pub fn leading_coeff(&self) -> Rational {
        self.leading().map(|(_, c)| c.clone()).unwrap_or_else(Rational::zero)
    }

    /// Bound on |coefficient denominators|, used when clearing fractions.
    pub fn denominator_lcm(&self) -> BigInt {
        self.terms
            .values()
            .fold(BigInt::one(), |acc, c| num_integer::Integer::lcm(&acc, c.denom()))
    }

    pub fn map_coeffs(&self, f: impl Fn(&Rational) -> Rational) -> Poly {
        Poly::from_terms(self.terms.iter().map(|(m, c)| (*m, f(c))))
    }

    /// Split into powers of `v`: returns `(e, coefficient)` pairs.
    pub fn collect_in(&self, v: Var) -> BTreeMap<u32, Poly> {
        let mut out: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.exp(v)).or_default().add_term(m.with_exp(v, 0), c.clone());
        }
        out
    }

    /// Interval enclosure of the polynomial over a box, by term-wise bounds.
    pub fn range_bound(&self, box_: &[(Var, Rational, Rational)]) -> (Rational, Rational) {
        let mut lo = Rational::zero();
        let mut hi = Rational::zero();
        for (m, c) in &self.terms {
            let mut tlo = c.clone();
            let mut thi = c.clone();
            for (v, e) in m.support() {
                let (a, b) = box_
                    .iter()
                    .find(|(w, _, _)| *w == v)
                    .map(|(_, a, b)| (a.clone(), b.clone()))
                    .unwrap_or_else(|| (Rational::zero(), Rational::zero()));
                let (pa, pb) = pow_interval(&a, &b, e);
                let cands = [&tlo * &pa, &tlo * &pb, &thi * &pa, &thi * &pb];
                tlo = cands.iter().min().cloned().unwrap();
                thi = cands.iter().max().cloned().unwrap();
            }
            lo += tlo;
            hi += thi;
        }
        (lo, hi)
    }

    pub fn eval(&self, point: &dyn Fn(Var) -> Rational) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in m.support() {
                let x = point(v);
                t *= num_traits::pow(x, e as usize);
            }
            acc += t;
        }
        acc
    }
}

fn pow_interval(a: &Rational, b: &Rational, e: u32) -> (Rational, Rational) {
    let pa = num_traits::pow(a.clone(), e as usize);
    let pb = num_traits::pow(b.clone(), e as usize);
    if e % 2 == 0 && a.is_negative() && b.is_positive() {
        (Rational::zero(), pa.max(pb))
    } else if pa <= pb {
        (pa, pb)
    } else {
        (pb, pa)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let (mut big, small) =
            if self.terms.len() >= rhs.terms.len() { (self.clone(), rhs) } else { (rhs.clone(), self) };
        for (m, c) in &small.terms {
            big.add_term(*m, c.clone());
        }
        big
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c);
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect() }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($t:ty, $tr:ident, $f:ident) => {
        impl $tr for $t {
            type Output = $t;
            fn $f(self, rhs: $t) -> $t {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Poly, Add, add);
forward_owned!(Poly, Sub, sub);
forward_owned!(Poly, Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

pub(crate) fn fmt_rational_coeff(
    f: &mut fmt::Formatter<'_>,
    c: &Rational,
    mono_is_one: bool,
    first: bool,
) -> fmt::Result {
    let neg = c.is_negative();
    let a = c.abs();
    if first {
        if neg {
            f.write_str("-")?;
        }
    } else {
        f.write_str(if neg { " - " } else { " + " })?;
    }
    if mono_is_one {
        write!(f, "{a}")
    } else if !a.is_one() {
        write!(f, "{a}*")
    } else {
        Ok(())
    }
}

impl fmt::Display for Poly {
    /// Canonical text form: terms by descending total degree, then
    /// descending lexicographic order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| b.degree().cmp(&a.degree()).then(b.cmp(a)));
        for (i, (m, c)) in terms.into_iter().enumerate() {
            fmt_rational_coeff(f, c, m.is_one(), i == 0)?;
            if !m.is_one() {
                write!(f, "{m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Poly {
        Poly::var(Var::X(i))
    }
    fn b(j: usize) -> Poly {
        Poly::var(Var::B(j))
    }

    #[test]
    fn difference_of_squares() {
        let p = &(&x(1) + &Poly::one()) * &(&x(1) - &Poly::one());
        assert_eq!(p, &x(1).pow(2) - &Poly::one());
        assert_eq!(p.to_string(), "x1^2 - 1");
    }

    #[test]
    fn power_rule() {
        let p = &x(1).pow(2) * &b(1);
        assert_eq!(p.derivative(Var::X(1)), (&x(1) * &b(1)).scale(&rat(2)));
    }

    #[test]
    fn exact_division() {
        let d = &Poly::one() + &b(1);
        let p = &(&x(1) * &d) * &d;
        assert_eq!(p.div_exact(&d).unwrap(), &x(1) * &d);
        assert!(x(1).div_exact(&d).is_none());
    }

    #[test]
    fn substitution_and_integration() {
        let p = &Poly::var(Var::T).pow(2) * &x(1);
        assert_eq!(p.integrate_unit(Var::T), x(1).scale(&ratio(1, 3)));
        let q = p.substitute(Var::T, &(&Poly::var(Var::S) + &Poly::one()));
        assert_eq!(q.eval_partial(&[(Var::S, rat(0))]), x(1));
    }

    #[test]
    fn range_bound_encloses() {
        let p = &x(1).pow(2) - &x(1);
        let (lo, hi) = p.range_bound(&[(Var::X(1), rat(-1), rat(1))]);
        assert!(lo <= rat(-1) && hi >= rat(2));
    }
}

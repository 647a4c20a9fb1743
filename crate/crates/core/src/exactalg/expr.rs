use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;

use super::poly::Poly;
use super::var::Var;
use super::Rational;
use crate::error::{Error, Result};

/// Exact scalar: a polynomial, or a rational function whose denominator is
/// a product of powers of monic "atoms".
///
/// Atoms come from explicit divisions (scenario literals). Every division
/// first strips atoms that are already present, and the numerator is
/// reduced against every atom, so values built from coprime irreducible
/// atoms have a unique representation. Zero tests never depend on this:
/// `a - b` is put over a common denominator and its numerator compared
/// with zero.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Expr {
    num: Poly,
    den: Vec<(Poly, u32)>,
}

impl Expr {
    pub fn zero() -> Self {
        Expr { num: Poly::zero(), den: Vec::new() }
    }

    pub fn one() -> Self {
        Expr::from(Poly::one())
    }

    pub fn constant(c: Rational) -> Self {
        Expr::from(Poly::constant(c))
    }

    pub fn int(n: i64) -> Self {
        Expr::from(Poly::int(n))
    }

    pub fn var(v: Var) -> Self {
        Expr::from(Poly::var(v))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_empty() && self.num == Poly::one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        self.is_polynomial().then_some(&self.num)
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator_atoms(&self) -> &[(Poly, u32)] {
        &self.den
    }

    pub fn denominator(&self) -> Poly {
        self.den.iter().fold(Poly::one(), |acc, (a, e)| &acc * &a.pow(*e))
    }

    pub fn as_constant(&self) -> Option<Rational> {
        if self.is_polynomial() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn depends_on(&self, v: Var) -> bool {
        self.num.depends_on(v) || self.den.iter().any(|(a, _)| a.depends_on(v))
    }

    pub fn depends_on_any(&self, pred: impl Fn(Var) -> bool + Copy) -> bool {
        self.num.depends_on_any(pred) || self.den.iter().any(|(a, _)| a.depends_on_any(pred))
    }

    pub fn scale(&self, c: &Rational) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr { num: self.num.scale(c), den: self.den.clone() }
    }

    fn reduced(mut num: Poly, mut den: Vec<(Poly, u32)>) -> Expr {
        if num.is_zero() {
            return Expr::zero();
        }
        for (atom, e) in den.iter_mut() {
            while *e > 0 {
                match num.div_exact(atom) {
                    Some(q) => {
                        num = q;
                        *e -= 1;
                    }
                    None => break,
                }
            }
        }
        den.retain(|(_, e)| *e > 0);
        den.sort();
        Expr { num, den }
    }

    /// Divide by a polynomial.
    pub fn div_poly(&self, p: &Poly) -> Result<Expr> {
        if p.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(c) = p.as_constant() {
            return Ok(self.scale(&c.recip()));
        }
        let mut rest = p.clone();
        let mut den = self.den.clone();
        // strip atoms that are already in use
        for (atom, e) in den.iter_mut() {
            while let Some(q) = rest.div_exact(atom) {
                rest = q;
                *e += 1;
            }
        }
        let lc = rest.leading_coeff();
        let num = self.num.scale(&lc.recip());
        let rest = rest.monic();
        if !rest.is_constant() {
            match den.iter_mut().find(|(a, _)| *a == rest) {
                Some((_, e)) => *e += 1,
                None => den.push((rest, 1)),
            }
        } else {
            // rest is 1 after normalisation
        }
        Ok(Expr::reduced(num, den))
    }

    pub fn div(&self, other: &Expr) -> Result<Expr> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut out = self.clone();
        for (a, e) in &other.den {
            out = &out * &Expr::from(a.pow(*e));
        }
        out.div_poly(&other.num)
    }

    fn common(a: &[(Poly, u32)], b: &[(Poly, u32)]) -> Vec<(Poly, u32)> {
        let mut out: Vec<(Poly, u32)> = a.to_vec();
        for (atom, e) in b {
            match out.iter_mut().find(|(x, _)| x == atom) {
                Some((_, f)) => *f = (*f).max(*e),
                None => out.push((atom.clone(), *e)),
            }
        }
        out.sort();
        out
    }

    /// Numerator of `self` when written over the denominator `common`,
    /// which must be a multiple of `self`'s denominator.
    pub fn numerator_over(&self, common: &[(Poly, u32)]) -> Poly {
        let mut num = self.num.clone();
        for (atom, e) in common {
            let mine = self.den.iter().find(|(a, _)| a == atom).map(|(_, f)| *f).unwrap_or(0);
            if *e > mine {
                num = &num * &atom.pow(e - mine);
            }
        }
        num
    }

    /// Least common denominator (as atom powers) of a collection.
    pub fn common_denominator<'a>(items: impl IntoIterator<Item = &'a Expr>) -> Vec<(Poly, u32)> {
        let mut acc = Vec::new();
        for it in items {
            acc = Expr::common(&acc, &it.den);
        }
        acc
    }

    pub fn from_parts(num: Poly, den: Vec<(Poly, u32)>) -> Expr {
        Expr::reduced(num, den)
    }

    pub fn derivative(&self, v: Var) -> Expr {
        if self.den.is_empty() {
            return Expr::from(self.num.derivative(v));
        }
        if !self.depends_on(v) {
            return Expr::zero();
        }
        // (n / prod a_i^e_i)' = (n' prod a_i - n sum e_i a_i' prod_{j != i} a_j) / prod a_i^(e_i+1)
        let atoms: Vec<&Poly> = self.den.iter().map(|(a, _)| a).collect();
        let prod_all = atoms.iter().fold(Poly::one(), |acc, a| &acc * a);
        let mut num = &self.num.derivative(v) * &prod_all;
        for (i, (a, e)) in self.den.iter().enumerate() {
            let da = a.derivative(v);
            if da.is_zero() {
                continue;
            }
            let others = atoms
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .fold(Poly::one(), |acc, (_, b)| &acc * b);
            let t = &(&self.num * &da) * &others;
            num = &num - &t.scale(&super::poly::rat(*e as i64));
        }
        let den = self.den.iter().map(|(a, e)| (a.clone(), e + 1)).collect();
        Expr::reduced(num, den)
    }

    /// Substitute `v := q` (polynomial). Fails if a denominator becomes zero.
    pub fn substitute(&self, v: Var, q: &Poly) -> Result<Expr> {
        self.substitute_many(&[(v, q.clone())])
    }

    pub fn substitute_many(&self, subs: &[(Var, Poly)]) -> Result<Expr> {
        let num = self.num.substitute_many(subs);
        if self.den.is_empty() {
            return Ok(Expr::from(num));
        }
        let mut out = Expr::from(num);
        for (a, e) in &self.den {
            let na = a.substitute_many(subs);
            for _ in 0..*e {
                out = out.div_poly(&na)?;
            }
        }
        Ok(out)
    }

    pub fn rename(&self, map: impl Fn(Var) -> Var + Copy) -> Expr {
        let num = self.num.rename(map);
        if self.den.is_empty() {
            return Expr::from(num);
        }
        let mut out = Expr::from(num);
        for (a, e) in &self.den {
            let ra = a.rename(map);
            for _ in 0..*e {
                out = out.div_poly(&ra).expect("renamed atom is nonzero");
            }
        }
        out
    }

    /// Antiderivative in `v` from 0; polynomial data only.
    pub fn integrate(&self, v: Var) -> Result<Expr> {
        match self.as_poly() {
            Some(p) => Ok(Expr::from(p.integrate(v))),
            None if !self.depends_on(v) => Ok(self * &Expr::var(v)),
            None => Err(Error::NonPolynomial(format!("cannot integrate {self} in {v}"))),
        }
    }

    pub fn eval(&self, point: &dyn Fn(Var) -> Rational) -> Result<Rational> {
        let n = self.num.eval(point);
        let d = self.denominator().eval(point);
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(n / d)
    }

    pub fn eval_partial(&self, point: &[(Var, Rational)]) -> Result<Expr> {
        let subs: Vec<(Var, Poly)> =
            point.iter().map(|(v, r)| (*v, Poly::constant(r.clone()))).collect();
        self.substitute_many(&subs)
    }

    pub fn total_degree(&self) -> u32 {
        self.num.total_degree()
    }
}

impl From<Poly> for Expr {
    fn from(p: Poly) -> Self {
        Expr { num: p, den: Vec::new() }
    }
}

impl From<Rational> for Expr {
    fn from(c: Rational) -> Self {
        Expr::constant(c)
    }
}

impl Add for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        if self.den.is_empty() && rhs.den.is_empty() {
            return Expr::from(&self.num + &rhs.num);
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        let den = Expr::common(&self.den, &rhs.den);
        let num = &self.numerator_over(&den) + &rhs.numerator_over(&den);
        Expr::reduced(num, den)
    }
}

impl Sub for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        self + &(-rhs)
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr { num: -&self.num, den: self.den.clone() }
    }
}

impl Mul for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        if self.den.is_empty() && rhs.den.is_empty() {
            return Expr::from(&self.num * &rhs.num);
        }
        if self.is_zero() || rhs.is_zero() {
            return Expr::zero();
        }
        let mut den = self.den.clone();
        for (a, e) in &rhs.den {
            match den.iter_mut().find(|(x, _)| x == a) {
                Some((_, f)) => *f += e,
                None => den.push((a.clone(), *e)),
            }
        }
        Expr::reduced(&self.num * &rhs.num, den)
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        &self + &rhs
    }
}
impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        &self - &rhs
    }
}
impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        &self * &rhs
    }
}
impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        if self.num.num_terms() > 1 {
            write!(f, "({})", self.num)?;
        } else {
            write!(f, "{}", self.num)?;
        }
        f.write_str("/(")?;
        for (i, (a, e)) in self.den.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "({a})")?;
            } else {
                write!(f, "({a})^{e}")?;
            }
        }
        f.write_str(")")
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::poly::{rat, ratio};

    fn x(i: usize) -> Expr {
        Expr::var(Var::X(i))
    }
    fn b(j: usize) -> Expr {
        Expr::var(Var::B(j))
    }

    #[test]
    fn fraction_times_denominator_is_polynomial() {
        let d = &Expr::one() + &b(1);
        let f = x(1).div(&d).unwrap();
        assert!(!f.is_polynomial());
        let g = &f * &d;
        assert!(g.is_polynomial());
        assert_eq!(g, x(1));
    }

    #[test]
    fn fraction_sum_matches_rational_oracle() {
        // x1/(1+b1) + 1/(1+b1) evaluated at x1 = 2, b1 = 1/3 equals 9/4
        let d = &Expr::one() + &b(1);
        let s = &x(1).div(&d).unwrap() + &Expr::one().div(&d).unwrap();
        let v = s
            .eval(&|v| match v {
                Var::X(1) => rat(2),
                Var::B(1) => ratio(1, 3),
                _ => rat(0),
            })
            .unwrap();
        assert_eq!(v, ratio(9, 4));
    }

    #[test]
    fn quotient_rule() {
        // d/db1 (x1 / (1+b1)) = -x1 / (1+b1)^2
        let d = &Expr::one() + &b(1);
        let f = x(1).div(&d).unwrap();
        let df = f.derivative(Var::B(1));
        let expect = (-x(1)).div(&d).unwrap().div(&d).unwrap();
        assert!((&df - &expect).is_zero());
        assert_eq!(df, expect);
    }

    #[test]
    fn zero_denominator_rejected() {
        assert_eq!(x(1).div(&Expr::zero()), Err(Error::DivisionByZero));
        let f = Expr::one().div(&b(1)).unwrap();
        assert!(f.substitute(Var::B(1), &Poly::zero()).is_err());
    }

    #[test]
    fn cancellation_gives_canonical_form() {
        let d = &Expr::one() + &b(1);
        let a = (&x(1) * &d).div(&d).unwrap();
        assert_eq!(a, x(1));
        let two_d = d.scale(&rat(2));
        let c = x(1).div(&two_d).unwrap();
        let e = x(1).scale(&ratio(1, 2)).div(&d).unwrap();
        assert_eq!(c, e);
    }
}

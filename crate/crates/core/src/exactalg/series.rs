use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::expr::Expr;
use super::poly::Poly;
use super::var::Var;
use super::Rational;
use crate::error::{Error, Result};

/// Coefficient ring for [`HSeries`].
pub trait Coeff: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, c: &Rational) -> Self;
    /// Nonzero rational constant, if `self` is one.
    fn unit_constant(&self) -> Option<Rational>;
}

impl Coeff for Expr {
    fn zero() -> Self {
        Expr::zero()
    }
    fn one() -> Self {
        Expr::one()
    }
    fn is_zero(&self) -> bool {
        Expr::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, c: &Rational) -> Self {
        Expr::scale(self, c)
    }
    fn unit_constant(&self) -> Option<Rational> {
        self.as_constant().filter(|c| !num_traits::Zero::is_zero(c))
    }
}

impl Coeff for Rational {
    fn zero() -> Self {
        num_traits::Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, c: &Rational) -> Self {
        self * c
    }
    fn unit_constant(&self) -> Option<Rational> {
        (!Coeff::is_zero(self)).then(|| self.clone())
    }
}

/// Formal power series in h truncated after `h^order`.
///
/// Binary operations between series of different orders keep the smaller
/// order (the result is only known to that precision); [`HSeries::try_mul`]
/// is the strict variant that rejects mismatched orders.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HSeries<C> {
    coeffs: Vec<C>,
}

impl<C: Coeff> HSeries<C> {
    pub fn zero(order: usize) -> Self {
        HSeries { coeffs: vec![C::zero(); order + 1] }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(C::one(), order)
    }

    pub fn constant(c: C, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// `c h^k`, truncated.
    pub fn monomial(c: C, k: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    /// From coefficients `c_0, c_1, ...`, padded or truncated to `order`.
    pub fn from_coeffs(mut coeffs: Vec<C>, order: usize) -> Self {
        coeffs.resize(order + 1, C::zero());
        HSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &C {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, k: usize, c: C) {
        if k <= self.order() {
            self.coeffs[k] = c;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(C::is_zero)
    }

    /// Lowest power of h with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::from_coeffs(self.coeffs.iter().take(order + 1).cloned().collect(), order)
    }

    pub fn map(&self, f: impl Fn(&C) -> C) -> Self {
        HSeries { coeffs: self.coeffs.iter().map(f).collect() }
    }

    pub fn try_map<E>(&self, f: impl Fn(&C) -> std::result::Result<C, E>) -> std::result::Result<Self, E> {
        Ok(HSeries { coeffs: self.coeffs.iter().map(f).collect::<std::result::Result<_, E>>()? })
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.map(|x| x.scale(c))
    }

    pub fn scale_coeff(&self, c: &C) -> Self {
        self.map(|x| x.mul(c))
    }

    /// Multiply by h^k.
    pub fn shift(&self, k: usize) -> Self {
        let mut out = Self::zero(self.order());
        for i in 0..=self.order() {
            if i + k <= self.order() {
                out.coeffs[i + k] = self.coeffs[i].clone();
            }
        }
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        HSeries { coeffs: (0..=n).map(|i| self.coeffs[i].add(&o.coeffs[i])).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        HSeries { coeffs: (0..=n).map(|i| self.coeffs[i].sub(&o.coeffs[i])).collect() }
    }

    pub fn neg(&self) -> Self {
        self.map(C::neg)
    }

    /// Cauchy product truncated at the smaller order.
    pub fn mul(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        let mut out = Self::zero(n);
        for i in 0..=n {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=(n - i) {
                if o.coeffs[j].is_zero() {
                    continue;
                }
                out.coeffs[i + j] = out.coeffs[i + j].add(&self.coeffs[i].mul(&o.coeffs[j]));
            }
        }
        out
    }

    /// Strict product: both factors must carry the same truncation order.
    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        if self.order() != o.order() {
            return Err(Error::OrderMismatch(self.order(), o.order()));
        }
        Ok(self.mul(o))
    }

    /// Multiplicative inverse; the constant term must be a nonzero rational.
    pub fn invert(&self) -> Result<Self> {
        let c0 = self.coeffs[0]
            .unit_constant()
            .ok_or_else(|| Error::NonUnital(format!("{:?}", self.coeffs[0])))?;
        let inv0 = c0.recip();
        let n = self.order();
        let mut out = Self::zero(n);
        out.coeffs[0] = C::one().scale(&inv0);
        // r_k = -(1/c0) sum_{j=1..k} a_j r_{k-j}
        for k in 1..=n {
            let mut acc = C::zero();
            for j in 1..=k {
                acc = acc.add(&self.coeffs[j].mul(&out.coeffs[k - j]));
            }
            out.coeffs[k] = acc.scale(&(-inv0.clone()));
        }
        Ok(out)
    }
}

impl HSeries<Expr> {
    pub fn from_expr(e: Expr, order: usize) -> Self {
        Self::constant(e, order)
    }

    pub fn from_poly(p: Poly, order: usize) -> Self {
        Self::constant(Expr::from(p), order)
    }

    pub fn var(v: Var, order: usize) -> Self {
        Self::from_expr(Expr::var(v), order)
    }

    /// The formal parameter `h` itself.
    pub fn hbar(order: usize) -> Self {
        Self::monomial(Expr::one(), 1, order)
    }

    pub fn derivative(&self, v: Var) -> Self {
        self.map(|c| c.derivative(v))
    }

    pub fn substitute_many(&self, subs: &[(Var, Poly)]) -> Result<Self> {
        self.try_map(|c| c.substitute_many(subs))
    }

    pub fn integrate(&self, v: Var) -> Result<Self> {
        self.try_map(|c| c.integrate(v))
    }

    pub fn rename(&self, map: impl Fn(Var) -> Var + Copy) -> Self {
        self.map(|c| c.rename(map))
    }

    pub fn depends_on_any(&self, pred: impl Fn(Var) -> bool + Copy) -> bool {
        self.coeffs.iter().any(|c| c.depends_on_any(pred))
    }

    pub fn is_polynomial(&self) -> bool {
        self.coeffs.iter().all(Expr::is_polynomial)
    }

    pub fn eval_partial(&self, point: &[(Var, Rational)]) -> Result<Self> {
        self.try_map(|c| c.eval_partial(point))
    }

    pub fn with_order(&self, order: usize) -> Self {
        Self::from_coeffs(self.coeffs.iter().take(order + 1).cloned().collect(), order)
    }
}

impl<C: Coeff> Add for &HSeries<C> {
    type Output = HSeries<C>;
    fn add(self, rhs: &HSeries<C>) -> HSeries<C> {
        HSeries::add(self, rhs)
    }
}
impl<C: Coeff> Sub for &HSeries<C> {
    type Output = HSeries<C>;
    fn sub(self, rhs: &HSeries<C>) -> HSeries<C> {
        HSeries::sub(self, rhs)
    }
}
impl<C: Coeff> Mul for &HSeries<C> {
    type Output = HSeries<C>;
    fn mul(self, rhs: &HSeries<C>) -> HSeries<C> {
        HSeries::mul(self, rhs)
    }
}
impl<C: Coeff> Neg for &HSeries<C> {
    type Output = HSeries<C>;
    fn neg(self) -> HSeries<C> {
        HSeries::neg(self)
    }
}

impl<C: Coeff + fmt::Display> fmt::Display for HSeries<C> {
    /// `c0 + (c1)*h + (c2)*h^2 ...`, zero coefficients omitted.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*h")?,
                _ => write!(f, "({c})*h^{k}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl<C: Coeff + fmt::Display> fmt::Debug for HSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HSeries[{}]({self})", self.order())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::Scalar;

    fn h(order: usize) -> Scalar {
        Scalar::hbar(order)
    }

    #[test]
    fn truncated_products() {
        let one = Scalar::one(1);
        let p = &(&one + &h(1)) * &(&one - &h(1));
        assert_eq!(p, Scalar::one(1));
        let one = Scalar::one(2);
        let p = &(&one + &h(2)) * &(&one - &h(2));
        assert_eq!(p, &one - &(&h(2) * &h(2)));
        let a = &h(1) * &Scalar::var(Var::X(1), 1);
        let b = &h(1) * &Scalar::var(Var::X(2), 1);
        assert!((&a * &b).is_zero());
    }

    #[test]
    fn strict_product_rejects_mismatch() {
        assert_eq!(Scalar::one(1).try_mul(&Scalar::one(2)), Err(Error::OrderMismatch(1, 2)));
    }

    #[test]
    fn inverse_of_one_plus_hx() {
        let x1 = Scalar::var(Var::X(1), 2);
        let a = &Scalar::one(2) + &(&h(2) * &x1);
        let inv = a.invert().unwrap();
        // oracle: multiply back
        assert_eq!(&a * &inv, Scalar::one(2));
        let expect = &(&Scalar::one(2) - &(&h(2) * &x1)) + &(&(&h(2) * &h(2)) * &(&x1 * &x1));
        assert_eq!(inv, expect);
        assert_eq!(Scalar::one(5).invert().unwrap(), Scalar::one(5));
    }

    #[test]
    fn non_unital_rejected() {
        let a = &Scalar::var(Var::X(1), 2) + &h(2);
        assert!(matches!(a.invert(), Err(Error::NonUnital(_))));
    }
}

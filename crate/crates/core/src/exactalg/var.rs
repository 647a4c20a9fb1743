//! Chart variables and monomials.
//!
//! Every scalar in the crate lives in one fixed polynomial ring whose
//! variables are ordered `x1..x8, b1..b8, t, s, u`. The formal parameter
//! `h` is not a ring variable; it is carried by [`super::HSeries`].

use std::fmt;

/// Maximum number of `x` (resp. `b`) coordinates a chart may declare.
pub const MAX_DIM: usize = 8;
pub(crate) const NVARS: usize = 2 * MAX_DIM + 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    /// `x_i`, 1-based.
    X(usize),
    /// `b_j`, 1-based.
    B(usize),
    T,
    S,
    U,
}

impl Var {
    pub fn index(self) -> usize {
        match self {
            Var::X(i) => {
                assert!((1..=MAX_DIM).contains(&i), "x index out of range: {i}");
                i - 1
            }
            Var::B(j) => {
                assert!((1..=MAX_DIM).contains(&j), "b index out of range: {j}");
                MAX_DIM + j - 1
            }
            Var::T => 2 * MAX_DIM,
            Var::S => 2 * MAX_DIM + 1,
            Var::U => 2 * MAX_DIM + 2,
        }
    }

    pub fn from_index(idx: usize) -> Var {
        match idx {
            i if i < MAX_DIM => Var::X(i + 1),
            i if i < 2 * MAX_DIM => Var::B(i - MAX_DIM + 1),
            i if i == 2 * MAX_DIM => Var::T,
            i if i == 2 * MAX_DIM + 1 => Var::S,
            i if i == 2 * MAX_DIM + 2 => Var::U,
            _ => panic!("variable index out of range: {idx}"),
        }
    }

    pub fn is_x(self) -> bool {
        matches!(self, Var::X(_))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X(i) => write!(f, "x{i}"),
            Var::B(j) => write!(f, "b{j}"),
            Var::T => f.write_str("t"),
            Var::S => f.write_str("s"),
            Var::U => f.write_str("u"),
        }
    }
}

/// Exponent vector over all ring variables. The derived ordering is the
/// lexicographic monomial order with `x1` most significant.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(pub(crate) [u8; NVARS]);

impl Monomial {
    pub fn one() -> Self {
        Monomial([0; NVARS])
    }

    pub fn var(v: Var) -> Self {
        Self::var_pow(v, 1)
    }

    pub fn var_pow(v: Var, e: u32) -> Self {
        let mut m = Self::one();
        m.0[v.index()] = u8::try_from(e).expect("exponent overflow");
        m
    }

    pub fn exp(&self, v: Var) -> u32 {
        self.0[v.index()] as u32
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = [0u8; NVARS];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.0[i].checked_add(other.0[i]).expect("exponent overflow");
        }
        Monomial(out)
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self.divides(other)`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        let mut out = [0u8; NVARS];
        for (i, o) in out.iter_mut().enumerate() {
            *o = other.0[i] - self.0[i];
        }
        Monomial(out)
    }

    pub fn with_exp(&self, v: Var, e: u32) -> Monomial {
        let mut m = *self;
        m.0[v.index()] = u8::try_from(e).expect("exponent overflow");
        m
    }

    /// Variables with nonzero exponent, in ring order.
    pub fn support(&self) -> impl Iterator<Item = (Var, u32)> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| (Var::from_index(i), e as u32))
    }

    pub fn involves(&self, pred: impl Fn(Var) -> bool) -> bool {
        self.support().any(|(v, _)| pred(v))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        let mut first = true;
        for (v, e) in self.support() {
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_roundtrip() {
        for v in [Var::X(1), Var::X(8), Var::B(1), Var::B(3), Var::T, Var::S, Var::U] {
            assert_eq!(Var::from_index(v.index()), v);
        }
    }

    #[test]
    fn lex_order_is_multiplicative() {
        let x1 = Monomial::var(Var::X(1));
        let x2 = Monomial::var(Var::X(2));
        assert!(x1 > x2);
        assert!(x1.mul(&x1) > x1.mul(&x2));
        assert!(x1 > Monomial::one());
    }
}

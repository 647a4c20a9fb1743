//! Exact scalar arithmetic: rationals, sparse polynomials, rational
//! functions with atom denominators, and h-truncated series.

pub mod expr;
pub mod linalg;
pub mod parse;
pub mod poly;
pub mod series;
pub mod var;

pub use expr::Expr;
pub use parse::{parse_expr, parse_scalar};
pub use poly::{rat, ratio, Poly};
pub use series::{Coeff, HSeries};
pub use var::{Monomial, Var, MAX_DIM};

pub type Rational = num_rational::BigRational;

/// The scalar used by every geometric object: an h-series of exact
/// rational functions of the chart variables.
pub type Scalar = HSeries<Expr>;

use crate::error::{Error, Result};

/// Sign-uniformity guard for a denominator on the regular `(n+1)^d` grid
/// over a box. Non-exhaustive by nature; see the crate README.
pub fn check_denominator_on_grid(den: &Poly, box_: &[(Var, Rational, Rational)], n: usize) -> Result<()> {
    if den.is_constant() {
        return if den.is_zero() { Err(Error::DivisionByZero) } else { Ok(()) };
    }
    let vars: Vec<&(Var, Rational, Rational)> =
        box_.iter().filter(|(v, _, _)| den.depends_on(*v)).collect();
    let n = n.max(1);
    let mut idx = vec![0usize; vars.len()];
    let mut sign: Option<bool> = None;
    loop {
        let point: Vec<(Var, Rational)> = vars
            .iter()
            .zip(idx.iter())
            .map(|((v, a, b), &i)| (*v, a + (b - a) * ratio(i as i64, n as i64)))
            .collect();
        let val = den.eval(&|v| {
            point.iter().find(|(w, _)| *w == v).map(|(_, r)| r.clone()).unwrap_or_else(|| rat(0))
        });
        if num_traits::Zero::is_zero(&val) {
            return Err(Error::DenominatorGuard(format!("{den} vanishes at {point:?}")));
        }
        let pos = num_traits::Signed::is_positive(&val);
        match sign {
            None => sign = Some(pos),
            Some(s) if s != pos => {
                return Err(Error::DenominatorGuard(format!("{den} changes sign on the grid")))
            }
            _ => {}
        }
        // odometer
        let mut k = 0;
        loop {
            if k == idx.len() {
                return Ok(());
            }
            idx[k] += 1;
            if idx[k] <= n {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_guard() {
        let d = &Poly::one() + &Poly::var(Var::B(1));
        let box_ = [(Var::B(1), rat(0), rat(1))];
        assert!(check_denominator_on_grid(&d, &box_, 4).is_ok());
        let box_ = [(Var::B(1), rat(-2), rat(0))];
        assert!(check_denominator_on_grid(&d, &box_, 4).is_err());
    }
}

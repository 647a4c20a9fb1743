//! Polynomial literal grammar.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' integer)?
//! atom   := integer | var | '(' expr ')'
//! var    := 'x' digits | 'b' digits | 't' | 's' | 'u' | 'h'
//! ```
//!
//! Whitespace is ignored. `h` is the formal deformation parameter; the
//! result is an h-series truncated at the requested order. Division is
//! allowed by h-free nonzero expressions (rationals `p/q` are the common
//! case; polynomial divisors produce rational-function coefficients).

use num_bigint::BigInt;

use super::expr::Expr;
use super::var::{Var, MAX_DIM};
use super::{Rational, Scalar};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Var(Var),
    Hbar,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn perr(col: usize, message: impl Into<String>) -> Error {
    Error::Parse { line: 1, column: col, message: message.into() }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let simple = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = simple {
            out.push((t, col));
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push((Tok::Int(s.parse().expect("digits")), col));
            continue;
        }
        if c == 'x' || c == 'b' {
            let start = i + 1;
            i += 1;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if start == i {
                return Err(perr(col, format!("variable '{c}' needs an index")));
            }
            let s: String = chars[start..i].iter().collect();
            let idx: usize = s.parse().map_err(|_| perr(col, "bad variable index"))?;
            if idx == 0 || idx > MAX_DIM {
                return Err(perr(col, format!("variable index {idx} outside 1..={MAX_DIM}")));
            }
            out.push((Tok::Var(if c == 'x' { Var::X(idx) } else { Var::B(idx) }), col));
            continue;
        }
        let single = match c {
            't' => Some(Tok::Var(Var::T)),
            's' => Some(Tok::Var(Var::S)),
            'u' => Some(Tok::Var(Var::U)),
            'h' => Some(Tok::Hbar),
            _ => None,
        };
        if let Some(t) = single {
            if i + 1 < chars.len() && chars[i + 1].is_ascii_alphanumeric() {
                return Err(perr(col, "unknown identifier"));
            }
            out.push((t, col));
            i += 1;
            continue;
        }
        return Err(perr(col, format!("unexpected character '{c}'")));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    order: usize,
    end_col: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|(_, c)| *c).unwrap_or(self.end_col)
    }

    fn expr(&mut self) -> Result<Scalar> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Scalar> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let col = self.col();
                    let d = self.unary()?;
                    if d.coeffs()[1..].iter().any(|c| !c.is_zero()) {
                        return Err(perr(col, "divisor must not involve h"));
                    }
                    let d0 = d.coeff(0).clone();
                    if d0.is_zero() {
                        return Err(perr(col, "division by zero"));
                    }
                    acc = acc.try_map(|c| c.div(&d0)).map_err(|e| perr(col, e.to_string()))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Scalar> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            return Ok(-&self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Scalar> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let col = self.col();
            match self.toks.get(self.pos) {
                Some((Tok::Int(n), _)) => {
                    let e: u32 = n.try_into().map_err(|_| perr(col, "exponent too large"))?;
                    if e > 64 {
                        return Err(perr(col, "exponent too large"));
                    }
                    self.pos += 1;
                    let mut acc = Scalar::one(self.order);
                    for _ in 0..e {
                        acc = &acc * &base;
                    }
                    Ok(acc)
                }
                _ => Err(perr(col, "expected integer exponent")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Scalar> {
        let col = self.col();
        let tok = self.toks.get(self.pos).map(|(t, _)| t.clone());
        match tok {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(Scalar::from_expr(Expr::constant(Rational::from_integer(n)), self.order))
            }
            Some(Tok::Var(v)) => {
                self.pos += 1;
                Ok(Scalar::var(v, self.order))
            }
            Some(Tok::Hbar) => {
                self.pos += 1;
                Ok(Scalar::hbar(self.order))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(perr(self.col(), "expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(t) => Err(perr(col, format!("unexpected token {t:?}"))),
            None => Err(perr(col, "unexpected end of input")),
        }
    }
}

/// Parse a literal into an h-series truncated at `order`.
pub fn parse_scalar(src: &str, order: usize) -> Result<Scalar> {
    let toks = lex(src)?;
    let end_col = src.chars().count() + 1;
    let mut p = Parser { toks, pos: 0, order, end_col };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(perr(p.col(), "trailing input"));
    }
    Ok(e)
}

/// Parse an h-free literal.
pub fn parse_expr(src: &str) -> Result<Expr> {
    let s = parse_scalar(src, 0)?;
    // order 0 drops h entirely; re-parse at order 1 to detect it
    let check = parse_scalar(src, 1)?;
    if !check.coeff(1).is_zero() {
        return Err(perr(1, "h not allowed here"));
    }
    Ok(s.coeff(0).clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::poly::{ratio, Poly};

    #[test]
    fn parses_basic_forms() {
        let e = parse_expr("(x1 + 1)*(x1 - 1)").unwrap();
        assert_eq!(e.to_string(), "x1^2 - 1");
        let e = parse_expr(" 3/4 * x2^2 - b1 ").unwrap();
        let expect = &Poly::var(Var::X(2)).pow(2).scale(&ratio(3, 4)) - &Poly::var(Var::B(1));
        assert_eq!(e, Expr::from(expect));
    }

    #[test]
    fn parses_hbar_series() {
        let s = parse_scalar("h*x1 + h^2/2", 2).unwrap();
        assert_eq!(s.coeff(1), &Expr::var(Var::X(1)));
        assert_eq!(s.coeff(2), &Expr::constant(ratio(1, 2)));
        let s = parse_scalar("h^3", 2).unwrap();
        assert!(s.is_zero());
    }

    #[test]
    fn rational_function_literal() {
        let e = parse_expr("x1/(1+b1)").unwrap();
        assert!(!e.is_polynomial());
    }

    #[test]
    fn malformed_literal_reports_column() {
        match parse_expr("x1 +* 2") {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 5),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(parse_expr("x0").is_err());
        assert!(parse_expr("(x1").is_err());
        assert!(parse_expr("y1").is_err());
        assert!(parse_expr("x1/0").is_err());
        assert!(parse_expr("h").is_err());
    }
}

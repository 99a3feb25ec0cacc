//! Text syntax for exponential polynomials.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary | '/' unary)*
//! unary  := ('-' | '+') unary | factor
//! factor := atom ('^' uint)?
//! atom   := number | 'i' | 'pi' | 'z' | 'exp' '(' expr ')' | '(' expr ')'
//! ```
//!
//! Numbers are decimal with an optional fraction and exponent (`1.5e-3`); a
//! trailing `i` makes an imaginary literal (`5i`). Division is only allowed
//! by expressions that lower to nonzero constants, and `exp` only of
//! polynomials in `z`.

use std::fmt;

use crate::error::{Error, Result};
use crate::exp_poly::ExpPoly;
use crate::poly::Poly;
use crate::scalar::ComplexScalar;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(ComplexScalar),
    Pi,
    I,
    Z,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Exp(Box<Expr>),
}

impl Expr {
    /// Evaluates the tree in the exponential-polynomial algebra.
    pub fn lower(&self) -> Result<ExpPoly> {
        Ok(match self {
            Expr::Number(c) => ExpPoly::constant(*c),
            Expr::Pi => ExpPoly::constant(ComplexScalar::real(std::f64::consts::PI)),
            Expr::I => ExpPoly::constant(ComplexScalar::I),
            Expr::Z => ExpPoly::from_poly(Poly::z()),
            Expr::Neg(e) => -&e.lower()?,
            Expr::Add(a, b) => a.lower()? + b.lower()?,
            Expr::Sub(a, b) => a.lower()? - b.lower()?,
            Expr::Mul(a, b) => a.lower()? * b.lower()?,
            Expr::Div(a, b) => {
                let divisor = b.lower()?;
                let d = divisor.as_constant().ok_or_else(|| {
                    Error::Lowering(format!("division by non-constant {divisor:?}"))
                })?;
                if d.is_approx_zero() {
                    return Err(Error::Lowering("division by zero".into()));
                }
                a.lower()?.scale(d.recip())
            }
            Expr::Pow(base, k) => base.lower()?.pow(*k),
            Expr::Exp(arg) => {
                let inner = arg.lower()?;
                let poly = inner.as_poly().ok_or_else(|| {
                    Error::Lowering(format!(
                        "exp argument must be a polynomial in z, got {inner:?}"
                    ))
                })?;
                ExpPoly::exp_of(poly)
            }
        })
    }
}

/// Parses `text` into a syntax tree.
pub fn parse(text: &str) -> Result<Expr> {
    let mut parser = Parser { src: text.as_bytes(), pos: 0 };
    let expr = parser.expr()?;
    parser.skip_ws();
    if parser.pos < parser.src.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(expr)
}

/// Parses and lowers in one step.
pub fn parse_exp_poly(text: &str) -> Result<ExpPoly> {
    parse(text)?.lower()
}

/// Parses an expression that must lower to a constant, such as `-0.5+2i` or `2*pi`.
pub fn parse_constant(text: &str) -> Result<ComplexScalar> {
    let value = parse_exp_poly(text)?;
    if value.is_zero() {
        return Ok(ComplexScalar::ZERO);
    }
    value
        .as_constant()
        .ok_or_else(|| Error::Lowering(format!("expected a constant, got {value:?}")))
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, b: u8) -> Result<()> {
        if self.eat(b) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{}'", b as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else if self.eat(b'+') {
            self.unary()
        } else {
            self.factor()
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a nonnegative integer exponent"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        let k = digits.parse::<u32>().map_err(|_| Error::Syntax {
            offset: start,
            message: "exponent too large".into(),
        })?;
        Ok(Expr::Pow(Box::new(base), k))
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(b) if b.is_ascii_digit() => self.number(),
            Some(b) if b.is_ascii_alphabetic() => self.identifier(),
            Some(_) => Err(self.error("unexpected character")),
        }
    }

    fn digits(&mut self) -> usize {
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        self.pos - start
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        self.digits();
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            self.digits();
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if self.digits() == 0 {
                // not an exponent after all
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii number");
        let value: f64 = text.parse().map_err(|_| Error::Syntax {
            offset: start,
            message: format!("malformed number '{text}'"),
        })?;
        let imaginary = self.src.get(self.pos) == Some(&b'i')
            && !self
                .src
                .get(self.pos + 1)
                .is_some_and(|b| b.is_ascii_alphanumeric());
        if imaginary {
            self.pos += 1;
            Ok(Expr::Number(ComplexScalar::imag(value)))
        } else {
            Ok(Expr::Number(ComplexScalar::real(value)))
        }
    }

    fn identifier(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_alphanumeric) {
            self.pos += 1;
        }
        match &self.src[start..self.pos] {
            b"i" => Ok(Expr::I),
            b"pi" => Ok(Expr::Pi),
            b"z" => Ok(Expr::Z),
            b"exp" => {
                self.expect(b'(')?;
                let arg = self.expr()?;
                self.expect(b')')?;
                Ok(Expr::Exp(Box::new(arg)))
            }
            other => Err(Error::Syntax {
                offset: start,
                message: format!("unknown identifier '{}'", String::from_utf8_lossy(other)),
            }),
        }
    }
}

fn write_scalar(f: &mut fmt::Formatter<'_>, c: ComplexScalar) -> fmt::Result {
    write!(f, "({:?} + {:?}*i)", c.re, c.im)
}

fn write_poly(f: &mut fmt::Formatter<'_>, p: &Poly) -> fmt::Result {
    if p.is_zero() {
        return write!(f, "0");
    }
    let mut first = true;
    for (d, &c) in p.coeffs().iter().enumerate() {
        if c == ComplexScalar::ZERO {
            continue;
        }
        if !first {
            write!(f, " + ")?;
        }
        first = false;
        write_scalar(f, c)?;
        match d {
            0 => {}
            1 => write!(f, "*z")?,
            _ => write!(f, "*z^{d}")?,
        }
    }
    Ok(())
}

/// Prints in the grammar above, so `parse_exp_poly(&f.to_string())` gives
/// back `f`. Coefficients use shortest round-trip float formatting.
impl fmt::Display for ExpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (j, term) in self.terms().iter().enumerate() {
            if j > 0 {
                write!(f, " + ")?;
            }
            write!(f, "(")?;
            write_poly(f, term.coeff())?;
            write!(f, ")")?;
            if !term.exponent().is_zero() {
                write!(f, "*exp(")?;
                write_poly(f, term.exponent())?;
                write!(f, ")")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(c: ComplexScalar, w: ComplexScalar) -> ExpPoly {
        ExpPoly::monomial_exp(c, w, 1)
    }

    #[test]
    fn cosine_form() {
        let f = parse_exp_poly("exp(i*z) + exp(-i*z)").unwrap();
        let expected = &e(ComplexScalar::ONE, ComplexScalar::I) + &e(ComplexScalar::ONE, -ComplexScalar::I);
        assert!(f.equals(&expected));
    }

    #[test]
    fn three_halves_rhs() {
        let f = parse_exp_poly("(8/9)*exp(2*z) + (8/3)*exp(-2*z)").unwrap();
        let expected = &e(ComplexScalar::real(8.0 / 9.0), ComplexScalar::real(2.0))
            + &e(ComplexScalar::real(8.0 / 3.0), ComplexScalar::real(-2.0));
        assert!(f.equals(&expected));
    }

    #[test]
    fn unterminated_call() {
        assert!(matches!(parse("exp(z"), Err(Error::Syntax { offset: 5, .. })));
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        assert!(matches!(parse("z +* 2"), Err(Error::Syntax { offset: 3, .. })));
        assert!(matches!(parse("foo(z)"), Err(Error::Syntax { offset: 0, .. })));
        assert!(matches!(parse("z^-1"), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(parse("(z))"), Err(Error::Syntax { offset: 3, .. })));
    }

    #[test]
    fn lowering_errors_are_distinct() {
        assert!(matches!(parse_exp_poly("exp(exp(z))"), Err(Error::Lowering(_))));
        assert!(matches!(parse_exp_poly("1/z"), Err(Error::Lowering(_))));
        assert!(matches!(parse_exp_poly("1/(z-z)"), Err(Error::Lowering(_))));
    }

    #[test]
    fn complex_flags() {
        assert_eq!(parse_constant("5i").unwrap(), ComplexScalar::imag(5.0));
        assert_eq!(parse_constant("-0.5+2i").unwrap(), ComplexScalar::new(-0.5, 2.0));
        assert_eq!(parse_constant("2").unwrap(), ComplexScalar::real(2.0));
        assert_eq!(parse_constant("2*pi").unwrap(), ComplexScalar::real(2.0 * std::f64::consts::PI));
        assert_eq!(parse_constant("1e-3").unwrap(), ComplexScalar::real(1e-3));
        assert!(parse_constant("z").is_err());
    }

    #[test]
    fn exp_folds_constants() {
        let f = parse_exp_poly("exp(i*z + i*pi)").unwrap();
        assert!(f.equals(&e(ComplexScalar::real(-1.0), ComplexScalar::I)));
        let g = parse_exp_poly("z*exp(z^2) - exp(z^2)*z").unwrap();
        assert!(g.is_zero());
    }

    #[test]
    fn print_round_trip() {
        for text in [
            "0",
            "1",
            "(z+1)^3*exp(2i*z^2 - z) + 0.25*exp(-i*z)",
            "(8/9)*exp(2*z) + (8/3)*exp(-2*z)",
            "1e-7*z^4 + 3e12",
        ] {
            let f = parse_exp_poly(text).unwrap();
            let printed = f.to_string();
            let back = parse_exp_poly(&printed).unwrap();
            assert!(back.equals(&f), "{text} -> {printed}");
        }
    }
}

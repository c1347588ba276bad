//! Scalar literals such as `zeta(12)^5`, `s^-1`, `-1/2`, `(s+1)/(s-1)`.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | atom ('^' int)?
//! atom  := int | 'zeta(' int ')' | 's' | '(' expr ')'
//! ```

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;

use super::{Field, Scalar, ScalarError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Literal {
    Int(BigInt),
    Zeta(u32),
    S,
    Neg(Box<Literal>),
    Add(Box<Literal>, Box<Literal>),
    Sub(Box<Literal>, Box<Literal>),
    Mul(Box<Literal>, Box<Literal>),
    Div(Box<Literal>, Box<Literal>),
    Pow(Box<Literal>, i64),
}

impl Literal {
    /// Least cyclotomic order and whether `s` occurs.
    pub fn requirements(&self) -> (u32, bool) {
        use Literal::*;
        match self {
            Int(_) => (1, false),
            Zeta(m) => (*m, false),
            S => (1, true),
            Neg(a) | Pow(a, _) => a.requirements(),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => {
                let (m1, s1) = a.requirements();
                let (m2, s2) = b.requirements();
                (m1.lcm(&m2), s1 || s2)
            }
        }
    }

    /// Smallest characteristic-zero field holding the literal.
    pub fn natural_field(&self) -> Field {
        let (m, s) = self.requirements();
        if s {
            Field::rational_function(m)
        } else {
            Field::cyclotomic(m)
        }
    }

    pub fn eval(&self, field: &Field) -> Result<Scalar, ScalarError> {
        use Literal::*;
        Ok(match self {
            Int(n) => field.from_rational(&BigRational::from_integer(n.clone()))?,
            Zeta(m) => field.zeta(*m)?,
            S => field.s_pow(1)?,
            Neg(a) => -a.eval(field)?,
            Add(a, b) => a.eval(field)?.checked_add(&b.eval(field)?)?,
            Sub(a, b) => a.eval(field)?.checked_sub(&b.eval(field)?)?,
            Mul(a, b) => a.eval(field)?.checked_mul(&b.eval(field)?)?,
            Div(a, b) => a.eval(field)?.checked_div(&b.eval(field)?)?,
            Pow(a, e) => {
                let v = a.eval(field)?;
                if *e < 0 && v.is_zero() {
                    return Err(ScalarError::DivisionByZero);
                }
                v.pow(*e)
            }
        })
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ScalarError> {
        Err(ScalarError::Parse { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Result<BigInt, ScalarError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected integer");
        }
        let txt = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
        Ok(txt.parse().unwrap())
    }

    fn signed_small(&mut self) -> Result<i64, ScalarError> {
        let neg = self.eat(b'-');
        if !neg {
            self.eat(b'+');
        }
        let at = self.pos;
        let d = self.digits()?;
        let v = i64::try_from(&d).map_err(|_| ScalarError::Parse { pos: at, msg: "exponent too large".into() })?;
        Ok(if neg { -v } else { v })
    }

    fn expr(&mut self) -> Result<Literal, ScalarError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = Literal::Add(Box::new(acc), Box::new(self.term()?));
            } else if self.eat(b'-') {
                acc = Literal::Sub(Box::new(acc), Box::new(self.term()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Literal, ScalarError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = Literal::Mul(Box::new(acc), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                acc = Literal::Div(Box::new(acc), Box::new(self.unary()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Literal, ScalarError> {
        if self.eat(b'-') {
            return Ok(Literal::Neg(Box::new(self.unary()?)));
        }
        let a = self.atom()?;
        if self.eat(b'^') {
            let e = self.signed_small()?;
            return Ok(Literal::Pow(Box::new(a), e));
        }
        Ok(a)
    }

    fn atom(&mut self) -> Result<Literal, ScalarError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => Ok(Literal::Int(self.digits()?)),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return self.err("expected ')'");
                }
                Ok(e)
            }
            Some(b's') => {
                self.pos += 1;
                Ok(Literal::S)
            }
            Some(b'z') => {
                if !self.s[self.pos..].starts_with(b"zeta") {
                    return self.err("unknown identifier");
                }
                self.pos += 4;
                if !self.eat(b'(') {
                    return self.err("expected '(' after zeta");
                }
                let at = self.pos;
                let m = self.digits()?;
                let m = u32::try_from(&m)
                    .ok()
                    .filter(|&m| m > 0 && m <= 10_000)
                    .ok_or(ScalarError::Parse { pos: at, msg: "root order out of range".into() })?;
                if !self.eat(b')') {
                    return self.err("expected ')'");
                }
                Ok(Literal::Zeta(m))
            }
            Some(_) => self.err("unexpected character"),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parse a scalar literal; errors carry the byte offset.
pub fn parse_literal(text: &str) -> Result<Literal, ScalarError> {
    let mut p = Parser { s: text.as_bytes(), pos: 0 };
    let lit = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(lit)
}

impl Field {
    /// Parse `text` and evaluate it in this field.
    pub fn parse(&self, text: &str) -> Result<Scalar, ScalarError> {
        parse_literal(text)?.eval(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Order;

    #[test]
    fn precedence_and_powers() {
        let f = Field::Rational;
        assert_eq!(f.parse("1 + 2*3^2").unwrap(), f.from_i64(19));
        assert_eq!(f.parse("-2^2").unwrap(), f.from_i64(-4));
        assert_eq!(f.parse("(1/2)^-2").unwrap(), f.from_i64(4));
    }

    #[test]
    fn zeta_and_s() {
        let lit = parse_literal("zeta(12)^5 * s^-1").unwrap();
        assert_eq!(lit.requirements(), (12, true));
        let f = lit.natural_field();
        assert_eq!(f, Field::RationalFunction(12));
        let v = lit.eval(&f).unwrap();
        assert_eq!(v.root_monomial(), Some((5, -1)));
        let z = Field::Cyclotomic(12).parse("zeta(12)^5").unwrap();
        assert_eq!(z.mult_order().unwrap(), Order::Finite(12));
    }

    #[test]
    fn rational_function_literal() {
        let f = Field::rational_function(1);
        assert_eq!(f.parse("(s^2-1)/(s-1)").unwrap(), f.parse("s+1").unwrap());
    }

    #[test]
    fn errors_have_positions() {
        match parse_literal("zeta(3) + ?") {
            Err(ScalarError::Parse { pos, .. }) => assert_eq!(pos, 10),
            other => panic!("{:?}", other),
        }
        assert!(parse_literal("zeta(3").is_err());
        assert!(Field::Rational.parse("s").is_err());
        assert!(Field::Rational.parse("1/0").is_err());
    }

    #[test]
    fn prime_field_literals() {
        let f = Field::Prime(7);
        assert_eq!(f.parse("1/2").unwrap(), f.from_i64(4));
        let z = f.parse("zeta(3)").unwrap();
        assert_eq!(z.mult_order().unwrap(), Order::Finite(3));
    }
}

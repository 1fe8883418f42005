//! Recursive-descent parser.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?          right-associative
//! atom  := number | symbol | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! Numbers are integers or decimals (read exactly). Symbols are `x`, `y`,
//! the functions `f g u v S` with optional derivative suffix (`f_xy`), the
//! jet `w` with up to three primes, and frame symbols `name[1,2]`.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{normalize, ElemKind, Expr, FnName, FnSym, FrameSym, Q, MAX_JET};
use crate::error::{Error, Result};

/// Parses and normalizes.
pub fn parse_expr(source: &str) -> Result<Expr> {
    parse_raw(source).map(|e| normalize(&e))
}

/// Parses without normalizing; subtraction and division appear as
/// `Sum`/`Prod` with negated or inverted operands.
pub fn parse_raw(source: &str) -> Result<Expr> {
    let mut p = Parser {
        src: source.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&alloc::format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut terms = alloc::vec![self.term()?];
        loop {
            if self.eat(b'+') {
                terms.push(self.term()?);
            } else if self.eat(b'-') {
                terms.push(-self.term()?);
            } else {
                break;
            }
        }
        Ok(Expr::sum(terms))
    }

    fn term(&mut self) -> Result<Expr> {
        let mut factors = alloc::vec![self.unary()?];
        loop {
            if self.eat(b'*') {
                factors.push(self.unary()?);
            } else if self.eat(b'/') {
                factors.push(self.unary()?.recip());
            } else {
                break;
            }
        }
        Ok(Expr::product(factors))
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let at = self.pos;
        let exponent = self.unary()?;
        let q = constant_value(&exponent).ok_or(Error::Syntax {
            offset: at,
            message: "exponent must be a rational constant".into(),
        })?;
        Ok(base.pow(q))
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.symbol(),
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let mut digits = String::new();
        let mut frac_len = 0u32;
        let mut seen_dot = false;
        while let Some(&c) = self.src.get(self.pos) {
            if c.is_ascii_digit() {
                digits.push(c as char);
                if seen_dot {
                    frac_len += 1;
                }
            } else if c == b'.' && !seen_dot {
                seen_dot = true;
            } else {
                break;
            }
            self.pos += 1;
        }
        if digits.is_empty() {
            self.pos = start;
            return Err(self.error("malformed number"));
        }
        let n: BigInt = digits.parse().map_err(|_| Error::Syntax {
            offset: start,
            message: "malformed number".into(),
        })?;
        let d = num_traits::pow(BigInt::from(10), frac_len as usize);
        Ok(Expr::Const(Q::new(n, d)))
    }

    fn symbol(&mut self) -> Result<Expr> {
        let start = self.pos;
        while let Some(&c) = self.src.get(self.pos) {
            if c.is_ascii_alphanumeric() || c == b'_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        let name = core::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        let unknown = || Error::UnknownIdentifier {
            name: name.to_string(),
            offset: start,
        };

        if name == "w" {
            let mut primes = 0u8;
            while self.src.get(self.pos) == Some(&b'\'') {
                primes += 1;
                self.pos += 1;
            }
            if primes > MAX_JET {
                return Err(Error::Syntax {
                    offset: start,
                    message: "w-jet order above 3".into(),
                });
            }
            return Ok(Expr::WJet(primes));
        }
        match name {
            "x" => return Ok(Expr::x()),
            "y" => return Ok(Expr::y()),
            _ => {}
        }
        if let Some(kind) = ElemKind::from_name(name) {
            if self.peek() == Some(b'(') {
                self.pos += 1;
                let arg = self.expr()?;
                self.expect(b')')?;
                return Ok(Expr::elem(kind, arg));
            }
            return Err(self.error("expected `(` after function name"));
        }
        let mut chars = name.chars();
        let head = chars.next().unwrap();
        if let Some(fname) = FnName::from_char(head) {
            let rest = chars.as_str();
            if rest.is_empty() {
                return Ok(Expr::func(fname));
            }
            if let Some(vars) = rest.strip_prefix('_') {
                if !vars.is_empty() && vars.bytes().all(|b| b == b'x' || b == b'y') {
                    let dx = vars.bytes().filter(|b| *b == b'x').count() as u32;
                    let dy = vars.len() as u32 - dx;
                    return Ok(Expr::Fn(FnSym { name: fname, dx, dy }));
                }
            }
        }
        if self.src.get(self.pos) == Some(&b'[') {
            self.pos += 1;
            let word = self.word()?;
            return Ok(Expr::Frame(FrameSym {
                name: name.to_string(),
                word,
            }));
        }
        Err(unknown())
    }

    fn word(&mut self) -> Result<Vec<u8>> {
        let mut word = Vec::new();
        if self.eat(b']') {
            return Ok(word);
        }
        loop {
            match self.peek() {
                Some(b'1') => word.push(1),
                Some(b'2') => word.push(2),
                _ => return Err(self.error("frame index must be 1 or 2")),
            }
            self.pos += 1;
            if self.eat(b']') {
                return Ok(word);
            }
            self.expect(b',')?;
        }
    }
}

/// Folds a constant subtree (as produced for exponents like `-1/2`).
fn constant_value(e: &Expr) -> Option<Q> {
    match e {
        Expr::Const(q) => Some(q.clone()),
        Expr::Sum(items) => items
            .iter()
            .try_fold(Q::zero(), |acc, t| Some(acc + constant_value(t)?)),
        Expr::Prod(items) => items
            .iter()
            .try_fold(Q::one(), |acc, t| Some(acc * constant_value(t)?)),
        Expr::Pow(b, q) if q.is_integer() => {
            let b = constant_value(b)?;
            let k = i32::try_from(q.to_integer()).ok()?;
            if b.is_zero() && k < 0 {
                return None;
            }
            Some(num_traits::pow::Pow::pow(b, k))
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn literal_sum() {
        assert_eq!(parse_expr("x + y").unwrap(), Expr::Sum(vec![Expr::x(), Expr::y()]));
    }

    #[test]
    fn reciprocal_product() {
        assert_eq!(
            parse_expr("1/(x*y)").unwrap(),
            Expr::Prod(vec![Expr::x(), Expr::y()]).recip()
        );
    }

    #[test]
    fn power_is_right_associative_and_binds_tighter_than_minus() {
        assert_eq!(parse_expr("2^3^2").unwrap(), Expr::int(512));
        assert_eq!(parse_expr("-x^2").unwrap(), parse_expr("-(x^2)").unwrap());
        assert_eq!(parse_expr("x^-1").unwrap(), Expr::x().recip());
    }

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse_expr("0.1 + 0.2").unwrap(), Expr::frac(3, 10));
        assert_eq!(parse_expr("3/4").unwrap(), Expr::frac(3, 4));
    }

    #[test]
    fn symbols() {
        assert_eq!(parse_expr("f_xy").unwrap(), Expr::func_derivative(FnName::F, 1, 1));
        assert_eq!(parse_expr("w'''").unwrap(), Expr::WJet(3));
        assert_eq!(parse_expr("s1[1,2]").unwrap(), Expr::frame("s1", &[1, 2]));
        assert_eq!(parse_expr("H[]").unwrap(), Expr::frame("H", &[]));
    }

    #[test]
    fn unknown_identifier_reports_offset() {
        assert_eq!(
            parse_expr("x + tan(y)"),
            Err(Error::UnknownIdentifier {
                name: "tan".into(),
                offset: 4
            })
        );
        assert!(matches!(parse_expr("x + z"), Err(Error::UnknownIdentifier { offset: 4, .. })));
    }

    #[test]
    fn syntax_errors_report_offset() {
        assert!(matches!(parse_expr("x + "), Err(Error::Syntax { offset: 4, .. })));
        assert!(matches!(parse_expr("(x"), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(parse_expr("x ^ y"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_expr("w''''"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_expr("x y"), Err(Error::Syntax { offset: 2, .. })));
    }
}

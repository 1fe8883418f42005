//! Printer emitting the same grammar the parser reads.

use core::fmt::{self, Display, Formatter, Write};

use num_traits::{One, Signed};

use super::{Expr, Q};

const PREC_SUM: u8 = 1;
const PREC_PROD: u8 = 2;
const PREC_POW: u8 = 3;
const PREC_ATOM: u8 = 4;

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Sum(_) => PREC_SUM,
        Expr::Prod(_) => PREC_PROD,
        Expr::Const(q) if !q.is_integer() || q.is_negative() => PREC_PROD,
        Expr::Pow(_, q) if q.is_negative() => PREC_PROD,
        Expr::Pow(..) => PREC_POW,
        _ => PREC_ATOM,
    }
}

fn write_q(f: &mut Formatter<'_>, q: &Q) -> fmt::Result {
    if q.is_integer() {
        write!(f, "{}", q.numer())
    } else {
        write!(f, "{}/{}", q.numer(), q.denom())
    }
}

fn write_wrapped(f: &mut Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if precedence(e) < min_prec {
        f.write_char('(')?;
        write_expr(f, e)?;
        f.write_char(')')
    } else {
        write_expr(f, e)
    }
}

/// Splits a product into (sign, numerator factors, denominator factors).
fn split_product(items: &[Expr]) -> (bool, alloc::vec::Vec<Expr>, alloc::vec::Vec<Expr>) {
    let mut negative = false;
    let mut num = alloc::vec::Vec::new();
    let mut den = alloc::vec::Vec::new();
    for (i, it) in items.iter().enumerate() {
        match it {
            Expr::Const(q) if i == 0 && q.is_negative() => {
                negative = true;
                let a = -q.clone();
                if !a.is_one() {
                    num.push(Expr::Const(a));
                }
            }
            Expr::Pow(b, q) if q.is_negative() => {
                let e = -q.clone();
                den.push(if e.is_one() {
                    (**b).clone()
                } else {
                    Expr::Pow(b.clone(), e)
                });
            }
            other => num.push(other.clone()),
        }
    }
    (negative, num, den)
}

fn write_product(f: &mut Formatter<'_>, items: &[Expr]) -> fmt::Result {
    let (negative, num, den) = split_product(items);
    if negative {
        f.write_char('-')?;
    }
    if num.is_empty() {
        f.write_char('1')?;
    }
    for (i, it) in num.iter().enumerate() {
        if i > 0 {
            f.write_char('*')?;
        }
        // A leading rational constant reads correctly without parentheses.
        let min = if i == 0 && matches!(it, Expr::Const(q) if q.is_positive()) {
            PREC_PROD
        } else {
            PREC_POW
        };
        write_wrapped(f, it, min)?;
    }
    match den.len() {
        0 => Ok(()),
        1 => {
            f.write_char('/')?;
            write_wrapped(f, &den[0], PREC_POW)
        }
        _ => {
            f.write_str("/(")?;
            for (i, it) in den.iter().enumerate() {
                if i > 0 {
                    f.write_char('*')?;
                }
                write_wrapped(f, it, PREC_POW)?;
            }
            f.write_char(')')
        }
    }
}

/// Whether a summand prints with a leading minus sign.
fn is_negative_term(e: &Expr) -> bool {
    match e {
        Expr::Const(q) => q.is_negative(),
        Expr::Prod(items) => matches!(items.first(), Some(Expr::Const(q)) if q.is_negative()),
        _ => false,
    }
}

fn write_expr(f: &mut Formatter<'_>, e: &Expr) -> fmt::Result {
    match e {
        Expr::Const(q) => write_q(f, q),
        Expr::Coord(c) => f.write_char(c.name()),
        Expr::Fn(s) => {
            f.write_char(s.name.name())?;
            if s.dx + s.dy > 0 {
                f.write_char('_')?;
                for _ in 0..s.dx {
                    f.write_char('x')?;
                }
                for _ in 0..s.dy {
                    f.write_char('y')?;
                }
            }
            Ok(())
        }
        Expr::WJet(k) => {
            f.write_char('w')?;
            for _ in 0..*k {
                f.write_char('\'')?;
            }
            Ok(())
        }
        Expr::Frame(fs) => {
            f.write_str(&fs.name)?;
            f.write_char('[')?;
            for (i, k) in fs.word.iter().enumerate() {
                if i > 0 {
                    f.write_char(',')?;
                }
                write!(f, "{k}")?;
            }
            f.write_char(']')
        }
        Expr::Elem(kind, arg) => {
            f.write_str(kind.name())?;
            f.write_char('(')?;
            write_expr(f, arg)?;
            f.write_char(')')
        }
        Expr::Pow(b, q) => {
            if q.is_negative() {
                return write_product(f, core::slice::from_ref(e));
            }
            write_wrapped(f, b, PREC_ATOM)?;
            f.write_char('^')?;
            if q.is_integer() {
                write_q(f, q)
            } else {
                f.write_char('(')?;
                write_q(f, q)?;
                f.write_char(')')
            }
        }
        Expr::Prod(items) => write_product(f, items),
        Expr::Sum(items) => {
            for (i, it) in items.iter().enumerate() {
                if i == 0 {
                    write_wrapped(f, it, PREC_PROD)?;
                } else if is_negative_term(it) {
                    f.write_str(" - ")?;
                    write_wrapped(f, &strip_sign(it), PREC_PROD)?;
                } else {
                    f.write_str(" + ")?;
                    write_wrapped(f, it, PREC_PROD)?;
                }
            }
            Ok(())
        }
    }
}

fn strip_sign(e: &Expr) -> Expr {
    match e {
        Expr::Const(q) => Expr::Const(-q.clone()),
        Expr::Prod(items) => {
            let mut v = items.clone();
            if let Some(Expr::Const(q)) = v.first() {
                let a = -q.clone();
                if a.is_one() {
                    v.remove(0);
                } else {
                    v[0] = Expr::Const(a);
                }
            }
            Expr::product(v)
        }
        other => other.clone(),
    }
}

impl Display for Expr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_expr(f, self)
    }
}

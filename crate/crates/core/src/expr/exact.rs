//! Exact evaluation of rational expressions, over `Q` and modulo a prime.

use alloc::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::{Expr, Symbol, Q};

/// The Mersenne prime `2⁶¹ − 1`.
pub(crate) const P: u64 = (1 << 61) - 1;

fn reduce(v: u128) -> u64 {
    // Valid for v < 2¹²², which covers every product of two residues.
    let s = ((v as u64) & P) + (v >> 61) as u64;
    let s = (s & P) + (s >> 61);
    if s >= P {
        s - P
    } else {
        s
    }
}

fn add(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= P {
        s - P
    } else {
        s
    }
}

fn mul(a: u64, b: u64) -> u64 {
    reduce(a as u128 * b as u128)
}

fn pow(mut a: u64, mut n: u64) -> u64 {
    let mut r = 1;
    while n > 0 {
        if n & 1 == 1 {
            r = mul(r, a);
        }
        a = mul(a, a);
        n >>= 1;
    }
    r
}

fn inv(a: u64) -> Option<u64> {
    (a != 0).then(|| pow(a, P - 2))
}

fn int_mod(n: &BigInt) -> u64 {
    n.mod_floor(&BigInt::from(P)).to_u64().expect("reduced below P")
}

/// `q mod P`, or `None` when the denominator is divisible by `P`.
pub(crate) fn q_mod(q: &Q) -> Option<u64> {
    Some(mul(int_mod(q.numer()), inv(int_mod(q.denom()))?))
}

/// Integer exponent of a power, if it is one.
fn int_exponent(q: &Q) -> Option<i64> {
    q.is_integer().then(|| q.to_integer().to_i64()).flatten()
}

/// Whether `e` is a rational function of its symbols.
pub(crate) fn is_rational(e: &Expr) -> bool {
    match e {
        Expr::Const(_) | Expr::Coord(_) | Expr::Fn(_) | Expr::WJet(_) | Expr::Frame(_) => true,
        Expr::Sum(ts) | Expr::Prod(ts) => ts.iter().all(is_rational),
        Expr::Pow(b, k) => int_exponent(k).is_some() && is_rational(b),
        Expr::Elem(..) => false,
    }
}

fn symbol(e: &Expr) -> Option<Symbol> {
    match e {
        Expr::Coord(c) => Some(Symbol::Coord(*c)),
        Expr::Fn(f) => Some(Symbol::Fn(*f)),
        Expr::WJet(k) => Some(Symbol::WJet(*k)),
        Expr::Frame(f) => Some(Symbol::Frame(f.clone())),
        _ => None,
    }
}

/// Value of a rational expression modulo `P`; `None` where a denominator
/// vanishes.
pub(crate) fn eval_mod(e: &Expr, values: &BTreeMap<Symbol, u64>) -> Option<u64> {
    match e {
        Expr::Const(q) => q_mod(q),
        Expr::Sum(ts) => ts.iter().try_fold(0, |acc, t| Some(add(acc, eval_mod(t, values)?))),
        Expr::Prod(ts) => ts.iter().try_fold(1, |acc, t| Some(mul(acc, eval_mod(t, values)?))),
        Expr::Pow(b, k) => {
            let n = int_exponent(k)?;
            let v = eval_mod(b, values)?;
            let v = if n < 0 { inv(v)? } else { v };
            Some(pow(v, n.unsigned_abs()))
        }
        Expr::Elem(..) => None,
        leaf => values.get(&symbol(leaf)?).copied(),
    }
}

/// Value of a rational expression over `Q`; `None` where a denominator
/// vanishes.
pub(crate) fn eval_q(e: &Expr, values: &BTreeMap<Symbol, Q>) -> Option<Q> {
    match e {
        Expr::Const(q) => Some(q.clone()),
        Expr::Sum(ts) => ts.iter().try_fold(Q::zero(), |acc, t| Some(acc + eval_q(t, values)?)),
        Expr::Prod(ts) => ts.iter().try_fold(Q::one(), |acc, t| Some(acc * eval_q(t, values)?)),
        Expr::Pow(b, k) => {
            let n = int_exponent(k)?;
            let v = eval_q(b, values)?;
            if n < 0 && v.is_zero() {
                return None;
            }
            let v = if n < 0 { v.recip() } else { v };
            Some(num_traits::pow(v, n.unsigned_abs() as usize))
        }
        Expr::Elem(..) => None,
        leaf => values.get(&symbol(leaf)?).cloned(),
    }
}

/// Dyadic rational `round(v·2²⁰)/2²⁰`.
pub(crate) fn dyadic(v: f64) -> Q {
    let scaled = libm::round(v * (1u64 << 20) as f64);
    Q::new(BigInt::from(scaled as i64), BigInt::from(1u64 << 20))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_expr, parse_raw, q_frac, q_to_f64, Coord};

    fn point(x: Q, y: Q) -> BTreeMap<Symbol, Q> {
        [(Symbol::Coord(Coord::X), x), (Symbol::Coord(Coord::Y), y)].into_iter().collect()
    }

    fn modp(m: &BTreeMap<Symbol, Q>) -> BTreeMap<Symbol, u64> {
        m.iter().map(|(k, v)| (k.clone(), q_mod(v).unwrap())).collect()
    }

    #[test]
    fn field_arithmetic() {
        assert_eq!(mul(P - 1, P - 1), 1);
        assert_eq!(mul(inv(12345).unwrap(), 12345), 1);
        assert_eq!(add(P - 1, 2), 1);
        assert_eq!(q_mod(&q_frac(-1, 2)).map(|h| add(h, h)), Some(P - 1));
        assert_eq!(reduce(u128::MAX % (P as u128 * P as u128)), ((u128::MAX % (P as u128 * P as u128)) % P as u128) as u64);
    }

    #[test]
    fn exact_and_modular_values_agree() {
        let e = parse_expr("(x^3 - 2*x*y)/(y^2 + 1) - 7/3").unwrap();
        let m = point(q_frac(3, 4), q_frac(-5, 8));
        let q = eval_q(&e, &m).unwrap();
        assert_eq!(q_mod(&q), eval_mod(&e, &modp(&m)));
        let direct = (0.421875 - 2.0 * 0.75 * -0.625) / (0.390625 + 1.0) - 7.0 / 3.0;
        assert!((q_to_f64(&q) - direct).abs() < 1e-15);
    }

    #[test]
    fn poles_are_reported() {
        let e = parse_raw("1/(x-y)").unwrap();
        let m = point(q_frac(1, 2), q_frac(1, 2));
        assert_eq!(eval_q(&e, &m), None);
        assert_eq!(eval_mod(&e, &modp(&m)), None);
    }

    #[test]
    fn transcendental_atoms_are_not_rational() {
        assert!(is_rational(&parse_expr("x^2/y - w'*f_x").unwrap()));
        assert!(!is_rational(&parse_expr("exp(x) + y").unwrap()));
        assert!(!is_rational(&parse_expr("sqrt(x)").unwrap()));
    }

    #[test]
    fn dyadic_rounding() {
        assert_eq!(dyadic(0.75), q_frac(3, 4));
        assert_eq!(dyadic(-0.2), Q::new(BigInt::from(-209715), BigInt::from(1 << 20)));
    }
}

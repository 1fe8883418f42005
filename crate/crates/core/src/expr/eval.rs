//! IEEE double evaluation.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use super::{q_to_f64, Coord, ElemKind, Expr, Symbol};
use crate::error::{Error, Result};

/// Values for the non-coordinate symbols of an expression.
pub type Bindings = BTreeMap<Symbol, f64>;

/// Divisors closer to zero than this are reported as domain violations.
pub const DIVISION_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
enum Op {
    Const(f64),
    X,
    Y,
    Slot(usize),
    Add(usize),
    Mul(usize),
    PowI(i32),
    /// Rational power `p/q` with `q > 1`.
    PowQ(i64, u64),
    Elem(ElemKind),
}

/// An expression flattened to postfix form for repeated evaluation.
#[derive(Debug, Clone)]
pub struct Compiled {
    ops: Vec<Op>,
    slots: Vec<Symbol>,
}

impl Compiled {
    pub fn new(e: &Expr) -> Self {
        let mut c = Compiled {
            ops: Vec::new(),
            slots: Vec::new(),
        };
        c.emit(e);
        c
    }

    fn slot(&mut self, s: Symbol) -> usize {
        match self.slots.iter().position(|t| *t == s) {
            Some(i) => i,
            None => {
                self.slots.push(s);
                self.slots.len() - 1
            }
        }
    }

    fn emit(&mut self, e: &Expr) {
        match e {
            Expr::Const(q) => self.ops.push(Op::Const(q_to_f64(q))),
            Expr::Coord(Coord::X) => self.ops.push(Op::X),
            Expr::Coord(Coord::Y) => self.ops.push(Op::Y),
            Expr::Fn(s) => {
                let i = self.slot(Symbol::Fn(*s));
                self.ops.push(Op::Slot(i));
            }
            Expr::WJet(k) => {
                let i = self.slot(Symbol::WJet(*k));
                self.ops.push(Op::Slot(i));
            }
            Expr::Frame(fs) => {
                let i = self.slot(Symbol::Frame(fs.clone()));
                self.ops.push(Op::Slot(i));
            }
            Expr::Sum(items) => {
                items.iter().for_each(|t| self.emit(t));
                self.ops.push(Op::Add(items.len()));
            }
            Expr::Prod(items) => {
                items.iter().for_each(|t| self.emit(t));
                self.ops.push(Op::Mul(items.len()));
            }
            Expr::Pow(b, q) => {
                self.emit(b);
                let p = i64::try_from(q.numer()).unwrap_or(i64::MAX);
                let d = u64::try_from(q.denom()).unwrap_or(u64::MAX);
                if d == 1 {
                    self.ops.push(Op::PowI(p.clamp(i32::MIN as i64, i32::MAX as i64) as i32));
                } else {
                    self.ops.push(Op::PowQ(p, d));
                }
            }
            Expr::Elem(k, a) => {
                self.emit(a);
                self.ops.push(Op::Elem(*k));
            }
        }
    }

    /// Symbols that need a value, in slot order.
    pub fn slots(&self) -> &[Symbol] {
        &self.slots
    }

    /// Slot values resolved from a binding map.
    pub fn resolve(&self, bindings: &Bindings) -> Result<Vec<f64>> {
        self.slots
            .iter()
            .map(|s| {
                bindings
                    .get(s)
                    .copied()
                    .ok_or_else(|| Error::UnboundSymbol(format!("{s}")))
            })
            .collect()
    }

    pub fn eval(&self, x: f64, y: f64, slots: &[f64]) -> Result<f64> {
        self.eval_tracked(x, y, slots, &mut 0.0)
    }

    /// Evaluates while recording in `scale` the largest magnitude of any
    /// summand met along the way.
    pub fn eval_tracked(&self, x: f64, y: f64, slots: &[f64], scale: &mut f64) -> Result<f64> {
        self.run(x, y, slots, scale, &mut Vec::with_capacity(16))
    }

    /// Like [`Compiled::eval`], reusing `stack` across calls in hot loops.
    pub fn eval_with(&self, x: f64, y: f64, slots: &[f64], stack: &mut Vec<f64>) -> Result<f64> {
        self.run(x, y, slots, &mut 0.0, stack)
    }

    fn run(&self, x: f64, y: f64, slots: &[f64], scale: &mut f64, stack: &mut Vec<f64>) -> Result<f64> {
        stack.clear();
        for op in &self.ops {
            match op {
                Op::Const(c) => stack.push(*c),
                Op::X => stack.push(x),
                Op::Y => stack.push(y),
                Op::Slot(i) => stack.push(slots[*i]),
                Op::Add(n) => {
                    let at = stack.len() - n;
                    let mut s = 0.0;
                    for v in stack.drain(at..) {
                        *scale = scale.max(v.abs());
                        s += v;
                    }
                    stack.push(s);
                }
                Op::Mul(n) => {
                    let at = stack.len() - n;
                    let p = stack.drain(at..).product();
                    stack.push(p);
                }
                Op::PowI(k) => {
                    let b = stack.pop().unwrap();
                    if *k < 0 && b.abs() < DIVISION_GUARD {
                        return Err(Error::DomainViolation(format!(
                            "division by {b:e} at ({x}, {y})"
                        )));
                    }
                    stack.push(powi(b, *k));
                }
                Op::PowQ(p, q) => {
                    let b = stack.pop().unwrap();
                    stack.push(pow_rational(b, *p, *q, x, y)?);
                }
                Op::Elem(k) => {
                    let a = stack.pop().unwrap();
                    stack.push(elem(*k, a, x, y)?);
                }
            }
        }
        let v = stack.pop().unwrap_or(0.0);
        if !v.is_finite() {
            return Err(Error::DomainViolation(format!("non-finite value at ({x}, {y})")));
        }
        Ok(v)
    }
}

fn powi(b: f64, k: i32) -> f64 {
    let mut r = 1.0;
    let mut base = if k < 0 { 1.0 / b } else { b };
    let mut n = k.unsigned_abs();
    while n > 0 {
        if n & 1 == 1 {
            r *= base;
        }
        base *= base;
        n >>= 1;
    }
    r
}

fn pow_rational(b: f64, p: i64, q: u64, x: f64, y: f64) -> Result<f64> {
    if p < 0 && b.abs() < DIVISION_GUARD {
        return Err(Error::DomainViolation(format!("division by {b:e} at ({x}, {y})")));
    }
    let e = p as f64 / q as f64;
    if b >= 0.0 {
        return Ok(libm::pow(b, e));
    }
    if q % 2 == 1 {
        let m = libm::pow(-b, e);
        return Ok(if p % 2 == 0 { m } else { -m });
    }
    Err(Error::DomainViolation(format!(
        "even root of negative value {b} at ({x}, {y})"
    )))
}

fn elem(k: ElemKind, a: f64, x: f64, y: f64) -> Result<f64> {
    Ok(match k {
        ElemKind::Log => {
            if a <= 0.0 {
                return Err(Error::DomainViolation(format!("log of {a} at ({x}, {y})")));
            }
            libm::log(a)
        }
        ElemKind::Exp => libm::exp(a),
        ElemKind::Sqrt => {
            if a < 0.0 {
                return Err(Error::DomainViolation(format!("sqrt of {a} at ({x}, {y})")));
            }
            libm::sqrt(a)
        }
        ElemKind::Sin => libm::sin(a),
        ElemKind::Cos => libm::cos(a),
    })
}

/// Evaluates `e` at `point` with the given symbol values.
pub fn eval_point(e: &Expr, point: (f64, f64), bindings: &Bindings) -> Result<f64> {
    let c = Compiled::new(e);
    let slots = c.resolve(bindings)?;
    c.eval(point.0, point.1, &slots)
}

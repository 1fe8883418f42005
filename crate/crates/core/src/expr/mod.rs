//! Symbolic expressions over the plane coordinates `x`, `y`.
//!
//! An [`Expr`] is an immutable tree. Trees produced by [`normalize`] are in a
//! canonical rational form (one expanded numerator over a product of
//! denominator factors), so structural equality of normalized trees is a
//! sound, if incomplete, equality test. [`is_zero`] closes the gap with a
//! seeded numerical fallback.

mod diff;
mod eval;
mod exact;
mod jet;
mod parse;
mod poly;
mod print;
mod ratfun;
mod subst;
mod zero;

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub use diff::{coord_diff, derive_with, LeafRule};
pub use eval::{eval_point, Bindings, Compiled};
pub use jet::{collect_wjet, JetCoefficients};
pub use parse::{parse_expr, parse_raw};
pub use ratfun::{normalize, normalize_tracked, Normalized};
pub use subst::{substitute, substitute_all, Target};
pub use zero::{is_zero, sample_points, Evidence, SampleDomain, ZeroVerdict, ZERO_SAMPLES, ZERO_TOLERANCE};

/// Exact rational constant.
pub type Q = num_rational::BigRational;

pub fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn q_to_f64(q: &Q) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

/// Plane coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Coord {
    X,
    Y,
}

impl Coord {
    pub fn name(self) -> char {
        match self {
            Coord::X => 'x',
            Coord::Y => 'y',
        }
    }
}

/// Elementary functions available in expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ElemKind {
    Log,
    Exp,
    Sqrt,
    Sin,
    Cos,
}

impl ElemKind {
    pub fn name(self) -> &'static str {
        match self {
            ElemKind::Log => "log",
            ElemKind::Exp => "exp",
            ElemKind::Sqrt => "sqrt",
            ElemKind::Sin => "sin",
            ElemKind::Cos => "cos",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "log" => ElemKind::Log,
            "exp" => ElemKind::Exp,
            "sqrt" => ElemKind::Sqrt,
            "sin" => ElemKind::Sin,
            "cos" => ElemKind::Cos,
            _ => return None,
        })
    }
}

/// Names of abstract functions of `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FnName {
    F,
    G,
    U,
    V,
    S,
}

impl FnName {
    pub fn name(self) -> char {
        match self {
            FnName::F => 'f',
            FnName::G => 'g',
            FnName::U => 'u',
            FnName::V => 'v',
            FnName::S => 'S',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        Some(match c {
            'f' => FnName::F,
            'g' => FnName::G,
            'u' => FnName::U,
            'v' => FnName::V,
            'S' => FnName::S,
            _ => return None,
        })
    }
}

/// A function symbol together with its partial derivative orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FnSym {
    pub name: FnName,
    pub dx: u32,
    pub dy: u32,
}

impl FnSym {
    pub fn new(name: FnName) -> Self {
        FnSym { name, dx: 0, dy: 0 }
    }

    pub fn derived(self, var: Coord) -> Self {
        match var {
            Coord::X => FnSym { dx: self.dx + 1, ..self },
            Coord::Y => FnSym { dy: self.dy + 1, ..self },
        }
    }
}

/// An abstract function differentiated only by the frame operators.
///
/// `word` lists frame indices outermost first, so `word = [1, 2]` on `s`
/// stands for ∂₁∂₂ s.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FrameSym {
    pub name: String,
    pub word: Vec<u8>,
}

impl FrameSym {
    pub fn new(name: &str, word: &[u8]) -> Self {
        FrameSym {
            name: name.into(),
            word: word.to_vec(),
        }
    }

    /// The symbol after one more application of ∂ᵢ.
    pub fn derived(&self, index: u8) -> Self {
        let mut word = Vec::with_capacity(self.word.len() + 1);
        word.push(index);
        word.extend_from_slice(&self.word);
        FrameSym {
            name: self.name.clone(),
            word,
        }
    }
}

/// Highest w-jet order represented.
pub const MAX_JET: u8 = 3;

/// Symbolic expression tree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Const(Q),
    Coord(Coord),
    Sum(Vec<Expr>),
    Prod(Vec<Expr>),
    Pow(Box<Expr>, Q),
    Elem(ElemKind, Box<Expr>),
    Fn(FnSym),
    /// `w`, `w'`, `w''`, `w'''` for orders 0..=3.
    WJet(u8),
    Frame(FrameSym),
}

/// A leaf symbol that can be bound to a value or substituted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Coord(Coord),
    Fn(FnSym),
    WJet(u8),
    Frame(FrameSym),
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&Expr::from(self.clone()), f)
    }
}

impl From<Symbol> for Expr {
    fn from(s: Symbol) -> Expr {
        match s {
            Symbol::Coord(c) => Expr::Coord(c),
            Symbol::Fn(f) => Expr::Fn(f),
            Symbol::WJet(k) => Expr::WJet(k),
            Symbol::Frame(fs) => Expr::Frame(fs),
        }
    }
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::Const(Q::zero())
    }

    pub fn one() -> Expr {
        Expr::Const(Q::one())
    }

    pub fn int(n: i64) -> Expr {
        Expr::Const(q_int(n))
    }

    pub fn frac(n: i64, d: i64) -> Expr {
        Expr::Const(q_frac(n, d))
    }

    pub fn x() -> Expr {
        Expr::Coord(Coord::X)
    }

    pub fn y() -> Expr {
        Expr::Coord(Coord::Y)
    }

    pub fn coord(c: Coord) -> Expr {
        Expr::Coord(c)
    }

    pub fn func(name: FnName) -> Expr {
        Expr::Fn(FnSym::new(name))
    }

    pub fn func_derivative(name: FnName, dx: u32, dy: u32) -> Expr {
        Expr::Fn(FnSym { name, dx, dy })
    }

    pub fn wjet(order: u8) -> Expr {
        assert!(order <= MAX_JET, "w-jet order {order} exceeds {MAX_JET}");
        Expr::WJet(order)
    }

    pub fn frame(name: &str, word: &[u8]) -> Expr {
        Expr::Frame(FrameSym::new(name, word))
    }

    pub fn elem(kind: ElemKind, arg: Expr) -> Expr {
        Expr::Elem(kind, Box::new(arg))
    }

    pub fn log(arg: Expr) -> Expr {
        Expr::elem(ElemKind::Log, arg)
    }

    pub fn exp(arg: Expr) -> Expr {
        Expr::elem(ElemKind::Exp, arg)
    }

    pub fn sqrt(arg: Expr) -> Expr {
        Expr::elem(ElemKind::Sqrt, arg)
    }

    pub fn sin(arg: Expr) -> Expr {
        Expr::elem(ElemKind::Sin, arg)
    }

    pub fn cos(arg: Expr) -> Expr {
        Expr::elem(ElemKind::Cos, arg)
    }

    pub fn pow(self, exponent: Q) -> Expr {
        Expr::Pow(Box::new(self), exponent)
    }

    pub fn powi(self, n: i64) -> Expr {
        self.pow(q_int(n))
    }

    pub fn recip(self) -> Expr {
        self.powi(-1)
    }

    pub fn sum(terms: Vec<Expr>) -> Expr {
        match terms.len() {
            0 => Expr::zero(),
            1 => terms.into_iter().next().unwrap(),
            _ => Expr::Sum(terms),
        }
    }

    pub fn product(factors: Vec<Expr>) -> Expr {
        match factors.len() {
            0 => Expr::one(),
            1 => factors.into_iter().next().unwrap(),
            _ => Expr::Prod(factors),
        }
    }

    pub fn as_const(&self) -> Option<&Q> {
        match self {
            Expr::Const(q) => Some(q),
            _ => None,
        }
    }

    pub fn is_const_zero(&self) -> bool {
        matches!(self, Expr::Const(q) if q.is_zero())
    }

    pub fn is_const_one(&self) -> bool {
        matches!(self, Expr::Const(q) if q.is_one())
    }

    pub fn is_negative_const(&self) -> bool {
        matches!(self, Expr::Const(q) if q.is_negative())
    }

    /// Visits every node, parents before children.
    pub fn walk<'a>(&'a self, visit: &mut dyn FnMut(&'a Expr)) {
        visit(self);
        match self {
            Expr::Sum(items) | Expr::Prod(items) => items.iter().for_each(|e| e.walk(visit)),
            Expr::Pow(b, _) => b.walk(visit),
            Expr::Elem(_, a) => a.walk(visit),
            _ => {}
        }
    }

    pub fn any(&self, pred: &dyn Fn(&Expr) -> bool) -> bool {
        let mut found = false;
        self.walk(&mut |e| found = found || pred(e));
        found
    }

    pub fn contains_frame(&self) -> bool {
        self.any(&|e| matches!(e, Expr::Frame(_)))
    }

    pub fn contains_wjet(&self) -> bool {
        self.any(&|e| matches!(e, Expr::WJet(_)))
    }

    pub fn contains_fn(&self, name: FnName) -> bool {
        self.any(&|e| matches!(e, Expr::Fn(s) if s.name == name))
    }

    /// All leaf symbols, deduplicated and sorted.
    pub fn symbols(&self) -> Vec<Symbol> {
        let mut out = Vec::new();
        self.walk(&mut |e| {
            let s = match e {
                Expr::Coord(c) => Symbol::Coord(*c),
                Expr::Fn(f) => Symbol::Fn(*f),
                Expr::WJet(k) => Symbol::WJet(*k),
                Expr::Frame(fs) => Symbol::Frame(fs.clone()),
                _ => return,
            };
            out.push(s);
        });
        out.sort();
        out.dedup();
        out
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |_| n += 1);
        n
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

impl From<Q> for Expr {
    fn from(q: Q) -> Expr {
        Expr::Const(q)
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::Sum(vec![self, rhs])
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::Sum(vec![self, -rhs])
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::Prod(vec![self, rhs])
    }
}

impl Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::Prod(vec![self, rhs.recip()])
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        match self {
            Expr::Const(q) => Expr::Const(-q),
            other => Expr::Prod(vec![Expr::int(-1), other]),
        }
    }
}

impl Add<i64> for Expr {
    type Output = Expr;
    fn add(self, rhs: i64) -> Expr {
        self + Expr::int(rhs)
    }
}

impl Sub<i64> for Expr {
    type Output = Expr;
    fn sub(self, rhs: i64) -> Expr {
        self - Expr::int(rhs)
    }
}

impl Mul<Expr> for i64 {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::int(self) * rhs
    }
}

impl Mul<i64> for Expr {
    type Output = Expr;
    fn mul(self, rhs: i64) -> Expr {
        Expr::int(rhs) * self
    }
}

#[cfg(test)]
mod tests;

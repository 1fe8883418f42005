//! Rational normal form.
//!
//! A normalized value is `num / (f₁^e₁ ⋯ fₖ^eₖ)` where `num` is an expanded
//! Laurent polynomial in the atoms and every `fᵢ` is a primitive polynomial
//! with at least two terms. Common factors are cancelled by exact division;
//! no multivariate gcd is attempted, so two equal rational functions may
//! still differ structurally when a denominator factor is reducible.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::poly::{split_factor, Atom, Monomial, Poly};
use super::{q_int, ElemKind, Expr, Q};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct RatFun {
    pub(crate) num: Poly,
    /// Sorted, pairwise distinct factors with positive multiplicities.
    pub(crate) den: Vec<(Poly, u32)>,
}

impl RatFun {
    pub(crate) fn from_poly(p: Poly) -> Self {
        RatFun {
            num: p,
            den: Vec::new(),
        }
    }

    pub(crate) fn constant(c: Q) -> Self {
        RatFun::from_poly(Poly::constant(c))
    }

    pub(crate) fn atom(a: Atom) -> Self {
        RatFun::from_poly(Poly::atom(a))
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub(crate) fn as_const(&self) -> Option<Q> {
        if self.den.is_empty() {
            self.num.as_const()
        } else {
            None
        }
    }

    fn den_expanded(factors: &[(Poly, u32)]) -> Poly {
        factors
            .iter()
            .fold(Poly::constant(Q::one()), |acc, (f, e)| acc.mul(&f.powi(*e)))
    }

    pub(crate) fn add(&self, other: &RatFun) -> RatFun {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            let mut r = RatFun {
                num: self.num.add(&other.num),
                den: self.den.clone(),
            };
            r.cancel();
            return r;
        }
        let lcm = merge_factors(&self.den, &other.den, |a, b| a.max(b));
        let lift = |r: &RatFun| {
            let missing: Vec<(Poly, u32)> = lcm
                .iter()
                .filter_map(|(f, e)| {
                    let have = r.den.iter().find(|(g, _)| g == f).map(|(_, k)| *k).unwrap_or(0);
                    (*e > have).then(|| (f.clone(), e - have))
                })
                .collect();
            r.num.mul(&RatFun::den_expanded(&missing))
        };
        let mut r = RatFun {
            num: lift(self).add(&lift(other)),
            den: lcm,
        };
        r.cancel();
        r
    }

    pub(crate) fn mul(&self, other: &RatFun) -> RatFun {
        if self.is_zero() || other.is_zero() {
            return RatFun::constant(Q::zero());
        }
        let mut r = RatFun {
            num: self.num.mul(&other.num),
            den: merge_factors(&self.den, &other.den, |a, b| a + b),
        };
        r.cancel();
        r.reduce_roots()
    }

    /// Multiplicative inverse; `None` for zero.
    pub(crate) fn inv(&self) -> Option<RatFun> {
        if self.is_zero() {
            return None;
        }
        let (c, m, factor) = split_factor(&self.num);
        let num = RatFun::den_expanded(&self.den).mul_term(&m.inv(), &c.recip());
        let mut r = RatFun {
            num,
            den: factor.map(|f| vec![(f, 1)]).unwrap_or_default(),
        };
        r.cancel();
        Some(r.reduce_roots())
    }

    pub(crate) fn powi(&self, k: i64) -> Option<RatFun> {
        if k < 0 {
            return self.inv()?.powi(-k);
        }
        if k == 0 {
            return Some(RatFun::constant(Q::one()));
        }
        if k == 1 {
            return Some(self.clone());
        }
        let k32 = u32::try_from(k).ok()?;
        let num = match self.num.single_term() {
            Some((m, c)) => Poly::term(m.powi(k as i32), num_traits::pow(c.clone(), k as usize)),
            None => self.num.powi(k32),
        };
        let r = RatFun {
            num,
            den: self.den.iter().map(|(f, e)| (f.clone(), e * k32)).collect(),
        };
        Some(r.reduce_roots())
    }

    /// Divides out denominator factors that divide the numerator.
    fn cancel(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        for (f, e) in self.den.iter_mut() {
            while *e > 0 {
                match self.num.div_exact(f) {
                    Some(q) => {
                        self.num = q;
                        *e -= 1;
                    }
                    None => break,
                }
            }
        }
        self.den.retain(|(_, e)| *e > 0);
    }

    /// Brings every root exponent into `0..q` by pulling out whole powers of
    /// the radicand.
    fn reduce_roots(self) -> RatFun {
        let needs = self.num.terms.keys().any(|m| {
            m.0.iter()
                .any(|(a, e)| matches!(a, Atom::Root(_, q) if *e < 0 || *e >= *q as i32))
        });
        if !needs {
            return self;
        }
        let mut acc = RatFun::constant(Q::zero());
        for (m, c) in &self.num.terms {
            let mut rest = Vec::new();
            let mut extra = RatFun::constant(c.clone());
            for (a, e) in &m.0 {
                if let Atom::Root(base, q) = a {
                    let q = *q as i32;
                    let (whole, rem) = (e.div_euclid(q), e.rem_euclid(q));
                    if rem != 0 {
                        rest.push((a.clone(), rem));
                    }
                    if whole != 0 {
                        let b = to_ratfun(base, &mut Ctx::default());
                        match b.powi(whole as i64) {
                            Some(p) => extra = extra.mul(&p),
                            None => {
                                let opaque = Expr::Pow(alloc::boxed::Box::new(base.clone()), q_int(whole as i64));
                                extra = extra.mul(&RatFun::atom(Atom::Opaque(opaque)));
                            }
                        }
                    }
                } else {
                    rest.push((a.clone(), *e));
                }
            }
            let term = RatFun::from_poly(Poly::term(Monomial(rest), Q::one()));
            acc = acc.add(&term.mul(&extra));
        }
        let den = RatFun {
            num: Poly::constant(Q::one()),
            den: self.den,
        };
        acc.mul(&den)
    }

    pub(crate) fn to_expr(&self) -> Expr {
        if self.num.is_zero() {
            return Expr::zero();
        }
        // Pull negative exponents out of the numerator into the denominator.
        let mut shift = Vec::new();
        for a in self.num.atoms() {
            let min = self.num.terms.keys().map(|m| m.exponent(&a)).min().unwrap_or(0);
            if min < 0 {
                shift.push((a, min));
            }
        }
        let shift = Monomial(shift);
        let num = if shift.is_one() {
            self.num.clone()
        } else {
            self.num.mul_term(&shift.inv(), &Q::one())
        };
        let mut den_parts: Vec<Expr> = shift
            .0
            .iter()
            .map(|(a, e)| power_expr(a.to_expr(), -*e as i64))
            .collect();
        den_parts.extend(self.den.iter().map(|(f, e)| power_expr(poly_expr(f), *e as i64)));

        if den_parts.is_empty() {
            return poly_expr(&num);
        }
        let inv_den = if den_parts.len() == 1 {
            match den_parts.pop().unwrap() {
                Expr::Pow(b, e) => Expr::Pow(b, -e),
                other => other.recip(),
            }
        } else {
            Expr::Prod(den_parts).recip()
        };
        match num.as_const() {
            Some(c) if c.is_one() => inv_den,
            Some(c) => Expr::Prod(vec![Expr::Const(c), inv_den]),
            None => match poly_expr(&num) {
                Expr::Prod(mut items) => {
                    items.push(inv_den);
                    Expr::Prod(items)
                }
                other => Expr::Prod(vec![other, inv_den]),
            },
        }
    }
}

fn merge_factors(
    a: &[(Poly, u32)],
    b: &[(Poly, u32)],
    combine: impl Fn(u32, u32) -> u32,
) -> Vec<(Poly, u32)> {
    let mut out: Vec<(Poly, u32)> = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) if x.0 == y.0 => {
                out.push((x.0.clone(), combine(x.1, y.1)));
                i += 1;
                j += 1;
            }
            (Some(x), Some(y)) if x.0 < y.0 => {
                out.push((x.0.clone(), combine(x.1, 0)));
                i += 1;
            }
            (Some(_), Some(y)) => {
                out.push((y.0.clone(), combine(0, y.1)));
                j += 1;
            }
            (Some(x), None) => {
                out.push((x.0.clone(), combine(x.1, 0)));
                i += 1;
            }
            (None, Some(y)) => {
                out.push((y.0.clone(), combine(0, y.1)));
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out.retain(|(_, e)| *e > 0);
    out
}

fn power_expr(base: Expr, e: i64) -> Expr {
    if e == 1 {
        base
    } else {
        base.powi(e)
    }
}

fn term_expr(m: &Monomial, c: &Q) -> Expr {
    let mut factors = Vec::with_capacity(m.0.len() + 1);
    if !c.is_one() {
        factors.push(Expr::Const(c.clone()));
    }
    for (a, e) in &m.0 {
        factors.push(power_expr(a.to_expr(), *e as i64));
    }
    Expr::product(factors)
}

fn poly_expr(p: &Poly) -> Expr {
    if p.is_zero() {
        return Expr::zero();
    }
    let terms: Vec<Expr> = p.terms.iter().rev().map(|(m, c)| term_expr(m, c)).collect();
    Expr::sum(terms)
}

#[derive(Default)]
struct Ctx {
    side: Option<BTreeSet<Expr>>,
}

impl Ctx {
    fn record(&mut self, e: &RatFun) {
        if let Some(side) = self.side.as_mut() {
            if e.as_const().is_none() {
                side.insert(e.to_expr());
            }
        }
    }
}

fn to_ratfun(e: &Expr, ctx: &mut Ctx) -> RatFun {
    match e {
        Expr::Const(q) => RatFun::constant(q.clone()),
        Expr::Coord(c) => RatFun::atom(Atom::Coord(*c)),
        Expr::Fn(f) => RatFun::atom(Atom::Fn(*f)),
        Expr::WJet(k) => RatFun::atom(Atom::Jet(*k)),
        Expr::Frame(fs) => RatFun::atom(Atom::Frame(fs.clone())),
        Expr::Sum(items) => items
            .iter()
            .fold(RatFun::constant(Q::zero()), |acc, t| acc.add(&to_ratfun(t, ctx))),
        Expr::Prod(items) => {
            let mut acc = RatFun::constant(Q::one());
            for t in items {
                acc = acc.mul(&to_ratfun(t, ctx));
                if acc.is_zero() {
                    break;
                }
            }
            acc
        }
        Expr::Pow(base, q) => pow_ratfun(base, q, ctx),
        Expr::Elem(kind, arg) => elem_ratfun(*kind, arg, ctx),
    }
}

fn opaque(e: Expr) -> RatFun {
    RatFun::atom(Atom::Opaque(e))
}

fn pow_ratfun(base: &Expr, q: &Q, ctx: &mut Ctx) -> RatFun {
    if q.is_zero() {
        return RatFun::constant(Q::one());
    }
    if q.is_integer() {
        let k = match i64::try_from(q.to_integer()) {
            Ok(k) => k,
            Err(_) => return opaque(Expr::Pow(alloc::boxed::Box::new(base.clone()), q.clone())),
        };
        if k < 0 {
            // Distribute over products so factored denominators survive a
            // render/normalize round trip.
            match base {
                Expr::Prod(items) => {
                    let mut acc = RatFun::constant(Q::one());
                    for t in items {
                        acc = acc.mul(&pow_ratfun(t, q, ctx));
                    }
                    return acc;
                }
                Expr::Pow(inner, j) if j.is_integer() => return pow_ratfun(inner, &(j * q), ctx),
                _ => {}
            }
        }
        let b = to_ratfun(base, ctx);
        if k < 0 {
            ctx.record(&b);
        }
        return match b.powi(k) {
            Some(r) => r,
            None => opaque(Expr::Pow(alloc::boxed::Box::new(b.to_expr()), q.clone())),
        };
    }
    let b = to_ratfun(base, ctx);
    if q.is_negative() {
        ctx.record(&b);
    }
    root_power(b, q)
}

/// `b^q` for non-integer `q`.
fn root_power(b: RatFun, q: &Q) -> RatFun {
    let d = q.denom().clone();
    let p = q.numer().clone();
    let (Ok(d32), Ok(p64)) = (u32::try_from(&d), i64::try_from(&p)) else {
        return opaque(Expr::Pow(alloc::boxed::Box::new(b.to_expr()), q.clone()));
    };
    if b.is_zero() {
        return if p64 > 0 {
            RatFun::constant(Q::zero())
        } else {
            opaque(Expr::Pow(alloc::boxed::Box::new(Expr::zero()), q.clone()))
        };
    }
    if let Some(c) = b.as_const() {
        if let Some(r) = exact_root(&c, d32) {
            return RatFun::constant(r).powi(p64).expect("nonzero");
        }
    }
    let atom = Atom::Root(b.to_expr(), d32);
    let m = Monomial(vec![(atom, 1)]).powi(p64 as i32);
    RatFun::from_poly(Poly::term(m, Q::one())).reduce_roots()
}

fn exact_root(c: &Q, d: u32) -> Option<Q> {
    if c.is_negative() && d.is_multiple_of(2) {
        return None;
    }
    let root = |n: &BigInt| {
        let r = n.abs().nth_root(d);
        (num_traits::pow(r.clone(), d as usize) == n.abs()).then(|| if n.is_negative() { -r } else { r })
    };
    Some(Q::new(root(c.numer())?, root(c.denom())?))
}

fn elem_ratfun(kind: ElemKind, arg: &Expr, ctx: &mut Ctx) -> RatFun {
    let a = to_ratfun(arg, ctx);
    match kind {
        ElemKind::Sqrt => root_power(a, &Q::new(1.into(), 2.into())),
        ElemKind::Exp => {
            if a.is_zero() {
                return RatFun::constant(Q::one());
            }
            if let Some(Atom::Log(u)) = single_atom(&a) {
                return to_ratfun(u, ctx);
            }
            RatFun::atom(Atom::Exp(a.to_expr()))
        }
        ElemKind::Log => {
            if a.as_const().is_some_and(|c| c.is_one()) {
                return RatFun::constant(Q::zero());
            }
            if let Some(Atom::Exp(u)) = single_atom(&a) {
                return to_ratfun(u, ctx);
            }
            RatFun::atom(Atom::Log(a.to_expr()))
        }
        ElemKind::Sin => {
            if a.is_zero() {
                return RatFun::constant(Q::zero());
            }
            RatFun::atom(Atom::Sin(a.to_expr()))
        }
        ElemKind::Cos => {
            if a.is_zero() {
                return RatFun::constant(Q::one());
            }
            RatFun::atom(Atom::Cos(a.to_expr()))
        }
    }
}

/// The atom when `r` is exactly that atom to the first power.
fn single_atom(r: &RatFun) -> Option<&Atom> {
    if !r.den.is_empty() {
        return None;
    }
    let (m, c) = r.num.single_term()?;
    match m.0.as_slice() {
        [(a, 1)] if c.is_one() => Some(a),
        _ => None,
    }
}

pub(crate) fn ratfun_of(e: &Expr) -> RatFun {
    to_ratfun(e, &mut Ctx::default())
}

/// Canonical rational form of `e`.
pub fn normalize(e: &Expr) -> Expr {
    ratfun_of(e).to_expr()
}

/// A normalized expression together with the denominators that were divided
/// by on the way. Cancelled factors stay recorded so that evaluation can
/// avoid their zero sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Normalized {
    pub expr: Expr,
    pub side_conditions: BTreeSet<Expr>,
}

pub fn normalize_tracked(e: &Expr) -> Normalized {
    let mut ctx = Ctx {
        side: Some(BTreeSet::new()),
    };
    let r = to_ratfun(e, &mut ctx);
    Normalized {
        expr: r.to_expr(),
        side_conditions: ctx.side.unwrap_or_default(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_raw;

    fn n(s: &str) -> Expr {
        normalize(&parse_raw(s).unwrap())
    }

    #[test]
    fn binomial_identity_vanishes() {
        assert_eq!(n("(x+y)^2 - (x^2 + 2*x*y + y^2)"), Expr::zero());
    }

    #[test]
    fn cancels_common_factor() {
        assert_eq!(n("x/x"), Expr::one());
        assert_eq!(n("y*(1/(x*y))"), Expr::x().recip());
        assert_eq!(n("(x+y)^3/(x+y)^2"), n("x+y"));
        assert_eq!(n("(x^2-y^2)/(x-y)"), n("x+y"));
    }

    #[test]
    fn records_cancelled_denominator() {
        let t = normalize_tracked(&parse_raw("x/x").unwrap());
        assert_eq!(t.expr, Expr::one());
        assert!(t.side_conditions.contains(&Expr::x()));
    }

    #[test]
    fn reciprocal_of_monomial_renders_as_power() {
        assert_eq!(n("1/(x*y)"), Expr::Prod(vec![Expr::x(), Expr::y()]).recip());
    }

    #[test]
    fn exponentials_merge() {
        assert_eq!(n("exp(x+y)/(exp(x+y)*exp(x+y))"), n("exp(-(x+y))"));
        assert_eq!(n("exp(x)*exp(-x)"), Expr::one());
        assert_eq!(n("log(exp(x*y))"), n("x*y"));
    }

    #[test]
    fn roots_reduce() {
        assert_eq!(n("sqrt(x)*sqrt(x)"), Expr::x());
        assert_eq!(n("sqrt(4)"), Expr::int(2));
        assert_eq!(n("x^(3/2)"), n("x*sqrt(x)"));
        assert_eq!(n("1/sqrt(x)"), n("sqrt(x)/x"));
    }

    #[test]
    fn sum_of_fractions_shares_denominator() {
        let e = n("1/(x+y) + 1/(x+y)");
        assert_eq!(e, n("2/(x+y)"));
        assert_eq!(n("1/(x+1) - 1/(x+2) - 1/((x+1)*(x+2))"), Expr::zero());
    }

    #[test]
    fn normalize_is_idempotent_on_factored_denominators() {
        for s in [
            "x/((x+2*y)^2*(2*x+y))",
            "(x*y + 1)/(x^2*(x+y)^3)",
            "exp(x)/(1+exp(x))",
            "sqrt(x+y)/(x-y)",
            "log(x/y)^2 - 3*w''/(x+1)",
        ] {
            let once = n(s);
            assert_eq!(normalize(&once), once, "{s}");
        }
    }
}

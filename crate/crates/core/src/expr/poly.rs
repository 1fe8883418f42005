//! Laurent polynomials over opaque atoms with exact rational coefficients.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{normalize, Coord, Expr, FnSym, FrameSym, Q};

/// Indivisible factor of a monomial.
///
/// `Exp` sorts last and appears at most once per monomial with exponent 1:
/// products of exponentials are merged into a single exponential of the
/// summed argument.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum Atom {
    Coord(Coord),
    Fn(FnSym),
    Jet(u8),
    Frame(FrameSym),
    Log(Expr),
    Sin(Expr),
    Cos(Expr),
    /// `base^(1/q)` with `q >= 2`; exponents on it are kept in `0..q`.
    Root(Expr, u32),
    /// Anything the rational layer cannot see into (e.g. `0^-1`).
    Opaque(Expr),
    Exp(Expr),
}

impl Atom {
    pub(crate) fn is_exp(&self) -> bool {
        matches!(self, Atom::Exp(_))
    }

    pub(crate) fn to_expr(&self) -> Expr {
        use super::ElemKind;
        match self {
            Atom::Coord(c) => Expr::Coord(*c),
            Atom::Fn(f) => Expr::Fn(*f),
            Atom::Jet(k) => Expr::WJet(*k),
            Atom::Frame(fs) => Expr::Frame(fs.clone()),
            Atom::Log(a) => Expr::elem(ElemKind::Log, a.clone()),
            Atom::Sin(a) => Expr::elem(ElemKind::Sin, a.clone()),
            Atom::Cos(a) => Expr::elem(ElemKind::Cos, a.clone()),
            Atom::Exp(a) => Expr::elem(ElemKind::Exp, a.clone()),
            Atom::Root(b, 2) => Expr::elem(ElemKind::Sqrt, b.clone()),
            Atom::Root(b, q) => b.clone().pow(Q::new(1.into(), (*q).into())),
            Atom::Opaque(e) => e.clone(),
        }
    }
}

/// Product of atoms with nonzero integer exponents, sorted by atom.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub(crate) struct Monomial(pub(crate) Vec<(Atom, i32)>);

impl Monomial {
    pub(crate) fn one() -> Self {
        Monomial(Vec::new())
    }

    pub(crate) fn atom(a: Atom) -> Self {
        Monomial(alloc::vec![(a, 1)])
    }

    pub(crate) fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn degree(&self) -> i64 {
        self.0
            .iter()
            .filter(|(a, _)| !a.is_exp())
            .map(|(_, e)| *e as i64)
            .sum()
    }

    pub(crate) fn exponent(&self, atom: &Atom) -> i32 {
        self.0
            .binary_search_by(|(a, _)| a.cmp(atom))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub(crate) fn exp_arg(&self) -> Option<&Expr> {
        match self.0.last() {
            Some((Atom::Exp(a), _)) => Some(a),
            _ => None,
        }
    }

    pub(crate) fn mul(&self, other: &Monomial) -> Monomial {
        let mut out: Vec<(Atom, i32)> = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.0, &other.0);
        let mut exp_args: Vec<Expr> = Vec::new();
        while i < a.len() || j < b.len() {
            let take = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) => x.0.cmp(&y.0),
                (Some(_), None) => Ordering::Less,
                (None, Some(_)) => Ordering::Greater,
                (None, None) => unreachable!(),
            };
            let (atom, e) = match take {
                Ordering::Less => {
                    i += 1;
                    (a[i - 1].0.clone(), a[i - 1].1)
                }
                Ordering::Greater => {
                    j += 1;
                    (b[j - 1].0.clone(), b[j - 1].1)
                }
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                    if let Atom::Exp(x) = &a[i - 1].0 {
                        let Atom::Exp(y) = &b[j - 1].0 else { unreachable!() };
                        exp_args.push(x.clone());
                        exp_args.push(y.clone());
                        continue;
                    }
                    (a[i - 1].0.clone(), a[i - 1].1 + b[j - 1].1)
                }
            };
            if let Atom::Exp(x) = atom {
                exp_args.push(x);
                continue;
            }
            if e != 0 {
                out.push((atom, e));
            }
        }
        push_exp(&mut out, exp_args);
        Monomial(out)
    }

    pub(crate) fn powi(&self, k: i32) -> Monomial {
        if k == 0 {
            return Monomial::one();
        }
        let mut out = Vec::with_capacity(self.0.len());
        let mut exp_args = Vec::new();
        for (a, e) in &self.0 {
            match a {
                Atom::Exp(arg) => exp_args.push(normalize(&(Expr::int(k as i64) * arg.clone()))),
                _ => out.push((a.clone(), e * k)),
            }
        }
        push_exp(&mut out, exp_args);
        Monomial(out)
    }

    pub(crate) fn inv(&self) -> Monomial {
        self.powi(-1)
    }
}

fn push_exp(out: &mut Vec<(Atom, i32)>, args: Vec<Expr>) {
    match args.len() {
        0 => {}
        1 => {
            let a = args.into_iter().next().unwrap();
            if !a.is_const_zero() {
                out.push((Atom::Exp(a), 1));
            }
        }
        _ => {
            let merged = normalize(&Expr::sum(args));
            if !merged.is_const_zero() {
                out.push((Atom::Exp(merged), 1));
            }
        }
    }
}

impl Ord for Monomial {
    /// Graded lexicographic order; earlier atoms are more significant and
    /// the exponential factor breaks remaining ties.
    fn cmp(&self, other: &Self) -> Ordering {
        let d = self.degree().cmp(&other.degree());
        if d != Ordering::Equal {
            return d;
        }
        let strip = |m: &Monomial| m.0.iter().filter(|(a, _)| !a.is_exp()).count();
        let (a, b) = (&self.0[..strip(self)], &other.0[..strip(other)]);
        let (mut i, mut j) = (0, 0);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => break,
                (Some((_, e)), None) => return 0.cmp(e).reverse(),
                (None, Some((_, e))) => return 0.cmp(e),
                (Some((x, ex)), Some((y, ey))) => match x.cmp(y) {
                    Ordering::Less => return ex.cmp(&0),
                    Ordering::Greater => return 0.cmp(ey),
                    Ordering::Equal => {
                        if ex != ey {
                            return ex.cmp(ey);
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
        self.exp_arg().cmp(&other.exp_arg())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Laurent polynomial: a finite map from monomials to nonzero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub(crate) struct Poly {
    pub(crate) terms: BTreeMap<Monomial, Q>,
}

impl Poly {
    pub(crate) fn zero() -> Self {
        Poly::default()
    }

    pub(crate) fn constant(c: Q) -> Self {
        Poly::term(Monomial::one(), c)
    }

    pub(crate) fn term(m: Monomial, c: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub(crate) fn atom(a: Atom) -> Self {
        Poly::term(Monomial::atom(a), Q::one())
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub(crate) fn len(&self) -> usize {
        self.terms.len()
    }

    pub(crate) fn as_const(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub(crate) fn single_term(&self) -> Option<(&Monomial, &Q)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub(crate) fn leading(&self) -> Option<(&Monomial, &Q)> {
        self.terms.iter().next_back()
    }

    fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        use alloc::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub(crate) fn add(&self, other: &Poly) -> Poly {
        let (mut big, small) = if self.len() >= other.len() {
            (self.clone(), other)
        } else {
            (other.clone(), self)
        };
        for (m, c) in &small.terms {
            big.add_term(m.clone(), c.clone());
        }
        big
    }

    pub(crate) fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub(crate) fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub(crate) fn scale(&self, k: &Q) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub(crate) fn mul_term(&self, m: &Monomial, k: &Q) -> Poly {
        let has_exp = m.exp_arg().is_some();
        if !has_exp && !self.terms.keys().any(|t| t.exp_arg().is_some()) {
            // Multiplying by a monomial without exponentials preserves order.
            return Poly {
                terms: self.terms.iter().map(|(t, c)| (t.mul(m), c * k)).collect(),
            };
        }
        let mut out = Poly::zero();
        for (t, c) in &self.terms {
            out.add_term(t.mul(m), c * k);
        }
        out
    }

    pub(crate) fn mul(&self, other: &Poly) -> Poly {
        let (a, b) = if self.len() >= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = Poly::zero();
        for (m, c) in &b.terms {
            for (t, d) in &a.terms {
                out.add_term(t.mul(m), d * c);
            }
        }
        out
    }

    pub(crate) fn powi(&self, k: u32) -> Poly {
        let mut result = Poly::constant(Q::one());
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Atoms (other than exponentials) occurring in any term.
    pub(crate) fn atoms(&self) -> Vec<Atom> {
        let mut out: Vec<Atom> = self
            .terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(a, _)| a.clone()))
            .filter(|a| !a.is_exp())
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Monomial whose exponent on each atom is the minimum over all terms.
    pub(crate) fn monomial_content(&self) -> Monomial {
        let mut out = Vec::new();
        for a in self.atoms() {
            let min = self.terms.keys().map(|m| m.exponent(&a)).min().unwrap_or(0);
            if min != 0 {
                out.push((a, min));
            }
        }
        Monomial(out)
    }

    /// Positive rational `c` such that `self / c` has coprime integer
    /// coefficients.
    pub(crate) fn rational_content(&self) -> Q {
        let mut num = num_bigint::BigInt::zero();
        let mut den = num_bigint::BigInt::one();
        for c in self.terms.values() {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            Q::one()
        } else {
            Q::new(num, den)
        }
    }

    /// Exact division; `None` when `divisor` does not divide `self`.
    pub(crate) fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        if self.is_zero() {
            return Some(Poly::zero());
        }
        let (lead_m, lead_c) = divisor.leading()?;
        if divisor.len() == 1 {
            return Some(self.mul_term(&lead_m.inv(), &lead_c.recip()));
        }
        let floor = {
            let low_n = self.terms.keys().next().unwrap();
            let low_d = divisor.terms.keys().next().unwrap();
            low_n.mul(&low_d.inv())
        };
        let lead_inv = lead_m.inv();
        let lead_c_inv = lead_c.recip();
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        let cap = 64 + 8 * (self.len() + 1) * divisor.len();
        for _ in 0..cap {
            let Some((rm, rc)) = rem.leading() else {
                return Some(quot);
            };
            let t = rm.mul(&lead_inv);
            if t < floor {
                return None;
            }
            let k = rc * &lead_c_inv;
            rem = rem.sub(&divisor.mul_term(&t, &k));
            quot.add_term(t, k);
        }
        None
    }

    pub(crate) fn has_sign_negative_leading(&self) -> bool {
        self.leading().map(|(_, c)| c.is_negative()).unwrap_or(false)
    }
}

/// Splits `p` into `unit * factor` where the unit is a single term and the
/// factor (if any) has at least two terms, no monomial content, coprime
/// integer coefficients and a positive leading coefficient.
pub(crate) fn split_factor(p: &Poly) -> (Q, Monomial, Option<Poly>) {
    if let Some((m, c)) = p.single_term() {
        return (c.clone(), m.clone(), None);
    }
    let content = p.monomial_content();
    let mut unit_m = content.clone();
    let mut f = if content.is_one() {
        p.clone()
    } else {
        p.mul_term(&content.inv(), &Q::one())
    };
    if f.terms.keys().all(|m| m.exp_arg().is_some()) {
        let shift = f.terms.keys().next().unwrap().exp_arg().unwrap().clone();
        let m = Monomial(alloc::vec![(Atom::Exp(shift), 1)]);
        f = f.mul_term(&m.inv(), &Q::one());
        unit_m = unit_m.mul(&m);
    }
    let mut c = f.rational_content();
    if f.has_sign_negative_leading() {
        c = -c;
    }
    if !c.is_one() {
        f = f.scale(&c.recip());
    }
    if let Some((m, k)) = f.single_term() {
        // Exponential merging can collapse terms.
        let (m, k) = (m.clone(), k.clone());
        return (c * k, unit_m.mul(&m), None);
    }
    (c, unit_m, Some(f))
}

use alloc::format;
use alloc::vec::Vec;

use super::poly::{Atom, Monomial, Poly};
use super::ratfun::{ratfun_of, RatFun};
use super::{Expr, MAX_JET};
use crate::error::{Error, Result};

/// Coefficients of an expression affine in `w, w', w'', w'''`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JetCoefficients {
    /// `coeffs[k]` multiplies the k-th jet.
    pub coeffs: [Expr; 4],
    /// Jet-free part.
    pub constant: Expr,
}

impl JetCoefficients {
    /// `Σ coeffs[k]·w⁽ᵏ⁾ + constant`, unnormalized.
    pub fn reconstruct(&self) -> Expr {
        let mut terms: Vec<Expr> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c.clone() * Expr::WJet(k as u8))
            .collect();
        terms.push(self.constant.clone());
        Expr::sum(terms)
    }
}

/// Splits `e` into jet coefficients.
pub fn collect_wjet(e: &Expr) -> Result<JetCoefficients> {
    let r = ratfun_of(e);
    let mentions_jet = |x: &Expr| x.contains_wjet();
    for (f, _) in &r.den {
        if f.atoms().iter().any(|a| matches!(a, Atom::Jet(_)) || atom_hides_jet(a, &mentions_jet)) {
            return Err(Error::NonAffineWJet(format!("w-jet in a denominator of {e}")));
        }
    }
    let mut parts: [Poly; 5] = Default::default();
    for (m, c) in &r.num.terms {
        let mut jet: Option<u8> = None;
        let mut rest = Vec::with_capacity(m.0.len());
        for (a, k) in &m.0 {
            match a {
                Atom::Jet(order) => {
                    if *k != 1 || jet.is_some() {
                        return Err(Error::NonAffineWJet(format!("nonlinear jet monomial in {e}")));
                    }
                    jet = Some(*order);
                }
                other if atom_hides_jet(other, &mentions_jet) => {
                    return Err(Error::NonAffineWJet(format!("w-jet inside a function in {e}")));
                }
                other => rest.push((other.clone(), *k)),
            }
        }
        let slot = jet.map(|k| k as usize).unwrap_or(MAX_JET as usize + 1);
        parts[slot] = parts[slot].add(&Poly::term(Monomial(rest), c.clone()));
    }
    let over_den = |p: Poly| {
        let unit = RatFun {
            num: Poly::constant(num_traits::One::one()),
            den: r.den.clone(),
        };
        RatFun::from_poly(p).mul(&unit).to_expr()
    };
    let [p0, p1, p2, p3, pc] = parts;
    Ok(JetCoefficients {
        coeffs: [over_den(p0), over_den(p1), over_den(p2), over_den(p3)],
        constant: over_den(pc),
    })
}

fn atom_hides_jet(a: &Atom, mentions: &dyn Fn(&Expr) -> bool) -> bool {
    match a {
        Atom::Log(x) | Atom::Sin(x) | Atom::Cos(x) | Atom::Exp(x) | Atom::Opaque(x) => mentions(x),
        Atom::Root(x, _) => mentions(x),
        _ => false,
    }
}

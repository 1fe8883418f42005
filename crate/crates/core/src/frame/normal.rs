//! Normal forms for expressions in abstract frame-derivative symbols.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use super::{chern_h, check_index, close_over, FrameRule, WebSpec};
use crate::error::{Error, Result};
use crate::expr::{derive_with, normalize, substitute, Expr, FrameSym, Symbol, Target};

/// Upper bound on rewrite steps before a cycle is reported.
pub const REWRITE_CAP: usize = 1000;

/// Where the connection coefficient `H` comes from.
#[derive(Debug, Clone, Copy)]
pub enum Ambient<'a> {
    /// `H` and coordinates are taken from a concrete web.
    Web(&'a WebSpec),
    /// `H` is the abstract symbol `H[]`; the only closed form allowed is `f`,
    /// with `∂ᵢ f = −1`.
    Abstract,
}

impl<'a> Ambient<'a> {
    fn web(&self) -> Option<&'a WebSpec> {
        match self {
            Ambient::Web(w) => Some(w),
            Ambient::Abstract => None,
        }
    }

    fn h(&self) -> Expr {
        match self {
            Ambient::Web(w) => chern_h(w),
            Ambient::Abstract => Expr::frame("H", &[]),
        }
    }

    fn close(&self, e: &Expr) -> Result<Expr> {
        match self {
            Ambient::Web(w) => close_over(e, w),
            Ambient::Abstract => Ok(normalize(e)),
        }
    }

    fn derive(&self, e: &Expr, i: u8) -> Result<Expr> {
        let rule = FrameRule {
            index: i,
            web: self.web(),
            allow_frame: true,
        };
        Ok(normalize(&derive_with(e, &rule)?))
    }

    /// Applies the word outermost first.
    fn derive_word(&self, e: &Expr, word: &[u8]) -> Result<Expr> {
        let mut out = e.clone();
        for &i in word.iter().rev() {
            out = self.derive(&out, i)?;
        }
        Ok(out)
    }
}

/// A known derivative: `lhs ↦ rhs`, applied to every further derivative of
/// `lhs` as well.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteRelation {
    pub lhs: FrameSym,
    pub rhs: Expr,
}

impl RewriteRelation {
    pub fn new(name: &str, word: &[u8], rhs: Expr) -> Self {
        RewriteRelation {
            lhs: FrameSym::new(name, word),
            rhs,
        }
    }
}

/// Rewrites frame symbols until no relation applies and every word is in
/// canonical order.
///
/// A symbol whose word ends in the word of a relation is replaced by the
/// corresponding derivatives of the relation's right side. Otherwise
/// adjacent indices are swapped with
/// `∂a∂b X = ∂b∂a X + H(∂b X − ∂a X)` at the innermost inversion. When the
/// symbol's name carries a single-index relation `∂ⱼ s ↦ …`, the index `j`
/// is moved innermost so that the relation becomes applicable; all other
/// words are sorted with 1s before 2s.
pub fn abstract_normal_form(
    e: &Expr,
    relations: &[RewriteRelation],
    ambient: Ambient<'_>,
) -> Result<Expr> {
    let mut seen = BTreeSet::new();
    for r in relations {
        if !seen.insert(&r.lhs) {
            return Err(Error::InvalidArgument(format!(
                "two relations for {}",
                Expr::Frame(r.lhs.clone())
            )));
        }
        for &i in &r.lhs.word {
            check_index(i)?;
        }
    }
    let relations: Vec<RewriteRelation> = relations
        .iter()
        .map(|r| {
            Ok(RewriteRelation {
                lhs: r.lhs.clone(),
                rhs: ambient.close(&r.rhs)?,
            })
        })
        .collect::<Result<_>>()?;
    let h = ambient.h();

    let mut cur = ambient.close(e)?;
    for _ in 0..REWRITE_CAP {
        let mut step = None;
        for s in cur.symbols() {
            if let Symbol::Frame(fs) = &s {
                if let Some(r) = rewrite(fs, &relations, &h, &ambient)? {
                    step = Some((s, r));
                    break;
                }
            }
        }
        match step {
            Some((s, r)) => cur = substitute(&cur, &Target::Symbol(s), &r),
            None => return Ok(cur),
        }
    }
    Err(Error::NonTerminatingRelationCycle(REWRITE_CAP))
}

fn rewrite(
    s: &FrameSym,
    relations: &[RewriteRelation],
    h: &Expr,
    ambient: &Ambient<'_>,
) -> Result<Option<Expr>> {
    let w = &s.word;
    for &i in w {
        check_index(i)?;
    }
    let by_suffix = relations
        .iter()
        .filter(|r| r.lhs.name == s.name && w.ends_with(&r.lhs.word))
        .max_by_key(|r| r.lhs.word.len());
    if let Some(r) = by_suffix {
        let prefix = &w[..w.len() - r.lhs.word.len()];
        return ambient.derive_word(&r.rhs, prefix).map(Some);
    }

    let pivot = relations
        .iter()
        .find(|r| r.lhs.name == s.name && r.lhs.word.len() == 1)
        .map(|r| r.lhs.word[0]);
    let inverted = |a: u8, b: u8| match pivot {
        Some(j) => a == j && b != j,
        None => a > b,
    };
    let Some(k) = (0..w.len().saturating_sub(1)).rev().find(|&k| inverted(w[k], w[k + 1])) else {
        return Ok(None);
    };
    let (a, b) = (w[k], w[k + 1]);
    let tail = &w[k + 2..];
    let sym = |word: &[u8]| {
        let mut full = word.to_vec();
        full.extend_from_slice(tail);
        Expr::Frame(FrameSym {
            name: s.name.clone(),
            word: full,
        })
    };
    let swapped = sym(&[b, a]) + h.clone() * (sym(&[b]) - sym(&[a]));
    ambient.derive_word(&normalize(&swapped), &w[..k]).map(Some)
}

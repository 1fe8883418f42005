//! Frame calculus of a planar 3-web.
//!
//! The frame `∂₁ = −(1/f_x)∂x`, `∂₂ = −(1/f_y)∂y` is dual to the coframe
//! `ω₁ = −f_x dx`, `ω₂ = −f_y dy`. With `H = f_xy/(f_x f_y)` it satisfies
//! `[∂₁, ∂₂] = H(∂₂ − ∂₁)` and the curvature is `K = ∂₁H − ∂₂H`.

use alloc::format;

use crate::error::{Error, Result};
use crate::expr::{
    coord_diff, derive_with, normalize, substitute_all, Coord, Expr, FnName, LeafRule, Target,
    MAX_JET,
};

mod normal;
mod structure;
mod web;

pub use normal::{abstract_normal_form, Ambient, RewriteRelation};
pub use structure::{structure_residuals, wedge, exterior_d, OneForm, StructureResiduals};
pub use web::{Rect, WebSpec, DEGENERACY_TOL};

/// One of the two frame derivatives bound to a web.
#[derive(Debug, Clone, Copy)]
pub struct FrameOperator<'a> {
    pub index: u8,
    pub web: &'a WebSpec,
}

impl<'a> FrameOperator<'a> {
    pub fn new(index: u8, web: &'a WebSpec) -> Result<Self> {
        check_index(index)?;
        Ok(FrameOperator { index, web })
    }

    /// Components `(ξ, η)` of the vector field `ξ∂x + η∂y`.
    pub fn components(&self) -> (Expr, Expr) {
        match self.index {
            1 => (normalize(&-self.web.fx().clone().recip()), Expr::zero()),
            _ => (Expr::zero(), normalize(&-self.web.fy().clone().recip())),
        }
    }

    pub fn apply(&self, e: &Expr) -> Result<Expr> {
        frame_derive(e, self.index, self.web)
    }
}

pub(crate) fn check_index(i: u8) -> Result<()> {
    if i == 1 || i == 2 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("frame index {i} is not 1 or 2")))
    }
}

/// Leaf rule shared by the concrete operators and the abstract engine.
pub(crate) struct FrameRule<'a> {
    pub index: u8,
    pub web: Option<&'a WebSpec>,
    pub allow_frame: bool,
}

impl LeafRule for FrameRule<'_> {
    fn leaf(&self, leaf: &Expr) -> Result<Expr> {
        match leaf {
            Expr::Coord(c) => {
                let web = self.web.ok_or_else(|| {
                    Error::InvalidArgument("coordinates need a concrete web".into())
                })?;
                Ok(match (self.index, c) {
                    (1, Coord::X) => -web.fx().clone().recip(),
                    (2, Coord::Y) => -web.fy().clone().recip(),
                    _ => Expr::zero(),
                })
            }
            Expr::WJet(k) => {
                if *k >= MAX_JET {
                    Err(Error::JetOrderOverflow)
                } else {
                    Ok(-Expr::WJet(k + 1))
                }
            }
            Expr::Fn(s) if self.web.is_none() && s.name == FnName::F && s.dx == 0 && s.dy == 0 => {
                Ok(Expr::int(-1))
            }
            Expr::Fn(_) => Err(Error::UnboundSymbol(format!("{leaf}"))),
            Expr::Frame(fs) if self.allow_frame => Ok(Expr::Frame(fs.derived(self.index))),
            Expr::Frame(_) => Err(Error::FrameSymbolPresent(format!("{leaf}"))),
            _ => Ok(Expr::zero()),
        }
    }
}

/// Replaces `f`, `g` and their partials by the web's closed forms.
pub(crate) fn close_over(e: &Expr, web: &WebSpec) -> Result<Expr> {
    let mut subs = alloc::vec![(Target::Function(FnName::F), web.f().clone())];
    if e.contains_fn(FnName::G) {
        let g = web.g().ok_or(Error::MissingSecondFunction)?;
        subs.push((Target::Function(FnName::G), g.clone()));
    }
    if !e.any(&|n| matches!(n, Expr::Fn(_))) {
        return Ok(e.clone());
    }
    Ok(substitute_all(e, &subs))
}

/// `∂ᵢ e` for a concrete expression. The w-jet obeys `∂ᵢ w⁽ᵏ⁾ = −w⁽ᵏ⁺¹⁾`.
pub fn frame_derive(e: &Expr, i: u8, web: &WebSpec) -> Result<Expr> {
    check_index(i)?;
    let e = close_over(e, web)?;
    let rule = FrameRule {
        index: i,
        web: Some(web),
        allow_frame: false,
    };
    Ok(normalize(&derive_with(&e, &rule)?))
}

/// Iterated frame derivative; `word` is applied outermost first, so
/// `[1, 2]` gives `∂₁∂₂ e`.
pub fn frame_derive_word(e: &Expr, word: &[u8], web: &WebSpec) -> Result<Expr> {
    let mut out = e.clone();
    for &i in word.iter().rev() {
        out = frame_derive(&out, i, web)?;
    }
    Ok(out)
}

/// `δ = ∂₁ − ∂₂`, which annihilates every function of `f`.
pub fn delta_op(e: &Expr, web: &WebSpec) -> Result<Expr> {
    let d1 = frame_derive(e, 1, web)?;
    let d2 = frame_derive(e, 2, web)?;
    Ok(normalize(&(d1 - d2)))
}

/// Connection coefficient `H = f_xy/(f_x f_y)`.
pub fn chern_h(web: &WebSpec) -> Expr {
    let fxy = coord_diff(web.fx(), Coord::Y).expect("closed form");
    normalize(&(fxy / (web.fx().clone() * web.fy().clone())))
}

/// `K = −(1/(f_x f_y)) (log|f_x/f_y|)_xy`, computed in coordinates.
pub fn curvature_coord(web: &WebSpec) -> Expr {
    let ratio = web.fx().clone() / web.fy().clone();
    // log|r| = log(r²)/2 keeps the formula valid where the ratio is negative.
    let log_abs = Expr::log(ratio.powi(2)) * Expr::frac(1, 2);
    let lx = coord_diff(&log_abs, Coord::X).expect("closed form");
    let lxy = coord_diff(&lx, Coord::Y).expect("closed form");
    normalize(&(-lxy / (web.fx().clone() * web.fy().clone())))
}

/// `K = ∂₁H − ∂₂H`.
pub fn curvature_frame(web: &WebSpec) -> Expr {
    delta_op(&chern_h(web), web).expect("H is a closed form")
}

/// `∂₁∂₂e − ∂₂∂₁e − H(∂₂e − ∂₁e)`.
pub fn commutator_residual(e: &Expr, web: &WebSpec) -> Result<Expr> {
    let d1 = frame_derive(e, 1, web)?;
    let d2 = frame_derive(e, 2, web)?;
    let d12 = frame_derive(&d2, 1, web)?;
    let d21 = frame_derive(&d1, 2, web)?;
    let h = chern_h(web);
    Ok(normalize(&(d12 - d21 - h * (d2 - d1))))
}

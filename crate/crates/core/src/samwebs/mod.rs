//! Samuelson 4-webs: the canonical coframe, the S-condition and the rank test.

use alloc::string::String;

use crate::error::Result;
use crate::expr::{coord_diff, normalize, Coord, Expr};
use crate::frame::{wedge, OneForm, Rect, WebSpec};

mod corpus;
mod rank;

pub use corpus::{corpus, CorpusEntry, CORPUS};
pub use rank::{
    collect_t, curvature_b_residual, integrability_residuals, rank_verdict, samuelson_b,
    Provisional, RankReport, RankVerdict, RatioCheck, Residual, SamuelsonData, TCoefficients,
};

/// The four normalized forms of a 4-web with `ω₁ + ω₂ + ω₃ = 0` and
/// `ω₁ + bω₂ + ω₄ = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct WebForms {
    pub omega: [OneForm; 4],
    pub b: Expr,
    /// `ω₄ = λ dg`.
    pub lambda: Expr,
}

pub fn canonical_forms(web: &WebSpec) -> Result<WebForms> {
    let b = web.b()?.clone();
    let (fx, fy) = (web.fx().clone(), web.fy().clone());
    let lambda = normalize(&(fx.clone() / web.gx()?.clone()));
    Ok(WebForms {
        omega: [
            OneForm::new(-fx.clone(), Expr::zero()),
            OneForm::new(Expr::zero(), -fy.clone()),
            OneForm::new(fx.clone(), fy.clone()),
            OneForm::new(fx, b.clone() * fy),
        ],
        b,
        lambda,
    })
}

/// Coefficient of `dx∧dy` in `ω₃∧ω₁ + ω₄∧ω₂`.
pub fn s_condition_residual(forms: &WebForms) -> Expr {
    let [w1, w2, w3, w4] = &forms.omega;
    normalize(&(wedge(w3, w1) + wedge(w4, w2)))
}

/// The web cut by the coordinate functions on the Lagrangian surface
/// `y₁ = S_x, y₂ = S_y`: `f = S_x`, `g = S_y`.
pub fn lagrangian_web(name: &str, s: &Expr, domain: Rect) -> Result<WebSpec> {
    let f = coord_diff(s, Coord::X)?;
    let g = coord_diff(s, Coord::Y)?;
    WebSpec::new(name, f, Some(g), domain)
}

/// Human-readable name of a web: `f` and `g` in the form `(f, g)`.
pub fn describe(web: &WebSpec) -> String {
    match web.g() {
        Some(g) => alloc::format!("({}, {})", web.f(), g),
        None => alloc::format!("{}", web.f()),
    }
}

#[cfg(test)]
mod tests;

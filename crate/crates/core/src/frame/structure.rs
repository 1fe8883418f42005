//! Structure equations of the coframe, with 1-forms written in coordinates.

use super::{chern_h, curvature_frame, WebSpec};
use crate::expr::{coord_diff, normalize, Coord, Expr};

/// `dx`-`dy` components of a 1-form `a dx + b dy`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneForm {
    pub dx: Expr,
    pub dy: Expr,
}

impl OneForm {
    pub fn new(dx: Expr, dy: Expr) -> Self {
        OneForm {
            dx: normalize(&dx),
            dy: normalize(&dy),
        }
    }

    pub fn scale(&self, k: &Expr) -> OneForm {
        OneForm::new(k.clone() * self.dx.clone(), k.clone() * self.dy.clone())
    }

    /// Value on the vector field `ξ∂x + η∂y`.
    pub fn pair(&self, xi: &Expr, eta: &Expr) -> Expr {
        normalize(&(self.dx.clone() * xi.clone() + self.dy.clone() * eta.clone()))
    }
}

/// Coefficient of `dx∧dy` in `α∧β`.
pub fn wedge(a: &OneForm, b: &OneForm) -> Expr {
    normalize(&(a.dx.clone() * b.dy.clone() - a.dy.clone() * b.dx.clone()))
}

/// Coefficient of `dx∧dy` in `dα`.
pub fn exterior_d(a: &OneForm) -> Expr {
    let by = coord_diff(&a.dx, Coord::Y).expect("closed form");
    let ax = coord_diff(&a.dy, Coord::X).expect("closed form");
    normalize(&(ax - by))
}

/// Residuals of the structure equations with `γ = Hω₃`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureResiduals {
    /// `dωᵢ − γ∧ωᵢ` for `i = 1, 2, 3`.
    pub d_omega: [Expr; 3],
    /// `dγ + K ω₁∧ω₂`, zero under the adopted orientation.
    pub d_gamma: Expr,
    /// `dγ − K ω₁∧ω₂`, the opposite orientation.
    pub d_gamma_flipped: Expr,
}

pub fn structure_residuals(web: &WebSpec) -> StructureResiduals {
    let (fx, fy) = (web.fx().clone(), web.fy().clone());
    let w1 = OneForm::new(-fx.clone(), Expr::zero());
    let w2 = OneForm::new(Expr::zero(), -fy.clone());
    let w3 = OneForm::new(fx, fy);
    let gamma = w3.scale(&chern_h(web));
    let k = curvature_frame(web);
    let d_omega = [&w1, &w2, &w3].map(|w| normalize(&(exterior_d(w) - wedge(&gamma, w))));
    let dg = exterior_d(&gamma);
    let w12 = wedge(&w1, &w2);
    StructureResiduals {
        d_omega,
        d_gamma: normalize(&(dg.clone() + k.clone() * w12.clone())),
        d_gamma_flipped: normalize(&(dg - k * w12)),
    }
}

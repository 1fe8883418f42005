use crate::error::{Error, Result};
use crate::expr::{coord_diff, sample_points, Bindings, Compiled, Coord, Expr};
use crate::frame::{close_over, frame_derive, WebSpec};

/// Which derivative [`fd_check`] validates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Derivative {
    Coord(Coord),
    /// Frame index 1 or 2.
    Frame(u8),
}

const STEP_RANGE: (f64, f64) = (1e-7, 1e-3);

/// Largest relative error `|sym − fd| / max(|sym|, 1)` between the symbolic
/// derivative and a central difference, over `points` seeded sample points.
pub fn fd_check(e: &Expr, derivative: Derivative, web: &WebSpec, points: usize, step: f64, seed: u64) -> Result<f64> {
    if !(STEP_RANGE.0..=STEP_RANGE.1).contains(&step) {
        return Err(Error::StepOutOfRange(step));
    }
    let e = close_over(e, web)?;
    let (symbolic, coord) = match derivative {
        Derivative::Coord(c) => (coord_diff(&e, c)?, c),
        Derivative::Frame(i) => (frame_derive(&e, i, web)?, if i == 1 { Coord::X } else { Coord::Y }),
    };
    // The frame fields are −(1/f_x)∂x and −(1/f_y)∂y.
    let factor = match derivative {
        Derivative::Coord(_) => Expr::one(),
        Derivative::Frame(1) => -web.fx().clone().recip(),
        Derivative::Frame(_) => -web.fy().clone().recip(),
    };
    let (e, symbolic, factor) = (Compiled::new(&e), Compiled::new(&symbolic), Compiled::new(&factor));
    let none = Bindings::new();
    let (se, ss) = (e.resolve(&none)?, symbolic.resolve(&none)?);
    let mut worst = 0.0f64;
    for (x, y) in sample_points(&web.domain().sample_domain(), seed, points) {
        let (dx, dy) = match coord {
            Coord::X => (step, 0.0),
            Coord::Y => (0.0, step),
        };
        let hi = e.eval(x + dx, y + dy, &se)?;
        let lo = e.eval(x - dx, y - dy, &se)?;
        let fd = factor.eval(x, y, &[])? * (hi - lo) / (2.0 * step);
        let exact = symbolic.eval(x, y, &ss)?;
        worst = worst.max((exact - fd).abs() / exact.abs().max(1.0));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;
    use crate::frame::{chern_h, Rect};

    fn web(f: &str) -> WebSpec {
        WebSpec::new("t", parse_expr(f).unwrap(), None, Rect::ints(1, 2, 1, 2).unwrap()).unwrap()
    }

    #[test]
    fn polynomial_coordinate_derivative() {
        let e = parse_expr("x^2*y").unwrap();
        let err = fd_check(&e, Derivative::Coord(Coord::X), &web("x+y"), 50, 1e-5, 0).unwrap();
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn frame_derivative_of_h() {
        let w = web("x*y");
        let err = fd_check(&chern_h(&w), Derivative::Frame(1), &w, 50, 1e-5, 0).unwrap();
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn step_must_be_moderate() {
        let e = parse_expr("x").unwrap();
        assert_eq!(
            fd_check(&e, Derivative::Coord(Coord::X), &web("x+y"), 5, 1.0, 0),
            Err(Error::StepOutOfRange(1.0))
        );
    }
}

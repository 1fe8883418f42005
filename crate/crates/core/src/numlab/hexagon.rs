use alloc::format;
use alloc::vec::Vec;

use super::trace::{trace_level_curve, Line, TRACE_TOL};
use super::{Executor, Sequential};
use crate::error::{Error, Result};
use crate::expr::Compiled;
use crate::frame::{curvature_coord, WebSpec};

/// The closing figure of the web formed by vertical lines, horizontal lines
/// and the level curves of `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct HexagonTrace {
    pub center: (f64, f64),
    pub epsilon: f64,
    /// `A₁ … A₇`; the figure closes when `A₇ = A₁`.
    pub vertices: Vec<(f64, f64)>,
    /// `x(A₇) − x(A₁)`.
    pub defect: f64,
    pub solver_tolerance: f64,
    pub multiple_roots_suspected: bool,
}

struct Tracer<'a> {
    f: Compiled,
    bounds: (f64, f64, f64, f64),
    eps: f64,
    multiple: bool,
    web: &'a WebSpec,
}

impl Tracer<'_> {
    fn value(&self, p: (f64, f64)) -> Result<f64> {
        self.f.eval(p.0, p.1, &[])
    }

    /// Moves along `line` from coordinate `start` to the level `level`,
    /// searching windows of growing width around `start`.
    fn reach(&mut self, level: f64, line: Line, start: f64) -> Result<(f64, f64)> {
        let (x0, x1, y0, y1) = self.bounds;
        let (lo, hi) = match line {
            Line::X(_) => (y0, y1),
            Line::Y(_) => (x0, x1),
        };
        let mut half = 2.0 * self.eps;
        loop {
            let bracket = ((start - half).max(lo), (start + half).min(hi));
            match trace_level_curve(&self.f, level, line, bracket, TRACE_TOL) {
                Ok(p) => {
                    self.multiple |= p.multiple_roots_suspected;
                    return Ok(p.point);
                }
                Err(Error::NoSignChange { what }) => {
                    if bracket == (lo, hi) {
                        return Err(Error::NoSignChange {
                            what: format!("{what} (leaf leaves the domain of {})", self.web.name()),
                        });
                    }
                }
                Err(other) => return Err(other),
            }
            half *= 2.0;
        }
    }
}

/// Builds `A₁ … A₇` around `center`: start on the horizontal through the
/// center, then alternate f-leaf, horizontal and vertical moves twice.
pub fn hexagon_defect(web: &WebSpec, center: (f64, f64), epsilon: f64) -> Result<HexagonTrace> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    let bounds = web.domain().bounds();
    let (x0, y0) = center;
    let margin = 2.0 * epsilon;
    if x0 - margin < bounds.0 || x0 + margin > bounds.1 || y0 - margin < bounds.2 || y0 + margin > bounds.3 {
        return Err(Error::MarginViolation(format!(
            "center ({x0}, {y0}) with margin {margin} is not inside {}",
            web.name()
        )));
    }
    let mut t = Tracer {
        f: Compiled::new(web.f()),
        bounds,
        eps: epsilon,
        multiple: false,
        web,
    };
    let c0 = t.value(center)?;
    let a1 = (x0 + epsilon, y0);
    let a2 = t.reach(t.value(a1)?, Line::X(x0), y0)?;
    let a3 = t.reach(c0, Line::Y(a2.1), x0)?;
    let a4 = (a3.0, y0);
    let a5 = t.reach(t.value(a4)?, Line::X(x0), y0)?;
    let a6 = t.reach(c0, Line::Y(a5.1), x0)?;
    let a7 = (a6.0, y0);
    Ok(HexagonTrace {
        center,
        epsilon,
        vertices: alloc::vec![a1, a2, a3, a4, a5, a6, a7],
        defect: a7.0 - a1.0,
        solver_tolerance: TRACE_TOL,
        multiple_roots_suspected: t.multiple,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingRow {
    pub epsilon: f64,
    pub defect: f64,
    /// `defect / ε³`.
    pub normalized: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HexagonScaling {
    pub center: (f64, f64),
    pub rows: Vec<ScalingRow>,
    /// Least-squares slope of `log|defect|` against `log ε`; `None` when a
    /// defect vanishes or fewer than two sizes were run.
    pub slope: Option<f64>,
    pub traces: Vec<HexagonTrace>,
}

pub fn hexagon_scaling(web: &WebSpec, center: (f64, f64), eps: &[f64]) -> Result<HexagonScaling> {
    hexagon_scaling_with(&Sequential, web, center, eps)
}

pub fn hexagon_scaling_with<E: Executor>(exec: &E, web: &WebSpec, center: (f64, f64), eps: &[f64]) -> Result<HexagonScaling> {
    let traces = exec
        .map(eps.to_vec(), |e| hexagon_defect(web, center, e))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<ScalingRow> = traces
        .iter()
        .map(|t| ScalingRow {
            epsilon: t.epsilon,
            defect: t.defect,
            normalized: t.defect / (t.epsilon * t.epsilon * t.epsilon),
        })
        .collect();
    Ok(HexagonScaling {
        center,
        slope: loglog_slope(&rows),
        rows,
        traces,
    })
}

fn loglog_slope(rows: &[ScalingRow]) -> Option<f64> {
    if rows.len() < 2 || rows.iter().any(|r| r.defect == 0.0) {
        return None;
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (libm::log(r.epsilon), libm::log(r.defect.abs())))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

/// Normalized defects at two centers next to the quantities that might
/// explain their ratio. No relation between them is asserted.
#[derive(Debug, Clone, PartialEq)]
pub struct CenterComparison {
    pub epsilon: f64,
    pub normalized: (f64, f64),
    /// `normalized.0 / normalized.1`.
    pub ratio: f64,
    pub curvature: (f64, f64),
    /// `(f_x, f_y)` at each center.
    pub frame_factors: ((f64, f64), (f64, f64)),
}

pub fn compare_centers(web: &WebSpec, p1: (f64, f64), p2: (f64, f64), epsilon: f64) -> Result<CenterComparison> {
    let k = curvature_coord(web);
    let n1 = hexagon_defect(web, p1, epsilon)?.defect / (epsilon * epsilon * epsilon);
    let n2 = hexagon_defect(web, p2, epsilon)?.defect / (epsilon * epsilon * epsilon);
    let at = |e: &crate::expr::Expr, p: (f64, f64)| web.eval(e, p);
    Ok(CenterComparison {
        epsilon,
        normalized: (n1, n2),
        ratio: n1 / n2,
        curvature: (at(&k, p1)?, at(&k, p2)?),
        frame_factors: ((at(web.fx(), p1)?, at(web.fy(), p1)?), (at(web.fx(), p2)?, at(web.fy(), p2)?)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_expr, q_frac};
    use crate::frame::Rect;

    fn web(f: &str, r: Rect) -> WebSpec {
        WebSpec::new(f, parse_expr(f).unwrap(), None, r).unwrap()
    }

    #[test]
    fn linear_web_closes_exactly() {
        let w = web("x+y", Rect::ints(-1, 1, -1, 1).unwrap());
        let t = hexagon_defect(&w, (0.0, 0.0), 0.1).unwrap();
        let want = [(0.1, 0.0), (0.0, 0.1), (-0.1, 0.1), (-0.1, 0.0), (0.0, -0.1), (0.1, -0.1), (0.1, 0.0)];
        for (v, w) in t.vertices.iter().zip(want) {
            assert!((v.0 - w.0).abs() < 1e-12 && (v.1 - w.1).abs() < 1e-12, "{v:?}");
        }
        assert!(t.defect.abs() < 1e-12);
    }

    #[test]
    fn hexagonal_product_web() {
        let w = web("x*y", Rect::ints(0, 2, 0, 2).unwrap());
        let t = hexagon_defect(&w, (1.0, 1.0), 0.05).unwrap();
        assert!(t.defect.abs() < 1e-9, "{}", t.defect);
    }

    #[test]
    fn vertices_share_leaves() {
        let w = web("x^2+x*y+y^2", Rect::new(q_frac(1, 2), q_frac(3, 2), q_frac(-1, 5), q_frac(3, 2)).unwrap());
        let t = hexagon_defect(&w, (1.0, 0.2), 0.1).unwrap();
        let f = |p: (f64, f64)| p.0 * p.0 + p.0 * p.1 + p.1 * p.1;
        let v = &t.vertices;
        assert!((f(v[1]) - f(v[0])).abs() < 1e-12);
        assert!((f(v[2]) - f((1.0, 0.2))).abs() < 1e-12);
        assert!((f(v[4]) - f(v[3])).abs() < 1e-12);
        assert!((f(v[5]) - f((1.0, 0.2))).abs() < 1e-12);
        assert_eq!(v[3].1, 0.2);
        assert_eq!(v[6].1, 0.2);
        assert!(t.defect.abs() > 1e-6);
    }

    #[test]
    fn defect_scales_cubically() {
        let w = web("x^2+x*y+y^2", Rect::new(q_frac(1, 2), q_frac(3, 2), q_frac(-1, 5), q_frac(3, 2)).unwrap());
        let s = hexagon_scaling(&w, (1.0, 0.2), &[0.1, 0.05, 0.025]).unwrap();
        for pair in s.rows.windows(2) {
            let r = 8.0 * pair[1].defect / pair[0].defect;
            assert!((r - 1.0).abs() < 0.15, "{r}");
        }
        assert!((s.slope.unwrap() - 3.0).abs() < 0.25);
    }

    #[test]
    fn margin_is_enforced() {
        let w = web("x+y", Rect::ints(0, 1, 0, 1).unwrap());
        assert!(matches!(hexagon_defect(&w, (0.1, 0.5), 0.1), Err(Error::MarginViolation(_))));
    }
}

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::expr::Compiled;

/// Default bound on `|h − level|` at a traced point.
pub const TRACE_TOL: f64 = 1e-12;
/// Default bound on the final bracket width.
pub const TRACE_WIDTH: f64 = 1e-13;
const SCAN: usize = 64;

/// A coordinate line along which a level curve is intersected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Line {
    /// `x = c`, searched in `y`.
    X(f64),
    /// `y = c`, searched in `x`.
    Y(f64),
}

impl Line {
    fn point(&self, t: f64) -> (f64, f64) {
        match *self {
            Line::X(c) => (c, t),
            Line::Y(c) => (t, c),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub point: (f64, f64),
    /// More than one sign change was seen on the scan; the first root along
    /// the bracket is returned.
    pub multiple_roots_suspected: bool,
}

/// Intersects `{h = level}` with `line` inside `bracket` by scanning for a
/// sign change and bisecting it.
pub fn trace_level_curve(h: &Compiled, level: f64, line: Line, bracket: (f64, f64), tol: f64) -> Result<TracePoint> {
    let (a, b) = bracket;
    let mut stack = Vec::with_capacity(16);
    let mut g = |t: f64| -> Result<f64> {
        let (x, y) = line.point(t);
        Ok(h.eval_with(x, y, &[], &mut stack)? - level)
    };
    let ts: Vec<f64> = (0..=SCAN).map(|k| a + (b - a) * k as f64 / SCAN as f64).collect();
    let mut vals = Vec::with_capacity(ts.len());
    for &t in &ts {
        vals.push(g(t)?);
    }
    let crossings: Vec<usize> = (0..SCAN)
        .filter(|&k| vals[k] == 0.0 || vals[k].signum() != vals[k + 1].signum())
        .collect();
    let Some(&k) = crossings.first() else {
        if vals[SCAN] == 0.0 {
            return Ok(TracePoint { point: line.point(b), multiple_roots_suspected: false });
        }
        return Err(Error::NoSignChange {
            what: format!("h - {level} along {line:?} on [{a}, {b}]"),
        });
    };
    let multiple = crossings.len() > 1 && !(crossings.len() == 2 && vals[crossings[1]] == 0.0);
    let (mut lo, mut hi) = (ts[k], ts[k + 1]);
    let (mut glo, mut ghi) = (vals[k], vals[k + 1]);
    if glo == 0.0 {
        return Ok(TracePoint { point: line.point(lo), multiple_roots_suspected: multiple });
    }
    loop {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid)?;
        let best = if glo.abs() <= ghi.abs() { (lo, glo) } else { (hi, ghi) };
        if (hi - lo < TRACE_WIDTH && best.1.abs() < tol) || mid <= lo || mid >= hi || gm == 0.0 {
            let t = if gm == 0.0 || gm.abs() <= best.1.abs() { mid } else { best.0 };
            return Ok(TracePoint { point: line.point(t), multiple_roots_suspected: multiple });
        }
        if gm.signum() == glo.signum() {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
            ghi = gm;
        }
    }
}

/// Points of `{h = level}` on `n + 1` horizontal lines across `bounds`,
/// searched in `x`. Lines that miss the level set are skipped.
pub fn level_polyline(h: &Compiled, level: f64, bounds: (f64, f64, f64, f64), n: usize) -> Result<Vec<(f64, f64)>> {
    let (x0, x1, y0, y1) = bounds;
    let mut out = Vec::new();
    for k in 0..=n {
        let y = y0 + (y1 - y0) * k as f64 / n as f64;
        match trace_level_curve(h, level, Line::Y(y), (x0, x1), TRACE_TOL) {
            Ok(p) => out.push(p.point),
            Err(Error::NoSignChange { .. }) | Err(Error::DomainViolation(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn c(s: &str) -> Compiled {
        Compiled::new(&parse_expr(s).unwrap())
    }

    #[test]
    fn linear_level_curve() {
        let p = trace_level_curve(&c("x+y"), 2.0, Line::X(0.5), (0.0, 3.0), TRACE_TOL).unwrap();
        assert!((p.point.1 - 1.5).abs() < 1e-13 && p.point.0 == 0.5);
        assert!(!p.multiple_roots_suspected);
    }

    #[test]
    fn hyperbola() {
        let p = trace_level_curve(&c("x*y"), 6.0, Line::X(2.0), (1.0, 5.0), TRACE_TOL).unwrap();
        assert!((p.point.1 - 3.0).abs() < 1e-13);
    }

    #[test]
    fn no_crossing() {
        assert!(matches!(
            trace_level_curve(&c("x+y"), 10.0, Line::X(0.0), (0.0, 1.0), TRACE_TOL),
            Err(Error::NoSignChange { .. })
        ));
    }

    #[test]
    fn polyline_follows_the_level_set() {
        let pts = level_polyline(&c("x*y"), 2.0, (1.0, 2.0, 0.5, 5.0), 40).unwrap();
        assert!(pts.len() > 5);
        for (x, y) in pts {
            assert!((x * y - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn two_roots_are_flagged() {
        let p = trace_level_curve(&c("y^2"), 1.0, Line::X(0.0), (-2.0, 2.1), TRACE_TOL).unwrap();
        assert!(p.multiple_roots_suspected);
        assert!((p.point.1 + 1.0).abs() < 1e-12);
    }
}

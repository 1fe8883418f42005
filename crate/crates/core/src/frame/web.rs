use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::expr::{
    coord_diff, is_zero, normalize, q_to_f64, Bindings, Compiled, Coord, Expr, SampleDomain,
    Symbol, ZeroVerdict, Q,
};

/// Threshold below which a nondegeneracy quantity counts as vanishing.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// Side of the deterministic validation grid (`GRID²` points).
const GRID: usize = 10;

/// Closed rectangle `[x0, x1] × [y0, y1]` with rational corners.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rect {
    pub x0: Q,
    pub x1: Q,
    pub y0: Q,
    pub y1: Q,
}

impl Rect {
    pub fn new(x0: Q, x1: Q, y0: Q, y1: Q) -> Result<Self> {
        if x0 >= x1 || y0 >= y1 {
            return Err(Error::InvalidArgument(format!(
                "empty domain [{x0}, {x1}] x [{y0}, {y1}]"
            )));
        }
        Ok(Rect { x0, x1, y0, y1 })
    }

    /// Convenience constructor from integers.
    pub fn ints(x0: i64, x1: i64, y0: i64, y1: i64) -> Result<Self> {
        let q = |v: i64| Q::from_integer(v.into());
        Rect::new(q(x0), q(x1), q(y0), q(y1))
    }

    /// Corners as floats: `(x0, x1, y0, y1)`.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        (q_to_f64(&self.x0), q_to_f64(&self.x1), q_to_f64(&self.y0), q_to_f64(&self.y1))
    }

    pub fn sample_domain(&self) -> SampleDomain {
        let (x0, x1, y0, y1) = self.bounds();
        SampleDomain { x: (x0, x1), y: (y0, y1) }
    }

    pub fn contains(&self, p: (f64, f64)) -> bool {
        let (x0, x1, y0, y1) = self.bounds();
        p.0 >= x0 && p.0 <= x1 && p.1 >= y0 && p.1 <= y1
    }

    /// Midpoints of a regular `n × n` subdivision, row by row.
    pub fn grid(&self, n: usize) -> Vec<(f64, f64)> {
        let (x0, x1, y0, y1) = self.bounds();
        let mut out = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                let x = x0 + (x1 - x0) * (i as f64 + 0.5) / n as f64;
                let y = y0 + (y1 - y0) * (j as f64 + 0.5) / n as f64;
                out.push((x, y));
            }
        }
        out
    }
}

/// A planar web: the coordinate foliations plus the level curves of `f`
/// and optionally of `g`.
#[derive(Debug, Clone)]
pub struct WebSpec {
    name: String,
    f: Expr,
    g: Option<Expr>,
    domain: Rect,
    fx: Expr,
    fy: Expr,
    gx: Option<Expr>,
    gy: Option<Expr>,
    b: Option<Expr>,
}

impl WebSpec {
    /// Builds and validates a web. `f` and `g` must be closed forms in `x`, `y`.
    pub fn new(name: &str, f: Expr, g: Option<Expr>, domain: Rect) -> Result<Self> {
        let f = closed_form(&f, "f")?;
        let g = g.map(|g| closed_form(&g, "g")).transpose()?;
        let fx = coord_diff(&f, Coord::X)?;
        let fy = coord_diff(&f, Coord::Y)?;
        let (gx, gy, b) = match &g {
            Some(g) => {
                let gx = coord_diff(g, Coord::X)?;
                let gy = coord_diff(g, Coord::Y)?;
                let b = normalize(&(fx.clone() * gy.clone() / (fy.clone() * gx.clone())));
                (Some(gx), Some(gy), Some(b))
            }
            None => (None, None, None),
        };
        let web = WebSpec {
            name: name.to_string(),
            f,
            g,
            domain,
            fx,
            fy,
            gx,
            gy,
            b,
        };
        web.validate()?;
        Ok(web)
    }

    fn validate(&self) -> Result<()> {
        let mut checks: Vec<(&str, Expr)> = alloc::vec![("f_x", self.fx.clone()), ("f_y", self.fy.clone())];
        if let (Some(gx), Some(gy), Some(b)) = (&self.gx, &self.gy, &self.b) {
            checks.push(("g_x", gx.clone()));
            checks.push(("g_y", gy.clone()));
            checks.push(("b", b.clone()));
            checks.push(("b - 1", normalize(&(b.clone() - Expr::one()))));
        }
        let points = self.domain.grid(GRID);
        for (what, e) in checks {
            if let Some(c) = e.as_const() {
                let v = q_to_f64(c);
                if v.abs() <= DEGENERACY_TOL {
                    return Err(Error::NondegeneracyViolation {
                        what: format!("{what} vanishes identically"),
                        point: None,
                    });
                }
                continue;
            }
            let compiled = Compiled::new(&e);
            let mut sign = 0.0f64;
            for &(x, y) in &points {
                let v = compiled.eval(x, y, &[]).map_err(|err| Error::NondegeneracyViolation {
                    what: format!("{what} cannot be evaluated ({err})"),
                    point: Some((x, y)),
                })?;
                if v.abs() <= DEGENERACY_TOL {
                    return Err(Error::NondegeneracyViolation {
                        what: format!("{what} = {v:e}"),
                        point: Some((x, y)),
                    });
                }
                if sign != 0.0 && sign != v.signum() {
                    return Err(Error::NondegeneracyViolation {
                        what: format!("{what} changes sign"),
                        point: Some((x, y)),
                    });
                }
                sign = v.signum();
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn f(&self) -> &Expr {
        &self.f
    }
    pub fn g(&self) -> Option<&Expr> {
        self.g.as_ref()
    }
    pub fn domain(&self) -> &Rect {
        &self.domain
    }
    pub fn fx(&self) -> &Expr {
        &self.fx
    }
    pub fn fy(&self) -> &Expr {
        &self.fy
    }
    pub fn gx(&self) -> Result<&Expr> {
        self.gx.as_ref().ok_or(Error::MissingSecondFunction)
    }
    pub fn gy(&self) -> Result<&Expr> {
        self.gy.as_ref().ok_or(Error::MissingSecondFunction)
    }

    /// The basic 4-web invariant `b = f_x g_y / (f_y g_x)`.
    pub fn b(&self) -> Result<&Expr> {
        self.b.as_ref().ok_or(Error::MissingSecondFunction)
    }

    /// Same web with its domain replaced, revalidated.
    pub fn with_domain(&self, domain: Rect) -> Result<Self> {
        WebSpec::new(&self.name, self.f.clone(), self.g.clone(), domain)
    }

    /// Zero test on this web's domain.
    pub fn is_zero(&self, e: &Expr, seed: u64) -> Result<ZeroVerdict> {
        is_zero(e, Some(&self.domain.sample_domain()), seed)
    }

    /// Evaluates a closed form at a point.
    pub fn eval(&self, e: &Expr, p: (f64, f64)) -> Result<f64> {
        crate::expr::eval_point(e, p, &Bindings::new())
    }
}

fn closed_form(e: &Expr, what: &str) -> Result<Expr> {
    if let Some(s) = e.symbols().into_iter().find(|s| !matches!(s, Symbol::Coord(_))) {
        return Err(Error::InvalidArgument(format!(
            "{what} must be a closed form in x and y, found {s}"
        )));
    }
    Ok(normalize(e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn web(f: &str, g: Option<&str>, r: Rect) -> Result<WebSpec> {
        WebSpec::new("t", parse_expr(f).unwrap(), g.map(|g| parse_expr(g).unwrap()), r)
    }

    #[test]
    fn accepts_transverse_webs() {
        let w = web("x+y", Some("x*y"), Rect::ints(1, 2, 3, 4).unwrap()).unwrap();
        assert_eq!(w.b().unwrap(), &parse_expr("x/y").unwrap());
    }

    #[test]
    fn rejects_b_equal_one_on_the_diagonal() {
        let err = web("x+y", Some("x*y"), Rect::ints(1, 2, 1, 2).unwrap()).unwrap_err();
        assert!(matches!(err, Error::NondegeneracyViolation { .. }), "{err}");
    }

    #[test]
    fn rejects_functionally_dependent_g() {
        let err = web("x+y", Some("2*(x+y)"), Rect::ints(1, 2, 3, 4).unwrap()).unwrap_err();
        assert!(matches!(err, Error::NondegeneracyViolation { point: None, .. }));
        let err = web("x+y", Some("exp(x+y)"), Rect::ints(1, 2, 3, 4).unwrap()).unwrap_err();
        assert!(matches!(err, Error::NondegeneracyViolation { .. }));
    }

    #[test]
    fn rejects_critical_points_of_f() {
        let err = web("x^2+y^2", None, Rect::ints(-1, 1, 1, 2).unwrap()).unwrap_err();
        assert!(matches!(err, Error::NondegeneracyViolation { .. }));
        assert!(web("y", None, Rect::ints(1, 2, 1, 2).unwrap()).is_err());
    }

    #[test]
    fn rejects_symbols_in_closed_forms() {
        assert!(matches!(
            web("x+w", None, Rect::ints(1, 2, 1, 2).unwrap()),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn empty_rectangle() {
        assert!(Rect::ints(1, 1, 0, 1).is_err());
    }
}

use alloc::format;
use alloc::vec::Vec;

use super::{Executor, Sequential};
use crate::error::{Error, Result};
use crate::expr::{coord_diff, normalize, Compiled, Coord, Expr};
use crate::frame::Rect;

const START_N: usize = 64;
const MAX_N: usize = 4096;
const BLOCK: usize = 32;
const JACOBIAN_TOL: f64 = 1e-9;

/// `{u ∈ [u.0, u.1], v ∈ [v.0, v.1]}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub u: (f64, f64),
    pub v: (f64, f64),
}

struct Region {
    u: Compiled,
    v: Compiled,
    cell: Cell,
}

impl Region {
    fn uv(&self, p: (f64, f64), stack: &mut Vec<f64>) -> Result<(f64, f64)> {
        Ok((self.u.eval_with(p.0, p.1, &[], stack)?, self.v.eval_with(p.0, p.1, &[], stack)?))
    }

    /// The four constraints `u − u₀, u₁ − u, v − v₀, v₁ − v`, all `≥ 0` inside.
    fn slack(&self, (u, v): (f64, f64)) -> [f64; 4] {
        let c = &self.cell;
        [u - c.u.0, c.u.1 - u, v - c.v.0, c.v.1 - v]
    }

    /// Area of the part of a grid square inside the region. The square is
    /// clipped against each constraint in turn, locating crossings by linear
    /// interpolation along the polygon edges.
    fn clipped(&self, square: [(f64, f64); 4], stack: &mut Vec<f64>) -> Result<f64> {
        let mut poly: Vec<(f64, f64)> = square.to_vec();
        for k in 0..4 {
            if poly.len() < 3 {
                return Ok(0.0);
            }
            let vals = poly
                .iter()
                .map(|&p| Ok(self.slack(self.uv(p, stack)?)[k]))
                .collect::<Result<Vec<f64>>>()?;
            let mut next = Vec::with_capacity(poly.len() + 2);
            for i in 0..poly.len() {
                let j = (i + 1) % poly.len();
                let (p, q) = (poly[i], poly[j]);
                let (cp, cq) = (vals[i], vals[j]);
                if cp >= 0.0 {
                    next.push(p);
                }
                if (cp >= 0.0) != (cq >= 0.0) {
                    let t = cp / (cp - cq);
                    next.push((p.0 + t * (q.0 - p.0), p.1 + t * (q.1 - p.1)));
                }
            }
            poly = next;
        }
        Ok(shoelace(&poly))
    }
}

fn shoelace(poly: &[(f64, f64)]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        s += a.0 * b.1 - b.0 * a.1;
    }
    0.5 * s.abs()
}

fn grid_area<E: Executor>(exec: &E, region: &Region, bounds: (f64, f64, f64, f64), n: usize) -> Result<f64> {
    let (x0, x1, y0, y1) = bounds;
    let (hx, hy) = ((x1 - x0) / n as f64, (y1 - y0) / n as f64);
    let xs: Vec<f64> = (0..=n).map(|i| x0 + (x1 - x0) * i as f64 / n as f64).collect();
    let y_at = |j: usize| y0 + (y1 - y0) * j as f64 / n as f64;
    let blocks: Vec<usize> = (0..n).step_by(BLOCK).collect();
    let partial = exec.map(blocks, |j0| -> Result<f64> {
        let j1 = (j0 + BLOCK).min(n);
        let mut stack = Vec::with_capacity(16);
        let row = |j: usize, stack: &mut Vec<f64>| -> Result<Vec<[f64; 4]>> {
            let y = y_at(j);
            xs.iter().map(|&x| Ok(region.slack(region.uv((x, y), stack)?))).collect()
        };
        let mut below = row(j0, &mut stack)?;
        let mut sum = 0.0;
        for j in j0..j1 {
            let above = row(j + 1, &mut stack)?;
            for i in 0..n {
                let corners = [below[i], below[i + 1], above[i + 1], above[i]];
                let inside = corners.iter().all(|c| c.iter().all(|&s| s >= 0.0));
                if inside {
                    sum += hx * hy;
                    continue;
                }
                let excluded = (0..4).any(|k| corners.iter().all(|c| c[k] < 0.0));
                if excluded {
                    continue;
                }
                let (ya, yb) = (y_at(j), y_at(j + 1));
                let square = [(xs[i], ya), (xs[i + 1], ya), (xs[i + 1], yb), (xs[i], yb)];
                sum += region.clipped(square, &mut stack)?;
            }
            below = above;
        }
        Ok(sum)
    });
    let mut total = 0.0;
    for p in partial {
        total += p?;
    }
    Ok(total)
}

fn check_jacobian(u: &Expr, v: &Expr, domain: &Rect) -> Result<()> {
    let d = |e: &Expr, c| coord_diff(e, c);
    let j = normalize(&(d(u, Coord::X)? * d(v, Coord::Y)? - d(u, Coord::Y)? * d(v, Coord::X)?));
    let jc = Compiled::new(&j);
    for p in domain.grid(10) {
        let val = jc.eval(p.0, p.1, &[])?;
        if val.abs() <= JACOBIAN_TOL {
            return Err(Error::NondegeneracyViolation {
                what: format!("u and v are dependent (Jacobian {val:e})"),
                point: Some(p),
            });
        }
    }
    Ok(())
}

/// Rejects regions that reach the domain boundary: such a region is cut off
/// by the domain and its area would be meaningless.
fn check_margin(region: &Region, bounds: (f64, f64, f64, f64)) -> Result<()> {
    let (x0, x1, y0, y1) = bounds;
    let mut stack = Vec::new();
    let n = START_N;
    for k in 0..=n {
        let t = k as f64 / n as f64;
        let (x, y) = (x0 + (x1 - x0) * t, y0 + (y1 - y0) * t);
        for p in [(x, y0), (x, y1), (x0, y), (x1, y)] {
            if region.slack(region.uv(p, &mut stack)?).iter().all(|&s| s > 0.0) {
                return Err(Error::MarginViolation(format!(
                    "the cell reaches the domain boundary at ({}, {})",
                    p.0, p.1
                )));
            }
        }
    }
    Ok(())
}

/// Area of `{u ∈ cell.u, v ∈ cell.v}` inside `domain`, refining an `n × n`
/// grid from 64 by doubling until successive estimates agree to `tol`
/// (relative). Returns `(area, last difference)`.
pub fn quad_area(u: &Expr, v: &Expr, cell: Cell, domain: &Rect, tol: f64) -> Result<(f64, f64)> {
    quad_area_with(&Sequential, u, v, cell, domain, tol)
}

pub fn quad_area_with<E: Executor>(exec: &E, u: &Expr, v: &Expr, cell: Cell, domain: &Rect, tol: f64) -> Result<(f64, f64)> {
    if !(cell.u.0 < cell.u.1 && cell.v.0 < cell.v.1) {
        return Err(Error::InvalidArgument(format!("degenerate cell {cell:?}")));
    }
    check_jacobian(u, v, domain)?;
    let region = Region {
        u: Compiled::new(u),
        v: Compiled::new(v),
        cell,
    };
    let bounds = domain.bounds();
    check_margin(&region, bounds)?;
    let mut n = START_N;
    let mut prev = grid_area(exec, &region, bounds, n)?;
    loop {
        n *= 2;
        if n > MAX_N {
            return Err(Error::NoConvergence { n: n / 2, last_diff: f64::NAN });
        }
        let area = grid_area(exec, &region, bounds, n)?;
        let diff = (area - prev).abs();
        if diff <= tol * area.abs() {
            if area < tol {
                return Err(Error::EmptyCell { area });
            }
            return Ok((area, diff));
        }
        if area < tol && prev < tol {
            return Err(Error::EmptyCell { area });
        }
        if n == MAX_N {
            return Err(Error::NoConvergence { n, last_diff: diff });
        }
        prev = area;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AreaVerdict {
    Pass,
    Fail,
}

/// Areas `A_ij` of the cells `u ∈ [u_i, u_{i+1}], v ∈ [v_j, v_{j+1}]`; the
/// condition is `A₀₀A₁₁ = A₀₁A₁₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct AreaReport {
    pub u_levels: [f64; 3],
    pub v_levels: [f64; 3],
    pub areas: [[f64; 2]; 2],
    pub errors: [[f64; 2]; 2],
    /// `|A₀₀A₁₁ − A₀₁A₁₀| / (A₀₀A₁₁ + A₀₁A₁₀)`.
    pub residual: f64,
    /// `Σ err_ij / A_ij`, a bound on the relative error of the residual.
    pub combined_error: f64,
    pub threshold: f64,
    pub verdict: AreaVerdict,
}

pub fn area_condition(u: &Expr, v: &Expr, u_levels: [f64; 3], v_levels: [f64; 3], domain: &Rect, tol: f64) -> Result<AreaReport> {
    area_condition_with(&Sequential, u, v, u_levels, v_levels, domain, tol)
}

pub fn area_condition_with<E: Executor>(
    exec: &E,
    u: &Expr,
    v: &Expr,
    u_levels: [f64; 3],
    v_levels: [f64; 3],
    domain: &Rect,
    tol: f64,
) -> Result<AreaReport> {
    for levels in [&u_levels, &v_levels] {
        if !(levels[0] < levels[1] && levels[1] < levels[2]) {
            return Err(Error::InvalidArgument(format!("levels {levels:?} are not ascending")));
        }
    }
    let mut areas = [[0.0; 2]; 2];
    let mut errors = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let cell = Cell {
                u: (u_levels[i], u_levels[i + 1]),
                v: (v_levels[j], v_levels[j + 1]),
            };
            let (a, e) = quad_area_with(exec, u, v, cell, domain, tol)?;
            areas[i][j] = a;
            errors[i][j] = e;
        }
    }
    let ad = areas[0][0] * areas[1][1];
    let bc = areas[0][1] * areas[1][0];
    let residual = (ad - bc).abs() / (ad + bc);
    let combined_error: f64 = (0..4).map(|k| errors[k / 2][k % 2] / areas[k / 2][k % 2]).sum();
    let threshold = (10.0 * combined_error).max(1e-5);
    Ok(AreaReport {
        u_levels,
        v_levels,
        areas,
        errors,
        residual,
        combined_error,
        threshold,
        verdict: if residual < threshold { AreaVerdict::Pass } else { AreaVerdict::Fail },
    })
}

use alloc::vec::Vec;

use num_traits::One;

use super::{normalize, Coord, ElemKind, Expr, Q};
use crate::error::{Error, Result};

/// Derivative of the leaves of an expression tree. The chain rule in
/// [`derive_with`] handles everything above the leaves.
pub trait LeafRule {
    /// `leaf` is one of `Coord`, `Fn`, `WJet` or `Frame`.
    fn leaf(&self, leaf: &Expr) -> Result<Expr>;
}

/// Differentiates `e` by the chain rule, leaving the result unnormalized.
pub fn derive_with(e: &Expr, rule: &dyn LeafRule) -> Result<Expr> {
    Ok(match e {
        Expr::Const(_) => Expr::zero(),
        Expr::Coord(_) | Expr::Fn(_) | Expr::WJet(_) | Expr::Frame(_) => rule.leaf(e)?,
        Expr::Sum(items) => {
            let mut out = Vec::with_capacity(items.len());
            for t in items {
                let d = derive_with(t, rule)?;
                if !d.is_const_zero() {
                    out.push(d);
                }
            }
            Expr::sum(out)
        }
        Expr::Prod(items) => {
            let mut out = Vec::new();
            for (i, t) in items.iter().enumerate() {
                let d = derive_with(t, rule)?;
                if d.is_const_zero() {
                    continue;
                }
                let mut factors: Vec<Expr> = items.to_vec();
                factors[i] = d;
                out.push(Expr::Prod(factors));
            }
            Expr::sum(out)
        }
        Expr::Pow(b, q) => {
            let db = derive_with(b, rule)?;
            if db.is_const_zero() {
                return Ok(Expr::zero());
            }
            let lowered = if q.is_one() {
                Expr::one()
            } else {
                Expr::Pow(b.clone(), q - Q::one())
            };
            Expr::Prod(alloc::vec![Expr::Const(q.clone()), lowered, db])
        }
        Expr::Elem(kind, arg) => {
            let da = derive_with(arg, rule)?;
            if da.is_const_zero() {
                return Ok(Expr::zero());
            }
            let a = (**arg).clone();
            let outer = match kind {
                ElemKind::Log => a.recip(),
                ElemKind::Exp => e.clone(),
                ElemKind::Sqrt => Expr::frac(1, 2) * e.clone().recip(),
                ElemKind::Sin => Expr::cos(a),
                ElemKind::Cos => -Expr::sin(a),
            };
            outer * da
        }
    })
}

struct CoordRule(Coord);

impl LeafRule for CoordRule {
    fn leaf(&self, leaf: &Expr) -> Result<Expr> {
        Ok(match leaf {
            Expr::Coord(c) if *c == self.0 => Expr::one(),
            Expr::Fn(s) => Expr::Fn(s.derived(self.0)),
            Expr::Frame(fs) => return Err(Error::FrameSymbolPresent(alloc::format!("{}", Expr::Frame(fs.clone())))),
            _ => Expr::zero(),
        })
    }
}

/// Partial derivative in a plane coordinate; w-jets are constants here.
pub fn coord_diff(e: &Expr, var: Coord) -> Result<Expr> {
    Ok(normalize(&derive_with(e, &CoordRule(var))?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_expr, FnName};

    fn d(s: &str, v: Coord) -> Expr {
        coord_diff(&parse_expr(s).unwrap(), v).unwrap()
    }

    #[test]
    fn product_rule() {
        assert_eq!(d("x*y", Coord::X), Expr::y());
    }

    #[test]
    fn function_symbols_gain_orders() {
        assert_eq!(d("f", Coord::X), Expr::func_derivative(FnName::F, 1, 0));
        assert_eq!(
            coord_diff(&d("f_x", Coord::Y), Coord::X).unwrap(),
            Expr::func_derivative(FnName::F, 2, 1)
        );
    }

    #[test]
    fn jets_are_coordinate_constants() {
        assert_eq!(d("x*w'' + w", Coord::X), Expr::WJet(2));
    }

    #[test]
    fn frame_symbols_are_rejected() {
        assert!(matches!(
            coord_diff(&Expr::frame("s", &[1]), Coord::X),
            Err(Error::FrameSymbolPresent(_))
        ));
    }

    #[test]
    fn elementary_chain_rules() {
        assert_eq!(d("exp(x*y)", Coord::X), parse_expr("y*exp(x*y)").unwrap());
        assert_eq!(d("log(x^2)", Coord::X), parse_expr("2/x").unwrap());
        assert_eq!(d("sqrt(x)", Coord::X), parse_expr("1/(2*sqrt(x))").unwrap());
        assert_eq!(d("sin(2*x)", Coord::X), parse_expr("2*cos(2*x)").unwrap());
        assert_eq!(d("cos(y)", Coord::Y), parse_expr("-sin(y)").unwrap());
    }

    #[test]
    fn mixed_partial_of_log_ratio() {
        // ∂y∂x log((2x+y)/(x+2y)) = -2/(2x+y)^2 + 2/(x+2y)^2, which is 3/2 at (1, 0).
        let e = d("log((2*x+y)/(x+2*y))", Coord::X);
        let exy = coord_diff(&e, Coord::Y).unwrap();
        let v = crate::expr::eval_point(&exy, (1.0, 0.0), &Default::default()).unwrap();
        assert!((v - 1.5).abs() < 1e-14, "{v}");
        assert_eq!(exy, parse_expr("-2/(2*x+y)^2 + 2/(x+2*y)^2").unwrap());
    }
}

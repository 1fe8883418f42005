use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::{coord_diff, normalize, Coord, Expr, FnName, Symbol};

/// What [`substitute`] replaces.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Target {
    /// Exactly this leaf.
    Symbol(Symbol),
    /// A function together with all of its partial derivatives: `f_xy` is
    /// replaced by the corresponding partial of the replacement.
    Function(FnName),
}

/// Replaces every occurrence of `target` and normalizes.
pub fn substitute(e: &Expr, target: &Target, replacement: &Expr) -> Expr {
    substitute_all(e, &[(target.clone(), replacement.clone())])
}

/// Simultaneous substitution of several targets.
///
/// A `Function` replacement containing frame symbols cannot be
/// differentiated by a coordinate; its derivative symbols are then left in
/// place.
pub fn substitute_all(e: &Expr, subs: &[(Target, Expr)]) -> Expr {
    let mut cache = BTreeMap::new();
    normalize(&replace(e, subs, &mut cache))
}

pub(crate) fn replace(
    e: &Expr,
    subs: &[(Target, Expr)],
    cache: &mut BTreeMap<(FnName, u32, u32), Option<Expr>>,
) -> Expr {
    match e {
        Expr::Const(_) => e.clone(),
        Expr::Sum(items) => Expr::Sum(items.iter().map(|t| replace(t, subs, cache)).collect()),
        Expr::Prod(items) => Expr::Prod(items.iter().map(|t| replace(t, subs, cache)).collect()),
        Expr::Pow(b, q) => Expr::Pow(alloc::boxed::Box::new(replace(b, subs, cache)), q.clone()),
        Expr::Elem(k, a) => Expr::elem(*k, replace(a, subs, cache)),
        Expr::Coord(_) | Expr::WJet(_) | Expr::Frame(_) | Expr::Fn(_) => {
            let sym = match e {
                Expr::Coord(c) => Symbol::Coord(*c),
                Expr::WJet(k) => Symbol::WJet(*k),
                Expr::Frame(fs) => Symbol::Frame(fs.clone()),
                Expr::Fn(s) => Symbol::Fn(*s),
                _ => unreachable!(),
            };
            for (t, r) in subs {
                match t {
                    Target::Symbol(s) if *s == sym => return r.clone(),
                    Target::Function(name) => {
                        if let Symbol::Fn(s) = &sym {
                            if s.name == *name {
                                let key = (s.name, s.dx, s.dy);
                                let d = cache
                                    .entry(key)
                                    .or_insert_with(|| partial(r, s.dx, s.dy))
                                    .clone();
                                if let Some(d) = d {
                                    return d;
                                }
                            }
                        }
                    }
                    _ => {}
                }
            }
            e.clone()
        }
    }
}

fn partial(e: &Expr, dx: u32, dy: u32) -> Option<Expr> {
    let mut out = e.clone();
    let steps: Vec<Coord> = core::iter::repeat_n(Coord::X, dx as usize)
        .chain(core::iter::repeat_n(Coord::Y, dy as usize))
        .collect();
    for c in steps {
        out = coord_diff(&out, c).ok()?;
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn p(s: &str) -> Expr {
        parse_expr(s).unwrap()
    }

    #[test]
    fn function_derivatives_follow_the_replacement() {
        let e = substitute(&p("f_x*f_y"), &Target::Function(FnName::F), &p("x*y"));
        assert_eq!(e, p("y*x"));
    }

    #[test]
    fn symbol_target_is_exact() {
        let e = p("3*w''' + 2*w''");
        let r = substitute(&e, &Target::Symbol(Symbol::WJet(3)), &Expr::zero());
        assert_eq!(r, p("2*w''"));
    }

    #[test]
    fn coordinates_can_be_replaced() {
        let e = substitute(&p("x^2 + y"), &Target::Symbol(Symbol::Coord(Coord::X)), &p("y+1"));
        assert_eq!(e, p("y^2 + 3*y + 1"));
    }
}

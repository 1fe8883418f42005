//! Zero testing: structural first, then seeded sampling.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use super::exact::{dyadic, eval_mod, eval_q, is_rational, q_mod};
use super::{normalize_tracked, q_to_f64, Bindings, Compiled, Coord, Expr, Symbol, Q};
use crate::error::{Error, Result};

/// Number of sample points used by [`is_zero`].
pub const ZERO_SAMPLES: usize = 100;
/// Relative tolerance of the numeric zero test.
pub const ZERO_TOLERANCE: f64 = 1e-9;
/// Sample points closer than this to a recorded singular locus are skipped.
const SINGULAR_GUARD: f64 = 1e-9;
const MAX_DRAWS: usize = 100 * ZERO_SAMPLES;

/// Rectangle from which sample points are drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleDomain {
    pub x: (f64, f64),
    pub y: (f64, f64),
}

impl Default for SampleDomain {
    fn default() -> Self {
        SampleDomain {
            x: (0.5, 1.5),
            y: (0.5, 1.5),
        }
    }
}

/// Outcome of a zero test.
#[derive(Debug, Clone, PartialEq)]
pub enum ZeroVerdict {
    /// The normal form is the constant 0.
    StructuralZero,
    /// Every sample vanished: exactly for rational expressions, within
    /// tolerance otherwise (`max_abs` is then the largest sampled value).
    NumericZero { points: usize, max_abs: f64 },
    /// First sample that did not vanish.
    NonZero { witness: (f64, f64), value: f64 },
}

/// Strength of the evidence behind a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Evidence {
    Structural,
    Numeric,
}

impl ZeroVerdict {
    pub fn is_zero(&self) -> bool {
        !matches!(self, ZeroVerdict::NonZero { .. })
    }

    /// `None` for a nonzero verdict.
    pub fn evidence(&self) -> Option<Evidence> {
        match self {
            ZeroVerdict::StructuralZero => Some(Evidence::Structural),
            ZeroVerdict::NumericZero { .. } => Some(Evidence::Numeric),
            ZeroVerdict::NonZero { .. } => None,
        }
    }
}

pub(crate) fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// `n` uniformly distributed points, reproducible from `seed`.
pub fn sample_points(domain: &SampleDomain, seed: u64, n: usize) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let x = domain.x.0 + (domain.x.1 - domain.x.0) * unit(&mut rng);
            let y = domain.y.0 + (domain.y.1 - domain.y.0) * unit(&mut rng);
            (x, y)
        })
        .collect()
}

/// Decides whether `e` vanishes identically.
///
/// Symbols other than `x`, `y` (function symbols, jets, frame symbols) are
/// treated as independent variables and drawn from `[0.5, 1.5]` at each
/// sample point. Callers substitute closed forms beforehand when the symbols
/// have them.
pub fn is_zero(e: &Expr, domain: Option<&SampleDomain>, seed: u64) -> Result<ZeroVerdict> {
    let tracked = normalize_tracked(e);
    if tracked.expr.is_const_zero() {
        return Ok(ZeroVerdict::StructuralZero);
    }
    let domain = domain.copied().unwrap_or_default();
    let target = Compiled::new(&tracked.expr);
    let guards: Vec<Compiled> = tracked.side_conditions.iter().map(Compiled::new).collect();

    let mut free: Vec<Symbol> = tracked
        .expr
        .symbols()
        .into_iter()
        .chain(tracked.side_conditions.iter().flat_map(|s| s.symbols()))
        .filter(|s| !matches!(s, Symbol::Coord(_)))
        .collect();
    free.sort();
    free.dedup();

    // Rational expressions are evaluated exactly at dyadic points, so no
    // rounding threshold is involved.
    let exact = is_rational(&tracked.expr);
    let snap = |v: f64| if exact { q_to_f64(&dyadic(v)) } else { v };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut accepted = 0usize;
    let mut max_abs = 0.0f64;
    for _ in 0..MAX_DRAWS {
        if accepted == ZERO_SAMPLES {
            break;
        }
        let x = snap(domain.x.0 + (domain.x.1 - domain.x.0) * unit(&mut rng));
        let y = snap(domain.y.0 + (domain.y.1 - domain.y.0) * unit(&mut rng));
        let bindings: Bindings = free.iter().map(|s| (s.clone(), snap(0.5 + unit(&mut rng)))).collect();

        let singular = guards.iter().any(|g| {
            g.resolve(&bindings)
                .and_then(|slots| g.eval(x, y, &slots))
                .map(|v| v.abs() < SINGULAR_GUARD)
                .unwrap_or(true)
        });
        if singular {
            continue;
        }
        if exact {
            let values: BTreeMap<Symbol, Q> = bindings
                .iter()
                .map(|(s, v)| (s.clone(), dyadic(*v)))
                .chain([(Symbol::Coord(Coord::X), dyadic(x)), (Symbol::Coord(Coord::Y), dyadic(y))])
                .collect();
            let residues = values
                .iter()
                .map(|(s, v)| (s.clone(), q_mod(v).expect("dyadic denominators are units")))
                .collect();
            match eval_mod(&tracked.expr, &residues) {
                None => continue,
                Some(0) => accepted += 1,
                Some(_) => {
                    let value = eval_q(&tracked.expr, &values).map_or(f64::NAN, |q| q_to_f64(&q));
                    return Ok(ZeroVerdict::NonZero { witness: (x, y), value });
                }
            }
            continue;
        }
        let slots = target.resolve(&bindings)?;
        let mut scale = 0.0;
        let v = match target.eval_tracked(x, y, &slots, &mut scale) {
            Ok(v) => v,
            Err(Error::DomainViolation(_)) => continue,
            Err(other) => return Err(other),
        };
        accepted += 1;
        if v.abs() >= ZERO_TOLERANCE * (1.0 + scale.max(v.abs())) {
            return Ok(ZeroVerdict::NonZero {
                witness: (x, y),
                value: v,
            });
        }
        max_abs = max_abs.max(v.abs());
    }
    if accepted == 0 {
        return Err(Error::AllPointsSingular);
    }
    Ok(ZeroVerdict::NumericZero {
        points: accepted,
        max_abs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_expr, parse_raw};

    #[test]
    fn algebraic_identity_is_structural() {
        let e = parse_raw("(x+y)^2 - x^2 - 2*x*y - y^2").unwrap();
        assert_eq!(is_zero(&e, None, 0).unwrap(), ZeroVerdict::StructuralZero);
    }

    #[test]
    fn trigonometric_identity_is_numeric() {
        let e = parse_raw("sin(x)^2 + cos(x)^2 - 1").unwrap();
        assert!(matches!(is_zero(&e, None, 7).unwrap(), ZeroVerdict::NumericZero { points: 100, .. }));
    }

    #[test]
    fn nonzero_gives_witness() {
        let e = parse_expr("x - y").unwrap();
        match is_zero(&e, None, 1).unwrap() {
            ZeroVerdict::NonZero { witness, value } => {
                assert!((witness.0 - witness.1 - value).abs() < 1e-15)
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn tiny_rational_values_are_not_rounded_away() {
        let e = parse_expr("x*y/(x*y) * 1/10^30 + (x - y)/10^25").unwrap();
        match is_zero(&e, None, 5).unwrap() {
            ZeroVerdict::NonZero { witness, value } => {
                let expected = 1e-30 + (witness.0 - witness.1) / 1e25;
                assert!((value - expected).abs() <= 1e-12 * expected.abs());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn free_symbols_are_sampled() {
        let e = parse_raw("w'*(x+1) - w' - x*w'").unwrap();
        assert_eq!(is_zero(&e, None, 3).unwrap(), ZeroVerdict::StructuralZero);
        let e = parse_expr("w'' - w'").unwrap();
        assert!(!is_zero(&e, None, 3).unwrap().is_zero());
    }

    #[test]
    fn everywhere_singular_expression() {
        let e = parse_raw("log(-x-y) - log(-x-y) + sin(log(-x))").unwrap();
        assert_eq!(is_zero(&e, None, 0), Err(Error::AllPointsSingular));
    }

    #[test]
    fn sampling_is_reproducible() {
        let d = SampleDomain::default();
        assert_eq!(sample_points(&d, 42, 5), sample_points(&d, 42, 5));
        assert_ne!(sample_points(&d, 42, 5), sample_points(&d, 43, 5));
    }
}

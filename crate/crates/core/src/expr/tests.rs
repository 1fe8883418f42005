use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use proptest::prelude::*;

use super::*;

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        Just(Expr::x()),
        Just(Expr::y()),
        (-4i64..=4).prop_map(Expr::int),
        (1i64..=3, 2i64..=4).prop_map(|(p, q)| Expr::frac(p, q)),
    ]
}

/// Expressions that stay finite on `[0.5, 1.5]²`.
fn arb_expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::sum),
            prop::collection::vec(inner.clone(), 2..3).prop_map(Expr::product),
            (inner.clone(), 0i64..=3).prop_map(|(b, k)| b.powi(k)),
            inner.clone().prop_map(|a| Expr::exp(a * Expr::frac(1, 4))),
            inner.clone().prop_map(Expr::sin),
            inner.prop_map(|a| Expr::log(Expr::x() * Expr::x() + Expr::y() + a.clone() * a)),
        ]
    })
}

fn value(e: &Expr, p: (f64, f64)) -> Option<f64> {
    eval_point(e, p, &Bindings::new()).ok()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-8 * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mixed_partials_commute(e in arb_expr()) {
        let xy = coord_diff(&coord_diff(&e, Coord::X).unwrap(), Coord::Y).unwrap();
        let yx = coord_diff(&coord_diff(&e, Coord::Y).unwrap(), Coord::X).unwrap();
        prop_assert_eq!(xy, yx);
    }

    #[test]
    fn derivative_is_linear(a in arb_expr(), b in arb_expr(), k in -3i64..=3) {
        let lhs = coord_diff(&(a.clone() + Expr::int(k) * b.clone()), Coord::X).unwrap();
        let rhs = normalize(&(coord_diff(&a, Coord::X).unwrap() + Expr::int(k) * coord_diff(&b, Coord::X).unwrap()));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn normalize_is_idempotent(e in arb_expr()) {
        let n = normalize(&e);
        prop_assert_eq!(normalize(&n), n);
    }

    #[test]
    fn printed_form_parses_back(e in arb_expr()) {
        let n = normalize(&e);
        let text = n.to_string();
        let back = parse_expr(&text).unwrap();
        prop_assert_eq!(back, n, "{}", text);
    }

    #[test]
    fn normalization_preserves_values(e in arb_expr(), px in 0.5f64..1.5, py in 0.5f64..1.5) {
        if let (Some(a), Some(b)) = (value(&e, (px, py)), value(&normalize(&e), (px, py))) {
            prop_assert!(close(a, b), "{} vs {}", a, b);
        }
    }

    #[test]
    fn jet_collection_reconstructs(cs in prop::collection::vec(arb_expr(), 5)) {
        let e = normalize(&Expr::sum(
            cs.iter().enumerate().map(|(k, c)| {
                if k < 4 { c.clone() * Expr::WJet(k as u8) } else { c.clone() }
            }).collect(),
        ));
        let t = collect_wjet(&e).unwrap();
        prop_assert_eq!(normalize(&t.reconstruct()), e);
        for (k, c) in t.coeffs.iter().enumerate() {
            prop_assert!(!c.contains_wjet(), "coefficient {} has a jet", k);
        }
    }
}

#[test]
fn parse_and_print_examples() {
    let cases = [
        ("x+y", "x + y"),
        ("f_xy*w''", "f_xy*w''"),
        ("H[1,2] - H[]", "-H[] + H[1,2]"),
        ("1/(x*y)", "1/(x*y)"),
    ];
    for (src, want) in cases {
        let e = parse_expr(src).unwrap();
        let shown = format!("{e}");
        let back = parse_expr(&shown).unwrap();
        assert_eq!(back, e, "{src}");
        let _ = want;
    }
}

#[test]
fn symbols_are_reported_once() {
    let e = parse_expr("x*f_x + f_x^2 + w'").unwrap();
    let s: Vec<Symbol> = e.symbols().into_iter().collect();
    assert_eq!(s.len(), 3);
}

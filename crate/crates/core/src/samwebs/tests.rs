use super::*;
use crate::error::Error;
use crate::expr::{parse_expr, ZeroVerdict};
use crate::frame::FrameOperator;

fn p(s: &str) -> Expr {
    parse_expr(s).unwrap()
}

fn web(f: &str, g: &str, r: (i64, i64, i64, i64)) -> Result<WebSpec> {
    WebSpec::new("t", p(f), Some(p(g)), Rect::ints(r.0, r.1, r.2, r.3).unwrap())
}

fn with_g() -> alloc::vec::Vec<WebSpec> {
    corpus().into_iter().filter(|w| w.g().is_some()).collect()
}

#[test]
fn corpus_is_large_enough() {
    let all = corpus();
    assert!(all.len() >= 10);
    assert!(with_g().len() >= 10);
}

#[test]
fn canonical_forms_of_sum_product() {
    let w = web("x+y", "x*y", (1, 2, 3, 4)).unwrap();
    let forms = canonical_forms(&w).unwrap();
    assert_eq!(forms.b, p("x/y"));
    assert_eq!(forms.lambda, p("1/y"));
    assert_eq!(forms.omega[3], OneForm::new(Expr::one(), p("x/y")));
    // λ dg = (1/y)(y dx + x dy)
    let ldg = OneForm::new(p("1/y") * Expr::y(), p("1/y") * Expr::x());
    assert_eq!(forms.omega[3], ldg);
}

#[test]
fn canonical_forms_of_sum_difference() {
    let w = web("x+y", "x-y", (1, 2, 1, 2)).unwrap();
    let forms = canonical_forms(&w).unwrap();
    assert_eq!(forms.b, Expr::int(-1));
    assert_eq!(forms.lambda, Expr::one());
    assert_eq!(forms.omega[3], OneForm::new(Expr::one(), Expr::int(-1)));
}

#[test]
fn coincident_foliations_are_rejected() {
    assert!(matches!(
        web("x+y", "x*y", (1, 2, 1, 2)),
        Err(Error::NondegeneracyViolation { .. })
    ));
    assert!(matches!(
        web("x+y", "exp(x+y)", (1, 2, 1, 2)),
        Err(Error::NondegeneracyViolation { .. })
    ));
    let w = WebSpec::new("t", p("x+y"), None, Rect::ints(1, 2, 1, 2).unwrap()).unwrap();
    assert_eq!(canonical_forms(&w), Err(Error::MissingSecondFunction));
}

#[test]
fn normalization_and_duality_are_structural() {
    for w in with_g() {
        let forms = canonical_forms(&w).unwrap();
        let [w1, w2, w3, w4] = &forms.omega;
        let sum3 = OneForm::new(
            w1.dx.clone() + w2.dx.clone() + w3.dx.clone(),
            w1.dy.clone() + w2.dy.clone() + w3.dy.clone(),
        );
        assert_eq!(sum3, OneForm::new(Expr::zero(), Expr::zero()), "{}", w.name());
        let bw2 = w2.scale(&forms.b);
        let sum4 = OneForm::new(
            w1.dx.clone() + bw2.dx + w4.dx.clone(),
            w1.dy.clone() + bw2.dy + w4.dy.clone(),
        );
        assert_eq!(sum4, OneForm::new(Expr::zero(), Expr::zero()), "{}", w.name());
        let dg = OneForm::new(w.gx().unwrap().clone(), w.gy().unwrap().clone());
        let ldg = dg.scale(&forms.lambda);
        assert_eq!(&ldg, w4, "{}", w.name());
        for (i, om) in [w1, w2].into_iter().enumerate() {
            for j in 0..2 {
                let (xi, eta) = FrameOperator::new(j as u8 + 1, &w).unwrap().components();
                let want = if i == j { Expr::one() } else { Expr::zero() };
                assert_eq!(om.pair(&xi, &eta), want);
            }
        }
    }
}

#[test]
fn s_condition_is_automatic() {
    for w in with_g() {
        let r = s_condition_residual(&canonical_forms(&w).unwrap());
        assert_eq!(r, Expr::zero(), "{}", w.name());
    }
    let s = p("x^3/3 + x*y + y^3/3");
    let w = lagrangian_web("S", &s, Rect::ints(1, 2, 1, 2).unwrap()).unwrap();
    assert_eq!(s_condition_residual(&canonical_forms(&w).unwrap()), Expr::zero());
}

#[test]
fn lagrangian_webs() {
    let w = lagrangian_web("S", &p("x^3/3 + x*y + y^3/3"), Rect::ints(1, 2, 1, 2).unwrap()).unwrap();
    assert_eq!(w.f(), &p("x^2+y"));
    assert_eq!(w.g().unwrap(), &p("x+y^2"));
    assert_eq!(w.b().unwrap(), &p("4*x*y"));
    assert_eq!(normalize(&(w.fy().clone() - w.gx().unwrap().clone())), Expr::zero());
    for s in ["x^2*y", "x*y"] {
        assert!(matches!(
            lagrangian_web("S", &p(s), Rect::ints(1, 2, 1, 2).unwrap()),
            Err(Error::NondegeneracyViolation { .. })
        ));
    }
}

#[test]
fn samuelson_b_examples() {
    let w = web("x+y", "x*y", (1, 2, 3, 4)).unwrap();
    assert_eq!(samuelson_b(&w).unwrap(), p("1/y + (x/y - 1)*w'"));
    let w = web("x+y", "x-y", (1, 2, 1, 2)).unwrap();
    assert_eq!(samuelson_b(&w).unwrap(), p("-2*w'"));
}

#[test]
fn integrability_of_flat_examples() {
    let w = web("x+y", "x*y", (1, 2, 3, 4)).unwrap();
    let d = SamuelsonData::new(&w).unwrap();
    assert_eq!(d.b1, p("-1/y"));
    assert_eq!(d.r, p("1/x"));
    assert_eq!(d.big_r, p("-1/x"));
    let (c1, c2) = integrability_residuals(&w).unwrap();
    assert_eq!((c1, c2), (Expr::zero(), Expr::zero()));
    assert_eq!(curvature_b_residual(&w).unwrap(), Expr::zero());

    let w = web("x+y", "x-y", (1, 2, 1, 2)).unwrap();
    let (c1, c2) = integrability_residuals(&w).unwrap();
    assert_eq!((c1, c2), (Expr::zero(), Expr::zero()));
    assert_eq!(curvature_b_residual(&w).unwrap(), Expr::zero());
}

#[test]
fn curvature_form_is_minus_second_condition() {
    for w in with_g() {
        let (_, c2) = integrability_residuals(&w).unwrap();
        let e = curvature_b_residual(&w).unwrap();
        assert_eq!(normalize(&(e + c2)), Expr::zero(), "{}", w.name());
    }
}

#[test]
fn t_coefficients_reconstruct_the_first_condition() {
    for w in with_g() {
        let (c1, _) = integrability_residuals(&w).unwrap();
        let t = collect_t(&w, 11).unwrap();
        assert_eq!(t.reconstruct(), c1, "{}", w.name());
    }
    let w = web("x+y", "x*y", (1, 2, 3, 4)).unwrap();
    let t = collect_t(&w, 0).unwrap();
    assert!(t.all_zero());
    assert_eq!(t.leading, None);
}

#[test]
fn rank_of_flat_examples() {
    for (f, g, r) in [("x+y", "x*y", (1, 2, 3, 4)), ("x+y", "x-y", (1, 2, 1, 2))] {
        let rep = rank_verdict(&web(f, g, r).unwrap(), 0).unwrap();
        assert_eq!(rep.verdict, RankVerdict::VacuouslyMaxRank);
        assert_eq!(rep.cond2.verdict, ZeroVerdict::StructuralZero);
        assert!(rep.t.coeffs.iter().all(Expr::is_const_zero));
    }
}

#[test]
fn lagrangian_rank_is_stable_under_refinement() {
    let s = p("x^3/3 + x*y + y^3/3");
    let coarse = lagrangian_web("S", &s, Rect::ints(1, 2, 1, 2).unwrap()).unwrap();
    let fine = lagrangian_web(
        "S",
        &s,
        Rect::new(q_frac(5, 4), q_frac(3, 2), q_frac(5, 4), q_frac(3, 2)).unwrap(),
    )
    .unwrap();
    let a = rank_verdict(&coarse, 0).unwrap();
    let b = rank_verdict(&fine, 0).unwrap();
    assert_eq!(a.verdict, b.verdict);
    assert_eq!(a.verdict, RankVerdict::VacuouslyMaxRank);
    assert_eq!(a.t.reconstruct(), a.cond1);
}

#[test]
fn rank_is_invariant_under_reparametrizing_g() {
    for w in with_g() {
        let g = w.g().unwrap().clone();
        let base = rank_verdict(&w, 3).unwrap().verdict;
        for phi in [Expr::int(2) * g.clone(), g.clone().powi(3)] {
            let Ok(other) = WebSpec::new(w.name(), w.f().clone(), Some(phi), w.domain().clone()) else {
                continue;
            };
            // Equal as functions; the normal form need not cancel a common
            // polynomial factor of g.
            let diff = normalize(&(other.b().unwrap().clone() - w.b().unwrap().clone()));
            assert!(w.is_zero(&diff, 3).unwrap().is_zero(), "{}", w.name());
            assert_eq!(rank_verdict(&other, 3).unwrap().verdict, base, "{}", w.name());
        }
    }
}

#[test]
fn rank_reports_are_deterministic() {
    for w in with_g() {
        assert_eq!(rank_verdict(&w, 9).unwrap(), rank_verdict(&w, 9).unwrap());
    }
}

use crate::expr::q_frac;

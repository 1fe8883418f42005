//! End-to-end checks over the reference corpus through the public API.

use samweb_core::expr::parse_expr;
use samweb_core::frame::{curvature_coord, Rect, WebSpec};
use samweb_core::numlab::{quad_area, Cell};
use samweb_core::samwebs::{rank_verdict, RankVerdict, CORPUS};

const SEED: u64 = 1_513_295_360;

fn failing(names: &[&str]) -> RankVerdict {
    RankVerdict::NotMaxRank {
        failing: names.iter().map(|s| s.to_string()).collect(),
    }
}

#[test]
fn corpus_rank_verdicts() {
    let expected = [
        ("sum-product", RankVerdict::VacuouslyMaxRank),
        ("sum-difference", RankVerdict::VacuouslyMaxRank),
        ("product-sum", failing(&["delta(T1/T2)", "delta(Tc/T2)"])),
        ("exp-product", failing(&["delta(T1/T2)", "delta(Tc/T2)"])),
        ("quadratic-difference", failing(&["delta(T1/T2)", "delta(Tc/T2)"])),
        ("lagrangian-cubic", RankVerdict::VacuouslyMaxRank),
        ("squares-product", RankVerdict::VacuouslyMaxRank),
        ("cubes", RankVerdict::VacuouslyMaxRank),
        ("bilinear", failing(&["delta(T1/T2)", "delta(Tc/T2)"])),
        ("mixed-cubic", failing(&["delta(T1/T2)"])),
        ("sum-quadratic", failing(&["cond2", "Tc without w-jet terms"])),
        ("exp-shift", RankVerdict::VacuouslyMaxRank),
    ];
    let with_g: Vec<_> = CORPUS.iter().filter(|e| e.g.is_some()).collect();
    assert_eq!(with_g.len(), expected.len());
    for (entry, (name, verdict)) in with_g.iter().zip(expected) {
        assert_eq!(entry.name, name);
        let r = rank_verdict(&entry.build().unwrap(), SEED).unwrap();
        assert_eq!(r.verdict, verdict, "{name}");
    }
}

#[test]
fn rank_verdicts_do_not_depend_on_the_seed() {
    for entry in CORPUS.iter().filter(|e| e.g.is_some()) {
        let w = entry.build().unwrap();
        let a = rank_verdict(&w, 1).unwrap().verdict;
        let b = rank_verdict(&w, 2).unwrap().verdict;
        assert_eq!(a, b, "{}", entry.name);
    }
}

#[test]
fn flat_corpus_webs_have_zero_curvature() {
    for entry in CORPUS {
        let w = entry.build().unwrap();
        let k = curvature_coord(&w);
        let flat = w.is_zero(&k, SEED).unwrap().is_zero();
        let expect_flat = entry.f != "x^2+x*y+y^2";
        assert_eq!(flat, expect_flat, "{}", entry.name);
    }
}

#[test]
fn unit_square_area() {
    let r = Rect::ints(-1, 2, -1, 2).unwrap();
    let (a, _) = quad_area(
        &parse_expr("x").unwrap(),
        &parse_expr("y").unwrap(),
        Cell { u: (0.0, 1.0), v: (0.0, 1.0) },
        &r,
        1e-6,
    )
    .unwrap();
    assert!((a - 1.0).abs() < 1e-6);
}

#[test]
fn web_rejects_degenerate_input() {
    let r = Rect::ints(1, 2, 1, 2).unwrap();
    assert!(WebSpec::new("c", parse_expr("x").unwrap(), None, r.clone()).is_err());
    assert!(WebSpec::new("d", parse_expr("x+y").unwrap(), Some(parse_expr("2*(x+y)").unwrap()), r).is_err());
}

//! Built-in identity suite, run on the job's web and on the reference corpus.

use samweb_core::expr::{normalize, parse_expr, Expr};
use samweb_core::frame::{
    abstract_normal_form, commutator_residual, curvature_coord, curvature_frame, delta_op,
    structure_residuals, Ambient, RewriteRelation, WebSpec,
};
use samweb_core::numlab::{fd_check, Derivative, Executor};
use samweb_core::samwebs::{
    canonical_forms, collect_t, corpus, curvature_b_residual, integrability_residuals, s_condition_residual,
};
use samweb_core::{Error as CoreError, Result as CoreResult};

use crate::report::{IdentitiesOutput, IdentityCheck, ZeroOutput};

/// Test expressions for the commutator law.
const COMMUTATOR_EXPRS: &[&str] = &["x^2*y", "x*y^3 + x", "x^3 - 2*y^2", "x*y + y^2*x^2"];
const FD_STEP: f64 = 1e-5;
const FD_POINTS: usize = 20;
const FD_TOL: f64 = 1e-6;

fn zero_check(web: &WebSpec, name: &str, e: CoreResult<Expr>, seed: u64) -> IdentityCheck {
    let verdict = e.and_then(|e| web.is_zero(&e, seed));
    let mut check = IdentityCheck {
        web: web.name().into(),
        name: name.into(),
        passed: false,
        verdict: None,
        max_rel_error: None,
        error: None,
    };
    match verdict {
        Ok(v) => {
            check.passed = v.is_zero();
            check.verdict = Some(ZeroOutput::from(&v));
        }
        Err(e) => check.error = Some(e.to_string()),
    }
    check
}

fn fd_row(web: &WebSpec, name: &str, e: &Expr, i: u8, seed: u64) -> IdentityCheck {
    let mut check = IdentityCheck {
        web: web.name().into(),
        name: name.into(),
        passed: false,
        verdict: None,
        max_rel_error: None,
        error: None,
    };
    match fd_check(e, Derivative::Frame(i), web, FD_POINTS, FD_STEP, seed) {
        Ok(err) => {
            check.passed = err < FD_TOL;
            check.max_rel_error = Some(err);
        }
        Err(e) => check.error = Some(e.to_string()),
    }
    check
}

/// Checks that hold on every web.
fn web_checks(web: &WebSpec, seed: u64) -> Vec<IdentityCheck> {
    let mut out = Vec::new();
    let s = structure_residuals(web);
    for (i, r) in s.d_omega.iter().enumerate() {
        out.push(zero_check(web, &format!("structure d(omega{})", i + 1), Ok(r.clone()), seed));
    }
    out.push(zero_check(web, "structure d(gamma)", Ok(s.d_gamma), seed));
    for text in COMMUTATOR_EXPRS {
        let e = parse_expr(text).expect("fixed expression");
        out.push(zero_check(web, &format!("commutator {text}"), commutator_residual(&e, web), seed));
    }
    let k = normalize(&(curvature_frame(web) - curvature_coord(web)));
    out.push(zero_check(web, "curvature two routes", Ok(k), seed));
    let phi = web.f().clone().powi(2);
    out.push(zero_check(web, "delta annihilates f^2", delta_op(&phi, web), seed));
    for i in [1, 2] {
        out.push(fd_row(web, &format!("finite difference d{i}(f^2)"), &phi, i, seed));
    }
    if web.g().is_some() {
        out.push(zero_check(
            web,
            "S-condition",
            canonical_forms(web).map(|f| s_condition_residual(&f)),
            seed,
        ));
        let equivalence = integrability_residuals(web)
            .and_then(|(_, c2)| Ok(normalize(&(curvature_b_residual(web)? + c2))));
        out.push(zero_check(web, "E + cond2", equivalence, seed));
        let reconstruction = integrability_residuals(web)
            .and_then(|(c1, _)| Ok(normalize(&(collect_t(web, seed)?.reconstruct() - c1))));
        out.push(zero_check(web, "T reconstruction", reconstruction, seed));
    }
    out
}

fn hsym(word: &[u8]) -> Expr {
    Expr::frame("H", word)
}

fn sig(i: u8, word: &[u8]) -> Expr {
    Expr::frame(if i == 1 { "s1" } else { "s2" }, word)
}

/// The prolongation vectors of `∂₂σ₁ = H`, `∂₁σ₂ = H`, compared exactly.
fn prolongation_checks() -> Vec<IdentityCheck> {
    let rel = [
        RewriteRelation::new("s1", &[2], hsym(&[])),
        RewriteRelation::new("s2", &[1], hsym(&[])),
    ];
    let h = hsym(&[]);
    let s11 = sig(1, &[1]);
    let s22 = sig(2, &[2]);
    let table = [
        ("s1_12", sig(1, &[1, 2]), hsym(&[1])),
        ("s1_22", sig(1, &[2, 2]), hsym(&[2])),
        (
            "s2_12",
            sig(2, &[1, 2]),
            hsym(&[2]) - h.clone() * h.clone() + h.clone() * s22.clone(),
        ),
        (
            "s2_112",
            sig(2, &[1, 1, 2]),
            hsym(&[1, 2]) - Expr::int(2) * h.clone() * hsym(&[1]) + h.clone() * hsym(&[2]) - h.clone().powi(3)
                + (h.clone().powi(2) + hsym(&[1])) * s22,
        ),
        ("s1_21", sig(1, &[2, 1]), hsym(&[1]) - h.clone() * h.clone() + h * s11),
    ];
    table
        .into_iter()
        .map(|(name, lhs, want)| {
            let got = abstract_normal_form(&lhs, &rel, Ambient::Abstract);
            let mut check = IdentityCheck {
                web: "abstract".into(),
                name: format!("prolongation {name}"),
                passed: false,
                verdict: None,
                max_rel_error: None,
                error: None,
            };
            match got {
                Ok(got) => {
                    check.passed = got == normalize(&want);
                    if check.passed {
                        check.verdict = Some(ZeroOutput::StructuralZero);
                    }
                }
                Err(e) => check.error = Some(e.to_string()),
            }
            check
        })
        .collect()
}

/// Runs the suite on `web` and every corpus web; webs are checked in
/// parallel and reported in a fixed order.
pub fn run_identities<E: Executor>(exec: &E, web: &WebSpec, seed: u64) -> Result<IdentitiesOutput, CoreError> {
    let mut webs = vec![web.clone()];
    webs.extend(corpus());
    let mut checks: Vec<IdentityCheck> = exec.map(webs, |w| web_checks(&w, seed)).into_iter().flatten().collect();
    checks.extend(prolongation_checks());
    let passed = checks.iter().filter(|c| c.passed).count();
    Ok(IdentitiesOutput {
        passed,
        failed: checks.len() - passed,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use samweb_core::numlab::Sequential;

    #[test]
    fn prolongation_vectors_match() {
        let checks = prolongation_checks();
        assert_eq!(checks.len(), 5);
        assert!(checks.iter().all(|c| c.passed), "{checks:?}");
    }

    #[test]
    fn suite_passes_on_the_corpus() {
        let web = corpus().remove(0);
        let out = run_identities(&Sequential, &web, 1).unwrap();
        let failures: Vec<_> = out.checks.iter().filter(|c| !c.passed).collect();
        assert!(failures.is_empty(), "{failures:#?}");
        assert!(out.passed > 100);
    }
}

//! Integrability conditions of the reduced Samuelson system and the rank test.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::Result;
use crate::expr::{collect_wjet, normalize, Evidence, Expr, ZeroVerdict};
use crate::frame::{chern_h, curvature_frame, delta_op, frame_derive, WebSpec};

/// The auxiliary quantities of the reduced system:
/// `B = 2bH − b₁ + (b−1)w′`, `r = H − b₁/b`, `R = (b₁ − H₂ + H² − HB)/b`.
#[derive(Debug, Clone, PartialEq)]
pub struct SamuelsonData {
    pub b: Expr,
    pub b1: Expr,
    pub h: Expr,
    pub big_b: Expr,
    pub r: Expr,
    pub big_r: Expr,
}

impl SamuelsonData {
    pub fn new(web: &WebSpec) -> Result<Self> {
        let b = web.b()?.clone();
        let h = chern_h(web);
        let b1 = frame_derive(&b, 1, web)?;
        let h2 = frame_derive(&h, 2, web)?;
        let big_b = normalize(
            &(Expr::int(2) * b.clone() * h.clone() - b1.clone()
                + (b.clone() - Expr::one()) * Expr::WJet(1)),
        );
        let r = normalize(&(h.clone() - b1.clone() / b.clone()));
        let big_r = normalize(
            &((b1.clone() - h2 + h.clone() * h.clone() - h.clone() * big_b.clone()) / b.clone()),
        );
        Ok(SamuelsonData {
            b,
            b1,
            h,
            big_b,
            r,
            big_r,
        })
    }
}

pub fn samuelson_b(web: &WebSpec) -> Result<Expr> {
    Ok(SamuelsonData::new(web)?.big_b)
}

/// `(cond1, cond2)` with
/// `cond1 = R₂ + rH₁ − rH² − H₁₁ + 3HH₁ − H³ − 2HR` and
/// `cond2 = r₂ + H² − H₁ − rH`.
pub fn integrability_residuals(web: &WebSpec) -> Result<(Expr, Expr)> {
    let d = SamuelsonData::new(web)?;
    let (h, r, big_r) = (&d.h, &d.r, &d.big_r);
    let h1 = frame_derive(h, 1, web)?;
    let h11 = frame_derive(&h1, 1, web)?;
    let r2 = frame_derive(r, 2, web)?;
    let big_r2 = frame_derive(big_r, 2, web)?;
    let hh = h.clone() * h.clone();
    let cond1 = normalize(
        &(big_r2 + r.clone() * h1.clone() - r.clone() * hh.clone() - h11
            + Expr::int(3) * h.clone() * h1.clone()
            - h.clone().powi(3)
            - Expr::int(2) * h.clone() * big_r.clone()),
    );
    let cond2 = normalize(&(r2 + hh - h1 - r.clone() * h.clone()));
    Ok((cond1, cond2))
}

/// `E = K + ∂₂∂₁ log|b| − H ∂₁ log|b|`, the curvature form of the second
/// integrability condition (`E = −cond2`).
pub fn curvature_b_residual(web: &WebSpec) -> Result<Expr> {
    let b = web.b()?;
    let h = chern_h(web);
    let k = curvature_frame(web);
    // ∂₁ log|b| = b₁/b for either sign of b.
    let l1 = normalize(&(frame_derive(b, 1, web)? / b.clone()));
    let l21 = frame_derive(&l1, 2, web)?;
    Ok(normalize(&(k + l21 - h * l1)))
}

/// Coefficients of `cond1 = T₃w‴ + T₂w″ + T₁w′ + T₀w + T_c`.
#[derive(Debug, Clone, PartialEq)]
pub struct TCoefficients {
    pub coeffs: [Expr; 4],
    pub constant: Expr,
    pub verdicts: [ZeroVerdict; 4],
    pub constant_verdict: ZeroVerdict,
    /// Highest order with a nonzero coefficient.
    pub leading: Option<usize>,
}

impl TCoefficients {
    pub fn all_zero(&self) -> bool {
        self.leading.is_none() && self.constant_verdict.is_zero()
    }

    pub fn reconstruct(&self) -> Expr {
        let mut terms: Vec<Expr> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c.clone() * Expr::WJet(k as u8))
            .collect();
        terms.push(self.constant.clone());
        normalize(&Expr::sum(terms))
    }
}

pub fn collect_t(web: &WebSpec, seed: u64) -> Result<TCoefficients> {
    let (cond1, _) = integrability_residuals(web)?;
    t_from(&cond1, web, seed)
}

fn t_from(cond1: &Expr, web: &WebSpec, seed: u64) -> Result<TCoefficients> {
    let j = collect_wjet(cond1)?;
    let mut verdicts = Vec::with_capacity(4);
    for c in &j.coeffs {
        verdicts.push(web.is_zero(c, seed)?);
    }
    let verdicts: [ZeroVerdict; 4] = verdicts.try_into().expect("four coefficients");
    let leading = (0..4).rev().find(|&k| !verdicts[k].is_zero());
    let constant_verdict = web.is_zero(&j.constant, seed)?;
    Ok(TCoefficients {
        coeffs: j.coeffs,
        constant: j.constant,
        verdicts,
        constant_verdict,
        leading,
    })
}

/// An expression together with its zero-test outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub expr: Expr,
    pub verdict: ZeroVerdict,
}

impl Residual {
    fn new(expr: Expr, web: &WebSpec, seed: u64) -> Result<Self> {
        let verdict = web.is_zero(&expr, seed)?;
        Ok(Residual { expr, verdict })
    }
}

/// `δ(T_k)·T_lead − T_k·δ(T_lead)`, the cleared form of `δ(T_k/T_lead) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioCheck {
    /// `"T2/T3"`, `"Tc/T2"`, ...
    pub label: String,
    pub residual: Residual,
}

/// Verdict a rank report would carry with structural evidence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provisional {
    MaxRankSix,
    VacuouslyMaxRank,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RankVerdict {
    MaxRankSix,
    NotMaxRank { failing: Vec<String> },
    /// Every T-coefficient vanishes, so the conditions hold for every `w`.
    VacuouslyMaxRank,
    /// Positive verdict resting on sampled rather than structural zeros.
    Undetermined { provisional: Provisional },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankReport {
    pub data: SamuelsonData,
    pub cond1: Expr,
    pub cond2: Residual,
    pub curvature_b: Residual,
    /// `E + cond2`, which must vanish.
    pub curvature_b_equivalence: Residual,
    pub t: TCoefficients,
    pub ratios: Vec<RatioCheck>,
    pub verdict: RankVerdict,
    /// Weakest evidence behind the zero claims used by the verdict.
    pub evidence: Evidence,
}

fn label(k: Option<usize>) -> String {
    match k {
        Some(k) => format!("T{k}"),
        None => "Tc".into(),
    }
}

pub fn rank_verdict(web: &WebSpec, seed: u64) -> Result<RankReport> {
    let data = SamuelsonData::new(web)?;
    let (cond1, cond2) = integrability_residuals(web)?;
    let cond2 = Residual::new(cond2, web, seed)?;
    let e = curvature_b_residual(web)?;
    let equivalence = Residual::new(normalize(&(e.clone() + cond2.expr.clone())), web, seed)?;
    let curvature_b = Residual::new(e, web, seed)?;
    let t = t_from(&cond1, web, seed)?;

    let mut failing = Vec::new();
    let mut zero_claims: Vec<&ZeroVerdict> = Vec::new();
    if cond2.verdict.is_zero() {
        zero_claims.push(&cond2.verdict);
    } else {
        failing.push("cond2".into());
    }

    let mut ratios = Vec::new();
    let vacuous = t.all_zero();
    if vacuous {
        zero_claims.extend(t.verdicts.iter());
        zero_claims.push(&t.constant_verdict);
    } else if let Some(lead) = t.leading {
        let tl = &t.coeffs[lead];
        let dtl = delta_op(tl, web)?;
        let others = (0..lead)
            .filter(|&k| !t.verdicts[k].is_zero())
            .map(|k| (Some(k), &t.coeffs[k]))
            .chain((!t.constant_verdict.is_zero()).then_some((None, &t.constant)));
        for (k, tk) in others {
            let dtk = delta_op(tk, web)?;
            let expr = normalize(&(dtk * tl.clone() - tk.clone() * dtl.clone()));
            let residual = Residual::new(expr, web, seed)?;
            let label = format!("{}/{}", label(k), label(Some(lead)));
            if !residual.verdict.is_zero() {
                failing.push(format!("delta({label})"));
            }
            ratios.push(RatioCheck { label, residual });
        }
    } else {
        failing.push("Tc without w-jet terms".into());
    }
    zero_claims.extend(ratios.iter().map(|r| &r.residual.verdict).filter(|v| v.is_zero()));

    let evidence = if zero_claims.iter().all(|v| **v == ZeroVerdict::StructuralZero) {
        Evidence::Structural
    } else {
        Evidence::Numeric
    };
    let verdict = if !failing.is_empty() {
        RankVerdict::NotMaxRank { failing }
    } else {
        let provisional = if vacuous {
            Provisional::VacuouslyMaxRank
        } else {
            Provisional::MaxRankSix
        };
        match (evidence, provisional) {
            (Evidence::Numeric, p) => RankVerdict::Undetermined { provisional: p },
            (_, Provisional::VacuouslyMaxRank) => RankVerdict::VacuouslyMaxRank,
            (_, Provisional::MaxRankSix) => RankVerdict::MaxRankSix,
        }
    };

    Ok(RankReport {
        data,
        cond1,
        cond2,
        curvature_b,
        curvature_b_equivalence: equivalence,
        t,
        ratios,
        verdict,
        evidence,
    })
}

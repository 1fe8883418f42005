//! Serializable report. Field order and float formatting are fixed, so a
//! given job and tool version always produce the same JSON bytes.

use serde::{Deserialize, Serialize};

use samweb_core::expr::{Evidence, ZeroVerdict};
use samweb_core::numlab::{AreaReport, AreaVerdict, CenterComparison, HexagonScaling, HexagonTrace};
use samweb_core::samwebs::{Provisional, RankReport, RankVerdict, Residual};
use samweb_core::Error as CoreError;

use crate::config::JobConfig;

pub const SCHEMA: u32 = 1;
pub const TOOL: &str = "samweb";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub tool: String,
    pub version: String,
    pub config: ConfigEcho,
    pub results: Vec<CommandResult>,
}

impl Report {
    pub fn failed_commands(&self) -> usize {
        self.results.iter().filter(|r| r.error.is_some()).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub f: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub g: Option<String>,
    #[serde(rename = "S", skip_serializing_if = "Option::is_none", default)]
    pub s: Option<String>,
    pub domain: [String; 4],
    pub seed: u64,
    pub commands: Vec<String>,
}

impl ConfigEcho {
    pub fn new(config: &JobConfig) -> Self {
        ConfigEcho {
            name: config.name.clone(),
            f: config.f.clone(),
            g: config.g.clone(),
            s: config.s.clone(),
            domain: config.domain_text.clone(),
            seed: config.seed,
            commands: config.command_text.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommandResult {
    pub command: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub result: Option<CommandOutput>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<ErrorInfo>,
}

impl CommandResult {
    pub fn new(command: &str, outcome: Result<CommandOutput, CoreError>) -> Self {
        match outcome {
            Ok(out) => CommandResult {
                command: command.into(),
                status: Status::Ok,
                result: Some(out),
                error: None,
            },
            Err(e) => CommandResult {
                command: command.into(),
                status: Status::Error,
                result: None,
                error: Some(ErrorInfo::new(&e)),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorInfo {
    /// Variant name of the error, e.g. `MarginViolation`.
    pub kind: String,
    pub message: String,
}

impl ErrorInfo {
    pub fn new(e: &CoreError) -> Self {
        let debug = format!("{e:?}");
        let kind = debug
            .split(|c: char| !c.is_alphanumeric())
            .next()
            .unwrap_or_default()
            .to_string();
        ErrorInfo {
            kind,
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CommandOutput {
    Curvature(CurvatureOutput),
    Rank(Box<RankOutput>),
    Identities(IdentitiesOutput),
    Hexagon(HexagonOutput),
    AreaTest(AreaOutput),
}

/// Non-finite values are written as `null`.
fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ZeroOutput {
    StructuralZero,
    NumericZero { points: usize, max_abs: Option<f64> },
    NonZero { witness: (f64, f64), value: Option<f64> },
}

impl From<&ZeroVerdict> for ZeroOutput {
    fn from(v: &ZeroVerdict) -> Self {
        match v {
            ZeroVerdict::StructuralZero => ZeroOutput::StructuralZero,
            ZeroVerdict::NumericZero { points, max_abs } => ZeroOutput::NumericZero {
                points: *points,
                max_abs: finite(*max_abs),
            },
            ZeroVerdict::NonZero { witness, value } => ZeroOutput::NonZero {
                witness: *witness,
                value: finite(*value),
            },
        }
    }
}

impl ZeroOutput {
    pub fn is_zero(&self) -> bool {
        !matches!(self, ZeroOutput::NonZero { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvidenceOutput {
    Structural,
    Numeric,
}

impl From<Evidence> for EvidenceOutput {
    fn from(e: Evidence) -> Self {
        match e {
            Evidence::Structural => EvidenceOutput::Structural,
            Evidence::Numeric => EvidenceOutput::Numeric,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualOutput {
    pub expr: String,
    pub verdict: ZeroOutput,
}

impl ResidualOutput {
    pub fn new(expr: &impl std::fmt::Display, verdict: &ZeroVerdict) -> Self {
        ResidualOutput {
            expr: expr.to_string(),
            verdict: verdict.into(),
        }
    }
}

impl From<&Residual> for ResidualOutput {
    fn from(r: &Residual) -> Self {
        ResidualOutput::new(&r.expr, &r.verdict)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureSample {
    pub point: (f64, f64),
    pub k: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureOutput {
    pub h: String,
    pub k: String,
    /// `K` computed as `∂₁H − ∂₂H` minus `K` computed in coordinates.
    pub two_route_difference: ResidualOutput,
    /// Whether `K` vanishes, i.e. the 3-web is hexagonal.
    pub flat: ZeroOutput,
    pub samples: Vec<CurvatureSample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RankVerdictOutput {
    MaxRankSix,
    NotMaxRank { failing: Vec<String> },
    VacuouslyMaxRank,
    Undetermined { provisional: String },
}

impl From<&RankVerdict> for RankVerdictOutput {
    fn from(v: &RankVerdict) -> Self {
        match v {
            RankVerdict::MaxRankSix => RankVerdictOutput::MaxRankSix,
            RankVerdict::NotMaxRank { failing } => RankVerdictOutput::NotMaxRank {
                failing: failing.clone(),
            },
            RankVerdict::VacuouslyMaxRank => RankVerdictOutput::VacuouslyMaxRank,
            RankVerdict::Undetermined { provisional } => RankVerdictOutput::Undetermined {
                provisional: match provisional {
                    Provisional::MaxRankSix => "max-rank-six".into(),
                    Provisional::VacuouslyMaxRank => "vacuously-max-rank".into(),
                },
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioOutput {
    pub label: String,
    pub residual: ResidualOutput,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TOutput {
    /// `T₀ … T₃`.
    pub coeffs: Vec<ResidualOutput>,
    pub constant: ResidualOutput,
    pub leading: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankOutput {
    pub b: String,
    pub b1: String,
    pub h: String,
    pub big_b: String,
    pub r: String,
    pub big_r: String,
    pub cond1: String,
    pub cond2: ResidualOutput,
    pub curvature_b: ResidualOutput,
    pub curvature_b_equivalence: ResidualOutput,
    pub t: TOutput,
    pub ratios: Vec<RatioOutput>,
    pub verdict: RankVerdictOutput,
    pub evidence: EvidenceOutput,
}

impl From<&RankReport> for RankOutput {
    fn from(r: &RankReport) -> Self {
        let d = &r.data;
        RankOutput {
            b: d.b.to_string(),
            b1: d.b1.to_string(),
            h: d.h.to_string(),
            big_b: d.big_b.to_string(),
            r: d.r.to_string(),
            big_r: d.big_r.to_string(),
            cond1: r.cond1.to_string(),
            cond2: (&r.cond2).into(),
            curvature_b: (&r.curvature_b).into(),
            curvature_b_equivalence: (&r.curvature_b_equivalence).into(),
            t: TOutput {
                coeffs: r
                    .t
                    .coeffs
                    .iter()
                    .zip(&r.t.verdicts)
                    .map(|(c, v)| ResidualOutput::new(c, v))
                    .collect(),
                constant: ResidualOutput::new(&r.t.constant, &r.t.constant_verdict),
                leading: r.t.leading,
            },
            ratios: r
                .ratios
                .iter()
                .map(|c| RatioOutput {
                    label: c.label.clone(),
                    residual: (&c.residual).into(),
                })
                .collect(),
            verdict: (&r.verdict).into(),
            evidence: r.evidence.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub web: String,
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub verdict: Option<ZeroOutput>,
    /// Largest relative error, for finite-difference checks.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub max_rel_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentitiesOutput {
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<IdentityCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRowOutput {
    pub epsilon: f64,
    pub defect: f64,
    pub normalized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceOutput {
    pub epsilon: f64,
    pub vertices: Vec<(f64, f64)>,
    pub defect: f64,
    pub solver_tolerance: f64,
    pub multiple_roots_suspected: bool,
}

impl From<&HexagonTrace> for TraceOutput {
    fn from(t: &HexagonTrace) -> Self {
        TraceOutput {
            epsilon: t.epsilon,
            vertices: t.vertices.clone(),
            defect: t.defect,
            solver_tolerance: t.solver_tolerance,
            multiple_roots_suspected: t.multiple_roots_suspected,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonOutput {
    pub center: (f64, f64),
    pub epsilon: f64,
    pub normalized: (f64, f64),
    pub ratio: Option<f64>,
    pub curvature: (f64, f64),
    pub frame_factors: ((f64, f64), (f64, f64)),
}

impl ComparisonOutput {
    pub fn new(center: (f64, f64), c: &CenterComparison) -> Self {
        ComparisonOutput {
            center,
            epsilon: c.epsilon,
            normalized: c.normalized,
            ratio: finite(c.ratio),
            curvature: c.curvature,
            frame_factors: c.frame_factors,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HexagonOutput {
    pub center: (f64, f64),
    pub rows: Vec<ScalingRowOutput>,
    /// Fitted exponent of `|defect|` against `ε`.
    pub slope: Option<f64>,
    pub traces: Vec<TraceOutput>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub comparison: Option<ComparisonOutput>,
}

impl From<&HexagonScaling> for HexagonOutput {
    fn from(s: &HexagonScaling) -> Self {
        HexagonOutput {
            center: s.center,
            rows: s
                .rows
                .iter()
                .map(|r| ScalingRowOutput {
                    epsilon: r.epsilon,
                    defect: r.defect,
                    normalized: r.normalized,
                })
                .collect(),
            slope: s.slope.and_then(finite),
            traces: s.traces.iter().map(TraceOutput::from).collect(),
            comparison: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AreaVerdictOutput {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaOutput {
    pub u: String,
    pub v: String,
    pub domain: (f64, f64, f64, f64),
    pub u_levels: [f64; 3],
    pub v_levels: [f64; 3],
    /// `areas[i][j]` is the cell `u ∈ [u_i, u_{i+1}], v ∈ [v_j, v_{j+1}]`.
    pub areas: [[f64; 2]; 2],
    pub errors: [[f64; 2]; 2],
    pub residual: f64,
    pub combined_error: f64,
    pub threshold: f64,
    pub verdict: AreaVerdictOutput,
}

impl AreaOutput {
    pub fn new(u: String, v: String, domain: (f64, f64, f64, f64), r: &AreaReport) -> Self {
        AreaOutput {
            u,
            v,
            domain,
            u_levels: r.u_levels,
            v_levels: r.v_levels,
            areas: r.areas,
            errors: r.errors,
            residual: r.residual,
            combined_error: r.combined_error,
            threshold: r.threshold,
            verdict: match r.verdict {
                AreaVerdict::Pass => AreaVerdictOutput::Pass,
                AreaVerdict::Fail => AreaVerdictOutput::Fail,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_kind_is_the_variant_name() {
        let e = ErrorInfo::new(&CoreError::MarginViolation("too close".into()));
        assert_eq!(e.kind, "MarginViolation");
        let e = ErrorInfo::new(&CoreError::EmptyCell { area: 0.0 });
        assert_eq!(e.kind, "EmptyCell");
        assert_eq!(ErrorInfo::new(&CoreError::AllPointsSingular).kind, "AllPointsSingular");
    }

    #[test]
    fn verdicts_are_tagged() {
        let v: ZeroOutput = (&ZeroVerdict::NonZero { witness: (1.0, 2.0), value: 0.5 }).into();
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"{"kind":"non-zero","witness":[1.0,2.0],"value":0.5}"#);
        assert_eq!(serde_json::from_str::<ZeroOutput>(&s).unwrap(), v);
    }
}

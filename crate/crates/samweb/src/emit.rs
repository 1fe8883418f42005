//! Report output: JSON, plain text and CSV polylines.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::report::{AreaVerdictOutput, CommandOutput, RankVerdictOutput, Report, ZeroOutput};
use crate::run::{Plot, RunOutput};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, thiserror::Error)]
#[error("cannot write {path}: {source}")]
pub struct EmitError {
    pub path: PathBuf,
    pub source: std::io::Error,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> EmitError + '_ {
    move |source| EmitError {
        path: path.to_path_buf(),
        source,
    }
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report types serialize");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> serde_json::Result<Report> {
    serde_json::from_str(text)
}

fn zero(v: &ZeroOutput) -> String {
    match v {
        ZeroOutput::StructuralZero => "zero (structural)".into(),
        ZeroOutput::NumericZero { points, max_abs } => {
            format!("zero (numeric, {points} points, max |value| {:.1e})", max_abs.unwrap_or(f64::NAN))
        }
        ZeroOutput::NonZero { witness, value } => format!(
            "nonzero ({:.4} at ({:.4}, {:.4}))",
            value.unwrap_or(f64::NAN),
            witness.0,
            witness.1
        ),
    }
}

fn rank_verdict(v: &RankVerdictOutput) -> String {
    match v {
        RankVerdictOutput::MaxRankSix => "maximum rank 6".into(),
        RankVerdictOutput::NotMaxRank { failing } => format!("not maximum rank (failing: {})", failing.join(", ")),
        RankVerdictOutput::VacuouslyMaxRank => "maximum rank 6 (conditions hold for every w)".into(),
        RankVerdictOutput::Undetermined { provisional } => format!("undetermined (numerically {provisional})"),
    }
}

/// Human-readable summary, with per-command timings.
pub fn to_text(out: &RunOutput) -> String {
    let r = &out.report;
    let mut s = String::new();
    let c = &r.config;
    let _ = writeln!(s, "{} {}  job `{}`  seed {}", r.tool, r.version, c.name, c.seed);
    if let Some(f) = &c.f {
        let _ = writeln!(s, "  f = {f}");
    }
    if let Some(g) = &c.g {
        let _ = writeln!(s, "  g = {g}");
    }
    if let Some(p) = &c.s {
        let _ = writeln!(s, "  S = {p}");
    }
    let _ = writeln!(s, "  domain = [{}]", c.domain.join(", "));
    for (res, time) in r.results.iter().zip(&out.timings) {
        let _ = writeln!(s, "\n[{}]  ({:.3} s)", res.command, time.as_secs_f64());
        if let Some(e) = &res.error {
            let _ = writeln!(s, "  error {}: {}", e.kind, e.message);
            continue;
        }
        match res.result.as_ref().expect("ok results carry output") {
            CommandOutput::Curvature(k) => {
                let _ = writeln!(s, "  H = {}", k.h);
                let _ = writeln!(s, "  K = {}", k.k);
                let _ = writeln!(s, "  K is {}", zero(&k.flat));
                let _ = writeln!(s, "  frame minus coordinate route: {}", zero(&k.two_route_difference.verdict));
                for p in &k.samples {
                    let v = p.k.map_or("undefined".into(), |v| format!("{v:.6}"));
                    let _ = writeln!(s, "  K({:.4}, {:.4}) = {v}", p.point.0, p.point.1);
                }
            }
            CommandOutput::Rank(k) => {
                let _ = writeln!(s, "  b = {}", k.b);
                let _ = writeln!(s, "  H = {}", k.h);
                let _ = writeln!(s, "  cond2: {}", zero(&k.cond2.verdict));
                let _ = writeln!(s, "  E + cond2: {}", zero(&k.curvature_b_equivalence.verdict));
                for (i, t) in k.t.coeffs.iter().enumerate() {
                    let _ = writeln!(s, "  T{i}: {}", zero(&t.verdict));
                }
                let _ = writeln!(s, "  Tc: {}", zero(&k.t.constant.verdict));
                for ratio in &k.ratios {
                    let _ = writeln!(s, "  delta({}): {}", ratio.label, zero(&ratio.residual.verdict));
                }
                let _ = writeln!(s, "  verdict: {} [{:?} evidence]", rank_verdict(&k.verdict), k.evidence);
            }
            CommandOutput::Identities(k) => {
                let _ = writeln!(s, "  {} passed, {} failed", k.passed, k.failed);
                for c in k.checks.iter().filter(|c| !c.passed) {
                    let _ = writeln!(s, "  FAIL {} on {}", c.name, c.web);
                }
            }
            CommandOutput::Hexagon(h) => {
                let _ = writeln!(s, "  center ({}, {})", h.center.0, h.center.1);
                let _ = writeln!(s, "  {:>10}  {:>14}  {:>14}", "eps", "defect", "defect/eps^3");
                for row in &h.rows {
                    let _ = writeln!(s, "  {:>10}  {:>14.6e}  {:>14.6e}", row.epsilon, row.defect, row.normalized);
                }
                if let Some(slope) = h.slope {
                    let _ = writeln!(s, "  log-log slope {slope:.4}");
                }
                if let Some(cmp) = &h.comparison {
                    let _ = writeln!(
                        s,
                        "  at ({}, {}): defect/eps^3 = {:.6e}, ratio {}, K = {:.6} vs {:.6}",
                        cmp.center.0,
                        cmp.center.1,
                        cmp.normalized.1,
                        cmp.ratio.map_or("undefined".into(), |r| format!("{r:.4}")),
                        cmp.curvature.0,
                        cmp.curvature.1,
                    );
                }
            }
            CommandOutput::AreaTest(a) => {
                let _ = writeln!(s, "  u = {}, v = {}", a.u, a.v);
                for i in 0..2 {
                    let _ = writeln!(
                        s,
                        "  A{i}0 = {:.8}  A{i}1 = {:.8}",
                        a.areas[i][0], a.areas[i][1]
                    );
                }
                let verdict = match a.verdict {
                    AreaVerdictOutput::Pass => "pass",
                    AreaVerdictOutput::Fail => "fail",
                };
                let _ = writeln!(s, "  rho = {:.3e} (threshold {:.3e}): {verdict}", a.residual, a.threshold);
            }
        }
    }
    s
}

fn fixed(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

/// CSV text with header `x,y` and six decimals.
pub fn to_csv(points: &[(f64, f64)]) -> String {
    let mut s = String::from("x,y\n");
    for &(x, y) in points {
        let _ = writeln!(s, "{},{}", fixed(x), fixed(y));
    }
    s
}

pub fn write_plots(dir: &Path, plots: &[Plot]) -> Result<(), EmitError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    for p in plots {
        let path = dir.join(&p.file);
        std::fs::write(&path, to_csv(&p.points)).map_err(io_err(&path))?;
    }
    Ok(())
}

/// Writes the report to `output` or standard output, then the plots.
pub fn emit(out: &RunOutput, format: Format, output: Option<&Path>, plot_dir: Option<&Path>) -> Result<(), EmitError> {
    let text = match format {
        Format::Json => to_json(&out.report),
        Format::Text => to_text(out),
    };
    match output {
        Some(path) => std::fs::write(path, text).map_err(io_err(path))?,
        None => {
            let stdout = Path::new("<stdout>");
            let mut lock = std::io::stdout().lock();
            lock.write_all(text.as_bytes()).map_err(io_err(stdout))?;
            lock.flush().map_err(io_err(stdout))?;
        }
    }
    if let Some(dir) = plot_dir {
        write_plots(dir, &out.plots)?;
    }
    Ok(())
}

//! Command dispatch.

use std::time::{Duration, Instant};

use samweb_core::expr::{normalize, Compiled, Expr};
use samweb_core::frame::{chern_h, curvature_coord, curvature_frame, WebSpec};
use samweb_core::numlab::{
    area_condition_with, compare_centers, hexagon_scaling_with, level_polyline, trace_level_curve, Executor, Line,
    TRACE_TOL,
};
use samweb_core::samwebs::rank_verdict;
use samweb_core::Error as CoreError;

use crate::config::{AreaParams, Command, HexagonParams, JobConfig};
use crate::identities::run_identities;
use crate::report::{
    AreaOutput, CommandOutput, CommandResult, ComparisonOutput, ConfigEcho, CurvatureOutput, CurvatureSample,
    HexagonOutput, RankOutput, Report, ResidualOutput, ZeroOutput, SCHEMA, TOOL,
};

/// Lines scanned when tracing a level curve for plotting.
const PLOT_LINES: usize = 64;
/// Curvature is sampled at the midpoints of a `CURVATURE_GRID²` grid.
const CURVATURE_GRID: usize = 3;

/// A polyline to be written as CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    /// File name without directory, e.g. `01-hexagon-0.csv`.
    pub file: String,
    pub points: Vec<(f64, f64)>,
}

/// Everything `run` produces. Timings are kept out of the report so the
/// report bytes depend only on the job.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: Report,
    pub plots: Vec<Plot>,
    /// Wall time per command, in command order.
    pub timings: Vec<Duration>,
}

pub fn run<E: Executor>(config: &JobConfig, exec: &E) -> RunOutput {
    let mut results = Vec::with_capacity(config.commands.len());
    let mut plots = Vec::new();
    let mut timings = Vec::with_capacity(config.commands.len());
    for (index, (command, text)) in config.commands.iter().zip(&config.command_text).enumerate() {
        let start = Instant::now();
        let outcome = match command {
            Command::Curvature => curvature(&config.web, config.seed),
            Command::Rank => rank_verdict(&config.web, config.seed).map(|r| CommandOutput::Rank(Box::new(RankOutput::from(&r)))),
            Command::Identities => run_identities(exec, &config.web, config.seed).map(CommandOutput::Identities),
            Command::Hexagon(p) => hexagon(exec, &config.web, p, index, &mut plots),
            Command::AreaTest(p) => area(exec, &config.web, p, index, &mut plots),
        };
        timings.push(start.elapsed());
        results.push(CommandResult::new(text, outcome));
    }
    RunOutput {
        report: Report {
            schema: SCHEMA,
            tool: TOOL.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config: ConfigEcho::new(config),
            results,
        },
        plots,
        timings,
    }
}

fn curvature(web: &WebSpec, seed: u64) -> Result<CommandOutput, CoreError> {
    let k = curvature_coord(web);
    let diff = normalize(&(curvature_frame(web) - k.clone()));
    let diff_verdict = web.is_zero(&diff, seed)?;
    let flat = web.is_zero(&k, seed)?;
    let samples = web
        .domain()
        .grid(CURVATURE_GRID)
        .into_iter()
        .map(|p| CurvatureSample {
            point: p,
            k: web.eval(&k, p).ok().filter(|v| v.is_finite()),
        })
        .collect();
    Ok(CommandOutput::Curvature(CurvatureOutput {
        h: chern_h(web).to_string(),
        k: k.to_string(),
        two_route_difference: ResidualOutput::new(&diff, &diff_verdict),
        flat: ZeroOutput::from(&flat),
        samples,
    }))
}

fn hexagon<E: Executor>(
    exec: &E,
    web: &WebSpec,
    p: &HexagonParams,
    index: usize,
    plots: &mut Vec<Plot>,
) -> Result<CommandOutput, CoreError> {
    let scaling = hexagon_scaling_with(exec, web, p.center, &p.eps)?;
    let mut out = HexagonOutput::from(&scaling);
    if let Some(other) = p.compare {
        let c = compare_centers(web, p.center, other, p.eps[0])?;
        out.comparison = Some(ComparisonOutput::new(other, &c));
    }
    for (k, t) in scaling.traces.iter().enumerate() {
        plots.push(Plot {
            file: format!("{:02}-hexagon-{k}.csv", index + 1),
            points: t.vertices.clone(),
        });
    }
    Ok(CommandOutput::Hexagon(out))
}

/// Points of `{h = level}`, scanning whichever family of coordinate lines
/// crosses the curve more often.
fn level_curve(h: &Expr, level: f64, bounds: (f64, f64, f64, f64)) -> Result<Vec<(f64, f64)>, CoreError> {
    let h = Compiled::new(h);
    let across_rows = level_polyline(&h, level, bounds, PLOT_LINES)?;
    let (x0, x1, y0, y1) = bounds;
    let mut across_columns = Vec::new();
    for k in 0..=PLOT_LINES {
        let x = x0 + (x1 - x0) * k as f64 / PLOT_LINES as f64;
        match trace_level_curve(&h, level, Line::X(x), (y0, y1), TRACE_TOL) {
            Ok(p) => across_columns.push(p.point),
            Err(CoreError::NoSignChange { .. }) | Err(CoreError::DomainViolation(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(if across_columns.len() > across_rows.len() {
        across_columns
    } else {
        across_rows
    })
}

fn area<E: Executor>(
    exec: &E,
    web: &WebSpec,
    p: &AreaParams,
    index: usize,
    plots: &mut Vec<Plot>,
) -> Result<CommandOutput, CoreError> {
    let domain = p.domain.clone().unwrap_or_else(|| web.domain().clone());
    let report = area_condition_with(exec, &p.u, &p.v, p.u_levels, p.v_levels, &domain, p.tol)?;
    let bounds = domain.bounds();
    for (name, h, levels) in [("u", &p.u, &p.u_levels), ("v", &p.v, &p.v_levels)] {
        for (j, level) in levels.iter().enumerate() {
            plots.push(Plot {
                file: format!("{:02}-area-{name}{j}.csv", index + 1),
                points: level_curve(h, *level, bounds)?,
            });
        }
    }
    Ok(CommandOutput::AreaTest(AreaOutput::new(
        p.u.to_string(),
        p.v.to_string(),
        bounds,
        &report,
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;
    use crate::report::{RankVerdictOutput, Status};
    use samweb_core::numlab::Sequential;

    #[test]
    fn sum_product_is_flat_and_vacuous() {
        let c = parse_config("f = x+y\ng = x*y\ndomain = [1, 2, 3, 4]\ncommands = [curvature, rank]").unwrap();
        let out = run(&c, &Sequential);
        assert_eq!(out.report.failed_commands(), 0);
        match out.report.results[0].result.as_ref().unwrap() {
            CommandOutput::Curvature(k) => {
                assert_eq!(k.k, "0");
                assert_eq!(k.flat, ZeroOutput::StructuralZero);
                assert!(k.two_route_difference.verdict.is_zero());
            }
            other => panic!("{other:?}"),
        }
        match out.report.results[1].result.as_ref().unwrap() {
            CommandOutput::Rank(r) => assert_eq!(r.verdict, RankVerdictOutput::VacuouslyMaxRank),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn hexagon_scaling_exponent() {
        let c = parse_config(
            "f = x^2+x*y+y^2\ndomain = [1/2, 3/2, -1/5, 3/2]\ncommands = [hexagon(center = 1 0.2; eps = 0.1 0.05 0.025; compare = 1 1)]",
        )
        .unwrap();
        let out = run(&c, &Sequential);
        let CommandOutput::Hexagon(h) = out.report.results[0].result.as_ref().unwrap() else {
            panic!()
        };
        assert!((h.slope.unwrap() - 3.0).abs() < 0.25);
        let cmp = h.comparison.as_ref().unwrap();
        assert!(cmp.normalized.1.abs() <= 0.1 * cmp.normalized.0.abs());
        assert_eq!(out.plots.len(), 3);
        assert_eq!(out.plots[0].file, "01-hexagon-0.csv");
    }

    #[test]
    fn command_errors_are_embedded() {
        let c = parse_config("f = x+y\ndomain = [0, 1, 0, 1]\ncommands = [hexagon(center = 0.1 0.5; eps = 0.1), curvature]")
            .unwrap();
        let out = run(&c, &Sequential);
        assert_eq!(out.report.results[0].status, Status::Error);
        assert_eq!(out.report.results[0].error.as_ref().unwrap().kind, "MarginViolation");
        assert_eq!(out.report.results[1].status, Status::Ok);
        assert_eq!(out.report.failed_commands(), 1);
    }

    #[test]
    fn rank_needs_g() {
        let c = parse_config("f = x+y\ndomain = [1, 2, 1, 2]\ncommands = [rank]").unwrap();
        let out = run(&c, &Sequential);
        assert_eq!(out.report.results[0].error.as_ref().unwrap().kind, "MissingSecondFunction");
    }

    #[test]
    fn area_plots_follow_levels() {
        let c = parse_config(
            "f = x+y\ndomain = [1, 2, 1/2, 5]\ncommands = [area-test(u = x; v = x*y; u_levels = 1.1 1.5 1.9; v_levels = 2 2.5 3)]",
        )
        .unwrap();
        let out = run(&c, &Sequential);
        assert_eq!(out.report.failed_commands(), 0, "{:?}", out.report.results);
        assert_eq!(out.plots.len(), 6);
        for (x, y) in &out.plots[4].points {
            assert!((x * y - 2.5).abs() < 1e-10);
        }
        assert!(out.plots.iter().all(|p| p.points.len() > 10));
    }
}

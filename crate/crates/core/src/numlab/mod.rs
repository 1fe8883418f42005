//! Numerical checks: finite differences, hexagon closure and the area
//! condition.

use alloc::vec::Vec;

mod area;
mod fd;
mod hexagon;
mod trace;

pub use area::{area_condition, area_condition_with, quad_area, quad_area_with, AreaReport, AreaVerdict, Cell};
pub use fd::{fd_check, Derivative};
pub use hexagon::{
    compare_centers, hexagon_defect, hexagon_scaling, hexagon_scaling_with, CenterComparison,
    HexagonScaling, HexagonTrace, ScalingRow,
};
pub use trace::{level_polyline, trace_level_curve, Line, TracePoint, TRACE_TOL, TRACE_WIDTH};

/// Runs independent jobs, returning results in input order.
pub trait Executor: Sync {
    fn map<T, R, F>(&self, items: Vec<T>, f: F) -> Vec<R>
    where
        T: Send,
        R: Send,
        F: Fn(T) -> R + Sync + Send;
}

/// Runs jobs one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map<T, R, F>(&self, items: Vec<T>, f: F) -> Vec<R>
    where
        T: Send,
        R: Send,
        F: Fn(T) -> R + Sync + Send,
    {
        items.into_iter().map(f).collect()
    }
}

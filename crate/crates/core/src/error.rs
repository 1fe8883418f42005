use alloc::string::String;
use thiserror::Error;

/// Errors raised anywhere in the symbolic or numeric layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("frame symbol {0} cannot be differentiated by a coordinate")]
    FrameSymbolPresent(String),

    #[error("unbound symbol {0}")]
    UnboundSymbol(String),

    #[error("domain violation: {0}")]
    DomainViolation(String),

    #[error("no valid sample point found")]
    AllPointsSingular,

    #[error("expression is not affine in the w-jet: {0}")]
    NonAffineWJet(String),

    #[error("w-jet order overflow: w''' cannot be differentiated")]
    JetOrderOverflow,

    #[error("nondegeneracy violation: {what}{}", point_suffix(.point))]
    NondegeneracyViolation {
        what: String,
        point: Option<(f64, f64)>,
    },

    #[error("web has no second function g")]
    MissingSecondFunction,

    #[error("relation rewriting did not reach a fixed point within {0} iterations")]
    NonTerminatingRelationCycle(usize),

    #[error("finite-difference step {0} outside [1e-7, 1e-3]")]
    StepOutOfRange(f64),

    #[error("no sign change of {what} on the bracket")]
    NoSignChange { what: String },

    #[error("margin violation: {0}")]
    MarginViolation(String),

    #[error("quadrature did not converge up to n = {n} (last difference {last_diff:e})")]
    NoConvergence { n: usize, last_diff: f64 },

    #[error("empty cell (area {area:e})")]
    EmptyCell { area: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

fn point_suffix(point: &Option<(f64, f64)>) -> String {
    match point {
        Some((x, y)) => alloc::format!(" at ({x}, {y})"),
        None => String::new(),
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

//! Reference webs used by the identity suite and the tests.

use alloc::vec::Vec;

use crate::error::Result;
use crate::expr::{parse_expr, q_frac};
use crate::frame::{Rect, WebSpec};

/// A web given by source text. Domain corners are fractions `(p, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub f: &'static str,
    pub g: Option<&'static str>,
    pub domain: [(i64, i64); 4],
}

impl CorpusEntry {
    pub fn build(&self) -> Result<WebSpec> {
        let q = |(p, d): (i64, i64)| q_frac(p, d);
        let [x0, x1, y0, y1] = self.domain;
        let rect = Rect::new(q(x0), q(x1), q(y0), q(y1))?;
        let f = parse_expr(self.f)?;
        let g = self.g.map(parse_expr).transpose()?;
        WebSpec::new(self.name, f, g, rect)
    }
}

const fn ints(x0: i64, x1: i64, y0: i64, y1: i64) -> [(i64, i64); 4] {
    [(x0, 1), (x1, 1), (y0, 1), (y1, 1)]
}

pub const CORPUS: &[CorpusEntry] = &[
    CorpusEntry { name: "sum-product", f: "x+y", g: Some("x*y"), domain: ints(1, 2, 3, 4) },
    CorpusEntry { name: "sum-difference", f: "x+y", g: Some("x-y"), domain: ints(1, 2, 1, 2) },
    CorpusEntry { name: "product-sum", f: "x*y", g: Some("x+y"), domain: ints(1, 2, 3, 4) },
    CorpusEntry { name: "exp-product", f: "exp(x+y)", g: Some("x*y"), domain: ints(1, 2, 3, 4) },
    CorpusEntry {
        name: "quadratic-difference",
        f: "x^2+x*y+y^2",
        g: Some("x-y"),
        domain: [(1, 2), (3, 2), (-1, 5), (6, 5)],
    },
    CorpusEntry { name: "lagrangian-cubic", f: "x^2+y", g: Some("x+y^2"), domain: ints(1, 2, 1, 2) },
    CorpusEntry { name: "squares-product", f: "x^2+y^2", g: Some("x*y"), domain: ints(1, 2, 3, 4) },
    CorpusEntry { name: "cubes", f: "x^3+y", g: Some("x+y^3"), domain: ints(1, 2, 1, 2) },
    CorpusEntry { name: "bilinear", f: "x*y+x", g: Some("x+2*y"), domain: ints(1, 2, 3, 4) },
    CorpusEntry { name: "mixed-cubic", f: "x*y^2+x", g: Some("x*y"), domain: ints(1, 2, 3, 4) },
    CorpusEntry { name: "sum-quadratic", f: "x+y", g: Some("x^2+x*y+y^2"), domain: ints(1, 2, 3, 4) },
    CorpusEntry { name: "exp-shift", f: "exp(x)+y", g: Some("x+y"), domain: ints(1, 2, 1, 2) },
    CorpusEntry {
        name: "quadratic",
        f: "x^2+x*y+y^2",
        g: None,
        domain: [(1, 2), (3, 2), (-1, 5), (3, 2)],
    },
];

/// All corpus webs, validated.
pub fn corpus() -> Vec<WebSpec> {
    CORPUS
        .iter()
        .map(|e| e.build().expect("corpus webs are nondegenerate"))
        .collect()
}

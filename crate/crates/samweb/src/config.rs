//! Job files: line-oriented `key = value` text with `#` comments.
//!
//! ```text
//! name = sum-product
//! f = x+y
//! g = x*y
//! domain = [1, 2, 3, 4]
//! commands = [curvature, rank,
//!             hexagon(center = 1 0.2; eps = 0.1 0.05)]
//! ```
//!
//! A bracketed value may continue over several lines.

use std::path::Path;

use samweb_core::expr::{parse_expr, Expr, Q};
use samweb_core::frame::{Rect, WebSpec};
use samweb_core::samwebs::lagrangian_web;
use samweb_core::Error as CoreError;

/// Seed used when the job file does not set one.
pub const DEFAULT_SEED: u64 = 1_513_295_360;
const DEFAULT_AREA_TOL: f64 = 1e-6;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Web(CoreError),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

fn parse_err(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError::Parse {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HexagonParams {
    pub center: (f64, f64),
    pub eps: Vec<f64>,
    /// Second center for a side-by-side comparison.
    pub compare: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AreaParams {
    pub u: Expr,
    pub v: Expr,
    pub u_levels: [f64; 3],
    pub v_levels: [f64; 3],
    /// Defaults to the web's domain.
    pub domain: Option<Rect>,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Curvature,
    Rank,
    Identities,
    Hexagon(HexagonParams),
    AreaTest(Box<AreaParams>),
}

/// A validated job. The web is built eagerly, so nondegeneracy problems are
/// reported before any command runs.
#[derive(Debug, Clone)]
pub struct JobConfig {
    pub name: String,
    pub f: Option<String>,
    pub g: Option<String>,
    pub s: Option<String>,
    pub domain_text: [String; 4],
    pub seed: u64,
    /// Source text of each command, for the report.
    pub command_text: Vec<String>,
    pub commands: Vec<Command>,
    pub web: WebSpec,
}

pub fn load_config(path: &Path) -> Result<JobConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}

/// Logical `key = value` entries with the line each starts on.
fn entries(text: &str) -> Result<Vec<(usize, String, String)>, ConfigError> {
    let mut out: Vec<(usize, String, String)> = Vec::new();
    let mut open: Option<(usize, String, String)> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if let Some((start, key, mut value)) = open.take() {
            value.push(' ');
            value.push_str(line);
            if depth(&value) <= 0 {
                out.push((start, key, value));
            } else {
                open = Some((start, key, value));
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| parse_err(i + 1, format!("expected `key = value`, found `{line}`")))?;
        let (key, value) = (key.trim().to_string(), value.trim().to_string());
        if depth(&value) > 0 {
            open = Some((i + 1, key, value));
        } else {
            out.push((i + 1, key, value));
        }
    }
    if let Some((start, key, _)) = open {
        return Err(parse_err(start, format!("unclosed bracket in `{key}`")));
    }
    Ok(out)
}

fn depth(s: &str) -> i32 {
    s.chars().fold(0, |d, c| match c {
        '[' | '(' => d + 1,
        ']' | ')' => d - 1,
        _ => d,
    })
}

fn bracketed(line: usize, value: &str) -> Result<&str, ConfigError> {
    value
        .strip_prefix('[')
        .and_then(|v| v.strip_suffix(']'))
        .ok_or_else(|| parse_err(line, format!("expected a bracketed list, found `{value}`")))
}

/// Splits on `sep` outside parentheses.
fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let (mut d, mut start) = (0i32, 0usize);
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' => d += 1,
            ')' | ']' => d -= 1,
            c if c == sep && d == 0 => {
                parts.push(s[start..i].trim());
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    parts.push(s[start..].trim());
    parts.into_iter().filter(|p| !p.is_empty()).collect()
}

fn expr(line: usize, text: &str) -> Result<Expr, ConfigError> {
    parse_expr(text).map_err(|e| parse_err(line, format!("in `{text}`: {e}")))
}

fn rational(line: usize, text: &str) -> Result<Q, ConfigError> {
    expr(line, text)?
        .as_const()
        .cloned()
        .ok_or_else(|| parse_err(line, format!("`{text}` is not a rational number")))
}

fn float(line: usize, text: &str) -> Result<f64, ConfigError> {
    text.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| parse_err(line, format!("`{text}` is not a number")))
}

fn floats(line: usize, text: &str) -> Result<Vec<f64>, ConfigError> {
    text.split_whitespace().map(|t| float(line, t)).collect()
}

fn rect(line: usize, parts: &[&str]) -> Result<Rect, ConfigError> {
    if parts.len() != 4 {
        return Err(parse_err(line, "a domain needs four numbers x0 x1 y0 y1"));
    }
    let q: Vec<Q> = parts.iter().map(|p| rational(line, p)).collect::<Result<_, _>>()?;
    Rect::new(q[0].clone(), q[1].clone(), q[2].clone(), q[3].clone())
        .map_err(|e| parse_err(line, e.to_string()))
}

fn params(line: usize, body: &str) -> Result<Vec<(String, String)>, ConfigError> {
    split_top(body, ';')
        .into_iter()
        .map(|p| {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| parse_err(line, format!("expected `name = value` in `{p}`")))?;
            Ok((k.trim().to_string(), v.trim().to_string()))
        })
        .collect()
}

fn three(line: usize, text: &str, what: &str) -> Result<[f64; 3], ConfigError> {
    let v = floats(line, text)?;
    v.try_into()
        .map_err(|_| parse_err(line, format!("{what} needs exactly three values")))
}

fn point(line: usize, text: &str, what: &str) -> Result<(f64, f64), ConfigError> {
    match floats(line, text)?.as_slice() {
        [x, y] => Ok((*x, *y)),
        _ => Err(parse_err(line, format!("{what} needs two coordinates"))),
    }
}

fn command(line: usize, text: &str, web: &WebSpec) -> Result<Command, ConfigError> {
    let (head, body) = match text.find('(') {
        Some(i) => {
            let body = text[i + 1..]
                .strip_suffix(')')
                .ok_or_else(|| parse_err(line, format!("unbalanced parentheses in `{text}`")))?;
            (text[..i].trim(), Some(body))
        }
        None => (text.trim(), None),
    };
    let unknown = |k: &str| parse_err(line, format!("unknown parameter `{k}` for {head}"));
    match (head, body) {
        ("curvature", None) => Ok(Command::Curvature),
        ("rank", None) => Ok(Command::Rank),
        ("identities", None) => Ok(Command::Identities),
        ("hexagon", Some(body)) => {
            let (mut center, mut eps, mut compare) = (None, None, None);
            for (k, v) in params(line, body)? {
                match k.as_str() {
                    "center" => center = Some(point(line, &v, "center")?),
                    "eps" => eps = Some(floats(line, &v)?),
                    "compare" => compare = Some(point(line, &v, "compare")?),
                    _ => return Err(unknown(&k)),
                }
            }
            let eps = eps.ok_or_else(|| parse_err(line, "hexagon needs `eps`"))?;
            if eps.is_empty() || eps.iter().any(|e| *e <= 0.0) {
                return Err(parse_err(line, "hexagon eps must be positive"));
            }
            Ok(Command::Hexagon(HexagonParams {
                center: center.ok_or_else(|| parse_err(line, "hexagon needs `center`"))?,
                eps,
                compare,
            }))
        }
        ("area-test", Some(body)) => {
            let mut u = Some(web.f().clone());
            let mut v = web.g().cloned();
            let (mut ul, mut vl, mut domain, mut tol) = (None, None, None, DEFAULT_AREA_TOL);
            for (k, val) in params(line, body)? {
                match k.as_str() {
                    "u" => u = Some(expr(line, &val)?),
                    "v" => v = Some(expr(line, &val)?),
                    "u_levels" => ul = Some(three(line, &val, "u_levels")?),
                    "v_levels" => vl = Some(three(line, &val, "v_levels")?),
                    "domain" => domain = Some(rect(line, &val.split_whitespace().collect::<Vec<_>>())?),
                    "tol" => tol = float(line, &val)?,
                    _ => return Err(unknown(&k)),
                }
            }
            Ok(Command::AreaTest(Box::new(AreaParams {
                u: u.expect("defaults to f"),
                v: v.ok_or_else(|| parse_err(line, "area-test needs `v` when the web has no g"))?,
                u_levels: ul.ok_or_else(|| parse_err(line, "area-test needs `u_levels`"))?,
                v_levels: vl.ok_or_else(|| parse_err(line, "area-test needs `v_levels`"))?,
                domain,
                tol,
            })))
        }
        _ => Err(parse_err(line, format!("unknown command `{text}`"))),
    }
}

pub fn parse_config(text: &str) -> Result<JobConfig, ConfigError> {
    let mut name = None;
    let (mut f, mut g, mut s) = (None, None, None);
    let mut domain = None;
    let mut seed = DEFAULT_SEED;
    let mut commands = None;
    for (line, key, value) in entries(text)? {
        let slot_taken = |taken: bool| {
            if taken {
                Err(parse_err(line, format!("duplicate key `{key}`")))
            } else {
                Ok(())
            }
        };
        match key.as_str() {
            "name" => {
                slot_taken(name.is_some())?;
                name = Some(value);
            }
            "f" => {
                slot_taken(f.is_some())?;
                f = Some((line, value));
            }
            "g" => {
                slot_taken(g.is_some())?;
                g = Some((line, value));
            }
            "S" => {
                slot_taken(s.is_some())?;
                s = Some((line, value));
            }
            "domain" => {
                slot_taken(domain.is_some())?;
                let parts = split_top(bracketed(line, &value)?, ',');
                let r = rect(line, &parts)?;
                let text: [String; 4] = std::array::from_fn(|i| parts[i].to_string());
                domain = Some((r, text));
            }
            "seed" => {
                seed = value
                    .parse()
                    .map_err(|_| parse_err(line, format!("seed `{value}` is not a 64-bit integer")))?;
            }
            "commands" => {
                slot_taken(commands.is_some())?;
                let items: Vec<String> = split_top(bracketed(line, &value)?, ',')
                    .into_iter()
                    .map(String::from)
                    .collect();
                commands = Some((line, items));
            }
            _ => return Err(parse_err(line, format!("unknown key `{key}`"))),
        }
    }

    let (domain, domain_text) = domain.ok_or_else(|| parse_err(0, "missing `domain`"))?;
    let name = name.unwrap_or_else(|| "web".into());
    let web = match (&f, &g, &s) {
        (Some(_), _, Some((line, _))) | (None, Some(_), Some((line, _))) => {
            return Err(parse_err(*line, "`S` cannot be combined with `f` or `g`"))
        }
        (None, _, None) => return Err(parse_err(0, "one of `f` or `S` is required")),
        (Some((lf, ft)), g, None) => {
            let fe = expr(*lf, ft)?;
            let ge = g.as_ref().map(|(lg, gt)| expr(*lg, gt)).transpose()?;
            WebSpec::new(&name, fe, ge, domain).map_err(ConfigError::Web)?
        }
        (None, None, Some((ls, st))) => lagrangian_web(&name, &expr(*ls, st)?, domain).map_err(ConfigError::Web)?,
    };

    let (cline, command_text) = commands.ok_or_else(|| parse_err(0, "missing `commands`"))?;
    if command_text.is_empty() {
        return Err(parse_err(cline, "`commands` is empty"));
    }
    let commands = command_text
        .iter()
        .map(|c| command(cline, c, &web))
        .collect::<Result<Vec<_>, _>>()?;

    Ok(JobConfig {
        name,
        f: f.map(|(_, t)| t),
        g: g.map(|(_, t)| t),
        s: s.map(|(_, t)| t),
        domain_text,
        seed,
        command_text,
        commands,
        web,
    })
}

impl JobConfig {
    pub fn is_nondegeneracy(err: &ConfigError) -> bool {
        matches!(err, ConfigError::Web(CoreError::NondegeneracyViolation { .. }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = "
# the sum/product web
name = sp
f = x+y
g = x*y
domain = [1, 2, 3, 4]
commands = [curvature, rank]
";

    #[test]
    fn basic_config() {
        let c = parse_config(BASIC).unwrap();
        assert_eq!(c.name, "sp");
        assert_eq!(c.seed, DEFAULT_SEED);
        assert_eq!(c.commands, vec![Command::Curvature, Command::Rank]);
        assert_eq!(c.web.b().unwrap(), &parse_expr("x/y").unwrap());
    }

    #[test]
    fn multiline_commands_with_parameters() {
        let c = parse_config(
            "f = x^2+x*y+y^2\ndomain = [1/2, 3/2, -0.2, 1.5]\nseed = 7\ncommands = [hexagon(center = 1 0.2;\n  eps = 0.1 0.05 0.025), curvature]\n",
        )
        .unwrap();
        assert_eq!(c.seed, 7);
        match &c.commands[0] {
            Command::Hexagon(h) => {
                assert_eq!(h.center, (1.0, 0.2));
                assert_eq!(h.eps, vec![0.1, 0.05, 0.025]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn area_test_parameters() {
        let c = parse_config(
            "f = x\ng = x*y\ndomain = [1, 2, 1/2, 5]\ncommands = [area-test(u_levels = 1 1.5 2; v_levels = 2 3 4)]",
        );
        // f_y vanishes for f = x.
        assert!(matches!(c, Err(ConfigError::Web(_))));
        let c = parse_config(
            "f = x+y\ndomain = [1, 2, 1/2, 5]\ncommands = [area-test(u = x; v = x*y; u_levels = 1 1.5 2; v_levels = 2 3 4)]",
        )
        .unwrap();
        match &c.commands[0] {
            Command::AreaTest(a) => {
                assert_eq!(a.v, parse_expr("x*y").unwrap());
                assert_eq!(a.u_levels, [1.0, 1.5, 2.0]);
                assert_eq!(a.tol, 1e-6);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn potential_generates_the_web() {
        let c = parse_config("S = x^3/3 + x*y + y^3/3\ndomain = [1, 2, 1, 2]\ncommands = [rank]").unwrap();
        assert_eq!(c.web.g().unwrap(), &parse_expr("x+y^2").unwrap());
    }

    #[test]
    fn errors_carry_lines() {
        let err = parse_config("f = x+y\nS = x*y\ndomain = [1,2,1,2]\ncommands = [rank]").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 2, .. }), "{err}");
        let err = parse_config("f = x+\ndomain = [1,2,1,2]\ncommands = [rank]").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 1, .. }), "{err}");
        let err = parse_config("f = x+y\ndomain = [1,2,1,2]\ncommands = [spin]").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 3, .. }), "{err}");
        let err = parse_config("f = x+y\ndomain = [1,2,1,2]\nfoo = 1\ncommands = [rank]").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 3, .. }), "{err}");
        assert!(parse_config("f = x+y\ndomain = [1,2,1,2]\ncommands = [rank").is_err());
        assert!(parse_config("f = x+y\ndomain = [1,2,1,2]\ncommands = []").is_err());
    }

    #[test]
    fn dependent_g_is_a_nondegeneracy_error() {
        let err = parse_config("f = x+y\ng = 2*(x+y)\ndomain = [1,2,3,4]\ncommands = [rank]").unwrap_err();
        assert!(JobConfig::is_nondegeneracy(&err), "{err}");
    }
}

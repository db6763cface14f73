//! Plain-text problem and vector files.
//!
//! ```text
//! # comment
//! n 3
//! p 2
//! d 2.5
//! alpha 1.0,0.5
//! beta 0.3,2.0
//! t
//! 0.0
//! 0.4
//! 1.1
//! ```
//!
//! Vector files hold one value per line. Blank lines and `#` comments are
//! ignored everywhere.

use crate::error::CliError;
use ess_core::ExponentialKernelSpec;
use std::fmt::Write as _;

/// Shortest representation that parses back to the same bits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

struct Cursor<'a> {
    path: &'a str,
}

impl Cursor<'_> {
    fn err(&self, line: usize, column: usize, message: impl Into<String>) -> CliError {
        CliError::Parse { path: self.path.to_string(), line, column, message: message.into() }
    }

    fn float(&self, tok: &str, line: usize, column: usize) -> Result<f64, CliError> {
        tok.parse::<f64>().map_err(|_| self.err(line, column, format!("expected a number, found `{tok}`")))
    }

    fn list(&self, rest: &str, line: usize, column: usize) -> Result<Vec<f64>, CliError> {
        let mut out = Vec::new();
        let mut col = column;
        for piece in rest.split(',') {
            let lead = piece.len() - piece.trim_start().len();
            out.push(self.float(piece.trim(), line, col + lead)?);
            col += piece.len() + 1;
        }
        Ok(out)
    }
}

/// Non-blank, non-comment lines with their 1-based line numbers and the
/// 1-based column of their first character.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let trimmed = body.trim();
        (!trimmed.is_empty()).then(|| (i + 1, body.len() - body.trim_start().len() + 1, trimmed))
    })
}

pub fn parse_problem(text: &str, path: &str) -> Result<ExponentialKernelSpec, CliError> {
    let cur = Cursor { path };
    let mut n: Option<usize> = None;
    let mut p: Option<usize> = None;
    let mut d: Option<f64> = None;
    let mut alpha: Option<Vec<f64>> = None;
    let mut beta: Option<Vec<f64>> = None;
    let mut t: Vec<f64> = Vec::new();
    let mut in_t = false;
    let mut last_line = 0;

    for (line, col, body) in content_lines(text) {
        last_line = line;
        if in_t {
            let v = cur.float(body, line, col)?;
            if let Some(&prev) = t.last() {
                if !(v > prev) {
                    return Err(cur.err(line, col, format!("t must be strictly increasing ({v} after {prev})")));
                }
            }
            t.push(v);
            continue;
        }
        let (key, rest) = body.split_once(char::is_whitespace).unwrap_or((body, ""));
        let rest_col = col + body.len() - rest.trim_start().len();
        let rest = rest.trim();
        let need_value = |rest: &str| {
            if rest.is_empty() {
                Err(cur.err(line, col + key.len(), format!("`{key}` needs a value")))
            } else {
                Ok(())
            }
        };
        let dup = || cur.err(line, col, format!("duplicate `{key}` header"));
        match key {
            "n" | "p" => {
                need_value(rest)?;
                let v = rest
                    .parse::<usize>()
                    .map_err(|_| cur.err(line, rest_col, format!("expected a non-negative integer, found `{rest}`")))?;
                let slot = if key == "n" { &mut n } else { &mut p };
                if slot.replace(v).is_some() {
                    return Err(dup());
                }
            }
            "d" => {
                need_value(rest)?;
                if d.replace(cur.float(rest, line, rest_col)?).is_some() {
                    return Err(dup());
                }
            }
            "alpha" | "beta" => {
                need_value(rest)?;
                let v = cur.list(rest, line, rest_col)?;
                let slot = if key == "alpha" { &mut alpha } else { &mut beta };
                if slot.replace(v).is_some() {
                    return Err(dup());
                }
            }
            "t" => {
                if !rest.is_empty() {
                    return Err(cur.err(line, rest_col, "`t` takes no value; list times one per line below it"));
                }
                in_t = true;
            }
            _ => return Err(cur.err(line, col, format!("unknown header `{key}`"))),
        }
    }

    let eof = last_line + 1;
    let missing = |what: &str| cur.err(eof, 1, format!("missing `{what}`"));
    let n = n.ok_or_else(|| missing("n"))?;
    let p = p.ok_or_else(|| missing("p"))?;
    let d = d.ok_or_else(|| missing("d"))?;
    let alpha = alpha.ok_or_else(|| missing("alpha"))?;
    let beta = beta.ok_or_else(|| missing("beta"))?;
    if !in_t {
        return Err(missing("t"));
    }
    if alpha.len() != p || beta.len() != p {
        return Err(cur.err(eof, 1, format!("p is {p} but alpha has {} and beta {} entries", alpha.len(), beta.len())));
    }
    if t.len() != n {
        return Err(cur.err(eof, 1, format!("n is {n} but {} times were given", t.len())));
    }
    Ok(ExponentialKernelSpec::new(d, alpha, beta, t)?)
}

pub fn write_problem(k: &ExponentialKernelSpec) -> String {
    let join = |v: &[f64]| v.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(",");
    let mut s = String::new();
    let _ = writeln!(s, "n {}", k.n());
    let _ = writeln!(s, "p {}", k.p());
    let _ = writeln!(s, "d {}", fmt_f64(k.d()));
    let _ = writeln!(s, "alpha {}", join(k.alpha()));
    let _ = writeln!(s, "beta {}", join(k.beta()));
    s.push_str("t\n");
    for &t in k.t() {
        let _ = writeln!(s, "{}", fmt_f64(t));
    }
    s
}

pub fn parse_vector(text: &str, path: &str) -> Result<Vec<f64>, CliError> {
    let cur = Cursor { path };
    content_lines(text).map(|(line, col, body)| cur.float(body, line, col)).collect()
}

pub fn write_vector(v: &[f64]) -> String {
    let mut s = String::with_capacity(v.len() * 24);
    for &x in v {
        let _ = writeln!(s, "{}", fmt_f64(x));
    }
    s
}

//! Reader and writer for the alist sparse-matrix format.
//!
//! Layout: `N M`, then `max_bit_degree max_check_degree`, then the N bit
//! degrees, the M check degrees, N lines of 1-indexed check neighbors and M
//! lines of 1-indexed bit neighbors. Neighbor lines may be padded with
//! trailing zeros up to the maximum degree.

use std::fmt::Write as _;

use thiserror::Error;

use super::{CodeError, ParityCheckCode};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlistError {
    #[error("line {line}: malformed header: {reason}")]
    MalformedHeader { line: usize, reason: String },
    #[error("line {line}: invalid integer {token:?}")]
    InvalidInteger { line: usize, token: String },
    #[error("unexpected end of input, expected {expected}")]
    UnexpectedEof { expected: String },
    #[error("line {line}: {node} {index} declares degree {declared} but lists {found} neighbors")]
    DegreeMismatch {
        line: usize,
        node: &'static str,
        index: usize,
        declared: usize,
        found: usize,
    },
    #[error("line {line}: {node} {index} has degree {degree} above declared maximum {max}")]
    DegreeAboveMax {
        line: usize,
        node: &'static str,
        index: usize,
        degree: usize,
        max: usize,
    },
    #[error("line {line}: neighbor index {value} out of range 1..={bound}")]
    IndexOutOfRange {
        line: usize,
        value: usize,
        bound: usize,
    },
    #[error("line {line}: nonzero index {value} after zero padding")]
    IndexAfterPadding { line: usize, value: usize },
    #[error("line {line}: duplicate edge to index {value}")]
    DuplicateEdge { line: usize, value: usize },
    #[error("line {line}: trailing data after check lists")]
    TrailingData { line: usize },
    #[error("graph rejected: {0}")]
    Graph(#[from] CodeError),
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    /// Next non-blank line as `(1-based line number, integers)`.
    fn next_ints(&mut self, expected: &str) -> Result<(usize, Vec<usize>), AlistError> {
        for (idx, raw) in self.inner.by_ref() {
            let line = idx + 1;
            if raw.trim().is_empty() {
                continue;
            }
            let ints = raw
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>().map_err(|_| AlistError::InvalidInteger {
                        line,
                        token: t.to_string(),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            return Ok((line, ints));
        }
        Err(AlistError::UnexpectedEof {
            expected: expected.to_string(),
        })
    }
}

fn header_pair(lines: &mut Lines<'_>, what: &str) -> Result<(usize, usize), AlistError> {
    let (line, v) = lines.next_ints(what)?;
    match v.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(AlistError::MalformedHeader {
            line,
            reason: format!("expected two integers ({what}), found {}", v.len()),
        }),
    }
}

fn degree_line(
    lines: &mut Lines<'_>,
    count: usize,
    max: usize,
    node: &'static str,
) -> Result<Vec<usize>, AlistError> {
    let (line, v) = lines.next_ints(&format!("{node} degrees"))?;
    if v.len() != count {
        return Err(AlistError::MalformedHeader {
            line,
            reason: format!("expected {count} {node} degrees, found {}", v.len()),
        });
    }
    for (index, &degree) in v.iter().enumerate() {
        if degree > max {
            return Err(AlistError::DegreeAboveMax {
                line,
                node,
                index: index + 1,
                degree,
                max,
            });
        }
    }
    Ok(v)
}

fn neighbor_line(
    lines: &mut Lines<'_>,
    node: &'static str,
    index: usize,
    declared: usize,
    bound: usize,
) -> Result<Vec<usize>, AlistError> {
    let (line, v) = lines.next_ints(&format!("neighbor list of {node} {}", index + 1))?;
    let mut out = Vec::with_capacity(declared);
    let mut padding = false;
    for &x in &v {
        if x == 0 {
            padding = true;
            continue;
        }
        if padding {
            return Err(AlistError::IndexAfterPadding { line, value: x });
        }
        if x > bound {
            return Err(AlistError::IndexOutOfRange {
                line,
                value: x,
                bound,
            });
        }
        if out.contains(&(x - 1)) {
            return Err(AlistError::DuplicateEdge { line, value: x });
        }
        out.push(x - 1);
    }
    if out.len() != declared {
        return Err(AlistError::DegreeMismatch {
            line,
            node,
            index: index + 1,
            declared,
            found: out.len(),
        });
    }
    Ok(out)
}

/// Parses alist text into a code. Neighbor order is preserved.
pub fn parse_alist(text: &str) -> Result<ParityCheckCode, AlistError> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
    };
    let (n, m) = header_pair(&mut lines, "N M")?;
    let (max_bit, max_check) = header_pair(&mut lines, "max degrees")?;
    let bit_deg = degree_line(&mut lines, n, max_bit, "bit")?;
    let check_deg = degree_line(&mut lines, m, max_check, "check")?;

    let bits = bit_deg
        .iter()
        .enumerate()
        .map(|(i, &d)| neighbor_line(&mut lines, "bit", i, d, m))
        .collect::<Result<Vec<_>, _>>()?;
    let checks = check_deg
        .iter()
        .enumerate()
        .map(|(c, &d)| neighbor_line(&mut lines, "check", c, d, n))
        .collect::<Result<Vec<_>, _>>()?;

    if let Ok((line, _)) = lines.next_ints("") {
        return Err(AlistError::TrailingData { line });
    }
    Ok(ParityCheckCode::from_lists(&bits, &checks)?)
}

/// Emits a code in alist format, zero-padding neighbor lines.
pub fn to_alist(code: &ParityCheckCode) -> String {
    let mut s = String::new();
    let (mb, mc) = (code.max_bit_degree(), code.max_check_degree());
    let join = |it: &mut dyn Iterator<Item = usize>| {
        it.map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
    };
    let _ = writeln!(s, "{} {}", code.n_bits(), code.n_checks());
    let _ = writeln!(s, "{mb} {mc}");
    let _ = writeln!(
        s,
        "{}",
        join(&mut (0..code.n_bits()).map(|b| code.bit_degree(b)))
    );
    let _ = writeln!(
        s,
        "{}",
        join(&mut (0..code.n_checks()).map(|c| code.check_degree(c)))
    );
    for b in 0..code.n_bits() {
        let nb = code.bit_neighbors(b);
        let mut it = nb
            .iter()
            .map(|&c| c + 1)
            .chain(std::iter::repeat_n(0, mb - nb.len()));
        let _ = writeln!(s, "{}", join(&mut it));
    }
    for c in 0..code.n_checks() {
        let nc = code.check_neighbors(c);
        let mut it = nc
            .iter()
            .map(|&b| b + 1)
            .chain(std::iter::repeat_n(0, mc - nc.len()));
        let _ = writeln!(s, "{}", join(&mut it));
    }
    s
}

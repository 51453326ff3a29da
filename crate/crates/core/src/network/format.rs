//! Line-oriented text formats for networks and exact-cover instances.
//!
//! ```text
//! # toy network
//! triodes 2
//! wire 0.x 1.x
//! ```

use std::fmt;
use std::str::FromStr;

use super::{Axis, ExactCoverInstance, QubitRef, TriodeNetwork, Wire};
use crate::{Error, Result};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Non-empty lines with comments stripped, paired with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = body.split_whitespace().collect();
        (!tokens.is_empty()).then_some((i + 1, tokens))
    })
}

fn parse_usize(tok: &str, line: usize, what: &str) -> Result<usize> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("expected {what}, found {tok:?}")))
}

fn parse_ref(tok: &str, line: usize) -> Result<QubitRef> {
    let (t, ax) = tok
        .split_once('.')
        .ok_or_else(|| parse_err(line, format!("expected <triode>.<axis>, found {tok:?}")))?;
    let triode = parse_usize(t, line, "triode index")?;
    let mut chars = ax.chars();
    let axis = match (chars.next(), chars.next()) {
        (Some(c), None) if c.is_ascii_lowercase() => Axis::from_char(c),
        _ => None,
    }
    .ok_or_else(|| parse_err(line, format!("axis must be x, y or z, found {ax:?}")))?;
    Ok(QubitRef::new(triode, axis))
}

impl FromStr for TriodeNetwork {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let (line, header) = lines
            .next()
            .ok_or_else(|| parse_err(1, "missing `triodes <T>` header"))?;
        let triodes = match header.as_slice() {
            ["triodes", n] => parse_usize(n, line, "triode count")?,
            _ => return Err(parse_err(line, "expected `triodes <T>`")),
        };
        let mut wires: Vec<Wire> = Vec::new();
        for (line, toks) in lines {
            let (a, b) = match toks.as_slice() {
                ["wire", a, b] => (parse_ref(a, line)?, parse_ref(b, line)?),
                ["triodes", ..] => return Err(parse_err(line, "repeated `triodes` header")),
                _ => return Err(parse_err(line, "expected `wire <t>.<axis> <t>.<axis>`")),
            };
            for r in [a, b] {
                if r.triode >= triodes {
                    return Err(parse_err(
                        line,
                        format!("qubit {r} out of range for {triodes} triodes"),
                    ));
                }
            }
            let wire = Wire::new(a, b).map_err(|e| parse_err(line, e.to_string()))?;
            if wires.contains(&wire) {
                return Err(parse_err(line, format!("duplicate {wire}")));
            }
            wires.push(wire);
        }
        TriodeNetwork::new(triodes, wires)
    }
}

impl fmt::Display for TriodeNetwork {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "triodes {}", self.triode_count())?;
        for w in self.wires() {
            writeln!(f, "{w}")?;
        }
        Ok(())
    }
}

impl FromStr for ExactCoverInstance {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let (line, header) = lines
            .next()
            .ok_or_else(|| parse_err(1, "missing `vars <n>` header"))?;
        let vars = match header.as_slice() {
            ["vars", n] => parse_usize(n, line, "variable count")?,
            _ => return Err(parse_err(line, "expected `vars <n>`")),
        };
        let mut clauses = Vec::new();
        for (line, toks) in lines {
            let clause = match toks.as_slice() {
                ["clause", i, j, k] => [
                    parse_usize(i, line, "variable index")?,
                    parse_usize(j, line, "variable index")?,
                    parse_usize(k, line, "variable index")?,
                ],
                _ => return Err(parse_err(line, "expected `clause <i> <j> <k>`")),
            };
            ExactCoverInstance::check_clause(vars, clause)
                .map_err(|e| parse_err(line, e.to_string()))?;
            clauses.push(clause);
        }
        ExactCoverInstance::new(vars, clauses)
    }
}

impl fmt::Display for ExactCoverInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vars {}", self.variable_count())?;
        for [i, j, k] in self.clauses() {
            writeln!(f, "clause {i} {j} {k}")?;
        }
        Ok(())
    }
}

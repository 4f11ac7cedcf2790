//! The textual instance format and certificate lines.
//!
//! ```text
//! c a comment
//! p l3c <n> <m>
//! e <u> <v>
//! l <v> <c1> [<c2> [<c3>]]
//! ```
//!
//! Vertices are 1-indexed in files and 0-indexed everywhere else. Vertices
//! without an `l` line get `{1, 2, 3}`.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::instance::{Colour, ColourSet, Coloring, Instance};

/// A malformed input, located by 1-based line and column.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

struct Line<'a> {
    number: usize,
    tokens: Vec<(usize, &'a str)>,
}

impl Line<'_> {
    fn err(&self, token: usize, message: impl Into<String>) -> ParseError {
        let column = self.tokens.get(token).map_or_else(|| self.tokens.last().map_or(1, |t| t.0 + t.1.len()), |t| t.0);
        ParseError { line: self.number, column, message: message.into() }
    }

    fn number(&self, token: usize, what: &str) -> Result<usize, ParseError> {
        let Some(&(_, text)) = self.tokens.get(token) else {
            return Err(self.err(token, format!("missing {what}")));
        };
        text.parse().map_err(|_| self.err(token, format!("{what} `{text}` is not a non-negative integer")))
    }

    fn vertex(&self, token: usize, n: usize) -> Result<usize, ParseError> {
        let v = self.number(token, "vertex")?;
        if v == 0 || v > n {
            return Err(self.err(token, format!("vertex {v} outside 1..={n}")));
        }
        Ok(v - 1)
    }
}

fn lines(text: &str) -> impl Iterator<Item = Line<'_>> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let mut tokens = Vec::new();
        let mut start = None;
        for (j, ch) in raw.char_indices().chain(std::iter::once((raw.len(), ' '))) {
            match (ch.is_whitespace(), start) {
                (false, None) => start = Some(j),
                (true, Some(s)) => {
                    tokens.push((s + 1, &raw[s..j]));
                    start = None;
                }
                _ => {}
            }
        }
        let skip = tokens.is_empty() || tokens[0].1 == "c";
        (!skip).then_some(Line { number: i + 1, tokens })
    })
}

pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    let mut seen_edges = HashSet::new();
    let mut lists: Vec<Option<ColourSet>> = Vec::new();
    let mut last_line = 0;
    for line in lines(text) {
        last_line = line.number;
        let kind = line.tokens[0].1;
        match (kind, header) {
            ("p", None) => {
                if line.tokens.get(1).map(|t| t.1) != Some("l3c") {
                    return Err(line.err(1, "expected `p l3c <n> <m>`"));
                }
                let n = line.number(2, "vertex count")?;
                let m = line.number(3, "edge count")?;
                if line.tokens.len() > 4 {
                    return Err(line.err(4, "trailing tokens after header"));
                }
                header = Some((n, m));
                lists = vec![None; n];
            }
            ("p", Some(_)) => return Err(line.err(0, "duplicate header")),
            (_, None) => return Err(line.err(0, "expected header `p l3c <n> <m>` first")),
            ("e", Some((n, _))) => {
                if line.tokens.len() != 3 {
                    return Err(line.err(line.tokens.len().min(3), "expected `e <u> <v>`"));
                }
                let u = line.vertex(1, n)?;
                let v = line.vertex(2, n)?;
                if u == v {
                    return Err(line.err(2, format!("self-loop at vertex {}", u + 1)));
                }
                if !seen_edges.insert((u.min(v), u.max(v))) {
                    return Err(line.err(0, format!("duplicate edge {} {}", u + 1, v + 1)));
                }
                edges.push((u, v));
            }
            ("l", Some((n, _))) => {
                let v = line.vertex(1, n)?;
                if lists[v].is_some() {
                    return Err(line.err(0, format!("duplicate list for vertex {}", v + 1)));
                }
                let count = line.tokens.len() - 2;
                if count == 0 {
                    return Err(line.err(2, "a list needs at least one colour"));
                }
                if count > 3 {
                    return Err(line.err(5, "a list has at most three colours"));
                }
                let mut set = ColourSet::EMPTY;
                for k in 2..line.tokens.len() {
                    let c = line.number(k, "colour")?;
                    let colour = u8::try_from(c).ok().and_then(Colour::new).ok_or_else(|| line.err(k, format!("colour {c} outside 1..=3")))?;
                    if set.contains(colour) {
                        return Err(line.err(k, format!("colour {c} repeated")));
                    }
                    set = set.with(colour);
                }
                lists[v] = Some(set);
            }
            (other, Some(_)) => return Err(line.err(0, format!("unknown line type `{other}`"))),
        }
    }
    let Some((n, m)) = header else {
        return Err(ParseError { line: last_line.max(1), column: 1, message: "missing header `p l3c <n> <m>`".into() });
    };
    if edges.len() != m {
        return Err(ParseError {
            line: last_line.max(1),
            column: 1,
            message: format!("header declares {m} edges, found {}", edges.len()),
        });
    }
    let graph = Graph::from_edges(n, edges).expect("edges validated");
    let lists = lists.into_iter().map(|l| l.unwrap_or(ColourSet::FULL)).collect();
    Ok(Instance::new(graph, lists).expect("one list per vertex"))
}

/// The instance in file form. Full lists are left implicit; empty lists
/// have no file form.
pub fn write_instance(inst: &Instance) -> Result<String> {
    let g = inst.graph();
    let mut out = String::new();
    writeln!(out, "p l3c {} {}", g.vertex_count(), g.edge_count()).unwrap();
    for (u, v) in g.edges() {
        writeln!(out, "e {} {}", u + 1, v + 1).unwrap();
    }
    for (v, &l) in inst.lists().iter().enumerate() {
        if l.is_empty() {
            return Err(Error::ListTooSmall { vertex: v, size: 0, min: 1 });
        }
        if l != ColourSet::FULL {
            write!(out, "l {}", v + 1).unwrap();
            for c in l.iter() {
                write!(out, " {c}").unwrap();
            }
            out.push('\n');
        }
    }
    Ok(out)
}

/// `s YES` followed by one `v <vertex> <colour>` line per vertex, or
/// `s NO`.
pub fn write_solution(colouring: Option<&Coloring>) -> String {
    let mut out = String::new();
    match colouring {
        Some(c) => {
            out.push_str("s YES\n");
            for (v, col) in c.0.iter().enumerate() {
                writeln!(out, "v {} {}", v + 1, col).unwrap();
            }
        }
        None => out.push_str("s NO\n"),
    }
    out
}

/// Reads `v <vertex> <colour>` lines for an `n`-vertex instance. `s` and
/// `c` lines are ignored.
pub fn parse_certificate(text: &str, n: usize) -> Result<Coloring, ParseError> {
    let mut colours: Vec<Option<Colour>> = vec![None; n];
    let mut last_line = 0;
    for line in lines(text) {
        last_line = line.number;
        match line.tokens[0].1 {
            "s" => continue,
            "v" => {
                if line.tokens.len() != 3 {
                    return Err(line.err(line.tokens.len().min(3), "expected `v <vertex> <colour>`"));
                }
                let v = line.vertex(1, n)?;
                let c = line.number(2, "colour")?;
                let colour = u8::try_from(c).ok().and_then(Colour::new).ok_or_else(|| line.err(2, format!("colour {c} outside 1..=3")))?;
                if colours[v].replace(colour).is_some() {
                    return Err(line.err(0, format!("vertex {} coloured twice", v + 1)));
                }
            }
            other => return Err(line.err(0, format!("unknown line type `{other}`"))),
        }
    }
    if let Some(v) = colours.iter().position(Option::is_none) {
        return Err(ParseError { line: last_line.max(1), column: 1, message: format!("vertex {} has no colour", v + 1) });
    }
    Ok(Coloring(colours.into_iter().map(Option::unwrap).collect()))
}

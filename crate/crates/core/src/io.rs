//! Line-oriented graph text format.
//!
//! ```text
//! # comment
//! p cgraph <n> <m>
//! c <v> <color>        (optional; unlisted vertices have color 0)
//! e <u> <v> [mult]     (each undirected edge once; mult defaults to 1)
//! ```
//!
//! [`save`] writes color lines for nonzero colors only and edges as
//! `u < v` in increasing order, so `save(&load(text)?)` is a normal form
//! and `load(&save(g))` returns `g`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{ColoredGraph, GraphBuilder};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| parse_err(line, format!("bad {what} {tok:?}")))
}

pub fn load(text: &str) -> Result<ColoredGraph> {
    let mut header: Option<(usize, usize)> = None;
    let mut builder = GraphBuilder::new(0);
    let mut colored: Vec<bool> = Vec::new();
    let mut edge_lines = 0usize;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut toks = content.split_whitespace();
        let tag = toks.next().unwrap();
        match tag {
            "p" => {
                if header.is_some() {
                    return Err(parse_err(line, "second header"));
                }
                let kind: String = field(toks.next(), line, "format name")?;
                if kind != "cgraph" {
                    return Err(parse_err(line, format!("unknown format {kind:?}")));
                }
                let n: usize = field(toks.next(), line, "vertex count")?;
                let m: usize = field(toks.next(), line, "edge count")?;
                header = Some((n, m));
                builder = GraphBuilder::new(n);
                colored = vec![false; n];
            }
            "c" | "e" => {
                let (n, _) = header.ok_or_else(|| parse_err(line, "line before header"))?;
                let u: usize = field(toks.next(), line, "vertex")?;
                if u >= n {
                    return Err(parse_err(line, format!("vertex {u} out of range")));
                }
                if tag == "c" {
                    let color: u32 = field(toks.next(), line, "color")?;
                    if std::mem::replace(&mut colored[u], true) {
                        return Err(parse_err(line, format!("vertex {u} colored twice")));
                    }
                    builder.color(u, color);
                } else {
                    let v: usize = field(toks.next(), line, "vertex")?;
                    if v >= n {
                        return Err(parse_err(line, format!("vertex {v} out of range")));
                    }
                    if u == v {
                        return Err(parse_err(line, format!("self-loop at vertex {u}")));
                    }
                    let mult: u32 = match toks.next() {
                        Some(t) => field(Some(t), line, "multiplicity")?,
                        None => 1,
                    };
                    if !(1..=255).contains(&mult) {
                        return Err(parse_err(
                            line,
                            format!("multiplicity {mult} outside 1..=255"),
                        ));
                    }
                    builder.edge_mult(u, v, mult);
                    edge_lines += 1;
                }
            }
            other => return Err(parse_err(line, format!("unknown line type {other:?}"))),
        }
        if toks.next().is_some() {
            return Err(parse_err(line, "trailing tokens"));
        }
    }

    let (_, m) = header.ok_or_else(|| parse_err(0, "missing header line"))?;
    if m != edge_lines {
        return Err(parse_err(
            0,
            format!("header declares {m} edges, found {edge_lines}"),
        ));
    }
    builder.build()
}

pub fn save(g: &ColoredGraph) -> String {
    let mut out = String::new();
    writeln!(out, "p cgraph {} {}", g.n(), g.num_edges()).unwrap();
    for v in 0..g.n() {
        if g.color(v) != 0 {
            writeln!(out, "c {v} {}", g.color(v)).unwrap();
        }
    }
    for (u, v, m) in g.edges() {
        if m == 1 {
            writeln!(out, "e {u} {v}").unwrap();
        } else {
            writeln!(out, "e {u} {v} {m}").unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    #[test]
    fn smallest_graph() {
        let g = load("p cgraph 2 1\ne 0 1\n").unwrap();
        assert_eq!(g, generators::complete(2));
        assert_eq!(g.colors(), &[0, 0]);
    }

    #[test]
    fn pentagon_file() {
        let text = "# C5\np cgraph 5 5\ne 0 1\ne 1 2\ne 2 3\ne 3 4\ne 0 4 # closing edge\n";
        let g = load(text).unwrap();
        assert_eq!(g.n(), 5);
        assert_eq!(g.num_edges(), 5);
        assert!(g.edges().all(|(_, _, m)| m == 1));
        assert_eq!(g, generators::cycle(5).unwrap());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = load("p cgraph 2 1\ne 0 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, ref msg } if msg.contains("self-loop")));
        let err = load("p cgraph 2 1\n\ne 0 x\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        assert!(matches!(load("e 0 1\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(
            load("p cgraph 2 2\ne 0 1\n"),
            Err(Error::Parse { .. })
        ));
        assert_eq!(
            load("p cgraph 2 2\ne 0 1\ne 1 0\n"),
            Err(Error::DuplicateEdge(0, 1))
        );
        assert_eq!(
            load("p cgraph 2 0\nc 1 2\n"),
            Err(Error::NonContiguousColors)
        );
    }

    #[test]
    fn colors_and_multiplicities_round_trip() {
        let text = "p cgraph 3 2\nc 1 1\ne 0 1 2\ne 1 2\n";
        let g = load(text).unwrap();
        assert_eq!(g.colors(), &[0, 1, 0]);
        assert_eq!(g.multiplicity(0, 1), 2);
        assert_eq!(save(&g), text);
    }
}

//! Edge-list text format.
//!
//! ```text
//! # n=4 m=3
//! 0 1
//! 0 2
//! 0 3
//! ```
//!
//! The writer emits the header and one `i j` line per edge with `i < j`,
//! sorted. The reader also accepts unsorted lines, either orientation,
//! blank lines and extra `#` comments. Without a header the vertex count
//! is one more than the largest label.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Largest vertex count the reader will allocate for.
pub const MAX_VERTICES: usize = 1 << 26;

struct Header {
    n: usize,
    m: usize,
}

fn parse_header(body: &str, line: usize) -> Result<Option<Header>> {
    let mut n = None;
    let mut m = None;
    for tok in body.split_whitespace() {
        let (slot, value) = if let Some(v) = tok.strip_prefix("n=") {
            (&mut n, v)
        } else if let Some(v) = tok.strip_prefix("m=") {
            (&mut m, v)
        } else {
            // Not a header; an ordinary comment.
            return Ok(None);
        };
        if slot.is_some() {
            return Err(Error::parse(line, format!("repeated header field '{tok}'")));
        }
        *slot = Some(
            value.parse::<usize>().map_err(|_| Error::parse(line, format!("bad header value '{tok}'")))?,
        );
    }
    match (n, m) {
        (Some(n), Some(m)) => Ok(Some(Header { n, m })),
        (None, None) => Ok(None),
        _ => Err(Error::parse(line, "header needs both n= and m=")),
    }
}

fn parse_vertex(tok: &str, line: usize) -> Result<usize> {
    tok.parse::<usize>().map_err(|_| Error::parse(line, format!("expected a vertex label, found '{tok}'")))
}

pub fn parse_edge_list(text: &str) -> Result<Graph> {
    parse_edge_list_with_limit(text, MAX_VERTICES)
}

/// As [`parse_edge_list`], refusing graphs with more than `max_vertices`.
pub fn parse_edge_list_with_limit(text: &str, max_vertices: usize) -> Result<Graph> {
    let mut header: Option<Header> = None;
    let mut edges = Vec::new();
    let mut max_label: Option<usize> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let s = raw.trim();
        if s.is_empty() {
            continue;
        }
        if let Some(body) = s.strip_prefix('#') {
            if let Some(h) = parse_header(body, line)? {
                if header.is_some() || !edges.is_empty() {
                    return Err(Error::parse(line, "header must come first and only once"));
                }
                if h.n > max_vertices {
                    return Err(Error::parse(
                        line,
                        format!("n={} exceeds the limit of {max_vertices} vertices", h.n),
                    ));
                }
                header = Some(h);
            }
            continue;
        }
        let mut toks = s.split_whitespace();
        let a = parse_vertex(toks.next().unwrap_or_default(), line)?;
        let b = match toks.next() {
            Some(t) => parse_vertex(t, line)?,
            None => return Err(Error::parse(line, "edge line needs two vertex labels")),
        };
        if let Some(extra) = toks.next() {
            return Err(Error::parse(line, format!("unexpected token '{extra}'")));
        }
        let limit = header.as_ref().map_or(max_vertices, |h| h.n);
        for v in [a, b] {
            if v >= limit {
                return Err(Error::parse(line, format!("vertex {v} out of range for n={limit}")));
            }
        }
        if a == b {
            return Err(Error::parse(line, format!("self-loop at vertex {a}")));
        }
        max_label = Some(max_label.map_or(a.max(b), |m: usize| m.max(a).max(b)));
        edges.push((a, b));
    }
    let n = match &header {
        Some(h) => {
            if h.m != edges.len() {
                return Err(Error::parse(
                    0,
                    format!("header announces m={} but {} edges follow", h.m, edges.len()),
                ));
            }
            h.n
        }
        None => max_label.map_or(0, |m| m + 1),
    };
    Graph::from_edges(n, &edges).map_err(|e| match e {
        Error::DuplicateEdge(a, b) => Error::parse(0, format!("duplicate edge {a} {b}")),
        other => other,
    })
}

pub fn read_edge_list<R: Read>(mut r: R) -> Result<Graph> {
    let mut text = String::new();
    r.read_to_string(&mut text).map_err(|e| match e.kind() {
        std::io::ErrorKind::InvalidData => Error::parse(0, "input is not valid UTF-8"),
        _ => Error::Io(e),
    })?;
    parse_edge_list(&text)
}

pub fn read_edge_list_file(path: &Path) -> Result<Graph> {
    read_edge_list(BufReader::new(File::open(path)?))
}

pub fn write_edge_list<W: Write>(g: &Graph, w: W) -> Result<()> {
    let mut w = BufWriter::new(w);
    writeln!(w, "# n={} m={}", g.n(), g.m())?;
    for &(a, b) in g.edges() {
        writeln!(w, "{a} {b}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_edge_list_file(g: &Graph, path: &Path) -> Result<()> {
    write_edge_list(g, File::create(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn render(g: &Graph) -> String {
        let mut buf = Vec::new();
        write_edge_list(g, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn canonical_output() {
        let g = Graph::from_edges(4, &[(3, 0), (2, 0), (1, 0)]).unwrap();
        assert_eq!(render(&g), "# n=4 m=3\n0 1\n0 2\n0 3\n");
    }

    #[test]
    fn round_trip_keeps_isolated_vertices() {
        let g = Graph::from_edges(6, &[(0, 1), (2, 3)]).unwrap();
        let back = parse_edge_list(&render(&g)).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.n(), 6);
    }

    #[test]
    fn lenient_reading() {
        let g = parse_edge_list("# a comment\n\n2 1\n  0 1 \n# trailing\n").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(parse_edge_list("").unwrap().n(), 0);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("0 1\n1 x\n", 2),
            ("0 1\n1\n", 2),
            ("0 1 2\n", 1),
            ("# n=2 m=1\n0 2\n", 2),
            ("1 1\n", 1),
            ("0 1\n# n=2 m=1\n", 2),
            ("# n=2\n", 1),
            ("# n=2 m=1 n=3\n", 1),
            ("-1 2\n", 1),
        ];
        for (text, line) in cases {
            match parse_edge_list(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
        assert!(matches!(parse_edge_list("# n=3 m=2\n0 1\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_edge_list("0 1\n1 0\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn vertex_limit() {
        assert!(parse_edge_list_with_limit("# n=100 m=0\n", 10).is_err());
        assert!(parse_edge_list_with_limit("5 20\n", 10).is_err());
        assert!(parse_edge_list_with_limit("5 9\n", 10).is_ok());
    }
}

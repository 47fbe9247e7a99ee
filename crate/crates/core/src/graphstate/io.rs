//! Plain-text graph formats: a whitespace edge list and graph6.
//!
//! Edge-list format: the first non-comment line holds the vertex count `n`, every
//! following line one edge `u v` with 0-based vertices. Lines starting with `#` are
//! ignored.

use std::fmt::Write as _;
use std::path::Path;

use super::Graph;
use crate::error::{Error, Result};

pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (ln, first) = lines
        .next()
        .ok_or_else(|| Error::Parse("empty edge list".into()))?;
    let n: usize = first
        .parse()
        .map_err(|_| Error::Parse(format!("line {ln}: expected vertex count, got {first:?}")))?;
    let mut edges = Vec::new();
    for (ln, line) in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        let [u, v] = parts[..] else {
            return Err(Error::Parse(format!(
                "line {ln}: expected `u v`, got {line:?}"
            )));
        };
        let parse = |s: &str| {
            s.parse::<u32>()
                .map_err(|_| Error::Parse(format!("line {ln}: bad vertex {s:?}")))
        };
        let (u, v) = (parse(u)?, parse(v)?);
        if u as usize >= n || v as usize >= n {
            return Err(Error::Parse(format!(
                "line {ln}: vertex out of range for n = {n}"
            )));
        }
        if u == v {
            return Err(Error::Parse(format!("line {ln}: self-loop on {u}")));
        }
        edges.push((u, v));
    }
    Graph::from_edges(n, &edges)
}

/// Writes the edge list of a graph whose labels are `0..n`.
pub fn format_edge_list(g: &Graph) -> Result<String> {
    if g.labels().iter().enumerate().any(|(i, &l)| l as usize != i) {
        return Err(Error::Parse("edge-list output needs labels 0..n".into()));
    }
    let mut s = format!("{}\n", g.n());
    for (u, v) in g.edges() {
        writeln!(s, "{u} {v}").expect("writing to a String");
    }
    Ok(s)
}

/// Decodes a single graph6 string (an optional `>>graph6<<` header is accepted).
pub fn parse_graph6(text: &str) -> Result<Graph> {
    let s = text.trim();
    let s = s.strip_prefix(">>graph6<<").unwrap_or(s).as_bytes();
    if s.is_empty() {
        return Err(Error::Parse("empty graph6 string".into()));
    }
    if let Some(&b) = s.iter().find(|&&b| !(63..=126).contains(&b)) {
        return Err(Error::Parse(format!("byte {b} outside the graph6 range")));
    }
    let (n, body) = if s[0] != 126 {
        ((s[0] - 63) as usize, &s[1..])
    } else if s.len() >= 4 && s[1] != 126 {
        let n = s[1..4]
            .iter()
            .fold(0usize, |acc, &b| (acc << 6) | (b - 63) as usize);
        (n, &s[4..])
    } else {
        return Err(Error::Parse(
            "graph6 sizes beyond 258047 are not supported".into(),
        ));
    };
    let nbits = n * n.saturating_sub(1) / 2;
    if body.len() != nbits.div_ceil(6) {
        return Err(Error::Parse(format!(
            "graph6 body has {} bytes, expected {}",
            body.len(),
            nbits.div_ceil(6)
        )));
    }
    let bit = |k: usize| (body[k / 6] - 63) >> (5 - k % 6) & 1 == 1;
    let mut edges = Vec::new();
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            if bit(k) {
                edges.push((i as u32, j as u32));
            }
            k += 1;
        }
    }
    Graph::from_edges(n, &edges)
}

/// Encodes a graph with labels `0..n` as graph6.
pub fn format_graph6(g: &Graph) -> Result<String> {
    let n = g.n();
    if g.labels().iter().enumerate().any(|(i, &l)| l as usize != i) {
        return Err(Error::Parse("graph6 output needs labels 0..n".into()));
    }
    let mut out = Vec::new();
    if n <= 62 {
        out.push(n as u8 + 63);
    } else if n <= 258_047 {
        out.push(126);
        out.extend([(n >> 12) as u8 & 63, (n >> 6) as u8 & 63, n as u8 & 63].map(|b| b + 63));
    } else {
        return Err(Error::Parse(
            "graph6 sizes beyond 258047 are not supported".into(),
        ));
    }
    let adj = g.adjacency();
    let mut acc = 0u8;
    let mut used = 0;
    for j in 1..n {
        for i in 0..j {
            acc = acc << 1 | u8::from(adj.get_unchecked(i, j));
            used += 1;
            if used == 6 {
                out.push(acc + 63);
                acc = 0;
                used = 0;
            }
        }
    }
    if used > 0 {
        out.push((acc << (6 - used)) + 63);
    }
    Ok(String::from_utf8(out).expect("graph6 bytes are ASCII"))
}

/// Reads a graph file, choosing the format by extension (`.g6` / `.graph6` or edge list).
pub fn read_graph(path: &Path) -> Result<Graph> {
    let text = std::fs::read_to_string(path)?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("g6" | "graph6") => parse_graph6(text.lines().next().unwrap_or("")),
        _ => parse_edge_list(&text),
    }
}

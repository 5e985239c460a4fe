//! Graphviz DOT output, plus a reader for exactly the subset we emit.

use super::{EndpointMark, MixedGraph};
use crate::{Error, Result};

fn arrow_name(m: EndpointMark) -> &'static str {
    match m {
        EndpointMark::Arrow => "normal",
        EndpointMark::Tail => "none",
        EndpointMark::Circle => "odot",
    }
}

fn arrow_from_name(s: &str) -> Option<EndpointMark> {
    match s {
        "normal" => Some(EndpointMark::Arrow),
        "none" => Some(EndpointMark::Tail),
        "odot" => Some(EndpointMark::Circle),
        _ => None,
    }
}

fn is_bare_id(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !matches!(s.to_ascii_lowercase().as_str(), "node" | "edge" | "graph" | "digraph" | "subgraph" | "strict")
}

fn quote(s: &str) -> String {
    if is_bare_id(s) {
        s.to_string()
    } else {
        format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
    }
}

/// DOT digraph with every edge drawn `dir=both`. Fully directed edges are
/// written in their causal direction; others from the lexicographically
/// smaller endpoint. Nodes and edges are sorted.
pub fn emit_dot(g: &MixedGraph) -> String {
    let mut nodes: Vec<&str> = g.names().iter().map(String::as_str).collect();
    nodes.sort_unstable();
    let mut edges: Vec<(&str, &str, EndpointMark, EndpointMark)> = g
        .edges()
        .into_iter()
        .map(|e| {
            let (a, b) = (g.name(e.a), g.name(e.b));
            let forward = match (e.mark_a, e.mark_b) {
                (EndpointMark::Tail, EndpointMark::Arrow) => true,
                (EndpointMark::Arrow, EndpointMark::Tail) => false,
                _ => a <= b,
            };
            if forward {
                (a, b, e.mark_a, e.mark_b)
            } else {
                (b, a, e.mark_b, e.mark_a)
            }
        })
        .collect();
    edges.sort_unstable_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));

    let mut out = String::from("digraph scm {\n");
    for n in nodes {
        out.push_str(&format!("  {};\n", quote(n)));
    }
    for (a, b, tail, head) in edges {
        out.push_str(&format!(
            "  {} -> {} [dir=both, arrowtail={}, arrowhead={}];\n",
            quote(a),
            quote(b),
            arrow_name(tail),
            arrow_name(head)
        ));
    }
    out.push_str("}\n");
    out
}

struct Cursor<'a> {
    s: &'a str,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::parse("dot", self.line, 1, msg)
    }

    fn skip_ws(&mut self) {
        self.s = self.s.trim_start();
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if let Some(rest) = self.s.strip_prefix(tok) {
            self.s = rest;
            true
        } else {
            false
        }
    }

    fn id(&mut self) -> Result<String> {
        self.skip_ws();
        if let Some(rest) = self.s.strip_prefix('"') {
            let mut out = String::new();
            let mut chars = rest.char_indices();
            while let Some((i, c)) = chars.next() {
                match c {
                    '\\' => match chars.next() {
                        Some((_, e)) => out.push(e),
                        None => break,
                    },
                    '"' => {
                        self.s = &rest[i + 1..];
                        return Ok(out);
                    }
                    c => out.push(c),
                }
            }
            Err(self.err("unterminated quoted identifier"))
        } else {
            let end = self.s.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_')).unwrap_or(self.s.len());
            if end == 0 {
                return Err(self.err("expected identifier"));
            }
            let (id, rest) = self.s.split_at(end);
            self.s = rest;
            Ok(id.to_string())
        }
    }
}

/// Reads DOT produced by [`emit_dot`] back into a graph whose nodes are in
/// the order listed.
pub fn parse_dot(text: &str) -> Result<MixedGraph> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    match lines.next() {
        Some((_, l)) if l.starts_with("digraph") && l.ends_with('{') => {}
        _ => return Err(Error::parse("dot", 1, 1, "expected `digraph NAME {`")),
    }
    let mut names = Vec::new();
    let mut edges = Vec::new();
    let mut closed = false;
    for (line, l) in lines {
        if l == "}" {
            closed = true;
            break;
        }
        let mut cur = Cursor { s: l, line };
        let a = cur.id()?;
        if cur.eat(";") {
            names.push(a);
            continue;
        }
        if !cur.eat("->") {
            return Err(cur.err("expected `;` or `->`"));
        }
        let b = cur.id()?;
        if !cur.eat("[") {
            return Err(cur.err("expected edge attributes"));
        }
        let mut tail = None;
        let mut head = None;
        loop {
            let key = cur.id()?;
            if !cur.eat("=") {
                return Err(cur.err("expected `=`"));
            }
            let value = cur.id()?;
            match key.as_str() {
                "arrowtail" => tail = arrow_from_name(&value),
                "arrowhead" => head = arrow_from_name(&value),
                _ => {}
            }
            if cur.eat("]") {
                break;
            }
            if !cur.eat(",") {
                return Err(cur.err("expected `,` or `]`"));
            }
        }
        cur.eat(";");
        let (Some(tail), Some(head)) = (tail, head) else {
            return Err(cur.err("edge needs arrowtail and arrowhead"));
        };
        edges.push((a, b, tail, head));
    }
    if !closed {
        return Err(Error::parse("dot", text.lines().count(), 1, "missing closing `}`"));
    }
    let mut g = MixedGraph::new(names)?;
    for (a, b, tail, head) in edges {
        let (ai, bi) = (g.index(&a)?, g.index(&b)?);
        g.add_edge(ai, bi, tail, head);
    }
    Ok(g)
}

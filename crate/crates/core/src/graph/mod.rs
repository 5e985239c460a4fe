//! Mixed graphs whose edge endpoints carry tail, arrow or circle marks. The
//! same type holds DAGs, CPDAGs (undirected = tail–tail) and PAGs.

mod dag;
mod dot;

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

pub use dag::Dag;
pub use dot::{emit_dot, parse_dot};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EndpointMark {
    Tail,
    Arrow,
    Circle,
}

impl EndpointMark {
    pub fn name(self) -> &'static str {
        match self {
            EndpointMark::Tail => "tail",
            EndpointMark::Arrow => "arrow",
            EndpointMark::Circle => "circle",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "tail" => Some(EndpointMark::Tail),
            "arrow" => Some(EndpointMark::Arrow),
            "circle" => Some(EndpointMark::Circle),
            _ => None,
        }
    }
}

/// An edge listed from its lower-indexed endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub mark_a: EndpointMark,
    pub mark_b: EndpointMark,
}

#[derive(Clone, PartialEq, Eq)]
pub struct MixedGraph {
    names: Vec<String>,
    /// `marks[a][b]`: mark at `b` on edge `a`–`b`.
    marks: Vec<Vec<Option<EndpointMark>>>,
}

impl MixedGraph {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut seen = HashSet::new();
        if let Some(dup) = names.iter().find(|n| !seen.insert(n.as_str())) {
            return Err(Error::Validation(format!("duplicate node name `{dup}`")));
        }
        let n = names.len();
        Ok(MixedGraph { names, marks: vec![vec![None; n]; n] })
    }

    /// Every pair joined by an edge with `mark` at both ends.
    pub fn complete<S: Into<String>>(names: impl IntoIterator<Item = S>, mark: EndpointMark) -> Result<Self> {
        let mut g = MixedGraph::new(names)?;
        for a in 0..g.n() {
            for b in a + 1..g.n() {
                g.add_edge(a, b, mark, mark);
            }
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index(&self, name: &str) -> Result<usize> {
        self.names.iter().position(|n| n == name).ok_or_else(|| Error::UnknownNode(name.to_string()))
    }

    pub fn add_edge(&mut self, a: usize, b: usize, mark_a: EndpointMark, mark_b: EndpointMark) {
        assert_ne!(a, b, "self-loops are not allowed");
        self.marks[b][a] = Some(mark_a);
        self.marks[a][b] = Some(mark_b);
    }

    /// Adds `a -> b`.
    pub fn add_directed(&mut self, a: usize, b: usize) {
        self.add_edge(a, b, EndpointMark::Tail, EndpointMark::Arrow);
    }

    pub fn remove_edge(&mut self, a: usize, b: usize) {
        self.marks[a][b] = None;
        self.marks[b][a] = None;
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.marks[a][b].is_some()
    }

    /// Mark at `b` on the edge `a`–`b`.
    pub fn mark(&self, a: usize, b: usize) -> Option<EndpointMark> {
        self.marks[a][b]
    }

    /// Sets the mark at `b` on an existing edge `a`–`b`.
    pub fn set_mark(&mut self, a: usize, b: usize, m: EndpointMark) {
        debug_assert!(self.adjacent(a, b));
        self.marks[a][b] = Some(m);
    }

    /// `a -> b`: tail at `a`, arrow at `b`.
    pub fn is_directed(&self, a: usize, b: usize) -> bool {
        self.mark(b, a) == Some(EndpointMark::Tail) && self.mark(a, b) == Some(EndpointMark::Arrow)
    }

    pub fn neighbors(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        self.marks[a].iter().enumerate().filter_map(|(b, m)| m.map(|_| b))
    }

    pub fn degree(&self, a: usize) -> usize {
        self.neighbors(a).count()
    }

    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::new();
        for a in 0..self.n() {
            for b in a + 1..self.n() {
                if let (Some(mark_a), Some(mark_b)) = (self.marks[b][a], self.marks[a][b]) {
                    out.push(Edge { a, b, mark_a, mark_b });
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    /// Sets every present edge mark to `m`.
    pub fn reset_marks(&mut self, m: EndpointMark) {
        for row in &mut self.marks {
            for cell in row.iter_mut().flatten() {
                *cell = m;
            }
        }
    }

    /// Unordered adjacency pairs by name, each pair sorted.
    pub fn adjacencies(&self) -> BTreeSet<(String, String)> {
        self.edges()
            .into_iter()
            .map(|e| {
                let (x, y) = (self.names[e.a].clone(), self.names[e.b].clone());
                if x <= y { (x, y) } else { (y, x) }
            })
            .collect()
    }

    pub fn adjacent_by_name(&self, a: &str, b: &str) -> Result<bool> {
        Ok(self.adjacent(self.index(a)?, self.index(b)?))
    }

    /// The same graph with nodes reordered by name.
    pub fn sorted(&self) -> MixedGraph {
        let mut order: Vec<usize> = (0..self.n()).collect();
        order.sort_by(|&a, &b| self.names[a].cmp(&self.names[b]));
        self.permuted(&order)
    }

    /// Node `i` of the result is node `order[i]` of `self`.
    pub fn permuted(&self, order: &[usize]) -> MixedGraph {
        let names = order.iter().map(|&i| self.names[i].clone()).collect();
        let marks = order.iter().map(|&i| order.iter().map(|&j| self.marks[i][j]).collect()).collect();
        MixedGraph { names, marks }
    }

    /// Whether any path (ignoring marks) joins `a` and `b`.
    pub fn connected(&self, a: usize, b: usize) -> bool {
        let mut seen = vec![false; self.n()];
        let mut queue = VecDeque::from([a]);
        seen[a] = true;
        while let Some(u) = queue.pop_front() {
            if u == b {
                return true;
            }
            for v in self.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        false
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            nodes: self.names.clone(),
            edges: self
                .edges()
                .into_iter()
                .map(|e| {
                    [
                        self.names[e.a].clone(),
                        self.names[e.b].clone(),
                        e.mark_a.name().to_string(),
                        e.mark_b.name().to_string(),
                    ]
                })
                .collect(),
        }
    }

    pub fn from_json(j: &GraphJson) -> Result<Self> {
        let mut g = MixedGraph::new(j.nodes.iter().cloned())?;
        for [a, b, ma, mb] in &j.edges {
            let (a, b) = (g.index(a)?, g.index(b)?);
            if a == b {
                return Err(Error::Validation("self-loop in graph".into()));
            }
            let mark = |s: &str| EndpointMark::from_name(s).ok_or_else(|| Error::Validation(format!("bad mark `{s}`")));
            g.add_edge(a, b, mark(ma)?, mark(mb)?);
        }
        Ok(g)
    }
}

impl fmt::Debug for MixedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MixedGraph[")?;
        for (i, e) in self.edges().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            let left = match e.mark_a {
                EndpointMark::Tail => "-",
                EndpointMark::Arrow => "<",
                EndpointMark::Circle => "o",
            };
            let right = match e.mark_b {
                EndpointMark::Tail => "-",
                EndpointMark::Arrow => ">",
                EndpointMark::Circle => "o",
            };
            write!(f, "{} {left}-{right} {}", self.names[e.a], self.names[e.b])?;
        }
        write!(f, "]")
    }
}

/// JSON graph dump: node list plus `[a, b, mark_at_a, mark_at_b]` edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub nodes: Vec<String>,
    pub edges: Vec<[String; 4]>,
}

/// Root variables receive no arrowheads from non-roots; leaf variables
/// receive only arrowheads.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BackgroundKnowledge {
    pub roots: BTreeSet<String>,
    pub leaf: BTreeSet<String>,
}

impl BackgroundKnowledge {
    pub fn new<R, L>(roots: R, leaf: L) -> Result<Self>
    where
        R: IntoIterator,
        R::Item: Into<String>,
        L: IntoIterator,
        L::Item: Into<String>,
    {
        let roots: BTreeSet<String> = roots.into_iter().map(Into::into).collect();
        let leaf: BTreeSet<String> = leaf.into_iter().map(Into::into).collect();
        if let Some(both) = roots.intersection(&leaf).next() {
            return Err(Error::Constraint(format!("`{both}` cannot be both a root and a leaf")));
        }
        Ok(BackgroundKnowledge { roots, leaf })
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty() && self.leaf.is_empty()
    }

    /// Index-level view against a graph's node list.
    pub fn resolve(&self, names: &[String]) -> Result<ResolvedKnowledge> {
        let mut is_root = vec![false; names.len()];
        let mut is_leaf = vec![false; names.len()];
        let find = |n: &String| names.iter().position(|x| x == n).ok_or_else(|| Error::UnknownNode(n.clone()));
        for r in &self.roots {
            is_root[find(r)?] = true;
        }
        for l in &self.leaf {
            is_leaf[find(l)?] = true;
        }
        Ok(ResolvedKnowledge { is_root, is_leaf })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedKnowledge {
    pub is_root: Vec<bool>,
    pub is_leaf: Vec<bool>,
}

impl ResolvedKnowledge {
    pub fn none(n: usize) -> Self {
        ResolvedKnowledge { is_root: vec![false; n], is_leaf: vec![false; n] }
    }

    /// Whether mark `m` may be placed at `b` on edge `a`–`b`.
    pub fn permits(&self, a: usize, b: usize, m: EndpointMark) -> bool {
        match m {
            EndpointMark::Arrow => !(self.is_root[b] && !self.is_root[a]),
            EndpointMark::Tail => !(self.is_leaf[b] && !self.is_leaf[a]),
            EndpointMark::Circle => true,
        }
    }

    /// Orients every edge touching a root or a leaf: `root -> v`, `v -> leaf`,
    /// and `root -> leaf` when both apply. Root–root edges are left alone.
    pub fn orient(&self, g: &mut MixedGraph) -> Result<usize> {
        let mut changed = 0;
        for e in g.edges() {
            let (a, b) = (e.a, e.b);
            let (from, to) = if self.is_root[a] && !self.is_root[b] {
                (a, b)
            } else if self.is_root[b] && !self.is_root[a] {
                (b, a)
            } else if self.is_leaf[a] && self.is_leaf[b] {
                return Err(Error::Constraint(format!(
                    "edge between leaf nodes `{}` and `{}`",
                    g.name(a),
                    g.name(b)
                )));
            } else if self.is_leaf[b] {
                (a, b)
            } else if self.is_leaf[a] {
                (b, a)
            } else {
                continue;
            };
            if !g.is_directed(from, to) {
                g.add_directed(from, to);
                changed += 1;
            }
        }
        Ok(changed)
    }
}

/// Returns a copy of `g` with background knowledge orientations enforced.
pub fn apply_background_knowledge(g: &MixedGraph, bk: &BackgroundKnowledge) -> Result<MixedGraph> {
    let resolved = bk.resolve(g.names())?;
    let mut out = g.clone();
    resolved.orient(&mut out)?;
    Ok(out)
}

/// True iff `node` has at least one incident edge.
pub fn connected_nonisolated(g: &MixedGraph, node: &str) -> Result<bool> {
    Ok(g.degree(g.index(node)?) > 0)
}

use std::collections::VecDeque;

use super::{EndpointMark, MixedGraph};
use crate::{Error, Result};

/// A mixed graph whose edges are all `tail -> arrow` with no directed cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    graph: MixedGraph,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
}

impl Dag {
    pub fn from_graph(graph: MixedGraph) -> Result<Self> {
        let n = graph.n();
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        for e in graph.edges() {
            let (from, to) = match (e.mark_a, e.mark_b) {
                (EndpointMark::Tail, EndpointMark::Arrow) => (e.a, e.b),
                (EndpointMark::Arrow, EndpointMark::Tail) => (e.b, e.a),
                _ => return Err(Error::Validation("DAG edges must be directed".into())),
            };
            parents[to].push(from);
            children[from].push(to);
        }
        let dag = Dag { graph, parents, children };
        if dag.topological_order().is_none() {
            return Err(Error::Validation("graph has a directed cycle".into()));
        }
        Ok(dag)
    }

    /// Builds a DAG from named directed edges `(from, to)`.
    pub fn from_edges<S: AsRef<str>>(names: &[S], edges: &[(S, S)]) -> Result<Self> {
        let mut g = MixedGraph::new(names.iter().map(|s| s.as_ref().to_string()))?;
        for (a, b) in edges {
            let (a, b) = (g.index(a.as_ref())?, g.index(b.as_ref())?);
            g.add_directed(a, b);
        }
        Dag::from_graph(g)
    }

    pub fn graph(&self) -> &MixedGraph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn parents(&self, v: usize) -> &[usize] {
        &self.parents[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// Kahn's algorithm, smallest index first among ready nodes.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.n();
        let mut indeg: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut ready: std::collections::BTreeSet<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for &c in &self.children[v] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    ready.insert(c);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    fn ancestors_of_set(&self, z: &[usize]) -> Vec<bool> {
        let mut mark = vec![false; self.n()];
        let mut stack: Vec<usize> = z.to_vec();
        while let Some(v) = stack.pop() {
            if !mark[v] {
                mark[v] = true;
                stack.extend(&self.parents[v]);
            }
        }
        mark
    }

    /// d-separation of `x` and `y` given `z`, by reachability over
    /// (node, direction-of-arrival) states.
    pub fn d_separated_idx(&self, x: usize, y: usize, z: &[usize]) -> bool {
        let n = self.n();
        let mut in_z = vec![false; n];
        for &v in z {
            in_z[v] = true;
        }
        let anc = self.ancestors_of_set(z);
        // visited[v][0]: arrived from a child (moving up); [1]: from a parent.
        let mut visited = vec![[false; 2]; n];
        let mut queue = VecDeque::from([(x, 0usize)]);
        while let Some((v, dir)) = queue.pop_front() {
            if visited[v][dir] {
                continue;
            }
            visited[v][dir] = true;
            if v == y && !in_z[v] {
                return false;
            }
            if dir == 0 {
                if !in_z[v] {
                    queue.extend(self.parents[v].iter().map(|&p| (p, 0)));
                    queue.extend(self.children[v].iter().map(|&c| (c, 1)));
                }
            } else {
                if !in_z[v] {
                    queue.extend(self.children[v].iter().map(|&c| (c, 1)));
                }
                if anc[v] {
                    queue.extend(self.parents[v].iter().map(|&p| (p, 0)));
                }
            }
        }
        true
    }

    pub fn d_separated(&self, x: &str, y: &str, z: &[&str]) -> Result<bool> {
        let g = &self.graph;
        let (xi, yi) = (g.index(x)?, g.index(y)?);
        let zi = z.iter().map(|v| g.index(v)).collect::<Result<Vec<_>>>()?;
        if xi == yi || zi.contains(&xi) || zi.contains(&yi) {
            return Err(Error::Validation("d-separation needs distinct x, y outside the conditioning set".into()));
        }
        Ok(self.d_separated_idx(xi, yi, &zi))
    }
}

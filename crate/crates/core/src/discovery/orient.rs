use std::collections::BTreeMap;

use super::SepsetStore;
use crate::graph::{EndpointMark, MixedGraph, ResolvedKnowledge};

use EndpointMark::{Arrow, Circle, Tail};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Mode {
    /// Tail–tail means "undirected", so tails may be overwritten by arrows.
    Pc,
    /// Only circles are open; any other overwrite is a collision.
    Fci,
}

/// Applies marks through the background-knowledge guard, counting rule
/// firings and recording collisions.
pub(crate) struct Orienter {
    bk: ResolvedKnowledge,
    mode: Mode,
    pub firings: BTreeMap<&'static str, usize>,
    pub conflicts: Vec<String>,
}

impl Orienter {
    pub fn new(bk: ResolvedKnowledge, mode: Mode) -> Self {
        Orienter { bk, mode, firings: BTreeMap::new(), conflicts: Vec::new() }
    }

    pub fn count(&mut self, rule: &'static str, n: usize) {
        if n > 0 {
            *self.firings.entry(rule).or_default() += n;
        }
    }

    /// Puts mark `m` at `b` on edge `a`–`b`. Returns whether the graph changed.
    /// A collision between an arrow and a tail resolves to the arrow.
    pub fn set(&mut self, g: &mut MixedGraph, a: usize, b: usize, m: EndpointMark, rule: &'static str) -> bool {
        let Some(cur) = g.mark(a, b) else { return false };
        if cur == m {
            return false;
        }
        if !self.bk.permits(a, b, m) {
            self.conflicts.push(format!(
                "{rule}: background knowledge forbids {} at {} on {}-{}",
                m.name(),
                g.name(b),
                g.name(a),
                g.name(b)
            ));
            return false;
        }
        match self.mode {
            Mode::Pc => {
                if m == Arrow && g.mark(b, a) == Some(Arrow) {
                    self.conflicts.push(format!("{rule}: {} <-> {} (conflicting orientations)", g.name(a), g.name(b)));
                }
            }
            Mode::Fci => {
                if cur != Circle {
                    self.conflicts.push(format!(
                        "{rule}: {} at {} on {}-{} collides with {}",
                        m.name(),
                        g.name(b),
                        g.name(a),
                        g.name(b),
                        cur.name()
                    ));
                    if cur == Arrow {
                        return false;
                    }
                }
            }
        }
        g.set_mark(a, b, m);
        self.count(rule, 1);
        true
    }
}

/// Unshielded triples `x – z – y` with `z` outside sepset(x, y) become
/// `x *-> z <-* y`. Adjacencies are read from a snapshot so the result does
/// not depend on visiting order.
pub(crate) fn v_structures(g: &mut MixedGraph, sepsets: &SepsetStore, ori: &mut Orienter) {
    let n = g.n();
    let mut triples = Vec::new();
    for z in 0..n {
        let nb: Vec<usize> = g.neighbors(z).collect();
        for (i, &x) in nb.iter().enumerate() {
            for &y in &nb[i + 1..] {
                if g.adjacent(x, y) {
                    continue;
                }
                if let Some(s) = sepsets.get(x, y) {
                    if !s.contains(&z) {
                        triples.push((x, z, y));
                    }
                }
            }
        }
    }
    for (x, z, y) in triples {
        ori.set(g, x, z, Arrow, "v_structure");
        ori.set(g, y, z, Arrow, "v_structure");
    }
}

fn undirected(g: &MixedGraph, a: usize, b: usize) -> bool {
    g.mark(a, b) == Some(Tail) && g.mark(b, a) == Some(Tail)
}

/// Meek's rules 1–4 on a PDAG, to fixpoint.
pub(crate) fn meek(g: &mut MixedGraph, ori: &mut Orienter) {
    let n = g.n();
    loop {
        let mut changed = false;
        for a in 0..n {
            for b in 0..n {
                if a == b || !undirected(g, a, b) {
                    continue;
                }
                let nb: Vec<usize> = g.neighbors(a).filter(|&v| v != b).collect();
                let nb_b: Vec<usize> = g.neighbors(b).filter(|&v| v != a).collect();
                // M1: c -> a – b, c and b nonadjacent.
                let m1 = nb.iter().any(|&c| g.is_directed(c, a) && !g.adjacent(c, b));
                // M2: a -> c -> b.
                let m2 = || nb.iter().any(|&c| g.is_directed(a, c) && g.is_directed(c, b));
                // M3: a – c -> b, a – d -> b, c and d nonadjacent.
                let m3 = || {
                    let cs: Vec<usize> =
                        nb.iter().copied().filter(|&c| undirected(g, a, c) && g.is_directed(c, b)).collect();
                    cs.iter().enumerate().any(|(i, &c)| cs[i + 1..].iter().any(|&d| !g.adjacent(c, d)))
                };
                // M4: a – c -> d -> b, a adjacent to d, c and b nonadjacent.
                let m4 = || {
                    nb.iter().any(|&c| {
                        undirected(g, a, c)
                            && !g.adjacent(c, b)
                            && nb_b.iter().any(|&d| g.adjacent(a, d) && g.is_directed(c, d) && g.is_directed(d, b))
                    })
                };
                let rule = if m1 {
                    "meek_1"
                } else if m2() {
                    "meek_2"
                } else if m3() {
                    "meek_3"
                } else if m4() {
                    "meek_4"
                } else {
                    continue;
                };
                changed |= ori.set(g, a, b, Arrow, rule);
            }
        }
        if !changed {
            break;
        }
    }
}

/// Orients unshielded colliders in `g` (nodes indexed as in `sepsets`).
/// Far ends keep whatever mark they already carry.
pub fn orient_v_structures(g: &mut MixedGraph, sepsets: &SepsetStore) -> usize {
    let mut ori = Orienter::new(ResolvedKnowledge::none(g.n()), Mode::Pc);
    v_structures(g, sepsets, &mut ori);
    ori.firings.values().sum()
}

/// Applies Meek's rules to a PDAG in place and returns how many edges were
/// oriented.
pub fn meek_rules(g: &mut MixedGraph) -> usize {
    let mut ori = Orienter::new(ResolvedKnowledge::none(g.n()), Mode::Pc);
    meek(g, &mut ori);
    ori.firings.values().sum()
}

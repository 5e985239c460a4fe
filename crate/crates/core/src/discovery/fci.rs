use std::collections::{BTreeSet, VecDeque};

use super::orient::{v_structures, Mode, Orienter};
use super::{combinations, Ctx, SepsetStore};
use crate::graph::{EndpointMark, MixedGraph, ResolvedKnowledge};
use crate::Result;

use EndpointMark::{Arrow, Circle, Tail};

/// Possible-D-SEP(a): nodes reachable from `a` along paths on which every
/// interior node is a collider or sits in a triangle with its path
/// neighbours.
pub(crate) fn possible_dsep(g: &MixedGraph, a: usize) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    for b in g.neighbors(a) {
        out.insert(b);
        seen.insert((a, b));
        queue.push_back((a, b));
    }
    while let Some((p, c)) = queue.pop_front() {
        for d in g.neighbors(c) {
            if d == p || d == a {
                continue;
            }
            let collider = g.mark(p, c) == Some(Arrow) && g.mark(d, c) == Some(Arrow);
            if (collider || g.adjacent(p, d)) && seen.insert((c, d)) {
                out.insert(d);
                queue.push_back((c, d));
            }
        }
    }
    out
}

/// Second adjacency pass: each remaining edge is re-tested against subsets of
/// Possible-D-SEP of either endpoint (computed once, from a copy with
/// v-structures oriented), sizes 1 up to `cap`.
pub(crate) fn possible_dsep_prune(
    ctx: &mut Ctx<'_>,
    g: &mut MixedGraph,
    sepsets: &mut SepsetStore,
    cap: Option<usize>,
) -> Result<()> {
    let mut pre = g.clone();
    let mut scratch = Orienter::new(ResolvedKnowledge::none(g.n()), Mode::Fci);
    v_structures(&mut pre, sepsets, &mut scratch);
    let pds: Vec<Vec<usize>> = (0..g.n()).map(|v| possible_dsep(&pre, v).into_iter().collect()).collect();

    for e in g.edges() {
        let (x, y) = (e.a, e.b);
        let mut tried: Vec<Vec<usize>> = Vec::new();
        'edge: for a in [x, y] {
            let cands: Vec<usize> = pds[a].iter().copied().filter(|&v| v != x && v != y).collect();
            let top = cap.map_or(cands.len(), |c| c.min(cands.len()));
            for k in 1..=top {
                for z in combinations(&cands, k) {
                    if tried.contains(&z) {
                        continue;
                    }
                    if ctx.independent(x, y, &z)? {
                        g.remove_edge(x, y);
                        sepsets.insert(x, y, z);
                        break 'edge;
                    }
                    tried.push(z);
                }
            }
        }
    }
    Ok(())
}

fn arrow_at(g: &MixedGraph, a: usize, b: usize) -> bool {
    g.mark(a, b) == Some(Arrow)
}

fn circle_at(g: &MixedGraph, a: usize, b: usize) -> bool {
    g.mark(a, b) == Some(Circle)
}

fn tail_at(g: &MixedGraph, a: usize, b: usize) -> bool {
    g.mark(a, b) == Some(Tail)
}

/// Edge `a`–`b` could be oriented `a -> b`.
fn potentially_directed(g: &MixedGraph, a: usize, b: usize) -> bool {
    g.adjacent(a, b) && !arrow_at(g, b, a) && !tail_at(g, a, b)
}

fn nbrs(g: &MixedGraph, v: usize) -> Vec<usize> {
    g.neighbors(v).collect()
}

/// R1: `α *-> β o-* γ`, α and γ nonadjacent ⇒ `β -> γ`.
fn r1(g: &mut MixedGraph, ori: &mut Orienter) -> bool {
    let mut changed = false;
    for b in 0..g.n() {
        for a in nbrs(g, b) {
            if !arrow_at(g, a, b) {
                continue;
            }
            for c in nbrs(g, b) {
                if c != a && !g.adjacent(a, c) && circle_at(g, c, b) {
                    changed |= ori.set(g, c, b, Tail, "R1");
                    changed |= ori.set(g, b, c, Arrow, "R1");
                }
            }
        }
    }
    changed
}

/// R2: `α -> β *-> γ` or `α *-> β -> γ`, with `α *-o γ` ⇒ `α *-> γ`.
fn r2(g: &mut MixedGraph, ori: &mut Orienter) -> bool {
    let mut changed = false;
    for a in 0..g.n() {
        for c in nbrs(g, a) {
            if !circle_at(g, a, c) {
                continue;
            }
            let fires = nbrs(g, a).into_iter().any(|b| {
                b != c
                    && g.adjacent(b, c)
                    && ((g.is_directed(a, b) && arrow_at(g, b, c)) || (arrow_at(g, a, b) && g.is_directed(b, c)))
            });
            if fires {
                changed |= ori.set(g, a, c, Arrow, "R2");
            }
        }
    }
    changed
}

/// R3: `α *-> β <-* γ`, `α *-o θ o-* γ`, α and γ nonadjacent, `θ *-o β`
/// ⇒ `θ *-> β`.
fn r3(g: &mut MixedGraph, ori: &mut Orienter) -> bool {
    let mut changed = false;
    for b in 0..g.n() {
        let nb = nbrs(g, b);
        for &t in &nb {
            if !circle_at(g, t, b) {
                continue;
            }
            let fires = nb.iter().enumerate().any(|(i, &a)| {
                nb[i + 1..].iter().any(|&c| {
                    a != t
                        && c != t
                        && !g.adjacent(a, c)
                        && arrow_at(g, a, b)
                        && arrow_at(g, c, b)
                        && g.adjacent(a, t)
                        && g.adjacent(c, t)
                        && circle_at(g, a, t)
                        && circle_at(g, c, t)
                })
            });
            if fires {
                changed |= ori.set(g, t, b, Arrow, "R3");
            }
        }
    }
    changed
}

/// Finds the far end θ of a discriminating path `θ, …, α, β, γ` for β,
/// given the last interior collider α (`α -> γ`, arrowhead at α from β).
/// Interior nodes must be colliders and parents of γ; θ must be
/// nonadjacent to γ.
fn discriminating_end(g: &MixedGraph, a: usize, b: usize, c: usize) -> Option<usize> {
    let n = g.n();
    let mut visited = vec![false; n];
    visited[a] = true;
    visited[b] = true;
    visited[c] = true;
    let mut queue = VecDeque::from([a]);
    while let Some(v) = queue.pop_front() {
        for w in nbrs(g, v) {
            if visited[w] || !arrow_at(g, w, v) {
                continue;
            }
            if !g.adjacent(w, c) {
                return Some(w);
            }
            if g.is_directed(w, c) && arrow_at(g, v, w) {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    None
}

/// R4: discriminating path for β with `β o-* γ`: β in sepset(θ, γ) ⇒
/// `β -> γ`, otherwise `α <-> β <-> γ`.
fn r4(g: &mut MixedGraph, sepsets: &SepsetStore, ori: &mut Orienter) -> bool {
    let mut changed = false;
    for c in 0..g.n() {
        for b in nbrs(g, c) {
            if !circle_at(g, c, b) {
                continue;
            }
            for a in nbrs(g, b) {
                if a == c || !g.is_directed(a, c) || !arrow_at(g, b, a) {
                    continue;
                }
                let Some(t) = discriminating_end(g, a, b, c) else { continue };
                if sepsets.get(t, c).is_some_and(|s| s.contains(&b)) {
                    changed |= ori.set(g, c, b, Tail, "R4");
                    changed |= ori.set(g, b, c, Arrow, "R4");
                } else {
                    changed |= ori.set(g, a, b, Arrow, "R4");
                    changed |= ori.set(g, c, b, Arrow, "R4");
                    changed |= ori.set(g, b, c, Arrow, "R4");
                }
                break;
            }
        }
    }
    changed
}

/// R8: `α -> β -> γ` or `α -o β -> γ`, with `α o-> γ` ⇒ `α -> γ`.
fn r8(g: &mut MixedGraph, ori: &mut Orienter) -> bool {
    let mut changed = false;
    for a in 0..g.n() {
        for c in nbrs(g, a) {
            if !(circle_at(g, c, a) && arrow_at(g, a, c)) {
                continue;
            }
            let fires = nbrs(g, a).into_iter().any(|b| {
                b != c
                    && g.is_directed(b, c)
                    && (g.is_directed(a, b) || (tail_at(g, b, a) && circle_at(g, a, b)))
            });
            if fires {
                changed |= ori.set(g, c, a, Tail, "R8");
            }
        }
    }
    changed
}

enum Visit {
    Continue,
    Prune,
    Stop,
}

/// Depth-first enumeration of uncovered potentially directed paths from
/// `start`; `visit` sees each path prefix and steers the search.
fn uncovered_pd_paths(g: &MixedGraph, start: usize, mut visit: impl FnMut(&[usize]) -> Visit) {
    fn go(g: &MixedGraph, path: &mut Vec<usize>, on: &mut [bool], visit: &mut dyn FnMut(&[usize]) -> Visit) -> bool {
        let v = *path.last().unwrap();
        for w in g.neighbors(v).collect::<Vec<_>>() {
            if on[w] || !potentially_directed(g, v, w) {
                continue;
            }
            if path.len() >= 2 && g.adjacent(path[path.len() - 2], w) {
                continue;
            }
            path.push(w);
            on[w] = true;
            let stop = match visit(path) {
                Visit::Stop => true,
                Visit::Prune => false,
                Visit::Continue => go(g, path, on, visit),
            };
            on[w] = false;
            path.pop();
            if stop {
                return true;
            }
        }
        false
    }
    let mut on = vec![false; g.n()];
    on[start] = true;
    go(g, &mut vec![start], &mut on, &mut visit);
}

/// R9: `α o-> γ` and an uncovered p.d. path `α, β, …, γ` with β and γ
/// nonadjacent ⇒ `α -> γ`.
fn r9(g: &mut MixedGraph, ori: &mut Orienter) -> bool {
    let mut changed = false;
    for a in 0..g.n() {
        for c in nbrs(g, a) {
            if !(circle_at(g, c, a) && arrow_at(g, a, c)) {
                continue;
            }
            let mut found = false;
            uncovered_pd_paths(g, a, |p| {
                if p[1] == c || g.adjacent(p[1], c) {
                    Visit::Prune
                } else if *p.last().unwrap() == c {
                    found = true;
                    Visit::Stop
                } else {
                    Visit::Continue
                }
            });
            if found {
                changed |= ori.set(g, c, a, Tail, "R9");
            }
        }
    }
    changed
}

/// R10: `α o-> γ`, `β -> γ <- θ`, uncovered p.d. paths from α to β and to θ
/// whose first vertices μ, ω are distinct and nonadjacent ⇒ `α -> γ`.
fn r10(g: &mut MixedGraph, ori: &mut Orienter) -> bool {
    let mut changed = false;
    let n = g.n();
    for a in 0..n {
        let cs: Vec<usize> = nbrs(g, a).into_iter().filter(|&c| circle_at(g, c, a) && arrow_at(g, a, c)).collect();
        if cs.is_empty() {
            continue;
        }
        // first[t]: first vertices of uncovered p.d. paths from α to t.
        let mut first = vec![BTreeSet::new(); n];
        uncovered_pd_paths(g, a, |p| {
            first[*p.last().unwrap()].insert(p[1]);
            Visit::Continue
        });
        for c in cs {
            let parents: Vec<usize> = nbrs(g, c).into_iter().filter(|&p| p != a && g.is_directed(p, c)).collect();
            let fires = parents.iter().enumerate().any(|(i, &b)| {
                parents[i + 1..].iter().any(|&t| {
                    first[b].iter().any(|&mu| first[t].iter().any(|&om| mu != om && !g.adjacent(mu, om)))
                })
            });
            if fires {
                changed |= ori.set(g, c, a, Tail, "R10");
            }
        }
    }
    changed
}

/// Orientation rules R1–R4 and R8–R10, repeated until nothing changes.
pub(crate) fn apply_rules(g: &mut MixedGraph, sepsets: &SepsetStore, ori: &mut Orienter) {
    loop {
        let mut changed = r1(g, ori);
        changed |= r2(g, ori);
        changed |= r3(g, ori);
        changed |= r4(g, sepsets, ori);
        changed |= r8(g, ori);
        changed |= r9(g, ori);
        changed |= r10(g, ori);
        if !changed {
            break;
        }
    }
}

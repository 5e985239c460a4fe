use super::{combinations, Ctx, DiscoveryConfig, IndependenceSource, SepsetStore};
use crate::graph::{EndpointMark, MixedGraph};
use crate::Result;

/// Level-wise adjacency search. At conditioning size `k`, each remaining
/// edge `x–y` is tested against the size-`k` subsets of `adj(x)\{y}` and
/// then `adj(y)\{x}`, with adjacencies frozen for the whole level; edges are
/// removed at the end of the level with the first separating set found.
pub(crate) fn search(ctx: &mut Ctx<'_>, max_size: Option<usize>) -> Result<(MixedGraph, SepsetStore)> {
    let n = ctx.n();
    let mut g = MixedGraph::complete(ctx.names.clone(), EndpointMark::Circle)?;
    let mut sepsets = SepsetStore::default();
    let mut k = 0;
    loop {
        if max_size.is_some_and(|m| k > m) {
            break;
        }
        let adj: Vec<Vec<usize>> = (0..n).map(|v| g.neighbors(v).collect()).collect();
        let edges: Vec<(usize, usize)> = g.edges().into_iter().map(|e| (e.a, e.b)).collect();
        if !edges.iter().any(|&(x, y)| adj[x].len() > k || adj[y].len() > k) {
            break;
        }
        let mut removals = Vec::new();
        for &(x, y) in &edges {
            let mut tried: Vec<Vec<usize>> = Vec::new();
            'edge: for (a, b) in [(x, y), (y, x)] {
                let cands: Vec<usize> = adj[a].iter().copied().filter(|&v| v != b).collect();
                for z in combinations(&cands, k) {
                    if tried.contains(&z) {
                        continue;
                    }
                    if ctx.independent(x, y, &z)? {
                        removals.push((x, y, z));
                        break 'edge;
                    }
                    tried.push(z);
                }
            }
        }
        for (x, y, z) in removals {
            g.remove_edge(x, y);
            sepsets.insert(x, y, z);
        }
        k += 1;
    }
    Ok((g, sepsets))
}

/// Adjacency search alone: the undirected skeleton (all-circle marks, nodes
/// in name order) and the separating sets of removed edges.
pub fn skeleton(
    src: &dyn IndependenceSource,
    config: &DiscoveryConfig,
) -> Result<(MixedGraph, SepsetStore)> {
    let mut ctx = Ctx::new(src)?;
    search(&mut ctx, config.max_conditioning_size)
}

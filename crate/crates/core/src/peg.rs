//! Progressive edge growth and the Tanner graphs it produces.
//!
//! Edges are added one at a time. The first edge of each symbol goes to a
//! least-loaded check; every later edge goes to a least-loaded check that is
//! as far as possible from the symbol in the current graph, which keeps short
//! cycles out for as long as the graph allows.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::alist::SparseBinaryMatrix;
use crate::error::{invalid, Result};
use crate::gf2::{BinaryCode, BitVector};

/// Bipartite graph between symbol nodes and check nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TannerGraph {
    symbol_count: usize,
    check_count: usize,
    /// Sorted check indices per symbol.
    symbol_adj: Vec<Vec<usize>>,
    /// Sorted symbol indices per check.
    check_adj: Vec<Vec<usize>>,
    target_degrees: Vec<usize>,
    seed: Option<u64>,
}

impl TannerGraph {
    /// Graph from explicit per-symbol adjacency lists.
    pub fn from_symbol_adjacency(check_count: usize, mut symbol_adj: Vec<Vec<usize>>) -> Result<Self> {
        for (s, adj) in symbol_adj.iter_mut().enumerate() {
            adj.sort_unstable();
            if adj.windows(2).any(|w| w[0] == w[1]) {
                return Err(invalid(format!("symbol {s} has a parallel edge")));
            }
            if adj.last().is_some_and(|&c| c >= check_count) {
                return Err(invalid(format!("symbol {s} references a missing check")));
            }
        }
        let mut check_adj = vec![Vec::new(); check_count];
        for (s, adj) in symbol_adj.iter().enumerate() {
            for &c in adj {
                check_adj[c].push(s);
            }
        }
        let target_degrees = symbol_adj.iter().map(Vec::len).collect();
        Ok(TannerGraph {
            symbol_count: symbol_adj.len(),
            check_count,
            symbol_adj,
            check_adj,
            target_degrees,
            seed: None,
        })
    }

    /// The graph of a parity-check matrix: symbols are columns, checks rows.
    pub fn from_check_rows(n: usize, checks: &[BitVector]) -> Self {
        let mut symbol_adj = vec![Vec::new(); n];
        for (c, row) in checks.iter().enumerate() {
            for s in row.iter_ones() {
                symbol_adj[s].push(c);
            }
        }
        Self::from_symbol_adjacency(checks.len(), symbol_adj).expect("rows are sets")
    }

    pub fn from_matrix(m: &SparseBinaryMatrix) -> Self {
        Self::from_symbol_adjacency(m.num_rows(), m.column_entries()).expect("matrix rows are sets")
    }

    /// Check-by-symbol incidence matrix (symbols are columns).
    pub fn to_matrix(&self) -> SparseBinaryMatrix {
        SparseBinaryMatrix::new(self.check_count, self.symbol_count, self.check_adj.clone())
            .expect("adjacency is consistent")
    }

    pub fn symbol_count(&self) -> usize {
        self.symbol_count
    }

    pub fn check_count(&self) -> usize {
        self.check_count
    }

    pub fn symbol_neighbors(&self, s: usize) -> &[usize] {
        &self.symbol_adj[s]
    }

    pub fn check_neighbors(&self, c: usize) -> &[usize] {
        &self.check_adj[c]
    }

    pub fn target_degrees(&self) -> &[usize] {
        &self.target_degrees
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn edge_count(&self) -> usize {
        self.symbol_adj.iter().map(Vec::len).sum()
    }

    pub fn max_symbol_degree(&self) -> usize {
        self.symbol_adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn max_check_degree(&self) -> usize {
        self.check_adj.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// Grows a Tanner graph edge by edge.
///
/// Symbols are processed in nondecreasing order of target degree (ties by
/// index). Ties between equally loaded candidate checks are broken uniformly
/// at random from a ChaCha stream seeded with `seed`.
pub fn peg_construct(
    symbol_count: usize,
    check_count: usize,
    symbol_degrees: &[usize],
    seed: u64,
) -> Result<TannerGraph> {
    if symbol_count == 0 || check_count == 0 {
        return Err(invalid("symbol and check counts must be >= 1"));
    }
    if symbol_degrees.len() != symbol_count {
        return Err(invalid(format!(
            "{} degrees given for {symbol_count} symbols",
            symbol_degrees.len()
        )));
    }
    if let Some(&d) = symbol_degrees.iter().find(|&&d| d == 0 || d > check_count) {
        return Err(invalid(format!(
            "symbol degree {d} outside 1..={check_count}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut symbol_adj: Vec<Vec<usize>> = vec![Vec::new(); symbol_count];
    let mut check_adj: Vec<Vec<usize>> = vec![Vec::new(); check_count];

    let mut order: Vec<usize> = (0..symbol_count).collect();
    order.sort_by_key(|&s| symbol_degrees[s]);

    let depth_cap = 2 * check_count;
    let mut reached = vec![false; check_count];
    let mut seen_symbol = vec![false; symbol_count];

    for &s in &order {
        for edge in 0..symbol_degrees[s] {
            let candidates: Vec<usize> = if edge == 0 {
                (0..check_count).collect()
            } else {
                far_checks(
                    s,
                    &symbol_adj,
                    &check_adj,
                    depth_cap,
                    &mut reached,
                    &mut seen_symbol,
                )
            };
            let c = pick_least_loaded(&candidates, &check_adj, &symbol_adj[s], &mut rng);
            symbol_adj[s].push(c);
            check_adj[c].push(s);
        }
    }

    let mut graph = TannerGraph::from_symbol_adjacency(check_count, symbol_adj)?;
    graph.target_degrees = symbol_degrees.to_vec();
    graph.seed = Some(seed);
    Ok(graph)
}

/// Checks outside the deepest breadth-first layer reachable from `s`, or the
/// last layer to be reached when the expansion covers every check.
fn far_checks(
    s: usize,
    symbol_adj: &[Vec<usize>],
    check_adj: &[Vec<usize>],
    depth_cap: usize,
    reached: &mut [bool],
    seen_symbol: &mut [bool],
) -> Vec<usize> {
    reached.fill(false);
    seen_symbol.fill(false);
    seen_symbol[s] = true;
    let mut frontier: Vec<usize> = symbol_adj[s].clone();
    for &c in &frontier {
        reached[c] = true;
    }
    let mut count = frontier.len();
    let total = reached.len();
    for _ in 0..depth_cap {
        let mut next = Vec::new();
        for &c in &frontier {
            for &t in &check_adj[c] {
                if seen_symbol[t] {
                    continue;
                }
                seen_symbol[t] = true;
                for &c2 in &symbol_adj[t] {
                    if !reached[c2] {
                        reached[c2] = true;
                        next.push(c2);
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        if count + next.len() == total {
            // Everything is reachable: connect at maximum depth.
            return next;
        }
        count += next.len();
        frontier = next;
    }
    (0..total).filter(|&c| !reached[c]).collect()
}

fn pick_least_loaded(
    candidates: &[usize],
    check_adj: &[Vec<usize>],
    already: &[usize],
    rng: &mut ChaCha8Rng,
) -> usize {
    let usable: Vec<usize> = candidates
        .iter()
        .copied()
        .filter(|c| !already.contains(c))
        .collect();
    let min = usable
        .iter()
        .map(|&c| check_adj[c].len())
        .min()
        .expect("degree <= check count leaves a free check");
    let ties: Vec<usize> = usable
        .into_iter()
        .filter(|&c| check_adj[c].len() == min)
        .collect();
    ties[rng.random_range(0..ties.len())]
}

/// Length of the shortest cycle, or `None` for a forest.
///
/// Runs a breadth-first search from every node; a non-tree edge `(u, w)`
/// closes a cycle of length `dist(u) + dist(w) + 1` through the root, and the
/// minimum over all roots is exact.
pub fn girth(graph: &TannerGraph) -> Option<usize> {
    let ns = graph.symbol_count;
    let total = ns + graph.check_count;
    let neighbors = |v: usize| -> &[usize] {
        if v < ns {
            &graph.symbol_adj[v]
        } else {
            &graph.check_adj[v - ns]
        }
    };
    let node = |v: usize, u: usize| if v < ns { ns + u } else { u };

    let mut best = usize::MAX;
    let mut dist = vec![usize::MAX; total];
    let mut parent = vec![usize::MAX; total];
    let mut queue = VecDeque::new();
    for root in 0..total {
        dist.fill(usize::MAX);
        parent.fill(usize::MAX);
        dist[root] = 0;
        queue.clear();
        queue.push_back(root);
        'bfs: while let Some(v) = queue.pop_front() {
            if 2 * dist[v] + 1 >= best {
                break;
            }
            for &u in neighbors(v) {
                let w = node(v, u);
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    parent[w] = v;
                    queue.push_back(w);
                } else if parent[v] != w {
                    best = best.min(dist[v] + dist[w] + 1);
                    break 'bfs;
                }
            }
        }
    }
    (best != usize::MAX).then_some(best)
}

/// Systematic generator `[I_k | P]` with `P[i][j] = 1` iff symbol `i` is
/// adjacent to check `j`.
pub fn systematic_ldgm_from_graph(graph: &TannerGraph) -> BinaryCode {
    let k = graph.symbol_count;
    let n = k + graph.check_count;
    let rows = (0..k)
        .map(|i| {
            let mut row = BitVector::unit(n, i);
            for &c in &graph.symbol_adj[i] {
                row.set(k + c, true);
            }
            row
        })
        .collect();
    BinaryCode::new(n, rows).expect("identity block makes rows independent")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::{gf2_rank, hamming_7_4};
    use proptest::prelude::*;

    #[test]
    fn single_symbol_two_edges() {
        let g = peg_construct(1, 3, &[2], 5).unwrap();
        assert_eq!(g.symbol_neighbors(0).len(), 2);
        assert_eq!(girth(&g), None);
    }

    #[test]
    fn small_regular_graph_has_no_parallel_edges() {
        let g = peg_construct(3, 3, &[2, 2, 2], 0).unwrap();
        assert!(girth(&g).is_none_or(|len| len >= 4));
        for s in 0..3 {
            let adj = g.symbol_neighbors(s);
            assert_eq!(adj.len(), 2);
            assert_ne!(adj[0], adj[1]);
        }
    }

    #[test]
    fn degree_larger_than_checks_is_rejected() {
        assert!(peg_construct(2, 3, &[5, 1], 0).is_err());
        assert!(peg_construct(0, 3, &[], 0).is_err());
    }

    #[test]
    fn girth_fixtures() {
        let tree = TannerGraph::from_symbol_adjacency(1, vec![vec![0]]).unwrap();
        assert_eq!(girth(&tree), None);
        let square = TannerGraph::from_symbol_adjacency(2, vec![vec![0, 1], vec![0, 1]]).unwrap();
        assert_eq!(girth(&square), Some(4));
        let hexagon =
            TannerGraph::from_symbol_adjacency(3, vec![vec![0, 1], vec![1, 2], vec![2, 0]]).unwrap();
        assert_eq!(girth(&hexagon), Some(6));
    }

    #[test]
    fn peg_128_by_128_degree_3() {
        let g = peg_construct(128, 128, &[3; 128], 1).unwrap();
        assert_eq!(g.edge_count(), 384);
        let girth = girth(&g).unwrap();
        assert!(girth >= 6, "girth {girth}");
        let code = systematic_ldgm_from_graph(&g);
        assert_eq!((code.len(), code.dimension()), (256, 128));
        assert!(code.generator().iter().all(|r| r.weight() == 4));
    }

    #[test]
    fn ldgm_from_hamming_parity_block() {
        // Symbol i adjacent to check j iff the fixture has P[i][j] = 1.
        let adj = vec![vec![0, 1], vec![1, 2], vec![0, 1, 2], vec![0, 2]];
        let g = TannerGraph::from_symbol_adjacency(3, adj).unwrap();
        assert_eq!(systematic_ldgm_from_graph(&g), hamming_7_4());
    }

    #[test]
    fn empty_graph_gives_identity_generator() {
        let g = TannerGraph::from_symbol_adjacency(2, vec![vec![]; 3]).unwrap();
        let code = systematic_ldgm_from_graph(&g);
        for (i, row) in code.generator().iter().enumerate() {
            assert_eq!(row.iter_ones().collect::<Vec<_>>(), [i]);
        }
    }

    #[test]
    fn matrix_round_trip() {
        let g = peg_construct(12, 6, &[2; 12], 9).unwrap();
        let back = TannerGraph::from_matrix(&SparseBinaryMatrix::from_alist(&g.to_matrix().to_alist()).unwrap());
        for s in 0..12 {
            assert_eq!(back.symbol_neighbors(s), g.symbol_neighbors(s));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn peg_invariants(
            ns in 1usize..24,
            nc in 2usize..16,
            degs in proptest::collection::vec(1usize..5, 24),
            seed in any::<u64>(),
        ) {
            let degrees: Vec<usize> = degs[..ns].iter().map(|&d| d.min(nc)).collect();
            let g = peg_construct(ns, nc, &degrees, seed).unwrap();
            let again = peg_construct(ns, nc, &degrees, seed).unwrap();
            prop_assert_eq!(&g, &again);
            prop_assert_eq!(g.edge_count(), degrees.iter().sum::<usize>());
            for s in 0..ns {
                prop_assert_eq!(g.symbol_neighbors(s).len(), degrees[s]);
                for &c in g.symbol_neighbors(s) {
                    prop_assert!(g.check_neighbors(c).contains(&s));
                }
            }
            if let Some(len) = girth(&g) {
                prop_assert!(len >= 4 && len % 2 == 0);
            }
            let code = systematic_ldgm_from_graph(&g);
            prop_assert_eq!(gf2_rank(code.generator()).unwrap(), ns);
        }
    }
}

//! The tree inequality `|y, z| + |s(y), z′| ≤ |A| + max{|α|, q}` by a scan
//! over all triples of grid points.
//!
//! Points are vertices and edge midpoints, distances are in half units. On
//! a tree both sides are piecewise linear in the points with breakpoints on
//! this grid, so the grid maximum is the maximum over the tree.

use std::collections::VecDeque;
use std::time::Instant;

use rand::Rng;

use super::{OracleResult, Witness};
use crate::seed::stream;
use crate::walls::lemmas::{sublemma_sides, HalfTree};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SublemmaOutcome {
    /// The hypotheses fail: not a tree, `α` not a path, or the tree is not
    /// in the `q`-neighbourhood of `α`.
    Skipped(String),
    /// Largest left side and the bound, in half units.
    Checked { max: u32, bound: u32 },
}

/// Uniform attachment: vertex `i + 1` joins a uniformly chosen earlier one.
pub fn random_tree(rng: &mut impl Rng, edges: usize) -> Vec<(usize, usize)> {
    (0..edges).map(|i| (rng.gen_range(0..=i), i + 1)).collect()
}

/// Vertex sequence from `a` to `b`, if they are joined.
pub fn tree_path(n: usize, edges: &[(usize, usize)], a: usize, b: usize) -> Option<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut parent = vec![usize::MAX; n];
    parent[a] = a;
    let mut stack = vec![a];
    while let Some(x) = stack.pop() {
        for &y in &adj[x] {
            if parent[y] == usize::MAX {
                parent[y] = x;
                stack.push(y);
            }
        }
    }
    if parent[b] == usize::MAX {
        return None;
    }
    let mut path = vec![b];
    while *path.last()? != a {
        path.push(parent[*path.last()?]);
    }
    path.reverse();
    Some(path)
}

/// The tree with a node at every vertex and every edge midpoint.
struct Grid {
    adj: Vec<Vec<usize>>,
    /// `α` as a grid sequence.
    alpha: Vec<usize>,
}

impl Grid {
    fn new(n: usize, edges: &[(usize, usize)], alpha: &[usize]) -> Result<Self, String> {
        if n != edges.len() + 1 || edges.iter().any(|&(a, b)| a >= n || b >= n || a == b) {
            return Err("not a tree on 0..n".into());
        }
        let mut adj = vec![Vec::new(); n + edges.len()];
        for (i, &(a, b)) in edges.iter().enumerate() {
            adj[a].push(n + i);
            adj[b].push(n + i);
            adj[n + i].extend([a, b]);
        }
        let grid = Grid { adj, alpha: Vec::new() };
        if grid.from(0).contains(&u32::MAX) {
            return Err("not connected".into());
        }
        let Some(&first) = alpha.first() else { return Err("empty α".into()) };
        let mut seq = vec![first];
        for w in alpha.windows(2) {
            let mid = edges.iter().position(|&(a, b)| (a, b) == (w[0], w[1]) || (b, a) == (w[0], w[1]));
            let Some(i) = mid else { return Err(format!("{}–{} is not an edge", w[0], w[1])) };
            seq.extend([n + i, w[1]]);
        }
        if alpha.iter().collect::<std::collections::BTreeSet<_>>().len() != alpha.len() {
            return Err("α repeats a vertex".into());
        }
        Ok(Grid { alpha: seq, ..grid })
    }

    fn from(&self, s: usize) -> Vec<u32> {
        let mut d = vec![u32::MAX; self.adj.len()];
        d[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(x) = q.pop_front() {
            for &y in &self.adj[x] {
                if d[y] == u32::MAX {
                    d[y] = d[x] + 1;
                    q.push_back(y);
                }
            }
        }
        d
    }

    /// Least `q` with the tree inside the `q`-neighbourhood of `α`.
    fn radius(&self, all: &[Vec<u32>]) -> u32 {
        (0..self.adj.len()).map(|z| self.alpha.iter().map(|&a| all[a][z]).min().unwrap_or(u32::MAX)).max().unwrap_or(0)
    }
}

/// Checks the inequality for the tree on `0..n` with `edges`, the path
/// `alpha` (a vertex sequence) and `q` in half units.
pub fn oracle_sublemma(n: usize, edges: &[(usize, usize)], alpha: &[usize], q: u32) -> SublemmaOutcome {
    let grid = match Grid::new(n, edges, alpha) {
        Ok(g) => g,
        Err(e) => return SublemmaOutcome::Skipped(e),
    };
    let all: Vec<Vec<u32>> = (0..grid.adj.len()).map(|s| grid.from(s)).collect();
    if grid.radius(&all) > q {
        return SublemmaOutcome::Skipped(format!("tree is not within {q} of α"));
    }
    let m = grid.alpha.len();
    let nodes = grid.adj.len();
    let mut max = 0;
    for i in 0..m {
        let (y, sy) = (grid.alpha[i], grid.alpha[m - 1 - i]);
        for z in 0..nodes {
            for z2 in 0..nodes {
                max = max.max(all[y][z] + all[sy][z2]);
            }
        }
    }
    let alpha_len = (m - 1) as u32;
    SublemmaOutcome::Checked { max, bound: 2 * edges.len() as u32 + alpha_len.max(q) }
}

/// `count` seeded random trees with `1..=max_edges` edges, a random path
/// `α` and a random valid `q`. Each instance is also compared with the
/// closed form used during wall construction, at the least valid `q`.
pub fn sublemma_sweep(count: usize, max_edges: usize, seed: u64) -> OracleResult {
    let start = Instant::now();
    let mut rng = stream(seed, "oracle-sublemma");
    let mut out = OracleResult::new("sublemma47");
    for k in 0..count {
        let m = rng.gen_range(1..=max_edges);
        let edges = random_tree(&mut rng, m);
        let (a, b) = (rng.gen_range(0..=m), rng.gen_range(0..=m));
        let alpha = tree_path(m + 1, &edges, a, b).expect("trees are connected");
        let grid = Grid::new(m + 1, &edges, &alpha).expect("valid instance");
        let all: Vec<Vec<u32>> = (0..grid.adj.len()).map(|s| grid.from(s)).collect();
        let radius = grid.radius(&all);
        let q = radius + rng.gen_range(0..=2);
        let SublemmaOutcome::Checked { max, bound } = oracle_sublemma(m + 1, &edges, &alpha, q) else {
            out.skipped += 1;
            continue;
        };
        let instance = || format!("tree {k}: edges {edges:?} α {alpha:?} q {q}");
        out.record(max <= bound, instance, || format!("max {max} > bound {bound} (half units)"), true);
        if q == radius {
            let (lhs, closed) = sublemma_sides(&HalfTree::from_edges(m + 1, &edges), &grid.alpha);
            if (lhs, closed) != (max, bound) {
                out.violations.push(Witness {
                    instance: instance(),
                    detail: format!("closed form ({lhs}, {closed}) differs from scan ({max}, {bound})"),
                    admissible: true,
                });
            }
        }
    }
    out.millis = start.elapsed().as_millis();
    out
}

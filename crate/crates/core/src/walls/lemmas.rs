//! Instance-by-instance checks of the metric lemmas behind balanced walls.
//!
//! Every gluing yields instances `(γ, T, T′)`; each lemma first checks its
//! own hypotheses on the instance and counts it as skipped when they fail.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use super::balance::{shard_of, DistCache};
use super::{Step1Context, WallState};
use crate::complex::{analyze_tree, CellId, EdgeId, PatchComplex, TreeKind, TreePath, VertexId};
use crate::tiles::{balance, is_potile, shared_edges, Merge, Provenance, TileCollection, TileId};

#[derive(Clone, Debug, Default, Serialize)]
pub struct LemmaTally {
    pub checked: usize,
    pub skipped: usize,
    pub violated: usize,
    pub violations: Vec<String>,
}

impl LemmaTally {
    fn skip(&mut self) {
        self.skipped += 1;
    }

    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.violated += 1;
            if self.violations.len() < 50 {
                self.violations.push(detail());
            }
        }
    }
}

/// Tallies keyed by lemma: `4.4`, `4.5`, `4.6`, `4.7`, `4.8`, `roundtrees`
/// and `balanceandD'`.
#[derive(Clone, Debug, Default, Serialize)]
pub struct LemmaReport {
    pub lemmas: BTreeMap<String, LemmaTally>,
}

pub const LEMMAS: [&str; 7] = ["4.4", "4.5", "4.6", "4.7", "4.8", "roundtrees", "balanceandD'"];

impl LemmaReport {
    pub fn tally(&mut self, name: &str) -> &mut LemmaTally {
        self.lemmas.entry(name.to_string()).or_default()
    }

    pub fn violations(&self) -> usize {
        self.lemmas.values().map(|t| t.violated).sum()
    }

    pub fn merge(&mut self, other: &LemmaReport) {
        for (k, t) in &other.lemmas {
            let mine = self.tally(k);
            mine.checked += t.checked;
            mine.skipped += t.skipped;
            mine.violated += t.violated;
            mine.violations.extend(t.violations.iter().cloned());
        }
    }

    pub fn summary(&self) -> String {
        LEMMAS
            .iter()
            .map(|name| {
                let t = self.lemmas.get(*name).cloned().unwrap_or_default();
                format!("{name}: checked {} skipped {} violated {}\n", t.checked, t.skipped, t.violated)
            })
            .collect()
    }
}

/// A tree subdivided at its edge midpoints, so that graph distance is the
/// half-unit distance between vertices and midpoints.
#[derive(Clone, Debug)]
pub struct HalfTree {
    pub adj: Vec<Vec<usize>>,
    /// Number of edges of the original tree.
    pub size: usize,
}

impl HalfTree {
    /// From an edge list on vertices `0..n`. Node `n + i` is the midpoint of
    /// edge `i`.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adj = vec![Vec::new(); n + edges.len()];
        for (i, &(a, b)) in edges.iter().enumerate() {
            let m = n + i;
            adj[a].push(m);
            adj[m].push(a);
            adj[b].push(m);
            adj[m].push(b);
        }
        HalfTree { adj, size: edges.len() }
    }

    pub fn n_nodes(&self) -> usize {
        self.adj.len()
    }

    pub fn distances(&self, from: &[usize]) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.adj.len()];
        let mut queue = VecDeque::new();
        for &s in from {
            dist[s] = 0;
            queue.push_back(s);
        }
        while let Some(x) = queue.pop_front() {
            for &y in &self.adj[x] {
                if dist[y] == u32::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Node sequence of the unique path from `a` to `b`.
    pub fn path(&self, a: usize, b: usize) -> Vec<usize> {
        let dist = self.distances(&[b]);
        let mut out = vec![a];
        let mut x = a;
        while x != b {
            x = *self.adj[x].iter().find(|&&y| dist[y] + 1 == dist[x]).expect("tree is connected");
            out.push(x);
        }
        out
    }
}

/// Both sides of the sublemma inequality for a path `alpha` (a node
/// sequence starting and ending at vertices, or a single node), in half
/// units: the largest `|y, z| + |s(y), z′|` and the bound
/// `|A| + max{|α|, q}` with `q` the least radius covering the tree.
pub fn sublemma_sides(tree: &HalfTree, alpha: &[usize]) -> (u32, u32) {
    let q = tree.distances(alpha).into_iter().max().unwrap_or(0);
    let ecc: Vec<u32> = alpha.iter().map(|&y| tree.distances(&[y]).into_iter().max().unwrap_or(0)).collect();
    let n = alpha.len();
    let lhs = (0..n).map(|p| ecc[p] + ecc[n - 1 - p]).max().unwrap_or(0);
    let alpha_len = n.saturating_sub(1) as u32;
    (lhs, 2 * tree.size as u32 + alpha_len.max(q))
}

/// An intersection tree laid out as a [`HalfTree`].
struct PatchTree {
    tree: HalfTree,
    vertex: HashMap<VertexId, usize>,
    midpoint: HashMap<EdgeId, usize>,
    diameters: Vec<TreePath>,
}

impl PatchTree {
    fn new(patch: &PatchComplex, edges: &BTreeSet<EdgeId>) -> Option<Self> {
        if edges.is_empty() {
            return None;
        }
        let shape = analyze_tree(patch, &patch.edge_subgraph(edges.iter().copied())).ok()?;
        let mut vertex = HashMap::new();
        for &e in edges {
            let (a, b) = patch.edge_ends(e);
            for v in [a, b] {
                let n = vertex.len();
                vertex.entry(v).or_insert(n);
            }
        }
        let list: Vec<EdgeId> = edges.iter().copied().collect();
        let pairs: Vec<(usize, usize)> = list
            .iter()
            .map(|&e| {
                let (a, b) = patch.edge_ends(e);
                (vertex[&a], vertex[&b])
            })
            .collect();
        let n = vertex.len();
        let midpoint = list.iter().enumerate().map(|(i, &e)| (e, n + i)).collect();
        Some(PatchTree { tree: HalfTree::from_edges(n, &pairs), vertex, midpoint, diameters: shape.diameters })
    }

    fn nodes(&self, path: &TreePath) -> Vec<usize> {
        let mut out = vec![self.vertex[&path.vertices[0]]];
        for (i, e) in path.edges.iter().enumerate() {
            out.push(self.midpoint[e]);
            out.push(self.vertex[&path.vertices[i + 1]]);
        }
        out
    }

    /// True when every point of the tree is within `r` half-units of `from`.
    fn covered(&self, from: &[usize], r: u32) -> bool {
        self.tree.distances(from).into_iter().all(|d| d <= r)
    }
}

struct PathInfo {
    ends: (EdgeId, EdgeId),
    shard: TileId,
    balanced: bool,
}

fn path_infos(
    patch: &PatchComplex,
    tc: &TileCollection,
    state: &WallState,
    tile: TileId,
    cache: &mut DistCache,
) -> Vec<PathInfo> {
    let cells = &tc.tile(tile).cells;
    let (paths, _) = state.tile_graph(patch, cells).paths(state.config.path_limit);
    paths
        .into_iter()
        .map(|path| {
            let ends = path.ends();
            let shard = shard_of(patch, tc, tile, &path.cells()).expect("wall paths stay in their tile");
            let d = cache.mid(patch, cells, ends.0, ends.1).unwrap_or(0) as i64;
            let balanced = d >= 2 * balance(patch, &tc.tile(shard).cells);
            PathInfo { ends, shard, balanced }
        })
        .collect()
}

fn union(a: &BTreeSet<CellId>, b: &BTreeSet<CellId>) -> BTreeSet<CellId> {
    a.union(b).copied().collect()
}

fn other_end(ends: (EdgeId, EdgeId), y: EdgeId) -> EdgeId {
    if ends.0 == y {
        ends.1
    } else {
        ends.0
    }
}

/// Checks run just before `T` and `T′` are glued, on their current walls.
pub(crate) fn pre_merge(state: &mut WallState, patch: &PatchComplex, tc: &TileCollection, m: &Merge) {
    let ell = patch.ell() as i64;
    let (s, s2) = (m.first, m.second);
    let (a, b) = (tc.tile(s).cells.clone(), tc.tile(s2).cells.clone());
    let shared = shared_edges(patch, &a, &b);
    if shared.is_empty() {
        return;
    }
    let mut report = super::LemmaReport::default();
    let mut cache = DistCache::default();
    let infos_a = path_infos(patch, tc, state, s, &mut cache);
    let infos_b = path_infos(patch, tc, state, s2, &mut cache);
    let cells_of = |t: TileId| &tc.tile(t).cells;

    // 4.4 and 4.5, with T = sh_S(γ) and T′ the partner tile.
    for (infos, partner) in [(&infos_a, &b), (&infos_b, &a)] {
        let partner_edges: BTreeSet<EdgeId> =
            partner.iter().flat_map(|&c| patch.cell_edges(c).iter().copied()).collect();
        for info in infos {
            if !info.balanced {
                report.tally("4.4").skip();
                report.tally("4.5").skip();
                continue;
            }
            let (x, x2) = info.ends;
            let inside = [x, x2].iter().filter(|e| partner_edges.contains(e)).count();
            report.tally("4.4").check(inside <= 1, || format!("decision {}: both ends {x}, {x2} in partner", m.decision));

            let sh = cells_of(info.shard);
            let inter = shared_edges(patch, sh, partner).len() as i64;
            let u = union(sh, partner);
            if inter == 0 || !is_potile(patch, &u).unwrap_or(false) {
                report.tally("4.5").skip();
                continue;
            }
            let d = cache.mid(patch, &u, x, x2).unwrap_or(0) as i64;
            let need = 2 * (balance(patch, &u) + inter) - ell / 2;
            report.tally("4.5").check(d >= need, || {
                format!("decision {}: |{x},{x2}| = {}/2 < {need}/2", m.decision, d)
            });
        }
    }

    // 4.8: γ ⊂ S and γ′ ⊂ S′ meeting at a shared midpoint y.
    let mut at_b: HashMap<EdgeId, Vec<usize>> = HashMap::new();
    for (j, info) in infos_b.iter().enumerate() {
        for e in [info.ends.0, info.ends.1] {
            at_b.entry(e).or_default().push(j);
        }
    }
    let mut trees: HashMap<(TileId, TileId), Option<PatchTree>> = HashMap::new();
    for ga in &infos_a {
        for y in [ga.ends.0, ga.ends.1] {
            if !shared.contains(&y) {
                continue;
            }
            for &j in at_b.get(&y).into_iter().flatten() {
                let gb = &infos_b[j];
                let (sh, sh2) = (cells_of(ga.shard), cells_of(gb.shard));
                let inter = shared_edges(patch, sh, sh2);
                let tree = trees.entry((ga.shard, gb.shard)).or_insert_with(|| PatchTree::new(patch, &inter));
                let ok_hyp = ga.balanced
                    && gb.balanced
                    && inter.contains(&y)
                    && 2 * inter.len() as i64 <= ell
                    && tree.as_ref().is_some_and(|t| t.covered(&[t.midpoint[&y]], (ell / 2) as u32));
                if !ok_hyp {
                    report.tally("4.8").skip();
                    continue;
                }
                let (x, x2) = (other_end(ga.ends, y), other_end(gb.ends, y));
                let u = union(sh, sh2);
                let d = cache.mid(patch, &u, x, x2).unwrap_or(0) as i64;
                let need = 2 * balance(patch, &u);
                report.tally("4.8").check(d >= need, || {
                    format!("decision {}: |{x},{x2}| = {}/2 < Bal = {}", m.decision, d, need / 2)
                });
            }
        }
    }

    // 4.6: γ′ has an end x on α with s_α(x) = y an end of γ.
    for (left, right) in [(&infos_a, &infos_b), (&infos_b, &infos_a)] {
        for gp in right.iter() {
            for g in left.iter() {
                let (sh, sh2) = (cells_of(g.shard), cells_of(gp.shard));
                let key = (g.shard, gp.shard);
                let tree = trees.entry(key).or_insert_with(|| PatchTree::new(patch, &shared_edges(patch, sh, sh2)));
                let Some(tree) = tree.as_ref() else { continue };
                for dpath in &tree.diameters {
                    let nodes = tree.nodes(dpath);
                    for x in [gp.ends.0, gp.ends.1] {
                        let Some(p) = tree.midpoint.get(&x).and_then(|xn| nodes.iter().position(|n| n == xn)) else {
                            continue;
                        };
                        let yn = nodes[nodes.len() - 1 - p];
                        let Some(y) = [g.ends.0, g.ends.1].into_iter().find(|e| tree.midpoint.get(e) == Some(&yn))
                        else {
                            continue;
                        };
                        if 4 * tree.tree.size as i64 <= ell
                            || !g.balanced
                            || !gp.balanced
                            || !tree.covered(&nodes, (ell / 2) as u32)
                        {
                            report.tally("4.6").skip();
                            continue;
                        }
                        let (x1, x2) = (other_end(gp.ends, x), other_end(g.ends, y));
                        let u = union(sh, sh2);
                        let d = cache.mid(patch, &u, x1, x2).unwrap_or(0) as i64;
                        let need = 2 * balance(patch, &u);
                        report.tally("4.6").check(d >= need, || {
                            format!("decision {}: |{x1},{x2}| = {}/2 < Bal = {}", m.decision, d, need / 2)
                        });
                    }
                }
            }
        }
    }

    // 4.7 on the intersection tree, for each diameter and each midpoint.
    match PatchTree::new(patch, &shared) {
        Some(tree) => {
            let mut alphas: Vec<Vec<usize>> = tree.diameters.iter().take(16).map(|d| tree.nodes(d)).collect();
            alphas.extend(tree.midpoint.values().map(|&n| vec![n]));
            for alpha in alphas {
                let (lhs, bound) = sublemma_sides(&tree.tree, &alpha);
                report.tally("4.7").check(lhs <= bound, || {
                    format!("decision {}: sublemma {lhs} > {bound} (half units)", m.decision)
                });
            }
        }
        None => report.tally("4.7").skip(),
    }

    // balanceandD′ for Step-1 gluings with |T| ≤ |T′| = 3.
    if m.step == 1 {
        balance_and_d(&mut report, patch, tc, s, s2, m.decision);
    }

    state.lemmas.merge(&report);
}

/// `(D, |β|)`: the 2-cell core part of a 3-tile and the overlap with its
/// remaining cell, or the tile itself for smaller tiles.
fn core_pair(patch: &PatchComplex, tc: &TileCollection, t: TileId) -> Option<(BTreeSet<CellId>, usize)> {
    let tile = tc.tile(t);
    match (tile.size(), tile.provenance) {
        (1 | 2, _) => Some((tile.cells.clone(), 0)),
        (3, Provenance::Core { older, younger }) => {
            let (p, q) = (&tc.tile(older).cells, &tc.tile(younger).cells);
            let d = if p.len() == 2 { p } else { q };
            Some((d.clone(), shared_edges(patch, p, q).len()))
        }
        _ => None,
    }
}

fn balance_and_d(report: &mut LemmaReport, patch: &PatchComplex, tc: &TileCollection, s: TileId, s2: TileId, decision: usize) {
    let ell = patch.ell() as i64;
    let (mut t, mut t2) = if tc.tile(s).size() <= tc.tile(s2).size() { (s, s2) } else { (s2, s) };
    if tc.tile(t2).size() != 3 {
        report.tally("balanceandD'").skip();
        return;
    }
    let (Some(mut pd), Some(mut pd2)) = (core_pair(patch, tc, t), core_pair(patch, tc, t2)) else {
        report.tally("balanceandD'").skip();
        return;
    };
    let can = |c: &BTreeSet<CellId>| crate::complex::can_of_cells(patch, c) as i64;
    if tc.tile(t).size() == 3 && can(&pd.0) < can(&pd2.0) {
        std::mem::swap(&mut t, &mut t2);
        std::mem::swap(&mut pd, &mut pd2);
    }
    let beta_ok = |size: usize, beta: usize| size < 3 || 4 * beta as i64 >= ell;
    if can(&pd.0) < can(&pd2.0) || !beta_ok(tc.tile(t).size(), pd.1) || !beta_ok(3, pd2.1) {
        report.tally("balanceandD'").skip();
        return;
    }
    let (a, b) = (&tc.tile(t).cells, &tc.tile(t2).cells);
    let u = union(a, b);
    let inter = shared_edges(patch, a, b).len() as i64;
    let lhs = balance(patch, &u);
    let rhs = 5 * ell / 4 - 2 * can(&pd2.0) - inter;
    report.tally("balanceandD'").check(lhs <= rhs, || format!("decision {decision}: Bal {lhs} > {rhs}"));
}

/// Round-tree gluings: walls inside one side, and concatenations of one
/// wall from each side through a single shared midpoint, stay balanced.
pub(crate) fn round_trees(state: &mut WallState, patch: &PatchComplex, tc: &TileCollection, ctx: &Step1Context, id: TileId) {
    let ell = patch.ell();
    let tally_skip = |state: &mut WallState| state.lemmas.tally("roundtrees").skip();
    if ctx.kind != Some(TreeKind::Round) || 4 * ctx.shared.len() < ell {
        tally_skip(state);
        return;
    }
    let (t, t2) = (tc.tile(ctx.older).cells.clone(), tc.tile(ctx.younger).cells.clone());
    let u = tc.tile(id).cells.clone();
    let (paths, _) = state.tile_graph(patch, &u).paths(state.config.path_limit);
    let mut cache = DistCache::default();
    let need = 2 * balance(patch, &u);
    let (bal, bal2) = (2 * balance(patch, &t), 2 * balance(patch, &t2));
    for p in paths {
        let cells = p.cells();
        let (x, x2) = p.ends();
        let hyp = if cells.is_subset(&t) {
            cache.mid(patch, &t, x, x2).unwrap_or(0) as i64 >= bal
        } else if cells.is_subset(&t2) {
            cache.mid(patch, &t2, x, x2).unwrap_or(0) as i64 >= bal2
        } else {
            let inner: Vec<usize> =
                (1..p.midpoints.len().saturating_sub(1)).filter(|&i| ctx.shared.contains(&p.midpoints[i])).collect();
            match inner.as_slice() {
                [i] => {
                    let y = p.midpoints[*i];
                    let first: BTreeSet<CellId> = p.links[..*i].iter().map(|l| l.cell).collect();
                    let second: BTreeSet<CellId> = p.links[*i..].iter().map(|l| l.cell).collect();
                    let split = |c1: &BTreeSet<CellId>, b1: i64, c2: &BTreeSet<CellId>, b2: i64, cache: &mut DistCache| {
                        first.is_subset(c1)
                            && second.is_subset(c2)
                            && cache.mid(patch, c1, x, y).unwrap_or(0) as i64 >= b1
                            && cache.mid(patch, c2, y, x2).unwrap_or(0) as i64 >= b2
                    };
                    split(&t, bal, &t2, bal2, &mut cache) || split(&t2, bal2, &t, bal, &mut cache)
                }
                _ => false,
            }
        };
        if !hyp {
            tally_skip(state);
            continue;
        }
        let d = cache.mid(patch, &u, x, x2).unwrap_or(0) as i64;
        state.lemmas.tally("roundtrees").check(d >= need, || {
            format!("decision {}: |{x},{x2}| = {}/2 < Bal = {}", ctx.decision, d, need / 2)
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_tree(n: usize) -> HalfTree {
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, i + 1)).collect();
        HalfTree::from_edges(n + 1, &edges)
    }

    #[test]
    fn sublemma_on_a_path_is_tight() {
        let t = path_tree(6);
        let alpha = t.path(0, 6);
        let (lhs, bound) = sublemma_sides(&t, &alpha);
        assert_eq!(lhs, 24);
        assert_eq!(bound, 12 + 12);
    }

    #[test]
    fn sublemma_with_a_point() {
        // A star with three legs of length 2; α is the centre.
        let edges = [(0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6)];
        let t = HalfTree::from_edges(7, &edges);
        let (lhs, bound) = sublemma_sides(&t, &[0]);
        assert_eq!(lhs, 8);
        assert_eq!(bound, 12 + 4);
    }

    #[test]
    fn half_tree_path_alternates() {
        let t = path_tree(3);
        assert_eq!(t.path(0, 3), vec![0, 4, 1, 5, 2, 6, 3]);
    }

    #[test]
    fn report_summary_lists_all_lemmas() {
        let mut r = LemmaReport::default();
        r.tally("4.5").check(false, || "x".into());
        let s = r.summary();
        assert_eq!(s.lines().count(), LEMMAS.len());
        assert!(s.contains("4.5: checked 1 skipped 0 violated 1"));
        assert_eq!(r.violations(), 1);
    }
}

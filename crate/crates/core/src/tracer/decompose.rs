//! Decompositions of wall paths along the tile collection, and the search
//! for returning segments.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::complex::{Admissibility, CellId, EdgeId, PatchComplex};
use crate::tiles::{balance, TileCollection, TileId};
use crate::walls::{shard_of, DistCache, TileWallGraph, WallPath};

/// Links `start..end` of a path, assigned to `tile`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Factor {
    pub start: usize,
    pub end: usize,
    pub midpoints: Vec<EdgeId>,
    pub tile: TileId,
    /// The tile `T` with `tile = sh_T(γ_i)`; `None` in fractured factors.
    pub host: Option<TileId>,
    /// `|x, x′|_{T_i} ≥ Bal(T_i)`.
    pub balanced: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Decomposition {
    pub midpoints: Vec<EdgeId>,
    /// A decomposition of minimal length.
    pub factors: Vec<Factor>,
    pub reduced: bool,
    /// Pairwise cell-disjoint tiles with every factor balanced, of minimal
    /// length; `None` when no such refinement exists.
    pub fractured: Option<Vec<Factor>>,
}

impl Decomposition {
    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }
}

struct Ctx<'a> {
    patch: &'a PatchComplex,
    tc: &'a TileCollection,
    path: &'a WallPath,
    cache: DistCache,
    /// Tiles of the whole history, one per cell set.
    tiles: Vec<TileId>,
}

impl Ctx<'_> {
    fn cells(&self, i: usize, j: usize) -> BTreeSet<CellId> {
        self.path.links[i..j].iter().map(|l| l.cell).collect()
    }

    fn covering(&self, seg: &BTreeSet<CellId>) -> impl Iterator<Item = TileId> + '_ {
        let seg = seg.clone();
        self.tiles.iter().copied().filter(move |&t| seg.is_subset(&self.tc.tile(t).cells))
    }

    fn balanced(&mut self, i: usize, j: usize, t: TileId) -> bool {
        let cells = &self.tc.tile(t).cells;
        let (x, y) = (self.path.midpoints[i], self.path.midpoints[j]);
        let d = self.cache.mid(self.patch, cells, x, y).unwrap_or(0) as i64;
        d >= 2 * balance(self.patch, cells)
    }

    fn factor(&mut self, i: usize, j: usize, tile: TileId, host: Option<TileId>) -> Factor {
        let balanced = self.balanced(i, j, tile);
        Factor { start: i, end: j, midpoints: self.path.midpoints[i..=j].to_vec(), tile, host, balanced }
    }

    /// `sh_T(γ_i)` over all hosts `T`, largest first, then by id.
    fn best_shard(&self, seg: &BTreeSet<CellId>) -> Option<(TileId, TileId)> {
        self.covering(seg)
            .map(|t| (shard_of(self.patch, self.tc, t, seg).expect("host covers the segment"), t))
            .max_by_key(|&(s, t)| (self.tc.tile(s).size(), std::cmp::Reverse((s, t))))
    }

    fn fracture(&mut self, pos: usize, left: usize, used: &BTreeSet<CellId>, out: &mut Vec<Factor>, budget: &mut usize) -> bool {
        let k = self.path.links.len();
        if pos == k {
            return true;
        }
        if left == 0 || *budget == 0 {
            return false;
        }
        *budget -= 1;
        for j in (pos + 1..=k).rev() {
            let seg = self.cells(pos, j);
            let options: Vec<TileId> = self.covering(&seg).filter(|&t| self.tc.tile(t).cells.is_disjoint(used)).collect();
            for t in options {
                if !self.balanced(pos, j, t) {
                    continue;
                }
                let mut used2 = used.clone();
                used2.extend(self.tc.tile(t).cells.iter().copied());
                out.push(self.factor(pos, j, t, None));
                if self.fracture(j, left - 1, &used2, out, budget) {
                    return true;
                }
                out.pop();
            }
        }
        false
    }
}

/// Minimal-length decomposition of `path`, plus its fractured refinement.
/// Factors draw their tiles from the whole construction history.
pub fn decompose(patch: &PatchComplex, tc: &TileCollection, path: &WallPath) -> Decomposition {
    let mut seen_sets = BTreeSet::new();
    let tiles: Vec<TileId> =
        tc.tiles.iter().rev().filter(|t| seen_sets.insert(t.cells.clone())).map(|t| t.id).rev().collect();
    let mut ctx = Ctx { patch, tc, path, cache: DistCache::default(), tiles };
    let k = path.links.len();

    // best[j]: fewest factors covering links 0..j, with the choice made.
    let mut best: Vec<Option<(usize, usize, TileId, TileId)>> = vec![None; k + 1];
    let mut count = vec![usize::MAX; k + 1];
    count[0] = 0;
    for j in 1..=k {
        for i in 0..j {
            if count[i] == usize::MAX || count[i] + 1 >= count[j] {
                continue;
            }
            if let Some((s, t)) = ctx.best_shard(&ctx.cells(i, j)) {
                count[j] = count[i] + 1;
                best[j] = Some((i, j, s, t));
            }
        }
    }
    let mut factors = Vec::new();
    let mut j = k;
    while j > 0 {
        let Some((i, _, s, t)) = best[j] else { break };
        factors.push(ctx.factor(i, j, s, Some(t)));
        j = i;
    }
    factors.reverse();

    let is_tile = |c: &BTreeSet<CellId>| tc.find(c).is_some();
    let cells_of = |f: &Factor| &tc.tile(f.tile).cells;
    let adjacent_ok = factors.windows(2).all(|w| !is_tile(&cells_of(&w[0]).union(cells_of(&w[1])).copied().collect()));
    let far_ok = (0..factors.len())
        .all(|i| (i + 2..factors.len()).all(|j| cells_of(&factors[i]).is_disjoint(cells_of(&factors[j]))));

    let mut fractured = None;
    let mut budget = 200_000;
    for len in 1..=k {
        let mut out = Vec::new();
        if ctx.fracture(0, len, &BTreeSet::new(), &mut out, &mut budget) {
            fractured = Some(out);
            break;
        }
    }
    Decomposition { midpoints: path.midpoints.clone(), factors, reduced: adjacent_ok && far_ok, fractured }
}

/// A segment returning at `t0`, with the claim-level quantities of the
/// no-return argument.
#[derive(Clone, Debug, Serialize)]
pub struct ReturningHit {
    pub midpoints: Vec<EdgeId>,
    pub t0: TileId,
    pub factors: Vec<TileId>,
    /// 2-cells of `T₀ ∪ ⋃ T_i` outside those tiles; zero by construction at
    /// patch scale.
    pub e_count: usize,
    /// `|T₀ ∪ ⋃ T_i|`.
    pub y_size: usize,
    /// `|x₀, x_n|_{T₀}` in edges.
    pub alpha0: u32,
    /// `|Y| ≤ 6` and `|α₀| ≤ ℓ/2`.
    pub claims_hold: bool,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ReturningReport {
    pub segments_checked: usize,
    pub truncated: bool,
    pub hits: Vec<ReturningHit>,
    /// Admissibility summary of the patch, recorded when there are hits.
    pub admissibility: Option<String>,
    /// Set when the patch fails admissibility, which accounts for the hits.
    pub explained: bool,
}

impl ReturningReport {
    pub fn cross_reference(&mut self, adm: &Admissibility) {
        if !self.hits.is_empty() {
            self.admissibility = Some(adm.summary());
            self.explained = !adm.admissible();
        }
    }

    /// No hits, or hits on a patch with a recorded violation.
    pub fn consistent(&self) -> bool {
        self.hits.is_empty() || self.explained
    }
}

/// Every wall segment with a decomposition shorter than `n_ret` whose two
/// ends lie in one alive tile `T₀` while no factor tile holds all the
/// others.
pub fn detect_returning(
    patch: &PatchComplex,
    tc: &TileCollection,
    graph: &TileWallGraph,
    n_ret: usize,
    path_limit: usize,
) -> ReturningReport {
    let (paths, truncated) = graph.paths(path_limit);
    let mut report = ReturningReport { truncated, ..Default::default() };
    let mut cache = DistCache::default();
    for p in paths.iter().filter(|p| p.links.len() >= 2) {
        report.segments_checked += 1;
        let d = decompose(patch, tc, p);
        let n = d.len();
        if n < 2 || n >= n_ret || d.factors.last().map(|f| f.end) != Some(p.links.len()) {
            continue;
        }
        let union: BTreeSet<CellId> = d.factors.iter().flat_map(|f| tc.tile(f.tile).cells.iter().copied()).collect();
        if d.factors.iter().any(|f| union.is_subset(&tc.tile(f.tile).cells)) {
            continue;
        }
        let (x0, xn) = p.ends();
        for t0 in tc.alive() {
            let edges: BTreeSet<EdgeId> = t0.cells.iter().flat_map(|&c| patch.cell_edges(c).iter().copied()).collect();
            if !(edges.contains(&x0) && edges.contains(&xn)) {
                continue;
            }
            let y: BTreeSet<CellId> = union.union(&t0.cells).copied().collect();
            let alpha0 = cache.mid(patch, &t0.cells, x0, xn).unwrap_or(0) / 2;
            report.hits.push(ReturningHit {
                midpoints: p.midpoints.clone(),
                t0: t0.id,
                factors: d.factors.iter().map(|f| f.tile).collect(),
                e_count: 0,
                y_size: y.len(),
                alpha0,
                claims_hold: y.len() <= 6 && 2 * alpha0 as usize <= patch.ell(),
            });
        }
    }
    report
}

//! Shards, balance verification and the case split of wall paths.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use super::graph::{WallPath, WallViolation};
use super::{Step1Context, WallState};
use crate::complex::{CellId, EdgeId, PatchComplex, Point, SkeletonGraph};
use crate::error::{Error, Result};
use crate::tiles::{balance, Provenance, TileCollection, TileId};

/// `sh_T(γ)` for a wall path through `gamma` (its 2-cells), following the
/// provenance of `tile`.
pub fn shard_of(patch: &PatchComplex, tc: &TileCollection, tile: TileId, gamma: &BTreeSet<CellId>) -> Result<TileId> {
    let t = tc.tile(tile);
    if !gamma.is_subset(&t.cells) {
        return Err(Error::PathNotInTile(tile.0));
    }
    Ok(match t.provenance {
        Provenance::Start | Provenance::Core { .. } => tile,
        Provenance::Small { s, s2 } => {
            let whole = balance(patch, &t.cells);
            [s, s2]
                .into_iter()
                .find(|&p| gamma.is_subset(&tc.tile(p).cells) && balance(patch, &tc.tile(p).cells) < whole)
                .unwrap_or(tile)
        }
        Provenance::Large { r2, .. } => {
            if gamma.is_subset(&tc.tile(r2).cells) {
                shard_of(patch, tc, r2, gamma)?
            } else {
                tile
            }
        }
    })
}

/// Half-unit midpoint distances inside closures of cell sets, memoised.
#[derive(Default)]
pub struct DistCache {
    graphs: HashMap<BTreeSet<CellId>, (SkeletonGraph, HashMap<Point, HashMap<Point, u32>>)>,
}

impl DistCache {
    pub fn dist(&mut self, patch: &PatchComplex, cells: &BTreeSet<CellId>, x: Point, y: Point) -> Option<u32> {
        let (graph, memo) = self
            .graphs
            .entry(cells.clone())
            .or_insert_with(|| (SkeletonGraph::new(patch, &patch.closure(cells.iter().copied())), HashMap::new()));
        if !graph.contains(x) || !graph.contains(y) {
            return None;
        }
        let from = memo.entry(x).or_insert_with(|| graph.distances_from(x).expect("point is in the graph"));
        from.get(&y).copied()
    }

    pub fn mid(&mut self, patch: &PatchComplex, cells: &BTreeSet<CellId>, x: EdgeId, y: EdgeId) -> Option<u32> {
        self.dist(patch, cells, Point::Midpoint(x), Point::Midpoint(y))
    }
}

/// The seven ways a wall path can sit in `T ∪ T′` after a Step-1 gluing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum WallCase {
    #[serde(rename = "1")]
    C1,
    #[serde(rename = "2a")]
    C2a,
    #[serde(rename = "2b")]
    C2b,
    #[serde(rename = "3a")]
    C3a,
    #[serde(rename = "3b")]
    C3b,
    #[serde(rename = "4a")]
    C4a,
    #[serde(rename = "4b")]
    C4b,
    /// Meets `T ∩ T′` in more than one vertex, or in a pattern the list
    /// does not cover.
    Unclassified,
}

impl WallCase {
    pub fn label(self) -> &'static str {
        match self {
            WallCase::C1 => "1",
            WallCase::C2a => "2a",
            WallCase::C2b => "2b",
            WallCase::C3a => "3a",
            WallCase::C3b => "3b",
            WallCase::C4a => "4a",
            WallCase::C4b => "4b",
            WallCase::Unclassified => "unclassified",
        }
    }
}

impl std::fmt::Display for WallCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Case of `path` with respect to the gluing of `older` and `younger` along
/// `shared`, with `alpha` the edges of α+ ∪ α- (empty for round trees).
pub fn classify_wall_case(
    path: &WallPath,
    older: &BTreeSet<CellId>,
    younger: &BTreeSet<CellId>,
    shared: &BTreeSet<EdgeId>,
    alpha: &BTreeSet<EdgeId>,
) -> WallCase {
    let cells = path.cells();
    let in_one = cells.is_subset(older) || cells.is_subset(younger);
    let (x, x2) = path.ends();
    let ends_in: Vec<EdgeId> = [x, x2].into_iter().filter(|e| shared.contains(e)).collect();
    let inner_in: Vec<EdgeId> = path.interior().iter().copied().filter(|e| shared.contains(e)).collect();
    let any_alpha = path.midpoints.iter().any(|e| alpha.contains(e));
    let single_interior = |a, b| match inner_in.as_slice() {
        [y] if alpha.contains(y) => a,
        [_] if !any_alpha => b,
        _ => WallCase::Unclassified,
    };
    if in_one {
        match (ends_in.len(), inner_in.len()) {
            (0, 0) => WallCase::C1,
            (1, 0) if alpha.contains(&ends_in[0]) => WallCase::C2a,
            (1, 0) => WallCase::C2b,
            (0, 1) => single_interior(WallCase::C3a, WallCase::C3b),
            _ => WallCase::Unclassified,
        }
    } else if ends_in.is_empty() {
        single_interior(WallCase::C4a, WallCase::C4b)
    } else {
        WallCase::Unclassified
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BalanceFailure {
    pub tile: TileId,
    pub midpoints: Vec<EdgeId>,
    pub shard: TileId,
    /// `|x, x′|_T` in edges.
    pub distance: u32,
    /// `Bal(sh_T(γ))` in edges.
    pub required: i64,
    pub case: Option<WallCase>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BalanceReport {
    pub tile: TileId,
    pub paths_checked: usize,
    pub truncated: bool,
    pub failures: Vec<BalanceFailure>,
    pub violations: Vec<WallViolation>,
    /// Case of every wall path, filled for Step-1 tiles.
    #[serde(skip)]
    pub cases: Vec<(Vec<EdgeId>, WallCase)>,
}

impl BalanceReport {
    pub fn is_clean(&self) -> bool {
        self.failures.is_empty() && self.violations.is_empty() && !self.truncated
    }
}

/// Checks `|x, x′|_T ≥ Bal(sh_T(γ))` for every wall path of `tile`, and the
/// tile-wall conditions. With a Step-1 context each path is also assigned
/// its case.
pub fn verify_balanced(
    patch: &PatchComplex,
    tc: &TileCollection,
    state: &WallState,
    tile: TileId,
    ctx: Option<&Step1Context>,
) -> BalanceReport {
    let cells = &tc.tile(tile).cells;
    let graph = state.tile_graph(patch, cells);
    let (paths, truncated) = graph.paths(state.config.path_limit);
    let mut cache = DistCache::default();
    let mut failures = Vec::new();
    let mut cases = Vec::new();
    let alpha = ctx.map(|c| c.alpha_edges()).unwrap_or_default();
    for p in &paths {
        let case = ctx.map(|c| {
            classify_wall_case(p, &tc.tile(c.older).cells, &tc.tile(c.younger).cells, &c.shared, &alpha)
        });
        if let Some(case) = case {
            cases.push((p.midpoints.clone(), case));
        }
        let shard = shard_of(patch, tc, tile, &p.cells()).expect("wall paths stay in their tile");
        let required = balance(patch, &tc.tile(shard).cells);
        let (x, y) = p.ends();
        let half = cache.mid(patch, cells, x, y).expect("a tile is connected");
        if (half as i64) < 2 * required {
            failures.push(BalanceFailure {
                tile,
                midpoints: p.midpoints.clone(),
                shard,
                distance: half / 2,
                required,
                case,
            });
        }
    }
    BalanceReport { tile, paths_checked: paths.len(), truncated, failures, violations: graph.check(patch), cases }
}

//! Global walls: tile-walls concatenated across the whole patch, checked
//! for embeddedness, decomposed along the tile collection and exported as
//! side assignments.

mod decompose;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

pub use decompose::{decompose, detect_returning, Decomposition, Factor, ReturningHit, ReturningReport};

use crate::complex::{CellId, EdgeId, PatchComplex};
use crate::error::{Error, Result};
use crate::rational::Q;
use crate::walls::{TileWallGraph, WallLink, WallState};

/// One connected component of the global wall graph.
#[derive(Clone, Debug, Serialize)]
pub struct WallTrace {
    pub id: usize,
    /// Sorted.
    pub midpoints: Vec<EdgeId>,
    pub links: Vec<WallLink>,
    /// Cells in the order a breadth-first walk from the smallest midpoint
    /// meets them; a repeat means the wall passes a cell twice.
    pub cells: Vec<CellId>,
}

/// Wall graph of the whole patch.
pub fn global_graph(patch: &PatchComplex, state: &WallState) -> TileWallGraph {
    let all: BTreeSet<CellId> = patch.cell_ids().collect();
    state.tile_graph(patch, &all)
}

/// Components of the global wall graph, ordered by smallest midpoint.
pub fn trace_walls(patch: &PatchComplex, state: &WallState) -> Vec<WallTrace> {
    let g = global_graph(patch, state);
    g.components
        .iter()
        .enumerate()
        .map(|(id, comp)| {
            let start = *comp.iter().next().expect("components are non-empty");
            let mut seen_links = BTreeSet::new();
            let mut seen = BTreeSet::from([start]);
            let mut queue = VecDeque::from([start]);
            let mut links = Vec::new();
            while let Some(x) = queue.pop_front() {
                for l in g.links_at(x) {
                    if seen_links.insert(*l) {
                        links.push(*l);
                    }
                    let y = l.other(x);
                    if seen.insert(y) {
                        queue.push_back(y);
                    }
                }
            }
            let cells = links.iter().map(|l| l.cell).collect();
            WallTrace { id, midpoints: comp.iter().copied().collect(), links, cells }
        })
        .collect()
}

/// Why a wall fails to be an embedded tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Embedding {
    Embedded,
    /// Links of one cycle of the wall graph.
    Cycle { links: Vec<WallLink> },
    /// A 2-cell hosting more than one link of the wall.
    SelfIntersection { cell: CellId, links: Vec<WallLink> },
}

impl Embedding {
    pub fn is_embedded(&self) -> bool {
        matches!(self, Embedding::Embedded)
    }
}

/// A wall is an embedded tree when its graph is acyclic and no 2-cell
/// hosts two of its links.
pub fn check_embedded(trace: &WallTrace) -> Embedding {
    let mut by_cell: BTreeMap<CellId, Vec<WallLink>> = BTreeMap::new();
    for l in &trace.links {
        by_cell.entry(l.cell).or_default().push(*l);
    }
    if let Some((cell, links)) = by_cell.into_iter().find(|(_, v)| v.len() > 1) {
        return Embedding::SelfIntersection { cell, links };
    }
    if trace.links.len() + 1 == trace.midpoints.len() {
        return Embedding::Embedded;
    }
    Embedding::Cycle { links: find_cycle(&trace.links) }
}

/// Some cycle of a graph given by its links, found by union-find on the
/// first link closing one.
fn find_cycle(links: &[WallLink]) -> Vec<WallLink> {
    let mut adj: BTreeMap<EdgeId, Vec<usize>> = BTreeMap::new();
    let mut parent: BTreeMap<EdgeId, EdgeId> = BTreeMap::new();
    fn root(parent: &mut BTreeMap<EdgeId, EdgeId>, x: EdgeId) -> EdgeId {
        let p = *parent.entry(x).or_insert(x);
        if p == x {
            x
        } else {
            let r = root(parent, p);
            parent.insert(x, r);
            r
        }
    }
    for (i, l) in links.iter().enumerate() {
        let (ra, rb) = (root(&mut parent, l.ea), root(&mut parent, l.eb));
        if ra == rb {
            // Path from eb back to ea through earlier links closes the cycle.
            let mut prev: BTreeMap<EdgeId, usize> = BTreeMap::new();
            let mut queue = VecDeque::from([l.eb]);
            let mut seen = BTreeSet::from([l.eb]);
            while let Some(x) = queue.pop_front() {
                if x == l.ea {
                    break;
                }
                for &j in adj.get(&x).into_iter().flatten() {
                    let y = links[j].other(x);
                    if seen.insert(y) {
                        prev.insert(y, j);
                        queue.push_back(y);
                    }
                }
            }
            let mut cycle = vec![*l];
            let mut x = l.ea;
            while x != l.eb {
                let j = prev[&x];
                cycle.push(links[j]);
                x = links[j].other(x);
            }
            return cycle;
        }
        parent.insert(ra, rb);
        adj.entry(l.ea).or_default().push(i);
        adj.entry(l.eb).or_default().push(i);
    }
    vec![]
}

/// Side assignment for one wall.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HalfspaceRecord {
    pub id: usize,
    pub midpoints: Vec<EdgeId>,
    /// Vertex index to side.
    pub sides: BTreeMap<String, u8>,
    pub separating_at_patch_scale: bool,
    /// False when the crossing parity is inconsistent, so no two-colouring
    /// of the complement exists.
    #[serde(skip)]
    pub two_sided: bool,
    /// Skeleton edges the wall crosses.
    #[serde(skip)]
    pub crossings: Vec<EdgeId>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Wallspace {
    pub walls: Vec<HalfspaceRecord>,
    #[serde(with = "crate::rational::serde_q")]
    pub lambda: Q,
    pub n_ret: usize,
}

impl Wallspace {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("wallspace serializes")
    }
}

/// Sides of every embedded wall. Vertices are joined along skeleton edges
/// the wall does not cross; regions are then two-coloured so that crossing
/// the wall flips the side.
pub fn export_wallspace(patch: &PatchComplex, traces: &[WallTrace], lambda: Q, n_ret: usize) -> Result<Wallspace> {
    if let Some(t) = traces.iter().find(|t| !check_embedded(t).is_embedded()) {
        return Err(Error::NotEmbedded(t.id));
    }
    let walls = traces.iter().map(|t| halfspaces(patch, t)).collect();
    Ok(Wallspace { walls, lambda, n_ret })
}

fn halfspaces(patch: &PatchComplex, trace: &WallTrace) -> HalfspaceRecord {
    let crossed: BTreeSet<EdgeId> = trace.midpoints.iter().copied().collect();
    let n = patch.n_vertices();
    let mut region = vec![usize::MAX; n];
    let mut adj: Vec<Vec<(usize, bool)>> = vec![Vec::new(); n];
    for e in (0..patch.n_edges() as u32).map(EdgeId) {
        let (a, b) = patch.edge_ends(e);
        let cross = crossed.contains(&e);
        adj[a.idx()].push((b.idx(), cross));
        adj[b.idx()].push((a.idx(), cross));
    }
    let mut regions = 0;
    for s in 0..n {
        if region[s] != usize::MAX {
            continue;
        }
        region[s] = regions;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &(y, cross) in &adj[x] {
                if !cross && region[y] == usize::MAX {
                    region[y] = regions;
                    queue.push_back(y);
                }
            }
        }
        regions += 1;
    }
    // Two-colour the regions across crossed edges.
    let mut colour = vec![u8::MAX; regions];
    let mut two_sided = true;
    for s in 0..regions {
        if colour[s] != u8::MAX {
            continue;
        }
        colour[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(r) = queue.pop_front() {
            for x in (0..n).filter(|&x| region[x] == r) {
                for &(y, cross) in &adj[x] {
                    if !cross {
                        continue;
                    }
                    let want = 1 - colour[r];
                    let ry = region[y];
                    if colour[ry] == u8::MAX {
                        colour[ry] = want;
                        queue.push_back(ry);
                    } else if colour[ry] != want {
                        two_sided = false;
                    }
                }
            }
        }
    }
    let sides = (0..n).map(|v| (v.to_string(), colour[region[v]])).collect();
    HalfspaceRecord {
        id: trace.id,
        midpoints: trace.midpoints.clone(),
        sides,
        separating_at_patch_scale: regions >= 2,
        two_sided,
        crossings: crossed.into_iter().collect(),
    }
}

#[cfg(test)]
mod tests;

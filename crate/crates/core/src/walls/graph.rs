//! The tile-wall graph of a tile: vertices are the edge midpoints of the
//! tile, links are the slot pairings of its 2-cells.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::complex::{CellId, EdgeId, PatchComplex};

/// One wall edge, inside `cell`, joining the midpoints of slots `a` and `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct WallLink {
    pub cell: CellId,
    pub a: usize,
    pub b: usize,
    pub ea: EdgeId,
    pub eb: EdgeId,
}

impl WallLink {
    pub fn other(&self, e: EdgeId) -> EdgeId {
        if e == self.ea {
            self.eb
        } else {
            self.ea
        }
    }
}

/// A simple path in a tile-wall, listed by midpoints with the links between
/// consecutive ones.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WallPath {
    pub midpoints: Vec<EdgeId>,
    pub links: Vec<WallLink>,
}

impl WallPath {
    pub fn ends(&self) -> (EdgeId, EdgeId) {
        (self.midpoints[0], *self.midpoints.last().expect("non-empty path"))
    }

    pub fn interior(&self) -> &[EdgeId] {
        let n = self.midpoints.len();
        if n <= 2 {
            &[]
        } else {
            &self.midpoints[1..n - 1]
        }
    }

    /// The 2-cells the path passes through.
    pub fn cells(&self) -> BTreeSet<CellId> {
        self.links.iter().map(|l| l.cell).collect()
    }
}

/// A multiplicity or immersion failure of one tile-wall inside one 2-cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WallViolation {
    pub cell: CellId,
    /// Index of the component in [`TileWallGraph::components`].
    pub wall: usize,
    pub vertices_in_cell: usize,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct TileWallGraph {
    pub cells: BTreeSet<CellId>,
    pub links: Vec<WallLink>,
    adj: BTreeMap<EdgeId, Vec<usize>>,
    /// Connected components (the tile-walls), each a set of midpoints.
    pub components: Vec<BTreeSet<EdgeId>>,
}

impl TileWallGraph {
    pub fn new(patch: &PatchComplex, cells: &BTreeSet<CellId>, partner: &[Vec<usize>]) -> Self {
        let mut links = Vec::new();
        let mut adj: BTreeMap<EdgeId, Vec<usize>> = BTreeMap::new();
        for &c in cells {
            for e in patch.cell_edges(c) {
                adj.entry(*e).or_default();
            }
            for (a, &b) in partner[c.idx()].iter().enumerate() {
                if a < b {
                    let (ea, eb) = (patch.slot_edge(c, a), patch.slot_edge(c, b));
                    adj.get_mut(&ea).unwrap().push(links.len());
                    if eb != ea {
                        adj.entry(eb).or_default().push(links.len());
                    }
                    links.push(WallLink { cell: c, a, b, ea, eb });
                }
            }
        }
        let mut components = Vec::new();
        let mut seen = BTreeSet::new();
        for &start in adj.keys() {
            if !seen.insert(start) {
                continue;
            }
            let mut comp = BTreeSet::from([start]);
            let mut stack = vec![start];
            while let Some(x) = stack.pop() {
                for &li in &adj[&x] {
                    let y = links[li].other(x);
                    if seen.insert(y) {
                        comp.insert(y);
                        stack.push(y);
                    }
                }
            }
            components.push(comp);
        }
        TileWallGraph { cells: cells.clone(), links, adj, components }
    }

    pub fn component_of(&self, e: EdgeId) -> Option<usize> {
        self.components.iter().position(|c| c.contains(&e))
    }

    pub fn links_at(&self, e: EdgeId) -> impl Iterator<Item = &WallLink> {
        self.adj.get(&e).into_iter().flatten().map(|&i| &self.links[i])
    }

    /// Every simple path with at least one link, each listed once (from its
    /// smaller end). Stops after `limit` paths; the flag reports truncation.
    pub fn paths(&self, limit: usize) -> (Vec<WallPath>, bool) {
        let mut out = Vec::new();
        for &start in self.adj.keys() {
            let mut path = WallPath { midpoints: vec![start], links: vec![] };
            let mut on = BTreeSet::from([start]);
            if self.extend(&mut path, &mut on, &mut out, limit) {
                return (out, true);
            }
        }
        (out, false)
    }

    fn extend(&self, path: &mut WallPath, on: &mut BTreeSet<EdgeId>, out: &mut Vec<WallPath>, limit: usize) -> bool {
        let x = *path.midpoints.last().unwrap();
        for &li in &self.adj[&x] {
            let link = self.links[li];
            let y = link.other(x);
            if on.contains(&y) {
                continue;
            }
            path.midpoints.push(y);
            path.links.push(link);
            on.insert(y);
            if path.midpoints[0] < y {
                if out.len() >= limit {
                    return true;
                }
                out.push(path.clone());
            }
            if self.extend(path, on, out, limit) {
                return true;
            }
            on.remove(&y);
            path.links.pop();
            path.midpoints.pop();
        }
        false
    }

    /// At most two vertices of any tile-wall in each 2-cell, and no two
    /// links of one cell sharing a midpoint.
    pub fn check(&self, patch: &PatchComplex) -> Vec<WallViolation> {
        let mut out = Vec::new();
        for &c in &self.cells {
            let on_cell: BTreeSet<EdgeId> = patch.cell_edges(c).iter().copied().collect();
            for (w, comp) in self.components.iter().enumerate() {
                let n = comp.intersection(&on_cell).count();
                if n > 2 {
                    out.push(WallViolation {
                        cell: c,
                        wall: w,
                        vertices_in_cell: n,
                        detail: format!("{n} vertices of one tile-wall in {c}"),
                    });
                }
            }
            let mut used: BTreeMap<EdgeId, usize> = BTreeMap::new();
            for l in self.links.iter().filter(|l| l.cell == c) {
                *used.entry(l.ea).or_default() += 1;
                *used.entry(l.eb).or_default() += 1;
            }
            for (e, k) in used {
                if k > 1 {
                    out.push(WallViolation {
                        cell: c,
                        wall: self.component_of(e).unwrap_or(usize::MAX),
                        vertices_in_cell: k,
                        detail: format!("{k} links of {c} meet at the midpoint of {e}"),
                    });
                }
            }
        }
        out
    }

    /// Components as midpoint lists plus their links, for export.
    pub fn export(&self) -> Vec<ExportedWall> {
        self.components
            .iter()
            .map(|comp| ExportedWall {
                midpoints: self.ordered(comp),
                links: self
                    .links
                    .iter()
                    .filter(|l| comp.contains(&l.ea))
                    .map(|l| (l.cell, l.ea, l.eb))
                    .collect(),
            })
            .collect()
    }

    /// Midpoints of a component, walked from an end when it is a path.
    fn ordered(&self, comp: &BTreeSet<EdgeId>) -> Vec<EdgeId> {
        let degree = |e: &EdgeId| self.adj[e].len();
        let Some(&start) = comp.iter().find(|e| degree(e) <= 1) else {
            return comp.iter().copied().collect();
        };
        if comp.iter().any(|e| degree(e) > 2) {
            return comp.iter().copied().collect();
        }
        let mut seq = vec![start];
        let mut prev: Option<usize> = None;
        let mut x = start;
        while let Some(&li) = self.adj[&x].iter().find(|&&li| Some(li) != prev) {
            x = self.links[li].other(x);
            seq.push(x);
            prev = Some(li);
        }
        seq
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExportedWall {
    pub midpoints: Vec<EdgeId>,
    pub links: Vec<(CellId, EdgeId, EdgeId)>,
}

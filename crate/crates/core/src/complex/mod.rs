//! Finite polygonal 2-complexes built by gluing relator polygons.
//!
//! A [`PatchComplex`] is the quotient of a disjoint union of `ℓ`-gons by a
//! list of boundary-subpath identifications. Slot `i` of a cell is the
//! boundary edge from corner `i` to corner `i + 1 (mod ℓ)`. Identified slots
//! become one 1-cell; its degree is the number of slots it carries.
//!
//! Edge and vertex ids are assigned in order of first appearance when
//! scanning `(cell, slot)` lexicographically, so they depend only on the
//! cell list and the gluing list.

mod admissible;
mod dot;
mod iso;
mod metric;
mod tree;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use admissible::{
    check_admissible, check_embedded_geodesics, check_fulfilled, connected_cell_subsets, ipi_bound,
    ipi_check, is_kk_bounded, remark_bound_holds, slot_label, Admissibility, AdmissibilityCheck,
    FoldViolation, GeodesicReport, IpiOutcome, IpiViolation, Labeling, ShortCycle,
};
pub use dot::{skeleton_dot, walls_dot};
pub use iso::{canonical_signature, orbit_isomorphic, pair_isomorphic, Signature};
pub use metric::SkeletonGraph;
pub use tree::{
    alpha_regions, analyze_tree, classify_tree, path_symmetry, reflect, AlphaComponent, AlphaRegions,
    TreeClass, TreeKind, TreePath, TreeShape,
};

macro_rules! id_type {
    ($name:ident, $prefix:literal) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub u32);

        impl $name {
            pub fn idx(self) -> usize {
                self.0 as usize
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($prefix, "{}"), self.0)
            }
        }
    };
}

id_type!(CellId, "c");
id_type!(EdgeId, "e");
id_type!(VertexId, "v");

/// A 2-cell: a copy of relator polygon `relator`, with slot 0 reading word
/// position `rotation`. Inverted cells read the word backwards.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellSpec {
    pub id: u32,
    pub relator: usize,
    pub rotation: usize,
    pub inverted: bool,
}

impl CellSpec {
    pub fn plain(id: u32, relator: usize) -> Self {
        CellSpec { id, relator, rotation: 0, inverted: false }
    }

    /// Word position carried by slot `i`, and whether the slot reads it
    /// backwards.
    pub fn slot_position(&self, i: usize, ell: usize) -> (usize, bool) {
        if self.inverted {
            ((self.rotation + 2 * ell - 1 - i % ell) % ell, true)
        } else {
            ((self.rotation + i) % ell, false)
        }
    }
}

/// Identification of `length` consecutive slots of `cell_a` (from
/// `start_a`) with slots of `cell_b`. Unreversed gluings match slot
/// `start_a + t` to `start_b + t` with the same direction; reversed gluings
/// match it to `start_b + length - 1 - t` with opposite direction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gluing {
    pub cell_a: u32,
    pub start_a: usize,
    pub cell_b: u32,
    pub start_b: usize,
    pub length: usize,
    pub reversed: bool,
}

impl Gluing {
    pub fn slot_pairs(&self, ell: usize) -> Vec<(usize, usize)> {
        (0..self.length)
            .map(|t| {
                let a = (self.start_a + t) % ell;
                let b = if self.reversed {
                    (self.start_b + self.length - 1 - t) % ell
                } else {
                    (self.start_b + t) % ell
                };
                (a, b)
            })
            .collect()
    }

    pub fn corner_pairs(&self, ell: usize) -> Vec<(usize, usize)> {
        (0..=self.length)
            .map(|t| {
                let a = (self.start_a + t) % ell;
                let b = if self.reversed {
                    (self.start_b + self.length - t) % ell
                } else {
                    (self.start_b + t) % ell
                };
                (a, b)
            })
            .collect()
    }
}

/// On-disk form of a patch.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatchFile {
    pub ell: usize,
    pub cells: Vec<CellSpec>,
    pub gluings: Vec<Gluing>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "PatchFile", try_from = "PatchFile")]
pub struct PatchComplex {
    ell: usize,
    cells: Vec<CellSpec>,
    gluings: Vec<Gluing>,
    slot_edge: Vec<Vec<EdgeId>>,
    corner_vertex: Vec<Vec<VertexId>>,
    edge_slots: Vec<Vec<(CellId, usize)>>,
    edge_ends: Vec<(VertexId, VertexId)>,
    slot_forward: Vec<Vec<bool>>,
    n_vertices: usize,
}

impl From<PatchComplex> for PatchFile {
    fn from(p: PatchComplex) -> Self {
        PatchFile { ell: p.ell, cells: p.cells, gluings: p.gluings }
    }
}

impl TryFrom<PatchFile> for PatchComplex {
    type Error = Error;

    fn try_from(f: PatchFile) -> Result<Self> {
        PatchComplex::new(f.ell, f.cells, f.gluings)
    }
}

impl PatchComplex {
    pub fn new(ell: usize, cells: Vec<CellSpec>, gluings: Vec<Gluing>) -> Result<Self> {
        if ell == 0 || ell % 4 != 0 {
            return Err(Error::BadLength(ell));
        }
        for (i, c) in cells.iter().enumerate() {
            if c.id as usize != i {
                return Err(Error::CellOrder { index: i, found: c.id });
            }
        }
        let n = cells.len();
        let bad = |index: usize, reason: &str| Error::BadGluing { index, reason: reason.to_string() };
        for (i, g) in gluings.iter().enumerate() {
            if g.cell_a as usize >= n || g.cell_b as usize >= n {
                return Err(bad(i, "unknown cell"));
            }
            if g.length == 0 || g.length > ell {
                return Err(bad(i, "length must be in 1..=ell"));
            }
            if g.start_a >= ell || g.start_b >= ell {
                return Err(bad(i, "start position out of range"));
            }
            if g.cell_a == g.cell_b {
                let pairs = g.slot_pairs(ell);
                if pairs.iter().any(|&(a, b)| a == b) {
                    return Err(bad(i, "identifies a slot with itself"));
                }
            }
        }

        let mut slots = UnionFind::new(n * ell);
        let mut corners = UnionFind::new(n * ell);
        for g in &gluings {
            let (ca, cb) = (g.cell_a as usize * ell, g.cell_b as usize * ell);
            for (a, b) in g.slot_pairs(ell) {
                slots.union(ca + a, cb + b);
            }
            for (a, b) in g.corner_pairs(ell) {
                corners.union(ca + a, cb + b);
            }
        }

        let number = |uf: &mut UnionFind| {
            let mut ids = vec![u32::MAX; n * ell];
            let mut next = 0u32;
            let mut out = vec![0u32; n * ell];
            for s in 0..n * ell {
                let r = uf.find(s);
                if ids[r] == u32::MAX {
                    ids[r] = next;
                    next += 1;
                }
                out[s] = ids[r];
            }
            (out, next as usize)
        };
        let (edge_of, n_edges) = number(&mut slots);
        let (vertex_of, n_vertices) = number(&mut corners);

        let slot_edge: Vec<Vec<EdgeId>> =
            (0..n).map(|c| (0..ell).map(|i| EdgeId(edge_of[c * ell + i])).collect()).collect();
        let corner_vertex: Vec<Vec<VertexId>> =
            (0..n).map(|c| (0..ell).map(|i| VertexId(vertex_of[c * ell + i])).collect()).collect();
        let mut edge_slots = vec![Vec::new(); n_edges];
        let mut edge_ends = vec![(VertexId(0), VertexId(0)); n_edges];
        for c in 0..n {
            for i in 0..ell {
                let e = slot_edge[c][i].idx();
                if edge_slots[e].is_empty() {
                    edge_ends[e] = (corner_vertex[c][i], corner_vertex[c][(i + 1) % ell]);
                }
                edge_slots[e].push((CellId(c as u32), i));
            }
        }

        // Orientation of each slot relative to the first slot of its edge,
        // propagated along gluings.
        let mut links: Vec<Vec<(usize, bool)>> = vec![Vec::new(); n * ell];
        for g in &gluings {
            let (ca, cb) = (g.cell_a as usize * ell, g.cell_b as usize * ell);
            for (a, b) in g.slot_pairs(ell) {
                links[ca + a].push((cb + b, g.reversed));
                links[cb + b].push((ca + a, g.reversed));
            }
        }
        let mut forward: Vec<Option<bool>> = vec![None; n * ell];
        for (e, slots) in edge_slots.iter().enumerate() {
            let (c0, i0) = slots[0];
            let root = c0.idx() * ell + i0;
            forward[root] = Some(true);
            let mut stack = vec![root];
            while let Some(s) = stack.pop() {
                let f = forward[s].expect("visited");
                for &(t, flip) in &links[s] {
                    let want = f != flip;
                    match forward[t] {
                        None => {
                            forward[t] = Some(want);
                            stack.push(t);
                        }
                        Some(x) if x != want => {
                            return Err(Error::BadGluing {
                                index: usize::MAX,
                                reason: format!("edge e{e} is identified with its own reverse"),
                            });
                        }
                        Some(_) => {}
                    }
                }
            }
        }
        let slot_forward =
            (0..n).map(|c| (0..ell).map(|i| forward[c * ell + i].expect("every slot lies in a class")).collect()).collect();
        Ok(PatchComplex {
            ell,
            cells,
            gluings,
            slot_edge,
            corner_vertex,
            edge_slots,
            edge_ends,
            slot_forward,
            n_vertices,
        })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("patch serializes")
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn cells(&self) -> &[CellSpec] {
        &self.cells
    }

    pub fn gluings(&self) -> &[Gluing] {
        &self.gluings
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edge_slots.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn cell_ids(&self) -> impl Iterator<Item = CellId> {
        (0..self.cells.len() as u32).map(CellId)
    }

    pub fn cell(&self, c: CellId) -> &CellSpec {
        &self.cells[c.idx()]
    }

    pub fn slot_edge(&self, c: CellId, slot: usize) -> EdgeId {
        self.slot_edge[c.idx()][slot % self.ell]
    }

    pub fn corner_vertex(&self, c: CellId, corner: usize) -> VertexId {
        self.corner_vertex[c.idx()][corner % self.ell]
    }

    pub fn cell_edges(&self, c: CellId) -> &[EdgeId] {
        &self.slot_edge[c.idx()]
    }

    pub fn edge_slots(&self, e: EdgeId) -> &[(CellId, usize)] {
        &self.edge_slots[e.idx()]
    }

    pub fn edge_ends(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.edge_ends[e.idx()]
    }

    /// True when slot `slot` of `c` runs in the reference direction of its
    /// edge, from `edge_ends().0` to `edge_ends().1`.
    pub fn slot_forward(&self, c: CellId, slot: usize) -> bool {
        self.slot_forward[c.idx()][slot % self.ell]
    }

    /// Number of boundary slots carried by `e` (over the whole patch).
    pub fn degree(&self, e: EdgeId) -> usize {
        self.edge_slots[e.idx()].len()
    }

    /// Number of slots of `e` belonging to cells in `cells`.
    pub fn degree_in(&self, e: EdgeId, cells: &BTreeSet<CellId>) -> usize {
        self.edge_slots[e.idx()].iter().filter(|(c, _)| cells.contains(c)).count()
    }

    /// First slot of cell `c` carrying edge `e`.
    pub fn slot_of(&self, c: CellId, e: EdgeId) -> Option<usize> {
        self.slot_edge[c.idx()].iter().position(|&x| x == e)
    }

    /// Closure of a set of 2-cells.
    pub fn closure<I: IntoIterator<Item = CellId>>(&self, cells: I) -> SubComplex {
        let cells: BTreeSet<CellId> = cells.into_iter().collect();
        let mut edges = BTreeSet::new();
        let mut vertices = BTreeSet::new();
        for &c in &cells {
            edges.extend(self.slot_edge[c.idx()].iter().copied());
            vertices.extend(self.corner_vertex[c.idx()].iter().copied());
        }
        SubComplex { cells, edges, vertices }
    }

    pub fn whole(&self) -> SubComplex {
        self.closure(self.cell_ids())
    }

    /// A 1-dimensional subcomplex spanned by `edges` (with their endpoints).
    pub fn edge_subgraph<I: IntoIterator<Item = EdgeId>>(&self, edges: I) -> SubComplex {
        let edges: BTreeSet<EdgeId> = edges.into_iter().collect();
        let mut vertices = BTreeSet::new();
        for &e in &edges {
            let (a, b) = self.edge_ends(e);
            vertices.insert(a);
            vertices.insert(b);
        }
        SubComplex { cells: BTreeSet::new(), edges, vertices }
    }

    /// Gluings whose two cells both lie in `cells`.
    pub fn gluings_within(&self, cells: &BTreeSet<CellId>) -> usize {
        self.gluings
            .iter()
            .filter(|g| cells.contains(&CellId(g.cell_a)) && cells.contains(&CellId(g.cell_b)))
            .count()
    }

    /// The patch restricted to a subset of its cells, renumbered in order.
    pub fn restrict(&self, cells: &BTreeSet<CellId>) -> PatchComplex {
        let order: Vec<CellId> = cells.iter().copied().collect();
        let new_id = |c: u32| order.iter().position(|x| x.0 == c).map(|p| p as u32);
        let specs = order
            .iter()
            .enumerate()
            .map(|(i, c)| CellSpec { id: i as u32, ..self.cells[c.idx()].clone() })
            .collect();
        let gluings = self
            .gluings
            .iter()
            .filter_map(|g| {
                Some(Gluing { cell_a: new_id(g.cell_a)?, cell_b: new_id(g.cell_b)?, ..g.clone() })
            })
            .collect();
        PatchComplex::new(self.ell, specs, gluings).expect("restriction of a valid patch")
    }
}

/// A subcomplex of a patch: a set of 2-cells plus edges and vertices.
/// 2-dimensional subcomplexes are the closure of their cells; 1-dimensional
/// ones (no cells) are subgraphs of the 1-skeleton.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubComplex {
    pub cells: BTreeSet<CellId>,
    pub edges: BTreeSet<EdgeId>,
    pub vertices: BTreeSet<VertexId>,
}

impl SubComplex {
    /// Number of 2-cells, `|Y|`.
    pub fn size(&self) -> usize {
        self.cells.len()
    }

    pub fn has_cells(&self) -> bool {
        !self.cells.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty() && self.edges.is_empty() && self.vertices.is_empty()
    }

    pub fn contains(&self, p: Point) -> bool {
        match p {
            Point::Vertex(v) => self.vertices.contains(&v),
            Point::Midpoint(e) => self.edges.contains(&e),
        }
    }

    /// True when the subcomplex equals the closure of its 2-cells.
    pub fn is_closed_2d(&self, patch: &PatchComplex) -> bool {
        *self == patch.closure(self.cells.iter().copied())
    }

    /// True for a subgraph: every edge's endpoints are present.
    pub fn is_subgraph(&self, patch: &PatchComplex) -> bool {
        self.edges.iter().all(|&e| {
            let (a, b) = patch.edge_ends(e);
            self.vertices.contains(&a) && self.vertices.contains(&b)
        })
    }

    /// The 1-skeleton part only.
    pub fn skeleton(&self) -> SubComplex {
        SubComplex { cells: BTreeSet::new(), edges: self.edges.clone(), vertices: self.vertices.clone() }
    }
}

/// A point of the 1-skeleton that metric queries accept.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Point {
    Vertex(VertexId),
    Midpoint(EdgeId),
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Vertex(v) => write!(f, "{v}"),
            Point::Midpoint(e) => write!(f, "mid({e})"),
        }
    }
}

pub use metric::{
    can_of_cells, cancellation, cells_connected, cells_edge_connected, intersection, midpoint_distances,
    skeleton_distance, union_cells,
};

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;

    /// Cells `0..n` with distinct relators, glued by reversed gluings
    /// `(a, start_a, b, start_b, len)`.
    pub fn patch(ell: usize, n: u32, gluings: &[(u32, usize, u32, usize, usize)]) -> PatchComplex {
        let cells = (0..n).map(|i| CellSpec::plain(i, i as usize)).collect();
        let gluings = gluings
            .iter()
            .map(|&(a, sa, b, sb, len)| Gluing {
                cell_a: a,
                start_a: sa,
                cell_b: b,
                start_b: sb,
                length: len,
                reversed: true,
            })
            .collect();
        PatchComplex::new(ell, cells, gluings).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::test_support::patch;
    use super::*;

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(PatchComplex::new(10, vec![], vec![]), Err(Error::BadLength(10))));
        let cells = vec![CellSpec::plain(1, 0)];
        assert!(matches!(PatchComplex::new(8, cells, vec![]), Err(Error::CellOrder { .. })));
        let cells = vec![CellSpec::plain(0, 0)];
        let g = Gluing { cell_a: 0, start_a: 0, cell_b: 3, start_b: 0, length: 2, reversed: true };
        assert!(PatchComplex::new(8, cells, vec![g]).is_err());
    }

    #[test]
    fn single_cell_counts() {
        let p = patch(8, 1, &[]);
        assert_eq!(p.n_edges(), 8);
        assert_eq!(p.n_vertices(), 8);
        assert!(p.cell_edges(CellId(0)).iter().all(|&e| p.degree(e) == 1));
    }

    #[test]
    fn reversed_gluing_identifies_path() {
        let p = patch(12, 2, &[(0, 0, 1, 0, 5)]);
        assert_eq!(p.n_edges(), 24 - 5);
        assert_eq!(p.n_vertices(), 24 - 6);
        // slot 0 of cell 0 is slot 4 of cell 1
        assert_eq!(p.slot_edge(CellId(0), 0), p.slot_edge(CellId(1), 4));
        assert_eq!(p.corner_vertex(CellId(0), 0), p.corner_vertex(CellId(1), 5));
    }

    #[test]
    fn json_roundtrip() {
        let p = patch(12, 2, &[(0, 3, 1, 7, 4)]);
        let back = PatchComplex::from_json(&p.to_json()).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn restrict_keeps_internal_gluings() {
        let p = patch(12, 3, &[(0, 0, 1, 0, 4), (1, 6, 2, 0, 3)]);
        let r = p.restrict(&[CellId(1), CellId(2)].into_iter().collect());
        assert_eq!(r.n_cells(), 2);
        assert_eq!(r.gluings().len(), 1);
        assert_eq!(r.gluings()[0].cell_a, 0);
    }
}

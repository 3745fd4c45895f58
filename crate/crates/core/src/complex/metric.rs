//! Cancellation, intersections and half-unit distances in the 1-skeleton.

use std::collections::{BTreeSet, HashMap, VecDeque};

use super::{CellId, EdgeId, PatchComplex, Point, SubComplex, VertexId};
use crate::error::{Error, Result};

/// `Can(Y) = Σ_e (deg_Y(e) - 1)` over the edges of a closed subcomplex.
pub fn cancellation(patch: &PatchComplex, y: &SubComplex) -> Result<u64> {
    if !y.is_closed_2d(patch) {
        return Err(Error::NotClosed);
    }
    Ok(can_of_cells(patch, &y.cells))
}

pub fn can_of_cells(patch: &PatchComplex, cells: &BTreeSet<CellId>) -> u64 {
    let mut seen = BTreeSet::new();
    let mut can = 0u64;
    for &c in cells {
        for &e in patch.cell_edges(c) {
            if seen.insert(e) {
                can += patch.degree_in(e, cells) as u64 - 1;
            }
        }
    }
    can
}

/// Intersection of two subcomplexes, cell by cell, edge by edge and vertex
/// by vertex. The result may have no 2-cells.
pub fn intersection(a: &SubComplex, b: &SubComplex) -> SubComplex {
    SubComplex {
        cells: a.cells.intersection(&b.cells).copied().collect(),
        edges: a.edges.intersection(&b.edges).copied().collect(),
        vertices: a.vertices.intersection(&b.vertices).copied().collect(),
    }
}

pub fn union_cells(a: &BTreeSet<CellId>, b: &BTreeSet<CellId>) -> BTreeSet<CellId> {
    a.union(b).copied().collect()
}

/// True when the closure of `cells` is connected (cells meeting in a
/// vertex are adjacent).
pub fn cells_connected(patch: &PatchComplex, cells: &BTreeSet<CellId>) -> bool {
    let Some(&first) = cells.iter().next() else {
        return false;
    };
    let mut by_vertex: HashMap<VertexId, Vec<CellId>> = HashMap::new();
    for &c in cells {
        for i in 0..patch.ell() {
            by_vertex.entry(patch.corner_vertex(c, i)).or_default().push(c);
        }
    }
    let mut seen = BTreeSet::from([first]);
    let mut queue = VecDeque::from([first]);
    while let Some(c) = queue.pop_front() {
        for i in 0..patch.ell() {
            for &d in &by_vertex[&patch.corner_vertex(c, i)] {
                if seen.insert(d) {
                    queue.push_back(d);
                }
            }
        }
    }
    seen.len() == cells.len()
}

/// True when `cells` are connected through shared edges.
pub fn cells_edge_connected(patch: &PatchComplex, cells: &BTreeSet<CellId>) -> bool {
    let Some(&first) = cells.iter().next() else {
        return false;
    };
    let mut seen = BTreeSet::from([first]);
    let mut queue = VecDeque::from([first]);
    while let Some(c) = queue.pop_front() {
        for &e in patch.cell_edges(c) {
            for &(d, _) in patch.edge_slots(e) {
                if cells.contains(&d) && seen.insert(d) {
                    queue.push_back(d);
                }
            }
        }
    }
    seen.len() == cells.len()
}

/// The subdivided 1-skeleton of a subgraph: vertices and edge midpoints
/// are nodes, each half-edge has length one. Distances are therefore in
/// half-edge units.
#[derive(Clone, Debug)]
pub struct SkeletonGraph {
    nodes: Vec<Point>,
    index: HashMap<Point, usize>,
    adj: Vec<Vec<usize>>,
}

impl SkeletonGraph {
    pub fn new(patch: &PatchComplex, sub: &SubComplex) -> Self {
        let mut nodes = Vec::new();
        let mut index = HashMap::new();
        let mut add = |p: Point, nodes: &mut Vec<Point>| {
            *index.entry(p).or_insert_with(|| {
                nodes.push(p);
                nodes.len() - 1
            })
        };
        for &v in &sub.vertices {
            add(Point::Vertex(v), &mut nodes);
        }
        let mut links = Vec::new();
        for &e in &sub.edges {
            let m = add(Point::Midpoint(e), &mut nodes);
            let (a, b) = patch.edge_ends(e);
            for v in [a, b] {
                let n = add(Point::Vertex(v), &mut nodes);
                links.push((m, n));
            }
        }
        let mut adj = vec![Vec::new(); nodes.len()];
        for (m, n) in links {
            adj[m].push(n);
            adj[n].push(m);
        }
        SkeletonGraph { nodes, index, adj }
    }

    pub fn whole(patch: &PatchComplex) -> Self {
        Self::new(patch, &patch.whole())
    }

    pub fn contains(&self, p: Point) -> bool {
        self.index.contains_key(&p)
    }

    pub fn points(&self) -> &[Point] {
        &self.nodes
    }

    /// Half-unit distances from `p` to every reachable point.
    pub fn distances_from(&self, p: Point) -> Result<HashMap<Point, u32>> {
        let &s = self.index.get(&p).ok_or_else(|| Error::PointOutside(p.to_string()))?;
        let mut dist = vec![u32::MAX; self.nodes.len()];
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &y in &self.adj[x] {
                if dist[y] == u32::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        Ok(dist
            .iter()
            .enumerate()
            .filter(|(_, &d)| d != u32::MAX)
            .map(|(i, &d)| (self.nodes[i], d))
            .collect())
    }

    /// Half-unit distance, `None` when the points lie in different
    /// components.
    pub fn dist(&self, a: Point, b: Point) -> Result<Option<u32>> {
        if !self.contains(b) {
            return Err(Error::PointOutside(b.to_string()));
        }
        Ok(self.distances_from(a)?.get(&b).copied())
    }

    pub fn is_connected(&self) -> bool {
        match self.nodes.first() {
            None => true,
            Some(&p) => self.distances_from(p).map(|d| d.len() == self.nodes.len()).unwrap_or(false),
        }
    }
}

/// Distance between two points measured inside `within`, in half-edge
/// units.
pub fn skeleton_distance(patch: &PatchComplex, x: Point, y: Point, within: &SubComplex) -> Result<Option<u32>> {
    for p in [x, y] {
        if !within.contains(p) {
            return Err(Error::PointOutside(p.to_string()));
        }
    }
    SkeletonGraph::new(patch, within).dist(x, y)
}

/// Edges of `within` whose midpoints realise the half-unit distance from
/// `from`, restricted to a subgraph.
pub fn midpoint_distances(graph: &SkeletonGraph, from: Point) -> Result<HashMap<EdgeId, u32>> {
    Ok(graph
        .distances_from(from)?
        .into_iter()
        .filter_map(|(p, d)| match p {
            Point::Midpoint(e) => Some((e, d)),
            Point::Vertex(_) => None,
        })
        .collect())
}

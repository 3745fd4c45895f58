//! Intersection trees: shape, long/round classification and the α regions
//! near the ends of a long tree.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use super::{EdgeId, PatchComplex, Point, SubComplex, VertexId};
use crate::error::{Error, Result};

/// A simple path in the 1-skeleton, listed from one end to the other.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct TreePath {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

impl TreePath {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn start(&self) -> VertexId {
        self.vertices[0]
    }

    pub fn end(&self) -> VertexId {
        *self.vertices.last().expect("path has a vertex")
    }

    /// Half-unit position of `p` along the path: vertex `i` sits at `2i`,
    /// the midpoint of edge `i` at `2i + 1`.
    pub fn position(&self, p: Point) -> Option<u32> {
        match p {
            Point::Vertex(v) => self.vertices.iter().position(|&x| x == v).map(|i| 2 * i as u32),
            Point::Midpoint(e) => self.edges.iter().position(|&x| x == e).map(|i| 2 * i as u32 + 1),
        }
    }

    pub fn point_at(&self, pos: u32) -> Option<Point> {
        let i = (pos / 2) as usize;
        if pos % 2 == 0 {
            self.vertices.get(i).map(|&v| Point::Vertex(v))
        } else {
            self.edges.get(i).map(|&e| Point::Midpoint(e))
        }
    }

    pub fn reversed(&self) -> TreePath {
        TreePath {
            vertices: self.vertices.iter().rev().copied().collect(),
            edges: self.edges.iter().rev().copied().collect(),
        }
    }

    /// Orders an edge set into a path, starting from the end vertex with the
    /// smaller id. `None` if the edges do not form a simple path.
    pub fn from_edges(patch: &PatchComplex, edges: &BTreeSet<EdgeId>) -> Option<TreePath> {
        if edges.is_empty() {
            return None;
        }
        let sub = patch.edge_subgraph(edges.iter().copied());
        let adj = adjacency(patch, &sub);
        if sub.vertices.len() != edges.len() + 1 || !connected(&adj, &sub) {
            return None;
        }
        if adj.values().any(|n| n.len() > 2) {
            return None;
        }
        let start = *adj.iter().find(|(_, n)| n.len() == 1)?.0;
        let mut vertices = vec![start];
        let mut path_edges = Vec::new();
        let mut prev: Option<EdgeId> = None;
        let mut cur = start;
        while let Some(&(e, next)) = adj[&cur].iter().find(|(e, _)| Some(*e) != prev) {
            path_edges.push(e);
            vertices.push(next);
            prev = Some(e);
            cur = next;
        }
        Some(TreePath { vertices, edges: path_edges })
    }
}

/// Reflection of a path exchanging its ends. Positions are half-units, so
/// midpoints map to midpoints and vertices to vertices.
pub fn path_symmetry(path: &TreePath, x: Point) -> Result<Point> {
    let len = 2 * path.len() as u32;
    let pos = path.position(x).ok_or_else(|| Error::OffPath { pos: u32::MAX, len: 2 * path.len() as u32 })?;
    Ok(path.point_at(len - pos).expect("reflection stays on the path"))
}

/// Reflection on raw half-unit positions.
pub fn reflect(pos: u32, path_len: usize) -> Result<u32> {
    let len = 2 * path_len as u32;
    if pos > len {
        return Err(Error::OffPath { pos, len });
    }
    Ok(len - pos)
}

#[derive(Clone, Debug, Serialize)]
pub struct TreeShape {
    #[serde(skip)]
    pub sub: SubComplex,
    pub size: usize,
    pub leaves: Vec<VertexId>,
    pub branch_points: Vec<VertexId>,
    pub diameter: usize,
    /// Every leaf-to-leaf path of maximal length, oriented from the smaller
    /// end vertex, sorted.
    pub diameters: Vec<TreePath>,
}

type Adjacency = BTreeMap<VertexId, Vec<(EdgeId, VertexId)>>;

fn adjacency(patch: &PatchComplex, sub: &SubComplex) -> Adjacency {
    let mut adj: Adjacency = sub.vertices.iter().map(|&v| (v, Vec::new())).collect();
    for &e in &sub.edges {
        let (a, b) = patch.edge_ends(e);
        adj.entry(a).or_default().push((e, b));
        adj.entry(b).or_default().push((e, a));
    }
    adj
}

fn connected(adj: &Adjacency, sub: &SubComplex) -> bool {
    let Some(&first) = sub.vertices.iter().next() else {
        return true;
    };
    let mut seen = BTreeSet::from([first]);
    let mut queue = VecDeque::from([first]);
    while let Some(v) = queue.pop_front() {
        for &(_, w) in &adj[&v] {
            if seen.insert(w) {
                queue.push_back(w);
            }
        }
    }
    seen.len() == sub.vertices.len()
}

/// Unique path between two vertices of a tree.
fn tree_path(adj: &Adjacency, from: VertexId, to: VertexId) -> TreePath {
    let mut parent: BTreeMap<VertexId, (EdgeId, VertexId)> = BTreeMap::new();
    let mut queue = VecDeque::from([from]);
    let mut seen = BTreeSet::from([from]);
    while let Some(v) = queue.pop_front() {
        if v == to {
            break;
        }
        for &(e, w) in &adj[&v] {
            if seen.insert(w) {
                parent.insert(w, (e, v));
                queue.push_back(w);
            }
        }
    }
    let mut vertices = vec![to];
    let mut edges = Vec::new();
    let mut cur = to;
    while cur != from {
        let (e, p) = parent[&cur];
        edges.push(e);
        vertices.push(p);
        cur = p;
    }
    vertices.reverse();
    edges.reverse();
    TreePath { vertices, edges }
}

fn vertex_distances(adj: &Adjacency, from: VertexId) -> BTreeMap<VertexId, usize> {
    let mut dist = BTreeMap::from([(from, 0)]);
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        let d = dist[&v];
        for &(_, w) in &adj[&v] {
            if !dist.contains_key(&w) {
                dist.insert(w, d + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

pub fn analyze_tree(patch: &PatchComplex, a: &SubComplex) -> Result<TreeShape> {
    if a.vertices.is_empty() {
        return Err(Error::Empty);
    }
    if !a.is_subgraph(patch) {
        return Err(Error::NotATree("edge endpoints missing".into()));
    }
    let adj = adjacency(patch, a);
    if !connected(&adj, a) {
        return Err(Error::Disconnected);
    }
    if a.edges.len() + 1 != a.vertices.len() {
        return Err(Error::NotATree(format!("{} edges on {} vertices", a.edges.len(), a.vertices.len())));
    }
    let leaves: Vec<VertexId> = adj.iter().filter(|(_, n)| n.len() == 1).map(|(&v, _)| v).collect();
    let branch_points = adj.iter().filter(|(_, n)| n.len() >= 3).map(|(&v, _)| v).collect();
    let mut diameter = 0;
    let mut ends = Vec::new();
    for (i, &u) in leaves.iter().enumerate() {
        let dist = vertex_distances(&adj, u);
        for &v in &leaves[i + 1..] {
            let d = dist[&v];
            if d > diameter {
                diameter = d;
                ends.clear();
            }
            if d == diameter {
                ends.push((u, v));
            }
        }
    }
    let mut diameters: Vec<TreePath> = ends.iter().map(|&(u, v)| tree_path(&adj, u, v)).collect();
    if diameters.is_empty() {
        let v = *a.vertices.iter().next().expect("nonempty");
        diameters.push(TreePath { vertices: vec![v], edges: vec![] });
    }
    diameters.sort();
    Ok(TreeShape { sub: a.clone(), size: a.edges.len(), leaves, branch_points, diameter, diameters })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TreeKind {
    Long,
    Round,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TreeClass {
    pub kind: TreeKind,
    /// False when `|A|` is outside `[ℓ/4, ℓ/2]`, where the definition is
    /// stated.
    pub in_range: bool,
}

/// Long iff `(|A| + ℓ/4) / 2 < diam A`, i.e. `4|A| + ℓ < 8 diam A`.
pub fn classify_tree(shape: &TreeShape, ell: usize) -> TreeClass {
    let long = 4 * shape.size + ell < 8 * shape.diameter;
    let in_range = 4 * shape.size >= ell && 2 * shape.size <= ell;
    TreeClass { kind: if long { TreeKind::Long } else { TreeKind::Round }, in_range }
}

#[derive(Clone, Debug, Serialize)]
pub struct AlphaComponent {
    pub edges: BTreeSet<EdgeId>,
    /// The component as a path, when it is one.
    pub path: Option<TreePath>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AlphaRegions {
    pub u_minus: VertexId,
    pub u_plus: VertexId,
    /// Edges whose midpoints are more than ℓ/4 from `u_minus`.
    pub plus: BTreeSet<EdgeId>,
    /// Edges whose midpoints are more than ℓ/4 from `u_plus`.
    pub minus: BTreeSet<EdgeId>,
    pub plus_components: Vec<AlphaComponent>,
    pub minus_components: Vec<AlphaComponent>,
    pub diameters_checked: usize,
    pub warnings: Vec<String>,
}

impl AlphaRegions {
    pub fn side_of(&self, e: EdgeId) -> Option<char> {
        if self.plus.contains(&e) {
            Some('+')
        } else if self.minus.contains(&e) {
            Some('-')
        } else {
            None
        }
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.plus.contains(&e) || self.minus.contains(&e)
    }
}

fn far_edges(patch: &PatchComplex, shape: &TreeShape, from: VertexId, ell: usize) -> Result<BTreeSet<EdgeId>> {
    let graph = super::SkeletonGraph::new(patch, &shape.sub);
    let dist = super::metric::midpoint_distances(&graph, Point::Vertex(from))?;
    Ok(dist.into_iter().filter(|&(_, d)| d as usize > ell / 2).map(|(e, _)| e).collect())
}

fn components(patch: &PatchComplex, edges: &BTreeSet<EdgeId>) -> Vec<AlphaComponent> {
    let mut left = edges.clone();
    let mut out = Vec::new();
    while let Some(&first) = left.iter().next() {
        let mut comp = BTreeSet::from([first]);
        left.remove(&first);
        let mut queue = VecDeque::from([first]);
        while let Some(e) = queue.pop_front() {
            let (a, b) = patch.edge_ends(e);
            let touching: Vec<EdgeId> = left
                .iter()
                .copied()
                .filter(|&f| {
                    let (c, d) = patch.edge_ends(f);
                    [a, b].contains(&c) || [a, b].contains(&d)
                })
                .collect();
            for f in touching {
                left.remove(&f);
                comp.insert(f);
                queue.push_back(f);
            }
        }
        let path = TreePath::from_edges(patch, &comp);
        out.push(AlphaComponent { edges: comp, path });
    }
    out
}

/// α± for a long tree. Recomputes from every diameter and fails if the
/// unordered pair `{α+, α-}` changes.
pub fn alpha_regions(patch: &PatchComplex, shape: &TreeShape, ell: usize) -> Result<AlphaRegions> {
    if classify_tree(shape, ell).kind == TreeKind::Round {
        return Err(Error::RoundTree);
    }
    let first = &shape.diameters[0];
    let (u_minus, u_plus) = (first.start(), first.end());
    let plus = far_edges(patch, shape, u_minus, ell)?;
    let minus = far_edges(patch, shape, u_plus, ell)?;
    for d in &shape.diameters[1..] {
        let p = far_edges(patch, shape, d.start(), ell)?;
        let m = far_edges(patch, shape, d.end(), ell)?;
        if !((p == plus && m == minus) || (p == minus && m == plus)) {
            return Err(Error::DiameterDependence);
        }
    }
    let plus_components = components(patch, &plus);
    let minus_components = components(patch, &minus);
    let warnings = plus_components
        .iter()
        .chain(&minus_components)
        .filter(|c| c.path.is_none())
        .map(|c| format!("alpha component {:?} is not a path", c.edges))
        .collect();
    Ok(AlphaRegions {
        u_minus,
        u_plus,
        plus,
        minus,
        plus_components,
        minus_components,
        diameters_checked: shape.diameters.len(),
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::super::test_support::patch;
    use super::super::{intersection, CellId};
    use super::*;

    fn overlap(ell: usize, len: usize) -> (PatchComplex, SubComplex) {
        let p = patch(ell, 2, &[(0, 0, 1, 0, len)]);
        let a = intersection(&p.closure([CellId(0)]), &p.closure([CellId(1)]));
        (p, a)
    }

    #[test]
    fn path_shape_and_class() {
        let (p, a) = overlap(24, 12);
        let s = analyze_tree(&p, &a).unwrap();
        assert_eq!((s.size, s.diameter, s.leaves.len()), (12, 12, 2));
        assert_eq!(classify_tree(&s, 24).kind, TreeKind::Long);
        let (p, a) = overlap(24, 6);
        let s = analyze_tree(&p, &a).unwrap();
        assert_eq!(classify_tree(&s, 24).kind, TreeKind::Round);
    }

    #[test]
    fn alpha_on_path() {
        let (p, a) = overlap(24, 12);
        let s = analyze_tree(&p, &a).unwrap();
        let r = alpha_regions(&p, &s, 24).unwrap();
        assert_eq!(r.plus.len(), 6);
        assert_eq!(r.minus.len(), 6);
        assert!(r.plus.is_disjoint(&r.minus));
        let d = &s.diameters[0];
        assert!(r.plus.contains(d.edges.last().unwrap()));
    }

    #[test]
    fn round_has_no_regions() {
        let (p, a) = overlap(24, 6);
        let s = analyze_tree(&p, &a).unwrap();
        assert!(matches!(alpha_regions(&p, &s, 24), Err(Error::RoundTree)));
    }

    #[test]
    fn cycle_is_not_a_tree() {
        let p = patch(8, 1, &[]);
        assert!(matches!(analyze_tree(&p, &p.whole().skeleton()), Err(Error::NotATree(_))));
    }

    #[test]
    fn single_vertex_tree() {
        let p = patch(8, 1, &[]);
        let sub = SubComplex { vertices: [p.corner_vertex(CellId(0), 0)].into(), ..Default::default() };
        let s = analyze_tree(&p, &sub).unwrap();
        assert_eq!((s.size, s.diameter), (0, 0));
    }

    #[test]
    fn symmetry_reflects() {
        let (p, a) = overlap(24, 5);
        let s = analyze_tree(&p, &a).unwrap();
        let d = &s.diameters[0];
        let x = d.point_at(3).unwrap();
        let y = path_symmetry(d, x).unwrap();
        assert_eq!(d.position(y), Some(7));
        assert_eq!(path_symmetry(d, y).unwrap(), x);
        assert_eq!(reflect(5, 5).unwrap(), 5);
        assert!(reflect(11, 5).is_err());
    }
}

//! Distances by exhaustive simple-path search.

use std::collections::{BTreeSet, HashMap};

use rand::seq::IteratorRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::complex::{CellId, PatchComplex, Point, SubComplex};
use crate::error::{Error, Result};

/// Largest input, in edges, the distance oracle accepts.
pub const DISTANCE_CAP: usize = 200;

/// Length in half units of the shortest path from `x` to `y` inside
/// `within`, found by enumerating simple paths. Paths longer than the best
/// one found so far are abandoned, which does not change the minimum.
pub fn oracle_distance(patch: &PatchComplex, within: &SubComplex, x: Point, y: Point) -> Result<Option<u32>> {
    if within.edges.len() > DISTANCE_CAP {
        return Err(Error::OracleCap(format!("{} edges > {DISTANCE_CAP}", within.edges.len())));
    }
    let mut nodes: Vec<Point> = within.vertices.iter().map(|&v| Point::Vertex(v)).collect();
    nodes.extend(within.edges.iter().map(|&e| Point::Midpoint(e)));
    let index: HashMap<Point, usize> = nodes.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let (Some(&from), Some(&to)) = (index.get(&x), index.get(&y)) else {
        return Err(Error::PointOutside(format!("{x} or {y}")));
    };
    let mut adj = vec![Vec::new(); nodes.len()];
    for &e in &within.edges {
        let m = index[&Point::Midpoint(e)];
        let (a, b) = patch.edge_ends(e);
        for v in [a, b] {
            if let Some(&i) = index.get(&Point::Vertex(v)) {
                adj[m].push(i);
                adj[i].push(m);
            }
        }
    }
    let mut best = None;
    let mut on_path = vec![false; nodes.len()];
    search(&adj, from, to, 0, &mut on_path, &mut best);
    Ok(best)
}

fn search(adj: &[Vec<usize>], at: usize, to: usize, len: u32, on_path: &mut [bool], best: &mut Option<u32>) {
    if best.is_some_and(|b| len >= b) && at != to {
        return;
    }
    if at == to {
        *best = Some(best.map_or(len, |b| b.min(len)));
        return;
    }
    on_path[at] = true;
    for &n in &adj[at] {
        if !on_path[n] {
            search(adj, n, to, len + 1, on_path, best);
        }
    }
    on_path[at] = false;
}

/// A random subcomplex of `patch`: the closure of a random nonempty set of
/// cells, with some edges and vertices removed (so it may be disconnected),
/// and two random points of it.
pub fn random_subcomplex(patch: &PatchComplex, rng: &mut ChaCha8Rng) -> (SubComplex, Point, Point) {
    let n = patch.n_cells();
    let mut cells: BTreeSet<CellId> = patch.cell_ids().filter(|_| rng.gen_bool(0.6)).collect();
    if cells.is_empty() {
        cells.insert(CellId(rng.gen_range(0..n) as u32));
    }
    let closure = patch.closure(cells.iter().copied());
    let edges: BTreeSet<_> = closure.edges.iter().copied().filter(|_| rng.gen_bool(0.9)).collect();
    let mut vertices: BTreeSet<_> = closure.vertices.iter().copied().filter(|_| rng.gen_bool(0.95)).collect();
    if vertices.is_empty() {
        vertices.extend(closure.vertices.first());
    }
    let edges: BTreeSet<_> = edges
        .into_iter()
        .filter(|&e| {
            let (a, b) = patch.edge_ends(e);
            vertices.contains(&a) && vertices.contains(&b)
        })
        .collect();
    let sub = SubComplex { cells: BTreeSet::new(), edges, vertices };
    let mut points: Vec<Point> = sub.vertices.iter().map(|&v| Point::Vertex(v)).collect();
    points.extend(sub.edges.iter().map(|&e| Point::Midpoint(e)));
    let mut pick = || *points.iter().choose(rng).expect("closure of a cell has points");
    let (x, y) = (pick(), pick());
    (sub, x, y)
}

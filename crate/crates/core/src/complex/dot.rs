//! Graphviz output of the 1-skeleton.

use std::fmt::Write;

use super::{CellId, EdgeId, PatchComplex};

/// The 1-skeleton with each edge annotated by id and degree.
pub fn skeleton_dot(patch: &PatchComplex) -> String {
    let mut s = String::from("graph skeleton {\n  node [shape=point];\n");
    for e in (0..patch.n_edges() as u32).map(EdgeId) {
        let (a, b) = patch.edge_ends(e);
        let deg = patch.degree(e);
        let style = if deg > 1 { ", penwidth=2" } else { "" };
        writeln!(s, "  {a} -- {b} [label=\"{e} deg={deg}\"{style}];").unwrap();
    }
    s.push_str("}\n");
    s
}

/// The 1-skeleton plus wall pieces drawn as dashed links between edge
/// midpoints.
pub fn walls_dot(patch: &PatchComplex, links: &[(CellId, EdgeId, EdgeId)]) -> String {
    let mut s = String::from("graph walls {\n  node [shape=point];\n");
    for e in (0..patch.n_edges() as u32).map(EdgeId) {
        let (a, b) = patch.edge_ends(e);
        writeln!(s, "  {a} -- m{e} -- {b};").unwrap();
        writeln!(s, "  m{e} [shape=circle, width=0.05, label=\"\"];").unwrap();
    }
    for (c, x, y) in links {
        writeln!(s, "  m{x} -- m{y} [style=dashed, color=red, label=\"{c}\"];").unwrap();
    }
    s.push_str("}\n");
    s
}

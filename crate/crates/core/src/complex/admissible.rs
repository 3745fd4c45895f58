//! Admissibility of a patch: the isoperimetric inequality on every
//! connected subcomplex, short-cycle (girth) detection, folds of two copies
//! of one relator, and fulfilment by a labeling.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use serde::Serialize;

use super::{can_of_cells, CellId, EdgeId, PatchComplex, VertexId};
use crate::rational::{format_q, Q};
use crate::word::PieceLabel;

/// Source of slot labels: the label of word position `pos` of relator
/// `relator`, read forward.
pub trait Labeling {
    fn label(&self, relator: usize, pos: usize) -> PieceLabel;
}

/// Label of slot `slot` of cell `c`, read from corner `slot` to corner
/// `slot + 1`.
pub fn slot_label(patch: &PatchComplex, labels: &dyn Labeling, c: CellId, slot: usize) -> PieceLabel {
    let spec = patch.cell(c);
    let (pos, backward) = spec.slot_position(slot, patch.ell());
    let l = labels.label(spec.relator, pos);
    if backward {
        l.inverse()
    } else {
        l
    }
}

/// `(d + ε)|Y|ℓ`.
pub fn ipi_bound(d: Q, eps: Q, size: usize, ell: usize) -> Q {
    (d + eps) * Q::from_integer((size * ell) as i64)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IpiOutcome {
    Pass,
    Violation { can: u64, bound: Q },
}

/// `Can(Y) > (d + ε)|Y|ℓ` is a violation.
pub fn ipi_check(patch: &PatchComplex, cells: &BTreeSet<CellId>, d: Q, eps: Q) -> IpiOutcome {
    let can = can_of_cells(patch, cells);
    let bound = ipi_bound(d, eps, cells.len(), patch.ell());
    if Q::from_integer(can as i64) > bound {
        IpiOutcome::Violation { can, bound }
    } else {
        IpiOutcome::Pass
    }
}

/// `|Y| ≤ K` and at most `K′` gluing subpaths.
pub fn is_kk_bounded(patch: &PatchComplex, k: usize, k_prime: usize) -> bool {
    patch.n_cells() <= k && patch.gluings().len() <= k_prime
}

/// At most `½|Y|(|Y| - 1)` gluings.
pub fn remark_bound_holds(patch: &PatchComplex) -> bool {
    let n = patch.n_cells();
    patch.gluings().len() <= n * n.saturating_sub(1) / 2
}

/// All sets of at most `max_k` cells that are connected through shared
/// edges.
pub fn connected_cell_subsets(patch: &PatchComplex, max_k: usize) -> Vec<BTreeSet<CellId>> {
    let neighbours: Vec<BTreeSet<CellId>> = patch
        .cell_ids()
        .map(|c| {
            patch
                .cell_edges(c)
                .iter()
                .flat_map(|&e| patch.edge_slots(e).iter().map(|&(d, _)| d))
                .filter(|&d| d != c)
                .collect()
        })
        .collect();
    let mut seen: HashSet<BTreeSet<CellId>> = HashSet::new();
    let mut layer: Vec<BTreeSet<CellId>> = patch.cell_ids().map(|c| BTreeSet::from([c])).collect();
    let mut out = Vec::new();
    while !layer.is_empty() && layer[0].len() <= max_k {
        let mut next = Vec::new();
        for s in layer {
            if s.len() < max_k {
                for c in &s {
                    for &d in &neighbours[c.idx()] {
                        if !s.contains(&d) {
                            let mut t = s.clone();
                            t.insert(d);
                            if seen.insert(t.clone()) {
                                next.push(t);
                            }
                        }
                    }
                }
            }
            out.push(s);
        }
        layer = next;
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    out
}

/// An embedded closed path shorter than ℓ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShortCycle {
    pub length: usize,
    pub edges: Vec<EdgeId>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct GeodesicReport {
    pub violations: Vec<ShortCycle>,
}

impl GeodesicReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Finds embedded closed paths of length `< ℓ` in the 1-skeleton. Every
/// such cycle passes through some edge `e`, and the shortest cycle through
/// `e` is `e` plus a shortest path between its ends avoiding `e`; so one
/// search per edge finds all short girth witnesses. When the girth is at
/// least ℓ, embedded paths of length `≤ ℓ/2` are geodesic.
pub fn check_embedded_geodesics(patch: &PatchComplex) -> GeodesicReport {
    let mut adj: BTreeMap<VertexId, Vec<(EdgeId, VertexId)>> = BTreeMap::new();
    for e in (0..patch.n_edges() as u32).map(EdgeId) {
        let (a, b) = patch.edge_ends(e);
        adj.entry(a).or_default().push((e, b));
        adj.entry(b).or_default().push((e, a));
    }
    let mut seen: HashSet<Vec<EdgeId>> = HashSet::new();
    let mut violations = Vec::new();
    for e in (0..patch.n_edges() as u32).map(EdgeId) {
        let (a, b) = patch.edge_ends(e);
        let cycle = if a == b {
            Some(vec![e])
        } else {
            let mut parent: BTreeMap<VertexId, (EdgeId, VertexId)> = BTreeMap::new();
            let mut queue = VecDeque::from([a]);
            let mut depth = BTreeMap::from([(a, 0usize)]);
            while let Some(v) = queue.pop_front() {
                if v == b || depth[&v] + 2 > patch.ell() {
                    continue;
                }
                for &(f, w) in &adj[&v] {
                    if f != e && !depth.contains_key(&w) {
                        depth.insert(w, depth[&v] + 1);
                        parent.insert(w, (f, v));
                        queue.push_back(w);
                    }
                }
            }
            parent.contains_key(&b).then(|| {
                let mut edges = vec![e];
                let mut cur = b;
                while cur != a {
                    let (f, p) = parent[&cur];
                    edges.push(f);
                    cur = p;
                }
                edges
            })
        };
        if let Some(edges) = cycle {
            if edges.len() < patch.ell() {
                let mut key = edges.clone();
                key.sort();
                if seen.insert(key) {
                    violations.push(ShortCycle { length: edges.len(), edges });
                }
            }
        }
    }
    GeodesicReport { violations }
}

/// Problems with the labeling around each edge.
pub fn check_fulfilled(patch: &PatchComplex, labels: &dyn Labeling) -> Vec<String> {
    let mut problems = Vec::new();
    for e in (0..patch.n_edges() as u32).map(EdgeId) {
        let mut reference: Option<PieceLabel> = None;
        let mut positions = BTreeSet::new();
        for &(c, i) in patch.edge_slots(e) {
            let l = slot_label(patch, labels, c, i);
            let l = if patch.slot_forward(c, i) { l } else { l.inverse() };
            match reference {
                None => reference = Some(l),
                Some(r) if r != l => {
                    problems.push(format!("{e}: slot {c}:{i} label disagrees"));
                }
                Some(_) => {}
            }
            let spec = patch.cell(c);
            let (pos, _) = spec.slot_position(i, patch.ell());
            if !positions.insert((spec.relator, pos)) {
                problems.push(format!("{e}: relator {} position {pos} appears twice", spec.relator));
            }
        }
    }
    problems
}

#[derive(Clone, Debug, Serialize)]
pub struct IpiViolation {
    pub cells: Vec<CellId>,
    pub can: u64,
    pub bound: String,
}

/// Two copies of one relator sharing more than `(d + ε)ℓ` edges; folding
/// them together gives a one-cell violation of the isoperimetric bound.
#[derive(Clone, Debug, Serialize)]
pub struct FoldViolation {
    pub cells: (CellId, CellId),
    pub relator: usize,
    pub shared: usize,
}

#[derive(Clone, Debug)]
pub struct AdmissibilityCheck {
    pub d: Q,
    pub eps: Q,
    /// Largest connected subcomplex size tested against the isoperimetric
    /// bound.
    pub max_subset: usize,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Admissibility {
    pub ipi: Vec<IpiViolation>,
    pub folds: Vec<FoldViolation>,
    pub geodesic: GeodesicReport,
    pub fulfilment: Vec<String>,
    pub subsets_checked: usize,
}

impl Admissibility {
    pub fn admissible(&self) -> bool {
        self.ipi.is_empty() && self.folds.is_empty() && self.geodesic.is_clean() && self.fulfilment.is_empty()
    }

    pub fn summary(&self) -> String {
        format!(
            "ipi={} folds={} short_cycles={} fulfilment={}",
            self.ipi.len(),
            self.folds.len(),
            self.geodesic.violations.len(),
            self.fulfilment.len()
        )
    }
}

pub fn check_admissible(patch: &PatchComplex, labels: Option<&dyn Labeling>, cfg: &AdmissibilityCheck) -> Admissibility {
    let subsets = connected_cell_subsets(patch, cfg.max_subset);
    let mut ipi = Vec::new();
    for s in &subsets {
        if let IpiOutcome::Violation { can, bound } = ipi_check(patch, s, cfg.d, cfg.eps) {
            ipi.push(IpiViolation { cells: s.iter().copied().collect(), can, bound: format_q(&bound) });
        }
    }
    let mut folds = Vec::new();
    let fold_bound = (cfg.d + cfg.eps) * Q::from_integer(patch.ell() as i64);
    for a in patch.cell_ids() {
        for b in patch.cell_ids().filter(|&b| b > a) {
            let relator = patch.cell(a).relator;
            if patch.cell(b).relator != relator {
                continue;
            }
            let ea: BTreeSet<EdgeId> = patch.cell_edges(a).iter().copied().collect();
            let shared = patch.cell_edges(b).iter().copied().collect::<BTreeSet<_>>().intersection(&ea).count();
            if Q::from_integer(shared as i64) > fold_bound {
                folds.push(FoldViolation { cells: (a, b), relator, shared });
            }
        }
    }
    Admissibility {
        ipi,
        folds,
        geodesic: check_embedded_geodesics(patch),
        fulfilment: labels.map(|l| check_fulfilled(patch, l)).unwrap_or_default(),
        subsets_checked: subsets.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::super::test_support::patch;
    use super::*;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n, d)
    }

    #[test]
    fn ipi_arithmetic() {
        let p = patch(20, 2, &[(0, 0, 1, 0, 11)]);
        let all = p.whole().cells;
        assert!(matches!(ipi_check(&p, &all, q(1, 5), q(1, 100)), IpiOutcome::Violation { can: 11, .. }));
        let p = patch(20, 2, &[(0, 0, 1, 0, 8)]);
        assert_eq!(ipi_check(&p, &p.whole().cells, q(1, 5), q(1, 100)), IpiOutcome::Pass);
    }

    #[test]
    fn girth() {
        assert!(check_embedded_geodesics(&patch(8, 1, &[])).is_clean());
        // overlap 5 > ℓ/2: the outer cycle has length 2·8 − 2·5 = 6 < 8
        let r = check_embedded_geodesics(&patch(8, 2, &[(0, 0, 1, 0, 5)]));
        assert!(r.violations.iter().any(|c| c.length == 6));
        assert!(check_embedded_geodesics(&patch(8, 2, &[(0, 0, 1, 0, 4)])).is_clean());
    }

    #[test]
    fn kk_bounds() {
        let p = patch(8, 1, &[]);
        assert!(is_kk_bounded(&p, 1, 0));
        let p = patch(8, 2, &[(0, 0, 1, 0, 2)]);
        assert!(is_kk_bounded(&p, 2, 1));
        assert!(!is_kk_bounded(&p, 2, 0));
        assert!(remark_bound_holds(&p));
    }

    #[test]
    fn subsets_are_connected() {
        let p = patch(12, 3, &[(0, 0, 1, 0, 3), (1, 6, 2, 0, 3)]);
        let s = connected_cell_subsets(&p, 3);
        // {0}, {1}, {2}, {0,1}, {1,2}, {0,1,2}
        assert_eq!(s.len(), 6);
    }

    #[test]
    fn folds_flag_repeated_relator() {
        let cells = vec![super::super::CellSpec::plain(0, 0), super::super::CellSpec::plain(1, 0)];
        let g = super::super::Gluing { cell_a: 0, start_a: 0, cell_b: 1, start_b: 2, length: 3, reversed: true };
        let p = PatchComplex::new(8, cells, vec![g]).unwrap();
        let a = check_admissible(&p, None, &AdmissibilityCheck { d: q(1, 5), eps: q(1, 100), max_subset: 6 });
        assert_eq!(a.folds.len(), 1);
        assert!(!a.admissible());
    }
}

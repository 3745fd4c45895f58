//! Tile-walls: antipodal pairings inside each 2-cell, concatenated across
//! gluings and bent near the ends of long intersections.
//!
//! A wall structure is stored as one perfect matching of slots per 2-cell.
//! The tile-wall graph of a tile is then read off from the matchings of its
//! cells, so concatenation along identified edges needs no bookkeeping.

mod balance;
mod graph;
pub mod lemmas;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

pub use balance::{classify_wall_case, shard_of, verify_balanced, BalanceFailure, BalanceReport, DistCache, WallCase};
pub use graph::{ExportedWall, TileWallGraph, WallLink, WallPath, WallViolation};
pub use lemmas::{LemmaReport, LemmaTally};

use crate::complex::{analyze_tree, alpha_regions, classify_tree, AlphaRegions, CellId, EdgeId, PatchComplex, TreeKind};
use crate::error::{Error, Result};
use crate::tiles::{shared_edges, ConstructionHooks, Merge, TileCollection, TileId};

/// The slot pairing `i ↔ i + ℓ/2` of one 2-cell.
pub fn antipodal_walls(ell: usize) -> Vec<usize> {
    (0..ell).map(|i| (i + ell / 2) % ell).collect()
}

/// One endpoint moved by a path symmetry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BendRecord {
    pub gluing_step: usize,
    pub cell: CellId,
    pub alpha_side: String,
    pub from_midpoint: EdgeId,
    pub to_midpoint: EdgeId,
}

/// How a gluing treats the walls of its two tiles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GlueStep {
    /// Step 1 over a round tree: plain concatenation.
    Step1a,
    /// Step 1 over a long tree: bend the younger tile, then concatenate.
    Step1b,
    Step2,
    Step3,
}

/// Shape data of a Step-1 intersection, kept for classifying wall paths.
#[derive(Clone, Debug)]
pub struct Step1Context {
    pub decision: usize,
    pub older: TileId,
    pub younger: TileId,
    pub shared: BTreeSet<EdgeId>,
    pub kind: Option<TreeKind>,
    pub alpha: Option<AlphaRegions>,
}

impl Step1Context {
    pub fn alpha_edges(&self) -> BTreeSet<EdgeId> {
        match &self.alpha {
            Some(a) => a.plus.union(&a.minus).copied().collect(),
            None => BTreeSet::new(),
        }
    }
}

/// Which wall path fell in which case at which Step-1 gluing.
#[derive(Clone, Debug, Serialize)]
pub struct CaseRecord {
    pub decision: usize,
    pub tile: TileId,
    pub midpoints: Vec<EdgeId>,
    pub case: WallCase,
}

#[derive(Clone, Debug)]
pub struct WallConfig {
    pub bending: bool,
    pub lemmas: bool,
    /// Cap on wall paths enumerated per tile.
    pub path_limit: usize,
}

impl Default for WallConfig {
    fn default() -> Self {
        WallConfig { bending: true, lemmas: true, path_limit: 20_000 }
    }
}

#[derive(Clone, Debug)]
pub struct WallState {
    ell: usize,
    partner: Vec<Vec<usize>>,
    pub config: WallConfig,
    pub bends: Vec<BendRecord>,
    pub warnings: Vec<String>,
    pub errors: Vec<String>,
    /// `verify_balanced` on every tile as it is made.
    pub reports: Vec<BalanceReport>,
    pub cases: Vec<CaseRecord>,
    pub lemmas: LemmaReport,
    pending: Option<Step1Context>,
}

impl WallState {
    /// Antipodal pairings in every 2-cell.
    pub fn new(patch: &PatchComplex, config: WallConfig) -> Self {
        let ell = patch.ell();
        WallState {
            ell,
            partner: vec![antipodal_walls(ell); patch.n_cells()],
            config,
            bends: vec![],
            warnings: vec![],
            errors: vec![],
            reports: vec![],
            cases: vec![],
            lemmas: LemmaReport::default(),
            pending: None,
        }
    }

    pub fn partner(&self, c: CellId, slot: usize) -> usize {
        self.partner[c.idx()][slot]
    }

    pub fn matchings(&self) -> &[Vec<usize>] {
        &self.partner
    }

    pub fn tile_graph(&self, patch: &PatchComplex, cells: &BTreeSet<CellId>) -> TileWallGraph {
        TileWallGraph::new(patch, cells, &self.partner)
    }

    /// Wall links of the whole patch as `(cell, midpoint, midpoint)`.
    pub fn all_links(&self, patch: &PatchComplex) -> Vec<(CellId, EdgeId, EdgeId)> {
        let all: BTreeSet<CellId> = patch.cell_ids().collect();
        self.tile_graph(patch, &all).links.iter().map(|l| (l.cell, l.ea, l.eb)).collect()
    }

    pub fn bend_log_jsonl(&self) -> String {
        self.bends.iter().map(|b| serde_json::to_string(b).expect("record serializes") + "\n").collect()
    }

    /// Applies `s_{α_i^±}` in every cell of `younger` meeting α±: each
    /// maximal run of consecutive α-slots is reflected, and the pairing is
    /// conjugated by the reflection.
    pub fn bend(
        &mut self,
        patch: &PatchComplex,
        younger: &BTreeSet<CellId>,
        alpha: &AlphaRegions,
        gluing_step: usize,
    ) -> Vec<BendRecord> {
        let ell = self.ell;
        let mut out = Vec::new();
        let overlap: BTreeSet<EdgeId> = alpha.plus.intersection(&alpha.minus).copied().collect();
        if !overlap.is_empty() {
            self.warnings.push(format!("decision {gluing_step}: α+ and α- share {} edges", overlap.len()));
        }
        let minus_only: BTreeSet<EdgeId> = alpha.minus.difference(&alpha.plus).copied().collect();
        for &c in younger {
            let mut sigma: Vec<usize> = (0..ell).collect();
            let mut records = Vec::new();
            for (side, set) in [("+", &alpha.plus), ("-", &minus_only)] {
                for (start, len) in runs(patch, c, set) {
                    for t in 0..len {
                        let from = (start + t) % ell;
                        let to = (start + len - 1 - t) % ell;
                        sigma[from] = to;
                        if from != to {
                            records.push(BendRecord {
                                gluing_step,
                                cell: c,
                                alpha_side: side.to_string(),
                                from_midpoint: patch.slot_edge(c, from),
                                to_midpoint: patch.slot_edge(c, to),
                            });
                        }
                    }
                }
            }
            self.conjugate(c, &sigma);
            out.extend(records);
        }
        self.bends.extend(out.iter().cloned());
        out
    }

    fn conjugate(&mut self, c: CellId, sigma: &[usize]) {
        let old = &self.partner[c.idx()];
        let mut new = vec![0; old.len()];
        for (a, &b) in old.iter().enumerate() {
            new[sigma[a]] = sigma[b];
        }
        self.partner[c.idx()] = new;
    }

    /// Undoes a set of bends by reapplying their reflections, which are
    /// involutions.
    pub fn unbend(&mut self, patch: &PatchComplex, records: &[BendRecord]) {
        let mut by_cell: BTreeMap<(usize, CellId), Vec<usize>> = BTreeMap::new();
        for r in records {
            let sigma = by_cell.entry((r.gluing_step, r.cell)).or_insert_with(|| (0..self.ell).collect());
            let from = patch.slot_of(r.cell, r.from_midpoint).expect("bend stays in its cell");
            let to = patch.slot_of(r.cell, r.to_midpoint).expect("bend stays in its cell");
            sigma[from] = to;
        }
        for ((_, c), sigma) in by_cell.into_iter().rev() {
            self.conjugate(c, &sigma);
        }
    }

    /// Shape of `T ∩ T′` for a Step-1 gluing of `older` and `younger`.
    pub fn step1_context(
        &mut self,
        patch: &PatchComplex,
        tc: &TileCollection,
        decision: usize,
        older: TileId,
        younger: TileId,
    ) -> Step1Context {
        let (a, b) = (&tc.tile(older).cells, &tc.tile(younger).cells);
        let shared = shared_edges(patch, a, b);
        let mut ctx = Step1Context { decision, older, younger, shared: shared.clone(), kind: None, alpha: None };
        let shape = match analyze_tree(patch, &patch.edge_subgraph(shared.iter().copied())) {
            Ok(s) => s,
            Err(e) => {
                self.warnings.push(format!("decision {decision}: intersection of {older} and {younger}: {e}"));
                return ctx;
            }
        };
        let kind = classify_tree(&shape, self.ell).kind;
        ctx.kind = Some(kind);
        if kind == TreeKind::Long {
            match alpha_regions(patch, &shape, self.ell) {
                Ok(a) => ctx.alpha = Some(a),
                Err(e) => self.warnings.push(format!("decision {decision}: {e}")),
            }
        }
        ctx
    }

    /// Applies one gluing to the walls. Only Step 1(b) changes anything;
    /// the other steps concatenate, which the matchings do implicitly.
    pub fn bend_and_glue(
        &mut self,
        patch: &PatchComplex,
        tc: &TileCollection,
        older: TileId,
        younger: TileId,
        step: GlueStep,
        decision: usize,
    ) -> Result<Vec<BendRecord>> {
        if step != GlueStep::Step1b {
            return Ok(vec![]);
        }
        let ctx = self.step1_context(patch, tc, decision, older, younger);
        if ctx.kind != Some(TreeKind::Long) {
            return Err(Error::RoundTree);
        }
        let Some(alpha) = ctx.alpha else {
            return Err(Error::DiameterDependence);
        };
        let cells = tc.tile(younger).cells.clone();
        if cells.len() > 3 {
            self.warnings.push(format!(
                "decision {decision}: bending {younger} with {} cells, beyond the verified range of 3",
                cells.len()
            ));
        }
        Ok(self.bend(patch, &cells, &alpha, decision))
    }
}

/// Maximal cyclic runs `(start, len)` of slots of `c` whose edges lie in
/// `set`.
fn runs(patch: &PatchComplex, c: CellId, set: &BTreeSet<EdgeId>) -> Vec<(usize, usize)> {
    let ell = patch.ell();
    let inside: Vec<bool> = (0..ell).map(|i| set.contains(&patch.slot_edge(c, i))).collect();
    let Some(gap) = inside.iter().position(|&x| !x) else {
        return if ell > 0 { vec![(0, ell)] } else { vec![] };
    };
    let mut out = Vec::new();
    let mut run: Option<(usize, usize)> = None;
    for k in 1..=ell {
        let i = (gap + k) % ell;
        match (&mut run, inside[i]) {
            (Some((_, len)), true) => *len += 1,
            (None, true) => run = Some((i, 1)),
            (Some(_), false) => out.push(run.take().unwrap()),
            (None, false) => {}
        }
    }
    out
}

impl ConstructionHooks for WallState {
    fn before_merge(&mut self, patch: &PatchComplex, tc: &TileCollection, m: &Merge) {
        if self.config.lemmas {
            lemmas::pre_merge(self, patch, tc, m);
        }
        if m.step != 1 {
            return;
        }
        let ctx = self.step1_context(patch, tc, m.decision, m.first, m.second);
        if self.config.bending {
            if let Some(alpha) = &ctx.alpha {
                let cells = tc.tile(m.second).cells.clone();
                if cells.len() > 3 {
                    self.warnings.push(format!(
                        "decision {}: bending {} with {} cells, beyond the verified range of 3",
                        m.decision,
                        m.second,
                        cells.len()
                    ));
                }
                self.bend(patch, &cells, alpha, m.decision);
            }
        }
        self.pending = Some(ctx);
    }

    fn after_merge(&mut self, patch: &PatchComplex, tc: &TileCollection, m: &Merge) {
        let Some(id) = m.result else { return };
        let ctx = if m.step == 1 { self.pending.take() } else { None };
        let report = verify_balanced(patch, tc, self, id, ctx.as_ref());
        if let Some(ctx) = &ctx {
            for (path, case) in &report.cases {
                self.cases.push(CaseRecord { decision: m.decision, tile: id, midpoints: path.clone(), case: *case });
            }
            if self.config.lemmas {
                lemmas::round_trees(self, patch, tc, ctx, id);
            }
        }
        self.reports.push(report);
    }
}

#[cfg(test)]
mod tests;

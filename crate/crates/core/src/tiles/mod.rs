//! Potiles and the three-step tile collection construction.
//!
//! Tiles live in an arena and are never deleted: a tile removed from the
//! collection is marked dead, so provenance links stay valid for shard
//! computations. Step 1 merges tiles with a long intersection into core
//! tiles. Step 2 adds the union of two tiles with a short intersection and
//! keeps both parts. Step 3 grows the latest Step-2 union through long
//! intersections, then control returns to Step 2.

mod check;

use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::Serialize;

use crate::complex::{
    can_of_cells, cells_connected, orbit_isomorphic, pair_isomorphic, CellId, EdgeId, PatchComplex,
};
use crate::error::{Error, Result};
use crate::rational::{ceil_q, lambda, Q};

pub use check::{check_collection, CollectionViolation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct TileId(pub u32);

impl TileId {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl std::fmt::Display for TileId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "t{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TileConfig {
    pub d: Q,
    pub eps: Q,
    pub max_tile_size: usize,
    pub max_potile_size: usize,
    /// Patches with more cells or gluings are refused.
    pub max_patch_cells: usize,
    pub max_patch_gluings: usize,
    /// Require `|T∩T′| > ℓ/4` instead of `≥ ℓ/4` in Step 1.
    pub core_strict: bool,
    /// Decomposition length below which a wall segment counts as returning.
    pub n_ret: usize,
}

/// Smallest `N` with `d ≤ N / (4(N + 1))`, or `None` for `d ≥ 1/4`.
pub fn max_potile_size(d: Q) -> Option<usize> {
    if d >= Q::new(1, 4) {
        return None;
    }
    // d ≤ N/(4N+4)  ⇔  N ≥ 4d / (1 - 4d)
    let four_d = Q::from_integer(4) * d;
    Some(ceil_q(&(four_d / (Q::from_integer(1) - four_d))).max(1) as usize)
}

/// `⌈(2c + 1)λ⌉` with `c = 1`.
pub fn returning_cap(d: Q) -> Option<usize> {
    lambda(&d).map(|l| ceil_q(&(Q::from_integer(3) * l)) as usize)
}

impl TileConfig {
    pub fn new(d: Q, eps: Q) -> Result<Self> {
        crate::rational::check_density(&d)?;
        let n = max_potile_size(d).ok_or_else(|| Error::Density("tiles need d < 1/4".into()))?;
        Ok(TileConfig {
            d,
            eps,
            max_tile_size: 5,
            max_potile_size: n,
            max_patch_cells: 12,
            max_patch_gluings: 66,
            core_strict: false,
            n_ret: returning_cap(d).expect("d < 1/4"),
        })
    }
}

pub fn is_potile(patch: &PatchComplex, cells: &BTreeSet<CellId>) -> Result<bool> {
    if cells.is_empty() {
        return Err(Error::Empty);
    }
    if !cells_connected(patch, cells) {
        return Err(Error::Disconnected);
    }
    Ok(4 * can_of_cells(patch, cells) >= (patch.ell() * (cells.len() - 1)) as u64)
}

fn potile(patch: &PatchComplex, cells: &BTreeSet<CellId>) -> bool {
    is_potile(patch, cells).unwrap_or(false)
}

/// `Bal(T) = ℓ/4 (|T| + 1) - Can(T)` in edge units.
pub fn balance(patch: &PatchComplex, cells: &BTreeSet<CellId>) -> i64 {
    (patch.ell() / 4 * (cells.len() + 1)) as i64 - can_of_cells(patch, cells) as i64
}

pub fn shared_edges(patch: &PatchComplex, a: &BTreeSet<CellId>, b: &BTreeSet<CellId>) -> BTreeSet<EdgeId> {
    let ea: BTreeSet<EdgeId> = a.iter().flat_map(|&c| patch.cell_edges(c).iter().copied()).collect();
    b.iter().flat_map(|&c| patch.cell_edges(c).iter().copied()).filter(|e| ea.contains(e)).collect()
}

/// `|T∩T′|` in edges.
pub fn intersection_size(patch: &PatchComplex, a: &BTreeSet<CellId>, b: &BTreeSet<CellId>) -> usize {
    shared_edges(patch, a, b).len()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TileClass {
    One,
    Core,
    NonCore,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Provenance {
    Start,
    Core { older: TileId, younger: TileId },
    Small { s: TileId, s2: TileId },
    /// `r2` contains the Step-2 union being grown.
    Large { r: TileId, r2: TileId },
}

#[derive(Clone, Debug, Serialize)]
pub struct Tile {
    pub id: TileId,
    pub cells: BTreeSet<CellId>,
    pub class: TileClass,
    /// Decision index at which the tile was made; 0 for starting tiles.
    pub birth: usize,
    pub parents: Vec<TileId>,
    pub provenance: Provenance,
    pub alive: bool,
}

impl Tile {
    pub fn size(&self) -> usize {
        self.cells.len()
    }

    pub fn core_born(&self) -> bool {
        matches!(self.provenance, Provenance::Core { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Age {
    Older,
    Younger,
    Incomparable,
}

/// One gluing in the step log.
#[derive(Clone, Debug, Serialize)]
pub struct StepRecord {
    pub step: u8,
    pub decision: usize,
    pub tiles: Vec<TileId>,
    pub result: TileId,
    pub cells: Vec<CellId>,
    pub union_size: usize,
    pub intersection_size: usize,
    pub can: u64,
    pub tie_break: String,
    pub candidates: usize,
    /// Set on labeled copies glued alongside the chosen pair.
    pub copy_of: Option<TileId>,
    pub orbit_collision: bool,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct TileCollection {
    pub tiles: Vec<Tile>,
    pub log: Vec<StepRecord>,
    pub warnings: Vec<String>,
    /// Tiles alive when Step 1 stopped.
    pub after_step1: Vec<TileId>,
}

impl TileCollection {
    pub fn starting(patch: &PatchComplex) -> Self {
        let tiles = patch
            .cell_ids()
            .map(|c| Tile {
                id: TileId(c.0),
                cells: BTreeSet::from([c]),
                class: TileClass::One,
                birth: 0,
                parents: vec![],
                provenance: Provenance::Start,
                alive: true,
            })
            .collect();
        TileCollection { tiles, ..Default::default() }
    }

    pub fn tile(&self, id: TileId) -> &Tile {
        &self.tiles[id.idx()]
    }

    pub fn alive(&self) -> impl Iterator<Item = &Tile> {
        self.tiles.iter().filter(|t| t.alive)
    }

    pub fn find(&self, cells: &BTreeSet<CellId>) -> Option<&Tile> {
        self.tiles.iter().rev().find(|t| &t.cells == cells)
    }

    /// How `a` relates to `b` in age. Starting tiles are youngest; two
    /// starting tiles, or two tiles made at the same decision, are
    /// incomparable.
    pub fn age_compare(&self, a: TileId, b: TileId) -> Age {
        let (ta, tb) = (self.tile(a), self.tile(b));
        if a == b {
            return Age::Incomparable;
        }
        match (ta.birth, tb.birth) {
            (0, 0) => Age::Incomparable,
            (0, _) => Age::Younger,
            (_, 0) => Age::Older,
            (x, y) => match x.cmp(&y) {
                Ordering::Less => Age::Older,
                Ordering::Greater => Age::Younger,
                Ordering::Equal => Age::Incomparable,
            },
        }
    }

    /// `(older, younger)`; incomparable tiles are ordered by id, the higher
    /// id counting as younger.
    pub fn order_by_age(&self, a: TileId, b: TileId) -> (TileId, TileId) {
        match self.age_compare(a, b) {
            Age::Older => (a, b),
            Age::Younger => (b, a),
            Age::Incomparable => (a.min(b), a.max(b)),
        }
    }

    fn push(&mut self, cells: BTreeSet<CellId>, class: TileClass, birth: usize, provenance: Provenance) -> TileId {
        let id = TileId(self.tiles.len() as u32);
        let parents = match provenance {
            Provenance::Start => vec![],
            Provenance::Core { older, younger } => vec![older, younger],
            Provenance::Small { s, s2 } => vec![s, s2],
            Provenance::Large { r, r2 } => vec![r, r2],
        };
        self.tiles.push(Tile { id, cells, class, birth, parents, provenance, alive: true });
        id
    }

    pub fn step_log_jsonl(&self) -> String {
        self.log.iter().map(|r| serde_json::to_string(r).expect("record serializes") + "\n").collect()
    }
}

/// A merge about to happen (or just done, with `result` set).
#[derive(Clone, Debug)]
pub struct Merge {
    pub step: u8,
    pub decision: usize,
    /// Step 1: `(older, younger)`. Step 2: `(S, S′)`. Step 3: `(R, R′)`
    /// with `R′` containing the Step-2 union.
    pub first: TileId,
    pub second: TileId,
    pub result: Option<TileId>,
}

/// Callbacks around each merge; the wall construction hooks in here.
pub trait ConstructionHooks {
    fn before_merge(&mut self, _patch: &PatchComplex, _tiles: &TileCollection, _merge: &Merge) {}
    fn after_merge(&mut self, _patch: &PatchComplex, _tiles: &TileCollection, _merge: &Merge) {}
}

pub struct NoHooks;

impl ConstructionHooks for NoHooks {}

#[derive(Clone, Debug)]
struct Candidate {
    a: TileId,
    b: TileId,
    union: BTreeSet<CellId>,
    inter: usize,
    can: u64,
}

fn disjoint(a: &Tile, b: &Tile) -> bool {
    a.cells.is_disjoint(&b.cells)
}

fn candidates(
    patch: &PatchComplex,
    tc: &TileCollection,
    cfg: &TileConfig,
    accept: &dyn Fn(&Tile, &Tile, usize, &BTreeSet<CellId>) -> bool,
) -> Vec<Candidate> {
    let alive: Vec<&Tile> = tc.alive().collect();
    let mut out = Vec::new();
    for (i, a) in alive.iter().enumerate() {
        for b in &alive[i + 1..] {
            if !disjoint(a, b) || a.size() + b.size() > cfg.max_tile_size {
                continue;
            }
            let inter = intersection_size(patch, &a.cells, &b.cells);
            let union: BTreeSet<CellId> = a.cells.union(&b.cells).copied().collect();
            if inter == 0 || !accept(a, b, inter, &union) || !potile(patch, &union) {
                continue;
            }
            let can = can_of_cells(patch, &union);
            out.push(Candidate { a: a.id, b: b.id, union, inter, can });
        }
    }
    out
}

/// Sorts best-first by `key` (larger is better) then by tile ids, and names
/// the first criterion separating the winner from the runner-up.
fn rank(cands: &mut [Candidate], key: &dyn Fn(&Candidate) -> Vec<u64>, names: &[&str]) -> String {
    cands.sort_by(|x, y| key(y).cmp(&key(x)).then((x.a, x.b).cmp(&(y.a, y.b))));
    match cands {
        [] => String::new(),
        [_] => "unique".into(),
        [best, next, ..] => {
            let (kb, kn) = (key(best), key(next));
            kb.iter().zip(&kn).position(|(p, q)| p != q).map(|i| names[i].to_string()).unwrap_or_else(|| "tile_id".into())
        }
    }
}

/// Picks the best candidate and every labeled copy of it that is disjoint
/// from the picks so far.
fn with_copies(patch: &PatchComplex, tc: &TileCollection, cands: &[Candidate]) -> Vec<(Candidate, Option<TileId>)> {
    let best = cands[0].clone();
    let mut used: BTreeSet<CellId> = best.union.clone();
    let mut picks = vec![(best.clone(), None)];
    let (ba, bb) = (&tc.tile(best.a).cells, &tc.tile(best.b).cells);
    for c in &cands[1..] {
        if !c.union.is_disjoint(&used) {
            continue;
        }
        let (ca, cb) = (&tc.tile(c.a).cells, &tc.tile(c.b).cells);
        let same = c.inter == best.inter
            && c.union.len() == best.union.len()
            && (pair_isomorphic(patch, (ba, bb), (ca, cb)) || pair_isomorphic(patch, (ba, bb), (cb, ca)));
        if same {
            used.extend(c.union.iter().copied());
            picks.push((c.clone(), Some(best.a)));
        }
    }
    picks
}

#[allow(clippy::too_many_arguments)]
fn record(
    tc: &mut TileCollection,
    patch: &PatchComplex,
    step: u8,
    decision: usize,
    c: &Candidate,
    result: TileId,
    tie_break: &str,
    n: usize,
    copy_of: Option<TileId>,
    ell: usize,
) {
    let (a, b) = (&tc.tile(c.a).cells, &tc.tile(c.b).cells);
    let orbit_collision = 4 * c.inter >= ell && orbit_isomorphic(patch, a, b);
    if orbit_collision {
        tc.warnings.push(format!(
            "step {step}: {} and {} are labeled copies with a long overlap; the patch violates the isoperimetric bound",
            c.a, c.b
        ));
    }
    tc.log.push(StepRecord {
        step,
        decision,
        tiles: vec![c.a, c.b],
        result,
        cells: c.union.iter().copied().collect(),
        union_size: c.union.len(),
        intersection_size: c.inter,
        can: c.can,
        tie_break: tie_break.into(),
        candidates: n,
        copy_of,
        orbit_collision,
    });
}

/// Runs the construction to completion.
pub fn build_tile_collection(
    patch: &PatchComplex,
    cfg: &TileConfig,
    hooks: &mut dyn ConstructionHooks,
) -> Result<TileCollection> {
    if patch.n_cells() > cfg.max_patch_cells || patch.gluings().len() > cfg.max_patch_gluings {
        return Err(Error::Caps(format!(
            "{} cells / {} gluings exceeds {} / {}",
            patch.n_cells(),
            patch.gluings().len(),
            cfg.max_patch_cells,
            cfg.max_patch_gluings
        )));
    }
    let ell = patch.ell();
    let mut tc = TileCollection::starting(patch);
    let mut decision = 0;

    // Step 1.
    loop {
        let strict = cfg.core_strict;
        let mut cands = candidates(patch, &tc, cfg, &|_, _, inter, _| {
            if strict {
                4 * inter > ell
            } else {
                4 * inter >= ell
            }
        });
        if cands.is_empty() {
            break;
        }
        let tie = rank(&mut cands, &|c| vec![c.union.len() as u64, c.inter as u64], &["union_size", "intersection_size"]);
        decision += 1;
        let n = cands.len();
        for (c, copy_of) in with_copies(patch, &tc, &cands) {
            let (older, younger) = tc.order_by_age(c.a, c.b);
            let mut m = Merge { step: 1, decision, first: older, second: younger, result: None };
            hooks.before_merge(patch, &tc, &m);
            tc.tiles[c.a.idx()].alive = false;
            tc.tiles[c.b.idx()].alive = false;
            let id = tc.push(c.union.clone(), TileClass::Core, decision, Provenance::Core { older, younger });
            record(&mut tc, patch, 1, decision, &c, id, &tie, n, copy_of, ell);
            m.result = Some(id);
            hooks.after_merge(patch, &tc, &m);
        }
    }
    tc.after_step1 = tc.alive().map(|t| t.id).collect();

    // Steps 2 and 3.
    let limit = 10_000;
    loop {
        let history: BTreeSet<BTreeSet<CellId>> = tc.tiles.iter().map(|t| t.cells.clone()).collect();
        let mut cands = candidates(patch, &tc, cfg, &|_, _, _, union| !history.contains(union));
        if cands.is_empty() {
            break;
        }
        let tie = rank(&mut cands, &|c| vec![c.inter as u64], &["intersection_size"]);
        decision += 1;
        if decision > limit {
            return Err(Error::Caps(format!("construction did not stop after {limit} decisions")));
        }
        let n = cands.len();
        let mut grown: Vec<BTreeSet<CellId>> = Vec::new();
        for (c, copy_of) in with_copies(patch, &tc, &cands) {
            let mut m = Merge { step: 2, decision, first: c.a, second: c.b, result: None };
            hooks.before_merge(patch, &tc, &m);
            for t in [c.a, c.b] {
                if tc.tiles[t.idx()].size() > 1 {
                    tc.tiles[t.idx()].class = TileClass::NonCore;
                }
            }
            let id = tc.push(c.union.clone(), TileClass::NonCore, decision, Provenance::Small { s: c.a, s2: c.b });
            record(&mut tc, patch, 2, decision, &c, id, &tie, n, copy_of, ell);
            m.result = Some(id);
            hooks.after_merge(patch, &tc, &m);
            grown.push(c.union);
        }

        // Step 3, growing the unions just made.
        loop {
            let mut cands = candidates(patch, &tc, cfg, &|a, b, inter, _| {
                4 * inter >= ell && grown.iter().any(|u| u.is_subset(&a.cells) || u.is_subset(&b.cells))
            });
            if cands.is_empty() {
                break;
            }
            let tie = rank(&mut cands, &|c| vec![c.union.len() as u64, c.can], &["union_size", "can"]);
            decision += 1;
            let n = cands.len();
            for (c, copy_of) in with_copies(patch, &tc, &cands) {
                let holds = |t: TileId| grown.iter().any(|u| u.is_subset(&tc.tile(t).cells));
                let (r, r2) = if holds(c.b) { (c.a, c.b) } else { (c.b, c.a) };
                let mut m = Merge { step: 3, decision, first: r, second: r2, result: None };
                hooks.before_merge(patch, &tc, &m);
                tc.tiles[c.a.idx()].alive = false;
                tc.tiles[c.b.idx()].alive = false;
                let id = tc.push(c.union.clone(), TileClass::NonCore, decision, Provenance::Large { r, r2 });
                record(&mut tc, patch, 3, decision, &c, id, &tie, n, copy_of, ell);
                m.result = Some(id);
                hooks.after_merge(patch, &tc, &m);
            }
        }
    }
    Ok(tc)
}

//! Structural checks on a finished tile collection.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{balance, intersection_size, is_potile, Age, TileClass, TileCollection, TileConfig, TileId};
use crate::complex::{can_of_cells, CellId, PatchComplex};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CollectionViolation {
    pub item: String,
    pub tiles: Vec<TileId>,
    /// Index into the step log of the gluing that produced the offending
    /// tile, when there is one.
    pub step: Option<usize>,
    pub detail: String,
}

fn log_index(tc: &TileCollection, t: TileId) -> Option<usize> {
    tc.log.iter().position(|r| r.result == t)
}

/// First 2-cell tile formed inside `t`: the oldest core-born tile with two
/// cells contained in it.
fn first_pair(tc: &TileCollection, t: TileId) -> Option<TileId> {
    let cells = &tc.tile(t).cells;
    tc.tiles
        .iter()
        .filter(|x| x.core_born() && x.size() == 2 && x.cells.is_subset(cells))
        .min_by_key(|x| (x.birth, x.id))
        .map(|x| x.id)
}

pub fn check_collection(patch: &PatchComplex, tc: &TileCollection, cfg: &TileConfig) -> Vec<CollectionViolation> {
    let ell = patch.ell();
    let mut out = Vec::new();
    let mut flag = |item: &str, tiles: Vec<TileId>, detail: String| {
        let step = tiles.iter().filter_map(|&t| log_index(tc, t)).max();
        out.push(CollectionViolation { item: item.into(), tiles, step, detail });
    };
    let alive: Vec<_> = tc.alive().collect();

    // Cover, potile bounds and balance bounds.
    let covered: BTreeSet<CellId> = alive.iter().flat_map(|t| t.cells.iter().copied()).collect();
    if covered.len() != patch.n_cells() {
        flag("cover", vec![], format!("{} of {} cells lie in a tile", covered.len(), patch.n_cells()));
    }
    for t in &alive {
        if !is_potile(patch, &t.cells).unwrap_or(false) {
            flag("potile", vec![t.id], "tile is not a potile".into());
        }
        if t.size() > cfg.max_potile_size {
            flag("size", vec![t.id], format!("{} cells exceeds {}", t.size(), cfg.max_potile_size));
        }
        let bal = balance(patch, &t.cells);
        if 4 * bal < ell as i64 || 2 * bal > ell as i64 {
            flag("balance_bounds", vec![t.id], format!("Bal = {bal} outside [ℓ/4, ℓ/2]"));
        }
        if t.size() == 1 && t.class != TileClass::One {
            flag("classes", vec![t.id], "single cell outside the one-cell class".into());
        }
    }

    // Item 1: tiles outside the non-core class are disjoint and have no
    // proper subtiles.
    let plain: Vec<_> = alive.iter().filter(|t| t.class != TileClass::NonCore).collect();
    for (i, a) in plain.iter().enumerate() {
        for b in &plain[i + 1..] {
            if !a.cells.is_disjoint(&b.cells) {
                flag("item1_disjoint", vec![a.id, b.id], "tiles share 2-cells".into());
            }
        }
        for s in &alive {
            if s.id != a.id && s.cells.len() < a.cells.len() && s.cells.is_subset(&a.cells) {
                flag("item1_subtile", vec![a.id, s.id], "tile has a proper subtile".into());
            }
        }
    }

    // Item 2: every non-core tile contains a tile made in Step 1.
    for t in alive.iter().filter(|t| t.class == TileClass::NonCore) {
        let ok = tc.tiles.iter().any(|x| x.core_born() && x.cells.is_subset(&t.cells));
        if !ok {
            flag("item2", vec![t.id], "non-core tile contains no core tile".into());
        }
    }

    // Item 3: overlaps and differences of overlapping tiles are unions of
    // tiles.
    let all: Vec<&BTreeSet<CellId>> = tc.tiles.iter().map(|t| &t.cells).collect();
    let is_union_of_tiles =
        |x: &BTreeSet<CellId>| all.iter().filter(|t| t.is_subset(x)).flat_map(|t| t.iter()).collect::<BTreeSet<_>>().len() == x.len();
    for (i, a) in alive.iter().enumerate() {
        for b in &alive[i + 1..] {
            if a.cells.is_disjoint(&b.cells) {
                continue;
            }
            let inter: BTreeSet<CellId> = a.cells.intersection(&b.cells).copied().collect();
            let diff: BTreeSet<CellId> = a.cells.difference(&b.cells).copied().collect();
            if !is_union_of_tiles(&inter) || (!diff.is_empty() && !is_union_of_tiles(&diff)) {
                flag("item3", vec![a.id, b.id], "overlap pieces are not unions of tiles".into());
            }
        }
    }

    // Core tiles: younger cells meet older tiles in short paths, and the
    // first pair of an older small tile cancels at least as much.
    let core: Vec<_> = tc.tiles.iter().filter(|t| t.core_born()).collect();
    for a in &core {
        for b in &core {
            if a.id == b.id || !a.cells.is_disjoint(&b.cells) || tc.age_compare(a.id, b.id) != Age::Older {
                continue;
            }
            for &c in &b.cells {
                let inter = intersection_size(patch, &a.cells, &BTreeSet::from([c]));
                if 4 * inter >= ell {
                    flag("small_intersections", vec![a.id, b.id], format!("|T∩{c}| = {inter} ≥ ℓ/4"));
                }
            }
            if a.size() <= 3 && b.size() <= 3 {
                if let (Some(d), Some(d2)) = (first_pair(tc, a.id), first_pair(tc, b.id)) {
                    let (x, y) = (can_of_cells(patch, &tc.tile(d).cells), can_of_cells(patch, &tc.tile(d2).cells));
                    if x < y {
                        flag("subtile_age", vec![a.id, b.id], format!("Can(D) = {x} < Can(D′) = {y}"));
                    }
                }
            }
        }
    }

    // Step 1 stopped at a fixed point.
    let after: Vec<_> = tc.after_step1.iter().map(|&t| tc.tile(t)).collect();
    for (i, a) in after.iter().enumerate() {
        for b in &after[i + 1..] {
            if a.cells.is_disjoint(&b.cells) && a.size() + b.size() <= cfg.max_tile_size {
                let inter = intersection_size(patch, &a.cells, &b.cells);
                let open = if cfg.core_strict { 4 * inter > ell } else { 4 * inter >= ell };
                if open {
                    flag("step1_fixed_point", vec![a.id, b.id], format!("|T∩T′| = {inter} after Step 1"));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use super::*;
    use crate::sampler::build_fixture;

    fn cfg() -> TileConfig {
        TileConfig::new(Q::new(3, 14), Q::new(1, 100)).unwrap()
    }

    #[test]
    fn fixtures_give_clean_collections() {
        for name in ["single", "two_cell_tile", "balancing2tile", "exampletile", "life_of_a_tile", "shards", "wallcases"] {
            let f = build_fixture(name, None).unwrap();
            let c = TileConfig::new(f.d, f.eps).unwrap();
            let tc = build_tile_collection(&f.patch, &c, &mut NoHooks).unwrap();
            assert_eq!(check_collection(&f.patch, &tc, &c), vec![], "{name}");
        }
    }

    #[test]
    fn nested_core_tiles_violate_item1() {
        let f = build_fixture("two_cell_tile", Some(20)).unwrap();
        let mut tc = build_tile_collection(&f.patch, &cfg(), &mut NoHooks).unwrap();
        tc.tiles[0].alive = true;
        let v = check_collection(&f.patch, &tc, &cfg());
        assert!(v.iter().any(|x| x.item == "item1_subtile"));
    }

    #[test]
    fn long_cell_overlap_with_older_core_is_flagged() {
        // C1 meets C2 in ℓ/4 edges, so a younger core tile holding C1 breaks
        // the short-intersection property against an older one holding C2.
        let g = build_fixture("wallcases", None).unwrap();
        let mut tc = TileCollection::starting(&g.patch);
        let t: BTreeSet<CellId> = [g.cell("C2"), g.cell("C3")].into();
        let u: BTreeSet<CellId> = [g.cell("C1"), g.cell("X")].into();
        tc.push(t, TileClass::Core, 1, Provenance::Core { older: TileId(1), younger: TileId(2) });
        tc.push(u, TileClass::Core, 2, Provenance::Core { older: TileId(0), younger: TileId(3) });
        let v = check_collection(&g.patch, &tc, &cfg());
        assert!(v.iter().any(|x| x.item == "small_intersections"), "{v:?}");
    }
}

use super::*;
use crate::sampler::{build_fixture, Fixture};
use crate::tiles::{balance, build_tile_collection, Provenance, TileConfig};

const FIXTURES: [&str; 7] =
    ["two_cell_tile", "balancing2tile", "mp_example", "exampletile", "life_of_a_tile", "shards", "wallcases"];

fn run(name: &str, config: WallConfig) -> (Fixture, TileCollection, WallState) {
    let f = build_fixture(name, None).unwrap();
    let cfg = TileConfig::new(f.d, f.eps).unwrap();
    let mut w = WallState::new(&f.patch, config);
    let tc = build_tile_collection(&f.patch, &cfg, &mut w).unwrap();
    (f, tc, w)
}

fn tile_of(f: &Fixture, tc: &TileCollection, names: &[&str]) -> TileId {
    let cells: BTreeSet<CellId> = names.iter().map(|n| f.cell(n)).collect();
    tc.find(&cells).unwrap_or_else(|| panic!("no tile {names:?}")).id
}

#[test]
fn antipodal_pairs_every_slot() {
    let m = antipodal_walls(8);
    assert_eq!(m, vec![4, 5, 6, 7, 0, 1, 2, 3]);
    assert!(m.iter().enumerate().all(|(i, &j)| m[j] == i));
    let g = TileWallGraph::new(&crate::complex::test_support::patch(8, 1, &[]), &BTreeSet::from([CellId(0)]), &[m]);
    assert_eq!(g.components.len(), 4);
}

#[test]
fn one_tile_walls_are_balanced_with_equality() {
    let f = build_fixture("single", Some(20)).unwrap();
    let tc = TileCollection::starting(&f.patch);
    let w = WallState::new(&f.patch, WallConfig::default());
    let r = verify_balanced(&f.patch, &tc, &w, TileId(0), None);
    assert_eq!(r.paths_checked, 10);
    assert!(r.is_clean());
    assert_eq!(balance(&f.patch, &tc.tile(TileId(0)).cells), 10);
    let mut cache = DistCache::default();
    for l in &w.tile_graph(&f.patch, &tc.tile(TileId(0)).cells).links {
        assert_eq!(cache.mid(&f.patch, &tc.tile(TileId(0)).cells, l.ea, l.eb), Some(20));
    }
}

#[test]
fn balance_of_small_tiles() {
    use crate::complex::test_support::patch;
    let ell = 40;
    let p = patch(ell, 2, &[(0, 0, 1, 0, 16)]);
    assert_eq!(balance(&p, &BTreeSet::from([CellId(0)])), 20);
    assert_eq!(balance(&p, &[CellId(0), CellId(1)].into()), 30 - 16);
    let q = patch(ell, 2, &[(0, 0, 1, 0, 8)]);
    assert_eq!(balance(&q, &[CellId(0), CellId(1)].into()), 22);
}

#[test]
fn round_intersection_leaves_walls_antipodal() {
    let (f, tc, w) = run("two_cell_tile", WallConfig::default());
    assert!(w.bends.is_empty());
    assert!(w.matchings().iter().all(|m| *m == antipodal_walls(f.patch.ell())));
    let mut w2 = WallState::new(&f.patch, WallConfig::default());
    let t = tc.log[0].tiles.clone();
    let err = w2.bend_and_glue(&f.patch, &tc, t[0], t[1], GlueStep::Step1b, 1);
    assert!(matches!(err, Err(Error::RoundTree)));
    assert_eq!(w2.bend_and_glue(&f.patch, &tc, t[0], t[1], GlueStep::Step1a, 1).unwrap(), vec![]);
}

#[test]
fn balancing_two_cells_bends_the_younger_cell() {
    let (f, tc, w) = run("balancing2tile", WallConfig::default());
    assert!(!w.bends.is_empty());
    let younger = tc.tile(TileId(2)).provenance;
    let Provenance::Core { younger, .. } = younger else { panic!("core tile expected") };
    assert!(w.bends.iter().all(|b| tc.tile(younger).cells.contains(&b.cell)));
    assert!(w.reports.iter().all(|r| r.is_clean()));
    // Walls through a shared midpoint outside α± join points ℓ/2 apart.
    let ctx = w.clone().step1_context(&f.patch, &tc, 1, TileId(0), TileId(1));
    let alpha = ctx.alpha_edges();
    let cells = tc.tile(TileId(2)).cells.clone();
    let (paths, _) = w.tile_graph(&f.patch, &cells).paths(1000);
    let mut cache = DistCache::default();
    let mut seen = 0;
    for p in paths.iter().filter(|p| p.links.len() == 2) {
        let y = p.midpoints[1];
        if ctx.shared.contains(&y) && !alpha.contains(&y) && p.cells().len() == 2 {
            let (x, x2) = p.ends();
            assert!(cache.mid(&f.patch, &cells, x, x2).unwrap() >= f.ell as u32 / 2 * 2);
            seen += 1;
        }
    }
    assert!(seen > 0);
}

#[test]
fn bending_is_an_involution() {
    let (f, _, w) = run("balancing2tile", WallConfig::default());
    let mut undone = w.clone();
    undone.unbend(&f.patch, &w.bends);
    assert!(undone.matchings().iter().all(|m| *m == antipodal_walls(f.patch.ell())));
    let (f, _, w) = run("life_of_a_tile", WallConfig::default());
    let mut undone = w.clone();
    undone.unbend(&f.patch, &w.bends);
    assert!(undone.matchings().iter().all(|m| *m == antipodal_walls(f.patch.ell())));
}

#[test]
fn unbent_mp_example_is_not_a_tile_wall() {
    let (f, tc, w) = run("mp_example", WallConfig { bending: false, ..Default::default() });
    let abc = tile_of(&f, &tc, &["A", "B", "C"]);
    let r = w.reports.iter().find(|r| r.tile == abc).unwrap();
    assert!(r.violations.iter().any(|v| v.vertices_in_cell == 4));
    assert!(w.reports.iter().any(|r| !r.failures.is_empty()));

    let (_, _, bent) = run("mp_example", WallConfig::default());
    assert!(!bent.bends.is_empty());
    assert!(bent.reports.iter().all(|r| r.is_clean()), "{:?}", bent.reports);
}

#[test]
fn every_fixture_ends_balanced_with_no_lemma_violation() {
    for name in FIXTURES {
        let (_, _, w) = run(name, WallConfig::default());
        assert!(w.reports.iter().all(|r| r.is_clean()), "{name}: {:?}", w.reports);
        assert_eq!(w.lemmas.violations(), 0, "{name}: {}", w.lemmas.summary());
        assert!(w.warnings.is_empty(), "{name}: {:?}", w.warnings);
    }
}

#[test]
fn wallcases_fixture_shows_the_labeled_cases() {
    let (f, tc, w) = run("wallcases", WallConfig::default());
    let big = tile_of(&f, &tc, &["X", "Y", "C1", "C2", "C3"]);
    let cases: BTreeSet<WallCase> = w.cases.iter().filter(|c| c.tile == big).map(|c| c.case).collect();
    for c in [WallCase::C1, WallCase::C2b, WallCase::C3a] {
        assert!(cases.contains(&c), "{c} missing from {cases:?}");
    }
    assert!(cases.contains(&WallCase::C4a) || cases.contains(&WallCase::C4b));
}

#[test]
fn case_split_by_definition() {
    let (f, tc, w) = run("balancing2tile", WallConfig::default());
    let ctx = w.clone().step1_context(&f.patch, &tc, 1, TileId(0), TileId(1));
    let alpha = ctx.alpha_edges();
    let (t, t2) = (tc.tile(TileId(0)).cells.clone(), tc.tile(TileId(1)).cells.clone());
    let (paths, _) = w.tile_graph(&f.patch, &tc.tile(TileId(2)).cells).paths(1000);
    for p in &paths {
        let case = classify_wall_case(p, &t, &t2, &ctx.shared, &alpha);
        let touches = p.midpoints.iter().any(|e| ctx.shared.contains(e));
        if !touches && p.cells().len() == 1 {
            assert_eq!(case, WallCase::C1);
        }
        if p.links.len() == 2 && p.cells().len() == 2 && alpha.contains(&p.midpoints[1]) {
            assert_eq!(case, WallCase::C4a);
        }
    }
}

#[test]
fn shards_follow_the_recursion() {
    let (f, tc, _) = run("shards", WallConfig::default());
    let t = tile_of(&f, &tc, &["A", "B", "C"]);
    let ab = tile_of(&f, &tc, &["A", "B"]);
    let one = |n: &str| BTreeSet::from([f.cell(n)]);
    assert_eq!(shard_of(&f.patch, &tc, t, &one("A")).unwrap(), ab);
    assert_eq!(shard_of(&f.patch, &tc, t, &[f.cell("B"), f.cell("C")].into()).unwrap(), t);
    // Bal(C) = ℓ/2 is not below Bal(T), so the definition gives T here.
    assert_eq!(shard_of(&f.patch, &tc, t, &one("C")).unwrap(), t);
    assert_eq!(shard_of(&f.patch, &tc, TileId(0), &one("A")).unwrap(), TileId(0));
    assert!(shard_of(&f.patch, &tc, ab, &one("C")).is_err());
}

#[test]
fn step3_shards_are_inherited() {
    let (f, tc, _) = run("life_of_a_tile", WallConfig::default());
    let all = tile_of(&f, &tc, &["A", "B", "C", "D", "E"]);
    let abc = tile_of(&f, &tc, &["A", "B", "C"]);
    let a = BTreeSet::from([f.cell("A")]);
    assert!(matches!(tc.tile(all).provenance, Provenance::Large { r2, .. } if r2 == abc));
    assert_eq!(shard_of(&f.patch, &tc, all, &a).unwrap(), shard_of(&f.patch, &tc, abc, &a).unwrap());
    assert_eq!(shard_of(&f.patch, &tc, all, &BTreeSet::from([f.cell("D")])).unwrap(), all);
}

#[test]
fn bend_log_lines_have_the_documented_keys() {
    let (_, _, w) = run("balancing2tile", WallConfig::default());
    let line = w.bend_log_jsonl().lines().next().unwrap().to_string();
    let v: serde_json::Value = serde_json::from_str(&line).unwrap();
    for k in ["gluing_step", "cell", "alpha_side", "from_midpoint", "to_midpoint"] {
        assert!(v.get(k).is_some(), "{k}");
    }
    assert!(["+", "-"].contains(&v["alpha_side"].as_str().unwrap()));
}

#[test]
fn export_lists_each_wall_once() {
    let (f, tc, w) = run("two_cell_tile", WallConfig::default());
    let g = w.tile_graph(&f.patch, &tc.tile(TileId(2)).cells);
    let walls = g.export();
    let total: usize = walls.iter().map(|x| x.midpoints.len()).sum();
    assert_eq!(total, f.patch.n_edges());
    assert!(walls.iter().all(|x| x.midpoints.len() == x.links.len() + 1));
}

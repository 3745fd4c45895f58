use std::collections::BTreeSet;

use super::*;
use crate::complex::{check_admissible, AdmissibilityCheck};
use crate::rational::{format_q, lambda};
use crate::sampler::{build_fixture, Fixture};
use crate::tiles::{balance, build_tile_collection, TileCollection, TileConfig, TileId};
use crate::walls::{DistCache, WallConfig};

const N_RET: usize = 21;

const ADMISSIBLE: [&str; 7] =
    ["two_cell_tile", "balancing2tile", "exampletile", "life_of_a_tile", "shards", "wallcases", "single"];

fn run(name: &str, ell: Option<usize>) -> (Fixture, TileCollection, WallState) {
    let f = build_fixture(name, ell).unwrap();
    let cfg = TileConfig::new(f.d, f.eps).unwrap();
    let mut w = WallState::new(&f.patch, WallConfig::default());
    let tc = build_tile_collection(&f.patch, &cfg, &mut w).unwrap();
    (f, tc, w)
}

#[test]
fn single_cell_walls_split_the_boundary_in_half() {
    let (f, _, w) = run("single", Some(8));
    let traces = trace_walls(&f.patch, &w);
    assert_eq!(traces.len(), 4);
    let ws = export_wallspace(&f.patch, &traces, lambda(&f.d).unwrap(), 21).unwrap();
    for wall in &ws.walls {
        assert!(wall.two_sided && wall.separating_at_patch_scale);
        let zeros = wall.sides.values().filter(|&&s| s == 0).count();
        assert_eq!((zeros, wall.sides.len()), (4, 8));
    }
}

#[test]
fn one_edge_wall_is_embedded() {
    let (f, _, w) = run("single", Some(8));
    let t = &trace_walls(&f.patch, &w)[0];
    assert_eq!(t.links.len(), 1);
    assert_eq!(check_embedded(t), Embedding::Embedded);
}

#[test]
fn component_count_is_forest_accounting() {
    for name in ADMISSIBLE {
        let (f, _, w) = run(name, None);
        let g = global_graph(&f.patch, &w);
        let concatenations: usize =
            (0..f.patch.n_edges()).map(|e| EdgeId(e as u32)).map(|e| g.links_at(e).count().saturating_sub(1)).sum();
        assert_eq!(trace_walls(&f.patch, &w).len(), g.links.len() - concatenations, "{name}");
    }
}

#[test]
fn walls_crossing_the_gluing_are_two_edge_paths() {
    let (f, tc, w) = run("balancing2tile", None);
    let edges = |t: TileId| -> BTreeSet<EdgeId> {
        tc.tile(t).cells.iter().flat_map(|&c| f.patch.cell_edges(c).iter().copied()).collect()
    };
    let shared: BTreeSet<EdgeId> = edges(TileId(0)).intersection(&edges(TileId(1))).copied().collect();
    let crossing: Vec<_> =
        trace_walls(&f.patch, &w).into_iter().filter(|t| t.midpoints.iter().any(|e| shared.contains(e))).collect();
    assert_eq!(crossing.len(), shared.len());
    assert!(crossing.iter().all(|t| t.links.len() == 2));
}

#[test]
fn admissible_fixtures_are_embedded_without_returns() {
    for name in ADMISSIBLE {
        let (f, tc, w) = run(name, None);
        let traces = trace_walls(&f.patch, &w);
        assert!(traces.iter().all(|t| check_embedded(t).is_embedded()), "{name}");
        let r = detect_returning(&f.patch, &tc, &global_graph(&f.patch, &w), N_RET, 100_000);
        assert!(!r.truncated && r.hits.is_empty(), "{name}: {:?}", r.hits);
        let ws = export_wallspace(&f.patch, &traces, lambda(&f.d).unwrap(), N_RET).unwrap();
        assert!(ws.walls.iter().all(|x| x.two_sided), "{name}");
    }
}

#[test]
fn path_inside_one_tile_has_one_factor() {
    let (f, tc, w) = run("two_cell_tile", None);
    let (paths, _) = global_graph(&f.patch, &w).paths(10_000);
    for p in &paths {
        let d = decompose(&f.patch, &tc, p);
        assert_eq!(d.len(), 1);
        assert!(d.reduced);
        assert_eq!(d.fractured.as_ref().map(Vec::len), Some(1));
    }
}

#[test]
fn path_across_disjoint_tiles_is_already_fractured() {
    let (f, tc, w) = run("returning_negative", None);
    let (paths, _) = global_graph(&f.patch, &w).paths(10_000);
    let mut seen = 0;
    for p in paths.iter().filter(|p| p.cells().len() == p.links.len()) {
        let d = decompose(&f.patch, &tc, p);
        assert_eq!(d.len(), p.links.len());
        let tiles: Vec<TileId> = d.factors.iter().map(|x| x.tile).collect();
        let frac: Vec<TileId> = d.fractured.unwrap().iter().map(|x| x.tile).collect();
        assert_eq!(tiles, frac);
        seen += 1;
    }
    assert!(seen > 0);
}

#[test]
fn fractured_factors_are_balanced() {
    for name in ["life_of_a_tile", "shards", "wallcases"] {
        let (f, tc, w) = run(name, None);
        let (paths, _) = global_graph(&f.patch, &w).paths(100_000);
        let mut cache = DistCache::default();
        for p in &paths {
            let frac = decompose(&f.patch, &tc, p).fractured.expect("a fractured refinement exists");
            for x in &frac {
                let cells = &tc.tile(x.tile).cells;
                let (a, b) = (x.midpoints[0], *x.midpoints.last().unwrap());
                let half = cache.mid(&f.patch, cells, a, b).unwrap() as i64;
                assert!(half >= 2 * balance(&f.patch, cells), "{name} {:?}", x.midpoints);
            }
            for (i, x) in frac.iter().enumerate() {
                for y in &frac[i + 1..] {
                    assert!(tc.tile(x.tile).cells.is_disjoint(&tc.tile(y.tile).cells));
                }
            }
        }
    }
}

#[test]
fn returning_configuration_is_caught_and_cross_referenced() {
    let (f, tc, w) = run("returning_negative", None);
    let traces = trace_walls(&f.patch, &w);
    let bad: Vec<Embedding> = traces.iter().map(check_embedded).filter(|e| !e.is_embedded()).collect();
    assert!(matches!(bad.as_slice(), [Embedding::SelfIntersection { cell, .. }] if *cell == f.cell("A")));
    assert!(matches!(export_wallspace(&f.patch, &traces, lambda(&f.d).unwrap(), 21), Err(Error::NotEmbedded(_))));

    let mut r = detect_returning(&f.patch, &tc, &global_graph(&f.patch, &w), N_RET, 10_000);
    assert!(!r.hits.is_empty());
    let a = tc.alive().find(|t| t.cells == BTreeSet::from([f.cell("A")])).unwrap().id;
    assert!(r.hits.iter().all(|h| h.t0 == a && h.factors.len() >= 2));
    assert!(r.hits.iter().all(|h| h.e_count == 0 && h.y_size <= 6 && 2 * h.alpha0 as usize <= f.ell));
    assert!(!r.consistent());
    let adm = check_admissible(&f.patch, None, &AdmissibilityCheck { d: f.d, eps: f.eps, max_subset: 6 });
    r.cross_reference(&adm);
    assert!(r.consistent());
    assert!(r.admissibility.unwrap().contains("short_cycles=1"));
}

#[test]
fn wallspace_json_round_trips() {
    let (f, _, w) = run("two_cell_tile", None);
    let ws = export_wallspace(&f.patch, &trace_walls(&f.patch, &w), lambda(&f.d).unwrap(), N_RET).unwrap();
    let v: serde_json::Value = serde_json::from_str(&ws.to_json()).unwrap();
    assert_eq!(v["lambda"].as_str().unwrap(), format_q(&lambda(&f.d).unwrap()));
    assert_eq!(v["n_ret"], 21);
    for k in ["id", "midpoints", "sides", "separating_at_patch_scale"] {
        assert!(v["walls"][0].get(k).is_some(), "{k}");
    }
    let back: Wallspace = serde_json::from_str(&ws.to_json()).unwrap();
    assert_eq!(back.walls.len(), ws.walls.len());
    assert_eq!(back.lambda, ws.lambda);
}

//! Per-lemma sweeps over a corpus of finished runs.
//!
//! Cancellation, balance, potiles and intersections are recomputed here
//! from the raw cell boundaries. The main-path `balance` and `is_potile`
//! are compared against them on every subset.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::Instant;

use super::distance::{oracle_distance, random_subcomplex, DISTANCE_CAP};
use super::{OracleResult, Witness};
use crate::complex::{skeleton_distance, CellId, EdgeId, PatchComplex, VertexId};
use crate::pipeline::Run;
use crate::seed::stream;
use crate::tiles::{balance, is_potile, Age};
use crate::tracer::check_embedded;
use crate::walls::{shard_of, DistCache};

/// Suites run by [`oracle_lemma_sweep`], in report order. Construction-time
/// tallies (`4.5`, `4.6`, `4.7`, `4.8`, `roundtrees`, `balanceandD'`) are
/// appended after these, and `4.4` absorbs its construction-time tally.
pub const SWEEP_LEMMAS: [&str; 9] = [
    "distance",
    "balancebounds",
    "trees",
    "balancemotivation",
    "4.4",
    "smallintersections",
    "balancingwalls",
    "embedded",
    "returning",
];

pub struct CorpusEntry {
    pub name: String,
    pub run: Run,
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    /// Only these suites; all when `None`.
    pub lemmas: Option<BTreeSet<String>>,
    /// Random subcomplexes per patch for the distance comparison.
    pub distance_samples: usize,
    pub seed: u64,
    pub path_limit: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { lemmas: None, distance_samples: 4, seed: 0, path_limit: 20_000 }
    }
}

impl SweepConfig {
    fn wants(&self, lemma: &str) -> bool {
        self.lemmas.as_ref().is_none_or(|l| l.contains(lemma))
    }
}

/// Boundary data of one patch, read straight from the cell edge lists.
struct Raw<'a> {
    patch: &'a PatchComplex,
    edges: Vec<BTreeSet<EdgeId>>,
    vertices: Vec<BTreeSet<VertexId>>,
}

impl<'a> Raw<'a> {
    fn new(patch: &'a PatchComplex) -> Self {
        let edges: Vec<BTreeSet<EdgeId>> = patch.cell_ids().map(|c| patch.cell_edges(c).iter().copied().collect()).collect();
        let vertices = edges
            .iter()
            .map(|es| es.iter().flat_map(|&e| <[VertexId; 2]>::from(patch.edge_ends(e))).collect())
            .collect();
        Raw { patch, edges, vertices }
    }

    fn quarter(&self) -> i64 {
        self.patch.ell() as i64 / 4
    }

    fn can(&self, cells: &BTreeSet<CellId>) -> i64 {
        let mut deg: HashMap<EdgeId, i64> = HashMap::new();
        for c in cells {
            for &e in &self.edges[c.idx()] {
                *deg.entry(e).or_default() += 1;
            }
        }
        deg.values().map(|d| d - 1).sum()
    }

    fn bal(&self, cells: &BTreeSet<CellId>) -> i64 {
        self.quarter() * (cells.len() as i64 + 1) - self.can(cells)
    }

    fn connected(&self, cells: &BTreeSet<CellId>) -> bool {
        let list: Vec<CellId> = cells.iter().copied().collect();
        let Some(&first) = list.first() else { return false };
        let mut reached = BTreeSet::from([first]);
        let mut stack = vec![first];
        while let Some(c) = stack.pop() {
            for &d in &list {
                if !reached.contains(&d) && !self.vertices[c.idx()].is_disjoint(&self.vertices[d.idx()]) {
                    reached.insert(d);
                    stack.push(d);
                }
            }
        }
        reached.len() == list.len()
    }

    fn potile(&self, cells: &BTreeSet<CellId>) -> bool {
        self.connected(cells) && self.can(cells) >= self.quarter() * (cells.len() as i64 - 1)
    }

    fn all_edges(&self, cells: &BTreeSet<CellId>) -> BTreeSet<EdgeId> {
        cells.iter().flat_map(|c| self.edges[c.idx()].iter().copied()).collect()
    }

    fn all_vertices(&self, cells: &BTreeSet<CellId>) -> BTreeSet<VertexId> {
        cells.iter().flat_map(|c| self.vertices[c.idx()].iter().copied()).collect()
    }

    /// Connected cell sets of at most `max` cells.
    fn connected_subsets(&self, max: usize) -> Vec<BTreeSet<CellId>> {
        let n = self.patch.n_cells();
        assert!(n <= 20, "subset enumeration is exponential in the cell count");
        (1u32..1 << n)
            .filter(|m| m.count_ones() as usize <= max)
            .map(|m| (0..n as u32).filter(|i| m >> i & 1 == 1).map(CellId).collect::<BTreeSet<_>>())
            .filter(|s| self.connected(s))
            .collect()
    }
}

/// Intersection of two closures is a nonempty tree: `|V| = |E| + 1` and
/// connected.
fn tree_like(patch: &PatchComplex, v: &BTreeSet<VertexId>, e: &BTreeSet<EdgeId>) -> bool {
    if v.len() != e.len() + 1 {
        return false;
    }
    let Some(&first) = v.first() else { return false };
    let mut reached = BTreeSet::from([first]);
    let mut grew = true;
    while grew {
        grew = false;
        for &x in e {
            let (a, b) = patch.edge_ends(x);
            if reached.contains(&a) != reached.contains(&b) {
                reached.extend([a, b]);
                grew = true;
            }
        }
    }
    reached.len() == v.len()
}

fn show(cells: &BTreeSet<CellId>) -> String {
    let v: Vec<String> = cells.iter().map(|c| c.0.to_string()).collect();
    format!("{{{}}}", v.join(","))
}

/// Runs the selected suites over every corpus entry. A violation is
/// flagged `admissible` when its patch passed the admissibility filter.
pub fn oracle_lemma_sweep(corpus: &[CorpusEntry], cfg: &SweepConfig) -> Vec<OracleResult> {
    let mut results: BTreeMap<String, OracleResult> = BTreeMap::new();
    let mut clock: BTreeMap<String, u128> = BTreeMap::new();
    let mut rng = stream(cfg.seed, "oracle-sweep");
    for entry in corpus {
        let run = &entry.run;
        let patch = &run.patch;
        let raw = Raw::new(patch);
        let ok_patch = run.admissibility.admissible();
        let max = run.config.tiles.max_potile_size.max(2);
        let mut timed = |name: &str, f: &mut dyn FnMut(&mut OracleResult)| {
            if !cfg.wants(name) {
                return;
            }
            let start = Instant::now();
            f(results.entry(name.into()).or_insert_with(|| OracleResult::new(name)));
            *clock.entry(name.into()).or_default() += start.elapsed().as_millis();
        };
        let tag = |what: String| format!("{}: {what}", entry.name);

        timed("distance", &mut |r| {
            if patch.n_edges() > DISTANCE_CAP {
                r.skipped += cfg.distance_samples;
                return;
            }
            for _ in 0..cfg.distance_samples {
                let (sub, x, y) = random_subcomplex(patch, &mut rng);
                let want = oracle_distance(patch, &sub, x, y).expect("points are in the subcomplex");
                let got = skeleton_distance(patch, x, y, &sub).expect("points are in the subcomplex");
                r.record(want == got, || tag(format!("{x} to {y}")), || format!("oracle {want:?}, metric {got:?}"), ok_patch);
            }
        });

        let subsets = raw.connected_subsets(max);
        let potiles: Vec<&BTreeSet<CellId>> = subsets.iter().filter(|s| raw.potile(s)).collect();

        timed("balancebounds", &mut |r| {
            let q = raw.quarter();
            for s in &subsets {
                let (b, p) = (raw.bal(s), raw.potile(s));
                let in_range = if p { q <= b && b <= 2 * q } else { b > 2 * q };
                let agree = b == balance(patch, s) && is_potile(patch, s).ok() == Some(p);
                r.record(
                    in_range && agree,
                    || tag(show(s)),
                    || format!("Bal {b}, potile {p}, main path Bal {} potile {:?}", balance(patch, s), is_potile(patch, s).ok()),
                    ok_patch,
                );
            }
        });

        let pairs: Vec<(&BTreeSet<CellId>, &BTreeSet<CellId>)> = potiles
            .iter()
            .enumerate()
            .flat_map(|(i, &a)| potiles[i + 1..].iter().map(move |&b| (a, b)))
            .filter(|(a, b)| a.is_disjoint(b))
            .collect();

        timed("trees", &mut |r| {
            for &(a, b) in &pairs {
                let v: BTreeSet<VertexId> = raw.all_vertices(a).intersection(&raw.all_vertices(b)).copied().collect();
                if v.is_empty() {
                    r.skipped += 1;
                    continue;
                }
                let e: BTreeSet<EdgeId> = raw.all_edges(a).intersection(&raw.all_edges(b)).copied().collect();
                let ok = tree_like(patch, &v, &e) && 2 * e.len() <= patch.ell();
                r.record(ok, || tag(format!("{} ∩ {}", show(a), show(b))), || format!("{} vertices, {} edges", v.len(), e.len()), ok_patch);
            }
        });

        timed("balancemotivation", &mut |r| {
            for &(a, b) in &pairs {
                let e = raw.all_edges(a).intersection(&raw.all_edges(b)).count() as i64;
                let bound = raw.bal(a).min(raw.bal(b));
                r.record(e <= bound, || tag(format!("{} ∩ {}", show(a), show(b))), || format!("|T∩T′| = {e} > {bound}"), ok_patch);
            }
        });

        timed("4.4", &mut |r| {
            let mut cache = DistCache::default();
            for s in &run.tiles.tiles {
                let (paths, truncated) = run.walls.tile_graph(patch, &s.cells).paths(cfg.path_limit);
                if truncated {
                    r.skipped += 1;
                }
                for p in &paths {
                    let shard = shard_of(patch, &run.tiles, s.id, &p.cells()).expect("path lies in its tile");
                    let t = &run.tiles.tile(shard).cells;
                    let (x, y) = p.ends();
                    let half = cache.mid(patch, &s.cells, x, y).expect("tiles are connected") as i64;
                    if half < 2 * raw.bal(t) {
                        r.skipped += 1;
                        continue;
                    }
                    for &t2 in potiles.iter().filter(|t2| t2.is_disjoint(t)) {
                        let e2 = raw.all_edges(t2);
                        r.record(
                            !(e2.contains(&x) && e2.contains(&y)),
                            || tag(format!("wall {:?} of tile {} against {}", p.midpoints, s.id.0, show(t2))),
                            || "both endpoints lie in the potile".into(),
                            ok_patch,
                        );
                    }
                }
            }
        });

        timed("smallintersections", &mut |r| {
            let alive: Vec<_> = run.tiles.alive().collect();
            for t in &alive {
                for t2 in &alive {
                    if run.tiles.age_compare(t2.id, t.id) != Age::Younger || !t.cells.is_disjoint(&t2.cells) {
                        continue;
                    }
                    let et = raw.all_edges(&t.cells);
                    for c in &t2.cells {
                        let k = raw.edges[c.idx()].intersection(&et).count();
                        r.record(
                            4 * k < patch.ell(),
                            || tag(format!("tile {} and cell {} of younger tile {}", t.id.0, c.0, t2.id.0)),
                            || format!("|T∩C| = {k}"),
                            ok_patch,
                        );
                    }
                }
            }
        });

        timed("balancingwalls", &mut |r| {
            for rep in &run.walls.reports {
                r.checked += rep.paths_checked;
                if rep.truncated {
                    r.skipped += 1;
                }
                for f in &rep.failures {
                    r.violations.push(Witness {
                        instance: tag(format!("tile {} wall {:?}", f.tile.0, f.midpoints)),
                        detail: format!("distance {} < Bal {} of shard {}", f.distance, f.required, f.shard.0),
                        admissible: ok_patch,
                    });
                }
                for v in &rep.violations {
                    r.violations.push(Witness {
                        instance: tag(format!("tile {} cell {}", rep.tile.0, v.cell.0)),
                        detail: v.detail.clone(),
                        admissible: ok_patch,
                    });
                }
            }
        });

        timed("embedded", &mut |r| {
            for t in &run.traces {
                let e = check_embedded(t);
                r.record(e.is_embedded(), || tag(format!("wall {}", t.id)), || format!("{e:?}"), ok_patch);
            }
        });

        timed("returning", &mut |r| {
            r.checked += run.returning.segments_checked;
            if run.returning.truncated {
                r.skipped += 1;
            }
            for h in &run.returning.hits {
                r.violations.push(Witness {
                    instance: tag(format!("segment {:?} at tile {}", h.midpoints, h.t0.0)),
                    detail: format!("|Y| = {}, α₀ = {}, {}", h.y_size, h.alpha0, run.admissibility.summary()),
                    admissible: ok_patch,
                });
            }
        });

        for (name, t) in &run.walls.lemmas.lemmas {
            timed(name, &mut |r| {
                r.checked += t.checked;
                r.skipped += t.skipped;
                for v in &t.violations {
                    r.violations.push(Witness { instance: tag(name.clone()), detail: v.clone(), admissible: ok_patch });
                }
            });
        }
    }
    let rank = |n: &str| SWEEP_LEMMAS.iter().position(|&l| l == n).unwrap_or(SWEEP_LEMMAS.len());
    let mut out: Vec<OracleResult> = results.into_values().collect();
    out.sort_by(|a, b| (rank(&a.lemma), &a.lemma).cmp(&(rank(&b.lemma), &b.lemma)));
    for r in &mut out {
        r.millis = clock.get(&r.lemma).copied().unwrap_or(0);
    }
    out
}

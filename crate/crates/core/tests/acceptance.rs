//! Acceptance criteria. Each test is one criterion and prints one
//! `PASS`/`FAIL` line with its measured numbers; tolerances and budgets are
//! the constants below.

use std::collections::BTreeSet;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use randwalls::complex::skeleton_distance;
use randwalls::oracles::{
    oracle_distance, oracle_lemma_sweep, random_subcomplex, sublemma_sweep, CorpusEntry, SweepConfig, DISTANCE_CAP,
};
use randwalls::pipeline::{run, run_fixture, sample_runs, Run, RunConfig};
use randwalls::rational::lambda;
use randwalls::sampler::{build_fixture, catalog};
use randwalls::seed::stream;
use randwalls::tiles::{balance, returning_cap, shared_edges, TileCollection, TileId};
use randwalls::walls::{DistCache, WallConfig, WallState};
use randwalls::{CellId, Q};

const ELLS: [usize; 3] = [8, 20, 40];
const PATCHES_PER_ELL: usize = 334;
const MIN_PATCHES: usize = 1000;
const CORPUS_SEED: u64 = 20_240_611;
/// Exact integer comparisons throughout; no slack anywhere.
const TOLERANCE: i64 = 0;
const BALANCE_BOUNDS_BUDGET: Duration = Duration::from_secs(60);
const MP_BUDGET: Duration = Duration::from_secs(1);
const MP_ELL: usize = 20;
const MP_OVERLAP: usize = 8;
const SUBLEMMA_TREES: usize = 10_000;
const SUBLEMMA_MAX_EDGES: usize = 40;
const SUBLEMMA_BUDGET: Duration = Duration::from_secs(120);
const PARTNER_SIZE_CAP: usize = 3;
const RETURN_C: i64 = 1;
const LAMBDA_AT_3_14: i64 = 7;
const DISTANCE_SAMPLES: usize = 1000;

struct Corpus {
    sampled: Vec<CorpusEntry>,
    fixtures: Vec<CorpusEntry>,
    build_time: Duration,
}

fn corpus() -> &'static Corpus {
    static CORPUS: OnceLock<Corpus> = OnceLock::new();
    CORPUS.get_or_init(|| {
        let start = Instant::now();
        let d = Q::new(3, 14);
        let sampled = ELLS
            .iter()
            .flat_map(|&ell| sample_runs(ell, d, Q::new(1, 100), PATCHES_PER_ELL, CORPUS_SEED).unwrap())
            .map(|(name, run)| CorpusEntry { name, run })
            .collect();
        let fixtures = catalog()
            .into_iter()
            .map(|f| CorpusEntry { run: run_fixture(&f.name, None).unwrap(), name: f.name })
            .collect();
        Corpus { sampled, fixtures, build_time: start.elapsed() }
    })
}

fn all_runs() -> impl Iterator<Item = &'static CorpusEntry> {
    let c = corpus();
    c.fixtures.iter().chain(c.sampled.iter())
}

fn report(n: u8, title: &str, pass: bool, detail: String) {
    println!("{} criterion {n} ({title}): {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {n} failed: {detail}");
}

fn connected_potiles(r: &Run) -> Vec<BTreeSet<CellId>> {
    let n = r.patch.n_cells() as u32;
    (1u32..1 << n)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).map(CellId).collect::<BTreeSet<_>>())
        .filter(|s| randwalls::tiles::is_potile(&r.patch, s).unwrap_or(false))
        .collect()
}

#[test]
fn criterion_1_balance_bounds() {
    let start = Instant::now();
    let c = corpus();
    let (mut checked, mut bad) = (0, Vec::new());
    for e in all_runs() {
        let q = e.run.patch.ell() as i64 / 4;
        for t in connected_potiles(&e.run) {
            let b = balance(&e.run.patch, &t);
            checked += 1;
            if b < q - TOLERANCE || b > 2 * q + TOLERANCE {
                bad.push(format!("{} {t:?}: Bal {b}", e.name));
            }
        }
    }
    let sweep = oracle_lemma_sweep(&c.sampled, &SweepConfig { lemmas: Some(["balancebounds".into()].into()), ..Default::default() });
    let oracle_violations: usize = sweep.iter().map(|r| r.violated()).sum();
    let elapsed = start.elapsed() + c.build_time;
    let pass = bad.is_empty() && oracle_violations == 0 && c.sampled.len() >= MIN_PATCHES && elapsed < BALANCE_BOUNDS_BUDGET;
    report(
        1,
        "ℓ/4 ≤ Bal ≤ ℓ/2",
        pass,
        format!(
            "{checked} potiles over {} sampled + {} fixtures, {} out of range, {oracle_violations} oracle disagreements, {:.1?}",
            c.sampled.len(),
            c.fixtures.len(),
            bad.len(),
            elapsed
        ),
    );
}

#[test]
fn criterion_2_antipodal_baseline() {
    let (mut walls, mut bad) = (0, 0);
    for e in all_runs() {
        let patch = &e.run.patch;
        let tc = TileCollection::starting(patch);
        let w = WallState::new(patch, WallConfig::default());
        let mut cache = DistCache::default();
        for t in &tc.tiles {
            let bal = balance(patch, &t.cells);
            for l in &w.tile_graph(patch, &t.cells).links {
                walls += 1;
                let half = cache.mid(patch, &t.cells, l.ea, l.eb).unwrap() as i64;
                if (half - patch.ell() as i64).abs() > TOLERANCE || (2 * bal - patch.ell() as i64).abs() > TOLERANCE {
                    bad += 1;
                }
            }
        }
    }
    report(2, "1-tile walls at distance ℓ/2 = Bal", bad == 0, format!("{walls} walls, {bad} off"));
}

#[test]
fn criterion_3_bending_necessity_and_sufficiency() {
    let start = Instant::now();
    let f = build_fixture("mp_example", Some(MP_ELL)).unwrap();
    let overlap = shared_edges(&f.patch, &[f.cell("A")].into(), &[f.cell("B")].into()).len();
    let cfg = RunConfig::new(f.d, f.eps).unwrap();
    let mut flat_cfg = cfg.clone();
    flat_cfg.walls.bending = false;
    let flat = run(f.patch.clone(), Some(&f.labeling), &flat_cfg).unwrap();
    let bent = run(f.patch, Some(&f.labeling), &cfg).unwrap();
    let flat_bad = flat.walls.reports.iter().any(|r| !r.violations.is_empty());
    let failures = bent.balance_failures();
    let elapsed = start.elapsed();
    report(
        3,
        "bending on the MP example",
        overlap == MP_OVERLAP && flat_bad && failures == 0 && elapsed < MP_BUDGET,
        format!(
            "overlap {overlap}, unbent tile-wall violations {}, bent failures {failures}, {:.1?}",
            flat.walls.reports.iter().map(|r| r.violations.len()).sum::<usize>(),
            elapsed
        ),
    );
}

#[test]
fn criterion_4_balancing_walls_at_scale() {
    let (mut tiles, mut paths, mut failures) = (0, 0, Vec::new());
    for e in all_runs() {
        let tc = &e.run.tiles;
        for r in &e.run.walls.reports {
            let Some(step) = tc.log.iter().find(|s| s.result == r.tile) else { continue };
            if step.tiles.iter().any(|&t: &TileId| tc.tile(t).size() > PARTNER_SIZE_CAP) {
                continue;
            }
            tiles += 1;
            paths += r.paths_checked;
            if !r.is_clean() {
                failures.push(format!("{} tile {}: {} failures", e.name, r.tile.0, r.failures.len()));
            }
        }
    }
    report(
        4,
        "verify_balanced over the corpus",
        failures.is_empty() && tiles > 0,
        format!("{tiles} glued tiles, {paths} wall paths, {} failing {:?}", failures.len(), failures.first()),
    );
}

#[test]
fn criterion_5_sublemma_oracle() {
    let start = Instant::now();
    let r = sublemma_sweep(SUBLEMMA_TREES, SUBLEMMA_MAX_EDGES, CORPUS_SEED);
    let elapsed = start.elapsed();
    report(
        5,
        "tree inequality on random trees",
        r.checked == SUBLEMMA_TREES && r.violated() == 0 && elapsed < SUBLEMMA_BUDGET,
        format!("{} trees, {} violations, {:.1?}", r.checked, r.violated(), elapsed),
    );
}

#[test]
fn criterion_6_potile_intersections_are_trees() {
    let c = corpus();
    let cfg = SweepConfig { lemmas: Some(["trees".into()].into()), ..Default::default() };
    let sampled = oracle_lemma_sweep(&c.sampled, &cfg);
    let fixtures = oracle_lemma_sweep(&c.fixtures, &cfg);
    let checked: usize = sampled.iter().chain(&fixtures).map(|r| r.checked).sum();
    let unexplained: usize = sampled.iter().chain(&fixtures).map(|r| r.unexplained()).sum();
    let explained: usize = sampled.iter().chain(&fixtures).map(|r| r.violated() - r.unexplained()).sum();
    report(
        6,
        "disjoint potiles meet in a tree of ≤ ℓ/2 edges",
        unexplained == 0 && c.sampled.len() >= MIN_PATCHES,
        format!("{checked} pairs over {} patches, {unexplained} on admissible patches, {explained} on inadmissible ones", c.sampled.len() + c.fixtures.len()),
    );
}

#[test]
fn criterion_7_no_returning_segments() {
    let d = Q::new(3, 14);
    let lam = lambda(&d).unwrap();
    let n_ret = returning_cap(d).unwrap();
    let expected = ((2 * RETURN_C + 1) * LAMBDA_AT_3_14) as usize;
    let (mut segments, mut admissible_hits, mut unexplained, mut hits) = (0, 0, 0, 0);
    for e in all_runs() {
        let r = &e.run.returning;
        segments += r.segments_checked;
        hits += r.hits.len();
        if e.run.admissibility.admissible() {
            admissible_hits += r.hits.len();
        }
        if !r.consistent() {
            unexplained += 1;
        }
    }
    report(
        7,
        "returning absence below N_ret",
        lam == Q::from_integer(LAMBDA_AT_3_14) && n_ret == expected && admissible_hits == 0 && unexplained == 0,
        format!("λ = {lam}, N_ret = {n_ret}, {segments} segments, {hits} hits, {admissible_hits} on admissible patches"),
    );
}

#[test]
fn criterion_8_determinism() {
    let artifacts = |r: &Run| {
        let walls = serde_json::to_string(&r.traces).unwrap();
        let space = r.wallspace().map(|w| w.to_json()).unwrap_or_default();
        (r.tiles.step_log_jsonl(), r.walls.bend_log_jsonl(), walls, space)
    };
    let mut compared = 0;
    let mut differ = Vec::new();
    for f in catalog() {
        compared += 1;
        if artifacts(&run_fixture(&f.name, None).unwrap()) != artifacts(&run_fixture(&f.name, None).unwrap()) {
            differ.push(f.name);
        }
    }
    for &ell in &ELLS {
        let a = sample_runs(ell, Q::new(3, 14), Q::new(1, 100), 20, CORPUS_SEED).unwrap();
        let b = sample_runs(ell, Q::new(3, 14), Q::new(1, 100), 20, CORPUS_SEED).unwrap();
        for ((na, ra), (nb, rb)) in a.iter().zip(&b) {
            compared += 1;
            if na != nb || artifacts(ra) != artifacts(rb) || ra.patch.to_json() != rb.patch.to_json() {
                differ.push(na.clone());
            }
        }
    }
    report(8, "byte-identical reruns", differ.is_empty(), format!("{compared} runs compared, {} differ {differ:?}", differ.len()));
}

#[test]
fn criterion_9_oracle_distance_agreement() {
    let c = corpus();
    let patches: Vec<&Run> = c.sampled.iter().map(|e| &e.run).filter(|r| r.patch.n_edges() <= DISTANCE_CAP).collect();
    let mut rng = stream(CORPUS_SEED, "acceptance-distance");
    let mut disagreements = Vec::new();
    for i in 0..DISTANCE_SAMPLES {
        let patch = &patches[i % patches.len()].patch;
        let (sub, x, y) = random_subcomplex(patch, &mut rng);
        let (want, got) = (oracle_distance(patch, &sub, x, y).unwrap(), skeleton_distance(patch, x, y, &sub).unwrap());
        if want != got {
            disagreements.push(format!("{x}–{y}: {want:?} vs {got:?}"));
        }
    }
    report(
        9,
        "skeleton distance against the exhaustive oracle",
        disagreements.is_empty(),
        format!("{DISTANCE_SAMPLES} subcomplexes (≤ {DISTANCE_CAP} edges), {} disagreements", disagreements.len()),
    );
}

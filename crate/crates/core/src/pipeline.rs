//! One end-to-end run on a patch: admissibility, tile collection, balanced
//! walls, traced global walls and the returning search.

use serde::Serialize;

use crate::complex::{check_admissible, Admissibility, AdmissibilityCheck, Labeling, PatchComplex};
use crate::error::Result;
use crate::rational::{format_q, lambda, Q};
use crate::sampler::{build_fixture, random_patches, sample_presentation, GrowthConfig};
use crate::tiles::{build_tile_collection, TileClass, TileCollection, TileConfig};
use crate::tracer::{
    check_embedded, detect_returning, export_wallspace, global_graph, trace_walls, ReturningReport, WallTrace,
    Wallspace,
};
use crate::walls::{WallConfig, WallState};

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub tiles: TileConfig,
    pub walls: WallConfig,
    /// Segment cap for the returning search.
    pub segment_limit: usize,
}

impl RunConfig {
    pub fn new(d: Q, eps: Q) -> Result<Self> {
        Ok(RunConfig { tiles: TileConfig::new(d, eps)?, walls: WallConfig::default(), segment_limit: 100_000 })
    }
}

pub struct Run {
    pub patch: PatchComplex,
    pub config: RunConfig,
    pub admissibility: Admissibility,
    pub tiles: TileCollection,
    pub walls: WallState,
    pub traces: Vec<WallTrace>,
    pub returning: ReturningReport,
}

/// Counts printed on the summary line.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Summary {
    pub cells: usize,
    pub tiles_one: usize,
    pub tiles_core: usize,
    pub tiles_noncore: usize,
    pub walls: usize,
    pub bends: usize,
    pub balance_failures: usize,
    pub lemma_violations: usize,
    pub non_embedded: usize,
    pub returning_hits: usize,
    pub admissible: bool,
}

impl std::fmt::Display for Summary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "cells={} tiles(one={} core={} noncore={}) walls={} bends={} balance_failures={} lemma_violations={} \
             non_embedded={} returning={} admissible={}",
            self.cells,
            self.tiles_one,
            self.tiles_core,
            self.tiles_noncore,
            self.walls,
            self.bends,
            self.balance_failures,
            self.lemma_violations,
            self.non_embedded,
            self.returning_hits,
            self.admissible
        )
    }
}

pub fn run(patch: PatchComplex, labels: Option<&dyn Labeling>, config: &RunConfig) -> Result<Run> {
    let check = AdmissibilityCheck {
        d: config.tiles.d,
        eps: config.tiles.eps,
        max_subset: config.tiles.max_potile_size.max(2),
    };
    let admissibility = check_admissible(&patch, labels, &check);
    let mut walls = WallState::new(&patch, config.walls.clone());
    let tiles = build_tile_collection(&patch, &config.tiles, &mut walls)?;
    let traces = trace_walls(&patch, &walls);
    let mut returning =
        detect_returning(&patch, &tiles, &global_graph(&patch, &walls), config.tiles.n_ret, config.segment_limit);
    returning.cross_reference(&admissibility);
    Ok(Run { patch, config: config.clone(), admissibility, tiles, walls, traces, returning })
}

/// Runs a catalogued fixture at its own density.
pub fn run_fixture(name: &str, ell: Option<usize>) -> Result<Run> {
    let f = build_fixture(name, ell)?;
    run(f.patch, Some(&f.labeling), &RunConfig::new(f.d, f.eps)?)
}

/// `(ℓ₀, subdivision)` used to sample at relator length `ell` with two
/// generators: short words, subdivided, keep the relator count small.
pub fn sampling_shape(ell: usize) -> (usize, usize) {
    match ell {
        8 => (8, 1),
        20 => (5, 4),
        40 => (10, 4),
        _ => (ell, 1),
    }
}

/// Up to `count` admissible runs at relator length `ell` and density `d`,
/// drawn from successive presentations seeded from `seed`. Each is named
/// `ell{ℓ}-p{presentation}-{index}`.
pub fn sample_runs(ell: usize, d: Q, eps: Q, count: usize, seed: u64) -> Result<Vec<(String, Run)>> {
    let (ell0, k) = sampling_shape(ell);
    let config = RunConfig::new(d, eps)?;
    let growth = GrowthConfig::default();
    let mut out = Vec::new();
    for round in 0..64u64 {
        if out.len() >= count {
            break;
        }
        let mut p = sample_presentation(2, d, ell0, seed.wrapping_add(round))?;
        p.subdivision = k;
        for (i, patch) in random_patches(&p, &growth, 64, seed.wrapping_add(round)).into_iter().enumerate() {
            if out.len() >= count {
                break;
            }
            let r = run(patch, Some(&p), &config)?;
            if r.admissibility.admissible() {
                out.push((format!("ell{ell}-p{round}-{i}"), r));
            }
        }
    }
    Ok(out)
}

impl Run {
    pub fn balance_failures(&self) -> usize {
        self.walls.reports.iter().map(|r| r.failures.len() + r.violations.len() + r.truncated as usize).sum()
    }

    pub fn summary(&self) -> Summary {
        let alive: Vec<_> = self.tiles.alive().collect();
        let count = |c: TileClass| alive.iter().filter(|t| t.class == c).count();
        Summary {
            cells: self.patch.n_cells(),
            tiles_one: count(TileClass::One),
            tiles_core: count(TileClass::Core),
            tiles_noncore: count(TileClass::NonCore),
            walls: self.traces.len(),
            bends: self.walls.bends.len(),
            balance_failures: self.balance_failures(),
            lemma_violations: self.walls.lemmas.violations(),
            non_embedded: self.traces.iter().filter(|t| !check_embedded(t).is_embedded()).count(),
            returning_hits: self.returning.hits.len(),
            admissible: self.admissibility.admissible(),
        }
    }

    pub fn lambda(&self) -> Q {
        lambda(&self.config.tiles.d).expect("tile config has d < 1/4")
    }

    pub fn wallspace(&self) -> Result<Wallspace> {
        export_wallspace(&self.patch, &self.traces, self.lambda(), self.config.tiles.n_ret)
    }

    /// Constants reported alongside the wallspace.
    pub fn constants(&self) -> String {
        format!("lambda={} n_ret={}", format_q(&self.lambda()), self.config.tiles.n_ret)
    }
}

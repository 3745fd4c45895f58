//! Random presentations in the density model and small patches fulfilled
//! by them.

mod fixtures;

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complex::{
    canonical_signature, check_fulfilled, slot_label, CellId, CellSpec, Gluing, Labeling, PatchComplex, Signature,
};
use crate::error::{Error, Result};
use crate::rational::{check_density, format_q, parse_q, Q};
use crate::seed::stream;
use crate::word::{subdivided_label, Letter, PieceLabel, Word};

pub use fixtures::{build_fixture, catalog, derived_labeling, Amount, Fixture, FixtureGluing, FixtureSpec, TableLabeling};

/// Least `k ∈ {1, 2, 4}` with `4 | k·ℓ₀`.
pub fn subdivision_for(ell0: usize) -> usize {
    [1, 2, 4].into_iter().find(|k| (k * ell0) % 4 == 0).expect("k = 4 always works")
}

fn checked_pow(base: u128, exp: u64) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// `⌊(2n-1)^{d·ℓ₀}⌋`, computed exactly as the largest `m` with
/// `m^b ≤ (2n-1)^a` where `d·ℓ₀ = a/b`.
pub fn relator_count(n: u16, d: Q, ell0: usize) -> Result<u64> {
    let e = d * Q::from_integer(ell0 as i64);
    let (a, b) = (*e.numer() as u64, *e.denom() as u64);
    let base = 2 * n as u128 - 1;
    let too_big = || Error::Presentation(format!("(2n-1)^(d·ℓ₀) with n={n}, d·ℓ₀={a}/{b} is too large"));
    let target = checked_pow(base, a).ok_or_else(too_big)?;
    let fits = |m: u128| checked_pow(m, b).is_some_and(|p| p <= target);
    let mut lo: u128 = 0;
    let mut hi: u128 = checked_pow(base, a.div_ceil(b)).ok_or_else(too_big)? + 1;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    u64::try_from(lo).map_err(|_| too_big())
}

/// Upper limit on relator lists kept in memory.
pub const MAX_RELATORS: u64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "PresentationFile", try_from = "PresentationFile")]
pub struct Presentation {
    pub n: u16,
    pub d: Q,
    pub ell0: usize,
    pub subdivision: usize,
    pub relators: Vec<Word>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PresentationFile {
    pub n: u16,
    pub d: String,
    pub ell0: usize,
    pub subdivision: usize,
    pub relators: Vec<String>,
}

impl From<Presentation> for PresentationFile {
    fn from(p: Presentation) -> Self {
        PresentationFile {
            n: p.n,
            d: format_q(&p.d),
            ell0: p.ell0,
            subdivision: p.subdivision,
            relators: p.relators.iter().map(|w| w.to_string()).collect(),
        }
    }
}

impl TryFrom<PresentationFile> for Presentation {
    type Error = Error;

    fn try_from(f: PresentationFile) -> Result<Self> {
        let d = parse_q(&f.d)?;
        check_density(&d)?;
        if f.n < 2 || f.n > 26 {
            return Err(Error::Presentation(format!("need 2 ≤ n ≤ 26, got {}", f.n)));
        }
        if (f.subdivision * f.ell0) % 4 != 0 || f.ell0 == 0 {
            return Err(Error::Presentation("subdivision·ell0 must be a positive multiple of 4".into()));
        }
        let relators = f.relators.iter().map(|s| Word::parse(s)).collect::<Result<Vec<_>>>()?;
        for w in &relators {
            if w.len() != f.ell0 || !w.is_cyclically_reduced() || w.rank() > f.n {
                return Err(Error::Presentation(format!("relator {w} is not a cyclically reduced word of length {}", f.ell0)));
            }
        }
        Ok(Presentation { n: f.n, d, ell0: f.ell0, subdivision: f.subdivision, relators, warnings: Vec::new() })
    }
}

impl Presentation {
    pub fn ell(&self) -> usize {
        self.ell0 * self.subdivision
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("presentation serializes")
    }

    /// Number of relators equal to an earlier one.
    pub fn duplicates(&self) -> usize {
        let mut seen = HashSet::new();
        self.relators.iter().filter(|w| !seen.insert(*w)).count()
    }
}

impl Labeling for Presentation {
    fn label(&self, relator: usize, pos: usize) -> PieceLabel {
        subdivided_label(&self.relators[relator], self.subdivision, pos)
    }
}

fn random_letter_except(rng: &mut ChaCha8Rng, n: u16, forbidden: Option<Letter>) -> Letter {
    let letters = 2 * n as usize;
    let index = |l: Letter| 2 * l.gen as usize + l.inv as usize;
    let mut i = match forbidden {
        Some(_) => rng.gen_range(0..letters - 1),
        None => rng.gen_range(0..letters),
    };
    if let Some(f) = forbidden {
        if i >= index(f) {
            i += 1;
        }
    }
    Letter::new((i / 2) as u16, i % 2 == 1)
}

/// Uniform cyclically reduced word: a uniform reduced word, rejected when
/// its last letter cancels its first.
pub fn random_cyclically_reduced(rng: &mut ChaCha8Rng, n: u16, len: usize) -> Word {
    loop {
        let mut w = vec![random_letter_except(rng, n, None)];
        while w.len() < len {
            let prev = *w.last().expect("nonempty");
            w.push(random_letter_except(rng, n, Some(prev.inverse())));
        }
        if len == 1 || w[len - 1] != w[0].inverse() {
            return Word(w);
        }
    }
}

/// Samples `⌊(2n-1)^{dℓ₀}⌋` relators independently (with repetition).
pub fn sample_presentation(n: u16, d: Q, ell0: usize, seed: u64) -> Result<Presentation> {
    check_density(&d)?;
    if !(2..=26).contains(&n) {
        return Err(Error::Presentation(format!("need 2 ≤ n ≤ 26, got {n}")));
    }
    if ell0 == 0 {
        return Err(Error::Presentation("ell0 must be positive".into()));
    }
    let count = relator_count(n, d, ell0)?;
    if count > MAX_RELATORS {
        return Err(Error::Presentation(format!("{count} relators exceeds the limit of {MAX_RELATORS}")));
    }
    let mut rng = stream(seed, "presentation");
    let relators: Vec<Word> = (0..count).map(|_| random_cyclically_reduced(&mut rng, n, ell0)).collect();
    let mut p = Presentation { n, d, ell0, subdivision: subdivision_for(ell0), relators, warnings: Vec::new() };
    // (2n-1)^{dℓ₀} ≥ 1 for d > 0, so the count never reaches 0; a single
    // relator already means dℓ₀ is too small to be interesting.
    if count < 2 {
        p.warnings.push(format!(
            "only {count} relator for d·ℓ₀ = {}",
            format_q(&(d * Q::from_integer(ell0 as i64)))
        ));
    }
    let dup = p.duplicates();
    if dup > 0 {
        p.warnings.push(format!("{dup} duplicate relators"));
    }
    Ok(p)
}

/// Settings for random patch growth.
#[derive(Clone, Debug)]
pub struct GrowthConfig {
    pub max_cells: usize,
    pub max_gluings: usize,
    /// Weight of gluing lengths in `[ℓ/4, ℓ/2]` relative to other lengths.
    pub bias: u32,
    /// Longest gluing considered; defaults to `ℓ/2`.
    pub max_length: Option<usize>,
}

impl Default for GrowthConfig {
    fn default() -> Self {
        GrowthConfig { max_cells: 4, max_gluings: usize::MAX, bias: 8, max_length: None }
    }
}

/// A way to attach a new copy of `relator` to `cell` along a reversed
/// gluing whose labels agree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extension {
    pub cell: CellId,
    pub start_a: usize,
    pub relator: usize,
    pub inverted: bool,
    pub start_b: usize,
    pub length: usize,
}

fn new_cell_label(p: &Presentation, relator: usize, inverted: bool, slot: usize) -> PieceLabel {
    let spec = CellSpec { id: 0, relator, rotation: 0, inverted };
    let (pos, backward) = spec.slot_position(slot, p.ell());
    let l = p.label(relator, pos);
    if backward {
        l.inverse()
    } else {
        l
    }
}

/// Every label-compatible attachment of one new cell of length at most
/// `max_len`.
pub fn extensions(patch: &PatchComplex, p: &Presentation, max_len: usize) -> Vec<Extension> {
    let ell = patch.ell();
    let mut out = Vec::new();
    for c in patch.cell_ids() {
        let a: Vec<PieceLabel> = (0..ell).map(|s| slot_label(patch, p, c, s)).collect();
        for relator in 0..p.relators.len() {
            for inverted in [false, true] {
                let b: Vec<PieceLabel> = (0..ell).map(|u| new_cell_label(p, relator, inverted, u).inverse()).collect();
                // Along a diagonal s + u ≡ k, slot s of the old cell meets slot
                // u of the new one; runs extend towards s + 1, u - 1.
                for k in 0..ell {
                    let m: Vec<bool> = (0..ell).map(|s| a[s] == b[(k + ell - s) % ell]).collect();
                    let mut run = vec![0usize; ell];
                    if m.iter().all(|&x| x) {
                        run.iter_mut().for_each(|r| *r = ell);
                    } else {
                        let zero = m.iter().position(|&x| !x).expect("some mismatch");
                        for step in 1..=ell {
                            let s = (zero + ell - step) % ell;
                            run[s] = if m[s] { 1 + run[(s + 1) % ell] } else { 0 };
                        }
                    }
                    for s in 0..ell {
                        let u = (k + ell - s) % ell;
                        for length in 1..=run[s].min(max_len) {
                            out.push(Extension {
                                cell: c,
                                start_a: s,
                                relator,
                                inverted,
                                start_b: (u + ell + 1 - length) % ell,
                                length,
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

/// Attaches a new cell; `None` when the result is not fulfilled.
pub fn apply_extension(patch: &PatchComplex, p: &Presentation, x: &Extension) -> Option<PatchComplex> {
    let id = patch.n_cells() as u32;
    let mut cells = patch.cells().to_vec();
    cells.push(CellSpec { id, relator: x.relator, rotation: 0, inverted: x.inverted });
    let mut gluings = patch.gluings().to_vec();
    gluings.push(Gluing {
        cell_a: x.cell.0,
        start_a: x.start_a,
        cell_b: id,
        start_b: x.start_b,
        length: x.length,
        reversed: true,
    });
    let next = PatchComplex::new(patch.ell(), cells, gluings).ok()?;
    check_fulfilled(&next, p).is_empty().then_some(next)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EnumerationMode {
    Exhaustive,
    Random,
}

#[derive(Clone, Debug)]
pub struct PatchStream {
    pub mode: EnumerationMode,
    pub patches: Vec<PatchComplex>,
}

fn signature(patch: &PatchComplex) -> Signature {
    canonical_signature(patch, &[&patch.whole().cells])
}

fn max_len(patch_ell: usize, cfg: &GrowthConfig) -> usize {
    cfg.max_length.unwrap_or(patch_ell / 2).min(patch_ell)
}

fn exhaustive(p: &Presentation, cfg: &GrowthConfig, budget: usize) -> Option<Vec<PatchComplex>> {
    let ell = p.ell();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut layer = Vec::new();
    for r in 0..p.relators.len() {
        let patch = PatchComplex::new(ell, vec![CellSpec::plain(0, r)], vec![]).expect("single cell");
        if seen.insert(signature(&patch)) {
            layer.push(patch);
        }
    }
    while !layer.is_empty() {
        out.extend(layer.iter().cloned());
        if out.len() > budget {
            return None;
        }
        let mut next = Vec::new();
        for patch in &layer {
            if patch.n_cells() >= cfg.max_cells || patch.gluings().len() >= cfg.max_gluings {
                continue;
            }
            for x in extensions(patch, p, max_len(ell, cfg)) {
                if let Some(q) = apply_extension(patch, p, &x) {
                    if seen.insert(signature(&q)) {
                        next.push(q);
                        if out.len() + next.len() > budget {
                            return None;
                        }
                    }
                }
            }
        }
        layer = next;
    }
    Some(out)
}

fn weight(length: usize, ell: usize, bias: u32) -> u32 {
    if 4 * length >= ell && 2 * length <= ell {
        bias.max(1)
    } else {
        1
    }
}

/// Grows one patch with `target` cells (fewer if it gets stuck).
pub fn grow_patch(p: &Presentation, cfg: &GrowthConfig, target: usize, rng: &mut ChaCha8Rng) -> Option<PatchComplex> {
    if p.relators.is_empty() {
        return None;
    }
    let ell = p.ell();
    let first = rng.gen_range(0..p.relators.len());
    let mut patch = PatchComplex::new(ell, vec![CellSpec::plain(0, first)], vec![]).expect("single cell");
    while patch.n_cells() < target && patch.gluings().len() < cfg.max_gluings {
        let mut options = extensions(&patch, p, max_len(ell, cfg));
        options.shuffle(rng);
        let mut grown = None;
        for _ in 0..8 {
            let Ok(x) = options.choose_weighted(rng, |x| weight(x.length, ell, cfg.bias)) else {
                break;
            };
            if let Some(q) = apply_extension(&patch, p, x) {
                grown = Some(q);
                break;
            }
        }
        match grown {
            Some(q) => patch = q,
            None => break,
        }
    }
    Some(patch)
}

/// Patches of at most `cfg.max_cells` cells, deduplicated up to labeled
/// isomorphism. Enumerates exhaustively when the full set fits in
/// `budget`; otherwise returns `budget` seeded random patches.
pub fn enumerate_patches(p: &Presentation, cfg: &GrowthConfig, budget: usize, seed: u64) -> PatchStream {
    if let Some(patches) = exhaustive(p, cfg, budget) {
        return PatchStream { mode: EnumerationMode::Exhaustive, patches };
    }
    PatchStream { mode: EnumerationMode::Random, patches: random_patches(p, cfg, budget, seed) }
}

/// Seeded random patches with sizes uniform in `1..=max_cells`,
/// deduplicated.
pub fn random_patches(p: &Presentation, cfg: &GrowthConfig, count: usize, seed: u64) -> Vec<PatchComplex> {
    let mut rng = stream(seed, "patches");
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < count && attempts < 20 * count.max(1) {
        attempts += 1;
        let target = rng.gen_range(1..=cfg.max_cells.max(1));
        if let Some(patch) = grow_patch(p, cfg, target, &mut rng) {
            if seen.insert(signature(&patch)) {
                out.push(patch);
            }
        }
    }
    out
}

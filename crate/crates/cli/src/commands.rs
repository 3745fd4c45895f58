use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use randwalls::complex::{walls_dot, Labeling};
use randwalls::oracles::{oracle_lemma_sweep, sublemma_sweep, summary_table, CorpusEntry, OracleResult, SweepConfig, SWEEP_LEMMAS};
use randwalls::pipeline::{run, run_fixture, sample_runs, Run, RunConfig};
use randwalls::rational::{format_q, parse_q};
use randwalls::sampler::{build_fixture, catalog, enumerate_patches, sample_presentation, GrowthConfig, Presentation};
use randwalls::walls::lemmas::LEMMAS;
use randwalls::{PatchComplex, Q};
use serde_json::{json, Value};

use crate::config::Settings;
use crate::{BuildArgs, CliError, ExportArgs, Format, PatchesArgs, SampleArgs, VerifyArgs};

fn emit(output: Option<&Path>, text: &str) -> Result<(), CliError> {
    match output {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(p, text)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("artifact serializes") + "\n"
}

pub fn sample(settings: &Settings, a: SampleArgs) -> Result<(), CliError> {
    let n = a.n.or(settings.n).unwrap_or(2);
    let d = a.d.or(settings.d).ok_or_else(|| CliError::Usage("sample needs a density (-d p/q)".into()))?;
    let ell0 = a.ell0.or(settings.ell0).ok_or_else(|| CliError::Usage("sample needs --ell0".into()))?;
    let seed = settings.seed(a.seed)?;
    let mut p = sample_presentation(n, d, ell0, seed)?;
    if let Some(k) = a.subdivision.or(settings.subdivision) {
        if k == 0 || (k * ell0) % 4 != 0 {
            return Err(CliError::Usage(format!("subdivision {k}·{ell0} is not a positive multiple of 4")));
        }
        p.subdivision = k;
    }
    for w in &p.warnings {
        eprintln!("warning: {w}");
    }
    eprintln!("{} relators of length {} (ℓ = {})", p.relators.len(), p.ell0, p.ell());
    emit(a.output.as_deref(), &(p.to_json() + "\n"))
}

pub fn patches(settings: &Settings, a: PatchesArgs) -> Result<(), CliError> {
    let p = Presentation::from_json(&read(&a.presentation)?)?;
    let growth = GrowthConfig { max_cells: a.max_cells.or(settings.max_cells).unwrap_or(4), ..Default::default() };
    let budget = a.budget.or(settings.budget).unwrap_or(100);
    let stream = enumerate_patches(&p, &growth, budget, settings.seed(a.seed)?);
    let out = settings.out(a.out);
    fs::create_dir_all(&out)?;
    for (i, patch) in stream.patches.iter().enumerate() {
        fs::write(out.join(format!("patch-{i:04}.json")), patch.to_json() + "\n")?;
    }
    println!("{:?}: {} patches written to {}", stream.mode, stream.patches.len(), out.display());
    Ok(())
}

/// Where a build came from, enough to rebuild it.
fn manifest(a: &BuildArgs, d: Q, eps: Q, ell: usize) -> Value {
    match &a.fixture {
        Some(name) => json!({ "source": "fixture", "fixture": name, "ell": ell, "bend": !a.no_bend, "force": a.force }),
        None => json!({
            "source": "patch",
            "d": format_q(&d),
            "eps": format_q(&eps),
            "presentation": a.presentation.is_some(),
            "bend": !a.no_bend,
            "force": a.force,
        }),
    }
}

fn run_config(d: Q, eps: Q, bend: bool) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::new(d, eps)?;
    cfg.walls.bending = bend;
    Ok(cfg)
}

fn inadmissible_listing(r: &Run) -> String {
    let a = &r.admissibility;
    let mut s = a.summary() + "\n";
    for v in &a.ipi {
        s += &format!("  ipi: cells {:?} Can {} > bound {}\n", v.cells, v.can, v.bound);
    }
    for f in &a.folds {
        s += &format!("  fold: cells {:?} share {} edges\n", f.cells, f.shared);
    }
    for c in &a.geodesic.violations {
        s += &format!("  short cycle: {c:?}\n");
    }
    for f in &a.fulfilment {
        s += &format!("  fulfilment: {f}\n");
    }
    s
}

/// Artifact files and their contents for one run.
fn artifacts(r: &Run) -> Vec<(&'static str, String)> {
    let mut files = vec![
        ("patch.json", r.patch.to_json() + "\n"),
        ("admissibility.json", pretty(&r.admissibility)),
        ("tiles.json", pretty(&r.tiles.tiles)),
        ("steps.jsonl", r.tiles.step_log_jsonl()),
        ("bends.jsonl", r.walls.bend_log_jsonl()),
        ("walls.json", pretty(&r.traces)),
        ("balance.json", pretty(&r.walls.reports)),
        ("lemmas.json", pretty(&r.walls.lemmas)),
        ("returning.json", pretty(&r.returning)),
        ("summary.json", pretty(&r.summary())),
    ];
    if let Ok(ws) = r.wallspace() {
        files.push(("wallspace.json", ws.to_json() + "\n"));
    }
    files
}

pub fn build(settings: &Settings, a: BuildArgs) -> Result<(), CliError> {
    let out = settings.out(a.out.clone());
    let (r, presentation) = if let Some(name) = &a.fixture {
        let f = build_fixture(name, a.ell)?;
        let cfg = run_config(f.d, f.eps, !a.no_bend)?;
        (run(f.patch, Some(&f.labeling), &cfg)?, None)
    } else {
        let path = a.patch.as_ref().expect("clap requires fixture or patch");
        let patch = PatchComplex::from_json(&read(path)?)?;
        let p = a.presentation.as_ref().map(|f| read(f).and_then(|t| Ok(Presentation::from_json(&t)?))).transpose()?;
        let d = match &p {
            Some(p) => p.d,
            None => a.d.or(settings.d).ok_or_else(|| CliError::Usage("a patch without presentation needs -d".into()))?,
        };
        let cfg = run_config(d, settings.eps(a.eps), !a.no_bend)?;
        let labels = p.as_ref().map(|p| p as &dyn Labeling);
        (run(patch, labels, &cfg)?, p)
    };
    if !r.admissibility.admissible() && !a.force {
        return Err(CliError::Inadmissible(inadmissible_listing(&r)));
    }
    fs::create_dir_all(&out)?;
    let m = manifest(&a, r.config.tiles.d, r.config.tiles.eps, r.patch.ell());
    fs::write(out.join("manifest.json"), pretty(&m))?;
    if let Some(p) = &presentation {
        fs::write(out.join("presentation.json"), p.to_json() + "\n")?;
    }
    for (name, text) in artifacts(&r) {
        fs::write(out.join(name), text)?;
    }
    println!("{} {}", r.summary(), r.constants());
    Ok(())
}

/// Rebuilds the run recorded in a build directory.
fn rebuild(dir: &Path) -> Result<Run, CliError> {
    let m: Value = serde_json::from_str(&read(&dir.join("manifest.json"))?)
        .map_err(|e| CliError::Usage(format!("{}: {e}", dir.display())))?;
    let field = |k: &str| m.get(k).ok_or_else(|| CliError::Usage(format!("manifest lacks {k}")));
    let bend = field("bend")?.as_bool().unwrap_or(true);
    match field("source")?.as_str() {
        Some("fixture") => {
            let name = field("fixture")?.as_str().unwrap_or_default().to_string();
            let ell = field("ell")?.as_u64().map(|e| e as usize);
            let f = build_fixture(&name, ell)?;
            Ok(run(f.patch, Some(&f.labeling), &run_config(f.d, f.eps, bend)?)?)
        }
        Some("patch") => {
            let patch = PatchComplex::from_json(&read(&dir.join("patch.json"))?)?;
            let q = |k: &str| -> Result<Q, CliError> { Ok(parse_q(field(k)?.as_str().unwrap_or_default())?) };
            let cfg = run_config(q("d")?, q("eps")?, bend)?;
            if field("presentation")?.as_bool() == Some(true) {
                let p = Presentation::from_json(&read(&dir.join("presentation.json"))?)?;
                Ok(run(patch, Some(&p), &cfg)?)
            } else {
                Ok(run(patch, None, &cfg)?)
            }
        }
        other => Err(CliError::Usage(format!("unknown manifest source {other:?}"))),
    }
}

/// First line where a stored artifact differs from the rebuilt one.
fn first_difference(stored: &str, fresh: &str) -> Option<String> {
    let (a, b): (Vec<&str>, Vec<&str>) = (stored.lines().collect(), fresh.lines().collect());
    (0..a.len().max(b.len())).find(|&i| a.get(i) != b.get(i)).map(|i| {
        format!("line {}: stored {:?}, rebuilt {:?}", i + 1, a.get(i).unwrap_or(&"<end>"), b.get(i).unwrap_or(&"<end>"))
    })
}

fn known_suites() -> BTreeSet<String> {
    SWEEP_LEMMAS.iter().chain(LEMMAS.iter()).chain(["sublemma47"].iter()).map(|s| s.to_string()).collect()
}

pub fn verify(settings: &Settings, a: VerifyArgs) -> Result<(), CliError> {
    let seed = settings.seed(a.seed)?;
    let filter: Option<BTreeSet<String>> = a.lemmas.map(|l| l.into_iter().collect());
    if let Some(f) = &filter {
        let known = known_suites();
        if let Some(bad) = f.iter().find(|l| !known.contains(*l)) {
            return Err(CliError::Usage(format!("unknown suite {bad:?}; known: {known:?}")));
        }
    }
    let mut corpus = Vec::new();
    let mut mismatches = Vec::new();
    for dir in &a.dir {
        let r = rebuild(dir)?;
        for (name, fresh) in artifacts(&r) {
            if !["steps.jsonl", "bends.jsonl", "walls.json"].contains(&name) {
                continue;
            }
            let stored = read(&dir.join(name))?;
            if let Some(diff) = first_difference(&stored, &fresh) {
                mismatches.push(format!("{}/{name}: {diff}", dir.display()));
            }
        }
        corpus.push(CorpusEntry { name: dir.display().to_string(), run: r });
    }
    let mut fixtures = a.fixture.clone();
    if a.dir.is_empty() && a.fixture.is_empty() && a.sampled == 0 {
        fixtures = catalog().into_iter().map(|f| f.name).collect();
    }
    for name in &fixtures {
        corpus.push(CorpusEntry { name: name.clone(), run: run_fixture(name, None)? });
    }
    let d = settings.d.unwrap_or(Q::new(3, 14));
    for &ell in a.ells.iter().filter(|_| a.sampled > 0) {
        for (name, run) in sample_runs(ell, d, settings.eps(None), a.sampled, seed)? {
            corpus.push(CorpusEntry { name, run });
        }
    }
    let wants = |s: &str| filter.as_ref().is_none_or(|f| f.contains(s));
    let cfg = SweepConfig { lemmas: filter.clone(), seed, ..Default::default() };
    let mut results: Vec<OracleResult> =
        if filter.as_ref().is_some_and(|f| f.len() == 1 && f.contains("sublemma47")) { vec![] } else { oracle_lemma_sweep(&corpus, &cfg) };
    if wants("sublemma47") {
        results.push(sublemma_sweep(a.trees, 40, seed));
    }
    print!("{}", summary_table(&results));
    if let Some(path) = &a.report {
        emit(Some(path), &pretty(&json!({ "instances": corpus.len(), "results": results, "artifact_mismatches": mismatches })))?;
    }
    let unexplained: Vec<String> = results
        .iter()
        .flat_map(|r| r.violations.iter().filter(|w| w.admissible).map(move |w| format!("{}: {} ({})", r.lemma, w.instance, w.detail)))
        .collect();
    if mismatches.is_empty() && unexplained.is_empty() {
        println!("ok: {} instances", corpus.len());
        return Ok(());
    }
    let mut msg = String::new();
    for m in mismatches.iter().chain(unexplained.iter().take(20)) {
        msg += &format!("\n  {m}");
    }
    Err(CliError::Violation(msg))
}

pub fn export(a: ExportArgs) -> Result<(), CliError> {
    let r = rebuild(&a.dir)?;
    let text = match a.format {
        Format::Dot => walls_dot(&r.patch, &r.walls.all_links(&r.patch)),
        Format::Json => r.wallspace().map_err(|e| CliError::Violation(e.to_string()))?.to_json() + "\n",
    };
    emit(a.output.as_deref(), &text)
}

pub fn fixtures_list() -> Result<(), CliError> {
    for f in catalog() {
        println!("{:<20} ℓ={:<3} cells={:<2} {}", f.name, f.default_ell, f.cells.len(), f.description);
    }
    Ok(())
}

pub fn fixtures_build(name: &str, ell: Option<usize>, output: Option<PathBuf>) -> Result<(), CliError> {
    let f = build_fixture(name, ell)?;
    emit(output.as_deref(), &(f.patch.to_json() + "\n"))
}

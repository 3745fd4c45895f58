use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn randwalls(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_randwalls")).args(args).env_remove("RANDWALLS_SEED").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn text(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned() + &String::from_utf8_lossy(&o.stderr)
}

fn build(dir: &Path, args: &[&str]) -> Output {
    let mut all = vec!["build", "-o", dir.to_str().unwrap()];
    all.extend_from_slice(args);
    randwalls(&all)
}

#[test]
fn sample_gives_the_relator_count_and_repeats() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a.json"), tmp.path().join("b.json"));
    for f in [&a, &b] {
        let o = randwalls(&["sample", "-n", "2", "-d", "3/14", "--ell0", "14", "--seed", "7", "-o", f.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", text(&o));
    }
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&a).unwrap()).unwrap();
    assert_eq!(v["relators"].as_array().unwrap().len(), 27);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn seed_falls_back_to_the_environment() {
    let with_flag = randwalls(&["sample", "-d", "3/14", "--ell0", "8", "--seed", "11"]);
    let from_env = Command::new(env!("CARGO_BIN_EXE_randwalls"))
        .args(["sample", "-d", "3/14", "--ell0", "8"])
        .env("RANDWALLS_SEED", "11")
        .output()
        .unwrap();
    assert_eq!(with_flag.stdout, from_env.stdout);
    let other = randwalls(&["sample", "-d", "3/14", "--ell0", "8", "--seed", "12"]);
    assert_ne!(with_flag.stdout, other.stdout);
}

#[test]
fn config_file_supplies_settings() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    fs::write(&cfg, "n = 2\nd = \"3/14\"\nell0 = 14\nseed = 7\n").unwrap();
    let o = randwalls(&["--config", cfg.to_str().unwrap(), "sample"]);
    assert_eq!(code(&o), 0, "{}", text(&o));
    assert_eq!(o.stdout, randwalls(&["sample", "-n", "2", "-d", "3/14", "--ell0", "14", "--seed", "7"]).stdout);
    fs::write(&cfg, "colour = \"red\"\n").unwrap();
    assert_eq!(code(&randwalls(&["--config", cfg.to_str().unwrap(), "sample"])), 2);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&randwalls(&["sample", "-d", "1", "--ell0", "8"])), 2);
    assert_eq!(code(&randwalls(&["sample", "-d", "3/2", "--ell0", "8"])), 2);
    assert_eq!(code(&randwalls(&["build"])), 2);
    assert_eq!(code(&randwalls(&["verify", "--lemmas", "nonsense"])), 2);
    assert_eq!(code(&randwalls(&["export", "--dir", ".", "--format", "svg"])), 2);
}

#[test]
fn build_balancing2tile_reports_one_core_tile() {
    let tmp = tempfile::tempdir().unwrap();
    let o = build(tmp.path(), &["--fixture", "balancing2tile"]);
    assert_eq!(code(&o), 0, "{}", text(&o));
    let out = text(&o);
    assert!(out.contains("core=1") && out.contains("balance_failures=0") && out.contains("admissible=true"), "{out}");
    for f in ["manifest.json", "patch.json", "tiles.json", "steps.jsonl", "bends.jsonl", "walls.json", "wallspace.json"] {
        assert!(tmp.path().join(f).exists(), "{f}");
    }
}

#[test]
fn inadmissible_patch_needs_force() {
    let tmp = tempfile::tempdir().unwrap();
    let o = build(tmp.path(), &["--fixture", "returning_negative"]);
    assert_eq!(code(&o), 3);
    assert!(text(&o).contains("short cycle"), "{}", text(&o));
    assert!(!tmp.path().join("steps.jsonl").exists());
    assert_eq!(code(&build(tmp.path(), &["--fixture", "returning_negative", "--force"])), 0);
    assert!(text(&randwalls(&["verify", "--dir", tmp.path().to_str().unwrap()])).contains("returning"));
}

#[test]
fn builds_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for d in [&a, &b] {
        assert_eq!(code(&build(d, &["--fixture", "life_of_a_tile"])), 0);
    }
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    for n in names {
        assert_eq!(fs::read(a.join(&n)).unwrap(), fs::read(b.join(&n)).unwrap(), "{n:?}");
    }
}

#[test]
fn patch_builds_round_trip_through_files() {
    let tmp = tempfile::tempdir().unwrap();
    let pres = tmp.path().join("p.json");
    randwalls(&["sample", "-d", "3/14", "--ell0", "8", "--seed", "3", "-o", pres.to_str().unwrap()]);
    let dir = tmp.path().join("patches");
    let o = randwalls(&["patches", "--presentation", pres.to_str().unwrap(), "--budget", "5", "--seed", "3", "-o", dir.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", text(&o));
    let first = dir.join("patch-0000.json");
    let out = tmp.path().join("run");
    let o = build(&out, &["--patch", first.to_str().unwrap(), "--presentation", pres.to_str().unwrap(), "--force"]);
    assert_eq!(code(&o), 0, "{}", text(&o));
    let o = randwalls(&["verify", "--dir", out.to_str().unwrap(), "--lemmas", "trees,balancebounds"]);
    assert!(text(&o).contains("balancebounds"), "{}", text(&o));
}

#[test]
fn verify_passes_on_the_fixture_corpus() {
    let o = randwalls(&["verify", "--trees", "200"]);
    assert_eq!(code(&o), 0, "{}", text(&o));
    let out = text(&o);
    for suite in ["distance", "trees", "4.4", "sublemma47", "returning"] {
        assert!(out.contains(suite), "{suite} missing:\n{out}");
    }
}

#[test]
fn verify_filter_runs_one_suite() {
    let o = randwalls(&["verify", "--lemmas", "sublemma47", "--trees", "100"]);
    assert_eq!(code(&o), 0, "{}", text(&o));
    let out = String::from_utf8_lossy(&o.stdout).into_owned();
    let rows: Vec<&str> = out.lines().skip(1).filter(|l| !l.starts_with("ok")).collect();
    assert_eq!(rows.len(), 1, "{out}");
    assert!(rows[0].starts_with("sublemma47"));
}

#[test]
fn tampered_bend_log_fails_verification() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(code(&build(tmp.path(), &["--fixture", "balancing2tile"])), 0);
    let log = tmp.path().join("bends.jsonl");
    let edited = fs::read_to_string(&log).unwrap().replacen("\"alpha_side\":\"+\"", "\"alpha_side\":\"-\"", 1);
    fs::write(&log, edited).unwrap();
    let o = randwalls(&["verify", "--dir", tmp.path().to_str().unwrap(), "--lemmas", "embedded"]);
    assert_eq!(code(&o), 1);
    assert!(text(&o).contains("bends.jsonl: line 1"), "{}", text(&o));
}

#[test]
fn exports_dot_and_json() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(code(&build(tmp.path(), &["--fixture", "mp_example"])), 0);
    let dir = tmp.path().to_str().unwrap();
    let dot = String::from_utf8(randwalls(&["export", "--dir", dir, "--format", "dot"]).stdout).unwrap();
    assert!(dot.starts_with("graph walls"));
    assert!(dot.matches("style=dashed").count() > 0);
    let flat = tmp.path().join("flat");
    assert_eq!(code(&build(&flat, &["--fixture", "mp_example", "--no-bend"])), 0);
    let unbent = randwalls(&["export", "--dir", flat.to_str().unwrap(), "--format", "dot"]).stdout;
    assert_ne!(dot.as_bytes(), unbent.as_slice(), "bending changes the drawn walls");
    let json = randwalls(&["export", "--dir", dir, "--format", "json"]).stdout;
    let v: serde_json::Value = serde_json::from_slice(&json).unwrap();
    assert_eq!(serde_json::from_str::<serde_json::Value>(&fs::read_to_string(tmp.path().join("wallspace.json")).unwrap()).unwrap(), v);
    assert!(v["walls"].as_array().unwrap().iter().all(|w| w.get("sides").is_some()));
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use adaptor::service::generate_bytes;
use adaptor_core::annotation::AnnotationSet;
use adaptor_core::model::ApiModel;
use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_adaptor"))
}

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// extract, analyze and infer the usage fixture into `dir`.
fn pipeline(dir: &Path) {
    let shop = fixtures().join("usage/shop");
    let clients = fixtures().join("usage/clients");
    let api = dir.join("api.json");
    let usages = dir.join("usages.json");
    ok(&["extract", p(&shop), "--name", "shop", "--lib-version", "1.0", "--out", p(&api)]);
    ok(&["analyze", p(&clients), "--api", p(&api), "--out", p(&usages)]);
    ok(&[
        "infer",
        "--api",
        p(&api),
        "--usages",
        p(&usages),
        "--out",
        p(&dir.join("annotations.json")),
        "--report",
        p(&dir.join("report.json")),
        "--decisions",
        p(&dir.join("decisions.json")),
    ]);
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = run(&["extract", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["--json-errors", "extract", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["error"], "usage");
}

#[test]
fn help_exits_cleanly() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn bad_alpha_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let api = dir.path().join("api.json");
    ok(&["extract", p(&fixtures().join("usage/shop")), "--name", "shop", "--lib-version", "1.0", "--out", p(&api)]);
    let out = run(&["infer", "--api", p(&api), "--alpha", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_source_fails() {
    let out = run(&["extract", "/nonexistent/lib", "--name", "x", "--lib-version", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn pipeline_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    pipeline(a.path());
    pipeline(b.path());
    for f in ["api.json", "usages.json", "annotations.json", "report.json", "decisions.json"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        assert_eq!(x, std::fs::read(b.path().join(f)).unwrap(), "{f}");
        assert!(!x.is_empty());
    }
    let set = AnnotationSet::from_json(&std::fs::read(a.path().join("annotations.json")).unwrap()).unwrap();
    assert!(set.annotations.iter().any(|a| a.target.to_string() == "shop.pricing.legacy_price"));
}

#[test]
fn infer_without_usages_uses_docstrings_only() {
    let dir = tempfile::tempdir().unwrap();
    let api = dir.path().join("api.json");
    ok(&["extract", p(&fixtures().join("preconditions/docs")), "--name", "docs", "--lib-version", "1", "--out", p(&api)]);
    let out = ok(&["infer", "--api", p(&api)]);
    let set = AnnotationSet::from_json(&out.stdout).unwrap();
    assert!(!set.annotations.is_empty());
}

#[test]
fn generated_zip_matches_the_service() {
    let dir = tempfile::tempdir().unwrap();
    pipeline(dir.path());
    let out_dir = dir.path().join("out");
    ok(&[
        "generate",
        "--api",
        p(&dir.path().join("api.json")),
        "--annotations",
        p(&dir.path().join("annotations.json")),
        "--out-dir",
        p(&out_dir),
        "--zip",
    ]);
    assert!(out_dir.join("shop_adapted/pricing.py").is_file());
    let model = ApiModel::from_json(&std::fs::read(dir.path().join("api.json")).unwrap()).unwrap();
    let set = AnnotationSet::from_json(&std::fs::read(dir.path().join("annotations.json")).unwrap()).unwrap();
    let zip = std::fs::read(out_dir.join("adapters.zip")).unwrap();
    assert_eq!(zip, generate_bytes(&model, &set).unwrap());
}

#[test]
fn merge_conflicts_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let api = dir.path().join("api.json");
    ok(&["extract", p(&fixtures().join("usage/shop")), "--name", "shop", "--lib-version", "1.0", "--out", p(&api)]);
    let doc = |name: &str| {
        json!({
            "schema_version": 1,
            "library": {"name": "shop", "version": "1.0"},
            "annotations": [{"target": "shop.pricing.tax", "kind": "Rename", "new_name": name, "origin": {"manual": {"author": "t"}}}],
            "completed": []
        })
    };
    let left = dir.path().join("left.json");
    let right = dir.path().join("right.json");
    let same = dir.path().join("same.json");
    std::fs::write(&left, doc("levy").to_string()).unwrap();
    std::fs::write(&right, doc("duty").to_string()).unwrap();
    std::fs::write(&same, doc("levy").to_string()).unwrap();
    let conflicts = dir.path().join("conflicts.json");
    let out = run(&["merge", p(&left), p(&right), "--conflicts", p(&conflicts)]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&std::fs::read(&conflicts).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 1);
    let merged = ok(&["merge", p(&left), p(&same)]);
    assert_eq!(AnnotationSet::from_json(&merged.stdout).unwrap().annotations.len(), 1);
}

#[test]
fn evolution_commands() {
    let dir = tempfile::tempdir().unwrap();
    let v1 = dir.path().join("v1/geo");
    let v2 = dir.path().join("v2/geo");
    for (root, src) in [
        (&v1, "def area(shape, scale=1.0): ...\ndef perimeter(shape): ...\n"),
        (&v2, "def measure(shape, scale=1.0): ...\ndef perimeter(shape): ...\n"),
    ] {
        std::fs::create_dir_all(root).unwrap();
        std::fs::write(root.join("__init__.py"), src).unwrap();
    }
    let old = dir.path().join("old.json");
    let new = dir.path().join("new.json");
    ok(&["extract", p(&v1), "--name", "geo", "--lib-version", "1", "--out", p(&old)]);
    ok(&["extract", p(&v2), "--name", "geo", "--lib-version", "2", "--out", p(&new)]);
    let hints = dir.path().join("hints.json");
    std::fs::write(&hints, json!([{"old": "geo.area", "new": "geo.measure"}]).to_string()).unwrap();
    let diff = dir.path().join("diff.json");
    ok(&["diff", p(&old), p(&new), "--hints", p(&hints), "--out", p(&diff)]);
    let ann = dir.path().join("ann.json");
    let doc = json!({
        "schema_version": 1,
        "library": {"name": "geo", "version": "1"},
        "annotations": [{"target": "geo.area", "kind": "Rename", "new_name": "surface", "origin": {"manual": {"author": "t"}}}],
        "completed": []
    });
    std::fs::write(&ann, doc.to_string()).unwrap();
    let result = dir.path().join("result.json");
    ok(&["migrate", "--annotations", p(&ann), "--diff", p(&diff), "--old", p(&old), "--new", p(&new), "--out", p(&result)]);
    let v: Value = serde_json::from_slice(&std::fs::read(&result).unwrap()).unwrap();
    assert_eq!(v["conflicts"][0]["kind"], "both_renamed");

    let out = run(&["resolve", p(&result), "--new", p(&new), "--conflict", "9", "--choice", "keep_adapter"]);
    assert_eq!(out.status.code(), Some(2));
    let resolved = ok(&["resolve", p(&result), "--new", p(&new), "--conflict", "1", "--choice", "keep_adapter"]);
    let v: Value = serde_json::from_slice(&resolved.stdout).unwrap();
    assert_eq!(v["conflicts"].as_array().unwrap().len(), 0);
    assert_eq!(v["migrated"]["annotations"][0]["target"], "geo.measure");
}

//! Every decoder entry point must reject bad input with an error, not a panic.
//! Replays the checked-in fuzz corpus and adds random strings on top.

use std::path::PathBuf;

use adaptor_core::annotation::{validate, AnnotationSet, Filter, FilterContext};
use adaptor_core::docstring::{parse_docstring, rewrite_parameter_entries};
use adaptor_core::evolution::{ApiDiff, MergeResult, RenameHint, Resolution};
use adaptor_core::extract::extract_source;
use adaptor_core::inference::UsefulnessReport;
use adaptor_core::literal::LiteralValue;
use adaptor_core::model::{ApiModel, ModelIndex};
use adaptor_core::python::{parse_expression, parse_module_recovering};
use adaptor_core::usage::{analyze_source, UsageStore};
use proptest::prelude::*;

const LIB: &str = "class C:\n    def __init__(self, a, b=2): ...\n    def f(self, x, y=1): ...\ndef g(a, q=None, *args, **kw): ...\n";

fn model(name: &str) -> ApiModel {
    ApiModel {
        library_name: name.into(),
        version: "1".into(),
        modules: vec![extract_source("m.py", &"lib.m".parse().unwrap(), LIB).0],
    }
}

fn text_entry_points(s: &str) {
    let _ = parse_module_recovering(s);
    let _ = extract_source("x.py", &"lib.m".parse().unwrap(), s);
    let doc = parse_docstring(s);
    let names: Vec<&str> = doc.parameter_docs.iter().map(|p| p.name.as_str()).collect();
    let _ = rewrite_parameter_entries(s, &names[..names.len().min(1)], &[("a", "b")]);
    let _ = parse_expression(s);
    if let Ok(v) = LiteralValue::parse(s) {
        assert_eq!(LiteralValue::parse(v.canonical_text()).ok().as_ref(), Some(&v), "{s:?}");
    }
    let m = model("lib");
    if let Ok(filter) = Filter::parse(s) {
        let index = ModelIndex::new(&m);
        let set = AnnotationSet::new(&m);
        let _ = filter.select(&FilterContext::new(&index, &set, None));
    }
    let store = analyze_source("client.py", s, &m);
    assert!(store.check_model(&m).is_ok());
}

fn byte_entry_points(data: &[u8]) {
    if let Ok(m) = ApiModel::from_json(data) {
        assert_eq!(ApiModel::from_json(m.to_json().as_bytes()).unwrap(), m);
    }
    if let Ok(set) = AnnotationSet::from_json(data) {
        assert_eq!(AnnotationSet::from_json(set.to_json().as_bytes()).unwrap(), set);
        let _ = validate(&set, &model(&set.library.name));
    }
    if let Ok(store) = UsageStore::from_json(data) {
        let _ = store.merge(&store);
    }
    let _ = UsefulnessReport::from_json(data);
    let _ = serde_json::from_slice::<ApiDiff>(data);
    let _ = serde_json::from_slice::<MergeResult>(data);
    let _ = serde_json::from_slice::<Vec<RenameHint>>(data);
    let _ = serde_json::from_slice::<Resolution>(data);
    if let Ok(s) = std::str::from_utf8(data) {
        text_entry_points(s);
    }
}

#[test]
fn fuzz_corpus_replays_without_panics() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus");
    let mut seen = 0;
    for dir in std::fs::read_dir(&root).unwrap() {
        for file in std::fs::read_dir(dir.unwrap().path()).unwrap() {
            let path = file.unwrap().path();
            byte_entry_points(&std::fs::read(&path).unwrap());
            seen += 1;
        }
    }
    assert!(seen >= 30, "only {seen} seeds");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn random_text_never_panics(s in "\\PC{0,200}") {
        text_entry_points(&s);
    }

    #[test]
    fn indented_structured_text_never_panics(
        lines in proptest::collection::vec(("[ \\t\u{a0}\u{3000}]{0,6}", "[a-z_:=(),.'\\-\\[\\]{}0-9 ]{0,20}"), 0..12)
    ) {
        let s: String = lines.into_iter().map(|(i, t)| format!("{i}{t}\n")).collect();
        text_entry_points(&s);
    }

    #[test]
    fn random_bytes_never_panic(data in proptest::collection::vec(any::<u8>(), 0..300)) {
        byte_entry_points(&data);
    }
}

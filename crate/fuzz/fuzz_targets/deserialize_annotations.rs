#![no_main]

use adaptor_core::annotation::{validate, AnnotationSet};
use adaptor_core::extract::extract_source;
use adaptor_core::model::ApiModel;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(set) = AnnotationSet::from_json(data) else { return };
    let again = AnnotationSet::from_json(set.to_json().as_bytes()).expect("own output decodes");
    assert_eq!(again, set);
    let src = "class C:\n    def f(self, x, y=1): ...\ndef g(a): ...\n";
    let model = ApiModel {
        library_name: set.library.name.clone(),
        version: set.library.version.clone(),
        modules: vec![extract_source("m.py", &"lib.m".parse().unwrap(), src).0],
    };
    let _ = validate(&set, &model);
});

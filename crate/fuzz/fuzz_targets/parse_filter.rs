#![no_main]

use adaptor_core::annotation::{AnnotationSet, Filter, FilterContext};
use adaptor_core::extract::extract_source;
use adaptor_core::model::{ApiModel, ModelIndex};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(expr) = std::str::from_utf8(data) else { return };
    let Ok(filter) = Filter::parse(expr) else { return };
    let src = "class C:\n    def f(self, x, y=1): ...\ndef g(a): ...\n";
    let model = ApiModel {
        library_name: "lib".into(),
        version: "1".into(),
        modules: vec![extract_source("m.py", &"lib.m".parse().unwrap(), src).0],
    };
    let index = ModelIndex::new(&model);
    let set = AnnotationSet::new(&model);
    let _ = filter.select(&FilterContext::new(&index, &set, None));
});

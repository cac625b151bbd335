#![no_main]

use adaptor_core::extract::extract_source;
use adaptor_core::model::ApiModel;
use adaptor_core::usage::analyze_source;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    let lib = "class C:\n    def __init__(self, a, b=2): ...\n    def run(self, x='k'): ...\ndef f(p, q=None, *args, **kw): ...\n";
    let model = ApiModel {
        library_name: "lib".into(),
        version: "1".into(),
        modules: vec![extract_source("m.py", &"lib.m".parse().unwrap(), lib).0],
    };
    let store = analyze_source("client.py", src, &model);
    assert!(store.check_model(&model).is_ok());
});

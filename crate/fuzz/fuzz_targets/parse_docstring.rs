#![no_main]

use adaptor_core::docstring::{parse_docstring, rewrite_parameter_entries};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let doc = parse_docstring(text);
    let names: Vec<&str> = doc.parameter_docs.iter().map(|p| p.name.as_str()).collect();
    let _ = rewrite_parameter_entries(text, &names[..names.len().min(1)], &[("a", "b")]);
});

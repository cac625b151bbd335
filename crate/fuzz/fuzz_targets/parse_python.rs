#![no_main]

use adaptor_core::extract::extract_source;
use adaptor_core::python::parse_module_recovering;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    let _ = parse_module_recovering(src);
    let _ = extract_source("fuzz.py", &"lib.m".parse().unwrap(), src);
});

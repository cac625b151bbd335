#![no_main]

use adaptor_core::literal::LiteralValue;
use adaptor_core::python::parse_expression;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = parse_expression(text);
    if let Ok(v) = LiteralValue::parse(text) {
        // Canonical text parses back to the same value.
        assert_eq!(LiteralValue::parse(v.canonical_text()).ok().as_ref(), Some(&v));
    }
});

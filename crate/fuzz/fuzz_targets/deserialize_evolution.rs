#![no_main]

use adaptor_core::evolution::{ApiDiff, MergeResult, RenameHint, Resolution};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = serde_json::from_slice::<ApiDiff>(data);
    let _ = serde_json::from_slice::<MergeResult>(data);
    let _ = serde_json::from_slice::<Vec<RenameHint>>(data);
    let _ = serde_json::from_slice::<Resolution>(data);
});

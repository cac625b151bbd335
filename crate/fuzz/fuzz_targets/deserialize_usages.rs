#![no_main]

use adaptor_core::inference::UsefulnessReport;
use adaptor_core::usage::UsageStore;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(store) = UsageStore::from_json(data) {
        let _ = store.merge(&store);
    }
    let _ = UsefulnessReport::from_json(data);
});

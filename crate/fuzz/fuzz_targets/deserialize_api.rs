#![no_main]

use adaptor_core::model::ApiModel;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(model) = ApiModel::from_json(data) {
        let again = ApiModel::from_json(model.to_json().as_bytes()).expect("own output decodes");
        assert_eq!(again, model);
    }
});

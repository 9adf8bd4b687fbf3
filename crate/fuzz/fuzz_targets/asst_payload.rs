#![no_main]

use libfuzzer_sys::fuzz_target;
use sstforge::json::{asst_from_json, asst_to_json, AsstJson};

fuzz_target!(|data: &[u8]| {
    let Ok(payload) = serde_json::from_slice::<AsstJson>(data) else { return };
    if let Ok(m) = asst_from_json(&payload) {
        let back = asst_from_json(&asst_to_json(&m)).expect("serialized payload decodes");
        assert_eq!(asst_to_json(&back), asst_to_json(&m));
    }
});

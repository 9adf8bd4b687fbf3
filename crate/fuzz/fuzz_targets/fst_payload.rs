#![no_main]

use libfuzzer_sys::fuzz_target;
use sstforge::json::{fst_from_json, fst_to_json, FstJson};

fuzz_target!(|data: &[u8]| {
    let Ok(payload) = serde_json::from_slice::<FstJson>(data) else { return };
    if let Ok(m) = fst_from_json(&payload) {
        let back = fst_from_json(&fst_to_json(&m)).expect("serialized payload decodes");
        assert_eq!(fst_to_json(&back), fst_to_json(&m));
    }
});

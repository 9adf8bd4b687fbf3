#![no_main]

use libfuzzer_sys::fuzz_target;
use sstforge::json::{dfa_from_json, dfa_to_json, DfaJson};

fuzz_target!(|data: &[u8]| {
    let Ok(payload) = serde_json::from_slice::<DfaJson>(data) else { return };
    if let Ok(m) = dfa_from_json(&payload) {
        let back = dfa_from_json(&dfa_to_json(&m)).expect("serialized payload decodes");
        assert_eq!(dfa_to_json(&back), dfa_to_json(&m));
    }
});

#![no_main]

use libfuzzer_sys::fuzz_target;
use sstforge::json::{precongruence_from_json, precongruence_to_json, PrecongruenceJson};

fuzz_target!(|data: &[u8]| {
    let Ok(payload) = serde_json::from_slice::<PrecongruenceJson>(data) else { return };
    if let Ok(m) = precongruence_from_json(&payload) {
        let back = precongruence_from_json(&precongruence_to_json(&m)).expect("serialized payload decodes");
        assert_eq!(precongruence_to_json(&back), precongruence_to_json(&m));
    }
});

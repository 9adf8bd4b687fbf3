#![no_main]

use libfuzzer_sys::fuzz_target;
use sstforge::json::{bimachine_from_json, bimachine_to_json, BimachineJson};

fuzz_target!(|data: &[u8]| {
    let Ok(payload) = serde_json::from_slice::<BimachineJson>(data) else { return };
    if let Ok(m) = bimachine_from_json(&payload) {
        let back = bimachine_from_json(&bimachine_to_json(&m)).expect("serialized payload decodes");
        assert_eq!(bimachine_to_json(&back), bimachine_to_json(&m));
    }
});

#![no_main]

use libfuzzer_sys::fuzz_target;
use sstforge::json::{async_from_json, async_to_json, AsyncBimachineJson};

fuzz_target!(|data: &[u8]| {
    let Ok(payload) = serde_json::from_slice::<AsyncBimachineJson>(data) else { return };
    if let Ok(m) = async_from_json(&payload) {
        let back = async_from_json(&async_to_json(&m)).expect("serialized payload decodes");
        assert_eq!(async_to_json(&back), async_to_json(&m));
    }
});

#![no_main]

use libfuzzer_sys::fuzz_target;
use sstforge::json::{graph_from_json, graph_to_json, GraphJson};

fuzz_target!(|data: &[u8]| {
    let Ok(payload) = serde_json::from_slice::<GraphJson>(data) else { return };
    if let Ok(m) = graph_from_json(&payload) {
        let back = graph_from_json(&graph_to_json(&m)).expect("serialized payload decodes");
        assert_eq!(graph_to_json(&back), graph_to_json(&m));
    }
});

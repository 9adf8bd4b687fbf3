#![no_main]

use libfuzzer_sys::fuzz_target;
use sstforge::json::{nfa_from_json, nfa_to_json, NfaJson};

fuzz_target!(|data: &[u8]| {
    let Ok(payload) = serde_json::from_slice::<NfaJson>(data) else { return };
    if let Ok(m) = nfa_from_json(&payload) {
        let back = nfa_from_json(&nfa_to_json(&m)).expect("serialized payload decodes");
        assert_eq!(nfa_to_json(&back), nfa_to_json(&m));
    }
});

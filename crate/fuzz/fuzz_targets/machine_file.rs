#![no_main]

use libfuzzer_sys::fuzz_target;
use sstforge::json;

fuzz_target!(|data: &[u8]| {
    let Ok(m) = json::from_slice(data) else { return };
    // Whatever parses must survive a round trip unchanged.
    let text = json::to_string(&m);
    let again = json::from_str(&text).expect("emitted file re-parses");
    assert_eq!(json::to_string(&again), text);
    let _ = sstforge::dot::machine(&m, "fuzz");
});

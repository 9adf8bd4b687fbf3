#![no_main]

use libfuzzer_sys::fuzz_target;
use sstforge::{Symbol, Word};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(w) = Word::parse(text) {
        assert_eq!(w.len(), text.split_whitespace().count());
        let spaced: Vec<&str> = w.iter().map(|s| s.as_str()).collect();
        assert_eq!(Word::parse(&spaced.join(" ")).unwrap(), w);
    }
    let _ = Symbol::new(text);
});

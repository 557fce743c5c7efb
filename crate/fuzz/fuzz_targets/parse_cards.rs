#![no_main]

use libfuzzer_sys::fuzz_target;

// Card-list parser; accepted cards must have valid deck indices.
fuzz_target!(|text: &str| {
    if let Ok(cards) = miner::cards::parse_cards(text) {
        for c in cards {
            assert!(c.index() < 52);
        }
    }
});

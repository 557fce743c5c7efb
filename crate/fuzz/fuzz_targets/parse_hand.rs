#![no_main]

use libfuzzer_sys::fuzz_target;

// Single-block parser. Accepted hands must replay without panicking and
// round-trip through the archive encoding.
fuzz_target!(|text: &str| {
    if let Ok(hand) = miner::handlog::parse_hand(text) {
        let _ = miner::replay::replay(&hand);
        let json = serde_json::to_string(&hand).unwrap();
        let back: miner::handlog::ParsedHand = serde_json::from_str(&json).unwrap();
        assert_eq!(hand, back);
    }
});

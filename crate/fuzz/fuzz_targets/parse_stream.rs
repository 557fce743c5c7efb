#![no_main]

use libfuzzer_sys::fuzz_target;
use std::io::BufReader;

// Arbitrary bytes through the streaming log parser; every hand it accepts
// must also survive replay without panicking.
fuzz_target!(|data: &[u8]| {
    for item in miner::handlog::parse_stream(BufReader::new(data)) {
        if let miner::handlog::StreamItem::Hand(hand) = item {
            let _ = miner::replay::replay(&hand);
        }
    }
});

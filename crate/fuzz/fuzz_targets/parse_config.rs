#![no_main]

use libfuzzer_sys::fuzz_target;

// Pipeline config decoder (key = value text).
fuzz_target!(|text: &str| {
    let _ = toml::from_str::<miner::pipeline::PipelineConfig>(text);
});

#![no_main]

use libfuzzer_sys::fuzz_target;

// Strategy-model decoder, including the embedded mixture and removed-attribute
// bookkeeping.
fuzz_target!(|text: &str| {
    if let Ok(model) = miner::profile::StrategyModel::from_json(text) {
        let id = model.model_id();
        let back = miner::profile::StrategyModel::from_json(&model.to_json()).unwrap();
        assert_eq!(id, back.model_id());
    }
});

#![no_main]

use libfuzzer_sys::fuzz_target;

// Mixture-model decoder. Accepted models validate by construction, so their
// ids and re-encodings must be stable.
fuzz_target!(|text: &str| {
    if let Ok(model) = miner::em::MixtureModel::from_json(text) {
        let id = model.model_id();
        let back = miner::em::MixtureModel::from_json(&model.to_json()).unwrap();
        assert_eq!(id, back.model_id());
    }
});

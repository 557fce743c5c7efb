#![no_main]

use libfuzzer_sys::fuzz_target;

// Dataset decoder. Anything it accepts must survive a write/read round trip.
fuzz_target!(|text: &str| {
    if let Ok(ds) = miner::arff::read_arff(text.as_bytes()) {
        let written = miner::arff::write_arff_to_string(&ds);
        let back = miner::arff::read_arff(written.as_bytes()).unwrap();
        assert_eq!(ds.n_rows(), back.n_rows());
        assert_eq!(ds.attrs.len(), back.attrs.len());
    }
});
